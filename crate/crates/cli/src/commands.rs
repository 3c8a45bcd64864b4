use std::fmt;
use std::path::Path;
use std::time::Instant;

use hatm_core::series::BoundSeries;
use hatm_core::{
    h_curve, oracle, partial_sum, preset, residual, run_report, Config, HatmError, Point, Probe, Problem, ProblemFile,
    Series,
};
use serde_json::{json, Value};

use crate::args::{samples, Common, Format, Grid, ProbeArgs};
use crate::output::{pretty, Cell, Table};

/// A failure with its process exit code: 2 for configuration problems, 3 for
/// failures inside the solver.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }

    pub fn engine(message: impl Into<String>) -> Self {
        Self { code: 3, message: message.into() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<HatmError> for CliError {
    fn from(e: HatmError) -> Self {
        match e {
            HatmError::Config(_)
            | HatmError::Problem(_)
            | HatmError::Parse(_)
            | HatmError::UnknownPreset(_)
            | HatmError::NoOracle(_)
            | HatmError::Serde(_) => Self::config(e.to_string()),
            _ => Self::engine(e.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

enum Source {
    Preset(String),
    File(String),
}

/// A loaded problem together with the validated configuration.
struct Setup {
    source: Source,
    problem: Problem,
    config: Config,
}

impl Setup {
    fn load(common: &Common) -> CliResult<Self> {
        let (source, problem) = match (&common.preset, &common.problem) {
            (Some(id), None) => (Source::Preset(id.clone()), preset(id)?),
            (None, Some(path)) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
                (Source::File(path.display().to_string()), ProblemFile::from_json(&text)?.to_problem()?)
            }
            _ => return Err(CliError::config("give exactly one of --preset or --problem")),
        };
        let config = Config::new(common.alpha, common.hbar, common.order)?.with_taylor_terms(common.taylor_terms)?;
        Ok(Self { source, problem, config })
    }

    fn preset_id(&self) -> Option<&str> {
        match &self.source {
            Source::Preset(id) => Some(id),
            Source::File(_) => None,
        }
    }

    fn echo(&self) -> Value {
        let source = match &self.source {
            Source::Preset(id) => json!({ "preset": id }),
            Source::File(path) => json!({ "problem": path }),
        };
        json!({
            "source": source,
            "dim": self.problem.dim(),
            "alpha": self.config.alpha,
            "hbar": self.config.hbar,
            "order": self.config.order,
            "taylor_terms": self.config.taylor_terms,
        })
    }
}

pub fn write_output(text: &str, out: Option<&Path>) -> CliResult<()> {
    match out {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| CliError::engine(format!("cannot write {}: {e}", path.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn space_columns(dim: u8) -> Vec<&'static str> {
    if dim == 2 {
        vec!["x", "y", "t"]
    } else {
        vec!["x", "t"]
    }
}

fn space_cells(dim: u8, (x, y, t): (f64, f64, f64)) -> Vec<Cell> {
    if dim == 2 {
        vec![x.into(), y.into(), t.into()]
    } else {
        vec![x.into(), t.into()]
    }
}

pub fn solve(common: &Common) -> CliResult<String> {
    let setup = Setup::load(common)?;
    let start = Instant::now();
    let report = run_report(&setup.problem, &setup.config)?;
    let sum = partial_sum(&report.iterates, setup.config.order)?;
    let wall = start.elapsed().as_secs_f64();
    Ok(match common.format {
        Format::Json => pretty(&json!({
            "config": setup.echo(),
            "iterates": report.iterates,
            "partial_sum": sum,
            "taylor_events": report.taylor_events,
            "wall_time_s": wall,
        })),
        Format::Csv => {
            let mut table = Table::new(vec!["m", "p", "q", "c", "coefficient", "spatial"]);
            for (m, u) in report.iterates.iter().enumerate() {
                for term in u.terms() {
                    table.rows.push(vec![
                        Cell::Text(m.to_string()),
                        Cell::Text(term.time.p().to_string()),
                        Cell::Text(term.time.q().to_string()),
                        Cell::Text(term.time.c().to_string()),
                        term.coef.evaluate(setup.config.alpha)?.into(),
                        Cell::Text(term.spatial.to_string()),
                    ]);
                }
            }
            table.render(Format::Csv)
        }
    })
}

/// Partial sum, dimension, alpha and preset id stored in a `solve` report.
fn load_report(path: &Path) -> CliResult<(Series, u8, f64, Option<String>)> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
    let doc: Value = serde_json::from_str(&text).map_err(|e| CliError::config(format!("bad report: {e}")))?;
    let config = &doc["config"];
    let alpha = config["alpha"].as_f64().ok_or_else(|| CliError::config("report lacks config.alpha"))?;
    let dim = config["dim"].as_u64().ok_or_else(|| CliError::config("report lacks config.dim"))? as u8;
    let id = config["source"]["preset"].as_str().map(str::to_string);
    let sum = serde_json::from_value::<Series>(doc["partial_sum"].clone())
        .map_err(|e| CliError::config(format!("bad partial sum: {e}")))?;
    Ok((sum, dim, alpha, id))
}

fn eval_table(sum: &BoundSeries<f64>, dim: u8, alpha: f64, id: Option<&str>, grid: &Grid) -> CliResult<Table> {
    let with_exact = alpha == 1.0 && id.is_some();
    let mut columns = space_columns(dim);
    columns.push("u");
    if with_exact {
        columns.extend(["u_exact", "abs_err"]);
    }
    columns.push("status");
    let mut table = Table::new(columns);
    for pt in grid.points(dim) {
        let point = Point::new(pt.0, pt.1);
        let mut row = space_cells(dim, pt);
        match sum.evaluate(point, pt.2) {
            Ok(u) => {
                row.push(u.into());
                if let Some(id) = id.filter(|_| with_exact) {
                    let exact = oracle(id, point, pt.2, alpha)?;
                    row.extend([exact.into(), (u - exact).abs().into()]);
                }
                row.push(Cell::Text("ok".into()));
            }
            Err(e) => {
                row.push(Cell::Empty);
                if with_exact {
                    row.extend([Cell::Empty, Cell::Empty]);
                }
                eprintln!("hatm: x = {}, y = {}, t = {}: {e}", pt.0, pt.1, pt.2);
                row.push(Cell::Text("singular".into()));
            }
        }
        table.rows.push(row);
    }
    Ok(table)
}

pub fn eval(common: &Common, grid: &Grid, series: Option<&Path>) -> CliResult<String> {
    let table = match series {
        Some(path) => {
            if common.preset.is_some() || common.problem.is_some() {
                return Err(CliError::config("--series replaces --preset and --problem"));
            }
            let (sum, dim, alpha, id) = load_report(path)?;
            eval_table(&sum.bind(alpha)?, dim, alpha, id.as_deref(), grid)?
        }
        None => {
            let setup = Setup::load(common)?;
            let report = run_report(&setup.problem, &setup.config)?;
            let sum = partial_sum(&report.iterates, setup.config.order)?;
            let alpha = setup.config.alpha;
            eval_table(&sum.bind(alpha)?, setup.problem.dim(), alpha, setup.preset_id(), grid)?
        }
    };
    Ok(table.render(common.format))
}

pub fn residuals(common: &Common, grid: &Grid) -> CliResult<String> {
    let setup = Setup::load(common)?;
    let report = run_report(&setup.problem, &setup.config)?;
    let sum = partial_sum(&report.iterates, setup.config.order)?;
    let dim = setup.problem.dim();
    let points = grid.points(dim);
    let probes: Vec<Probe<f64>> = points.iter().map(|&(x, y, t)| Probe::new(x, y, t)).collect();
    let values = residual(&setup.problem, &sum, &setup.config, &probes)?;
    let mut columns = space_columns(dim);
    columns.push("residual");
    let mut table = Table::new(columns);
    for (pt, r) in points.into_iter().zip(values) {
        let mut row = space_cells(dim, pt);
        row.push(r.into());
        table.rows.push(row);
    }
    table.summary.push(("max_residual", table_max(&table)));
    Ok(table.render(common.format))
}

fn table_max(table: &Table) -> f64 {
    table
        .rows
        .iter()
        .filter_map(|r| match r.last() {
            Some(Cell::Num(v)) => Some(*v),
            _ => None,
        })
        .fold(0.0, f64::max)
}

pub fn hcurve(common: &Common, probe: &ProbeArgs, h_min: f64, h_max: f64, n: usize) -> CliResult<String> {
    if n == 0 {
        return Err(CliError::config("--n must be positive"));
    }
    let setup = Setup::load(common)?;
    let hs: Vec<f64> = samples(h_min, h_max, n).into_iter().filter(|h| *h != 0.0).collect();
    if hs.is_empty() {
        return Err(CliError::config("every hbar sample is zero"));
    }
    let curve = h_curve(&setup.problem, &setup.config, Probe::new(probe.x, probe.y, probe.t), &hs)?;
    let mut table = Table::new(vec!["hbar", "value"]);
    for (h, v) in curve {
        table.rows.push(vec![h.into(), v.into()]);
    }
    Ok(table.render(common.format))
}

pub fn compare(common: &Common, grid: &Grid) -> CliResult<String> {
    let setup = Setup::load(common)?;
    let id = setup.preset_id().ok_or_else(|| CliError::config("no oracle registered for problem files"))?.to_string();
    let report = run_report(&setup.problem, &setup.config)?;
    let alpha = setup.config.alpha;
    let sum = partial_sum(&report.iterates, setup.config.order)?.bind(alpha)?;
    let dim = setup.problem.dim();
    let mut columns = space_columns(dim);
    columns.extend(["u_hatm", "u_oracle", "abs_err"]);
    let mut table = Table::new(columns);
    for pt in grid.points(dim) {
        let point = Point::new(pt.0, pt.1);
        let u = sum.evaluate(point, pt.2)?;
        let exact = oracle(&id, point, pt.2, alpha)?;
        let mut row = space_cells(dim, pt);
        row.extend([u.into(), exact.into(), (u - exact).abs().into()]);
        table.rows.push(row);
    }
    table.summary.push(("max_abs_err", table_max(&table)));
    Ok(table.render(common.format))
}

//! Cartesian sweeps over condition numbers, tolerances and seeds, written as CSV.

use std::cmp::Ordering;

use rayon::prelude::*;

use crate::config::{invalid, Caps, ConfigError, Mode, ProblemConfig, SolverConfig, SweepConfig, SweepProblem, SweepSolver};
use crate::run::{execute, RunStatus};

/// The CSV header, in column order.
pub const HEADER: [&str; 17] = [
    "solver",
    "problem",
    "dim_x",
    "dim_y",
    "kappa_x",
    "kappa_y",
    "eps",
    "mode",
    "seed",
    "grad_x_calls",
    "grad_y_calls",
    "outer_iters",
    "certificate",
    "cert_error",
    "wall_time_ms",
    "status",
    "clamped",
];

/// Environment variable overriding the configured worker count.
pub const WORKERS_ENV: &str = "MINIMAX_BENCH_WORKERS";

/// One grid point.
#[derive(Clone, Debug, PartialEq)]
pub struct Cell {
    pub index: usize,
    pub solver: SweepSolver,
    pub kappa: Option<(f64, f64)>,
    pub eps: f64,
    /// Grid seed xor cell index; drives both instance generation and the solver.
    pub seed: u64,
}

/// One output row before formatting.
#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub solver: &'static str,
    pub problem: &'static str,
    pub dim_x: Option<usize>,
    pub dim_y: Option<usize>,
    pub kappa_x: Option<f64>,
    pub kappa_y: Option<f64>,
    pub eps: f64,
    pub mode: Mode,
    pub seed: u64,
    pub grad_x_calls: Option<u64>,
    pub grad_y_calls: Option<u64>,
    pub outer_iters: Option<u64>,
    pub certificate: Option<f64>,
    pub cert_error: Option<f64>,
    pub wall_time_ms: Option<f64>,
    pub status: RunStatus,
    pub clamped: String,
}

impl Row {
    pub fn gradient_calls(&self) -> Option<u64> {
        Some(self.grad_x_calls? + self.grad_y_calls?)
    }
}

pub fn cells(config: &SweepConfig) -> Vec<Cell> {
    let g = &config.grid;
    let kappas: Vec<Option<(f64, f64)>> = match config.problem {
        SweepProblem::Fixed { .. } => vec![None],
        _ => g.kappa_x.iter().flat_map(|kx| g.kappa_y.iter().map(move |ky| Some((*kx, *ky)))).collect(),
    };
    let mut out = Vec::new();
    for solver in &config.solvers {
        for kappa in &kappas {
            for eps in &g.eps {
                for seed in &g.seeds {
                    let index = out.len();
                    out.push(Cell { index, solver: solver.clone(), kappa: *kappa, eps: *eps, seed: seed ^ index as u64 });
                }
            }
        }
    }
    out
}

fn cell_problem(template: &SweepProblem, cell: &Cell) -> ProblemConfig {
    match (template, cell.kappa) {
        (SweepProblem::DiagonalQuadratic { coupling }, Some((kappa_x, kappa_y))) => {
            ProblemConfig::DiagonalQuadratic { kappa_x, kappa_y, coupling: *coupling, seed: cell.seed }
        }
        (SweepProblem::RandomQuadratic { dim_x, dim_y, coupling }, Some((kappa_x, kappa_y))) => {
            ProblemConfig::RandomQuadratic { dim_x: *dim_x, dim_y: *dim_y, kappa_x, kappa_y, coupling: *coupling, seed: cell.seed }
        }
        (SweepProblem::Fixed { problem }, _) => problem.clone(),
        _ => unreachable!("validated sweep configs pair quadratic templates with condition numbers"),
    }
}

pub fn run_cell(template: &SweepProblem, caps: &Caps, timing: bool, cell: &Cell) -> Row {
    let problem = cell_problem(template, cell);
    let s = &cell.solver;
    let solver = SolverConfig {
        name: s.name,
        eps: cell.eps,
        iterations: s.iterations,
        seed: Some(cell.seed),
        mode: s.mode,
        x0: None,
        y0: None,
        eta: s.eta,
        warm_start_inner: s.warm_start_inner,
        cert_tol: s.cert_tol,
    };
    match execute(&problem, &solver, caps, timing) {
        Ok(r) => Row {
            solver: r.solver,
            problem: r.problem,
            dim_x: Some(r.dim_x),
            dim_y: Some(r.dim_y),
            kappa_x: cell.kappa.map(|k| k.0).or(r.kappa_x),
            kappa_y: cell.kappa.map(|k| k.1).or(r.kappa_y),
            eps: cell.eps,
            mode: s.mode,
            seed: cell.seed,
            grad_x_calls: Some(r.grad_x_calls),
            grad_y_calls: Some(r.grad_y_calls),
            outer_iters: Some(r.outer_iters),
            certificate: r.certificate.as_ref().map(|c| c.value),
            cert_error: r.certificate.as_ref().map(|c| c.error),
            wall_time_ms: r.wall_time_ms,
            status: r.status,
            clamped: r.clamped,
        },
        Err(_) => Row {
            solver: s.name.as_str(),
            problem: problem.family(),
            dim_x: None,
            dim_y: None,
            kappa_x: cell.kappa.map(|k| k.0),
            kappa_y: cell.kappa.map(|k| k.1),
            eps: cell.eps,
            mode: s.mode,
            seed: cell.seed,
            grad_x_calls: None,
            grad_y_calls: None,
            outer_iters: None,
            certificate: None,
            cert_error: None,
            wall_time_ms: None,
            status: RunStatus::InvalidConfig,
            clamped: String::new(),
        },
    }
}

fn cmp_opt(a: Option<f64>, b: Option<f64>) -> Ordering {
    match (a, b) {
        (Some(a), Some(b)) => a.total_cmp(&b),
        (a, b) => a.is_some().cmp(&b.is_some()),
    }
}

/// Sort order of the output: solver, kappa_x, kappa_y, eps, seed.
pub fn row_order(a: &Row, b: &Row) -> Ordering {
    a.solver
        .cmp(b.solver)
        .then_with(|| cmp_opt(a.kappa_x, b.kappa_x))
        .then_with(|| cmp_opt(a.kappa_y, b.kappa_y))
        .then_with(|| a.eps.total_cmp(&b.eps))
        .then_with(|| a.seed.cmp(&b.seed))
}

fn worker_count(config: &SweepConfig) -> Result<Option<usize>, ConfigError> {
    match std::env::var(WORKERS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(invalid(format!("{WORKERS_ENV} must be a positive integer, got {v:?}"))),
        },
        Err(_) => Ok(config.workers.filter(|n| *n > 0)),
    }
}

/// Runs every cell and returns the rows in output order.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<Row>, ConfigError> {
    config.validate()?;
    let cells = cells(config);
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = worker_count(config)? {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| invalid(format!("thread pool: {e}")))?;
    let mut rows: Vec<Row> = pool.install(|| cells.par_iter().map(|c| run_cell(&config.problem, &config.caps, config.timing, c)).collect());
    rows.sort_by(row_order);
    Ok(rows)
}

/// Shortest decimal string that parses back to the same `f64`.
pub fn format_number(v: f64) -> String {
    format!("{v:?}")
}

fn opt<T>(v: Option<T>, f: impl Fn(T) -> String) -> String {
    v.map(f).unwrap_or_default()
}

pub fn to_csv(rows: &[Row]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(HEADER).expect("in-memory write");
    for r in rows {
        let fields = [
            r.solver.to_string(),
            r.problem.to_string(),
            opt(r.dim_x, |v| v.to_string()),
            opt(r.dim_y, |v| v.to_string()),
            opt(r.kappa_x, format_number),
            opt(r.kappa_y, format_number),
            format_number(r.eps),
            match r.mode {
                Mode::Faithful => "faithful".to_string(),
                Mode::Practical => "practical".to_string(),
            },
            r.seed.to_string(),
            opt(r.grad_x_calls, |v| v.to_string()),
            opt(r.grad_y_calls, |v| v.to_string()),
            opt(r.outer_iters, |v| v.to_string()),
            opt(r.certificate, format_number),
            opt(r.cert_error, format_number),
            opt(r.wall_time_ms, format_number),
            r.status.as_str().to_string(),
            r.clamped.clone(),
        ];
        w.write_record(&fields).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
}

/// Least-squares slope of `log10(y)` against `log10(x)`.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let lx: Vec<f64> = points.iter().map(|p| p.0.log10()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.1.log10()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

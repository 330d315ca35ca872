//! One configured solve and its machine-readable record.

use std::time::Instant;

use minimax_core::appa::suggest_t;
use minimax_core::drivers::{cc_solve, minimax_appa, minimax_ppa, nc_moreau_solve, nc_solve, scc_solve};
use minimax_core::general_iteration::{nc_accelerated, nsc_accelerated, scc_near_optimal, scsc_near_optimal, suggest_t_scsc};
use minimax_core::maximin_ag2::maximin_ag2;
use minimax_core::metrics::{duality_gap, moreau_grad_norm, phi_grad_norm, stationarity_f, Certificate, CertificateKind, ProxTarget};
use minimax_core::vector::dist_sq;
use minimax_core::{MinimaxProblem, SolverReport, Status};
use serde::Serialize;

use crate::config::{invalid, Caps, ConfigError, Mode, ProblemConfig, SolverConfig, SolverName};

/// Final status of a run, a superset of the solver statuses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Ok,
    BudgetExhausted,
    NumericalFailure,
    Uncertifiable,
    InvalidConfig,
}

impl RunStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            RunStatus::Ok => "ok",
            RunStatus::BudgetExhausted => "budget_exhausted",
            RunStatus::NumericalFailure => "numerical_failure",
            RunStatus::Uncertifiable => "uncertifiable",
            RunStatus::InvalidConfig => "invalid_config",
        }
    }
}

impl From<Status> for RunStatus {
    fn from(s: Status) -> Self {
        match s {
            Status::Ok => RunStatus::Ok,
            Status::BudgetExhausted => RunStatus::BudgetExhausted,
            Status::NumericalFailure => RunStatus::NumericalFailure,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertificateRecord {
    pub kind: &'static str,
    pub value: f64,
    pub error: f64,
    pub method: &'static str,
    pub inner_tol: f64,
    /// `value <= eps + error`
    pub meets_eps: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LedgerRecord {
    pub name: String,
    pub theoretical: f64,
    pub applied: f64,
    pub clamped: bool,
    pub occurrences: u64,
}

/// Everything known about one run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunRecord {
    pub solver: &'static str,
    pub problem: &'static str,
    pub problem_config: ProblemConfig,
    pub dim_x: usize,
    pub dim_y: usize,
    pub ell: f64,
    pub mu_x: f64,
    pub mu_y: f64,
    pub kappa_x: Option<f64>,
    pub kappa_y: Option<f64>,
    pub eps: f64,
    pub mode: Mode,
    pub seed: Option<u64>,
    pub iterations: Option<u64>,
    pub caps: Caps,
    pub grad_x_calls: u64,
    pub grad_y_calls: u64,
    pub value_calls: u64,
    pub outer_iters: u64,
    pub inner_iters: u64,
    pub wall_time_ms: Option<f64>,
    pub status: RunStatus,
    pub solver_status: &'static str,
    pub certificate: Option<CertificateRecord>,
    pub certificate_failure: Option<String>,
    pub selected_index: Option<u64>,
    /// `"no"`, or the clamped ledger names joined by `;`.
    pub clamped: String,
    pub ledger: Vec<LedgerRecord>,
    pub x: Vec<f64>,
    pub y: Option<Vec<f64>>,
}

struct Outcome {
    x: Vec<f64>,
    y: Option<Vec<f64>>,
    report: SolverReport,
}

fn kappa(ell: f64, mu: f64) -> Option<f64> {
    (mu > 0.0).then(|| ell / mu)
}

/// `T` from the problem when the solver has a formula for it.
fn default_iterations(p: &MinimaxProblem, cfg: &SolverConfig, x0: &[f64], y0: &[f64]) -> Result<u64, ConfigError> {
    let need = || invalid(format!("solver.iterations is required for {}", cfg.name.as_str()));
    let prof = p.profile;
    match cfg.name {
        SolverName::MinimaxAppa => {
            let kx = kappa(prof.ell, prof.mu_x).ok_or_else(need)?;
            // g(x0) - g* + (mu/4)||x0 - x*||^2 <= 1.5 * gap(x0, y0) by strong convexity.
            let gap = duality_gap(p, x0, y0, cfg.cert_tol).map_err(|_| need())?;
            Ok(suggest_t(kx, 1.5 * (gap.value + gap.error), cfg.eps))
        }
        SolverName::ScscNearOptimal => {
            let kx = kappa(prof.ell, prof.mu_x).ok_or_else(need)?;
            let ky = kappa(prof.ell, prof.mu_y).ok_or_else(need)?;
            let d0 = match &p.reference.saddle {
                Some((xs, _)) => dist_sq(x0, xs),
                None => {
                    let gap = duality_gap(p, x0, y0, cfg.cert_tol).map_err(|_| need())?;
                    2.0 * (gap.value + gap.error) / prof.mu_x
                }
            };
            Ok(suggest_t_scsc(kx, ky, d0, cfg.eps))
        }
        _ => Err(need()),
    }
}

fn dispatch(p: &MinimaxProblem, cfg: &SolverConfig, caps: &Caps, x0: &[f64], y0: &[f64], t: u64) -> Result<Outcome, ConfigError> {
    let opts = cfg.options(caps);
    let prof = p.profile;
    let (ell, eps) = (prof.ell, cfg.eps);
    let seed = cfg.seed.unwrap_or(0);
    let saddle = |o: minimax_core::drivers::SaddleOutput| Outcome { x: o.x, y: Some(o.y), report: o.report };
    let point = |o: minimax_core::general_iteration::PointOutput| Outcome { x: o.x, y: None, report: o.report };
    Ok(match cfg.name {
        SolverName::MinimaxAppa => saddle(minimax_appa(p, x0, y0, ell, prof.mu_x, prof.mu_y, eps, t, &opts)?),
        SolverName::MaximinAg2 => {
            let o = maximin_ag2(p, x0, y0, ell, prof.mu_x, prof.mu_y, eps, &opts)?;
            Outcome { x: o.x, y: Some(o.y), report: o.report }
        }
        SolverName::SccSolve => saddle(scc_solve(p, x0, y0, ell, prof.mu_x, eps, t, &opts)?),
        SolverName::CcSolve => saddle(cc_solve(p, x0, y0, ell, eps, t, &opts)?),
        SolverName::MinimaxPpa => saddle(minimax_ppa(p, x0, y0, ell, prof.mu_y, eps, t, seed, &opts)?),
        SolverName::NcSolve => saddle(nc_solve(p, x0, y0, ell, eps, t, seed, &opts)?),
        SolverName::NcMoreauSolve => saddle(nc_moreau_solve(p, x0, y0, ell, eps, t, seed, &opts)?),
        SolverName::ScscNearOptimal => {
            let opts = minimax_core::SolverOptions { y_start: Some(y0.to_vec()), ..opts };
            saddle(scsc_near_optimal(p, x0, eps, t, &opts)?)
        }
        SolverName::SccNearOptimal => saddle(scc_near_optimal(p, x0, y0, eps, t, &opts)?),
        SolverName::NscAccelerated => {
            let opts = minimax_core::SolverOptions { y_start: Some(y0.to_vec()), ..opts };
            point(nsc_accelerated(p, x0, eps, t, seed, &opts)?)
        }
        SolverName::NcAccelerated => point(nc_accelerated(p, x0, y0, eps, t, seed, &opts)?),
    })
}

/// The optimality measure that matches each solver's guarantee.
fn certify(p: &MinimaxProblem, name: SolverName, x: &[f64], y: Option<&[f64]>, tol: f64) -> Result<Certificate, minimax_core::Error> {
    match name {
        SolverName::MinimaxPpa | SolverName::NscAccelerated => phi_grad_norm(p, x, tol),
        SolverName::NcSolve => {
            let y = y.expect("nc_solve returns a pair");
            let (rx, ry) = stationarity_f(p, x, y)?;
            Ok(Certificate { kind: CertificateKind::StationarityF, value: rx.max(ry), error: 0.0, inner_tol: 0.0, method: minimax_core::metrics::CertMethod::ClosedForm })
        }
        SolverName::NcMoreauSolve | SolverName::NcAccelerated => match &p.reference.phi {
            Some(phi) => moreau_grad_norm(&ProxTarget::Function(&**phi), x, p.ell(), tol),
            None => moreau_grad_norm(&ProxTarget::Minimax(p), x, p.ell(), tol),
        },
        _ => duality_gap(p, x, y.expect("saddle solvers return a pair"), tol),
    }
}

fn kind_name(k: CertificateKind) -> &'static str {
    match k {
        CertificateKind::DualityGap => "duality_gap",
        CertificateKind::StationarityF => "stationarity_f",
        CertificateKind::PhiGrad => "phi_grad_norm",
        CertificateKind::MoreauGrad => "moreau_grad_norm",
    }
}

fn start_point(given: &Option<Vec<f64>>, set: &minimax_core::ConstraintSet, what: &str) -> Result<Vec<f64>, ConfigError> {
    match given {
        Some(v) if v.len() != set.dim() => Err(invalid(format!("{what} has dimension {}, expected {}", v.len(), set.dim()))),
        Some(v) => Ok(v.clone()),
        None => Ok(set.default_point()),
    }
}

/// Runs one solve. Configuration problems, including solver preconditions
/// the problem does not meet, come back as `Err`.
pub fn execute(problem: &ProblemConfig, cfg: &SolverConfig, caps: &Caps, timing: bool) -> Result<RunRecord, ConfigError> {
    cfg.validate()?;
    let p = problem.build()?;
    let x0 = start_point(&cfg.x0, &p.set_x, "solver.x0")?;
    let y0 = start_point(&cfg.y0, &p.set_y, "solver.y0")?;
    let t = match (cfg.name, cfg.iterations) {
        (SolverName::MaximinAg2, _) => None,
        (_, Some(t)) => Some(t),
        (_, None) => Some(default_iterations(&p, cfg, &x0, &y0)?),
    };

    let start = Instant::now();
    let out = dispatch(&p, cfg, caps, &x0, &y0, t.unwrap_or(0))?;
    let elapsed = start.elapsed().as_secs_f64() * 1e3;

    let mut status = RunStatus::from(out.report.status);
    let (certificate, certificate_failure) = match certify(&p, cfg.name, &out.x, out.y.as_deref(), cfg.cert_tol) {
        Ok(c) => {
            let rec = CertificateRecord {
                kind: kind_name(c.kind),
                value: c.value,
                error: c.error,
                method: c.method.as_str(),
                inner_tol: c.inner_tol,
                meets_eps: c.certifies(cfg.eps),
            };
            (Some(rec), None)
        }
        Err(e) => {
            if status == RunStatus::Ok {
                status = RunStatus::Uncertifiable;
            }
            (None, Some(e.to_string()))
        }
    };

    let ledger = &out.report.ledger;
    let clamped: Vec<&str> = ledger.clamped_names().collect();
    let prof = p.profile;
    Ok(RunRecord {
        solver: cfg.name.as_str(),
        problem: problem.family(),
        problem_config: problem.clone(),
        dim_x: p.dim_x(),
        dim_y: p.dim_y(),
        ell: prof.ell,
        mu_x: prof.mu_x,
        mu_y: prof.mu_y,
        kappa_x: kappa(prof.ell, prof.mu_x),
        kappa_y: kappa(prof.ell, prof.mu_y),
        eps: cfg.eps,
        mode: cfg.mode,
        seed: cfg.seed,
        iterations: t,
        caps: caps.clone(),
        grad_x_calls: out.report.counts.grad_x_calls,
        grad_y_calls: out.report.counts.grad_y_calls,
        value_calls: out.report.counts.value_calls,
        outer_iters: out.report.outer_iters,
        inner_iters: out.report.inner_iters,
        wall_time_ms: timing.then_some(elapsed),
        status,
        solver_status: out.report.status.as_str(),
        certificate,
        certificate_failure,
        selected_index: out.report.selected_index,
        clamped: if clamped.is_empty() { "no".to_string() } else { clamped.join(";") },
        ledger: ledger
            .entries()
            .iter()
            .map(|e| LedgerRecord { name: e.name.clone(), theoretical: e.theoretical, applied: e.applied, clamped: !e.faithful, occurrences: e.occurrences })
            .collect(),
        x: out.x,
        y: out.y,
    })
}

/// Exit code of `solve`: 0 on an ok run, 1 on any other run outcome.
pub fn exit_code(record: &RunRecord) -> i32 {
    if record.status == RunStatus::Ok {
        0
    } else {
        1
    }
}

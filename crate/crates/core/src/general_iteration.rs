//! The G1/G2 general iterations and the drivers built on them.
//!
//! `G1` solves the proximal minimax step `min_x max_y f(x, y) + ell ||x - x_bar||^2`
//! by accelerated projected ascent in `y` whose gradients come from fixed-point
//! iterations of the 1/2-contraction
//!
//! ```text
//! T_z(x) = P_X(x_bar - grad_x f(x, z) / (2 ell))
//! ```
//!
//! `G2` is plain accelerated projected ascent on `f(x~, .)`.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::drivers::SaddleOutput;
use crate::error::{check_dim, check_positive, Error};
use crate::math;
use crate::oracle::{MinimaxProblem, OracleCounter};
use crate::report::{EtaChoice, SolverOptions, SolverReport, Status, ToleranceLedger, CLAMP_FACTOR, HARD_CAP};
use crate::sets::scale_of;
use crate::vector::{all_finite, dist, extrapolate};

/// Floor factor for the distance-type tolerances of the general iterations,
/// relative to `sqrt(eps / ell)`.
pub const DISTANCE_CLAMP_FACTOR: f64 = 1e-7;

#[derive(Clone, Debug, PartialEq)]
pub struct PointOutput {
    pub x: Vec<f64>,
    pub report: SolverReport,
}

#[derive(Clone, Debug, PartialEq)]
pub struct G1Output {
    pub x: Vec<f64>,
    /// Final ascent iterate `y_k`.
    pub y: Vec<f64>,
    pub report: SolverReport,
}

#[derive(Clone, Debug, PartialEq)]
pub struct G2Output {
    pub y: Vec<f64>,
    pub report: SolverReport,
}

/// Writes `T_z(x) = P_X(x_bar - grad_x f(x, z) / (2 ell))` into `out`.
pub fn fixed_point_map(f: &MinimaxProblem, x_bar: &[f64], z: &[f64], x: &[f64], out: &mut [f64]) {
    let ell = f.ell();
    f.grad_x_into(x, z, out);
    for (o, xb) in out.iter_mut().zip(x_bar) {
        *o = xb - *o / (2.0 * ell);
    }
    f.set_x.project_in_place(out);
}

/// `f - (eta / (2 D^2)) ||y - y0||^2`, which is `eta / D^2`-strongly concave.
pub fn regularize_eta(f: &MinimaxProblem, eta: f64, y0: &[f64]) -> Result<MinimaxProblem, Error> {
    check_dim(f.dim_y(), y0.len())?;
    check_positive(eta, "eta must be positive")?;
    let d = f.diam_y()?;
    check_positive(d, "regularization needs a positive diameter")?;
    let curvature = eta / (d * d);
    let mut out = f.add_quadratic(None, Some((y0.to_vec(), curvature / 2.0)));
    out.profile.mu_y += curvature;
    out.profile.ell += curvature;
    Ok(out)
}

struct FixedPoint {
    x: Vec<f64>,
    passes: u64,
    status: Status,
    precision_stop: bool,
}

/// Iterates `x <- T_z(x)` from `start` until `||x - T_z(x)|| <= tol`.
fn fixed_point(f: &MinimaxProblem, x_bar: &[f64], z: &[f64], start: &[f64], tol: f64, cap: Option<u64>) -> FixedPoint {
    let n = start.len();
    let mut x = vec![0.0; n];
    fixed_point_map(f, x_bar, z, start, &mut x);
    let mut tx = vec![0.0; n];
    let r0 = dist(start, &x);
    if !r0.is_finite() {
        return FixedPoint { x, passes: 1, status: Status::NumericalFailure, precision_stop: false };
    }
    let theory = if r0 > tol { math::ceil_count(math::ln(r0 / tol) / core::f64::consts::LN_2, HARD_CAP) } else { 0 } + 64;
    let cap = cap.unwrap_or(theory).min(HARD_CAP);
    let mut passes = 1;
    while passes < cap {
        fixed_point_map(f, x_bar, z, &x, &mut tx);
        passes += 1;
        let r = dist(&x, &tx);
        if !r.is_finite() {
            return FixedPoint { x, passes, status: Status::NumericalFailure, precision_stop: false };
        }
        if r <= tol {
            return FixedPoint { x, passes, status: Status::Ok, precision_stop: false };
        }
        if r <= math::precision_floor(scale_of(&x)) {
            return FixedPoint { x, passes, status: Status::Ok, precision_stop: true };
        }
        core::mem::swap(&mut x, &mut tx);
    }
    FixedPoint { x, passes, status: Status::BudgetExhausted, precision_stop: false }
}

fn strong_concavity(f: &MinimaxProblem) -> Result<(f64, f64), Error> {
    let ell = f.ell();
    let mu = f.profile.mu_y;
    check_positive(mu, "strong concavity in y is required")?;
    Ok((ell, ell / mu))
}

fn y_start(f: &MinimaxProblem, opts: &SolverOptions) -> Result<Vec<f64>, Error> {
    match &opts.y_start {
        Some(y) => {
            check_dim(f.dim_y(), y.len())?;
            Ok(f.set_y.proj(y))
        }
        None => Ok(f.set_y.default_point()),
    }
}

/// Stop residual `||y - P_Y(y + step * grad_y f(x, y))||` (one gradient call).
fn ascent_residual(f: &MinimaxProblem, x: &[f64], y: &[f64], step: f64, buf: &mut [f64]) -> f64 {
    f.grad_y_into(x, y, buf);
    for (b, yi) in buf.iter_mut().zip(y) {
        *b = yi + step * *b;
    }
    f.set_y.project_in_place(buf);
    dist(y, buf)
}

/// Records the precision-floor outcome of a distance stop test.
fn note_stop(ledger: &mut ToleranceLedger, name: &str, tol: f64, floor_hit: Option<f64>) {
    match floor_hit {
        Some(floor) => ledger.record(name, tol, floor),
        None => ledger.record(name, tol, tol),
    }
}

/// Outer cap `20 sqrt(kbar) ln(ell D^2 / eps + e)`.
fn outer_cap(kappa_bar: f64, ell: f64, d: f64, eps: f64) -> u64 {
    math::ceil_count(20.0 * math::sqrt(kappa_bar) * math::ln(ell * d * d / eps + core::f64::consts::E), HARD_CAP)
}

/// First general iteration: an `eps_bar`-accurate solution of
/// `min_x max_y f(x, y) + ell ||x - x_bar||^2`.
pub fn g1(f: &MinimaxProblem, x_bar: &[f64], x0: &[f64], eps_bar: f64, opts: &SolverOptions) -> Result<G1Output, Error> {
    check_dim(f.dim_x(), x_bar.len())?;
    check_dim(f.dim_x(), x0.len())?;
    if !all_finite(x_bar) || !all_finite(x0) {
        return Err(Error::NonFinite);
    }
    check_positive(eps_bar, "eps must be positive")?;
    let (ell, kbar) = strong_concavity(f)?;
    let d = f.diam_y()?;

    let counter = OracleCounter::new();
    let fc = f.counted(&counter);
    let mut report = SolverReport::default();
    let floor = DISTANCE_CLAMP_FACTOR * math::sqrt(eps_bar / ell);
    let tol1_theory = {
        let t = eps_bar / (5_971_968.0 * math::powf(kbar, 4.5) * ell * d);
        if t.is_nan() || t > 1.0 { 1.0 } else { t }
    };
    let tol1 = report.ledger.clamp("g1.tol_first", tol1_theory, floor);
    let base = math::sqrt(eps_bar / (2.0 * kbar * ell));
    let tol2 = report.ledger.clamp("g1.tol_second", base / (36.0 * kbar), floor);
    let stop = report.ledger.clamp("g1.stop", base / (48.0 * kbar), floor);
    let cap = opts.outer_cap(outer_cap(kbar, ell, d, eps_bar));
    let sk = math::sqrt(kbar);
    let beta = (2.0 * sk - 1.0) / (2.0 * sk + 1.0);
    let step = 1.0 / (4.0 * ell);

    let m = f.dim_y();
    let mut y = y_start(f, opts)?;
    let mut z = y.clone();
    let mut y_new = vec![0.0; m];
    let mut gy = vec![0.0; m];
    let mut x = x0.to_vec();
    let mut start = x0.to_vec();
    let mut fp_precision = false;
    let mut stop_floor = None;
    let mut converged = false;
    let mut k = 0;
    while k < cap {
        k += 1;
        let inner = fixed_point(&fc, x_bar, &z, &start, tol1, opts.max_inner);
        report.inner_iters += inner.passes;
        report.merge_status(inner.status);
        fp_precision |= inner.precision_stop;
        fc.grad_y_into(&inner.x, &z, &mut gy);
        for i in 0..m {
            y_new[i] = z[i] + step * gy[i];
        }
        fc.set_y.project_in_place(&mut y_new);
        extrapolate(&y_new, &y, beta, &mut z);
        core::mem::swap(&mut y, &mut y_new);
        let inner = fixed_point(&fc, x_bar, &y, &start, tol2, opts.max_inner);
        report.inner_iters += inner.passes;
        report.merge_status(inner.status);
        fp_precision |= inner.precision_stop;
        x = inner.x;
        if opts.warm_start_inner {
            start.copy_from_slice(&x);
        }
        if report.status == Status::NumericalFailure {
            break;
        }
        let r = ascent_residual(&fc, &x, &y, step, &mut gy);
        if !r.is_finite() {
            report.status = Status::NumericalFailure;
            break;
        }
        if r <= stop {
            converged = true;
            break;
        }
        let pf = math::precision_floor(scale_of(&y));
        if r <= pf {
            stop_floor = Some(pf);
            converged = true;
            break;
        }
    }
    note_stop(&mut report.ledger, "g1.stop_precision", stop, stop_floor);
    if fp_precision {
        report.ledger.record("g1.fixed_point_precision", tol2, math::precision_floor(scale_of(&x)));
    }
    if !converged && report.status == Status::Ok {
        report.status = Status::BudgetExhausted;
    }
    report.outer_iters = k;
    report.counts = counter.counts();
    Ok(G1Output { x, y, report })
}

/// Second general iteration: `y_hat` with `max_y f(x~, y) <= f(x~, y_hat) + eps_tilde`.
pub fn g2(f: &MinimaxProblem, x_tilde: &[f64], eps_tilde: f64, opts: &SolverOptions) -> Result<G2Output, Error> {
    check_dim(f.dim_x(), x_tilde.len())?;
    if !all_finite(x_tilde) {
        return Err(Error::NonFinite);
    }
    check_positive(eps_tilde, "eps must be positive")?;
    let (ell, kbar) = strong_concavity(f)?;
    let d = f.diam_y()?;

    let counter = OracleCounter::new();
    let fc = f.counted(&counter);
    let mut report = SolverReport::default();
    let floor = DISTANCE_CLAMP_FACTOR * math::sqrt(eps_tilde / ell);
    let stop = report.ledger.clamp("g2.stop", math::sqrt(eps_tilde / (2.0 * ell)) / kbar, floor);
    let cap = opts.outer_cap(outer_cap(kbar, ell, d, eps_tilde));
    let sk = math::sqrt(kbar);
    let beta = (sk - 1.0) / (sk + 1.0);
    let step = 1.0 / ell;

    let m = f.dim_y();
    let mut y = y_start(f, opts)?;
    let mut z = y.clone();
    let mut y_new = vec![0.0; m];
    let mut gy = vec![0.0; m];
    let mut stop_floor = None;
    let mut converged = false;
    let mut k = 0;
    while k < cap {
        k += 1;
        fc.grad_y_into(x_tilde, &z, &mut gy);
        for i in 0..m {
            y_new[i] = z[i] + step * gy[i];
        }
        fc.set_y.project_in_place(&mut y_new);
        extrapolate(&y_new, &y, beta, &mut z);
        core::mem::swap(&mut y, &mut y_new);
        let r = ascent_residual(&fc, x_tilde, &y, step, &mut gy);
        if !r.is_finite() {
            report.status = Status::NumericalFailure;
            break;
        }
        if r <= stop {
            converged = true;
            break;
        }
        let pf = math::precision_floor(scale_of(&y));
        if r <= pf {
            stop_floor = Some(pf);
            converged = true;
            break;
        }
    }
    note_stop(&mut report.ledger, "g2.stop_precision", stop, stop_floor);
    if !converged && report.status == Status::Ok {
        report.status = Status::BudgetExhausted;
    }
    report.outer_iters = k;
    report.counts = counter.counts();
    Ok(G2Output { y, report })
}

/// `ceil(6 sqrt(k) ln(max(k kbar^3 dist0_sq / eps, e)))`
pub fn suggest_t_scsc(kappa: f64, kappa_bar: f64, dist0_sq: f64, eps: f64) -> u64 {
    let arg = kappa * kappa_bar * kappa_bar * kappa_bar * dist0_sq / eps;
    let arg = if arg.is_finite() { arg.max(core::f64::consts::E) } else { f64::MAX };
    math::ceil_count(6.0 * math::sqrt(kappa) * math::ln(arg), HARD_CAP)
}

fn absorb(report: &mut SolverReport, scope: &str, sub: &SolverReport) {
    report.merge_status(sub.status);
    report.inner_iters += sub.outer_iters;
    report.ledger.absorb(scope, &sub.ledger);
}

/// Shared loop of the strongly convex drivers: G1 steps with two-term
/// momentum `a (x_{t+1} - x_t) + b (x_{t+1} - x~_t)` and a G2 dual step after each.
fn near_optimal_loop(
    f: &MinimaxProblem,
    x0: &[f64],
    eps_bar: f64,
    eps_tilde: f64,
    a: f64,
    b: f64,
    t: u64,
    opts: &SolverOptions,
    mut report: SolverReport,
    counter: &OracleCounter,
) -> Result<SaddleOutput, Error> {
    let nested = SolverOptions { y_start: opts.y_start.clone(), ..opts.nested() };
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut x_tilde = x0.to_vec();
    let mut y = f.set_y.default_point();
    if opts.record_trajectory {
        report.trajectory.push(x.clone());
    }
    for _ in 0..=t.min(opts.hard_cap) {
        let step = g1(f, &x_tilde, x0, eps_bar, &nested)?;
        absorb(&mut report, "g1", &step.report);
        let x_new = step.x;
        let mut x_tilde_new = vec![0.0; n];
        for i in 0..n {
            x_tilde_new[i] = x_new[i] + a * (x_new[i] - x[i]) + b * (x_new[i] - x_tilde[i]);
        }
        let dual = g2(f, &x_new, eps_tilde, &nested)?;
        absorb(&mut report, "g2", &dual.report);
        y = dual.y;
        x = x_new;
        x_tilde = x_tilde_new;
        report.outer_iters += 1;
        if opts.record_trajectory {
            report.trajectory.push(x.clone());
        }
        if report.status == Status::NumericalFailure {
            break;
        }
    }
    report.counts = counter.counts();
    Ok(SaddleOutput { x, y, report })
}

/// Near-optimal solver for strongly-convex-strongly-concave problems.
///
/// Uses `eps_bar = eps ell / (576 k^{5/2} kbar^3)` for G1 and
/// `eps_tilde = eps ell / (8 kbar)` for G2; runs `t + 1` outer steps.
pub fn scsc_near_optimal(f: &MinimaxProblem, x0: &[f64], eps: f64, t: u64, opts: &SolverOptions) -> Result<SaddleOutput, Error> {
    check_positive(eps, "eps must be positive")?;
    let ell = f.ell();
    check_positive(f.profile.mu_x, "strong convexity in x is required")?;
    let (_, kbar) = strong_concavity(f)?;
    let kappa = ell / f.profile.mu_x;
    let counter = OracleCounter::new();
    let fc = f.counted(&counter);
    let mut report = SolverReport::default();
    let eps_bar = report.ledger.clamp(
        "scsc.eps_bar",
        eps * ell / (576.0 * math::powf(kappa, 2.5) * kbar * kbar * kbar),
        CLAMP_FACTOR * eps,
    );
    let eps_tilde = report.ledger.clamp("scsc.eps_tilde", eps * ell / (8.0 * kbar), CLAMP_FACTOR * eps);
    let sk = math::sqrt(kappa);
    let a = (2.0 * sk - 1.0) / (2.0 * sk + 1.0);
    let b = 1.0 / (2.0 * sk + 4.0 * kappa);
    near_optimal_loop(&fc, x0, eps_bar, eps_tilde, a, b, t, opts, report, &counter)
}

/// Near-optimal solver for strongly-convex-concave problems, run on the
/// regularized `f - (eta / (2 D^2)) ||y - y0||^2` with `eta` chosen by
/// `opts.scc_eta`.
pub fn scc_near_optimal(
    f: &MinimaxProblem,
    x0: &[f64],
    y0: &[f64],
    eps: f64,
    t: u64,
    opts: &SolverOptions,
) -> Result<SaddleOutput, Error> {
    check_positive(eps, "eps must be positive")?;
    check_positive(f.profile.mu_x, "strong convexity in x is required")?;
    let ell = f.ell();
    let kappa = ell / f.profile.mu_x;
    let d = f.diam_y()?;
    let ld2 = ell * d * d;
    let m = (1.0 / kappa).min(eps / ld2);

    let counter = OracleCounter::new();
    let mut report = SolverReport::default();
    let eps_bar = report.ledger.clamp(
        "scc.eps_bar",
        eps * eps * eps * eps / (73_328.0 * math::powf(kappa, 2.5) * ld2 * ld2 * ld2) * m,
        CLAMP_FACTOR * eps,
    );
    let eps_tilde = report.ledger.clamp("scc.eps_tilde", eps * eps / (64.0 * ld2) * m, CLAMP_FACTOR * eps);
    let eta = match opts.scc_eta {
        EtaChoice::Eps => eps,
        EtaChoice::EpsBar => eps_bar,
    };
    report.ledger.record("scc.eta", eta, eta);
    let f_eta = regularize_eta(&f.counted(&counter), eta, y0)?;
    let s2k = math::sqrt(2.0 * kappa);
    let a = (2.0 * s2k - 1.0) / (2.0 * s2k + 1.0);
    let b = 1.0 / (2.0 * s2k + 8.0 * kappa);
    let opts = SolverOptions { y_start: Some(y0.to_vec()), ..opts.clone() };
    near_optimal_loop(&f_eta, x0, eps_bar, eps_tilde, a, b, t, &opts, report, &counter)
}

/// Runs `x_{t+1} = G1(f, x_t, x0, tol)` for `t = 0..=T` and returns the
/// full trajectory `x_0..x_{T+1}`.
fn proximal_trajectory(
    f: &MinimaxProblem,
    x0: &[f64],
    tol: f64,
    t: u64,
    opts: &SolverOptions,
    report: &mut SolverReport,
) -> Result<Vec<Vec<f64>>, Error> {
    let nested = SolverOptions { y_start: opts.y_start.clone(), ..opts.nested() };
    let mut traj = vec![x0.to_vec()];
    for _ in 0..=t.min(opts.hard_cap) {
        let prev = traj.last().expect("trajectory starts with x0");
        let step = g1(f, prev, x0, tol, &nested)?;
        absorb(report, "g1", &step.report);
        report.outer_iters += 1;
        let failed = !all_finite(&step.x);
        traj.push(step.x);
        if failed || report.status == Status::NumericalFailure {
            report.status = Status::NumericalFailure;
            break;
        }
    }
    Ok(traj)
}

fn pick(traj: &[Vec<f64>], lo: u64, hi: u64, seed: u64, report: &mut SolverReport) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let last = traj.len() as u64 - 1;
    let s = rng.gen_range(lo..=hi).min(last);
    report.seed = Some(seed);
    report.selected_index = Some(s);
    traj[s as usize].clone()
}

/// Accelerated solver for nonconvex-strongly-concave problems: proximal
/// steps by G1 at `eps_bar = eps^2 / (144 kbar^2 ell)`, output drawn
/// uniformly from `x_0..x_{T-1}`.
pub fn nsc_accelerated(f: &MinimaxProblem, x0: &[f64], eps: f64, t: u64, seed: u64, opts: &SolverOptions) -> Result<PointOutput, Error> {
    check_positive(eps, "eps must be positive")?;
    if t == 0 {
        return Err(Error::InvalidParameter("at least one iteration is required"));
    }
    let (ell, kbar) = strong_concavity(f)?;
    let counter = OracleCounter::new();
    let fc = f.counted(&counter);
    let mut report = SolverReport::default();
    let eps_bar = report.ledger.clamp("nsc.eps_bar", eps * eps / (144.0 * kbar * kbar * ell), CLAMP_FACTOR * eps);
    let traj = proximal_trajectory(&fc, x0, eps_bar, t, opts, &mut report)?;
    let x = pick(&traj, 0, t - 1, seed, &mut report);
    if opts.record_trajectory {
        report.trajectory = traj;
    }
    report.counts = counter.counts();
    Ok(PointOutput { x, report })
}

/// Accelerated solver for nonconvex-concave problems: G1 steps on
/// `f - (eps_bar / (2 D^2)) ||y - y0||^2` with `eps_bar = eps^2 / (48 ell)` and
/// tolerance `eps_bar / 2`, output drawn uniformly from `x_1..x_{T+1}`.
pub fn nc_accelerated(
    f: &MinimaxProblem,
    x0: &[f64],
    y0: &[f64],
    eps: f64,
    t: u64,
    seed: u64,
    opts: &SolverOptions,
) -> Result<PointOutput, Error> {
    check_positive(eps, "eps must be positive")?;
    check_dim(f.dim_y(), y0.len())?;
    let ell = f.ell();
    let counter = OracleCounter::new();
    let mut report = SolverReport::default();
    let eps_bar = report.ledger.clamp("nc.eps_bar", eps * eps / (48.0 * ell), CLAMP_FACTOR * eps);
    let f_eta = regularize_eta(&f.counted(&counter), eps_bar, y0)?;
    let opts = SolverOptions { y_start: Some(y0.to_vec()), ..opts.clone() };
    let traj = proximal_trajectory(&f_eta, x0, eps_bar / 2.0, t, &opts, &mut report)?;
    let x = pick(&traj, 1, t + 1, seed, &mut report);
    if opts.record_trajectory {
        report.trajectory = traj;
    }
    report.counts = counter.counts();
    Ok(PointOutput { x, report })
}

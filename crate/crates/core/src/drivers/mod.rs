//! Top-level solvers: accelerated proximal point for strongly-convex-strongly-
//! concave problems, proximal point for nonconvex-strongly-concave problems,
//! and the reductions that extend them to weaker curvature assumptions.

mod reduction;

pub use reduction::{coefficients, reduce, ReductionKind, ReductionSpec};

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::agd::{agd, ScalarObjective};
use crate::error::{check_positive, Error};
use crate::math;
use crate::maximin_ag2::maximin_ag2;
use crate::oracle::{MinimaxProblem, OracleCounter};
use crate::report::{SolverOptions, SolverReport, Status, CLAMP_FACTOR, HARD_CAP};
use crate::vector::{all_finite, extrapolate};

/// A primal-dual pair with its run report.
#[derive(Clone, Debug, PartialEq)]
pub struct SaddleOutput {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub report: SolverReport,
}

/// `ceil(8 ell dphi / eps^2) + 1`, where `dphi` bounds `Phi(x0) - min Phi`.
pub fn suggest_t_ppa(ell: f64, delta_phi_upper: f64, eps: f64) -> u64 {
    math::ceil_count(8.0 * ell * delta_phi_upper / (eps * eps), HARD_CAP).saturating_add(1)
}

/// Maximizes `f(x, .)` over `Y` from `y0` to accuracy `tol`.
fn maximize_y(
    f: &MinimaxProblem,
    x: &[f64],
    y0: &[f64],
    ell: f64,
    mu_y: f64,
    tol: f64,
    cap: Option<u64>,
    report: &mut SolverReport,
    scope: &str,
) -> Vec<f64> {
    let grad = |y: &[f64], out: &mut [f64]| {
        f.grad_y_into(x, y, out);
        out.iter_mut().for_each(|v| *v = -*v);
    };
    let obj = ScalarObjective::new(&grad, ell, mu_y);
    match agd(&obj, &f.set_y, y0, tol, cap) {
        Ok(out) => {
            report.merge_status(out.status);
            report.inner_iters += out.iters;
            report.ledger.absorb(scope, &out.ledger);
            out.x
        }
        Err(_) => {
            report.merge_status(Status::NumericalFailure);
            y0.to_vec()
        }
    }
}

/// Accelerated proximal point on `Phi(x) = max_y f(x, y)`.
///
/// Every step solves `min_x max_y f(x, y) + ell ||x - x~||^2` with
/// [`maximin_ag2`] at constants `(3 ell, 2 ell, mu_y)` and tolerance
/// `delta = eps / (10 kx ky)^4`; the dual point is recovered at the end by a
/// maximization to `eps / (100 kx ky)` and one extra-gradient step.
pub fn minimax_appa(
    f: &MinimaxProblem,
    x0: &[f64],
    y0: &[f64],
    ell: f64,
    mu_x: f64,
    mu_y: f64,
    eps: f64,
    t: u64,
    opts: &SolverOptions,
) -> Result<SaddleOutput, Error> {
    f.check_point(x0, y0)?;
    check_positive(eps, "eps must be positive")?;
    check_positive(ell, "ell must be positive")?;
    check_positive(mu_x, "mu_x must be positive")?;
    check_positive(mu_y, "mu_y must be positive")?;
    f.diam_y()?;

    let counter = OracleCounter::new();
    let fc = f.counted(&counter);
    let mut report = SolverReport::default();
    let kx = ell / mu_x;
    let ky = ell / mu_y;
    let sk = math::sqrt(kx);
    let theta = (2.0 * sk - 1.0) / (2.0 * sk + 1.0);
    let p = opts.mode.exponent(4) as f64;
    let delta = report.ledger.clamp("appa.delta", eps / math::powf(10.0 * kx * ky, p), CLAMP_FACTOR * eps);
    let eps_final = report.ledger.clamp("appa.final_eps", eps / (100.0 * kx * ky), CLAMP_FACTOR * eps);

    let nested = opts.nested();
    let mut x = x0.to_vec();
    let mut x_tilde = x0.to_vec();
    if opts.record_trajectory {
        report.trajectory.push(x.clone());
    }
    let t = t.min(opts.hard_cap);
    for _ in 0..t {
        let g_t = fc.proximal_in_x(&x_tilde, ell);
        let sub = maximin_ag2(&g_t, x0, y0, 3.0 * ell, 2.0 * ell, mu_y, delta, &nested)?;
        report.merge_status(sub.report.status);
        report.inner_iters += sub.report.outer_iters;
        report.ledger.absorb("appa.ag2", &sub.report.ledger);
        report.outer_iters += 1;
        if !all_finite(&sub.x) {
            report.status = Status::NumericalFailure;
            break;
        }
        extrapolate(&sub.x, &x, theta, &mut x_tilde);
        x = sub.x;
        if opts.record_trajectory {
            report.trajectory.push(x.clone());
        }
    }

    let y_tilde = maximize_y(&fc, &x, y0, ell, mu_y, eps_final, opts.max_inner, &mut report, "appa.final");
    let mut gy = vec![0.0; y0.len()];
    fc.grad_y_into(&x, &y_tilde, &mut gy);
    let step = 1.0 / (2.0 * kx * ell);
    let mut y: Vec<f64> = y_tilde.iter().zip(&gy).map(|(yi, gi)| yi + step * gi).collect();
    fc.set_y.project_in_place(&mut y);
    if !all_finite(&y) {
        report.status = Status::NumericalFailure;
    }
    report.counts = counter.counts();
    Ok(SaddleOutput { x, y, report })
}

/// Strongly-convex-concave solver: runs [`minimax_appa`] on
/// `f - eps/(4 Dy^2) ||y - y0||^2` with strong concavity `eps/(4 Dy^2)` and
/// tolerance `eps/2`.
pub fn scc_solve(
    f: &MinimaxProblem,
    x0: &[f64],
    y0: &[f64],
    ell: f64,
    mu_x: f64,
    eps: f64,
    t: u64,
    opts: &SolverOptions,
) -> Result<SaddleOutput, Error> {
    check_positive(eps, "eps must be positive")?;
    let dy = f.diam_y()?;
    let reduced = reduce(f, &ReductionSpec::new(ReductionKind::Scc, eps, None, y0))?;
    minimax_appa(&reduced, x0, y0, ell, mu_x, eps / (4.0 * dy * dy), eps / 2.0, t, opts)
}

/// Convex-concave solver: runs [`minimax_appa`] on the doubly regularized
/// problem with moduli `eps/(4 Dx^2)`, `eps/(4 Dy^2)` and tolerance `eps/2`.
pub fn cc_solve(
    f: &MinimaxProblem,
    x0: &[f64],
    y0: &[f64],
    ell: f64,
    eps: f64,
    t: u64,
    opts: &SolverOptions,
) -> Result<SaddleOutput, Error> {
    check_positive(eps, "eps must be positive")?;
    let dx = f.diam_x()?;
    let dy = f.diam_y()?;
    let reduced = reduce(f, &ReductionSpec::new(ReductionKind::Cc, eps, Some(x0), y0))?;
    minimax_appa(&reduced, x0, y0, ell, eps / (4.0 * dx * dx), eps / (4.0 * dy * dy), eps / 2.0, t, opts)
}

/// Proximal point on `Phi` for nonconvex-strongly-concave problems.
///
/// Runs `t` steps `x_t = argmin_x max_y f(x, y) + ell ||x - x_{t-1}||^2`
/// (solved by [`maximin_ag2`] at `(3 ell, ell, mu_y)`), draws `s` uniformly
/// from `1..=t` with a ChaCha8 generator seeded by `seed`, and pairs `x_s`
/// with a maximizer of `f(x_s, .)`. The whole trajectory `x_0..x_t` is kept
/// when `opts.record_trajectory` is set.
pub fn minimax_ppa(
    f: &MinimaxProblem,
    x0: &[f64],
    y0: &[f64],
    ell: f64,
    mu_y: f64,
    eps: f64,
    t: u64,
    seed: u64,
    opts: &SolverOptions,
) -> Result<SaddleOutput, Error> {
    f.check_point(x0, y0)?;
    check_positive(eps, "eps must be positive")?;
    check_positive(ell, "ell must be positive")?;
    check_positive(mu_y, "mu_y must be positive")?;
    if t == 0 {
        return Err(Error::InvalidParameter("at least one iteration is required"));
    }
    let dy = f.diam_y()?;

    let counter = OracleCounter::new();
    let fc = f.counted(&counter);
    let mut report = SolverReport { seed: Some(seed), ..SolverReport::default() };
    let ky = ell / mu_y;
    let p = opts.mode.exponent(4) as f64;
    let ratio = eps / (ell * dy);
    let theoretical = eps * eps / (math::powf(10.0 * ky, p) * ell) * ratio * ratio;
    let delta = report.ledger.clamp("ppa.delta", theoretical, CLAMP_FACTOR * eps);

    let nested = opts.nested();
    let t = t.min(opts.hard_cap);
    let mut trajectory = vec![x0.to_vec()];
    for _ in 0..t {
        let prev = trajectory.last().expect("trajectory starts with x0");
        let g_t = fc.proximal_in_x(prev, ell);
        let sub = maximin_ag2(&g_t, x0, y0, 3.0 * ell, ell, mu_y, delta, &nested)?;
        report.merge_status(sub.report.status);
        report.inner_iters += sub.report.outer_iters;
        report.ledger.absorb("ppa.ag2", &sub.report.ledger);
        report.outer_iters += 1;
        if !all_finite(&sub.x) {
            report.status = Status::NumericalFailure;
            break;
        }
        trajectory.push(sub.x);
    }

    let last = trajectory.len() as u64 - 1;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = rng.gen_range(1..=t).min(last.max(1));
    let x = trajectory[s.min(last) as usize].clone();
    report.selected_index = Some(s);
    let y = maximize_y(&fc, &x, y0, ell, mu_y, delta, opts.max_inner, &mut report, "ppa.final");
    if opts.record_trajectory {
        report.trajectory = trajectory;
    }
    report.counts = counter.counts();
    Ok(SaddleOutput { x, y, report })
}

/// Nonconvex-concave solver for stationarity of `f`: runs [`minimax_ppa`] on
/// `f - eps/(4 Dy) ||y - y0||^2` with modulus `eps/(2 Dy)` and tolerance `eps/2`.
pub fn nc_solve(
    f: &MinimaxProblem,
    x0: &[f64],
    y0: &[f64],
    ell: f64,
    eps: f64,
    t: u64,
    seed: u64,
    opts: &SolverOptions,
) -> Result<SaddleOutput, Error> {
    check_positive(eps, "eps must be positive")?;
    let dy = f.diam_y()?;
    let reduced = reduce(f, &ReductionSpec::new(ReductionKind::Nc, eps, None, y0))?;
    minimax_ppa(&reduced, x0, y0, ell, eps / (2.0 * dy), eps / 2.0, t, seed, opts)
}

/// Nonconvex-concave solver for Moreau-envelope stationarity: runs
/// [`minimax_ppa`] on `f - eps^2/(200 ell Dy^2) ||y - y0||^2` with modulus
/// `eps^2/(100 ell Dy^2)` and tolerance `eps/10`.
pub fn nc_moreau_solve(
    f: &MinimaxProblem,
    x0: &[f64],
    y0: &[f64],
    ell: f64,
    eps: f64,
    t: u64,
    seed: u64,
    opts: &SolverOptions,
) -> Result<SaddleOutput, Error> {
    check_positive(eps, "eps must be positive")?;
    let dy = f.diam_y()?;
    let reduced = reduce(f, &ReductionSpec::new(ReductionKind::NcMoreau, eps, None, y0))?;
    minimax_ppa(&reduced, x0, y0, ell, eps * eps / (100.0 * ell * dy * dy), eps / 10.0, t, seed, opts)
}

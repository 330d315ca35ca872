//! Two-timescale accelerated solver for strongly-convex-strongly-concave
//! problems.
//!
//! The outer loop runs accelerated projected ascent on
//! `Psi(y) = min_x g(x, y)` with step `1 / (2 kx ell)` and momentum
//! `(4 sqrt(kx ky) - 1) / (4 sqrt(kx ky) + 1)`; every gradient of `Psi` is
//! approximated by an inner accelerated minimization in `x` started from `x0`.

use alloc::vec;
use alloc::vec::Vec;

use crate::agd::{agd, ScalarObjective};
use crate::error::{check_positive, Error};
use crate::math;
use crate::oracle::{MinimaxProblem, OracleCounter};
use crate::report::{SolverOptions, SolverReport, Status, CLAMP_FACTOR};
use crate::sets::{scale_of, step_residual_sq};
use crate::vector::{all_finite, extrapolate};

#[derive(Clone, Debug, PartialEq)]
pub struct Ag2Output {
    /// `P_X(x_t - grad_x g(x_t, y_t) / (2 ky ell))`
    pub x: Vec<f64>,
    /// The final ascent iterate `y_t`.
    pub y: Vec<f64>,
    pub report: SolverReport,
}

/// Default outer cap `20 sqrt(kx ky) ln(ell D^2 / eps + e)`.
pub fn outer_cap(kappa_x: f64, kappa_y: f64, ell: f64, diam_y: f64, eps: f64) -> u64 {
    let arg = ell * diam_y * diam_y / eps + core::f64::consts::E;
    math::ceil_count(20.0 * math::sqrt(kappa_x * kappa_y) * math::ln(arg), crate::report::HARD_CAP)
}

/// Solves `min_x max_y g(x, y)` to `eps` primal accuracy.
///
/// `ell`, `mu_x`, `mu_y` are taken as given rather than read from the problem
/// profile, so callers can pass the constants of a derived subproblem.
pub fn maximin_ag2(
    g: &MinimaxProblem,
    x0: &[f64],
    y0: &[f64],
    ell: f64,
    mu_x: f64,
    mu_y: f64,
    eps: f64,
    opts: &SolverOptions,
) -> Result<Ag2Output, Error> {
    g.check_point(x0, y0)?;
    check_positive(eps, "eps must be positive")?;
    check_positive(ell, "ell must be positive")?;
    check_positive(mu_x, "mu_x must be positive")?;
    check_positive(mu_y, "mu_y must be positive")?;
    let diam_y = g.diam_y()?;

    let counter = OracleCounter::new();
    let g = g.counted(&counter);
    let mut report = SolverReport::default();

    let kx = ell / mu_x;
    let ky = ell / mu_y;
    let eta = 1.0 / (2.0 * kx * ell);
    let s = math::sqrt(kx * ky);
    let theta = (4.0 * s - 1.0) / (4.0 * s + 1.0);
    let base = 10.0 * kx * ky;
    let p_tol = opts.mode.exponent(7);
    let p_stop = opts.mode.exponent(4);
    let eps_inner = report.ledger.clamp("ag2.inner_eps", eps / math::powf(base, p_tol as f64), CLAMP_FACTOR * eps);
    let stop_sq = report.ledger.clamp("ag2.stop_sq", eps / (math::powf(base, p_stop as f64) * ell), CLAMP_FACTOR * eps / ell);
    let cap = opts.outer_cap(outer_cap(kx, ky, ell, diam_y, eps));

    let (n, m) = (x0.len(), y0.len());
    let inner_cap = opts.max_inner;
    let mut x_start = x0.to_vec();
    let mut y = y0.to_vec();
    let mut y_new = vec![0.0; m];
    let mut y_tilde = y0.to_vec();
    let mut gy = vec![0.0; m];
    let mut image = vec![0.0; m];
    let mut x_t = x0.to_vec();
    let mut precision_stop = false;

    // Inner minimization of g(., y_fixed) from the current start.
    let solve_x = |y_fixed: &[f64], start: &[f64], report: &mut SolverReport| -> Vec<f64> {
        let grad = |x: &[f64], out: &mut [f64]| g.grad_x_into(x, y_fixed, out);
        let obj = ScalarObjective::new(&grad, ell, mu_x);
        match agd(&obj, &g.set_x, start, eps_inner, inner_cap) {
            Ok(out) => {
                report.inner_iters += out.iters;
                report.merge_status(out.status);
                report.ledger.absorb("ag2.inner", &out.ledger);
                out.x
            }
            Err(_) => {
                report.merge_status(Status::NumericalFailure);
                start.to_vec()
            }
        }
    };

    let mut converged = false;
    let mut k = 0;
    while k < cap {
        k += 1;
        let x_tilde = solve_x(&y_tilde, &x_start, &mut report);
        g.grad_y_into(&x_tilde, &y_tilde, &mut gy);
        for i in 0..m {
            y_new[i] = y_tilde[i] + eta * gy[i];
        }
        g.set_y.project_in_place(&mut y_new);
        extrapolate(&y_new, &y, theta, &mut y_tilde);
        core::mem::swap(&mut y, &mut y_new);
        x_t = solve_x(&y, &x_start, &mut report);
        if opts.warm_start_inner {
            x_start.copy_from_slice(&x_t);
        }
        if report.status == Status::NumericalFailure || !all_finite(&y) {
            report.status = Status::NumericalFailure;
            break;
        }
        g.grad_y_into(&x_t, &y, &mut gy);
        let r_sq = step_residual_sq(&g.set_y, &y, &gy, -eta, &mut image);
        if !r_sq.is_finite() {
            report.status = Status::NumericalFailure;
            break;
        }
        let floor = math::precision_floor(scale_of(&y));
        if r_sq <= stop_sq {
            converged = true;
            break;
        }
        if r_sq <= floor * floor {
            converged = true;
            precision_stop = true;
            report.ledger.record("ag2.stop_sq_precision", stop_sq, floor * floor);
            break;
        }
    }
    if !precision_stop {
        report.ledger.record("ag2.stop_sq_precision", stop_sq, stop_sq);
    }
    if !converged && report.status == Status::Ok {
        report.status = Status::BudgetExhausted;
    }
    report.outer_iters = k;

    let mut gx = vec![0.0; n];
    g.grad_x_into(&x_t, &y, &mut gx);
    let step = 1.0 / (2.0 * ky * ell);
    let mut x_hat: Vec<f64> = x_t.iter().zip(&gx).map(|(xi, gi)| xi - step * gi).collect();
    g.set_x.project_in_place(&mut x_hat);
    if !all_finite(&x_hat) {
        report.status = Status::NumericalFailure;
    }
    report.counts = counter.counts();
    Ok(Ag2Output { x: x_hat, y, report })
}

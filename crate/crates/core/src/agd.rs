//! Projected Nesterov acceleration for smooth strongly convex objectives.
//!
//! Iterates
//!
//! ```text
//! x_t  = P[x~_{t-1} - grad g(x~_{t-1}) / ell]
//! x~_t = x_t + theta (x_t - x_{t-1}),     theta = (sqrt(k) - 1) / (sqrt(k) + 1)
//! ```
//!
//! until `||x_t - P(x_t - grad g(x_t) / ell)||^2 <= eps / (2 k^2 (ell - mu))` and
//! returns the projected-gradient image of the final iterate.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{check_dim, check_positive, Error};
use crate::math;
use crate::report::{Status, ToleranceLedger, CLAMP_FACTOR, HARD_CAP};
use crate::sets::{scale_of, step_residual_sq, ConstraintSet};
use crate::vector::{all_finite, extrapolate};

/// Condition numbers at or below `1 + KAPPA_ONE_TOL` take the single-step path.
pub const KAPPA_ONE_TOL: f64 = 1e-9;

/// `g` with its smoothness `ell` and strong convexity `mu`.
pub struct ScalarObjective<'a> {
    pub value: Option<&'a dyn Fn(&[f64]) -> f64>,
    pub grad: &'a dyn Fn(&[f64], &mut [f64]),
    pub ell: f64,
    pub mu: f64,
}

impl<'a> ScalarObjective<'a> {
    pub fn new(grad: &'a dyn Fn(&[f64], &mut [f64]), ell: f64, mu: f64) -> Self {
        ScalarObjective { value: None, grad, ell, mu }
    }

    pub fn with_value(mut self, value: &'a dyn Fn(&[f64]) -> f64) -> Self {
        self.value = Some(value);
        self
    }

    pub fn kappa(&self) -> f64 {
        self.ell / self.mu
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AgdOutput {
    pub x: Vec<f64>,
    pub iters: u64,
    pub grad_calls: u64,
    pub status: Status,
    /// Termination residual `||x_t - P(x_t - grad g(x_t)/ell)||^2` at the
    /// returned iterate's preimage.
    pub residual_sq: f64,
    /// The stopping threshold actually compared against.
    pub threshold: f64,
    pub ledger: ToleranceLedger,
}

/// `ceil(10 sqrt(k) ln(max(k^3 ell d0 / eps, e))) + 10`
pub fn agd_suggested_bound(kappa: f64, ell: f64, dist0_sq: f64, eps: f64) -> u64 {
    let arg = kappa * kappa * kappa * ell * dist0_sq / eps;
    let arg = if arg.is_finite() && arg > core::f64::consts::E { arg } else if arg.is_finite() { core::f64::consts::E } else { f64::MAX };
    math::ceil_count(10.0 * math::sqrt(kappa) * math::ln(arg), HARD_CAP).saturating_add(10)
}

/// Runs accelerated projected gradient descent from `x0`.
///
/// `max_iter_cap = None` uses [`agd_suggested_bound`] with the initial distance
/// estimated from the first gradient mapping, `||x0 - x*|| <= 2 k ||x0 - P(x0 - grad/ell)||`.
/// Exhausting the budget returns the best iterate by termination residual.
pub fn agd(
    obj: &ScalarObjective<'_>,
    set: &ConstraintSet,
    x0: &[f64],
    eps: f64,
    max_iter_cap: Option<u64>,
) -> Result<AgdOutput, Error> {
    check_dim(set.dim(), x0.len())?;
    if !all_finite(x0) {
        return Err(Error::NonFinite);
    }
    check_positive(eps, "eps must be positive")?;
    check_positive(obj.mu, "mu must be positive")?;
    check_positive(obj.ell, "ell must be positive")?;
    let (ell, mu) = (obj.ell, obj.mu);
    if mu > ell * (1.0 + 1e-12) {
        return Err(Error::InvalidParameter("mu cannot exceed ell"));
    }
    let kappa = ell / mu;
    let n = x0.len();
    let step = 1.0 / ell;
    let mut ledger = ToleranceLedger::new();

    let mut g = vec![0.0; n];
    let mut image = vec![0.0; n];
    (obj.grad)(x0, &mut g);
    let mut calls = 1u64;
    let r0_sq = step_residual_sq(set, x0, &g, step, &mut image);
    if !r0_sq.is_finite() {
        return Ok(failure(x0, 0, calls, ledger));
    }

    if kappa <= 1.0 + KAPPA_ONE_TOL {
        // One projected-gradient step is exact; return its image.
        let x1 = image.clone();
        (obj.grad)(&x1, &mut g);
        calls += 1;
        let r_sq = step_residual_sq(set, &x1, &g, step, &mut image);
        if !r_sq.is_finite() {
            return Ok(failure(&x1, 1, calls, ledger));
        }
        return Ok(AgdOutput { x: image, iters: 1, grad_calls: calls, status: Status::Ok, residual_sq: r_sq, threshold: f64::INFINITY, ledger });
    }

    let theoretical = eps / (2.0 * kappa * kappa * (ell - mu));
    let threshold = ledger.clamp("agd.stop_sq", theoretical, CLAMP_FACTOR * eps / ell);
    let cap = max_iter_cap
        .unwrap_or_else(|| {
            let d = 2.0 * kappa * math::sqrt(r0_sq);
            agd_suggested_bound(kappa, ell, d * d, eps)
        })
        .clamp(1, HARD_CAP);
    let sk = math::sqrt(kappa);
    let theta = (sk - 1.0) / (sk + 1.0);

    let mut x = x0.to_vec();
    let mut x_new = vec![0.0; n];
    let mut x_tilde = x0.to_vec();
    let mut g_check = vec![0.0; n];
    let mut best_sq = f64::INFINITY;
    let mut best = image.clone();

    for t in 1..=cap {
        if t > 1 {
            (obj.grad)(&x_tilde, &mut g);
            calls += 1;
        }
        for i in 0..n {
            x_new[i] = x_tilde[i] - step * g[i];
        }
        set.project_in_place(&mut x_new);
        (obj.grad)(&x_new, &mut g_check);
        calls += 1;
        let r_sq = step_residual_sq(set, &x_new, &g_check, step, &mut image);
        if !r_sq.is_finite() || !all_finite(&image) {
            return Ok(failure(&best, t, calls, ledger));
        }
        if r_sq < best_sq {
            best_sq = r_sq;
            best.copy_from_slice(&image);
        }
        let floor = math::precision_floor(scale_of(&x_new));
        let floor_sq = floor * floor;
        if r_sq <= threshold || r_sq <= floor_sq {
            let applied = if r_sq <= threshold { threshold } else { floor_sq };
            ledger.record("agd.stop_sq_precision", threshold, applied);
            return Ok(AgdOutput { x: image, iters: t, grad_calls: calls, status: Status::Ok, residual_sq: r_sq, threshold: applied, ledger });
        }
        extrapolate(&x_new, &x, theta, &mut x_tilde);
        core::mem::swap(&mut x, &mut x_new);
    }
    Ok(AgdOutput { x: best, iters: cap, grad_calls: calls, status: Status::BudgetExhausted, residual_sq: best_sq, threshold, ledger })
}

fn failure(x: &[f64], iters: u64, calls: u64, ledger: ToleranceLedger) -> AgdOutput {
    AgdOutput {
        x: x.to_vec(),
        iters,
        grad_calls: calls,
        status: Status::NumericalFailure,
        residual_sq: f64::NAN,
        threshold: f64::NAN,
        ledger,
    }
}

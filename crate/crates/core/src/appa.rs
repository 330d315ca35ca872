//! Inexact accelerated proximal point method for strongly convex, possibly
//! nonsmooth, objectives.
//!
//! Each step asks a [`ProxSolver`] for a `delta`-accurate minimizer of
//! `g(w) + ell ||w - x~||^2` and extrapolates with
//! `theta = (2 sqrt(k) - 1) / (2 sqrt(k) + 1)`, `delta = eps / (10 k)^2`.

use alloc::vec::Vec;

use crate::error::{check_dim, check_positive, Error};
use crate::math;
use crate::report::{Status, ToleranceLedger, HARD_CAP};
use crate::sets::ConstraintSet;
use crate::vector::{all_finite, extrapolate};

/// Approximate proximal step: returns `w` with
/// `g(w) + ell ||w - center||^2 <= min_x { g(x) + ell ||x - center||^2 } + delta`.
pub trait ProxSolver {
    fn prox(&self, center: &[f64], ell: f64, delta: f64) -> Vec<f64>;
}

impl<F> ProxSolver for F
where
    F: Fn(&[f64], f64, f64) -> Vec<f64>,
{
    fn prox(&self, center: &[f64], ell: f64, delta: f64) -> Vec<f64> {
        self(center, ell, delta)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AppaOutput {
    pub x: Vec<f64>,
    pub status: Status,
    pub iters: u64,
    pub delta: f64,
    pub ledger: ToleranceLedger,
    /// `x_0, x_1, ..., x_T`
    pub iterates: Vec<Vec<f64>>,
    /// `g(x_t)` along the iterates, when a value oracle is supplied.
    pub values: Vec<f64>,
}

/// `ceil(6 sqrt(k) ln(max(gap0_upper / eps, e)))`
///
/// `gap0_upper` bounds `g(x0) - g(x*) + (mu/4) ||x0 - x*||^2`.
pub fn suggest_t(kappa: f64, gap0_upper: f64, eps: f64) -> u64 {
    let ratio = gap0_upper / eps;
    let ratio = if ratio.is_finite() { ratio.max(core::f64::consts::E) } else { f64::MAX };
    math::ceil_count(6.0 * math::sqrt(kappa) * math::ln(ratio), HARD_CAP)
}

/// Runs `t` proximal steps from `x0`.
///
/// `ell >= mu > 0` is required; `ell = mu` is accepted. The set is only used
/// for dimension checks: feasibility is the prox solver's business.
pub fn inexact_appa<P: ProxSolver + ?Sized>(
    g_value: Option<&dyn Fn(&[f64]) -> f64>,
    set: &ConstraintSet,
    x0: &[f64],
    ell: f64,
    mu: f64,
    eps: f64,
    t: u64,
    prox: &P,
) -> Result<AppaOutput, Error> {
    check_dim(set.dim(), x0.len())?;
    if !all_finite(x0) {
        return Err(Error::NonFinite);
    }
    check_positive(mu, "mu must be positive")?;
    check_positive(eps, "eps must be positive")?;
    if !(ell >= mu) || !ell.is_finite() {
        return Err(Error::InvalidParameter("ell must be at least mu"));
    }
    let kappa = ell / mu;
    let delta = eps / ((10.0 * kappa) * (10.0 * kappa));
    let mut ledger = ToleranceLedger::new();
    ledger.record("appa.delta", delta, delta);
    let sk = math::sqrt(kappa);
    let theta = (2.0 * sk - 1.0) / (2.0 * sk + 1.0);

    let mut x = x0.to_vec();
    let mut x_tilde = x0.to_vec();
    let mut iterates = alloc::vec![x.clone()];
    let mut values = Vec::new();
    if let Some(v) = g_value {
        values.push(v(&x));
    }
    for step in 1..=t.min(HARD_CAP) {
        let x_new = prox.prox(&x_tilde, ell, delta);
        if x_new.len() != x.len() || !all_finite(&x_new) {
            return Ok(AppaOutput { x, status: Status::NumericalFailure, iters: step, delta, ledger, iterates, values });
        }
        extrapolate(&x_new, &x, theta, &mut x_tilde);
        x = x_new;
        if let Some(v) = g_value {
            values.push(v(&x));
        }
        iterates.push(x.clone());
    }
    Ok(AppaOutput { x, status: Status::Ok, iters: t, delta, ledger, iterates, values })
}

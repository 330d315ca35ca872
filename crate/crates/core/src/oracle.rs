//! Oracle contracts, the minimax problem bundle and oracle-call accounting.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::sync::atomic::{AtomicU64, Ordering};

use crate::error::{check_dim, Error};
use crate::sets::ConstraintSet;
use crate::vector::{all_finite, dist_sq};

/// `(x, y) -> f(x, y)`
pub type ValueFn = Arc<dyn Fn(&[f64], &[f64]) -> f64 + Send + Sync>;
/// `(x, y, out)`: writes a partial gradient into `out`.
pub type GradFn = Arc<dyn Fn(&[f64], &[f64], &mut [f64]) + Send + Sync>;
/// A function of one block, e.g. `Phi(x) = max_y f(x, y)`.
pub type ScalarFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
/// A map between blocks, e.g. `x -> y*(x)`.
pub type PointMap = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// Smoothness and curvature constants of a problem.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SmoothnessProfile {
    pub ell: f64,
    pub mu_x: f64,
    pub mu_y: f64,
    pub diam_x: Option<f64>,
    pub diam_y: Option<f64>,
}

impl SmoothnessProfile {
    pub fn new(ell: f64, mu_x: f64, mu_y: f64) -> Result<Self, Error> {
        let p = SmoothnessProfile { ell, mu_x, mu_y, diam_x: None, diam_y: None };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), Error> {
        if !(self.ell.is_finite() && self.ell > 0.0) {
            return Err(Error::InvalidParameter("ell must be positive"));
        }
        if !(self.mu_x >= 0.0 && self.mu_y >= 0.0) {
            return Err(Error::InvalidParameter("moduli must be nonnegative"));
        }
        // A relative slack absorbs rounding in constants computed from spectra.
        let slack = self.ell * 1e-12;
        if self.mu_x > self.ell + slack || self.mu_y > self.ell + slack {
            return Err(Error::InvalidParameter("moduli cannot exceed ell"));
        }
        for d in [self.diam_x, self.diam_y].into_iter().flatten() {
            if !(d.is_finite() && d >= 0.0) {
                return Err(Error::InvalidParameter("diameters must be finite and nonnegative"));
            }
        }
        Ok(())
    }

    pub fn kappa_x(&self) -> Option<f64> {
        (self.mu_x > 0.0).then(|| self.ell / self.mu_x)
    }

    pub fn kappa_y(&self) -> Option<f64> {
        (self.mu_y > 0.0).then(|| self.ell / self.mu_y)
    }
}

/// Closed-form knowledge about a problem, used by certificates and tests.
#[derive(Clone, Default)]
pub struct Reference {
    pub saddle: Option<(Vec<f64>, Vec<f64>)>,
    /// `Phi(x) = max_{y in Y} f(x, y)`
    pub phi: Option<ScalarFn>,
    /// A maximizer `y*(x)`.
    pub y_star: Option<PointMap>,
    /// `Psi(y) = min_{x in X} f(x, y)`
    pub psi: Option<ScalarFn>,
    /// A minimizer `x*(y)`.
    pub x_star: Option<PointMap>,
}

impl fmt::Debug for Reference {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Reference")
            .field("saddle", &self.saddle)
            .field("phi", &self.phi.is_some())
            .field("y_star", &self.y_star.is_some())
            .field("psi", &self.psi.is_some())
            .field("x_star", &self.x_star.is_some())
            .finish()
    }
}

/// `min_{x in X} max_{y in Y} f(x, y)` given by first-order oracles.
#[derive(Clone)]
pub struct MinimaxProblem {
    value: ValueFn,
    grad_x: GradFn,
    grad_y: GradFn,
    pub set_x: ConstraintSet,
    pub set_y: ConstraintSet,
    pub profile: SmoothnessProfile,
    pub reference: Reference,
}

impl fmt::Debug for MinimaxProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MinimaxProblem")
            .field("set_x", &self.set_x)
            .field("set_y", &self.set_y)
            .field("profile", &self.profile)
            .field("reference", &self.reference)
            .finish_non_exhaustive()
    }
}

impl MinimaxProblem {
    /// Bundles oracles and sets. Missing diameters in `profile` are filled
    /// from the sets.
    pub fn new(
        value: ValueFn,
        grad_x: GradFn,
        grad_y: GradFn,
        set_x: ConstraintSet,
        set_y: ConstraintSet,
        mut profile: SmoothnessProfile,
    ) -> Result<Self, Error> {
        if profile.diam_x.is_none() {
            profile.diam_x = set_x.diameter();
        }
        if profile.diam_y.is_none() {
            profile.diam_y = set_y.diameter();
        }
        profile.validate()?;
        let p = MinimaxProblem {
            value,
            grad_x,
            grad_y,
            set_x,
            set_y,
            profile,
            reference: Reference::default(),
        };
        p.check_oracle_shapes()?;
        Ok(p)
    }

    pub fn with_reference(mut self, reference: Reference) -> Self {
        self.reference = reference;
        self
    }

    fn check_oracle_shapes(&self) -> Result<(), Error> {
        // Evaluate once at the default points; the gradients must fill their
        // buffers with finite values.
        let x = self.set_x.default_point();
        let y = self.set_y.default_point();
        let mut gx = vec![f64::NAN; x.len()];
        let mut gy = vec![f64::NAN; y.len()];
        (self.grad_x)(&x, &y, &mut gx);
        (self.grad_y)(&x, &y, &mut gy);
        if !(self.value)(&x, &y).is_finite() || !all_finite(&gx) || !all_finite(&gy) {
            return Err(Error::NonFinite);
        }
        Ok(())
    }

    pub fn dim_x(&self) -> usize {
        self.set_x.dim()
    }

    pub fn dim_y(&self) -> usize {
        self.set_y.dim()
    }

    pub fn ell(&self) -> f64 {
        self.profile.ell
    }

    #[inline]
    pub fn value(&self, x: &[f64], y: &[f64]) -> f64 {
        (self.value)(x, y)
    }

    #[inline]
    pub fn grad_x_into(&self, x: &[f64], y: &[f64], out: &mut [f64]) {
        (self.grad_x)(x, y, out)
    }

    #[inline]
    pub fn grad_y_into(&self, x: &[f64], y: &[f64], out: &mut [f64]) {
        (self.grad_y)(x, y, out)
    }

    pub fn grad_x(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim_x()];
        self.grad_x_into(x, y, &mut out);
        out
    }

    pub fn grad_y(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim_y()];
        self.grad_y_into(x, y, &mut out);
        out
    }

    pub fn check_point(&self, x: &[f64], y: &[f64]) -> Result<(), Error> {
        check_dim(self.dim_x(), x.len())?;
        check_dim(self.dim_y(), y.len())?;
        if !all_finite(x) || !all_finite(y) {
            return Err(Error::NonFinite);
        }
        Ok(())
    }

    pub fn diam_y(&self) -> Result<f64, Error> {
        self.profile.diam_y.ok_or(Error::MissingDiameter)
    }

    pub fn diam_x(&self) -> Result<f64, Error> {
        self.profile.diam_x.ok_or(Error::MissingDiameter)
    }

    /// A problem whose oracles tally into `counter` before delegating.
    pub fn counted(&self, counter: &OracleCounter) -> MinimaxProblem {
        let (v, c) = (self.value.clone(), counter.clone());
        let value: ValueFn = Arc::new(move |x, y| {
            c.0.value.fetch_add(1, Ordering::Relaxed);
            v(x, y)
        });
        let (g, c) = (self.grad_x.clone(), counter.clone());
        let grad_x: GradFn = Arc::new(move |x, y, out| {
            c.0.grad_x.fetch_add(1, Ordering::Relaxed);
            g(x, y, out)
        });
        let (g, c) = (self.grad_y.clone(), counter.clone());
        let grad_y: GradFn = Arc::new(move |x, y, out| {
            c.0.grad_y.fetch_add(1, Ordering::Relaxed);
            g(x, y, out)
        });
        MinimaxProblem { value, grad_x, grad_y, ..self.clone() }
    }

    /// `f(x, y) + coef * ||x - center||^2`, with constants left for the
    /// caller to set. References are dropped.
    pub fn proximal_in_x(&self, center: &[f64], coef: f64) -> MinimaxProblem {
        self.add_quadratic(Some((center.to_vec(), coef)), None)
    }

    /// `f(x, y) + cx * ||x - ax||^2 - cy * ||y - ay||^2` with analytic
    /// gradients. Profile constants are left unchanged and references dropped.
    pub fn add_quadratic(&self, x_term: Option<(Vec<f64>, f64)>, y_term: Option<(Vec<f64>, f64)>) -> MinimaxProblem {
        let x_term = x_term.filter(|(_, c)| *c != 0.0).map(Arc::new);
        let y_term = y_term.filter(|(_, c)| *c != 0.0).map(Arc::new);
        let (v, xt, yt) = (self.value.clone(), x_term.clone(), y_term.clone());
        let value: ValueFn = Arc::new(move |x, y| {
            let mut f = v(x, y);
            if let Some(t) = &xt {
                f += t.1 * dist_sq(x, &t.0);
            }
            if let Some(t) = &yt {
                f -= t.1 * dist_sq(y, &t.0);
            }
            f
        });
        let grad_x = match x_term {
            None => self.grad_x.clone(),
            Some(t) => {
                let g = self.grad_x.clone();
                Arc::new(move |x: &[f64], y: &[f64], out: &mut [f64]| {
                    g(x, y, out);
                    for ((o, xi), ci) in out.iter_mut().zip(x).zip(&t.0) {
                        *o += 2.0 * t.1 * (xi - ci);
                    }
                }) as GradFn
            }
        };
        let grad_y = match y_term {
            None => self.grad_y.clone(),
            Some(t) => {
                let g = self.grad_y.clone();
                Arc::new(move |x: &[f64], y: &[f64], out: &mut [f64]| {
                    g(x, y, out);
                    for ((o, yi), ci) in out.iter_mut().zip(y).zip(&t.0) {
                        *o -= 2.0 * t.1 * (yi - ci);
                    }
                }) as GradFn
            }
        };
        MinimaxProblem {
            value,
            grad_x,
            grad_y,
            set_x: self.set_x.clone(),
            set_y: self.set_y.clone(),
            profile: self.profile,
            reference: Reference::default(),
        }
    }

    /// Same oracles with a different profile.
    pub fn with_profile(&self, profile: SmoothnessProfile) -> MinimaxProblem {
        MinimaxProblem { profile, ..self.clone() }
    }
}

/// Convenience form of [`MinimaxProblem::counted`].
pub fn counted(problem: &MinimaxProblem, counter: &OracleCounter) -> MinimaxProblem {
    problem.counted(counter)
}

#[derive(Debug, Default)]
struct Tallies {
    grad_x: AtomicU64,
    grad_y: AtomicU64,
    value: AtomicU64,
}

/// Shared handle to per-run oracle tallies. Clones observe the same tallies.
#[derive(Clone, Debug, Default)]
pub struct OracleCounter(Arc<Tallies>);

/// Snapshot of an [`OracleCounter`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OracleCounts {
    pub grad_x_calls: u64,
    pub grad_y_calls: u64,
    pub value_calls: u64,
}

impl OracleCounts {
    /// Total gradient evaluations; each partial gradient counts once.
    pub fn gradient_total(&self) -> u64 {
        self.grad_x_calls + self.grad_y_calls
    }
}

impl OracleCounter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn counts(&self) -> OracleCounts {
        OracleCounts {
            grad_x_calls: self.0.grad_x.load(Ordering::Relaxed),
            grad_y_calls: self.0.grad_y.load(Ordering::Relaxed),
            value_calls: self.0.value.load(Ordering::Relaxed),
        }
    }

    pub fn reset(&self) {
        self.0.grad_x.store(0, Ordering::Relaxed);
        self.0.grad_y.store(0, Ordering::Relaxed);
        self.0.value.store(0, Ordering::Relaxed);
    }
}

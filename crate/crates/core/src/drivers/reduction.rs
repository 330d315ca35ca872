//! Quadratic regularizations that turn weaker curvature assumptions into
//! strongly concave (and strongly convex) ones.

use alloc::vec::Vec;

use crate::error::{check_dim, Error};
use crate::oracle::MinimaxProblem;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReductionKind {
    /// `f - eps/(4 Dy^2) ||y - y0||^2`
    Scc,
    /// `f + eps/(8 Dx^2) ||x - x0||^2 - eps/(8 Dy^2) ||y - y0||^2`
    Cc,
    /// `f - eps/(4 Dy) ||y - y0||^2`
    Nc,
    /// `f - eps^2/(200 ell Dy^2) ||y - y0||^2`
    NcMoreau,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReductionSpec {
    pub kind: ReductionKind,
    pub eps: f64,
    /// Anchor for the `x` term; required by [`ReductionKind::Cc`].
    pub x0: Option<Vec<f64>>,
    pub y0: Vec<f64>,
}

impl ReductionSpec {
    pub fn new(kind: ReductionKind, eps: f64, x0: Option<&[f64]>, y0: &[f64]) -> Self {
        ReductionSpec { kind, eps, x0: x0.map(<[f64]>::to_vec), y0: y0.to_vec() }
    }
}

/// Coefficients `(cx, cy)` of `+cx ||x - x0||^2` and `-cy ||y - y0||^2`.
pub fn coefficients(base: &MinimaxProblem, desc: &ReductionSpec) -> Result<(f64, f64), Error> {
    let eps = desc.eps;
    let ell = base.ell();
    let dy = base.diam_y()?;
    Ok(match desc.kind {
        ReductionKind::Scc => (0.0, eps / (4.0 * dy * dy)),
        ReductionKind::Cc => {
            let dx = base.diam_x()?;
            (eps / (8.0 * dx * dx), eps / (8.0 * dy * dy))
        }
        ReductionKind::Nc => (0.0, eps / (4.0 * dy)),
        ReductionKind::NcMoreau => (0.0, eps * eps / (200.0 * ell * dy * dy)),
    })
}

/// Adds the regularizer of `desc` to `base`.
///
/// Each moduli increases by the curvature `2c` of its term and `ell` by the
/// largest added curvature. References of the base problem are dropped.
pub fn reduce(base: &MinimaxProblem, desc: &ReductionSpec) -> Result<MinimaxProblem, Error> {
    if !(desc.eps >= 0.0 && desc.eps.is_finite()) {
        return Err(Error::InvalidParameter("eps must be nonnegative"));
    }
    check_dim(base.dim_y(), desc.y0.len())?;
    let (cx, cy) = coefficients(base, desc)?;
    if !(cx.is_finite() && cy.is_finite()) {
        return Err(Error::InvalidParameter("regularization needs positive diameters"));
    }
    let x_term = if cx > 0.0 {
        let x0 = desc.x0.clone().ok_or(Error::InvalidParameter("x anchor required"))?;
        check_dim(base.dim_x(), x0.len())?;
        Some((x0, cx))
    } else {
        None
    };
    let mut out = base.add_quadratic(x_term, Some((desc.y0.clone(), cy)));
    out.profile.mu_x += 2.0 * cx;
    out.profile.mu_y += 2.0 * cy;
    out.profile.ell += 2.0 * cx.max(cy);
    Ok(out)
}

//! Constraint sets with exact Euclidean projection.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{check_dim, Error};
use crate::math;
use crate::vector::{all_finite, dist, dist_sq, norm, Vector};

/// Absolute tolerance used for membership tests.
pub const FEASIBILITY_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub enum ConstraintSet {
    WholeSpace(usize),
    Box { lower: Vec<f64>, upper: Vec<f64> },
    Ball { center: Vec<f64>, radius: f64 },
    /// The probability simplex `{ p >= 0, sum p = 1 }`.
    Simplex(usize),
}

impl ConstraintSet {
    pub fn whole_space(dim: usize) -> Result<Self, Error> {
        if dim == 0 {
            return Err(Error::EmptyVector);
        }
        Ok(ConstraintSet::WholeSpace(dim))
    }

    pub fn boxed(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self, Error> {
        if lower.is_empty() {
            return Err(Error::EmptyVector);
        }
        check_dim(lower.len(), upper.len())?;
        if !all_finite(&lower) || !all_finite(&upper) {
            return Err(Error::NonFinite);
        }
        if lower.iter().zip(&upper).any(|(l, u)| l > u) {
            return Err(Error::InvalidParameter("box lower bound exceeds upper bound"));
        }
        Ok(ConstraintSet::Box { lower, upper })
    }

    /// The cube `[-r, r]^dim`.
    pub fn symmetric_box(dim: usize, r: f64) -> Result<Self, Error> {
        Self::boxed(vec![-r; dim], vec![r; dim])
    }

    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self, Error> {
        if center.is_empty() {
            return Err(Error::EmptyVector);
        }
        if !all_finite(&center) {
            return Err(Error::NonFinite);
        }
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidParameter("ball radius must be positive"));
        }
        Ok(ConstraintSet::Ball { center, radius })
    }

    pub fn simplex(dim: usize) -> Result<Self, Error> {
        if dim == 0 {
            return Err(Error::EmptyVector);
        }
        Ok(ConstraintSet::Simplex(dim))
    }

    pub fn dim(&self) -> usize {
        match self {
            ConstraintSet::WholeSpace(n) | ConstraintSet::Simplex(n) => *n,
            ConstraintSet::Box { lower, .. } => lower.len(),
            ConstraintSet::Ball { center, .. } => center.len(),
        }
    }

    pub fn is_bounded(&self) -> bool {
        !matches!(self, ConstraintSet::WholeSpace(_))
    }

    /// Euclidean diameter; `None` for the unbounded whole space.
    pub fn diameter(&self) -> Option<f64> {
        match self {
            ConstraintSet::WholeSpace(_) => None,
            ConstraintSet::Box { lower, upper } => Some(dist(lower, upper)),
            ConstraintSet::Ball { radius, .. } => Some(2.0 * radius),
            ConstraintSet::Simplex(n) => Some(if *n > 1 { math::sqrt(2.0) } else { 0.0 }),
        }
    }

    /// A canonical interior-ish point: the box midpoint, ball center,
    /// simplex barycenter or the origin.
    pub fn center(&self) -> Vec<f64> {
        match self {
            ConstraintSet::WholeSpace(n) => vec![0.0; *n],
            ConstraintSet::Box { lower, upper } => {
                lower.iter().zip(upper).map(|(l, u)| 0.5 * (l + u)).collect()
            }
            ConstraintSet::Ball { center, .. } => center.clone(),
            ConstraintSet::Simplex(n) => vec![1.0 / *n as f64; *n],
        }
    }

    /// Projection of the origin; the default starting point of the solvers.
    pub fn default_point(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        let zero = out.clone();
        self.project_into(&zero, &mut out);
        out
    }

    pub fn contains(&self, p: &[f64], tol: f64) -> bool {
        if p.len() != self.dim() {
            return false;
        }
        match self {
            ConstraintSet::WholeSpace(_) => true,
            ConstraintSet::Box { lower, upper } => p
                .iter()
                .zip(lower.iter().zip(upper))
                .all(|(x, (l, u))| *x >= l - tol && *x <= u + tol),
            ConstraintSet::Ball { center, radius } => dist(p, center) <= radius + tol,
            ConstraintSet::Simplex(_) => {
                p.iter().all(|x| *x >= -tol) && math::abs(p.iter().sum::<f64>() - 1.0) <= tol
            }
        }
    }

    /// Unchecked projection of `p` into `out`. Both slices must have the
    /// set's dimension.
    pub fn project_into(&self, p: &[f64], out: &mut [f64]) {
        match self {
            ConstraintSet::WholeSpace(_) => out.copy_from_slice(p),
            ConstraintSet::Box { lower, upper } => {
                for (i, o) in out.iter_mut().enumerate() {
                    *o = p[i].clamp(lower[i], upper[i]);
                }
            }
            ConstraintSet::Ball { center, radius } => {
                let d = dist(p, center);
                if d <= *radius {
                    out.copy_from_slice(p);
                } else {
                    let s = radius / d;
                    for (i, o) in out.iter_mut().enumerate() {
                        *o = center[i] + s * (p[i] - center[i]);
                    }
                }
            }
            ConstraintSet::Simplex(_) => project_simplex(p, out),
        }
    }

    /// Unchecked projection returning a fresh vector.
    pub fn proj(&self, p: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; p.len()];
        self.project_into(p, &mut out);
        out
    }

    /// Unchecked projection in place.
    pub fn project_in_place(&self, p: &mut [f64]) {
        match self {
            ConstraintSet::WholeSpace(_) => {}
            ConstraintSet::Box { lower, upper } => {
                for (i, x) in p.iter_mut().enumerate() {
                    *x = x.clamp(lower[i], upper[i]);
                }
            }
            _ => {
                let src = p.to_vec();
                self.project_into(&src, p);
            }
        }
    }
}

/// Sort-based threshold projection onto the probability simplex.
fn project_simplex(p: &[f64], out: &mut [f64]) {
    let mut sorted = p.to_vec();
    sorted.sort_unstable_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut tau = 0.0;
    for (k, u) in sorted.iter().enumerate() {
        cumsum += u;
        let t = (cumsum - 1.0) / (k + 1) as f64;
        if u - t > 0.0 {
            tau = t;
        }
    }
    for (o, x) in out.iter_mut().zip(p) {
        *o = (x - tau).max(0.0);
    }
    // Absorb the rounding error of the threshold into the largest entry so the
    // output sums to one.
    let total: f64 = out.iter().sum();
    if let Some((imax, _)) = out.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)) {
        out[imax] += 1.0 - total;
    }
}

/// Checked Euclidean projection.
pub fn project(set: &ConstraintSet, p: &[f64]) -> Result<Vector, Error> {
    check_dim(set.dim(), p.len())?;
    if !all_finite(p) {
        return Err(Error::NonFinite);
    }
    Vector::new(set.proj(p))
}

/// Norm of the gradient mapping `(1/step) * || p - P(p - step * g) ||`.
pub fn grad_mapping_norm(set: &ConstraintSet, p: &[f64], g: &[f64], step: f64) -> Result<f64, Error> {
    check_dim(set.dim(), p.len())?;
    check_dim(set.dim(), g.len())?;
    if !all_finite(p) || !all_finite(g) || !step.is_finite() {
        return Err(Error::NonFinite);
    }
    if step <= 0.0 {
        return Err(Error::InvalidParameter("step must be positive"));
    }
    let trial: Vec<f64> = p.iter().zip(g).map(|(pi, gi)| pi - step * gi).collect();
    Ok(dist(p, &set.proj(&trial)) / step)
}

/// Squared residual `|| p - P(p - step * g) ||^2` without the `1/step` factor.
pub(crate) fn step_residual_sq(set: &ConstraintSet, p: &[f64], g: &[f64], step: f64, image: &mut [f64]) -> f64 {
    for ((o, pi), gi) in image.iter_mut().zip(p).zip(g) {
        *o = pi - step * gi;
    }
    set.project_in_place(image);
    dist_sq(p, image)
}

/// Largest feasible-point magnitude scale used by the precision floor.
pub(crate) fn scale_of(p: &[f64]) -> f64 {
    norm(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_projection_scales_radially() {
        let s = ConstraintSet::ball(vec![0.0, 0.0], 1.0).unwrap();
        let p = project(&s, &[3.0, 4.0]).unwrap();
        assert!((p[0] - 0.6).abs() < 1e-15 && (p[1] - 0.8).abs() < 1e-15);
    }

    #[test]
    fn box_interior_point_is_fixed() {
        let s = ConstraintSet::boxed(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        assert_eq!(project(&s, &[0.5, 0.5]).unwrap().as_slice(), &[0.5, 0.5]);
    }

    #[test]
    fn simplex_projection_of_vertex_overshoot() {
        let s = ConstraintSet::simplex(2).unwrap();
        assert_eq!(project(&s, &[2.0, 0.0]).unwrap().as_slice(), &[1.0, 0.0]);
        let q = project(&s, &[0.3, 0.3]).unwrap();
        assert!((q[0] - 0.5).abs() < 1e-15 && (q[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn gradient_mapping_examples() {
        let w = ConstraintSet::whole_space(1).unwrap();
        assert_eq!(grad_mapping_norm(&w, &[1.0], &[2.0], 0.5).unwrap(), 2.0);
        let b = ConstraintSet::boxed(vec![0.0], vec![1.0]).unwrap();
        assert_eq!(grad_mapping_norm(&b, &[0.0], &[3.0], 1.0).unwrap(), 0.0);
        // p - g = (2, 0) projects back onto p itself.
        let ball = ConstraintSet::ball(vec![0.0, 0.0], 1.0).unwrap();
        assert_eq!(grad_mapping_norm(&ball, &[1.0, 0.0], &[-1.0, 0.0], 1.0).unwrap(), 0.0);
    }

    #[test]
    fn rejects_bad_input() {
        let s = ConstraintSet::whole_space(2).unwrap();
        assert!(matches!(project(&s, &[1.0]), Err(Error::DimensionMismatch { .. })));
        assert_eq!(project(&s, &[f64::NAN, 0.0]), Err(Error::NonFinite));
        assert!(ConstraintSet::ball(vec![0.0], 0.0).is_err());
        assert!(ConstraintSet::boxed(vec![1.0], vec![0.0]).is_err());
    }

    #[test]
    fn diameters() {
        assert_eq!(ConstraintSet::whole_space(3).unwrap().diameter(), None);
        assert_eq!(ConstraintSet::ball(vec![0.0], 2.0).unwrap().diameter(), Some(4.0));
        assert_eq!(ConstraintSet::symmetric_box(1, 1.0).unwrap().diameter(), Some(2.0));
        assert_eq!(ConstraintSet::simplex(3).unwrap().diameter(), Some(math::sqrt(2.0)));
    }
}

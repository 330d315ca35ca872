//! Dense real vectors and the slice arithmetic the solvers are written in.

use alloc::vec::Vec;
use core::ops::Deref;

use crate::error::Error;
use crate::math;

/// A non-empty vector of finite reals.
///
/// Solvers work on plain slices internally; `Vector` is the checked form used
/// at API boundaries where the finiteness invariant matters.
#[derive(Clone, Debug, PartialEq)]
pub struct Vector(Vec<f64>);

impl Vector {
    pub fn new(entries: Vec<f64>) -> Result<Self, Error> {
        if entries.is_empty() {
            return Err(Error::EmptyVector);
        }
        if !all_finite(&entries) {
            return Err(Error::NonFinite);
        }
        Ok(Vector(entries))
    }

    pub fn zeros(dim: usize) -> Result<Self, Error> {
        Self::new(alloc::vec![0.0; dim])
    }

    pub fn from_slice(entries: &[f64]) -> Result<Self, Error> {
        Self::new(entries.to_vec())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for Vector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl From<Vector> for Vec<f64> {
    fn from(v: Vector) -> Vec<f64> {
        v.0
    }
}

impl TryFrom<Vec<f64>> for Vector {
    type Error = Error;

    fn try_from(entries: Vec<f64>) -> Result<Self, Error> {
        Vector::new(entries)
    }
}

pub fn all_finite(v: &[f64]) -> bool {
    v.iter().all(|x| x.is_finite())
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm_sq(a: &[f64]) -> f64 {
    dot(a, a)
}

pub fn norm(a: &[f64]) -> f64 {
    math::sqrt(norm_sq(a))
}

pub fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    math::sqrt(dist_sq(a, b))
}

/// `y += alpha * x`
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// `out = a + alpha * b`
pub fn add_scaled(a: &[f64], alpha: f64, b: &[f64], out: &mut [f64]) {
    for ((o, ai), bi) in out.iter_mut().zip(a).zip(b) {
        *o = ai + alpha * bi;
    }
}

/// Momentum extrapolation `out = x + theta * (x - x_prev)`.
pub fn extrapolate(x: &[f64], x_prev: &[f64], theta: f64, out: &mut [f64]) {
    for ((o, xi), pi) in out.iter_mut().zip(x).zip(x_prev) {
        *o = xi + theta * (xi - pi);
    }
}

pub fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| if math::abs(*x) > m { math::abs(*x) } else { m })
}

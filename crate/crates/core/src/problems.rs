//! Parametric test families with exact constants and closed-form references.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{check_dim, check_positive, Error};
use crate::math;
use crate::oracle::{GradFn, MinimaxProblem, PointMap, Reference, ScalarFn, SmoothnessProfile, ValueFn};
use crate::sets::{ConstraintSet, FEASIBILITY_TOL};
use crate::vector::{dot, norm};

/// Row-major dense matrix used inside oracles.
#[derive(Clone, Debug, PartialEq)]
struct Dense {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Dense {
    fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self, Error> {
        check_dim(rows * cols, data.len())?;
        Ok(Dense { rows, cols, data })
    }

    fn from_na(m: &DMatrix<f64>) -> Self {
        let (rows, cols) = m.shape();
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(m[(i, j)]);
            }
        }
        Dense { rows, cols, data }
    }

    fn to_na(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    /// `out += M v`
    #[inline]
    fn mul_add(&self, v: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            let row = &self.data[i * self.cols..(i + 1) * self.cols];
            *o += dot(row, v);
        }
    }

    /// `out += M^T v`
    #[inline]
    fn tmul_add(&self, v: &[f64], out: &mut [f64]) {
        for (i, vi) in v.iter().enumerate() {
            let row = &self.data[i * self.cols..(i + 1) * self.cols];
            for (o, r) in out.iter_mut().zip(row) {
                *o += r * vi;
            }
        }
    }

    fn mul(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.rows];
        self.mul_add(v, &mut out);
        out
    }

    fn tmul(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.cols];
        self.tmul_add(v, &mut out);
        out
    }

    fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self.data[i * self.cols + j] == 0.0))
    }

    fn diag(&self) -> Vec<f64> {
        (0..self.rows).map(|i| self.data[i * self.cols + i]).collect()
    }
}

fn spectral_abs_max(m: &DMatrix<f64>) -> f64 {
    m.clone().symmetric_eigenvalues().iter().fold(0.0, |acc, v| acc.max(math::abs(*v)))
}

fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    m.clone().symmetric_eigenvalues().iter().fold(f64::INFINITY, |acc, v| acc.min(*v))
}

fn is_symmetric(m: &DMatrix<f64>) -> bool {
    let scale = m.iter().fold(1.0f64, |a, v| a.max(math::abs(*v)));
    (0..m.nrows()).all(|i| (0..i).all(|j| math::abs(m[(i, j)] - m[(j, i)]) <= 1e-12 * scale))
}

/// Largest absolute eigenvalue of the symmetric block matrix `[[P, A], [A^T, -Q]]`.
fn jacobian_norm(p: &DMatrix<f64>, a: &DMatrix<f64>, q: &DMatrix<f64>) -> f64 {
    let (m, n) = (p.nrows(), q.nrows());
    let mut j = DMatrix::zeros(m + n, m + n);
    j.view_mut((0, 0), (m, m)).copy_from(p);
    j.view_mut((0, m), (m, n)).copy_from(a);
    j.view_mut((m, 0), (n, m)).copy_from(&a.transpose());
    j.view_mut((m, m), (n, n)).copy_from(&(-q));
    spectral_abs_max(&j)
}

/// Closed-form block argmin of a separable strongly convex quadratic
/// `1/2 v^T H v - g^T v` over `set`, when one exists: unconstrained, a box
/// with diagonal `H`, or a one-dimensional ball.
fn quadratic_argmin(h: &Dense, h_inv: &Dense, set: &ConstraintSet) -> Option<Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>> {
    match set {
        ConstraintSet::WholeSpace(_) => {
            let h_inv = h_inv.clone();
            Some(Arc::new(move |g: &[f64]| h_inv.mul(g)))
        }
        ConstraintSet::Box { .. } if h.is_diagonal() => {
            let d = h.diag();
            let s = set.clone();
            Some(Arc::new(move |g: &[f64]| {
                let v: Vec<f64> = g.iter().zip(&d).map(|(gi, di)| gi / di).collect();
                s.proj(&v)
            }))
        }
        ConstraintSet::Ball { center, .. } if center.len() == 1 => {
            let d = h.diag();
            let s = set.clone();
            Some(Arc::new(move |g: &[f64]| s.proj(&[g[0] / d[0]])))
        }
        _ => None,
    }
}

/// `f(x, y) = 1/2 x^T P x + x^T A y - 1/2 y^T Q y + b^T x + c^T y`
///
/// Matrices are row-major: `P` is `dim_x x dim_x`, `A` is `dim_x x dim_y`,
/// `Q` is `dim_y x dim_y`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticScsc {
    pub dim_x: usize,
    pub dim_y: usize,
    pub p: Vec<f64>,
    pub a: Vec<f64>,
    pub q: Vec<f64>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    pub set_x: ConstraintSet,
    pub set_y: ConstraintSet,
}

impl QuadraticScsc {
    /// One-dimensional instance.
    pub fn scalar(p: f64, a: f64, q: f64, b: f64, c: f64, set_x: ConstraintSet, set_y: ConstraintSet) -> Self {
        QuadraticScsc { dim_x: 1, dim_y: 1, p: vec![p], a: vec![a], q: vec![q], b: vec![b], c: vec![c], set_x, set_y }
    }

    fn matrices(&self) -> Result<(DMatrix<f64>, DMatrix<f64>, DMatrix<f64>), Error> {
        let (m, n) = (self.dim_x, self.dim_y);
        if m == 0 || n == 0 {
            return Err(Error::EmptyVector);
        }
        check_dim(m * m, self.p.len())?;
        check_dim(m * n, self.a.len())?;
        check_dim(n * n, self.q.len())?;
        check_dim(m, self.b.len())?;
        check_dim(n, self.c.len())?;
        check_dim(m, self.set_x.dim())?;
        check_dim(n, self.set_y.dim())?;
        let all = self.p.iter().chain(&self.a).chain(&self.q).chain(&self.b).chain(&self.c);
        if !all.into_iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok((
            DMatrix::from_row_slice(m, m, &self.p),
            DMatrix::from_row_slice(m, n, &self.a),
            DMatrix::from_row_slice(n, n, &self.q),
        ))
    }

    /// `(ell, mu_x, mu_y)`: the spectral norm of the Hessian
    /// `[[P, A], [A^T, -Q]]` and the smallest eigenvalues of `P` and `Q`.
    pub fn constants(&self) -> Result<(f64, f64, f64), Error> {
        let (p, a, q) = self.matrices()?;
        if !is_symmetric(&p) || !is_symmetric(&q) {
            return Err(Error::InvalidParameter("P and Q must be symmetric"));
        }
        Ok((jacobian_norm(&p, &a, &q), min_eigenvalue(&p), min_eigenvalue(&q)))
    }

    /// The stationary point of `f` on the whole space.
    pub fn unconstrained_saddle(&self) -> Result<(Vec<f64>, Vec<f64>), Error> {
        let (p, a, q) = self.matrices()?;
        let (m, n) = (self.dim_x, self.dim_y);
        let mut j = DMatrix::zeros(m + n, m + n);
        j.view_mut((0, 0), (m, m)).copy_from(&p);
        j.view_mut((0, m), (m, n)).copy_from(&a);
        j.view_mut((m, 0), (n, m)).copy_from(&a.transpose());
        j.view_mut((m, m), (n, n)).copy_from(&(-q));
        let rhs = nalgebra::DVector::from_iterator(m + n, self.b.iter().chain(&self.c).map(|v| -v));
        let z = j.lu().solve(&rhs).ok_or(Error::InvalidParameter("singular saddle system"))?;
        Ok((z.iter().take(m).copied().collect(), z.iter().skip(m).copied().collect()))
    }

    pub fn build(&self) -> Result<MinimaxProblem, Error> {
        let (ell, mu_x, mu_y) = self.constants()?;
        if !(mu_x > 0.0 && mu_y > 0.0) {
            return Err(Error::InvalidParameter("P and Q must be positive definite"));
        }
        let (pm, am, qm) = self.matrices()?;
        let p = Arc::new(Dense::from_na(&pm));
        let a = Arc::new(Dense::from_na(&am));
        let q = Arc::new(Dense::from_na(&qm));
        let p_inv = Dense::from_na(&pm.clone().try_inverse().ok_or(Error::InvalidParameter("P is singular"))?);
        let q_inv = Dense::from_na(&qm.clone().try_inverse().ok_or(Error::InvalidParameter("Q is singular"))?);
        let b = Arc::new(self.b.clone());
        let c = Arc::new(self.c.clone());

        let value = {
            let (p, a, q, b, c) = (p.clone(), a.clone(), q.clone(), b.clone(), c.clone());
            Arc::new(move |x: &[f64], y: &[f64]| quad_value(&p, &a, &q, &b, &c, x, y)) as ValueFn
        };
        let grad_x = {
            let (p, a, b) = (p.clone(), a.clone(), b.clone());
            Arc::new(move |x: &[f64], y: &[f64], out: &mut [f64]| {
                out.copy_from_slice(&b);
                p.mul_add(x, out);
                a.mul_add(y, out);
            }) as GradFn
        };
        let grad_y = {
            let (a, q, c) = (a.clone(), q.clone(), c.clone());
            Arc::new(move |x: &[f64], y: &[f64], out: &mut [f64]| {
                out.copy_from_slice(&c);
                a.tmul_add(x, out);
                for (i, o) in out.iter_mut().enumerate() {
                    let row = &q.data[i * q.cols..(i + 1) * q.cols];
                    *o -= dot(row, y);
                }
            }) as GradFn
        };
        let profile = SmoothnessProfile { ell, mu_x: mu_x.min(ell), mu_y: mu_y.min(ell), diam_x: None, diam_y: None };
        let problem = MinimaxProblem::new(value, grad_x, grad_y, self.set_x.clone(), self.set_y.clone(), profile)?;

        let mut reference = Reference::default();
        // y*(x) maximizes -1/2 y^T Q y + (A^T x + c)^T y.
        if let Some(argmin) = quadratic_argmin(&q, &q_inv, &self.set_y) {
            let (a, c) = (a.clone(), c.clone());
            let y_star: PointMap = Arc::new(move |x: &[f64]| {
                let mut g = (*c).clone();
                a.tmul_add(x, &mut g);
                argmin(&g)
            });
            let (v, ys) = (problem.clone(), y_star.clone());
            reference.phi = Some(Arc::new(move |x: &[f64]| v.value(x, &ys(x))) as ScalarFn);
            reference.y_star = Some(y_star);
        }
        // x*(y) minimizes 1/2 x^T P x + (A y + b)^T x.
        if let Some(argmin) = quadratic_argmin(&p, &p_inv, &self.set_x) {
            let (a, b) = (a.clone(), b.clone());
            let x_star: PointMap = Arc::new(move |y: &[f64]| {
                let mut g: Vec<f64> = b.iter().map(|v| -v).collect();
                let ay = a.mul(y);
                g.iter_mut().zip(&ay).for_each(|(gi, v)| *gi -= v);
                argmin(&g)
            });
            let (v, xs) = (problem.clone(), x_star.clone());
            reference.psi = Some(Arc::new(move |y: &[f64]| v.value(&xs(y), y)) as ScalarFn);
            reference.x_star = Some(x_star);
        }
        if let Ok((xs, ys)) = self.unconstrained_saddle() {
            if self.set_x.contains(&xs, FEASIBILITY_TOL) && self.set_y.contains(&ys, FEASIBILITY_TOL) {
                reference.saddle = Some((xs, ys));
            }
        }
        if reference.saddle.is_none() {
            // Alternate best responses converge when both are closed form and
            // the sets are boxes: the saddle is then the fixed point.
            if let (Some(xs), Some(ys)) = (&reference.x_star, &reference.y_star) {
                reference.saddle = best_response_fixed_point(xs.as_ref(), ys.as_ref(), &self.set_x.center(), ell, mu_x, mu_y);
            }
        }
        Ok(problem.with_reference(reference))
    }

    /// Random instance with exact condition numbers.
    ///
    /// `P` and `Q` have eigenvalues spread linearly from `mu` to 1 in a random
    /// orthonormal basis, `A` has spectral norm `coupling`, and `b, c` are
    /// uniform in `[-1, 1]`. The moduli are found by iterating
    /// `mu <- ell(mu) / kappa` to a fixed point. `X` is the whole space and `Y`
    /// is a ball around the origin twice as large as the unconstrained saddle.
    pub fn random(dim_x: usize, dim_y: usize, kappa_x: f64, kappa_y: f64, coupling: f64, seed: u64) -> Result<Self, Error> {
        if dim_x == 0 || dim_y == 0 {
            return Err(Error::EmptyVector);
        }
        if !(kappa_x > 1.0 && kappa_y > 1.0) {
            return Err(Error::InvalidParameter("condition numbers must exceed 1"));
        }
        check_positive(coupling, "coupling must be positive")?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ux = random_orthonormal(dim_x, &mut rng);
        let uy = random_orthonormal(dim_y, &mut rng);
        let mut a = DMatrix::from_fn(dim_x, dim_y, |_, _| rng.gen_range(-1.0..1.0));
        let sa = a.singular_values().max();
        if sa > 0.0 {
            a *= coupling / sa;
        }
        let b: Vec<f64> = (0..dim_x).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let c: Vec<f64> = (0..dim_y).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let spread = |u: &DMatrix<f64>, mu: f64| {
            let n = u.nrows();
            let d = DMatrix::from_diagonal(&nalgebra::DVector::from_fn(n, |i, _| {
                if n == 1 { mu } else { mu + (1.0 - mu) * i as f64 / (n - 1) as f64 }
            }));
            let m = u * d * u.transpose();
            (&m + m.transpose()) * 0.5
        };
        let (mut mx, mut my) = (1.0 / kappa_x, 1.0 / kappa_y);
        for _ in 0..200 {
            let ell = jacobian_norm(&spread(&ux, mx), &a, &spread(&uy, my));
            let (nx, ny) = (ell / kappa_x, ell / kappa_y);
            let done = math::abs(nx - mx) <= 1e-15 * mx && math::abs(ny - my) <= 1e-15 * my;
            mx = nx;
            my = ny;
            if done {
                break;
            }
        }
        let p = Dense::from_na(&spread(&ux, mx));
        let q = Dense::from_na(&spread(&uy, my));
        let mut inst = QuadraticScsc {
            dim_x,
            dim_y,
            p: p.data,
            a: Dense::from_na(&a).data,
            q: q.data,
            b,
            c,
            set_x: ConstraintSet::whole_space(dim_x)?,
            set_y: ConstraintSet::whole_space(dim_y)?,
        };
        let (_, ys) = inst.unconstrained_saddle()?;
        inst.set_y = ConstraintSet::ball(vec![0.0; dim_y], (2.0 * norm(&ys)).max(1.0))?;
        Ok(inst)
    }
}

fn best_response_fixed_point(
    x_star: &(dyn Fn(&[f64]) -> Vec<f64> + Send + Sync),
    y_star: &(dyn Fn(&[f64]) -> Vec<f64> + Send + Sync),
    x0: &[f64],
    ell: f64,
    mu_x: f64,
    mu_y: f64,
) -> Option<(Vec<f64>, Vec<f64>)> {
    // Damped best-response iteration on x: x <- x*(y*(x)) contracts only when
    // the coupling is weak, so confirm convergence before trusting it.
    let _ = (ell, mu_x, mu_y);
    let mut x = x0.to_vec();
    for _ in 0..10_000 {
        let nx = x_star(&y_star(&x));
        let step = crate::vector::dist(&nx, &x);
        x = nx;
        if step <= 1e-15 * (1.0 + norm(&x)) {
            let y = y_star(&x);
            let back = x_star(&y);
            return (crate::vector::dist(&back, &x) <= 1e-12 * (1.0 + norm(&x))).then_some((x, y));
        }
    }
    None
}

fn quad_value(p: &Dense, a: &Dense, q: &Dense, b: &[f64], c: &[f64], x: &[f64], y: &[f64]) -> f64 {
    let mut px = vec![0.0; x.len()];
    p.mul_add(x, &mut px);
    let mut ay = vec![0.0; x.len()];
    a.mul_add(y, &mut ay);
    let mut qy = vec![0.0; y.len()];
    q.mul_add(y, &mut qy);
    0.5 * dot(x, &px) + dot(x, &ay) - 0.5 * dot(y, &qy) + dot(b, x) + dot(c, y)
}

fn random_orthonormal(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let m = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    m.qr().q()
}

/// Unconstrained random instances with closed-form `x*(.)`, `y*(.)`, `Phi`
/// and `Psi`: dimensions 1 to 4, condition numbers between 2 and 50.
pub fn quadratic_suite(count: usize, seed: u64) -> Result<Vec<QuadraticScsc>, Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let (dx, dy) = (1 + i % 4, 1 + (i / 4) % 4);
            let kx = rng.gen_range(2.0..50.0);
            let ky = rng.gen_range(2.0..50.0);
            let mut q = QuadraticScsc::random(dx, dy, kx, ky, 0.5, rng.gen())?;
            q.set_y = ConstraintSet::whole_space(dy)?;
            Ok(q)
        })
        .collect()
}

/// Diagonal instances for condition-number sweeps, one per `(kappa_x, kappa_y)`.
///
/// `x, y` are two-dimensional with `P = diag(1/kx, 1)`, `Q = diag(1/ky, 1)`
/// and coupling `A = diag(a, 0)`, so `ell = 1` and the condition numbers are
/// exact. `a` is `coupling`, reduced if needed to keep the first block's norm
/// at most 1. `b, c` are seeded uniform in `[-1, 1]`; `X` is the whole space
/// and `Y = [-5, 5]^2`.
pub fn condition_sweep(kappas: &[(f64, f64)], coupling: f64, seed: u64) -> Result<Vec<QuadraticScsc>, Error> {
    let mut out = Vec::with_capacity(kappas.len());
    for (i, &(kx, ky)) in kappas.iter().enumerate() {
        if !(kx >= 1.0 && ky >= 1.0) {
            return Err(Error::InvalidParameter("condition numbers must be at least 1"));
        }
        let (p, q) = (1.0 / kx, 1.0 / ky);
        let room = (1.0 - math::abs(p - q) / 2.0) * (1.0 - math::abs(p - q) / 2.0) - (p + q) * (p + q) / 4.0;
        let a = coupling.max(0.0).min(math::sqrt(room.max(0.0)));
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ i as u64);
        let b: Vec<f64> = (0..2).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let c: Vec<f64> = (0..2).map(|_| rng.gen_range(-1.0..1.0)).collect();
        out.push(QuadraticScsc {
            dim_x: 2,
            dim_y: 2,
            p: vec![p, 0.0, 0.0, 1.0],
            a: vec![a, 0.0, 0.0, 0.0],
            q: vec![q, 0.0, 0.0, 1.0],
            b,
            c,
            set_x: ConstraintSet::whole_space(2)?,
            set_y: ConstraintSet::symmetric_box(2, 5.0)?,
        });
    }
    Ok(out)
}

/// `f(x, y) = x^T A y` on simplices; `A` is row-major `m x n`.
pub fn bilinear_simplex(m: usize, n: usize, a: Vec<f64>) -> Result<MinimaxProblem, Error> {
    let a = Dense::new(m, n, a)?;
    let ell = a.to_na().singular_values().max().max(f64::MIN_POSITIVE);
    let a = Arc::new(a);
    let value = {
        let a = a.clone();
        Arc::new(move |x: &[f64], y: &[f64]| dot(x, &a.mul(y))) as ValueFn
    };
    let grad_x = {
        let a = a.clone();
        Arc::new(move |_: &[f64], y: &[f64], out: &mut [f64]| {
            out.iter_mut().for_each(|o| *o = 0.0);
            a.mul_add(y, out)
        }) as GradFn
    };
    let grad_y = {
        let a = a.clone();
        Arc::new(move |x: &[f64], _: &[f64], out: &mut [f64]| {
            out.iter_mut().for_each(|o| *o = 0.0);
            a.tmul_add(x, out)
        }) as GradFn
    };
    let problem = MinimaxProblem::new(
        value,
        grad_x,
        grad_y,
        ConstraintSet::simplex(m)?,
        ConstraintSet::simplex(n)?,
        SmoothnessProfile::new(ell, 0.0, 0.0)?,
    )?;
    let argmax = |v: &[f64]| (0..v.len()).fold(0, |b, j| if v[j] > v[b] { j } else { b });
    let argmin = |v: &[f64]| (0..v.len()).fold(0, |b, j| if v[j] < v[b] { j } else { b });
    let reference = Reference {
        saddle: None,
        phi: Some({
            let a = a.clone();
            Arc::new(move |x: &[f64]| a.tmul(x).into_iter().fold(f64::NEG_INFINITY, f64::max))
        }),
        y_star: Some({
            let a = a.clone();
            Arc::new(move |x: &[f64]| {
                let mut e = vec![0.0; n];
                e[argmax(&a.tmul(x))] = 1.0;
                e
            })
        }),
        psi: Some({
            let a = a.clone();
            Arc::new(move |y: &[f64]| a.mul(y).into_iter().fold(f64::INFINITY, f64::min))
        }),
        x_star: Some({
            let a = a.clone();
            Arc::new(move |y: &[f64]| {
                let mut e = vec![0.0; m];
                e[argmin(&a.mul(y))] = 1.0;
                e
            })
        }),
    };
    Ok(problem.with_reference(reference))
}

/// `f(x, y) = (mu_x/2) ||x - b||^2 + x^T A y` on `R^m x Ball(0, D/2)`.
///
/// `Phi(x) = (mu_x/2) ||x - b||^2 + (D/2) ||A^T x||` and
/// `Psi(y) = b^T A y - ||A y||^2 / (2 mu_x)`.
pub fn scc_bilinear(mu_x: f64, b: Vec<f64>, m: usize, n: usize, a: Vec<f64>, diameter: f64) -> Result<MinimaxProblem, Error> {
    check_positive(mu_x, "mu_x must be positive")?;
    check_positive(diameter, "diameter must be positive")?;
    check_dim(m, b.len())?;
    let a = Dense::new(m, n, a)?;
    let mut h = DMatrix::zeros(m + n, m + n);
    h.view_mut((0, 0), (m, m)).fill_with_identity();
    h.view_mut((0, 0), (m, m)).scale_mut(mu_x);
    let an = a.to_na();
    h.view_mut((0, m), (m, n)).copy_from(&an);
    h.view_mut((m, 0), (n, m)).copy_from(&an.transpose());
    let ell = spectral_abs_max(&h);
    let a = Arc::new(a);
    let b = Arc::new(b);
    let value = {
        let (a, b) = (a.clone(), b.clone());
        Arc::new(move |x: &[f64], y: &[f64]| 0.5 * mu_x * crate::vector::dist_sq(x, &b) + dot(x, &a.mul(y))) as ValueFn
    };
    let grad_x = {
        let (a, b) = (a.clone(), b.clone());
        Arc::new(move |x: &[f64], y: &[f64], out: &mut [f64]| {
            for ((o, xi), bi) in out.iter_mut().zip(x).zip(b.iter()) {
                *o = mu_x * (xi - bi);
            }
            a.mul_add(y, out)
        }) as GradFn
    };
    let grad_y = {
        let a = a.clone();
        Arc::new(move |x: &[f64], _: &[f64], out: &mut [f64]| {
            out.iter_mut().for_each(|o| *o = 0.0);
            a.tmul_add(x, out)
        }) as GradFn
    };
    let radius = diameter / 2.0;
    let problem = MinimaxProblem::new(
        value,
        grad_x,
        grad_y,
        ConstraintSet::whole_space(m)?,
        ConstraintSet::ball(vec![0.0; n], radius)?,
        SmoothnessProfile::new(ell, mu_x.min(ell), 0.0)?,
    )?;
    let reference = Reference {
        saddle: None,
        phi: Some({
            let (a, b) = (a.clone(), b.clone());
            Arc::new(move |x: &[f64]| 0.5 * mu_x * crate::vector::dist_sq(x, &b) + radius * norm(&a.tmul(x)))
        }),
        y_star: Some({
            let a = a.clone();
            Arc::new(move |x: &[f64]| {
                let v = a.tmul(x);
                let s = norm(&v);
                if s > 0.0 { v.iter().map(|vi| radius * vi / s).collect() } else { vec![0.0; v.len()] }
            })
        }),
        psi: Some({
            let (a, b) = (a.clone(), b.clone());
            Arc::new(move |y: &[f64]| {
                let ay = a.mul(y);
                dot(&b, &ay) - crate::vector::norm_sq(&ay) / (2.0 * mu_x)
            })
        }),
        x_star: Some({
            let (a, b) = (a.clone(), b.clone());
            Arc::new(move |y: &[f64]| {
                let ay = a.mul(y);
                b.iter().zip(&ay).map(|(bi, v)| bi - v / mu_x).collect()
            })
        }),
    };
    Ok(problem.with_reference(reference))
}

/// Largest absolute eigenvalue of `[[s, 1], [1, -mu]]` over `s in {-1, 1}`:
/// the smoothness of `sin(x) + x y - (mu/2) y^2` per coordinate.
fn sin_coupling_ell(mu: f64) -> f64 {
    [-1.0f64, 1.0]
        .iter()
        .map(|s| {
            let disc = math::sqrt((s + mu) * (s + mu) + 4.0);
            math::abs((s - mu) / 2.0).max(0.0) + disc / 2.0
        })
        .fold(0.0, f64::max)
}

fn sin_problem(dim: usize, mu_y: f64, r: f64) -> Result<MinimaxProblem, Error> {
    if dim == 0 {
        return Err(Error::EmptyVector);
    }
    check_positive(r, "box radius must be positive")?;
    let ell = sin_coupling_ell(mu_y);
    let value: ValueFn = Arc::new(move |x, y| {
        x.iter().map(|v| math::sin(*v)).sum::<f64>() + dot(x, y) - 0.5 * mu_y * crate::vector::norm_sq(y)
    });
    let grad_x: GradFn = Arc::new(|x, y, out| {
        for i in 0..x.len() {
            out[i] = math::cos(x[i]) + y[i];
        }
    });
    let grad_y: GradFn = Arc::new(move |x, y, out| {
        for i in 0..x.len() {
            out[i] = x[i] - mu_y * y[i];
        }
    });
    MinimaxProblem::new(
        value,
        grad_x,
        grad_y,
        ConstraintSet::whole_space(dim)?,
        ConstraintSet::symmetric_box(dim, r)?,
        SmoothnessProfile::new(ell, 0.0, mu_y)?,
    )
}

/// `f(x, y) = sum_i sin(x_i) + x^T y - (mu_y/2) ||y||^2` on `R^d x [-r, r]^d`.
///
/// `y*(x) = clip(x / mu_y, -r, r)`.
pub fn nc_sc_sin(dim: usize, mu_y: f64, r: f64) -> Result<MinimaxProblem, Error> {
    check_positive(mu_y, "mu_y must be positive")?;
    let problem = sin_problem(dim, mu_y, r)?;
    let y_star: PointMap = Arc::new(move |x: &[f64]| x.iter().map(|v| (v / mu_y).clamp(-r, r)).collect());
    let ys = y_star.clone();
    let phi: ScalarFn = Arc::new(move |x: &[f64]| {
        let y = ys(x);
        x.iter().map(|v| math::sin(*v)).sum::<f64>() + dot(x, &y) - 0.5 * mu_y * crate::vector::norm_sq(&y)
    });
    Ok(problem.with_reference(Reference { saddle: None, phi: Some(phi), y_star: Some(y_star), psi: None, x_star: None }))
}

/// `f(x, y) = sum_i sin(x_i) + x^T y` on `R^d x [-r, r]^d`, with
/// `Phi(x) = sum_i sin(x_i) + r ||x||_1`.
pub fn nc_c_toy(dim: usize, r: f64) -> Result<MinimaxProblem, Error> {
    let problem = sin_problem(dim, 0.0, r)?;
    let phi: ScalarFn = Arc::new(move |x: &[f64]| x.iter().map(|v| math::sin(*v) + r * math::abs(*v)).sum());
    let y_star: PointMap = Arc::new(move |x: &[f64]| x.iter().map(|v| if *v >= 0.0 { r } else { -r }).collect());
    Ok(problem.with_reference(Reference { saddle: None, phi: Some(phi), y_star: Some(y_star), psi: None, x_star: None }))
}

/// Every family, for configuration-driven construction.
#[derive(Clone, Debug, PartialEq)]
pub enum ProblemSpec {
    QuadraticScsc(QuadraticScsc),
    RandomQuadratic { dim_x: usize, dim_y: usize, kappa_x: f64, kappa_y: f64, coupling: f64, seed: u64 },
    BilinearSimplex { m: usize, n: usize, a: Vec<f64> },
    SccBilinear { mu_x: f64, b: Vec<f64>, m: usize, n: usize, a: Vec<f64>, diameter: f64 },
    NcScSin { dim: usize, mu_y: f64, r: f64 },
    NcCToy { dim: usize, r: f64 },
}

impl ProblemSpec {
    pub fn family(&self) -> &'static str {
        match self {
            ProblemSpec::QuadraticScsc(_) | ProblemSpec::RandomQuadratic { .. } => "quadratic_scsc",
            ProblemSpec::BilinearSimplex { .. } => "bilinear_simplex",
            ProblemSpec::SccBilinear { .. } => "scc_bilinear",
            ProblemSpec::NcScSin { .. } => "nc_sc_sin",
            ProblemSpec::NcCToy { .. } => "nc_c_toy",
        }
    }
}

pub fn make(desc: &ProblemSpec) -> Result<MinimaxProblem, Error> {
    match desc {
        ProblemSpec::QuadraticScsc(q) => q.build(),
        ProblemSpec::RandomQuadratic { dim_x, dim_y, kappa_x, kappa_y, coupling, seed } => {
            QuadraticScsc::random(*dim_x, *dim_y, *kappa_x, *kappa_y, *coupling, *seed)?.build()
        }
        ProblemSpec::BilinearSimplex { m, n, a } => bilinear_simplex(*m, *n, a.clone()),
        ProblemSpec::SccBilinear { mu_x, b, m, n, a, diameter } => scc_bilinear(*mu_x, b.clone(), *m, *n, a.clone(), *diameter),
        ProblemSpec::NcScSin { dim, mu_y, r } => nc_sc_sin(*dim, *mu_y, *r),
        ProblemSpec::NcCToy { dim, r } => nc_c_toy(*dim, *r),
    }
}

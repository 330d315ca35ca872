//! Optimality certificates.
//!
//! Every certificate carries the accuracy of the inner solves used to compute
//! it and converts that into a bound on its own error, so checks take the form
//! `value <= target + error`.

use alloc::vec;
use alloc::vec::Vec;

use crate::agd::{agd, ScalarObjective};
use crate::error::{check_positive, Error};
use crate::math;
use crate::maximin_ag2::maximin_ag2;
use crate::oracle::MinimaxProblem;
use crate::report::{SolverOptions, Status};
use crate::sets::ConstraintSet;
use crate::vector::{all_finite, dist, norm};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CertificateKind {
    DualityGap,
    StationarityF,
    PhiGrad,
    MoreauGrad,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum CertMethod {
    ClosedForm,
    InnerSolver,
    Grid,
}

impl CertMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            CertMethod::ClosedForm => "closed_form",
            CertMethod::InnerSolver => "inner_solver",
            CertMethod::Grid => "grid",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Certificate {
    pub kind: CertificateKind,
    pub value: f64,
    /// Bound on `|value - exact value|`.
    pub error: f64,
    pub inner_tol: f64,
    pub method: CertMethod,
}

impl Certificate {
    /// `value <= target + error`
    pub fn certifies(&self, target: f64) -> bool {
        self.value <= target + self.error
    }
}

/// Side lengths of the box used to grid an unbounded set.
pub const DEFAULT_GRID_BOUND: f64 = 10.0;
const GRID_POINTS: [usize; 4] = [0, 401, 61, 21];
const POLISH_STEPS: usize = 200;

struct Extremum {
    value: f64,
    error: f64,
    method: CertMethod,
}

/// `max_{y in Y} f(x, y)` (or `min_{x in X} f(x, y)` when `minimize`).
fn extremum(p: &MinimaxProblem, fixed: &[f64], inner_tol: f64, minimize: bool) -> Result<Extremum, Error> {
    let closed = if minimize { p.reference.psi.as_ref() } else { p.reference.phi.as_ref() };
    if let Some(c) = closed {
        return Ok(Extremum { value: c(fixed), error: 0.0, method: CertMethod::ClosedForm });
    }
    let (set, mu) = if minimize { (&p.set_x, p.profile.mu_x) } else { (&p.set_y, p.profile.mu_y) };
    // h(v) = sign * f(., v) is the convex function being minimized.
    let sign = if minimize { 1.0 } else { -1.0 };
    let eval = |v: &[f64]| if minimize { sign * p.value(v, fixed) } else { sign * p.value(fixed, v) };
    let grad = |v: &[f64], out: &mut [f64]| {
        if minimize {
            p.grad_x_into(v, fixed, out)
        } else {
            p.grad_y_into(fixed, v, out);
            out.iter_mut().for_each(|g| *g = -*g);
        }
    };
    let ell = p.ell();
    if mu > 0.0 {
        let obj = ScalarObjective::new(&grad, ell, mu.min(ell));
        let out = agd(&obj, set, &set.default_point(), inner_tol, None)?;
        if out.status != Status::Ok {
            return Err(Error::Uncertifiable("inner solve did not converge"));
        }
        return Ok(Extremum { value: sign * eval(&out.x), error: inner_tol, method: CertMethod::InnerSolver });
    }
    let dim = set.dim();
    if dim > 3 {
        return Err(Error::Uncertifiable("no closed form, no strong curvature and dimension above 3"));
    }
    let pts = grid_points(set, GRID_POINTS[dim], &set.center(), DEFAULT_GRID_BOUND);
    let mut best = pts[0].clone();
    let mut best_val = f64::INFINITY;
    for q in &pts {
        let v = eval(q);
        if v < best_val {
            best_val = v;
            best = q.clone();
        }
    }
    // Projected gradient steps from the best grid point; the gradient mapping
    // at the final point bounds the remaining suboptimality of a convex h.
    let mut g = vec![0.0; dim];
    let mut next = vec![0.0; dim];
    let diam = set.diameter().unwrap_or(2.0 * DEFAULT_GRID_BOUND * math::sqrt(dim as f64));
    let mut gm = f64::INFINITY;
    for _ in 0..POLISH_STEPS {
        grad(&best, &mut g);
        for i in 0..dim {
            next[i] = best[i] - g[i] / ell;
        }
        set.project_in_place(&mut next);
        gm = ell * dist(&best, &next);
        let v = eval(&next);
        if v <= best_val {
            best_val = v;
            best.copy_from_slice(&next);
        }
        if gm == 0.0 {
            break;
        }
    }
    if !best_val.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(Extremum { value: sign * best_val, error: gm * diam, method: CertMethod::Grid })
}

/// `max_y f(x_hat, y) - min_x f(x, y_hat)`.
///
/// Inner problems use the problem's closed forms when present, accelerated
/// descent to `inner_tol` when the relevant modulus is positive, and a grid
/// search refined by projected gradient steps in dimension at most 3.
pub fn duality_gap(p: &MinimaxProblem, x_hat: &[f64], y_hat: &[f64], inner_tol: f64) -> Result<Certificate, Error> {
    p.check_point(x_hat, y_hat)?;
    check_positive(inner_tol, "inner tolerance must be positive")?;
    let upper = extremum(p, x_hat, inner_tol, false)?;
    let lower = extremum(p, y_hat, inner_tol, true)?;
    Ok(Certificate {
        kind: CertificateKind::DualityGap,
        value: upper.value - lower.value,
        error: upper.error + lower.error,
        inner_tol,
        method: upper.method.max(lower.method),
    })
}

/// Projected-gradient residuals `(r_x, r_y)` of `f` at `(x_hat, y_hat)`:
/// `y+ = P_Y[y_hat + grad_y f / ell]`, `r_y = ell ||y+ - y_hat||`,
/// `r_x = ell ||P_X[x_hat - grad_x f(x_hat, y+) / ell] - x_hat||`.
pub fn stationarity_f(p: &MinimaxProblem, x_hat: &[f64], y_hat: &[f64]) -> Result<(f64, f64), Error> {
    p.check_point(x_hat, y_hat)?;
    let ell = p.ell();
    let gy = p.grad_y(x_hat, y_hat);
    let mut y_plus: Vec<f64> = y_hat.iter().zip(&gy).map(|(y, g)| y + g / ell).collect();
    p.set_y.project_in_place(&mut y_plus);
    let r_y = ell * dist(&y_plus, y_hat);
    let gx = p.grad_x(x_hat, &y_plus);
    let mut x_plus: Vec<f64> = x_hat.iter().zip(&gx).map(|(x, g)| x - g / ell).collect();
    p.set_x.project_in_place(&mut x_plus);
    let r_x = ell * dist(&x_plus, x_hat);
    if !(r_x.is_finite() && r_y.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok((r_x, r_y))
}

/// `||grad Phi(x_hat)|| = ||grad_x f(x_hat, y*(x_hat))||`; requires `mu_y > 0`.
pub fn phi_grad_norm(p: &MinimaxProblem, x_hat: &[f64], inner_tol: f64) -> Result<Certificate, Error> {
    crate::error::check_dim(p.dim_x(), x_hat.len())?;
    check_positive(inner_tol, "inner tolerance must be positive")?;
    let mu = p.profile.mu_y;
    if mu <= 0.0 {
        return Err(Error::Uncertifiable("phi gradient needs strong concavity in y"));
    }
    let ell = p.ell();
    let (y, error, method) = match &p.reference.y_star {
        Some(ys) => (ys(x_hat), 0.0, CertMethod::ClosedForm),
        None => {
            let grad = |v: &[f64], out: &mut [f64]| {
                p.grad_y_into(x_hat, v, out);
                out.iter_mut().for_each(|g| *g = -*g);
            };
            let obj = ScalarObjective::new(&grad, ell, mu);
            let out = agd(&obj, &p.set_y, &p.set_y.default_point(), inner_tol, None)?;
            if out.status != Status::Ok {
                return Err(Error::Uncertifiable("inner solve did not converge"));
            }
            (out.x, ell * math::sqrt(2.0 * inner_tol / mu), CertMethod::InnerSolver)
        }
    };
    let value = norm(&p.grad_x(x_hat, &y));
    Ok(Certificate { kind: CertificateKind::PhiGrad, value, error, inner_tol, method })
}

/// What the proximal map `prox_{Phi/2ell}(x) = argmin_w Phi(w) + ell ||w - x||^2`
/// is computed from.
pub enum ProxTarget<'a> {
    /// `(x, ell) -> prox_{Phi/2ell}(x)`
    ClosedForm(&'a dyn Fn(&[f64], f64) -> Vec<f64>),
    /// `Phi` itself; minimized by cyclic golden-section search per coordinate,
    /// which is exact up to `inner_tol` for one-dimensional or separable `Phi`.
    Function(&'a dyn Fn(&[f64]) -> f64),
    /// `Phi(x) = max_y f(x, y)` of a minimax problem.
    Minimax(&'a MinimaxProblem),
}

/// Proximal point, a bound on its distance error, and the method used.
pub fn prox_point(target: &ProxTarget<'_>, x_hat: &[f64], ell: f64, inner_tol: f64) -> Result<(Vec<f64>, f64, CertMethod), Error> {
    if !all_finite(x_hat) {
        return Err(Error::NonFinite);
    }
    check_positive(ell, "ell must be positive")?;
    check_positive(inner_tol, "inner tolerance must be positive")?;
    match target {
        ProxTarget::ClosedForm(prox) => Ok((prox(x_hat, ell), 0.0, CertMethod::ClosedForm)),
        ProxTarget::Function(phi) => {
            let w = coordinate_prox(*phi, x_hat, ell, inner_tol);
            let err = search_error(*phi, &w, x_hat, ell, inner_tol);
            Ok((w, err, CertMethod::Grid))
        }
        ProxTarget::Minimax(p) => {
            crate::error::check_dim(p.dim_x(), x_hat.len())?;
            if p.profile.mu_y > 0.0 {
                // Phi + ell ||. - x_hat||^2 is ell-strongly convex, so an
                // inner_tol-accurate minimizer is within sqrt(2 inner_tol / ell).
                let pell = p.ell();
                let g = p.proximal_in_x(x_hat, ell);
                let out = maximin_ag2(&g, x_hat, &p.set_y.default_point(), 3.0 * pell, pell, p.profile.mu_y, inner_tol, &SolverOptions::default())?;
                if out.report.status != Status::Ok {
                    return Err(Error::Uncertifiable("proximal subproblem did not converge"));
                }
                Ok((out.x, math::sqrt(2.0 * inner_tol / ell), CertMethod::InnerSolver))
            } else if let Some(phi) = &p.reference.phi {
                let w = coordinate_prox(phi.as_ref(), x_hat, ell, inner_tol);
                let err = search_error(phi.as_ref(), &w, x_hat, ell, inner_tol);
                Ok((w, err, CertMethod::Grid))
            } else {
                Err(Error::Uncertifiable("no strong concavity and no closed-form Phi"))
            }
        }
    }
}

/// `||grad Phi_{1/2ell}(x_hat)|| = 2 ell ||x_hat - prox_{Phi/2ell}(x_hat)||`.
pub fn moreau_grad_norm(target: &ProxTarget<'_>, x_hat: &[f64], ell: f64, inner_tol: f64) -> Result<Certificate, Error> {
    let (w, err, method) = prox_point(target, x_hat, ell, inner_tol)?;
    Ok(Certificate {
        kind: CertificateKind::MoreauGrad,
        value: 2.0 * ell * dist(x_hat, &w),
        error: 2.0 * ell * err,
        inner_tol,
        method,
    })
}

/// The nearby point `x_bar = prox_{Phi/2ell}(x_hat)` and `||x_hat - x_bar||`.
pub fn near_stationarity_witness(target: &ProxTarget<'_>, x_hat: &[f64], ell: f64, inner_tol: f64) -> Result<(Vec<f64>, f64), Error> {
    let (w, _, _) = prox_point(target, x_hat, ell, inner_tol)?;
    let d = dist(x_hat, &w);
    Ok((w, d))
}

/// `Phi_{1/2ell}(x) = min_w Phi(w) + ell ||w - x||^2` via [`coordinate_prox`].
pub fn moreau_envelope(phi: &dyn Fn(&[f64]) -> f64, x: &[f64], ell: f64, inner_tol: f64) -> f64 {
    let w = coordinate_prox(phi, x, ell, inner_tol);
    phi(&w) + ell * crate::vector::dist_sq(&w, x)
}

/// Distance bound for a comparison-based search on `h = Phi + ell ||. - x||^2`.
///
/// `h` is `ell`-strongly convex, so values that compare equal in double
/// precision can still sit `sqrt(2 tau / ell)` apart, with `tau` a few ulps of
/// `h`. The search tolerance and that resolution limit both count.
fn search_error(phi: &dyn Fn(&[f64]) -> f64, w: &[f64], x: &[f64], ell: f64, tol: f64) -> f64 {
    let h = phi(w) + ell * crate::vector::dist_sq(w, x);
    let tau = 8.0 * f64::EPSILON * (1.0 + math::abs(h));
    math::sqrt(w.len() as f64) * tol.max(math::sqrt(2.0 * tau / ell))
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Cyclic golden-section minimization of `Phi(w) + ell ||w - x||^2`.
pub fn coordinate_prox(phi: &dyn Fn(&[f64]) -> f64, x: &[f64], ell: f64, tol: f64) -> Vec<f64> {
    let mut w = x.to_vec();
    let h = |w: &[f64]| phi(w) + ell * crate::vector::dist_sq(w, x);
    for _sweep in 0..500 {
        let mut moved: f64 = 0.0;
        for i in 0..w.len() {
            let c = w[i];
            let mut probe = w.clone();
            let mut at = |t: f64| {
                probe[i] = t;
                h(&probe)
            };
            let hc = at(c);
            // Expand until both ends are no better than the center; by strong
            // convexity the minimizer then lies inside.
            let mut r = 1e-3 * (1.0 + math::abs(c));
            while r < 1e12 && (at(c - r) < hc || at(c + r) < hc) {
                r *= 2.0;
            }
            let (mut a, mut b) = (c - r, c + r);
            let mut x1 = b - INV_PHI * (b - a);
            let mut x2 = a + INV_PHI * (b - a);
            let (mut f1, mut f2) = (at(x1), at(x2));
            let mut iters = 0;
            while b - a > tol && iters < 300 {
                iters += 1;
                if f1 <= f2 {
                    b = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = b - INV_PHI * (b - a);
                    f1 = at(x1);
                } else {
                    a = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = a + INV_PHI * (b - a);
                    f2 = at(x2);
                }
            }
            let mid = 0.5 * (a + b);
            let best = if at(mid) <= hc { mid } else { c };
            moved = moved.max(math::abs(best - c));
            w[i] = best;
        }
        if moved <= tol {
            break;
        }
    }
    w
}

/// Grid approximation of a saddle point.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSaddle {
    /// Minimizer over the grid of the grid maximum.
    pub x: Vec<f64>,
    /// Maximizer over the grid of the grid minimum.
    pub y: Vec<f64>,
    /// `min_x max_y f` over the grid.
    pub value: f64,
    /// `ell` times the largest grid spacing.
    pub accuracy: f64,
}

/// Points of `set` on a grid with `per_dim` points per axis. Unbounded sets
/// are replaced by the cube of half-width `bound` around `center`.
pub fn grid_points(set: &ConstraintSet, per_dim: usize, center: &[f64], bound: f64) -> Vec<Vec<f64>> {
    let n = set.dim();
    if per_dim <= 1 {
        return vec![match set {
            ConstraintSet::WholeSpace(_) => center.to_vec(),
            _ => set.center(),
        }];
    }
    match set {
        ConstraintSet::Simplex(_) => {
            let total = per_dim - 1;
            let mut out = Vec::new();
            let mut counts = vec![0usize; n];
            simplex_lattice(&mut counts, 0, total, total, &mut out);
            out
        }
        _ => {
            let (lo, hi): (Vec<f64>, Vec<f64>) = match set {
                ConstraintSet::WholeSpace(_) => (center.iter().map(|c| c - bound).collect(), center.iter().map(|c| c + bound).collect()),
                ConstraintSet::Box { lower, upper } => (lower.clone(), upper.clone()),
                ConstraintSet::Ball { center, radius } => (center.iter().map(|c| c - radius).collect(), center.iter().map(|c| c + radius).collect()),
                ConstraintSet::Simplex(_) => unreachable!(),
            };
            let mut out = Vec::new();
            let mut idx = vec![0usize; n];
            loop {
                let p: Vec<f64> = (0..n).map(|i| lo[i] + (hi[i] - lo[i]) * idx[i] as f64 / (per_dim - 1) as f64).collect();
                if set.contains(&p, crate::sets::FEASIBILITY_TOL) || matches!(set, ConstraintSet::WholeSpace(_)) {
                    out.push(p);
                }
                let mut k = 0;
                while k < n {
                    idx[k] += 1;
                    if idx[k] < per_dim {
                        break;
                    }
                    idx[k] = 0;
                    k += 1;
                }
                if k == n {
                    break;
                }
            }
            if out.is_empty() {
                out.push(set.center());
            }
            out
        }
    }
}

fn simplex_lattice(counts: &mut Vec<usize>, i: usize, left: usize, total: usize, out: &mut Vec<Vec<f64>>) {
    if i + 1 == counts.len() {
        counts[i] = left;
        out.push(counts.iter().map(|c| *c as f64 / total as f64).collect());
        return;
    }
    for c in 0..=left {
        counts[i] = c;
        simplex_lattice(counts, i + 1, left - c, total, out);
    }
}

fn grid_spacing(set: &ConstraintSet, per_dim: usize, bound: f64) -> f64 {
    if per_dim <= 1 {
        return set.diameter().unwrap_or(2.0 * bound);
    }
    let steps = (per_dim - 1) as f64;
    match set {
        ConstraintSet::WholeSpace(_) => 2.0 * bound / steps,
        ConstraintSet::Box { lower, upper } => lower.iter().zip(upper).fold(0.0, |m, (l, u)| f64::max(m, (u - l) / steps)),
        ConstraintSet::Ball { radius, .. } => 2.0 * radius / steps,
        ConstraintSet::Simplex(_) => 1.0 / steps,
    }
}

/// Dense-grid minimax over `X x Y` for total dimension at most 4.
///
/// `bound` boxes unbounded sets around the reference saddle (or the origin);
/// `None` uses [`DEFAULT_GRID_BOUND`].
pub fn brute_force_saddle(p: &MinimaxProblem, grid_per_dim: usize, bound: Option<f64>) -> Result<GridSaddle, Error> {
    if p.dim_x() + p.dim_y() > 4 {
        return Err(Error::Uncertifiable("grid search is limited to total dimension 4"));
    }
    if grid_per_dim == 0 {
        return Err(Error::InvalidParameter("grid needs at least one point per axis"));
    }
    let bound = bound.unwrap_or(DEFAULT_GRID_BOUND);
    check_positive(bound, "grid bound must be positive")?;
    let (cx, cy) = match &p.reference.saddle {
        Some((x, y)) => (x.clone(), y.clone()),
        None => (vec![0.0; p.dim_x()], vec![0.0; p.dim_y()]),
    };
    let xs = grid_points(&p.set_x, grid_per_dim, &cx, bound);
    let ys = grid_points(&p.set_y, grid_per_dim, &cy, bound);
    let mut col_min = vec![f64::INFINITY; ys.len()];
    let mut best = (f64::INFINITY, 0usize);
    for (i, x) in xs.iter().enumerate() {
        let mut row_max = f64::NEG_INFINITY;
        for (j, y) in ys.iter().enumerate() {
            let v = p.value(x, y);
            if !v.is_finite() {
                return Err(Error::NonFinite);
            }
            row_max = row_max.max(v);
            col_min[j] = col_min[j].min(v);
        }
        if row_max < best.0 {
            best = (row_max, i);
        }
    }
    let jbest = (0..ys.len()).fold(0, |b, j| if col_min[j] > col_min[b] { j } else { b });
    let spacing = grid_spacing(&p.set_x, grid_per_dim, bound).max(grid_spacing(&p.set_y, grid_per_dim, bound));
    Ok(GridSaddle { x: xs[best.1].clone(), y: ys[jbest].clone(), value: best.0, accuracy: p.ell() * spacing })
}

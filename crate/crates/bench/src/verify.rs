//! Named invariant suites for `verify`.

use minimax_core::drivers::{cc_solve, reduce, scc_solve, ReductionKind, ReductionSpec};
use minimax_core::general_iteration::fixed_point_map;
use minimax_core::metrics::{duality_gap, moreau_envelope, moreau_grad_norm, near_stationarity_witness, prox_point, ProxTarget};
use minimax_core::problems::{bilinear_simplex, nc_c_toy, nc_sc_sin, quadratic_suite, scc_bilinear};
use minimax_core::vector::{dist, norm};
use minimax_core::{ConstraintSet, MinimaxProblem, SolverOptions};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const SUITES: [&str; 5] = ["contraction", "lemma-lipschitz", "moreau", "reductions", "projections"];

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        Check { name: name.to_string(), passed, detail }
    }
}

/// Runs a suite by name; `None` for an unknown name.
pub fn run_suite(name: &str) -> Option<Vec<Check>> {
    Some(match name {
        "contraction" => contraction(),
        "lemma-lipschitz" => lemma_lipschitz(),
        "moreau" => moreau(),
        "reductions" => reductions(),
        "projections" => projections(),
        _ => return None,
    })
}

fn point(rng: &mut ChaCha8Rng, n: usize, r: f64) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-r..r)).collect()
}

fn quadratic_problems(count: usize) -> Vec<MinimaxProblem> {
    quadratic_suite(count, 3).expect("suite parameters are valid").iter().map(|q| q.build().expect("suite instances build")).collect()
}

/// Largest violation `lhs - rhs` seen, with the sample count.
struct Worst {
    excess: f64,
    samples: usize,
}

impl Worst {
    fn new() -> Self {
        Worst { excess: f64::NEG_INFINITY, samples: 0 }
    }

    fn see(&mut self, lhs: f64, rhs: f64) {
        self.samples += 1;
        let e = lhs - rhs;
        if !(e <= self.excess) {
            self.excess = e;
        }
    }

    fn check(&self, name: &str) -> Check {
        let passed = self.excess <= 0.0;
        Check::new(name, passed, format!("{} samples, worst excess {:e}", self.samples, self.excess))
    }
}

pub fn contraction() -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut problems = quadratic_problems(7);
    problems.push(nc_sc_sin(2, 2.0, 1.0).expect("valid"));
    problems.push(nc_c_toy(3, 1.0).expect("valid"));
    problems.push(scc_bilinear(0.5, vec![1.0, 0.0], 2, 2, vec![1.0, 0.3, -0.2, 0.8], 2.0).expect("valid"));
    let mut w = Worst::new();
    for p in &problems {
        let n = p.dim_x();
        let (mut ta, mut tb) = (vec![0.0; n], vec![0.0; n]);
        for _ in 0..100 {
            let x_bar = point(&mut rng, n, 4.0);
            let z = point(&mut rng, p.dim_y(), 4.0);
            let (a, b) = (point(&mut rng, n, 4.0), point(&mut rng, n, 4.0));
            fixed_point_map(p, &x_bar, &z, &a, &mut ta);
            fixed_point_map(p, &x_bar, &z, &b, &mut tb);
            w.see(dist(&ta, &tb), 0.5 * dist(&a, &b) + 1e-12);
        }
    }
    vec![w.check("fixed-point map is a 1/2-contraction (100 pairs x 10 problems)")]
}

fn central_gradient(f: &dyn Fn(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<f64> {
    (0..x.len())
        .map(|i| {
            let (mut a, mut b) = (x.to_vec(), x.to_vec());
            a[i] += h;
            b[i] -= h;
            (f(&a) - f(&b)) / (2.0 * h)
        })
        .collect()
}

pub fn lemma_lipschitz() -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let problems = quadratic_problems(12);
    let (mut br, mut smooth, mut fd) = (Worst::new(), Worst::new(), Worst::new());
    for p in &problems {
        let (kx, ky, ell) = (p.profile.kappa_x().expect("scsc"), p.profile.kappa_y().expect("scsc"), p.ell());
        let ys = p.reference.y_star.clone().expect("closed form");
        let xs = p.reference.x_star.clone().expect("closed form");
        let phi = p.reference.phi.clone().expect("closed form");
        let grad_phi = |x: &[f64]| p.grad_x(x, &ys(x));
        let grad_psi = |y: &[f64]| p.grad_y(&xs(y), y);
        for _ in 0..200 {
            let (a, b) = (point(&mut rng, p.dim_x(), 4.0), point(&mut rng, p.dim_x(), 4.0));
            br.see(dist(&ys(&a), &ys(&b)), ky * dist(&a, &b) + 1e-10);
            smooth.see(dist(&grad_phi(&a), &grad_phi(&b)), 2.0 * ky * ell * dist(&a, &b) + 1e-10);
            let (a, b) = (point(&mut rng, p.dim_y(), 4.0), point(&mut rng, p.dim_y(), 4.0));
            br.see(dist(&xs(&a), &xs(&b)), kx * dist(&a, &b) + 1e-10);
            smooth.see(dist(&grad_psi(&a), &grad_psi(&b)), 2.0 * kx * ell * dist(&a, &b) + 1e-10);
        }
        for _ in 0..20 {
            let x = point(&mut rng, p.dim_x(), 4.0);
            let g = grad_phi(&x);
            fd.see(dist(&g, &central_gradient(&*phi, &x, 1e-5)), 1e-5 * norm(&g).max(1.0));
        }
    }
    vec![
        br.check("best responses y*(.) and x*(.) are kappa-Lipschitz"),
        smooth.check("Phi and Psi are 2 kappa ell-smooth"),
        fd.check("grad Phi = grad_x f(., y*(.)) matches central differences"),
    ]
}

fn abs_phi(x: &[f64]) -> f64 {
    x[0].abs()
}

fn abs_prox(x: &[f64], ell: f64) -> Vec<f64> {
    let t = 1.0 / (2.0 * ell);
    vec![x[0].signum() * (x[0].abs() - t).max(0.0)]
}

pub fn moreau() -> Vec<Check> {
    let mut out = Vec::new();
    let exact = ProxTarget::ClosedForm(&abs_prox);
    let (w, d) = near_stationarity_witness(&exact, &[2.0], 0.5, 1e-12).expect("closed form");
    let g = moreau_grad_norm(&exact, &[2.0], 0.5, 1e-12).expect("closed form");
    let anchor = (w[0] - 1.0).abs() <= 1e-10 && (g.value - 1.0).abs() <= 1e-10 && (d - 1.0).abs() <= 1e-10;
    out.push(Check::new("|x| at 2 with ell = 0.5: prox = 1, envelope gradient = 1", anchor, format!("prox {}, gradient {}", w[0], g.value)));
    let z = moreau_grad_norm(&exact, &[0.0], 0.5, 1e-12).expect("closed form");
    out.push(Check::new("|x| at 0: envelope gradient = 0", z.value == 0.0, format!("gradient {}", z.value)));

    let toy = nc_c_toy(1, 1.0).expect("valid");
    let ell = toy.ell();
    let phi = toy.reference.phi.clone().expect("closed form");
    let smooth = |x: &[f64]| (1.0 + x[0].exp()).ln() + 0.2 * x[0] * x[0];
    let fns: [(&dyn Fn(&[f64]) -> f64, f64); 3] = [(&*phi, ell), (&smooth, 0.7), (&abs_phi, 0.5)];
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut ident, mut lip, mut descent) = (Worst::new(), Worst::new(), Worst::new());
    for (f, l) in fns {
        let target = ProxTarget::Function(f);
        let prox = |x: f64| prox_point(&target, &[x], l, 1e-13).expect("1-D search").0;
        let grad = |x: f64| 2.0 * l * (x - prox(x)[0]);
        for _ in 0..20 {
            let x = rng.gen_range(-3.0..3.0);
            let h = 1e-4;
            let fd = (moreau_envelope(f, &[x + h], l, 1e-13) - moreau_envelope(f, &[x - h], l, 1e-13)) / (2.0 * h);
            ident.see((fd - grad(x)).abs(), 1e-4);
        }
        for _ in 0..200 {
            let (a, b) = (rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            lip.see((grad(a) - grad(b)).abs(), 4.0 * l * (a - b).abs() + 1e-8);
            descent.see(f(&prox(a)), f(&[a]) + 1e-12);
        }
    }
    out.push(ident.check("envelope gradient 2 ell (x - prox x) matches central differences"));
    out.push(lip.check("envelope gradient is 4 ell-Lipschitz"));
    out.push(descent.check("Phi(prox x) <= Phi(x)"));
    out
}

pub fn reductions() -> Vec<Check> {
    let base = nc_c_toy(2, 1.0).expect("valid");
    let y0 = [0.2, -0.1];
    let eps = 0.3;
    let scc = reduce(&base, &ReductionSpec::new(ReductionKind::Scc, eps, None, &y0)).expect("bounded Y");
    let nc = reduce(&base, &ReductionSpec::new(ReductionKind::Nc, eps, None, &y0)).expect("bounded Y");
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut value, mut grad) = (Worst::new(), Worst::new());
    for _ in 0..500 {
        let x = point(&mut rng, 2, 4.0);
        let y = base.set_y.proj(&point(&mut rng, 2, 2.0));
        value.see((base.value(&x, &y) - scc.value(&x, &y)).abs(), eps / 4.0);
    }
    for _ in 0..500 {
        let x = point(&mut rng, 2, 4.0);
        let y = base.set_y.proj(&point(&mut rng, 2, 2.0));
        grad.see(dist(&base.grad_y(&x, &y), &nc.grad_y(&x, &y)), eps / 2.0);
    }
    let mut out = vec![value.check("|f - f_eps| <= eps/4 (500 samples)"), grad.check("|grad_y f - grad_y f~_eps| <= eps/2 (500 samples)")];

    let opts = SolverOptions::practical();
    let ball = scc_bilinear(1.0, vec![0.0], 1, 1, vec![1.0], 2.0).expect("valid");
    for e in [1e-1, 5e-2, 1e-2] {
        let c = scc_solve(&ball, &[1.0], &[0.0], ball.ell(), 1.0, e, 60, &opts).and_then(|o| duality_gap(&ball, &o.x, &o.y, 1e-12));
        out.push(end_to_end("scc_solve", e, c));
    }
    let pennies = bilinear_simplex(2, 2, vec![1.0, -1.0, -1.0, 1.0]).expect("valid");
    for e in [5e-1, 1e-1] {
        let c = cc_solve(&pennies, &[1.0, 0.0], &[1.0, 0.0], pennies.ell(), e, 40, &opts).and_then(|o| duality_gap(&pennies, &o.x, &o.y, 1e-12));
        out.push(end_to_end("cc_solve", e, c));
    }
    out
}

fn end_to_end(solver: &str, eps: f64, c: Result<minimax_core::metrics::Certificate, minimax_core::Error>) -> Check {
    let name = format!("{solver} at eps {eps}: duality gap of the original problem <= eps");
    match c {
        Ok(c) => Check::new(&name, c.certifies(eps), format!("gap {:e} (error {:e})", c.value, c.error)),
        Err(e) => Check::new(&name, false, e.to_string()),
    }
}

pub fn projections() -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let sets = |n: usize| {
        vec![
            ConstraintSet::whole_space(n).expect("valid"),
            ConstraintSet::boxed(vec![-1.0; n], (0..n).map(|i| 0.5 + i as f64).collect()).expect("valid"),
            ConstraintSet::ball(vec![0.3; n], 1.5).expect("valid"),
            ConstraintSet::simplex(n).expect("valid"),
        ]
    };
    let (mut nonexp, mut feas, mut idem, mut sum, mut nearest) = (Worst::new(), Worst::new(), Worst::new(), Worst::new(), Worst::new());
    for n in 1..=5 {
        for set in sets(n) {
            for _ in 0..200 {
                let (a, b) = (point(&mut rng, n, 5.0), point(&mut rng, n, 5.0));
                let (pa, pb) = (set.proj(&a), set.proj(&b));
                nonexp.see(dist(&pa, &pb), dist(&a, &b) + 1e-12);
                feas.see(if set.contains(&pa, 1e-12) { 0.0 } else { 1.0 }, 0.0);
                idem.see(dist(&set.proj(&pa), &pa), 1e-12);
                if let ConstraintSet::Simplex(_) = set {
                    sum.see((pa.iter().sum::<f64>() - 1.0).abs(), 1e-12);
                }
                for _ in 0..10 {
                    let q = set.proj(&point(&mut rng, n, 5.0));
                    nearest.see(dist(&a, &pa), dist(&a, &q) + 1e-12);
                }
            }
        }
    }
    vec![
        nonexp.check("projection is non-expansive"),
        feas.check("projection is feasible"),
        idem.check("projection is idempotent"),
        sum.check("simplex projection sums to one"),
        nearest.check("projection is no farther than sampled feasible points"),
    ]
}

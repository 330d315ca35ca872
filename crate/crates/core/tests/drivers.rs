use minimax_core::drivers::*;
use minimax_core::metrics::{duality_gap, moreau_grad_norm, phi_grad_norm, stationarity_f, ProxTarget};
use minimax_core::problems::{bilinear_simplex, nc_c_toy, nc_sc_sin, scc_bilinear, QuadraticScsc};
use minimax_core::vector::{dist, dist_sq, norm};
use minimax_core::{ConstraintSet, MinimaxProblem, SolverOptions, Status};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn anchor() -> MinimaxProblem {
    QuadraticScsc::scalar(2.0, 1.0, 2.0, 1.0, -1.0, ConstraintSet::whole_space(1).unwrap(), ConstraintSet::ball(vec![0.0], 2.0).unwrap())
        .build()
        .unwrap()
}

fn separable(r: f64) -> MinimaxProblem {
    let q = QuadraticScsc::scalar(2.0, 0.0, 2.0, 0.0, 0.0, ConstraintSet::symmetric_box(1, r).unwrap(), ConstraintSet::symmetric_box(1, r).unwrap());
    q.build().unwrap()
}

#[test]
fn minimax_appa_recovers_anchor_saddle() {
    let p = anchor();
    let eps = 1e-3;
    for opts in [SolverOptions::default(), SolverOptions::practical()] {
        let out = minimax_appa(&p, &[1.0], &[0.0], p.ell(), 2.0, 2.0, eps, 20, &opts).unwrap();
        assert_eq!(out.report.status, Status::Ok);
        let c = duality_gap(&p, &out.x, &out.y, 1e-12).unwrap();
        assert!(c.certifies(eps), "gap {}", c.value);
    }
}

#[test]
fn minimax_appa_separable_and_degenerate_budget() {
    let p = separable(1.0);
    let eps = 1e-4;
    let out = minimax_appa(&p, &[1.0], &[1.0], 2.0, 2.0, 2.0, eps, 20, &SolverOptions::practical()).unwrap();
    assert!(norm(&out.x) <= (2.0 * eps / 2.0).sqrt() && norm(&out.y) <= (2.0 * eps / 2.0).sqrt());
    let out = minimax_appa(&p, &[1.0], &[1.0], 2.0, 2.0, 2.0, 10.0, 1, &SolverOptions::practical()).unwrap();
    assert!(out.x[0].is_finite() && out.y[0].is_finite());
    assert!(duality_gap(&p, &out.x, &out.y, 1e-12).unwrap().value.is_finite());
    assert!(minimax_appa(&p, &[1.0], &[1.0], 2.0, 2.0, 2.0, 0.0, 1, &SolverOptions::practical()).is_err());
}

#[test]
fn reduction_coefficients_and_sampled_bounds() {
    let base = nc_c_toy(2, 1.0).unwrap();
    let dy = base.profile.diam_y.unwrap();
    let y0 = [0.2, -0.1];
    let eps = 0.3;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let scc = reduce(&base, &ReductionSpec::new(ReductionKind::Scc, eps, None, &y0)).unwrap();
    let nc = reduce(&base, &ReductionSpec::new(ReductionKind::Nc, eps, None, &y0)).unwrap();
    assert_eq!(scc.profile.mu_y, eps / (2.0 * dy * dy));
    assert_eq!(nc.profile.mu_y, eps / (2.0 * dy));
    for _ in 0..500 {
        let x: Vec<f64> = (0..2).map(|_| rng.gen_range(-4.0..4.0)).collect();
        let y = base.set_y.proj(&(0..2).map(|_| rng.gen_range(-2.0..2.0)).collect::<Vec<_>>());
        assert!(dist(&y, &y0) <= dy);
        assert!((base.value(&x, &y) - scc.value(&x, &y)).abs() <= eps / 4.0);
        assert!(dist(&base.grad_y(&x, &y), &nc.grad_y(&x, &y)) <= eps / 2.0);
        assert_eq!(base.grad_x(&x, &y), nc.grad_x(&x, &y));
    }
    let zero = reduce(&base, &ReductionSpec::new(ReductionKind::Scc, 0.0, None, &y0)).unwrap();
    let (x, y) = ([0.3, -1.2], [0.5, 0.5]);
    assert_eq!(zero.value(&x, &y), base.value(&x, &y));
    assert_eq!(zero.grad_y(&x, &y), base.grad_y(&x, &y));

    let game = bilinear_simplex(2, 2, vec![1.0, -1.0, -1.0, 1.0]).unwrap();
    let cc = ReductionSpec::new(ReductionKind::Cc, 0.1, Some(&[0.5, 0.5]), &[0.5, 0.5]);
    let (cx, cy) = coefficients(&game, &cc).unwrap();
    assert!((cx - 0.1 / 16.0).abs() <= 1e-15 && (cy - 0.1 / 16.0).abs() <= 1e-15);
    let moreau = ReductionSpec::new(ReductionKind::NcMoreau, 0.1, None, &y0);
    let expected = 0.1 * 0.1 / (200.0 * base.ell() * dy * dy);
    assert!((coefficients(&base, &moreau).unwrap().1 - expected).abs() <= 1e-15 * expected);
    // Unbounded Y has no diameter.
    let ws = ConstraintSet::whole_space(1).unwrap();
    let q = QuadraticScsc::scalar(1.0, 0.0, 1.0, 0.0, 0.0, ws.clone(), ws).build().unwrap();
    assert!(reduce(&q, &ReductionSpec::new(ReductionKind::Scc, 0.1, None, &[0.0])).is_err());
}

#[test]
fn scc_solve_on_bilinear_ball() {
    // x^2/2 + x y on R x Ball(0, 1): Phi(x) = x^2/2 + |x|.
    let p = scc_bilinear(1.0, vec![0.0], 1, 1, vec![1.0], 2.0).unwrap();
    for eps in [1e-1, 5e-2, 1e-2] {
        let out = scc_solve(&p, &[1.0], &[0.0], p.ell(), 1.0, eps, 60, &SolverOptions::practical()).unwrap();
        let c = duality_gap(&p, &out.x, &out.y, 1e-12).unwrap();
        assert!(c.certifies(eps), "eps {eps}: gap {}", c.value);
    }
}

#[test]
fn cc_solve_on_matching_pennies() {
    let p = bilinear_simplex(2, 2, vec![1.0, -1.0, -1.0, 1.0]).unwrap();
    assert_eq!(duality_gap(&p, &[1.0, 0.0], &[1.0, 0.0], 1e-12).unwrap().value, 2.0);
    let eps = 0.5;
    let out = cc_solve(&p, &[1.0, 0.0], &[1.0, 0.0], p.ell(), eps, 40, &SolverOptions::practical()).unwrap();
    assert_eq!(out.report.status, Status::Ok);
    assert!(duality_gap(&p, &out.x, &out.y, 1e-12).unwrap().certifies(eps));
}

#[test]
fn minimax_ppa_on_sin_toy() {
    let p = nc_sc_sin(1, 2.0, 1.0).unwrap();
    let eps = 1e-2;
    let opts = SolverOptions::practical();
    let mut good = 0;
    for seed in 0..20 {
        let out = minimax_ppa(&p, &[1.0], &[0.0], p.ell(), 2.0, eps, 300, seed, &opts).unwrap();
        let (rx, ry) = stationarity_f(&p, &out.x, &out.y).unwrap();
        good += (rx <= eps && ry <= eps) as u32;
        assert_eq!(out.report.seed, Some(seed));
    }
    assert!(good >= 14, "{good} of 20");
}

#[test]
fn minimax_ppa_descent_ledger_and_determinism() {
    let p = nc_sc_sin(2, 2.0, 1.0).unwrap();
    let phi = p.reference.phi.clone().unwrap();
    let opts = SolverOptions { record_trajectory: true, ..SolverOptions::practical() };
    let out = minimax_ppa(&p, &[1.0, -2.0], &[0.0, 0.0], p.ell(), 2.0, 1e-2, 40, 7, &opts).unwrap();
    let delta = out.report.ledger.get("ppa.delta").unwrap().applied;
    let traj = &out.report.trajectory;
    assert_eq!(traj.len(), 41);
    for w in traj.windows(2) {
        assert!(phi(&w[1]) + p.ell() * dist_sq(&w[1], &w[0]) <= phi(&w[0]) + delta + 1e-9);
    }
    let again = minimax_ppa(&p, &[1.0, -2.0], &[0.0, 0.0], p.ell(), 2.0, 1e-2, 40, 7, &opts).unwrap();
    assert_eq!(again, out);
    let s = out.report.selected_index.unwrap();
    assert!((1..=40).contains(&s));
    assert_eq!(out.x, traj[s as usize]);
    assert!(minimax_ppa(&p, &[1.0, -2.0], &[0.0, 0.0], p.ell(), 2.0, 1e-2, 0, 7, &opts).is_err());
}

#[test]
fn minimax_ppa_convex_case() {
    // Phi(x) = x^2; each proximal step shrinks x by 2/3, so stationarity
    // improves monotonically along the trajectory whichever index is drawn.
    let p = separable(1.0);
    let opts = SolverOptions { record_trajectory: true, ..SolverOptions::practical() };
    let out = minimax_ppa(&p, &[0.7], &[0.3], 2.0, 2.0, 1e-3, 30, 1, &opts).unwrap();
    let norms: Vec<f64> = out.report.trajectory.iter().map(|x| phi_grad_norm(&p, x, 1e-14).unwrap().value).collect();
    assert!(norms.windows(2).all(|w| w[1] <= w[0] + 1e-9));
    assert!(*norms.last().unwrap() <= 1e-4);
    let (rx, ry) = stationarity_f(&p, &out.x, &out.y).unwrap();
    assert!((rx - norms[out.report.selected_index.unwrap() as usize]).abs() <= 1e-6 && ry <= 1e-6);
}

#[test]
fn nc_solvers_on_merely_concave_toy() {
    let p = nc_c_toy(1, 1.0).unwrap();
    let phi = p.reference.phi.clone().unwrap();
    let eps = 0.1;
    let opts = SolverOptions::practical();
    let a = nc_solve(&p, &[1.0], &[0.0], p.ell(), eps, 30, 3, &opts).unwrap();
    let (rx, ry) = stationarity_f(&p, &a.x, &a.y).unwrap();
    assert!(rx <= eps && ry <= eps, "({rx}, {ry})");
    assert_eq!(nc_solve(&p, &[1.0], &[0.0], p.ell(), eps, 30, 3, &opts).unwrap(), a);
    assert!(nc_solve(&p, &[1.0], &[0.0], p.ell(), 0.0, 30, 3, &opts).is_err());

    let b = nc_moreau_solve(&p, &[1.0], &[0.0], p.ell(), eps, 30, 3, &opts).unwrap();
    let c = moreau_grad_norm(&ProxTarget::Function(&*phi), &b.x, p.ell(), 1e-12).unwrap();
    assert!(c.certifies(eps), "moreau {}", c.value);
}

#[test]
fn ppa_stationarity_implies_small_phi_gradient() {
    let p = nc_sc_sin(1, 2.0, 1.0).unwrap();
    let out = minimax_ppa(&p, &[1.0], &[0.0], p.ell(), 2.0, 1e-2, 200, 2, &SolverOptions::practical()).unwrap();
    let (rx, _) = stationarity_f(&p, &out.x, &out.y).unwrap();
    if rx <= 1e-2 {
        assert!(phi_grad_norm(&p, &out.x, 1e-12).unwrap().certifies(1e-2));
    }
}

#[test]
fn suggest_t_ppa_values() {
    assert_eq!(suggest_t_ppa(1.0, 1.0, 1.0), 9);
    assert_eq!(suggest_t_ppa(1.0, 1.0, 1e300), 1);
    assert!(suggest_t_ppa(1.0, 3.0, 0.1) > suggest_t_ppa(1.0, 1.0, 0.1));
}

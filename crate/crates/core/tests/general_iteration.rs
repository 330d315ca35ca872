use std::sync::Arc;

use minimax_core::agd::{agd, ScalarObjective};
use minimax_core::general_iteration::*;
use minimax_core::metrics::{duality_gap, moreau_grad_norm, phi_grad_norm, ProxTarget};
use minimax_core::oracle::{GradFn, ValueFn};
use minimax_core::problems::{condition_sweep, nc_c_toy, nc_sc_sin, scc_bilinear, QuadraticScsc};
use minimax_core::report::EtaChoice;
use minimax_core::vector::dist_sq;
use minimax_core::{ConstraintSet, MinimaxProblem, SmoothnessProfile, SolverOptions, Status};

/// `min_x Phi(x) + ell ||x - x_bar||^2` by AGD on the Danskin gradient.
fn prox_value(p: &MinimaxProblem, x_bar: &[f64]) -> f64 {
    let ys = p.reference.y_star.clone().unwrap();
    let phi = p.reference.phi.clone().unwrap();
    let ell = p.ell();
    let grad = |x: &[f64], out: &mut [f64]| {
        p.grad_x_into(x, &ys(x), out);
        for i in 0..out.len() {
            out[i] += 2.0 * ell * (x[i] - x_bar[i]);
        }
    };
    let smooth = 2.0 * p.profile.kappa_y().unwrap() * ell + 2.0 * ell;
    let obj = ScalarObjective::new(&grad, smooth, p.profile.mu_x + 2.0 * ell);
    let out = agd(&obj, &p.set_x, x_bar, 1e-15, None).unwrap();
    phi(&out.x) + ell * dist_sq(&out.x, x_bar)
}

fn certified_suite() -> Vec<MinimaxProblem> {
    let mut out: Vec<MinimaxProblem> = condition_sweep(&[(2.0, 3.0), (5.0, 5.0), (1.5, 8.0)], 0.5, 2).unwrap().iter().map(|q| q.build().unwrap()).collect();
    out.push(
        QuadraticScsc::scalar(2.0, 1.0, 2.0, 1.0, -1.0, ConstraintSet::whole_space(1).unwrap(), ConstraintSet::ball(vec![0.0], 2.0).unwrap())
            .build()
            .unwrap(),
    );
    out.push(
        QuadraticScsc::scalar(1.0, 0.8, 0.5, 0.3, 2.0, ConstraintSet::whole_space(1).unwrap(), ConstraintSet::boxed(vec![-1.0], vec![1.0]).unwrap())
            .build()
            .unwrap(),
    );
    out
}

#[test]
fn g1_meets_its_criterion() {
    for (i, p) in certified_suite().iter().enumerate() {
        let phi = p.reference.phi.clone().unwrap();
        let x_bar: Vec<f64> = (0..p.dim_x()).map(|k| 0.7 - 0.4 * k as f64).collect();
        for eps_bar in [1e-3, 1e-6] {
            let out = g1(p, &x_bar, &vec![0.0; p.dim_x()], eps_bar, &SolverOptions::default()).unwrap();
            assert_eq!(out.report.status, Status::Ok);
            let achieved = phi(&out.x) + p.ell() * dist_sq(&out.x, &x_bar);
            assert!(achieved <= prox_value(p, &x_bar) + eps_bar, "instance {i}, eps {eps_bar}");
        }
    }
}

#[test]
fn g1_with_singleton_y_is_a_prox_step() {
    let y0 = 0.4;
    let q = QuadraticScsc::scalar(1.5, 0.6, 1.0, -0.2, 0.0, ConstraintSet::whole_space(1).unwrap(), ConstraintSet::boxed(vec![y0], vec![y0]).unwrap());
    let p = q.build().unwrap();
    let (ell, x_bar) = (p.ell(), 2.0);
    let exact = (2.0 * ell * x_bar - 0.6 * y0 + 0.2) / (1.5 + 2.0 * ell);
    let out = g1(&p, &[x_bar], &[0.0], 1e-8, &SolverOptions::default()).unwrap();
    assert!((out.x[0] - exact).abs() <= 1e-6, "{} vs {exact}", out.x[0]);
    assert_eq!(out.y, [y0]);
}

#[test]
fn g1_with_linear_x_dependence_applies_the_map_once() {
    // f = 2 x - y^2: T_z(x) = x_bar - 1/2 for every x and z.
    let value: ValueFn = Arc::new(|x, y| 2.0 * x[0] - y[0] * y[0]);
    let gx: GradFn = Arc::new(|_, _, out| out[0] = 2.0);
    let gy: GradFn = Arc::new(|_, y, out| out[0] = -2.0 * y[0]);
    let p = MinimaxProblem::new(value, gx, gy, ConstraintSet::whole_space(1).unwrap(), ConstraintSet::symmetric_box(1, 1.0).unwrap(), SmoothnessProfile::new(2.0, 0.0, 2.0).unwrap()).unwrap();
    let mut a = [0.0];
    let mut b = [0.0];
    fixed_point_map(&p, &[1.0], &[0.3], &[-5.0], &mut a);
    fixed_point_map(&p, &[1.0], &[0.9], &[7.0], &mut b);
    assert_eq!((a, b), ([0.5], [0.5]));
    let out = g1(&p, &[1.0], &[3.0], 1e-6, &SolverOptions::default()).unwrap();
    assert_eq!(out.x, [0.5]);
}

#[test]
fn g2_examples() {
    // f(x, y) = x^2/2 - (y - c)^2 + c^2 on Ball(0, 1).
    for (c, expected) in [(0.3, 0.3), (3.0, 1.0), (-2.0, -1.0)] {
        let q = QuadraticScsc::scalar(1.0, 0.0, 2.0, 0.0, 2.0 * c, ConstraintSet::whole_space(1).unwrap(), ConstraintSet::ball(vec![0.0], 1.0).unwrap());
        let p = q.build().unwrap();
        let out = g2(&p, &[0.5], 1e-10, &SolverOptions::default()).unwrap();
        assert!((out.y[0] - expected).abs() <= 1e-5, "c = {c}: {}", out.y[0]);
    }
    for p in certified_suite() {
        let phi = p.reference.phi.clone().unwrap();
        let x: Vec<f64> = (0..p.dim_x()).map(|k| -0.3 + k as f64).collect();
        for eps_tilde in [1e-2, 1e-5, 1e-9] {
            let out = g2(&p, &x, eps_tilde, &SolverOptions::default()).unwrap();
            assert!(phi(&x) <= p.value(&x, &out.y) + eps_tilde);
        }
    }
}

#[test]
fn scsc_near_optimal_lands_near_the_saddle() {
    let eps = 1e-3;
    let mut problems = certified_suite();
    for seed in 0..4 {
        problems.push(QuadraticScsc::random(1 + seed % 2, 2, 3.0 + seed as f64, 4.0 + 2.0 * seed as f64, 0.5, seed as u64).unwrap().build().unwrap());
    }
    for (i, p) in problems.iter().enumerate() {
        let (xs, ys) = p.reference.saddle.clone().unwrap();
        let (k, kb) = (p.profile.kappa_x().unwrap(), p.profile.kappa_y().unwrap());
        let x0 = vec![0.0; p.dim_x()];
        let t = suggest_t_scsc(k, kb, dist_sq(&x0, &xs), eps);
        let out = scsc_near_optimal(p, &x0, eps, t, &SolverOptions::default()).unwrap();
        assert_eq!(out.report.status, Status::Ok);
        let d = dist_sq(&out.x, &xs) + dist_sq(&out.y, &ys);
        assert!(d <= eps, "instance {i}: {d}");
    }
}

#[test]
fn scsc_unit_condition_instance() {
    let set = ConstraintSet::symmetric_box(1, 1.0).unwrap();
    let p = QuadraticScsc::scalar(1.0, 0.0, 1.0, 0.5, 0.25, ConstraintSet::whole_space(1).unwrap(), set).build().unwrap();
    assert_eq!((p.profile.kappa_x(), p.profile.kappa_y()), (Some(1.0), Some(1.0)));
    let (xs, ys) = p.reference.saddle.clone().unwrap();
    let t = suggest_t_scsc(1.0, 1.0, dist_sq(&[0.0], &xs), 1e-6);
    let out = scsc_near_optimal(&p, &[0.0], 1e-6, t, &SolverOptions::default()).unwrap();
    assert!(dist_sq(&out.x, &xs) + dist_sq(&out.y, &ys) <= 1e-6);
}

#[test]
fn scc_near_optimal_on_bilinear_ball() {
    let p = scc_bilinear(1.0, vec![0.0], 1, 1, vec![1.0], 2.0).unwrap();
    for eps in [1e-1, 1e-2] {
        let out = scc_near_optimal(&p, &[1.0], &[0.0], eps, 20, &SolverOptions::default()).unwrap();
        let bar = out.report.ledger.get("scc.eps_bar").unwrap().applied;
        let tilde = out.report.ledger.get("scc.eps_tilde").unwrap().applied;
        assert!(bar < tilde);
        assert!(duality_gap(&p, &out.x, &out.y, 1e-12).unwrap().certifies(eps), "eps {eps}");
    }
    let alt = SolverOptions { scc_eta: EtaChoice::EpsBar, max_outer: Some(1), max_inner: Some(5), ..SolverOptions::default() };
    let out = scc_near_optimal(&p, &[1.0], &[0.0], 0.1, 0, &alt).unwrap();
    assert_eq!(out.report.ledger.get("scc.eta").unwrap().applied, out.report.ledger.get("scc.eps_bar").unwrap().applied);
}

#[test]
fn scc_near_optimal_records_clamps() {
    let p = scc_bilinear(0.01, vec![0.0], 1, 1, vec![1.0], 2.0).unwrap();
    assert!((p.ell() / 0.01 - 100.0).abs() < 1.0);
    let capped = SolverOptions { max_outer: Some(1), max_inner: Some(5), ..SolverOptions::default() };
    let out = scc_near_optimal(&p, &[1.0], &[0.0], 1e-4, 0, &capped).unwrap();
    assert!(!out.report.ledger.get("scc.eps_bar").unwrap().faithful);
    assert_ne!(out.report.status, Status::Ok);
}

#[test]
fn nsc_accelerated_on_sin_toy() {
    let p = nc_sc_sin(1, 2.0, 1.0).unwrap();
    let eps = 1e-2;
    let opts = SolverOptions::default();
    let mut good = 0;
    for seed in 0..20 {
        let out = nsc_accelerated(&p, &[1.0], eps, 300, seed, &opts).unwrap();
        good += phi_grad_norm(&p, &out.x, 1e-12).unwrap().certifies(eps) as u32;
        assert!(out.report.selected_index.unwrap() < 300);
    }
    assert!(good >= 14, "{good} of 20");
    let a = nsc_accelerated(&p, &[1.0], eps, 30, 4, &opts).unwrap();
    assert_eq!(a, nsc_accelerated(&p, &[1.0], eps, 30, 4, &opts).unwrap());
    // Convex in x: phi gradients shrink along the trajectory.
    let q = QuadraticScsc::scalar(2.0, 0.0, 2.0, 0.0, 0.0, ConstraintSet::whole_space(1).unwrap(), ConstraintSet::symmetric_box(1, 1.0).unwrap()).build().unwrap();
    let rec = SolverOptions { record_trajectory: true, ..SolverOptions::default() };
    let out = nsc_accelerated(&q, &[1.0], 1e-3, 30, 1, &rec).unwrap();
    let norms: Vec<f64> = out.report.trajectory.iter().map(|x| phi_grad_norm(&q, x, 1e-14).unwrap().value).collect();
    assert!(norms.windows(2).all(|w| w[1] <= w[0] + 1e-9));
}

#[test]
fn nc_accelerated_on_concave_toy() {
    let p = nc_c_toy(1, 1.0).unwrap();
    let phi = p.reference.phi.clone().unwrap();
    let eps = 0.1;
    let mut good = 0;
    for seed in 0..20 {
        let out = nc_accelerated(&p, &[1.0], &[0.0], eps, 100, seed, &SolverOptions::default()).unwrap();
        let s = out.report.selected_index.unwrap();
        assert!((1..=101).contains(&s));
        good += moreau_grad_norm(&ProxTarget::Function(&*phi), &out.x, p.ell(), 1e-12).unwrap().certifies(eps) as u32;
    }
    assert!(good >= 11, "{good} of 20");
    let opts = SolverOptions::default();
    assert_eq!(nc_accelerated(&p, &[1.0], &[0.0], eps, 10, 9, &opts).unwrap(), nc_accelerated(&p, &[1.0], &[0.0], eps, 10, 9, &opts).unwrap());
}

#[test]
fn regularization_adds_the_exact_term() {
    let p = nc_c_toy(2, 1.0).unwrap();
    let d = p.profile.diam_y.unwrap();
    let r = regularize_eta(&p, 0.2, &[0.1, 0.0]).unwrap();
    let (x, y) = ([0.4, -0.3], [0.5, -0.5]);
    let expected = p.value(&x, &y) - 0.2 / (2.0 * d * d) * dist_sq(&y, &[0.1, 0.0]);
    assert!((r.value(&x, &y) - expected).abs() <= 1e-15);
    assert!((r.profile.mu_y - 0.2 / (d * d)).abs() <= 1e-15);
    assert!(regularize_eta(&p, 0.0, &[0.0, 0.0]).is_err());
}

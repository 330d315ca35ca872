use minimax_core::general_iteration::fixed_point_map;
use minimax_core::problems::{nc_c_toy, nc_sc_sin, quadratic_suite, scc_bilinear};
use minimax_core::vector::{dist, norm};
use minimax_core::MinimaxProblem;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn point(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-4.0..4.0)).collect()
}

fn suite() -> Vec<MinimaxProblem> {
    quadratic_suite(12, 3).unwrap().iter().map(|q| q.build().unwrap()).collect()
}

fn grad_phi(p: &MinimaxProblem, x: &[f64]) -> Vec<f64> {
    p.grad_x(x, &p.reference.y_star.as_ref().unwrap()(x))
}

fn grad_psi(p: &MinimaxProblem, y: &[f64]) -> Vec<f64> {
    p.grad_y(&p.reference.x_star.as_ref().unwrap()(y), y)
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

#[test]
fn best_responses_are_kappa_lipschitz() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for p in suite() {
        let (kx, ky) = (p.profile.kappa_x().unwrap(), p.profile.kappa_y().unwrap());
        let (ys, xs) = (p.reference.y_star.clone().unwrap(), p.reference.x_star.clone().unwrap());
        for _ in 0..200 {
            let (a, b) = (point(&mut rng, p.dim_x()), point(&mut rng, p.dim_x()));
            assert!(dist(&ys(&a), &ys(&b)) <= ky * dist(&a, &b) + 1e-10);
            let (a, b) = (point(&mut rng, p.dim_y()), point(&mut rng, p.dim_y()));
            assert!(dist(&xs(&a), &xs(&b)) <= kx * dist(&a, &b) + 1e-10);
        }
    }
}

#[test]
fn envelopes_are_two_kappa_ell_smooth() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for p in suite() {
        let (kx, ky, ell) = (p.profile.kappa_x().unwrap(), p.profile.kappa_y().unwrap(), p.ell());
        for _ in 0..200 {
            let (a, b) = (point(&mut rng, p.dim_x()), point(&mut rng, p.dim_x()));
            assert!(dist(&grad_phi(&p, &a), &grad_phi(&p, &b)) <= 2.0 * ky * ell * dist(&a, &b) + 1e-10);
            let (a, b) = (point(&mut rng, p.dim_y()), point(&mut rng, p.dim_y()));
            assert!(dist(&grad_psi(&p, &a), &grad_psi(&p, &b)) <= 2.0 * kx * ell * dist(&a, &b) + 1e-10);
        }
    }
}

#[test]
fn danskin_gradient_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for p in suite() {
        let phi = p.reference.phi.clone().unwrap();
        for _ in 0..20 {
            let x = point(&mut rng, p.dim_x());
            let g = grad_phi(&p, &x);
            let fd = central_gradient(&*phi, &x, 1e-5);
            assert!(dist(&g, &fd) <= 1e-5 * norm(&g).max(1.0));
        }
    }
    // Strongly concave sin toy: y* is clipped but Phi stays differentiable.
    let p = nc_sc_sin(2, 2.0, 1.0).unwrap();
    let phi = p.reference.phi.clone().unwrap();
    for _ in 0..100 {
        let x = point(&mut rng, 2);
        let g = grad_phi(&p, &x);
        assert!(dist(&g, &central_gradient(&*phi, &x, 1e-6)) <= 1e-5 * norm(&g).max(1.0));
    }
}

#[test]
fn merely_concave_envelope_is_weakly_convex() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let p = nc_c_toy(2, 1.0).unwrap();
    let phi = p.reference.phi.clone().unwrap();
    let ell = p.ell();
    let h = |x: &[f64]| phi(x) + 0.5 * ell * x.iter().map(|v| v * v).sum::<f64>();
    for _ in 0..500 {
        let (a, b) = (point(&mut rng, 2), point(&mut rng, 2));
        let t: f64 = rng.gen_range(0.0..1.0);
        let m: Vec<f64> = a.iter().zip(&b).map(|(u, v)| t * u + (1.0 - t) * v).collect();
        assert!(h(&m) <= t * h(&a) + (1.0 - t) * h(&b) + 1e-9);
    }
}

#[test]
fn fixed_point_map_is_a_half_contraction() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut problems = suite();
    problems.truncate(7);
    problems.push(nc_sc_sin(2, 2.0, 1.0).unwrap());
    problems.push(nc_c_toy(3, 1.0).unwrap());
    problems.push(scc_bilinear(0.5, vec![1.0, 0.0], 2, 2, vec![1.0, 0.3, -0.2, 0.8], 2.0).unwrap());
    assert_eq!(problems.len(), 10);
    for p in &problems {
        let n = p.dim_x();
        let mut ta = vec![0.0; n];
        let mut tb = vec![0.0; n];
        for _ in 0..100 {
            let x_bar = point(&mut rng, n);
            let z = point(&mut rng, p.dim_y());
            let (a, b) = (point(&mut rng, n), point(&mut rng, n));
            fixed_point_map(p, &x_bar, &z, &a, &mut ta);
            fixed_point_map(p, &x_bar, &z, &b, &mut tb);
            assert!(dist(&ta, &tb) <= 0.5 * dist(&a, &b) + 1e-12);
        }
    }
}

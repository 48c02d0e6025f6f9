use num_complex::Complex64 as C;
use proptest::prelude::*;

use bilab_core::norms::{
    bmo_norm, critical_order, critical_order_recip, hardy_quasinorm, m0_max, m0_piecewise, opnorm_lower, weak_decompose,
    weak_quasinorm, OpnormConfig,
};
use bilab_core::grid::lebesgue_norm;
use bilab_core::operators::FastOperator;
use bilab_core::symbols::FnSymbol;
use bilab_core::{Exponents, Function, Grid, Rational};

#[test]
fn critical_order_agrees_on_exact_grid() {
    let step = Rational::new(3, 2 * 199);
    for i in 0..200 {
        for k in 0..200 {
            let (a, b) = (step * i, step * k);
            assert_eq!(m0_max(a, b, 1).unwrap(), m0_piecewise(a, b, 1).unwrap());
        }
    }
}

#[test]
fn critical_order_reference_values() {
    for rho in [0.0, 0.25, 0.5, 0.9] {
        for n in [1usize, 2, 3] {
            let nn = n as f64;
            assert!((critical_order(2.0, f64::INFINITY, rho, n).unwrap() + (1.0 - rho) * nn / 2.0).abs() < 1e-14);
            assert!((critical_order(f64::INFINITY, f64::INFINITY, rho, n).unwrap() + (1.0 - rho) * nn).abs() < 1e-14);
            assert!((critical_order(2.0, 2.0, rho, n).unwrap() + (1.0 - rho) * nn / 2.0).abs() < 1e-14);
        }
    }
}

#[test]
fn hardy_norm_is_comparable_to_lebesgue_norm() {
    // for p = 2 the maximal function is bounded above and below by ‖f‖₂
    let g = Grid::new(1, 256, 40.0).unwrap();
    let phi = |x: &[f64; 2]| (-x[0] * x[0] / 2.0).exp();
    for seed in 0..5 {
        let f = Function::from_real_fn(&g, |x| (x[0] * (1.0 + seed as f64)).sin() * (-x[0] * x[0] / 50.0).exp());
        let h = hardy_quasinorm(&f, 2.0, &phi).unwrap();
        let l = lebesgue_norm(&f, 2.0).unwrap();
        assert!(h >= 0.3 * l && h <= 4.0 * l, "{h} vs {l}");
    }
}

/// Mean oscillation over every periodic cube of side `N/2^s` cells, recomputed in plain loops.
fn bmo_brute(v: &[f64]) -> f64 {
    let n = v.len();
    let mut best: f64 = 0.0;
    let mut side = n;
    while side >= 4 {
        for start in 0..n {
            let cells: Vec<f64> = (0..side).map(|c| v[(start + c) % n]).collect();
            let mean = cells.iter().sum::<f64>() / side as f64;
            best = best.max(cells.iter().map(|c| (c - mean).abs()).sum::<f64>() / side as f64);
        }
        side /= 2;
    }
    best
}

#[test]
fn bmo_matches_brute_force() {
    let g = Grid::new(1, 64, 10.0).unwrap();
    for seed in 1..6u64 {
        let v: Vec<f64> = (0..64).map(|k| ((k as u64 * seed * 7919) % 13) as f64 - 6.0).collect();
        let f = Function::physical(g.clone(), v.iter().map(|x| C::new(*x, 0.0)).collect()).unwrap();
        assert!((bmo_norm(&f) - bmo_brute(&v)).abs() < 1e-12);
    }
}

#[test]
fn weak_exemplar() {
    // |x|^{-1/2} has weak L² quasinorm √2 on the line; the three central
    // samples (0, ±dx) give the discrete value √3
    let g = Grid::new(1, 8192, 40.0).unwrap();
    let f = Function::from_real_fn(&g, |x| x[0].abs().max(0.5 * g.dx()).powf(-0.5));
    let w = weak_quasinorm(&f, 2.0).unwrap();
    let vals: Vec<f64> = f.values().iter().map(|z| z.norm()).collect();
    let brute = vals
        .iter()
        .map(|v| v * (vals.iter().filter(|u| *u >= v).count() as f64 * g.dx()).sqrt())
        .fold(0.0, f64::max);
    assert!((w - brute).abs() < 1e-12 * brute);
    assert!((w - 3f64.sqrt()).abs() < 1e-9, "{w}");
    let pieces = weak_decompose(&f, 2.0, 1.0).unwrap();
    for (a, b) in pieces.reconstruct().iter().zip(f.values()) {
        assert_eq!(*a, b.re);
    }
}

#[test]
fn opnorm_matches_singular_value() {
    // T(f,g) = a(D)f · g with |a| ≤ 1 has norm sup|a| on L² × L^∞ → L²,
    // attained by the top singular vector of f ↦ T(f,1)
    let g = Grid::new(1, 64, 2.0 * std::f64::consts::PI).unwrap();
    let sigma = FnSymbol::new(1, 0.0, 0.0, true, |_: &[f64; 2], xi: &[f64; 2], _: &[f64; 2]| {
        C::new(1.0 / (1.0 + (xi[0] - 3.0).powi(2)), 0.0)
    });
    let op = FastOperator::new(&sigma, &g).unwrap();
    let one = vec![C::new(1.0, 0.0); 64];
    let mat = nalgebra::DMatrix::<C>::from_fn(64, 64, |r, c| {
        let mut e = vec![C::new(0.0, 0.0); 64];
        e[c] = C::new(1.0, 0.0);
        bilab_core::operators::BilinearOperator::apply(&op, &e, &one)[r]
    });
    let top = mat.singular_values().max();
    let e = Exponents::new(2.0, f64::INFINITY, 0.0).unwrap();
    let est = opnorm_lower(&op, &e, &OpnormConfig { trials: 4, rounds: 20, seed: 3 }).unwrap();
    assert!((top - 1.0).abs() < 1e-10);
    assert!(est.ratio <= top * (1.0 + 1e-9) && est.ratio >= 0.95 * top, "{} vs {top}", est.ratio);
}

proptest! {
    #[test]
    fn critical_order_forms_agree(a in 0i64..=300, b in 0i64..=300, n in 1usize..=3) {
        let (a, b) = (Rational::new(a, 200), Rational::new(b, 200));
        prop_assert_eq!(m0_max(a, b, n).unwrap(), m0_piecewise(a, b, n).unwrap());
        let rho = Rational::new(1, 3);
        let scaled = critical_order_recip(a, b, rho, n).unwrap();
        prop_assert_eq!(scaled, (Rational::from_integer(1) - rho) * m0_max(a, b, n).unwrap());
    }

    #[test]
    fn weak_pieces_are_bounded(seed in 0u64..500) {
        let g = Grid::new(1, 128, 10.0).unwrap();
        let f = Function::from_real_fn(&g, |x| ((x[0] + seed as f64).sin() * 7.0).exp());
        let p = weak_decompose(&f, 1.5, 1.0).unwrap();
        for j in p.indices() {
            prop_assert!(p.sup_norm(j) <= p.level(j));
        }
        let back = p.reconstruct();
        for (a, b) in back.iter().zip(f.values()) {
            prop_assert!((a - b.re).abs() <= 1e-12 * b.re.abs());
        }
    }
}

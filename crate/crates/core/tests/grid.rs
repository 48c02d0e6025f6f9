use std::f64::consts::PI;

use num_complex::Complex64 as C;
use proptest::prelude::*;

use bilab_core::grid::{forward_transform, inverse_transform, lebesgue_norm, peak_average, torus_distance};
use bilab_core::{Function, Grid};

fn naive_dft(g: &Grid, f: &[C]) -> Vec<C> {
    (0..g.len())
        .map(|q| {
            let xi = g.freq_point(q)[0];
            f.iter().enumerate().map(|(k, v)| v * C::from_polar(g.dx(), -xi * g.x_point(k)[0])).sum()
        })
        .collect()
}

#[test]
fn gaussian_transform_is_analytic() {
    let g = Grid::new(1, 256, 40.0).unwrap();
    let f = Function::from_real_fn(&g, |x| (-x[0] * x[0] / 2.0).exp());
    let s = forward_transform(&f).unwrap();
    for (q, v) in s.values().iter().enumerate() {
        let xi = g.freq_point(q)[0];
        let exact = (2.0 * PI).sqrt() * (-xi * xi / 2.0).exp();
        assert!((v - exact).norm() < 1e-12, "xi={xi}: {v} vs {exact}");
    }
}

#[test]
fn fft_matches_naive_sum() {
    let g = Grid::new(1, 48, 7.0).unwrap();
    let f: Vec<C> = (0..48).map(|k| C::new((k as f64 * 0.37).sin(), (k * k) as f64 % 5.0)).collect();
    let fast = forward_transform(&Function::physical(g.clone(), f.clone()).unwrap()).unwrap();
    for (a, b) in fast.values().iter().zip(naive_dft(&g, &f)) {
        assert!((a - b).norm() < 1e-12);
    }
}

#[test]
fn two_dimensional_gaussian() {
    let g = Grid::new(2, 64, 20.0).unwrap();
    let f = Function::from_real_fn(&g, |x| (-(x[0] * x[0] + x[1] * x[1]) / 2.0).exp());
    let s = forward_transform(&f).unwrap();
    for (q, v) in s.values().iter().enumerate() {
        let z = g.freq_point(q);
        let exact = 2.0 * PI * (-(z[0] * z[0] + z[1] * z[1]) / 2.0).exp();
        assert!((v - exact).norm() < 1e-11);
    }
}

#[test]
fn peak_average_matches_direct_sum() {
    let g = Grid::new(1, 40, 10.0).unwrap();
    let f = Function::from_real_fn(&g, |x| x[0].sin() + 0.3);
    let a = 2.5;
    let s = peak_average(&f, a).unwrap();
    for x in 0..g.len() {
        let mut acc = 0.0;
        for y in 0..g.len() {
            let d = (g.x_point(x)[0] - g.x_point(y)[0]).abs();
            let d = d.min(g.period() - d);
            acc += f.values()[y].norm() * a / (1.0 + a * d).powi(2) * g.dx();
        }
        assert!((s.values()[x].re - acc).abs() < 1e-12 * acc.max(1.0));
    }
    assert_eq!(torus_distance(&g, 3, 37), 6.0 * g.dx());
}

proptest! {
    #[test]
    fn parseval(seed in 0u64..1000, n in prop::sample::select(vec![16usize, 32, 64]), l in 1.0f64..50.0) {
        let g = Grid::new(1, n, l).unwrap();
        let f: Vec<C> = (0..n).map(|k| {
            let t = (seed as f64 + 1.0) * (k as f64 + 0.5);
            C::new(t.sin(), (1.7 * t).cos())
        }).collect();
        let f = Function::physical(g.clone(), f).unwrap();
        let s = forward_transform(&f).unwrap();
        let lhs = lebesgue_norm(&f, 2.0).unwrap().powi(2);
        let rhs = g.dxi() / (2.0 * PI) * s.values().iter().map(|v| v.norm_sqr()).sum::<f64>();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs);
        let back = inverse_transform(&s).unwrap();
        for (a, b) in back.values().iter().zip(f.values()) {
            prop_assert!((a - b).norm() < 1e-12);
        }
    }
}

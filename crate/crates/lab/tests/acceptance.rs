//! Acceptance gate: one PASS/FAIL line per criterion, with its runtime.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use bilab_core::grid::multiplier_apply;
use bilab_core::norms::{
    critical_order, critical_order_recip, m0_max, m0_piecewise, weak_decompose, weak_from_pieces, weak_quasinorm,
};
use bilab_core::operators::{output_spectrum_support, pairing, BilinearOperator, DirectOperator, FastOperator};
use bilab_core::partitions::{build_dyadic, build_uniform, lambda_diag, lambda_line, psi, Lattice};
use bilab_core::symbols::{active_nu, band_x, slice_dyadic, slice_uniform, Constant, Exotic, FnSymbol, Tabulated, XSampling};
use bilab_core::{Exponents, Function, Grid, Rational};
use bilab_lab::fields::{band_limited, sup_norm, white};
use bilab_lab::inequalities::{almost_orthogonal_bound, schur_bound, Family, Mode};
use bilab_lab::kernels::{kernel_slope_fit, kernel_symbol, KernelKind};
use bilab_lab::lemmas::{piece_decay_fit, pointwise_k_fit, DecaySpec, GroupedSpec};
use bilab_lab::rescale::rescale_invariance;
use bilab_lab::theorem::{theorem_ratio, Target};
use bilab_lab::{Claim, Grouping, Source};

type C = Complex64;
type Outcome = Result<String, String>;
type Criterion = (&'static str, u64, fn() -> Outcome);

fn torus(n: usize) -> Grid {
    Grid::new(1, n, 2.0 * std::f64::consts::PI).unwrap()
}

fn rel_err(a: &[C], b: &[C]) -> f64 {
    let top = sup_norm(b).max(1e-300);
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max) / top
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn critical_order_formula() -> Outcome {
    let n_axis = 200i64;
    let step = Rational::new(3, 2 * (n_axis - 1));
    let mut mismatches = 0;
    for i in 0..n_axis {
        for k in 0..n_axis {
            let (a, b) = (step * i, step * k);
            for n in [1, 2] {
                if m0_max(a, b, n).unwrap() != m0_piecewise(a, b, n).unwrap() {
                    mismatches += 1;
                }
            }
        }
    }
    let mut spots = 0;
    for rho in [Rational::new(0, 1), Rational::new(1, 2), Rational::new(4, 5)] {
        for n in [1usize, 2] {
            let nn = Rational::from_integer(n as i64);
            let one = Rational::from_integer(1);
            let half = Rational::new(1, 2);
            let zero = Rational::from_integer(0);
            if critical_order_recip(half, zero, rho, n).unwrap() != -(one - rho) * nn / 2 {
                spots += 1;
            }
            if critical_order_recip(zero, zero, rho, n).unwrap() != -(one - rho) * nn {
                spots += 1;
            }
        }
    }
    let f64_spot = critical_order(2.0, f64::INFINITY, 0.5, 1).unwrap();
    check(
        mismatches == 0 && spots == 0 && f64_spot == -0.25,
        format!("{} grid points x n in {{1,2}}: {mismatches} mismatches, {spots} bad spot values", n_axis * n_axis),
    )
}

fn operator_identities() -> Outcome {
    let g = torus(128);
    let cases = 20u64;
    let mut worst = [0.0f64; 4];
    let one = Constant::new(1, 1.0);
    let prod = FastOperator::new(&one, &g).unwrap();
    let prod_direct = DirectOperator::new(&one, &g).unwrap();
    for s in 0..cases {
        let (f, h) = (white(&g, 10 + 2 * s), white(&g, 11 + 2 * s));
        let fg: Vec<C> = f.iter().zip(&h).map(|(a, b)| a * b).collect();
        worst[0] = worst[0].max(rel_err(&prod.apply(&f, &h), &fg)).max(rel_err(&prod_direct.apply(&f, &h), &fg));
    }
    // σ = a(x) b(ξ) c(η) factorises as a · b(D)f · c(D)g
    for s in 0..cases {
        let w = 0.3 + 0.05 * s as f64;
        let sigma = FnSymbol::new(1, 0.0, 1.0, false, move |x: &[f64; 2], xi: &[f64; 2], eta: &[f64; 2]| {
            C::new((x[0]).cos() + 2.0, 0.0) * C::new(1.0 / (1.0 + w * xi[0] * xi[0]), 0.0) * C::from_polar(1.0, w * eta[0])
        });
        let (f, h) = (band_limited(&g, 0.0, 40.0, 100 + s), band_limited(&g, 0.0, 40.0, 200 + s));
        let bf = multiplier_apply(
            &(0..g.len()).map(|q| C::new(1.0 / (1.0 + w * g.freq_point(q)[0].powi(2)), 0.0)).collect::<Vec<_>>(),
            &Function::physical(g.clone(), f.clone()).unwrap(),
        )
        .unwrap();
        let ch = multiplier_apply(
            &(0..g.len()).map(|q| C::from_polar(1.0, w * g.freq_point(q)[0])).collect::<Vec<_>>(),
            &Function::physical(g.clone(), h.clone()).unwrap(),
        )
        .unwrap();
        let expect: Vec<C> = (0..g.len())
            .map(|x| C::new(g.x_point(x)[0].cos() + 2.0, 0.0) * bf.values()[x] * ch.values()[x])
            .collect();
        let t = DirectOperator::new(&sigma, &g).unwrap().apply(&f, &h);
        worst[1] = worst[1].max(rel_err(&t, &expect));
    }
    for s in 0..cases {
        let sigma = Tabulated::random(&torus(128), -0.5, 0.5, true, 0, 300 + s);
        let ex = Exotic::multiplier(1, -0.25, 0.5);
        let (f, h) = (white(&g, 400 + s), white(&g, 500 + s));
        for sym in [&sigma as &dyn bilab_core::symbols::Symbol<f64>, &ex] {
            let a = FastOperator::new(sym, &g).unwrap().apply(&f, &h);
            let b = DirectOperator::new(sym, &g).unwrap().apply(&f, &h);
            worst[2] = worst[2].max(rel_err(&a, &b));
        }
    }
    for s in 0..cases {
        let sigma = Tabulated::random(&g, -0.5, 0.5, false, 3, 600 + s);
        let op = DirectOperator::new(&sigma, &g).unwrap();
        let (f, k, h) = (white(&g, 700 + s), white(&g, 800 + s), white(&g, 900 + s));
        let base = pairing(&g, &op.apply(&f, &k), &h);
        let one = pairing(&g, &op.transpose1(&h, &k), &f);
        let two = pairing(&g, &op.transpose2(&f, &h), &k);
        let e = (base - one).norm().max((base - two).norm()) / base.norm();
        worst[3] = worst[3].max(e);
    }
    check(
        worst[0] <= 1e-9 && worst[1] <= 1e-9 && worst[2] <= 1e-9 && worst[3] <= 1e-10,
        format!(
            "{cases} cases each at N=128: product {:.1e}, separable {:.1e}, fast/direct {:.1e}, duality {:.1e}",
            worst[0], worst[1], worst[2], worst[3]
        ),
    )
}

fn decomposition_reconstruction() -> Outcome {
    let g = Grid::new(1, 256, 2.0 * std::f64::consts::PI).unwrap();
    let phi = build_uniform(1).unwrap();
    let dy2 = build_dyadic(2, 7).unwrap();
    let dy1 = build_dyadic(1, 12).unwrap();
    let mut worst = [0.0f64; 3];
    // partitions of unity
    for i in 0..4001 {
        let r = i as f64 * 0.05;
        let s: f64 = (0..=14).map(|j| psi(j, r)).sum();
        worst[0] = worst[0].max((s - 1.0).abs());
        let t = -50.0 + i as f64 * 0.025;
        let u: f64 = (-60..=60).map(|v| phi.phi(&[t - v as f64, 0.0])).sum();
        worst[0] = worst[0].max((u - 1.0).abs());
    }
    let rows = XSampling::Indices(vec![0, 77, 200]);
    for rho in [0.0, 0.5, 0.8] {
        let sigma = Exotic::new(1, -(1.0 - rho) / 2.0, rho);
        for j in 1..=6 {
            let whole = slice_dyadic(&sigma, j, &dy2, &g, &rows).unwrap();
            let nus = active_nu(j, rho, &dy2, 1);
            let parts: Vec<_> = nus.iter().map(|nu| slice_uniform(&sigma, j, *nu, rho, &phi, &dy2, &g, &rows).unwrap()).collect();
            let top = whole.max_abs();
            // each part is zero outside its windows, so sum window by window
            let mut sum = std::collections::HashMap::<(usize, [i64; 2], [i64; 2]), C>::new();
            let windows = |p: &bilab_core::symbols::SymbolPiece<f64>| {
                let etas: Vec<_> = p.eta_window().points().collect();
                p.xi_window().points().flat_map(move |xi| etas.clone().into_iter().map(move |eta| (xi, eta))).collect::<Vec<_>>()
            };
            for p in &parts {
                for (xi, eta) in windows(p) {
                    for row in 0..3 {
                        *sum.entry((row, xi, eta)).or_default() += p.value(row, xi, eta);
                    }
                }
            }
            for (xi, eta) in windows(&whole) {
                for row in 0..3 {
                    sum.entry((row, xi, eta)).or_default();
                }
            }
            for ((row, xi, eta), v) in sum {
                worst[1] = worst[1].max((v - whole.value(row, xi, eta)).norm() / top);
            }
        }
        // Σ_k σ_{j,k,ν} = σ_{j,ν} on a few boxes
        for j in [2usize, 4, 6] {
            let s = 2f64.powf(j as f64 * rho);
            for nu in active_nu(j, rho, &dy2, 1).into_iter().step_by(7).take(3) {
                let piece = slice_uniform(&sigma, j, nu, rho, &phi, &dy2, &g, &XSampling::All).unwrap();
                let mut acc = vec![C::new(0.0, 0.0); piece.values().len()];
                let mut k = 0;
                while k == 0 || s * 2f64.powi(k as i32 - 1) <= g.max_freq() {
                    let b = band_x(&piece, k, rho, &dy1).unwrap();
                    for (a, v) in acc.iter_mut().zip(b.values()) {
                        *a += v;
                    }
                    k += 1;
                }
                let top = piece.max_abs();
                let e = acc.iter().zip(piece.values()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max) / top;
                worst[2] = worst[2].max(e);
            }
        }
    }
    check(
        worst.iter().all(|w| *w <= 1e-10),
        format!(
            "N=256, j<=6, rho in {{0,0.5,0.8}}: partitions {:.1e}, sum over nu {:.1e}, sum over k {:.1e}",
            worst[0], worst[1], worst[2]
        ),
    )
}

fn spectrum_inclusion() -> Outcome {
    let g = torus(128);
    let phi = build_uniform(1).unwrap();
    let dy2 = build_dyadic(2, 6).unwrap();
    let dy1 = build_dyadic(1, 10).unwrap();
    let rho = 0.5;
    let sigma = Exotic::new(1, -0.25, rho);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut cases, mut violations, mut carried) = (0, 0, 0);
    while cases < 50 {
        let j = rng.random_range(2..=4usize);
        let k = rng.random_range(0..=2usize);
        let nus = active_nu(j, rho, &dy2, 1);
        let nu = nus[rng.random_range(0..nus.len())];
        let s = 2f64.powf(j as f64 * rho);
        let centre = s * (nu[0][0] + nu[1][0]) as f64;
        if centre.abs() + s * 2f64.powi(k as i32 + 2) >= g.max_freq() {
            continue;
        }
        let piece = slice_uniform(&sigma, j, nu, rho, &phi, &dy2, &g, &XSampling::All).unwrap();
        let piece = band_x(&piece, k, rho, &dy1).unwrap();
        let seed = rng.random::<u64>();
        let f = Function::physical(g.clone(), white(&g, seed)).unwrap();
        let h = Function::physical(g.clone(), white(&g, seed ^ 1)).unwrap();
        let sup = output_spectrum_support(&piece, &f, &h, 1e-10).unwrap();
        violations += sup.outside_box.len();
        carried += sup.frequencies.len();
        cases += 1;
    }
    check(violations == 0 && carried > 0, format!("{cases} cases, {carried} carried frequencies, {violations} outside the box"))
}

fn lemma_exponents() -> Outcome {
    let g = torus(256);
    let phi = build_uniform(1).unwrap();
    let dy2 = build_dyadic(2, 7).unwrap();
    let mut failures = Vec::new();
    let mut fits = 0;
    let mut record = |ok: bool, what: String| {
        fits += 1;
        if !ok {
            failures.push(what);
        }
    };
    for rho in [0.0, 0.5, 0.8] {
        let m = -(1.0 - rho) / 2.0;
        let sigma = Exotic::new(1, m, rho);
        let src = Source::exotic(&sigma);
        for (beta, gamma) in [([0, 0], [0, 0]), ([1, 0], [0, 0]), ([0, 0], [1, 0])] {
            let spec = DecaySpec {
                j_range: (2..=6).collect(),
                k_range: (0..=4).collect(),
                fixed_j: 4,
                beta,
                gamma,
                n_list: vec![2.0, 4.0],
                rho,
                tolerance: 0.2,
            };
            let r = piece_decay_fit(src, &g, &spec, &phi, &dy2).unwrap();
            println!("    {}", r.j_fit.summary());
            record(r.j_fit.pass, r.j_fit.summary());
            for f in &r.k_fits {
                record(f.pass, f.summary());
            }
        }
        let gspec = GroupedSpec {
            j_range: (2..=6).collect(),
            k_range: (0..=4).collect(),
            fixed_j: 4,
            rho,
            iterations: 30,
            rounds: 8,
            seed: 7,
            tolerance: 0.2,
        };
        let pw = pointwise_k_fit(src, &g, &[2.0, 4.0], &gspec, &phi).unwrap();
        for f in &pw {
            record(f.log2_values.iter().all(|v| v.is_finite() || *v == f64::NEG_INFINITY) && f.pass, f.summary());
        }
        let ann = bilab_lab::lemmas::grouped_j_fit(
            &format!("annulus rho={rho}"),
            src,
            &g,
            &|_| Grouping::Annulus,
            None,
            0.0,
            Claim::Equal,
            &gspec,
            &phi,
        )
        .unwrap();
        println!("    {}", ann.summary());
        record(ann.pass, ann.summary());
        let ks = kernel_symbol(m, rho);
        for kind in [KernelKind::Plain, KernelKind::Dx, KernelKind::Dy] {
            let r = kernel_slope_fit(&ks, &g, &[2, 3, 4, 5, 6], kind, &dy2, 64, 0.15).unwrap();
            println!("    {}", r.summary());
            record(r.pass, r.summary());
        }
    }
    let n = fits;
    check(failures.is_empty(), format!("{} of {n} fits pass{}", n - failures.len(), if failures.is_empty() { String::new() } else { format!("; failing: {}", failures.join(" | ")) }))
}

fn brute_line(j: usize, l: usize, rho: f64) -> Vec<i64> {
    let s = 2f64.powf(j as f64 * rho);
    let (lo, hi) = if l == 0 { (0.0, 2.0) } else { (2f64.powi(l as i32 - 1), 2f64.powi(l as i32 + 1)) };
    let reach = (hi / s) as i64 + 3;
    (-reach..=reach)
        .filter(|nu| {
            let (a, b) = (s * (*nu as f64 - 1.0), s * (*nu as f64 + 1.0));
            let meets = |c: f64, d: f64| a <= d && c <= b;
            meets(lo, hi) || meets(-hi, -lo)
        })
        .collect()
}

fn brute_diag(j: usize, k: usize, l: usize, rho: f64) -> Vec<i64> {
    let s = 2f64.powf(j as f64 * rho);
    let half = s * 2f64.powi(k as i32 + 2);
    let (lo, hi) = if l == 0 { (0.0, 2.0) } else { (2f64.powi(l as i32 - 1), 2f64.powi(l as i32 + 1)) };
    let reach = ((hi + half) / s) as i64 + 3;
    (-reach..=reach)
        .filter(|mu| {
            let (a, b) = (s * *mu as f64 - half, s * *mu as f64 + half);
            let meets = |c: f64, d: f64| a <= d && c <= b;
            meets(lo, hi) || meets(-hi, -lo)
        })
        .collect()
}

fn index_counts() -> Outcome {
    let rho = 0.5;
    let dy = build_dyadic(1, 16).unwrap();
    let uni = build_uniform(1).unwrap();
    let (mut worst_line, mut worst_diag, mut mismatches, mut sets) = (0.0f64, 0.0f64, 0, 0);
    for j in 1..=12usize {
        let js = j as f64 * rho;
        for l in 0..=j + 3 {
            let base = 1f64.max(2f64.powf(l as f64 - js));
            let line: Vec<Lattice> = lambda_line(j, l, rho, &dy, &uni).unwrap();
            let mut got: Vec<i64> = line.iter().map(|v| v[0]).collect();
            got.sort();
            if got != brute_line(j, l, rho) {
                mismatches += 1;
            }
            worst_line = worst_line.max(got.len() as f64 / base);
            sets += 1;
            let kmax = (j as f64 * (1.0 - rho)).floor() as usize;
            for k in 0..=kmax {
                let mut got: Vec<i64> = lambda_diag(j, k, l, rho, &dy).unwrap().iter().map(|v| v[0]).collect();
                got.sort();
                if got != brute_diag(j, k, l, rho) {
                    mismatches += 1;
                }
                worst_diag = worst_diag.max(got.len() as f64 / (2f64.powi(k as i32) * base));
                sets += 1;
            }
        }
    }
    check(
        worst_line <= 8.0 && worst_diag <= 16.0 && mismatches == 0,
        format!("{sets} sets: max line ratio {worst_line:.3} (<= 8), max diag ratio {worst_diag:.3} (<= 16), {mismatches} oracle mismatches"),
    )
}

fn gauss(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

fn banded(rng: &mut ChaCha8Rng, n: usize, centre: usize, width: usize) -> DMatrix<C> {
    DMatrix::from_fn(n, n, |r, c| {
        let near = |i: usize| i.abs_diff(centre) <= width;
        if near(r) && near(c) {
            C::new(gauss(rng), gauss(rng))
        } else {
            C::new(0.0, 0.0)
        }
    })
}

fn schur_orthogonality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut violations = 0;
    let mut instances = 0;
    for _ in 0..100 {
        let (r, c) = (rng.random_range(1..=64), rng.random_range(1..=64));
        let a = DMatrix::from_fn(r, c, |_, _| if rng.random::<f64>() < 0.3 { rng.random::<f64>() * 5.0 } else { 0.0 });
        let b: Vec<f64> = (0..r).map(|_| rng.random::<f64>()).collect();
        let cc: Vec<f64> = (0..c).map(|_| rng.random::<f64>()).collect();
        let (lhs, rhs) = schur_bound(&a, &b, &cc).unwrap();
        if lhs > rhs * (1.0 + 1e-12) {
            violations += 1;
        }
        instances += 1;
    }
    for _ in 0..100 {
        let dim = rng.random_range(8..=48);
        let count = rng.random_range(2..=12);
        let width = rng.random_range(0..=3);
        let v: Vec<DVector<C>> = (0..count)
            .map(|_| {
                let centre = rng.random_range(0..dim);
                DVector::from_fn(dim, |i, _| if i.abs_diff(centre) <= width { C::new(gauss(&mut rng), gauss(&mut rng)) } else { C::new(0.0, 0.0) })
            })
            .collect();
        if !almost_orthogonal_bound(&Family::Vectors(v), Mode::Vectors, 1e-12).unwrap().holds() {
            violations += 1;
        }
        instances += 1;
    }
    for mode in [Mode::StarLeft, Mode::StarRight] {
        for _ in 0..50 {
            let dim = rng.random_range(8..=32);
            let count = rng.random_range(2..=8);
            let width = rng.random_range(0..=2);
            let t: Vec<DMatrix<C>> = (0..count).map(|_| {
                let centre = rng.random_range(0..dim);
                banded(&mut rng, dim, centre, width)
            }).collect();
            if !almost_orthogonal_bound(&Family::Operators(t), mode, 1e-12).unwrap().holds() {
                violations += 1;
            }
            instances += 1;
        }
    }
    check(violations == 0, format!("{instances} instances, {violations} violations"))
}

fn weak_lemma() -> Outcome {
    let p = 2.0;
    let r = 1.0;
    let g = Grid::new(1, 4096, 40.0).unwrap();
    let f = Function::from_real_fn(&g, |x| {
        let a = x[0].abs().max(0.5 * g.dx());
        a.powf(-1.0 / p)
    });
    let pieces = weak_decompose(&f, 1.0, 1.0).unwrap();
    let exact = pieces.reconstruct().iter().zip(f.values()).all(|(a, b)| *a == b.re);
    let bounded = pieces.indices().all(|j| pieces.sup_norm(j) <= pieces.level(j));
    let c0 = weak_quasinorm(&f, p).unwrap();
    let bound = pieces.bound_check(c0, p, r).unwrap();
    let rc = weak_from_pieces(&pieces, bound.b * bound.constant, bound.beta, r, p).unwrap();
    let unit = weak_decompose(&Function::from_real_fn(&g, |_| 1.0), 1.0, 1.0).unwrap();
    let balance = weak_from_pieces(&unit, 16.0, 1.0, 1.0, 2.0).unwrap();
    check(
        exact && bounded && rc.ratio <= 8.0 && balance.j0 == 2 && balance.c == 4.0,
        format!(
            "reconstruction exact: {exact}, piece bounds: {bounded}, recombination c = {:.3} (<= 8), balancing C = {}",
            rc.ratio, balance.c
        ),
    )
}

fn rescaling() -> Outcome {
    let g = torus(128);
    let sigma = Exotic::new(1, -0.25, 0.5);
    let e = Exponents::new(2.0, 2.0, 0.5).unwrap();
    let r = rescale_invariance(&sigma, &g, 4, &e, 4, 9).unwrap();
    check(
        r.pointwise_error <= 1e-9 && r.disagreement() <= 0.05,
        format!(
            "scale {} (requested {}), pointwise {:.1e}, ratios {:.6} vs {:.6}",
            r.scale, r.requested_scale, r.pointwise_error, r.ratio_before, r.ratio_after
        ),
    )
}

fn criticality_echo() -> Outcome {
    let rho = 0.5;
    let crit = critical_order(2.0, f64::INFINITY, rho, 1).unwrap();
    let ratio = |m: f64, n: usize| {
        let s = Exotic::new(1, m, rho);
        theorem_ratio(Source::exotic(&s), &torus(n), Target::L2Linf, 50, 7).unwrap().ratio
    };
    let (a, b) = (ratio(crit, 128), ratio(crit, 256));
    let (c, d) = (ratio(crit + 0.5, 128), ratio(crit + 0.5, 256));
    let stable = (b / a - 1.0).abs() <= 0.10;
    let grows = d / c >= 2.0;
    check(
        stable && grows,
        format!(
            "critical: {a:.4} -> {b:.4} (change {:+.1}%, stable: {stable}); m+0.5: {c:.4} -> {d:.4} (growth {:.3}x, needs 2x: {grows})",
            100.0 * (b / a - 1.0),
            d / c
        ),
    )
}

fn main() {
    let criteria: Vec<Criterion> = vec![
        ("1 critical-order formula", 1, critical_order_formula),
        ("2 operator identities", 120, operator_identities),
        ("3 decomposition reconstruction", 120, decomposition_reconstruction),
        ("4 frequency-support inclusion", 120, spectrum_inclusion),
        ("5 lemma-exponent fits", 600, lemma_exponents),
        ("6 index-set counting", 10, index_counts),
        ("7 Schur and almost orthogonality", 30, schur_orthogonality),
        ("8 weak-Lp lemma", 10, weak_lemma),
        ("9 rescaling invariance", 120, rescaling),
        ("10 criticality echo", 600, criticality_echo),
    ];
    let mut failed = 0;
    for (name, limit, run) in criteria {
        let t = Instant::now();
        let out = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let took = t.elapsed();
        let in_time = took <= Duration::from_secs(limit);
        let (ok, detail) = match out {
            Ok(d) => (in_time, d),
            Err(d) => (false, d),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "{} criterion {name}: {detail} [{:.2} s, limit {limit} s{}]",
            if ok { "PASS" } else { "FAIL" },
            took.as_secs_f64(),
            if in_time { "" } else { ", exceeded" }
        );
    }
    println!("acceptance: {} of 10 criteria pass", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

use std::collections::HashSet;

use proptest::prelude::*;

use bilab_core::partitions::{
    build_dyadic, build_uniform, lambda_diag, lambda_line, psi, schur_entry, schur_sum_constants,
};

/// `Some(meets)` for a closed box and annulus, `None` when they only touch up to rounding.
fn meets_annulus_2d(lo: [f64; 2], hi: [f64; 2], r_in: f64, r_out: f64) -> Option<bool> {
    // nearest and farthest points of the box from the origin
    let near: f64 = (0..2).map(|a| if lo[a] > 0.0 { lo[a] } else if hi[a] < 0.0 { -hi[a] } else { 0.0 }).map(|t| t * t).sum::<f64>().sqrt();
    let far: f64 = (0..2).map(|a| lo[a].abs().max(hi[a].abs())).map(|t| t * t).sum::<f64>().sqrt();
    let eps = 1e-9 * r_out;
    if (near - r_out).abs() < eps || (far - r_in).abs() < eps {
        None
    } else {
        Some(near <= r_out && far >= r_in)
    }
}

/// Every certain member is found and no certain non-member is.
fn agrees(got: &[[i64; 2]], oracle: &[([i64; 2], Option<bool>)]) -> bool {
    let got: HashSet<[i64; 2]> = got.iter().copied().collect();
    let scanned: HashSet<[i64; 2]> = oracle.iter().map(|(p, _)| *p).collect();
    oracle.iter().all(|(p, v)| v.is_none_or(|inside| inside == got.contains(p))) && got.is_subset(&scanned)
}

fn support(l: usize) -> (f64, f64) {
    if l == 0 {
        (0.0, 2.0)
    } else {
        (2f64.powi(l as i32 - 1), 2f64.powi(l as i32 + 1))
    }
}

#[test]
fn line_sets_match_brute_force_in_the_plane() {
    let dy = build_dyadic(2, 10).unwrap();
    let uni = build_uniform(2).unwrap();
    for rho in [0.0, 0.5, 0.8] {
        for j in 1..=6 {
            let s = 2f64.powf(j as f64 * rho);
            for l in 0..=j + 2 {
                let (r_in, r_out) = support(l);
                let reach = (r_out / s) as i64 + 3;
                let mut brute = Vec::new();
                for a in -reach..=reach {
                    for b in -reach..=reach {
                        let lo = [s * (a as f64 - 1.0), s * (b as f64 - 1.0)];
                        let hi = [s * (a as f64 + 1.0), s * (b as f64 + 1.0)];
                        brute.push(([a, b], meets_annulus_2d(lo, hi, r_in, r_out)));
                    }
                }
                let got = lambda_line(j, l, rho, &dy, &uni).unwrap();
                assert!(agrees(&got, &brute), "j={j} l={l} rho={rho}");
            }
        }
    }
}

#[test]
fn diag_sets_match_brute_force_in_the_plane() {
    let dy = build_dyadic(2, 10).unwrap();
    let rho = 0.5;
    for j in 1..=6 {
        let s = 2f64.powf(j as f64 * rho);
        for k in 0..=2 {
            let half = s * 2f64.powi(k + 2);
            for l in 0..=j + 2 {
                let (r_in, r_out) = support(l);
                let reach = ((r_out + half) / s) as i64 + 3;
                let mut brute = Vec::new();
                for a in -reach..=reach {
                    for b in -reach..=reach {
                        let c = [s * a as f64, s * b as f64];
                        brute.push(([a, b], meets_annulus_2d([c[0] - half, c[1] - half], [c[0] + half, c[1] + half], r_in, r_out)));
                    }
                }
                let got = lambda_diag(j, k as usize, l, rho, &dy).unwrap();
                assert!(agrees(&got, &brute), "j={j} k={k} l={l}");
            }
        }
    }
}

#[test]
fn schur_sums_have_closed_forms() {
    // at m = -(1-ρ)n/2 - ε the row sums are geometric in ℓ and bounded
    for (rho, n) in [(0.0, 1usize), (0.5, 1), (0.5, 2), (0.8, 2)] {
        let m = -(1.0 - rho) * n as f64 / 2.0 - 0.25;
        let j_max = 30;
        let (col, row) = schur_sum_constants(m, rho, n, j_max).unwrap();
        let mut rows = 0f64;
        for j in 1..=j_max {
            let jj = j as f64;
            let knee = (jj * rho).ceil() as usize;
            let flat = (0..=(j + 1).min(knee.saturating_sub(1))).filter(|l| (*l as f64) <= jj * rho).count() as f64;
            let geo: f64 = (0..=j + 1).filter(|l| (*l as f64) > jj * rho).map(|l| 2f64.powf((l as f64 - jj * rho) * n as f64 / 2.0)).sum();
            rows = rows.max((flat + geo) * 2f64.powf(jj * m));
        }
        assert!((row - rows).abs() <= 1e-12 * rows, "{row} vs {rows}");
        let mut cols = 0f64;
        for l in 0..=j_max + 1 {
            let s: f64 = (1..=j_max).map(|j| schur_entry(j, l, m, rho, n)).sum();
            cols = cols.max(s);
        }
        assert_eq!(col, cols);
        assert!(row.is_finite() && row < 64.0);
    }
}

proptest! {
    #[test]
    fn dyadic_partition_of_unity(r in 0.0f64..1e4) {
        let s: f64 = (0..=16).map(|j| psi(j, r)).sum();
        prop_assert!((s - 1.0).abs() < 1e-12);
    }

    #[test]
    fn uniform_partition_of_unity(x in -100.0f64..100.0, y in -100.0f64..100.0) {
        let phi = build_uniform(2).unwrap();
        let (a0, b0) = (x.floor() as i64, y.floor() as i64);
        let mut s = 0.0;
        for a in a0 - 3..=a0 + 3 {
            for b in b0 - 3..=b0 + 3 {
                s += phi.phi(&[x - a as f64, y - b as f64]);
            }
        }
        prop_assert!((s - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dyadic_members_live_on_their_annuli(j in 0usize..12, r in 0.0f64..1e4) {
        let dy = build_dyadic(1, 14).unwrap();
        let (lo, hi): (f64, f64) = dy.support(j);
        if r < lo || r > hi {
            prop_assert_eq!(dy.member_radial(j, r), 0.0);
        }
    }
}

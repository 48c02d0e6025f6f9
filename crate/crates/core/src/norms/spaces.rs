use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::grid::{lp_norm, physical_of, spectrum_of, Coord, Representation, SampledFunction};
use crate::scalar::{from_i64, from_usize, lit, Real};

fn physical<T: Real>(f: &SampledFunction<T>) -> Vec<Complex<T>> {
    match f.representation() {
        Representation::Physical => f.values().to_vec(),
        Representation::Frequency => physical_of(f.grid(), f.values()),
    }
}

/// `φ(x) = e^{-|x|²}`.
pub fn gaussian_mollifier<T: Real>(x: &Coord<T>) -> T {
    (-(x[0] * x[0] + x[1] * x[1])).exp()
}

/// Quadrature of `∫φ` and `∫|φ|` over `[-8, 8]^n`.
fn mollifier_mass<T: Real>(dim: usize, phi: &(dyn Fn(&Coord<T>) -> T + Sync)) -> (T, T) {
    let m = 256usize;
    let h: T = lit(16.0 / m as f64);
    let at = |i: usize| lit::<T>(-8.0) + (from_usize::<T>(i) + lit(0.5)) * h;
    let vol = if dim == 1 { h } else { h * h };
    let (mut s, mut a) = (T::zero(), T::zero());
    for i in 0..m {
        if dim == 1 {
            let v = phi(&[at(i), T::zero()]);
            s = s + v;
            a = a + v.abs();
        } else {
            for k in 0..m {
                let v = phi(&[at(i), at(k)]);
                s = s + v;
                a = a + v.abs();
            }
        }
    }
    (s * vol, a * vol)
}

/// `‖sup_t |φ_t * f|‖_{L^p}` with `t ∈ {2^s dx : s = 0, ..., log₂N}` and `φ_t` periodised.
///
/// Comparable to the Hardy quasinorm on the dyadic t-grid; for `p > 1` it is
/// comparable to the Lebesgue norm.
pub fn hardy_quasinorm<T: Real>(
    f: &SampledFunction<T>,
    p: T,
    phi: &(dyn Fn(&Coord<T>) -> T + Sync),
) -> Result<T> {
    if p.is_nan() || p <= T::zero() {
        return invalid("p must be positive");
    }
    let grid = f.grid();
    let dim = grid.dim();
    let (mass, abs_mass) = mollifier_mass(dim, phi);
    if !(abs_mass > T::zero()) || mass.abs() <= lit::<T>(1e-8) * abs_mass {
        return invalid("mollifier has vanishing integral");
    }
    let fh = spectrum_of(grid, &physical(f));
    let levels = grid.points_per_axis().trailing_zeros() as i32;
    let period = grid.period();
    let images: Vec<i64> = (-3..=3).collect();
    let mut sup = vec![T::zero(); grid.len()];
    for s in 0..=levels {
        let t = grid.dx() * crate::scalar::pow2i(s);
        let tn = if dim == 1 { t } else { t * t };
        let kernel: Vec<Complex<T>> = (0..grid.len())
            .into_par_iter()
            .map(|k| {
                let x = grid.x_point(k);
                let mut acc = T::zero();
                for m0 in &images {
                    let y0 = (x[0] + from_i64::<T>(*m0) * period) / t;
                    if dim == 1 {
                        acc = acc + phi(&[y0, T::zero()]);
                    } else {
                        for m1 in &images {
                            let y1 = (x[1] + from_i64::<T>(*m1) * period) / t;
                            acc = acc + phi(&[y0, y1]);
                        }
                    }
                }
                Complex::new(acc / tn, T::zero())
            })
            .collect();
        let kh = spectrum_of(grid, &kernel);
        let prod: Vec<Complex<T>> = kh.iter().zip(&fh).map(|(a, b)| *a * *b).collect();
        for (m, v) in sup.iter_mut().zip(physical_of(grid, &prod)) {
            *m = m.max(v.norm());
        }
    }
    let maximal: Vec<Complex<T>> = sup.into_iter().map(|v| Complex::new(v, T::zero())).collect();
    lp_norm(grid, &maximal, p)
}

/// Supremum of the mean oscillation over periodic grid-aligned cubes of side
/// `N/2^s` cells for `s = 0, ..., log₂N - 2`, at every lattice position.
pub fn bmo_norm<T: Real>(f: &SampledFunction<T>) -> T {
    let grid = f.grid();
    let v = physical(f);
    let n = grid.points_per_axis();
    let dim = grid.dim();
    let levels = n.trailing_zeros() as usize;
    let mut best = T::zero();
    for s in 0..=levels.saturating_sub(2) {
        let side = n >> s;
        let cells: Vec<usize> = if dim == 1 {
            (0..side).collect()
        } else {
            (0..side).flat_map(|a| (0..side).map(move |b| a * n + b)).collect()
        };
        let count = from_usize::<T>(cells.len());
        let osc = (0..grid.len())
            .into_par_iter()
            .map(|start| {
                let base = grid.axis_indices(start);
                let idx = |c: usize| {
                    if dim == 1 {
                        (base[0] + c) % n
                    } else {
                        ((base[0] + c / n) % n) * n + (base[1] + c % n) % n
                    }
                };
                let mean = cells.iter().fold(Complex::new(T::zero(), T::zero()), |a, c| a + v[idx(*c)]) / count;
                cells.iter().fold(T::zero(), |a, c| a + (v[idx(*c)] - mean).norm()) / count
            })
            .reduce(|| T::zero(), |a, b| a.max(b));
        best = best.max(osc);
    }
    best
}

/// `sup_λ λ |{|f| > λ}|^{1/p}`, scanned over the sampled values.
///
/// At a value `v` the left limit `v·|{|f| ≥ v}|^{1/p}` is attained as `λ ↑ v`.
pub fn weak_quasinorm<T: Real>(f: &SampledFunction<T>, p: T) -> Result<T> {
    if p.is_nan() || p <= T::zero() || p.is_infinite() {
        return invalid("weak quasinorm needs p in (0, ∞)");
    }
    let grid = f.grid();
    let mut mags: Vec<T> = physical(f).iter().map(|z| z.norm()).collect();
    mags.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    let vol = grid.cell_volume();
    let mut best = T::zero();
    let mut i = 0;
    while i < mags.len() {
        let v = mags[i];
        while i < mags.len() && mags[i] == v {
            i += 1;
        }
        best = best.max(v * (vol * from_usize::<T>(i)).powf(p.recip()));
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;

    fn grid(n: usize) -> GridSpec<f64> {
        GridSpec::new(1, n, 8.0).unwrap()
    }

    #[test]
    fn zero_and_degenerate() {
        let g = grid(32);
        let z = SampledFunction::zeros(&g, Representation::Physical);
        assert_eq!(hardy_quasinorm(&z, 2.0, &gaussian_mollifier).unwrap(), 0.0);
        let odd = |x: &Coord<f64>| x[0] * (-x[0] * x[0]).exp();
        assert!(hardy_quasinorm(&z, 2.0, &odd).is_err());
        assert_eq!(bmo_norm(&z), 0.0);
    }

    #[test]
    fn indicator_weak_norm() {
        let g = grid(64);
        let f = SampledFunction::from_real_fn(&g, |x| if x[0] >= 0.0 && x[0] < 1.0 { 1.0 } else { 0.0 });
        assert!((weak_quasinorm(&f, 1.5).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_has_no_oscillation() {
        let g = GridSpec::new(2, 16, 1.0).unwrap();
        let f = SampledFunction::from_real_fn(&g, |_| 3.0);
        assert!(bmo_norm(&f) < 1e-14);
    }
}

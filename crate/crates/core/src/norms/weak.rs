use std::collections::BTreeMap;

use num_complex::Complex;

use crate::error::{invalid, Result};
use crate::grid::{lp_norm, GridSpec, Representation, SampledFunction};
use crate::norms::weak_quasinorm;
use crate::scalar::{from_i64, lit, pow2, Real};
use crate::tolerances;

/// Value bands `f_j = f·1{A2^{(j-1)α} < f ≤ A2^{jα}}` of a nonnegative function.
#[derive(Clone, Debug)]
pub struct WeakPieces<T: Real> {
    grid: GridSpec<T>,
    base: T,
    alpha: T,
    pieces: BTreeMap<i64, Vec<T>>,
}

/// Decay of the pieces predicted from a weak-type constant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeakBound<T: Real> {
    pub theta: T,
    pub beta: T,
    /// `B = C^{1/θ} A^{1-1/θ} 2^{α/θ}`.
    pub b: T,
    /// `max_j ‖f_j‖_r / (B 2^{-jβ})`.
    pub constant: T,
}

/// Output of the recombination step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeakRecombination<T: Real> {
    pub j0: i64,
    /// `C = A 2^{j₀α}`.
    pub c: T,
    /// Weak quasinorm of `Σ f_j`.
    pub measured: T,
    /// `measured / C`.
    pub ratio: T,
}

impl<T: Real> WeakPieces<T> {
    pub fn base(&self) -> T {
        self.base
    }
    pub fn alpha(&self) -> T {
        self.alpha
    }
    pub fn grid(&self) -> &GridSpec<T> {
        &self.grid
    }

    /// `A 2^{jα}`.
    pub fn level(&self, j: i64) -> T {
        level(self.base, self.alpha, j)
    }

    /// Smallest and largest occupied indices.
    pub fn window(&self) -> Option<(i64, i64)> {
        Some((*self.pieces.keys().next()?, *self.pieces.keys().next_back()?))
    }

    pub fn indices(&self) -> impl Iterator<Item = i64> + '_ {
        self.pieces.keys().copied()
    }

    pub fn piece(&self, j: i64) -> Option<&[T]> {
        self.pieces.get(&j).map(|v| v.as_slice())
    }

    pub fn sup_norm(&self, j: i64) -> T {
        self.piece(j).map_or(T::zero(), |v| v.iter().fold(T::zero(), |m, x| m.max(*x)))
    }

    pub fn lr_norm(&self, j: i64, r: T) -> Result<T> {
        match self.piece(j) {
            None => Ok(T::zero()),
            Some(v) => lp_norm(&self.grid, &complexify(v), r),
        }
    }

    /// `Σ_j f_j`.
    pub fn reconstruct(&self) -> Vec<T> {
        let mut out = vec![T::zero(); self.grid.len()];
        for v in self.pieces.values() {
            for (o, x) in out.iter_mut().zip(v) {
                *o = *o + *x;
            }
        }
        out
    }

    /// Compares `‖f_j‖_r` to `B 2^{-jβ}` for a weak-type constant `C` at exponent `p`.
    pub fn bound_check(&self, c: T, p: T, r: T) -> Result<WeakBound<T>> {
        if !(r > T::zero() && r < p && p.is_finite()) || !(c > T::zero()) {
            return invalid("bound check needs 0 < r < p < ∞ and C > 0");
        }
        let theta = r / p;
        let beta = self.alpha * (T::one() - theta) / theta;
        let b = c.powf(theta.recip()) * self.base.powf(T::one() - theta.recip()) * pow2(self.alpha / theta);
        let mut constant = T::zero();
        for j in self.indices() {
            let pred = b * pow2(-from_i64::<T>(j) * beta);
            constant = constant.max(self.lr_norm(j, r)? / pred);
        }
        Ok(WeakBound { theta, beta, b, constant })
    }
}

fn level<T: Real>(a: T, alpha: T, j: i64) -> T {
    a * pow2(from_i64::<T>(j) * alpha)
}

fn complexify<T: Real>(v: &[T]) -> Vec<Complex<T>> {
    v.iter().map(|x| Complex::new(*x, T::zero())).collect()
}

/// Band index of a positive value, using the same arithmetic as [`WeakPieces::level`].
fn band<T: Real>(v: T, a: T, alpha: T) -> i64 {
    let mut j = ((v / a).log2() / alpha).ceil().to_i64().unwrap_or(0);
    while v > level(a, alpha, j) {
        j += 1;
    }
    while v <= level(a, alpha, j - 1) {
        j -= 1;
    }
    j
}

/// Splits a nonnegative real-valued function into value bands.
pub fn weak_decompose<T: Real>(f: &SampledFunction<T>, a: T, alpha: T) -> Result<WeakPieces<T>> {
    if !(a > T::zero() && alpha > T::zero() && a.is_finite() && alpha.is_finite()) {
        return invalid("A and alpha must be positive");
    }
    if f.representation() != Representation::Physical {
        return invalid("weak_decompose expects physical samples");
    }
    let len = f.grid().len();
    let mut pieces: BTreeMap<i64, Vec<T>> = BTreeMap::new();
    for (i, z) in f.values().iter().enumerate() {
        if z.im != T::zero() || z.re < T::zero() || !z.re.is_finite() {
            return invalid("weak_decompose expects finite nonnegative real values");
        }
        if z.re == T::zero() {
            continue;
        }
        let j = band(z.re, a, alpha);
        pieces.entry(j).or_insert_with(|| vec![T::zero(); len])[i] = z.re;
    }
    Ok(WeakPieces { grid: f.grid().clone(), base: a, alpha, pieces })
}

/// Balances `A 2^{j₀α} ≈ B 2^{-j₀β}` and measures the weak quasinorm of `Σ f_j`.
pub fn weak_from_pieces<T: Real>(pieces: &WeakPieces<T>, b: T, beta: T, r: T, p: T) -> Result<WeakRecombination<T>> {
    if !(r > T::zero() && r < p && p.is_finite()) {
        return invalid("weak_from_pieces needs 0 < r < p < ∞");
    }
    if !(b > T::zero() && beta > T::zero()) {
        return invalid("B and beta must be positive");
    }
    let alpha = pieces.alpha;
    if (alpha / (alpha + beta) - r / p).abs() > lit(tolerances::HOLDER) {
        return invalid("exponents must satisfy alpha/(alpha+beta) = r/p");
    }
    let j0 = ((b / pieces.base).log2() / (alpha + beta)).round().to_i64().unwrap_or(0);
    let c = pieces.level(j0);
    let sum = SampledFunction::physical(pieces.grid.clone(), complexify(&pieces.reconstruct()))?;
    let measured = weak_quasinorm(&sum, p)?;
    Ok(WeakRecombination { j0, c, measured, ratio: measured / c })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn samples(values: &[f64]) -> SampledFunction<f64> {
        let g = GridSpec::new(1, values.len(), 1.0).unwrap();
        SampledFunction::physical(g, complexify(values)).unwrap()
    }

    #[test]
    fn constant_is_one_band() {
        let w = weak_decompose(&samples(&[2.5; 8]), 2.5, 0.7).unwrap();
        assert_eq!(w.window(), Some((0, 0)));
    }

    #[test]
    fn two_values() {
        let w = weak_decompose(&samples(&[0.6, 1.9, 0.0, 0.6]), 1.0, 1.0).unwrap();
        assert_eq!(w.indices().collect::<Vec<_>>(), vec![0, 1]);
        assert_eq!(w.piece(0).unwrap(), &[0.6, 0.0, 0.0, 0.6]);
        assert_eq!(w.piece(1).unwrap(), &[0.0, 1.9, 0.0, 0.0]);
    }

    #[test]
    fn band_edges() {
        // exact powers of two sit at the top of their band
        let w = weak_decompose(&samples(&[1.0, 2.0, 4.0, 0.5]), 1.0, 1.0).unwrap();
        assert_eq!(w.indices().collect::<Vec<_>>(), vec![-1, 0, 1, 2]);
    }

    #[test]
    fn balancing() {
        let w = weak_decompose(&samples(&[1.0; 4]), 1.0, 1.0).unwrap();
        let rc = weak_from_pieces(&w, 16.0, 1.0, 1.0, 2.0).unwrap();
        assert_eq!((rc.j0, rc.c), (2, 4.0));
        let rc = weak_from_pieces(&w, 1.0, 1.0, 1.0, 2.0).unwrap();
        assert_eq!((rc.j0, rc.c), (0, 1.0));
        assert!(weak_from_pieces(&w, 1.0, 2.0, 1.0, 2.0).is_err());
    }

    #[test]
    fn rejects_negative() {
        assert!(weak_decompose(&samples(&[1.0, -1.0]), 1.0, 1.0).is_err());
    }
}

//! Periodic grids, sampled functions and the discrete Fourier conventions.
//!
//! A grid of `N` points per axis and period `L` carries the spacing
//! `dx = L/N` and the frequency step `dxi = 2π/L`. Arrays are stored in FFT
//! order: index `k` stands for the signed integer `k` when `k < N/2` and
//! `k - N` otherwise, both in space and in frequency.
//!
//! The forward transform is `f̂(ξ) = dx^n Σ_x e^{-ix·ξ} f(x)` and the inverse
//! is `f(x) = (dxi/2π)^n Σ_ξ e^{ix·ξ} f̂(ξ)`.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::error::{contract, invalid, LabError, Result};
use crate::scalar::{from_i64, from_usize, lit, Real};

/// A point of `R^n`; the second slot is zero when `n = 1`.
pub type Coord<T> = [T; 2];

/// Euclidean length of a point, given its dimension.
#[inline]
pub fn coord_norm<T: Real>(c: &Coord<T>, dim: usize) -> T {
    if dim == 1 {
        c[0].abs()
    } else {
        c[0].hypot(c[1])
    }
}

struct Plans<T: Real> {
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
    roots: Vec<Complex<T>>,
}

/// Uniform periodic grid on the torus `(R/LZ)^n`.
#[derive(Clone)]
pub struct GridSpec<T: Real> {
    dim: usize,
    n: usize,
    period: T,
    plans: Arc<Plans<T>>,
}

impl<T: Real> fmt::Debug for GridSpec<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GridSpec")
            .field("dim", &self.dim)
            .field("points_per_axis", &self.n)
            .field("period", &self.period)
            .finish()
    }
}

impl<T: Real> PartialEq for GridSpec<T> {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.n == other.n && self.period == other.period
    }
}

/// Transform direction for the raw (unscaled) FFT.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// `Σ_k v_k e^{-2πikq/N}`
    Forward,
    /// `Σ_q v_q e^{+2πikq/N}`
    Inverse,
}

impl<T: Real> GridSpec<T> {
    pub fn new(dim: usize, points_per_axis: usize, period: T) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return invalid(format!("dimension must be 1 or 2, got {dim}"));
        }
        if points_per_axis < 2 || !points_per_axis.is_multiple_of(2) {
            return invalid(format!("points per axis must be even and >= 2, got {points_per_axis}"));
        }
        if !(period > T::zero()) || !period.is_finite() {
            return invalid("period must be positive and finite");
        }
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(points_per_axis);
        let inverse = planner.plan_fft_inverse(points_per_axis);
        let two_pi = T::PI() + T::PI();
        let roots = (0..points_per_axis)
            .map(|k| Complex::from_polar(T::one(), two_pi * from_usize::<T>(k) / from_usize(points_per_axis)))
            .collect();
        Ok(Self { dim, n: points_per_axis, period, plans: Arc::new(Plans { forward, inverse, roots }) })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points_per_axis(&self) -> usize {
        self.n
    }

    pub fn period(&self) -> T {
        self.period
    }

    /// Total number of samples `N^n`.
    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dx(&self) -> T {
        self.period / from_usize(self.n)
    }

    pub fn dxi(&self) -> T {
        (T::PI() + T::PI()) / self.period
    }

    /// `dx^n`, the quadrature weight in space.
    pub fn cell_volume(&self) -> T {
        self.dx().powi(self.dim as i32)
    }

    /// `(dxi/2π)^n`, the quadrature weight in frequency.
    pub fn freq_weight(&self) -> T {
        (self.dxi() / (T::PI() + T::PI())).powi(self.dim as i32)
    }

    /// Largest frequency magnitude on one axis, `(N/2)·dxi`.
    pub fn max_freq(&self) -> T {
        from_usize::<T>(self.n / 2) * self.dxi()
    }

    /// Signed integer label of an axis index.
    #[inline]
    pub fn signed(&self, k: usize) -> i64 {
        if k < self.n / 2 {
            k as i64
        } else {
            k as i64 - self.n as i64
        }
    }

    /// Axis index of a signed integer label, taken modulo `N`.
    #[inline]
    pub fn wrap(&self, q: i64) -> usize {
        q.rem_euclid(self.n as i64) as usize
    }

    #[inline]
    pub fn axis_indices(&self, flat: usize) -> [usize; 2] {
        if self.dim == 1 {
            [flat, 0]
        } else {
            [flat / self.n, flat % self.n]
        }
    }

    #[inline]
    pub fn flat(&self, idx: [usize; 2]) -> usize {
        if self.dim == 1 {
            idx[0]
        } else {
            idx[0] * self.n + idx[1]
        }
    }

    /// Signed lattice labels of a flat index.
    #[inline]
    pub fn labels(&self, flat: usize) -> [i64; 2] {
        let [a, b] = self.axis_indices(flat);
        if self.dim == 1 {
            [self.signed(a), 0]
        } else {
            [self.signed(a), self.signed(b)]
        }
    }

    /// Flat index of signed lattice labels (wrapped).
    #[inline]
    pub fn flat_of_labels(&self, q: [i64; 2]) -> usize {
        if self.dim == 1 {
            self.wrap(q[0])
        } else {
            self.wrap(q[0]) * self.n + self.wrap(q[1])
        }
    }

    /// Signed spatial coordinate of a flat index.
    pub fn x_point(&self, flat: usize) -> Coord<T> {
        let q = self.labels(flat);
        [from_i64::<T>(q[0]) * self.dx(), from_i64::<T>(q[1]) * self.dx()]
    }

    /// Frequency of a flat index.
    pub fn freq_point(&self, flat: usize) -> Coord<T> {
        let q = self.labels(flat);
        [from_i64::<T>(q[0]) * self.dxi(), from_i64::<T>(q[1]) * self.dxi()]
    }

    /// Frequency of signed lattice labels.
    pub fn freq_of_labels(&self, q: [i64; 2]) -> Coord<T> {
        [from_i64::<T>(q[0]) * self.dxi(), from_i64::<T>(q[1]) * self.dxi()]
    }

    /// `e^{i x_k · ξ_q}` computed from the root table, exact up to the table entries.
    #[inline]
    pub fn phase(&self, x_flat: usize, q_labels: [i64; 2]) -> Complex<T> {
        let k = self.axis_indices(x_flat);
        let n = self.n as i64;
        let r0 = self.plans.roots[((k[0] as i64 * q_labels[0]).rem_euclid(n)) as usize];
        if self.dim == 1 {
            r0
        } else {
            r0 * self.plans.roots[((k[1] as i64 * q_labels[1]).rem_euclid(n)) as usize]
        }
    }

    /// Table of `e^{2πik/N}`.
    pub fn roots(&self) -> &[Complex<T>] {
        &self.plans.roots
    }

    /// Unscaled in-place FFT over all axes.
    pub fn fft(&self, data: &mut [Complex<T>], direction: Direction) {
        assert_eq!(data.len(), self.len(), "buffer length must equal N^n");
        let plan = match direction {
            Direction::Forward => &self.plans.forward,
            Direction::Inverse => &self.plans.inverse,
        };
        if self.dim == 1 {
            plan.process(data);
            return;
        }
        let n = self.n;
        plan.process(data);
        let mut column = vec![Complex::new(T::zero(), T::zero()); n];
        for c in 0..n {
            for r in 0..n {
                column[r] = data[r * n + c];
            }
            plan.process(&mut column);
            for r in 0..n {
                data[r * n + c] = column[r];
            }
        }
    }

    pub fn check_same(&self, other: &GridSpec<T>) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(LabError::GridMismatch(format!("{self:?} vs {other:?}")))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Representation {
    Physical,
    Frequency,
}

/// Samples of a function on a grid, in space or in frequency.
#[derive(Clone, Debug)]
pub struct SampledFunction<T: Real> {
    grid: GridSpec<T>,
    repr: Representation,
    values: Vec<Complex<T>>,
}

impl<T: Real> SampledFunction<T> {
    pub fn new(grid: GridSpec<T>, repr: Representation, values: Vec<Complex<T>>) -> Result<Self> {
        if values.len() != grid.len() {
            return invalid(format!("expected {} samples, got {}", grid.len(), values.len()));
        }
        Ok(Self { grid, repr, values })
    }

    pub fn physical(grid: GridSpec<T>, values: Vec<Complex<T>>) -> Result<Self> {
        Self::new(grid, Representation::Physical, values)
    }

    pub fn frequency(grid: GridSpec<T>, values: Vec<Complex<T>>) -> Result<Self> {
        Self::new(grid, Representation::Frequency, values)
    }

    pub fn zeros(grid: &GridSpec<T>, repr: Representation) -> Self {
        Self { grid: grid.clone(), repr, values: vec![Complex::new(T::zero(), T::zero()); grid.len()] }
    }

    /// Samples `f` at the grid points.
    pub fn from_fn(grid: &GridSpec<T>, f: impl Fn(&Coord<T>) -> Complex<T>) -> Self {
        let values = (0..grid.len()).map(|k| f(&grid.x_point(k))).collect();
        Self { grid: grid.clone(), repr: Representation::Physical, values }
    }

    pub fn from_real_fn(grid: &GridSpec<T>, f: impl Fn(&Coord<T>) -> T) -> Self {
        Self::from_fn(grid, |x| Complex::new(f(x), T::zero()))
    }

    /// Samples a spectrum at the frequency lattice.
    pub fn spectrum_from_fn(grid: &GridSpec<T>, f: impl Fn(&Coord<T>) -> Complex<T>) -> Self {
        let values = (0..grid.len()).map(|k| f(&grid.freq_point(k))).collect();
        Self { grid: grid.clone(), repr: Representation::Frequency, values }
    }

    pub fn grid(&self) -> &GridSpec<T> {
        &self.grid
    }

    pub fn representation(&self) -> Representation {
        self.repr
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex<T>> {
        self.values
    }

    pub fn scaled(&self, c: Complex<T>) -> Self {
        Self { grid: self.grid.clone(), repr: self.repr, values: self.values.iter().map(|v| *v * c).collect() }
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: Complex<T>, other: &Self, b: Complex<T>) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        if self.repr != other.repr {
            return contract("representations differ");
        }
        let values = self.values.iter().zip(&other.values).map(|(x, y)| *x * a + *y * b).collect();
        Ok(Self { grid: self.grid.clone(), repr: self.repr, values })
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.norm()))
    }

    fn require(&self, repr: Representation) -> Result<()> {
        if self.repr == repr {
            Ok(())
        } else {
            contract(format!("expected {repr:?} representation, got {:?}", self.repr))
        }
    }
}

/// `f̂ = dx^n · FFT(f)`.
pub fn forward_transform<T: Real>(f: &SampledFunction<T>) -> Result<SampledFunction<T>> {
    f.require(Representation::Physical)?;
    let mut values = f.values.clone();
    f.grid.fft(&mut values, Direction::Forward);
    let w = f.grid.cell_volume();
    values.iter_mut().for_each(|v| *v = *v * w);
    Ok(SampledFunction { grid: f.grid.clone(), repr: Representation::Frequency, values })
}

/// `f = (dxi/2π)^n · IFFT(f̂)`, with the unnormalized inverse FFT.
pub fn inverse_transform<T: Real>(s: &SampledFunction<T>) -> Result<SampledFunction<T>> {
    s.require(Representation::Frequency)?;
    let mut values = s.values.clone();
    s.grid.fft(&mut values, Direction::Inverse);
    let w = s.grid.freq_weight();
    values.iter_mut().for_each(|v| *v = *v * w);
    Ok(SampledFunction { grid: s.grid.clone(), repr: Representation::Physical, values })
}

pub(crate) fn spectrum_of<T: Real>(grid: &GridSpec<T>, values: &[Complex<T>]) -> Vec<Complex<T>> {
    let mut out = values.to_vec();
    grid.fft(&mut out, Direction::Forward);
    let w = grid.cell_volume();
    out.iter_mut().for_each(|v| *v = *v * w);
    out
}

pub(crate) fn physical_of<T: Real>(grid: &GridSpec<T>, spectrum: &[Complex<T>]) -> Vec<Complex<T>> {
    let mut out = spectrum.to_vec();
    grid.fft(&mut out, Direction::Inverse);
    let w = grid.freq_weight();
    out.iter_mut().for_each(|v| *v = *v * w);
    out
}

/// Samples a multiplier on the frequency lattice of `grid`.
pub fn multiplier_from_fn<T: Real>(grid: &GridSpec<T>, m: impl Fn(&Coord<T>) -> Complex<T>) -> Vec<Complex<T>> {
    (0..grid.len()).map(|k| m(&grid.freq_point(k))).collect()
}

/// `m(D)f = F^{-1}[m·f̂]`. The result keeps the representation of `f`.
pub fn multiplier_apply<T: Real>(m_values: &[Complex<T>], f: &SampledFunction<T>) -> Result<SampledFunction<T>> {
    if m_values.len() != f.grid.len() {
        return Err(LabError::GridMismatch(format!(
            "multiplier has {} samples, lattice has {}",
            m_values.len(),
            f.grid.len()
        )));
    }
    match f.repr {
        Representation::Frequency => {
            let values = f.values.iter().zip(m_values).map(|(a, b)| *a * *b).collect();
            Ok(SampledFunction { grid: f.grid.clone(), repr: f.repr, values })
        }
        Representation::Physical => {
            let mut values = f.values.clone();
            f.grid.fft(&mut values, Direction::Forward);
            let scale = T::one() / from_usize::<T>(f.grid.len());
            for (v, m) in values.iter_mut().zip(m_values) {
                *v = *v * *m * scale;
            }
            f.grid.fft(&mut values, Direction::Inverse);
            Ok(SampledFunction { grid: f.grid.clone(), repr: f.repr, values })
        }
    }
}

/// Minimum-image distance between two grid points.
pub fn torus_distance<T: Real>(grid: &GridSpec<T>, a: usize, b: usize) -> T {
    let ia = grid.axis_indices(a);
    let ib = grid.axis_indices(b);
    let n = grid.points_per_axis() as i64;
    let mut s = T::zero();
    for axis in 0..grid.dim() {
        let d = (ia[axis] as i64 - ib[axis] as i64).rem_euclid(n);
        let d = d.min(n - d);
        let t = from_i64::<T>(d) * grid.dx();
        s = s + t * t;
    }
    s.sqrt()
}

/// `S_a f(x) = a^n ∫ |f(y)| (1 + a|x-y|)^{-n-1} dy` on the torus.
pub fn peak_average<T: Real>(f: &SampledFunction<T>, a: T) -> Result<SampledFunction<T>> {
    f.require(Representation::Physical)?;
    if !(a > T::zero()) || !a.is_finite() {
        return invalid("peak_average requires a > 0");
    }
    let grid = &f.grid;
    let len = grid.len();
    let n = grid.dim() as i32;
    let weight = a.powi(n) * grid.cell_volume();
    // Kernel indexed by the wrapped offset x - y.
    let kernel: Vec<T> =
        (0..len).map(|d| weight * (T::one() + a * torus_distance(grid, d, 0)).powi(-n - 1)).collect();
    let abs: Vec<T> = f.values.iter().map(|v| v.norm()).collect();
    let np = grid.points_per_axis();
    let values = (0..len)
        .into_par_iter()
        .map(|x| {
            let ix = grid.axis_indices(x);
            let mut s = T::zero();
            for (y, fy) in abs.iter().enumerate() {
                let iy = grid.axis_indices(y);
                let d = grid.flat([(ix[0] + np - iy[0]) % np, (ix[1] + np - iy[1]) % np]);
                s = s + *fy * kernel[d];
            }
            Complex::new(s, T::zero())
        })
        .collect();
    Ok(SampledFunction { grid: grid.clone(), repr: Representation::Physical, values })
}

/// `(dx^n Σ |f|^p)^{1/p}`, or `max |f|` when `p` is infinite.
pub fn lebesgue_norm<T: Real>(f: &SampledFunction<T>, p: T) -> Result<T> {
    f.require(Representation::Physical)?;
    lp_norm(&f.grid, &f.values, p)
}

pub(crate) fn lp_norm<T: Real>(grid: &GridSpec<T>, values: &[Complex<T>], p: T) -> Result<T> {
    if p.is_nan() || p <= T::zero() {
        return invalid("Lebesgue exponent must be positive");
    }
    if p.is_infinite() {
        return Ok(values.iter().fold(T::zero(), |m, v| m.max(v.norm())));
    }
    let two = lit::<T>(2.0);
    let s = if p == two {
        values.iter().fold(T::zero(), |s, v| s + v.norm_sqr())
    } else if p == T::one() {
        values.iter().fold(T::zero(), |s, v| s + v.norm())
    } else {
        values.iter().fold(T::zero(), |s, v| s + v.norm().powf(p))
    };
    Ok((s * grid.cell_volume()).powf(T::one() / p))
}

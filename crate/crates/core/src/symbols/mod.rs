//! Symbols `σ(x, ξ, η)`, their seminorms and the built-in families.

mod cone;
mod kernel;
mod pieces;

use std::sync::Arc;

use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{invalid, out_of_range, Result};
use crate::grid::{coord_norm, Coord, GridSpec};
use crate::partitions::{psi, smooth_step};
use crate::scalar::{from_i64, from_usize, lit, pow2, Real};

pub use cone::{cone_split, rescale_piece, ConePart, ConeRegion, RescaledPiece};
pub use kernel::{kernel_of, weighted_kernel_norm, Derivative, KernelSlice};
pub use pieces::{
    active_nu, band_x, slice_dyadic, slice_uniform, FreqWindow, PieceKind, SupportInfo, SymbolPiece, XRows,
    XSampling,
};

/// A bilinear symbol. Points are `[T; 2]`; only the first `dim()` slots are read.
pub trait Symbol<T: Real>: Send + Sync {
    fn dim(&self) -> usize;
    fn eval(&self, x: &Coord<T>, xi: &Coord<T>, eta: &Coord<T>) -> Complex<T>;
    /// Declared order `m`.
    fn order(&self) -> T;
    /// Declared `ρ`.
    fn rho(&self) -> T;
    /// Declared `δ`; the classes used here have `δ = ρ`.
    fn delta(&self) -> T {
        self.rho()
    }
    fn is_x_independent(&self) -> bool {
        false
    }
    /// Radius `R` with `σ = 0` whenever `|(ξ, η)| > R`, if known.
    fn support_radius(&self) -> Option<T> {
        None
    }
    /// The `η`-phase `φ(η)` of an oscillating symbol, used to build matched test inputs.
    fn eta_phase(&self, _eta: &Coord<T>) -> Option<T> {
        None
    }
    fn name(&self) -> String;
}

pub type SharedSymbol<T> = Arc<dyn Symbol<T>>;

#[inline]
pub(crate) fn bracket<T: Real>(xi: &Coord<T>, eta: &Coord<T>, dim: usize) -> T {
    let a = coord_norm(xi, dim);
    let b = coord_norm(eta, dim);
    (T::one() + a * a + b * b).sqrt()
}

/// `σ ≡ c`.
#[derive(Clone, Debug)]
pub struct Constant<T: Real> {
    pub dim: usize,
    pub value: Complex<T>,
}

impl<T: Real> Constant<T> {
    pub fn new(dim: usize, value: T) -> Self {
        Self { dim, value: Complex::new(value, T::zero()) }
    }
}

impl<T: Real> Symbol<T> for Constant<T> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn eval(&self, _: &Coord<T>, _: &Coord<T>, _: &Coord<T>) -> Complex<T> {
        self.value
    }
    fn order(&self) -> T {
        T::zero()
    }
    fn rho(&self) -> T {
        T::zero()
    }
    fn is_x_independent(&self) -> bool {
        true
    }
    fn support_radius(&self) -> Option<T> {
        if self.value == Complex::new(T::zero(), T::zero()) {
            Some(T::zero())
        } else {
            None
        }
    }
    fn name(&self) -> String {
        format!("constant({})", self.value)
    }
}

/// `(1 + |ξ|² + |η|²)^{m/2}`.
#[derive(Clone, Debug)]
pub struct BesselPotential<T: Real> {
    pub dim: usize,
    pub m: T,
}

impl<T: Real> Symbol<T> for BesselPotential<T> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn eval(&self, _: &Coord<T>, xi: &Coord<T>, eta: &Coord<T>) -> Complex<T> {
        Complex::new(bracket(xi, eta, self.dim).powf(self.m), T::zero())
    }
    fn order(&self) -> T {
        self.m
    }
    fn rho(&self) -> T {
        T::one()
    }
    fn delta(&self) -> T {
        T::zero()
    }
    fn is_x_independent(&self) -> bool {
        true
    }
    fn name(&self) -> String {
        format!("bessel(m={})", self.m)
    }
}

/// Oscillating symbol
/// `⟨ζ⟩^m · e^{iw(ξ,η)φ(η)} · Σ_j Ψ_j(ζ) e^{iκ 2^{jρ} Σ_a sin(ω x_a)}`
/// with `φ(η) = c⟨η⟩^{1-ρ}(1 + a·sin(π log₂⟨η⟩))` and `w = θ(|ξ|/⟨η⟩)`.
///
/// On the support of `w` one has `⟨η⟩ ≈ ⟨ζ⟩`, so each derivative of the
/// phase factor costs `⟨ζ⟩^{-ρ}`. The x-factor oscillates at rate `2^{jρ}`
/// on the `j`-th shell and costs `2^{jρ}` per x-derivative.
#[derive(Clone, Debug)]
pub struct Exotic<T: Real> {
    pub dim: usize,
    pub m: T,
    pub rho: T,
    /// Phase amplitude `c`.
    pub phase: T,
    /// Log-periodic wobble `a` of the phase.
    pub wobble: T,
    /// Amplitude `κ` of the x-modulation; zero makes the symbol x-independent.
    pub kappa: T,
    /// Spatial frequency `ω` of the modulation; keep it in `dxi·Z` for periodicity.
    pub omega: T,
}

impl<T: Real> Exotic<T> {
    /// Defaults tuned so that the phase disperses at desk-scale grids.
    pub fn new(dim: usize, m: T, rho: T) -> Self {
        let (phase, wobble) = Self::default_phase(rho);
        Self { dim, m, rho, phase, wobble, kappa: lit(0.5), omega: T::one() }
    }

    /// The x-independent member (`κ = 0`).
    pub fn multiplier(dim: usize, m: T, rho: T) -> Self {
        Self { kappa: T::zero(), ..Self::new(dim, m, rho) }
    }

    /// `(c, a) = (1, 0.7)`. The wobble keeps `|φ''| ≈ ⟨η⟩^{-1-ρ}` on most of
    /// each octave (also at `ρ = 0`), so matched chirps disperse from the first shells on.
    pub fn default_phase(_rho: T) -> (T, T) {
        (T::one(), lit(0.7))
    }

    pub fn phase_of(&self, eta: &Coord<T>) -> T {
        let b = (T::one() + {
            let r = coord_norm(eta, self.dim);
            r * r
        })
        .sqrt();
        let wob = if self.wobble == T::zero() { T::zero() } else { self.wobble * (T::PI() * b.log2()).sin() };
        self.phase * b.powf(T::one() - self.rho) * (T::one() + wob)
    }

    /// Cone weight `θ(|ξ|/⟨η⟩)`: the phase only acts where `|ξ| ≲ ⟨η⟩`, which
    /// keeps its derivatives within `(1+|ξ|+|η|)^{-ρ}`.
    pub fn phase_weight(&self, xi_norm: T, eta_norm: T) -> T {
        let b = (T::one() + eta_norm * eta_norm).sqrt();
        smooth_step(xi_norm / b)
    }

    fn x_factor(&self, x: &Coord<T>, r: T) -> Complex<T> {
        if self.kappa == T::zero() {
            return Complex::new(T::one(), T::zero());
        }
        let mut s = T::zero();
        for a in x.iter().take(self.dim) {
            s = s + (self.omega * *a).sin();
        }
        let j0 = if r <= T::one() { 0 } else { r.log2().floor().to_usize().unwrap_or(0) };
        let mut acc = Complex::new(T::zero(), T::zero());
        for j in j0..=j0 + 1 {
            let w = psi(j, r);
            if w != T::zero() {
                let lam = self.kappa * pow2(from_usize::<T>(j) * self.rho);
                acc = acc + Complex::from_polar(w, lam * s);
            }
        }
        acc
    }
}

impl<T: Real> Symbol<T> for Exotic<T> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn eval(&self, x: &Coord<T>, xi: &Coord<T>, eta: &Coord<T>) -> Complex<T> {
        let b = bracket(xi, eta, self.dim);
        let a = coord_norm(xi, self.dim);
        let c = coord_norm(eta, self.dim);
        let r = (a * a + c * c).sqrt();
        let amp = b.powf(self.m);
        let w = self.phase_weight(a, c);
        let ph = if w == T::zero() { T::zero() } else { w * self.phase_of(eta) };
        Complex::from_polar(amp, ph) * self.x_factor(x, r)
    }
    fn order(&self) -> T {
        self.m
    }
    fn rho(&self) -> T {
        self.rho
    }
    fn is_x_independent(&self) -> bool {
        self.kappa == T::zero()
    }
    fn eta_phase(&self, eta: &Coord<T>) -> Option<T> {
        Some(self.phase_of(eta))
    }
    fn name(&self) -> String {
        format!(
            "exotic(m={}, rho={}, c={}, a={}, kappa={})",
            self.m, self.rho, self.phase, self.wobble, self.kappa
        )
    }
}

/// Closure-backed symbol.
pub struct FnSymbol<T: Real, F> {
    pub dim: usize,
    pub m: T,
    pub rho: T,
    pub x_independent: bool,
    pub f: F,
}

impl<T, F> FnSymbol<T, F>
where
    T: Real,
    F: Fn(&Coord<T>, &Coord<T>, &Coord<T>) -> Complex<T> + Send + Sync,
{
    pub fn new(dim: usize, m: T, rho: T, x_independent: bool, f: F) -> Self {
        Self { dim, m, rho, x_independent, f }
    }
}

impl<T, F> Symbol<T> for FnSymbol<T, F>
where
    T: Real,
    F: Fn(&Coord<T>, &Coord<T>, &Coord<T>) -> Complex<T> + Send + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }
    fn eval(&self, x: &Coord<T>, xi: &Coord<T>, eta: &Coord<T>) -> Complex<T> {
        (self.f)(x, xi, eta)
    }
    fn order(&self) -> T {
        self.m
    }
    fn rho(&self) -> T {
        self.rho
    }
    fn is_x_independent(&self) -> bool {
        self.x_independent
    }
    fn name(&self) -> String {
        "closure".into()
    }
}

/// Symbol stored on the `(x, ξ, η)` lattice of a grid, looked up by nearest lattice point.
#[derive(Clone, Debug)]
pub struct Tabulated<T: Real> {
    grid: GridSpec<T>,
    m: T,
    rho: T,
    x_independent: bool,
    values: Vec<Complex<T>>,
}

impl<T: Real> Tabulated<T> {
    /// `values` is laid out `[x][ξ][η]` over flat grid indices; a single x row when x-independent.
    pub fn new(grid: GridSpec<T>, m: T, rho: T, x_independent: bool, values: Vec<Complex<T>>) -> Result<Self> {
        let rows = if x_independent { 1 } else { grid.len() };
        if values.len() != rows * grid.len() * grid.len() {
            return invalid("tabulated symbol has the wrong number of values");
        }
        Ok(Self { grid, m, rho, x_independent, values })
    }

    /// Random symbol `⟨ζ⟩^m Σ_{|k|≤band} c_k(ξ,η) e^{ik·x dxi}` with Gaussian coefficients.
    pub fn random(grid: &GridSpec<T>, m: T, rho: T, x_independent: bool, band: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let len = grid.len();
        let modes: Vec<[i64; 2]> = if x_independent {
            vec![[0, 0]]
        } else {
            let b = band as i64;
            let mut v = Vec::new();
            for a in -b..=b {
                if grid.dim() == 1 {
                    v.push([a, 0]);
                } else {
                    for c in -b..=b {
                        v.push([a, c]);
                    }
                }
            }
            v
        };
        let mut gauss = || -> T { lit(StandardNormal.sample(&mut rng)) };
        let mut coeffs = Vec::with_capacity(len * len * modes.len());
        for _ in 0..len * len * modes.len() {
            let re = gauss();
            let im = gauss();
            coeffs.push(Complex::new(re, im));
        }
        let rows = if x_independent { 1 } else { len };
        let mut values = vec![Complex::new(T::zero(), T::zero()); rows * len * len];
        for row in 0..rows {
            for a in 0..len {
                for b in 0..len {
                    let env = bracket(&grid.freq_point(a), &grid.freq_point(b), grid.dim()).powf(m);
                    let base = (a * len + b) * modes.len();
                    let mut s = Complex::new(T::zero(), T::zero());
                    for (mi, mode) in modes.iter().enumerate() {
                        let w = T::one() / (T::one() + from_i64::<T>(mode[0].abs() + mode[1].abs()));
                        s = s + coeffs[base + mi] * grid.phase(row, *mode) * w;
                    }
                    values[(row * len + a) * len + b] = s * env;
                }
            }
        }
        Self { grid: grid.clone(), m, rho, x_independent, values }
    }

    pub fn grid(&self) -> &GridSpec<T> {
        &self.grid
    }

    fn index(&self, x: &Coord<T>, xi: &Coord<T>, eta: &Coord<T>) -> [usize; 3] {
        let g = &self.grid;
        let snap = |v: T, step: T| (v / step).round().to_i64().unwrap_or(0);
        let xr = if self.x_independent {
            0
        } else {
            g.flat_of_labels([snap(x[0], g.dx()), snap(x[1], g.dx())])
        };
        let a = g.flat_of_labels([snap(xi[0], g.dxi()), snap(xi[1], g.dxi())]);
        let b = g.flat_of_labels([snap(eta[0], g.dxi()), snap(eta[1], g.dxi())]);
        [xr, a, b]
    }

    /// Value at flat lattice indices.
    pub fn at(&self, x: usize, xi: usize, eta: usize) -> Complex<T> {
        let len = self.grid.len();
        let row = if self.x_independent { 0 } else { x };
        self.values[(row * len + xi) * len + eta]
    }
}

impl<T: Real> Symbol<T> for Tabulated<T> {
    fn dim(&self) -> usize {
        self.grid.dim()
    }
    fn eval(&self, x: &Coord<T>, xi: &Coord<T>, eta: &Coord<T>) -> Complex<T> {
        let [r, a, b] = self.index(x, xi, eta);
        self.at(r, a, b)
    }
    fn order(&self) -> T {
        self.m
    }
    fn rho(&self) -> T {
        self.rho
    }
    fn is_x_independent(&self) -> bool {
        self.x_independent
    }
    fn name(&self) -> String {
        format!("tabulated(m={}, rho={})", self.m, self.rho)
    }
}

/// Multi-index with at most two nonzero slots; orders above 2 per slot are rejected.
pub type MultiIndex = [usize; 2];

fn order_of(a: &MultiIndex, dim: usize) -> usize {
    a.iter().take(dim).sum()
}

/// Lattice points at which [`seminorm`] samples a symbol.
#[derive(Clone, Debug)]
pub struct SampleBox<T: Real> {
    pub grid: GridSpec<T>,
    /// Every `x_stride`-th grid point along each axis is sampled.
    pub x_stride: usize,
    /// Frequencies with `max_a |ξ_a|, max_a |η_a| ≤ freq_radius` are sampled.
    pub freq_radius: T,
}

fn stencil<T: Real>(order: usize, h: T) -> Vec<(i64, T)> {
    match order {
        0 => vec![(0, T::one())],
        1 => vec![(-1, -T::one() / (h + h)), (1, T::one() / (h + h))],
        _ => {
            let w = T::one() / (h * h);
            vec![(-1, w), (0, -(w + w)), (1, w)]
        }
    }
}

/// `sup |∂^α_x ∂^β_ξ ∂^γ_η σ| (1+|ξ|+|η|)^{-(m + δ|α| - ρ(|β|+|γ|))}` over the sample box,
/// with second-order central differences of step one lattice cell.
pub fn seminorm<T: Real>(
    sigma: &dyn Symbol<T>,
    alpha: MultiIndex,
    beta: MultiIndex,
    gamma: MultiIndex,
    sample: &SampleBox<T>,
) -> Result<T> {
    let dim = sigma.dim();
    let grid = &sample.grid;
    if grid.dim() != dim {
        return invalid("sample box grid dimension differs from the symbol");
    }
    let slots = [alpha, beta, gamma];
    if slots.iter().any(|s| s.iter().any(|o| *o > 2)) {
        return invalid("derivative orders are limited to 2 per variable");
    }
    let total: usize = slots.iter().map(|s| order_of(s, dim)).sum();
    if total > 4 {
        return invalid("total derivative order is limited to 4");
    }
    let radius_cells = (sample.freq_radius / grid.dxi()).floor().to_i64().unwrap_or(i64::MAX);
    if radius_cells + 1 > (grid.points_per_axis() / 2) as i64 - 1 {
        return out_of_range("sample box exceeds the grid frequency range");
    }
    let exponent = sigma.order() + sigma.delta() * from_usize::<T>(order_of(&alpha, dim))
        - sigma.rho() * from_usize::<T>(order_of(&beta, dim) + order_of(&gamma, dim));
    // Product stencil over the 3·dim scalar coordinates.
    let mut taps: Vec<([i64; 6], T)> = vec![([0; 6], T::one())];
    for (slot, idx) in slots.iter().enumerate() {
        let h = if slot == 0 { grid.dx() } else { grid.dxi() };
        for (axis, order) in idx.iter().enumerate().take(dim) {
            let mut next = Vec::new();
            for (off, w) in &taps {
                for (d, sw) in stencil(*order, h) {
                    let mut o = *off;
                    o[slot * 2 + axis] = d;
                    next.push((o, *w * sw));
                }
            }
            taps = next;
        }
    }
    let n = grid.points_per_axis();
    let stride = sample.x_stride.max(1);
    let xs: Vec<[i64; 2]> = if dim == 1 {
        (0..n).step_by(stride).map(|k| [grid.signed(k), 0]).collect()
    } else {
        let mut v = Vec::new();
        for a in (0..n).step_by(stride) {
            for b in (0..n).step_by(stride) {
                v.push([grid.signed(a), grid.signed(b)]);
            }
        }
        v
    };
    let fr: Vec<[i64; 2]> = {
        let r = radius_cells;
        let mut v = Vec::new();
        for a in -r..=r {
            if dim == 1 {
                v.push([a, 0]);
            } else {
                for b in -r..=r {
                    v.push([a, b]);
                }
            }
        }
        v
    };
    let dx = grid.dx();
    let dxi = grid.dxi();
    let mut best = T::zero();
    for xq in &xs {
        for a in &fr {
            for b in &fr {
                let mut acc = Complex::new(T::zero(), T::zero());
                for (off, w) in &taps {
                    let x = [from_i64::<T>(xq[0] + off[0]) * dx, from_i64::<T>(xq[1] + off[1]) * dx];
                    let xi = [from_i64::<T>(a[0] + off[2]) * dxi, from_i64::<T>(a[1] + off[3]) * dxi];
                    let eta = [from_i64::<T>(b[0] + off[4]) * dxi, from_i64::<T>(b[1] + off[5]) * dxi];
                    acc = acc + sigma.eval(&x, &xi, &eta) * *w;
                }
                let xi = grid.freq_of_labels(*a);
                let eta = grid.freq_of_labels(*b);
                let weight = T::one() + coord_norm(&xi, dim) + coord_norm(&eta, dim);
                best = best.max(acc.norm() * weight.powf(-exponent));
            }
        }
    }
    Ok(best)
}

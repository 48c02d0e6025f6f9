//! Discrete bilinear operators
//! `T(f,g)(x) = (dxi/2π)^{2n} Σ_{ξ,η} e^{ix·(ξ+η)} σ(x,ξ,η) f̂(ξ) ĝ(η)`,
//! their transposes and the trilinear form `dx^n Σ_x T(f,g)(x) h(x)`.
//!
//! The pairing is the plain (unconjugated) product, so that
//! `⟨T(f,g), h⟩ = ⟨T^{*1}(h,g), f⟩ = ⟨T^{*2}(f,h), g⟩`.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{contract, invalid, Result};
use crate::grid::{physical_of, spectrum_of, Direction, GridSpec, Representation, SampledFunction};
use crate::partitions::{Lattice, UniformFamily};
use crate::scalar::{from_i64, from_usize, lit, pow2, pow2i, Real};
use crate::symbols::{FreqWindow, PieceKind, Symbol, SymbolPiece, XRows};
use crate::tolerances;

type C<T> = Complex<T>;
/// Phases, point and output weight for one grid point x.
type Spectrum<T> = Vec<C<T>>;
type Row<T> = (Vec<C<T>>, [T; 2], C<T>);

#[inline]
fn czero<T: Real>() -> C<T> {
    Complex::new(T::zero(), T::zero())
}

/// Evaluation strategy used for a bilinear application.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EvalPath {
    Direct,
    Fast,
    Tabulated,
}

/// A discrete bilinear operator acting on physical samples.
pub trait BilinearOperator<T: Real>: Sync {
    fn grid(&self) -> &GridSpec<T>;
    fn path(&self) -> EvalPath;
    /// `T(f, g)`.
    fn apply(&self, f: &[C<T>], g: &[C<T>]) -> Vec<C<T>>;
    /// `T^{*1}(h, g)`, characterised by `⟨T(f,g),h⟩ = ⟨T^{*1}(h,g),f⟩`.
    fn transpose1(&self, h: &[C<T>], g: &[C<T>]) -> Vec<C<T>>;
    /// `T^{*2}(f, h)`, characterised by `⟨T(f,g),h⟩ = ⟨T^{*2}(f,h),g⟩`.
    fn transpose2(&self, f: &[C<T>], h: &[C<T>]) -> Vec<C<T>>;
}

/// Plain pairing `dx^n Σ u v`.
pub fn pairing<T: Real>(grid: &GridSpec<T>, u: &[C<T>], v: &[C<T>]) -> C<T> {
    u.iter().zip(v).fold(czero(), |s, (a, b)| s + *a * *b) * grid.cell_volume()
}

/// Raw `Σ_x h(x) e^{ix·ξ}` on the full lattice.
fn raw_inverse<T: Real>(grid: &GridSpec<T>, h: &[C<T>]) -> Vec<C<T>> {
    let mut v = h.to_vec();
    grid.fft(&mut v, Direction::Inverse);
    v
}

/// `dx^n W² Σ_ξ e^{-iy·ξ} c(ξ)` for `c` given on the full lattice.
fn finish_transpose<T: Real>(grid: &GridSpec<T>, mut c: Vec<C<T>>) -> Vec<C<T>> {
    grid.fft(&mut c, Direction::Forward);
    let w = grid.cell_volume() * grid.freq_weight() * grid.freq_weight();
    c.iter_mut().for_each(|v| *v = *v * w);
    c
}

fn add_labels(a: [i64; 2], b: [i64; 2]) -> [i64; 2] {
    [a[0] + b[0], a[1] + b[1]]
}

/// Lattice points to sum over, optionally restricted to a box of radius `R`.
fn lattice_points<T: Real>(grid: &GridSpec<T>, radius: Option<T>) -> Vec<usize> {
    (0..grid.len())
        .filter(|q| match radius {
            None => true,
            Some(r) => {
                let f = grid.freq_point(*q);
                f[0].abs() <= r && f[1].abs() <= r
            }
        })
        .collect()
}

/// Lazy evaluation of `σ` at every `(x, ξ, η)`.
pub struct DirectOperator<'a, T: Real> {
    sigma: &'a dyn Symbol<T>,
    grid: GridSpec<T>,
    freqs: Vec<usize>,
    labels: Vec<[i64; 2]>,
    points: Vec<[T; 2]>,
}

impl<'a, T: Real> DirectOperator<'a, T> {
    pub fn new(sigma: &'a dyn Symbol<T>, grid: &GridSpec<T>) -> Result<Self> {
        if sigma.dim() != grid.dim() {
            return invalid("symbol and grid dimensions differ");
        }
        let freqs = lattice_points(grid, sigma.support_radius());
        let labels = freqs.iter().map(|q| grid.labels(*q)).collect();
        let points = freqs.iter().map(|q| grid.freq_point(*q)).collect();
        Ok(Self { sigma, grid: grid.clone(), freqs, labels, points })
    }

    fn phases(&self, x: usize) -> Vec<C<T>> {
        self.labels.iter().map(|q| self.grid.phase(x, *q)).collect()
    }
}

impl<T: Real> BilinearOperator<T> for DirectOperator<'_, T> {
    fn grid(&self) -> &GridSpec<T> {
        &self.grid
    }
    fn path(&self) -> EvalPath {
        EvalPath::Direct
    }

    fn apply(&self, f: &[C<T>], g: &[C<T>]) -> Vec<C<T>> {
        let grid = &self.grid;
        let fh = spectrum_of(grid, f);
        let gh = spectrum_of(grid, g);
        let fs: Vec<C<T>> = self.freqs.iter().map(|q| fh[*q]).collect();
        let gs: Vec<C<T>> = self.freqs.iter().map(|q| gh[*q]).collect();
        let w2 = grid.freq_weight() * grid.freq_weight();
        (0..grid.len())
            .into_par_iter()
            .map(|x| {
                let xp = grid.x_point(x);
                let e = self.phases(x);
                let eg: Vec<C<T>> = e.iter().zip(&gs).map(|(a, b)| *a * *b).collect();
                let mut acc = czero();
                for (a, fa) in fs.iter().enumerate() {
                    if *fa == czero() {
                        continue;
                    }
                    let mut inner = czero();
                    for (b, gb) in eg.iter().enumerate() {
                        if *gb != czero() {
                            inner = inner + self.sigma.eval(&xp, &self.points[a], &self.points[b]) * *gb;
                        }
                    }
                    acc = acc + e[a] * *fa * inner;
                }
                acc * w2
            })
            .collect()
    }

    fn transpose1(&self, h: &[C<T>], g: &[C<T>]) -> Vec<C<T>> {
        let grid = &self.grid;
        let gh = spectrum_of(grid, g);
        let gs: Vec<C<T>> = self.freqs.iter().map(|q| gh[*q]).collect();
        let rows: Vec<Row<T>> =
            (0..grid.len()).map(|x| (self.phases(x), grid.x_point(x), h[x])).collect();
        let c: Vec<C<T>> = (0..self.freqs.len())
            .into_par_iter()
            .map(|a| {
                let mut acc = czero();
                for (e, xp, hx) in &rows {
                    if *hx == czero() {
                        continue;
                    }
                    let mut inner = czero();
                    for (b, gb) in gs.iter().enumerate() {
                        if *gb != czero() {
                            inner = inner + e[b] * self.sigma.eval(xp, &self.points[a], &self.points[b]) * *gb;
                        }
                    }
                    acc = acc + *hx * e[a] * inner;
                }
                acc
            })
            .collect();
        let mut full = vec![czero(); grid.len()];
        for (a, q) in self.freqs.iter().enumerate() {
            full[*q] = c[a];
        }
        finish_transpose(grid, full)
    }

    fn transpose2(&self, f: &[C<T>], h: &[C<T>]) -> Vec<C<T>> {
        let grid = &self.grid;
        let fh = spectrum_of(grid, f);
        let fs: Vec<C<T>> = self.freqs.iter().map(|q| fh[*q]).collect();
        let rows: Vec<Row<T>> =
            (0..grid.len()).map(|x| (self.phases(x), grid.x_point(x), h[x])).collect();
        let d: Vec<C<T>> = (0..self.freqs.len())
            .into_par_iter()
            .map(|b| {
                let mut acc = czero();
                for (e, xp, hx) in &rows {
                    if *hx == czero() {
                        continue;
                    }
                    let mut inner = czero();
                    for (a, fa) in fs.iter().enumerate() {
                        if *fa != czero() {
                            inner = inner + e[a] * self.sigma.eval(xp, &self.points[a], &self.points[b]) * *fa;
                        }
                    }
                    acc = acc + *hx * e[b] * inner;
                }
                acc
            })
            .collect();
        let mut full = vec![czero(); grid.len()];
        for (b, q) in self.freqs.iter().enumerate() {
            full[*q] = d[b];
        }
        finish_transpose(grid, full)
    }
}

/// Tables above this many entries are evaluated lazily on the fast path.
const FAST_TABLE_LIMIT: usize = 1 << 22;

/// Fast path for x-independent symbols: the double sum collapses onto
/// `ζ = ξ + η`, followed by one inverse transform.
pub struct FastOperator<'a, T: Real> {
    sigma: &'a dyn Symbol<T>,
    grid: GridSpec<T>,
    freqs: Vec<usize>,
    labels: Vec<[i64; 2]>,
    points: Vec<[T; 2]>,
    table: Option<Vec<C<T>>>,
}

/// Spot-checks that `σ` does not depend on `x`.
pub fn check_x_independent<T: Real>(sigma: &dyn Symbol<T>, grid: &GridSpec<T>, seed: u64) -> Result<()> {
    if !sigma.is_x_independent() {
        return contract(format!("{} is not declared x-independent", sigma.name()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let len = grid.len();
    let radius = sigma.support_radius();
    for _ in 0..16 {
        let xi = grid.freq_point(rng.random_range(0..len));
        let eta = grid.freq_point(rng.random_range(0..len));
        if let Some(r) = radius {
            if xi[0].abs().max(xi[1].abs()) > r || eta[0].abs().max(eta[1].abs()) > r {
                continue;
            }
        }
        let x = grid.x_point(rng.random_range(0..len));
        let a = sigma.eval(&[T::zero(), T::zero()], &xi, &eta);
        let b = sigma.eval(&x, &xi, &eta);
        let tol = lit::<T>(tolerances::X_INDEPENDENCE) * (T::one() + a.norm());
        if (a - b).norm() > tol {
            return contract(format!("{} depends on x", sigma.name()));
        }
    }
    Ok(())
}

impl<'a, T: Real> FastOperator<'a, T> {
    pub fn new(sigma: &'a dyn Symbol<T>, grid: &GridSpec<T>) -> Result<Self> {
        if sigma.dim() != grid.dim() {
            return invalid("symbol and grid dimensions differ");
        }
        check_x_independent(sigma, grid, 0x0f_a57)?;
        let freqs = lattice_points(grid, sigma.support_radius());
        let labels: Vec<[i64; 2]> = freqs.iter().map(|q| grid.labels(*q)).collect();
        let points: Vec<[T; 2]> = freqs.iter().map(|q| grid.freq_point(*q)).collect();
        let origin = [T::zero(), T::zero()];
        let table = if freqs.len() * freqs.len() <= FAST_TABLE_LIMIT {
            Some(
                points
                    .par_iter()
                    .flat_map_iter(|a| points.iter().map(|b| sigma.eval(&origin, a, b)).collect::<Vec<_>>())
                    .collect(),
            )
        } else {
            None
        };
        Ok(Self { sigma, grid: grid.clone(), freqs, labels, points, table })
    }

    #[inline]
    fn sigma_at(&self, a: usize, b: usize) -> C<T> {
        match &self.table {
            Some(t) => t[a * self.freqs.len() + b],
            None => self.sigma.eval(&[T::zero(), T::zero()], &self.points[a], &self.points[b]),
        }
    }

    /// `Σ_b σ(a,b) u[b] H[a+b]` or the mirrored sum, per frequency.
    fn contract_with(&self, u: &[C<T>], hh: &[C<T>], first: bool) -> Vec<C<T>> {
        let grid = &self.grid;
        let m = self.freqs.len();
        let us: Vec<C<T>> = self.freqs.iter().map(|q| u[*q]).collect();
        let c: Vec<C<T>> = (0..m)
            .into_par_iter()
            .map(|a| {
                let mut acc = czero();
                for (b, ub) in us.iter().enumerate() {
                    if *ub == czero() {
                        continue;
                    }
                    let s = if first { self.sigma_at(a, b) } else { self.sigma_at(b, a) };
                    let q = grid.flat_of_labels(add_labels(self.labels[a], self.labels[b]));
                    acc = acc + s * *ub * hh[q];
                }
                acc
            })
            .collect();
        let mut full = vec![czero(); grid.len()];
        for (a, q) in self.freqs.iter().enumerate() {
            full[*q] = c[a];
        }
        full
    }
}

impl<T: Real> BilinearOperator<T> for FastOperator<'_, T> {
    fn grid(&self) -> &GridSpec<T> {
        &self.grid
    }
    fn path(&self) -> EvalPath {
        EvalPath::Fast
    }

    fn apply(&self, f: &[C<T>], g: &[C<T>]) -> Vec<C<T>> {
        let grid = &self.grid;
        let fh = spectrum_of(grid, f);
        let gh = spectrum_of(grid, g);
        let m = self.freqs.len();
        let fs: Vec<C<T>> = self.freqs.iter().map(|q| fh[*q]).collect();
        let gs: Vec<C<T>> = self.freqs.iter().map(|q| gh[*q]).collect();
        // Rows are reduced independently and then merged in index order.
        let partial: Vec<Vec<(usize, C<T>)>> = (0..m)
            .into_par_iter()
            .map(|a| {
                if fs[a] == czero() {
                    return Vec::new();
                }
                let mut out = Vec::with_capacity(m);
                for (b, gb) in gs.iter().enumerate() {
                    if *gb != czero() {
                        let q = grid.flat_of_labels(add_labels(self.labels[a], self.labels[b]));
                        out.push((q, self.sigma_at(a, b) * fs[a] * *gb));
                    }
                }
                out
            })
            .collect();
        let mut v = vec![czero(); grid.len()];
        for row in partial {
            for (q, z) in row {
                v[q] = v[q] + z;
            }
        }
        let w = grid.freq_weight();
        physical_of(grid, &v).into_iter().map(|z| z * w).collect()
    }

    fn transpose1(&self, h: &[C<T>], g: &[C<T>]) -> Vec<C<T>> {
        let gh = spectrum_of(&self.grid, g);
        let hh = raw_inverse(&self.grid, h);
        finish_transpose(&self.grid, self.contract_with(&gh, &hh, true))
    }

    fn transpose2(&self, f: &[C<T>], h: &[C<T>]) -> Vec<C<T>> {
        let fh = spectrum_of(&self.grid, f);
        let hh = raw_inverse(&self.grid, h);
        finish_transpose(&self.grid, self.contract_with(&fh, &hh, false))
    }
}

/// Operator of a tabulated piece; the piece must cover every x or be x-independent.
pub struct PieceOperator<'a, T: Real> {
    piece: &'a SymbolPiece<T>,
    xi_labels: Vec<[i64; 2]>,
    eta_labels: Vec<[i64; 2]>,
    xi_flat: Vec<usize>,
    eta_flat: Vec<usize>,
}

impl<'a, T: Real> PieceOperator<'a, T> {
    pub fn new(piece: &'a SymbolPiece<T>) -> Result<Self> {
        if !piece.covers_all_x() {
            return contract("operator evaluation needs a piece tabulated at every x");
        }
        let g = piece.grid();
        let xi_labels: Vec<[i64; 2]> = piece.xi_window().points().collect();
        let eta_labels: Vec<[i64; 2]> = piece.eta_window().points().collect();
        let xi_flat = xi_labels.iter().map(|q| g.flat_of_labels(*q)).collect();
        let eta_flat = eta_labels.iter().map(|q| g.flat_of_labels(*q)).collect();
        Ok(Self { piece, xi_labels, eta_labels, xi_flat, eta_flat })
    }

    fn row_for(&self, x: usize) -> usize {
        if self.piece.is_x_independent() {
            0
        } else {
            x
        }
    }

    /// Sums over the `(ξ, η)` window at one x with the `ξ`-factor `u` and `η`-factor `v`.
    fn window_sum(&self, row: usize, u: &[C<T>], v: &[C<T>]) -> C<T> {
        let vals = self.piece.row(row);
        let ew = self.eta_labels.len();
        let mut acc = czero();
        for (a, ua) in u.iter().enumerate() {
            if *ua == czero() {
                continue;
            }
            let r = &vals[a * ew..(a + 1) * ew];
            let mut inner = czero();
            for (s, vb) in r.iter().zip(v) {
                inner = inner + *s * *vb;
            }
            acc = acc + *ua * inner;
        }
        acc
    }

    fn transpose_generic(&self, h: &[C<T>], u: &[C<T>], first: bool) -> Vec<C<T>> {
        let g = self.piece.grid();
        let (own_labels, own_flat, other_labels, other_flat) = if first {
            (&self.xi_labels, &self.xi_flat, &self.eta_labels, &self.eta_flat)
        } else {
            (&self.eta_labels, &self.eta_flat, &self.xi_labels, &self.xi_flat)
        };
        let us: Vec<C<T>> = other_flat.iter().map(|q| u[*q]).collect();
        let ew = self.eta_labels.len();
        let idx = |own: usize, other: usize| if first { own * ew + other } else { other * ew + own };
        let c: Vec<C<T>> = if self.piece.is_x_independent() {
            let hh = raw_inverse(g, h);
            let vals = self.piece.row(0);
            (0..own_labels.len())
                .into_par_iter()
                .map(|a| {
                    let mut acc = czero();
                    for (b, ub) in us.iter().enumerate() {
                        if *ub != czero() {
                            let q = g.flat_of_labels(add_labels(own_labels[a], other_labels[b]));
                            acc = acc + vals[idx(a, b)] * *ub * hh[q];
                        }
                    }
                    acc
                })
                .collect()
        } else {
            (0..own_labels.len())
                .into_par_iter()
                .map(|a| {
                    let mut acc = czero();
                    for (x, hx) in h.iter().enumerate() {
                        if *hx == czero() {
                            continue;
                        }
                        let vals = self.piece.row(x);
                        let mut inner = czero();
                        for (b, ub) in us.iter().enumerate() {
                            if *ub != czero() {
                                inner = inner + g.phase(x, other_labels[b]) * vals[idx(a, b)] * *ub;
                            }
                        }
                        acc = acc + *hx * g.phase(x, own_labels[a]) * inner;
                    }
                    acc
                })
                .collect()
        };
        let mut full = vec![czero(); g.len()];
        for (a, q) in own_flat.iter().enumerate() {
            full[*q] = full[*q] + c[a];
        }
        finish_transpose(g, full)
    }
}

impl<T: Real> BilinearOperator<T> for PieceOperator<'_, T> {
    fn grid(&self) -> &GridSpec<T> {
        self.piece.grid()
    }
    fn path(&self) -> EvalPath {
        EvalPath::Tabulated
    }

    fn apply(&self, f: &[C<T>], g: &[C<T>]) -> Vec<C<T>> {
        let grid = self.piece.grid();
        if self.piece.row_len() == 0 {
            return vec![czero(); grid.len()];
        }
        let fh = spectrum_of(grid, f);
        let gh = spectrum_of(grid, g);
        let fs: Vec<C<T>> = self.xi_flat.iter().map(|q| fh[*q]).collect();
        let gs: Vec<C<T>> = self.eta_flat.iter().map(|q| gh[*q]).collect();
        let w2 = grid.freq_weight() * grid.freq_weight();
        if self.piece.is_x_independent() {
            let vals = self.piece.row(0);
            let ew = gs.len();
            let mut v = vec![czero(); grid.len()];
            for (a, fa) in fs.iter().enumerate() {
                if *fa == czero() {
                    continue;
                }
                for (b, gb) in gs.iter().enumerate() {
                    let q = grid.flat_of_labels(add_labels(self.xi_labels[a], self.eta_labels[b]));
                    v[q] = v[q] + vals[a * ew + b] * *fa * *gb;
                }
            }
            let w = grid.freq_weight();
            return physical_of(grid, &v).into_iter().map(|z| z * w).collect();
        }
        (0..grid.len())
            .into_par_iter()
            .map(|x| {
                let u: Vec<C<T>> = self.xi_labels.iter().zip(&fs).map(|(q, a)| grid.phase(x, *q) * *a).collect();
                let v: Vec<C<T>> = self.eta_labels.iter().zip(&gs).map(|(q, b)| grid.phase(x, *q) * *b).collect();
                self.window_sum(self.row_for(x), &u, &v) * w2
            })
            .collect()
    }

    fn transpose1(&self, h: &[C<T>], g: &[C<T>]) -> Vec<C<T>> {
        let grid = self.piece.grid();
        if self.piece.row_len() == 0 {
            return vec![czero(); grid.len()];
        }
        let gh = spectrum_of(grid, g);
        self.transpose_generic(h, &gh, true)
    }

    fn transpose2(&self, f: &[C<T>], h: &[C<T>]) -> Vec<C<T>> {
        let grid = self.piece.grid();
        if self.piece.row_len() == 0 {
            return vec![czero(); grid.len()];
        }
        let fh = spectrum_of(grid, f);
        self.transpose_generic(h, &fh, false)
    }
}

/// A symbol given analytically or as a tabulated piece.
#[derive(Clone, Copy)]
pub enum SymbolRef<'a, T: Real> {
    Analytic(&'a dyn Symbol<T>),
    Piece(&'a SymbolPiece<T>),
}

impl<'a, T: Real> From<&'a SymbolPiece<T>> for SymbolRef<'a, T> {
    fn from(p: &'a SymbolPiece<T>) -> Self {
        SymbolRef::Piece(p)
    }
}

/// Result of a bilinear application with the path that produced it.
#[derive(Clone, Debug)]
pub struct BilinearApplication<T: Real> {
    pub output: SampledFunction<T>,
    pub path: EvalPath,
}

fn physical_inputs<'a, T: Real>(
    f: &'a SampledFunction<T>,
    g: &'a SampledFunction<T>,
) -> Result<(GridSpec<T>, Spectrum<T>, Spectrum<T>)> {
    f.grid().check_same(g.grid())?;
    let to_phys = |u: &SampledFunction<T>| match u.representation() {
        Representation::Physical => u.values().to_vec(),
        Representation::Frequency => physical_of(u.grid(), u.values()),
    };
    Ok((f.grid().clone(), to_phys(f), to_phys(g)))
}

fn with_operator<T: Real, R>(
    sigma: SymbolRef<'_, T>,
    grid: &GridSpec<T>,
    fast: bool,
    run: impl FnOnce(&dyn BilinearOperator<T>) -> R,
) -> Result<R> {
    match sigma {
        SymbolRef::Analytic(s) if fast => Ok(run(&FastOperator::new(s, grid)?)),
        SymbolRef::Analytic(s) => Ok(run(&DirectOperator::new(s, grid)?)),
        SymbolRef::Piece(p) => {
            grid.check_same(p.grid())?;
            Ok(run(&PieceOperator::new(p)?))
        }
    }
}

/// Direct quadrature of the double sum (lazy for analytic symbols).
pub fn apply_direct<T: Real>(
    sigma: SymbolRef<'_, T>,
    f: &SampledFunction<T>,
    g: &SampledFunction<T>,
) -> Result<SampledFunction<T>> {
    let (grid, fv, gv) = physical_inputs(f, g)?;
    let out = with_operator(sigma, &grid, false, |op| op.apply(&fv, &gv))?;
    SampledFunction::physical(grid, out)
}

/// Fast path for x-independent symbols.
pub fn apply_fast<T: Real>(
    sigma: &dyn Symbol<T>,
    f: &SampledFunction<T>,
    g: &SampledFunction<T>,
) -> Result<SampledFunction<T>> {
    let (grid, fv, gv) = physical_inputs(f, g)?;
    let out = FastOperator::new(sigma, &grid)?.apply(&fv, &gv);
    SampledFunction::physical(grid, out)
}

/// Chooses the fast path when the symbol is x-independent.
pub fn evaluate<T: Real>(
    sigma: SymbolRef<'_, T>,
    f: &SampledFunction<T>,
    g: &SampledFunction<T>,
) -> Result<BilinearApplication<T>> {
    let (grid, fv, gv) = physical_inputs(f, g)?;
    let fast = matches!(sigma, SymbolRef::Analytic(s) if s.is_x_independent());
    let (out, path) = with_operator(sigma, &grid, fast, |op| (op.apply(&fv, &gv), op.path()))?;
    Ok(BilinearApplication { output: SampledFunction::physical(grid, out)?, path })
}

/// `dx^n Σ_x T(f,g)(x) h(x)`.
pub fn trilinear_form<T: Real>(
    sigma: SymbolRef<'_, T>,
    f: &SampledFunction<T>,
    g: &SampledFunction<T>,
    h: &SampledFunction<T>,
) -> Result<C<T>> {
    let (grid, fv, gv) = physical_inputs(f, g)?;
    let (_, hv, _) = physical_inputs(h, h)?;
    grid.check_same(h.grid())?;
    let t = with_operator(sigma, &grid, false, |op| op.apply(&fv, &gv))?;
    Ok(pairing(&grid, &t, &hv))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Slot {
    First,
    Second,
}

/// `T^{*1}(u, v)` for [`Slot::First`] and `T^{*2}(u, v)` for [`Slot::Second`].
pub fn transpose_apply<T: Real>(
    sigma: SymbolRef<'_, T>,
    slot: Slot,
    u: &SampledFunction<T>,
    v: &SampledFunction<T>,
) -> Result<SampledFunction<T>> {
    let (grid, uv, vv) = physical_inputs(u, v)?;
    let out = with_operator(sigma, &grid, false, |op| match slot {
        Slot::First => op.transpose1(&uv, &vv),
        Slot::Second => op.transpose2(&uv, &vv),
    })?;
    SampledFunction::physical(grid, out)
}

/// `φ̃(2^{-jρ}D - ν) f`.
pub fn uniform_project<T: Real>(
    f: &SampledFunction<T>,
    j: usize,
    nu: Lattice,
    rho: T,
    phi: &UniformFamily,
) -> Result<SampledFunction<T>> {
    let grid = f.grid();
    if phi.dim() != grid.dim() {
        return invalid("uniform family must live on R^n");
    }
    let s = pow2(from_usize::<T>(j) * rho);
    let reach = grid.max_freq();
    for &v in &nu[..grid.dim()] {
        let c = from_i64::<T>(v);
        if s * (c - lit(2.0)) > reach || s * (c + lit(2.0)) < -reach {
            return crate::error::out_of_range("projection band lies outside the lattice");
        }
    }
    let m: Vec<C<T>> = (0..grid.len())
        .map(|q| {
            let xi = grid.freq_point(q);
            let w = phi.widened(&[xi[0] / s - from_i64::<T>(nu[0]), xi[1] / s - from_i64::<T>(nu[1])]);
            Complex::new(w, T::zero())
        })
        .collect();
    crate::grid::multiplier_apply(&m, f)
}

/// Frequencies carried by `T(f, g)` and those falling outside the predicted box.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumSupport {
    pub frequencies: Vec<[i64; 2]>,
    pub outside_box: Vec<[i64; 2]>,
}

impl SpectrumSupport {
    pub fn is_contained(&self) -> bool {
        self.outside_box.is_empty()
    }
}

/// Box `2^{jρ}(ν₁+ν₂) + 2^{jρ+k+2}Q` as centre and half width.
pub fn predicted_output_box<T: Real>(piece: &SymbolPiece<T>) -> Result<([T; 2], T)> {
    match piece.kind() {
        PieceKind::Banded { j, k, nu } => {
            let s = pow2(from_usize::<T>(j) * piece.rho());
            let c = [s * from_i64::<T>(nu[0][0] + nu[1][0]), s * from_i64::<T>(nu[0][1] + nu[1][1])];
            Ok((c, s * pow2i::<T>(k as i32 + 2)))
        }
        _ => invalid("output spectrum bookkeeping expects a banded piece"),
    }
}

/// Forward transform of `T(f, g)` thresholded at `tol · max`, checked against
/// the predicted box modulo the lattice period.
pub fn output_spectrum_support<T: Real>(
    piece: &SymbolPiece<T>,
    f: &SampledFunction<T>,
    g: &SampledFunction<T>,
    tol: T,
) -> Result<SpectrumSupport> {
    if !(tol > T::zero()) {
        return invalid("tolerance must be positive");
    }
    let (centre, half) = predicted_output_box(piece)?;
    let (grid, fv, gv) = physical_inputs(f, g)?;
    grid.check_same(piece.grid())?;
    let t = PieceOperator::new(piece)?.apply(&fv, &gv);
    let spec = spectrum_of(&grid, &t);
    let peak = spec.iter().fold(T::zero(), |m, v| m.max(v.norm()));
    let mut out = SpectrumSupport { frequencies: Vec::new(), outside_box: Vec::new() };
    if peak == T::zero() {
        return Ok(out);
    }
    let period = from_usize::<T>(grid.points_per_axis()) * grid.dxi();
    let slack = lit::<T>(1e-9) * (T::one() + half);
    let inside = |f: [T; 2]| {
        (0..grid.dim()).all(|a| {
            [-T::one(), T::zero(), T::one()].iter().any(|w| (f[a] + *w * period - centre[a]).abs() <= half + slack)
        })
    };
    for (q, v) in spec.iter().enumerate() {
        if v.norm() > tol * peak {
            let labels = grid.labels(q);
            out.frequencies.push(labels);
            if !inside(grid.freq_point(q)) {
                out.outside_box.push(labels);
            }
        }
    }
    Ok(out)
}

/// Window of signed labels shared by a piece's frequency boxes, for callers building inputs.
pub fn piece_windows<T: Real>(piece: &SymbolPiece<T>) -> (FreqWindow, FreqWindow) {
    (*piece.xi_window(), *piece.eta_window())
}

/// Whether a piece can be evaluated as an operator.
pub fn piece_is_evaluable<T: Real>(piece: &SymbolPiece<T>) -> bool {
    matches!(piece.rows(), XRows::Constant) || piece.covers_all_x()
}

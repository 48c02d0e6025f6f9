//! Tabulated localizations `σ_j`, `σ_{j,ν}` and `σ_{j,k,ν}`.

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{contract, invalid, out_of_range, Result};
use crate::grid::{Direction, GridSpec};
use crate::partitions::{box_meets_annulus, DyadicFamily, Lattice, UniformFamily};
use crate::scalar::{from_i64, from_usize, pow2, pow2i, Real};
use crate::symbols::Symbol;

/// Inclusive box of signed frequency labels. Empty when `lo > hi` on some axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FreqWindow {
    pub dim: usize,
    pub lo: [i64; 2],
    pub hi: [i64; 2],
}

impl FreqWindow {
    pub fn new(dim: usize, lo: [i64; 2], hi: [i64; 2]) -> Self {
        let mut w = Self { dim, lo, hi };
        if dim == 1 {
            w.lo[1] = 0;
            w.hi[1] = 0;
        }
        w
    }

    pub fn empty(dim: usize) -> Self {
        Self { dim, lo: [1, 1], hi: [0, 0] }
    }

    fn extent(&self, axis: usize) -> usize {
        if self.hi[axis] < self.lo[axis] {
            0
        } else {
            (self.hi[axis] - self.lo[axis] + 1) as usize
        }
    }

    pub fn len(&self) -> usize {
        if self.dim == 1 {
            self.extent(0)
        } else {
            self.extent(0) * self.extent(1)
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, q: [i64; 2]) -> bool {
        (0..self.dim).all(|a| q[a] >= self.lo[a] && q[a] <= self.hi[a]) && !self.is_empty()
    }

    /// Position of `q` in the window enumeration.
    pub fn position(&self, q: [i64; 2]) -> Option<usize> {
        if !self.contains(q) {
            return None;
        }
        let a = (q[0] - self.lo[0]) as usize;
        if self.dim == 1 {
            Some(a)
        } else {
            Some(a * self.extent(1) + (q[1] - self.lo[1]) as usize)
        }
    }

    /// Labels of the `pos`-th point.
    pub fn labels(&self, pos: usize) -> [i64; 2] {
        if self.dim == 1 {
            [self.lo[0] + pos as i64, 0]
        } else {
            let w = self.extent(1);
            [self.lo[0] + (pos / w) as i64, self.lo[1] + (pos % w) as i64]
        }
    }

    pub fn points(&self) -> impl Iterator<Item = [i64; 2]> + '_ {
        (0..self.len()).map(move |p| self.labels(p))
    }

    pub fn intersect(&self, other: &FreqWindow) -> FreqWindow {
        let mut lo = [0; 2];
        let mut hi = [0; 2];
        for a in 0..2 {
            lo[a] = self.lo[a].max(other.lo[a]);
            hi[a] = self.hi[a].min(other.hi[a]);
        }
        let w = FreqWindow::new(self.dim, lo, hi);
        if w.is_empty() {
            FreqWindow::empty(self.dim)
        } else {
            w
        }
    }
}

/// Which x points a piece tabulates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum XSampling {
    All,
    /// Flat grid indices.
    Indices(Vec<usize>),
    /// Every `stride`-th point per axis together with its axis neighbours.
    Stencil { stride: usize },
}

/// Stored x rows of a piece.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum XRows {
    /// One row shared by every x (x-independent parent).
    Constant,
    /// Sorted flat grid indices.
    Rows(Vec<usize>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PieceKind {
    Dyadic { j: usize },
    Uniform { j: usize, nu: [Lattice; 2] },
    Banded { j: usize, k: usize, nu: [Lattice; 2] },
}

impl PieceKind {
    pub fn j(&self) -> usize {
        match *self {
            PieceKind::Dyadic { j } | PieceKind::Uniform { j, .. } | PieceKind::Banded { j, .. } => j,
        }
    }

    pub fn nu(&self) -> Option<[Lattice; 2]> {
        match *self {
            PieceKind::Dyadic { .. } => None,
            PieceKind::Uniform { nu, .. } | PieceKind::Banded { nu, .. } => Some(nu),
        }
    }
}

/// Declared support of a piece.
#[derive(Clone, Debug, PartialEq)]
pub struct SupportInfo<T: Real> {
    /// Radii of the closed `Ψ_j` annulus in `(ξ, η)`.
    pub annulus: (T, T),
    /// Scale `2^{jρ}` of the uniform boxes.
    pub scale: T,
    /// `ξ`- and `η`-boxes `2^{jρ}(ν_i + Q)` as per-axis `(lo, hi)`.
    pub boxes: Option<[[(T, T); 2]; 2]>,
    /// Radii of the x-spectrum band.
    pub x_band: Option<(T, T)>,
}

/// Tabulated piece `[x row][ξ][η]` over its frequency windows.
#[derive(Clone, Debug)]
pub struct SymbolPiece<T: Real> {
    grid: GridSpec<T>,
    kind: PieceKind,
    order: T,
    rho: T,
    xi_win: FreqWindow,
    eta_win: FreqWindow,
    rows: XRows,
    values: Vec<Complex<T>>,
    support: SupportInfo<T>,
}

impl<T: Real> SymbolPiece<T> {
    pub fn grid(&self) -> &GridSpec<T> {
        &self.grid
    }
    pub fn kind(&self) -> PieceKind {
        self.kind
    }
    pub fn order(&self) -> T {
        self.order
    }
    pub fn rho(&self) -> T {
        self.rho
    }
    pub fn xi_window(&self) -> &FreqWindow {
        &self.xi_win
    }
    pub fn eta_window(&self) -> &FreqWindow {
        &self.eta_win
    }
    pub fn rows(&self) -> &XRows {
        &self.rows
    }
    pub fn support(&self) -> &SupportInfo<T> {
        &self.support
    }
    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    pub fn is_x_independent(&self) -> bool {
        self.rows == XRows::Constant
    }

    pub fn row_len(&self) -> usize {
        self.xi_win.len() * self.eta_win.len()
    }

    pub fn row_count(&self) -> usize {
        match &self.rows {
            XRows::Constant => 1,
            XRows::Rows(r) => r.len(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.row_len() == 0 || self.values.iter().all(|v| *v == Complex::new(T::zero(), T::zero()))
    }

    /// Whether every grid point has a row.
    pub fn covers_all_x(&self) -> bool {
        match &self.rows {
            XRows::Constant => true,
            XRows::Rows(r) => r.len() == self.grid.len(),
        }
    }

    /// Row index holding x (flat grid index).
    pub fn row_of_x(&self, x: usize) -> Option<usize> {
        match &self.rows {
            XRows::Constant => Some(0),
            XRows::Rows(r) => r.binary_search(&x).ok(),
        }
    }

    /// Flat x index of a stored row (0 for a constant row).
    pub fn x_of_row(&self, row: usize) -> usize {
        match &self.rows {
            XRows::Constant => 0,
            XRows::Rows(r) => r[row],
        }
    }

    pub fn row(&self, row: usize) -> &[Complex<T>] {
        let w = self.row_len();
        &self.values[row * w..(row + 1) * w]
    }

    /// Value at a stored row and frequency labels; zero outside the windows.
    pub fn value(&self, row: usize, xi: [i64; 2], eta: [i64; 2]) -> Complex<T> {
        match (self.xi_win.position(xi), self.eta_win.position(eta)) {
            (Some(a), Some(b)) => self.values[row * self.row_len() + a * self.eta_win.len() + b],
            _ => Complex::new(T::zero(), T::zero()),
        }
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.norm()))
    }

    fn zero(&self, kind: PieceKind) -> Self {
        let dim = self.grid.dim();
        SymbolPiece {
            grid: self.grid.clone(),
            kind,
            order: self.order,
            rho: self.rho,
            xi_win: FreqWindow::empty(dim),
            eta_win: FreqWindow::empty(dim),
            rows: self.rows.clone(),
            values: Vec::new(),
            support: self.support.clone(),
        }
    }
}

fn sampled_rows<T: Real>(grid: &GridSpec<T>, sampling: &XSampling) -> Result<Vec<usize>> {
    let len = grid.len();
    let n = grid.points_per_axis();
    let mut rows = match sampling {
        XSampling::All => (0..len).collect(),
        XSampling::Indices(v) => {
            if v.iter().any(|k| *k >= len) {
                return invalid("x sample index outside the grid");
            }
            v.clone()
        }
        XSampling::Stencil { stride } => {
            let stride = (*stride).max(1);
            let mut v = Vec::new();
            let centers: Vec<[usize; 2]> = if grid.dim() == 1 {
                (0..n).step_by(stride).map(|a| [a, 0]).collect()
            } else {
                let mut c = Vec::new();
                for a in (0..n).step_by(stride) {
                    for b in (0..n).step_by(stride) {
                        c.push([a, b]);
                    }
                }
                c
            };
            for c in centers {
                v.push(grid.flat(c));
                for axis in 0..grid.dim() {
                    for d in [1, n - 1] {
                        let mut p = c;
                        p[axis] = (p[axis] + d) % n;
                        v.push(grid.flat(p));
                    }
                }
            }
            v
        }
    };
    rows.sort_unstable();
    rows.dedup();
    Ok(rows)
}

fn lattice_axis_window<T: Real>(grid: &GridSpec<T>, lo: T, hi: T) -> (i64, i64) {
    let dxi = grid.dxi();
    let half = (grid.points_per_axis() / 2) as i64;
    let a = ((lo / dxi).floor().to_i64().unwrap_or(i64::MIN / 2) - 2).max(-half);
    let b = ((hi / dxi).ceil().to_i64().unwrap_or(i64::MAX / 2) + 2).min(half - 1);
    (a, b)
}

fn dyadic_window<T: Real>(grid: &GridSpec<T>, j: usize) -> FreqWindow {
    let r = pow2i::<T>(j as i32 + 1);
    let (a, b) = lattice_axis_window(grid, -r, r);
    FreqWindow::new(grid.dim(), [a, a], [b, b])
}

fn check_dyadic<T: Real>(sigma: &dyn Symbol<T>, j: usize, psi: &DyadicFamily, grid: &GridSpec<T>) -> Result<()> {
    if sigma.dim() != grid.dim() {
        return invalid("symbol and grid dimensions differ");
    }
    if psi.dim() != 2 * grid.dim() {
        return invalid("slicing needs the dyadic family on R^{2n}");
    }
    if j > psi.j_max() {
        return invalid(format!("j = {j} exceeds j_max = {}", psi.j_max()));
    }
    if pow2i::<T>(j as i32 + 1) > grid.max_freq() {
        return out_of_range(format!("annulus of radius 2^{} exceeds the frequency lattice", j + 1));
    }
    Ok(())
}

fn tabulate<T: Real>(
    sigma: &dyn Symbol<T>,
    grid: &GridSpec<T>,
    rows: &XRows,
    xi_win: &FreqWindow,
    eta_win: &FreqWindow,
    weight: impl Fn(&[T; 2], &[T; 2]) -> T + Sync,
) -> Vec<Complex<T>> {
    let xi_pts: Vec<[T; 2]> = xi_win.points().map(|q| grid.freq_of_labels(q)).collect();
    let eta_pts: Vec<[T; 2]> = eta_win.points().map(|q| grid.freq_of_labels(q)).collect();
    let weights: Vec<T> = xi_pts.iter().flat_map(|a| eta_pts.iter().map(|b| weight(a, b)).collect::<Vec<_>>()).collect();
    let xs: Vec<[T; 2]> = match rows {
        XRows::Constant => vec![[T::zero(), T::zero()]],
        XRows::Rows(r) => r.iter().map(|k| grid.x_point(*k)).collect(),
    };
    let zero = Complex::new(T::zero(), T::zero());
    xs.par_iter()
        .flat_map_iter(|x| {
            let mut row = Vec::with_capacity(weights.len());
            for (ai, a) in xi_pts.iter().enumerate() {
                for (bi, b) in eta_pts.iter().enumerate() {
                    let w = weights[ai * eta_pts.len() + bi];
                    row.push(if w == T::zero() { zero } else { sigma.eval(x, a, b) * w });
                }
            }
            row
        })
        .collect()
}

fn rows_for<T: Real>(sigma: &dyn Symbol<T>, grid: &GridSpec<T>, sampling: &XSampling) -> Result<XRows> {
    if sigma.is_x_independent() {
        Ok(XRows::Constant)
    } else {
        Ok(XRows::Rows(sampled_rows(grid, sampling)?))
    }
}

fn psi_j<T: Real>(psi: &DyadicFamily, j: usize, a: &[T; 2], b: &[T; 2], dim: usize) -> T {
    let mut r = T::zero();
    for t in a.iter().take(dim).chain(b.iter().take(dim)) {
        r = r + *t * *t;
    }
    psi.member_radial(j, r.sqrt())
}

/// `σ_j = σ Ψ_j`, tabulated at the requested x rows.
pub fn slice_dyadic<T: Real>(
    sigma: &dyn Symbol<T>,
    j: usize,
    psi: &DyadicFamily,
    grid: &GridSpec<T>,
    sampling: &XSampling,
) -> Result<SymbolPiece<T>> {
    check_dyadic(sigma, j, psi, grid)?;
    let dim = grid.dim();
    let win = dyadic_window(grid, j);
    let rows = rows_for(sigma, grid, sampling)?;
    let values = tabulate(sigma, grid, &rows, &win, &win, |a, b| psi_j(psi, j, a, b, dim));
    Ok(SymbolPiece {
        grid: grid.clone(),
        kind: PieceKind::Dyadic { j },
        order: sigma.order(),
        rho: sigma.rho(),
        xi_win: win,
        eta_win: win,
        rows,
        values,
        support: SupportInfo { annulus: psi.support(j), scale: T::one(), boxes: None, x_band: None },
    })
}

fn nu_radius<T: Real>(j: usize, rho: T) -> i64 {
    let e = from_usize::<T>(j) * (T::one() - rho) + T::one();
    pow2(e).floor().to_i64().unwrap_or(i64::MAX / 4) + 2
}

fn uniform_boxes<T: Real>(s: T, nu: &[Lattice; 2]) -> [[(T, T); 2]; 2] {
    let mut out = [[(T::zero(), T::zero()); 2]; 2];
    for (i, v) in nu.iter().enumerate() {
        for a in 0..2 {
            let c = from_i64::<T>(v[a]);
            out[i][a] = (s * (c - T::one()), s * (c + T::one()));
        }
    }
    out
}

/// Whether the `(ξ, η)` box of `ν` meets the `Ψ_j` annulus.
fn nu_is_active<T: Real>(j: usize, rho: T, nu: &[Lattice; 2], psi: &DyadicFamily, dim: usize) -> bool {
    let r = nu_radius(j, rho);
    if nu.iter().any(|v| v.iter().take(dim).any(|c| c.abs() > r)) {
        return false;
    }
    let s = pow2(from_usize::<T>(j) * rho);
    let boxes = uniform_boxes(s, nu);
    let mut lo = Vec::new();
    let mut hi = Vec::new();
    for b in &boxes {
        for ax in b.iter().take(dim) {
            lo.push(ax.0);
            hi.push(ax.1);
        }
    }
    let (r_in, r_out) = psi.support::<T>(j);
    box_meets_annulus(&lo, &hi, r_in, r_out)
}

/// All `ν = (ν₁, ν₂)` whose box meets the `Ψ_j` annulus.
pub fn active_nu<T: Real>(j: usize, rho: T, psi: &DyadicFamily, dim: usize) -> Vec<[Lattice; 2]> {
    let r = nu_radius(j, rho);
    let axis: Vec<Lattice> = if dim == 1 {
        (-r..=r).map(|a| [a, 0]).collect()
    } else {
        (-r..=r).flat_map(|a| (-r..=r).map(move |b| [a, b])).collect()
    };
    let mut out = Vec::new();
    for a in &axis {
        for b in &axis {
            let nu = [*a, *b];
            if nu_is_active(j, rho, &nu, psi, dim) {
                out.push(nu);
            }
        }
    }
    out
}

/// `σ_{j,ν} = σ φ(2^{-jρ}ξ - ν₁) φ(2^{-jρ}η - ν₂) Ψ_j`.
#[allow(clippy::too_many_arguments)]
pub fn slice_uniform<T: Real>(
    sigma: &dyn Symbol<T>,
    j: usize,
    nu: [Lattice; 2],
    rho: T,
    phi: &UniformFamily,
    psi: &DyadicFamily,
    grid: &GridSpec<T>,
    sampling: &XSampling,
) -> Result<SymbolPiece<T>> {
    check_dyadic(sigma, j, psi, grid)?;
    if !(rho >= T::zero() && rho < T::one()) {
        return invalid("rho must lie in [0, 1)");
    }
    if phi.dim() != grid.dim() {
        return invalid("uniform family must live on R^n");
    }
    let dim = grid.dim();
    let s = pow2(from_usize::<T>(j) * rho);
    let boxes = uniform_boxes(s, &nu);
    let rows = rows_for(sigma, grid, sampling)?;
    let support = SupportInfo { annulus: psi.support(j), scale: s, boxes: Some(boxes), x_band: None };
    let kind = PieceKind::Uniform { j, nu };
    let dwin = dyadic_window(grid, j);
    let window_of = |b: &[(T, T); 2]| {
        let (a0, b0) = lattice_axis_window(grid, b[0].0, b[0].1);
        let (a1, b1) = lattice_axis_window(grid, b[1].0, b[1].1);
        FreqWindow::new(dim, [a0, a1], [b0, b1]).intersect(&dwin)
    };
    let xi_win = window_of(&boxes[0]);
    let eta_win = window_of(&boxes[1]);
    if !nu_is_active(j, rho, &nu, psi, dim) || xi_win.is_empty() || eta_win.is_empty() {
        return Ok(SymbolPiece {
            grid: grid.clone(),
            kind,
            order: sigma.order(),
            rho,
            xi_win: FreqWindow::empty(dim),
            eta_win: FreqWindow::empty(dim),
            rows,
            values: Vec::new(),
            support,
        });
    }
    let nu_f = [[from_i64::<T>(nu[0][0]), from_i64::<T>(nu[0][1])], [from_i64::<T>(nu[1][0]), from_i64::<T>(nu[1][1])]];
    let values = tabulate(sigma, grid, &rows, &xi_win, &eta_win, |a, b| {
        let pa = phi.phi(&[a[0] / s - nu_f[0][0], a[1] / s - nu_f[0][1]]);
        if pa == T::zero() {
            return T::zero();
        }
        let pb = phi.phi(&[b[0] / s - nu_f[1][0], b[1] / s - nu_f[1][1]]);
        if pb == T::zero() {
            return T::zero();
        }
        pa * pb * psi_j(psi, j, a, b, dim)
    });
    Ok(SymbolPiece { grid: grid.clone(), kind, order: sigma.order(), rho, xi_win, eta_win, rows, values, support })
}

/// `σ_{j,k,ν} = ψ_k(2^{-jρ}D_x) σ_{j,ν}`, applied as a multiplier on the x-spectrum.
pub fn band_x<T: Real>(piece: &SymbolPiece<T>, k: usize, rho: T, psi: &DyadicFamily) -> Result<SymbolPiece<T>> {
    let grid = &piece.grid;
    let (j, nu) = match piece.kind {
        PieceKind::Uniform { j, nu } => (j, nu),
        PieceKind::Dyadic { j } => (j, [[0, 0], [0, 0]]),
        PieceKind::Banded { .. } => return invalid("band_x expects an unbanded piece"),
    };
    if psi.dim() != grid.dim() {
        return invalid("x-band family must live on R^n");
    }
    let s = pow2(from_usize::<T>(j) * rho);
    let reach = grid.max_freq() * from_usize::<T>(grid.dim()).sqrt();
    if k >= 1 && s * pow2i::<T>(k as i32 - 1) > reach {
        return out_of_range(format!("x band k = {k} lies beyond the lattice"));
    }
    let kind = PieceKind::Banded { j, k, nu };
    let band = if k == 0 { (T::zero(), s * pow2i::<T>(1)) } else { (s * pow2i::<T>(k as i32 - 1), s * pow2i::<T>(k as i32 + 1)) };
    let mut support = piece.support.clone();
    support.x_band = Some(band);
    if piece.is_x_independent() {
        let mut out = if k == 0 { piece.clone() } else { piece.zero(kind) };
        out.kind = kind;
        out.support = support;
        return Ok(out);
    }
    if !piece.covers_all_x() {
        return contract("band_x needs a piece tabulated at every x");
    }
    let len = grid.len();
    let w = piece.row_len();
    let dim = grid.dim();
    let mult: Vec<T> = (0..len)
        .map(|q| {
            let f = grid.freq_point(q);
            let r = if dim == 1 { f[0].abs() } else { f[0].hypot(f[1]) };
            psi.member_radial(k, r / s) / from_usize::<T>(len)
        })
        .collect();
    let columns: Vec<Vec<Complex<T>>> = (0..w)
        .into_par_iter()
        .map(|p| {
            let mut col: Vec<Complex<T>> = (0..len).map(|x| piece.values[x * w + p]).collect();
            grid.fft(&mut col, Direction::Forward);
            for (c, m) in col.iter_mut().zip(&mult) {
                *c = *c * *m;
            }
            grid.fft(&mut col, Direction::Inverse);
            col
        })
        .collect();
    let mut values = vec![Complex::new(T::zero(), T::zero()); len * w];
    for (p, col) in columns.iter().enumerate() {
        for (x, v) in col.iter().enumerate() {
            values[x * w + p] = *v;
        }
    }
    Ok(SymbolPiece {
        grid: grid.clone(),
        kind,
        order: piece.order,
        rho: piece.rho,
        xi_win: piece.xi_win,
        eta_win: piece.eta_win,
        rows: piece.rows.clone(),
        values,
        support,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partitions::{build_dyadic, build_uniform};
    use crate::symbols::{Constant, Exotic};

    fn torus(n: usize) -> GridSpec<f64> {
        GridSpec::new(1, n, 2.0 * std::f64::consts::PI).unwrap()
    }

    #[test]
    fn window_enumeration() {
        let w = FreqWindow::new(2, [-1, 2], [1, 4]);
        assert_eq!(w.len(), 9);
        for (p, q) in w.points().enumerate() {
            assert_eq!(w.position(q), Some(p));
        }
        assert!(FreqWindow::empty(1).is_empty());
        assert!(w.intersect(&FreqWindow::new(2, [5, 5], [6, 6])).is_empty());
    }

    #[test]
    fn constant_slice_equals_annulus_cutoff() {
        let g = torus(64);
        let psi = build_dyadic(2, 6).unwrap();
        let p = slice_dyadic(&Constant::new(1, 1.0), 3, &psi, &g, &XSampling::All).unwrap();
        assert!(p.is_x_independent());
        for a in p.xi_window().points() {
            for b in p.eta_window().points() {
                let r = ((a[0] * a[0] + b[0] * b[0]) as f64).sqrt();
                assert_eq!(p.value(0, a, b).re, psi.member_radial(3, r));
            }
        }
        assert_eq!(p.value(0, [16, 0], [0, 0]), Complex::new(0.0, 0.0));
    }

    #[test]
    fn slice_rejects_oversized_annulus() {
        let g = torus(32);
        let psi = build_dyadic(2, 8).unwrap();
        assert!(slice_dyadic(&Constant::new(1, 1.0), 3, &psi, &g, &XSampling::All).is_ok());
        assert!(matches!(
            slice_dyadic(&Constant::new(1, 1.0), 4, &psi, &g, &XSampling::All),
            Err(crate::error::LabError::OutOfRange(_))
        ));
    }

    #[test]
    fn far_nu_gives_zero_piece() {
        let g = torus(64);
        let psi = build_dyadic(2, 6).unwrap();
        let phi = build_uniform(1).unwrap();
        let s = Exotic::new(1, -0.25, 0.5);
        let p = slice_uniform(&s, 3, [[40, 0], [0, 0]], 0.5, &phi, &psi, &g, &XSampling::Indices(vec![0])).unwrap();
        assert!(p.is_zero());
    }

    #[test]
    fn independent_piece_bands() {
        let g = torus(64);
        let psi = build_dyadic(2, 6).unwrap();
        let psi1 = build_dyadic(1, 8).unwrap();
        let phi = build_uniform(1).unwrap();
        let s = Exotic::multiplier(1, -0.25, 0.5);
        let p = slice_uniform(&s, 4, [[1, 0], [2, 0]], 0.5, &phi, &psi, &g, &XSampling::All).unwrap();
        let b0 = band_x(&p, 0, 0.5, &psi1).unwrap();
        assert_eq!(b0.values(), p.values());
        assert!(band_x(&p, 1, 0.5, &psi1).unwrap().is_zero());
    }

    #[test]
    fn stencil_rows_include_neighbours() {
        let g = torus(16);
        let rows = sampled_rows(&g, &XSampling::Stencil { stride: 8 }).unwrap();
        assert_eq!(rows, vec![0, 1, 7, 8, 9, 15]);
    }
}

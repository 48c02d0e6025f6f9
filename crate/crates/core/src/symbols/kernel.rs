//! Kernels `K(x, y, z) = (2π)^{-2n} ∫∫ e^{i(y·ξ + z·η)} σ(x, ξ, η) dξ dη` of tabulated pieces.

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{contract, invalid, Result};
use crate::grid::{Direction, GridSpec};
use crate::scalar::{from_usize, pow2, Real};
use crate::symbols::pieces::{PieceKind, SymbolPiece, XRows};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Derivative {
    None,
    /// Central difference in `x` along an axis.
    Dx(usize),
    /// `∂_y` along an axis, i.e. a factor `iξ`.
    Dy(usize),
    /// `∂_z` along an axis, i.e. a factor `iη`.
    Dz(usize),
}

/// Samples `K(x, y, z)` over the whole `(y, z)` grid at selected x.
#[derive(Clone, Debug)]
pub struct KernelSlice<T: Real> {
    grid: GridSpec<T>,
    pair_grid: GridSpec<T>,
    kind: PieceKind,
    derivative: Derivative,
    x_indices: Vec<usize>,
    values: Vec<Complex<T>>,
}

impl<T: Real> KernelSlice<T> {
    pub fn grid(&self) -> &GridSpec<T> {
        &self.grid
    }
    pub fn kind(&self) -> PieceKind {
        self.kind
    }
    pub fn derivative(&self) -> Derivative {
        self.derivative
    }
    /// Flat x indices of the stored slices.
    pub fn x_indices(&self) -> &[usize] {
        &self.x_indices
    }
    /// Slice at the `i`-th stored x, laid out `[y][z]`.
    pub fn slice(&self, i: usize) -> &[Complex<T>] {
        let w = self.pair_grid.len();
        &self.values[i * w..(i + 1) * w]
    }

    /// `K(x_i, y, z)` at flat indices.
    pub fn at(&self, i: usize, y: usize, z: usize) -> Complex<T> {
        self.slice(i)[y * self.grid.len() + z]
    }

    /// Forward transform in `(y, z)` of the `i`-th slice, returned on the full `(ξ, η)` lattice.
    pub fn recover_symbol(&self, i: usize) -> Vec<Complex<T>> {
        let mut v = self.slice(i).to_vec();
        self.pair_grid.fft(&mut v, Direction::Forward);
        let w = self.pair_grid.cell_volume();
        v.iter_mut().for_each(|z| *z = *z * w);
        v
    }
}

fn embed<T: Real>(piece: &SymbolPiece<T>, row: usize, factor: impl Fn([i64; 2], [i64; 2]) -> Complex<T>) -> Vec<Complex<T>> {
    let g = piece.grid();
    let len = g.len();
    let mut full = vec![Complex::new(T::zero(), T::zero()); len * len];
    let vals = piece.row(row);
    let ew = piece.eta_window().len();
    for (a, qa) in piece.xi_window().points().enumerate() {
        let ia = g.flat_of_labels(qa);
        for (b, qb) in piece.eta_window().points().enumerate() {
            let v = vals[a * ew + b];
            if v != Complex::new(T::zero(), T::zero()) {
                full[ia * len + g.flat_of_labels(qb)] = full[ia * len + g.flat_of_labels(qb)] + v * factor(qa, qb);
            }
        }
    }
    full
}

/// Inverse transform in `(ξ, η)` of a tabulated piece, per stored x.
///
/// `Dx` needs the piece to hold both axis neighbours of an x; slices are
/// produced only at such x.
pub fn kernel_of<T: Real>(piece: &SymbolPiece<T>, derivative: Derivative) -> Result<KernelSlice<T>> {
    let grid = piece.grid().clone();
    if grid.dim() != 1 {
        return invalid("kernels are implemented for n = 1");
    }
    let pair_grid = GridSpec::new(2, grid.points_per_axis(), grid.period())?;
    let weight = grid.freq_weight() * grid.freq_weight();
    let dxi = grid.dxi();
    let i_unit = Complex::new(T::zero(), T::one());
    let n = grid.points_per_axis();
    let (targets, stencils): (Vec<usize>, Vec<Vec<(usize, T)>>) = match (&derivative, piece.rows()) {
        (Derivative::Dx(_), XRows::Constant) => (vec![0], vec![vec![]]),
        (Derivative::Dx(_), XRows::Rows(rows)) => {
            let h = T::one() / (grid.dx() + grid.dx());
            let mut t = Vec::new();
            let mut s = Vec::new();
            for x in rows.iter() {
                let (p, m) = ((x + 1) % n, (x + n - 1) % n);
                if let (Some(rp), Some(rm)) = (piece.row_of_x(p), piece.row_of_x(m)) {
                    t.push(*x);
                    s.push(vec![(rp, h), (rm, -h)]);
                }
            }
            if t.is_empty() {
                return contract("x derivative needs rows with both neighbours");
            }
            (t, s)
        }
        (_, XRows::Constant) => (vec![0], vec![vec![(0, T::one())]]),
        (_, XRows::Rows(rows)) => (rows.clone(), (0..rows.len()).map(|r| vec![(r, T::one())]).collect()),
    };
    let factor = move |qa: [i64; 2], qb: [i64; 2]| -> Complex<T> {
        match derivative {
            Derivative::Dy(_) => i_unit * (crate::scalar::from_i64::<T>(qa[0]) * dxi),
            Derivative::Dz(_) => i_unit * (crate::scalar::from_i64::<T>(qb[0]) * dxi),
            _ => Complex::new(T::one(), T::zero()),
        }
    };
    let slices: Vec<Vec<Complex<T>>> = stencils
        .par_iter()
        .map(|st| {
            let mut acc = vec![Complex::new(T::zero(), T::zero()); pair_grid.len()];
            for (row, w) in st {
                let e = embed(piece, *row, factor);
                for (a, b) in acc.iter_mut().zip(e) {
                    *a = *a + b * *w;
                }
            }
            pair_grid.fft(&mut acc, Direction::Inverse);
            acc.iter_mut().for_each(|v| *v = *v * weight);
            acc
        })
        .collect();
    Ok(KernelSlice {
        grid,
        pair_grid,
        kind: piece.kind(),
        derivative,
        x_indices: targets,
        values: slices.into_iter().flatten().collect(),
    })
}

/// `sup_x ‖(1 + 2^{jρ}|y|)^{N₁} (1 + 2^{jρ}|z|)^{N₂} K(x, y, z)‖_{L²_{y,z}}`.
pub fn weighted_kernel_norm<T: Real>(k: &KernelSlice<T>, n1: T, n2: T, j: usize, rho: T) -> Result<T> {
    if n1 < T::zero() || n2 < T::zero() {
        return invalid("kernel weights must be nonnegative");
    }
    let g = &k.grid;
    let len = g.len();
    let s = pow2(from_usize::<T>(j) * rho);
    let w: Vec<(T, T)> = (0..len)
        .map(|y| {
            let d = g.x_point(y)[0].abs();
            ((T::one() + s * d).powf(n1), (T::one() + s * d).powf(n2))
        })
        .collect();
    let vol = g.cell_volume() * g.cell_volume();
    let mut best = T::zero();
    for i in 0..k.x_indices.len() {
        let sl = k.slice(i);
        let mut acc = T::zero();
        for y in 0..len {
            let wy = w[y].0;
            for z in 0..len {
                let v = sl[y * len + z].norm() * wy * w[z].1;
                acc = acc + v * v;
            }
        }
        best = best.max((acc * vol).sqrt());
    }
    Ok(best)
}

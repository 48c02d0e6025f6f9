//! Schur's test and the almost-orthogonality bounds, evaluated exactly on
//! finite families.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use bilab_core::{LabError, Result};

fn bad(msg: &str) -> LabError {
    LabError::InvalidArgument(msg.into())
}

/// `(Σ A_{jk} b_j c_k, ‖b‖ ‖c‖)` after dividing `A` by the larger of its
/// maximal row and column sums.
pub fn schur_bound(a: &DMatrix<f64>, b: &[f64], c: &[f64]) -> Result<(f64, f64)> {
    if a.nrows() != b.len() || a.ncols() != c.len() {
        return Err(bad("matrix and vectors do not match"));
    }
    if a.iter().chain(b).chain(c).any(|v| !(*v >= 0.0)) {
        return Err(bad("Schur's test needs nonnegative entries"));
    }
    let row = a.row_iter().map(|r| r.sum()).fold(0.0, f64::max);
    let col = a.column_iter().map(|r| r.sum()).fold(0.0, f64::max);
    let scale = row.max(col);
    let b = DVector::from_column_slice(b);
    let c = DVector::from_column_slice(c);
    let lhs = if scale > 0.0 { b.dot(&(a * &c)) / scale } else { 0.0 };
    Ok((lhs, b.norm() * c.norm()))
}

#[derive(Clone, Debug)]
pub enum Family {
    Vectors(Vec<DVector<Complex64>>),
    Operators(Vec<DMatrix<Complex64>>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// `⟨f_β, f_α⟩ ≠ 0`.
    Vectors,
    /// `T_β^* T_α ≠ 0`.
    StarLeft,
    /// `T_β T_α^* ≠ 0`.
    StarRight,
}

impl Mode {
    pub fn from_index(mode: u8) -> Result<Self> {
        match mode {
            1 => Ok(Mode::Vectors),
            2 => Ok(Mode::StarLeft),
            3 => Ok(Mode::StarRight),
            _ => Err(bad("mode must be 1, 2 or 3")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Orthogonality {
    /// Largest number of interacting partners of one member.
    pub l: usize,
    pub lhs: f64,
    pub rhs: f64,
}

impl Orthogonality {
    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs * (1.0 + 1e-12) + 1e-300
    }
}

fn spectral_norm(m: &DMatrix<Complex64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().iter().cloned().fold(0.0, f64::max)
}

fn max_entry(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Interaction count `L`, `‖Σ·‖²` and `L Σ‖·‖²`; operator norms are spectral.
/// A product counts as nonzero when one of its entries exceeds `tol`.
pub fn almost_orthogonal_bound(family: &Family, mode: Mode, tol: f64) -> Result<Orthogonality> {
    if !(tol >= 0.0) {
        return Err(bad("tolerance must be nonnegative"));
    }
    match (family, mode) {
        (Family::Vectors(v), Mode::Vectors) => {
            let Some(first) = v.first() else { return Err(bad("empty family")) };
            if v.iter().any(|f| f.len() != first.len()) {
                return Err(bad("vectors differ in dimension"));
            }
            let l = (0..v.len())
                .map(|a| (0..v.len()).filter(|b| v[*b].dotc(&v[a]).norm() > tol).count())
                .max()
                .unwrap_or(0);
            let sum = v.iter().skip(1).fold(first.clone(), |s, f| s + f);
            let each: f64 = v.iter().map(|f| f.norm_squared()).sum();
            Ok(Orthogonality { l, lhs: sum.norm_squared(), rhs: l as f64 * each })
        }
        (Family::Operators(t), Mode::StarLeft | Mode::StarRight) => {
            let Some(first) = t.first() else { return Err(bad("empty family")) };
            if t.iter().any(|m| m.shape() != first.shape()) {
                return Err(bad("operators differ in shape"));
            }
            let interacts = |a: usize, b: usize| {
                let p = if mode == Mode::StarLeft { t[b].adjoint() * &t[a] } else { &t[b] * t[a].adjoint() };
                max_entry(&p) > tol
            };
            let l = (0..t.len()).map(|a| (0..t.len()).filter(|b| interacts(a, *b)).count()).max().unwrap_or(0);
            let sum = t.iter().skip(1).fold(first.clone(), |s, m| s + m);
            let each: f64 = t.iter().map(|m| spectral_norm(m).powi(2)).sum();
            Ok(Orthogonality { l, lhs: spectral_norm(&sum).powi(2), rhs: l as f64 * each })
        }
        _ => Err(bad("mode 1 takes vectors, modes 2 and 3 take operators")),
    }
}

//! Weighted `L²` norms of the dyadic kernels `K_j` and their slopes in `j`.

use bilab_core::partitions::DyadicFamily;
use bilab_core::symbols::{kernel_of, slice_dyadic, weighted_kernel_norm, Derivative, Exotic, Symbol, XSampling};
use bilab_core::{Grid, Result};
use serde::{Deserialize, Serialize};

use crate::fit::{Claim, FitReport, Variable};

/// Which kernel is measured, with its predicted `j`-slope offset beyond `m + n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum KernelKind {
    Plain,
    /// `∂_x K_j`, costing `2^{jρ}`.
    Dx,
    /// `∂_y K_j`, costing `2^j`.
    Dy,
}

impl KernelKind {
    fn derivative(self) -> Derivative {
        match self {
            KernelKind::Plain => Derivative::None,
            KernelKind::Dx => Derivative::Dx(0),
            KernelKind::Dy => Derivative::Dy(0),
        }
    }

    pub fn predicted(self, m: f64, rho: f64, n: usize) -> f64 {
        let base = m + n as f64;
        match self {
            KernelKind::Plain => base,
            KernelKind::Dx => base + rho,
            KernelKind::Dy => base + 1.0,
        }
    }
}

/// `⟨ζ⟩^m` times the shell-wise x-modulation, with no phase.
///
/// The modulation has modulus one, so it leaves the plain and `∂_y` kernels'
/// `L²` norms unchanged and gives `∂_x` its `2^{jρ}` cost.
pub fn kernel_symbol(m: f64, rho: f64) -> Exotic<f64> {
    Exotic { phase: 0.0, wobble: 0.0, ..Exotic::new(1, m, rho) }
}

/// `sup_x ‖K_j(x,·,·)‖_{L²}` (weights `N₁ = N₂ = 0`) for one kernel kind.
pub fn kernel_value(sigma: &dyn Symbol<f64>, grid: &Grid, j: usize, kind: KernelKind, psi: &DyadicFamily, stride: usize) -> Result<f64> {
    let sampling = if sigma.is_x_independent() { XSampling::All } else { XSampling::Stencil { stride } };
    let piece = slice_dyadic(sigma, j, psi, grid, &sampling)?;
    let k = kernel_of(&piece, kind.derivative())?;
    weighted_kernel_norm(&k, 0.0, 0.0, j, sigma.rho())
}

#[allow(clippy::too_many_arguments)]
pub fn kernel_slope_fit(
    sigma: &dyn Symbol<f64>,
    grid: &Grid,
    j_range: &[usize],
    kind: KernelKind,
    psi: &DyadicFamily,
    stride: usize,
    tolerance: f64,
) -> Result<FitReport> {
    let values = j_range
        .iter()
        .map(|j| kernel_value(sigma, grid, *j, kind, psi, stride))
        .collect::<Result<Vec<f64>>>()?;
    FitReport::fit(
        format!("kernel {kind:?} {}", sigma.name()),
        Variable::J,
        j_range.iter().map(|j| *j as i64).collect(),
        &values,
        None,
        kind.predicted(sigma.order(), sigma.rho(), grid.dim()),
        tolerance,
        Claim::Equal,
    )
}

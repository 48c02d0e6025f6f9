//! Rescaling `σ_j ↦ σ̃_j(x,ξ,η) = σ_j(2^{-jρ}x, 2^{jρ}ξ, 2^{jρ}η)` on matched lattices.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use bilab_core::norms::{opnorm_lower, OpnormConfig};
use bilab_core::operators::{BilinearOperator, DirectOperator};
use bilab_core::partitions::build_dyadic;
use bilab_core::symbols::{rescale_piece, slice_dyadic, Symbol, XSampling};
use bilab_core::{Exponents, Grid, Result};

use crate::fields::{band_limited, sup_norm};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RescaleReport {
    pub j: usize,
    pub rho: f64,
    /// `2^{jρ}` before snapping to a power of two.
    pub requested_scale: f64,
    pub scale: f64,
    /// Largest `|T_{σ_j}(a,b)(2^{-jρ}x) − T_{σ̃_j}(a(2^{-jρ}·),b(2^{-jρ}·))(x)|`
    /// relative to the sup of the left side, over the trial pairs.
    pub pointwise_error: f64,
    pub ratio_before: f64,
    pub ratio_after: f64,
}

impl RescaleReport {
    /// `|ratio_after / ratio_before − 1|`.
    pub fn disagreement(&self) -> f64 {
        if self.ratio_before == 0.0 {
            return if self.ratio_after == 0.0 { 0.0 } else { f64::INFINITY };
        }
        (self.ratio_after / self.ratio_before - 1.0).abs()
    }
}

/// Compares `T_{σ_j}` on `grid` with `T_{σ̃_j}` on the grid of period `scale·L`.
///
/// A sample array on the first grid, read on the second, is `a(2^{-jρ}·)`, so
/// both sides of the change of variables are evaluated on identical arrays.
pub fn rescale_invariance(
    sigma: &dyn Symbol<f64>,
    grid: &Grid,
    j: usize,
    e: &Exponents,
    trials: usize,
    seed: u64,
) -> Result<RescaleReport> {
    let rho = sigma.rho();
    let psi = build_dyadic(2 * grid.dim(), j + 1)?;
    let piece = Arc::new(slice_dyadic(sigma, j, &psi, grid, &XSampling::All)?);
    let rescaled = rescale_piece(piece.clone(), j, rho)?;
    let wide = Grid::new(grid.dim(), grid.points_per_axis(), rescaled.scale() * grid.period())?;
    // σ_j read through the same lookup as σ̃_j, so both sides share one evaluation path
    let unscaled = rescale_piece(piece.clone(), j, 0.0)?;
    let before = DirectOperator::new(&unscaled, grid)?;
    let after = DirectOperator::new(&rescaled, &wide)?;
    let hi = 2f64.powi(j as i32 + 1);
    let mut pointwise_error = 0.0f64;
    for t in 0..trials.max(1) as u64 {
        let a = band_limited(grid, 0.0, hi, seed.wrapping_add(2 * t));
        let b = band_limited(grid, 0.0, hi, seed.wrapping_add(2 * t + 1));
        let lhs = before.apply(&a, &b);
        let rhs = after.apply(&a, &b);
        let top = sup_norm(&lhs);
        let err = lhs.iter().zip(&rhs).map(|(u, v)| (u - v).norm()).fold(0.0, f64::max);
        pointwise_error = pointwise_error.max(if top > 0.0 { err / top } else { err });
    }
    let cfg = OpnormConfig { trials, rounds: OpnormConfig::default().rounds, seed };
    let ratio_before = opnorm_lower(&before, e, &cfg)?.ratio;
    let ratio_after = opnorm_lower(&after, e, &cfg)?.ratio;
    Ok(RescaleReport {
        j,
        rho,
        requested_scale: rescaled.requested_scale(),
        scale: rescaled.scale(),
        pointwise_error,
        ratio_before,
        ratio_after,
    })
}

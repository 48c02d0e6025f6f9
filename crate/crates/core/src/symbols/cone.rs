//! Cone split `σ = σΘ + σ⁽¹⁾ + σ⁽²⁾` and the rescaled dyadic piece `σ̃_j`.

use std::sync::Arc;

use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{contract, invalid, Result};
use crate::grid::{coord_norm, Coord};
use crate::partitions::smooth_step;
use crate::scalar::{from_usize, lit, pow2, pow2i, Real};
use crate::symbols::pieces::{PieceKind, SymbolPiece};
use crate::symbols::{SharedSymbol, Symbol};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConeRegion {
    /// `σΘ` with `Θ = 1` on `|ζ| ≤ 2` and `0` on `|ζ| ≥ 4`.
    Ball,
    /// `σ(1-Θ)Φ₁`, supported where `|ξ+η| > c|ζ|`.
    First,
    /// `σ(1-Θ)Φ₂`, supported where `|ξ| > c|ζ|`.
    Second,
}

/// One of the three parts of a cone split.
#[derive(Clone)]
pub struct ConePart<T: Real> {
    parent: SharedSymbol<T>,
    region: ConeRegion,
    c: T,
}

/// Inner threshold of the angular weights; strictly above `c` so that `supp Φ_i ⊂ V_i`.
fn inner<T: Real>(c: T) -> T {
    c * lit(1.25)
}

fn angular<T: Real>(xi: &Coord<T>, eta: &Coord<T>, dim: usize, c: T) -> (T, T) {
    let a = coord_norm(xi, dim);
    let b = coord_norm(eta, dim);
    let r = (a * a + b * b).sqrt();
    let sum = [xi[0] + eta[0], xi[1] + eta[1]];
    let t1 = coord_norm(&sum, dim) / r;
    let t2 = a / r;
    let ci = inner(c);
    (T::one() - smooth_step(t1 / ci), T::one() - smooth_step(t2 / ci))
}

impl<T: Real> ConePart<T> {
    pub fn region(&self) -> ConeRegion {
        self.region
    }

    /// Multiplier applied to the parent symbol.
    pub fn weight(&self, xi: &Coord<T>, eta: &Coord<T>) -> T {
        let dim = self.parent.dim();
        let a = coord_norm(xi, dim);
        let b = coord_norm(eta, dim);
        let theta = smooth_step((a * a + b * b).sqrt() / lit(2.0));
        match self.region {
            ConeRegion::Ball => theta,
            _ if theta == T::one() => T::zero(),
            region => {
                let (w1, w2) = angular(xi, eta, dim, self.c);
                let w = if region == ConeRegion::First { w1 } else { w2 };
                (T::one() - theta) * w / (w1 + w2)
            }
        }
    }
}

impl<T: Real> Symbol<T> for ConePart<T> {
    fn dim(&self) -> usize {
        self.parent.dim()
    }
    fn eval(&self, x: &Coord<T>, xi: &Coord<T>, eta: &Coord<T>) -> Complex<T> {
        let w = self.weight(xi, eta);
        if w == T::zero() {
            Complex::new(T::zero(), T::zero())
        } else {
            self.parent.eval(x, xi, eta) * w
        }
    }
    fn order(&self) -> T {
        self.parent.order()
    }
    fn rho(&self) -> T {
        self.parent.rho()
    }
    fn delta(&self) -> T {
        self.parent.delta()
    }
    fn is_x_independent(&self) -> bool {
        self.parent.is_x_independent()
    }
    fn support_radius(&self) -> Option<T> {
        match self.region {
            ConeRegion::Ball => Some(lit(4.0)),
            _ => self.parent.support_radius(),
        }
    }
    fn name(&self) -> String {
        format!("{:?}-part of {}", self.region, self.parent.name())
    }
}

fn covers<T: Real>(dim: usize, c: T) -> bool {
    let ci = inner(c);
    let ok = |xi: Coord<T>, eta: Coord<T>| {
        let (w1, w2) = angular(&xi, &eta, dim, c);
        w1 + w2 > T::zero() && angular_max(&xi, &eta, dim) > ci
    };
    if dim == 1 {
        (0..7200).all(|i| {
            let t = T::PI() * lit::<T>(2.0) * from_usize::<T>(i) / lit(7200.0);
            ok([t.cos(), T::zero()], [t.sin(), T::zero()])
        })
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        (0..40_000).all(|_| {
            let v: [f64; 4] = [
                StandardNormal.sample(&mut rng),
                StandardNormal.sample(&mut rng),
                StandardNormal.sample(&mut rng),
                StandardNormal.sample(&mut rng),
            ];
            ok([lit(v[0]), lit(v[1])], [lit(v[2]), lit(v[3])])
        })
    }
}

fn angular_max<T: Real>(xi: &Coord<T>, eta: &Coord<T>, dim: usize) -> T {
    let a = coord_norm(xi, dim);
    let b = coord_norm(eta, dim);
    let r = (a * a + b * b).sqrt();
    let sum = [xi[0] + eta[0], xi[1] + eta[1]];
    (coord_norm(&sum, dim) / r).max(a / r)
}

/// Splits `σ` into the ball part and the two cone parts subordinate to
/// `V₁ = {|ξ+η| > c}` and `V₂ = {|ξ| > c}` on the unit sphere.
pub fn cone_split<T: Real>(sigma: SharedSymbol<T>, c: T) -> Result<[ConePart<T>; 3]> {
    if !(c > T::zero() && c < T::one()) {
        return invalid("cone parameter must lie in (0, 1)");
    }
    if !covers(sigma.dim(), c) {
        return contract("V1 and V2 do not cover the sphere for this c");
    }
    let part = |region| ConePart { parent: sigma.clone(), region, c };
    Ok([part(ConeRegion::Ball), part(ConeRegion::First), part(ConeRegion::Second)])
}

/// `σ̃_j(x, ξ, η) = σ_j(2^{-jρ}x, 2^{jρ}ξ, 2^{jρ}η)` backed by a tabulated dyadic piece.
///
/// The scale is snapped to the power of two nearest to `2^{jρ}` so that
/// mapped points of a grid with period `2^{jρ}·L` land on the piece lattice.
#[derive(Clone, Debug)]
pub struct RescaledPiece<T: Real> {
    piece: Arc<SymbolPiece<T>>,
    j: usize,
    requested: T,
    scale: T,
}

impl<T: Real> RescaledPiece<T> {
    /// `2^{jρ}` before snapping.
    pub fn requested_scale(&self) -> T {
        self.requested
    }
    /// Power of two actually used.
    pub fn scale(&self) -> T {
        self.scale
    }
    pub fn piece(&self) -> &SymbolPiece<T> {
        &self.piece
    }
}

impl<T: Real> Symbol<T> for RescaledPiece<T> {
    fn dim(&self) -> usize {
        self.piece.grid().dim()
    }
    fn eval(&self, x: &Coord<T>, xi: &Coord<T>, eta: &Coord<T>) -> Complex<T> {
        let g = self.piece.grid();
        let snap = |v: T, step: T| (v / step).round().to_i64().unwrap_or(i64::MAX / 4);
        let s = self.scale;
        let qa = [snap(s * xi[0], g.dxi()), snap(s * xi[1], g.dxi())];
        let qb = [snap(s * eta[0], g.dxi()), snap(s * eta[1], g.dxi())];
        let row = if self.piece.is_x_independent() {
            0
        } else {
            let xf = g.flat_of_labels([snap(x[0] / s, g.dx()), snap(x[1] / s, g.dx())]);
            match self.piece.row_of_x(xf) {
                Some(r) => r,
                None => return Complex::new(T::zero(), T::zero()),
            }
        };
        self.piece.value(row, qa, qb)
    }
    fn order(&self) -> T {
        self.piece.order()
    }
    fn rho(&self) -> T {
        self.piece.rho()
    }
    fn is_x_independent(&self) -> bool {
        self.piece.is_x_independent()
    }
    fn support_radius(&self) -> Option<T> {
        Some(pow2i::<T>(self.j as i32 + 1) / self.scale)
    }
    fn name(&self) -> String {
        format!("rescaled dyadic piece j={} scale={}", self.j, self.scale)
    }
}

pub fn rescale_piece<T: Real>(sigma_j: Arc<SymbolPiece<T>>, j: usize, rho: T) -> Result<RescaledPiece<T>> {
    match sigma_j.kind() {
        PieceKind::Dyadic { j: pj } if pj == j => {}
        _ => return invalid("rescale_piece expects the dyadic piece of the same j"),
    }
    if !(rho >= T::zero() && rho < T::one()) {
        return invalid("rho must lie in [0, 1)");
    }
    if !sigma_j.covers_all_x() {
        return contract("rescaling needs a piece tabulated at every x");
    }
    let e = from_usize::<T>(j) * rho;
    let requested = pow2(e);
    let snapped = e.round().to_i32().unwrap_or(i32::MAX);
    if snapped > 60 {
        return invalid("scale overflow");
    }
    Ok(RescaledPiece { piece: sigma_j, j, requested, scale: pow2i(snapped) })
}

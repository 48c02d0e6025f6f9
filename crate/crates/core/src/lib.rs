//! Numerical toolkit for bilinear pseudo-differential operators with exotic
//! symbols on periodic grids.
//!
//! The numerical core is generic over `f32`/`f64` via [`scalar::Real`]; the
//! critical order also runs on exact rationals. The aliases below fix `f64`,
//! which is what the lab and the command line use.

// `!(x > 0)` style guards are deliberate: they reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod grid;
pub mod norms;
pub mod operators;
pub mod partitions;
pub mod scalar;
pub mod symbols;
pub mod tolerances;

pub use error::{LabError, Result};
pub use scalar::Real;

pub type Rational = num_rational::Ratio<i64>;
pub type Complex64 = num_complex::Complex<f64>;

pub type Grid = grid::GridSpec<f64>;
pub type Function = grid::SampledFunction<f64>;
pub type Piece = symbols::SymbolPiece<f64>;
pub type Kernel = symbols::KernelSlice<f64>;
pub type Exponents = norms::ExponentTriple<f64>;
pub type Pieces = norms::WeakPieces<f64>;

pub type Grid32 = grid::GridSpec<f32>;
pub type Function32 = grid::SampledFunction<f32>;
pub type Piece32 = symbols::SymbolPiece<f32>;

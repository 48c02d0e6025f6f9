//! Experiments on the localized pieces of bilinear exotic symbols: slope
//! fits, grouped L² ratios, theorem-level ratios and the inequalities they
//! rest on.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod fields;
pub mod fit;
pub mod grouped;
pub mod inequalities;
pub mod kernels;
pub mod lemmas;
pub mod rescale;
pub mod source;
pub mod theorem;

pub use fit::{Claim, FitReport, Variable};
pub use grouped::{Grouping, SeparableOperator};
pub use source::Source;

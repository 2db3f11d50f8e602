//! Numerics for the partial theta function `θ(q,x) = Σ_{j≥0} q^{j(j+1)/2} x^j`:
//! overflow-safe evaluation, zero location and counting, double-zero solving,
//! numerical replay of the inequalities bounding multiple zeros by `8^11`, and
//! deterministic parameter sweeps with JSONL persistence.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod error;
pub mod sweep;
pub mod theta;
pub mod zeros;

pub use error::{Error, Result};
pub use theta::{EvalResult, LogComplex, QParameter};

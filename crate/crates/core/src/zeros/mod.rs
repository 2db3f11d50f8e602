//! Zero location for `θ(q,·)`: argument-principle counts on circles, Newton
//! refinement, multiplicity estimates, annulus-by-annulus enumeration and the
//! two-equation solver for double zeros.

mod double;
mod locate;
mod winding;

pub use double::{
    dedupe_double_zeros, solve_double_zero, solve_double_zero_real, solve_double_zero_with, DoubleZeroOptions,
    DoubleZeroRecord, SolveMode, DEDUPE_THRESHOLD, DOUBLE_ZERO_GATE, MAX_Q_MODULUS,
};
pub use locate::{
    multiplicity_estimate, refine_zero_newton, refine_zero_seeded, zeros_up_to_k, SeedKind, ZeroRecord,
    MULTIPLICITY_RESOLUTION, RESIDUAL_GATE,
};
pub use winding::{
    winding_count, winding_detail, ContourFunction, WindingResult, DEFAULT_SAMPLES, MAX_SAMPLES, MIN_SAMPLES,
};

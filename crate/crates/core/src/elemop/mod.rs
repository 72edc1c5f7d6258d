//! Elementary operators `X -> Σ A_i X B_i` on matrix algebras.
//!
//! Approximation numbers of `M_{A,B}` for the operator norm are not
//! computed; only certified upper bounds (an explicit low-rank approximant
//! plus a residual estimate) and certified lower bounds (explicit
//! contractive compressions) are produced.

mod bounds;
mod op;
mod recover;

pub use bounds::{
    a_upper_bounds, a_upper_bounds_grid, bound_table, h_lower_bounds, norm_lower_bound, sqrt_n_lower_bound,
    verify_witness, BoundRow, CertifiedBound, Direction, TestFactors, Witness, DEFAULT_OMEGA_GRID, ENVELOPE,
};
pub use op::{hs_matrix, hs_singular_numbers, minimal_representation, ElementaryOp};
pub use recover::{recover_first_symbol, Recovery};

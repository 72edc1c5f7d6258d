//! Sequence algebra on non-negative non-increasing sequences.

mod domination;
mod lorentz;
mod sequence;
mod tensor;

pub use domination::{dominates, Domination};
pub use lorentz::{
    lorentz_norm, lorentz_tensor_check, weight_submult_constant, LorentzNorm,
    LorentzTensorReport, WeightFamily, WeightSeq,
};
pub use sequence::{
    pow_int, star_rearrange, star_rearrange_real, DecreasingSeq, Generator, TermCount,
};
pub use tensor::{tensor_prefix, tensor_prefix_indexed, top_products, TensorTerm};

mod description;
mod form;
mod invariants;
mod jordan;

pub use form::FormMatrix;
pub use invariants::{det_square_class, hasse_invariant, is_isotropic};
pub use jordan::{
    jordan_decompose, norm_exp, scale_exp, BlockTag, ComponentContent, ComponentSignature,
    JordanComponent, JordanSplitting,
};

pub(crate) use description::parse_rational_str;

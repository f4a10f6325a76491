//! Exact rational linear algebra and the floating-point spectral primitives
//! shared by the certificate modules.

mod float;
mod index_set;
mod rational;

pub use float::{
    complete_orthonormal_basis, extreme_singular_values, gram_extremes, orthonormalize,
    FloatMatrix, SPECTRAL_TOLERANCE,
};
pub use index_set::IndexSet;
pub use rational::{
    columns_dependent, null_space_basis, parse_rational, rank_exact, rational_to_string, Rational,
    RationalMatrix, RationalVector, Rref,
};

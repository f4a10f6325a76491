//! Sparse-recovery certificates for sensing matrices.
//!
//! The crate computes three quantities that decide whether every `k`-sparse
//! signal can be recovered from `y = A x`:
//!
//! - the **spark** of `A` (smallest number of linearly dependent columns),
//!   computed exactly over the rationals together with a minimal witness;
//! - the highest order of the **null space property** and estimates of its
//!   constant `C`;
//! - the tightest asymmetric **restricted isometry** constants `(alpha, beta)`
//!   for each order `k`, and the symmetric constant `delta = (beta - alpha) / (beta + alpha)`.
//!
//! On top of those, [`transforms`] models the six elementary row and column
//! operations and [`properties`] checks, trial by trial, that the five
//! non-column-addition operations leave all three certificates unchanged, while
//! column addition can break them.
//!
//! Exact questions (rank, dependence, spark, null vectors) never touch floating
//! point. Spectral quantities live in [`numeric::FloatMatrix`].
//!
//! Subset enumeration and fuzz trials run on rayon when the default `parallel`
//! feature is on; results are identical with and without it.

pub mod combinatorics;
pub mod error;
pub mod io;
pub mod nsp;
pub mod numeric;
pub mod parallel;
pub mod properties;
pub mod report;
pub mod rip;
pub mod spark;
pub mod transforms;

pub use error::{Error, Result};
pub use numeric::{FloatMatrix, IndexSet, Rational, RationalMatrix, RationalVector};
pub use spark::{spark, SparkResult, SparkValue};
pub use transforms::{ElemOp, OpKind, OpSequence};

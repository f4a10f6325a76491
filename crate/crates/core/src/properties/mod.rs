//! Differential checks of the invariance results for elementary transformations.
//!
//! Row switching, row multiplication, row addition, column switching and
//! column multiplication leave the spark and the highest NSP and RIP orders
//! unchanged. Column addition does not, and the counterexamples here build
//! explicit breaks. Every check recomputes the certificates from scratch on
//! both sides, so a `Fail` verdict means an implementation bug somewhere in
//! the certificate code, not a property of the input.

mod checks;
mod counterexamples;
mod fuzz;

use serde::Serialize;

pub use checks::{
    check_corollaries, check_nsp_constant_bound, check_order_invariance,
    check_rip_transform_bounds, check_same_linear_dependence, check_spark_invariance,
    check_zero_column_propositions, quantities, well_scaled, COROLLARY_INVERTIBLE_OPS,
    NSP_BOUND_TOL, RIP_BOUND_TOL, RIP_POSITIVE_EPS, ZERO_ALPHA_TOL,
};
pub use counterexamples::{
    check_column_addition_break, universality_counterexample, zero_column_witness, Construction,
    CounterexampleArtifact, QuantityChange, ORTHONORMALITY_TOL, UNIVERSALITY_ALPHA_TOL,
};
pub use fuzz::{
    fuzz_suite, shrink_failure, CheckCounts, FuzzConfig, FuzzReport, Reproduction,
    FUZZ_SCHEMA_VERSION,
};

use crate::combinatorics::EnumerationLimit;
use crate::numeric::RationalMatrix;
use crate::rip::DEFAULT_ALPHA_FLOOR;
use crate::spark::SparkValue;
use crate::transforms::OpSequence;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Pass,
    Fail,
    /// A certificate changed under a sequence containing a column addition.
    ExpectedBreak,
}

/// Settings shared by the checks.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CheckConfig {
    pub alpha_floor: f64,
    pub limit: EnumerationLimit,
}

impl Default for CheckConfig {
    fn default() -> Self {
        Self {
            alpha_floor: DEFAULT_ALPHA_FLOOR,
            limit: EnumerationLimit::default(),
        }
    }
}

/// The certificate fragment a check compares. Fields a check does not
/// compute stay `None`.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Quantities {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spark: Option<SparkValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nsp_order: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rip_order: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nsp_constant: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Observation {
    pub label: String,
    pub matrix: RationalMatrix,
    pub quantities: Quantities,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InvarianceCheckResult {
    pub check_id: String,
    pub ops: OpSequence,
    pub before: Observation,
    pub after: Vec<Observation>,
    pub verdict: Verdict,
    pub detail: Vec<String>,
}

impl InvarianceCheckResult {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

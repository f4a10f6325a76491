//! Exact spark with a minimal dependent-column witness.
//!
//! Subsets are scanned by ascending size and lexicographically within a size,
//! so the first dependent set found is minimal and is the lexicographically
//! smallest minimal set. For `n > m` every `m + 1` columns are dependent,
//! which caps the scan.

use std::fmt;

use num_traits::Zero;
use serde::{Serialize, Serializer};

use crate::combinatorics::EnumerationLimit;
use crate::error::Result;
use crate::numeric::{IndexSet, RationalMatrix, RationalVector};
use crate::parallel::find_first_subset;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SparkResult {
    /// The smallest dependent column set has `witness.len()` columns and
    /// `sum coefficients[i] * col[witness[i]] = 0` with every coefficient nonzero.
    Dependent {
        witness: IndexSet,
        coefficients: RationalVector,
    },
    /// No subset of columns is dependent (`rank = n <= m`).
    FullColumnRank { cols: usize },
}

/// Spark as a number, or the full-column-rank sentinel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SparkValue {
    Finite(usize),
    FullColumnRank,
}

impl SparkValue {
    pub fn finite(self) -> Option<usize> {
        match self {
            SparkValue::Finite(v) => Some(v),
            SparkValue::FullColumnRank => None,
        }
    }
}

impl fmt::Display for SparkValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SparkValue::Finite(v) => write!(f, "{v}"),
            SparkValue::FullColumnRank => f.write_str("FULL_COLUMN_RANK"),
        }
    }
}

impl Serialize for SparkValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            SparkValue::Finite(v) => s.serialize_u64(*v as u64),
            SparkValue::FullColumnRank => s.serialize_str("FULL_COLUMN_RANK"),
        }
    }
}

impl SparkResult {
    pub fn spark_value(&self) -> SparkValue {
        match self.value() {
            Some(v) => SparkValue::Finite(v),
            None => SparkValue::FullColumnRank,
        }
    }

    /// The spark, or `None` for full column rank.
    pub fn value(&self) -> Option<usize> {
        match self {
            SparkResult::Dependent { witness, .. } => Some(witness.len()),
            SparkResult::FullColumnRank { .. } => None,
        }
    }

    pub fn witness(&self) -> Option<&IndexSet> {
        match self {
            SparkResult::Dependent { witness, .. } => Some(witness),
            SparkResult::FullColumnRank { .. } => None,
        }
    }

    pub fn coefficients(&self) -> Option<&RationalVector> {
        match self {
            SparkResult::Dependent { coefficients, .. } => Some(coefficients),
            SparkResult::FullColumnRank { .. } => None,
        }
    }

    pub fn cols(&self) -> usize {
        match self {
            SparkResult::Dependent { witness, .. } => witness.universe(),
            SparkResult::FullColumnRank { cols } => *cols,
        }
    }

    /// Highest order `k` of the null space property: `spark - 1`, or `n` when
    /// no columns are dependent.
    pub fn highest_order(&self) -> usize {
        match self.value() {
            Some(s) => s - 1,
            None => self.cols(),
        }
    }

    /// Length-`n` null vector supported on the witness.
    pub fn sparse_null_vector(&self) -> Option<RationalVector> {
        let SparkResult::Dependent {
            witness,
            coefficients,
        } = self
        else {
            return None;
        };
        let mut h = vec![Zero::zero(); witness.universe()];
        for (&i, c) in witness.indices().iter().zip(coefficients) {
            h[i] = c.clone();
        }
        Some(h)
    }
}

pub fn spark(a: &RationalMatrix) -> Result<SparkResult> {
    spark_with_limit(a, EnumerationLimit::default())
}

pub fn spark_with_limit(a: &RationalMatrix, limit: EnumerationLimit) -> Result<SparkResult> {
    let (m, n) = a.shape();
    limit.check(n)?;
    // a single pass answers the full-column-rank case without enumeration
    if n <= m && a.rank() == n {
        return Ok(SparkResult::FullColumnRank { cols: n });
    }
    for size in 1..=n.min(m + 1) {
        if let Some(cols) = find_first_subset(n, size, |s| a.columns_dependent(s)) {
            let sub = a.select_columns(&cols);
            let mut basis = sub.null_space_basis();
            debug_assert_eq!(basis.len(), 1, "minimal dependent set has nullity 1");
            let coefficients = basis.swap_remove(0);
            debug_assert!(coefficients.iter().all(|c| !c.is_zero()));
            return Ok(SparkResult::Dependent {
                witness: IndexSet::new(cols, n)?,
                coefficients,
            });
        }
    }
    unreachable!("rank < n implies some dependent subset of size <= min(n, m + 1)")
}

/// Largest `k` with `spark > 2k`; full column rank maps to `floor(n / 2)`.
pub fn exact_recovery_sparsity(s: &SparkResult) -> usize {
    match s.value() {
        Some(v) => (v - 1) / 2,
        None => s.cols() / 2,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::Rational;

    fn m(rows: usize, cols: usize, e: &[i64]) -> RationalMatrix {
        RationalMatrix::from_i64(rows, cols, e).unwrap()
    }

    #[test]
    fn zero_column_gives_spark_one() {
        let s = spark(&m(2, 3, &[1, 0, 2, 3, 0, 1])).unwrap();
        assert_eq!(s.value(), Some(1));
        assert_eq!(s.witness().unwrap().indices(), &[1]);
    }

    #[test]
    fn duplicate_columns() {
        let s = spark(&m(1, 2, &[1, 1])).unwrap();
        assert_eq!(s.value(), Some(2));
        assert_eq!(s.witness().unwrap().indices(), &[0, 1]);
    }

    #[test]
    fn three_column_dependence() {
        let a = m(2, 3, &[1, 0, 1, 0, 1, 1]);
        let s = spark(&a).unwrap();
        assert_eq!(s.value(), Some(3));
        assert_eq!(s.witness().unwrap().indices(), &[0, 1, 2]);
        let c = s.coefficients().unwrap();
        // proportional to (1, 1, -1)
        assert_eq!(&c[0], &c[1]);
        assert_eq!(&c[2], &-c[0].clone());
        let h = s.sparse_null_vector().unwrap();
        assert!(a.mul_vec(&h).unwrap().iter().all(Zero::is_zero));
    }

    #[test]
    fn identity_is_full_column_rank() {
        let s = spark(&RationalMatrix::identity(3).unwrap()).unwrap();
        assert_eq!(s, SparkResult::FullColumnRank { cols: 3 });
        assert_eq!(s.highest_order(), 3);
        assert_eq!(exact_recovery_sparsity(&s), 1);
    }

    #[test]
    fn tall_rank_deficient_matrix_is_not_full_rank() {
        // 3x2 with parallel columns
        let s = spark(&m(3, 2, &[1, 2, 1, 2, 1, 2])).unwrap();
        assert_eq!(s.value(), Some(2));
    }

    #[test]
    fn witness_is_lexicographically_smallest() {
        // cols 1,3 parallel and cols 2,4 parallel; {1,3} comes first
        let a = m(2, 5, &[1, 1, 0, 2, 0, 1, 0, 1, 0, 3]);
        let s = spark(&a).unwrap();
        assert_eq!(s.witness().unwrap().indices(), &[1, 3]);
    }

    #[test]
    fn recovery_sparsity_examples() {
        let dep = |v: usize| SparkResult::Dependent {
            witness: IndexSet::new((0..v).collect(), 8).unwrap(),
            coefficients: vec![Rational::from_integer(1.into()); v],
        };
        assert_eq!(exact_recovery_sparsity(&dep(5)), 2);
        assert_eq!(exact_recovery_sparsity(&dep(1)), 0);
        assert_eq!(exact_recovery_sparsity(&dep(2)), 0);
    }

    #[test]
    fn guard_applies_to_wide_input() {
        let a = RationalMatrix::from_i64(1, 25, &[1; 25]).unwrap();
        assert!(spark(&a).is_err());
        let forced = spark_with_limit(&a, EnumerationLimit::FORCED).unwrap();
        assert_eq!(forced.value(), Some(2));
    }
}

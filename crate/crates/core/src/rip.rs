//! Tightest asymmetric restricted isometry constants by exhaustive enumeration.
//!
//! For order `k`, `alpha_k` is the smallest and `beta_k` the largest squared
//! singular value over all `C(n, k)` column submatrices, so
//! `alpha_k |x|^2 <= |A x|^2 <= beta_k |x|^2` for every `k`-sparse `x`.

use std::cmp::Ordering;

use serde::Serialize;

use crate::combinatorics::{unrank, EnumerationLimit};
use crate::error::{Error, Result};
use crate::numeric::{gram_extremes, FloatMatrix, IndexSet};
use crate::parallel::reduce_subsets;

/// Squared smallest singular values at or below this count as zero.
pub const DEFAULT_ALPHA_FLOOR: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RipConstants {
    pub order: usize,
    pub alpha: f64,
    pub beta: f64,
    pub delta: f64,
    pub argmin_set: IndexSet,
    pub argmax_set: IndexSet,
}

impl RipConstants {
    /// `(beta - alpha) / (beta + alpha)`: the symmetric constant after
    /// rescaling both sides by `2 / (alpha + beta)`.
    pub fn symmetric_delta(alpha: f64, beta: f64) -> f64 {
        (beta - alpha) / (beta + alpha)
    }
}

#[derive(Clone, Copy)]
struct Extremes {
    lo: (f64, u64),
    hi: (f64, u64),
}

fn lower(a: (f64, u64), b: (f64, u64)) -> (f64, u64) {
    match a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)) {
        Ordering::Greater => b,
        _ => a,
    }
}

fn higher(a: (f64, u64), b: (f64, u64)) -> (f64, u64) {
    match b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)) {
        Ordering::Greater => b,
        _ => a,
    }
}

pub fn rip_constants(a: &FloatMatrix, k: usize) -> Result<RipConstants> {
    rip_constants_with_limit(a, k, EnumerationLimit::default())
}

pub fn rip_constants_with_limit(
    a: &FloatMatrix,
    k: usize,
    limit: EnumerationLimit,
) -> Result<RipConstants> {
    let n = a.cols();
    if k == 0 || k > n {
        return Err(Error::OrderOutOfRange { k, n });
    }
    limit.check(n)?;
    if a.is_zero() {
        return Err(Error::ZeroMatrix);
    }
    let best = reduce_subsets(
        n,
        k,
        |rank, cols| {
            let (lo, hi) = gram_extremes(&a.select_columns(cols));
            Extremes {
                lo: (lo, rank),
                hi: (hi, rank),
            }
        },
        |x, y| Extremes {
            lo: lower(x.lo, y.lo),
            hi: higher(x.hi, y.hi),
        },
    )
    .expect("at least one subset for 1 <= k <= n");
    let (alpha, beta) = (best.lo.0, best.hi.0);
    Ok(RipConstants {
        order: k,
        alpha,
        beta,
        delta: RipConstants::symmetric_delta(alpha, beta),
        argmin_set: IndexSet::new(unrank(n, k, best.lo.1), n)?,
        argmax_set: IndexSet::new(unrank(n, k, best.hi.1), n)?,
    })
}

/// Constants for `k = 1..=k_max`.
pub fn rip_table(
    a: &FloatMatrix,
    k_max: usize,
    limit: EnumerationLimit,
) -> Result<Vec<RipConstants>> {
    (1..=k_max.min(a.cols()))
        .map(|k| rip_constants_with_limit(a, k, limit))
        .collect()
}

pub fn highest_rip_order(a: &FloatMatrix, alpha_floor: f64) -> Result<usize> {
    highest_rip_order_with_limit(a, alpha_floor, EnumerationLimit::default())
}

/// Largest `k` with `alpha_k > alpha_floor`, scanning upward from 1. Orders
/// above the row count are skipped: more than `m` columns are always dependent.
pub fn highest_rip_order_with_limit(
    a: &FloatMatrix,
    alpha_floor: f64,
    limit: EnumerationLimit,
) -> Result<usize> {
    if !(alpha_floor > 0.0 && alpha_floor.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "alpha floor must be positive and finite, got {alpha_floor}"
        )));
    }
    if a.is_zero() {
        return Ok(0);
    }
    let mut order = 0;
    for k in 1..=a.cols().min(a.rows()) {
        if rip_constants_with_limit(a, k, limit)?.alpha > alpha_floor {
            order = k;
        } else {
            break;
        }
    }
    Ok(order)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(rows: usize, cols: usize, e: &[f64]) -> FloatMatrix {
        FloatMatrix::from_row_major(rows, cols, e.to_vec()).unwrap()
    }

    #[test]
    fn identity_order_one() {
        let r = rip_constants(&FloatMatrix::identity(2), 1).unwrap();
        assert_eq!((r.alpha, r.beta, r.delta), (1.0, 1.0, 0.0));
        assert_eq!(r.argmin_set.indices(), &[0]);
    }

    #[test]
    fn diagonal_order_one() {
        let r = rip_constants(&f(2, 2, &[1.0, 0.0, 0.0, 2.0]), 1).unwrap();
        assert_eq!((r.alpha, r.beta), (1.0, 4.0));
        assert!((r.delta - 0.6).abs() < 1e-15);
        assert_eq!(r.argmin_set.indices(), &[0]);
        assert_eq!(r.argmax_set.indices(), &[1]);
    }

    #[test]
    fn zero_column_kills_order_one() {
        let r = rip_constants(&f(2, 3, &[1.0, 0.0, 2.0, 3.0, 0.0, 1.0]), 1).unwrap();
        assert_eq!(r.alpha, 0.0);
        assert_eq!(r.delta, 1.0);
        assert_eq!(r.argmin_set.indices(), &[1]);
    }

    #[test]
    fn rejects_bad_orders_and_zero_matrix() {
        let a = FloatMatrix::identity(2);
        assert!(matches!(
            rip_constants(&a, 0),
            Err(Error::OrderOutOfRange { .. })
        ));
        assert!(matches!(
            rip_constants(&a, 3),
            Err(Error::OrderOutOfRange { .. })
        ));
        let z = f(1, 2, &[0.0, 0.0]);
        assert!(matches!(rip_constants(&z, 1), Err(Error::ZeroMatrix)));
    }

    #[test]
    fn highest_order_examples() {
        assert_eq!(
            highest_rip_order(&FloatMatrix::identity(3), DEFAULT_ALPHA_FLOOR).unwrap(),
            3
        );
        let z = f(2, 2, &[0.0, 1.0, 0.0, 2.0]);
        assert_eq!(highest_rip_order(&z, DEFAULT_ALPHA_FLOOR).unwrap(), 0);
        // columns e1, e2, e1+e2: spark 3
        let a = f(2, 3, &[1.0, 0.0, 1.0, 0.0, 1.0, 1.0]);
        assert_eq!(highest_rip_order(&a, DEFAULT_ALPHA_FLOOR).unwrap(), 2);
        assert!(highest_rip_order(&a, 0.0).is_err());
    }

    #[test]
    fn duplicate_columns_order_two_fails() {
        let a = f(1, 2, &[1.0, 1.0]);
        let r1 = rip_constants(&a, 1).unwrap();
        assert_eq!((r1.alpha, r1.beta, r1.delta), (1.0, 1.0, 0.0));
        let r2 = rip_constants(&a, 2).unwrap();
        assert!(r2.alpha.abs() < 1e-15);
        assert!((r2.beta - 2.0).abs() < 1e-12);
        assert!((r2.delta - 1.0).abs() < 1e-12);
    }

    #[test]
    fn scaling_preserves_delta() {
        let a = f(2, 3, &[1.0, 2.0, -1.0, 0.5, 1.0, 3.0]);
        let b = a.scaled(-3.0).unwrap();
        for k in 1..=2 {
            let (x, y) = (rip_constants(&a, k).unwrap(), rip_constants(&b, k).unwrap());
            assert!((y.alpha - 9.0 * x.alpha).abs() <= 1e-10 * y.beta);
            assert!((y.beta - 9.0 * x.beta).abs() <= 1e-10 * y.beta);
            assert!((y.delta - x.delta).abs() <= 1e-10);
        }
    }
}

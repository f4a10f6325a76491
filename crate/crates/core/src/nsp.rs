//! Null space property: highest order, failure certificates and the constant `C`.
//!
//! `A` has the NSP of order `k` with constant `C` when
//! `|h_L|_2 <= C |h_{L^c}|_1 / sqrt(k)` for every null vector `h` and every
//! index set `L` with `|L| <= k`. The smallest such `C` is the supremum of
//! `sqrt(k) |h_L|_2 / |h_{L^c}|_1`, which for a fixed `h` is reached by taking
//! `L` to be the `k` largest magnitudes.
//!
//! The highest order is reported as `spark - 1`: a null vector supported on
//! the spark witness rules out order `spark`, and below the spark the ratio is
//! bounded on the compact unit sphere of the null space.

use std::collections::BTreeMap;

use nalgebra::DVector;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{orthonormalize, IndexSet, Rational, RationalMatrix, RationalVector};
use crate::parallel::map_indexed;
use crate::spark::{spark, SparkResult};

/// Agreement required between the closed form and the subset enumeration.
pub const EXACT_AGREEMENT_TOL: f64 = 1e-12;

/// Largest column count for which the closed form is cross-checked by
/// enumerating every `|L| <= k`.
pub const BRUTE_FORCE_MAX_COLS: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EstimateKind {
    Exact,
    LowerBound,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConstantEstimate {
    pub value: f64,
    pub kind: EstimateKind,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NspReport {
    /// 0 means no order is satisfied.
    pub highest_order: usize,
    /// A `(highest_order + 1)`-sparse null vector, when the spark is finite.
    pub failure_certificate: Option<RationalVector>,
    pub constant_estimates: BTreeMap<usize, ConstantEstimate>,
}

pub fn highest_nsp_order(a: &RationalMatrix) -> Result<usize> {
    Ok(spark(a)?.highest_order())
}

/// A nonzero null vector with at most `k` nonzeros, if one exists.
pub fn nsp_failure_certificate(a: &RationalMatrix, k: usize) -> Result<Option<RationalVector>> {
    failure_certificate_from(&spark(a)?, k)
}

pub(crate) fn failure_certificate_from(
    s: &SparkResult,
    k: usize,
) -> Result<Option<RationalVector>> {
    if k == 0 {
        return Err(Error::OrderOutOfRange { k, n: s.cols() });
    }
    Ok(match s.value() {
        Some(v) if v <= k => s.sparse_null_vector(),
        _ => None,
    })
}

/// `sqrt(k) |h_L|_2 / |h_{L^c}|_1` for `L` = the `k` largest magnitudes.
/// Invariant under scaling `h`. Infinite when `h` is `k`-sparse and nonzero.
pub fn nsp_ratio(h: &[f64], k: usize) -> f64 {
    let mut mags: Vec<f64> = h.iter().map(|v| v.abs()).collect();
    mags.sort_by(|a, b| b.total_cmp(a));
    let take = k.min(mags.len());
    let head: f64 = mags[..take].iter().map(|v| v * v).sum::<f64>().sqrt();
    let tail: f64 = mags[take..].iter().sum();
    if head == 0.0 {
        return 0.0;
    }
    (k as f64).sqrt() * head / tail
}

/// Squared ratio `k |h_L|_2^2 / |h_{L^c}|_1^2` for an explicit `L`, exactly.
fn squared_ratio_exact(h: &[Rational], set: &[bool], k: usize) -> Option<Rational> {
    let mut head = Rational::zero();
    let mut tail = Rational::zero();
    for (v, &inside) in h.iter().zip(set) {
        if inside {
            head += v * v;
        } else {
            tail += v.abs();
        }
    }
    if tail.is_zero() {
        return None;
    }
    Some(head * Rational::from_integer(k.into()) / (&tail * &tail))
}

fn top_k_mask(h: &[Rational], k: usize) -> Vec<bool> {
    let mut order: Vec<usize> = (0..h.len()).collect();
    // stable: ties keep the lower index
    order.sort_by(|&i, &j| h[j].abs().cmp(&h[i].abs()));
    let mut mask = vec![false; h.len()];
    for &i in order.iter().take(k) {
        mask[i] = true;
    }
    mask
}

/// Exact squared constant by enumerating every `L` with `1 <= |L| <= k`.
fn brute_force_squared(h: &[Rational], k: usize) -> Option<Rational> {
    let n = h.len();
    let mut best = Rational::zero();
    for size in 1..=k.min(n) {
        let mut subset: Vec<usize> = (0..size).collect();
        loop {
            let mut mask = vec![false; n];
            for &i in &subset {
                mask[i] = true;
            }
            let r = squared_ratio_exact(h, &mask, k)?;
            if r > best {
                best = r;
            }
            if !crate::combinatorics::next_combination(&mut subset, n) {
                break;
            }
        }
    }
    Some(best)
}

fn sqrt_of(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::INFINITY).sqrt()
}

/// Smallest NSP constant of order `k` for a matrix with a one-dimensional null space.
pub fn nsp_constant_exact_nullity1(a: &RationalMatrix, k: usize) -> Result<f64> {
    let s = spark(a)?;
    exact_nullity1_with(a, &s, k)
}

pub(crate) fn exact_nullity1_with(a: &RationalMatrix, s: &SparkResult, k: usize) -> Result<f64> {
    let basis = a.null_space_basis();
    if basis.len() != 1 {
        return Err(Error::NullityNotOne(basis.len()));
    }
    check_below_spark(s, k)?;
    let h = &basis[0];
    let closed = squared_ratio_exact(h, &top_k_mask(h, k), k)
        .ok_or_else(|| Error::Internal("top-k complement vanished below the spark".into()))?;
    if a.cols() <= BRUTE_FORCE_MAX_COLS {
        let brute = brute_force_squared(h, k)
            .ok_or_else(|| Error::Internal("subset complement vanished below the spark".into()))?;
        let (c, b) = (sqrt_of(&closed), sqrt_of(&brute));
        if (c - b).abs() > EXACT_AGREEMENT_TOL * c.max(1.0) {
            return Err(Error::Internal(format!(
                "closed-form NSP constant {c} disagrees with enumeration {b}"
            )));
        }
    }
    Ok(sqrt_of(&closed))
}

fn check_below_spark(s: &SparkResult, k: usize) -> Result<()> {
    if k == 0 || k > s.cols() {
        return Err(Error::OrderOutOfRange { k, n: s.cols() });
    }
    match s.value() {
        Some(v) if k >= v => Err(Error::OrderNotBelowSpark { k, spark: v }),
        _ => Ok(()),
    }
}

/// Seeded sampling lower bound on the smallest NSP constant of order `k`.
///
/// Sample `i` draws standard-normal coordinates over an orthonormal null-space
/// basis from a ChaCha8 stream `(seed, i)`, so a run with more samples extends
/// the one with fewer and the result does not depend on the worker count.
pub fn nsp_constant_lower_bound(
    a: &RationalMatrix,
    k: usize,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    let s = spark(a)?;
    lower_bound_with(a, &s, k, samples, seed)
}

pub(crate) fn lower_bound_with(
    a: &RationalMatrix,
    s: &SparkResult,
    k: usize,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    let basis = a.null_space_basis();
    if basis.is_empty() {
        return Err(Error::TrivialNullSpace);
    }
    check_below_spark(s, k)?;
    let float_basis: Vec<DVector<f64>> = basis
        .iter()
        .map(|v| DVector::from_iterator(v.len(), v.iter().map(|x| x.to_f64().unwrap_or(0.0))))
        .collect();
    let q = orthonormalize(&float_basis);
    let n = a.cols();
    let ratios = map_indexed(samples, |i| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        let mut h = DVector::<f64>::zeros(n);
        for qj in &q {
            let z: f64 = StandardNormal.sample(&mut rng);
            h.axpy(z, qj, 1.0);
        }
        let norm = h.norm();
        if norm == 0.0 {
            return 0.0;
        }
        h /= norm;
        nsp_ratio(h.as_slice(), k)
    });
    Ok(ratios.into_iter().fold(0.0, f64::max))
}

/// Highest order, failure certificate and per-order constants for `k = 1..=k_max`
/// below the spark. Nullity 0 gives no constants (the inequality is vacuous);
/// nullity 1 gives exact values; larger null spaces give sampling lower bounds.
pub fn nsp_report(
    a: &RationalMatrix,
    s: &SparkResult,
    k_max: usize,
    samples: usize,
    seed: u64,
) -> Result<NspReport> {
    let highest_order = s.highest_order();
    let failure_certificate = s.sparse_null_vector();
    let nullity = a.nullity();
    let mut constant_estimates = BTreeMap::new();
    if nullity > 0 {
        for k in 1..=highest_order.min(k_max) {
            let est = if nullity == 1 {
                ConstantEstimate {
                    value: exact_nullity1_with(a, s, k)?,
                    kind: EstimateKind::Exact,
                }
            } else {
                ConstantEstimate {
                    value: lower_bound_with(a, s, k, samples, seed)?,
                    kind: EstimateKind::LowerBound,
                }
            };
            constant_estimates.insert(k, est);
        }
    }
    Ok(NspReport {
        highest_order,
        failure_certificate,
        constant_estimates,
    })
}

/// Ratio for an explicit index set, in floating point.
pub fn nsp_ratio_for_set(h: &[f64], set: &IndexSet, k: usize) -> f64 {
    let head: f64 = set
        .indices()
        .iter()
        .map(|&i| h[i] * h[i])
        .sum::<f64>()
        .sqrt();
    let tail: f64 = set.complement().indices().iter().map(|&i| h[i].abs()).sum();
    (k as f64).sqrt() * head / tail
}

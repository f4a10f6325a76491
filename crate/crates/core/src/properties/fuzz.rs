//! Seeded batch driver over the invariance checks, with shrinking.

use std::collections::BTreeMap;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::checks::{
    check_order_invariance, check_rip_transform_bounds, check_same_linear_dependence,
    check_spark_invariance, quantities, well_scaled, RIP_BOUND_TOL,
};
use super::{CheckConfig, Verdict};
use crate::error::{Error, Result};
use crate::numeric::{IndexSet, RationalMatrix};
use crate::parallel::map_indexed;
use crate::transforms::{
    default_coefficient_pool, random_sequence_with, shrink_toward_zero, OpKind, OpSequence,
};

pub const FUZZ_SCHEMA_VERSION: u32 = 1;

const SPARK: &str = "spark_invariance";
const ORDERS: &str = "highest_order_invariance";
const DEPENDENCE: &str = "same_linear_dependence";
const RIP_BOUNDS: &str = "rip_transform_bounds";

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FuzzConfig {
    pub shapes: Vec<(usize, usize)>,
    pub entry_min: i64,
    pub entry_max: i64,
    pub kinds: Vec<OpKind>,
    pub ops_per_trial: usize,
    pub trials: usize,
    pub seed: u64,
    pub alpha_floor: f64,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        Self {
            shapes: vec![(4, 8)],
            entry_min: -3,
            entry_max: 3,
            kinds: OpKind::PRESERVING.to_vec(),
            ops_per_trial: 12,
            trials: 200,
            seed: 42,
            alpha_floor: crate::rip::DEFAULT_ALPHA_FLOOR,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CheckCounts {
    pub pass: usize,
    pub fail: usize,
    pub expected_break: usize,
}

/// Smallest failing case found, replayable from `seed` and `trial`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Reproduction {
    pub check_id: String,
    pub seed: u64,
    pub trial: usize,
    pub matrix: RationalMatrix,
    pub ops: Vec<String>,
    pub original_ops: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FuzzReport {
    pub schema_version: u32,
    pub config: FuzzConfig,
    pub checks: BTreeMap<String, CheckCounts>,
    pub all_passed: bool,
    pub reproduction: Option<Reproduction>,
}

struct Trial {
    matrix: RationalMatrix,
    ops: OpSequence,
    subset: IndexSet,
}

fn generate(cfg: &FuzzConfig, index: usize) -> Result<Trial> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(index as u64);
    let &(m, n) = cfg
        .shapes
        .choose(&mut rng)
        .ok_or(Error::EmptyInput("fuzz shapes"))?;
    let entries: Vec<i64> = (0..m * n)
        .map(|_| rng.random_range(cfg.entry_min..=cfg.entry_max))
        .collect();
    let matrix = RationalMatrix::from_i64(m, n, &entries)?;
    let ops = random_sequence_with(
        &mut rng,
        (m, n),
        &cfg.kinds,
        &default_coefficient_pool(),
        cfg.ops_per_trial,
    )?;
    let size = rng.random_range(1..=n.min(m + 1));
    let mut picked: Vec<usize> = rand::seq::index::sample(&mut rng, n, size).into_vec();
    picked.sort_unstable();
    Ok(Trial {
        matrix,
        ops,
        subset: IndexSet::new(picked, n)?,
    })
}

fn row_part(ops: &OpSequence) -> OpSequence {
    let rows = ops.ops().iter().filter(|o| o.is_row()).cloned().collect();
    OpSequence::new(ops.shape(), rows).expect("subsequence of a valid sequence")
}

/// Outcome of one named check on one `(A, ops)` pair.
fn run_check(
    check: &str,
    a: &RationalMatrix,
    ops: &OpSequence,
    subset: &IndexSet,
    cfg: &CheckConfig,
) -> Result<Verdict> {
    let pass = |ok: bool| if ok { Verdict::Pass } else { Verdict::Fail };
    match check {
        SPARK | ORDERS if ops.contains_col_add() => {
            let b = ops.apply_all(a)?;
            let (qa, qb) = (quantities(a, cfg)?, quantities(&b, cfg)?);
            let same = if check == SPARK {
                qa.spark == qb.spark
            } else {
                qa.nsp_order == qb.nsp_order && qa.rip_order == qb.rip_order
            };
            Ok(if same {
                Verdict::Pass
            } else {
                Verdict::ExpectedBreak
            })
        }
        SPARK => Ok(check_spark_invariance(a, ops, cfg)?.verdict),
        ORDERS => Ok(check_order_invariance(a, ops, cfg)?.verdict),
        DEPENDENCE => Ok(pass(check_same_linear_dependence(
            a,
            &row_part(ops),
            subset,
        )?)),
        RIP_BOUNDS => {
            let Some(op) = ops.ops().iter().find(|o| o.kind() != OpKind::ColAdd) else {
                return Ok(Verdict::Pass);
            };
            let fa = well_scaled(a)?;
            if fa.is_zero() {
                return Ok(Verdict::Pass);
            }
            Ok(check_rip_transform_bounds(&fa, op, 1, RIP_BOUND_TOL, cfg)?.verdict)
        }
        other => Err(Error::Internal(format!("unknown check {other}"))),
    }
}

const CHECKS: [&str; 4] = [SPARK, ORDERS, DEPENDENCE, RIP_BOUNDS];

/// Shrink a failing `(A, ops)`: drop operations from the tail while the
/// failure persists, then move each entry toward zero (row-major order, one
/// step at a time) while the failure persists.
pub fn shrink_failure<F>(
    a: &RationalMatrix,
    ops: &OpSequence,
    fails: F,
) -> (RationalMatrix, OpSequence)
where
    F: Fn(&RationalMatrix, &OpSequence) -> bool,
{
    let mut ops = ops.clone();
    while !ops.is_empty() && fails(a, &ops.prefix(ops.len() - 1)) {
        ops = ops.prefix(ops.len() - 1);
    }
    let mut a = a.clone();
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            while let Some(smaller) = shrink_toward_zero(a.get(i, j)) {
                let mut candidate = a.clone();
                candidate.set(i, j, smaller);
                if fails(&candidate, &ops) {
                    a = candidate;
                } else {
                    break;
                }
            }
        }
    }
    (a, ops)
}

/// Run `cfg.trials` seeded trials. Trial `i` draws from ChaCha8 stream `i` of
/// `cfg.seed`, so the report does not depend on the worker count. The first
/// failing trial (lowest index) is shrunk into the reproduction.
pub fn fuzz_suite(cfg: &FuzzConfig) -> Result<FuzzReport> {
    if cfg.trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    if cfg.entry_min > cfg.entry_max {
        return Err(Error::InvalidParameter(
            "entry_min exceeds entry_max".into(),
        ));
    }
    let check_cfg = CheckConfig {
        alpha_floor: cfg.alpha_floor,
        ..CheckConfig::default()
    };
    let outcomes = map_indexed(cfg.trials, |i| -> Result<Vec<Verdict>> {
        let t = generate(cfg, i)?;
        CHECKS
            .iter()
            .map(|c| run_check(c, &t.matrix, &t.ops, &t.subset, &check_cfg))
            .collect()
    });

    let mut checks: BTreeMap<String, CheckCounts> = CHECKS
        .iter()
        .map(|c| (c.to_string(), CheckCounts::default()))
        .collect();
    let mut first_failure: Option<(usize, &str)> = None;
    for (i, outcome) in outcomes.into_iter().enumerate() {
        for (check, verdict) in CHECKS.iter().zip(outcome?) {
            let counts = checks.get_mut(*check).unwrap();
            match verdict {
                Verdict::Pass => counts.pass += 1,
                Verdict::ExpectedBreak => counts.expected_break += 1,
                Verdict::Fail => {
                    counts.fail += 1;
                    first_failure.get_or_insert((i, check));
                }
            }
        }
    }

    let reproduction = match first_failure {
        None => None,
        Some((trial, check)) => {
            let t = generate(cfg, trial)?;
            let fails = |a: &RationalMatrix, ops: &OpSequence| {
                matches!(
                    run_check(check, a, ops, &t.subset, &check_cfg),
                    Ok(Verdict::Fail)
                )
            };
            let (matrix, ops) = shrink_failure(&t.matrix, &t.ops, fails);
            Some(Reproduction {
                check_id: check.to_string(),
                seed: cfg.seed,
                trial,
                matrix,
                ops: ops.ops().iter().map(ToString::to_string).collect(),
                original_ops: t.ops.len(),
            })
        }
    };

    Ok(FuzzReport {
        schema_version: FUZZ_SCHEMA_VERSION,
        config: cfg.clone(),
        all_passed: reproduction.is_none(),
        checks,
        reproduction,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::Rational;
    use crate::transforms::ElemOp;
    use num_traits::Zero;

    fn coefficient(v: i64) -> Rational {
        Rational::from_integer(v.into())
    }

    fn small(trials: usize, kinds: Vec<OpKind>) -> FuzzConfig {
        FuzzConfig {
            shapes: vec![(3, 5), (2, 4)],
            trials,
            kinds,
            ops_per_trial: 6,
            ..FuzzConfig::default()
        }
    }

    #[test]
    fn preserving_kinds_always_pass() {
        let r = fuzz_suite(&small(30, OpKind::PRESERVING.to_vec())).unwrap();
        assert!(r.all_passed);
        for counts in r.checks.values() {
            assert_eq!(counts.pass, 30);
        }
    }

    #[test]
    fn column_addition_is_never_a_failure() {
        let r = fuzz_suite(&small(40, vec![OpKind::ColAdd])).unwrap();
        assert!(r.all_passed);
        let s = r.checks[SPARK];
        assert_eq!(s.fail, 0);
        assert_eq!(s.pass + s.expected_break, 40);
    }

    #[test]
    fn replay_is_identical() {
        let cfg = FuzzConfig {
            trials: 1,
            ..FuzzConfig::default()
        };
        assert_eq!(fuzz_suite(&cfg).unwrap(), fuzz_suite(&cfg).unwrap());
    }

    #[test]
    fn shrinking_drops_ops_and_entries() {
        let a = RationalMatrix::from_i64(2, 2, &[3, -2, 5, 1]).unwrap();
        let ops = OpSequence::new(
            (2, 2),
            vec![
                ElemOp::row_switch(0, 1).unwrap(),
                ElemOp::col_switch(0, 1).unwrap(),
                ElemOp::row_mult(0, coefficient(2)).unwrap(),
            ],
        )
        .unwrap();
        // synthetic failure: at least one op and entry (1, 0) at least 2
        let fails = |a: &RationalMatrix, ops: &OpSequence| {
            !ops.is_empty() && *a.get(1, 0) >= coefficient(2)
        };
        let (a2, ops2) = shrink_failure(&a, &ops, fails);
        assert_eq!(ops2.len(), 1);
        assert_eq!(*a2.get(1, 0), coefficient(2));
        assert!(a2.get(0, 0).is_zero() && a2.get(0, 1).is_zero() && a2.get(1, 1).is_zero());
    }

    #[test]
    fn bad_configs_rejected() {
        assert!(fuzz_suite(&FuzzConfig {
            trials: 0,
            ..FuzzConfig::default()
        })
        .is_err());
        assert!(fuzz_suite(&FuzzConfig {
            entry_min: 2,
            entry_max: 1,
            ..FuzzConfig::default()
        })
        .is_err());
    }
}

use nalgebra::{DMatrix, DVector};
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use super::{quantities, CheckConfig};
use crate::error::{Error, Result};
use crate::numeric::{complete_orthonormal_basis, FloatMatrix, Rational, RationalMatrix};
use crate::rip::rip_constants_with_limit;
use crate::spark::{spark_with_limit, SparkValue};
use crate::transforms::{ElemOp, OpSequence};

/// `max |Phi^T Phi - I|` allowed for the constructed orthonormal matrix.
pub const ORTHONORMALITY_TOL: f64 = 1e-10;
/// `alpha_1(A Phi)` must be at most this.
pub const UNIVERSALITY_ALPHA_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Construction {
    Ops {
        ops: OpSequence,
    },
    Orthonormal {
        phi: FloatMatrix,
        orthogonality_error: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "quantity", rename_all = "snake_case")]
pub enum QuantityChange {
    Spark {
        before: SparkValue,
        after: SparkValue,
    },
    HighestNspOrder {
        before: usize,
        after: usize,
    },
    HighestRipOrder {
        before: usize,
        after: usize,
    },
    Alpha1 {
        before: f64,
        after: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CounterexampleArtifact {
    pub description: String,
    pub input: RationalMatrix,
    pub construction: Construction,
    pub broken: Vec<QuantityChange>,
}

impl CounterexampleArtifact {
    /// Rebuild the transformed matrix and confirm every recorded change:
    /// exactly for spark and orders, within [`UNIVERSALITY_ALPHA_TOL`] for `alpha_1`.
    pub fn replay(&self, cfg: &CheckConfig) -> Result<bool> {
        match &self.construction {
            Construction::Ops { ops } => {
                let after = ops.apply_all(&self.input)?;
                let changes = exact_changes(&self.input, &after, cfg)?;
                Ok(self.broken.iter().all(|c| changes.contains(c)))
            }
            Construction::Orthonormal {
                phi,
                orthogonality_error,
            } => {
                let err = orthogonality_error_of(phi.as_dmatrix());
                if err > ORTHONORMALITY_TOL || err != *orthogonality_error {
                    return Ok(false);
                }
                let (before, after) = alpha_pair(&self.input, phi, cfg)?;
                Ok(self.broken.iter().all(|c| match c {
                    QuantityChange::Alpha1 {
                        before: b,
                        after: a,
                    } => *b == before && *a == after && after <= UNIVERSALITY_ALPHA_TOL,
                    _ => false,
                }))
            }
        }
    }
}

fn exact_changes(
    a: &RationalMatrix,
    b: &RationalMatrix,
    cfg: &CheckConfig,
) -> Result<Vec<QuantityChange>> {
    let (qa, qb) = (quantities(a, cfg)?, quantities(b, cfg)?);
    let mut out = Vec::new();
    if qa.spark != qb.spark {
        out.push(QuantityChange::Spark {
            before: qa.spark.unwrap(),
            after: qb.spark.unwrap(),
        });
    }
    if qa.nsp_order != qb.nsp_order {
        out.push(QuantityChange::HighestNspOrder {
            before: qa.nsp_order.unwrap(),
            after: qb.nsp_order.unwrap(),
        });
    }
    if qa.rip_order != qb.rip_order {
        out.push(QuantityChange::HighestRipOrder {
            before: qa.rip_order.unwrap(),
            after: qb.rip_order.unwrap(),
        });
    }
    Ok(out)
}

fn one(v: i64) -> Rational {
    Rational::from_integer(v.into())
}

fn ops_artifact(
    description: &str,
    input: RationalMatrix,
    ops: OpSequence,
    cfg: &CheckConfig,
) -> Result<CounterexampleArtifact> {
    let after = ops.apply_all(&input)?;
    let broken = exact_changes(&input, &after, cfg)?;
    Ok(CounterexampleArtifact {
        description: description.into(),
        input,
        construction: Construction::Ops { ops },
        broken,
    })
}

/// The two canonical column-addition breaks: a lone zero column removed
/// (spark 1 -> 2) and a zero column created (spark 2 -> 1, orders 1 -> 0).
pub fn check_column_addition_break(cfg: &CheckConfig) -> Result<Vec<CounterexampleArtifact>> {
    let removed = ops_artifact(
        "column addition removes the only zero column",
        RationalMatrix::from_i64(1, 2, &[1, 0])?,
        OpSequence::new((1, 2), vec![ElemOp::col_add(1, 0, one(1))?])?,
        cfg,
    )?;
    let created = ops_artifact(
        "column addition creates a zero column",
        RationalMatrix::from_i64(1, 2, &[1, 1])?,
        OpSequence::new((1, 2), vec![ElemOp::col_add(1, 0, one(-1))?])?,
        cfg,
    )?;
    Ok(vec![removed, created])
}

/// `spark - 1` column additions that turn one witness column into zero.
///
/// With `sum_i k_i a_i = 0` over the spark witness and `t` its last member,
/// adding `(k_i / k_t) a_i` to `a_t` for every other member leaves
/// `a_t + sum (k_i / k_t) a_i = 0`. The witness coefficients are all nonzero,
/// and no strict prefix zeroes `a_t` because that would exhibit a smaller
/// dependent set.
pub fn zero_column_witness(a: &RationalMatrix, cfg: &CheckConfig) -> Result<OpSequence> {
    let s = spark_with_limit(a, cfg.limit)?;
    let (witness, coeffs) = match (s.witness(), s.coefficients()) {
        (Some(w), Some(c)) => (w, c),
        _ => return Err(Error::NoDependence),
    };
    if witness.len() == 1 {
        return Err(Error::HasZeroColumn(witness.indices()[0]));
    }
    let t_pos = witness.len() - 1;
    let t = witness.indices()[t_pos];
    let kt = &coeffs[t_pos];
    let ops = witness.indices()[..t_pos]
        .iter()
        .zip(coeffs)
        .map(|(&i, ki)| ElemOp::col_add(t, i, ki / kt))
        .collect::<Result<Vec<_>>>()?;
    OpSequence::new(a.shape(), ops)
}

fn orthogonality_error_of(phi: &DMatrix<f64>) -> f64 {
    let n = phi.ncols();
    (phi.transpose() * phi - DMatrix::identity(n, n)).amax()
}

fn alpha_pair(a: &RationalMatrix, phi: &FloatMatrix, cfg: &CheckConfig) -> Result<(f64, f64)> {
    let fa = a.to_float()?;
    let before = rip_constants_with_limit(&fa, 1, cfg.limit)?.alpha;
    let product = fa.mul(phi)?;
    let after = rip_constants_with_limit(&product, 1, cfg.limit)?.alpha;
    Ok((before, after))
}

/// An orthonormal `Phi` whose first column spans a null direction of a wide
/// `A`, so `A Phi` has a (numerically) zero column and loses the RIP at every
/// order even though `A` itself has `alpha_1` above the floor.
pub fn universality_counterexample(
    a: &RationalMatrix,
    cfg: &CheckConfig,
) -> Result<CounterexampleArtifact> {
    let (m, n) = a.shape();
    if m >= n {
        return Err(Error::NotWide { rows: m, cols: n });
    }
    if let Some(&j) = a.zero_columns().first() {
        return Err(Error::HasZeroColumn(j));
    }
    let h = a
        .null_space_basis()
        .into_iter()
        .next()
        .ok_or_else(|| Error::Internal("wide matrix with trivial null space".into()))?;
    debug_assert!(a.mul_vec(&h)?.iter().all(Zero::is_zero));
    let seed = DVector::from_iterator(n, h.iter().map(|v| v.to_f64().unwrap_or(f64::NAN)));
    let phi_raw = complete_orthonormal_basis(&seed)?;
    let orthogonality_error = orthogonality_error_of(&phi_raw);
    let phi = FloatMatrix::from_dmatrix(phi_raw)?;
    let (before, after) = alpha_pair(a, &phi, cfg)?;
    if before <= cfg.alpha_floor {
        return Err(Error::InvalidParameter(format!(
            "alpha_1(A) = {before:e} is not above the floor {:e}",
            cfg.alpha_floor
        )));
    }
    Ok(CounterexampleArtifact {
        description: "orthonormal change of basis through a null vector destroys the RIP".into(),
        input: a.clone(),
        construction: Construction::Orthonormal {
            phi,
            orthogonality_error,
        },
        broken: vec![QuantityChange::Alpha1 { before, after }],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: usize, cols: usize, e: &[i64]) -> RationalMatrix {
        RationalMatrix::from_i64(rows, cols, e).unwrap()
    }

    fn cfg() -> CheckConfig {
        CheckConfig::default()
    }

    #[test]
    fn canonical_breaks() {
        let arts = check_column_addition_break(&cfg()).unwrap();
        assert_eq!(arts.len(), 2);
        assert!(arts[0].broken.contains(&QuantityChange::Spark {
            before: SparkValue::Finite(1),
            after: SparkValue::Finite(2)
        }));
        assert!(arts[1].broken.contains(&QuantityChange::Spark {
            before: SparkValue::Finite(2),
            after: SparkValue::Finite(1)
        }));
        assert!(arts[1].broken.contains(&QuantityChange::HighestNspOrder {
            before: 1,
            after: 0
        }));
        assert!(arts[1].broken.contains(&QuantityChange::HighestRipOrder {
            before: 1,
            after: 0
        }));
        for a in &arts {
            assert!(a.replay(&cfg()).unwrap());
        }
    }

    #[test]
    fn witness_for_duplicate_columns() {
        let a = m(1, 2, &[1, 1]);
        let w = zero_column_witness(&a, &cfg()).unwrap();
        assert_eq!(w.len(), 1);
        assert_eq!(w.ops()[0], ElemOp::col_add(1, 0, one(-1)).unwrap());
        let b = w.apply_all(&a).unwrap();
        assert_eq!(b.zero_columns(), vec![1]);
    }

    #[test]
    fn witness_for_three_columns() {
        let a = m(2, 3, &[1, 0, 1, 0, 1, 1]);
        let w = zero_column_witness(&a, &cfg()).unwrap();
        assert_eq!(
            w.ops(),
            &[
                ElemOp::col_add(2, 0, one(-1)).unwrap(),
                ElemOp::col_add(2, 1, one(-1)).unwrap()
            ]
        );
        assert_eq!(w.apply_all(&a).unwrap().zero_columns(), vec![2]);
        assert!(w.prefix(1).apply_all(&a).unwrap().zero_columns().is_empty());
    }

    #[test]
    fn witness_preconditions() {
        assert!(matches!(
            zero_column_witness(&m(1, 2, &[0, 1]), &cfg()),
            Err(Error::HasZeroColumn(0))
        ));
        assert!(matches!(
            zero_column_witness(&RationalMatrix::identity(2).unwrap(), &cfg()),
            Err(Error::NoDependence)
        ));
    }

    #[test]
    fn universality_on_small_matrices() {
        let a = m(1, 2, &[1, 1]);
        let art = universality_counterexample(&a, &cfg()).unwrap();
        let Construction::Orthonormal {
            phi,
            orthogonality_error,
        } = &art.construction
        else {
            panic!("expected orthonormal construction");
        };
        assert!(*orthogonality_error <= ORTHONORMALITY_TOL);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((phi.get(0, 0).abs() - s).abs() < 1e-15);
        assert!((phi.get(0, 0) + phi.get(1, 0)).abs() < 1e-15);
        let product = a.to_float().unwrap().mul(phi).unwrap();
        assert!(product.get(0, 0).abs() <= 1e-15);
        assert!(art.replay(&cfg()).unwrap());

        let b = m(2, 3, &[1, 0, 1, 0, 1, 1]);
        let art = universality_counterexample(&b, &cfg()).unwrap();
        match art.broken[0] {
            QuantityChange::Alpha1 { before, after } => {
                assert_eq!(before, 1.0);
                assert!(after <= UNIVERSALITY_ALPHA_TOL);
            }
            ref other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn universality_preconditions() {
        assert!(matches!(
            universality_counterexample(&RationalMatrix::identity(2).unwrap(), &cfg()),
            Err(Error::NotWide { .. })
        ));
        assert!(matches!(
            universality_counterexample(&m(1, 3, &[1, 0, 2]), &cfg()),
            Err(Error::HasZeroColumn(1))
        ));
    }
}

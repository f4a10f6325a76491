use num_traits::{Signed, ToPrimitive, Zero};

use super::{CheckConfig, InvarianceCheckResult, Observation, Quantities, Verdict};
use crate::error::{Error, Result};
use crate::nsp::{exact_nullity1_with, failure_certificate_from};
use crate::numeric::{FloatMatrix, IndexSet, Rational, RationalMatrix};
use crate::rip::{highest_rip_order_with_limit, rip_constants_with_limit};
use crate::spark::spark_with_limit;
use crate::transforms::{
    apply, apply_float, random_invertible, random_permuted_diagonal, ElemOp, OpKind, OpSequence,
};

/// Relative tolerance on the RIP transformation bounds.
pub const RIP_BOUND_TOL: f64 = 1e-9;
/// Below this a squared singular value is treated as zero when checking that
/// row addition keeps `alpha` positive.
pub const RIP_POSITIVE_EPS: f64 = 1e-12;
/// `alpha_1` must be at most this on a matrix with a zero column.
pub const ZERO_ALPHA_TOL: f64 = 1e-12;
/// Absolute slack on the NSP constant bound after column multiplication.
pub const NSP_BOUND_TOL: f64 = 1e-9;
/// Elementary factors in the random invertible left multiplier.
pub const COROLLARY_INVERTIBLE_OPS: usize = 8;

/// Float image with unit-norm columns, the form the spectral order is read from.
pub fn well_scaled(a: &RationalMatrix) -> Result<FloatMatrix> {
    Ok(a.to_float()?.column_normalized())
}

/// Spark, exact NSP order and spectral RIP order of `a`.
pub fn quantities(a: &RationalMatrix, cfg: &CheckConfig) -> Result<Quantities> {
    let s = spark_with_limit(a, cfg.limit)?;
    let rip_order = highest_rip_order_with_limit(&well_scaled(a)?, cfg.alpha_floor, cfg.limit)?;
    Ok(Quantities {
        spark: Some(s.spark_value()),
        nsp_order: Some(s.highest_order()),
        rip_order: Some(rip_order),
        ..Quantities::default()
    })
}

fn observation(label: &str, matrix: RationalMatrix, quantities: Quantities) -> Observation {
    Observation {
        label: label.to_string(),
        matrix,
        quantities,
    }
}

fn reject_col_add(ops: &OpSequence) -> Result<()> {
    if ops.contains_col_add() {
        Err(Error::ColumnAdditionPresent)
    } else {
        Ok(())
    }
}

/// Spark before and after `ops` (no column additions) must agree exactly.
pub fn check_spark_invariance(
    a: &RationalMatrix,
    ops: &OpSequence,
    cfg: &CheckConfig,
) -> Result<InvarianceCheckResult> {
    reject_col_add(ops)?;
    let b = ops.apply_all(a)?;
    let before = spark_with_limit(a, cfg.limit)?.spark_value();
    let after = spark_with_limit(&b, cfg.limit)?.spark_value();
    let q = |s| Quantities {
        spark: Some(s),
        ..Quantities::default()
    };
    let verdict = if before == after {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(InvarianceCheckResult {
        check_id: "spark_invariance".into(),
        ops: ops.clone(),
        before: observation("A", a.clone(), q(before)),
        after: vec![observation("B", b, q(after))],
        verdict,
        detail: vec![format!("spark {before} -> {after}")],
    })
}

/// Columns `s` of `a` and of the row-transformed matrix are dependent together.
pub fn check_same_linear_dependence(
    a: &RationalMatrix,
    row_ops: &OpSequence,
    s: &IndexSet,
) -> Result<bool> {
    if !row_ops.only_rows() {
        return Err(Error::ColumnOperationPresent);
    }
    if s.is_empty() {
        return Err(Error::EmptyInput("column subset"));
    }
    if s.universe() != a.cols() {
        return Err(Error::DimensionMismatch(format!(
            "index set over {} columns, matrix has {}",
            s.universe(),
            a.cols()
        )));
    }
    let b = row_ops.apply_all(a)?;
    Ok(a.columns_dependent(s.indices()) == b.columns_dependent(s.indices()))
}

/// Highest NSP order (exact) and highest RIP order (spectral, on the
/// column-normalized float image) must agree before and after `ops`.
pub fn check_order_invariance(
    a: &RationalMatrix,
    ops: &OpSequence,
    cfg: &CheckConfig,
) -> Result<InvarianceCheckResult> {
    reject_col_add(ops)?;
    let b = ops.apply_all(a)?;
    let qa = quantities(a, cfg)?;
    let qb = quantities(&b, cfg)?;
    let nsp_same = qa.nsp_order == qb.nsp_order;
    let rip_same = qa.rip_order == qb.rip_order;
    let mut detail = vec![
        format!("nsp order {:?} -> {:?}", qa.nsp_order, qb.nsp_order),
        format!("rip order {:?} -> {:?}", qa.rip_order, qb.rip_order),
    ];
    for (label, q) in [("A", &qa), ("B", &qb)] {
        if q.rip_order != q.nsp_order {
            detail.push(format!(
                "{label}: spectral order {:?} differs from exact order {:?} (alpha floor {})",
                q.rip_order, q.nsp_order, cfg.alpha_floor
            ));
        }
    }
    Ok(InvarianceCheckResult {
        check_id: "highest_order_invariance".into(),
        ops: ops.clone(),
        before: observation("A", a.clone(), qa),
        after: vec![observation("B", b, qb)],
        verdict: if nsp_same && rip_same {
            Verdict::Pass
        } else {
            Verdict::Fail
        },
        detail,
    })
}

/// Compare tightest `(alpha, beta)` of order `k` before and after one
/// operation against the constants the invariance proofs construct:
/// equality for switches, `[min(a, c^2 a), max(b, c^2 b)]` for multiplications,
/// and `beta' <= 2 (1 + c^2) beta` with `alpha'` still positive for row addition.
/// `tol` is relative to `max(1, beta)`.
pub fn check_rip_transform_bounds(
    a: &FloatMatrix,
    op: &ElemOp,
    k: usize,
    tol: f64,
    cfg: &CheckConfig,
) -> Result<InvarianceCheckResult> {
    if op.kind() == OpKind::ColAdd {
        return Err(Error::ColumnAdditionPresent);
    }
    let b = apply_float(a, op)?;
    let before = rip_constants_with_limit(a, k, cfg.limit)?;
    let after = rip_constants_with_limit(&b, k, cfg.limit)?;
    let (alpha, beta) = (before.alpha, before.beta);
    let (alpha2, beta2) = (after.alpha, after.beta);
    let slack = tol * beta.max(1.0);
    let c2 = op
        .coefficient()
        .map(|c| {
            let c = c.to_f64().unwrap_or(f64::NAN);
            c * c
        })
        .unwrap_or(1.0);
    let mut detail = vec![format!(
        "alpha {alpha:e} -> {alpha2:e}, beta {beta:e} -> {beta2:e}, slack {slack:e}"
    )];
    let ok = match op.kind() {
        OpKind::RowSwitch | OpKind::ColSwitch => {
            (alpha2 - alpha).abs() <= slack && (beta2 - beta).abs() <= slack
        }
        OpKind::RowMult | OpKind::ColMult => {
            let lo = alpha.min(c2 * alpha);
            let hi = beta.max(c2 * beta);
            detail.push(format!("bounds [{lo:e}, {hi:e}]"));
            alpha2 >= lo - slack && beta2 <= hi + slack
        }
        OpKind::RowAdd => {
            let hi = 2.0 * (1.0 + c2) * beta;
            detail.push(format!("upper bound {hi:e}"));
            beta2 <= hi + slack && (alpha <= RIP_POSITIVE_EPS || alpha2 > RIP_POSITIVE_EPS)
        }
        OpKind::ColAdd => unreachable!(),
    };
    let q = |alpha: f64, beta: f64| Quantities {
        alpha: Some(alpha),
        beta: Some(beta),
        ..Quantities::default()
    };
    Ok(InvarianceCheckResult {
        check_id: format!("rip_transform_bounds_k{k}"),
        ops: OpSequence::new((a.rows(), a.cols()), vec![op.clone()])?,
        before: observation("A", RationalMatrix::from_float_exact(a), q(alpha, beta)),
        after: vec![observation(
            "B",
            RationalMatrix::from_float_exact(&b),
            q(alpha2, beta2),
        )],
        verdict: if ok { Verdict::Pass } else { Verdict::Fail },
        detail,
    })
}

/// For a nullity-1 matrix, the smallest NSP constant after scaling column `i`
/// by `c` must not exceed `max(|c| C, C / |c|)`.
pub fn check_nsp_constant_bound(
    a: &RationalMatrix,
    c: &Rational,
    i: usize,
    k: usize,
    cfg: &CheckConfig,
) -> Result<InvarianceCheckResult> {
    let op = ElemOp::col_mult(i, c.clone())?;
    let nullity = a.nullity();
    if nullity != 1 {
        return Err(Error::NullityNotOne(nullity));
    }
    let b = apply(a, &op)?;
    let sa = spark_with_limit(a, cfg.limit)?;
    let sb = spark_with_limit(&b, cfg.limit)?;
    let before = exact_nullity1_with(a, &sa, k)?;
    let after = exact_nullity1_with(&b, &sb, k)?;
    let abs_c = c.abs().to_f64().unwrap_or(f64::NAN);
    let bound = (abs_c * before).max(before / abs_c);
    let q = |v: f64| Quantities {
        nsp_constant: Some(v),
        ..Quantities::default()
    };
    Ok(InvarianceCheckResult {
        check_id: format!("nsp_constant_bound_k{k}"),
        ops: OpSequence::new(a.shape(), vec![op])?,
        before: observation("A", a.clone(), q(before)),
        after: vec![observation("B", b, q(after))],
        verdict: if after <= bound + NSP_BOUND_TOL {
            Verdict::Pass
        } else {
            Verdict::Fail
        },
        detail: vec![format!("C {before} -> {after}, bound {bound}")],
    })
}

fn alpha_or_zero(a: &FloatMatrix, k: usize, cfg: &CheckConfig) -> Result<f64> {
    match rip_constants_with_limit(a, k, cfg.limit) {
        Ok(r) => Ok(r.alpha),
        Err(Error::ZeroMatrix) => Ok(0.0),
        Err(e) => Err(e),
    }
}

/// A matrix with a zero column fails the NSP and the RIP at every order:
/// the unit vector on the zero column is a 1-sparse null vector and `alpha_1 = 0`.
pub fn check_zero_column_propositions(
    a: &RationalMatrix,
    k: usize,
    cfg: &CheckConfig,
) -> Result<InvarianceCheckResult> {
    let zero_cols = a.zero_columns();
    if zero_cols.is_empty() {
        return Err(Error::NoZeroColumn);
    }
    if k == 0 {
        return Err(Error::OrderOutOfRange { k, n: a.cols() });
    }
    let s = spark_with_limit(a, cfg.limit)?;
    let fa = a.to_float()?;
    let mut detail = Vec::new();
    let mut ok = true;

    let cert = failure_certificate_from(&s, 1)?;
    let support: Vec<usize> = cert
        .iter()
        .flat_map(|h| {
            h.iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(|(i, _)| i)
        })
        .collect();
    match support.as_slice() {
        [i] if zero_cols.contains(i) => detail.push(format!("1-sparse null certificate e_{i}")),
        _ => {
            ok = false;
            detail.push(format!("bad order-1 certificate, support {support:?}"));
        }
    }
    if failure_certificate_from(&s, k)?.is_none() {
        ok = false;
        detail.push(format!("no certificate at order {k}"));
    }

    let alpha1 = alpha_or_zero(&fa, 1, cfg)?;
    if alpha1 > ZERO_ALPHA_TOL {
        ok = false;
    }
    detail.push(format!("alpha_1 = {alpha1:e}"));
    if k <= a.cols() {
        let alpha_k = alpha_or_zero(&fa, k, cfg)?;
        if alpha_k > ZERO_ALPHA_TOL {
            ok = false;
        }
        detail.push(format!("alpha_{k} = {alpha_k:e}"));
    }

    let q = quantities(a, cfg)?;
    if q.nsp_order != Some(0) || q.rip_order != Some(0) {
        ok = false;
        detail.push(format!(
            "highest orders nsp {:?}, rip {:?}",
            q.nsp_order, q.rip_order
        ));
    }
    let q = Quantities {
        alpha: Some(alpha1),
        ..q
    };
    Ok(InvarianceCheckResult {
        check_id: "zero_column_propositions".into(),
        ops: OpSequence::empty(a.shape()),
        before: observation("A", a.clone(), q),
        after: Vec::new(),
        verdict: if ok { Verdict::Pass } else { Verdict::Fail },
        detail,
    })
}

/// Multiply by a random invertible `B1` on the left and a random permuted
/// diagonal `B2` on the right; spark and highest orders must survive both.
pub fn check_corollaries(
    a: &RationalMatrix,
    seed: u64,
    cfg: &CheckConfig,
) -> Result<InvarianceCheckResult> {
    let (m, n) = a.shape();
    let b1 = random_invertible(m, seed, COROLLARY_INVERTIBLE_OPS)?;
    let b2 = random_permuted_diagonal(n, seed)?;
    let left = b1.mul(a)?;
    let right = a.mul(&b2)?;
    let qa = quantities(a, cfg)?;
    let ql = quantities(&left, cfg)?;
    let qr = quantities(&right, cfg)?;
    let ok = ql == qa && qr == qa;
    Ok(InvarianceCheckResult {
        check_id: "corollaries".into(),
        ops: OpSequence::empty(a.shape()),
        before: observation("A", a.clone(), qa),
        after: vec![
            observation("B1*A", left, ql),
            observation("A*B2", right, qr),
        ],
        verdict: if ok { Verdict::Pass } else { Verdict::Fail },
        detail: vec![format!("B1 = {b1:?}"), format!("B2 = {b2:?}")],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spark::SparkValue;

    fn q(p: i64, d: i64) -> Rational {
        Rational::new(p.into(), d.into())
    }

    fn m(rows: usize, cols: usize, e: &[i64]) -> RationalMatrix {
        RationalMatrix::from_i64(rows, cols, e).unwrap()
    }

    fn cfg() -> CheckConfig {
        CheckConfig::default()
    }

    #[test]
    fn spark_invariance_examples() {
        let a = m(2, 3, &[1, 0, 1, 0, 1, 1]);
        let ops = OpSequence::new(
            (2, 3),
            vec![
                ElemOp::row_add(0, 1, q(7, 1)).unwrap(),
                ElemOp::row_mult(0, q(-2, 1)).unwrap(),
                ElemOp::col_switch(0, 2).unwrap(),
            ],
        )
        .unwrap();
        let r = check_spark_invariance(&a, &ops, &cfg()).unwrap();
        assert!(r.passed());
        assert_eq!(r.after[0].quantities.spark, Some(SparkValue::Finite(3)));

        let id = RationalMatrix::identity(3).unwrap();
        let ops = OpSequence::new((3, 3), vec![ElemOp::row_add(2, 0, q(-1, 3)).unwrap()]).unwrap();
        let r = check_spark_invariance(&id, &ops, &cfg()).unwrap();
        assert!(r.passed());
        assert_eq!(r.before.quantities.spark, Some(SparkValue::FullColumnRank));

        let z = m(2, 2, &[0, 1, 0, 2]);
        let ops = OpSequence::new((2, 2), vec![ElemOp::row_switch(0, 1).unwrap()]).unwrap();
        let r = check_spark_invariance(&z, &ops, &cfg()).unwrap();
        assert!(r.passed());
        assert_eq!(r.after[0].quantities.spark, Some(SparkValue::Finite(1)));

        let bad = OpSequence::new((2, 2), vec![ElemOp::col_add(0, 1, q(1, 1)).unwrap()]).unwrap();
        assert!(matches!(
            check_spark_invariance(&z, &bad, &cfg()),
            Err(Error::ColumnAdditionPresent)
        ));
    }

    #[test]
    fn same_linear_dependence_examples() {
        let a = m(2, 3, &[1, 0, 1, 0, 1, 1]);
        let ops = OpSequence::new((2, 3), vec![ElemOp::row_add(0, 1, q(1, 1)).unwrap()]).unwrap();
        let all = IndexSet::new(vec![0, 1, 2], 3).unwrap();
        let two = IndexSet::new(vec![0, 1], 3).unwrap();
        assert!(check_same_linear_dependence(&a, &ops, &all).unwrap());
        assert!(check_same_linear_dependence(&a, &ops, &two).unwrap());
        let id = RationalMatrix::identity(2).unwrap();
        let ops = OpSequence::new((2, 2), vec![ElemOp::row_mult(1, q(3, 1)).unwrap()]).unwrap();
        assert!(check_same_linear_dependence(&id, &ops, &IndexSet::full(2)).unwrap());
        let cols = OpSequence::new((2, 2), vec![ElemOp::col_switch(0, 1).unwrap()]).unwrap();
        assert!(matches!(
            check_same_linear_dependence(&id, &cols, &IndexSet::full(2)),
            Err(Error::ColumnOperationPresent)
        ));
    }

    #[test]
    fn order_invariance_examples() {
        let a = m(2, 3, &[1, 1, 0, 0, 1, 1]);
        let ops = OpSequence::new(
            (2, 3),
            vec![
                ElemOp::row_switch(0, 1).unwrap(),
                ElemOp::row_mult(1, q(1, 2)).unwrap(),
                ElemOp::row_add(1, 0, q(-3, 1)).unwrap(),
                ElemOp::col_switch(2, 0).unwrap(),
                ElemOp::col_mult(1, q(-2, 1)).unwrap(),
            ],
        )
        .unwrap();
        let r = check_order_invariance(&a, &ops, &cfg()).unwrap();
        assert!(r.passed(), "{:?}", r.detail);
        assert_eq!(r.before.quantities.nsp_order, Some(2));
        assert_eq!(r.after[0].quantities.rip_order, Some(2));

        let z = m(2, 3, &[1, 0, 2, 3, 0, 1]);
        let ops = OpSequence::new((2, 3), vec![ElemOp::row_add(0, 1, q(2, 1)).unwrap()]).unwrap();
        let r = check_order_invariance(&z, &ops, &cfg()).unwrap();
        assert!(r.passed());
        assert_eq!(r.after[0].quantities.nsp_order, Some(0));

        let id = RationalMatrix::identity(3).unwrap();
        let ops = OpSequence::new((3, 3), vec![ElemOp::col_mult(1, q(1, 2)).unwrap()]).unwrap();
        assert!(check_order_invariance(&id, &ops, &cfg()).unwrap().passed());
    }

    #[test]
    fn rip_bound_examples() {
        let id = FloatMatrix::identity(2);
        let r = check_rip_transform_bounds(
            &id,
            &ElemOp::row_switch(0, 1).unwrap(),
            1,
            RIP_BOUND_TOL,
            &cfg(),
        )
        .unwrap();
        assert!(r.passed());
        assert_eq!(r.after[0].quantities.alpha, Some(1.0));

        let d = FloatMatrix::from_row_major(2, 2, vec![1.0, 0.0, 0.0, 2.0]).unwrap();
        let r = check_rip_transform_bounds(
            &d,
            &ElemOp::row_mult(0, q(3, 1)).unwrap(),
            1,
            RIP_BOUND_TOL,
            &cfg(),
        )
        .unwrap();
        assert!(r.passed());
        assert_eq!(r.after[0].quantities.alpha, Some(4.0));
        assert_eq!(r.after[0].quantities.beta, Some(9.0));

        let r = check_rip_transform_bounds(
            &id,
            &ElemOp::row_add(0, 1, q(1, 1)).unwrap(),
            1,
            RIP_BOUND_TOL,
            &cfg(),
        )
        .unwrap();
        assert!(r.passed());
        assert_eq!(r.after[0].quantities.beta, Some(2.0));

        assert!(matches!(
            check_rip_transform_bounds(
                &id,
                &ElemOp::col_add(0, 1, q(1, 1)).unwrap(),
                1,
                RIP_BOUND_TOL,
                &cfg()
            ),
            Err(Error::ColumnAdditionPresent)
        ));
    }

    #[test]
    fn nsp_bound_examples() {
        let a = m(1, 2, &[1, 1]);
        let r = check_nsp_constant_bound(&a, &q(2, 1), 0, 1, &cfg()).unwrap();
        assert!(r.passed());
        assert_eq!(r.before.quantities.nsp_constant, Some(1.0));
        assert_eq!(r.after[0].quantities.nsp_constant, Some(2.0));

        let r = check_nsp_constant_bound(&a, &q(1, 1), 1, 1, &cfg()).unwrap();
        assert_eq!(r.after[0].quantities.nsp_constant, Some(1.0));

        let b = m(1, 2, &[1, 2]);
        let r = check_nsp_constant_bound(&b, &q(1, 2), 1, 1, &cfg()).unwrap();
        assert!(r.passed());
        assert_eq!(r.before.quantities.nsp_constant, Some(2.0));
        assert_eq!(r.after[0].quantities.nsp_constant, Some(1.0));

        assert!(matches!(
            check_nsp_constant_bound(&m(1, 3, &[1, 1, 1]), &q(2, 1), 0, 1, &cfg()),
            Err(Error::NullityNotOne(2))
        ));
    }

    #[test]
    fn zero_column_examples() {
        let a = m(2, 2, &[0, 1, 0, 2]);
        let r = check_zero_column_propositions(&a, 1, &cfg()).unwrap();
        assert!(r.passed(), "{:?}", r.detail);
        assert_eq!(r.before.quantities.alpha, Some(0.0));

        let b = m(2, 3, &[1, 0, 0, 0, 0, 1]);
        let r = check_zero_column_propositions(&b, 2, &cfg()).unwrap();
        assert!(r.passed(), "{:?}", r.detail);
        assert_eq!(r.before.quantities.nsp_order, Some(0));
        assert_eq!(r.before.quantities.rip_order, Some(0));

        assert!(matches!(
            check_zero_column_propositions(&RationalMatrix::identity(2).unwrap(), 1, &cfg()),
            Err(Error::NoZeroColumn)
        ));
    }

    #[test]
    fn corollary_examples() {
        let a = m(2, 3, &[1, 0, 1, 0, 1, 1]);
        let id = RationalMatrix::identity(3).unwrap();
        let z = m(2, 3, &[1, 0, 2, 3, 0, 1]);
        for seed in 0..5 {
            let r = check_corollaries(&a, seed, &cfg()).unwrap();
            assert!(r.passed());
            assert_eq!(r.after[0].quantities.spark, Some(SparkValue::Finite(3)));
            let r = check_corollaries(&id, seed, &cfg()).unwrap();
            assert_eq!(
                r.after[1].quantities.spark,
                Some(SparkValue::FullColumnRank)
            );
            let r = check_corollaries(&z, seed, &cfg()).unwrap();
            assert!(r.passed());
            assert_eq!(r.after[1].quantities.spark, Some(SparkValue::Finite(1)));
        }
    }
}

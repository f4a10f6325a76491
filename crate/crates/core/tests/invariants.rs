//! Property tests for the certificate invariants.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use sparkcert::combinatorics::{binomial, next_combination, unrank};
use sparkcert::io::{parse_matrix_str, write_matrix, MatrixFormat};
use sparkcert::nsp::{nsp_constant_exact_nullity1, nsp_constant_lower_bound};
use sparkcert::rip::rip_table;
use sparkcert::transforms::{
    apply, default_coefficient_pool, inverse_op, random_op_with, random_sequence_with,
};
use sparkcert::{spark, OpKind, Rational, RationalMatrix};

fn matrix(max_rows: usize, max_cols: usize) -> impl Strategy<Value = RationalMatrix> {
    (1..=max_rows, 1..=max_cols).prop_flat_map(|(m, n)| {
        prop::collection::vec(-3i64..=3, m * n)
            .prop_map(move |v| RationalMatrix::from_i64(m, n, &v).unwrap())
    })
}

fn rational() -> impl Strategy<Value = Rational> {
    (-50i64..=50, 1i64..=12).prop_map(|(p, q)| Rational::new(p.into(), q.into()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn spark_survives_preserving_sequences(a in matrix(4, 7), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ops = random_sequence_with(&mut rng, a.shape(), &OpKind::PRESERVING, &default_coefficient_pool(), 6);
        // 1-row or 1-column shapes may rule out every pair operation
        if let Ok(ops) = ops {
            let b = ops.apply_all(&a).unwrap();
            prop_assert_eq!(spark(&a).unwrap().spark_value(), spark(&b).unwrap().spark_value());
        }
    }

    #[test]
    fn spark_is_bounded_by_rank(a in matrix(4, 7)) {
        let s = spark(&a).unwrap();
        match s.value() {
            Some(v) => {
                prop_assert!(v >= 1 && v <= a.rank() + 1);
                let w = s.witness().unwrap();
                let r = a.select_columns(w.indices()).mul_vec(s.coefficients().unwrap()).unwrap();
                prop_assert!(r.iter().all(|x| *x == Rational::from_integer(0.into())));
            }
            None => prop_assert_eq!(a.rank(), a.cols()),
        }
        prop_assert_eq!(s.value() == Some(1), !a.zero_columns().is_empty());
    }

    #[test]
    fn inverse_undoes_every_op(a in matrix(4, 5), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        if let Ok(op) = random_op_with(&mut rng, a.shape(), &OpKind::ALL, &default_coefficient_pool()) {
            let back = apply(&apply(&a, &op).unwrap(), &inverse_op(&op)).unwrap();
            prop_assert_eq!(back, a);
        }
    }

    #[test]
    fn matrix_form_matches_application(a in matrix(4, 5), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        if let Ok(ops) = random_sequence_with(&mut rng, a.shape(), &OpKind::ALL, &default_coefficient_pool(), 5) {
            let (p, q) = ops.matrix_form().unwrap();
            prop_assert_eq!(p.mul(&a).unwrap().mul(&q).unwrap(), ops.apply_all(&a).unwrap());
        }
    }

    #[test]
    fn rip_constants_are_ordered(a in matrix(4, 6)) {
        prop_assume!(!a.is_zero());
        let t = rip_table(&a.to_float().unwrap(), a.cols(), Default::default()).unwrap();
        for r in &t {
            prop_assert!(0.0 <= r.alpha && r.alpha <= r.beta + 1e-12);
            prop_assert!((-1e-12..=1.0 + 1e-12).contains(&r.delta));
        }
        for w in t.windows(2) {
            prop_assert!(w[1].alpha <= w[0].alpha + 1e-9 * w[0].beta.max(1.0));
            prop_assert!(w[1].beta >= w[0].beta - 1e-9 * w[0].beta.max(1.0));
        }
    }

    #[test]
    fn sampling_never_exceeds_exact(a in matrix(3, 4), seed in any::<u64>()) {
        prop_assume!(a.cols() == a.rows() + 1 && a.nullity() == 1);
        let s = spark(&a).unwrap().value().unwrap();
        for k in 1..s {
            let exact = nsp_constant_exact_nullity1(&a, k).unwrap();
            let est = nsp_constant_lower_bound(&a, k, 4, seed).unwrap();
            prop_assert!(est <= exact + 1e-12);
        }
    }

    #[test]
    fn rational_matrices_round_trip(rows in 1usize..4, cols in 1usize..4, seed in prop::collection::vec(rational(), 9)) {
        let a = RationalMatrix::new(rows, cols, seed[..rows * cols].to_vec()).unwrap();
        for f in [MatrixFormat::Json, MatrixFormat::Csv, MatrixFormat::Mtx] {
            let text = write_matrix(&a, f).unwrap();
            prop_assert_eq!(parse_matrix_str(&text, f).unwrap().exact(), a.clone());
            // serialization is canonical
            let again = write_matrix(&parse_matrix_str(&text, f).unwrap().exact(), f).unwrap();
            prop_assert_eq!(again, text);
        }
    }

    #[test]
    fn unrank_walks_in_lexicographic_order(n in 1usize..10, k in 1usize..5) {
        prop_assume!(k <= n);
        let mut s: Vec<usize> = (0..k).collect();
        for rank in 0..binomial(n, k) {
            prop_assert_eq!(unrank(n, k, rank), s.clone());
            let more = next_combination(&mut s, n);
            prop_assert_eq!(more, rank + 1 < binomial(n, k));
        }
    }
}

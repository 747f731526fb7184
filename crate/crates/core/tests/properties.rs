//! Randomized property tests for the structural invariants the rest of the
//! library relies on: lattice identities of subspaces, exactness of matrix
//! inversion and eigenspace splitting, serialization round-trips, and the
//! involutive behaviour of the Fourier transform on randomly assembled
//! direct sums.

use mhc_core::corpus;
use mhc_core::eigen::generalized_eigenspaces;
use mhc_core::fourier::{double_fourier_check, fourier_transform};
use mhc_core::matrix::Matrix;
use mhc_core::monomod::{direct_sum, GradedPiece, MonodromicModule};
use mhc_core::rational::Rational;
use mhc_core::subspace::Subspace;
use proptest::prelude::*;

fn small_rational() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| Rational::from_frac(n, d))
}

fn subspace(ambient: usize) -> impl Strategy<Value = Subspace> {
    proptest::collection::vec(
        proptest::collection::vec(small_rational(), ambient),
        0..=ambient,
    )
    .prop_map(move |vecs| Subspace::from_vectors(ambient, &vecs))
}

/// A random module assembled from the fixed examples: pick a few of them,
/// shift their filtrations, and take the direct sum. Every module produced
/// this way is valid, so this drives all the global invariants below.
fn assembled_module() -> impl Strategy<Value = MonodromicModule> {
    proptest::collection::vec((0usize..7, -2i64..=2), 1..=3).prop_map(|parts| {
        let pool = corpus::all_rank_one();
        let mut acc: Option<MonodromicModule> = None;
        for (idx, shift) in parts {
            let source = &pool[idx % pool.len()];
            let mut m = MonodromicModule::new(source.rank());
            for (key, piece) in source.pieces() {
                m.insert_piece(
                    key.clone(),
                    GradedPiece::new(
                        piece.dim,
                        piece.nilpotents.clone(),
                        piece.filtration.shifted(shift),
                    ),
                );
            }
            for ((axis, key), mat) in source.can_entries() {
                m.set_can(*axis, key.clone(), mat.clone());
            }
            for ((axis, key), mat) in source.var_entries() {
                m.set_var(*axis, key.clone(), mat.clone());
            }
            acc = Some(match acc {
                None => m,
                Some(prev) => direct_sum(&prev, &m),
            });
        }
        acc.unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn subspace_dimension_formula(a in subspace(4), b in subspace(4)) {
        let sum = a.sum(&b);
        let meet = a.intersect(&b);
        prop_assert_eq!(sum.dim() + meet.dim(), a.dim() + b.dim());
        prop_assert!(sum.contains(&a) && sum.contains(&b));
        prop_assert!(a.contains(&meet) && b.contains(&meet));
    }

    #[test]
    fn subspace_modular_law(a in subspace(4), b in subspace(4), c in subspace(4)) {
        // if C <= A then A /\ (B + C) = (A /\ B) + C
        let c = a.intersect(&c);
        let lhs = a.intersect(&b.sum(&c));
        let rhs = a.intersect(&b).sum(&c);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn triangular_eigensplit_is_exact(diag in proptest::collection::vec(-3i64..=3, 3),
                                      upper in proptest::collection::vec(-3i64..=3, 3)) {
        let rows = [
            [diag[0], upper[0], upper[1]],
            [0, diag[1], upper[2]],
            [0, 0, diag[2]],
        ];
        let m = Matrix::from_i64(&[&rows[0], &rows[1], &rows[2]]);
        let spaces = generalized_eigenspaces(&m).unwrap();
        let total: usize = spaces.iter().map(|(_, s)| s.dim()).sum();
        prop_assert_eq!(total, 3);
        let mut diag_values: Vec<Rational> = diag.iter().map(|&d| Rational::from_int(d)).collect();
        diag_values.sort();
        diag_values.dedup();
        let mut found: Vec<Rational> = spaces.iter().map(|(v, _)| v.clone()).collect();
        found.sort();
        prop_assert_eq!(found, diag_values);
        for (value, space) in &spaces {
            // each generalized eigenspace is invariant and killed by (m - v)^dim
            let shifted = m.add_scalar_diag(&-value);
            let mut s = space.clone();
            for _ in 0..space.dim() {
                s = s.image(&shifted);
            }
            prop_assert!(s.is_zero());
        }
    }

    #[test]
    fn unitriangular_inverse_is_exact(upper in proptest::collection::vec((-5i64..=5, 1i64..=3), 3)) {
        let u = |i: usize| Rational::from_frac(upper[i].0, upper[i].1);
        let m = Matrix::new(3, 3, vec![
            Rational::one(), u(0), u(1),
            Rational::zero(), Rational::one(), u(2),
            Rational::zero(), Rational::zero(), Rational::one(),
        ]);
        let inv = m.inverse().unwrap();
        prop_assert_eq!(&m * &inv, Matrix::identity(3));
    }

    #[test]
    fn assembled_modules_are_valid_and_round_trip(m in assembled_module()) {
        prop_assert!(m.validate().is_ok());
        let text = m.to_json();
        let back = MonodromicModule::from_json(&text).unwrap();
        prop_assert_eq!(&back, &m);
        prop_assert_eq!(back.to_json(), text);
    }

    #[test]
    fn double_fourier_is_the_identity_up_to_signs(m in assembled_module()) {
        prop_assert!(double_fourier_check(&m).is_ok());
    }

    #[test]
    fn fourier_transform_is_additive(i in 0usize..7, j in 0usize..7) {
        let pool = corpus::all_rank_one();
        let a = &pool[i % pool.len()];
        let b = &pool[j % pool.len()];
        prop_assert_eq!(
            fourier_transform(&direct_sum(a, b)),
            direct_sum(&fourier_transform(a), &fourier_transform(b))
        );
    }
}

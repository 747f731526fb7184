//! Built-in example modules used throughout the test suites.

use crate::matrix::Matrix;
use crate::monomod::{direct_sum, ExponentKey, Filtration, GradedPiece, MonodromicModule};
use crate::rational::Rational;
use crate::subspace::Subspace;

/// The zero module of the given rank.
pub fn zero(rank: usize) -> MonodromicModule {
    MonodromicModule::new(rank)
}

/// The polynomial ring in one variable: one line at exponent 0, jump 0.
pub fn structure_sheaf() -> MonodromicModule {
    let mut m = MonodromicModule::new(1);
    m.insert_piece(ExponentKey::from_i64(&[0]), GradedPiece::line(1, 0));
    m
}

/// The module of distributions supported at the origin: one line at
/// exponent -1, jump 0.
pub fn delta() -> MonodromicModule {
    let mut m = MonodromicModule::new(1);
    m.insert_piece(ExponentKey::from_i64(&[-1]), GradedPiece::line(1, 0));
    m
}

/// Rank-one module generated by z^{-a} for a in (0, 1): one line at
/// exponent -a, jump 0.
pub fn kummer(a: Rational) -> MonodromicModule {
    assert!(a > Rational::zero() && a < Rational::one(), "kummer parameter must be in (0,1)");
    let mut m = MonodromicModule::new(1);
    m.insert_piece(ExponentKey(vec![-a]), GradedPiece::line(1, 0));
    m
}

/// Rank-one log extension with a size-two unipotent monodromy block:
/// two-dimensional pieces at 0 and -1 joined by var = id, can = -N.
pub fn log_unipotent() -> MonodromicModule {
    let n = Matrix::from_i64(&[&[0, 1], &[0, 0]]);
    let filt = Filtration::from_steps(
        2,
        vec![
            (0, Subspace::from_vectors(2, &[vec![Rational::one(), Rational::zero()]])),
            (1, Subspace::full(2)),
        ],
    );
    let mut m = MonodromicModule::new(1);
    m.insert_piece(
        ExponentKey::from_i64(&[0]),
        GradedPiece::new(2, vec![n.clone()], filt.clone()),
    );
    m.insert_piece(
        ExponentKey::from_i64(&[-1]),
        GradedPiece::new(2, vec![n.clone()], filt),
    );
    m.set_can(0, ExponentKey::from_i64(&[0]), -&n);
    m.set_var(0, ExponentKey::from_i64(&[-1]), Matrix::identity(2));
    m
}

/// A rank-two example with pieces at (-1/2, -1/2) and (0, -1), one line each.
pub fn nc2() -> MonodromicModule {
    let mut m = MonodromicModule::new(2);
    m.insert_piece(ExponentKey::from_strs(&["-1/2", "-1/2"]), GradedPiece::line(2, 0));
    m.insert_piece(ExponentKey::from_strs(&["0", "-1"]), GradedPiece::line(2, 0));
    m
}

/// The standard rank-one test battery.
pub fn all_rank_one() -> Vec<MonodromicModule> {
    vec![
        zero(1),
        structure_sheaf(),
        delta(),
        kummer(Rational::from_frac(1, 3)),
        kummer(Rational::from_frac(1, 2)),
        kummer(Rational::from_frac(2, 3)),
        log_unipotent(),
        direct_sum(&structure_sheaf(), &delta()),
        direct_sum(&kummer(Rational::from_frac(1, 3)), &log_unipotent()),
    ]
}

/// The parameters in [0, 1) at which the irregular filtration of a module's
/// transform can jump: zero together with the fractional parts of the
/// negated total exponents of its window pieces.
pub fn alpha_candidates(m: &MonodromicModule) -> Vec<Rational> {
    let mut out = vec![Rational::zero()];
    for key in m.pieces().keys() {
        let f = (-&key.total()).frac();
        if !f.is_zero() {
            out.push(f);
        }
    }
    out.sort();
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_validates() {
        for (i, m) in all_rank_one().iter().enumerate() {
            assert!(m.validate().is_ok(), "rank-one corpus entry {i}: {:?}", m.validate());
        }
        assert!(nc2().validate().is_ok());
        assert!(zero(3).validate().is_ok());
    }
}

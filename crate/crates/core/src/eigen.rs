//! Generalized eigenspace decomposition over Q.
//!
//! The characteristic polynomial is computed exactly (Faddeev–LeVerrier),
//! rational roots are extracted with the rational root theorem, and any
//! residual irrational or complex factor is reported as an error rather than
//! approximated.

use crate::matrix::Matrix;
use crate::rational::Rational;
use crate::subspace::Subspace;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EigenError {
    #[error("matrix has a non-rational eigenvalue: characteristic polynomial has an irreducible factor of degree {residual_degree} over Q")]
    NonRationalEigenvalue { residual_degree: usize },
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
}

/// Monic characteristic polynomial det(tI - M), coefficients low to high
/// degree: result[k] is the coefficient of t^k, result[n] = 1.
pub fn char_poly(m: &Matrix) -> Vec<Rational> {
    assert!(m.is_square());
    let n = m.rows();
    // Faddeev–LeVerrier: M_1 = M, c_{n-k} from traces.
    let mut coeffs = vec![Rational::zero(); n + 1];
    coeffs[n] = Rational::one();
    let mut aux = m.clone();
    for k in 1..=n {
        let c = -&(aux.trace() / &Rational::from_int(k as i64));
        coeffs[n - k] = c.clone();
        if k < n {
            aux = m * &aux.add_scalar_diag(&c);
        }
    }
    coeffs
}

/// Evaluate a polynomial (coefficients low to high) at x.
fn eval(poly: &[Rational], x: &Rational) -> Rational {
    let mut acc = Rational::zero();
    for c in poly.iter().rev() {
        acc = &(&acc * x) + c;
    }
    acc
}

/// Divide poly by (t - root); assumes root is an exact root.
fn deflate(poly: &[Rational], root: &Rational) -> Vec<Rational> {
    let n = poly.len() - 1;
    let mut out = vec![Rational::zero(); n];
    let mut carry = Rational::zero();
    for k in (0..n).rev() {
        carry = &poly[k + 1] + &(&carry * root);
        out[k] = carry.clone();
    }
    debug_assert!(eval(poly, root).is_zero());
    out
}

fn positive_divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    if n.is_zero() {
        return vec![];
    }
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = BigInt::one();
    loop {
        let dd = &d * &d;
        if dd > n {
            break;
        }
        if n.is_multiple_of(&d) {
            small.push(d.clone());
            let q = &n / &d;
            if q != d {
                large.push(q);
            }
        }
        d += BigInt::one();
    }
    large.reverse();
    small.extend(large);
    small
}

/// All rational roots of a polynomial with rational coefficients, with
/// multiplicities, plus the degree of the rational-root-free residual.
pub fn rational_roots(poly: &[Rational]) -> (Vec<(Rational, usize)>, usize) {
    let mut poly: Vec<Rational> = poly.to_vec();
    while poly.last().is_some_and(Rational::is_zero) {
        poly.pop();
    }
    assert!(!poly.is_empty(), "zero polynomial");
    let mut roots: Vec<(Rational, usize)> = Vec::new();

    // Strip roots at zero first.
    let mut zero_mult = 0;
    while poly.len() > 1 && poly[0].is_zero() {
        poly = deflate(&poly, &Rational::zero());
        zero_mult += 1;
    }
    if zero_mult > 0 {
        roots.push((Rational::zero(), zero_mult));
    }

    'outer: while poly.len() > 1 {
        // Clear denominators to get integer coefficients.
        let mut lcm = BigInt::one();
        for c in &poly {
            lcm = lcm.lcm(c.denom());
        }
        let ints: Vec<BigInt> = poly.iter().map(|c| (c * &Rational::new(lcm.clone(), BigInt::one())).numer().clone()).collect();
        let a0 = &ints[0];
        let an = ints.last().unwrap();
        for p in positive_divisors(a0) {
            for q in positive_divisors(an) {
                for sign in [1i64, -1] {
                    let cand = Rational::new(&p * BigInt::from(sign), q.clone());
                    if eval(&poly, &cand).is_zero() {
                        let mut mult = 0;
                        while poly.len() > 1 && eval(&poly, &cand).is_zero() {
                            poly = deflate(&poly, &cand);
                            mult += 1;
                        }
                        roots.push((cand, mult));
                        continue 'outer;
                    }
                }
            }
        }
        break;
    }
    roots.sort_by(|a, b| a.0.cmp(&b.0));
    (roots, poly.len() - 1)
}

/// Decompose Q^n into generalized eigenspaces of a square matrix. Returns
/// (eigenvalue, generalized eigenspace) pairs sorted by eigenvalue; errors if
/// any eigenvalue is irrational or complex.
pub fn generalized_eigenspaces(m: &Matrix) -> Result<Vec<(Rational, Subspace)>, EigenError> {
    if !m.is_square() {
        return Err(EigenError::NotSquare { rows: m.rows(), cols: m.cols() });
    }
    let n = m.rows();
    if n == 0 {
        return Ok(vec![]);
    }
    let poly = char_poly(m);
    let (roots, residual) = rational_roots(&poly);
    if residual > 0 {
        return Err(EigenError::NonRationalEigenvalue { residual_degree: residual });
    }
    let mut out = Vec::new();
    let mut total = 0;
    for (val, mult) in roots {
        let shifted = m.add_scalar_diag(&-&val);
        let space = Subspace::from_columns(&shifted.pow(n as u64).kernel());
        debug_assert_eq!(space.dim(), mult);
        total += space.dim();
        out.push((val, space));
    }
    debug_assert_eq!(total, n);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn char_poly_of_companion() {
        // companion of t^2 - t - 1
        let m = Matrix::from_i64(&[&[0, 1], &[1, 1]]);
        let p = char_poly(&m);
        assert_eq!(p, vec![Rational::from_int(-1), Rational::from_int(-1), Rational::one()]);
    }

    #[test]
    fn jordan_block_half() {
        // J_2(1/2): single generalized eigenspace at 1/2, all of Q^2
        let m = Matrix::from_str_rows(&[&["1/2", "1"], &["0", "1/2"]]);
        let es = generalized_eigenspaces(&m).unwrap();
        assert_eq!(es.len(), 1);
        assert_eq!(es[0].0, Rational::from_frac(1, 2));
        assert_eq!(es[0].1, Subspace::full(2));
    }

    #[test]
    fn split_spectrum() {
        let m = Matrix::from_i64(&[&[2, 0, 0], &[0, 3, 1], &[0, 0, 3]]);
        let es = generalized_eigenspaces(&m).unwrap();
        assert_eq!(es.len(), 2);
        assert_eq!(es[0].0, Rational::from_int(2));
        assert_eq!(es[0].1.dim(), 1);
        assert_eq!(es[1].0, Rational::from_int(3));
        assert_eq!(es[1].1.dim(), 2);
    }

    #[test]
    fn irrational_is_an_error() {
        // eigenvalues ±sqrt(2)
        let m = Matrix::from_i64(&[&[0, 2], &[1, 0]]);
        assert_eq!(
            generalized_eigenspaces(&m),
            Err(EigenError::NonRationalEigenvalue { residual_degree: 2 })
        );
    }

    #[test]
    fn rational_roots_with_multiplicity() {
        // (t - 1/2)^2 (t + 3) = t^3 + 2t^2 - 11/4 t + 3/4
        let poly = vec![
            Rational::from_frac(3, 4),
            Rational::from_frac(-11, 4),
            Rational::from_int(2),
            Rational::one(),
        ];
        let (roots, residual) = rational_roots(&poly);
        assert_eq!(residual, 0);
        assert_eq!(
            roots,
            vec![(Rational::from_int(-3), 1), (Rational::from_frac(1, 2), 2)]
        );
    }
}

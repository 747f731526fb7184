//! Subspaces of Q^n in canonical reduced column echelon form.
//!
//! The canonical form makes subspace equality plain structural equality, so
//! every higher-level identity in this crate bottoms out in `==` on bases.

use crate::matrix::Matrix;
use crate::rational::Rational;
use serde::{Deserialize, Serialize};

/// A linear subspace of Q^ambient. `basis` is ambient x dim, columns form a
/// basis in reduced column echelon form: each column has a leading 1 in a row
/// that is zero in all other columns, and leading rows strictly increase
/// left to right.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Subspace {
    ambient: usize,
    basis: Matrix,
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Subspace { ambient, basis: Matrix::zero(ambient, 0) }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace { ambient, basis: Matrix::identity(ambient) }
    }

    /// Span of the columns of `gens` (ambient = gens.rows()).
    pub fn from_columns(gens: &Matrix) -> Self {
        let ambient = gens.rows();
        // Row reduce the transpose: row space of the transpose = column
        // space of gens, and rref rows are the canonical echelon basis.
        let (r, pivots) = gens.transpose().rref();
        let dim = pivots.len();
        let mut basis = Matrix::zero(ambient, dim);
        for (row, _) in pivots.iter().enumerate() {
            for j in 0..ambient {
                basis[(j, row)] = r[(row, j)].clone();
            }
        }
        Subspace { ambient, basis }
    }

    pub fn from_vectors(ambient: usize, vecs: &[Vec<Rational>]) -> Self {
        let mut gens = Matrix::zero(ambient, vecs.len());
        for (j, v) in vecs.iter().enumerate() {
            assert_eq!(v.len(), ambient, "generator length mismatch");
            for i in 0..ambient {
                gens[(i, j)] = v[i].clone();
            }
        }
        Self::from_columns(&gens)
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient
    }

    /// The canonical basis matrix (ambient x dim).
    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn basis_vectors(&self) -> Vec<Vec<Rational>> {
        (0..self.dim()).map(|j| self.basis.column(j)).collect()
    }

    pub fn contains_vector(&self, v: &[Rational]) -> bool {
        assert_eq!(v.len(), self.ambient);
        let mut gens = Matrix::zero(self.ambient, self.dim() + 1);
        for j in 0..self.dim() {
            for i in 0..self.ambient {
                gens[(i, j)] = self.basis[(i, j)].clone();
            }
        }
        for i in 0..self.ambient {
            gens[(i, self.dim())] = v[i].clone();
        }
        gens.rank() == self.dim()
    }

    pub fn contains(&self, other: &Subspace) -> bool {
        assert_eq!(self.ambient, other.ambient, "ambient mismatch");
        self.sum(other) == *self
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        assert_eq!(self.ambient, other.ambient, "ambient mismatch");
        Subspace::from_columns(&self.basis.hcat(&other.basis))
    }

    pub fn intersect(&self, other: &Subspace) -> Subspace {
        assert_eq!(self.ambient, other.ambient, "ambient mismatch");
        // x = A u = B v  <=>  [A | -B] (u; v) = 0; intersection = A * u-part.
        let stacked = self.basis.hcat(&(-&other.basis));
        let k = stacked.kernel();
        let mut upart = Matrix::zero(self.dim(), k.cols());
        for i in 0..self.dim() {
            for j in 0..k.cols() {
                upart[(i, j)] = k[(i, j)].clone();
            }
        }
        Subspace::from_columns(&(&self.basis * &upart))
    }

    /// Image of this subspace under the linear map `m` (m.cols() == ambient).
    pub fn image(&self, m: &Matrix) -> Subspace {
        assert_eq!(m.cols(), self.ambient, "map domain mismatch");
        Subspace::from_columns(&(m * &self.basis))
    }

    /// Preimage {x : m x in self} (m.rows() == ambient of self).
    pub fn preimage(&self, m: &Matrix) -> Subspace {
        assert_eq!(m.rows(), self.ambient, "map codomain mismatch");
        // m x = B y  <=>  [m | -B](x; y) = 0; preimage = x-part of the kernel.
        let stacked = m.hcat(&(-&self.basis));
        let k = stacked.kernel();
        let mut xpart = Matrix::zero(m.cols(), k.cols());
        for i in 0..m.cols() {
            for j in 0..k.cols() {
                xpart[(i, j)] = k[(i, j)].clone();
            }
        }
        Subspace::from_columns(&xpart)
    }
}

/// A quotient K / I of nested subspaces of a common ambient space, with
/// coordinates on a chosen complement of I inside K. Used to compute induced
/// operators and induced filtrations on subquotients.
#[derive(Clone, Debug)]
pub struct QuotientSpace {
    total: Subspace,
    sub: Subspace,
    /// ambient x h matrix whose columns complete a basis of `sub` to `total`.
    comp: Matrix,
    /// Inverse-solver: (sub.dim + h) x ambient left inverse of [sub | comp]
    /// restricted to `total`, used to read off quotient coordinates.
    solver: Matrix,
}

impl QuotientSpace {
    /// Requires sub to be contained in total.
    pub fn new(total: &Subspace, sub: &Subspace) -> Self {
        assert!(total.contains(sub), "quotient of non-nested subspaces");
        // Greedily extend sub's basis by columns of total's basis.
        let mut comp_cols: Vec<Vec<Rational>> = Vec::new();
        let mut span = sub.clone();
        for j in 0..total.dim() {
            let col = total.basis().column(j);
            if !span.contains_vector(&col) {
                span = span.sum(&Subspace::from_vectors(total.ambient(), &[col.clone()]));
                comp_cols.push(col);
            }
        }
        let h = comp_cols.len();
        let mut comp = Matrix::zero(total.ambient(), h);
        for (j, col) in comp_cols.iter().enumerate() {
            for i in 0..total.ambient() {
                comp[(i, j)] = col[i].clone();
            }
        }
        // Build a left inverse of F = [sub.basis | comp] on its column space:
        // rref of [F^T F | F^T] gives (F^T F)^{-1} F^T since F has full
        // column rank.
        let f = sub.basis().hcat(&comp);
        let ft = f.transpose();
        let gram = &ft * &f;
        let solver = match gram.inverse() {
            Some(g) => &g * &ft,
            None => unreachable!("basis matrix has full column rank"),
        };
        QuotientSpace { total: total.clone(), sub: sub.clone(), comp, solver }
    }

    pub fn dim(&self) -> usize {
        self.comp.cols()
    }

    pub fn total(&self) -> &Subspace {
        &self.total
    }

    pub fn sub(&self) -> &Subspace {
        &self.sub
    }

    /// Quotient coordinates of an ambient vector lying in `total`.
    pub fn project(&self, v: &[Rational]) -> Vec<Rational> {
        debug_assert!(self.total.contains_vector(v));
        let coords = self.solver.apply(v);
        coords[self.sub.dim()..].to_vec()
    }

    /// Ambient representative of a quotient coordinate vector.
    pub fn lift(&self, w: &[Rational]) -> Vec<Rational> {
        self.comp.apply(w)
    }

    /// Matrix of the operator induced on the quotient by an ambient operator
    /// that preserves both `total` and `sub`.
    pub fn induced_operator(&self, op: &Matrix) -> Matrix {
        let h = self.dim();
        let mut m = Matrix::zero(h, h);
        for j in 0..h {
            let col = op.apply(&self.comp.column(j));
            let w = self.project(&col);
            for i in 0..h {
                m[(i, j)] = w[i].clone();
            }
        }
        m
    }

    /// Image of a subspace of `total` in the quotient (as a subspace of Q^h
    /// in quotient coordinates).
    pub fn project_subspace(&self, s: &Subspace) -> Subspace {
        let inter = s.intersect(&self.total);
        let vecs: Vec<Vec<Rational>> =
            inter.basis_vectors().iter().map(|v| self.project(v)).collect();
        Subspace::from_vectors(self.dim(), &vecs)
    }
}

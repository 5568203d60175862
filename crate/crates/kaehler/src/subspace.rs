//! Canonical subspaces of a finite coordinate space.
//!
//! A subspace is stored as the reduced row echelon basis of its span, so
//! equality and containment are syntactic and every computation that returns
//! a subspace is reproducible bit for bit.

use crate::field::{Field, FieldError, Scalar};
use crate::matrix::Matrix;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    pub field: Field,
    pub ambient_dim: usize,
    /// RREF basis rows; no zero rows.
    pub basis: Matrix,
    pub pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(field: Field, ambient_dim: usize) -> Subspace {
        Subspace {
            field,
            ambient_dim,
            basis: Matrix::zero(field, 0, ambient_dim),
            pivots: Vec::new(),
        }
    }

    pub fn full(field: Field, ambient_dim: usize) -> Subspace {
        Subspace::from_span(field, ambient_dim, (0..ambient_dim).map(|i| unit(field, ambient_dim, i)).collect())
    }

    pub fn from_span(field: Field, ambient_dim: usize, vectors: Vec<Vec<Scalar>>) -> Subspace {
        for v in &vectors {
            assert_eq!(v.len(), ambient_dim, "span vector of wrong length");
        }
        let m = Matrix::from_rows(field, vectors);
        let m = if m.rows == 0 {
            Matrix::zero(field, 0, ambient_dim)
        } else {
            m
        };
        let (r, pivots, rank) = m.rref();
        let rows: Vec<Vec<Scalar>> = (0..rank).map(|i| r.row_vec(i)).collect();
        let basis = if rows.is_empty() {
            Matrix::zero(field, 0, ambient_dim)
        } else {
            Matrix::from_rows(field, rows)
        };
        Subspace {
            field,
            ambient_dim,
            basis,
            pivots,
        }
    }

    pub fn from_matrix_rows(m: &Matrix) -> Subspace {
        Subspace::from_span(m.field, m.cols, (0..m.rows).map(|r| m.row_vec(r)).collect())
    }

    /// Column space of `m`.
    pub fn from_matrix_cols(m: &Matrix) -> Subspace {
        Subspace::from_matrix_rows(&m.transpose())
    }

    pub fn dim(&self) -> usize {
        self.basis.rows
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn basis_vectors(&self) -> Vec<Vec<Scalar>> {
        (0..self.dim()).map(|i| self.basis.row_vec(i)).collect()
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        assert_eq!(v.len(), self.ambient_dim);
        let f = self.field;
        // Reduce v against the RREF basis; zero remainder means membership.
        let mut w = v.to_vec();
        for (i, &p) in self.pivots.iter().enumerate() {
            if !f.is_zero(&w[p]) {
                let coeff = w[p].clone();
                for c in 0..self.ambient_dim {
                    w[c] = f.sub(&w[c], &f.mul(&coeff, self.basis.get(i, c)));
                }
            }
        }
        w.iter().all(|x| f.is_zero(x))
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        other.basis_vectors().iter().all(|v| self.contains(v))
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace, FieldError> {
        self.check_compatible(other)?;
        let mut vs = self.basis_vectors();
        vs.extend(other.basis_vectors());
        Ok(Subspace::from_span(self.field, self.ambient_dim, vs))
    }

    pub fn intersect(&self, other: &Subspace) -> Result<Subspace, FieldError> {
        self.check_compatible(other)?;
        // x in U cap V  <=>  x = Bu^T a = Bv^T b; solve for (a, b) in the
        // kernel of [Bu^T | -Bv^T].
        let bu_t = self.basis.transpose();
        let bv_t = other.basis.transpose().neg();
        let stacked = bu_t.hstack(&bv_t);
        let ker = kernel_basis(&stacked);
        let du = self.dim();
        let vectors = ker
            .basis_vectors()
            .into_iter()
            .map(|ab| bu_t.mul_vec(&ab[..du]))
            .collect();
        Ok(Subspace::from_span(self.field, self.ambient_dim, vectors))
    }

    /// Quotient of the ambient space by this subspace.
    ///
    /// The complement basis is the set of non-pivot coordinates, so the
    /// projection is deterministic. Its kernel is exactly `self`.
    pub fn quotient(&self) -> (Matrix, usize) {
        let f = self.field;
        let n = self.ambient_dim;
        let nonpivots: Vec<usize> = (0..n).filter(|c| !self.pivots.contains(c)).collect();
        let qdim = nonpivots.len();
        let mut proj = Matrix::zero(f, qdim, n);
        for (qi, &c) in nonpivots.iter().enumerate() {
            proj.set(qi, c, f.one());
        }
        // e_{pivot i} = -sum over non-pivot columns of the RREF row, mod self.
        for (i, &p) in self.pivots.iter().enumerate() {
            for (qi, &c) in nonpivots.iter().enumerate() {
                proj.set(qi, p, f.neg(self.basis.get(i, c)));
            }
        }
        (proj, qdim)
    }

    /// A section of the quotient projection: unit vectors at the non-pivot
    /// coordinates, as columns of an `ambient x qdim` matrix.
    pub fn quotient_section(&self) -> Matrix {
        let f = self.field;
        let n = self.ambient_dim;
        let nonpivots: Vec<usize> = (0..n).filter(|c| !self.pivots.contains(c)).collect();
        let mut sec = Matrix::zero(f, n, nonpivots.len());
        for (qi, &c) in nonpivots.iter().enumerate() {
            sec.set(c, qi, f.one());
        }
        sec
    }

    fn check_compatible(&self, other: &Subspace) -> Result<(), FieldError> {
        if self.field != other.field || self.ambient_dim != other.ambient_dim {
            Err(FieldError::Mixed)
        } else {
            Ok(())
        }
    }
}

pub fn unit(field: Field, n: usize, i: usize) -> Vec<Scalar> {
    let mut v = vec![field.zero(); n];
    v[i] = field.one();
    v
}

/// Null space `{v : m v = 0}` in canonical form.
pub fn kernel_basis(m: &Matrix) -> Subspace {
    let f = m.field;
    let (r, pivots, rank) = m.rref();
    let n = m.cols;
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    let mut vectors = Vec::with_capacity(n - rank);
    for &fc in &free {
        let mut v = vec![f.zero(); n];
        v[fc] = f.one();
        for (i, &p) in pivots.iter().enumerate() {
            v[p] = f.neg(r.get(i, fc));
        }
        vectors.push(v);
    }
    Subspace::from_span(f, n, vectors)
}

/// Image of a subspace under a linear map given on ambient coordinates.
pub fn image_of(m: &Matrix, s: &Subspace) -> Subspace {
    let vectors = s.basis_vectors().into_iter().map(|v| m.mul_vec(&v)).collect();
    Subspace::from_span(m.field, m.rows, vectors)
}

/// Preimage `{v : m v in s}`.
pub fn preimage_of(m: &Matrix, s: &Subspace) -> Subspace {
    // v maps into s iff proj(m v) = 0 for the quotient projection of s.
    let (proj, _) = s.quotient();
    kernel_basis(&proj.mul(m))
}

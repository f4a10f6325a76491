use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::ser::{Serialize, SerializeStruct, Serializer};

use crate::error::{Error, Result};

/// Accuracy target for singular values computed through the Gram matrix.
pub const SPECTRAL_TOLERANCE: f64 = 1e-10;

/// Dense matrix of finite doubles.
#[derive(Clone, Debug, PartialEq)]
pub struct FloatMatrix(DMatrix<f64>);

impl FloatMatrix {
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyMatrix);
        }
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch {
                rows,
                cols,
                expected: rows * cols,
                got: data.len(),
            });
        }
        Self::from_dmatrix(DMatrix::from_row_slice(rows, cols, &data))
    }

    pub fn from_dmatrix(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() == 0 || m.ncols() == 0 {
            return Err(Error::EmptyMatrix);
        }
        for j in 0..m.ncols() {
            for i in 0..m.nrows() {
                if !m[(i, j)].is_finite() {
                    return Err(Error::NonFinite { row: i, col: j });
                }
            }
        }
        Ok(Self(m))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    pub fn as_dmatrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_dmatrix(self) -> DMatrix<f64> {
        self.0
    }

    pub fn select_columns(&self, cols: &[usize]) -> DMatrix<f64> {
        self.0.select_columns(cols)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&v| v == 0.0)
    }

    pub fn mul(&self, rhs: &FloatMatrix) -> Result<FloatMatrix> {
        if self.cols() != rhs.rows() {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows(),
                self.cols(),
                rhs.rows(),
                rhs.cols()
            )));
        }
        Self::from_dmatrix(&self.0 * &rhs.0)
    }

    pub fn scaled(&self, c: f64) -> Result<FloatMatrix> {
        Self::from_dmatrix(&self.0 * c)
    }

    /// Every nonzero column rescaled to unit Euclidean norm. Column scaling is
    /// a product of column multiplications, so spark and orders are unchanged.
    pub fn column_normalized(&self) -> FloatMatrix {
        let mut m = self.0.clone();
        for mut col in m.column_iter_mut() {
            let norm = col.norm();
            if norm > 0.0 {
                col /= norm;
            }
        }
        Self(m)
    }
}

impl Serialize for FloatMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let entries: Vec<Vec<f64>> = (0..self.rows())
            .map(|i| (0..self.cols()).map(|j| self.get(i, j)).collect())
            .collect();
        let mut s = serializer.serialize_struct("FloatMatrix", 3)?;
        s.serialize_field("rows", &self.rows())?;
        s.serialize_field("cols", &self.cols())?;
        s.serialize_field("entries", &entries)?;
        s.end()
    }
}

/// Smallest and largest eigenvalue of `sub^T sub`, clamped at zero. These are
/// the squared extreme singular values over the column count of `sub`.
pub fn gram_extremes(sub: &DMatrix<f64>) -> (f64, f64) {
    if sub.ncols() == 1 {
        let sq = sub.norm_squared();
        return (sq, sq);
    }
    let gram = sub.transpose() * sub;
    let eig = SymmetricEigen::new(gram);
    let lo = eig.eigenvalues.min().max(0.0);
    let hi = eig.eigenvalues.max().max(0.0);
    (lo, hi)
}

/// `(sigma_min, sigma_max)` of `a`, taken over its `n` columns (so a wide
/// matrix has `sigma_min = 0`).
pub fn extreme_singular_values(a: &FloatMatrix) -> (f64, f64) {
    let (lo, hi) = gram_extremes(a.as_dmatrix());
    (lo.sqrt(), hi.sqrt())
}

fn project_out(v: &mut DVector<f64>, basis: &[DVector<f64>]) {
    // two passes of modified Gram-Schmidt
    for _ in 0..2 {
        for q in basis {
            let d = q.dot(v);
            v.axpy(-d, q, 1.0);
        }
    }
}

/// Orthonormal basis of the span of `vectors`; numerically dependent inputs
/// (residual below `1e-12` of their norm) are dropped.
pub fn orthonormalize(vectors: &[DVector<f64>]) -> Vec<DVector<f64>> {
    let mut basis: Vec<DVector<f64>> = Vec::with_capacity(vectors.len());
    for v in vectors {
        let scale = v.norm();
        if scale == 0.0 {
            continue;
        }
        let mut w = v.clone();
        project_out(&mut w, &basis);
        let norm = w.norm();
        if norm > 1e-12 * scale {
            basis.push(w / norm);
        }
    }
    basis
}

/// Orthonormal `n x n` matrix whose first column is `first / |first|`. The
/// remaining columns come from the standard basis, at each step taking the
/// candidate with the largest residual after projection.
pub fn complete_orthonormal_basis(first: &DVector<f64>) -> Result<DMatrix<f64>> {
    let n = first.len();
    let norm = first.norm();
    if n == 0 || norm == 0.0 || !norm.is_finite() {
        return Err(Error::Internal(
            "basis completion needs a nonzero finite seed vector".into(),
        ));
    }
    let mut basis = vec![first / norm];
    let mut used = vec![false; n];
    while basis.len() < n {
        let mut best: Option<(usize, DVector<f64>, f64)> = None;
        for (j, _) in used.iter().enumerate().filter(|(_, u)| !**u) {
            let mut e = DVector::zeros(n);
            e[j] = 1.0;
            project_out(&mut e, &basis);
            let r = e.norm();
            if best.as_ref().is_none_or(|b| r > b.2) {
                best = Some((j, e, r));
            }
        }
        let (j, e, r) = best.expect("fewer than n vectors chosen");
        used[j] = true;
        basis.push(e / r);
    }
    Ok(DMatrix::from_columns(&basis))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= SPECTRAL_TOLERANCE * a.abs().max(b.abs()).max(1e-2)
    }

    #[test]
    fn singular_value_examples() {
        assert_eq!(
            extreme_singular_values(&FloatMatrix::identity(2)),
            (1.0, 1.0)
        );
        let d = FloatMatrix::from_row_major(2, 2, vec![3.0, 0.0, 0.0, 0.0]).unwrap();
        let (lo, hi) = extreme_singular_values(&d);
        assert!(lo.abs() < 1e-12 && close(hi, 3.0));
        let col = FloatMatrix::from_row_major(2, 1, vec![3.0, 4.0]).unwrap();
        assert_eq!(extreme_singular_values(&col), (5.0, 5.0));
    }

    #[test]
    fn rotation_has_unit_singular_values() {
        let (s, c) = 0.3f64.sin_cos();
        let r = FloatMatrix::from_row_major(2, 2, vec![c, -s, s, c]).unwrap();
        let (lo, hi) = extreme_singular_values(&r);
        assert!((lo - 1.0).abs() < 1e-10 && (hi - 1.0).abs() < 1e-10);
    }

    #[test]
    fn non_finite_rejected() {
        assert!(matches!(
            FloatMatrix::from_row_major(1, 2, vec![1.0, f64::NAN]),
            Err(Error::NonFinite { row: 0, col: 1 })
        ));
        assert!(FloatMatrix::from_row_major(1, 1, vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn completion_is_orthonormal() {
        let v = DVector::from_vec(vec![1.0, -1.0, 0.0, 2.0]);
        let phi = complete_orthonormal_basis(&v).unwrap();
        let err = (phi.transpose() * &phi - DMatrix::identity(4, 4)).amax();
        assert!(err < 1e-12);
        let first = phi.column(0);
        assert!((first[3] - 2.0 / 6f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn orthonormalize_drops_dependent_vectors() {
        let a = DVector::from_vec(vec![1.0, 1.0, 0.0]);
        let b = DVector::from_vec(vec![2.0, 2.0, 0.0]);
        let c = DVector::from_vec(vec![0.0, 1.0, 1.0]);
        let q = orthonormalize(&[a, b, c]);
        assert_eq!(q.len(), 2);
        assert!(q[0].dot(&q[1]).abs() < 1e-15);
    }
}

//! Validated dense orthogonal matrices.

use nalgebra::DMatrix;

use crate::svd::singular_values;
use crate::{Error, Result};

/// Default orthogonality tolerance, scaled by `n`: `‖VᵀV - I‖_F ≤ 1e-8·n`.
pub const ORTHOGONALITY_TOL: f64 = 1e-8;

/// Singular values of `V - I` below `1e-6·√n` count as zero.
pub const RANK_TOL: f64 = 1e-6;

pub fn default_rank_tolerance(n: usize) -> f64 {
    RANK_TOL * (n as f64).sqrt()
}

/// A square matrix `V` with `VᵀV = I` up to a tolerance checked on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOrthogonal {
    v: DMatrix<f64>,
}

impl DenseOrthogonal {
    pub fn new(v: DMatrix<f64>) -> Result<Self> {
        let tol = ORTHOGONALITY_TOL * v.nrows().max(1) as f64;
        Self::with_tolerance(v, tol)
    }

    pub fn with_tolerance(v: DMatrix<f64>, tolerance: f64) -> Result<Self> {
        if v.nrows() != v.ncols() {
            return Err(Error::NotSquare {
                rows: v.nrows(),
                cols: v.ncols(),
            });
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        let residual = orthogonality_residual(&v);
        if residual > tolerance {
            return Err(Error::NotOrthogonal {
                residual,
                tolerance,
            });
        }
        Ok(Self { v })
    }

    /// Wraps a matrix known to be orthogonal by construction.
    pub(crate) fn from_trusted(v: DMatrix<f64>) -> Self {
        debug_assert_eq!(v.nrows(), v.ncols());
        Self { v }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            v: DMatrix::identity(n, n),
        }
    }

    pub fn n(&self) -> usize {
        self.v.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.v
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.v
    }

    pub fn trace(&self) -> f64 {
        self.v.trace()
    }

    pub fn orthogonality_residual(&self) -> f64 {
        orthogonality_residual(&self.v)
    }

    pub fn transpose(&self) -> Self {
        Self {
            v: self.v.transpose(),
        }
    }
}

/// `‖VᵀV - I‖_F`.
pub fn orthogonality_residual(v: &DMatrix<f64>) -> f64 {
    let n = v.ncols();
    (v.tr_mul(v) - DMatrix::<f64>::identity(n, n)).norm()
}

/// `(V + Vᵀ)/2`.
pub fn symmetric_part(v: &DenseOrthogonal) -> DMatrix<f64> {
    symmetrize(v.matrix())
}

pub(crate) fn symmetrize(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    DMatrix::from_fn(n, n, |i, j| 0.5 * (a[(i, j)] + a[(j, i)]))
}

/// Dimension of the eigenspace of `V` for eigenvalue 1, computed as
/// `n - rank(V - I)` with singular values below `tol` treated as zero.
pub fn eigenspace_one_dimension(v: &DenseOrthogonal, tol: f64) -> usize {
    let n = v.n();
    let shifted = v.matrix() - DMatrix::<f64>::identity(n, n);
    singular_values(&shifted)
        .into_iter()
        .filter(|&s| s < tol)
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::make_reflector;

    #[test]
    fn rejects_non_orthogonal() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.1, 0.0, 1.0]);
        assert!(matches!(
            DenseOrthogonal::new(m),
            Err(Error::NotOrthogonal { .. })
        ));
        let m = DMatrix::<f64>::zeros(2, 3);
        assert!(matches!(
            DenseOrthogonal::new(m),
            Err(Error::NotSquare { rows: 2, cols: 3 })
        ));
    }

    #[test]
    fn symmetric_part_of_symmetric_is_itself() {
        let h = make_reflector(&[1.0, 2.0, 2.0]).unwrap().to_matrix();
        let v = DenseOrthogonal::new(h.clone()).unwrap();
        assert_eq!(symmetric_part(&v), h);
    }

    #[test]
    fn symmetric_part_of_rotation() {
        let t: f64 = 0.7;
        let r = DMatrix::from_row_slice(2, 2, &[t.cos(), -t.sin(), t.sin(), t.cos()]);
        let s = symmetric_part(&DenseOrthogonal::new(r).unwrap());
        let expected = DMatrix::<f64>::identity(2, 2) * t.cos();
        assert!((s - expected).norm() < 1e-16);
    }

    #[test]
    fn e1_dimension_basic() {
        let n = 6;
        let tol = default_rank_tolerance(n);
        assert_eq!(
            eigenspace_one_dimension(&DenseOrthogonal::identity(n), tol),
            n
        );
        let h = make_reflector(&[1.0, -2.0, 0.5, 3.0, 0.0, 1.0]).unwrap();
        let v = DenseOrthogonal::new(h.to_matrix()).unwrap();
        assert_eq!(eigenspace_one_dimension(&v, tol), n - 1);
        let minus = DenseOrthogonal::new(-DMatrix::<f64>::identity(n, n)).unwrap();
        assert_eq!(eigenspace_one_dimension(&minus, tol), 0);
    }
}

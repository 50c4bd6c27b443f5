//! Dense symmetric linear algebra used throughout the crate.
//!
//! Eigendecompositions and Cholesky factorizations are delegated to
//! `nalgebra`; this module pins the conventions the rest of the crate relies
//! on: eigenvalues are always sorted non-increasing, symmetric inputs are
//! stored exactly symmetric, and factorization failures surface as
//! [`Error::NotPositiveDefinite`].

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// Largest asymmetry (relative to the largest entry, floored at 1) that is
/// silently symmetrized on construction.
pub const SYMMETRY_TOLERANCE: f64 = 1e-9;

const EIGEN_MAX_ITERATIONS: usize = 10_000;

/// A square matrix stored exactly symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix(DMatrix<f64>);

impl SymmetricMatrix {
    /// Wraps `m`, replacing it by `(m + mᵀ)/2` when the asymmetry is within
    /// [`SYMMETRY_TOLERANCE`].
    pub fn new(mut m: DMatrix<f64>) -> Result<Self> {
        let (rows, cols) = m.shape();
        if rows != cols || rows == 0 {
            return Err(Error::NotSquare { rows, cols });
        }
        let scale = m.amax().max(1.0);
        let mut asym = 0.0f64;
        for i in 0..rows {
            for j in (i + 1)..rows {
                asym = asym.max((m[(i, j)] - m[(j, i)]).abs());
            }
        }
        if !asym.is_finite() || asym > SYMMETRY_TOLERANCE * scale {
            return Err(Error::NotSymmetric(asym));
        }
        for i in 0..rows {
            for j in (i + 1)..rows {
                let avg = 0.5 * (m[(i, j)] + m[(j, i)]);
                m[(i, j)] = avg;
                m[(j, i)] = avg;
            }
        }
        Ok(Self(m))
    }

    /// Builds from the upper triangle of `m`, mirroring it below the diagonal.
    pub(crate) fn from_upper(mut m: DMatrix<f64>) -> Self {
        let n = m.nrows();
        for i in 0..n {
            for j in (i + 1)..n {
                m[(j, i)] = m[(i, j)];
            }
        }
        Self(m)
    }

    pub fn identity(dim: usize) -> Self {
        Self(DMatrix::identity(dim, dim))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(DMatrix::zeros(dim, dim))
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        Self(DMatrix::from_diagonal(&DVector::from_column_slice(diag)))
    }

    /// Row-major construction; fails on asymmetry like [`SymmetricMatrix::new`].
    pub fn from_row_slice(dim: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        Self::new(DMatrix::from_row_slice(dim, dim, entries))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.0
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self(&self.0 * factor)
    }

    /// Quadratic form `vᵀ A v`.
    pub fn quadratic_form(&self, v: &DVector<f64>) -> f64 {
        v.dot(&(&self.0 * v))
    }

    pub fn trace(&self) -> f64 {
        self.0.trace()
    }
}

impl std::ops::Index<(usize, usize)> for SymmetricMatrix {
    type Output = f64;

    fn index(&self, idx: (usize, usize)) -> &f64 {
        &self.0[idx]
    }
}

/// Eigenpairs of a symmetric matrix, eigenvalues sorted non-increasing and
/// eigenvectors stored as orthonormal columns in matching order.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: DVector<f64>,
    pub eigenvectors: DMatrix<f64>,
}

impl SpectralDecomposition {
    /// `V·diag(eigenvalues)·Vᵀ`.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let v = &self.eigenvectors;
        v * DMatrix::from_diagonal(&self.eigenvalues) * v.transpose()
    }
}

pub fn sym_eigendecomposition(a: &SymmetricMatrix) -> Result<SpectralDecomposition> {
    let eig = SymmetricEigen::try_new(a.as_matrix().clone(), f64::EPSILON, EIGEN_MAX_ITERATIONS)
        .ok_or(Error::EigenNoConvergence)?;
    let n = a.dim();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));

    let eigenvalues = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut eigenvectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        eigenvectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    if eigenvalues.iter().any(|x| !x.is_finite()) {
        return Err(Error::EigenNoConvergence);
    }
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// Lower-triangular `G` with `G·Gᵀ = a` and a strictly positive diagonal.
pub fn cholesky_lower(a: &SymmetricMatrix) -> Result<DMatrix<f64>> {
    let chol = Cholesky::new(a.as_matrix().clone()).ok_or(Error::NotPositiveDefinite)?;
    let g = chol.unpack();
    if g.diagonal().iter().any(|&p| !(p > 0.0) || !p.is_finite()) {
        return Err(Error::NotPositiveDefinite);
    }
    Ok(g)
}

/// Solves `a·x = y` for SPD `a`.
pub fn spd_solve(a: &SymmetricMatrix, y: &DVector<f64>) -> Result<DVector<f64>> {
    if y.len() != a.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: y.len(),
        });
    }
    let chol = Cholesky::new(a.as_matrix().clone()).ok_or(Error::NotPositiveDefinite)?;
    Ok(chol.solve(y))
}

/// Solves `g·x = y` for lower-triangular `g` by forward substitution.
pub fn forward_substitution(g: &DMatrix<f64>, y: &[f64]) -> Vec<f64> {
    let n = y.len();
    let mut x = vec![0.0; n];
    for i in 0..n {
        let mut s = y[i];
        for j in 0..i {
            s -= g[(i, j)] * x[j];
        }
        x[i] = s / g[(i, i)];
    }
    x
}

/// Solves `gᵀ·x = y` for lower-triangular `g` by back substitution.
pub fn back_substitution_transposed(g: &DMatrix<f64>, y: &[f64]) -> Vec<f64> {
    let n = y.len();
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = y[i];
        for j in (i + 1)..n {
            s -= g[(j, i)] * x[j];
        }
        x[i] = s / g[(i, i)];
    }
    x
}

/// `‖a − b‖_F / max(‖b‖_F, tiny)`.
pub fn relative_frobenius(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let denom = b.norm().max(f64::MIN_POSITIVE);
    (a - b).norm() / denom
}

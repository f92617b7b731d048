//! Small dense symmetric matrices: Cholesky factorization and
//! positive-definiteness repair of correlation matrices.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

/// Relative pivot threshold below which a matrix is treated as not
/// positive definite.
pub const PIVOT_TOLERANCE: f64 = 1e-12;

/// Default eigenvalue floor used by [`nearest_pd_repair`].
pub const DEFAULT_EIGEN_FLOOR: f64 = 1e-4;

const SYMMETRY_TOLERANCE: f64 = 1e-12;

/// A square symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix(DMatrix<f64>);

impl SymMatrix {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if !m.is_square() || m.nrows() == 0 {
            return Err(Error::InvalidMatrix(format!(
                "expected a non-empty square matrix, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidMatrix("non-finite entry".into()));
        }
        let n = m.nrows();
        for i in 0..n {
            for j in (i + 1)..n {
                if (m[(i, j)] - m[(j, i)]).abs() > SYMMETRY_TOLERANCE {
                    return Err(Error::InvalidMatrix(format!(
                        "not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(Self(m))
    }

    pub fn from_row_slice(dim: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::InvalidMatrix(format!(
                "expected {} entries, got {}",
                dim * dim,
                entries.len()
            )));
        }
        Self::new(DMatrix::from_row_slice(dim, dim, entries))
    }

    pub fn identity(dim: usize) -> Self {
        Self(DMatrix::identity(dim, dim))
    }

    /// Checks the extra requirements of a correlation matrix: unit
    /// diagonal and off-diagonal entries in [-1, 1].
    pub fn validate_correlation(&self) -> Result<()> {
        let n = self.dim();
        for i in 0..n {
            if self.0[(i, i)] != 1.0 {
                return Err(Error::InvalidMatrix(format!(
                    "diagonal entry {i} is {} (expected 1)",
                    self.0[(i, i)]
                )));
            }
            for j in 0..n {
                if i != j && !(-1.0..=1.0).contains(&self.0[(i, j)]) {
                    return Err(Error::InvalidMatrix(format!(
                        "correlation ({i}, {j}) outside [-1, 1]"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = SymmetricEigen::new(self.0.clone())
            .eigenvalues
            .iter()
            .copied()
            .collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }
}

/// Lower-triangular Cholesky factor `L` with `L·Lᵀ = a`.
pub fn cholesky(a: &SymMatrix) -> Result<DMatrix<f64>> {
    cholesky_dense(a.as_matrix())
}

/// Cholesky on a raw dense matrix; only the lower triangle is read.
///
/// A pivot counts as failed when it is at most `PIVOT_TOLERANCE` times the
/// original diagonal entry (for unit-diagonal matrices this is the absolute
/// threshold 1e-12).
pub(crate) fn cholesky_dense(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    let mut l = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        let scale = a[(j, j)].abs().max(f64::MIN_POSITIVE);
        if !(d > PIVOT_TOLERANCE * scale) {
            return Err(Error::NotPositiveDefinite { index: j, pivot: d });
        }
        let djj = d.sqrt();
        l[(j, j)] = djj;
        for i in (j + 1)..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / djj;
        }
    }
    Ok(l)
}

/// Solves `L·Lᵀ·x = b` given the lower Cholesky factor.
pub(crate) fn cholesky_solve(l: &DMatrix<f64>, b: &[f64]) -> Vec<f64> {
    let n = l.nrows();
    let mut y = b.to_vec();
    for i in 0..n {
        let mut s = y[i];
        for k in 0..i {
            s -= l[(i, k)] * y[k];
        }
        y[i] = s / l[(i, i)];
    }
    for i in (0..n).rev() {
        let mut s = y[i];
        for k in (i + 1)..n {
            s -= l[(k, i)] * y[k];
        }
        y[i] = s / l[(i, i)];
    }
    y
}

/// Inverse of `L·Lᵀ` from its lower Cholesky factor.
pub(crate) fn cholesky_inverse(l: &DMatrix<f64>) -> DMatrix<f64> {
    let n = l.nrows();
    let mut inv = DMatrix::<f64>::zeros(n, n);
    let mut e = vec![0.0; n];
    for j in 0..n {
        e.iter_mut().for_each(|v| *v = 0.0);
        e[j] = 1.0;
        let col = cholesky_solve(l, &e);
        for i in 0..n {
            inv[(i, j)] = col[i];
        }
    }
    // exact symmetry
    for i in 0..n {
        for j in (i + 1)..n {
            let v = 0.5 * (inv[(i, j)] + inv[(j, i)]);
            inv[(i, j)] = v;
            inv[(j, i)] = v;
        }
    }
    inv
}

/// Makes a unit-diagonal symmetric matrix positive definite.
///
/// Matrices that already pass [`cholesky`] are returned unchanged. Otherwise
/// eigenvalues are clipped at `floor`, the matrix is reassembled and rescaled
/// to unit diagonal; the clip/rescale pair repeats until the smallest
/// eigenvalue of the rescaled matrix is at least `floor`.
pub fn nearest_pd_repair(a: &SymMatrix, floor: f64) -> SymMatrix {
    if cholesky(a).is_ok() {
        return a.clone();
    }
    let floor = if floor > 0.0 { floor } else { DEFAULT_EIGEN_FLOOR };
    let n = a.dim();
    let mut current = a.as_matrix().clone();
    for _ in 0..1000 {
        let eig = SymmetricEigen::new(current.clone());
        let clipped = eig.eigenvalues.map(|v| v.max(floor));
        let mut rebuilt =
            &eig.eigenvectors * DMatrix::from_diagonal(&clipped) * eig.eigenvectors.transpose();
        let scale: Vec<f64> = (0..n).map(|i| rebuilt[(i, i)].sqrt()).collect();
        for i in 0..n {
            for j in 0..n {
                rebuilt[(i, j)] /= scale[i] * scale[j];
            }
        }
        for i in 0..n {
            rebuilt[(i, i)] = 1.0;
            for j in (i + 1)..n {
                let v = 0.5 * (rebuilt[(i, j)] + rebuilt[(j, i)]);
                rebuilt[(i, j)] = v;
                rebuilt[(j, i)] = v;
            }
        }
        current = rebuilt;
        let min_ev = SymmetricEigen::new(current.clone())
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if min_ev >= floor * (1.0 - 1e-9) {
            break;
        }
    }
    SymMatrix(current)
}

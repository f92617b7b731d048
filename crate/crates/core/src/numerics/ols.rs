//! Least squares with an intercept and optional ridge stabilization.

use nalgebra::DMatrix;

use super::linalg::{cholesky_dense, cholesky_inverse, SymMatrix};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct OlsFit {
    /// Intercept first, then one slope per predictor.
    pub coefficients: Vec<f64>,
    pub residual_variance: f64,
    /// Inverse of the (ridged) cross-product matrix.
    pub xtx_inverse: SymMatrix,
    pub residual_df: usize,
    pub coefficient_variances: Vec<f64>,
    pub sse: f64,
    /// Lower Cholesky factor of the (ridged) cross-product matrix.
    pub(crate) xtx_factor: DMatrix<f64>,
}

impl OlsFit {
    /// Linear predictor for one row of predictor values (no intercept entry).
    pub fn predict_row(&self, row: &[f64]) -> f64 {
        predict(&self.coefficients, row)
    }
}

pub(crate) fn predict(coefficients: &[f64], row: &[f64]) -> f64 {
    coefficients[0]
        + coefficients[1..]
            .iter()
            .zip(row)
            .map(|(b, x)| b * x)
            .sum::<f64>()
}

/// Fits `outcome ~ 1 + predictors` by (ridged) least squares.
///
/// `predictors` is `n × q`. The ridge adds `ridge · diag(XᵀX)` to the
/// cross-product matrix, which is scale-free in each column.
pub fn ols_fit(predictors: &DMatrix<f64>, outcome: &[f64], ridge: f64) -> Result<OlsFit> {
    let columns: Vec<&[f64]> = (0..predictors.ncols())
        .map(|j| {
            let start = j * predictors.nrows();
            &predictors.as_slice()[start..start + predictors.nrows()]
        })
        .collect();
    ols_fit_columns(&columns, outcome, ridge)
}

/// Same as [`ols_fit`], with predictors given as column slices.
pub fn ols_fit_columns(columns: &[&[f64]], outcome: &[f64], ridge: f64) -> Result<OlsFit> {
    let n = outcome.len();
    let q = columns.len();
    let p = q + 1;
    if columns.iter().any(|c| c.len() != n) {
        return Err(Error::RowCountMismatch {
            left: n,
            right: columns.iter().map(|c| c.len()).find(|&l| l != n).unwrap_or(n),
        });
    }
    if n <= p {
        return Err(Error::TooFewRows {
            needed: p + 1,
            got: n,
        });
    }
    if !(ridge >= 0.0) {
        return Err(Error::Domain(format!("ridge must be non-negative, got {ridge}")));
    }

    // cross products with the implicit intercept column at index 0
    let col = |j: usize| -> Option<&[f64]> { if j == 0 { None } else { Some(columns[j - 1]) } };
    let mut xtx = DMatrix::<f64>::zeros(p, p);
    let mut xty = vec![0.0; p];
    xtx[(0, 0)] = n as f64;
    xty[0] = outcome.iter().sum();
    for j in 1..p {
        let cj = col(j).unwrap();
        let sj: f64 = cj.iter().sum();
        xtx[(j, 0)] = sj;
        xtx[(0, j)] = sj;
        xty[j] = cj.iter().zip(outcome).map(|(a, b)| a * b).sum();
        for k in 1..=j {
            let ck = col(k).unwrap();
            let s: f64 = cj.iter().zip(ck).map(|(a, b)| a * b).sum();
            xtx[(j, k)] = s;
            xtx[(k, j)] = s;
        }
    }
    if ridge > 0.0 {
        for j in 0..p {
            xtx[(j, j)] += ridge * xtx[(j, j)];
        }
    }

    let factor = cholesky_dense(&xtx).map_err(|_| Error::SingularDesign)?;
    let coefficients = super::linalg::cholesky_solve(&factor, &xty);
    let inverse = cholesky_inverse(&factor);

    let mut sse = 0.0;
    let mut row = vec![0.0; q];
    for i in 0..n {
        for (j, c) in columns.iter().enumerate() {
            row[j] = c[i];
        }
        let r = outcome[i] - predict(&coefficients, &row);
        sse += r * r;
    }
    let residual_df = n - p;
    let residual_variance = sse / residual_df as f64;
    let coefficient_variances = (0..p).map(|j| residual_variance * inverse[(j, j)]).collect();

    Ok(OlsFit {
        coefficients,
        residual_variance,
        xtx_inverse: SymMatrix::new(inverse)?,
        residual_df,
        coefficient_variances,
        sse,
        xtx_factor: factor,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let x: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| 2.0 + 3.0 * v).collect();
        let fit = ols_fit_columns(&[&x], &y, 0.0).unwrap();
        assert!((fit.coefficients[0] - 2.0).abs() < 1e-12);
        assert!((fit.coefficients[1] - 3.0).abs() < 1e-12);
        assert!(fit.residual_variance < 1e-20);
        assert_eq!(fit.residual_df, 8);
    }

    #[test]
    fn orthogonal_outcome_gives_zero_slope() {
        let x = [-2.0, -1.0, 0.0, 1.0, 2.0];
        let y = [4.0, 1.0, 0.0, 1.0, 4.0];
        let fit = ols_fit_columns(&[&x], &y, 0.0).unwrap();
        assert!(fit.coefficients[1].abs() < 1e-14);
    }

    #[test]
    fn duplicate_columns_are_singular() {
        let x: Vec<f64> = (0..20).map(|i| (i as f64).sin()).collect();
        let y: Vec<f64> = (0..20).map(|i| i as f64).collect();
        assert_eq!(
            ols_fit_columns(&[&x, &x], &y, 0.0).unwrap_err(),
            Error::SingularDesign
        );
        // the ridge makes the same design solvable
        assert!(ols_fit_columns(&[&x, &x], &y, 1e-5).is_ok());
    }

    #[test]
    fn variances_follow_inverse_diagonal() {
        let x1: Vec<f64> = (0..30).map(|i| (i as f64 * 0.37).cos()).collect();
        let x2: Vec<f64> = (0..30).map(|i| (i as f64 * 1.3).sin()).collect();
        let y: Vec<f64> = (0..30)
            .map(|i| 1.0 + x1[i] - 0.5 * x2[i] + ((i * 7919) % 13) as f64 / 13.0)
            .collect();
        let m = DMatrix::from_fn(30, 2, |i, j| if j == 0 { x1[i] } else { x2[i] });
        let fit = ols_fit(&m, &y, 0.0).unwrap();
        assert_eq!(fit.residual_df, 27);
        for j in 0..3 {
            let expect = fit.residual_variance * fit.xtx_inverse.get(j, j);
            assert_eq!(fit.coefficient_variances[j], expect);
        }
    }

    #[test]
    fn too_few_rows() {
        let x = [1.0, 2.0];
        assert!(matches!(
            ols_fit_columns(&[&x], &[1.0, 2.0], 0.0),
            Err(Error::TooFewRows { .. })
        ));
    }
}

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::linalg::{cholesky, SymMatrix};
use crate::error::Result;

/// `n` i.i.d. rows from the zero-mean multivariate normal with covariance
/// `corr`. Rows are drawn in order from `rng`, one factor-product per row.
pub fn sample_mvn<R: Rng + ?Sized>(corr: &SymMatrix, n: usize, rng: &mut R) -> Result<DMatrix<f64>> {
    let l = cholesky(corr)?;
    let d = corr.dim();
    let mut out = DMatrix::<f64>::zeros(n, d);
    let mut z = vec![0.0; d];
    for i in 0..n {
        for v in z.iter_mut() {
            *v = StandardNormal.sample(rng);
        }
        for r in 0..d {
            let mut s = 0.0;
            for c in 0..=r {
                s += l[(r, c)] * z[c];
            }
            out[(i, r)] = s;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::numerics::RngStream;

    fn sample_correlation(x: &DMatrix<f64>, a: usize, b: usize) -> f64 {
        let n = x.nrows() as f64;
        let ma = x.column(a).sum() / n;
        let mb = x.column(b).sum() / n;
        let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
        for i in 0..x.nrows() {
            let da = x[(i, a)] - ma;
            let db = x[(i, b)] - mb;
            sab += da * db;
            saa += da * da;
            sbb += db * db;
        }
        sab / (saa * sbb).sqrt()
    }

    #[test]
    fn identity_sample_is_uncorrelated() {
        let x = sample_mvn(&SymMatrix::identity(4), 1_000_000, &mut RngStream::new(1).rng()).unwrap();
        for a in 0..4 {
            for b in (a + 1)..4 {
                assert!(sample_correlation(&x, a, b).abs() < 0.005);
            }
        }
    }

    #[test]
    fn equicorrelated_sample() {
        let mut e = vec![0.5; 16];
        for i in 0..4 {
            e[i * 4 + i] = 1.0;
        }
        let corr = SymMatrix::from_row_slice(4, &e).unwrap();
        let x = sample_mvn(&corr, 1_000_000, &mut RngStream::new(2).rng()).unwrap();
        for a in 0..4 {
            for b in (a + 1)..4 {
                assert!((sample_correlation(&x, a, b) - 0.5).abs() < 0.005);
            }
        }
    }

    #[test]
    fn single_row_and_reproducibility() {
        let s = RngStream::with_path(9, &[1, 2]);
        let a = sample_mvn(&SymMatrix::identity(4), 1, &mut s.rng()).unwrap();
        assert_eq!(a.shape(), (1, 4));
        assert!(a.iter().all(|v| v.is_finite()));
        let b = sample_mvn(&SymMatrix::identity(4), 1, &mut s.rng()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn non_pd_is_rejected() {
        let corr = SymMatrix::from_row_slice(2, &[1.0, 1.0, 1.0, 1.0]).unwrap();
        assert!(matches!(
            sample_mvn(&corr, 3, &mut RngStream::new(0).rng()),
            Err(Error::NotPositiveDefinite { .. })
        ));
    }
}

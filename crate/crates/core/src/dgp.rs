//! The sixteen correlation scenarios, their population regression
//! coefficients, and sample generation.

use std::io::Write;

use crate::data::{TwoWaveDataset, WaveSchema};
use crate::error::{Error, Result};
use crate::numerics::{
    cholesky, cholesky_dense, cholesky_solve, nearest_pd_repair, sample_mvn, RngStream, SymMatrix,
    DEFAULT_EIGEN_FLOOR,
};

pub const SCENARIO_COUNT: u8 = 16;

const LEVELS: [f64; 4] = [0.1, 0.3, 0.5, 0.7];

/// Cross-lag correlation used by scenario 16 instead of 0.7.
pub const SCENARIO_16_CROSS_LAG: f64 = 0.66;

/// Correlation structure over `x1, y1, x2, y2`.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationScenario {
    pub id: u8,
    pub rho_within: f64,
    pub rho_between: f64,
    /// ρ(y1, x2) = ρ(x1, y2) as specified, before any repair.
    pub rho_cross_lag: f64,
    /// Matrix used for generation (post-repair when `repaired`).
    pub matrix: SymMatrix,
    pub repaired: bool,
}

/// Population means and coefficients of `y2 ~ x1 + y1 + x2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PopulationTruth {
    pub means: [f64; 4],
    /// `b0, b_x1, b_y1, b_x2`.
    pub coefficients: [f64; 4],
}

/// Correlation matrix as printed for a (within, between, cross-lag) triple.
pub fn printed_matrix(within: f64, between: f64, cross_lag: f64) -> Result<SymMatrix> {
    let (w, b, c) = (within, between, cross_lag);
    // order x1, y1, x2, y2
    SymMatrix::from_row_slice(
        4,
        &[
            1.0, w, b, c, //
            w, 1.0, c, b, //
            b, c, 1.0, w, //
            c, b, w, 1.0,
        ],
    )
}

pub fn scenario(id: u8) -> Result<CorrelationScenario> {
    if !(1..=SCENARIO_COUNT).contains(&id) {
        return Err(Error::Config(format!("scenario id must be in 1..=16, got {id}")));
    }
    let idx = (id - 1) as usize;
    let rho_within = LEVELS[idx / 4];
    let rho_between = LEVELS[idx % 4];
    let rho_cross_lag = if id == 16 { SCENARIO_16_CROSS_LAG } else { rho_between };
    let printed = printed_matrix(rho_within, rho_between, rho_cross_lag)?;
    let (matrix, repaired) = match cholesky(&printed) {
        Ok(_) => (printed, false),
        Err(_) => (nearest_pd_repair(&printed, DEFAULT_EIGEN_FLOOR), true),
    };
    Ok(CorrelationScenario {
        id,
        rho_within,
        rho_between,
        rho_cross_lag,
        matrix,
        repaired,
    })
}

pub fn all_scenarios() -> Vec<CorrelationScenario> {
    (1..=SCENARIO_COUNT).map(|id| scenario(id).expect("valid id")).collect()
}

/// Solves `Σ_pp · b = σ_pY` on the generating matrix, with predictors
/// `x1, y1, x2` and outcome `y2`.
pub fn population_truth(s: &CorrelationScenario) -> Result<PopulationTruth> {
    truth_from_matrix(&s.matrix)
}

pub fn truth_from_matrix(m: &SymMatrix) -> Result<PopulationTruth> {
    let sigma_pp = m.as_matrix().view((0, 0), (3, 3)).into_owned();
    let sigma_py: Vec<f64> = (0..3).map(|i| m.get(i, 3)).collect();
    let l = cholesky_dense(&sigma_pp)?;
    let b = cholesky_solve(&l, &sigma_py);
    Ok(PopulationTruth {
        means: [0.0; 4],
        coefficients: [0.0, b[0], b[1], b[2]],
    })
}

/// A fully observed sample of `n` rows; columns `x1, y1` (t1), `x2, y2` (t2).
pub fn generate(s: &CorrelationScenario, n: usize, stream: &RngStream) -> Result<TwoWaveDataset> {
    let draws = sample_mvn(&s.matrix, n, &mut stream.rng())?;
    let columns = (0..4).map(|j| draws.column(j).iter().copied().collect()).collect();
    TwoWaveDataset::complete(WaveSchema::simulation(), columns)
}

/// Writes the scenario table (`scenarios.csv`).
pub fn write_scenarios_csv<W: Write>(writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record([
        "id",
        "rho_within",
        "rho_between",
        "repaired",
        "truth_b_x1",
        "truth_b_y1",
        "truth_b_x2",
        "rho_y1x2",
        "rho_x1y2",
    ])?;
    for s in all_scenarios() {
        let t = population_truth(&s)?;
        w.write_record([
            s.id.to_string(),
            format!("{:.2}", s.rho_within),
            format!("{:.2}", s.rho_between),
            s.repaired.to_string(),
            format!("{:.6}", t.coefficients[1]),
            format!("{:.6}", t.coefficients[2]),
            format!("{:.6}", t.coefficients[3]),
            format!("{:.6}", s.matrix.get(1, 2)),
            format!("{:.6}", s.matrix.get(0, 3)),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::ols_fit_columns;

    #[test]
    fn scenario_1_is_flat_point_one() {
        let s = scenario(1).unwrap();
        assert!(!s.repaired);
        for i in 0..4 {
            for j in 0..4 {
                let e = if i == j { 1.0 } else { 0.1 };
                assert_eq!(s.matrix.get(i, j), e);
            }
        }
    }

    #[test]
    fn scenario_16_cross_lag() {
        let s = scenario(16).unwrap();
        assert!(!s.repaired);
        assert_eq!(s.matrix.get(1, 2), 0.66);
        assert_eq!(s.matrix.get(0, 3), 0.66);
        assert_eq!(s.matrix.get(0, 2), 0.7);
        assert_eq!(s.matrix.get(1, 3), 0.7);
        assert_eq!(s.matrix.get(0, 1), 0.7);
        assert_eq!(s.matrix.get(2, 3), 0.7);
    }

    #[test]
    fn only_4_and_8_need_repair() {
        let repaired: Vec<u8> = all_scenarios().iter().filter(|s| s.repaired).map(|s| s.id).collect();
        assert_eq!(repaired, vec![4, 8]);
        for s in all_scenarios() {
            assert!(cholesky(&s.matrix).is_ok());
        }
        assert!(scenario(0).is_err());
        assert!(scenario(17).is_err());
    }

    #[test]
    fn truths_on_the_diagonal_scenarios() {
        let b = |id| population_truth(&scenario(id).unwrap()).unwrap().coefficients;
        assert!((b(1)[2] - 0.1 / 1.2).abs() < 1e-14);
        for j in 1..4 {
            assert!((b(11)[j] - 0.25).abs() < 1e-14);
        }
        assert!((b(16)[2] - 0.35).abs() < 0.005);
        for (id, printed) in [(1, 0.08), (6, 0.19), (11, 0.25), (16, 0.35)] {
            assert_eq!(((b(id)[2] * 100.0).round() / 100.0), printed);
        }
    }

    #[test]
    fn truth_solves_the_normal_equations() {
        for s in all_scenarios() {
            let t = population_truth(&s).unwrap();
            assert_eq!(t.coefficients[0], 0.0);
            assert_eq!(t.means, [0.0; 4]);
            for i in 0..3 {
                let lhs: f64 = (0..3).map(|j| s.matrix.get(i, j) * t.coefficients[j + 1]).sum();
                assert!((lhs - s.matrix.get(i, 3)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn zero_correlation_gives_zero_slopes() {
        let t = truth_from_matrix(&SymMatrix::identity(4)).unwrap();
        assert_eq!(t.coefficients, [0.0; 4]);
    }

    #[test]
    fn generate_shape_and_reproducibility() {
        let s = scenario(3).unwrap();
        let stream = RngStream::with_path(5, &[1, 2, 3]);
        let a = generate(&s, 425, &stream).unwrap();
        assert_eq!(a.n_rows(), 425);
        assert_eq!(a.n_cols(), 4);
        assert!(a.is_complete());
        assert_eq!(a, generate(&s, 425, &stream).unwrap());
        let (t1, t2) = a.split_waves().unwrap();
        assert_eq!(t1.schema().names().collect::<Vec<_>>(), ["x1", "y1"]);
        assert_eq!(t2.schema().names().collect::<Vec<_>>(), ["x2", "y2"]);
    }

    #[test]
    fn large_sample_regression_matches_truth() {
        // empirical oracle, every scenario on the post-repair matrix
        for s in all_scenarios() {
            let d = generate(&s, 1_000_000, &RngStream::with_path(11, &[s.id as u64])).unwrap();
            let cols: Vec<&[f64]> = (0..3).map(|j| d.column(j).unwrap()).collect();
            let fit = ols_fit_columns(&cols, d.column(3).unwrap(), 0.0).unwrap();
            let truth = population_truth(&s).unwrap();
            for j in 0..4 {
                assert!(
                    (fit.coefficients[j] - truth.coefficients[j]).abs() < 0.01,
                    "scenario {} coefficient {j}: {} vs {}",
                    s.id,
                    fit.coefficients[j],
                    truth.coefficients[j]
                );
            }
        }
    }

    #[test]
    fn scenario_csv_has_all_rows() {
        let mut buf = Vec::new();
        write_scenarios_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 17);
        let last = text.lines().last().unwrap();
        assert!(last.starts_with("16,0.70,0.70,false"));
        assert!(last.ends_with("0.660000,0.660000"));
    }
}

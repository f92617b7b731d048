//! End-to-end invariants across generation, amputation, imputation and
//! pooling.

use proptest::prelude::*;

use multistage_mi::amputation::{amputate, calibrate};
use multistage_mi::data::{CollectionShape, PatternKind};
use multistage_mi::dgp::{generate, printed_matrix, scenario};
use multistage_mi::harness::{fit_analysis, pool_collection, Parameter};
use multistage_mi::numerics::{cholesky, nearest_pd_repair, RngStream, DEFAULT_EIGEN_FLOOR};
use multistage_mi::strategies::{run, StrategyConfig};

fn kind(nonmonotone: bool) -> PatternKind {
    if nonmonotone {
        PatternKind::Nonmonotone
    } else {
        PatternKind::Monotone
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn every_strategy_completes_and_keeps_observed_cells(
        id in 1u8..=16,
        nonmonotone in any::<bool>(),
        strategy in 0usize..3,
        seed in any::<u64>(),
    ) {
        let root = RngStream::new(seed);
        let full = generate(&scenario(id).unwrap(), 120, &root.child(0)).unwrap();
        let d = amputate(&full, &calibrate(kind(nonmonotone), 0.2).unwrap(), &root.child(1)).unwrap();
        let mut cfg = [StrategyConfig::reimpute(3), StrategyConfig::nested(2, 2), StrategyConfig::appended(3)][strategy].clone();
        cfg.iterations = 3;
        let c = run(&d, &cfg, &root.child(2)).unwrap();
        let expected = match strategy {
            1 => CollectionShape::Nested { m1: 2, m2: 2 },
            _ => CollectionShape::Flat { m: 3 },
        };
        prop_assert_eq!(c.shape(), expected);
        prop_assert!(c.agrees_with(&d));
        prop_assert!(c.datasets().iter().all(|x| x.is_complete()));

        let pooled = pool_collection(&c).unwrap();
        for p in Parameter::ALL {
            let r = &pooled[p.index()];
            prop_assert!(r.t.is_finite() && r.t > 0.0 && r.nu > 0.0);
            prop_assert!(r.ci_low <= r.q_bar && r.q_bar <= r.ci_high);
        }
    }

    #[test]
    fn repaired_printed_matrices_factor(within in 0.0f64..0.95, between in 0.0f64..0.95) {
        let m = printed_matrix(within, between, between).unwrap();
        let fixed = nearest_pd_repair(&m, DEFAULT_EIGEN_FLOOR);
        prop_assert!(cholesky(&fixed).is_ok());
        if cholesky(&m).is_err() {
            prop_assert!(fixed.eigenvalues().iter().all(|&e| e >= DEFAULT_EIGEN_FLOOR - 1e-12));
        }
        for i in 0..4 {
            prop_assert!((fixed.get(i, i) - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn complete_data_analysis_matches_every_pooled_strategy() {
    let full = generate(&scenario(11).unwrap(), 200, &RngStream::new(9)).unwrap();
    let direct = fit_analysis(&full).unwrap();
    for cfg in [StrategyConfig::reimpute(2), StrategyConfig::nested(2, 2), StrategyConfig::appended(2)] {
        let pooled = pool_collection(&run(&full, &cfg, &RngStream::new(10)).unwrap()).unwrap();
        for p in Parameter::ALL {
            let (a, b) = (&direct[p.index()], &pooled[p.index()]);
            assert!((a.value - b.q_bar).abs() < 1e-12, "{cfg:?} {p:?}");
            assert!((a.variance - b.t).abs() < 1e-12, "{cfg:?} {p:?}");
        }
    }
}

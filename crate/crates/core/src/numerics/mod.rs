//! Dense small-matrix algebra, distribution draws and reproducible random
//! streams shared by the rest of the crate.

mod dist;
mod linalg;
mod mvn;
mod ols;
mod rng;

pub use dist::{draw_chi_square, draw_std_normal, normal_quantile, t_quantile};
pub use linalg::{cholesky, nearest_pd_repair, SymMatrix, DEFAULT_EIGEN_FLOOR, PIVOT_TOLERANCE};
pub use mvn::sample_mvn;
pub use ols::{ols_fit, ols_fit_columns, OlsFit};
pub use rng::{Draws, RngStream, StreamRng};

pub(crate) use linalg::{cholesky_dense, cholesky_solve};
pub(crate) use ols::predict;

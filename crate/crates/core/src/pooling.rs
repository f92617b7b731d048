//! Combining rules for independent and two-level nested imputed datasets.
//!
//! Independent (flat) collections of `m` datasets:
//!
//! ```text
//! Q̄ = mean Q̂ₖ          Ū = mean Ūₖ          B = Σ (Q̂ₖ − Q̄)² / (m − 1)
//! T = Ū + (1 + 1/m) B   1/ν = [(1 + 1/m) B / T]² / (m − 1)
//! ```
//!
//! Nested collections of `m1` nests with `m2` datasets each:
//!
//! ```text
//! Q̄ₖ = nest means       W = Σₖ Σₗ (Q̂ₖₗ − Q̄ₖ)² / (m1 (m2 − 1))
//! B = m2 Σₖ (Q̄ₖ − Q̄)² / (m1 − 1)
//! T = Ū + (1/m2)(1 + 1/m1) B + (1 − 1/m2) W
//! 1/ν = [(1/m2)(1 + 1/m1) B / T]² / (m1 − 1) + [(1 − 1/m2) W / T]² / (m1 (m2 − 1))
//! ```
//!
//! With `m2 = 1` the `W` term and its share of `1/ν` are zero, and every
//! field reduces exactly to the flat rules.

use crate::error::{Error, Result};
use crate::numerics::{normal_quantile, t_quantile};

pub const DEFAULT_LEVEL: f64 = 0.95;

/// Per-dataset estimates and sampling variances. Nested grids are stored
/// nest by nest.
#[derive(Debug, Clone, PartialEq)]
pub enum EstimateGrid {
    Flat {
        q_hat: Vec<f64>,
        u_bar: Vec<f64>,
    },
    Nested {
        m1: usize,
        m2: usize,
        q_hat: Vec<f64>,
        u_bar: Vec<f64>,
    },
}

impl EstimateGrid {
    pub fn flat(q_hat: Vec<f64>, u_bar: Vec<f64>) -> Result<Self> {
        let g = EstimateGrid::Flat { q_hat, u_bar };
        g.validate()?;
        Ok(g)
    }

    pub fn nested(m1: usize, m2: usize, q_hat: Vec<f64>, u_bar: Vec<f64>) -> Result<Self> {
        let g = EstimateGrid::Nested { m1, m2, q_hat, u_bar };
        g.validate()?;
        Ok(g)
    }

    fn validate(&self) -> Result<()> {
        let (expected, q, u) = match self {
            EstimateGrid::Flat { q_hat, u_bar } => (q_hat.len(), q_hat, u_bar),
            EstimateGrid::Nested { m1, m2, q_hat, u_bar } => (m1 * m2, q_hat, u_bar),
        };
        if q.len() != expected || u.len() != expected {
            return Err(Error::RaggedGrid(format!(
                "expected {expected} estimates and variances, got {} and {}",
                q.len(),
                u.len()
            )));
        }
        if let EstimateGrid::Nested { m2: 0, .. } = self {
            return Err(Error::RaggedGrid("nests must contain at least one dataset".into()));
        }
        if q.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("estimates must be finite".into()));
        }
        if u.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::Domain("sampling variances must be finite and non-negative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PooledResult {
    pub q_bar: f64,
    pub u_bar: f64,
    pub b: f64,
    /// Within-nest variance; zero for flat collections.
    pub w: f64,
    pub t: f64,
    /// Degrees of freedom, `+∞` when there is no imputation variance.
    pub nu: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl PooledResult {
    pub fn ci_width(&self) -> f64 {
        self.ci_high - self.ci_low
    }

    pub fn covers(&self, value: f64) -> bool {
        self.ci_low <= value && value <= self.ci_high
    }

    /// Recomputes the interval at another confidence level.
    pub fn with_level(mut self, level: f64) -> Result<Self> {
        let (lo, hi) = confidence_interval(&self, level)?;
        self.ci_low = lo;
        self.ci_high = hi;
        Ok(self)
    }
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn finish(q_bar: f64, u_bar: f64, b: f64, w: f64, t: f64, nu_inv: f64) -> Result<PooledResult> {
    let nu = if nu_inv > 0.0 { 1.0 / nu_inv } else { f64::INFINITY };
    let mut r = PooledResult {
        q_bar,
        u_bar,
        b,
        w,
        t,
        nu,
        ci_low: q_bar,
        ci_high: q_bar,
    };
    let (lo, hi) = confidence_interval(&r, DEFAULT_LEVEL)?;
    r.ci_low = lo;
    r.ci_high = hi;
    Ok(r)
}

pub fn pool_flat(q_hat: &[f64], u_bar: &[f64]) -> Result<PooledResult> {
    let m = q_hat.len();
    if m < 2 {
        return Err(Error::TooFewDatasets(m));
    }
    EstimateGrid::flat(q_hat.to_vec(), u_bar.to_vec())?;
    let mf = m as f64;
    let q = mean(q_hat);
    let u = mean(u_bar);
    let b = q_hat.iter().map(|x| (x - q) * (x - q)).sum::<f64>() / (mf - 1.0);
    let t = u + (1.0 + 1.0 / mf) * b;
    let nu_inv = if t > 0.0 {
        let r = (1.0 + 1.0 / mf) * b / t;
        r * r / (mf - 1.0)
    } else {
        0.0
    };
    finish(q, u, b, 0.0, t, nu_inv)
}

pub fn pool_nested(m1: usize, m2: usize, q_hat: &[f64], u_bar: &[f64]) -> Result<PooledResult> {
    if m1 < 2 {
        return Err(Error::TooFewDatasets(m1));
    }
    EstimateGrid::nested(m1, m2, q_hat.to_vec(), u_bar.to_vec())?;
    let (m1f, m2f) = (m1 as f64, m2 as f64);
    let q = mean(q_hat);
    let u = mean(u_bar);
    let nest_means: Vec<f64> = q_hat.chunks(m2).map(mean).collect();
    let w = if m2 >= 2 {
        q_hat
            .chunks(m2)
            .zip(&nest_means)
            .map(|(nest, qk)| nest.iter().map(|x| (x - qk) * (x - qk)).sum::<f64>())
            .sum::<f64>()
            / (m1f * (m2f - 1.0))
    } else {
        0.0
    };
    let b = m2f * nest_means.iter().map(|x| (x - q) * (x - q)).sum::<f64>() / (m1f - 1.0);
    let between_share = (1.0 / m2f) * ((1.0 + 1.0 / m1f) * b);
    let within_share = (1.0 - 1.0 / m2f) * w;
    let t = u + between_share + within_share;
    let nu_inv = if t > 0.0 {
        let rb = between_share / t;
        let mut v = rb * rb / (m1f - 1.0);
        if m2 >= 2 {
            let rw = within_share / t;
            v += rw * rw / (m1f * (m2f - 1.0));
        }
        v
    } else {
        0.0
    };
    finish(q, u, b, w, t, nu_inv)
}

pub fn pool(grid: &EstimateGrid) -> Result<PooledResult> {
    match grid {
        EstimateGrid::Flat { q_hat, u_bar } => pool_flat(q_hat, u_bar),
        EstimateGrid::Nested { m1, m2, q_hat, u_bar } => pool_nested(*m1, *m2, q_hat, u_bar),
    }
}

/// `Q̄ ± t_{(1+level)/2, ν} √T`; the normal quantile when `ν = ∞`.
pub fn confidence_interval(r: &PooledResult, level: f64) -> Result<(f64, f64)> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::Domain(format!("confidence level must be in (0, 1), got {level}")));
    }
    if r.t <= 0.0 {
        return Ok((r.q_bar, r.q_bar));
    }
    let p = 0.5 * (1.0 + level);
    let quantile = if r.nu.is_infinite() {
        normal_quantile(p)?
    } else {
        t_quantile(p, r.nu)?
    };
    let half = quantile * r.t.sqrt();
    Ok((r.q_bar - half, r.q_bar + half))
}

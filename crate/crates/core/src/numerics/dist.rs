//! Distribution draws and Student-t / normal quantiles.

use rand::Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};
use statrs::distribution::{ContinuousCDF, Normal};
use statrs::function::beta::{beta_reg, inv_beta_reg};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Above this many degrees of freedom the quantile comes from the
/// Cornish-Fisher expansion around the normal quantile.
const LARGE_DF: f64 = 1e4;

pub fn draw_std_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

pub fn draw_chi_square<R: Rng + ?Sized>(df: u64, rng: &mut R) -> Result<f64> {
    if df == 0 {
        return Err(Error::Domain("chi-square needs df >= 1".into()));
    }
    let dist = ChiSquared::new(df as f64).map_err(|e| Error::Domain(e.to_string()))?;
    Ok(dist.sample(rng))
}

pub fn normal_quantile(p: f64) -> Result<f64> {
    check_probability(p)?;
    Ok(Normal::standard().inverse_cdf(p))
}

fn check_probability(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("probability must be in (0, 1), got {p}")))
    }
}

/// Quantile of Student's t with real-valued `df`; `df = +∞` gives the
/// normal quantile.
pub fn t_quantile(p: f64, df: f64) -> Result<f64> {
    check_probability(p)?;
    if df.is_nan() || df <= 0.0 {
        return Err(Error::Domain(format!("degrees of freedom must be positive, got {df}")));
    }
    if p == 0.5 {
        return Ok(0.0);
    }
    if df > LARGE_DF {
        let z = Normal::standard().inverse_cdf(p);
        return Ok(if df.is_infinite() { z } else { cornish_fisher(z, df) });
    }

    // upper-tail probability of |t|
    let tail = if p > 0.5 { 1.0 - p } else { p };
    let a = 0.5 * df;
    let x = inv_beta_reg(a, 0.5, 2.0 * tail);
    let mut t = (df * (1.0 - x) / x).sqrt();
    if !t.is_finite() {
        t = cornish_fisher(Normal::standard().inverse_cdf(1.0 - tail), df);
    }

    // Newton on the upper tail: tail(t) = 0.5 I_{df/(df+t²)}(df/2, 1/2)
    let log_norm = ln_gamma(0.5 * (df + 1.0)) - ln_gamma(a) - 0.5 * (df * std::f64::consts::PI).ln();
    for _ in 0..8 {
        let upper = 0.5 * beta_reg(a, 0.5, df / (df + t * t));
        let density = (log_norm - 0.5 * (df + 1.0) * (t * t / df).ln_1p()).exp();
        if !(density > 0.0) {
            break;
        }
        let step = (upper - tail) / density;
        let next = t + step;
        if !next.is_finite() || next <= 0.0 {
            break;
        }
        t = next;
        if step.abs() <= 1e-14 * t {
            break;
        }
    }
    Ok(if p > 0.5 { t } else { -t })
}

fn cornish_fisher(z: f64, df: f64) -> f64 {
    let z2 = z * z;
    let g1 = (z2 + 1.0) * z / 4.0;
    let g2 = ((5.0 * z2 + 16.0) * z2 + 3.0) * z / 96.0;
    let g3 = (((3.0 * z2 + 19.0) * z2 + 17.0) * z2 - 15.0) * z / 384.0;
    let g4 = ((((79.0 * z2 + 776.0) * z2 + 1482.0) * z2 - 1920.0) * z2 - 945.0) * z / 92160.0;
    z + g1 / df + g2 / df.powi(2) + g3 / df.powi(3) + g4 / df.powi(4)
}

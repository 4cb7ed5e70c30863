//! Exact law of the rescaled maximum `Z_n = (X_(n) / a_n)^{α / ln n}` and the
//! normalized log-probability `ln P(Z_n ∈ A) / ln n`, whose limit is
//! `-ess.inf_{x ∈ A} ln x`.
//!
//! With `t_n(x) = a_n x^{ln n / α}` the distribution of `Z_n` is
//!
//! ```text
//! G_n(x) = F^n(t_n(x))
//! g_n(x) = n a_n (ln n / α) x^{ln n / α - 1} F^{n-1}(t_n(x)) f(t_n(x))
//! ```
//!
//! Powers of `F` are always taken as `exp(n · ln1p(-F̄))` and differences of
//! `G_n` near one as differences of upper tails.

mod borel;

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use borel::{BorelSubset, Interval};

use crate::error::{Error, Result};
use crate::float_serde;
use crate::tail_models::TailModel;

/// Below this value of `ln(n F̄)` the second-order small-tail expansion is used.
const SMALL_TAIL_LN: f64 = -30.0;

type CacheKey = ([u64; 4], u64);

/// `(a_n, ln a_n)` per `(model, n)`. Fills are idempotent, so racing writers
/// store the same value.
fn scaling_cache() -> &'static RwLock<HashMap<CacheKey, (f64, f64)>> {
    static CACHE: OnceLock<RwLock<HashMap<CacheKey, (f64, f64)>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

fn check_n(n: u64, min: u64) -> Result<()> {
    if n < min {
        Err(Error::domain(format!(
            "sample size must be >= {min}, got {n}"
        )))
    } else {
        Ok(())
    }
}

fn check_real(x: f64) -> Result<()> {
    if x.is_nan() {
        Err(Error::InvalidInput("NaN argument".into()))
    } else {
        Ok(())
    }
}

fn compute_scaling(model: &TailModel, n: u64) -> (f64, f64) {
    let ln_n = (n as f64).ln();
    let inv_n = 1.0 / n as f64;
    let mut a = model.ln_upper_quantile(-ln_n).exp();
    // step to the smallest representable a with F̄(a) ≤ 1/n
    for _ in 0..64 {
        match model.survival(a) {
            Ok(s) if s > inv_n => a = a.next_up(),
            _ => break,
        }
    }
    (a, a.ln())
}

fn scaling_pair(model: &TailModel, n: u64) -> Result<(f64, f64)> {
    check_n(n, 2)?;
    let key = (model.cache_key(), n);
    if let Some(v) = scaling_cache()
        .read()
        .ok()
        .and_then(|m| m.get(&key).copied())
    {
        return Ok(v);
    }
    let v = compute_scaling(model, n);
    if let Ok(mut m) = scaling_cache().write() {
        m.insert(key, v);
    }
    Ok(v)
}

/// `a_n = F^←(1 - 1/n)`.
pub fn scaling_constant(model: &TailModel, n: u64) -> Result<f64> {
    Ok(scaling_pair(model, n)?.0)
}

pub fn ln_scaling_constant(model: &TailModel, n: u64) -> Result<f64> {
    Ok(scaling_pair(model, n)?.1)
}

/// `ln t_n(x)` for `x ≥ 0`.
pub fn ln_threshold(model: &TailModel, n: u64, x: f64) -> Result<f64> {
    check_real(x)?;
    if x < 0.0 {
        return Err(Error::domain(format!("threshold needs x >= 0, got {x}")));
    }
    let ln_a = ln_scaling_constant(model, n)?;
    if x == 1.0 {
        return Ok(ln_a);
    }
    Ok(ln_a + (n as f64).ln() / model.alpha() * x.ln())
}

/// `t_n(x) = a_n x^{ln n / α}`, so that `Z_n > x ⟺ X_(n) > t_n(x)`.
pub fn threshold(model: &TailModel, n: u64, x: f64) -> Result<f64> {
    if x == 1.0 {
        return scaling_constant(model, n);
    }
    Ok(ln_threshold(model, n, x)?.exp())
}

/// `Z_n = (max_value / a_n)^{α / ln n}`.
pub fn z_value(model: &TailModel, n: u64, max_value: f64) -> Result<f64> {
    check_real(max_value)?;
    if max_value <= 0.0 {
        return Err(Error::domain(format!(
            "Z_n is undefined for a non-positive maximum, got {max_value}"
        )));
    }
    let ln_a = ln_scaling_constant(model, n)?;
    Ok((model.alpha() / (n as f64).ln() * (max_value.ln() - ln_a)).exp())
}

/// `P(X_(n) > t)` for `t = exp(ln_t)`, as `-expm1(n ln1p(-F̄(t)))`.
pub fn exceed_prob_at_ln_threshold(model: &TailModel, n: u64, ln_t: f64) -> f64 {
    let p = model.log_survival_ln(ln_t).exp();
    -(n as f64 * (-p).ln_1p()).exp_m1()
}

/// `ln P(X_(n) > t)` for `t = exp(ln_t)`, accurate far below the `f64`
/// underflow of the probability itself.
pub fn ln_exceed_prob_at_ln_threshold(model: &TailModel, n: u64, ln_t: f64) -> f64 {
    let ls = model.log_survival_ln(ln_t);
    if ls == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let nf = n as f64;
    let ln_np = nf.ln() + ls;
    if ln_np < SMALL_TAIL_LN {
        // 1 - (1-p)^n = np (1 - (n-1)p/2 + O(n²p²))
        return ln_np - 0.5 * (nf - 1.0) * ls.exp();
    }
    let ln_cdf_pow = nf * (-ls.exp()).ln_1p();
    (-ln_cdf_pow.exp_m1()).ln()
}

fn check_level(x: f64) -> Result<()> {
    check_real(x)?;
    if x < 1.0 {
        return Err(Error::domain(format!("level must be >= 1, got {x}")));
    }
    Ok(())
}

/// `P(Z_n > x) = 1 - F^n(t_n(x))` for `x ≥ 1`.
pub fn exact_exceed_prob(model: &TailModel, n: u64, x: f64) -> Result<f64> {
    check_level(x)?;
    if x == f64::INFINITY {
        return Ok(0.0);
    }
    Ok(exceed_prob_at_ln_threshold(
        model,
        n,
        ln_threshold(model, n, x)?,
    ))
}

/// `ln P(Z_n > x)`; `-inf` at `x = +inf`.
pub fn ln_exact_exceed_prob(model: &TailModel, n: u64, x: f64) -> Result<f64> {
    check_level(x)?;
    if x == f64::INFINITY {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(ln_exceed_prob_at_ln_threshold(
        model,
        n,
        ln_threshold(model, n, x)?,
    ))
}

/// `P(Z_n ∈ A)`. Null sets give exactly 0.
pub fn exact_set_prob(model: &TailModel, n: u64, set: &BorelSubset) -> Result<f64> {
    check_n(n, 2)?;
    let mut total = 0.0;
    for iv in set.solid_intervals() {
        total += exact_exceed_prob(model, n, iv.low)? - exact_exceed_prob(model, n, iv.high)?;
    }
    Ok(total)
}

/// `ln P(Z_n ∈ A)` assembled in log space.
pub fn ln_exact_set_prob(model: &TailModel, n: u64, set: &BorelSubset) -> Result<f64> {
    check_n(n, 2)?;
    let mut terms = Vec::new();
    for iv in set.solid_intervals() {
        let lo = ln_exact_exceed_prob(model, n, iv.low)?;
        let hi = ln_exact_exceed_prob(model, n, iv.high)?;
        let term = if hi == f64::NEG_INFINITY {
            lo
        } else {
            lo + (-(hi - lo).exp_m1()).ln()
        };
        terms.push(term);
    }
    Ok(log_sum_exp(&terms))
}

fn log_sum_exp(terms: &[f64]) -> f64 {
    let m = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + terms.iter().map(|t| (t - m).exp()).sum::<f64>().ln()
}

/// `ln g_n(x)`; `-inf` where `f(t_n(x)) = 0`.
pub fn log_density(model: &TailModel, n: u64, x: f64) -> Result<f64> {
    check_level(x)?;
    let ln_t = ln_threshold(model, n, x)?;
    let ln_f = model.log_density_ln(ln_t);
    if ln_f == f64::NEG_INFINITY {
        return Ok(f64::NEG_INFINITY);
    }
    let nf = n as f64;
    let ln_n = nf.ln();
    let alpha = model.alpha();
    let ln_cdf = (-model.log_survival_ln(ln_t).exp()).ln_1p();
    Ok(ln_n
        + ln_scaling_constant(model, n)?
        + (ln_n / alpha).ln()
        + (ln_n / alpha - 1.0) * x.ln()
        + (nf - 1.0) * ln_cdf
        + ln_f)
}

/// `I(x) = ln x` on `[1, inf)`.
pub fn rate_function(x: f64) -> Result<f64> {
    check_level(x)?;
    Ok(x.ln())
}

/// `ess.inf_{x ∈ A} ln x`; `+inf` when `A` is Lebesgue-null.
pub fn essential_infimum(set: &BorelSubset) -> f64 {
    set.solid_intervals()
        .map(|iv| iv.low)
        .fold(f64::INFINITY, f64::min)
        .ln()
}

/// One row of a convergence table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatePoint {
    pub n: u64,
    #[serde(with = "float_serde::float")]
    pub prob: f64,
    /// `ln P(Z_n ∈ A) / ln n`
    #[serde(with = "float_serde::float")]
    pub r_n: f64,
    /// `-ess.inf ln x`
    #[serde(with = "float_serde::float")]
    pub target: f64,
    #[serde(with = "float_serde::float")]
    pub gap: f64,
}

/// `ln P(Z_n ∈ A) / ln n` against its limit. For null sets both sides are
/// `-inf` and the gap is reported as 0.
pub fn normalized_log_prob(model: &TailModel, n: u64, set: &BorelSubset) -> Result<RatePoint> {
    check_n(n, 3)?;
    let prob = exact_set_prob(model, n, set)?;
    let r_n = ln_exact_set_prob(model, n, set)? / (n as f64).ln();
    let target = -essential_infimum(set);
    let gap = if r_n == target { 0.0 } else { r_n - target };
    Ok(RatePoint {
        n,
        prob,
        r_n,
        target,
        gap,
    })
}

/// [`normalized_log_prob`] over a grid, in grid order.
pub fn rate_table(model: &TailModel, set: &BorelSubset, n_grid: &[u64]) -> Result<Vec<RatePoint>> {
    n_grid
        .par_iter()
        .map(|&n| normalized_log_prob(model, n, set))
        .collect()
}

#[cfg(test)]
mod tests;

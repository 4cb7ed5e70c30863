//! Monte Carlo cross-check for the exact engine.
//!
//! Since `P(X_(n) ≤ x) = F^n(x)`, one uniform `u` gives a draw of the maximum
//! as `F^←(u^{1/n})`, at a cost independent of `n`. The brute-force sampler
//! takes the maximum of `n` inverse-transform draws and serves as its oracle.
//!
//! Replicates are split into chunks; chunk `i` draws from a ChaCha8 stream
//! keyed by `(seed, i)`, so results do not depend on how chunks are scheduled.

use rand::distributions::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ldp::{self, BorelSubset};
use crate::tail_models::TailModel;

pub const DEFAULT_CHUNK_SIZE: u64 = 8192;

/// `u^{1/n}` loses all resolution from here on.
const MAX_SAMPLE_SIZE: u64 = 1 << 53;

/// Two-sided 95% standard normal quantile.
const Z_95: f64 = 1.959_963_984_540_054;

/// Below this many expected hits the Wilson interval replaces the normal one.
const WILSON_HITS: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimConfig {
    pub samples: u64,
    pub seed: u64,
    /// Replicates per deterministic substream.
    pub chunk_size: u64,
}

impl SimConfig {
    pub fn new(samples: u64, seed: u64) -> Result<Self> {
        Self::with_chunk_size(samples, seed, DEFAULT_CHUNK_SIZE.min(samples.max(1)))
    }

    pub fn with_chunk_size(samples: u64, seed: u64, chunk_size: u64) -> Result<Self> {
        if samples == 0 {
            return Err(Error::domain("samples must be >= 1"));
        }
        if chunk_size == 0 || chunk_size > samples {
            return Err(Error::domain(format!(
                "chunk_size must be in [1, samples={samples}], got {chunk_size}"
            )));
        }
        Ok(SimConfig {
            samples,
            seed,
            chunk_size,
        })
    }

    /// `(chunk index, replicates in chunk)`.
    fn chunks(&self) -> Vec<(u64, u64)> {
        let full = self.samples / self.chunk_size;
        let rest = self.samples % self.chunk_size;
        let mut out: Vec<(u64, u64)> = (0..full).map(|i| (i, self.chunk_size)).collect();
        if rest > 0 {
            out.push((full, rest));
        }
        out
    }
}

fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// A Monte Carlo probability with a 95% confidence interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub p_hat: f64,
    pub samples: u64,
    pub stderr: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl Estimate {
    /// Normal-approximation interval, or Wilson's when fewer than ten hits.
    pub fn from_counts(hits: u64, samples: u64) -> Self {
        let nf = samples as f64;
        let p = hits as f64 / nf;
        let stderr = (p * (1.0 - p) / nf).sqrt();
        let (lo, hi) = if p * nf < WILSON_HITS {
            wilson_interval(p, nf)
        } else {
            (p - Z_95 * stderr, p + Z_95 * stderr)
        };
        Estimate {
            p_hat: p,
            samples,
            stderr,
            ci_low: lo.clamp(0.0, p),
            ci_high: hi.clamp(p, 1.0),
        }
    }
}

fn wilson_interval(p: f64, n: f64) -> (f64, f64) {
    let z2 = Z_95 * Z_95;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = Z_95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    (centre - half, centre + half)
}

fn check_uniform(u: f64) -> Result<()> {
    if u > 0.0 && u < 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "uniform variate must be in (0,1), got {u}"
        )))
    }
}

fn check_sample_size(n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::domain("sample size must be >= 1"));
    }
    if n >= MAX_SAMPLE_SIZE {
        return Err(Error::domain(format!(
            "sample size {n} >= 2^53: u^(1/n) is not resolvable in double precision"
        )));
    }
    Ok(())
}

/// `ln F^←(u^{1/n})` with `u^{1/n}` kept in log space.
fn ln_max_draw(model: &TailModel, n: u64, u: f64) -> f64 {
    let ln_level = u.ln() / n as f64;
    model.ln_upper_quantile((-ln_level.exp_m1()).ln())
}

/// One draw of `X_(n)` from a single uniform.
pub fn sample_max(model: &TailModel, n: u64, u: f64) -> Result<f64> {
    check_uniform(u)?;
    check_sample_size(n)?;
    Ok(ln_max_draw(model, n, u).exp())
}

/// `max_i F^←(u_i)`: the reference sampler for [`sample_max`].
pub fn brute_force_max(model: &TailModel, n: u64, uniforms: &[f64]) -> Result<f64> {
    if uniforms.len() as u64 != n || n == 0 {
        return Err(Error::domain(format!(
            "expected {n} uniforms, got {}",
            uniforms.len()
        )));
    }
    uniforms
        .iter()
        .try_fold(f64::NEG_INFINITY, |m, &u| Ok(m.max(model.quantile(u)?)))
}

/// Estimates `P(Z_n ∈ A)` from `cfg.samples` draws of the maximum.
pub fn estimate_set_prob(
    model: &TailModel,
    n: u64,
    set: &BorelSubset,
    cfg: &SimConfig,
) -> Result<Estimate> {
    check_sample_size(n)?;
    if set.is_null() {
        return Ok(Estimate::from_counts(0, cfg.samples));
    }
    let ln_a = ldp::ln_scaling_constant(model, n)?;
    let exponent = model.alpha() / (n as f64).ln();
    let hits: u64 = cfg
        .chunks()
        .into_par_iter()
        .map(|(chunk, count)| {
            let mut rng = chunk_rng(cfg.seed, chunk);
            (0..count)
                .filter(|_| {
                    let u: f64 = rng.sample(Open01);
                    let z = (exponent * (ln_max_draw(model, n, u) - ln_a)).exp();
                    set.contains(z)
                })
                .count() as u64
        })
        .sum();
    Ok(Estimate::from_counts(hits, cfg.samples))
}

/// `cfg.samples` draws of `X_(n)` via [`sample_max`], in replicate order.
pub fn sample_max_draws(model: &TailModel, n: u64, cfg: &SimConfig) -> Result<Vec<f64>> {
    check_sample_size(n)?;
    let chunks: Vec<Vec<f64>> = cfg
        .chunks()
        .into_par_iter()
        .map(|(chunk, count)| {
            let mut rng = chunk_rng(cfg.seed, chunk);
            (0..count)
                .map(|_| ln_max_draw(model, n, rng.sample(Open01)).exp())
                .collect()
        })
        .collect();
    Ok(chunks.concat())
}

/// `cfg.samples` draws of `X_(n)` via [`brute_force_max`], in replicate order.
pub fn brute_force_draws(model: &TailModel, n: u64, cfg: &SimConfig) -> Result<Vec<f64>> {
    check_sample_size(n)?;
    let chunks: Result<Vec<Vec<f64>>> = cfg
        .chunks()
        .into_par_iter()
        .map(|(chunk, count)| {
            let mut rng = chunk_rng(cfg.seed, chunk);
            let mut uniforms = vec![0.0; n as usize];
            (0..count)
                .map(|_| {
                    uniforms.iter_mut().for_each(|u| *u = rng.sample(Open01));
                    brute_force_max(model, n, &uniforms)
                })
                .collect()
        })
        .collect();
    Ok(chunks?.concat())
}

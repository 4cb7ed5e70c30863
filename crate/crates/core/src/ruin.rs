//! Single-maximum-claim ruin under polynomially loaded premiums.
//!
//! A portfolio of `n` policies is ruined when its largest claim exceeds the
//! premium income `n π_n`. With `π_n = a_n n^{β-1}`,
//!
//! ```text
//! RP_n = P(X_(n) > a_n n^β) = P(Z_n > e^{αβ}) = n^{-αβ + o(1)}.
//! ```
//!
//! `β = 0` is the classical premium `a_n / n`, under which `RP_n` tends to
//! `1 - exp(-1)` instead of vanishing.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::float_serde;
use crate::ldp::{self, BorelSubset};
use crate::mc_sim::{self, Estimate, SimConfig};
use crate::stats;
use crate::tail_models::TailModel;

#[derive(Debug, Clone, PartialEq)]
pub struct RuinScenario {
    model: TailModel,
    beta: f64,
    n_grid: Vec<u64>,
}

fn check_grid(n_grid: &[u64]) -> Result<()> {
    if n_grid.is_empty() {
        return Err(Error::domain("n grid is empty"));
    }
    if let Some(&n) = n_grid.iter().find(|&&n| n < 3) {
        return Err(Error::domain(format!(
            "portfolio sizes must be >= 3, got {n}"
        )));
    }
    if n_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::domain("n grid must be strictly increasing"));
    }
    Ok(())
}

impl RuinScenario {
    /// Requires `β > 0` and a strictly increasing grid of sizes `≥ 3`.
    pub fn new(model: TailModel, beta: f64, n_grid: Vec<u64>) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::domain(format!(
                "beta must be a finite value > 0, got {beta}"
            )));
        }
        check_grid(&n_grid)?;
        Ok(RuinScenario {
            model,
            beta,
            n_grid,
        })
    }

    /// The classical premium `π_n = a_n / n` (`β = 0`).
    pub fn classical(model: TailModel, n_grid: Vec<u64>) -> Result<Self> {
        check_grid(&n_grid)?;
        Ok(RuinScenario {
            model,
            beta: 0.0,
            n_grid,
        })
    }

    pub fn model(&self) -> &TailModel {
        &self.model
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn n_grid(&self) -> &[u64] {
        &self.n_grid
    }

    /// Limit of the normalized log ruin probability, `-αβ`.
    pub fn target(&self) -> f64 {
        -self.model.alpha() * self.beta
    }

    /// `Z_n`-level equivalent of the ruin event, `e^{αβ}`.
    pub fn z_level(&self) -> f64 {
        (self.model.alpha() * self.beta).exp()
    }

    fn ln_capital(&self, n: u64) -> Result<f64> {
        Ok(ldp::ln_scaling_constant(&self.model, n)? + self.beta * (n as f64).ln())
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta >= 0.0 && beta.is_finite()) {
        return Err(Error::domain(format!(
            "beta must be finite and >= 0, got {beta}"
        )));
    }
    Ok(())
}

/// Premium per policy, `π_n = a_n n^{β-1}`.
pub fn premium(model: &TailModel, n: u64, beta: f64) -> Result<f64> {
    check_beta(beta)?;
    let a = ldp::scaling_constant(model, n)?;
    if beta == 1.0 {
        return Ok(a);
    }
    Ok(a * (n as f64).powf(beta - 1.0))
}

/// `RP_n = P(Z_n > e^{αβ})` from the exact engine.
pub fn ruin_prob_exact(scenario: &RuinScenario, n: u64) -> Result<f64> {
    let ln_t = scenario.ln_capital(n)?;
    Ok(ldp::exceed_prob_at_ln_threshold(&scenario.model, n, ln_t))
}

/// `ln RP_n`, usable where `RP_n` itself underflows.
pub fn ln_ruin_prob_exact(scenario: &RuinScenario, n: u64) -> Result<f64> {
    let ln_t = scenario.ln_capital(n)?;
    Ok(ldp::ln_exceed_prob_at_ln_threshold(
        &scenario.model,
        n,
        ln_t,
    ))
}

/// `1 - F(a_n n^β)^n` evaluated from the claim-size law directly, without
/// passing through `Z_n`.
pub fn ruin_prob_direct(model: &TailModel, n: u64, beta: f64) -> Result<f64> {
    check_beta(beta)?;
    let capital = ldp::scaling_constant(model, n)? * (n as f64).powf(beta);
    let tail = model.survival(capital)?;
    Ok(-(n as f64 * (-tail).ln_1p()).exp_m1())
}

/// Monte Carlo `RP_n` over `A = (e^{αβ}, inf)`.
pub fn ruin_prob_mc(scenario: &RuinScenario, n: u64, cfg: &SimConfig) -> Result<Estimate> {
    let set = BorelSubset::above(scenario.z_level())?;
    mc_sim::estimate_set_prob(&scenario.model, n, &set, cfg)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    #[serde(with = "float_serde::float")]
    pub slope: f64,
    #[serde(with = "float_serde::float")]
    pub intercept: f64,
    /// `-αβ`
    #[serde(with = "float_serde::float")]
    pub target: f64,
    #[serde(with = "float_serde::float")]
    pub residual_max: f64,
}

/// Least-squares slope of `ln RP_n` against `ln n` over the scenario grid,
/// using exact probabilities.
pub fn decay_slope(scenario: &RuinScenario) -> Result<DecayFit> {
    if scenario.beta == 0.0 {
        return Err(Error::domain("decay fit needs beta > 0"));
    }
    let ln_rp: Vec<f64> = scenario
        .n_grid
        .par_iter()
        .map(|&n| ln_ruin_prob_exact(scenario, n))
        .collect::<Result<_>>()?;
    if let Some(i) = ln_rp.iter().position(|v| *v == f64::NEG_INFINITY) {
        return Err(Error::Degenerate(format!(
            "ruin probability is 0 at n={}",
            scenario.n_grid[i]
        )));
    }
    let ln_n: Vec<f64> = scenario.n_grid.iter().map(|&n| (n as f64).ln()).collect();
    let fit = stats::ols(&ln_n, &ln_rp)?;
    Ok(DecayFit {
        slope: fit.slope,
        intercept: fit.intercept,
        target: scenario.target(),
        residual_max: fit.residual_max,
    })
}

/// One row of the ruin table; Monte Carlo columns are empty without a
/// simulation config.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RuinRow {
    pub n: u64,
    #[serde(with = "float_serde::float")]
    pub premium: f64,
    #[serde(with = "float_serde::float")]
    pub rp_exact: f64,
    #[serde(with = "float_serde::float_opt")]
    pub rp_mc: Option<f64>,
    #[serde(with = "float_serde::float_opt")]
    pub ci_low: Option<f64>,
    #[serde(with = "float_serde::float_opt")]
    pub ci_high: Option<f64>,
}

/// Exact (and optionally simulated) ruin probabilities over the grid.
pub fn ruin_table(scenario: &RuinScenario, mc: Option<&SimConfig>) -> Result<Vec<RuinRow>> {
    scenario
        .n_grid
        .par_iter()
        .map(|&n| {
            let est = mc.map(|cfg| ruin_prob_mc(scenario, n, cfg)).transpose()?;
            Ok(RuinRow {
                n,
                premium: premium(&scenario.model, n, scenario.beta)?,
                rp_exact: ruin_prob_exact(scenario, n)?,
                rp_mc: est.map(|e| e.p_hat),
                ci_low: est.map(|e| e.ci_low),
                ci_high: est.map(|e| e.ci_high),
            })
        })
        .collect()
}

//! Parametric heavy-tailed laws with survival function `F̄(x) = x^{-α} L(x)`.
//!
//! Three families cover qualitatively different slowly varying parts:
//!
//! ```text
//! Pareto     F̄(x) = (x / x_m)^{-α}                       x ≥ x_m     L constant
//! Burr       F̄(x) = (1 + x^c)^{-k},  α = c·k              x > 0       L rational, → 1
//! LogPareto  F̄(x) = (x / x_0)^{-α} (1 + ln(x / x_0))^γ    x ≥ x_0     L logarithmic
//! ```
//!
//! Every family is evaluated as a function of `ln x`, so thresholds far beyond
//! the `f64` range can be handled by the exact engine. Upper-tail quantities
//! are never formed as `1 - cdf`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative bracket width at which the LogPareto quantile bisection stops.
const QUANTILE_REL_TOL: f64 = 1e-12;
const QUANTILE_MAX_ITER: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Pareto,
    Burr,
    LogPareto,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Pareto => "pareto",
            Family::Burr => "burr",
            Family::LogPareto => "logpareto",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Params {
    Pareto {
        scale: f64,
        ln_scale: f64,
    },
    Burr {
        c: f64,
        k: f64,
    },
    LogPareto {
        scale: f64,
        ln_scale: f64,
        gamma: f64,
    },
}

/// A heavy-tailed law with tail index `alpha`. Immutable once built.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailModel {
    alpha: f64,
    params: Params,
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !v.is_finite() {
        return Err(Error::InvalidInput(format!(
            "{name} must be finite, got {v}"
        )));
    }
    if v <= 0.0 {
        return Err(Error::domain(format!("{name} must be > 0, got {v}")));
    }
    Ok(())
}

fn check_finite(x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!(
            "expected a finite value, got {x}"
        )))
    }
}

/// `ln(1 + e^z)` without overflow.
pub(crate) fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

impl TailModel {
    pub fn pareto(alpha: f64, scale: f64) -> Result<Self> {
        check_positive("alpha", alpha)?;
        check_positive("xm", scale)?;
        Ok(TailModel {
            alpha,
            params: Params::Pareto {
                scale,
                ln_scale: scale.ln(),
            },
        })
    }

    /// Burr XII with shapes `c` and `k`; the tail index is `c·k`.
    pub fn burr(c: f64, k: f64) -> Result<Self> {
        check_positive("c", c)?;
        check_positive("k", k)?;
        Ok(TailModel {
            alpha: c * k,
            params: Params::Burr { c, k },
        })
    }

    /// Pareto tail with a logarithmic correction. Requires `|gamma| < alpha`,
    /// which keeps the survival function strictly decreasing on its support.
    pub fn log_pareto(alpha: f64, gamma: f64, scale: f64) -> Result<Self> {
        check_positive("alpha", alpha)?;
        check_positive("x0", scale)?;
        if !gamma.is_finite() {
            return Err(Error::InvalidInput(format!(
                "gamma must be finite, got {gamma}"
            )));
        }
        if gamma.abs() >= alpha {
            return Err(Error::domain(format!(
                "logpareto needs |gamma| < alpha, got gamma={gamma}, alpha={alpha}"
            )));
        }
        Ok(TailModel {
            alpha,
            params: Params::LogPareto {
                scale,
                ln_scale: scale.ln(),
                gamma,
            },
        })
    }

    pub fn family(&self) -> Family {
        match self.params {
            Params::Pareto { .. } => Family::Pareto,
            Params::Burr { .. } => Family::Burr,
            Params::LogPareto { .. } => Family::LogPareto,
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Family parameters by name, in the order of the model-spec grammar.
    pub fn parameters(&self) -> Vec<(&'static str, f64)> {
        match self.params {
            Params::Pareto { scale, .. } => vec![("alpha", self.alpha), ("xm", scale)],
            Params::Burr { c, k } => vec![("c", c), ("k", k)],
            Params::LogPareto { scale, gamma, .. } => {
                vec![("alpha", self.alpha), ("gamma", gamma), ("x0", scale)]
            }
        }
    }

    /// Left endpoint of the support.
    pub fn support_low(&self) -> f64 {
        match self.params {
            Params::Pareto { scale, .. } | Params::LogPareto { scale, .. } => scale,
            Params::Burr { .. } => 0.0,
        }
    }

    /// The point from which the regular-variation form is used by the
    /// diagnostics: the scale for Pareto/LogPareto, 1 for Burr.
    pub fn tail_origin(&self) -> f64 {
        match self.params {
            Params::Pareto { scale, .. } | Params::LogPareto { scale, .. } => scale,
            Params::Burr { .. } => 1.0,
        }
    }

    pub(crate) fn cache_key(&self) -> [u64; 4] {
        let (tag, a, b) = match self.params {
            Params::Pareto { scale, .. } => (0u64, scale, 0.0),
            Params::Burr { c, k } => (1, c, k),
            Params::LogPareto { scale, gamma, .. } => (2, scale, gamma),
        };
        [tag, self.alpha.to_bits(), a.to_bits(), b.to_bits()]
    }

    /// `ln F̄(x)` as a function of `ln x`. Zero at and below the support start.
    pub fn log_survival_ln(&self, ln_x: f64) -> f64 {
        match self.params {
            Params::Pareto { ln_scale, .. } => {
                let y = ln_x - ln_scale;
                if y <= 0.0 {
                    0.0
                } else {
                    -self.alpha * y
                }
            }
            Params::Burr { c, k } => -k * softplus(c * ln_x),
            Params::LogPareto {
                ln_scale, gamma, ..
            } => {
                let y = ln_x - ln_scale;
                if y <= 0.0 {
                    0.0
                } else {
                    -self.alpha * y + gamma * y.ln_1p()
                }
            }
        }
    }

    /// `x f(x) / F̄(x)` in closed form, as a function of `ln x`; zero outside
    /// the support.
    pub fn elasticity_ln(&self, ln_x: f64) -> f64 {
        match self.params {
            Params::Pareto { ln_scale, .. } => {
                if ln_x < ln_scale {
                    0.0
                } else {
                    self.alpha
                }
            }
            Params::Burr { c, k } => c * k / (1.0 + (-c * ln_x).exp()),
            Params::LogPareto {
                ln_scale, gamma, ..
            } => {
                let y = ln_x - ln_scale;
                if y < 0.0 {
                    0.0
                } else {
                    self.alpha - gamma / (1.0 + y)
                }
            }
        }
    }

    /// `ln f(x)` as a function of `ln x`; `-inf` outside the support.
    pub fn log_density_ln(&self, ln_x: f64) -> f64 {
        let el = self.elasticity_ln(ln_x);
        if el <= 0.0 {
            return f64::NEG_INFINITY;
        }
        self.log_survival_ln(ln_x) + el.ln() - ln_x
    }

    /// `P(X > x)`. Equals 1 below the support.
    pub fn survival(&self, x: f64) -> Result<f64> {
        check_finite(x)?;
        if x <= self.support_low() {
            return Ok(1.0);
        }
        Ok(self.log_survival_ln(x.ln()).exp())
    }

    /// `P(X ≤ x)`, computed from the log-survival with `expm1`.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        check_finite(x)?;
        if x <= self.support_low() {
            return Ok(0.0);
        }
        Ok(-self.log_survival_ln(x.ln()).exp_m1())
    }

    /// `f(x) = -dF̄/dx`; zero outside the support.
    pub fn density(&self, x: f64) -> Result<f64> {
        check_finite(x)?;
        let outside = match self.family() {
            Family::Burr => x <= 0.0,
            _ => x < self.support_low(),
        };
        if outside {
            return Ok(0.0);
        }
        let ln_x = x.ln();
        Ok(self.survival(x)? * self.elasticity_ln(ln_x) / x)
    }

    /// `L(x) = x^α F̄(x)`.
    pub fn slowly_varying_part(&self, x: f64) -> Result<f64> {
        check_finite(x)?;
        if x < self.support_low() || x <= 0.0 {
            return Err(Error::domain(format!(
                "slowly varying part needs x >= {} (and x > 0), got {x}",
                self.support_low()
            )));
        }
        Ok(match self.params {
            Params::Pareto { scale, .. } => scale.powf(self.alpha),
            // (x^c / (1 + x^c))^k
            Params::Burr { c, k } => (-k * softplus(-c * x.ln())).exp(),
            Params::LogPareto {
                scale,
                ln_scale,
                gamma,
            } => scale.powf(self.alpha) * (gamma * (x.ln() - ln_scale).ln_1p()).exp(),
        })
    }

    /// Solves `ln F̄(x) = log_q` for `ln x`. `log_q` must lie in `[-inf, 0]`.
    ///
    /// This is the left-inverse `F^←(1 - q)` carried entirely in log space, so
    /// upper-tail levels far below `f64::EPSILON` keep full relative accuracy.
    pub fn ln_upper_quantile(&self, log_q: f64) -> f64 {
        debug_assert!(log_q <= 0.0 && !log_q.is_nan());
        if log_q == f64::NEG_INFINITY {
            return f64::INFINITY;
        }
        match self.params {
            Params::Pareto { ln_scale, .. } => ln_scale - log_q / self.alpha,
            Params::Burr { c, k } => {
                // x^c = expm1(w), w = -log_q / k
                let w = -log_q / k;
                let ln_expm1 = if w > 1.0 {
                    w + (-(-w).exp_m1()).ln()
                } else {
                    w.exp_m1().ln()
                };
                ln_expm1 / c
            }
            Params::LogPareto {
                ln_scale, gamma, ..
            } => ln_scale + self.log_pareto_excess(-log_q, gamma),
        }
    }

    /// Root `y ≥ 0` of `α y - γ ln(1 + y) = target`.
    fn log_pareto_excess(&self, target: f64, gamma: f64) -> f64 {
        let alpha = self.alpha;
        if target <= 0.0 {
            return 0.0;
        }
        let h = |y: f64| alpha * y - gamma * y.ln_1p();
        // ln(1+y) ∈ [0, y] brackets the root between the two pure-Pareto solutions.
        let slow = alpha.min(alpha - gamma);
        let fast = alpha.max(alpha - gamma);
        let mut lo = target / fast;
        let mut hi = target / slow;
        for _ in 0..QUANTILE_MAX_ITER {
            if hi - lo <= QUANTILE_REL_TOL * hi {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if h(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let y = 0.5 * (lo + hi);
        let polished = y - (h(y) - target) / (alpha - gamma / (1.0 + y));
        if polished >= lo && polished <= hi {
            polished
        } else {
            y
        }
    }

    /// `F^←(u) = inf{x : F(x) ≥ u}` for `u ∈ (0, 1)`.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        check_finite(u)?;
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::domain(format!(
                "quantile level must be in (0,1), got {u}"
            )));
        }
        Ok(self.ln_upper_quantile((-u).ln_1p()).exp())
    }

    /// Inverse-transform draw from a caller-supplied uniform.
    pub fn sample_one(&self, u: f64) -> Result<f64> {
        self.quantile(u)
    }
}

impl fmt::Display for TailModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.family())?;
        for (i, (name, v)) in self.parameters().into_iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{name}={v}")?;
        }
        Ok(())
    }
}

//! Finite-n checks of the regular-variation facts the limit theorem rests on:
//! Potter bounds, the von Mises ratio, the exponent of `a_n`, the Fréchet
//! limit of `X_(n) / a_n` and the uniform density rate of `Z_n`.
//!
//! Every check evaluates on an explicit grid. A grid can only sample "for all
//! large t", so the reports state what was evaluated, not a certified bound.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::float_serde;
use crate::ldp;
use crate::stats::log_spaced;
use crate::tail_models::TailModel;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    #[serde(with = "float_serde::float_vec")]
    pub point: Vec<f64>,
    #[serde(with = "float_serde::float")]
    pub value: f64,
    #[serde(with = "float_serde::float")]
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticReport {
    pub check_name: String,
    /// Names of the grid coordinates, e.g. `["t", "x"]`.
    pub axes: Vec<String>,
    pub grid: Vec<Vec<f64>>,
    #[serde(with = "float_serde::float_vec")]
    pub values: Vec<f64>,
    pub violations: Vec<Violation>,
    pub pass: bool,
    /// Check-specific scalars (`sup`, `empirical_t0`, ...).
    #[serde(with = "float_serde::float_map")]
    pub summary: BTreeMap<String, f64>,
}

impl DiagnosticReport {
    fn new(check_name: &str, axes: &[&str]) -> Self {
        DiagnosticReport {
            check_name: check_name.to_string(),
            axes: axes.iter().map(|a| a.to_string()).collect(),
            grid: Vec::new(),
            values: Vec::new(),
            violations: Vec::new(),
            pass: true,
            summary: BTreeMap::new(),
        }
    }

    fn push(&mut self, point: Vec<f64>, value: f64) {
        self.grid.push(point);
        self.values.push(value);
    }

    fn violate(&mut self, point: Vec<f64>, value: f64, bound: f64) {
        self.violations.push(Violation {
            point,
            value,
            bound,
        });
        self.pass = false;
    }

    /// Largest value; `-inf` for an empty report.
    pub fn supremum(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    fn record_sup(&mut self) {
        let (idx, sup) =
            self.values
                .iter()
                .copied()
                .enumerate()
                .fold(
                    (0, f64::NEG_INFINITY),
                    |acc, (i, v)| if v > acc.1 { (i, v) } else { acc },
                );
        self.summary.insert("sup".into(), sup);
        if let Some(p) = self.grid.get(idx) {
            self.summary.insert("argsup".into(), p[0]);
        }
    }
}

/// 10 log-spaced points in `[1, 1e6]`.
pub fn default_t_grid() -> Vec<f64> {
    log_spaced(1.0, 1e6, 10)
}

/// 10 log-spaced points in `[1.1 x_0, 1e3]`.
pub fn default_x_grid(model: &TailModel) -> Vec<f64> {
    let lo = 1.1 * model.tail_origin();
    log_spaced(lo, 1e3_f64.max(lo), 10)
}

/// 200 log-spaced points in `[0.1, 10]`.
pub fn default_y_grid() -> Vec<f64> {
    log_spaced(0.1, 10.0, 200)
}

fn sorted_grid(grid: &[f64], name: &str) -> Result<Vec<f64>> {
    if grid.is_empty() {
        return Err(Error::domain(format!("{name} grid is empty")));
    }
    if let Some(bad) = grid.iter().find(|v| !v.is_finite() || **v <= 0.0) {
        return Err(Error::domain(format!(
            "{name} grid needs finite positive points, got {bad}"
        )));
    }
    let mut g = grid.to_vec();
    g.sort_by(f64::total_cmp);
    g.dedup();
    Ok(g)
}

/// Tests `(1-ε) x^{-α-ε} ≤ F̄(tx)/F̄(t) ≤ (1+ε) x^{-α+ε}` over `t_grid × x_grid`.
///
/// The summary's `empirical_t0` is the smallest grid `t` from which on no
/// grid point violates the bounds; it is absent when the largest `t` still
/// violates them.
pub fn potter_check(
    model: &TailModel,
    eps: f64,
    t_grid: &[f64],
    x_grid: &[f64],
) -> Result<DiagnosticReport> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::domain(format!("eps must be > 0, got {eps}")));
    }
    let ts = sorted_grid(t_grid, "t")?;
    let xs = sorted_grid(x_grid, "x")?;
    let origin = model.tail_origin();
    if xs[0] < origin {
        return Err(Error::domain(format!(
            "x grid must start at or above {origin}, got {}",
            xs[0]
        )));
    }
    let alpha = model.alpha();
    let mut report = DiagnosticReport::new("potter", &["t", "x"]);
    let mut violated_t = vec![false; ts.len()];
    for (i, &t) in ts.iter().enumerate() {
        let ln_t = t.ln();
        let base = model.log_survival_ln(ln_t);
        for &x in &xs {
            let ln_x = x.ln();
            let ratio = (model.log_survival_ln(ln_t + ln_x) - base).exp();
            let lower = (1.0 - eps) * (-(alpha + eps) * ln_x).exp();
            let upper = (1.0 + eps) * ((eps - alpha) * ln_x).exp();
            report.push(vec![t, x], ratio);
            if ratio > upper {
                report.violate(vec![t, x], ratio, upper);
                violated_t[i] = true;
            } else if ratio < lower {
                report.violate(vec![t, x], ratio, lower);
                violated_t[i] = true;
            }
        }
    }
    report.summary.insert("eps".into(), eps);
    let clean_from = violated_t.iter().rposition(|&v| v).map_or(0, |i| i + 1);
    if let Some(&t0) = ts.get(clean_from) {
        report.summary.insert("empirical_t0".into(), t0);
    }
    Ok(report)
}

/// `x f(x) / F̄(x)`, which tends to `α`.
pub fn von_mises_ratio(model: &TailModel, x: f64) -> Result<f64> {
    if !x.is_finite() || x <= model.support_low() {
        return Err(Error::domain(format!(
            "von Mises ratio needs x in the support interior (> {}), got {x}",
            model.support_low()
        )));
    }
    let s = model.survival(x)?;
    if s == 0.0 {
        return Err(Error::domain(format!("survival underflows to 0 at x={x}")));
    }
    Ok(x * model.density(x)? / s)
}

/// [`von_mises_ratio`] over a grid; passes when `|ratio - α|` is
/// non-increasing along the grid.
pub fn von_mises_table(model: &TailModel, x_grid: &[f64]) -> Result<DiagnosticReport> {
    let xs = sorted_grid(x_grid, "x")?;
    let alpha = model.alpha();
    let mut report = DiagnosticReport::new("vonmises", &["x"]);
    let mut prev_gap = f64::INFINITY;
    for &x in &xs {
        let r = von_mises_ratio(model, x)?;
        report.push(vec![x], r);
        let gap = (r - alpha).abs();
        if gap > prev_gap + rounding_slack(alpha) {
            report.violate(vec![x], gap, prev_gap);
        }
        prev_gap = gap;
    }
    report.summary.insert("limit".into(), alpha);
    Ok(report)
}

/// Tolerance for "non-increasing" when the sequence sits at rounding level.
fn rounding_slack(scale: f64) -> f64 {
    8.0 * f64::EPSILON * scale.abs()
}

/// `ln a_n / ln n` per grid point, with limit `1/α`. Passes when
/// `|value - 1/α|` is non-increasing along the increasing grid. A violation
/// records the offending gap as `value` and the previous gap as `bound`.
pub fn scaling_exponent_table(model: &TailModel, n_grid: &[u64]) -> Result<DiagnosticReport> {
    if n_grid.is_empty() {
        return Err(Error::domain("n grid is empty"));
    }
    let mut ns = n_grid.to_vec();
    ns.sort_unstable();
    ns.dedup();
    let limit = 1.0 / model.alpha();
    let mut report = DiagnosticReport::new("scaling", &["n"]);
    let mut prev_gap = f64::INFINITY;
    for n in ns {
        let v = ldp::ln_scaling_constant(model, n)? / (n as f64).ln();
        report.push(vec![n as f64], v);
        let gap = (v - limit).abs();
        if gap > prev_gap + rounding_slack(limit) {
            report.violate(vec![n as f64], gap, prev_gap);
        }
        prev_gap = gap;
    }
    report.summary.insert("limit".into(), limit);
    Ok(report)
}

/// Pointwise `|F^n(a_n y) - exp(-y^{-α})|` over the grid, with the supremum in
/// the summary.
pub fn frechet_limit_error(model: &TailModel, n: u64, y_grid: &[f64]) -> Result<DiagnosticReport> {
    let ys = sorted_grid(y_grid, "y")?;
    let ln_a = ldp::ln_scaling_constant(model, n)?;
    let alpha = model.alpha();
    let nf = n as f64;
    let mut report = DiagnosticReport::new("frechet", &["y"]);
    for y in ys {
        let ln_y = y.ln();
        let tail = model.log_survival_ln(ln_a + ln_y).exp();
        let cdf_pow = (nf * (-tail).ln_1p()).exp();
        let frechet = (-(-alpha * ln_y).exp()).exp();
        report.push(vec![y], (cdf_pow - frechet).abs());
    }
    report.record_sup();
    Ok(report)
}

/// `|ln g_n(x) / ln n + ln x|` on `points` equally spaced points of `[1, M]`,
/// with the supremum in the summary.
pub fn density_rate_error(
    model: &TailModel,
    n: u64,
    upper: f64,
    points: usize,
) -> Result<DiagnosticReport> {
    if n < 3 {
        return Err(Error::domain(format!("density rate needs n >= 3, got {n}")));
    }
    if !(upper > 1.0 && upper.is_finite()) {
        return Err(Error::domain(format!(
            "M must be a finite value > 1, got {upper}"
        )));
    }
    if points == 0 {
        return Err(Error::domain("need at least one grid point"));
    }
    let ln_n = (n as f64).ln();
    let mut report = DiagnosticReport::new("density", &["x"]);
    for i in 0..points {
        let x = if points == 1 {
            1.0
        } else if i == points - 1 {
            upper
        } else {
            1.0 + (upper - 1.0) * i as f64 / (points - 1) as f64
        };
        let v = (ldp::log_density(model, n, x)? / ln_n + x.ln()).abs();
        report.push(vec![x], v);
    }
    report.record_sup();
    Ok(report)
}

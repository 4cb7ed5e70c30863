//! Sharp large deviations for the maximum of heavy-tailed i.i.d. samples.
//!
//! For `X_1, X_2, ...` with regularly varying tail `F̄(x) = x^{-α} L(x)` and
//! `a_n = F^←(1 - 1/n)`, the rescaled maximum
//! `Z_n = (X_(n) / a_n)^{α / ln n}` satisfies, for Borel `A ⊂ [1, inf)`,
//!
//! ```text
//! ln P(Z_n ∈ A) / ln n  →  -ess.inf_{x ∈ A} ln x.
//! ```
//!
//! The crate computes the left side exactly at finite `n` ([`ldp`]), checks it
//! by simulation ([`mc_sim`]), probes the regular-variation facts behind it
//! ([`diagnostics`]) and applies it to single-claim ruin ([`ruin`]).

pub mod cli_io;
pub mod diagnostics;
pub mod error;
mod float_serde;
pub mod ldp;
pub mod mc_sim;
pub mod ruin;
pub mod stats;
pub mod tail_models;

pub use error::{Error, Result};
pub use ldp::{BorelSubset, Interval, RatePoint};
pub use mc_sim::{Estimate, SimConfig};
pub use ruin::{DecayFit, RuinScenario};
pub use tail_models::{Family, TailModel};

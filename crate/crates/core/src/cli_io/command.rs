use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use super::emit::{emit_table, DistRow, Format, RateRow, SampleRow, Table};
use super::parse::{parse_count, parse_model_spec, parse_n_grid, parse_real_grid, parse_set_spec};
use crate::diagnostics;
use crate::error::{Error, Result};
use crate::ldp;
use crate::mc_sim::{self, SimConfig};
use crate::ruin::{self, RuinScenario};
use crate::tail_models::TailModel;

#[derive(Debug, Parser)]
#[command(
    name = "maxdev",
    version,
    about = "Exact and simulated large deviations of heavy-tailed maxima"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[arg(long, global = true, value_enum, default_value = "csv")]
    pub format: Format,

    /// Write to this file instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Worker threads for simulation and grid evaluation (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Args)]
pub struct McArgs {
    /// Add Monte Carlo estimates next to the exact values.
    #[arg(long)]
    pub mc: bool,
    #[arg(long, default_value = "1e5")]
    pub samples: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub chunk_size: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Check {
    Potter,
    Vonmises,
    Scaling,
    Frechet,
    Density,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Eval {
    Survival,
    Density,
    Quantile,
    #[value(name = "L")]
    SlowlyVarying,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Normalized log-probabilities ln P(Z_n in A) / ln n over an n-grid.
    Rate {
        #[arg(long)]
        model: String,
        #[arg(long)]
        set: String,
        #[arg(long)]
        n_grid: String,
        #[command(flatten)]
        mc: McArgs,
    },
    /// Ruin probabilities under the premium a_n n^(beta-1), with the decay fit.
    Ruin {
        #[arg(long)]
        model: String,
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        n_grid: String,
        #[command(flatten)]
        mc: McArgs,
    },
    /// Regular-variation diagnostics on explicit grids.
    Diagnose {
        #[arg(long)]
        model: String,
        #[arg(long, value_enum)]
        check: Check,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[arg(long)]
        t_grid: Option<String>,
        #[arg(long)]
        x_grid: Option<String>,
        #[arg(long)]
        y_grid: Option<String>,
        #[arg(long)]
        n: Option<String>,
        #[arg(long)]
        n_grid: Option<String>,
        /// Upper end M of [1, M] for the density check.
        #[arg(long = "m")]
        upper: Option<String>,
        #[arg(long)]
        points: Option<usize>,
    },
    /// Draws of the maximum X_(n) and its rescaling Z_n.
    Sample {
        #[arg(long)]
        model: String,
        #[arg(long)]
        n: String,
        #[arg(long)]
        samples: String,
        #[arg(long)]
        seed: u64,
    },
    /// Evaluate the claim-size law at one or more points.
    Dist {
        #[arg(long)]
        model: String,
        #[arg(long, value_enum)]
        eval: Eval,
        #[arg(long)]
        at: String,
    },
}

fn sim_config(args: &McArgs) -> Result<Option<SimConfig>> {
    if !args.mc {
        return Ok(None);
    }
    let samples = parse_count(&args.samples)?;
    let cfg = match args.chunk_size {
        Some(c) => SimConfig::with_chunk_size(samples, args.seed, c)?,
        None => SimConfig::new(samples, args.seed)?,
    };
    Ok(Some(cfg))
}

fn model_label(model: &TailModel) -> String {
    model.to_string()
}

fn run_rate(model: &str, set: &str, n_grid: &str, mc: &McArgs) -> Result<Table> {
    let m = parse_model_spec(model)?;
    let a = parse_set_spec(set)?;
    let ns = parse_n_grid(n_grid)?;
    let cfg = sim_config(mc)?;
    let points = ldp::rate_table(&m, &a, &ns)?;
    let rows = points
        .into_iter()
        .map(|point| {
            let est = cfg
                .as_ref()
                .map(|c| mc_sim::estimate_set_prob(&m, point.n, &a, c))
                .transpose()?;
            Ok(RateRow { point, mc: est })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Table::Rate {
        model: model_label(&m),
        set: set.trim().to_string(),
        rows,
    })
}

fn run_ruin(model: &str, beta: f64, n_grid: &str, mc: &McArgs) -> Result<Table> {
    let m = parse_model_spec(model)?;
    let ns = parse_n_grid(n_grid)?;
    let scenario = if beta == 0.0 {
        RuinScenario::classical(m, ns)?
    } else {
        RuinScenario::new(m, beta, ns)?
    };
    let cfg = sim_config(mc)?;
    let rows = ruin::ruin_table(&scenario, cfg.as_ref())?;
    let summary = if beta > 0.0 && scenario.n_grid().len() >= 2 {
        Some(ruin::decay_slope(&scenario)?)
    } else {
        None
    };
    Ok(Table::Ruin {
        model: model_label(&m),
        beta,
        rows,
        summary,
    })
}

#[allow(clippy::too_many_arguments)]
fn run_diagnose(
    model: &str,
    check: Check,
    eps: f64,
    t_grid: Option<&str>,
    x_grid: Option<&str>,
    y_grid: Option<&str>,
    n: Option<&str>,
    n_grid: Option<&str>,
    upper: Option<&str>,
    points: Option<usize>,
) -> Result<Table> {
    let m = parse_model_spec(model)?;
    let reals = |g: Option<&str>, default: Vec<f64>| g.map(parse_real_grid).unwrap_or(Ok(default));
    let size = |default: u64| n.map(parse_count).unwrap_or(Ok(default));
    let report = match check {
        Check::Potter => diagnostics::potter_check(
            &m,
            eps,
            &reals(t_grid, diagnostics::default_t_grid())?,
            &reals(x_grid, diagnostics::default_x_grid(&m))?,
        )?,
        Check::Vonmises => {
            let lo = 10.0 * m.tail_origin();
            let grid = reals(x_grid, crate::stats::log_spaced(lo, 1e8_f64.max(lo), 8))?;
            diagnostics::von_mises_table(&m, &grid)?
        }
        Check::Scaling => {
            let ns = n_grid
                .map(parse_n_grid)
                .unwrap_or_else(|| parse_n_grid("10^2..10^8"))?;
            diagnostics::scaling_exponent_table(&m, &ns)?
        }
        Check::Frechet => diagnostics::frechet_limit_error(
            &m,
            size(10_000)?,
            &reals(y_grid, diagnostics::default_y_grid())?,
        )?,
        Check::Density => {
            let upper = upper
                .map(super::parse::parse_real)
                .unwrap_or(Ok(std::f64::consts::E))?;
            diagnostics::density_rate_error(&m, size(1_000_000)?, upper, points.unwrap_or(201))?
        }
    };
    Ok(Table::Diagnostic {
        model: model_label(&m),
        report,
    })
}

fn run_sample(model: &str, n: &str, samples: &str, seed: u64) -> Result<Table> {
    let m = parse_model_spec(model)?;
    let n = parse_count(n)?;
    if n < 2 {
        return Err(Error::Domain(
            "sample needs n >= 2 so that Z_n is defined".into(),
        ));
    }
    let cfg = SimConfig::new(parse_count(samples)?, seed)?;
    let draws = mc_sim::sample_max_draws(&m, n, &cfg)?;
    let rows = draws
        .into_iter()
        .enumerate()
        .map(|(i, max)| {
            Ok(SampleRow {
                replicate: i as u64,
                max,
                z: ldp::z_value(&m, n, max)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Table::Sample {
        model: model_label(&m),
        n,
        rows,
    })
}

fn run_dist(model: &str, eval: Eval, at: &str) -> Result<Table> {
    let m = parse_model_spec(model)?;
    let rows = parse_real_grid(at)?
        .into_iter()
        .map(|x| {
            let value = match eval {
                Eval::Survival => m.survival(x)?,
                Eval::Density => m.density(x)?,
                Eval::Quantile => m.quantile(x)?,
                Eval::SlowlyVarying => m.slowly_varying_part(x)?,
            };
            Ok(DistRow { x, value })
        })
        .collect::<Result<Vec<_>>>()?;
    let eval = eval
        .to_possible_value()
        .map(|v| v.get_name().to_string())
        .unwrap_or_default();
    Ok(Table::Dist {
        model: model_label(&m),
        eval,
        rows,
    })
}

/// Runs one command and returns its table.
pub fn execute(command: &Command) -> Result<Table> {
    match command {
        Command::Rate {
            model,
            set,
            n_grid,
            mc,
        } => run_rate(model, set, n_grid, mc),
        Command::Ruin {
            model,
            beta,
            n_grid,
            mc,
        } => run_ruin(model, *beta, n_grid, mc),
        Command::Diagnose {
            model,
            check,
            eps,
            t_grid,
            x_grid,
            y_grid,
            n,
            n_grid,
            upper,
            points,
        } => run_diagnose(
            model,
            *check,
            *eps,
            t_grid.as_deref(),
            x_grid.as_deref(),
            y_grid.as_deref(),
            n.as_deref(),
            n_grid.as_deref(),
            upper.as_deref(),
            *points,
        ),
        Command::Sample {
            model,
            n,
            samples,
            seed,
        } => run_sample(model, n, samples, *seed),
        Command::Dist { model, eval, at } => run_dist(model, *eval, at),
    }
}

/// Parses nothing; runs an already-parsed command line and writes its output.
pub fn run(cli: &Cli) -> Result<()> {
    let work = || -> Result<String> {
        let table = execute(&cli.command)?;
        if let (
            Format::Csv,
            Table::Ruin {
                summary: Some(fit), ..
            },
        ) = (cli.format, &table)
        {
            eprintln!(
                "decay fit: slope {} (target {}), intercept {}, max residual {}",
                fit.slope, fit.target, fit.intercept, fit.residual_max
            );
        }
        emit_table(&table, cli.format)
    };
    let text = match cli.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::Io(e.to_string()))?
            .install(work)?,
        None => work()?,
    };
    match &cli.out {
        Some(path) => std::fs::write(path, text)?,
        None => {
            use std::io::Write;
            std::io::stdout().lock().write_all(text.as_bytes())?;
        }
    }
    Ok(())
}

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use corremit_core::io::commands::{
    self, CurrentsOptions, MacrospinMethod, MacrospinOptions, NoiseOptions, RatesOptions, RunContext,
    SubradianceOptions, SuperradianceOptions,
};
use corremit_core::io::config::parse_config;
use corremit_core::io::verify::{run_verify, VerifyOptions};
use corremit_core::response::ResponsePart;
use corremit_core::PhysicalParams;

#[derive(Parser)]
#[command(name = "corremit", version, about = "Correlated emission of magnetic dipoles above a 2D electron gas")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Parameter file (`key = value`); built-in defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Seed for stochastic commands.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Oersted noise C^{-+}(omega, q).
    Noise {
        #[arg(long, default_value_t = 0.01)]
        omega_min: f64,
        #[arg(long, default_value_t = 1.0)]
        omega_max: f64,
        #[arg(long, default_value_t = 50)]
        omegas: usize,
        #[arg(long, default_value_t = 2.5)]
        q_max: f64,
        #[arg(long, default_value_t = 250)]
        points: usize,
    },
    /// Single-dipole decay rate gamma(r), radii in units of lambda_F.
    Rates {
        #[arg(long, default_value_t = 0.01)]
        r_min: f64,
        #[arg(long, default_value_t = 1e4)]
        r_max: f64,
        #[arg(long, default_value_t = 121)]
        points: usize,
    },
    /// Dark-state statistics of random ensembles.
    Subradiance {
        #[arg(long, default_value_t = 500)]
        n: usize,
        #[arg(long, default_value_t = 50)]
        realizations: usize,
        #[arg(long, default_value_t = 0.1)]
        threshold: f64,
        /// Mean spacings in units of lambda_F.
        #[arg(long, value_delimiter = ',', default_values_t = [0.3, 1.0, 3.0, 10.0, 30.0])]
        spacings: Vec<f64>,
    },
    /// Superradiance diagnostics against density.
    Superradiance {
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long, default_value_t = 5)]
        realizations: usize,
        /// Densities in units of 1/(pi lambda_SR^2).
        #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.3, 1.0, 3.0, 10.0])]
        densities: Vec<f64>,
    },
    /// Mean-field macrospin trajectory.
    Macrospin {
        #[arg(long, default_value_t = 20)]
        n: usize,
        /// Single-dipole rate in Hz; derived from the parameters when omitted.
        #[arg(long)]
        gamma0: Option<f64>,
        /// End time in units of 1/(N gamma0).
        #[arg(long, default_value_t = 10.0)]
        t_max: f64,
        #[arg(long, default_value_t = 1001)]
        points: usize,
        #[arg(long, value_enum, default_value_t = Method::Ode)]
        method: Method,
        #[arg(long)]
        rotating: bool,
    },
    /// Current frames of the spiral wave (always uses the built-in spiral parameters).
    Currents {
        #[arg(long, default_value_t = 256)]
        n_rho: usize,
        #[arg(long, default_value_t = 128)]
        n_phi: usize,
        #[arg(long, default_value_t = 64)]
        frames: usize,
        #[arg(long, value_enum, default_value_t = Part::Total)]
        part: Part,
    },
    /// Cross-module consistency checks; exits nonzero on any failure.
    Verify,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Exact,
    Ode,
}

#[derive(Clone, Copy, ValueEnum)]
enum Part {
    Total,
    Paramagnetic,
    Diamagnetic,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    if let Some(n) = cli.common.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the worker pool")?;
    }
    let params = match &cli.common.config {
        Some(path) => parse_config(path)?,
        None => PhysicalParams::standard(),
    };
    let ctx = RunContext {
        params,
        out: cli.common.out.clone(),
        seed: cli.common.seed,
    };
    let manifest = match cli.command {
        Command::Noise {
            omega_min,
            omega_max,
            omegas,
            q_max,
            points,
        } => commands::run_noise(
            &ctx,
            &NoiseOptions {
                omega_min,
                omega_max,
                omegas,
                q_max,
                points,
            },
        )?,
        Command::Rates { r_min, r_max, points } => commands::run_rates(&ctx, &RatesOptions { r_min, r_max, points })?,
        Command::Subradiance {
            n,
            realizations,
            threshold,
            spacings,
        } => commands::run_subradiance(
            &ctx,
            &SubradianceOptions {
                n,
                realizations,
                threshold,
                spacings,
            },
        )?,
        Command::Superradiance {
            n,
            realizations,
            densities,
        } => commands::run_superradiance(
            &ctx,
            &SuperradianceOptions {
                n,
                realizations,
                densities,
            },
        )?,
        Command::Macrospin {
            n,
            gamma0,
            t_max,
            points,
            method,
            rotating,
        } => commands::run_macrospin(
            &ctx,
            &MacrospinOptions {
                n,
                gamma0,
                t_max,
                points,
                method: match method {
                    Method::Exact => MacrospinMethod::Exact,
                    Method::Ode => MacrospinMethod::Ode,
                },
                rotating_frame: rotating,
            },
        )?,
        Command::Currents {
            n_rho,
            n_phi,
            frames,
            part,
        } => commands::run_currents(
            &ctx,
            &CurrentsOptions {
                n_rho,
                n_phi,
                frames,
                part: match part {
                    Part::Total => ResponsePart::Total,
                    Part::Paramagnetic => ResponsePart::Paramagnetic,
                    Part::Diamagnetic => ResponsePart::Diamagnetic,
                },
                ..CurrentsOptions::default()
            },
        )?,
        Command::Verify => {
            let report = run_verify(&ctx.params, &VerifyOptions::default())?;
            print!("{report}");
            return Ok(if report.all_pass() { ExitCode::SUCCESS } else { ExitCode::FAILURE });
        }
    };
    println!("{} -> {}", manifest.command, ctx.out.display());
    for o in &manifest.outputs {
        println!("  {}  sha256={}", o.path.display(), o.sha256);
    }
    Ok(ExitCode::SUCCESS)
}

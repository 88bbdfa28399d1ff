use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use fracwave::basis::{interval_basis, rectangle_basis, weyl_exponent, SpectralBasis};
use fracwave::experiment::{run, ExperimentConfig};
use fracwave::oracle::{scheme_order, trajectory};
use fracwave::special::{ml_eval, MLParams};
use fracwave::{acceptance, Error, Execution};

/// Time-fractional diffusion-wave solver and decay analysis.
#[derive(Parser)]
#[command(name = "fracwave", version)]
struct Cli {
    /// Run on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate E_{alpha,beta}(z).
    Ml {
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        #[arg(long, allow_hyphen_values = true)]
        z: Vec<f64>,
    },
    /// Run an experiment described by a TOML file.
    Run {
        config: PathBuf,
        /// Overrides `output.directory`.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        prefix: Option<String>,
    },
    /// Run the acceptance checks.
    Verify {
        /// Keep checks whose id, name or tag contains this string.
        #[arg(long)]
        filter: Option<String>,
    },
    /// Compare one Mittag-Leffler mode with the time-stepping scheme.
    Oracle {
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        #[arg(long, default_value_t = 1e-3)]
        dt: f64,
        #[arg(long, default_value_t = 2.0)]
        horizon: f64,
        /// Initial velocity for 1 < alpha < 2.
        #[arg(long, default_value_t = 0.0)]
        velocity: f64,
    },
    /// Print the eigenvalues of a closed-form basis.
    Basis {
        #[arg(long, value_enum, default_value_t = Shape::Interval)]
        domain: Shape,
        /// Interval length or rectangle width.
        #[arg(long, default_value_t = std::f64::consts::PI)]
        length: f64,
        #[arg(long)]
        height: Option<f64>,
        /// Modes (per axis on a rectangle).
        #[arg(long, default_value_t = 16)]
        modes: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Shape {
    Interval,
    Rectangle,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Ok(threads) = std::env::var("FRACWAVE_THREADS") {
        let built = threads
            .parse()
            .map_err(|_| anyhow::anyhow!("FRACWAVE_THREADS={threads} is not a thread count"))
            .and_then(|n| rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(Into::into));
        if let Err(e) = built {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    }
    let exec = if cli.sequential { Execution::Sequential } else { Execution::Parallel };
    match dispatch(cli.command, exec) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

/// 2 for bad input, 1 for numerical failures.
fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(
            Error::SeriesNonConvergence { .. }
            | Error::IllConditioned(_)
            | Error::DegenerateSamples(_)
            | Error::InsufficientSamples { .. },
        ) => 1,
        _ => 2,
    }
}

fn dispatch(command: Command, exec: Execution) -> anyhow::Result<bool> {
    match command {
        Command::Ml { alpha, beta, z } => {
            if z.is_empty() {
                bail!(Error::InvalidArgument("give at least one --z".into()));
            }
            let params = MLParams::new(alpha, beta)?;
            println!("z,value,abs_error_estimate,method");
            for z in z {
                let v = ml_eval(params, z)?;
                println!("{z:e},{:.16e},{:.2e},{:?}", v.value, v.abs_error_estimate, v.method);
            }
            Ok(true)
        }
        Command::Run { config, out, prefix } => {
            let cfg = ExperimentConfig::load(&config).with_context(|| format!("loading {}", config.display()))?;
            let output = run(&cfg, exec)?;
            let dir = out.unwrap_or_else(|| cfg.output_dir());
            let prefix = prefix.unwrap_or_else(|| cfg.output.prefix.clone());
            for path in output.write(&dir, &prefix)? {
                eprintln!("wrote {}", path.display());
            }
            print!("{}", output.verdict_text());
            Ok(true)
        }
        Command::Verify { filter } => {
            let reports = acceptance::run(filter.as_deref());
            if reports.is_empty() {
                bail!(Error::InvalidArgument(format!("no check matches {:?}", filter.unwrap_or_default())));
            }
            for r in &reports {
                println!("{r}");
            }
            let failed = reports.iter().filter(|r| !r.passed).count();
            println!("{} passed, {failed} failed", reports.len() - failed);
            Ok(failed == 0)
        }
        Command::Oracle { alpha, lambda, dt, horizon, velocity } => {
            let y1 = (alpha > 1.0).then_some(velocity);
            let steps = trajectory(alpha, lambda, 1.0, y1, dt, horizon)?;
            let a = MLParams::new(alpha, 1.0)?;
            println!("# scheme order {:.2}", scheme_order(alpha));
            println!("t,scheme,mittag_leffler,difference");
            let stride = (steps.len() / 20).max(1);
            for (i, y) in steps.iter().enumerate().step_by(stride) {
                let t = i as f64 * dt;
                let z = -lambda * t.powf(alpha);
                let mut exact = ml_eval(a, z)?.value;
                if let Some(v) = y1 {
                    exact += v * t * ml_eval(MLParams::new(alpha, 2.0)?, z)?.value;
                }
                println!("{t:.6},{y:.12e},{exact:.12e},{:.3e}", y - exact);
            }
            Ok(true)
        }
        Command::Basis { domain, length, height, modes } => {
            let basis: SpectralBasis = match domain {
                Shape::Interval => interval_basis(length, modes)?,
                Shape::Rectangle => rectangle_basis(length, height.unwrap_or(length), modes)?,
            };
            println!("n,eigenvalue,multiplicity");
            for (n, (lambda, m)) in basis.eigenvalues().iter().zip(basis.multiplicities()).enumerate() {
                println!("{},{lambda:.12e},{m}", n + 1);
            }
            match weyl_exponent(&basis) {
                Ok(w) => eprintln!("weyl exponent {w:.4}"),
                Err(e) => eprintln!("weyl exponent unavailable: {e}"),
            }
            Ok(true)
        }
    }
}

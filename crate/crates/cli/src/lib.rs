//! Command-line front end for tunable wavelet filter banks: synthesis,
//! verification, subband analysis/reconstruction, fusion, tuning and
//! frequency tables, with stable file formats.

pub mod commands;
pub mod doc;
pub mod image;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use commands::{
    BaseArg, FamilyArg, InitArg, ObjectiveArg, Status, SynthArgs, TuneArgs, UsageError,
};
use uwu_core::grad_tune::{DEFAULT_OMEGA_S, DEFAULT_STOPBAND_SAMPLES};
use uwu_core::rng::DEFAULT_SEED;

#[derive(Debug, Parser)]
#[command(name = "uwu", version, about = "Tunable wavelet filter banks")]
pub struct Cli {
    /// Seed of the xorshift64* generator used for random inits and test signals.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Tolerance override: PR tolerance for `verify`, factorization
    /// tolerance for `synth --init db*`.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a filter spec document from parameters or a named initialization.
    Synth {
        #[arg(value_enum)]
        family: FamilyArg,
        #[arg(long, value_enum)]
        init: Option<InitArg>,
        /// Comma-separated parameter values (angles, lattice or lifting coefficients).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        params: Option<Vec<f64>>,
        /// Number of stages for `--init zeros` / `--init random`.
        #[arg(long)]
        steps: Option<usize>,
        /// Base wavelet of the lifting family.
        #[arg(long, value_enum)]
        base: Option<BaseArg>,
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a spec document: resynthesis, PR round trip, structure, gradients.
    Verify { spec: PathBuf },
    /// Split an image into LL/HL/LH/HH subband files plus a manifest.
    Analyze {
        image: PathBuf,
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Rebuild a plane from an `analyze` output directory.
    Reconstruct {
        dir: PathBuf,
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Attention-weighted subband fusion (half-resolution output).
    Fuse {
        image: PathBuf,
        spec: PathBuf,
        /// Attention head JSON; uniform weights when omitted.
        #[arg(long)]
        head: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Gradient-based tuning of the spec parameters.
    Tune {
        spec: PathBuf,
        #[arg(long, value_enum, default_value = "stopband-energy")]
        objective: ObjectiveArg,
        /// Image for the ll-compaction objective.
        #[arg(long)]
        image: Option<PathBuf>,
        #[arg(long, default_value_t = 0.1)]
        lr: f64,
        #[arg(long, default_value_t = 200)]
        iters: usize,
        /// Stopband edge in radians.
        #[arg(long, default_value_t = DEFAULT_OMEGA_S)]
        omega_s: f64,
        /// Stopband quadrature samples.
        #[arg(long, default_value_t = DEFAULT_STOPBAND_SAMPLES)]
        samples: usize,
        #[arg(long)]
        out: PathBuf,
        /// Objective trace CSV; defaults to `<out>.trace.csv`.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Magnitude responses of h0 and h1 on a uniform grid over [0, pi].
    Freqz {
        spec: PathBuf,
        #[arg(long, default_value_t = 512)]
        samples: usize,
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

pub fn run(cli: Cli) -> anyhow::Result<Status> {
    match cli.command {
        Command::Synth {
            family,
            init,
            params,
            steps,
            base,
            out,
        } => {
            let args = SynthArgs {
                family,
                init,
                params,
                steps,
                base,
                seed: cli.seed,
                tol: cli.tol,
            };
            commands::cmd_synth(&args, out.as_deref())
        }
        Command::Verify { spec } => commands::cmd_verify(&spec, cli.seed, cli.tol),
        Command::Analyze { image, spec, out } => commands::cmd_analyze(&image, &spec, &out),
        Command::Reconstruct { dir, spec, out } => commands::cmd_reconstruct(&dir, &spec, &out),
        Command::Fuse {
            image,
            spec,
            head,
            out,
        } => commands::cmd_fuse(&image, &spec, head.as_deref(), &out),
        Command::Tune {
            spec,
            objective,
            image,
            lr,
            iters,
            omega_s,
            samples,
            out,
            trace,
        } => commands::cmd_tune(&TuneArgs {
            spec,
            objective,
            image,
            lr,
            iters,
            omega_s,
            samples,
            out,
            trace,
        }),
        Command::Freqz { spec, samples, out } => {
            commands::cmd_freqz(&spec, samples, out.as_deref())
        }
    }
}

/// Exit status for a finished run: 0 success, 1 check failure or runtime
/// error, 2 usage error.
pub fn exit_code(result: &anyhow::Result<Status>) -> u8 {
    match result {
        Ok(Status::Success) => 0,
        Ok(Status::CheckFailed) => 1,
        Err(e) if e.downcast_ref::<UsageError>().is_some() => 2,
        Err(_) => 1,
    }
}

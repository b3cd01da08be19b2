mod commands;
mod output;

use clap::{Args, Parser, Subcommand};
use grushin::{Dimensions, QuadratureSpec};
use output::Format;
use std::path::PathBuf;
use std::process::ExitCode;

/// Grushin numerical laboratory: kernels, geometry and experiments as tables.
#[derive(Parser, Debug)]
#[command(name = "grushin-lab", version, allow_negative_numbers = true)]
struct Cli {
    #[command(flatten)]
    run: RunConfig,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct RunConfig {
    /// Dimension of x′.
    #[arg(long, global = true, default_value_t = 1)]
    pub n: usize,
    /// Dimension of x″ (at most 3).
    #[arg(long, global = true, default_value_t = 1)]
    pub m: usize,
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value = "csv")]
    pub format: Format,
    /// Write the table here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Relative tolerance of the kernel integrals.
    #[arg(long, global = true)]
    pub rel_tol: Option<f64>,
    /// Fixed λ-truncation radius.
    #[arg(long, global = true)]
    pub lam_max: Option<f64>,
    /// Minimum radial λ-node count.
    #[arg(long, global = true)]
    pub lam_nodes: Option<usize>,
    /// Gauss–Legendre nodes per unit length of u = ln t.
    #[arg(long, global = true)]
    pub u_nodes: Option<usize>,
}

impl RunConfig {
    pub fn dims(&self) -> grushin::Result<Dimensions> {
        Dimensions::new(self.n, self.m)
    }

    pub fn quadrature(&self) -> QuadratureSpec {
        let mut q = QuadratureSpec::default();
        if let Some(v) = self.rel_tol {
            q.rel_tol = v;
        }
        if self.lam_max.is_some() {
            q.lam_max = self.lam_max;
        }
        if let Some(v) = self.lam_nodes {
            q.lam_nodes = v;
        }
        if let Some(v) = self.u_nodes {
            q.t_sub.u_nodes = v;
        }
        q
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Heat kernel H_{t,a}(x, y).
    #[command(allow_negative_numbers = true)]
    HeatKernel(commands::HeatKernelArgs),
    /// Riesz kernel of X^α G_a^{−k/2}, optionally shifted or regularized.
    #[command(allow_negative_numbers = true)]
    RieszKernel(commands::RieszKernelArgs),
    /// Grushin quasi-distance d(x, y).
    #[command(allow_negative_numbers = true)]
    Distance(commands::DistanceArgs),
    /// Monte-Carlo and asymptotic μ_a ball volumes.
    #[command(allow_negative_numbers = true)]
    BallVolume(commands::BallVolumeArgs),
    /// Empirical L^p operator norms across drift magnitudes.
    #[command(allow_negative_numbers = true)]
    NormSweep(commands::NormSweepArgs),
    /// Rescaled transforms against the Euclidean drifted Riesz transform.
    #[command(allow_negative_numbers = true)]
    DriftLimit(commands::DriftLimitArgs),
    /// Weak (1,1) quasi-norms of rescaled transforms of a bump.
    #[command(allow_negative_numbers = true)]
    Blowup(commands::BlowupArgs),
    /// Dilation or rotation covariance of Riesz kernels at random pairs.
    #[command(allow_negative_numbers = true)]
    CovarianceCheck(commands::CovarianceArgs),
    /// Minkowski bound for transference operators on random instances.
    #[command(allow_negative_numbers = true)]
    TransferenceCheck(commands::TransferenceArgs),
}

fn configure_threads() {
    if let Some(n) = std::env::var("GRUSHIN_LAB_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // only fails if a pool already exists, which cannot happen this early
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    let (name, result) = match &cli.command {
        Command::HeatKernel(a) => ("heat-kernel", commands::heat_kernel(&cli.run, a)),
        Command::RieszKernel(a) => ("riesz-kernel", commands::riesz_kernel(&cli.run, a)),
        Command::Distance(a) => ("distance", commands::distance(&cli.run, a)),
        Command::BallVolume(a) => ("ball-volume", commands::ball_volume(&cli.run, a)),
        Command::NormSweep(a) => ("norm-sweep", commands::norm_sweep(&cli.run, a)),
        Command::DriftLimit(a) => ("drift-limit", commands::drift_limit(&cli.run, a)),
        Command::Blowup(a) => ("blowup", commands::blowup(&cli.run, a)),
        Command::CovarianceCheck(a) => ("covariance-check", commands::covariance_check(&cli.run, a)),
        Command::TransferenceCheck(a) => ("transference-check", commands::transference_check(&cli.run, a)),
    };
    let outcome = match result {
        Ok(o) => o,
        Err(e) => {
            eprintln!("grushin-lab {name}: error: {e:#}");
            let usage = e.downcast_ref::<grushin::Error>().is_some_and(|e| matches!(e, grushin::Error::InvalidArgument(_)));
            return ExitCode::from(if usage { 2 } else { 1 });
        }
    };
    if let Err(e) = output::emit(&outcome.table, cli.run.format, cli.run.output.as_deref()) {
        eprintln!("grushin-lab {name}: error: {e:#}");
        return ExitCode::from(1);
    }
    eprintln!("grushin-lab {name}: {}", outcome.summary());
    if outcome.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use shadowvar_cli::{
    cmd_compare, cmd_exact, cmd_floor_fit, cmd_optimize, cmd_sweep, CliError, CliResult, FloorFitRequest,
    Overrides, Precision, RunConfig, SweepRequest,
};

#[derive(Parser)]
#[command(name = "shadowvar", version, about = "Variational ground states from classical-shadow snapshots")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimize a snapshot bag and write a run directory.
    Optimize(RunArgs),
    /// Exact ground state and correlator table by Lanczos (L <= 14).
    Exact(RunArgs),
    /// Compare a run (or exact) directory with an exact table.
    Compare {
        /// Run directory from `optimize`, or an `exact` directory for a self-check.
        run: PathBuf,
        /// `exact.csv` or the directory holding it.
        exact: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit the eigenvalue floor of M from simulated |0...0> shadows.
    FloorFit {
        #[arg(long = "sites", value_delimiter = ',', default_values_t = [4usize, 6, 8])]
        sites: Vec<usize>,
        #[arg(long = "snapshots", value_delimiter = ',', default_values_t = [4096usize, 16384])]
        snapshots: Vec<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        repeats: usize,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[arg(long, default_value = "runs/floor")]
        out: PathBuf,
    },
    /// Optimize and compare over a grid of snapshot counts and seeds.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long = "snapshot-list", value_delimiter = ',', default_values_t = [4096usize, 8192, 16384])]
        snapshot_list: Vec<usize>,
        #[arg(long = "seeds", value_delimiter = ',', default_values_t = [0u64])]
        seeds: Vec<u64>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// JSON run configuration; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Builtin model name (main, H1, H2, H3, ising) or model file path.
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (concurrent runs for `sweep`).
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(short = 'L', long)]
    sites: Option<usize>,
    #[arg(short = 'N', long)]
    snapshots: Option<usize>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long = "x-eps")]
    x_eps: Option<f64>,
    #[arg(long)]
    lr0: Option<f64>,
    /// Contiguous weights to report, e.g. `2,5`.
    #[arg(long, value_delimiter = ',')]
    weights: Option<Vec<usize>>,
    #[arg(long = "basis-weight")]
    basis_weight: Option<usize>,
    /// Eigen-floor constants or a `floor.json` from `floor-fit`.
    #[arg(long)]
    floor: Option<PathBuf>,
    #[arg(long, value_enum)]
    precision: Option<PrecisionArg>,
}

#[derive(Clone, Copy, ValueEnum)]
enum PrecisionArg {
    F64,
    F32,
}

impl RunArgs {
    fn config(&self) -> CliResult<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        cfg.apply(&Overrides {
            model: self.model.clone(),
            sites: self.sites,
            snapshots: self.snapshots,
            seed: self.seed,
            epochs: self.epochs,
            x_eps_target: self.x_eps,
            lr0: self.lr0,
            weights: self.weights.clone(),
            basis_weight: self.basis_weight,
            floor: self.floor.clone(),
            precision: self.precision.map(|p| match p {
                PrecisionArg::F64 => Precision::F64,
                PrecisionArg::F32 => Precision::F32,
            }),
            out: self.out.clone(),
        });
        Ok(cfg)
    }

    fn global_pool(&self) -> CliResult<()> {
        if self.workers == 0 {
            return Err(CliError::Validation("workers must be at least 1".into()));
        }
        // fails only if a pool already exists, which is harmless
        let _ = rayon::ThreadPoolBuilder::new().num_threads(self.workers).build_global();
        Ok(())
    }
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Optimize(args) => {
            args.global_pool()?;
            let cfg = args.config()?;
            let outcome = cmd_optimize(&cfg, &mut |r| {
                if r.epoch % 25 == 0 || r.retries > 0 {
                    eprintln!(
                        "{:?} {:4}  E/L {:+.5}  lambda_min {:+.5}  lr {:.2e}  retries {}",
                        r.phase, r.epoch, r.energy_density, r.lambda_min, r.lr, r.retries
                    );
                }
            })?;
            let r = &outcome.report;
            println!("run directory: {}", outcome.dir.display());
            println!(
                "E/L {:+.6}  lambda_min {:+.5}  eps {:.5}  f {:.4}  preopt steps {}",
                r.final_energy / r.sites as f64,
                r.final_lambda_min,
                r.eps,
                r.amplitude_factor,
                r.preopt_steps
            );
        }
        Command::Exact(args) => {
            args.global_pool()?;
            let outcome = cmd_exact(&args.config()?)?;
            let m = &outcome.meta;
            println!("exact directory: {}", outcome.dir.display());
            println!(
                "E {:+.10}  E/L {:+.8}  gap {:.6}{}",
                m.energy,
                m.energy / m.sites as f64,
                m.gap,
                if m.degenerate { "  (degenerate)" } else { "" }
            );
        }
        Command::Compare { run, exact, out } => {
            let c = cmd_compare(&run, &exact, out.as_deref())?;
            println!(
                "energy density error {:.5} (raw {:.5})  f {:.4}",
                c.energy_density_error, c.raw_energy_density_error, c.amplitude_factor
            );
            for (k, e) in &c.rms_error_by_weight {
                let reference = c.reference.get(k).map(|r| format!("  reference {:.4}", r.shadow_error));
                println!("rms error weight {k}: {e:.5}{}", reference.unwrap_or_default());
            }
            if c.degenerate {
                println!("note: exact ground space is degenerate");
            }
        }
        Command::FloorFit { sites, snapshots, seed, repeats, workers, out } => {
            let fit = cmd_floor_fit(&FloorFitRequest { sites, snapshots, seed, repeats, workers, out: out.clone() })?;
            println!(
                "alpha0 {:.3}  b0 {:.3}  residual sigma {:.3}  ({} samples) -> {}",
                fit.floor.alpha0,
                fit.floor.b0,
                fit.residual_sigma,
                fit.samples.len(),
                out.join(shadowvar_cli::commands::FLOOR).display()
            );
        }
        Command::Sweep { run, snapshot_list, seeds } => {
            let config = run.config()?;
            let out = config.out.clone().unwrap_or_else(|| PathBuf::from("runs").join("sweep"));
            let req = SweepRequest { config, snapshots: snapshot_list, seeds, workers: run.workers, out: out.clone() };
            let rows = cmd_sweep(&req, &|row| match &row.result {
                Ok(c) => eprintln!(
                    "N {:6} seed {}  energy density error {:.5}  f {:.4}",
                    row.snapshots, row.seed, c.energy_density_error, c.amplitude_factor
                ),
                Err(msg) => eprintln!("N {:6} seed {}  failed: {msg}", row.snapshots, row.seed),
            })?;
            println!("{} runs -> {}", rows.len(), out.join(shadowvar_cli::commands::SWEEP).display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

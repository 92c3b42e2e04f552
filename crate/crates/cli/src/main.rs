use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use starkqed::config::KeyValues;
use starkqed::sweep::{run_preset, run_sweep, SweepConfig};
use starkqed::validate::{run_validate, ValidateConfig};
use starkqed::Error;

/// Environment variable naming the default output directory.
const OUT_DIR_ENV: &str = "STARKQED_OUT_DIR";

#[derive(Parser)]
#[command(
    name = "starkqed",
    version,
    about = "Two-atom entanglement through a Stark-shifted two-photon cavity interaction"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep gt for every (Δ/g, β/g, nbar) combination and write one CSV each.
    #[command(allow_negative_numbers = true)]
    Sweep(SweepArgs),
    /// Run a figure preset (fig2..fig6) and write its CSVs plus a manifest.
    #[command(allow_negative_numbers = true)]
    Preset {
        /// Preset name.
        name: String,
        #[command(flatten)]
        args: SweepArgs,
        /// Mean photon number used by fig6.
        #[arg(long)]
        fig6_nbar: Option<f64>,
    },
    /// Compare the effective model with the full three-level model.
    Validate {
        /// Microscopic parameter file.
        config: PathBuf,
        /// Directory for the JSON report.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SweepArgs {
    /// Config file with `key = value` lines; flags override its keys.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    delta_over_g: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    beta_over_g: Option<Vec<f64>>,
    /// Mean thermal photon numbers; 0 selects the Fock state |n0⟩.
    #[arg(long, value_delimiter = ',')]
    nbar: Option<Vec<f64>>,
    #[arg(long)]
    n0: Option<u32>,
    #[arg(long)]
    gt_min: Option<f64>,
    #[arg(long)]
    gt_max: Option<f64>,
    #[arg(long)]
    gt_step: Option<f64>,
    #[arg(long)]
    tail_tol: Option<f64>,
    /// Scale thermal states to unit trace before computing entanglement.
    #[arg(long)]
    renormalize_thermal: bool,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (0 = one per core).
    #[arg(long)]
    workers: Option<usize>,
}

impl SweepArgs {
    fn resolve(self) -> Result<SweepConfig, Error> {
        let mut cfg = SweepConfig::default();
        if let Some(dir) = std::env::var_os(OUT_DIR_ENV) {
            cfg.output_path = PathBuf::from(dir);
        }
        if let Some(path) = &self.config {
            cfg = cfg.apply(&KeyValues::read(path)?)?;
        }
        if let Some(v) = self.delta_over_g {
            cfg.delta_over_g = v;
        }
        if let Some(v) = self.beta_over_g {
            cfg.beta_over_g = v;
        }
        if let Some(v) = self.nbar {
            cfg.nbar = v;
        }
        if let Some(v) = self.n0 {
            cfg.n0 = v;
        }
        if let Some(v) = self.gt_min {
            cfg.gt_min = v;
        }
        if let Some(v) = self.gt_max {
            cfg.gt_max = v;
        }
        if let Some(v) = self.gt_step {
            cfg.gt_step = v;
        }
        if let Some(v) = self.tail_tol {
            cfg.tail_tol = v;
        }
        if self.renormalize_thermal {
            cfg.renormalize_thermal = true;
        }
        if let Some(v) = self.out {
            cfg.output_path = v;
        }
        if let Some(v) = self.workers {
            cfg.workers = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Config { .. } | Error::InvalidParameter { .. } | Error::UnknownPreset(_) => 2,
        Error::Io { .. } => 3,
        Error::Validation(_)
        | Error::Truncation { .. }
        | Error::LeakageExceeded { .. }
        | Error::InvalidDensityMatrix(_) => 4,
    }
}

fn write_report(dir: &Path, json: &str) -> Result<PathBuf, Error> {
    std::fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let path = dir.join("validate_report.json");
    std::fs::write(&path, json).map_err(|source| Error::Io {
        path: path.clone(),
        source,
    })?;
    Ok(path)
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Sweep(args) => {
            let cfg = args.resolve()?;
            for w in run_sweep(&cfg)? {
                println!("{}", w.path.display());
            }
        }
        Command::Preset {
            name,
            args,
            fig6_nbar,
        } => {
            let mut cfg = args.resolve()?;
            if let Some(v) = fig6_nbar {
                cfg.fig6_nbar = v;
                cfg.validate()?;
            }
            let out = run_preset(&name, &cfg)?;
            for w in &out.series {
                println!("{}", w.path.display());
            }
            println!("{}", out.manifest_path.display());
            for a in &out.manifest.assumptions {
                eprintln!("assumption: {a}");
            }
        }
        Command::Validate { config, out } => {
            let cfg = ValidateConfig::read(&config)?;
            for w in cfg.micro.adiabaticity_warnings() {
                eprintln!("warning: {w}");
            }
            let outcome = run_validate(&cfg)?;
            print!("{}", outcome.to_text());
            let dir = out.or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from));
            if let Some(dir) = dir {
                let path = write_report(&dir, &outcome.to_json())?;
                println!("report: {}", path.display());
            }
            if !outcome.passed() {
                return Err(Error::Validation(format!(
                    "max |dE_F| = {:.3e} (tolerance {:.3e}), monotone = {}",
                    outcome.report.max_abs_diff, outcome.tolerance, outcome.monotone
                )));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lindblad_cl_cli::commands::{self, FitModel};
use lindblad_cl_cli::{threads_from_env, CliError, ConfigFile, Purpose, RunConfig};

#[derive(Parser)]
#[command(
    name = "lindblad-cl",
    version,
    about = "Cathodoluminescence and pulse interference from Lindblad dynamics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// TOML configuration; omitted sections fall back to the preset.
    #[arg(long, short)]
    config: Option<PathBuf>,
    /// Built-in parameter set used when no config file is given.
    #[arg(long)]
    preset: Option<String>,
    /// Disable the optical pulse (pure CL).
    #[arg(long)]
    no_pulse: bool,
    /// Output directory (default: output.dir from the config, else ./out).
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Exp,
    Lorentz,
}

#[derive(Subcommand)]
enum Command {
    /// Single run: spectral density, polarization and detected spectrum.
    Simulate(RunArgs),
    /// Delay scan producing a delay map (parallel over delays).
    Scan {
        #[command(flatten)]
        run: RunArgs,
        /// Also write P and S for each delay.
        #[arg(long)]
        per_delay: bool,
    },
    /// Fringe visibility per delay of a delay map, with an exponential fit.
    Visibility {
        map: PathBuf,
        #[arg(long, num_args = 2, value_names = ["LO", "HI"], default_values_t = [550.0, 800.0])]
        window_nm: Vec<f64>,
        /// Write the visibility series as CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit y = A exp(-x/tau) + C (x in fs) or a Lorentzian in omega.
    Fit {
        file: PathBuf,
        #[arg(long, value_enum)]
        model: ModelArg,
        #[arg(long, num_args = 2, value_names = ["LO", "HI"])]
        window_nm: Option<Vec<f64>>,
    },
    /// Electron speed and distance/delay conversion.
    Kinematics {
        #[arg(long)]
        kev: f64,
        #[arg(long, num_args = 1..)]
        distance_um: Vec<f64>,
        #[arg(long, num_args = 1..)]
        delay_fs: Vec<f64>,
    },
    /// Run the analytic oracle checks.
    Validate,
}

fn load(args: &RunArgs, purpose: Purpose) -> Result<(RunConfig, PathBuf), CliError> {
    let mut cfg = match (&args.config, &args.preset) {
        (Some(_), Some(_)) => return Err(CliError::Usage("give either --config or --preset, not both".into())),
        (Some(path), None) => ConfigFile::load(path)?.resolve(purpose)?,
        (None, preset) => RunConfig::preset(
            preset.as_deref().unwrap_or(lindblad_cl_cli::config::PRESET_NAME),
            purpose,
        )?,
    };
    if args.no_pulse {
        cfg.pulse.enabled = false;
    }
    let out = args
        .out
        .clone()
        .or_else(|| cfg.output_dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));
    Ok((cfg, out))
}

fn pool(threads: Option<usize>) -> Result<rayon::ThreadPool, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    builder
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start worker threads: {e}")))
}

fn window_pair(v: &[f64]) -> (f64, f64) {
    (v[0], v[1])
}

fn run(cli: Cli) -> Result<String, CliError> {
    match cli.command {
        Command::Simulate(args) => {
            let (cfg, out) = load(&args, Purpose::Simulate)?;
            pool(Some(1))?
                .install(|| commands::simulate(&cfg, &out))
                .map(|o| o.report)
        }
        Command::Scan { run, per_delay } => {
            let threads = threads_from_env()?;
            let (cfg, out) = load(&run, Purpose::Scan)?;
            pool(threads)?.install(|| commands::scan(&cfg, &out, per_delay))
        }
        Command::Visibility { map, window_nm, out } => {
            let (lo, hi) = window_pair(&window_nm);
            pool(Some(1))?.install(|| commands::visibility(&map, lo, hi, out.as_deref()))
        }
        Command::Fit { file, model, window_nm } => {
            let model = match model {
                ModelArg::Exp => FitModel::Exp,
                ModelArg::Lorentz => FitModel::Lorentz,
            };
            commands::fit(Path::new(&file), model, window_nm.as_deref().map(window_pair))
        }
        Command::Kinematics {
            kev,
            distance_um,
            delay_fs,
        } => commands::kinematics(kev, &distance_um, &delay_fs),
        Command::Validate => pool(Some(1))?.install(commands::validate),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(CliError::ChecksFailed(text)) => {
            print!("{text}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use kickspin::config::read_config;
use kickspin::engine::{horizon_experiment, run_simulation_with, sweep_configs, Execution, SweepParam};
use kickspin::output::{gnuplot_script, series_csv, HorizonJson, OutputDir, SweepPoint};
use kickspin::presets::{gp_name, preset, PRESET_NAMES};
use kickspin::{Error, Result, SimulationConfig};

/// Spin ensembles under classically disturbed kick trains.
#[derive(Parser)]
#[command(name = "kickspin", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Output directory (created if missing).
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Override the master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Also write a gnuplot script next to each CSV.
    #[arg(long)]
    gnuplot: bool,
    /// Update spins on one thread in simulate and sweep (results are identical).
    #[arg(long)]
    sequential: bool,
}

impl Common {
    fn execution(&self) -> Execution {
        if self.sequential {
            Execution::Sequential
        } else {
            Execution::Parallel
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run one simulation and write its observable series.
    Simulate {
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Run one simulation per value of a parameter.
    Sweep {
        config: PathBuf,
        /// omega_ratio, vartheta, d0, sigma or x.
        #[arg(long)]
        param: String,
        /// Comma-separated values.
        #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
        values: Vec<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Predicted and observed horizon of coherence of a chaotic bath.
    Horizon {
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Named batch of runs.
    Preset {
        #[arg(value_name = "NAME", help = format!("One of {}", PRESET_NAMES.join(", ")))]
        name: String,
        #[command(flatten)]
        common: Common,
    },
}

fn load(path: &Path, seed: Option<u64>) -> Result<SimulationConfig> {
    let mut cfg = read_config(path)?;
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn write_series_plot(out: &OutputDir, csv: &str) -> Result<()> {
    out.write_companion(&gp_name(csv), &gnuplot_script(csv, csv, &["coherence", "pop_up"]))
}

fn simulate(config: &Path, common: &Common) -> Result<()> {
    let cfg = load(config, common.seed)?;
    let series = run_simulation_with(&cfg, common.execution())?;
    let mut out = OutputDir::create(&common.out, "simulate", cfg.seed)?;
    out.write("series.csv", &series_csv(&series), &cfg, None, None)?;
    if common.gnuplot {
        write_series_plot(&out, "series.csv")?;
    }
    out.finish()?;
    Ok(())
}

fn sweep(config: &Path, param: &str, values: &[f64], common: &Common) -> Result<()> {
    let cfg = load(config, common.seed)?;
    let param: SweepParam = param.parse()?;
    let configs = sweep_configs(&cfg, param, values)?;
    let mut out = OutputDir::create(&common.out, "sweep", cfg.seed)?;
    for (k, (c, &value)) in configs.iter().zip(values).enumerate() {
        let series = run_simulation_with(c, common.execution())?;
        let name = format!("sweep_{}_{k}.csv", param.name());
        let point = SweepPoint { param: param.name().to_string(), value };
        out.write(&name, &series_csv(&series), c, Some(point), None)?;
        if common.gnuplot {
            write_series_plot(&out, &name)?;
        }
    }
    out.finish()?;
    Ok(())
}

fn horizon(config: &Path, common: &Common) -> Result<()> {
    let cfg = load(config, common.seed)?;
    let (report, observed, series) = horizon_experiment(&cfg)?;
    let m = cfg.bath.automorphism_matrix().expect("horizon experiment checked the bath");
    let json = HorizonJson::new(&report, observed, m[0][0] * m[1][1] - m[0][1] * m[1][0]);
    let mut out = OutputDir::create(&common.out, "horizon", cfg.seed)?;
    out.write("horizon.json", &json.to_json(), &cfg, None, None)?;
    out.write("series.csv", &series_csv(&series), &cfg, None, None)?;
    if common.gnuplot {
        write_series_plot(&out, "series.csv")?;
    }
    out.finish()?;
    print!("{}", json.to_json());
    Ok(())
}

fn run_preset(name: &str, common: &Common) -> Result<()> {
    let p = preset(name, common.seed.unwrap_or(0))?;
    let mut out = OutputDir::create(&common.out, &format!("preset {name}"), common.seed.unwrap_or(0))?;
    p.execute(&mut out, common.gnuplot)?;
    let manifest = out.finish()?;
    println!("{}: {}", p.name, p.description);
    for o in &manifest.outputs {
        println!("  {}", common.out.join(&o.file).display());
    }
    Ok(())
}

fn exit_code(e: &Error) -> ExitCode {
    if e.is_config_error() {
        ExitCode::from(2)
    } else {
        ExitCode::from(3)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Simulate { config, common } => simulate(config, common),
        Command::Sweep { config, param, values, common } => sweep(config, param, values, common),
        Command::Horizon { config, common } => horizon(config, common),
        Command::Preset { name, common } => run_preset(name, common),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

//! Named batches of runs (`fig2` to `fig10`), each covering one dynamical
//! regime: bath comparisons, parameter scans, oscillations, jumps and
//! chaotic horizons. All seeds of a preset derive from one master seed.

use std::f64::consts::PI;

use crate::baths::{derive_seed, BathSpec, InitialDistribution};
use crate::engine::{cat_horizon_config, run_simulation, sweep_configs, SimulationConfig, SweepParam};
use crate::error::{Error, Result};
use crate::experiments::{jump_experiment, JumpWindow};
use crate::output::{gnuplot_script, jump_csv, series_csv_columns, Column, OutputDir, SweepPoint};
use crate::quantum::SystemParams;

pub const PRESET_NAMES: [&str; 9] = [
    "fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9", "fig10",
];

/// One CSV cut from a run.
#[derive(Clone, Debug, PartialEq)]
pub struct CsvFile {
    pub name: String,
    pub columns: Vec<Column>,
}

impl CsvFile {
    fn full(name: impl Into<String>) -> Self {
        CsvFile { name: name.into(), columns: Column::ALL.to_vec() }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Job {
    Series {
        cfg: SimulationConfig,
        files: Vec<CsvFile>,
        sweep: Option<SweepPoint>,
    },
    JumpScan {
        cfg: SimulationConfig,
        thetas: Vec<f64>,
        window: JumpWindow,
        file: String,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    pub jobs: Vec<Job>,
}

fn base(bath: BathSpec, d0: f64, seed: u64) -> SimulationConfig {
    SimulationConfig {
        params: SystemParams::default(),
        bath,
        init: InitialDistribution { d0, ..Default::default() },
        n_spins: 1000,
        n_kicks: 200,
        seed,
        record_entropies: true,
    }
}

fn series(cfg: SimulationConfig, name: impl Into<String>) -> Job {
    Job::Series { cfg, files: vec![CsvFile::full(name)], sweep: None }
}

fn sweep_jobs(prefix: &str, cfg: &SimulationConfig, param: SweepParam, values: &[f64], labels: &[&str]) -> Result<Vec<Job>> {
    let configs = sweep_configs(cfg, param, values)?;
    Ok(configs
        .into_iter()
        .zip(values.iter().zip(labels))
        .map(|(c, (&value, label))| Job::Series {
            cfg: c,
            files: vec![CsvFile::full(format!("{prefix}_{}_{label}.csv", param.name()))],
            sweep: Some(SweepPoint { param: param.name().to_string(), value }),
        })
        .collect())
}

const REGULAR_BATHS: [(&str, BathSpec); 4] = [
    ("stationary", BathSpec::Stationary),
    ("drifting", BathSpec::Drifting { a: BathSpec::DRIFT_A, b: BathSpec::DRIFT_B }),
    ("microcanonical", BathSpec::Microcanonical),
    ("markovian", BathSpec::Markovian { sigma: 1e-2 }),
];

const VARTHETA_VALUES: [f64; 4] = [PI / 64.0, PI / 16.0, PI / 8.0, PI / 4.0];
const VARTHETA_LABELS: [&str; 4] = ["pi_64", "pi_16", "pi_8", "pi_4"];

/// Builds preset `name` with all seeds derived from `seed`.
pub fn preset(name: &str, seed: u64) -> Result<Preset> {
    let s = |k: u64| derive_seed(seed, k);
    let (description, jobs) = match name {
        "fig2" => {
            let mut jobs = Vec::new();
            let mut k = 0;
            for (label, d0) in [("small", 1e-3), ("large", PI)] {
                for (bath_name, bath) in REGULAR_BATHS {
                    jobs.push(series(base(bath, d0, s(k)), format!("fig2_{bath_name}_{label}.csv")));
                    k += 1;
                }
            }
            ("coherence under the regular and irregular baths, small and large initial dispersion", jobs)
        }
        "fig3" => {
            let mut jobs = sweep_jobs(
                "fig3",
                &base(BathSpec::Microcanonical, 1e-3, s(0)),
                SweepParam::OmegaRatio,
                &[0.1, 1.0, 10.0],
                &["0.1", "1", "10"],
            )?;
            jobs.extend(sweep_jobs(
                "fig3",
                &base(BathSpec::Stationary, PI, s(1)),
                SweepParam::Vartheta,
                &VARTHETA_VALUES,
                &VARTHETA_LABELS,
            )?);
            ("coherence against frequency ratio and kick direction", jobs)
        }
        "fig4" => {
            let mut low_r = base(BathSpec::Stationary, PI, s(2));
            low_r.params.omega_ratio = 1.0;
            let jobs = vec![
                series(base(BathSpec::Stationary, PI, s(0)), "fig4_stationary.csv"),
                series(base(BathSpec::Microcanonical, PI, s(1)), "fig4_microcanonical.csv"),
                series(low_r, "fig4_stationary_r1.csv"),
            ];
            ("populations under stationary and microcanonical baths", jobs)
        }
        "fig5" => {
            let mut jobs = sweep_jobs(
                "fig5",
                &base(BathSpec::Microcanonical, PI, s(0)),
                SweepParam::Vartheta,
                &VARTHETA_VALUES,
                &VARTHETA_LABELS,
            )?;
            jobs.extend(sweep_jobs(
                "fig5",
                &base(BathSpec::Microcanonical, PI, s(1)),
                SweepParam::OmegaRatio,
                &[0.1, 1.0, 10.0],
                &["0.1", "1", "10"],
            )?);
            ("populations against kick direction and frequency ratio", jobs)
        }
        "fig6" => {
            let mut cfg = base(BathSpec::Stationary, 1e-3, s(0));
            cfg.params.omega_ratio = 0.25;
            cfg.n_kicks = 256;
            ("population fluctuations of a weakly dispersed stationary bath", vec![series(cfg, "fig6_stationary.csv")])
        }
        "fig7" => {
            let mut cfg = base(BathSpec::drifting(), PI, s(0));
            cfg.params.omega_ratio = 0.05;
            cfg.n_kicks = 100;
            let thetas: Vec<f64> = (0..16).map(|k| k as f64 * (PI / 2.0) / 15.0).collect();
            let jobs = vec![
                series(cfg.clone(), "fig7_jump_series.csv"),
                Job::JumpScan { cfg, thetas, window: JumpWindow::default(), file: "fig7_jump_amplitude.csv".into() },
            ];
            ("population jump of a strongly dispersed drifting bath and its amplitude against Theta", jobs)
        }
        "fig8" => {
            let jobs = [1e-4, 1e-2]
                .iter()
                .zip(["1e-4", "1e-2"])
                .map(|(&sigma, label)| {
                    let mut cfg = base(BathSpec::Markovian { sigma }, 1e-3, s(0));
                    cfg.params.omega_ratio = 0.25;
                    cfg.n_kicks = 256;
                    series(cfg, format!("fig8_markovian_sigma_{label}.csv"))
                })
                .collect();
            ("damped population oscillations of weak Markovian baths", jobs)
        }
        "fig9" => {
            let cfg = SimulationConfig { seed, ..cat_horizon_config() };
            let job = Job::Series {
                cfg,
                files: vec![
                    CsvFile { name: "fig9_coherence.csv".into(), columns: vec![Column::N, Column::Coherence] },
                    CsvFile { name: "fig9_population.csv".into(), columns: vec![Column::N, Column::PopUp, Column::PopDown] },
                ],
                sweep: None,
            };
            ("coherence and population under Arnold's cat map", vec![job])
        }
        "fig10" => {
            let cfg = SimulationConfig { seed, ..cat_horizon_config() };
            let jobs = sweep_jobs("fig10", &cfg, SweepParam::X, &[1.0, 2.0, 3.0], &["1", "2", "3"])?;
            ("entropies of the spin ensemble and of chaotic kick baths", jobs)
        }
        other => {
            return Err(Error::UnknownPreset {
                name: other.to_string(),
                valid: PRESET_NAMES.join(", "),
            })
        }
    };
    let name = PRESET_NAMES.iter().find(|&&n| n == name).copied().expect("matched above");
    Ok(Preset { name, description, jobs })
}

impl Preset {
    /// Runs every job and writes its files into `out`.
    pub fn execute(&self, out: &mut OutputDir, gnuplot: bool) -> Result<()> {
        for job in &self.jobs {
            match job {
                Job::Series { cfg, files, sweep } => {
                    let series = run_simulation(cfg)?;
                    for f in files {
                        out.write(&f.name, &series_csv_columns(&series, &f.columns), cfg, sweep.clone(), None)?;
                        if gnuplot {
                            let cols: Vec<&str> = f.columns[1..].iter().map(Column::header).collect();
                            out.write_companion(&gp_name(&f.name), &gnuplot_script(&f.name, &f.name, &cols))?;
                        }
                    }
                }
                Job::JumpScan { cfg, thetas, window, file } => {
                    let points = jump_experiment(cfg, thetas, *window)?;
                    out.write(file, &jump_csv(&points), cfg, None, Some(thetas.clone()))?;
                    if gnuplot {
                        out.write_companion(&gp_name(file), &gnuplot_script(file, file, &["amplitude"]))?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// `name.csv` -> `name.gp`.
pub fn gp_name(csv: &str) -> String {
    format!("{}.gp", csv.strip_suffix(".csv").unwrap_or(csv))
}

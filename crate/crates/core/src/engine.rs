//! Lockstep evolution of the spin ensemble and its kick bath.
//!
//! Kick `n` of spin `i` is built from `Phi^n` applied to the initial draw of
//! that spin; the kick point is advanced only after the spin has been
//! propagated. Record 0 is the initial state, record `n` the state after the
//! `n`-th kick, and the kick-bath entropies of record `n` are those of the
//! points `Phi^n(p_0)`.

use std::f64::consts::PI;
use std::str::FromStr;

use rayon::prelude::*;

use crate::baths::{
    derive_seed, eigen_frame, flow_step, sample_initial_point, spin_rng, BathSpec, EigenFrame,
    InitialDistribution, KickPoint, SpinRng,
};
use crate::entropy::{
    empirical_horizon, ks_prediction, shannon_entropy, von_neumann_entropy, HorizonReport,
    MicrostateGrid, S_MAX,
};
use crate::error::{Error, Result};
use crate::quantum::{coherence, ensemble_density, monodromy, population, DensityMatrix2, SpinState, SystemParams};

/// Threshold used to read the observed horizon of coherence off a run.
pub const HORIZON_THRESHOLD: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimulationConfig {
    pub params: SystemParams,
    pub bath: BathSpec,
    pub init: InitialDistribution,
    pub n_spins: usize,
    pub n_kicks: usize,
    pub seed: u64,
    pub record_entropies: bool,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        SimulationConfig {
            params: SystemParams::default(),
            bath: BathSpec::Microcanonical,
            init: InitialDistribution::default(),
            n_spins: 1000,
            n_kicks: 200,
            seed: 0,
            record_entropies: true,
        }
    }
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.bath.validate()?;
        self.init.validate(&self.bath)?;
        if self.n_spins == 0 {
            return Err(Error::invalid("n_spins", "must be at least 1"));
        }
        Ok(())
    }

    /// Predicted horizons, when the bath is a hyperbolic automorphism and the
    /// initial dispersion is positive.
    pub fn horizon_report(&self) -> Option<HorizonReport> {
        let frame = eigen_frame(&self.bath).ok()?;
        HorizonReport::new(&frame, self.init.d0, &MicrostateGrid::default(), S_MAX).ok()
    }
}

/// Observables after one kick.
#[derive(Clone, Debug, PartialEq)]
pub struct Record {
    pub n: usize,
    pub rho: DensityMatrix2,
    pub coherence: f64,
    pub p_up: f64,
    pub p_down: f64,
    pub s_vn: Option<f64>,
    pub s_sh: Option<f64>,
    pub s_sh_cum: Option<f64>,
    /// Only for hyperbolic automorphism baths.
    pub s_ks: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ObservableSeries {
    pub records: Vec<Record>,
    pub horizon: Option<HorizonReport>,
}

impl ObservableSeries {
    pub fn coherence(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.coherence).collect()
    }

    pub fn p_up(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.p_up).collect()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

struct Spin {
    state: SpinState,
    kick: KickPoint,
    rng: SpinRng,
}

impl Spin {
    fn kick(&mut self, params: &SystemParams, bath: &BathSpec) {
        self.state = self.state.evolve(&monodromy(self.kick, params));
        self.kick = flow_step(bath, self.kick, &mut self.rng);
    }
}

struct Recorder<'a> {
    cfg: &'a SimulationConfig,
    grid: MicrostateGrid,
    horizon: Option<HorizonReport>,
    cumulative: f64,
    states: Vec<SpinState>,
    kicks: Vec<KickPoint>,
}

impl Recorder<'_> {
    fn record(&mut self, n: usize, spins: &[Spin]) -> Result<Record> {
        // reductions always run in ascending spin order
        self.states.clear();
        self.states.extend(spins.iter().map(|s| s.state));
        let rho = ensemble_density(&self.states)?;
        let (p_up, p_down) = population(&rho);

        let (s_vn, s_sh, s_sh_cum) = if self.cfg.record_entropies {
            self.kicks.clear();
            self.kicks.extend(spins.iter().map(|s| s.kick));
            let s_sh = shannon_entropy(&self.kicks, &self.grid)?;
            self.cumulative += s_sh;
            (Some(von_neumann_entropy(&rho)), Some(s_sh), Some(self.cumulative))
        } else {
            (None, None, None)
        };
        let s_ks = self
            .horizon
            .map(|h| ks_prediction(n as f64, h.n_box, h.lyapunov));

        Ok(Record {
            n,
            rho,
            coherence: coherence(&rho),
            p_up,
            p_down,
            s_vn,
            s_sh,
            s_sh_cum,
            s_ks,
        })
    }
}

fn initial_spins(cfg: &SimulationConfig) -> Result<Vec<Spin>> {
    let frame: Option<EigenFrame> = match cfg.init.alignment {
        crate::baths::Alignment::EigenAligned => Some(eigen_frame(&cfg.bath)?),
        crate::baths::Alignment::AxisAligned => None,
    };
    Ok((0..cfg.n_spins)
        .map(|i| {
            let mut rng = spin_rng(cfg.seed, i as u64);
            let kick = sample_initial_point(&cfg.init, frame.as_ref(), &mut rng);
            Spin {
                state: cfg.params.psi0,
                kick,
                rng,
            }
        })
        .collect())
}

/// Runs the configured simulation on the rayon pool.
pub fn run_simulation(cfg: &SimulationConfig) -> Result<ObservableSeries> {
    run_simulation_with(cfg, Execution::Parallel)
}

pub fn run_simulation_with(cfg: &SimulationConfig, exec: Execution) -> Result<ObservableSeries> {
    cfg.validate()?;
    let mut spins = initial_spins(cfg)?;
    let horizon = cfg.horizon_report();
    let mut recorder = Recorder {
        cfg,
        grid: MicrostateGrid::default(),
        horizon,
        cumulative: 0.0,
        states: Vec::with_capacity(cfg.n_spins),
        kicks: Vec::with_capacity(cfg.n_spins),
    };

    let mut records = Vec::with_capacity(cfg.n_kicks + 1);
    records.push(recorder.record(0, &spins)?);
    for n in 1..=cfg.n_kicks {
        match exec {
            Execution::Sequential => spins
                .iter_mut()
                .for_each(|s| s.kick(&cfg.params, &cfg.bath)),
            Execution::Parallel => spins
                .par_iter_mut()
                .for_each(|s| s.kick(&cfg.params, &cfg.bath)),
        }
        records.push(recorder.record(n, &spins)?);
    }
    Ok(ObservableSeries { records, horizon })
}

/// Parameter that a sweep varies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepParam {
    OmegaRatio,
    Vartheta,
    D0,
    Sigma,
    X,
}

impl SweepParam {
    pub fn name(&self) -> &'static str {
        match self {
            SweepParam::OmegaRatio => "omega_ratio",
            SweepParam::Vartheta => "vartheta",
            SweepParam::D0 => "d0",
            SweepParam::Sigma => "sigma",
            SweepParam::X => "x",
        }
    }

    /// Copy of `cfg` with this parameter set to `value`.
    pub fn apply(&self, cfg: &SimulationConfig, value: f64) -> Result<SimulationConfig> {
        let mut out = cfg.clone();
        match self {
            SweepParam::OmegaRatio => out.params.omega_ratio = value,
            SweepParam::Vartheta => out.params.vartheta = value,
            SweepParam::D0 => out.init.d0 = value,
            SweepParam::Sigma => match &mut out.bath {
                BathSpec::Markovian { sigma } => *sigma = value,
                other => {
                    return Err(Error::invalid(
                        "sigma",
                        format!("cannot sweep sigma on a {} bath", other.name()),
                    ))
                }
            },
            SweepParam::X => match &mut out.bath {
                BathSpec::ToralAutomorphism { x, .. } => *x = value,
                other => {
                    return Err(Error::invalid(
                        "x",
                        format!("cannot sweep x on a {} bath", other.name()),
                    ))
                }
            },
        }
        out.validate()?;
        Ok(out)
    }
}

impl FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "omega_ratio" => SweepParam::OmegaRatio,
            "vartheta" => SweepParam::Vartheta,
            "d0" => SweepParam::D0,
            "sigma" => SweepParam::Sigma,
            "x" => SweepParam::X,
            other => return Err(Error::UnknownParameter(other.to_string())),
        })
    }
}

/// Configs of a sweep: one per value, run `k` seeded from `(cfg.seed, k)`.
pub fn sweep_configs(
    cfg: &SimulationConfig,
    parameter: SweepParam,
    values: &[f64],
) -> Result<Vec<SimulationConfig>> {
    values
        .iter()
        .enumerate()
        .map(|(k, &v)| {
            let mut c = parameter.apply(cfg, v)?;
            c.seed = derive_seed(cfg.seed, k as u64);
            Ok(c)
        })
        .collect()
}

/// Independent runs over `values`, returned in input order.
pub fn sweep(
    cfg: &SimulationConfig,
    parameter: SweepParam,
    values: &[f64],
) -> Result<Vec<(f64, ObservableSeries)>> {
    let configs = sweep_configs(cfg, parameter, values)?;
    values
        .iter()
        .zip(configs.iter())
        .map(|(&v, c)| Ok((v, run_simulation(c)?)))
        .collect()
}

/// Runs a chaotic-bath simulation and compares the predicted horizon of
/// coherence against the first kick where coherence falls below half its
/// initial value.
pub fn horizon_experiment(cfg: &SimulationConfig) -> Result<(HorizonReport, Option<usize>, ObservableSeries)> {
    cfg.validate()?;
    let frame = eigen_frame(&cfg.bath)?;
    let grid = MicrostateGrid::default();
    if !(cfg.init.d0 > 0.0 && cfg.init.d0 < grid.cell_size) {
        return Err(Error::invalid(
            "d0",
            format!("horizon experiment needs 0 < d0 < {}", grid.cell_size),
        ));
    }
    let report = HorizonReport::new(&frame, cfg.init.d0, &grid, S_MAX)?;
    let series = run_simulation(cfg)?;
    let observed = empirical_horizon(&series.coherence(), HORIZON_THRESHOLD)?;
    Ok((report, observed, series))
}

/// Arnold's cat configuration used for the headline horizon run.
pub fn cat_horizon_config() -> SimulationConfig {
    SimulationConfig {
        params: SystemParams {
            omega_ratio: 10.0,
            vartheta: PI / 4.0,
            psi0: SpinState::balanced(),
        },
        bath: BathSpec::cat(),
        init: InitialDistribution {
            d0: 1e-3,
            ..Default::default()
        },
        n_spins: 1024,
        n_kicks: 30,
        seed: 0,
        record_entropies: true,
    }
}

//! Simulation and analysis of a spin ensemble driven by classically disturbed
//! kick trains.
//!
//! Each spin is a two-level system kicked once per period with a strength and
//! delay drawn from a classical flow on the torus (the kick bath). The crate
//! evolves the ensemble stroboscopically, records coherence, populations and
//! entropies, and predicts the horizon of coherence of chaotic baths from
//! their Lyapunov exponent.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baths;
pub mod config;
pub mod engine;
pub mod entropy;
pub mod error;
pub mod experiments;
pub mod output;
pub mod presets;
pub mod quantum;

pub use baths::{Alignment, BathSpec, EigenFrame, InitialDistribution, KickPoint};
pub use engine::{run_simulation, ObservableSeries, Record, SimulationConfig, SweepParam};
pub use entropy::{HorizonReport, MicrostateGrid, S_MAX};
pub use config::{parse_config, read_config, ConfigEcho};
pub use error::{Error, Result};
pub use quantum::{DensityMatrix2, SpinState, SystemParams, Unitary2};

use std::f64::consts::{LN_10, PI};

use kickspin::engine::{cat_horizon_config, horizon_experiment, sweep, sweep_configs, HORIZON_THRESHOLD};
use kickspin::entropy::empirical_horizon;
use kickspin::{parse_config, run_simulation, BathSpec, ConfigEcho, InitialDistribution, SimulationConfig, SweepParam};

fn horizon_of(coherence: &[f64]) -> usize {
    empirical_horizon(coherence, HORIZON_THRESHOLD).unwrap().expect("coherence never halves")
}

#[test]
fn decoherence_speeds_up_with_frequency_ratio() {
    let cfg = SimulationConfig { n_kicks: 60, ..Default::default() };
    let runs = sweep(&cfg, SweepParam::OmegaRatio, &[0.1, 1.0, 10.0]).unwrap();
    let h: Vec<usize> = runs.iter().map(|(_, s)| horizon_of(&s.coherence())).collect();
    assert!(h[0] > h[1] && h[1] >= h[2], "{h:?}");
    // ties at integer resolution are broken by the depth of the fall
    let at = h[2];
    assert!(runs[2].1.records[at].coherence < runs[1].1.records[at].coherence);
}

#[test]
fn kick_direction_near_eigenvector_decoheres_more() {
    let cfg = SimulationConfig {
        bath: BathSpec::Stationary,
        init: InitialDistribution { d0: PI, ..Default::default() },
        n_kicks: 200,
        ..Default::default()
    };
    let runs = sweep(&cfg, SweepParam::Vartheta, &[PI / 64.0, PI / 4.0]).unwrap();
    let tail_mean = |c: Vec<f64>| c[150..].iter().sum::<f64>() / 51.0;
    let near = tail_mean(runs[0].1.coherence());
    let far = tail_mean(runs[1].1.coherence());
    assert!(near < far, "near {near} far {far}");
}

#[test]
fn sweep_matches_individual_runs() {
    let cfg = SimulationConfig { n_spins: 64, n_kicks: 10, ..Default::default() };
    let values = [0.5, 2.0];
    let runs = sweep(&cfg, SweepParam::OmegaRatio, &values).unwrap();
    let configs = sweep_configs(&cfg, SweepParam::OmegaRatio, &values).unwrap();
    assert_ne!(configs[0].seed, configs[1].seed);
    for ((v, series), c) in runs.iter().zip(&configs) {
        assert_eq!(c.params.omega_ratio, *v);
        assert_eq!(series, &run_simulation(c).unwrap());
    }
}

#[test]
fn sigma_sweep_needs_markovian_bath() {
    let cfg = SimulationConfig::default();
    assert!(sweep(&cfg, SweepParam::Sigma, &[0.1]).is_err());
    assert!("gamma".parse::<SweepParam>().is_err());
}

#[test]
fn steeper_automorphism_has_shorter_horizon() {
    let cat = cat_horizon_config();
    let x3 = SimulationConfig { bath: BathSpec::ToralAutomorphism { x: 3.0, sign: 1 }, ..cat.clone() };
    let (r1, _, _) = horizon_experiment(&cat).unwrap();
    let (r3, _, _) = horizon_experiment(&x3).unwrap();
    assert!(r3.lyapunov > r1.lyapunov);
    assert!(r3.n_star < r1.n_star);
}

#[test]
fn tenfold_smaller_dispersion_delays_predictability_horizon() {
    let cat = cat_horizon_config();
    let fine = SimulationConfig { init: InitialDistribution { d0: 1e-4, ..cat.init }, ..cat.clone() };
    let (a, _, _) = horizon_experiment(&cat).unwrap();
    let (b, _, _) = horizon_experiment(&fine).unwrap();
    let shift = LN_10 / a.lyapunov;
    assert!((b.n_box - a.n_box - shift).abs() < 1e-12);
    assert!((shift - 2.39).abs() < 0.01);
    assert!(b.n_star > a.n_star);
}

#[test]
fn horizon_rejects_regular_baths_and_coarse_dispersion() {
    let stationary = SimulationConfig { bath: BathSpec::Stationary, ..cat_horizon_config() };
    assert!(horizon_experiment(&stationary).is_err());
    let coarse = SimulationConfig { init: InitialDistribution { d0: 0.1, ..Default::default() }, ..cat_horizon_config() };
    assert!(horizon_experiment(&coarse).is_err());
}

#[test]
fn echoed_config_reproduces_the_run() {
    let cfg = SimulationConfig {
        bath: BathSpec::Markovian { sigma: 0.01 },
        n_spins: 32,
        n_kicks: 12,
        seed: 99,
        ..Default::default()
    };
    let text = ConfigEcho::from(&cfg).to_config_text();
    let back = parse_config(&text).unwrap();
    assert_eq!(back, cfg);
    assert_eq!(run_simulation(&back).unwrap(), run_simulation(&cfg).unwrap());
}

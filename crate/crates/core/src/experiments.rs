//! Derived experiments on top of [`run_simulation`]: population-jump scans
//! and spectral/envelope analysis of population oscillations.

use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64 as C64;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::baths::BathSpec;
use crate::engine::{run_simulation, ObservableSeries, SimulationConfig};
use crate::error::{Error, Result};
use crate::quantum::SpinState;

/// Averaging window of the post-jump population, in kicks (inclusive).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JumpWindow {
    pub start: usize,
    pub end: usize,
}

impl Default for JumpWindow {
    fn default() -> Self {
        JumpWindow { start: 50, end: 100 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct JumpPoint {
    /// `arccos <w|psi0>`.
    pub theta: f64,
    pub amplitude: f64,
}

fn validate_jump(cfg: &SimulationConfig, window: JumpWindow) -> Result<()> {
    cfg.validate()?;
    if !matches!(cfg.bath, BathSpec::Drifting { .. }) {
        return Err(Error::invalid("bath", "jump experiment needs a drifting bath"));
    }
    if cfg.init.d0 < PI {
        return Err(Error::invalid("d0", "jump experiment needs d0 >= pi"));
    }
    if cfg.params.omega_ratio > 0.1 {
        return Err(Error::invalid("omega_ratio", "jump experiment needs omega_ratio <= 0.1"));
    }
    if window.start > window.end || cfg.n_kicks < window.end {
        return Err(Error::invalid(
            "n_kicks",
            format!("jump window {}..={} does not fit the run", window.start, window.end),
        ));
    }
    Ok(())
}

/// Strips the global phase of a state whose amplitudes are real up to one
/// common phase; errors if the relative phase is non-trivial.
fn real_amplitudes(psi: &SpinState) -> Result<[f64; 2]> {
    let rel = psi.up * psi.down.conj();
    if rel.im.abs() > 1e-12 {
        return Err(Error::invalid("psi0", "jump experiment needs real amplitudes"));
    }
    if psi.up.im == 0.0 && psi.down.im == 0.0 {
        return Ok([psi.up.re, psi.down.re]);
    }
    let lead = if psi.up.norm() >= psi.down.norm() { psi.up } else { psi.down };
    let unphase = C64::from_polar(1.0, -lead.arg());
    Ok([(psi.up * unphase).re, (psi.down * unphase).re])
}

/// Population jump for the configured `psi0`: the distance between the mean
/// `p_up` over the window and the initial `p_up`.
pub fn jump_amplitude(cfg: &SimulationConfig, window: JumpWindow) -> Result<JumpPoint> {
    validate_jump(cfg, window)?;
    let psi = real_amplitudes(&cfg.params.psi0)?;
    let w = cfg.params.kick_direction();
    let overlap = (w.up.re * psi[0] + w.down.re * psi[1]).clamp(-1.0, 1.0);

    let series = run_simulation(cfg)?;
    let p = series.p_up();
    let slice = &p[window.start..=window.end];
    let mean = slice.iter().sum::<f64>() / slice.len() as f64;
    Ok(JumpPoint {
        theta: overlap.acos(),
        amplitude: (mean - p[0]).abs(),
    })
}

/// Scans `theta_values` by rotating the initial state away from the kick
/// direction in the real plane: `psi0 = cos(vartheta + theta)|up> +
/// sin(vartheta + theta)|down>`. Every run reuses `cfg.seed`.
pub fn jump_experiment(
    cfg: &SimulationConfig,
    theta_values: &[f64],
    window: JumpWindow,
) -> Result<Vec<JumpPoint>> {
    validate_jump(cfg, window)?;
    theta_values
        .iter()
        .map(|&theta| {
            let mut c = cfg.clone();
            c.params.psi0 = SpinState::from_angle(cfg.params.vartheta + theta);
            jump_amplitude(&c, window)
        })
        .collect()
}

/// `offset + amplitude * sin(frequency * x + phase)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SinusoidFit {
    pub offset: f64,
    pub amplitude: f64,
    pub frequency: f64,
    pub phase: f64,
    pub r_squared: f64,
}

impl SinusoidFit {
    pub fn eval(&self, x: f64) -> f64 {
        self.offset + self.amplitude * (self.frequency * x + self.phase).sin()
    }
}

fn linear_sinusoid(xs: &[f64], ys: &[f64], freq: f64) -> Option<(Vector3<f64>, f64)> {
    let mut ata = Matrix3::zeros();
    let mut aty = Vector3::zeros();
    for (&x, &y) in xs.iter().zip(ys) {
        let row = Vector3::new(1.0, (freq * x).sin(), (freq * x).cos());
        ata += row * row.transpose();
        aty += row * y;
    }
    let coef = ata.lu().solve(&aty)?;
    let sse: f64 = xs
        .iter()
        .zip(ys)
        .map(|(&x, &y)| {
            let f = coef[0] + coef[1] * (freq * x).sin() + coef[2] * (freq * x).cos();
            (y - f).powi(2)
        })
        .sum();
    Some((coef, sse))
}

/// Least-squares sinusoid with free frequency: the linear problem is solved
/// on a frequency grid up to the sampling limit, then refined by golden
/// section around the best grid point.
pub fn sinusoid_fit(xs: &[f64], ys: &[f64]) -> Result<SinusoidFit> {
    if xs.len() != ys.len() {
        return Err(Error::invalid("ys", "x and y lengths differ"));
    }
    if xs.len() < 4 {
        return Err(Error::SeriesTooShort { needed: 4, got: xs.len() });
    }
    let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo;
    if !(span > 0.0) {
        return Err(Error::invalid("xs", "abscissae span no interval"));
    }
    let mean = ys.iter().sum::<f64>() / ys.len() as f64;
    let sst: f64 = ys.iter().map(|y| (y - mean).powi(2)).sum();

    let f_min = 0.25 * PI / span;
    let f_max = PI * (xs.len() - 1) as f64 / span;
    let steps = 2000;
    let sse_at = |f: f64| linear_sinusoid(xs, ys, f).map_or(f64::INFINITY, |(_, s)| s);
    let mut best = (f_min, f64::INFINITY);
    for k in 0..=steps {
        let f = f_min + (f_max - f_min) * k as f64 / steps as f64;
        let s = sse_at(f);
        if s < best.1 {
            best = (f, s);
        }
    }
    let h = (f_max - f_min) / steps as f64;
    let (mut a, mut b) = ((best.0 - h).max(f_min), (best.0 + h).min(f_max));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..60 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if sse_at(c) < sse_at(d) {
            b = d;
        } else {
            a = c;
        }
    }
    let mid = 0.5 * (a + b);
    let freq = if sse_at(mid) < best.1 { mid } else { best.0 };
    let (coef, sse) = linear_sinusoid(xs, ys, freq)
        .ok_or_else(|| Error::invalid("xs", "degenerate sinusoid design"))?;
    let r_squared = if sst > 0.0 { 1.0 - sse / sst } else { 1.0 };
    Ok(SinusoidFit {
        offset: coef[0],
        amplitude: coef[1].hypot(coef[2]),
        frequency: freq,
        phase: coef[2].atan2(coef[1]),
        r_squared,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OscillationOptions {
    /// Apply a Hann window before the transform.
    pub hann_window: bool,
    /// A spectral peak counts only if its power is this many times the
    /// median power.
    pub significance: f64,
    /// The envelope fit stops at the first peak below this fraction of the
    /// largest peak.
    pub envelope_floor: f64,
}

impl Default for OscillationOptions {
    fn default() -> Self {
        OscillationOptions {
            hann_window: false,
            significance: 3.0,
            envelope_floor: 0.3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OscillationReport {
    /// Cycles per kick, in `(0, 0.5]`.
    pub dominant_frequency: Option<f64>,
    /// Exponential decay rate of the envelope, per kick.
    pub damping_rate: Option<f64>,
}

pub const MIN_OSCILLATION_SAMPLES: usize = 64;

/// One-sided power spectrum of the mean-removed signal, bins `0..=N/2`.
pub fn power_spectrum(signal: &[f64], hann_window: bool) -> Vec<f64> {
    let n = signal.len();
    let mean = signal.iter().sum::<f64>() / n as f64;
    let mut buf: Vec<C64> = signal
        .iter()
        .enumerate()
        .map(|(k, &x)| {
            let w = if hann_window {
                0.5 - 0.5 * (2.0 * PI * k as f64 / n as f64).cos()
            } else {
                1.0
            };
            C64::new((x - mean) * w, 0.0)
        })
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    buf[..=n / 2].iter().map(|c| c.norm_sqr()).collect()
}

/// Decay rate from a straight-line fit of the log of the local maxima of
/// `|x - mean|` against time, over the leading part of the envelope.
pub fn envelope_damping(signal: &[f64], floor: f64) -> Option<f64> {
    let mean = signal.iter().sum::<f64>() / signal.len() as f64;
    let dev: Vec<f64> = signal.iter().map(|x| (x - mean).abs()).collect();
    let peaks: Vec<(usize, f64)> = (1..dev.len().saturating_sub(1))
        .filter(|&i| dev[i] > 0.0 && dev[i] >= dev[i - 1] && dev[i] >= dev[i + 1])
        .map(|i| (i, dev[i]))
        .collect();
    let top = peaks.iter().map(|p| p.1).fold(0.0, f64::max);
    let leading: Vec<(usize, f64)> = peaks
        .iter()
        .copied()
        .take_while(|p| p.1 >= floor * top)
        .collect();
    if leading.len() < 3 {
        return None;
    }
    let m = leading.len() as f64;
    let tx = leading.iter().map(|p| p.0 as f64).sum::<f64>() / m;
    let ty = leading.iter().map(|p| p.1.ln()).sum::<f64>() / m;
    let sxy: f64 = leading.iter().map(|p| (p.0 as f64 - tx) * (p.1.ln() - ty)).sum();
    let sxx: f64 = leading.iter().map(|p| (p.0 as f64 - tx).powi(2)).sum();
    (sxx > 0.0).then(|| -sxy / sxx)
}

/// Dominant frequency and damping of the population `p_up(n)`.
pub fn oscillation_analysis(series: &ObservableSeries, opts: &OscillationOptions) -> Result<OscillationReport> {
    let p = series.p_up();
    if p.len() < MIN_OSCILLATION_SAMPLES {
        return Err(Error::SeriesTooShort {
            needed: MIN_OSCILLATION_SAMPLES,
            got: p.len(),
        });
    }
    let power = power_spectrum(&p, opts.hann_window);
    let bins = &power[1..];
    let (k, peak) = bins
        .iter()
        .enumerate()
        .fold((0, 0.0), |acc, (i, &v)| if v > acc.1 { (i + 1, v) } else { acc });
    let mut sorted = bins.to_vec();
    sorted.sort_by(f64::total_cmp);
    let median = sorted[sorted.len() / 2];
    if !(peak > 0.0 && peak >= opts.significance * median) {
        return Ok(OscillationReport {
            dominant_frequency: None,
            damping_rate: None,
        });
    }
    Ok(OscillationReport {
        dominant_frequency: Some(k as f64 / p.len() as f64),
        damping_rate: envelope_damping(&p, opts.envelope_floor),
    })
}

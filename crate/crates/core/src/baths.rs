//! Classical kick baths: flows on the torus `[0, 2pi)^2` of kick strength and
//! angular delay, initial kick distributions, and the eigen-frame of
//! hyperbolic toral automorphisms.

use std::f64::consts::TAU;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};

/// Random stream used for one spin's kick train.
pub type SpinRng = ChaCha8Rng;

/// Substream `index` of the generator keyed by `seed`. Streams are disjoint,
/// so per-spin draws do not depend on how spins are scheduled.
pub fn spin_rng(seed: u64, index: u64) -> SpinRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Seed for the `index`-th independent run derived from a master seed.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    // stream numbers counted down from the top so they never collide with
    // the per-spin streams of the same master seed
    spin_rng(master, u64::MAX - index).next_u64()
}

/// Reduces an angle into `[0, 2pi)`. An input that rounds to `2pi` maps to 0.
pub fn wrap_angle(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Kick strength and angular delay, both taken modulo `2pi`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KickPoint {
    pub lam: f64,
    pub phi: f64,
}

impl KickPoint {
    pub fn new(lam: f64, phi: f64) -> Self {
        KickPoint {
            lam: wrap_angle(lam),
            phi: wrap_angle(phi),
        }
    }
}

/// One of the five kick-train flows.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BathSpec {
    Stationary,
    /// Translation by `(2pi/a, 2pi b/a)`.
    Drifting { a: f64, b: f64 },
    /// Fresh uniform draw on the torus at every kick.
    Microcanonical,
    /// Wrapped Gaussian random walk with per-coordinate step variance `sigma`.
    Markovian { sigma: f64 },
    /// The map with rows `(1, 1)` and `(x, x + sign)`, reduced mod `2pi`.
    ToralAutomorphism { x: f64, sign: i8 },
}

impl BathSpec {
    pub const DRIFT_A: f64 = 1.618_033_988_749_895;
    pub const DRIFT_B: f64 = std::f64::consts::SQRT_2;

    /// Drifting bath with the golden ratio and `sqrt(2)` as defaults.
    pub fn drifting() -> Self {
        BathSpec::Drifting {
            a: Self::DRIFT_A,
            b: Self::DRIFT_B,
        }
    }

    /// Arnold's cat map.
    pub fn cat() -> Self {
        BathSpec::ToralAutomorphism { x: 1.0, sign: 1 }
    }

    pub fn name(&self) -> &'static str {
        match self {
            BathSpec::Stationary => "stationary",
            BathSpec::Drifting { .. } => "drifting",
            BathSpec::Microcanonical => "microcanonical",
            BathSpec::Markovian { .. } => "markovian",
            BathSpec::ToralAutomorphism { .. } => "toral",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            BathSpec::Drifting { a, b } => {
                if !(a.is_finite() && a != 0.0) {
                    return Err(Error::invalid("drift_a", "must be finite and non-zero"));
                }
                if !b.is_finite() {
                    return Err(Error::invalid("drift_b", "must be finite"));
                }
            }
            BathSpec::Markovian { sigma } => {
                if !(sigma.is_finite() && sigma > 0.0) {
                    return Err(Error::invalid("sigma", "must be positive and finite"));
                }
            }
            BathSpec::ToralAutomorphism { x, sign } => {
                if !(x.is_finite() && x != 0.0) {
                    return Err(Error::invalid("x", "must be finite and non-zero"));
                }
                if sign != 1 && sign != -1 {
                    return Err(Error::invalid("sign", "must be +1 or -1"));
                }
            }
            BathSpec::Stationary | BathSpec::Microcanonical => {}
        }
        Ok(())
    }

    /// Matrix of a toral automorphism bath, row-major.
    pub fn automorphism_matrix(&self) -> Option<[[f64; 2]; 2]> {
        match *self {
            BathSpec::ToralAutomorphism { x, sign } => {
                Some([[1.0, 1.0], [x, x + f64::from(sign)]])
            }
            _ => None,
        }
    }
}

/// Advances one kick point by the bath flow.
pub fn flow_step<R: Rng + ?Sized>(bath: &BathSpec, p: KickPoint, rng: &mut R) -> KickPoint {
    match *bath {
        BathSpec::Stationary => p,
        BathSpec::Drifting { a, b } => KickPoint::new(p.lam + TAU / a, p.phi + TAU * b / a),
        BathSpec::Microcanonical => {
            let lam = rng.random::<f64>() * TAU;
            let phi = rng.random::<f64>() * TAU;
            KickPoint::new(lam, phi)
        }
        BathSpec::Markovian { sigma } => {
            let step = Normal::new(0.0, sigma.sqrt()).expect("sigma validated positive");
            let dl = step.sample(rng);
            let dp = step.sample(rng);
            KickPoint::new(p.lam + dl, p.phi + dp)
        }
        BathSpec::ToralAutomorphism { x, sign } => {
            let s = f64::from(sign);
            KickPoint::new(p.lam + p.phi, x * p.lam + (x + s) * p.phi)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Alignment {
    /// Uniform in `[lam*, lam* + d0] x [phi*, phi* + d0]`.
    AxisAligned,
    /// Uniform in the parallelogram spanned by `d0 e+` and `d0 e-`.
    EigenAligned,
}

/// Distribution of the first kick of every train.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InitialDistribution {
    pub lambda_star: f64,
    pub phi_star: f64,
    pub d0: f64,
    pub alignment: Alignment,
}

impl Default for InitialDistribution {
    fn default() -> Self {
        InitialDistribution {
            lambda_star: 1.0,
            phi_star: 1.0,
            d0: 1e-3,
            alignment: Alignment::AxisAligned,
        }
    }
}

impl InitialDistribution {
    pub fn validate(&self, bath: &BathSpec) -> Result<()> {
        if !(self.lambda_star.is_finite() && self.phi_star.is_finite()) {
            return Err(Error::invalid("lambda_star", "base point must be finite"));
        }
        if !(0.0..=TAU).contains(&self.d0) {
            return Err(Error::invalid("d0", format!("{} is outside [0, 2pi]", self.d0)));
        }
        if self.alignment == Alignment::EigenAligned
            && !matches!(bath, BathSpec::ToralAutomorphism { .. })
        {
            return Err(Error::EigenAlignedWithoutAutomorphism);
        }
        Ok(())
    }
}

/// Draws one initial kick point. Both alignments consume exactly two uniform
/// variates from `rng`.
pub fn sample_initial_point<R: Rng + ?Sized>(
    dist: &InitialDistribution,
    frame: Option<&EigenFrame>,
    rng: &mut R,
) -> KickPoint {
    let u: f64 = rng.random();
    let v: f64 = rng.random();
    let d = dist.d0;
    match (dist.alignment, frame) {
        (Alignment::EigenAligned, Some(f)) => KickPoint::new(
            dist.lambda_star + d * (u * f.e_plus[0] + v * f.e_minus[0]),
            dist.phi_star + d * (u * f.e_plus[1] + v * f.e_minus[1]),
        ),
        _ => KickPoint::new(dist.lambda_star + u * d, dist.phi_star + v * d),
    }
}

/// Draws `n_spins` initial kicks, spin `i` using substream `i` of `seed`.
pub fn sample_initial(
    dist: &InitialDistribution,
    bath: &BathSpec,
    n_spins: usize,
    seed: u64,
) -> Result<Vec<KickPoint>> {
    if n_spins == 0 {
        return Err(Error::invalid("n_spins", "must be at least 1"));
    }
    dist.validate(bath)?;
    let frame = match dist.alignment {
        Alignment::EigenAligned => Some(eigen_frame(bath)?),
        Alignment::AxisAligned => None,
    };
    Ok((0..n_spins)
        .map(|i| sample_initial_point(dist, frame.as_ref(), &mut spin_rng(seed, i as u64)))
        .collect())
}

/// Eigen-decomposition of a hyperbolic toral automorphism.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenFrame {
    /// Expanding eigenvalue, `|lambda_plus| > 1`.
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    /// Unit unstable direction, oriented with a non-negative delay component.
    pub e_plus: [f64; 2],
    pub e_minus: [f64; 2],
    /// Angle between `e_plus` and the strength axis, in `(0, pi)`.
    pub gamma: f64,
    /// `ln |lambda_plus|`.
    pub lyapunov: f64,
}

impl EigenFrame {
    pub fn determinant(&self) -> f64 {
        self.lambda_plus * self.lambda_minus
    }
}

fn unit_eigenvector(eigenvalue: f64) -> [f64; 2] {
    // first row (1, 1) gives v_phi = (eigenvalue - 1) v_lam
    let (a, b) = (1.0f64, eigenvalue - 1.0);
    let n = a.hypot(b);
    if b < 0.0 {
        [-a / n, -b / n]
    } else {
        [a / n, b / n]
    }
}

/// Eigenvalues, eigenvectors and Lyapunov exponent of an automorphism bath.
pub fn eigen_frame(bath: &BathSpec) -> Result<EigenFrame> {
    let m = bath.automorphism_matrix().ok_or_else(|| {
        Error::invalid("bath", format!("{} bath has no eigen-frame", bath.name()))
    })?;
    bath.validate()?;
    let trace = m[0][0] + m[1][1];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let disc = trace * trace - 4.0 * det;
    if !(disc > 0.0) {
        return Err(Error::NotHyperbolic { trace, det });
    }
    let root = disc.sqrt();
    let (hi, lo) = ((trace + root) / 2.0, (trace - root) / 2.0);
    let (lambda_plus, lambda_minus) = if hi.abs() >= lo.abs() { (hi, lo) } else { (lo, hi) };
    if lambda_plus.abs() <= 1.0 + 1e-12 {
        return Err(Error::NotHyperbolic { trace, det });
    }
    let e_plus = unit_eigenvector(lambda_plus);
    let e_minus = unit_eigenvector(lambda_minus);
    let gamma = e_plus[1].atan2(e_plus[0]);
    Ok(EigenFrame {
        lambda_plus,
        lambda_minus,
        e_plus,
        e_minus,
        gamma,
        lyapunov: lambda_plus.abs().ln(),
    })
}

/// Separation `sqrt(lambda_plus^{2n} + lambda_minus^{2n}) d0` of the corners
/// of an eigen-aligned square after `n` iterations (unwrapped).
pub fn dispersion_growth(frame: &EigenFrame, d0: f64, n: u32) -> f64 {
    let n = n as i32;
    (frame.lambda_plus.powi(2 * n) + frame.lambda_minus.powi(2 * n)).sqrt() * d0
}

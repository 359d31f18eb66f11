//! Two-level kicked spin: monodromy operator, stroboscopic propagation and
//! ensemble density matrix.
//!
//! Basis ordering is `(|up>, |down>)`. The free Hamiltonian only acts on the
//! down component, so in units of the kick frequency it contributes the phase
//! `(r / 2) * angle` to `|down>` for a reduced-time interval `angle`, where
//! `r` is the frequency ratio `omega_1 / omega_0`.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64 as C64;

use crate::baths::KickPoint;
use crate::error::{Error, Result};

const NORM_TOL: f64 = 1e-9;

/// Pure state of a single spin.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpinState {
    pub up: C64,
    pub down: C64,
}

impl SpinState {
    pub const UP: SpinState = SpinState {
        up: C64 { re: 1.0, im: 0.0 },
        down: C64 { re: 0.0, im: 0.0 },
    };
    pub const DOWN: SpinState = SpinState {
        up: C64 { re: 0.0, im: 0.0 },
        down: C64 { re: 1.0, im: 0.0 },
    };

    /// Builds a state, rejecting amplitudes that are not normalized to 1e-9.
    pub fn new(up: C64, down: C64) -> Result<Self> {
        let s = SpinState { up, down };
        let n = s.norm_sqr();
        if !n.is_finite() || (n - 1.0).abs() > NORM_TOL {
            return Err(Error::invalid(
                "psi0",
                format!("state norm squared is {n}, expected 1"),
            ));
        }
        Ok(s)
    }

    /// Builds a state from arbitrary non-zero amplitudes by normalizing them.
    pub fn normalized(up: C64, down: C64) -> Result<Self> {
        let n = (up.norm_sqr() + down.norm_sqr()).sqrt();
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::invalid("psi0", "state amplitudes are zero or not finite"));
        }
        Ok(SpinState {
            up: up / n,
            down: down / n,
        })
    }

    /// Real state `cos(angle)|up> + sin(angle)|down>`.
    pub fn from_angle(angle: f64) -> Self {
        SpinState {
            up: C64::new(angle.cos(), 0.0),
            down: C64::new(angle.sin(), 0.0),
        }
    }

    /// The balanced cat state `(|up> + |down>) / sqrt(2)`.
    pub fn balanced() -> Self {
        Self::from_angle(PI / 4.0)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.up.norm_sqr() + self.down.norm_sqr()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &SpinState) -> C64 {
        self.up.conj() * other.up + self.down.conj() * other.down
    }

    /// Applies `u` and renormalizes to absorb rounding drift.
    pub fn evolve(&self, u: &Unitary2) -> SpinState {
        let m = &u.0;
        let up = m[0][0] * self.up + m[0][1] * self.down;
        let down = m[1][0] * self.up + m[1][1] * self.down;
        let n = (up.norm_sqr() + down.norm_sqr()).sqrt();
        SpinState {
            up: up / n,
            down: down / n,
        }
    }

    pub fn with_global_phase(&self, phase: f64) -> SpinState {
        let f = C64::from_polar(1.0, phase);
        SpinState {
            up: self.up * f,
            down: self.down * f,
        }
    }
}

/// Free-function form of [`SpinState::evolve`].
pub fn evolve_spin(state: &SpinState, u: &Unitary2) -> SpinState {
    state.evolve(u)
}

/// Physical parameters shared by every spin of the ensemble.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SystemParams {
    /// `omega_1 / omega_0`.
    pub omega_ratio: f64,
    /// Kick direction angle in `[0, pi/2]`.
    pub vartheta: f64,
    pub psi0: SpinState,
}

impl SystemParams {
    pub fn new(omega_ratio: f64, vartheta: f64, psi0: SpinState) -> Result<Self> {
        let p = SystemParams {
            omega_ratio,
            vartheta,
            psi0,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega_ratio.is_finite() && self.omega_ratio > 0.0) {
            return Err(Error::invalid("omega_ratio", "must be positive and finite"));
        }
        check_vartheta(self.vartheta)?;
        SpinState::new(self.psi0.up, self.psi0.down)?;
        Ok(())
    }

    pub fn kick_direction(&self) -> SpinState {
        SpinState::from_angle(self.vartheta)
    }
}

impl Default for SystemParams {
    fn default() -> Self {
        SystemParams {
            omega_ratio: 10.0,
            vartheta: PI / 4.0,
            psi0: SpinState::balanced(),
        }
    }
}

fn check_vartheta(vartheta: f64) -> Result<()> {
    if !(0.0..=FRAC_PI_2).contains(&vartheta) {
        return Err(Error::invalid(
            "vartheta",
            format!("{vartheta} is outside [0, pi/2]"),
        ));
    }
    Ok(())
}

/// Kick direction `|w> = cos(vartheta)|up> + sin(vartheta)|down>`.
pub fn kick_direction(vartheta: f64) -> Result<SpinState> {
    check_vartheta(vartheta)?;
    Ok(SpinState::from_angle(vartheta))
}

/// A 2x2 complex matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Unitary2(pub [[C64; 2]; 2]);

impl Unitary2 {
    pub fn identity() -> Self {
        let o = C64::new(1.0, 0.0);
        let z = C64::new(0.0, 0.0);
        Unitary2([[o, z], [z, o]])
    }

    pub fn diag(a: C64, b: C64) -> Self {
        let z = C64::new(0.0, 0.0);
        Unitary2([[a, z], [z, b]])
    }

    pub fn mul(&self, rhs: &Unitary2) -> Unitary2 {
        let a = &self.0;
        let b = &rhs.0;
        let mut out = [[C64::new(0.0, 0.0); 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Unitary2(out)
    }

    pub fn adjoint(&self) -> Unitary2 {
        let m = &self.0;
        Unitary2([
            [m[0][0].conj(), m[1][0].conj()],
            [m[0][1].conj(), m[1][1].conj()],
        ])
    }

    /// Largest entrywise deviation of `U^dagger U` from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        let p = self.adjoint().mul(self);
        let id = Unitary2::identity();
        let mut worst = 0.0f64;
        for i in 0..2 {
            for j in 0..2 {
                worst = worst.max((p.0[i][j] - id.0[i][j]).norm());
            }
        }
        worst
    }
}

/// One-period evolution operator for the kick `(lam, phi)`:
/// free evolution over `2pi - phi`, times the kick `1 + (e^{-i lam} - 1) W`,
/// times free evolution over `phi`.
pub fn monodromy(kick: KickPoint, params: &SystemParams) -> Unitary2 {
    let half_r = 0.5 * params.omega_ratio;
    let one = C64::new(1.0, 0.0);
    let before = Unitary2::diag(one, C64::from_polar(1.0, -half_r * kick.phi));
    let after = Unitary2::diag(
        one,
        C64::from_polar(1.0, -half_r * (2.0 * PI - kick.phi)),
    );

    let (s, c) = params.vartheta.sin_cos();
    let k = C64::from_polar(1.0, -kick.lam) - one;
    let w = [[c * c, c * s], [s * c, s * s]];
    let mut kick_op = Unitary2::identity();
    for (i, row) in kick_op.0.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell += k * w[i][j];
        }
    }
    after.mul(&kick_op).mul(&before)
}

/// Ensemble density matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityMatrix2(pub [[C64; 2]; 2]);

impl DensityMatrix2 {
    pub fn pure(state: &SpinState) -> Self {
        let a = state.up;
        let b = state.down;
        DensityMatrix2([[a * a.conj(), a * b.conj()], [b * a.conj(), b * b.conj()]])
    }

    /// Builds `[[p_up, off], [conj(off), 1 - p_up]]`.
    pub fn from_parts(p_up: f64, off_diagonal: C64) -> Self {
        DensityMatrix2([
            [C64::new(p_up, 0.0), off_diagonal],
            [off_diagonal.conj(), C64::new(1.0 - p_up, 0.0)],
        ])
    }

    pub fn trace(&self) -> C64 {
        self.0[0][0] + self.0[1][1]
    }

    /// Eigenvalues in descending order (closed form for 2x2 Hermitian).
    pub fn eigenvalues(&self) -> [f64; 2] {
        let a = self.0[0][0].re;
        let d = self.0[1][1].re;
        let b = self.0[0][1];
        let mean = 0.5 * (a + d);
        let half_gap = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
        [mean + half_gap, mean - half_gap]
    }

    pub fn hermiticity_defect(&self) -> f64 {
        let m = &self.0;
        let diag = m[0][0].im.abs().max(m[1][1].im.abs());
        diag.max((m[0][1] - m[1][0].conj()).norm())
    }

    /// Checks Hermiticity, unit trace and positivity at the stated tolerances.
    pub fn is_valid(&self) -> bool {
        let ev = self.eigenvalues();
        self.hermiticity_defect() <= 1e-12
            && (self.trace() - C64::new(1.0, 0.0)).norm() <= 1e-12
            && ev[1] >= -1e-10
    }
}

/// Average of the rank-one projectors of `states`, summed in index order.
pub fn ensemble_density(states: &[SpinState]) -> Result<DensityMatrix2> {
    if states.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    let mut uu = 0.0;
    let mut dd = 0.0;
    let mut ud = C64::new(0.0, 0.0);
    for s in states {
        uu += s.up.norm_sqr();
        dd += s.down.norm_sqr();
        ud += s.up * s.down.conj();
    }
    let n = states.len() as f64;
    let (uu, dd, ud) = (uu / n, dd / n, ud / n);
    Ok(DensityMatrix2([
        [C64::new(uu, 0.0), ud],
        [ud.conj(), C64::new(dd, 0.0)],
    ]))
}

/// `|<up| rho |down>|`.
pub fn coherence(rho: &DensityMatrix2) -> f64 {
    rho.0[0][1].norm()
}

/// `(p_up, p_down)`.
pub fn population(rho: &DensityMatrix2) -> (f64, f64) {
    (rho.0[0][0].re, rho.0[1][1].re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn close(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    fn params(r: f64, vartheta: f64) -> SystemParams {
        SystemParams::new(r, vartheta, SpinState::balanced()).unwrap()
    }

    #[test]
    fn kick_direction_cases() {
        let s = kick_direction(0.0).unwrap();
        assert_eq!(s, SpinState::UP);
        let s = kick_direction(FRAC_PI_2).unwrap();
        assert_abs_diff_eq!(s.up.re, 0.0, epsilon = 1e-16);
        assert_abs_diff_eq!(s.down.re, 1.0);
        let s = kick_direction(PI / 4.0).unwrap();
        assert_abs_diff_eq!(s.up.re, FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(s.down.re, FRAC_1_SQRT_2, epsilon = 1e-15);
        assert!(kick_direction(-0.1).is_err());
        assert!(kick_direction(2.0).is_err());
    }

    #[test]
    fn zero_strength_kick_is_pure_free_evolution() {
        for &phi in &[0.0, 1.3, 5.9] {
            for &vt in &[0.0, 0.4, FRAC_PI_2] {
                let u = monodromy(KickPoint::new(0.0, phi), &params(3.7, vt));
                let want = Unitary2::diag(C64::new(1.0, 0.0), C64::from_polar(1.0, -PI * 3.7));
                for i in 0..2 {
                    for j in 0..2 {
                        assert!(close(u.0[i][j], want.0[i][j], 1e-12));
                    }
                }
            }
        }
    }

    #[test]
    fn eigenvector_kick_direction_gives_diagonal_monodromy() {
        let r = 10.0;
        let u = monodromy(KickPoint::new(2.1, 0.7), &params(r, 0.0));
        assert!(close(u.0[0][0], C64::from_polar(1.0, -2.1), 1e-12));
        assert!(close(u.0[1][1], C64::from_polar(1.0, -PI * r), 1e-12));
        assert!(u.0[0][1].norm() < 1e-15);
        assert!(u.0[1][0].norm() < 1e-15);
    }

    #[test]
    fn monodromy_unitary_on_many_random_draws() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10_000 {
            let p = params(rng.random_range(0.01..50.0), rng.random_range(0.0..FRAC_PI_2));
            let k = KickPoint::new(rng.random_range(0.0..2.0 * PI), rng.random_range(0.0..2.0 * PI));
            // independent check: explicit U^dagger U product, entry by entry
            let u = monodromy(k, &p).0;
            for i in 0..2 {
                for j in 0..2 {
                    let mut acc = C64::new(0.0, 0.0);
                    for row in &u {
                        acc += row[i].conj() * row[j];
                    }
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((acc - C64::new(want, 0.0)).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn diagonal_evolution_keeps_population() {
        let lam = 0.9;
        let r = 2.5;
        let u = Unitary2::diag(C64::from_polar(1.0, -lam), C64::from_polar(1.0, -PI * r));
        let s = SpinState::UP.evolve(&u);
        assert!(close(s.up, C64::from_polar(1.0, -lam), 1e-15));
        assert_eq!(s.down, C64::new(0.0, 0.0));
        let s = SpinState::balanced();
        assert_eq!(s.evolve(&Unitary2::identity()), s);
    }

    #[test]
    fn density_examples() {
        let rho = ensemble_density(&[SpinState::balanced(); 8]).unwrap();
        for row in &rho.0 {
            for v in row {
                assert!(close(*v, C64::new(0.5, 0.0), 1e-15));
            }
        }
        assert_abs_diff_eq!(coherence(&rho), 0.5, epsilon = 1e-15);

        let mixed = ensemble_density(&[SpinState::UP, SpinState::DOWN, SpinState::UP, SpinState::DOWN]).unwrap();
        assert_eq!(coherence(&mixed), 0.0);
        assert_eq!(population(&mixed), (0.5, 0.5));

        assert!(matches!(ensemble_density(&[]), Err(Error::EmptyEnsemble)));
    }

    #[test]
    fn coherence_and_population_examples() {
        let rho = DensityMatrix2::from_parts(0.5, C64::from_polar(0.3, PI / 3.0));
        assert_abs_diff_eq!(coherence(&rho), 0.3, epsilon = 1e-15);
        let rho = DensityMatrix2::from_parts(1.0, C64::new(0.0, 0.0));
        assert_eq!(population(&rho), (1.0, 0.0));
        let psi = SpinState::new(C64::new(0.6, 0.0), C64::new(0.0, 0.8)).unwrap();
        let (pu, pd) = population(&DensityMatrix2::pure(&psi));
        assert_abs_diff_eq!(pu, 0.36, epsilon = 1e-15);
        assert_abs_diff_eq!(pd, 0.64, epsilon = 1e-15);
    }

    #[test]
    fn rejects_bad_params() {
        assert!(SystemParams::new(0.0, 0.3, SpinState::balanced()).is_err());
        assert!(SystemParams::new(1.0, 1.7, SpinState::balanced()).is_err());
        assert!(SpinState::new(C64::new(1.0, 0.0), C64::new(1.0, 0.0)).is_err());
    }

    fn arb_state() -> impl Strategy<Value = SpinState> {
        (0.0..PI, -PI..PI, -PI..PI).prop_map(|(t, a, b)| SpinState {
            up: C64::from_polar((t / 2.0).cos(), a),
            down: C64::from_polar((t / 2.0).sin(), b),
        })
    }

    fn arb_kick() -> impl Strategy<Value = KickPoint> {
        (0.0..2.0 * PI, 0.0..2.0 * PI).prop_map(|(l, p)| KickPoint::new(l, p))
    }

    proptest! {
        #[test]
        fn evolution_preserves_norm(s in arb_state(), k in arb_kick(), r in 0.01..40.0f64, vt in 0.0..FRAC_PI_2) {
            let u = monodromy(k, &params(r, vt));
            prop_assert!((s.evolve(&u).norm_sqr() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn monodromy_periodic_in_strength(k in arb_kick(), r in 0.01..40.0f64, vt in 0.0..FRAC_PI_2) {
            let p = params(r, vt);
            let a = monodromy(k, &p);
            let b = monodromy(KickPoint { lam: k.lam + 2.0 * PI, phi: k.phi }, &p);
            for i in 0..2 {
                for j in 0..2 {
                    prop_assert!((a.0[i][j] - b.0[i][j]).norm() < 1e-12);
                }
            }
        }

        #[test]
        fn eigen_directions_dephase_only(s in arb_state(), k in arb_kick(), r in 0.01..40.0f64, down in any::<bool>()) {
            let vt = if down { FRAC_PI_2 } else { 0.0 };
            let out = s.evolve(&monodromy(k, &params(r, vt)));
            prop_assert!((out.up.norm_sqr() - s.up.norm_sqr()).abs() < 1e-12);
        }

        #[test]
        fn ensemble_density_is_valid(states in prop::collection::vec(arb_state(), 1..40)) {
            let rho = ensemble_density(&states).unwrap();
            prop_assert!(rho.is_valid());
            let (pu, pd) = population(&rho);
            prop_assert!((pu + pd - 1.0).abs() < 1e-12);
            prop_assert!(coherence(&rho) <= (pu * pd).sqrt() + 1e-12);
            prop_assert!(coherence(&rho) <= 0.5 + 1e-12);
        }
    }
}

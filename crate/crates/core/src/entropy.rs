//! Disorder accounting for the spin ensemble and the kick bath, and the
//! Lyapunov-based horizons derived from it.

use std::f64::consts::{LN_2, PI, TAU};

use serde::Serialize;

use crate::baths::{EigenFrame, KickPoint};
use crate::error::{Error, Result};
use crate::quantum::DensityMatrix2;

/// Entropy cap shared by the spin ensemble and a 1024-train kick bath.
pub const S_MAX: f64 = 10.0 * LN_2;

/// Scale factor on the von Neumann entropy, chosen so that its supremum for a
/// qubit equals the Shannon supremum of 1024 trains.
pub const VN_SCALE: f64 = 10.0;

const EIGEN_FLOOR: f64 = 1e-15;

/// Equipartition of the torus into square microstates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MicrostateGrid {
    pub cells_per_axis: usize,
    pub cell_size: f64,
}

impl Default for MicrostateGrid {
    /// 128 x 128 cells of side `pi/64`.
    fn default() -> Self {
        MicrostateGrid {
            cells_per_axis: 128,
            cell_size: PI / 64.0,
        }
    }
}

impl MicrostateGrid {
    pub fn new(cells_per_axis: usize) -> Result<Self> {
        if cells_per_axis == 0 {
            return Err(Error::invalid("cells_per_axis", "must be at least 1"));
        }
        Ok(MicrostateGrid {
            cells_per_axis,
            cell_size: TAU / cells_per_axis as f64,
        })
    }

    fn axis_index(&self, x: f64) -> usize {
        let i = (x / self.cell_size).floor();
        if i < 0.0 {
            0
        } else {
            (i as usize).min(self.cells_per_axis - 1)
        }
    }

    /// Flat cell index of a point: half-open cells, clamped to the grid.
    pub fn cell_of(&self, p: &KickPoint) -> usize {
        self.axis_index(p.lam) * self.cells_per_axis + self.axis_index(p.phi)
    }

    pub fn cell_count(&self) -> usize {
        self.cells_per_axis * self.cells_per_axis
    }
}

/// Predicted horizons of a chaotic kick bath.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HorizonReport {
    pub lambda_plus: f64,
    pub lyapunov: f64,
    pub sin_gamma: f64,
    /// Horizon of predictability, in kicks.
    pub n_box: f64,
    /// Horizon of coherence, in kicks.
    pub n_star: f64,
    pub s_max: f64,
}

impl HorizonReport {
    pub fn new(frame: &EigenFrame, d0: f64, grid: &MicrostateGrid, s_max: f64) -> Result<Self> {
        let n_box = predictability_horizon(frame, d0, grid)?;
        let n_star = coherence_horizon(n_box, frame.lyapunov, s_max)?;
        Ok(HorizonReport {
            lambda_plus: frame.lambda_plus,
            lyapunov: frame.lyapunov,
            sin_gamma: frame.gamma.sin(),
            n_box,
            n_star,
            s_max,
        })
    }
}

/// `-10 tr(rho ln rho)` from the closed-form eigenvalues.
pub fn von_neumann_entropy(rho: &DensityMatrix2) -> f64 {
    let s: f64 = rho
        .eigenvalues()
        .iter()
        .map(|&p| p.clamp(0.0, 1.0))
        .filter(|&p| p >= EIGEN_FLOOR)
        .map(|p| p * p.ln())
        .sum();
    // -0.0 for pure states
    (-VN_SCALE * s).max(0.0)
}

/// Occupation count of every non-empty cell, in ascending cell order.
pub fn occupied_cells(points: &[KickPoint], grid: &MicrostateGrid) -> Vec<(usize, usize)> {
    let mut cells: Vec<usize> = points.iter().map(|p| grid.cell_of(p)).collect();
    cells.sort_unstable();
    let mut out: Vec<(usize, usize)> = Vec::new();
    for c in cells {
        match out.last_mut() {
            Some((last, n)) if *last == c => *n += 1,
            _ => out.push((c, 1)),
        }
    }
    out
}

/// Shannon entropy (nats) of the fraction of trains in each microstate.
pub fn shannon_entropy(points: &[KickPoint], grid: &MicrostateGrid) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::EmptySeries);
    }
    let n = points.len() as f64;
    // -sum (c/N) ln(c/N) = ln N - (1/N) sum c ln c; exact for singly occupied cells
    let weighted: f64 = occupied_cells(points, grid)
        .into_iter()
        .filter(|&(_, c)| c > 1)
        .map(|(_, c)| {
            let c = c as f64;
            c * c.ln()
        })
        .sum();
    Ok((n.ln() - weighted / n).max(0.0))
}

/// Iteration at which the unstable-axis spread `d0 / sin(gamma)` reaches one
/// microstate length, clamped below at zero.
pub fn predictability_horizon(frame: &EigenFrame, d0: f64, grid: &MicrostateGrid) -> Result<f64> {
    if !(d0.is_finite() && d0 > 0.0) {
        return Err(Error::invalid("d0", "must be positive for a predictability horizon"));
    }
    let spread = d0 / frame.gamma.sin().abs();
    let n = (grid.cell_size.ln() - spread.ln()) / frame.lyapunov;
    Ok(n.max(0.0))
}

/// Kolmogorov-Sinai estimate of the kick-bath entropy at iteration `n`:
/// zero up to `n_box`, then growing at rate `lyapunov`, capped at [`S_MAX`].
pub fn ks_prediction(n: f64, n_box: f64, lyapunov: f64) -> f64 {
    if n <= n_box {
        0.0
    } else {
        ((n - n_box) * lyapunov).min(S_MAX)
    }
}

/// Iteration at which the cumulated kick-bath entropy, growing as predicted
/// by [`ks_prediction`] without cap, reaches `s_max`.
pub fn coherence_horizon(n_box: f64, lyapunov: f64, s_max: f64) -> Result<f64> {
    if !(lyapunov.is_finite() && lyapunov > 0.0) {
        return Err(Error::invalid("lyapunov", "must be positive"));
    }
    if !(s_max >= 0.0) {
        return Err(Error::invalid("s_max", "must be non-negative"));
    }
    Ok(n_box + 0.5 * (1.0 + 8.0 * s_max / lyapunov).sqrt() - 0.5)
}

pub fn cumulative_shannon(series: &[f64]) -> Vec<f64> {
    series
        .iter()
        .scan(0.0, |acc, &s| {
            *acc += s;
            Some(*acc)
        })
        .collect()
}

/// First index where the series drops below `threshold_fraction` times its
/// initial value.
pub fn empirical_horizon(coherence_series: &[f64], threshold_fraction: f64) -> Result<Option<usize>> {
    let first = *coherence_series.first().ok_or(Error::EmptySeries)?;
    if !(threshold_fraction > 0.0 && threshold_fraction < 1.0) {
        return Err(Error::invalid("threshold_fraction", "must lie in (0, 1)"));
    }
    let threshold = threshold_fraction * first;
    Ok(coherence_series.iter().position(|&c| c < threshold))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baths::{eigen_frame, BathSpec};
    use crate::quantum::{DensityMatrix2, SpinState};
    use approx::assert_abs_diff_eq;
    use nalgebra::{Complex, Matrix2};
    use num_complex::Complex64 as C64;
    use proptest::prelude::*;

    fn cat() -> EigenFrame {
        eigen_frame(&BathSpec::cat()).unwrap()
    }

    /// `-10 tr(rho log rho)` with the logarithm built from a numerical
    /// Hermitian eigendecomposition: `log rho = V diag(ln p) V^dagger`.
    fn vn_matrix_log(rho: &DensityMatrix2) -> f64 {
        let m = Matrix2::from_fn(|i, j| Complex::new(rho.0[i][j].re, rho.0[i][j].im));
        let eig = m.symmetric_eigen();
        let logs = eig.eigenvalues.map(|p| if p > 1e-15 { p.ln() } else { 0.0 });
        let v = eig.eigenvectors;
        let log_rho = v * Matrix2::from_diagonal(&logs.map(|l| Complex::new(l, 0.0))) * v.adjoint();
        -10.0 * (m * log_rho).trace().re
    }

    #[test]
    fn von_neumann_examples() {
        let mixed = DensityMatrix2::from_parts(0.5, C64::new(0.0, 0.0));
        assert_eq!(von_neumann_entropy(&mixed), 10.0 * LN_2);
        let pure = DensityMatrix2::pure(&SpinState::balanced());
        assert_abs_diff_eq!(von_neumann_entropy(&pure), 0.0, epsilon = 1e-12);
        let q = DensityMatrix2::from_parts(0.75, C64::new(0.0, 0.0));
        let expected = -10.0 * (0.75 * 0.75f64.ln() + 0.25 * 0.25f64.ln());
        assert_abs_diff_eq!(von_neumann_entropy(&q), expected, epsilon = 1e-12);
        assert_abs_diff_eq!(expected, 5.6233, epsilon = 1e-4);
    }

    fn pts(cells: &[(usize, usize)]) -> Vec<KickPoint> {
        let d = PI / 64.0;
        cells
            .iter()
            .map(|&(i, j)| KickPoint::new((i as f64 + 0.5) * d, (j as f64 + 0.5) * d))
            .collect()
    }

    #[test]
    fn shannon_examples() {
        let g = MicrostateGrid::default();
        assert_eq!(shannon_entropy(&pts(&vec![(3, 4); 100]), &g).unwrap(), 0.0);

        let distinct: Vec<(usize, usize)> = (0..1024).map(|k| (k % 128, k / 128)).collect();
        assert_eq!(shannon_entropy(&pts(&distinct), &g).unwrap(), (1024f64).ln());
        assert_abs_diff_eq!(shannon_entropy(&pts(&distinct), &g).unwrap(), S_MAX, epsilon = 1e-12);

        let mut halves = vec![(0, 0); 512];
        halves.extend(vec![(127, 127); 512]);
        assert_abs_diff_eq!(shannon_entropy(&pts(&halves), &g).unwrap(), LN_2, epsilon = 1e-12);
        assert!(shannon_entropy(&[], &g).is_err());
    }

    #[test]
    fn grid_boundaries() {
        let g = MicrostateGrid::default();
        assert_eq!(g.cell_size * g.cells_per_axis as f64, TAU);
        assert_eq!(g.cell_of(&KickPoint { lam: 0.0, phi: 0.0 }), 0);
        assert_eq!(g.cell_of(&KickPoint::new(TAU, 0.0)), 0);
        assert_eq!(g.cell_of(&KickPoint { lam: g.cell_size, phi: 0.0 }), 128);
        assert_eq!(g.cell_of(&KickPoint { lam: TAU - 1e-15, phi: TAU - 1e-15 }), 128 * 128 - 1);
    }

    #[test]
    fn predictability_examples() {
        let f = cat();
        let g = MicrostateGrid::default();
        let n = predictability_horizon(&f, 1e-3, &g).unwrap();
        let by_hand = ((PI / 64.0).ln() - (1e-3 / f.gamma.sin()).ln()) / f.lyapunov;
        assert_abs_diff_eq!(n, by_hand, epsilon = 1e-12);
        assert_abs_diff_eq!(n, 3.878, epsilon = 1e-3);

        let at_cell = g.cell_size * f.gamma.sin();
        assert_abs_diff_eq!(predictability_horizon(&f, at_cell, &g).unwrap(), 0.0, epsilon = 1e-12);
        assert_eq!(predictability_horizon(&f, 1.0, &g).unwrap(), 0.0);
        assert!(predictability_horizon(&f, 0.0, &g).is_err());

        let doubled = EigenFrame { lyapunov: 2.0 * f.lyapunov, ..f };
        assert_abs_diff_eq!(
            predictability_horizon(&doubled, 1e-3, &g).unwrap(),
            n / 2.0,
            epsilon = 1e-12
        );
        // ten times smaller d0 postpones the horizon by ln 10 / ln lambda_plus
        let n_small = predictability_horizon(&f, 1e-4, &g).unwrap();
        assert_abs_diff_eq!(n_small - n, 10f64.ln() / f.lyapunov, epsilon = 1e-12);
        assert_abs_diff_eq!(n_small - n, 2.39, epsilon = 1e-2);
    }

    #[test]
    fn ks_examples() {
        assert_eq!(ks_prediction(3.0, 3.88, 0.9624), 0.0);
        assert_eq!(ks_prediction(3.88, 3.88, 0.9624), 0.0);
        assert_abs_diff_eq!(ks_prediction(5.88, 3.88, 0.9624), 1.9248, epsilon = 1e-12);
        assert_eq!(ks_prediction(1e6, 3.88, 0.9624), S_MAX);
    }

    #[test]
    fn coherence_horizon_examples() {
        let f = cat();
        let n_box = predictability_horizon(&f, 1e-3, &MicrostateGrid::default()).unwrap();
        let n_star = coherence_horizon(n_box, f.lyapunov, S_MAX).unwrap();
        assert_abs_diff_eq!(n_star, 7.2, epsilon = 0.05);
        assert_abs_diff_eq!(coherence_horizon(3.0, 1e12, S_MAX).unwrap(), 3.0, epsilon = 1e-5);
        assert_eq!(coherence_horizon(3.0, 0.9, 0.0).unwrap(), 3.0);
        assert!(coherence_horizon(3.0, 0.0, S_MAX).is_err());
    }

    #[test]
    fn coherence_horizon_solves_cumulative_condition() {
        // (m)(m+1)/2 * lyapunov = s_max with m = n_star - n_box
        let f = cat();
        let m = coherence_horizon(0.0, f.lyapunov, S_MAX).unwrap();
        assert_abs_diff_eq!(m * (m + 1.0) / 2.0 * f.lyapunov, S_MAX, epsilon = 1e-12);
    }

    #[test]
    fn cumulative_examples() {
        assert_eq!(cumulative_shannon(&[0.0, 0.0, 1.0, 2.0]), vec![0.0, 0.0, 1.0, 3.0]);
        assert_eq!(cumulative_shannon(&[0.0; 5]), vec![0.0; 5]);
        assert_eq!(cumulative_shannon(&[0.5; 4]), vec![0.5, 1.0, 1.5, 2.0]);
        assert!(cumulative_shannon(&[]).is_empty());
    }

    #[test]
    fn empirical_horizon_examples() {
        assert_eq!(empirical_horizon(&[0.5, 0.5, 0.5, 0.1, 0.05], 0.5).unwrap(), Some(3));
        assert_eq!(empirical_horizon(&[0.4; 10], 0.5).unwrap(), None);
        assert!(matches!(empirical_horizon(&[], 0.5), Err(Error::EmptySeries)));
        assert!(empirical_horizon(&[0.5], 1.0).is_err());
    }

    fn arb_rho() -> impl Strategy<Value = DensityMatrix2> {
        (0.0..=1.0f64, 0.0..=1.0f64, -PI..PI).prop_map(|(p, frac, arg)| {
            let max = (p * (1.0 - p)).sqrt();
            DensityMatrix2::from_parts(p, C64::from_polar(frac * max, arg))
        })
    }

    proptest! {
        #[test]
        fn von_neumann_bounds_and_oracle(rho in arb_rho()) {
            let s = von_neumann_entropy(&rho);
            prop_assert!((0.0..=S_MAX + 1e-12).contains(&s));
            prop_assert!((s - vn_matrix_log(&rho)).abs() < 1e-9);
        }

        #[test]
        fn shannon_bounds(raw in prop::collection::vec((0.0..TAU, 0.0..TAU), 1..300)) {
            let g = MicrostateGrid::default();
            let points: Vec<KickPoint> = raw.iter().map(|&(l, p)| KickPoint::new(l, p)).collect();
            let s = shannon_entropy(&points, &g).unwrap();
            let cap = (points.len().min(g.cell_count()) as f64).ln();
            prop_assert!(s >= 0.0 && s <= cap + 1e-12);
            let counts = occupied_cells(&points, &g);
            prop_assert_eq!(counts.iter().map(|c| c.1).sum::<usize>(), points.len());
            prop_assert!(counts.iter().all(|c| c.0 < g.cell_count()));
        }

        #[test]
        fn ks_monotone(n_box in 0.0..20.0f64, lyap in 0.01..5.0f64, a in 0.0..50.0f64, b in 0.0..50.0f64) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(ks_prediction(lo, n_box, lyap) <= ks_prediction(hi, n_box, lyap));
            if lo <= n_box {
                prop_assert_eq!(ks_prediction(lo, n_box, lyap), 0.0);
            }
        }

        #[test]
        fn coherence_after_predictability(n_box in 0.0..20.0f64, lyap in 0.01..5.0f64, s in 0.0..20.0f64) {
            prop_assert!(coherence_horizon(n_box, lyap, s).unwrap() >= n_box);
        }
    }
}

//! Jaynes–Cummings (rotating-wave) baseline.

use std::f64::consts::FRAC_1_SQRT_2;

use serde::Serialize;

use crate::model::{Branch, CoherentField, TimeGrid, TimeSeries};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RwaLevel {
    pub k: Branch,
    pub n: usize,
    pub energy: f64,
}

/// `E_kn = n + 1/2 + (−1)^k √(n+1) g`.
pub fn rwa_energy(k: Branch, n: usize, g: f64) -> f64 {
    n as f64 + 0.5 + k.sign() * ((n + 1) as f64).sqrt() * g
}

pub fn rwa_level(k: Branch, n: usize, g: f64) -> RwaLevel {
    RwaLevel {
        k,
        n,
        energy: rwa_energy(k, n, g),
    }
}

/// Coefficients of `|↑,n⟩` and `|↓,n+1⟩` in the RWA eigenstate `(k, n)`.
pub fn rwa_state(k: Branch, _n: usize) -> (f64, f64) {
    (k.sign() * FRAC_1_SQRT_2, FRAC_1_SQRT_2)
}

/// `W(t) = Σ_n β_n² cos(2g√(n+1) t)`, summed in increasing `n`.
pub fn rwa_inversion(field: &CoherentField, g: f64, grid: &TimeGrid) -> TimeSeries {
    let weights = field.weights();
    let rabi: Vec<f64> = (0..weights.len())
        .map(|n| 2.0 * g * ((n + 1) as f64).sqrt())
        .collect();
    TimeSeries::from_fn(grid, |t| {
        weights
            .iter()
            .zip(&rabi)
            .map(|(w, om)| w * (om * t).cos())
            .sum()
    })
}

/// Short-time approximant `cos(2gt√(α²+1)) e^{−(gt)²/2}` of [`rwa_inversion`],
/// intended for `gt < α`.
pub fn rwa_gaussian_envelope(field: &CoherentField, g: f64, grid: &TimeGrid) -> TimeSeries {
    let rabi = 2.0 * g * (field.mean_photons + 1.0).sqrt();
    TimeSeries::from_fn(grid, |t| {
        let gt = g * t;
        (rabi * t).cos() * (-0.5 * gt * gt).exp()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{coherent_amplitudes, reduced_time_grid};

    fn ten_photons() -> CoherentField {
        coherent_amplitudes(10f64.sqrt(), 60).unwrap()
    }

    #[test]
    fn energies() {
        assert!((rwa_energy(Branch::Lower, 0, 0.06) - 0.44).abs() < 1e-15);
        assert!((rwa_energy(Branch::Upper, 0, 0.06) - 0.56).abs() < 1e-15);
        assert_eq!(rwa_energy(Branch::Lower, 3, 0.0), 3.5);
        for n in 0..20 {
            assert_eq!(rwa_energy(Branch::Lower, n, 0.0), rwa_energy(Branch::Upper, n, 0.0));
            assert!(rwa_energy(Branch::Lower, n, 0.1) < rwa_energy(Branch::Upper, n, 0.1));
        }
    }

    #[test]
    fn states() {
        let (a, b) = rwa_state(Branch::Lower, 0);
        assert_eq!((a, b), (-FRAC_1_SQRT_2, FRAC_1_SQRT_2));
        let (a, b) = rwa_state(Branch::Upper, 7);
        assert_eq!((a, b), (FRAC_1_SQRT_2, FRAC_1_SQRT_2));
        for k in Branch::BOTH {
            let (a, b) = rwa_state(k, 3);
            assert!((a * a + b * b - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn inversion_starts_at_one() {
        let field = ten_photons();
        let grid = reduced_time_grid(1.0, 3, 0.02).unwrap();
        let w = rwa_inversion(&field, 0.02, &grid);
        assert!((w.values[0] - (1.0 - field.tail_deficit)).abs() < 1e-14);
    }

    #[test]
    fn collapse_plateau_is_flat() {
        let field = ten_photons();
        let grid = TimeGrid::uniform(8.0, 12.0, 801, 0.02).unwrap();
        let w = rwa_inversion(&field, 0.02, &grid);
        // direct-sum value 5.9e-4
        assert!(w.sup_norm() < 0.02);
    }

    #[test]
    fn depends_on_g_and_t_only_through_gt() {
        let field = ten_photons();
        let grid_a = reduced_time_grid(30.0, 301, 0.02).unwrap();
        let grid_b = reduced_time_grid(30.0, 301, 0.07).unwrap();
        let a = rwa_inversion(&field, 0.02, &grid_a);
        let b = rwa_inversion(&field, 0.07, &grid_b);
        assert!(a.sup_distance(&b) < 1e-12);
    }

    #[test]
    fn stable_under_larger_truncation() {
        let small = CoherentField::with_tolerance(10f64.sqrt(), 1e-12).unwrap();
        let large = coherent_amplitudes(10f64.sqrt(), small.n_cut + 40).unwrap();
        let grid = reduced_time_grid(60.0, 601, 0.05).unwrap();
        let a = rwa_inversion(&small, 0.05, &grid);
        let b = rwa_inversion(&large, 0.05, &grid);
        assert!(a.sup_distance(&b) < 1e-10);
    }

    #[test]
    fn gaussian_envelope() {
        let field = ten_photons();
        let grid = reduced_time_grid(5.0, 1001, 0.06).unwrap();
        let env = rwa_gaussian_envelope(&field, 0.06, &grid);
        assert_eq!(env.values[0], 1.0);
        // direct-sum oracle: 0.0376
        let direct = rwa_inversion(&field, 0.06, &grid);
        assert!(env.sup_distance(&direct) < 0.05);

        // gt = 1 (tau = 2): Gaussian factor e^{-1/2}
        let at_two = TimeGrid::uniform(0.0, 2.0, 2, 0.06).unwrap();
        let env = rwa_gaussian_envelope(&field, 0.06, &at_two);
        let carrier = (2.0 * 11f64.sqrt()).cos();
        assert!((env.values[1] / carrier - (-0.5f64).exp()).abs() < 1e-12);
    }
}

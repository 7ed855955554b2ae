use proptest::prelude::*;

use rabi_crwa::crwa::{
    crwa_coefficients_ratio, crwa_coefficients_series, crwa_energy_closed,
    crwa_energy_series_to_order, cubic_coefficients,
};
use rabi_crwa::dynamics::crwa_inversion_full;
use rabi_crwa::exact::{build_hamiltonian, diagonalize, parity_labels};
use rabi_crwa::model::{coherent_amplitudes, reduced_time_grid};
use rabi_crwa::rwa::{rwa_energy, rwa_inversion};
use rabi_crwa::spectrum::{
    bin_aligned_grid, power_spectrum, predict_peaks_first_order, resolution, PeakLabel,
};
use rabi_crwa::{Branch, CoherentField, ModelParams, TimeSeries};

fn branch() -> impl Strategy<Value = Branch> {
    prop_oneof![Just(Branch::Lower), Just(Branch::Upper)]
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn coherent_weights_normalized(alpha in 0.0f64..7.0) {
        let field = CoherentField::with_tolerance(alpha, 1e-12).unwrap();
        let total: f64 = field.weights().iter().sum();
        prop_assert!(field.tail_deficit >= 0.0 && field.tail_deficit < 1e-12);
        prop_assert!(total <= 1.0 + 1e-14 && total >= 1.0 - 1e-12, "sum {total}");
    }

    #[test]
    fn recurrence_matches_log_space(alpha in 0.1f64..7.0) {
        let field = coherent_amplitudes(alpha, 80).unwrap();
        for (n, b) in field.betas.iter().enumerate() {
            let log = -0.5 * alpha * alpha + n as f64 * alpha.ln() - 0.5 * ln_factorial(n);
            let expected = log.exp();
            if expected > 1e-300 {
                prop_assert!((b - expected).abs() <= 1e-12 * expected, "n={n}: {b} vs {expected}");
            }
        }
    }

    #[test]
    fn tau_time_round_trip(tau in 0.0f64..1e3, g in 1e-3f64..1.0) {
        let grid = reduced_time_grid(10.0, 11, g).unwrap();
        let back = grid.time_to_tau(grid.tau_to_time(tau));
        prop_assert!((back - tau).abs() <= 4.0 * f64::EPSILON * tau.max(1.0));
    }

    #[test]
    fn rwa_depends_only_on_gt(g in 0.01f64..0.3, scale in 0.2f64..5.0) {
        let field = CoherentField::from_mean_photons(5.0, 1e-12).unwrap();
        let a = rwa_inversion(&field, g, &reduced_time_grid(30.0, 61, g).unwrap());
        let h = g * scale;
        let b = rwa_inversion(&field, h, &reduced_time_grid(30.0, 61, h).unwrap());
        prop_assert!(a.sup_distance(&b) < 1e-10);
    }

    #[test]
    fn cubic_roots_and_ordering(n in 0usize..=60, g in 1e-3f64..0.3) {
        let c = cubic_coefficients(n, g);
        let lo = crwa_energy_closed(Branch::Lower, n, g);
        let hi = crwa_energy_closed(Branch::Upper, n, g);
        for e in [lo, hi] {
            let residual = (e * e * e + c.a2 * e * e + c.a1 * e + c.a0).abs();
            prop_assert!(residual <= 1e-10 * e.abs().powi(3).max(1.0));
        }
        prop_assert!(lo < hi);
    }

    #[test]
    fn coefficient_triples_unit_norm(k in branch(), n in 0usize..40, g in 1e-3f64..0.2) {
        let s = crwa_coefficients_series(k, n, g);
        prop_assert!((s.norm() - 1.0).abs() < 1e-14);
        let params = ModelParams::resonant(g).unwrap();
        let r = crwa_coefficients_ratio(n, &params, crwa_energy_closed(k, n, g)).unwrap();
        prop_assert!((r.norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn first_order_series_is_rwa(k in branch(), n in 0usize..100, g in 0.0f64..0.5) {
        let series = crwa_energy_series_to_order(k, n, g, 1);
        prop_assert!((series - rwa_energy(k, n, g)).abs() <= 4.0 * f64::EPSILON * (n as f64 + 1.0));
    }

    #[test]
    fn decomposition_identity(g in 0.005f64..0.25, alpha_sq in 0.0f64..20.0) {
        let field = CoherentField::from_mean_photons(alpha_sq, 1e-12).unwrap();
        let grid = reduced_time_grid(40.0, 201, g).unwrap();
        let c = crwa_inversion_full(&field, g, &grid);
        prop_assert!(c.decomposition_error() <= 1e-12);
        prop_assert!(c.total.values.iter().all(|w| w.is_finite()));
    }

    #[test]
    fn omega_s_pair_centred(g in 0.01f64..0.4, alpha in 0.0f64..6.0) {
        let preds = predict_peaks_first_order(g, alpha).unwrap();
        let f = |l: PeakLabel| preds.iter().find(|p| p.label == l).unwrap().frequency;
        let mid = 0.5 * (f(PeakLabel::OmegaSK1) + f(PeakLabel::OmegaSK2));
        prop_assert!((mid - f(PeakLabel::OmegaC)).abs() <= 1e-12 * f(PeakLabel::OmegaC));
        prop_assert!(f(PeakLabel::OmegaDK1) < f(PeakLabel::OmegaSK1));
        prop_assert!(f(PeakLabel::OmegaDK2) > f(PeakLabel::OmegaSK2));
    }

    #[test]
    fn power_nonnegative(freq in 1.0f64..10.0, phase in 0.0f64..6.3) {
        let grid = reduced_time_grid(20.0, 801, 0.1).unwrap();
        let tone = TimeSeries::from_fn(&grid, |t| (0.2 * freq * t + phase).cos());
        let spec = power_spectrum(&tone, &bin_aligned_grid(resolution(20.0), 0.5, 12.0)).unwrap();
        prop_assert!(spec.power.iter().all(|p| *p >= 0.0));
        prop_assert!(spec.freqs.windows(2).all(|w| w[1] > w[0]));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn exact_contracts(g in 0.0f64..0.4, n_cut in 4usize..30) {
        let h = build_hamiltonian(&ModelParams::resonant(g).unwrap(), n_cut);
        prop_assert!(h.matrix.asymmetry() == 0.0);
        let eig = diagonalize(&h).unwrap();
        prop_assert!(eig.orthonormality_error <= 1e-10);
        prop_assert!(eig.residual_norm <= 1e-10 * h.matrix.norm().max(1.0));
        prop_assert!(eig.energies.windows(2).all(|w| w[1] >= w[0]));
        for j in 0..eig.dim {
            prop_assert!((eig.parity_expectation(j).abs() - 1.0).abs() <= 1e-8);
        }
        prop_assert!(parity_labels(&eig).is_ok());
    }
}

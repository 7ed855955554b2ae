//! The numbered acceptance checks, runnable from the library, the binary and
//! the `acceptance` test target.

use std::f64::consts::PI;
use std::time::Instant;

use serde::Serialize;

use crate::crwa::{
    crwa_energy_closed, cubic_coefficients, ground_state, GroundStateOrder,
};
use crate::dynamics::{
    collapse_metrics, crwa_inversion_full, envelope_diff_k, envelope_diff_k_approx,
    sliding_amplitude,
};
use crate::error::Result;
use crate::exact::{
    build_hamiltonian, diagonalize, exact_inversion, parity_labels, ExactEigensystem,
    DEFAULT_N_CUT,
};
use crate::model::{coherent_amplitudes, reduced_time_grid, Branch, CoherentField, ModelParams, TimeGrid};
use crate::rwa::rwa_inversion;
use crate::spectrum::{
    bin_aligned_grid, detect_peaks, match_predictions, power_spectrum, predict_peaks_first_order,
    predict_peaks_second_order, resolution, DEFAULT_PROMINENCE, DEFAULT_TAU_MAX,
};

const ALPHA_SQ: f64 = 10.0;

#[derive(Debug, Clone, Serialize)]
pub struct Measurement {
    pub name: String,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CriterionOutcome {
    pub id: u8,
    pub title: String,
    pub passed: bool,
    pub summary: String,
    pub measurements: Vec<Measurement>,
    pub seconds: f64,
}

impl CriterionOutcome {
    /// `PASS [3] ground-state energy: ...`
    pub fn line(&self) -> String {
        format!(
            "{} [{}] {}: {} ({:.2} s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.summary,
            self.seconds
        )
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub quick: bool,
    pub criteria: Vec<CriterionOutcome>,
    pub all_passed: bool,
}

struct Recorder {
    id: u8,
    title: &'static str,
    start: Instant,
    measurements: Vec<Measurement>,
}

impl Recorder {
    fn new(id: u8, title: &'static str) -> Self {
        Self {
            id,
            title,
            start: Instant::now(),
            measurements: Vec::new(),
        }
    }

    fn record(&mut self, name: impl Into<String>, value: f64) {
        self.measurements.push(Measurement {
            name: name.into(),
            value,
        });
    }

    fn finish(self, passed: bool, summary: String) -> CriterionOutcome {
        CriterionOutcome {
            id: self.id,
            title: self.title.to_string(),
            passed,
            summary,
            measurements: self.measurements,
            seconds: self.start.elapsed().as_secs_f64(),
        }
    }
}

fn field() -> CoherentField {
    coherent_amplitudes(ALPHA_SQ.sqrt(), DEFAULT_N_CUT).expect("alpha^2 = 10 is valid")
}

fn eigensystem(g: f64, n_cut: usize) -> Result<ExactEigensystem> {
    diagonalize(&build_hamiltonian(&ModelParams::resonant(g)?, n_cut))
}

fn exact_w(g: f64, n_cut: usize, field: &CoherentField, grid: &TimeGrid) -> Result<crate::TimeSeries> {
    Ok(exact_inversion(&eigensystem(g, n_cut)?, field, grid))
}

/// Both physical cubic roots satisfy the cubic for `n ≤ 60` and a range of
/// couplings.
pub fn criterion_1() -> Result<CriterionOutcome> {
    let mut rec = Recorder::new(1, "cubic-root fidelity");
    let mut worst = 0.0f64;
    for &g in &[0.02, 0.06, 0.1, 0.15, 0.2, 0.3] {
        for n in 0..=60 {
            let c = cubic_coefficients(n, g);
            for k in Branch::BOTH {
                worst = worst.max(c.relative_residual(crwa_energy_closed(k, n, g)));
            }
        }
    }
    rec.record("max_relative_residual", worst);
    let elapsed = rec.start.elapsed().as_secs_f64();
    let passed = worst <= 1e-10 && elapsed < 1.0;
    Ok(rec.finish(passed, format!("max residual {worst:.2e} (limit 1e-10)")))
}

/// Error of the CRWA levels against exact levels under g-halving.
pub fn criterion_2() -> Result<CriterionOutcome> {
    let mut rec = Recorder::new(2, "CRWA energy accuracy order");
    let gs = [0.2, 0.1, 0.05];
    let systems: Vec<ExactEigensystem> = gs
        .iter()
        .map(|&g| eigensystem(g, DEFAULT_N_CUT))
        .collect::<Result<_>>()?;
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for n in 0..=5 {
        for k in Branch::BOTH {
            let errs: Vec<f64> = gs
                .iter()
                .zip(&systems)
                .map(|(&g, eig)| {
                    let exact = eig.level_energy(k, n).unwrap_or(f64::NAN);
                    (crwa_energy_closed(k, n, g) - exact).abs()
                })
                .collect();
            for w in errs.windows(2) {
                let ratio = w[0] / w[1];
                rec.record(format!("ratio_k{}_n{n}", k.index()), ratio);
                lo = lo.min(ratio);
                hi = hi.max(ratio);
            }
        }
    }
    let passed = lo >= 6.0 && hi <= 10.0;
    Ok(rec.finish(
        passed,
        format!("halving ratios span [{lo:.2}, {hi:.2}] (required within [6, 10])"),
    ))
}

/// Second-order ground-state energy and its error scaling.
pub fn criterion_3() -> Result<CriterionOutcome> {
    let mut rec = Recorder::new(3, "ground-state energy");
    let e02 = ground_state(0.2, GroundStateOrder::Second).energy;
    rec.record("E_gs_second_order_g0.2", e02);
    let value_ok = (e02 - -0.5202).abs() < 1e-12;
    let errs: Vec<f64> = [0.2, 0.1, 0.05]
        .iter()
        .map(|&g| {
            let eig = eigensystem(g, DEFAULT_N_CUT)?;
            Ok((ground_state(g, GroundStateOrder::Second).energy - eig.ground_energy()).abs())
        })
        .collect::<Result<_>>()?;
    let ratios = [errs[0] / errs[1], errs[1] / errs[2]];
    rec.record("ratio_0.2_0.1", ratios[0]);
    rec.record("ratio_0.1_0.05", ratios[1]);
    let passed = value_ok && ratios.iter().all(|r| (48.0..=80.0).contains(r));
    Ok(rec.finish(
        passed,
        format!(
            "E(0.2) = {e02:.6}, halving ratios {:.1} and {:.1} (required within [48, 80])",
            ratios[0], ratios[1]
        ),
    ))
}

/// RWA plateau and revival at `g = 0.02`.
pub fn criterion_4() -> Result<CriterionOutcome> {
    let mut rec = Recorder::new(4, "RWA collapse and revival");
    let f = field();
    let g = 0.02;
    let grid = reduced_time_grid(30.0, 6001, g)?;
    let w = rwa_inversion(&f, g, &grid);
    let plateau = w.max_abs_in(8.0, 12.0);
    let revival = collapse_metrics(&w, g, f.alpha).revival_amplitude;
    rec.record("plateau_8_12", plateau);
    rec.record("revival_near_2pi_alpha", revival);
    let passed = plateau < 0.02 && revival > 0.3;
    Ok(rec.finish(
        passed,
        format!(
            "plateau {plateau:.2e} (< 0.02), revival amplitude near tau = {:.1} is {revival:.3} (> 0.3)",
            2.0 * PI * f.alpha
        ),
    ))
}

/// Plateau amplitude of exact and CRWA inversion is of order `gα`.
pub fn criterion_5() -> Result<CriterionOutcome> {
    let mut rec = Recorder::new(5, "absence of collapse");
    let f = field();
    let mut passed = true;
    let mut parts = Vec::new();
    for g in [0.02, 0.06] {
        let grid = reduced_time_grid(24.0, 4801, g)?;
        let exact = exact_w(g, DEFAULT_N_CUT, &f, &grid)?;
        let crwa = crwa_inversion_full(&f, g, &grid).total;
        let rwa = rwa_inversion(&f, g, &grid);
        let ga = g * f.alpha;
        for (name, series) in [("exact", &exact), ("crwa", &crwa)] {
            let m = collapse_metrics(series, g, f.alpha);
            rec.record(format!("{name}_plateau_g{g}"), m.plateau_amplitude);
            passed &= (0.5..=2.0).contains(&m.intrinsic_ratio);
            parts.push(format!("{name}(g={g}) {:.3}", m.plateau_amplitude));
        }
        let r = collapse_metrics(&rwa, g, f.alpha).plateau_amplitude;
        rec.record(format!("rwa_plateau_g{g}"), r);
        passed &= r < 0.02;
        parts.push(format!("rwa(g={g}) {r:.1e} vs g*alpha {ga:.3}"));
    }
    passed &= rec.start.elapsed().as_secs_f64() < 30.0;
    Ok(rec.finish(passed, parts.join(", ")))
}

/// CRWA is closer to the exact inversion than RWA.
pub fn criterion_6() -> Result<CriterionOutcome> {
    let mut rec = Recorder::new(6, "CRWA vs RWA fidelity ordering");
    let f = field();
    let mut passed = true;
    let mut parts = Vec::new();
    for g in [0.02, 0.06, 0.1, 0.2] {
        let grid = reduced_time_grid(40.0, 4001, g)?;
        let exact = exact_w(g, DEFAULT_N_CUT, &f, &grid)?;
        let d_crwa = exact.sup_distance(&crwa_inversion_full(&f, g, &grid).total);
        let d_rwa = exact.sup_distance(&rwa_inversion(&f, g, &grid));
        rec.record(format!("crwa_distance_g{g}"), d_crwa);
        rec.record(format!("rwa_distance_g{g}"), d_rwa);
        passed &= d_crwa < d_rwa;
        parts.push(format!("g={g}: {d_crwa:.3} < {d_rwa:.3}"));
    }
    Ok(rec.finish(passed, parts.join(", ")))
}

/// Components sum to the total, and the same-k part never collapses.
pub fn criterion_7() -> Result<CriterionOutcome> {
    let mut rec = Recorder::new(7, "decomposition and persistent same-k oscillation");
    let f = field();
    let end = 2.0 * PI * f.alpha;
    let mut decomposition = 0.0f64;
    let mut worst_ratio = f64::INFINITY;
    let mut worst_at = 0.0;
    for g in [0.02, 0.06, 0.1] {
        let grid = TimeGrid::uniform(0.0, end, 8001, g)?;
        let comps = crwa_inversion_full(&f, g, &grid);
        decomposition = decomposition.max(comps.decomposition_error());
        let amps = sliding_amplitude(&comps.same_k, 2.0);
        let (at, min) = amps
            .iter()
            .copied()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap_or((0.0, 0.0));
        let ratio = min / (g * f.alpha);
        rec.record(format!("min_window_amplitude_over_g_alpha_g{g}"), ratio);
        if ratio < worst_ratio {
            worst_ratio = ratio;
            worst_at = at;
        }
    }
    rec.record("decomposition_error", decomposition);
    let passed = decomposition <= 1e-12 && worst_ratio >= 0.3;
    Ok(rec.finish(
        passed,
        format!(
            "decomposition error {decomposition:.1e} (<= 1e-12), smallest same-k window amplitude {worst_ratio:.3} g*alpha at tau = {worst_at:.2} (>= 0.3)"
        ),
    ))
}

/// Envelope approximants: same-k half period and diff-k accuracy.
pub fn criterion_8() -> Result<CriterionOutcome> {
    let mut rec = Recorder::new(8, "envelope approximants");
    let f = field();
    // slow factor sin(tau / (2 sqrt(alpha^2 + 1))) first vanishes here
    let half_period = 2.0 * PI * (ALPHA_SQ + 1.0).sqrt();
    rec.record("same_k_half_period", half_period);
    let half_ok = (18.0..=22.0).contains(&half_period);

    let g = 0.06;
    let grid = reduced_time_grid(10.0, 2001, g)?;
    let sum = envelope_diff_k(&f, g, &grid);
    let approx = envelope_diff_k_approx(&f, g, &grid);
    let rel = sum.sup_distance(&approx) / sum.sup_norm();
    rec.record("diff_k_relative_sup_error", rel);
    let passed = half_ok && rel < 0.1;
    Ok(rec.finish(
        passed,
        format!("same-k half period {half_period:.2} (18..22), diff-k relative error {rel:.3} (< 0.1)"),
    ))
}

/// Exact-spectrum peaks at the predicted frequencies.
pub fn criterion_9(quick: bool) -> Result<CriterionOutcome> {
    let mut rec = Recorder::new(9, "spectrum peaks");
    let f = field();
    let tau_max = if quick { 20.0 * PI } else { DEFAULT_TAU_MAX };
    let bin = resolution(tau_max);
    rec.record("bin_width", bin);
    let mut passed = bin <= 0.1 + 1e-12;
    let mut misses = Vec::new();
    for (g, second) in [(0.06, false), (0.15, true), (0.2, true)] {
        let points = (tau_max * 40.0).round() as usize + 1;
        let grid = reduced_time_grid(tau_max, points, g)?;
        let w = exact_w(g, DEFAULT_N_CUT, &f, &grid)?;
        let spec = power_spectrum(&w, &bin_aligned_grid(bin, 1.0, 25.0))?;
        let peaks = detect_peaks(&spec, DEFAULT_PROMINENCE);
        let preds: Vec<_> = if second {
            predict_peaks_second_order(g, f.alpha)?
        } else {
            predict_peaks_first_order(g, f.alpha)?
                .into_iter()
                .filter(|p| p.label.is_line())
                .collect()
        };
        for m in match_predictions(&peaks, &preds, bin, 2.0) {
            rec.record(format!("{}_g{g}_distance_bins", m.prediction.label.name()), m.distance_bins);
            if !m.matched {
                passed = false;
                misses.push(format!(
                    "{}@g={g} ({:.1} bins)",
                    m.prediction.label.name(),
                    m.distance_bins
                ));
            }
        }
    }
    let summary = if misses.is_empty() {
        format!("all predictions within 2 bins (bin {bin:.4})")
    } else {
        format!("unmatched within 2 bins (bin {bin:.4}): {}", misses.join(", "))
    };
    Ok(rec.finish(passed, summary))
}

/// Eigensolver, parity and truncation contracts of the exact reference.
pub fn criterion_10() -> Result<CriterionOutcome> {
    let mut rec = Recorder::new(10, "exact-solver contracts");
    let h = build_hamiltonian(&ModelParams::resonant(0.2)?, 120);
    let eig = diagonalize(&h)?;
    let scale = h.matrix.norm();
    rec.record("dimension", eig.dim as f64);
    rec.record("orthonormality_error", eig.orthonormality_error);
    rec.record("relative_residual", eig.residual_norm / scale);
    let parity_dev = (0..eig.dim)
        .map(|j| (eig.parity_expectation(j).abs() - 1.0).abs())
        .fold(0.0, f64::max);
    rec.record("parity_deviation", parity_dev);
    let labels_ok = parity_labels(&eig).is_ok();

    let f = field();
    let f_long = coherent_amplitudes(f.alpha, 120)?;
    let mut doubling = 0.0f64;
    for g in [0.06, 0.2] {
        let grid = reduced_time_grid(40.0, 801, g)?;
        let a = exact_w(g, 60, &f_long, &grid)?;
        let b = exact_w(g, 120, &f_long, &grid)?;
        doubling = doubling.max(a.sup_distance(&b));
    }
    rec.record("truncation_doubling", doubling);
    let passed = eig.dim <= 242
        && eig.orthonormality_error <= 1e-10
        && eig.residual_norm <= 1e-10 * scale
        && parity_dev <= 1e-8
        && labels_ok
        && doubling < 1e-8;
    Ok(rec.finish(
        passed,
        format!(
            "dim {}, orthonormality {:.1e}, residual {:.1e} x |H|, parity {:.1e}, doubling {:.1e}",
            eig.dim,
            eig.orthonormality_error,
            eig.residual_norm / scale,
            parity_dev,
            doubling
        ),
    ))
}

/// Runs one criterion by number.
pub fn run_criterion(id: u8, quick: bool) -> Result<CriterionOutcome> {
    match id {
        1 => criterion_1(),
        2 => criterion_2(),
        3 => criterion_3(),
        4 => criterion_4(),
        5 => criterion_5(),
        6 => criterion_6(),
        7 => criterion_7(),
        8 => criterion_8(),
        9 => criterion_9(quick),
        10 => criterion_10(),
        _ => Err(crate::Error::param("criterion", f64::from(id), "must be 1..=10")),
    }
}

/// Runs all ten criteria. `quick` shortens the spectrum window to
/// `τ = 20π` (bin 0.1).
pub fn run_all(quick: bool) -> Result<ValidationReport> {
    let criteria: Vec<CriterionOutcome> = (1..=10)
        .map(|id| run_criterion(id, quick))
        .collect::<Result<_>>()?;
    let all_passed = criteria.iter().all(|c| c.passed);
    Ok(ValidationReport {
        quick,
        criteria,
        all_passed,
    })
}

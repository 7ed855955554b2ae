//! Power spectrum of `W(t)` and analytic peak positions.
//!
//! Frequencies are in units of `2g` throughout (`ω_abs = 2g ν`), so that a
//! tone `cos(ν τ)` in reduced time shows up at `ν`.

use num_complex::Complex64;
use serde::Serialize;

use crate::crwa::crwa_energy_closed;
use crate::error::{Error, Result};
use crate::model::{Branch, CoherentField, TimeGrid, TimeSeries};

/// Peaks below this fraction of the strongest one's prominence are dropped.
pub const DEFAULT_PROMINENCE: f64 = 0.005;

/// Default integration window in reduced time.
pub const DEFAULT_TAU_MAX: f64 = 200.0;

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumResult {
    /// In units of `2g`.
    pub freqs: Vec<f64>,
    pub power: Vec<f64>,
    /// Integration time `T` in absolute units.
    pub duration: f64,
    /// `2π/T` in units of `2g`.
    pub bin_width: f64,
    pub g: f64,
}

impl SpectrumResult {
    pub fn absolute_freqs(&self) -> Vec<f64> {
        self.freqs.iter().map(|nu| 2.0 * self.g * nu).collect()
    }

    pub fn max_power(&self) -> f64 {
        self.power.iter().copied().fold(0.0, f64::max)
    }
}

/// Smallest frequency spacing, in `2g` units, that a series spanning
/// `tau_span` can resolve.
pub fn resolution(tau_span: f64) -> f64 {
    2.0 * std::f64::consts::PI / tau_span
}

/// Multiples of `bin` inside `[nu_min, nu_max]`.
pub fn bin_aligned_grid(bin: f64, nu_min: f64, nu_max: f64) -> Vec<f64> {
    let first = (nu_min / bin - 1e-9).ceil().max(0.0) as usize;
    let last = (nu_max / bin + 1e-9).floor() as usize;
    (first..=last).map(|k| k as f64 * bin).collect()
}

/// `|∫₀^T W(t) e^{−iωt} dt|²` by the trapezoidal rule on the series' own
/// samples, with no taper.
///
/// The grid spacing may not be finer than the resolution `2π/T`, and no
/// frequency may exceed the sampling Nyquist limit.
pub fn power_spectrum(series: &TimeSeries, freqs: &[f64]) -> Result<SpectrumResult> {
    let grid = &series.grid;
    if grid.len() < 2 {
        return Err(Error::InvalidGrid("spectrum needs at least two samples"));
    }
    let g = grid.g_ref;
    let tau = series.tau();
    let tau_span = tau[tau.len() - 1] - tau[0];
    let bin = resolution(tau_span);
    if freqs.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidGrid("frequencies must be strictly increasing"));
    }
    if let Some(spacing) = freqs
        .windows(2)
        .map(|w| w[1] - w[0])
        .min_by(f64::total_cmp)
    {
        if spacing < bin * (1.0 - 1e-9) {
            return Err(Error::UnderResolvedGrid {
                spacing,
                resolution: bin,
            });
        }
    }
    let nyquist = std::f64::consts::PI / grid.tau_step();
    if let Some(&top) = freqs.last() {
        if top > nyquist {
            return Err(Error::AboveNyquist {
                frequency: top,
                nyquist,
            });
        }
    }

    let times = grid.times();
    let dt = grid.time_step();
    let last = times.len() - 1;
    let power = freqs
        .iter()
        .map(|nu| {
            let omega = 2.0 * g * nu;
            let mut acc = Complex64::new(0.0, 0.0);
            for (i, (t, w)) in times.iter().zip(&series.values).enumerate() {
                let weight = if i == 0 || i == last { 0.5 } else { 1.0 };
                acc += Complex64::from_polar(weight * w, -omega * t);
            }
            (acc * dt).norm_sqr()
        })
        .collect();
    Ok(SpectrumResult {
        freqs: freqs.to_vec(),
        power,
        duration: times[last] - times[0],
        bin_width: bin,
        g,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PeakLabel {
    Rabi,
    OmegaC,
    OmegaSK1,
    OmegaSK2,
    OmegaDK1,
    OmegaDK2,
    #[serde(rename = "Omega_s_k1")]
    BigOmegaSK1,
    #[serde(rename = "Omega_s_k2")]
    BigOmegaSK2,
    #[serde(rename = "Omega_d_k1")]
    BigOmegaDK1,
    #[serde(rename = "Omega_d_k2")]
    BigOmegaDK2,
}

impl PeakLabel {
    pub fn name(self) -> &'static str {
        match self {
            Self::Rabi => "rabi",
            Self::OmegaC => "omega_c",
            Self::OmegaSK1 => "omega_s_k1",
            Self::OmegaSK2 => "omega_s_k2",
            Self::OmegaDK1 => "omega_d_k1",
            Self::OmegaDK2 => "omega_d_k2",
            Self::BigOmegaSK1 => "Omega_s_k1",
            Self::BigOmegaSK2 => "Omega_s_k2",
            Self::BigOmegaDK1 => "Omega_d_k1",
            Self::BigOmegaDK2 => "Omega_d_k2",
        }
    }

    /// Whether a spectral line is expected at this frequency (`ω_c` only
    /// marks the centre of the `ω^s` pair).
    pub fn is_line(self) -> bool {
        self != Self::OmegaC
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PeakPrediction {
    pub label: PeakLabel,
    /// In units of `2g`.
    pub frequency: f64,
    pub order: u8,
}

fn require_positive_g(g: f64) -> Result<()> {
    if g > 0.0 && g.is_finite() {
        Ok(())
    } else {
        Err(Error::param("g", g, "peak predictions need g > 0"))
    }
}

/// Rabi line `√(α²+1)`, the `ω^s` and `ω^d` pairs from beats between `n` and
/// `n+2` near `n ≈ α²`, and the centre `ω_c = (1 − g²/4)/g`.
pub fn predict_peaks_first_order(g: f64, alpha: f64) -> Result<Vec<PeakPrediction>> {
    require_positive_g(g)?;
    let a2 = alpha * alpha;
    let carrier = 2.0 - g * g / 2.0;
    let (r1, r3) = ((a2 + 1.0).sqrt(), (a2 + 3.0).sqrt());
    let at = |label, frequency| PeakPrediction {
        label,
        frequency,
        order: 1,
    };
    Ok(vec![
        at(PeakLabel::Rabi, r1),
        at(PeakLabel::OmegaSK1, (carrier - g * (r3 - r1)) / (2.0 * g)),
        at(PeakLabel::OmegaSK2, (carrier + g * (r3 - r1)) / (2.0 * g)),
        at(PeakLabel::OmegaDK1, (carrier - g * (r3 + r1)) / (2.0 * g)),
        at(PeakLabel::OmegaDK2, (carrier + g * (r3 + r1)) / (2.0 * g)),
        at(PeakLabel::OmegaC, (1.0 - g * g / 4.0) / g),
    ])
}

/// The four beats between `n` and `n+4` near `n ≈ α²`, still evaluated with
/// CRWA levels.
pub fn predict_peaks_second_order(g: f64, alpha: f64) -> Result<Vec<PeakPrediction>> {
    require_positive_g(g)?;
    let a2 = alpha * alpha;
    let carrier = 4.0 - g * g;
    let (r1, r5) = ((a2 + 1.0).sqrt(), (a2 + 5.0).sqrt());
    let at = |label, frequency| PeakPrediction {
        label,
        frequency,
        order: 2,
    };
    Ok(vec![
        at(PeakLabel::BigOmegaSK1, (carrier - g * (r5 - r1)) / (2.0 * g)),
        at(PeakLabel::BigOmegaSK2, (carrier + g * (r5 - r1)) / (2.0 * g)),
        at(PeakLabel::BigOmegaDK1, (carrier - g * (r5 + r1)) / (2.0 * g)),
        at(PeakLabel::BigOmegaDK2, (carrier + g * (r5 + r1)) / (2.0 * g)),
    ])
}

/// Beats between `n` and `n + 2m` from the `m`-th correction (`m = 2, 3`):
///
/// `g^m α² Σ_{k,k'} Σ_n β_n²/√(n+2m−1) cos[(E_{k,n+2m} − E_{k',n}) t]`.
pub fn higher_order_components(
    field: &CoherentField,
    g: f64,
    grid: &TimeGrid,
    order: u8,
) -> Result<TimeSeries> {
    if !(2..=3).contains(&order) {
        return Err(Error::param("order", f64::from(order), "must be 2 or 3"));
    }
    let m = 2 * order as usize;
    let a2 = field.alpha * field.alpha;
    let amp = g.powi(i32::from(order)) * a2;
    let mut terms = Vec::with_capacity(4 * field.betas.len());
    for (n, beta) in field.betas.iter().enumerate() {
        let w = amp * beta * beta / ((n + m - 1) as f64).sqrt();
        for k in Branch::BOTH {
            for kp in Branch::BOTH {
                terms.push((w, crwa_energy_closed(k, n + m, g) - crwa_energy_closed(kp, n, g)));
            }
        }
    }
    Ok(TimeSeries::from_fn(grid, |t| {
        terms.iter().map(|(w, om)| w * (om * t).cos()).sum()
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DetectedPeak {
    /// In units of `2g`.
    pub frequency: f64,
    pub height: f64,
    pub prominence: f64,
    /// Half of the full width at half prominence, in units of `2g`.
    pub half_width: f64,
}

/// Local maxima whose topographic prominence is at least
/// `min_prominence · max(power)`, ascending in frequency.
///
/// A flat-topped maximum is reported at its lowest-frequency sample.
pub fn detect_peaks(spectrum: &SpectrumResult, min_prominence: f64) -> Vec<DetectedPeak> {
    let p = &spectrum.power;
    let x = &spectrum.freqs;
    let top = spectrum.max_power();
    if p.len() < 3 || top <= 0.0 {
        return Vec::new();
    }
    let floor = min_prominence * top;
    let mut peaks = Vec::new();
    let mut i = 1;
    while i + 1 < p.len() {
        if p[i] > p[i - 1] {
            let mut j = i;
            while j + 1 < p.len() && p[j + 1] == p[i] {
                j += 1;
            }
            if j + 1 < p.len() && p[j + 1] < p[i] {
                let prominence = p[i] - base_level(p, i, j);
                if prominence >= floor && prominence > 0.0 {
                    peaks.push(DetectedPeak {
                        frequency: x[i],
                        height: p[i],
                        prominence,
                        half_width: 0.5 * width_at(p, x, i, j, p[i] - 0.5 * prominence),
                    });
                }
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    peaks
}

/// Higher of the two minima reached before the signal climbs above the peak
/// on either side.
fn base_level(p: &[f64], left_top: usize, right_top: usize) -> f64 {
    let h = p[left_top];
    let mut left_min = h;
    for &v in p[..left_top].iter().rev() {
        if v > h {
            break;
        }
        left_min = left_min.min(v);
    }
    let mut right_min = h;
    for &v in &p[right_top + 1..] {
        if v > h {
            break;
        }
        right_min = right_min.min(v);
    }
    left_min.max(right_min)
}

/// Full width where the signal crosses `level`, interpolated linearly.
fn width_at(p: &[f64], x: &[f64], left_top: usize, right_top: usize, level: f64) -> f64 {
    let mut l = left_top;
    while l > 0 && p[l - 1] > level {
        l -= 1;
    }
    let left = if l == 0 {
        x[0]
    } else {
        x[l - 1] + (level - p[l - 1]) / (p[l] - p[l - 1]) * (x[l] - x[l - 1])
    };
    let mut r = right_top;
    while r + 1 < p.len() && p[r + 1] > level {
        r += 1;
    }
    let right = if r + 1 == p.len() {
        x[r]
    } else {
        x[r] + (p[r] - level) / (p[r] - p[r + 1]) * (x[r + 1] - x[r])
    };
    right - left
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PeakMatch {
    pub prediction: PeakPrediction,
    pub nearest: Option<DetectedPeak>,
    /// `|detected − predicted| / bin`.
    pub distance_bins: f64,
    pub matched: bool,
}

/// Pairs each prediction with the nearest detected peak and checks it lies
/// within `tolerance_bins` bins.
pub fn match_predictions(
    peaks: &[DetectedPeak],
    predictions: &[PeakPrediction],
    bin: f64,
    tolerance_bins: f64,
) -> Vec<PeakMatch> {
    predictions
        .iter()
        .map(|&prediction| {
            let nearest = peaks
                .iter()
                .min_by(|a, b| {
                    let da = (a.frequency - prediction.frequency).abs();
                    let db = (b.frequency - prediction.frequency).abs();
                    da.total_cmp(&db)
                })
                .copied();
            let distance_bins = nearest
                .map(|p| (p.frequency - prediction.frequency).abs() / bin)
                .unwrap_or(f64::INFINITY);
            PeakMatch {
                prediction,
                nearest,
                distance_bins,
                matched: distance_bins <= tolerance_bins,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{exact_inversion_for, DEFAULT_N_CUT};
    use crate::model::{coherent_amplitudes, reduced_time_grid};
    use crate::ModelParams;

    fn tone(nu: f64, tau_max: f64, points: usize) -> TimeSeries {
        let grid = reduced_time_grid(tau_max, points, 0.1).unwrap();
        let values = grid.tau_values.iter().map(|t| (nu * t).cos()).collect();
        TimeSeries::new(grid, values)
    }

    #[test]
    fn single_tone() {
        let series = tone(5.0, 100.0, 4001);
        let bin = resolution(100.0);
        let freqs = bin_aligned_grid(bin, 1.0, 20.0);
        let spec = power_spectrum(&series, &freqs).unwrap();
        assert!(spec.power.iter().all(|&p| p >= 0.0));
        let peaks = detect_peaks(&spec, 0.02);
        assert_eq!(peaks.len(), 1, "{peaks:?}");
        assert!((peaks[0].frequency - 5.0).abs() <= bin);
    }

    #[test]
    fn zero_signal() {
        let series = tone(0.0, 50.0, 501).truncated(50.0);
        let zero = TimeSeries::new(series.grid.clone(), vec![0.0; series.len()]);
        let freqs = bin_aligned_grid(resolution(50.0), 1.0, 10.0);
        let spec = power_spectrum(&zero, &freqs).unwrap();
        assert!(spec.power.iter().all(|&p| p == 0.0));
        assert!(detect_peaks(&spec, DEFAULT_PROMINENCE).is_empty());
    }

    #[test]
    fn tone_power_grows_as_duration_squared() {
        let at_peak = |tau_max: f64| {
            let series = tone(4.0, tau_max, (tau_max * 40.0) as usize + 1);
            let spec = power_spectrum(&series, &[4.0]).unwrap();
            spec.power[0]
        };
        let ratio = at_peak(200.0) / at_peak(100.0);
        assert!((ratio - 4.0).abs() < 0.02, "{ratio}");
        // |∫ cos(ω t) e^{−iω t} dt|² → (T/2)² with T = 100 / (2g)
        let t = 100.0 / 0.2;
        assert!((at_peak(100.0) / (t * t / 4.0) - 1.0).abs() < 1e-2);
    }

    #[test]
    fn rejects_bad_grids() {
        let series = tone(3.0, 20.0, 201);
        let bin = resolution(20.0);
        assert!(matches!(
            power_spectrum(&series, &[1.0, 1.0 + 0.5 * bin]),
            Err(Error::UnderResolvedGrid { .. })
        ));
        // tau step 0.1 → Nyquist pi / 0.1
        assert!(matches!(
            power_spectrum(&series, &[40.0]),
            Err(Error::AboveNyquist { .. })
        ));
        assert!(power_spectrum(&series, &[2.0, 1.0]).is_err());
    }

    #[test]
    fn first_order_values() {
        let alpha = 10f64.sqrt();
        let p = predict_peaks_first_order(0.06, alpha).unwrap();
        let f = |label| p.iter().find(|x| x.label == label).unwrap().frequency;
        assert!((f(PeakLabel::OmegaC) - 16.65).abs() < 0.01);
        assert!((f(PeakLabel::OmegaSK1) - 16.51).abs() < 0.01);
        assert!((f(PeakLabel::OmegaSK2) - 16.80).abs() < 0.01);
        assert!((f(PeakLabel::OmegaDK1) - 13.19).abs() < 0.01);
        assert!((f(PeakLabel::OmegaDK2) - 20.11).abs() < 0.01);
        assert!((f(PeakLabel::Rabi) - 3.317).abs() < 1e-3);
        assert!((f(PeakLabel::Rabi) / (2.0 * std::f64::consts::PI) - 0.53).abs() < 0.005);
        assert!(predict_peaks_first_order(0.0, alpha).is_err());
    }

    #[test]
    fn same_k_pair_is_centred() {
        for &(g, a2) in &[(0.06, 10.0), (0.2, 3.0), (0.01, 50.0)] {
            let p = predict_peaks_first_order(g, f64::sqrt(a2)).unwrap();
            let f = |label| p.iter().find(|x: &&PeakPrediction| x.label == label).unwrap().frequency;
            let mid = 0.5 * (f(PeakLabel::OmegaSK1) + f(PeakLabel::OmegaSK2));
            assert!((mid - f(PeakLabel::OmegaC)).abs() < 1e-12);
        }
    }

    #[test]
    fn second_order_values() {
        let alpha = 10f64.sqrt();
        let p = predict_peaks_second_order(0.15, alpha).unwrap();
        let centre: f64 = (4.0 - 0.0225) / 0.3;
        assert!((centre - 13.26).abs() < 0.01);
        for x in &p {
            assert!((x.frequency - centre).abs() < 4.0);
            assert_eq!(x.order, 2);
        }
        let p = predict_peaks_second_order(0.2, alpha).unwrap();
        assert!(p[0].frequency < 9.9 && p[1].frequency > 9.9);
        assert!(p[2].frequency < 9.9 && p[3].frequency > 9.9);
        assert!(predict_peaks_second_order(0.0, alpha).is_err());
    }

    #[test]
    fn higher_order_scaling() {
        let field = coherent_amplitudes(10f64.sqrt(), 60).unwrap();
        assert!(higher_order_components(&field, 0.1, &reduced_time_grid(1.0, 3, 0.1).unwrap(), 4).is_err());
        for (order, expect) in [(2u8, 4.0), (3, 8.0)] {
            let sup = |g: f64| {
                let grid = reduced_time_grid(40.0, 2001, g).unwrap();
                higher_order_components(&field, g, &grid, order).unwrap().sup_norm()
            };
            let ratio = sup(0.1) / sup(0.05);
            assert!((ratio / expect - 1.0).abs() < 0.05, "order {order}: {ratio}");
        }
        let grid = TimeGrid::uniform(0.0, 10.0, 11, 1.0).unwrap();
        assert!(higher_order_components(&field, 0.0, &grid, 2)
            .unwrap()
            .values
            .iter()
            .all(|v| *v == 0.0));
    }

    #[test]
    fn second_order_series_peaks_at_predictions() {
        let field = coherent_amplitudes(10f64.sqrt(), 60).unwrap();
        let g = 0.2;
        let grid = reduced_time_grid(DEFAULT_TAU_MAX, 8001, g).unwrap();
        let series = higher_order_components(&field, g, &grid, 2).unwrap();
        let bin = resolution(DEFAULT_TAU_MAX);
        let spec = power_spectrum(&series, &bin_aligned_grid(bin, 1.0, 20.0)).unwrap();
        let peaks = detect_peaks(&spec, DEFAULT_PROMINENCE);
        let preds = predict_peaks_second_order(g, field.alpha).unwrap();
        for m in match_predictions(&peaks, &preds, bin, 2.0) {
            assert!(m.matched, "{m:?}");
        }
    }

    #[test]
    fn plateau_reported_at_lower_edge() {
        let spec = SpectrumResult {
            freqs: vec![1.0, 2.0, 3.0, 4.0, 5.0],
            power: vec![0.0, 1.0, 1.0, 0.0, 0.0],
            duration: 1.0,
            bin_width: 1.0,
            g: 0.5,
        };
        let peaks = detect_peaks(&spec, 0.1);
        assert_eq!(peaks.len(), 1);
        assert_eq!(peaks[0].frequency, 2.0);
        assert_eq!(peaks[0].prominence, 1.0);
        assert!((peaks[0].half_width - 1.0).abs() < 1e-12);
    }

    #[test]
    fn prominence_uses_the_higher_base() {
        let spec = SpectrumResult {
            freqs: (0..7).map(f64::from).collect(),
            power: vec![0.0, 10.0, 4.0, 6.0, 1.0, 0.5, 0.0],
            duration: 1.0,
            bin_width: 1.0,
            g: 0.5,
        };
        let peaks = detect_peaks(&spec, 0.0);
        assert_eq!(peaks.len(), 2);
        assert_eq!(peaks[1].frequency, 3.0);
        assert!((peaks[1].prominence - 2.0).abs() < 1e-12);
        assert!((peaks[0].prominence - 10.0).abs() < 1e-12);
    }

    fn exact_spectrum(g: f64, tau_max: f64) -> SpectrumResult {
        let field = coherent_amplitudes(10f64.sqrt(), DEFAULT_N_CUT).unwrap();
        let points = (tau_max * 40.0).round() as usize + 1;
        let grid = reduced_time_grid(tau_max, points, g).unwrap();
        let params = ModelParams::resonant(g).unwrap();
        let w = exact_inversion_for(&params, DEFAULT_N_CUT, &field, &grid).unwrap();
        let bin = resolution(tau_max);
        power_spectrum(&w, &bin_aligned_grid(bin, 1.0, 25.0)).unwrap()
    }

    fn first_order_matches(g: f64) -> Vec<PeakMatch> {
        let spec = exact_spectrum(g, DEFAULT_TAU_MAX);
        let peaks = detect_peaks(&spec, DEFAULT_PROMINENCE);
        let preds: Vec<_> = predict_peaks_first_order(g, 10f64.sqrt())
            .unwrap()
            .into_iter()
            .filter(|p| p.label.is_line())
            .collect();
        match_predictions(&peaks, &preds, spec.bin_width, 2.0)
    }

    #[test]
    fn exact_rabi_peak() {
        let spec = exact_spectrum(0.06, DEFAULT_TAU_MAX);
        let peaks = detect_peaks(&spec, DEFAULT_PROMINENCE);
        // the intrinsic lines near 16.6 outlast the collapsing Rabi term, so
        // look for the strongest peak of the low-frequency band
        let strongest = peaks
            .iter()
            .filter(|p| p.frequency < 10.0)
            .max_by(|a, b| a.height.total_cmp(&b.height))
            .unwrap();
        assert!((strongest.frequency - 11f64.sqrt()).abs() <= 2.0 * spec.bin_width);
        let two_pi = 2.0 * std::f64::consts::PI;
        assert!((strongest.frequency / two_pi - 0.53).abs() < 0.005 + 2.0 * spec.bin_width / two_pi);
    }

    #[test]
    fn exact_first_order_peaks() {
        for g in [0.06, 0.15] {
            for m in first_order_matches(g) {
                assert!(m.matched, "g={g}: {m:?}");
            }
        }
    }

    #[test]
    #[ignore = "the same-k pair merges into one exact peak at g = 0.2"]
    fn exact_first_order_peaks_strong_coupling() {
        for m in first_order_matches(0.2) {
            assert!(m.matched, "{m:?}");
        }
    }

    #[test]
    fn diff_k_structure_is_broader() {
        // bin 0.1: the diff-k comb is not resolved into separate lines
        let g = 0.06;
        let spec = exact_spectrum(g, 20.0 * std::f64::consts::PI);
        let peaks = detect_peaks(&spec, DEFAULT_PROMINENCE);
        let preds = predict_peaks_first_order(g, 10f64.sqrt()).unwrap();
        let width = |label| {
            let p = preds.iter().find(|p| p.label == label).unwrap();
            match_predictions(&peaks, &[*p], spec.bin_width, 2.0)[0]
                .nearest
                .unwrap()
                .half_width
        };
        let narrow = width(PeakLabel::OmegaSK1).max(width(PeakLabel::OmegaSK2));
        for label in [PeakLabel::OmegaDK1, PeakLabel::OmegaDK2] {
            assert!(width(label) > narrow);
        }
    }
}

//! CRWA population inversion for an atom prepared in `|↑⟩` with a coherent
//! field, through order `g²`.
//!
//! The inversion splits into
//!
//! ```text
//! W = (2C − 1) + W_GS + W_Rabi + W_sk + W_dk
//! ```
//!
//! where `W_sk` collects beats between levels `(k, n)` and `(k, n+2)` of the
//! same branch and `W_dk` those between opposite branches. Both carry the
//! fast carrier `2 − g²/2` and an amplitude of order `gα`; they are what
//! keeps the inversion from flattening out in the collapse window.

use num_complex::Complex64;
use serde::Serialize;

use crate::crwa::crwa_energy_closed;
use crate::model::{Branch, CoherentField, TimeGrid, TimeSeries};

/// Per-`n` amplitudes and beat weights. Index 0 of the `[_; 2]` arrays is the
/// lower branch.
#[derive(Debug, Clone, Serialize)]
pub struct InversionCoefficients {
    pub g: f64,
    pub alpha_sq: f64,
    /// Upper-level amplitude on `|n⟩` carried by state `(k, n)`.
    pub f: [Vec<f64>; 2],
    /// Upper-level amplitude on `|n+2⟩` carried by state `(k, n)`.
    pub h: [Vec<f64>; 2],
    pub r: Vec<f64>,
    pub i1: Vec<f64>,
    pub i2: Vec<f64>,
    pub i12: Vec<f64>,
    pub i21: Vec<f64>,
    pub c: f64,
    pub s: [f64; 2],
}

impl InversionCoefficients {
    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    /// `2 (f_1n f_2n + h_1n h_2n)`, which the closed `R_n` truncates at `g²`.
    pub fn r_from_amplitudes(&self, n: usize) -> f64 {
        2.0 * (self.f[0][n] * self.f[1][n] + self.h[0][n] * self.h[1][n])
    }
}

pub fn compute_coefficients(field: &CoherentField, g: f64) -> InversionCoefficients {
    let a2 = field.alpha * field.alpha;
    let g2 = g * g;
    let len = field.betas.len();
    let mut f = [Vec::with_capacity(len), Vec::with_capacity(len)];
    let mut h = [Vec::with_capacity(len), Vec::with_capacity(len)];
    let mut r = Vec::with_capacity(len);
    let (mut i1, mut i2, mut i12, mut i21) = (
        Vec::with_capacity(len),
        Vec::with_capacity(len),
        Vec::with_capacity(len),
        Vec::with_capacity(len),
    );
    let mut c_sum = 0.0;

    for (n, &beta) in field.betas.iter().enumerate() {
        let nf = n as f64;
        let root1 = (nf + 1.0).sqrt();
        let root3 = (nf + 3.0).sqrt();
        let x = nf - 2.0 * a2 + 2.0;
        let b2 = beta * beta;
        for k in Branch::BOTH {
            let s = k.sign();
            let idx = k.index() as usize - 1;
            f[idx].push(beta * (0.5 + s * x * g / (8.0 * root1) - a2 * g2 / 8.0));
            h[idx].push(
                beta * (-s * (nf + 2.0).sqrt() * g / 4.0
                    + ((nf + 2.0) / (nf + 1.0)).sqrt() * (a2 - nf - 1.0) * g2 / 8.0),
            );
        }
        r.push(0.5 * b2 * (1.0 - (a2 / 2.0 + x * x / (16.0 * (nf + 1.0)) + nf / 4.0 + 0.5) * g2));

        let mixed = -(nf + 4.0 - 2.0 * a2) / (8.0 * root1 * root3);
        let local = (a2 - nf - 1.0) / (4.0 * (nf + 1.0));
        let linear = 0.5 * a2 * g / root1;
        let same = (mixed + local) * a2 * g2;
        let diff = (-mixed + local) * a2 * g2;
        i1.push(0.5 * b2 * (same + linear));
        i2.push(0.5 * b2 * (same - linear));
        i12.push(0.5 * b2 * (diff + linear));
        i21.push(0.5 * b2 * (diff - linear));

        c_sum += b2 * (-a2 / 4.0 + x * x / (32.0 * (nf + 1.0)) + nf / 8.0 + 0.25);
    }
    let s_k = a2 * g2 * (-a2).exp() / 4.0;
    InversionCoefficients {
        g,
        alpha_sq: a2,
        f,
        h,
        r,
        i1,
        i2,
        i12,
        i21,
        c: 0.5 + g2 * c_sum,
        s: [s_k, s_k],
    }
}

/// The pieces of the full CRWA inversion.
#[derive(Debug, Clone)]
pub struct InversionComponents {
    /// `2C − 1`.
    pub constant: f64,
    pub gs_term: TimeSeries,
    pub rabi: TimeSeries,
    pub same_k: TimeSeries,
    pub diff_k: TimeSeries,
    pub total: TimeSeries,
}

impl InversionComponents {
    /// `max |constant + gs + rabi + same_k + diff_k − total|`.
    pub fn decomposition_error(&self) -> f64 {
        (0..self.total.len())
            .map(|i| {
                let sum = self.constant
                    + self.gs_term.values[i]
                    + self.rabi.values[i]
                    + self.same_k.values[i]
                    + self.diff_k.values[i];
                (sum - self.total.values[i]).abs()
            })
            .fold(0.0, f64::max)
    }
}

struct Energies {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

fn closed_energies(count: usize, g: f64) -> Energies {
    Energies {
        lower: (0..count).map(|n| crwa_energy_closed(Branch::Lower, n, g)).collect(),
        upper: (0..count).map(|n| crwa_energy_closed(Branch::Upper, n, g)).collect(),
    }
}

/// `α² g² e^{−α²} cos[(2 − g²/4) t] cos[(1 − 15g²/64) √2 g t]`.
pub fn ground_state_term(field: &CoherentField, g: f64, grid: &TimeGrid) -> TimeSeries {
    let a2 = field.alpha * field.alpha;
    let amp = a2 * g * g * (-a2).exp();
    let fast = 2.0 - g * g / 4.0;
    let slow = (1.0 - 15.0 * g * g / 64.0) * std::f64::consts::SQRT_2 * g;
    TimeSeries::from_fn(grid, |t| amp * (fast * t).cos() * (slow * t).cos())
}

/// Full CRWA inversion through `g²`, with closed-form energies in every
/// phase.
pub fn crwa_inversion_full(field: &CoherentField, g: f64, grid: &TimeGrid) -> InversionComponents {
    let coeffs = compute_coefficients(field, g);
    let len = coeffs.len();
    let e = closed_energies(len + 2, g);

    let rabi_freq: Vec<f64> = (0..len).map(|n| e.upper[n] - e.lower[n]).collect();
    let rabi = TimeSeries::from_fn(grid, |t| {
        (0..len)
            .map(|n| 2.0 * coeffs.r[n] * (rabi_freq[n] * t).cos())
            .sum()
    });
    let same_k = TimeSeries::from_fn(grid, |t| {
        (0..len)
            .map(|n| {
                2.0 * (coeffs.i1[n] * ((e.lower[n] - e.lower[n + 2]) * t).cos()
                    + coeffs.i2[n] * ((e.upper[n] - e.upper[n + 2]) * t).cos())
            })
            .sum()
    });
    let diff_k = TimeSeries::from_fn(grid, |t| {
        (0..len)
            .map(|n| {
                2.0 * (coeffs.i12[n] * ((e.lower[n] - e.upper[n + 2]) * t).cos()
                    + coeffs.i21[n] * ((e.upper[n] - e.lower[n + 2]) * t).cos())
            })
            .sum()
    });
    let gs_term = ground_state_term(field, g, grid);
    let constant = 2.0 * coeffs.c - 1.0;
    let total_values = (0..grid.len())
        .map(|i| constant + gs_term.values[i] + rabi.values[i] + same_k.values[i] + diff_k.values[i])
        .collect();
    InversionComponents {
        constant,
        total: TimeSeries::new(grid.clone(), total_values),
        gs_term,
        rabi,
        same_k,
        diff_k,
    }
}

/// Order-`g` form: Rabi cosines plus the four beat families with the
/// simplified frequencies `2 − g²/2 ± g(√(n+3) ∓ √(n+1))`.
pub fn crwa_inversion_concise(field: &CoherentField, g: f64, grid: &TimeGrid) -> TimeSeries {
    let a2 = field.alpha * field.alpha;
    let carrier = 2.0 - g * g / 2.0;
    let terms: Vec<(f64, f64, f64, f64)> = field
        .betas
        .iter()
        .enumerate()
        .map(|(n, beta)| {
            let root1 = ((n + 1) as f64).sqrt();
            let root3 = ((n + 3) as f64).sqrt();
            (
                beta * beta,
                2.0 * g * root1,
                g * (root3 - root1),
                g * (root3 + root1),
            )
        })
        .collect();
    TimeSeries::from_fn(grid, |t| {
        terms
            .iter()
            .enumerate()
            .map(|(n, &(w, rabi, s, d))| {
                let pref = g * a2 / (2.0 * ((n + 1) as f64).sqrt());
                // k = k': −cos(A − s) + cos(A + s); k ≠ k': cos(A − d) − cos(A + d)
                let beats = -((carrier - s) * t).cos() + ((carrier + s) * t).cos()
                    + ((carrier - d) * t).cos()
                    - ((carrier + d) * t).cos();
                w * ((rabi * t).cos() - pref * beats)
            })
            .sum()
    })
}

fn envelope_sum(
    field: &CoherentField,
    g: f64,
    grid: &TimeGrid,
    sign: f64,
    freq: impl Fn(f64, f64) -> f64,
) -> TimeSeries {
    let a2 = field.alpha * field.alpha;
    let carrier = 2.0 - g * g / 2.0;
    let terms: Vec<(f64, f64)> = field
        .betas
        .iter()
        .enumerate()
        .map(|(n, beta)| {
            let root1 = ((n + 1) as f64).sqrt();
            let root3 = ((n + 3) as f64).sqrt();
            (beta * beta / root1, g * freq(root1, root3))
        })
        .collect();
    TimeSeries::from_fn(grid, |t| {
        let slow: f64 = terms.iter().map(|&(w, om)| w * (om * t).sin()).sum();
        sign * g * a2 * (carrier * t).sin() * slow
    })
}

/// `W_sk = gα² sin[(2 − g²/2)t] Σ β_n²/√(n+1) sin[g(√(n+3) − √(n+1))t]`.
pub fn envelope_same_k(field: &CoherentField, g: f64, grid: &TimeGrid) -> TimeSeries {
    envelope_sum(field, g, grid, 1.0, |r1, r3| r3 - r1)
}

/// `(gα²/√(α²+1)) sin[(2 − g²/2)t] sin[gt/√(α²+1)]`.
pub fn envelope_same_k_approx(field: &CoherentField, g: f64, grid: &TimeGrid) -> TimeSeries {
    let a2 = field.alpha * field.alpha;
    let root = (a2 + 1.0).sqrt();
    let carrier = 2.0 - g * g / 2.0;
    TimeSeries::from_fn(grid, |t| {
        g * a2 / root * (carrier * t).sin() * (g * t / root).sin()
    })
}

/// `W_dk = −gα² sin[(2 − g²/2)t] Σ β_n²/√(n+1) sin[g(√(n+1) + √(n+3))t]`.
pub fn envelope_diff_k(field: &CoherentField, g: f64, grid: &TimeGrid) -> TimeSeries {
    envelope_sum(field, g, grid, -1.0, |r1, r3| r1 + r3)
}

/// `−gα sin[(2 − g²/2)t] sin(2gαt) e^{−(gt)²/2}`.
pub fn envelope_diff_k_approx(field: &CoherentField, g: f64, grid: &TimeGrid) -> TimeSeries {
    let alpha = field.alpha;
    let carrier = 2.0 - g * g / 2.0;
    TimeSeries::from_fn(grid, |t| {
        let gt = g * t;
        -g * alpha * (carrier * t).sin() * (2.0 * alpha * gt).sin() * (-0.5 * gt * gt).exp()
    })
}

/// Saddle-point evaluation of `F(t) = Σ β_n²/√(n+1) sin[g(√(n+1) + √(n+3))t]`.
///
/// With Stirling's formula the sum becomes `∫ dn f(n) e^{n̄ S(n)}`, where
/// `S(n) = −1 + n/n̄ − (n/n̄) ln(n/n̄) + i·2g√n t/n̄` once the sine is written
/// as an exponential and `√(n+1) + √(n+3) ≈ 2√n`. The stationary point is
/// `n₀ ≈ n̄(1 + i gt/√n̄)` for `gt/√n̄ ≪ 1`, which gives
///
/// ```text
/// F(t) ≈ (1/√n̄) sin(2g√n̄ t) e^{−(gt)²/2}
/// ```
#[derive(Debug, Clone)]
pub struct SaddlePoint {
    pub envelope: TimeSeries,
    /// `n₀` at each grid time.
    pub saddle_points: Vec<Complex64>,
    pub warning: Option<String>,
}

pub fn saddle_point_analysis(n_bar: f64, g: f64, grid: &TimeGrid) -> SaddlePoint {
    let root = n_bar.sqrt();
    let times = grid.times();
    let saddle_points = times
        .iter()
        .map(|t| n_bar * Complex64::new(1.0, g * t / root))
        .collect();
    let latest = times.last().copied().unwrap_or(0.0);
    let warning = (g * latest > root).then(|| {
        format!(
            "gt reaches {:.3}, beyond sqrt(n_bar) = {:.3}; the short-time expansion does not hold there",
            g * latest,
            root
        )
    });
    SaddlePoint {
        envelope: saddle_point_envelope(n_bar, g, grid),
        saddle_points,
        warning,
    }
}

/// `(1/√n̄) sin(2g√n̄ t) e^{−(gt)²/2}`; see [`SaddlePoint`].
pub fn saddle_point_envelope(n_bar: f64, g: f64, grid: &TimeGrid) -> TimeSeries {
    let root = n_bar.sqrt();
    TimeSeries::from_fn(grid, |t| {
        let gt = g * t;
        (2.0 * root * gt).sin() * (-0.5 * gt * gt).exp() / root
    })
}

/// `(max − min)/2` over every window `[τ, τ + width]` that fits in the
/// series, as `(τ, amplitude)` pairs.
pub fn sliding_amplitude(series: &TimeSeries, width: f64) -> Vec<(f64, f64)> {
    let tau = series.tau();
    let Some(&last) = tau.last() else {
        return Vec::new();
    };
    let slack = 1e-9 * width.max(1.0);
    let mut out = Vec::new();
    let mut end = 0;
    for start in 0..tau.len() {
        if tau[start] + width > last + slack {
            break;
        }
        end = end.max(start);
        while end + 1 < tau.len() && tau[end + 1] <= tau[start] + width + slack {
            end += 1;
        }
        let (lo, hi) = series.values[start..=end]
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        out.push((tau[start], 0.5 * (hi - lo)));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CollapseMetrics {
    /// `max |W|` for `τ ∈ [0.4, 0.6] · 2πα`.
    pub plateau_amplitude: f64,
    /// `max |W|` for `τ` within 10% of `2πα`.
    pub revival_amplitude: f64,
    /// `plateau_amplitude / (gα)`.
    pub intrinsic_ratio: f64,
}

pub fn collapse_metrics(series: &TimeSeries, g: f64, alpha: f64) -> CollapseMetrics {
    let period = 2.0 * std::f64::consts::PI * alpha;
    let plateau_amplitude = series.max_abs_in(0.4 * period, 0.6 * period);
    CollapseMetrics {
        plateau_amplitude,
        revival_amplitude: series.max_abs_in(0.9 * period, 1.1 * period),
        intrinsic_ratio: plateau_amplitude / (g * alpha),
    }
}

//! Parameter types, coherent-field construction and the reduced-time grid
//! shared by every solver backend.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// Starting guess for the Fock truncation of a coherent field, refined by
/// [`choose_truncation`].
fn truncation_guess(alpha: f64) -> usize {
    let n_bar = alpha * alpha;
    (n_bar + 12.0 * (n_bar + 1.0).sqrt() + 10.0).ceil() as usize
}

/// Parameters of the Rabi Hamiltonian `H = (Δ/2)σz + ω a†a + g(a† + a)σx`.
///
/// The cavity frequency `ω` is the energy unit and is fixed to 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelParams {
    g: f64,
    delta_atom: f64,
}

impl ModelParams {
    pub const OMEGA: f64 = 1.0;

    pub fn new(g: f64, delta_atom: f64) -> Result<Self> {
        if !(g >= 0.0) || !g.is_finite() {
            return Err(Error::param("g", g, "coupling must be finite and >= 0"));
        }
        if !delta_atom.is_finite() {
            return Err(Error::param("delta_atom", delta_atom, "must be finite"));
        }
        Ok(Self { g, delta_atom })
    }

    /// Resonant model, `Δ = ω = 1`.
    pub fn resonant(g: f64) -> Result<Self> {
        Self::new(g, Self::OMEGA)
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn delta_atom(&self) -> f64 {
        self.delta_atom
    }

    pub fn omega(&self) -> f64 {
        Self::OMEGA
    }

    /// `δ = Δ − ω`.
    pub fn detuning(&self) -> f64 {
        self.delta_atom - Self::OMEGA
    }

    /// Only the resonant configuration is validated against exact results.
    pub fn is_resonant(&self) -> bool {
        self.detuning() == 0.0
    }
}

/// Atomic quantum number `k` labelling the two members of each doublet.
///
/// `Lower` is `k = 1`, `Upper` is `k = 2`; [`Branch::sign`] is `(−1)^k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Branch {
    Lower,
    Upper,
}

impl Branch {
    pub const BOTH: [Branch; 2] = [Branch::Lower, Branch::Upper];

    pub fn index(self) -> u8 {
        match self {
            Branch::Lower => 1,
            Branch::Upper => 2,
        }
    }

    /// `(−1)^k`.
    pub fn sign(self) -> f64 {
        match self {
            Branch::Lower => -1.0,
            Branch::Upper => 1.0,
        }
    }

    pub fn other(self) -> Branch {
        match self {
            Branch::Lower => Branch::Upper,
            Branch::Upper => Branch::Lower,
        }
    }
}

impl TryFrom<u8> for Branch {
    type Error = Error;

    fn try_from(k: u8) -> Result<Self> {
        match k {
            1 => Ok(Branch::Lower),
            2 => Ok(Branch::Upper),
            _ => Err(Error::InvalidBranch(k)),
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.index())
    }
}

/// Coherent state `|α⟩ = Σ β_n |n⟩` with real `α ≥ 0`, truncated at `n_cut`.
///
/// `tail_deficit` is the probability weight `Σ_{n > n_cut} β_n²` that the
/// truncation drops. It is summed explicitly, never inferred from `1 − Σ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoherentField {
    pub alpha: f64,
    pub mean_photons: f64,
    pub betas: Vec<f64>,
    pub n_cut: usize,
    pub tail_deficit: f64,
}

/// Poisson amplitudes `β_n = e^{−α²/2} αⁿ / √(n!)` for `n = 0..=n_cut`.
///
/// Uses the recurrence `β_{n+1} = β_n α / √(n+1)`, so no factorial is ever
/// formed.
pub fn coherent_amplitudes(alpha: f64, n_cut: usize) -> Result<CoherentField> {
    let b0 = initial_beta(alpha)?;
    let mut betas = Vec::with_capacity(n_cut + 1);
    let mut b = b0;
    for n in 0..=n_cut {
        betas.push(b);
        b *= alpha / ((n + 1) as f64).sqrt();
    }
    let tail_deficit = tail_weight(alpha, n_cut + 1, b);
    Ok(CoherentField {
        alpha,
        mean_photons: alpha * alpha,
        betas,
        n_cut,
        tail_deficit,
    })
}

fn initial_beta(alpha: f64) -> Result<f64> {
    if !(alpha >= 0.0) || !alpha.is_finite() {
        return Err(Error::param(
            "alpha",
            alpha,
            "coherent amplitude must be real, finite and >= 0",
        ));
    }
    let b0 = (-0.5 * alpha * alpha).exp();
    if b0 == 0.0 {
        return Err(Error::param(
            "alpha",
            alpha,
            "exp(-alpha^2/2) underflows; mean photon number too large",
        ));
    }
    Ok(b0)
}

/// `Σ_{n ≥ start} β_n²` given `β_start`, continued until the terms vanish
/// past the Poisson peak.
fn tail_weight(alpha: f64, start: usize, beta_start: f64) -> f64 {
    let n_bar = alpha * alpha;
    let mut b = beta_start;
    let mut n = start;
    let mut terms = Vec::new();
    loop {
        let w = b * b;
        terms.push(w);
        if (n as f64) > n_bar && (w == 0.0 || w < 1e-40) {
            break;
        }
        b *= alpha / ((n + 1) as f64).sqrt();
        n += 1;
    }
    // smallest terms first
    terms.iter().rev().sum()
}

/// Smallest `N` such that `Σ_{n > N} β_n² < tail_tol`.
pub fn choose_truncation(alpha: f64, tail_tol: f64) -> Result<usize> {
    if !(tail_tol > 0.0) {
        return Err(Error::param("tail_tol", tail_tol, "must be > 0"));
    }
    let b0 = initial_beta(alpha)?;
    // Weights up to well past the guess; beyond that the suffix is added
    // by `tail_weight`.
    let guess = truncation_guess(alpha);
    let limit = 2 * guess + 20;
    let mut weights = Vec::with_capacity(limit + 1);
    let mut b = b0;
    for n in 0..=limit {
        weights.push(b * b);
        b *= alpha / ((n + 1) as f64).sqrt();
    }
    let mut suffix = tail_weight(alpha, limit + 1, b);
    // suffix currently holds Σ_{n > limit}; walk down.
    let mut best = limit;
    for n in (0..=limit).rev() {
        // suffix == Σ_{m > n}
        if suffix < tail_tol {
            best = n;
        } else {
            break;
        }
        suffix += weights[n];
    }
    Ok(best)
}

impl CoherentField {
    /// Field truncated at the smallest `N` meeting `tail_tol`.
    pub fn with_tolerance(alpha: f64, tail_tol: f64) -> Result<Self> {
        let n_cut = choose_truncation(alpha, tail_tol)?;
        coherent_amplitudes(alpha, n_cut)
    }

    /// Field with mean photon number `n̄ = α²`.
    pub fn from_mean_photons(n_bar: f64, tail_tol: f64) -> Result<Self> {
        if !(n_bar >= 0.0) {
            return Err(Error::param("alpha_sq", n_bar, "mean photon number must be >= 0"));
        }
        Self::with_tolerance(n_bar.sqrt(), tail_tol)
    }

    /// `β_n²`, the photon-number distribution.
    pub fn weights(&self) -> Vec<f64> {
        self.betas.iter().map(|b| b * b).collect()
    }

    /// `β_n` or zero beyond the truncation.
    pub fn beta(&self, n: usize) -> f64 {
        self.betas.get(n).copied().unwrap_or(0.0)
    }
}

/// Uniform grid in reduced time `τ = 2 g t`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimeGrid {
    pub tau_values: Vec<f64>,
    pub g_ref: f64,
}

/// `n_points` samples of `τ` on `[0, tau_max]`.
pub fn reduced_time_grid(tau_max: f64, n_points: usize, g: f64) -> Result<TimeGrid> {
    TimeGrid::uniform(0.0, tau_max, n_points, g)
}

impl TimeGrid {
    pub fn uniform(tau_start: f64, tau_end: f64, n_points: usize, g: f64) -> Result<Self> {
        if !(g > 0.0) || !g.is_finite() {
            return Err(Error::param("g", g, "reduced time needs g > 0"));
        }
        if n_points < 2 {
            return Err(Error::InvalidGrid("need at least two points"));
        }
        if !(tau_end > tau_start) || !tau_end.is_finite() || !tau_start.is_finite() {
            return Err(Error::InvalidGrid("tau range must be finite and increasing"));
        }
        let last = (n_points - 1) as f64;
        let span = tau_end - tau_start;
        let tau_values = (0..n_points)
            .map(|i| {
                if i == n_points - 1 {
                    tau_end
                } else {
                    tau_start + span * (i as f64 / last)
                }
            })
            .collect();
        Ok(Self {
            tau_values,
            g_ref: g,
        })
    }

    pub fn len(&self) -> usize {
        self.tau_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tau_values.is_empty()
    }

    /// Spacing in `τ`.
    pub fn tau_step(&self) -> f64 {
        let n = self.tau_values.len();
        (self.tau_values[n - 1] - self.tau_values[0]) / (n - 1) as f64
    }

    /// Absolute time step `Δt = Δτ / (2g)`.
    pub fn time_step(&self) -> f64 {
        self.tau_step() / (2.0 * self.g_ref)
    }

    pub fn tau_to_time(&self, tau: f64) -> f64 {
        tau / (2.0 * self.g_ref)
    }

    pub fn time_to_tau(&self, t: f64) -> f64 {
        2.0 * self.g_ref * t
    }

    /// Absolute times `t = τ / (2g)`.
    pub fn times(&self) -> Vec<f64> {
        self.tau_values
            .iter()
            .map(|&tau| self.tau_to_time(tau))
            .collect()
    }
}

/// Samples of some quantity on a [`TimeGrid`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimeSeries {
    pub grid: TimeGrid,
    pub values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(grid: TimeGrid, values: Vec<f64>) -> Self {
        assert_eq!(grid.len(), values.len(), "series length must match grid");
        Self { grid, values }
    }

    /// Evaluate `f(t)` at every grid time.
    pub fn from_fn(grid: &TimeGrid, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.times().into_iter().map(f).collect();
        Self::new(grid.clone(), values)
    }

    pub fn tau(&self) -> &[f64] {
        &self.grid.tau_values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Points with `lo <= τ <= hi`.
    pub fn window(&self, lo: f64, hi: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.tau()
            .iter()
            .copied()
            .zip(self.values.iter().copied())
            .filter(move |&(tau, _)| tau >= lo && tau <= hi)
    }

    /// `max |W|` over `lo <= τ <= hi`, zero for an empty window.
    pub fn max_abs_in(&self, lo: f64, hi: f64) -> f64 {
        self.window(lo, hi).map(|(_, w)| w.abs()).fold(0.0, f64::max)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|w| w.abs()).fold(0.0, f64::max)
    }

    /// `max_i |a_i − b_i|`; both series must share a grid.
    pub fn sup_distance(&self, other: &TimeSeries) -> f64 {
        assert_eq!(self.len(), other.len(), "series length mismatch");
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Pointwise sum.
    pub fn add(&self, other: &TimeSeries) -> TimeSeries {
        assert_eq!(self.len(), other.len(), "series length mismatch");
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + b)
            .collect();
        TimeSeries::new(self.grid.clone(), values)
    }

    /// Restrict to `τ <= tau_max`.
    pub fn truncated(&self, tau_max: f64) -> TimeSeries {
        let n = self.tau().iter().take_while(|&&tau| tau <= tau_max).count();
        TimeSeries {
            grid: TimeGrid {
                tau_values: self.grid.tau_values[..n].to_vec(),
                g_ref: self.grid.g_ref,
            },
            values: self.values[..n].to_vec(),
        }
    }
}

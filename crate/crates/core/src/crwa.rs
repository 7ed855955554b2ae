//! Corrected rotating-wave approximation.
//!
//! Each RWA doublet `(k, n)` spanned by `|↑,n⟩, |↓,n+1⟩` is extended by the
//! state `|↑,n+2⟩` that the counter-rotating terms reach in one step:
//!
//! ```text
//! |k n⟩ = c0 |↑,n⟩ + c1 |↓,n+1⟩ + c2 |↑,n+2⟩
//! ```
//!
//! Within that three-state block the energies are roots of a cubic. Two of
//! the three roots continue the RWA doublet and are selected by a fixed
//! trigonometric formula ([`crwa_energy_closed`]); the third is only exposed
//! through [`all_cubic_roots`] for diagnostics.
//!
//! Eigenvector coefficients come from two independent routes: the
//! perturbative series in `g` ([`crwa_coefficients_series`], the default for
//! all dynamics) and the exact ratio of the block eigenvector
//! ([`crwa_coefficients_ratio`]).

use std::f64::consts::{PI, SQRT_2};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::eigen::{symmetric_eigen, SymMatrix};
use crate::model::{Branch, ModelParams};

/// Below this magnitude `Ω_m(E)` is treated as a vanishing denominator.
pub const OMEGA_DENOMINATOR_FLOOR: f64 = 1e-13;

/// `E³ + a2 E² + a1 E + a0` at resonance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CubicCoefficients {
    pub a2: f64,
    pub a1: f64,
    pub a0: f64,
}

impl CubicCoefficients {
    pub fn eval(&self, e: f64) -> f64 {
        ((e + self.a2) * e + self.a1) * e + self.a0
    }

    /// `|p(E)| / max(1, |E|³)`.
    pub fn relative_residual(&self, e: f64) -> f64 {
        self.eval(e).abs() / e.abs().powi(3).max(1.0)
    }
}

pub fn cubic_coefficients(n: usize, g: f64) -> CubicCoefficients {
    let n = n as f64;
    let g2 = g * g;
    CubicCoefficients {
        a2: -(3.0 * n + 3.5),
        a1: (n + 0.5) * (3.0 * n + 5.5) - (2.0 * n + 3.0) * g2,
        a0: -(n + 0.5).powi(2) * (n + 2.5) + (2.0 * n * n + 6.0 * n + 3.5) * g2,
    }
}

/// CRWA energy `E_kn` from the trigonometric root formula.
///
/// The `arccos` argument equals −1 at `g = 0` and is clamped to `[−1, 1]`.
pub fn crwa_energy_closed(k: Branch, n: usize, g: f64) -> f64 {
    let nf = n as f64;
    let g2 = g * g;
    let radius = ((6.0 * nf + 9.0) * g2 + 4.0).sqrt();
    let arg = ((-8.0 + 9.0 * nf * g2) / radius.powi(3)).clamp(-1.0, 1.0);
    let theta = arg.acos() / 3.0 + 2.0 * PI / 3.0;
    let trig = theta.cos() + k.sign() * 3f64.sqrt() * theta.sin();
    ((3.0 * nf + 3.5) + radius * trig) / 3.0
}

/// Expansion of [`crwa_energy_closed`] through `g³`.
pub fn crwa_energy_series(k: Branch, n: usize, g: f64) -> f64 {
    crwa_energy_series_to_order(k, n, g, 3)
}

/// Energy series keeping powers `g^0 ..= g^max_power` (`max_power <= 3`).
///
/// `max_power = 1` is the RWA energy.
pub fn crwa_energy_series_to_order(k: Branch, n: usize, g: f64, max_power: u32) -> f64 {
    let nf = n as f64;
    let s = k.sign();
    let root = (nf + 1.0).sqrt();
    let terms = [
        nf + 0.5,
        s * root * g,
        -(nf + 2.0) / 4.0 * g * g,
        -s * (nf + 2.0) * (3.0 * nf + 2.0) / (32.0 * root) * g * g * g,
    ];
    terms.iter().take(max_power as usize + 1).sum()
}

/// Amplitudes of `|↑,n⟩, |↓,n+1⟩, |↑,n+2⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoefficientTriple {
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
}

impl CoefficientTriple {
    pub fn norm(&self) -> f64 {
        (self.c0 * self.c0 + self.c1 * self.c1 + self.c2 * self.c2).sqrt()
    }

    pub fn normalized(&self) -> Self {
        let norm = self.norm();
        Self {
            c0: self.c0 / norm,
            c1: self.c1 / norm,
            c2: self.c2 / norm,
        }
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.c0 * other.c0 + self.c1 * other.c1 + self.c2 * other.c2
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self.c0 - other.c0)
            .abs()
            .max((self.c1 - other.c1).abs())
            .max((self.c2 - other.c2).abs())
    }
}

/// Series coefficients through `g²`, before renormalization.
pub fn crwa_coefficients_series_raw(k: Branch, n: usize, g: f64) -> CoefficientTriple {
    let nf = n as f64;
    let s = k.sign();
    let g2 = g * g;
    let root = (nf + 1.0).sqrt();
    let c0 = s * SQRT_2 / 2.0 + SQRT_2 * (nf + 2.0) / (16.0 * root) * g
        - s * SQRT_2 * (nf + 2.0).powi(2) / (256.0 * (nf + 1.0)) * g2;
    let c1 = SQRT_2 / 2.0
        - s * SQRT_2 * (nf + 2.0) / (16.0 * root) * g
        - SQRT_2 * (nf + 2.0) * (17.0 * nf + 18.0) / (256.0 * (nf + 1.0)) * g2;
    let c2 = -(2.0 * nf + 4.0).sqrt() / 4.0 * g
        - s * (3.0 * nf + 2.0) * (2.0 * nf + 4.0).sqrt() / (32.0 * root) * g2;
    CoefficientTriple { c0, c1, c2 }
}

/// Series coefficients renormalized to unit norm.
pub fn crwa_coefficients_series(k: Branch, n: usize, g: f64) -> CoefficientTriple {
    crwa_coefficients_series_raw(k, n, g).normalized()
}

/// `Ω_m(E) = (m − E + Δ/2) / g`.
pub fn omega_denominator(m: usize, energy: f64, params: &ModelParams) -> f64 {
    (m as f64 - energy + params.delta_atom() / 2.0) / params.g()
}

/// Block eigenvector from the ratio `c0 : c1 : c2 = −√(n+1)/Ω_n : 1 : −√(n+2)/Ω_{n+2}`,
/// normalized.
///
/// Singular as `g → 0` (`Ω ∝ 1/g`); use the series route there. Away from
/// resonance the result is not validated.
pub fn crwa_coefficients_ratio(
    n: usize,
    params: &ModelParams,
    energy: f64,
) -> Result<CoefficientTriple> {
    if !(params.g() > 0.0) {
        return Err(Error::param("g", params.g(), "ratio form needs g > 0"));
    }
    let omega_n = omega_denominator(n, energy, params);
    let omega_n2 = omega_denominator(n + 2, energy, params);
    for (m, value) in [(n, omega_n), (n + 2, omega_n2)] {
        if value.abs() < OMEGA_DENOMINATOR_FLOOR || !value.is_finite() {
            return Err(Error::DegenerateDenominator { m, value });
        }
    }
    let raw = CoefficientTriple {
        c0: -((n + 1) as f64).sqrt() / omega_n,
        c1: 1.0,
        c2: -((n + 2) as f64).sqrt() / omega_n2,
    };
    Ok(raw.normalized())
}

/// The symmetric Hamiltonian block on `|↑,n⟩, |↓,n+1⟩, |↑,n+2⟩`, whose
/// characteristic polynomial is the CRWA cubic at resonance.
pub fn crwa_block(n: usize, params: &ModelParams) -> SymMatrix {
    let half = params.delta_atom() / 2.0;
    let nf = n as f64;
    let g = params.g();
    let mut m = SymMatrix::zeros(3);
    m.set(0, 0, nf + half);
    m.set(1, 1, nf + 1.0 - half);
    m.set(2, 2, nf + 2.0 + half);
    m.set_sym(0, 1, g * (nf + 1.0).sqrt());
    m.set_sym(1, 2, g * (nf + 2.0).sqrt());
    m
}

/// All three cubic roots, ascending, as eigenvalues of [`crwa_block`].
///
/// Diagnostic only: the physical pair is what [`crwa_energy_closed`]
/// returns.
pub fn all_cubic_roots(n: usize, g: f64) -> Result<[f64; 3]> {
    let params = ModelParams::resonant(g)?;
    let eig = symmetric_eigen(&crwa_block(n, &params))?;
    Ok([eig.values[0], eig.values[1], eig.values[2]])
}

/// One CRWA eigenpair: closed-form energy and series coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CrwaLevel {
    pub k: Branch,
    pub n: usize,
    pub energy: f64,
    pub coefficients: CoefficientTriple,
}

pub fn crwa_level(k: Branch, n: usize, g: f64) -> CrwaLevel {
    CrwaLevel {
        k,
        n,
        energy: crwa_energy_closed(k, n, g),
        coefficients: crwa_coefficients_series(k, n, g),
    }
}

/// Which correction of the ground state to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GroundStateOrder {
    /// `|↓,0⟩` plus `|↑,1⟩`.
    First,
    /// Adds `|↓,2⟩`.
    Second,
}

/// Approximate ground state `d0 |↓,0⟩ + d1 |↑,1⟩ + d2 |↓,2⟩`.
///
/// `d2` is zero for [`GroundStateOrder::First`]. Coefficients are
/// renormalized.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GroundState {
    pub order: GroundStateOrder,
    pub energy: f64,
    pub d0: f64,
    pub d1: f64,
    pub d2: f64,
}

pub fn ground_state(g: f64, order: GroundStateOrder) -> GroundState {
    let g2 = g * g;
    let g4 = g2 * g2;
    let (energy, d0, d1, d2) = match order {
        GroundStateOrder::First => (
            -0.5 - 0.5 * g2 + g4 / 8.0,
            1.0 - g2 / 8.0 + 11.0 * g4 / 128.0,
            -0.5 * g + 3.0 * g * g2 / 16.0,
            0.0,
        ),
        GroundStateOrder::Second => (
            -0.5 - 0.5 * g2 - g4 / 8.0,
            1.0 - g2 / 8.0 - 13.0 * g4 / 128.0,
            -0.5 * g - g * g2 / 16.0,
            SQRT_2 / 4.0 * g2 - SQRT_2 / 32.0 * g4,
        ),
    };
    let norm = (d0 * d0 + d1 * d1 + d2 * d2).sqrt();
    GroundState {
        order,
        energy,
        d0: d0 / norm,
        d1: d1 / norm,
        d2: d2 / norm,
    }
}

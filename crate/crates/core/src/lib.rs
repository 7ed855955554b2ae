//! Corrected rotating-wave approximation (CRWA) for the quantum Rabi model.
//!
//! The crate puts three descriptions of a two-level atom coupled to a single
//! cavity mode side by side:
//!
//! * [`rwa`]: the Jaynes–Cummings (rotating-wave) baseline,
//! * [`crwa`]: the first correction to it, with closed-form cubic roots and
//!   three-component eigenvectors,
//! * [`exact`]: dense diagonalization in a truncated Fock basis.
//!
//! [`dynamics`] builds the atomic population inversion `W(t)` for an atom
//! prepared in its upper level with a coherent cavity field, split into its
//! Rabi and intrinsic-oscillation parts, and [`spectrum`] analyses `W(t)` in
//! frequency space. [`report`] drives the `crwa` binary and [`validation`]
//! holds the numbered acceptance checks.
//!
//! Units: the cavity frequency is 1. Time is usually handled as the reduced
//! time `tau = 2 g t`, frequencies in spectra as multiples of `2 g`.

pub mod crwa;
pub mod dynamics;
pub mod error;
pub mod exact;
pub mod model;
pub mod report;
pub mod rwa;
pub mod spectrum;
pub mod validation;

pub use error::{Error, Result};
pub use model::{Branch, CoherentField, ModelParams, TimeGrid, TimeSeries};

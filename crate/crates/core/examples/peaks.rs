//! Peak detection on the CRWA and exact spectra and matching against the
//! predicted line positions within two frequency bins.

use rabi_crwa::dynamics::crwa_inversion_full;
use rabi_crwa::exact::exact_inversion_for;
use rabi_crwa::model::reduced_time_grid;
use rabi_crwa::spectrum::{
    bin_aligned_grid, detect_peaks, match_predictions, power_spectrum, predict_peaks_first_order,
    resolution, DEFAULT_PROMINENCE,
};
use rabi_crwa::{CoherentField, ModelParams};

fn main() -> rabi_crwa::Result<()> {
    let g = 0.06;
    let tau_max = 200.0;
    let field = CoherentField::from_mean_photons(10.0, 1e-12)?;
    let grid = reduced_time_grid(tau_max, 10001, g)?;
    let bin = resolution(tau_max);
    let freqs = bin_aligned_grid(bin, 1.0, 30.0);
    let preds: Vec<_> = predict_peaks_first_order(g, field.alpha)?
        .into_iter()
        .filter(|p| p.label.is_line())
        .collect();

    let crwa = crwa_inversion_full(&field, g, &grid).total;
    let exact = exact_inversion_for(&ModelParams::resonant(g)?, 60, &field, &grid)?;
    for (name, w) in [("crwa", crwa), ("exact", exact)] {
        let spec = power_spectrum(&w, &freqs)?;
        let peaks = detect_peaks(&spec, DEFAULT_PROMINENCE);
        println!("{name}: {} peaks", peaks.len());
        for m in match_predictions(&peaks, &preds, bin, 2.0) {
            println!(
                "  {:<11} predicted {:>8.4}  found {:>8.4}  {:>6.2} bins  {}",
                m.prediction.label.name(),
                m.prediction.frequency,
                m.nearest.map_or(f64::NAN, |p| p.frequency),
                m.distance_bins,
                if m.matched { "ok" } else { "miss" }
            );
        }
    }
    Ok(())
}

//! Power spectrum of the exact inversion on a bin-aligned frequency grid,
//! with the first- and second-order line predictions marked.

use rabi_crwa::exact::exact_inversion_for;
use rabi_crwa::model::reduced_time_grid;
use rabi_crwa::spectrum::{
    bin_aligned_grid, power_spectrum, predict_peaks_first_order, predict_peaks_second_order,
    resolution,
};
use rabi_crwa::{CoherentField, ModelParams};

fn main() -> rabi_crwa::Result<()> {
    let g = 0.15;
    let tau_max = 200.0;
    let field = CoherentField::from_mean_photons(10.0, 1e-12)?;
    let grid = reduced_time_grid(tau_max, 10001, g)?;
    let w = exact_inversion_for(&ModelParams::resonant(g)?, 60, &field, &grid)?;

    let bin = resolution(tau_max);
    let spec = power_spectrum(&w, &bin_aligned_grid(bin, 1.0, 20.0))?;
    let peak = spec.max_power();

    let mut preds = predict_peaks_first_order(g, field.alpha)?;
    preds.extend(predict_peaks_second_order(g, field.alpha)?);
    println!("bin width {bin:.5} (units of 2g)");
    println!("{:<12} {:>5} {:>9} {:>12}", "line", "order", "nu", "P/P_max");
    for p in preds {
        let i = ((p.frequency - spec.freqs[0]) / bin).round() as usize;
        let rel = spec.power.get(i).map_or(f64::NAN, |v| v / peak);
        println!("{:<12} {:>5} {:>9.4} {:>12.3e}", p.label.name(), p.order, p.frequency, rel);
    }
    Ok(())
}

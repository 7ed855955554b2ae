//! Envelopes of the intrinsic oscillations and the saddle-point estimate of
//! the cross-branch sum.

use rabi_crwa::dynamics::{
    envelope_diff_k, envelope_diff_k_approx, envelope_same_k, envelope_same_k_approx,
    saddle_point_analysis,
};
use rabi_crwa::model::reduced_time_grid;
use rabi_crwa::CoherentField;

fn main() -> rabi_crwa::Result<()> {
    let g = 0.15;
    let n_bar = 10.0;
    let field = CoherentField::from_mean_photons(n_bar, 1e-12)?;
    let grid = reduced_time_grid(12.0, 13, g)?;

    let same = envelope_same_k(&field, g, &grid);
    let same_approx = envelope_same_k_approx(&field, g, &grid);
    let diff = envelope_diff_k(&field, g, &grid);
    let diff_approx = envelope_diff_k_approx(&field, g, &grid);
    let saddle = saddle_point_analysis(n_bar, g, &grid);

    println!("{:>5} {:>10} {:>10} {:>10} {:>10} {:>10}", "tau", "same", "same~", "diff", "diff~", "F saddle");
    for i in 0..grid.len() {
        println!(
            "{:>5.1} {:>10.5} {:>10.5} {:>10.5} {:>10.5} {:>10.5}",
            grid.tau_values[i],
            same.values[i],
            same_approx.values[i],
            diff.values[i],
            diff_approx.values[i],
            saddle.envelope.values[i]
        );
    }
    if let Some(w) = saddle.warning {
        println!("note: {w}");
    }
    Ok(())
}

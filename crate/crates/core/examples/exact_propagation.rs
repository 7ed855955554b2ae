//! Direct propagation of |up> x |alpha> in the truncated Fock space, checked
//! against the spectral evaluator and for energy conservation.

use rabi_crwa::exact::{
    build_hamiltonian, diagonalize, energy_expectation, evolve, initial_state,
    sigma_z_expectation, InversionEvaluator,
};
use rabi_crwa::{CoherentField, ModelParams};
use num_complex::Complex64;

fn main() -> rabi_crwa::Result<()> {
    let g = 0.2;
    let field = CoherentField::from_mean_photons(4.0, 1e-12)?;
    let h = build_hamiltonian(&ModelParams::resonant(g)?, 40);
    let eig = diagonalize(&h)?;
    let eval = InversionEvaluator::new(&eig, &field);
    let psi0: Vec<Complex64> = initial_state(&field, 40).into_iter().map(Complex64::from).collect();
    let e0 = energy_expectation(&h, &psi0);

    println!("dim {}  residual {:.1e}  captured norm {:.15}", eig.dim, eig.residual_norm, eval.captured_norm());
    println!("{:>6} {:>12} {:>12} {:>10}", "t", "propagated", "spectral", "dE");
    for t in [0.0, 5.0, 10.0, 20.0, 40.0] {
        let psi = evolve(&eig, &initial_state(&field, 40), t);
        println!(
            "{t:>6.1} {:>12.8} {:>12.8} {:>10.1e}",
            sigma_z_expectation(&psi),
            eval.at(t),
            energy_expectation(&h, &psi) - e0
        );
    }
    Ok(())
}

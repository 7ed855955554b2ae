//! Energy ladder at moderate coupling: RWA, CRWA closed form, CRWA series and
//! exact diagonalization side by side, with the CRWA eigenvector overlap.

use rabi_crwa::crwa::{crwa_energy_closed, crwa_energy_series, crwa_level};
use rabi_crwa::exact::{build_hamiltonian, diagonalize};
use rabi_crwa::rwa::rwa_energy;
use rabi_crwa::{Branch, ModelParams};

fn main() -> rabi_crwa::Result<()> {
    let g = 0.1;
    let eig = diagonalize(&build_hamiltonian(&ModelParams::resonant(g)?, 60))?;
    println!("g = {g}");
    println!("{:>2} {:>2} {:>12} {:>12} {:>12} {:>12} {:>10}", "n", "k", "rwa", "crwa", "series", "exact", "crwa-exact");
    for n in 0..8 {
        for k in Branch::BOTH {
            let exact = eig.level_energy(k, n).expect("level inside truncation");
            let closed = crwa_energy_closed(k, n, g);
            println!(
                "{n:>2} {:>2} {:>12.8} {closed:>12.8} {:>12.8} {exact:>12.8} {:>10.2e}",
                k.index(),
                rwa_energy(k, n, g),
                crwa_energy_series(k, n, g),
                closed - exact
            );
        }
    }
    let level = crwa_level(Branch::Upper, 3, g);
    let c = level.coefficients;
    println!("\n|E_2,3> = {:.6}|up,2> + {:.6}|down,3> + {:.6}|up,4>", c.c0, c.c1, c.c2);
    Ok(())
}

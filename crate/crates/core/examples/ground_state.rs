//! Perturbative ground state against exact diagonalization.
//!
//! The first-order state gets the g^4 term of the energy wrong; adding
//! |down,2> fixes it, so the second-order error falls off as g^6.

use rabi_crwa::crwa::{ground_state, GroundStateOrder};
use rabi_crwa::exact::{build_hamiltonian, diagonalize};
use rabi_crwa::ModelParams;

fn main() -> rabi_crwa::Result<()> {
    println!("{:>6} {:>14} {:>12} {:>12}", "g", "exact", "err 1st", "err 2nd");
    for g in [0.02, 0.05, 0.1, 0.2, 0.3] {
        let exact = diagonalize(&build_hamiltonian(&ModelParams::resonant(g)?, 40))?.ground_energy();
        let first = ground_state(g, GroundStateOrder::First);
        let second = ground_state(g, GroundStateOrder::Second);
        println!(
            "{g:>6} {exact:>14.10} {:>12.3e} {:>12.3e}",
            first.energy - exact,
            second.energy - exact
        );
    }
    let gs = ground_state(0.1, GroundStateOrder::Second);
    println!("\ng = 0.1: {:.6}|down,0> + {:.6}|up,1> + {:.6}|down,2>", gs.d0, gs.d1, gs.d2);
    Ok(())
}

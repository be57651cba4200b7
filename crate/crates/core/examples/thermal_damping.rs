//! Thermal damping of a stored cat: the closed-form characteristic function
//! against a Lindblad integration of the density matrix.

use mechcat::fock::{chi_of_rho, damp_rho, FockDensityMatrix};
use mechcat::phase_space::{CatState, CharacteristicFunction};
use mechcat::{Complex64, StoredState};

fn main() -> mechcat::Result<()> {
    let cat = CatState::odd(1.5)?;
    let (gamma, nbar) = (1.0, 0.8);
    let rho = FockDensityMatrix::cat(&cat, 40);
    let lambda = Complex64::new(0.4, 0.7);
    for t in [0.05, 0.2, 0.5] {
        let analytic = StoredState::new(cat, gamma, nbar, t)?.eval(lambda);
        let numeric = chi_of_rho(&damp_rho(&rho, gamma, nbar, t)?, lambda);
        println!("γt = {t:.2}: chi = {:+.8} (closed form) {:+.8} (Lindblad)", analytic.re, numeric.re);
    }
    Ok(())
}

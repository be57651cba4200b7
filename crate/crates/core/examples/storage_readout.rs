//! Negativity of the readout field after storing a heralded state.

use mechcat::pipeline::{Protocol, RunConfig};
use mechcat::phase_space::{negativity, wigner_from_chi, GridSpec};
use mechcat::Transmissivity;

fn main() -> mechcat::Result<()> {
    let protocol = Protocol::new(&RunConfig::default())?;
    let chi = protocol.herald(1, Transmissivity::from_power(0.51)?, 0.0).analytic()?;
    let spec = GridSpec::default();
    println!("readout leak {:.4}", protocol.readout.leak);
    println!("{:>10} {:>8} {:>10}", "tau_st", "T [K]", "N_cr");
    for temperature in [0.035, 0.5] {
        for tau in [0.0, 2e-7, 5e-7, 1e-6] {
            let field = protocol.storage(tau, temperature).apply(&chi)?;
            let n = negativity(&wigner_from_chi(&field, &spec)?)?;
            println!("{tau:>10.1e} {temperature:>8.3} {n:>10.4}");
        }
    }
    Ok(())
}

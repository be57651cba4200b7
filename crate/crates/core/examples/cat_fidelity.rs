//! How close is the heralded state to a cat? Scans the target amplitude
//! for a fixed splitter and prints the fidelity curve.

use mechcat::gaussian::SqueezedThermalSpec;
use mechcat::phase_space::{CatState, GridSpec, Parity};
use mechcat::pipeline::HeraldSetup;
use mechcat::Transmissivity;

fn main() -> mechcat::Result<()> {
    let spec = GridSpec::default();
    let mech = SqueezedThermalSpec::mechanical(1.1, 0.0)?;
    for (n, power) in [(1, 0.51), (2, 0.46), (3, 0.65)] {
        let chi = HeraldSetup::new(mech, 0.0, Transmissivity::from_power(power)?, n).analytic()?;
        let parity = Parity::of_photon_count(n);
        print!("n = {n} ({}):", parity.symbol());
        for alpha in [0.8, 1.2, 1.6, 2.0, 2.4] {
            let f = chi.fidelity_with_cat(&CatState::new(alpha, parity)?, &spec)?;
            print!("  F({alpha}) = {f:.3}");
        }
        println!();
    }
    Ok(())
}

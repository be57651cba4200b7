//! Choose the splitter transmissivity, and optionally the cavity squeezing,
//! that maximize the cat fidelity.

use mechcat::phase_space::{GridSpec, Parity};
use mechcat::pipeline::{optimize_fidelity, Protocol, RcMode, RunConfig};

fn main() -> mechcat::Result<()> {
    let protocol = Protocol::new(&RunConfig::default())?;
    let spec = GridSpec::default();
    for (n, alpha) in [(1, 1.2), (3, 3.0), (4, 3.0)] {
        let parity = Parity::of_photon_count(n);
        for rc in [RcMode::Zero, RcMode::Optimize] {
            let o = optimize_fidelity(&protocol, n, alpha, parity, None, rc, &spec)?;
            println!(
                "n = {n}, alpha = {alpha}, {rc:?}: T = {:.4}, r_c = {:.4}, F = {:.4} ({} evaluations)",
                o.transmissivity, o.cavity_r, o.fidelity, o.evaluations
            );
        }
    }
    Ok(())
}

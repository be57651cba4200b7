//! The same herald computed twice: from the Gaussian phase-space formulas
//! and by projecting a truncated two-mode density matrix.

use mechcat::pipeline::oracle::{compare, OracleCase, Tolerances};
use mechcat::phase_space::GridSpec;

fn main() -> mechcat::Result<()> {
    let cases = [
        OracleCase { n: 1, r_m: 1.1, nbar_m: 0.0, cavity_r: 0.0, transmissivity: 0.51, alpha: 1.2 },
        OracleCase { n: 2, r_m: 0.7, nbar_m: 0.03, cavity_r: 0.4, transmissivity: 0.6, alpha: 1.5 },
    ];
    for case in &cases {
        let o = compare(case, &GridSpec::default(), &Tolerances::default())?;
        println!("{case:?}");
        println!("  analytic {:?}", o.analytic);
        println!("  fock     {:?} (dim {})", o.fock, o.fock_dim);
        println!(
            "  |dP| {:.1e}  |dF| {:.1e}  |dN| {:.1e}  |dchi| {:.1e}  {}",
            o.delta_probability,
            o.delta_fidelity,
            o.delta_negativity,
            o.delta_chi,
            if o.passed { "ok" } else { "MISMATCH" }
        );
    }
    Ok(())
}

//! Wigner function of a heralded state on a grid, written as CSV with a
//! JSON sidecar describing the quadrature.
//!
//! Usage: `cargo run --example wigner_grid -- [out_dir]`

use std::path::PathBuf;

use mechcat::gaussian::SqueezedThermalSpec;
use mechcat::phase_space::{negativity, wigner_from_chi, GridSpec};
use mechcat::pipeline::HeraldSetup;
use mechcat::Transmissivity;

fn main() -> mechcat::Result<()> {
    let out = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(std::env::temp_dir);
    let setup = HeraldSetup::new(SqueezedThermalSpec::mechanical(1.1, 0.0)?, 0.0, Transmissivity::from_power(0.65)?, 3);
    let chi = setup.analytic()?;
    let grid = wigner_from_chi(&chi, &GridSpec::default())?;

    println!("integral   {:.6}", grid.integral());
    println!("negativity {:.4}", negativity(&grid)?);
    println!("W(0)       {:+.4}", grid.value_at_origin());
    println!("min W      {:+.4}", grid.min_value());
    let files = grid.write(&out, "wigner_n3")?;
    println!("wrote {} and {} to {}", files[0], files[1], out.display());
    Ok(())
}

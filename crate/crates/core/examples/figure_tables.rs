//! Write the heralded-state table and its six Wigner grids, then the
//! storage and temperature sweeps, into a run directory.

use mechcat::pipeline::figures::{fig3, fig4, write_fig3, write_fig4};
use mechcat::pipeline::{Protocol, RunConfig};

fn main() -> mechcat::Result<()> {
    let dir = std::env::args().nth(1).map(Into::into).unwrap_or_else(|| std::env::temp_dir().join("mechcat-figures"));
    std::fs::create_dir_all(&dir)?;
    let cfg = RunConfig::default();
    let protocol = Protocol::new(&cfg)?;

    let states = fig3(&protocol, &cfg)?;
    for s in &states {
        let r = &s.row;
        println!(
            "n = {} T = {:.2} alpha = {:.1}: P = {:.4} F = {:.3} N = {:.3}",
            r.n, r.transmissivity, r.alpha, r.herald_probability, r.fidelity, r.negativity
        );
    }
    let mut files = write_fig3(&dir, &states)?;
    files.extend(write_fig4(&dir, &fig4(&protocol, &cfg)?)?);
    println!("{} files in {}", files.len(), dir.display());
    Ok(())
}

//! Drive the whole protocol from a JSON configuration and print the manifest.
//!
//! Usage: `cargo run --example run_config -- [config.json]`

use mechcat::pipeline::{run_pipeline, Output, RunConfig};

const DEMO: &str = r#"{
    "device": { "temperature_k": 0.035 },
    "schedule": { "tau_st_s": 5e-7 },
    "task": { "n": 2, "alpha": [1.0, 1.2], "transmissivity": 0.46 }
}"#;

fn main() -> mechcat::Result<()> {
    let cfg = match std::env::args().nth(1) {
        Some(path) => RunConfig::load(path.as_ref())?,
        None => RunConfig::from_json(DEMO)?,
    };
    let manifest = run_pipeline(&cfg, &Output::default())?;
    println!("{}", serde_json::to_string_pretty(&manifest.scalars())?);
    Ok(())
}

//! Configuration, orchestration and artifact output of the full protocol.

pub mod config;
pub mod model;
pub mod optimize;

pub use config::{RcMode, RunConfig};
pub use model::{HeraldSetup, Protocol};
pub use optimize::{optimize_fidelity, FidelityOptimum};
pub mod run;

pub use run::{run_pipeline, run_stages, Output, RunManifest, Stage};
pub mod figures;
pub mod oracle;
pub mod commands;

pub use commands::{execute, Command, Outcome};

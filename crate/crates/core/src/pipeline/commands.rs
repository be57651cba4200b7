//! Subcommand dispatch shared by the binary and the tests.

use std::path::Path;
use std::time::Instant;

use serde::Serialize;

use super::config::RunConfig;
use super::figures::{write_csv, fig2, fig3, fig4, write_fig2, write_fig3, write_fig4};
use super::model::Protocol;
use super::optimize::{optimize_fidelity, FidelityOptimum};
use super::oracle::{figure_cases, oracle_check, random_cases, Tolerances};
use super::run::{run_stages, Output, RunManifest, Stage};
use crate::error::Result;

/// Seed of the randomized oracle cases unless overridden.
pub const DEFAULT_ORACLE_SEED: u64 = 20_240_611;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Squeeze,
    Subtract,
    Store,
    Readout,
    Pipeline,
    Optimize,
    Fig2,
    Fig3,
    Fig4,
    OracleCheck { random: usize, seed: u64 },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Squeeze => "squeeze",
            Command::Subtract => "subtract",
            Command::Store => "store",
            Command::Readout => "readout",
            Command::Pipeline => "pipeline",
            Command::Optimize => "optimize",
            Command::Fig2 => "fig2",
            Command::Fig3 => "fig3",
            Command::Fig4 => "fig4",
            Command::OracleCheck { .. } => "oracle-check",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub manifest: RunManifest,
    /// False when the Fock cross-check found a disagreement.
    pub oracle_passed: bool,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.oracle_passed {
            0
        } else {
            4
        }
    }
}

#[derive(Debug, Clone, Serialize)]
struct OptimizeRow {
    alpha: f64,
    n: u32,
    #[serde(flatten)]
    optimum: FidelityOptimum,
}

fn finish(mut manifest: RunManifest, dir: Option<&Path>, started: Instant) -> Result<Outcome> {
    if let Some(dir) = dir {
        manifest.artifacts.push("manifest.json".into());
        manifest.wall_clock_s = started.elapsed().as_secs_f64();
        manifest.write(dir)?;
    } else {
        manifest.wall_clock_s = started.elapsed().as_secs_f64();
    }
    Ok(Outcome { manifest, oracle_passed: true })
}

pub fn execute(command: Command, cfg: &RunConfig, out: &Output) -> Result<Outcome> {
    let stage = match command {
        Command::Squeeze => Some(Stage::Squeeze),
        Command::Subtract => Some(Stage::Subtract),
        Command::Store => Some(Stage::Store),
        Command::Readout | Command::Pipeline => Some(Stage::Readout),
        _ => None,
    };
    if let Some(stage) = stage {
        let manifest = run_stages(cfg, stage, command.name(), out)?;
        return Ok(Outcome { manifest, oracle_passed: true });
    }

    let started = Instant::now();
    cfg.validate()?;
    let dir = out.prepare()?;
    let protocol = Protocol::new(cfg)?;
    let mut manifest = RunManifest::new(command.name(), cfg, &protocol.derived)?;
    match command {
        Command::Optimize => {
            let task = &cfg.task;
            let rows = task
                .alpha
                .iter()
                .map(|&alpha| {
                    let optimum = optimize_fidelity(&protocol, task.n, alpha, cfg.parity(), None, task.rc, &task.grid)?;
                    Ok(OptimizeRow { alpha, n: task.n, optimum })
                })
                .collect::<Result<Vec<_>>>()?;
            if let Some(dir) = dir {
                manifest.artifacts.push(write_csv(dir, "optimize.csv", &rows)?);
            }
            manifest.tables = serde_json::to_value(&rows)?;
        }
        Command::Fig2 => {
            let rows = fig2(&protocol, cfg)?;
            if let Some(dir) = dir {
                manifest.artifacts.extend(write_fig2(dir, &rows)?);
            }
            manifest.tables = serde_json::to_value(&rows)?;
        }
        Command::Fig3 => {
            let states = fig3(&protocol, cfg)?;
            if let Some(dir) = dir {
                manifest.artifacts.extend(write_fig3(dir, &states)?);
            }
            let rows: Vec<_> = states.iter().map(|s| &s.row).collect();
            manifest.tables = serde_json::to_value(rows)?;
        }
        Command::Fig4 => {
            let tables = fig4(&protocol, cfg)?;
            if let Some(dir) = dir {
                manifest.artifacts.extend(write_fig4(dir, &tables)?);
            }
            manifest.tables = serde_json::to_value(&tables)?;
        }
        Command::OracleCheck { random, seed } => {
            let mut cases = figure_cases(&protocol, &cfg.task.sweeps.cases);
            cases.extend(random_cases(random, seed));
            let report = oracle_check(&cases, seed, &cfg.task.grid, Tolerances::default())?;
            for f in report.failures() {
                log::error!("oracle mismatch: {f:?}");
            }
            let passed = report.passed;
            if let Some(dir) = dir {
                std::fs::write(dir.join("oracle_report.json"), serde_json::to_string_pretty(&report)?)?;
                manifest.artifacts.push("oracle_report.json".into());
            }
            manifest.tables = serde_json::to_value(&report)?;
            let mut outcome = finish(manifest, dir, started)?;
            outcome.oracle_passed = passed;
            return Ok(outcome);
        }
        _ => unreachable!("stage commands return early"),
    }
    finish(manifest, dir, started)
}

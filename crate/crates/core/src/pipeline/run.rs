//! Step-by-step execution of a configured run and its manifest.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{RcMode, RunConfig};
use super::model::{Derived, Protocol};
use super::optimize::optimize_fidelity;
use crate::error::{Error, Result};
use crate::gaussian::{squeezed_thermal_moments, ModeKind, TwoModeCovariance};
use crate::phase_space::{negativity, wigner_from_chi, CatState, GaussianChi, GridSpec, WignerGrid};

/// How far along the protocol a run goes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Squeeze,
    Subtract,
    Store,
    Readout,
}

/// Where artifacts go. `None` keeps the run in memory.
#[derive(Debug, Clone, Default)]
pub struct Output {
    pub dir: Option<PathBuf>,
    pub force: bool,
}

impl Output {
    pub fn to(dir: impl Into<PathBuf>, force: bool) -> Self {
        Output { dir: Some(dir.into()), force }
    }

    /// Create the run directory; an existing non-empty one needs `force`.
    pub fn prepare(&self) -> Result<Option<&Path>> {
        let Some(dir) = self.dir.as_deref() else { return Ok(None) };
        if dir.exists() {
            let occupied = fs::read_dir(dir)?.next().is_some();
            if occupied && !self.force {
                return Err(Error::Config(format!(
                    "output directory {} is not empty; pass --force to overwrite",
                    dir.display()
                )));
            }
        }
        fs::create_dir_all(dir)?;
        Ok(Some(dir))
    }
}

/// Scalars for one target cat amplitude.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeraldResult {
    pub alpha: f64,
    pub n: u32,
    pub parity: crate::phase_space::Parity,
    /// Power transmissivity used for the herald.
    pub transmissivity: f64,
    pub cavity_r: f64,
    pub sigma: TwoModeCovariance,
    pub herald_probability: f64,
    pub fidelity: f64,
    /// Wigner negativity of the heralded mechanical state.
    pub negativity_mech: f64,
    /// After storage, with a perfect swap.
    pub negativity_stored: Option<f64>,
    /// Of the readout field.
    pub negativity_readout: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SqueezeResult {
    /// Moments `⟨P²⟩`, `⟨X²⟩` of the mechanics used for heralding.
    pub a: f64,
    pub b: f64,
    pub purity: f64,
    pub negativity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: RunConfig,
    pub derived: serde_json::Value,
    pub squeeze: SqueezeResult,
    pub results: Vec<HeraldResult>,
    /// Figure tables or oracle reports, when the command produces them.
    #[serde(default, skip_serializing_if = "serde_json::Value::is_null")]
    pub tables: serde_json::Value,
    pub artifacts: Vec<String>,
    pub wall_clock_s: f64,
}

impl RunManifest {
    pub fn new(command: &str, config: &RunConfig, derived: &Derived) -> Result<Self> {
        Ok(RunManifest {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            config: config.clone(),
            derived: serde_json::to_value(derived)?,
            squeeze: SqueezeResult { a: 1.0, b: 1.0, purity: 1.0, negativity: 0.0 },
            results: Vec::new(),
            tables: serde_json::Value::Null,
            artifacts: Vec::new(),
            wall_clock_s: 0.0,
        })
    }

    /// Everything except timing, for reproducibility checks.
    pub fn scalars(&self) -> serde_json::Value {
        serde_json::json!({
            "derived": self.derived,
            "squeeze": self.squeeze,
            "results": self.results,
            "tables": self.tables,
        })
    }

    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        let path = dir.join("manifest.json");
        fs::write(&path, serde_json::to_string_pretty(self)?)?;
        Ok(path)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }
}

fn wigner_negativity(grid: &WignerGrid) -> Result<f64> {
    negativity(grid)
}

struct Computed {
    result: HeraldResult,
    grids: Vec<(String, WignerGrid)>,
}

fn herald_one(protocol: &Protocol, cfg: &RunConfig, stage: Stage, index: usize, alpha: f64) -> Result<Computed> {
    let task = &cfg.task;
    let spec = &task.grid;
    let parity = cfg.parity();
    let fixed_t = protocol.transmissivity(task.transmissivity)?;
    let (t, cavity_r) = match (fixed_t, task.rc) {
        (Some(t), RcMode::Zero) => (t, 0.0),
        (Some(t), RcMode::Fixed { value }) => (t, value),
        (fixed, rc) => {
            let o = optimize_fidelity(protocol, task.n, alpha, parity, fixed, rc, spec)?;
            log::info!("alpha = {alpha}: optimum T = {:.4}, r_c = {:.4}, F = {:.4}", o.transmissivity, o.cavity_r, o.fidelity);
            (crate::params::Transmissivity::from_power(o.transmissivity)?, o.cavity_r)
        }
    };
    let setup = protocol.herald(task.n, t, cavity_r);
    let chi = setup.analytic().map_err(Error::at("subtract"))?;
    let cat = CatState::new(alpha, parity)?;
    let fidelity = chi.fidelity_with_cat(&cat, spec).map_err(Error::at("subtract"))?;
    let mech_grid = wigner_from_chi(&chi, spec).map_err(Error::at("subtract"))?;
    let negativity_mech = wigner_negativity(&mech_grid).map_err(Error::at("subtract"))?;
    let mut grids = vec![(format!("wigner_mech_{index}"), mech_grid)];

    let tau_st = protocol.schedule.tau_st;
    let mut negativity_stored = None;
    if stage >= Stage::Store {
        let stored = protocol.storage_only(tau_st).apply(&chi)?;
        let grid = wigner_from_chi(&stored, spec).map_err(Error::at("store"))?;
        negativity_stored = Some(wigner_negativity(&grid).map_err(Error::at("store"))?);
        grids.push((format!("wigner_stored_{index}"), grid));
    }
    let mut negativity_readout = None;
    if stage >= Stage::Readout {
        let field = protocol.storage(tau_st, protocol.params.temperature).apply(&chi)?;
        let grid = wigner_from_chi(&field, spec).map_err(Error::at("readout"))?;
        negativity_readout = Some(wigner_negativity(&grid).map_err(Error::at("readout"))?);
        grids.push((format!("wigner_readout_{index}"), grid));
    }
    Ok(Computed {
        result: HeraldResult {
            alpha,
            n: task.n,
            parity,
            transmissivity: t.power(),
            cavity_r,
            sigma: *chi.sigma(),
            herald_probability: chi.probability(),
            fidelity,
            negativity_mech,
            negativity_stored,
            negativity_readout,
        },
        grids,
    })
}

/// Run the protocol up to `stage`, writing Wigner grids and the manifest
/// when an output directory is given.
pub fn run_stages(cfg: &RunConfig, stage: Stage, command: &str, out: &Output) -> Result<RunManifest> {
    let started = Instant::now();
    cfg.validate()?;
    let dir = out.prepare()?;
    let protocol = Protocol::new(cfg)?;
    let mut manifest = RunManifest::new(command, cfg, &protocol.derived)?;

    let moments = squeezed_thermal_moments(&protocol.mech, ModeKind::Mechanical).map_err(Error::at("squeeze"))?;
    let squeezed = GaussianChi::from(moments);
    let squeeze_grid = wigner_from_chi(&squeezed, &cfg.task.grid).map_err(Error::at("squeeze"))?;
    manifest.squeeze = SqueezeResult {
        a: moments.a,
        b: moments.b,
        purity: moments.purity(),
        negativity: wigner_negativity(&squeeze_grid).map_err(Error::at("squeeze"))?,
    };
    let mut grids = vec![("wigner_squeezed".to_string(), squeeze_grid)];

    if stage >= Stage::Subtract {
        let computed: Vec<Computed> = cfg
            .task
            .alpha
            .par_iter()
            .enumerate()
            .map(|(i, &alpha)| herald_one(&protocol, cfg, stage, i, alpha))
            .collect::<Result<_>>()?;
        for c in computed {
            manifest.results.push(c.result);
            grids.extend(c.grids);
        }
    }

    if let Some(dir) = dir {
        for (stem, grid) in &grids {
            manifest.artifacts.extend(grid.write(dir, stem)?);
        }
        manifest.artifacts.push("manifest.json".into());
        manifest.wall_clock_s = started.elapsed().as_secs_f64();
        manifest.write(dir)?;
    } else {
        manifest.wall_clock_s = started.elapsed().as_secs_f64();
    }
    Ok(manifest)
}

/// The whole protocol: squeezing, heralding, storage and readout.
pub fn run_pipeline(cfg: &RunConfig, out: &Output) -> Result<RunManifest> {
    run_stages(cfg, Stage::Readout, "pipeline", out)
}

/// Fresh grid settings scaled by `factor` (β points and λ panels).
pub fn scaled_grid(spec: &GridSpec, factor: f64) -> Result<GridSpec> {
    spec.scaled(factor)
}

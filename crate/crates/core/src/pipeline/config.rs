//! JSON run configuration. Every section is optional and defaults to the
//! reference device and schedule; unknown keys are rejected.

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{optical_angular_frequency, Drive, Drives, PhysicalParams, PulseSchedule, DEFAULT_WAVELENGTH_M};
use crate::phase_space::{GridSpec, Parity};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DeviceConfig {
    pub omega_m_hz: f64,
    /// Optical wavelength; mutually exclusive with `omega_c_hz`.
    pub wavelength_m: Option<f64>,
    pub omega_c_hz: Option<f64>,
    pub kappa_hz: f64,
    pub gamma_hz: f64,
    pub g0_hz: f64,
    pub temperature_k: f64,
}

impl Default for DeviceConfig {
    fn default() -> Self {
        DeviceConfig {
            omega_m_hz: 5.25e9,
            wavelength_m: None,
            omega_c_hz: None,
            kappa_hz: 846e6,
            gamma_hz: 13.8e3,
            g0_hz: 869e3,
            temperature_k: 0.035,
        }
    }
}

impl DeviceConfig {
    pub fn params(&self) -> Result<PhysicalParams> {
        let omega_c = match (self.wavelength_m, self.omega_c_hz) {
            (Some(_), Some(_)) => {
                return Err(Error::Config("give either wavelength_m or omega_c_hz, not both".into()))
            }
            (Some(w), None) if w > 0.0 => optical_angular_frequency(w),
            (Some(w), None) => return Err(Error::Config(format!("wavelength must be positive, got {w}"))),
            (None, Some(f)) => 2.0 * PI * f,
            (None, None) => optical_angular_frequency(DEFAULT_WAVELENGTH_M),
        };
        let p = PhysicalParams::from_hz(
            self.omega_m_hz,
            Some(omega_c / (2.0 * PI)),
            self.kappa_hz,
            self.gamma_hz,
            self.g0_hz,
            self.temperature_k,
        )?;
        Ok(p)
    }
}

/// Exactly one of `power_w` or `coupling_hz`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub power_w: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coupling_hz: Option<f64>,
}

impl DriveConfig {
    pub fn power(w: f64) -> Self {
        DriveConfig { power_w: Some(w), coupling_hz: None }
    }

    pub fn coupling_hz(hz: f64) -> Self {
        DriveConfig { power_w: None, coupling_hz: Some(hz) }
    }

    fn resolve(&self, name: &str) -> Result<Drive> {
        match (self.power_w, self.coupling_hz) {
            (Some(p), None) if p >= 0.0 => Ok(Drive::Power(p)),
            (None, Some(g)) if g >= 0.0 => Ok(Drive::Coupling(2.0 * PI * g)),
            (Some(_), Some(_)) | (None, None) => Err(Error::Config(format!(
                "drive {name}: give exactly one of power_w or coupling_hz"
            ))),
            _ => Err(Error::Config(format!("drive {name} must be non-negative"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScheduleConfig {
    pub tau_rb_s: f64,
    pub tau_wt_s: f64,
    pub tau_ps_s: f64,
    pub tau_st_s: f64,
    pub tau_rd_s: f64,
    pub red1: DriveConfig,
    pub blue1: DriveConfig,
    pub red2: DriveConfig,
    pub red3: DriveConfig,
}

impl Default for ScheduleConfig {
    fn default() -> Self {
        ScheduleConfig {
            tau_rb_s: 30e-9,
            tau_wt_s: 0.0,
            tau_ps_s: 30e-9,
            tau_st_s: 1e-6,
            tau_rd_s: 30e-9,
            red1: DriveConfig::power(80e-6),
            blue1: DriveConfig::power(50e-6),
            red2: DriveConfig::power(0.2e-6),
            red3: DriveConfig::coupling_hz(65e6),
        }
    }
}

impl ScheduleConfig {
    pub fn schedule(&self) -> Result<PulseSchedule> {
        let s = PulseSchedule {
            tau_rb: self.tau_rb_s,
            tau_wt: self.tau_wt_s,
            tau_ps: self.tau_ps_s,
            tau_st: self.tau_st_s,
            tau_rd: self.tau_rd_s,
            drives: Drives {
                red1: self.red1.resolve("red1")?,
                blue1: self.blue1.resolve("blue1")?,
                red2: self.red2.resolve("red2")?,
                red3: self.red3.resolve("red3")?,
            },
        };
        s.validate().map_err(|e| Error::Config(e.to_string()))?;
        Ok(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransmissivityKeyword {
    /// Choose 𝒯 by maximizing the cat fidelity.
    Optimize,
    /// Use `exp(-G_2r τ_ps)` from the subtraction pulse.
    Pulse,
}

/// Either a power transmissivity in (0, 1] or a keyword.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TransmissivitySetting {
    Power(f64),
    Keyword(TransmissivityKeyword),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum RcMode {
    Zero,
    Fixed { value: f64 },
    Optimize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StorageConfig {
    /// Damp the mechanics during the readout pulse as well as during storage.
    pub damp_during_readout: bool,
}

impl Default for StorageConfig {
    fn default() -> Self {
        StorageConfig { damp_during_readout: false }
    }
}

/// One heralded state of the figure tables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeraldCase {
    pub n: u32,
    pub transmissivity: f64,
    pub alpha: f64,
}

pub fn reference_cases() -> Vec<HeraldCase> {
    [(1, 0.51, 1.2), (3, 0.65, 2.0), (5, 0.77, 3.0), (2, 0.46, 1.2), (4, 0.59, 2.0), (6, 0.70, 3.0)]
        .into_iter()
        .map(|(n, transmissivity, alpha)| HeraldCase { n, transmissivity, alpha })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    /// Storage times of the τ_st sweep.
    pub tau_st_s: Vec<f64>,
    /// Bath temperatures of the temperature sweep.
    pub temperature_k: Vec<f64>,
    /// Storage time held fixed during the temperature sweep.
    pub tau_st_for_temperature_s: f64,
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub alpha_step: f64,
    pub photons: Vec<u32>,
    /// States used by the fig3/fig4 tables.
    pub cases: Vec<HeraldCase>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            tau_st_s: (0..=10).map(|k| f64::from(k) * 1e-7).collect(),
            temperature_k: vec![0.035, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0],
            tau_st_for_temperature_s: 100e-9,
            alpha_min: 0.5,
            alpha_max: 3.5,
            alpha_step: 0.1,
            photons: (1..=6).collect(),
            cases: reference_cases(),
        }
    }
}

impl SweepConfig {
    pub fn alphas(&self) -> Result<Vec<f64>> {
        if !(self.alpha_step > 0.0 && self.alpha_min > 0.0 && self.alpha_max >= self.alpha_min) {
            return Err(Error::Config("alpha sweep needs 0 < min <= max and step > 0".into()));
        }
        let count = ((self.alpha_max - self.alpha_min) / self.alpha_step + 1e-9).floor() as usize;
        Ok((0..=count).map(|k| self.alpha_min + k as f64 * self.alpha_step).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TaskConfig {
    /// Photons detected by the herald.
    pub n: u32,
    /// Cat amplitudes the heralded state is compared with.
    pub alpha: Vec<f64>,
    /// Target cat parity; must match the parity of `n` when given.
    pub parity: Option<Parity>,
    pub transmissivity: TransmissivitySetting,
    /// Override the mechanical squeezing degree (otherwise the steady state).
    pub r_m: Option<f64>,
    /// Override the mechanical thermal occupation (otherwise the steady state).
    pub nbar_m: Option<f64>,
    pub rc: RcMode,
    pub grid: GridSpec,
    pub storage: StorageConfig,
    pub sweeps: SweepConfig,
    pub output_dir: Option<String>,
}

impl Default for TaskConfig {
    fn default() -> Self {
        TaskConfig {
            n: 1,
            alpha: vec![1.2],
            parity: None,
            transmissivity: TransmissivitySetting::Power(0.51),
            r_m: Some(1.1),
            nbar_m: None,
            rc: RcMode::Zero,
            grid: GridSpec::default(),
            storage: StorageConfig::default(),
            sweeps: SweepConfig::default(),
            output_dir: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub device: DeviceConfig,
    pub schedule: ScheduleConfig,
    pub task: TaskConfig,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn parity(&self) -> Parity {
        self.task.parity.unwrap_or_else(|| Parity::of_photon_count(self.task.n))
    }

    pub fn validate(&self) -> Result<()> {
        self.device.params()?;
        self.schedule.schedule()?;
        let t = &self.task;
        if let Some(p) = t.parity {
            if p != Parity::of_photon_count(t.n) {
                return Err(Error::Config(format!(
                    "n = {} heralds a {:?} cat, but parity {:?} was requested",
                    t.n,
                    Parity::of_photon_count(t.n),
                    p
                )));
            }
        }
        if t.alpha.is_empty() || t.alpha.iter().any(|a| !(a.is_finite() && *a >= 0.0)) {
            return Err(Error::Config("alpha must be a non-empty list of amplitudes >= 0".into()));
        }
        if let TransmissivitySetting::Power(p) = t.transmissivity {
            if !(p > 0.0 && p <= 1.0) {
                return Err(Error::Config(format!("transmissivity {p} outside (0, 1]")));
            }
        }
        if let Some(r) = t.r_m {
            if !(r.is_finite() && r >= 0.0) {
                return Err(Error::Config(format!("r_m must be >= 0, got {r}")));
            }
        }
        if let Some(nb) = t.nbar_m {
            if !(nb.is_finite() && nb >= 0.0) {
                return Err(Error::Config(format!("nbar_m must be >= 0, got {nb}")));
            }
        }
        if let RcMode::Fixed { value } = t.rc {
            if !(0.0..=3.0).contains(&value) {
                return Err(Error::Config(format!("cavity squeezing {value} outside [0, 3]")));
            }
        }
        t.grid.validate()?;
        for c in &t.sweeps.cases {
            if !(c.transmissivity > 0.0 && c.transmissivity <= 1.0 && c.alpha > 0.0) {
                return Err(Error::Config(format!("invalid sweep case {c:?}")));
            }
        }
        if t.sweeps.tau_st_s.iter().any(|x| *x < 0.0) || t.sweeps.temperature_k.iter().any(|x| *x < 0.0) {
            return Err(Error::Config("sweep values must be non-negative".into()));
        }
        Ok(())
    }
}

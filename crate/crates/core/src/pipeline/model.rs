//! The protocol resolved from a configuration: squeezing, heralding and the
//! storage/readout settings, with both the analytic and the Fock route to
//! the heralded state.

use serde::Serialize;

use super::config::{RunConfig, TransmissivityKeyword, TransmissivitySetting};
use crate::conditioning::ConditionalChi;
use crate::decoherence::{ReadoutMap, StorageReadout};
use crate::error::{Error, Result};
use crate::fock::{beam_splitter_project, build_squeezed_thermal, with_auto_dim, FockDensityMatrix, DEFAULT_DIM};
use crate::gaussian::{
    assemble_output_covariance, nominal_squeezing, squeezed_thermal_moments, steady_state_squeezing, ModeKind,
    SingleModeGaussian, SqueezedThermalSpec, TwoModeCovariance,
};
use crate::params::{adiabatic_rate, validate_timescales, Couplings, PhysicalParams, PulseSchedule, TimescaleWarning, Transmissivity};

/// One beam-splitter herald: mechanical input, cavity squeezing, splitter
/// and photon count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HeraldSetup {
    pub mech: SqueezedThermalSpec,
    pub cavity_r: f64,
    pub transmissivity: Transmissivity,
    pub n: u32,
}

/// Heralded state from the truncated Fock model.
#[derive(Debug, Clone)]
pub struct FockHerald {
    pub rho: FockDensityMatrix,
    pub probability: f64,
    pub dim: usize,
}

impl HeraldSetup {
    pub fn new(mech: SqueezedThermalSpec, cavity_r: f64, transmissivity: Transmissivity, n: u32) -> Self {
        HeraldSetup { mech, cavity_r, transmissivity, n }
    }

    pub fn cavity(&self) -> Result<SqueezedThermalSpec> {
        SqueezedThermalSpec::cavity(self.cavity_r)
    }

    pub fn mechanical_moments(&self) -> Result<SingleModeGaussian> {
        squeezed_thermal_moments(&self.mech, ModeKind::Mechanical)
    }

    pub fn sigma(&self) -> Result<TwoModeCovariance> {
        let cav = squeezed_thermal_moments(&self.cavity()?, ModeKind::Cavity)?;
        let sigma = assemble_output_covariance(&self.mechanical_moments()?, &cav, self.transmissivity);
        sigma.validate()?;
        Ok(sigma)
    }

    pub fn analytic(&self) -> Result<ConditionalChi> {
        ConditionalChi::new(self.sigma()?, self.n)
    }

    /// Project the two-mode density matrix, doubling the truncation until
    /// the populations near the cut are negligible.
    pub fn fock(&self) -> Result<FockHerald> {
        let cav = self.cavity()?;
        let ((rho, probability), dim) = with_auto_dim(DEFAULT_DIM, |d| {
            let rho_m = build_squeezed_thermal(&self.mech, d)?;
            let rho_c = build_squeezed_thermal(&cav, d)?;
            beam_splitter_project(&rho_m, &rho_c, self.transmissivity, self.n)
        })?;
        Ok(FockHerald { rho, probability, dim })
    }
}

/// Quantities derived from the device and schedule before any heralding.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Derived {
    pub nbar_th: f64,
    pub couplings: Couplings,
    /// `atanh(g_1b/g_1r)` of the lossless limit.
    pub r_m_nominal: f64,
    pub r_m_steady: f64,
    pub nbar_m_steady: f64,
    /// Squeezing used for heralding, after overrides.
    pub r_m: f64,
    pub nbar_m: f64,
    /// Power transmissivity of the subtraction pulse.
    pub pulse_transmissivity: f64,
    pub readout_leak: f64,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct Protocol {
    pub params: PhysicalParams,
    pub schedule: PulseSchedule,
    pub derived: Derived,
    pub mech: SqueezedThermalSpec,
    pub readout: ReadoutMap,
    pub damp_during_readout: bool,
}

impl Protocol {
    pub fn new(cfg: &RunConfig) -> Result<Self> {
        let params = cfg.device.params()?;
        let schedule = cfg.schedule.schedule()?;
        let warnings: Vec<TimescaleWarning> = validate_timescales(&params, &schedule);
        for w in &warnings {
            log::warn!("{w}");
        }
        let couplings = schedule.couplings(&params).map_err(Error::at("squeeze"))?;
        let nbar_th = params.nbar_th();
        let r_m_nominal = nominal_squeezing(couplings.g_1r, couplings.g_1b).map_err(Error::at("squeeze"))?;
        let steady = steady_state_squeezing(couplings.g_1r, couplings.g_1b, params.kappa_c, params.gamma_m, nbar_th)
            .map_err(Error::at("squeeze"))?;
        let mech = SqueezedThermalSpec::mechanical(
            cfg.task.r_m.unwrap_or(steady.r),
            cfg.task.nbar_m.unwrap_or(steady.nbar),
        )?;
        let pulse = Transmissivity::from_pulse(adiabatic_rate(couplings.g_2r, params.kappa_c), schedule.tau_ps)
            .map_err(Error::at("subtract"))?;
        let readout = ReadoutMap::new(adiabatic_rate(couplings.g_3r, params.kappa_c), schedule.tau_rd)
            .map_err(Error::at("readout"))?;
        let derived = Derived {
            nbar_th,
            couplings,
            r_m_nominal,
            r_m_steady: steady.r,
            nbar_m_steady: steady.nbar,
            r_m: mech.r,
            nbar_m: mech.nbar,
            pulse_transmissivity: pulse.power(),
            readout_leak: readout.leak,
            warnings: warnings.iter().map(ToString::to_string).collect(),
        };
        Ok(Protocol {
            params,
            schedule,
            derived,
            mech,
            readout,
            damp_during_readout: cfg.task.storage.damp_during_readout,
        })
    }

    /// Fixed transmissivity of the task, or `None` when it is to be optimized.
    pub fn transmissivity(&self, setting: TransmissivitySetting) -> Result<Option<Transmissivity>> {
        match setting {
            TransmissivitySetting::Power(p) => Transmissivity::from_power(p).map(Some),
            TransmissivitySetting::Keyword(TransmissivityKeyword::Pulse) => {
                Transmissivity::from_power(self.derived.pulse_transmissivity).map(Some)
            }
            TransmissivitySetting::Keyword(TransmissivityKeyword::Optimize) => Ok(None),
        }
    }

    pub fn herald(&self, n: u32, t: Transmissivity, cavity_r: f64) -> HeraldSetup {
        HeraldSetup::new(self.mech, cavity_r, t, n)
    }

    /// Storage for `tau_st` in a bath at `temperature`, then the readout swap.
    pub fn storage(&self, tau_st: f64, temperature: f64) -> StorageReadout {
        StorageReadout {
            gamma_m: self.params.gamma_m,
            nbar_th: self.params.with_temperature(temperature).nbar_th(),
            tau_st,
            map: self.readout,
            damp_during_readout: self.damp_during_readout,
        }
    }

    /// Storage only, with a perfect swap.
    pub fn storage_only(&self, tau_st: f64) -> StorageReadout {
        StorageReadout {
            map: ReadoutMap::ideal(),
            damp_during_readout: false,
            ..self.storage(tau_st, self.params.temperature)
        }
    }
}

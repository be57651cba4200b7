//! Physical constants, the pulse schedule and the derived rates of the
//! linearized optomechanical model.
//!
//! All frequencies and rates are stored as angular quantities (rad/s). The
//! `*_hz` constructors take ordinary frequencies ν = ω/2π.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reduced Planck constant (J s).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant (J/K).
pub const K_B: f64 = 1.380_649e-23;
/// Speed of light (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Telecom wavelength used when no optical frequency is supplied.
pub const DEFAULT_WAVELENGTH_M: f64 = 1550e-9;

/// Factor used for "much less than" in the timescale checks.
pub const MUCH_LESS_FACTOR: f64 = 10.0;

const TWO_PI: f64 = 2.0 * PI;

/// Angular cavity frequency for a vacuum wavelength.
pub fn optical_angular_frequency(wavelength_m: f64) -> f64 {
    TWO_PI * SPEED_OF_LIGHT / wavelength_m
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    pub omega_m: f64,
    pub omega_c: Option<f64>,
    pub kappa_c: f64,
    pub gamma_m: f64,
    pub g0: f64,
    pub temperature: f64,
}

impl PhysicalParams {
    pub fn new(
        omega_m: f64,
        omega_c: Option<f64>,
        kappa_c: f64,
        gamma_m: f64,
        g0: f64,
        temperature: f64,
    ) -> Result<Self> {
        let params = PhysicalParams {
            omega_m,
            omega_c,
            kappa_c,
            gamma_m,
            g0,
            temperature,
        };
        params.validate()?;
        Ok(params)
    }

    /// Build from ordinary frequencies (Hz); rates are converted to rad/s.
    pub fn from_hz(
        omega_m_hz: f64,
        omega_c_hz: Option<f64>,
        kappa_c_hz: f64,
        gamma_m_hz: f64,
        g0_hz: f64,
        temperature: f64,
    ) -> Result<Self> {
        Self::new(
            TWO_PI * omega_m_hz,
            omega_c_hz.map(|f| TWO_PI * f),
            TWO_PI * kappa_c_hz,
            TWO_PI * gamma_m_hz,
            TWO_PI * g0_hz,
            temperature,
        )
    }

    /// The 5.25 GHz phononic-crystal resonator at 35 mK, with a 1550 nm cavity.
    pub fn reference_device() -> Self {
        PhysicalParams {
            omega_m: TWO_PI * 5.25e9,
            omega_c: Some(optical_angular_frequency(DEFAULT_WAVELENGTH_M)),
            kappa_c: TWO_PI * 846e6,
            gamma_m: TWO_PI * 13.8e3,
            g0: TWO_PI * 869e3,
            temperature: 0.035,
        }
    }

    pub fn with_temperature(mut self, temperature: f64) -> Self {
        self.temperature = temperature;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("omega_m", self.omega_m),
            ("kappa_c", self.kappa_c),
            ("gamma_m", self.gamma_m),
            ("g0", self.g0),
        ];
        for (name, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::Config(format!("{name} must be positive, got {value}")));
            }
        }
        if let Some(wc) = self.omega_c {
            if !(wc.is_finite() && wc > 0.0) {
                return Err(Error::Config(format!("omega_c must be positive, got {wc}")));
            }
        }
        if !(self.temperature.is_finite() && self.temperature >= 0.0) {
            return Err(Error::Config(format!(
                "temperature must be non-negative, got {}",
                self.temperature
            )));
        }
        Ok(())
    }

    /// Bath occupation at the configured temperature.
    pub fn nbar_th(&self) -> f64 {
        thermal_occupancy(self.omega_m, self.temperature)
    }

    /// Optical frequency, falling back to the 1550 nm default.
    pub fn omega_c_or_default(&self) -> f64 {
        self.omega_c
            .unwrap_or_else(|| optical_angular_frequency(DEFAULT_WAVELENGTH_M))
    }

    /// Resolved-sideband and weak-damping hierarchy, ω_m ≫ κ_c, γ_m.
    pub fn hierarchy_warnings(&self) -> Vec<TimescaleWarning> {
        let mut out = Vec::new();
        check_much_less(&mut out, "kappa_c << omega_m", self.kappa_c, self.omega_m);
        check_much_less(&mut out, "gamma_m << omega_m", self.gamma_m, self.omega_m);
        out
    }
}

/// Bose–Einstein occupation `1 / (exp(ħω/k_B T) - 1)`; zero at `T = 0`.
pub fn thermal_occupancy(omega_m: f64, temperature: f64) -> f64 {
    if temperature <= 0.0 {
        return 0.0;
    }
    let x = HBAR * omega_m / (K_B * temperature);
    1.0 / x.exp_m1()
}

/// Linearized coupling `g0 √n` for an intracavity photon number driven by
/// `power` on a sideband detuned by ω_m.
pub fn collective_coupling(power: f64, params: &PhysicalParams) -> Result<f64> {
    if !(power.is_finite() && power >= 0.0) {
        return Err(Error::Config(format!("drive power must be non-negative, got {power}")));
    }
    let omega_c = params.omega_c.ok_or_else(|| {
        Error::Config(
            "drive powers need the optical frequency omega_c; supply it or give the \
             collective couplings directly"
                .into(),
        )
    })?;
    let detuning_sq = params.omega_m * params.omega_m + 0.25 * params.kappa_c * params.kappa_c;
    let photons = power * params.kappa_c / (HBAR * omega_c * detuning_sq);
    Ok(params.g0 * photons.sqrt())
}

/// Adiabatically eliminated swap rate `G = 4 g² / κ_c`.
pub fn adiabatic_rate(g: f64, kappa_c: f64) -> f64 {
    4.0 * g * g / kappa_c
}

/// Beam-splitter amplitude `exp(-G τ)` of a red pulse.
pub fn transmissivity(rate: f64, tau: f64) -> f64 {
    (-rate * tau).exp()
}

/// Beam-splitter transmissivity of the effective mechanics–light coupler.
///
/// Stored as the amplitude `t` that multiplies the mechanical mode
/// (`B_out = t B_in + √(1-t²) A_in`). Tabulated protocol settings quote the
/// power transmissivity `t²`; use [`Transmissivity::from_power`] for those.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Transmissivity(f64);

impl Transmissivity {
    pub fn from_amplitude(t: f64) -> Result<Self> {
        if !(t > 0.0 && t <= 1.0) {
            return Err(Error::Domain(format!("transmissivity amplitude {t} outside (0, 1]")));
        }
        Ok(Transmissivity(t))
    }

    pub fn from_power(p: f64) -> Result<Self> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::Domain(format!("power transmissivity {p} outside (0, 1]")));
        }
        Ok(Transmissivity(p.sqrt()))
    }

    /// `exp(-G τ)` for a red pulse of swap rate `G` and duration `τ`.
    pub fn from_pulse(rate: f64, tau: f64) -> Result<Self> {
        if !(rate >= 0.0 && tau >= 0.0) {
            return Err(Error::Domain(format!("rate {rate} and duration {tau} must be non-negative")));
        }
        Self::from_amplitude(transmissivity(rate, tau))
    }

    pub fn amplitude(self) -> f64 {
        self.0
    }

    pub fn power(self) -> f64 {
        self.0 * self.0
    }

    /// `√(1 - t²)`
    pub fn reflectivity(self) -> f64 {
        (1.0 - self.0 * self.0).max(0.0).sqrt()
    }
}

/// How one pulse's strength is specified.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Drive {
    /// Optical power (W), converted with [`collective_coupling`].
    Power(f64),
    /// Collective coupling (rad/s).
    Coupling(f64),
}

impl Drive {
    pub fn coupling(self, params: &PhysicalParams) -> Result<f64> {
        match self {
            Drive::Power(p) => collective_coupling(p, params),
            Drive::Coupling(g) if g.is_finite() && g >= 0.0 => Ok(g),
            Drive::Coupling(g) => Err(Error::Config(format!("coupling must be non-negative, got {g}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Drives {
    pub red1: Drive,
    pub blue1: Drive,
    pub red2: Drive,
    pub red3: Drive,
}

/// Resolved collective couplings (rad/s) of the four pulses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Couplings {
    pub g_1r: f64,
    pub g_1b: f64,
    pub g_2r: f64,
    pub g_3r: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseSchedule {
    pub tau_rb: f64,
    pub tau_wt: f64,
    pub tau_ps: f64,
    pub tau_st: f64,
    pub tau_rd: f64,
    pub drives: Drives,
}

impl PulseSchedule {
    /// 30 ns pulses, 1 μs storage, 80/50 μW squeezing pair, 0.2 μW
    /// subtraction pulse and a 65 MHz readout coupling.
    pub fn reference_schedule() -> Self {
        PulseSchedule {
            tau_rb: 30e-9,
            tau_wt: 0.0,
            tau_ps: 30e-9,
            tau_st: 1e-6,
            tau_rd: 30e-9,
            drives: Drives {
                red1: Drive::Power(80e-6),
                blue1: Drive::Power(50e-6),
                red2: Drive::Power(0.2e-6),
                red3: Drive::Coupling(TWO_PI * 65e6),
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        let durations = [
            ("tau_rb", self.tau_rb),
            ("tau_wt", self.tau_wt),
            ("tau_ps", self.tau_ps),
            ("tau_st", self.tau_st),
            ("tau_rd", self.tau_rd),
        ];
        for (name, value) in durations {
            if !(value.is_finite() && value >= 0.0) {
                return Err(Error::Config(format!("{name} must be non-negative, got {value}")));
            }
        }
        Ok(())
    }

    /// Resolve every drive to a coupling and check squeezing stability.
    pub fn couplings(&self, params: &PhysicalParams) -> Result<Couplings> {
        self.validate()?;
        let c = Couplings {
            g_1r: self.drives.red1.coupling(params)?,
            g_1b: self.drives.blue1.coupling(params)?,
            g_2r: self.drives.red2.coupling(params)?,
            g_3r: self.drives.red3.coupling(params)?,
        };
        if c.g_1b >= c.g_1r {
            return Err(Error::Instability(format!(
                "blue coupling {:.4e} must stay below red coupling {:.4e}",
                c.g_1b, c.g_1r
            )));
        }
        Ok(c)
    }
}

/// A violated "≪" condition: `lhs` should be at least ten times below `rhs`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimescaleWarning {
    pub condition: &'static str,
    pub lhs: f64,
    pub rhs: f64,
}

impl fmt::Display for TimescaleWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} violated: {:.3e} vs {:.3e} (ratio {:.2}, want >= {})",
            self.condition,
            self.lhs,
            self.rhs,
            self.rhs / self.lhs,
            MUCH_LESS_FACTOR
        )
    }
}

fn check_much_less(out: &mut Vec<TimescaleWarning>, condition: &'static str, lhs: f64, rhs: f64) {
    if lhs * MUCH_LESS_FACTOR > rhs {
        out.push(TimescaleWarning { condition, lhs, rhs });
    }
}

/// Check the pulse-duration hierarchy of the protocol. Never fails.
pub fn validate_timescales(params: &PhysicalParams, schedule: &PulseSchedule) -> Vec<TimescaleWarning> {
    let cavity = 1.0 / params.kappa_c;
    let damping = 1.0 / params.gamma_m;
    let mut out = Vec::new();
    check_much_less(&mut out, "1/kappa_c << tau_rb", cavity, schedule.tau_rb);
    check_much_less(&mut out, "tau_rb << 1/gamma_m", schedule.tau_rb, damping);
    check_much_less(&mut out, "tau_wt << 1/gamma_m", schedule.tau_wt, damping);
    check_much_less(&mut out, "1/kappa_c << tau_ps", cavity, schedule.tau_ps);
    check_much_less(&mut out, "tau_ps << 1/gamma_m", schedule.tau_ps, damping);
    check_much_less(&mut out, "1/kappa_c << tau_rd", cavity, schedule.tau_rd);
    check_much_less(&mut out, "tau_rd << 1/gamma_m", schedule.tau_rd, damping);
    let total = schedule.tau_rb + schedule.tau_ps + schedule.tau_st + schedule.tau_rd;
    check_much_less(&mut out, "tau_rb + tau_ps + tau_st + tau_rd << 1/gamma_m", total, damping);
    out
}

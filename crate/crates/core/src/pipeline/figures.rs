//! Figure-data tables: fidelity curves, heralded Wigner grids and the
//! storage/temperature negativity sweeps.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{HeraldCase, RcMode, RunConfig};
use super::model::Protocol;
use super::optimize::optimize_fidelity;
use crate::conditioning::ConditionalChi;
use crate::error::{Error, Result};
use crate::params::Transmissivity;
use crate::phase_space::{negativity, wigner_from_chi, CatState, GridSpec, Parity, WignerGrid};

pub(crate) fn write_csv<T: Serialize>(dir: &Path, name: &str, rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_path(dir.join(name))?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(name.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RcChoice {
    Zero,
    Optimized,
}

/// One point of the fidelity-versus-amplitude curves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fig2Row {
    pub alpha: f64,
    pub n: u32,
    pub parity: Parity,
    pub rc_mode: RcChoice,
    pub transmissivity: f64,
    pub cavity_r: f64,
    pub fidelity: f64,
    pub herald_probability: f64,
    pub negativity: f64,
}

fn heralded(protocol: &Protocol, n: u32, power: f64, cavity_r: f64) -> Result<ConditionalChi> {
    protocol.herald(n, Transmissivity::from_power(power)?, cavity_r).analytic()
}

/// Optimized fidelities over the configured α grid and photon numbers, with
/// the cavity squeezing off and optimized.
pub fn fig2(protocol: &Protocol, cfg: &RunConfig) -> Result<Vec<Fig2Row>> {
    let sweeps = &cfg.task.sweeps;
    let spec = &cfg.task.grid;
    let points: Vec<(f64, u32, RcChoice)> = sweeps
        .alphas()?
        .into_iter()
        .flat_map(|a| {
            sweeps
                .photons
                .iter()
                .flat_map(move |&n| [RcChoice::Zero, RcChoice::Optimized].map(|rc| (a, n, rc)))
        })
        .collect();
    points
        .par_iter()
        .map(|&(alpha, n, rc)| {
            let parity = Parity::of_photon_count(n);
            let mode = match rc {
                RcChoice::Zero => RcMode::Zero,
                RcChoice::Optimized => RcMode::Optimize,
            };
            let o = optimize_fidelity(protocol, n, alpha, parity, None, mode, spec)?;
            let chi = heralded(protocol, n, o.transmissivity, o.cavity_r)?;
            Ok(Fig2Row {
                alpha,
                n,
                parity,
                rc_mode: rc,
                transmissivity: o.transmissivity,
                cavity_r: o.cavity_r,
                fidelity: o.fidelity,
                herald_probability: chi.probability(),
                negativity: negativity(&wigner_from_chi(&chi, spec)?)?,
            })
        })
        .collect::<Result<Vec<_>>>()
        .map_err(Error::at("fig2"))
}

/// Scalars of one heralded state of the Wigner-grid figure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fig3Row {
    pub n: u32,
    pub parity: Parity,
    pub transmissivity: f64,
    pub alpha: f64,
    pub herald_probability: f64,
    pub fidelity: f64,
    pub negativity: f64,
    pub w_origin: f64,
    pub grid: String,
}

pub struct Fig3State {
    pub row: Fig3Row,
    pub chi: ConditionalChi,
    pub wigner: WignerGrid,
}

pub fn fig3_case(protocol: &Protocol, case: &HeraldCase, spec: &GridSpec) -> Result<Fig3State> {
    let parity = Parity::of_photon_count(case.n);
    let chi = heralded(protocol, case.n, case.transmissivity, 0.0)?;
    let wigner = wigner_from_chi(&chi, spec)?;
    let row = Fig3Row {
        n: case.n,
        parity,
        transmissivity: case.transmissivity,
        alpha: case.alpha,
        herald_probability: chi.probability(),
        fidelity: chi.fidelity_with_cat(&CatState::new(case.alpha, parity)?, spec)?,
        negativity: negativity(&wigner)?,
        w_origin: wigner.value_at_origin(),
        grid: format!("fig3_n{}", case.n),
    };
    Ok(Fig3State { row, chi, wigner })
}

/// The six heralded states with r_c = 0 and their Wigner grids.
pub fn fig3(protocol: &Protocol, cfg: &RunConfig) -> Result<Vec<Fig3State>> {
    cfg.task
        .sweeps
        .cases
        .par_iter()
        .map(|c| fig3_case(protocol, c, &cfg.task.grid))
        .collect::<Result<Vec<_>>>()
        .map_err(Error::at("fig3"))
}

/// Readout-field negativity of one state at one storage setting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fig4Row {
    pub n: u32,
    pub transmissivity: f64,
    pub alpha: f64,
    pub tau_st_s: f64,
    pub temperature_k: f64,
    pub negativity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fig4Tables {
    /// Storage-time sweep at the device temperature.
    pub tau_st: Vec<Fig4Row>,
    /// Temperature sweep at a fixed storage time.
    pub temperature: Vec<Fig4Row>,
}

/// Storage and temperature sweeps for the states of [`fig3`]; the heralded
/// states are prepared once and only the bath changes.
pub fn fig4(protocol: &Protocol, cfg: &RunConfig) -> Result<Fig4Tables> {
    let sweeps = &cfg.task.sweeps;
    let spec = &cfg.task.grid;
    let states: Vec<(HeraldCase, ConditionalChi)> = sweeps
        .cases
        .iter()
        .map(|c| Ok((*c, heralded(protocol, c.n, c.transmissivity, 0.0)?)))
        .collect::<Result<_>>()
        .map_err(Error::at("fig4"))?;
    let device_t = protocol.params.temperature;
    let tau_points: Vec<(usize, f64, f64)> = (0..states.len())
        .flat_map(|i| sweeps.tau_st_s.iter().map(move |&tau| (i, tau, device_t)))
        .collect();
    let temp_points: Vec<(usize, f64, f64)> = (0..states.len())
        .flat_map(|i| sweeps.temperature_k.iter().map(move |&temp| (i, sweeps.tau_st_for_temperature_s, temp)))
        .collect();
    let eval = |&(i, tau, temp): &(usize, f64, f64)| -> Result<Fig4Row> {
        let (case, chi) = &states[i];
        let field = protocol.storage(tau, temp).apply(chi)?;
        Ok(Fig4Row {
            n: case.n,
            transmissivity: case.transmissivity,
            alpha: case.alpha,
            tau_st_s: tau,
            temperature_k: temp,
            negativity: negativity(&wigner_from_chi(&field, spec)?)?,
        })
    };
    let tau_st = tau_points.par_iter().map(eval).collect::<Result<Vec<_>>>().map_err(Error::at("fig4"))?;
    let temperature = temp_points.par_iter().map(eval).collect::<Result<Vec<_>>>().map_err(Error::at("fig4"))?;
    Ok(Fig4Tables { tau_st, temperature })
}

pub fn write_fig2(dir: &Path, rows: &[Fig2Row]) -> Result<Vec<String>> {
    Ok(vec![write_csv(dir, "fig2.csv", rows)?])
}

pub fn write_fig3(dir: &Path, states: &[Fig3State]) -> Result<Vec<String>> {
    let rows: Vec<&Fig3Row> = states.iter().map(|s| &s.row).collect();
    let mut files = vec![write_csv(dir, "fig3.csv", &rows)?];
    for s in states {
        files.extend(s.wigner.write(dir, &s.row.grid)?);
    }
    Ok(files)
}

pub fn write_fig4(dir: &Path, tables: &Fig4Tables) -> Result<Vec<String>> {
    Ok(vec![
        write_csv(dir, "fig4_tau_st.csv", &tables.tau_st)?,
        write_csv(dir, "fig4_temperature.csv", &tables.temperature)?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::config::SweepConfig;

    fn small_config() -> RunConfig {
        let mut cfg = RunConfig::default();
        cfg.task.sweeps = SweepConfig {
            alpha_min: 1.2,
            alpha_max: 1.2,
            photons: vec![1],
            cases: vec![HeraldCase { n: 1, transmissivity: 0.51, alpha: 1.2 }],
            tau_st_s: vec![0.0, 5e-7, 1e-6],
            temperature_k: vec![0.035, 0.5],
            ..SweepConfig::default()
        };
        cfg
    }

    #[test]
    fn fig2_single_point() {
        let cfg = small_config();
        let p = Protocol::new(&cfg).unwrap();
        let rows = fig2(&p, &cfg).unwrap();
        assert_eq!(rows.len(), 2);
        let zero = &rows[0];
        assert_eq!(zero.rc_mode, RcChoice::Zero);
        assert!((zero.fidelity - 0.98).abs() < 0.02);
        assert!(rows[1].fidelity >= zero.fidelity - 1e-9);
    }

    #[test]
    fn fig4_without_damping_is_flat() {
        let mut cfg = small_config();
        cfg.device.gamma_hz = 1e-12;
        let p = Protocol::new(&cfg).unwrap();
        let t = fig4(&p, &cfg).unwrap();
        let first = t.tau_st[0].negativity;
        for row in &t.tau_st {
            assert!((row.negativity - first).abs() < 1e-9, "{row:?}");
        }
    }

    #[test]
    fn tables_write_with_headers() {
        let cfg = small_config();
        let p = Protocol::new(&cfg).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let files = write_fig3(dir.path(), &fig3(&p, &cfg).unwrap()).unwrap();
        assert_eq!(files, ["fig3.csv", "fig3_n1.csv", "fig3_n1.json"]);
        let text = std::fs::read_to_string(dir.path().join("fig3.csv")).unwrap();
        assert!(text.starts_with("n,parity,transmissivity,alpha,herald_probability,fidelity,negativity,w_origin,grid\n"));
        assert!(text.lines().nth(1).unwrap().starts_with("1,odd,0.51,1.2,"));
    }
}

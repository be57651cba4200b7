//! Cross-check of the analytic heralded state against the truncated Fock
//! model: herald probability, cat fidelity, negativity and χ samples.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::HeraldCase;
use super::model::{HeraldSetup, Protocol};
use crate::error::{Error, Result};
use crate::fock::{chi_of_rho, fidelity_fock, wigner_grid_of_rho};
use crate::gaussian::SqueezedThermalSpec;
use crate::params::Transmissivity;
use crate::phase_space::{negativity, wigner_from_chi, CatState, CharacteristicFunction, GridSpec, Parity};
use crate::Complex64;

/// Agreement required between the two models.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub probability: f64,
    pub fidelity: f64,
    pub negativity: f64,
    pub chi: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { probability: 1e-4, fidelity: 1e-3, negativity: 5e-3, chi: 1e-4 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleCase {
    pub n: u32,
    pub r_m: f64,
    pub nbar_m: f64,
    pub cavity_r: f64,
    /// Power transmissivity.
    pub transmissivity: f64,
    pub alpha: f64,
}

impl OracleCase {
    pub fn setup(&self) -> Result<HeraldSetup> {
        Ok(HeraldSetup::new(
            SqueezedThermalSpec::mechanical(self.r_m, self.nbar_m)?,
            self.cavity_r,
            Transmissivity::from_power(self.transmissivity)?,
            self.n,
        ))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observables {
    pub probability: f64,
    pub fidelity: f64,
    pub negativity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleOutcome {
    pub case: OracleCase,
    pub analytic: Observables,
    pub fock: Observables,
    pub fock_dim: usize,
    pub delta_probability: f64,
    pub delta_fidelity: f64,
    pub delta_negativity: f64,
    pub delta_chi: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub tolerances: Tolerances,
    pub seed: u64,
    pub outcomes: Vec<OracleOutcome>,
    pub passed: bool,
}

impl OracleReport {
    pub fn failures(&self) -> impl Iterator<Item = &OracleOutcome> {
        self.outcomes.iter().filter(|o| !o.passed)
    }
}

/// χ sample points shared by both models.
pub const CHI_SAMPLES: [(f64, f64); 9] = [
    (0.0, 0.0),
    (0.3, 0.0),
    (0.0, 0.45),
    (-0.6, 0.2),
    (0.8, -0.5),
    (1.1, 0.0),
    (0.0, -1.3),
    (-0.9, -0.9),
    (1.6, 0.7),
];

/// Compare one case. Both Wigner negativities use the analytic grid.
pub fn compare(case: &OracleCase, spec: &GridSpec, tol: &Tolerances) -> Result<OracleOutcome> {
    let setup = case.setup()?;
    let parity = Parity::of_photon_count(case.n);
    let cat = CatState::new(case.alpha, parity)?;

    let chi = setup.analytic()?;
    let grid = wigner_from_chi(&chi, spec)?;
    let analytic = Observables {
        probability: chi.probability(),
        fidelity: chi.fidelity_with_cat(&cat, spec)?,
        negativity: negativity(&grid)?,
    };

    let herald = setup.fock()?;
    let fock_grid = wigner_grid_of_rho(&herald.rho, &grid.beta_re, &grid.beta_im);
    let fock = Observables {
        probability: herald.probability,
        fidelity: fidelity_fock(&herald.rho, &cat),
        negativity: negativity(&fock_grid)?,
    };

    let delta_chi = CHI_SAMPLES
        .iter()
        .map(|&(x, y)| {
            let l = Complex64::new(x, y);
            (chi.eval(l) - chi_of_rho(&herald.rho, l)).norm()
        })
        .fold(0.0, f64::max);
    let delta_probability = (analytic.probability - fock.probability).abs();
    let delta_fidelity = (analytic.fidelity - fock.fidelity).abs();
    let delta_negativity = (analytic.negativity - fock.negativity).abs();
    let passed = delta_probability < tol.probability
        && delta_fidelity < tol.fidelity
        && delta_negativity < tol.negativity
        && delta_chi < tol.chi;
    Ok(OracleOutcome {
        case: *case,
        analytic,
        fock,
        fock_dim: herald.dim,
        delta_probability,
        delta_fidelity,
        delta_negativity,
        delta_chi,
        passed,
    })
}

/// Random cases with r_m ≤ 1.2, r_c ≤ 1, 𝒯 ∈ [0.3, 0.95] and n ≤ 4.
pub fn random_cases(count: usize, seed: u64) -> Vec<OracleCase> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| OracleCase {
            n: rng.gen_range(0..=4),
            r_m: rng.gen_range(0.0..=1.2),
            nbar_m: rng.gen_range(0.0..=0.05),
            cavity_r: rng.gen_range(0.0..=1.0),
            transmissivity: rng.gen_range(0.3..=0.95),
            alpha: rng.gen_range(0.5..=2.5),
        })
        .collect()
}

/// The figure states prepared by `protocol`, with r_c = 0.
pub fn figure_cases(protocol: &Protocol, cases: &[HeraldCase]) -> Vec<OracleCase> {
    cases
        .iter()
        .map(|c| OracleCase {
            n: c.n,
            r_m: protocol.mech.r,
            nbar_m: protocol.mech.nbar,
            cavity_r: 0.0,
            transmissivity: c.transmissivity,
            alpha: c.alpha,
        })
        .collect()
}

pub fn oracle_check(cases: &[OracleCase], seed: u64, spec: &GridSpec, tol: Tolerances) -> Result<OracleReport> {
    let outcomes = cases
        .par_iter()
        .map(|c| compare(c, spec, &tol))
        .collect::<Result<Vec<_>>>()
        .map_err(Error::at("oracle"))?;
    let passed = outcomes.iter().all(|o| o.passed);
    Ok(OracleReport { tolerances: tol, seed, outcomes, passed })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_cases_are_reproducible_and_in_range() {
        let a = random_cases(20, 7);
        assert_eq!(a, random_cases(20, 7));
        assert_ne!(a, random_cases(20, 8));
        for c in &a {
            assert!(c.n <= 4 && c.r_m <= 1.2 && c.cavity_r <= 1.0);
            assert!((0.3..=0.95).contains(&c.transmissivity));
        }
    }

    #[test]
    fn small_case_agrees() {
        let case = OracleCase { n: 2, r_m: 0.6, nbar_m: 0.02, cavity_r: 0.3, transmissivity: 0.7, alpha: 1.0 };
        let o = compare(&case, &GridSpec::default(), &Tolerances::default()).unwrap();
        assert!(o.passed, "{o:#?}");
    }
}

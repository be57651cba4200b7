//! Storage under thermal damping and the state-swap readout onto the cavity
//! output pulse.
//!
//! The damped characteristic function is
//! `χ(λ, t) = exp[-(n̄ + 1/2)(1 - e^{-γt})|λ|²] χ(λ e^{-γt/2}, 0)`; the
//! readout pulse mixes the stored mode with vacuum at amplitude
//! `e^{-G τ_rd}`, giving `χ_out(ζ) = χ(√(1 - e^{-2Gτ}) ζ) e^{-e^{-2Gτ}|ζ|²/2}`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phase_space::{gaussian_half_width, negativity, wigner_from_chi, CharacteristicFunction, ChiSamples, GridSpec};

fn scale_support(support: (f64, f64), by: f64) -> (f64, f64) {
    if by > 0.0 {
        (support.0 / by, support.1 / by)
    } else {
        (f64::INFINITY, f64::INFINITY)
    }
}

fn multiply_envelope(samples: &mut ChiSamples, xs: &[f64], ys: &[f64], curvature: f64) {
    if curvature == 0.0 {
        return;
    }
    let ex: Vec<f64> = xs.iter().map(|x| (-0.5 * curvature * x * x).exp()).collect();
    let ey: Vec<f64> = ys.iter().map(|y| (-0.5 * curvature * y * y).exp()).collect();
    let apply = |m: &mut nalgebra::DMatrix<f64>| {
        for j in 0..ys.len() {
            for i in 0..xs.len() {
                m[(i, j)] *= ex[i] * ey[j];
            }
        }
    };
    apply(&mut samples.re);
    if let Some(im) = samples.im.as_mut() {
        apply(im);
    }
}

fn enveloped_support(inner: (f64, f64), scale: f64, curvature: f64, tol: f64) -> Result<(f64, f64)> {
    let (lr, li) = scale_support(inner, scale);
    let env = if curvature > 0.0 {
        gaussian_half_width(curvature, tol)?
    } else {
        f64::INFINITY
    };
    let (lr, li) = (lr.min(env), li.min(env));
    if !(lr.is_finite() && li.is_finite()) {
        return Err(Error::Domain("characteristic function does not decay".into()));
    }
    Ok((lr, li))
}

/// A state left in a thermal bath for `tau_st`.
#[derive(Debug, Clone, PartialEq)]
pub struct StoredState<C> {
    pub base: C,
    pub tau_st: f64,
    pub gamma_m: f64,
    pub nbar_th: f64,
}

impl<C: CharacteristicFunction> StoredState<C> {
    pub fn new(base: C, gamma_m: f64, nbar_th: f64, tau_st: f64) -> Result<Self> {
        if !(tau_st >= 0.0 && tau_st.is_finite()) {
            return Err(Error::Domain(format!("storage time must be >= 0, got {tau_st}")));
        }
        if !(gamma_m >= 0.0 && nbar_th >= 0.0) {
            return Err(Error::Domain(format!(
                "bath needs γ_m >= 0 and n̄ >= 0, got {gamma_m}, {nbar_th}"
            )));
        }
        Ok(StoredState { base, tau_st, gamma_m, nbar_th })
    }

    /// Argument scale `e^{-γt/2}`.
    pub fn contraction(&self) -> f64 {
        (-0.5 * self.gamma_m * self.tau_st).exp()
    }

    /// Curvature `(2n̄ + 1)(1 - e^{-γt})` of the added thermal envelope.
    pub fn added_noise(&self) -> f64 {
        -(2.0 * self.nbar_th + 1.0) * (-self.gamma_m * self.tau_st).exp_m1()
    }
}

impl<C: CharacteristicFunction> CharacteristicFunction for StoredState<C> {
    fn eval(&self, lambda: Complex64) -> Complex64 {
        let env = (-0.5 * self.added_noise() * lambda.norm_sqr()).exp();
        self.base.eval(lambda * self.contraction()) * env
    }

    fn support(&self, tol: f64) -> Result<(f64, f64)> {
        enveloped_support(self.base.support(tol)?, self.contraction(), self.added_noise(), tol)
    }

    fn is_real(&self) -> bool {
        self.base.is_real()
    }

    fn is_axis_even(&self) -> bool {
        self.base.is_axis_even()
    }

    fn eval_grid(&self, xs: &[f64], ys: &[f64]) -> ChiSamples {
        let s = self.contraction();
        let sx: Vec<f64> = xs.iter().map(|x| x * s).collect();
        let sy: Vec<f64> = ys.iter().map(|y| y * s).collect();
        let mut out = self.base.eval_grid(&sx, &sy);
        multiply_envelope(&mut out, xs, ys, self.added_noise());
        out
    }
}

/// State-swap readout with residual amplitude `leak = e^{-G_3r τ_rd}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReadoutMap {
    pub rate: f64,
    pub tau_rd: f64,
    pub leak: f64,
}

impl ReadoutMap {
    /// `rate` is the adiabatic swap rate `G_3r = 4 g_3r² / κ_c`.
    pub fn new(rate: f64, tau_rd: f64) -> Result<Self> {
        if !(rate >= 0.0 && tau_rd >= 0.0) {
            return Err(Error::Domain(format!("readout needs G >= 0, τ >= 0, got {rate}, {tau_rd}")));
        }
        Ok(ReadoutMap {
            rate,
            tau_rd,
            leak: (-rate * tau_rd).exp(),
        })
    }

    pub fn ideal() -> Self {
        ReadoutMap { rate: f64::INFINITY, tau_rd: 0.0, leak: 0.0 }
    }

    pub fn transfer(&self) -> f64 {
        (1.0 - self.leak * self.leak).sqrt()
    }
}

/// The cavity output pulse carrying a mechanical state.
#[derive(Debug, Clone, PartialEq)]
pub struct ReadoutField<C> {
    pub inner: C,
    pub map: ReadoutMap,
}

impl<C: CharacteristicFunction> ReadoutField<C> {
    pub fn new(inner: C, map: ReadoutMap) -> Self {
        ReadoutField { inner, map }
    }

    fn vacuum_curvature(&self) -> f64 {
        self.map.leak * self.map.leak
    }
}

impl<C: CharacteristicFunction> CharacteristicFunction for ReadoutField<C> {
    fn eval(&self, zeta: Complex64) -> Complex64 {
        let env = (-0.5 * self.vacuum_curvature() * zeta.norm_sqr()).exp();
        self.inner.eval(zeta * self.map.transfer()) * env
    }

    fn support(&self, tol: f64) -> Result<(f64, f64)> {
        enveloped_support(self.inner.support(tol)?, self.map.transfer(), self.vacuum_curvature(), tol)
    }

    fn is_real(&self) -> bool {
        self.inner.is_real()
    }

    fn is_axis_even(&self) -> bool {
        self.inner.is_axis_even()
    }

    fn eval_grid(&self, xs: &[f64], ys: &[f64]) -> ChiSamples {
        let s = self.map.transfer();
        let sx: Vec<f64> = xs.iter().map(|x| x * s).collect();
        let sy: Vec<f64> = ys.iter().map(|y| y * s).collect();
        let mut out = self.inner.eval_grid(&sx, &sy);
        multiply_envelope(&mut out, xs, ys, self.vacuum_curvature());
        out
    }
}

/// Bath and readout settings shared by the storage/readout sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StorageReadout {
    pub gamma_m: f64,
    pub nbar_th: f64,
    pub tau_st: f64,
    pub map: ReadoutMap,
    /// Also damp the mechanics for `τ_rd` before the swap.
    pub damp_during_readout: bool,
}

impl StorageReadout {
    pub fn mechanical_time(&self) -> f64 {
        self.tau_st + if self.damp_during_readout { self.map.tau_rd } else { 0.0 }
    }

    pub fn apply<C: CharacteristicFunction>(&self, chi: C) -> Result<ReadoutField<StoredState<C>>> {
        let stored = StoredState::new(chi, self.gamma_m, self.nbar_th, self.mechanical_time())?;
        Ok(ReadoutField::new(stored, self.map))
    }
}

/// Wigner negativity of the output field after storage and readout.
pub fn readout_negativity<C: CharacteristicFunction>(chi: C, settings: &StorageReadout, spec: &GridSpec) -> Result<f64> {
    let field = settings.apply(chi)?;
    negativity(&wigner_from_chi(&field, spec)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase_space::{fidelity_chi_overlap, CatState, GaussianChi};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    const GAMMA: f64 = 2.0 * std::f64::consts::PI * 13.8e3;

    #[test]
    fn zero_time_is_identity() {
        let cat = CatState::odd(1.4).unwrap();
        let s = StoredState::new(cat, GAMMA, 2.0, 0.0).unwrap();
        let l = Complex64::new(0.6, -0.8);
        assert_eq!(s.eval(l), cat.eval(l));
    }

    #[test]
    fn long_storage_thermalizes() {
        let cat = CatState::even(2.0).unwrap();
        let s = StoredState::new(cat, GAMMA, 3.5, 1.0).unwrap();
        let th = GaussianChi::thermal(3.5);
        for l in [Complex64::new(0.1, 0.2), Complex64::new(-0.4, 0.3)] {
            assert_relative_eq!(s.eval(l).re, th.eval(l).re, epsilon = 1e-12);
        }
    }

    #[test]
    fn readout_limits() {
        let cat = CatState::odd(1.0).unwrap();
        let l = Complex64::new(0.7, 0.3);
        let perfect = ReadoutField::new(cat, ReadoutMap::ideal());
        assert_eq!(perfect.eval(l), cat.eval(l));
        let closed = ReadoutField::new(cat, ReadoutMap::new(0.0, 30e-9).unwrap());
        assert_relative_eq!(closed.eval(l).re, GaussianChi::vacuum().eval(l).re, epsilon = 1e-15);
    }

    #[test]
    fn grid_path_matches_pointwise() {
        let cat = CatState::odd(1.5).unwrap();
        let field = ReadoutField::new(
            StoredState::new(cat, GAMMA, 0.5, 2e-6).unwrap(),
            ReadoutMap::new(1.25e8, 30e-9).unwrap(),
        );
        let xs = [-1.0, 0.2, 2.5];
        let ys = [0.0, -0.6];
        let g = field.eval_grid(&xs, &ys);
        for (i, &x) in xs.iter().enumerate() {
            for (j, &y) in ys.iter().enumerate() {
                assert_relative_eq!(g.re[(i, j)], field.eval(Complex64::new(x, y)).re, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn ideal_chain_keeps_negativity() {
        let cat = CatState::odd(1.2).unwrap();
        let spec = GridSpec { points: 151, ..GridSpec::default() };
        let direct = negativity(&wigner_from_chi(&cat, &spec).unwrap()).unwrap();
        let settings = StorageReadout {
            gamma_m: GAMMA,
            nbar_th: 0.0,
            tau_st: 0.0,
            map: ReadoutMap::ideal(),
            damp_during_readout: false,
        };
        let through = readout_negativity(cat, &settings, &spec).unwrap();
        assert!((direct - through).abs() < 1e-9);
    }

    #[test]
    fn purity_decreases() {
        let cat = CatState::odd(1.5).unwrap();
        let spec = GridSpec::default();
        let mut last = 1.0 + 1e-9;
        for k in 0..6 {
            let s = StoredState::new(cat, GAMMA, 0.3, f64::from(k) * 2e-6).unwrap();
            let p = fidelity_chi_overlap(&s, &s, &spec).unwrap();
            assert!(p <= last + 1e-9);
            last = p;
        }
    }

    proptest! {
        #[test]
        fn semigroup(t1 in 0.0f64..5e-5, t2 in 0.0f64..5e-5, nbar in 0.0f64..4.0, x in -3.0f64..3.0, y in -3.0f64..3.0) {
            let cat = CatState::odd(1.3).unwrap();
            let l = Complex64::new(x, y);
            let once = StoredState::new(cat, GAMMA, nbar, t1 + t2).unwrap();
            let twice = StoredState::new(StoredState::new(cat, GAMMA, nbar, t1).unwrap(), GAMMA, nbar, t2).unwrap();
            prop_assert!((once.eval(l) - twice.eval(l)).norm() < 1e-10);
            prop_assert!(once.eval(l).norm() <= 1.0 + 1e-12);
            prop_assert!((once.eval(Complex64::new(0.0, 0.0)).re - 1.0).abs() < 1e-15);
        }
    }
}

//! Characteristic functions `χ(λ) = Tr[ρ D(λ)]` of single-mode states.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::SingleModeGaussian;

/// Samples of χ on a tensor grid, indexed `[(i, j)] = χ(xs[i] + i ys[j])`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChiSamples {
    pub re: DMatrix<f64>,
    /// `None` when the function is known to be real.
    pub im: Option<DMatrix<f64>>,
}

pub trait CharacteristicFunction: Send + Sync {
    fn eval(&self, lambda: Complex64) -> Complex64;

    /// Half-widths `(L_r, L_i)` such that `|χ| < tol` whenever
    /// `|λ_r| > L_r` or `|λ_i| > L_i`.
    fn support(&self, tol: f64) -> Result<(f64, f64)>;

    /// χ is real everywhere.
    fn is_real(&self) -> bool {
        false
    }

    /// χ is even in `λ_r` and in `λ_i` separately.
    fn is_axis_even(&self) -> bool {
        false
    }

    fn eval_grid(&self, xs: &[f64], ys: &[f64]) -> ChiSamples {
        let mut re = DMatrix::zeros(xs.len(), ys.len());
        let mut im = DMatrix::zeros(xs.len(), ys.len());
        for (i, &x) in xs.iter().enumerate() {
            for (j, &y) in ys.iter().enumerate() {
                let z = self.eval(Complex64::new(x, y));
                re[(i, j)] = z.re;
                im[(i, j)] = z.im;
            }
        }
        ChiSamples {
            re,
            im: (!self.is_real()).then_some(im),
        }
    }
}

impl<C: CharacteristicFunction + ?Sized> CharacteristicFunction for &C {
    fn eval(&self, lambda: Complex64) -> Complex64 {
        (**self).eval(lambda)
    }
    fn support(&self, tol: f64) -> Result<(f64, f64)> {
        (**self).support(tol)
    }
    fn is_real(&self) -> bool {
        (**self).is_real()
    }
    fn is_axis_even(&self) -> bool {
        (**self).is_axis_even()
    }
    fn eval_grid(&self, xs: &[f64], ys: &[f64]) -> ChiSamples {
        (**self).eval_grid(xs, ys)
    }
}

impl<C: CharacteristicFunction + ?Sized> CharacteristicFunction for Box<C> {
    fn eval(&self, lambda: Complex64) -> Complex64 {
        (**self).eval(lambda)
    }
    fn support(&self, tol: f64) -> Result<(f64, f64)> {
        (**self).support(tol)
    }
    fn is_real(&self) -> bool {
        (**self).is_real()
    }
    fn is_axis_even(&self) -> bool {
        (**self).is_axis_even()
    }
    fn eval_grid(&self, xs: &[f64], ys: &[f64]) -> ChiSamples {
        (**self).eval_grid(xs, ys)
    }
}

pub(crate) fn gaussian_half_width(curvature: f64, tol: f64) -> Result<f64> {
    if !(curvature > 0.0) {
        return Err(Error::Domain(format!(
            "characteristic function does not decay (envelope curvature {curvature})"
        )));
    }
    Ok((2.0 * (1.0 / tol).ln() / curvature).sqrt())
}

/// `exp(-(A λ_r² + B λ_i²)/2)`
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianChi {
    pub a: f64,
    pub b: f64,
}

impl GaussianChi {
    pub fn new(a: f64, b: f64) -> Self {
        GaussianChi { a, b }
    }

    pub fn vacuum() -> Self {
        GaussianChi { a: 1.0, b: 1.0 }
    }

    pub fn thermal(nbar: f64) -> Self {
        let v = 2.0 * nbar + 1.0;
        GaussianChi { a: v, b: v }
    }

    fn value(&self, x: f64, y: f64) -> f64 {
        (-0.5 * (self.a * x * x + self.b * y * y)).exp()
    }
}

impl From<SingleModeGaussian> for GaussianChi {
    fn from(m: SingleModeGaussian) -> Self {
        GaussianChi { a: m.a, b: m.b }
    }
}

impl CharacteristicFunction for GaussianChi {
    fn eval(&self, lambda: Complex64) -> Complex64 {
        Complex64::new(self.value(lambda.re, lambda.im), 0.0)
    }

    fn support(&self, tol: f64) -> Result<(f64, f64)> {
        Ok((gaussian_half_width(self.a, tol)?, gaussian_half_width(self.b, tol)?))
    }

    fn is_real(&self) -> bool {
        true
    }

    fn is_axis_even(&self) -> bool {
        true
    }

    fn eval_grid(&self, xs: &[f64], ys: &[f64]) -> ChiSamples {
        let gx: Vec<f64> = xs.iter().map(|x| (-0.5 * self.a * x * x).exp()).collect();
        let gy: Vec<f64> = ys.iter().map(|y| (-0.5 * self.b * y * y).exp()).collect();
        ChiSamples {
            re: DMatrix::from_fn(xs.len(), ys.len(), |i, j| gx[i] * gy[j]),
            im: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn sign(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }

    /// Cat parity paired with an `n`-photon herald.
    pub fn of_photon_count(n: u32) -> Self {
        if n % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Parity::Even => '+',
            Parity::Odd => '-',
        }
    }
}

/// `(|α⟩ ± |-α⟩)/√(2(1 ± e^{-2α²}))` with real `α ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CatState {
    pub alpha: f64,
    pub parity: Parity,
}

impl CatState {
    pub fn new(alpha: f64, parity: Parity) -> Result<Self> {
        if !(alpha.is_finite() && alpha >= 0.0) {
            return Err(Error::Domain(format!("cat amplitude must be real and >= 0, got {alpha}")));
        }
        let cat = CatState { alpha, parity };
        if cat.overlap_norm() < 1e-12 {
            return Err(Error::Domain(format!("odd cat with α = {alpha} is not normalizable")));
        }
        Ok(cat)
    }

    pub fn even(alpha: f64) -> Result<Self> {
        Self::new(alpha, Parity::Even)
    }

    pub fn odd(alpha: f64) -> Result<Self> {
        Self::new(alpha, Parity::Odd)
    }

    /// `1 ± e^{-2α²}`
    pub fn overlap_norm(&self) -> f64 {
        let x = -2.0 * self.alpha * self.alpha;
        match self.parity {
            Parity::Even => 1.0 + x.exp(),
            Parity::Odd => -x.exp_m1(),
        }
    }

    /// Fock amplitudes `⟨k|ψ⟩`, `k < dim`.
    pub fn fock_amplitudes(&self, dim: usize) -> Vec<f64> {
        let a = self.alpha;
        let p = self.parity.sign();
        let norm = (2.0 * self.overlap_norm()).sqrt();
        let mut out = Vec::with_capacity(dim);
        let mut coherent = (-0.5 * a * a).exp();
        for k in 0..dim {
            if k > 0 {
                coherent *= a / (k as f64).sqrt();
            }
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            out.push(coherent * (1.0 + p * sign) / norm);
        }
        out
    }

    /// The two separable pieces `χ = u₁(λ_r)v₁(λ_i) + u₂(λ_r)v₂(λ_i)`.
    pub(crate) fn separable_terms(&self, x: f64, y: f64) -> [(f64, f64); 2] {
        let a2 = 2.0 * self.alpha;
        let n2 = 0.5 / self.overlap_norm();
        let gy = (-0.5 * y * y).exp();
        [
            (2.0 * n2 * (-0.5 * x * x).exp(), gy * (a2 * y).cos()),
            (
                self.parity.sign() * n2 * ((-0.5 * (x + a2).powi(2)).exp() + (-0.5 * (x - a2).powi(2)).exp()),
                gy,
            ),
        ]
    }
}

impl CharacteristicFunction for CatState {
    fn eval(&self, lambda: Complex64) -> Complex64 {
        let [(u1, v1), (u2, v2)] = self.separable_terms(lambda.re, lambda.im);
        Complex64::new(u1 * v1 + u2 * v2, 0.0)
    }

    fn support(&self, tol: f64) -> Result<(f64, f64)> {
        let w = gaussian_half_width(1.0, tol)?;
        Ok((2.0 * self.alpha + w, w))
    }

    fn is_real(&self) -> bool {
        true
    }

    fn is_axis_even(&self) -> bool {
        true
    }
}

/// Characteristic function from a closure with a declared support.
pub struct FnChi<F> {
    f: F,
    support: (f64, f64),
}

impl<F: Fn(Complex64) -> Complex64 + Send + Sync> FnChi<F> {
    pub fn new(f: F, support: (f64, f64)) -> Self {
        FnChi { f, support }
    }
}

impl<F: Fn(Complex64) -> Complex64 + Send + Sync> CharacteristicFunction for FnChi<F> {
    fn eval(&self, lambda: Complex64) -> Complex64 {
        (self.f)(lambda)
    }

    fn support(&self, _tol: f64) -> Result<(f64, f64)> {
        Ok(self.support)
    }
}

/// The state rotated in phase space by `θ`: `χ'(λ) = χ(e^{-iθ} λ)`.
pub struct Rotated<C> {
    pub inner: C,
    pub theta: f64,
}

impl<C: CharacteristicFunction> CharacteristicFunction for Rotated<C> {
    fn eval(&self, lambda: Complex64) -> Complex64 {
        self.inner.eval(lambda * Complex64::from_polar(1.0, -self.theta))
    }

    fn support(&self, tol: f64) -> Result<(f64, f64)> {
        let (lr, li) = self.inner.support(tol)?;
        let l = lr.hypot(li);
        Ok((l, l))
    }

    fn is_real(&self) -> bool {
        self.inner.is_real()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn cat_normalized_and_real() {
        for parity in [Parity::Even, Parity::Odd] {
            let cat = CatState::new(1.7, parity).unwrap();
            assert_relative_eq!(cat.eval(Complex64::new(0.0, 0.0)).re, 1.0, epsilon = 1e-15);
            let l = Complex64::new(0.4, -0.9);
            assert_relative_eq!(cat.eval(l).re, cat.eval(-l).re, epsilon = 1e-15);
        }
    }

    #[test]
    fn small_even_cat_is_vacuum() {
        let cat = CatState::even(1e-8).unwrap();
        let vac = GaussianChi::vacuum();
        for l in [Complex64::new(0.3, 0.2), Complex64::new(-1.5, 2.0)] {
            assert_relative_eq!(cat.eval(l).re, vac.eval(l).re, epsilon = 1e-12);
        }
        assert!(CatState::odd(0.0).is_err());
        assert!(CatState::even(-1.0).is_err());
    }

    #[test]
    fn cat_fock_amplitudes_normalized() {
        for parity in [Parity::Even, Parity::Odd] {
            let amp = CatState::new(2.0, parity).unwrap().fock_amplitudes(60);
            let norm: f64 = amp.iter().map(|c| c * c).sum();
            assert_relative_eq!(norm, 1.0, epsilon = 1e-12);
            let wrong = if parity == Parity::Even { 1 } else { 0 };
            assert!(amp.iter().skip(wrong).step_by(2).all(|&c| c == 0.0));
        }
    }

    #[test]
    fn gaussian_grid_matches_pointwise() {
        let g = GaussianChi::new(0.3, 4.0);
        let xs = [-1.0, 0.0, 0.5];
        let ys = [0.2, 1.1];
        let s = g.eval_grid(&xs, &ys);
        for (i, &x) in xs.iter().enumerate() {
            for (j, &y) in ys.iter().enumerate() {
                assert_relative_eq!(s.re[(i, j)], g.eval(Complex64::new(x, y)).re, epsilon = 1e-15);
            }
        }
        assert!(GaussianChi::new(0.0, 1.0).support(1e-12).is_err());
    }
}

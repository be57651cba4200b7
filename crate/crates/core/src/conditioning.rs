//! The mechanical state heralded by detecting `n` photons in the cavity output.
//!
//! With `F_1 = (σ_33 + 1)/2`, `F_2 = (σ_44 + 1)/2` the herald probability is
//!
//! ```text
//! P_n = π⁻¹ Σ_k (-1)^k C(n,k)/k! Σ_l C(k,l) F_1^{-1/2-l} F_2^{-1/2-k+l} Γ(1/2+l) Γ(1/2+k-l)
//! ```
//!
//! and the conditional characteristic function is a Gaussian envelope times
//! the same double sum with each term weighted by
//! `M(-l, 1/2, -σ_13² λ_r²/4F_1) M(-(k-l), 1/2, -σ_24² λ_i²/4F_2)`.
//! [`series`] evaluates these sums term by term.
//!
//! The alternating sum over `k` cancels badly once `P_n` is small, so the
//! production path uses its binomial resummation. Summing the generating
//! function over `n` gives
//!
//! ```text
//! Σ_n P_n χ_n(λ) z^n = e^{-(c_1 λ_r² + c_2 λ_i²)/2} Π_j (F_j - (F_j - 1) z)^{-1/2} exp(-z p_j / (1 - a_j z))
//! ```
//!
//! with `a_j = (F_j - 1)/F_j`, `p_1 = σ_13² λ_r² / 4F_1²`, `p_2 = σ_24² λ_i² / 4F_2²`.
//! Each factor is a Laguerre generating function, so
//! `P_n χ_n = e^{..} (F_1 F_2)^{-1/2} Σ_l q_l(a_1, p_1) q_{n-l}(a_2, p_2)` with
//! `q_l(a, p) = a^l L_l^{(-1/2)}(p/a)`: only `n + 1` separable terms and no
//! alternating normalization sum unless the two quadratures straddle the
//! vacuum level.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gaussian::TwoModeCovariance;
use crate::phase_space::quadrature::CompositeRule;
use crate::phase_space::{check_overlap, CatState, CharacteristicFunction, ChiSamples, GridSpec};
use crate::special::NeumaierSum;

/// The normalization sum must keep this fraction of the magnitude of its terms.
const CANCELLATION_FLOOR: f64 = 1e-11;

/// Fill `out[l] = a^l L_l^{(-1/2)}(p/a)` for `l < out.len()`.
///
/// Three-term recurrence
/// `(l+1) q_{l+1} = ((2l + 1/2) a - p) q_l - (l - 1/2) a² q_{l-1}`,
/// valid at `a = 0`.
fn scaled_laguerre(a: f64, p: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = 1.0;
    if out.len() > 1 {
        out[1] = 0.5 * a - p;
    }
    for l in 1..out.len().saturating_sub(1) {
        let lf = l as f64;
        out[l + 1] = (((2.0 * lf + 0.5) * a - p) * out[l] - (lf - 0.5) * a * a * out[l - 1]) / (lf + 1.0);
    }
}

/// One quadrature axis: `φ_l(x) = e^{-c x²/2} q_l(a, κ x²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Axis {
    curvature: f64,
    a: f64,
    kappa: f64,
}

impl Axis {
    fn factors(&self, x: f64, out: &mut [f64]) {
        let x2 = x * x;
        scaled_laguerre(self.a, self.kappa * x2, out);
        let env = (-0.5 * self.curvature * x2).exp();
        out.iter_mut().for_each(|v| *v *= env);
    }

    /// `|φ_l(x)|` is bounded by the same expression with `a → -|a|`, whose
    /// polynomial part has non-negative coefficients.
    fn majorants(&self, x: f64, out: &mut [f64]) {
        let x2 = x * x;
        scaled_laguerre(-self.a.abs(), self.kappa * x2, out);
        let env = (-0.5 * self.curvature * x2).exp();
        out.iter_mut().for_each(|v| *v = v.abs() * env);
    }

    fn table(&self, xs: &[f64], size: usize) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(xs.len(), size);
        let mut buf = vec![0.0; size];
        for (i, &x) in xs.iter().enumerate() {
            self.factors(x, &mut buf);
            for (l, v) in buf.iter().enumerate() {
                m[(i, l)] = *v;
            }
        }
        m
    }

    /// Beyond this |x| every majorant (l < size) decreases.
    fn monotone_from(&self, size: usize) -> f64 {
        (2.0 * (size - 1) as f64 / self.curvature).sqrt()
    }

    /// `sup_x` of each majorant, slightly padded.
    fn sup(&self, size: usize) -> Vec<f64> {
        let top = self.monotone_from(size);
        let mut best = vec![0.0f64; size];
        let mut buf = vec![0.0; size];
        for s in 0..=400 {
            self.majorants(top * f64::from(s) / 400.0, &mut buf);
            for (b, v) in best.iter_mut().zip(&buf) {
                *b = b.max(*v);
            }
        }
        best.iter().map(|b| b * 1.01).collect()
    }

    /// Smallest |x| past which `Σ_l weight_l |φ_l(x)| < tol`.
    fn cutoff(&self, weights: &[f64], tol: f64) -> f64 {
        let mut x = self.monotone_from(weights.len());
        let mut buf = vec![0.0; weights.len()];
        loop {
            self.majorants(x, &mut buf);
            let bound: f64 = buf.iter().zip(weights).map(|(f, w)| f * w).sum();
            if bound < tol {
                return x;
            }
            x += 0.05;
        }
    }
}

struct Herald {
    ln_probability: f64,
    re_axis: Axis,
    im_axis: Axis,
    /// `1 / Σ_l q_l(a_1, 0) q_{n-l}(a_2, 0)` in the rescaled variables.
    inv_norm: f64,
}

fn herald(sigma: &TwoModeCovariance, n: u32) -> Result<Herald> {
    sigma.validate()?;
    let (f1, f2) = (sigma.f1(), sigma.f2());
    let (a1, a2) = ((f1 - 1.0) / f1, (f2 - 1.0) / f2);
    // q_l is homogeneous of degree l in (a, p); the two axes together have
    // degree n, so rescaling both by 1/m only rescales P_n by m^n.
    let m = a1.abs().max(a2.abs());
    let rescale = if m > 0.0 { m } else { 1.0 };
    let re_axis = Axis {
        curvature: sigma.s11 - sigma.s13 * sigma.s13 / (2.0 * f1),
        a: a1 / rescale,
        kappa: sigma.s13 * sigma.s13 / (4.0 * f1 * f1 * rescale),
    };
    let im_axis = Axis {
        curvature: sigma.s22 - sigma.s24 * sigma.s24 / (2.0 * f2),
        a: a2 / rescale,
        kappa: sigma.s24 * sigma.s24 / (4.0 * f2 * f2 * rescale),
    };
    if !(re_axis.curvature > 0.0 && im_axis.curvature > 0.0) {
        return Err(Error::Domain("conditional state has a non-decaying envelope".into()));
    }
    let size = n as usize + 1;
    let mut qx = vec![0.0; size];
    let mut qy = vec![0.0; size];
    scaled_laguerre(re_axis.a, 0.0, &mut qx);
    scaled_laguerre(im_axis.a, 0.0, &mut qy);
    let terms = (0..size).map(|l| qx[l] * qy[size - 1 - l]);
    let sum: NeumaierSum = terms.clone().collect();
    let magnitude: f64 = terms.map(f64::abs).sum();
    let sum = sum.total();
    let ln_probability = f64::from(n) * rescale.ln() + sum.max(0.0).ln() - 0.5 * (f1 * f2).ln();
    if !(sum > CANCELLATION_FLOOR * magnitude) {
        return Err(Error::HeraldImpossible {
            n,
            probability: ln_probability.exp(),
        });
    }
    if ln_probability > 1e-10 {
        return Err(Error::Domain(format!(
            "herald probability {} exceeds one",
            ln_probability.exp()
        )));
    }
    Ok(Herald {
        ln_probability,
        re_axis,
        im_axis,
        inv_norm: 1.0 / sum,
    })
}

/// Probability of detecting exactly `n` photons.
pub fn detection_probability(sigma: &TwoModeCovariance, n: u32) -> Result<f64> {
    Ok(herald(sigma, n)?.ln_probability.exp())
}

/// Natural log of [`detection_probability`], finite even when it underflows.
pub fn ln_detection_probability(sigma: &TwoModeCovariance, n: u32) -> Result<f64> {
    Ok(herald(sigma, n)?.ln_probability)
}

/// Heralded mechanical state of an `n`-photon detection.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalChi {
    sigma: TwoModeCovariance,
    n: u32,
    ln_probability: f64,
    re_axis: Axis,
    im_axis: Axis,
    inv_norm: f64,
}

impl ConditionalChi {
    pub fn new(sigma: TwoModeCovariance, n: u32) -> Result<Self> {
        let Herald {
            ln_probability,
            re_axis,
            im_axis,
            inv_norm,
        } = herald(&sigma, n)?;
        Ok(ConditionalChi {
            sigma,
            n,
            ln_probability,
            re_axis,
            im_axis,
            inv_norm,
        })
    }

    pub fn sigma(&self) -> &TwoModeCovariance {
        &self.sigma
    }

    pub fn photons(&self) -> u32 {
        self.n
    }

    pub fn probability(&self) -> f64 {
        self.ln_probability.exp()
    }

    pub fn ln_probability(&self) -> f64 {
        self.ln_probability
    }

    /// Normalization `𝒩_n = 1/P_n`.
    pub fn norm(&self) -> f64 {
        (-self.ln_probability).exp()
    }

    fn size(&self) -> usize {
        self.n as usize + 1
    }

    /// Real-valued χ at `(λ_r, λ_i)`.
    pub fn value(&self, x: f64, y: f64) -> f64 {
        let size = self.size();
        let mut fx = vec![0.0; size];
        let mut gy = vec![0.0; size];
        self.re_axis.factors(x, &mut fx);
        self.im_axis.factors(y, &mut gy);
        let acc: NeumaierSum = (0..size).map(|l| fx[l] * gy[size - 1 - l]).collect();
        acc.total() * self.inv_norm
    }

    /// `im_axis` table with columns reversed so that column `l` pairs with
    /// `re_axis` column `l`.
    fn paired_im_table(&self, ys: &[f64]) -> DMatrix<f64> {
        let size = self.size();
        let g = self.im_axis.table(ys, size);
        DMatrix::from_fn(ys.len(), size, |j, l| g[(j, size - 1 - l)])
    }

    /// Overlap with a cat state using the separable structure of both
    /// functions: only one-dimensional integrals are needed.
    pub fn fidelity_with_cat(&self, cat: &CatState, spec: &GridSpec) -> Result<f64> {
        let (hr, hi) = self.support(spec.lambda_tol)?;
        let (cr, ci) = cat.support(spec.lambda_tol)?;
        let rx = CompositeRule::symmetric(hr.min(cr), spec.panel_width);
        let ry = CompositeRule::symmetric(hi.min(ci), spec.panel_width);
        let size = self.size();
        let fx = self.re_axis.table(&rx.nodes, size);
        let gy = self.paired_im_table(&ry.nodes);
        // u[s][l] = ∫ φ_l(x) u_s(-x) dx, v[s][l] = ∫ ψ_{n-l}(y) v_s(-y) dy
        let mut u = [vec![0.0; size], vec![0.0; size]];
        let mut v = [vec![0.0; size], vec![0.0; size]];
        for (i, (&x, &w)) in rx.nodes.iter().zip(&rx.weights).enumerate() {
            for (s, (us, _)) in cat.separable_terms(-x, 0.0).iter().enumerate() {
                for l in 0..size {
                    u[s][l] += w * fx[(i, l)] * us;
                }
            }
        }
        for (j, (&y, &w)) in ry.nodes.iter().zip(&ry.weights).enumerate() {
            for (s, (_, vs)) in cat.separable_terms(0.0, -y).iter().enumerate() {
                for l in 0..size {
                    v[s][l] += w * gy[(j, l)] * vs;
                }
            }
        }
        let total: NeumaierSum = (0..size)
            .flat_map(|l| (0..2).map(move |s| (l, s)))
            .map(|(l, s)| u[s][l] * v[s][l])
            .collect();
        check_overlap(total.total() * self.inv_norm / PI)
    }
}

impl CharacteristicFunction for ConditionalChi {
    fn eval(&self, lambda: Complex64) -> Complex64 {
        Complex64::new(self.value(lambda.re, lambda.im), 0.0)
    }

    fn support(&self, tol: f64) -> Result<(f64, f64)> {
        let size = self.size();
        let sup_r = self.re_axis.sup(size);
        let sup_i = self.im_axis.sup(size);
        let scale = self.inv_norm.abs();
        let w_r: Vec<f64> = (0..size).map(|l| scale * sup_i[size - 1 - l]).collect();
        let w_i: Vec<f64> = (0..size).map(|m| scale * sup_r[size - 1 - m]).collect();
        Ok((self.re_axis.cutoff(&w_r, tol), self.im_axis.cutoff(&w_i, tol)))
    }

    fn is_real(&self) -> bool {
        true
    }

    fn is_axis_even(&self) -> bool {
        true
    }

    fn eval_grid(&self, xs: &[f64], ys: &[f64]) -> ChiSamples {
        let fx = self.re_axis.table(xs, self.size());
        let gy = self.paired_im_table(ys);
        ChiSamples {
            re: fx * gy.transpose() * self.inv_norm,
            im: None,
        }
    }
}

/// Term-by-term evaluation of the Gamma/Kummer double sums.
pub mod series {
    use std::f64::consts::PI;

    use crate::error::Result;
    use crate::gaussian::TwoModeCovariance;
    use crate::special::{gamma_half_integer, kummer_terminating, ln_binomial, ln_factorial, NeumaierSum};

    fn double_sum(sigma: &TwoModeCovariance, n: u32, x: f64, y: f64) -> f64 {
        let (f1, f2) = (sigma.f1(), sigma.f2());
        let zr = -sigma.s13 * sigma.s13 * x * x / (4.0 * f1);
        let zi = -sigma.s24 * sigma.s24 * y * y / (4.0 * f2);
        let mut acc = NeumaierSum::default();
        for k in 0..=n {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let outer = (ln_binomial(n, k) - ln_factorial(k)).exp();
            for l in 0..=k {
                let m = k - l;
                acc.add(
                    sign * outer
                        * ln_binomial(k, l).exp()
                        * f1.powf(-0.5 - f64::from(l))
                        * f2.powf(-0.5 - f64::from(m))
                        * gamma_half_integer(l)
                        * gamma_half_integer(m)
                        * kummer_terminating(l, zr)
                        * kummer_terminating(m, zi),
                );
            }
        }
        acc.total() / PI
    }

    pub fn detection_probability(sigma: &TwoModeCovariance, n: u32) -> Result<f64> {
        sigma.validate()?;
        Ok(double_sum(sigma, n, 0.0, 0.0))
    }

    pub fn conditional_chi(sigma: &TwoModeCovariance, n: u32, x: f64, y: f64) -> Result<f64> {
        sigma.validate()?;
        let (f1, f2) = (sigma.f1(), sigma.f2());
        let env = (-0.5 * (sigma.s11 - sigma.s13 * sigma.s13 / (2.0 * f1)) * x * x
            - 0.5 * (sigma.s22 - sigma.s24 * sigma.s24 / (2.0 * f2)) * y * y)
            .exp();
        Ok(env * double_sum(sigma, n, x, y) / double_sum(sigma, n, 0.0, 0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::{assemble_output_covariance, squeezed_thermal_moments, ModeKind, SingleModeGaussian, SqueezedThermalSpec};
    use crate::params::Transmissivity;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn sigma(r: f64, nbar: f64, rc: f64, t_power: f64) -> TwoModeCovariance {
        let mech = squeezed_thermal_moments(&SqueezedThermalSpec::mechanical(r, nbar).unwrap(), ModeKind::Mechanical)
            .unwrap();
        let cav = squeezed_thermal_moments(&SqueezedThermalSpec::cavity(rc).unwrap(), ModeKind::Cavity).unwrap();
        assemble_output_covariance(&mech, &cav, Transmissivity::from_power(t_power).unwrap())
    }

    #[test]
    fn vacuum_through_identity_splitter() {
        let s = sigma(0.0, 0.0, 0.0, 1.0);
        assert_relative_eq!(detection_probability(&s, 0).unwrap(), 1.0, epsilon = 1e-14);
        for n in 1..5 {
            assert!(matches!(
                detection_probability(&s, n),
                Err(Error::HeraldImpossible { .. })
            ));
        }
    }

    #[test]
    fn no_subtraction_returns_input() {
        let s = sigma(0.8, 0.1, 0.0, 1.0);
        let chi = ConditionalChi::new(s, 0).unwrap();
        let input = SingleModeGaussian::new(s.s11, s.s22, ModeKind::Mechanical).unwrap();
        for (x, y) in [(0.3, 0.1), (-1.2, 0.5), (2.0, -0.7)] {
            let expected = (-0.5 * (input.a * x * x + input.b * y * y)).exp();
            assert_relative_eq!(chi.value(x, y), expected, max_relative = 1e-13);
        }
    }

    #[test]
    fn reference_herald_probabilities() {
        let cases = [
            (1, 0.51, 0.126),
            (3, 0.65, 0.0366),
            (5, 0.77, 0.0042),
            (2, 0.46, 0.102),
            (4, 0.59, 0.0239),
            (6, 0.70, 0.0037),
        ];
        for (n, t, expected) in cases {
            let p = detection_probability(&sigma(1.1, 0.0, 0.0, t), n).unwrap();
            assert!((p / expected - 1.0).abs() < 0.1, "n = {n}: {p} vs {expected}");
        }
    }

    #[test]
    fn resummation_matches_double_sum() {
        for (n, r, nbar, rc, t) in [(1, 1.1, 0.0, 0.0, 0.51), (3, 1.1, 0.01, 0.3, 0.65), (5, 1.1, 0.2, 0.8, 0.77), (6, 1.1, 0.5, 0.0, 0.3)] {
            let s = sigma(r, nbar, rc, t);
            let p = detection_probability(&s, n).unwrap();
            assert_relative_eq!(p, series::detection_probability(&s, n).unwrap(), max_relative = 1e-10);
            let chi = ConditionalChi::new(s, n).unwrap();
            for (x, y) in [(0.7, 0.3), (-1.1, 0.5), (0.0, 1.4)] {
                let literal = series::conditional_chi(&s, n, x, y).unwrap();
                assert!((chi.value(x, y) - literal).abs() < 1e-10, "{} vs {literal}", chi.value(x, y));
            }
        }
    }

    #[test]
    fn single_photon_herald_closed_form() {
        // P_1 = (2 F_1 F_2 - F_1 - F_2) / (2 (F_1 F_2)^{3/2})
        let s = sigma(0.7, 0.1, 0.2, 0.4);
        let (f1, f2) = (s.f1(), s.f2());
        let expected = (2.0 * f1 * f2 - f1 - f2) / (2.0 * (f1 * f2).powf(1.5));
        assert_relative_eq!(detection_probability(&s, 1).unwrap(), expected, max_relative = 1e-13);
    }

    #[test]
    fn normalized_at_origin() {
        for n in 0..=8 {
            let chi = ConditionalChi::new(sigma(1.1, 0.01, 0.3, 0.6), n).unwrap();
            assert_relative_eq!(chi.value(0.0, 0.0), 1.0, epsilon = 1e-12);
            assert_relative_eq!(chi.norm() * chi.probability(), 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn grid_matches_pointwise() {
        let chi = ConditionalChi::new(sigma(1.1, 0.0, 0.0, 0.65), 3).unwrap();
        let xs = [-2.0, -0.4, 0.0, 1.3];
        let ys = [-0.3, 0.25, 0.9];
        let grid = chi.eval_grid(&xs, &ys);
        for (i, &x) in xs.iter().enumerate() {
            for (j, &y) in ys.iter().enumerate() {
                assert_relative_eq!(grid.re[(i, j)], chi.value(x, y), epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn support_bounds_the_function() {
        let chi = ConditionalChi::new(sigma(1.1, 0.0, 0.0, 0.77), 5).unwrap();
        let (lr, li) = chi.support(1e-12).unwrap();
        for s in 0..200 {
            let t = f64::from(s) * 0.05;
            assert!(chi.value(lr + 0.01, t).abs() < 1e-12);
            assert!(chi.value(t, li + 0.01).abs() < 1e-12);
        }
    }

    #[test]
    fn gaussian_when_nothing_detected() {
        let chi = ConditionalChi::new(sigma(0.9, 0.2, 0.4, 0.4), 0).unwrap();
        // log χ(x, y) = -(a x² + b y²)/2 exactly
        let a = -2.0 * chi.value(1.0, 0.0).ln();
        let b = -2.0 * chi.value(0.0, 1.0).ln();
        for (x, y) in [(0.5, 0.5), (1.5, -0.2), (-0.7, 2.0)] {
            let q = -0.5 * (a * x * x + b * y * y);
            assert!((chi.value(x, y).ln() - q).abs() < 1e-8);
        }
    }

    #[test]
    fn separable_fidelity_matches_generic() {
        use crate::phase_space::fidelity_chi_overlap;
        let spec = GridSpec::default();
        for (n, t, alpha) in [(1, 0.51, 1.2), (4, 0.59, 2.0)] {
            let chi = ConditionalChi::new(sigma(1.1, 0.0056, 0.0, t), n).unwrap();
            let cat = CatState::new(alpha, crate::phase_space::Parity::of_photon_count(n)).unwrap();
            let fast = chi.fidelity_with_cat(&cat, &spec).unwrap();
            let slow = fidelity_chi_overlap(&chi, &cat, &spec).unwrap();
            assert!((fast - slow).abs() < 1e-10, "{fast} vs {slow}");
        }
    }

    proptest! {
        #[test]
        fn probabilities_complete(r in 0.0f64..1.2, nbar in 0.0f64..0.5, rc in 0.0f64..1.0, t in 0.2f64..0.95) {
            let s = sigma(r, nbar, rc, t);
            let mut total = 0.0;
            let mut quiet = 0;
            for n in 0..400 {
                // pure squeezed inputs never emit odd photon numbers
                let p = match detection_probability(&s, n) {
                    Ok(p) => p,
                    Err(Error::HeraldImpossible { .. }) => 0.0,
                    Err(e) => panic!("{e}"),
                };
                prop_assert!((0.0..=1.0).contains(&p));
                total += p;
                quiet = if p < 1e-12 { quiet + 1 } else { 0 };
                if quiet > 3 {
                    break;
                }
            }
            prop_assert!(total <= 1.0 + 1e-9 && total >= 1.0 - 1e-6, "total {}", total);
        }

        #[test]
        fn bounded_and_hermitian(n in 0u32..7, r in 0.0f64..1.2, rc in 0.0f64..1.0, t in 0.3f64..0.95, x in -4.0f64..4.0, y in -4.0f64..4.0) {
            let chi = ConditionalChi::new(sigma(r, 0.0, rc, t), n).unwrap();
            let l = Complex64::new(x, y);
            prop_assert!(chi.eval(l).norm() <= 1.0 + 1e-12);
            prop_assert!((chi.eval(-l) - chi.eval(l).conj()).norm() < 1e-14);
        }
    }
}

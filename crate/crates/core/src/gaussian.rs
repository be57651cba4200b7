//! Zero-mean single-mode Gaussian states, the red/blue-pulse squeezing steady
//! state and the two-mode covariance behind the effective beam splitter.
//!
//! Quadrature moments follow `A = 2⟨o†o⟩ - 2⟨o²⟩ + 1` and
//! `B = 2⟨o†o⟩ + 2⟨o²⟩ + 1`, so the vacuum is `(1, 1)` and a state's
//! characteristic function is `exp(-(A λ_r² + B λ_i²)/2)`.

use std::f64::consts::PI;

use nalgebra::{Matrix4, SMatrix, SVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::Transmissivity;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeKind {
    Mechanical,
    Cavity,
}

/// Squeezed thermal state `S(r e^{iφ}) ρ_th(n̄) S†(r e^{iφ})` with the
/// quadratic squeeze operator `S(ξ) = exp((ξ* o² - ξ o†²)/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezedThermalSpec {
    pub r: f64,
    pub phi: f64,
    pub nbar: f64,
}

impl SqueezedThermalSpec {
    pub fn new(r: f64, phi: f64, nbar: f64) -> Result<Self> {
        if !(r.is_finite() && r >= 0.0) {
            return Err(Error::Domain(format!("squeezing degree must be >= 0, got {r}")));
        }
        if !(nbar.is_finite() && nbar >= 0.0) {
            return Err(Error::Domain(format!("thermal occupation must be >= 0, got {nbar}")));
        }
        Ok(SqueezedThermalSpec { r, phi, nbar })
    }

    pub fn vacuum() -> Self {
        SqueezedThermalSpec { r: 0.0, phi: 0.0, nbar: 0.0 }
    }

    /// Squeezed vacuum along the mechanical convention (φ = π).
    pub fn mechanical(r: f64, nbar: f64) -> Result<Self> {
        Self::new(r, PI, nbar)
    }

    /// Squeezed vacuum along the cavity-input convention (φ = 0).
    pub fn cavity(r: f64) -> Result<Self> {
        Self::new(r, 0.0, 0.0)
    }
}

/// Quadrature moments `(A, B)` of a zero-mean single-mode Gaussian state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingleModeGaussian {
    pub a: f64,
    pub b: f64,
    pub kind: ModeKind,
}

impl SingleModeGaussian {
    pub fn new(a: f64, b: f64, kind: ModeKind) -> Result<Self> {
        if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
            return Err(Error::Domain(format!("moments must be positive, got A = {a}, B = {b}")));
        }
        if a * b < 1.0 - 1e-9 {
            return Err(Error::Domain(format!("A·B = {} violates the uncertainty bound", a * b)));
        }
        Ok(SingleModeGaussian { a, b, kind })
    }

    pub fn vacuum(kind: ModeKind) -> Self {
        SingleModeGaussian { a: 1.0, b: 1.0, kind }
    }

    /// `Tr ρ² = 1/√(AB)`
    pub fn purity(&self) -> f64 {
        1.0 / (self.a * self.b).sqrt()
    }

    /// Squeezed-thermal parameters reproducing these moments.
    pub fn spec(&self) -> SqueezedThermalSpec {
        let det = (self.a * self.b).sqrt();
        SqueezedThermalSpec {
            r: 0.25 * (self.b / self.a).ln().abs(),
            phi: if self.a <= self.b { PI } else { 0.0 },
            nbar: (0.5 * (det - 1.0)).max(0.0),
        }
    }
}

fn angle_is(phi: f64, target: f64) -> bool {
    let d = (phi - target).rem_euclid(2.0 * PI);
    d < 1e-12 || 2.0 * PI - d < 1e-12
}

/// Moments of a squeezed thermal state; only the angles 0 and π are modelled.
pub fn squeezed_thermal_moments(spec: &SqueezedThermalSpec, kind: ModeKind) -> Result<SingleModeGaussian> {
    let spec = SqueezedThermalSpec::new(spec.r, spec.phi, spec.nbar)?;
    let scale = 2.0 * spec.nbar + 1.0;
    let (a, b) = if angle_is(spec.phi, PI) {
        (scale * (-2.0 * spec.r).exp(), scale * (2.0 * spec.r).exp())
    } else if angle_is(spec.phi, 0.0) {
        (scale * (2.0 * spec.r).exp(), scale * (-2.0 * spec.r).exp())
    } else {
        return Err(Error::Domain(format!(
            "squeezing angle {} not supported; use 0 or π",
            spec.phi
        )));
    };
    SingleModeGaussian::new(a, b, kind)
}

/// Bogoliubov squeezing `atanh(g_1b / g_1r)` of the dissipation-free limit.
pub fn nominal_squeezing(g_1r: f64, g_1b: f64) -> Result<f64> {
    if !(g_1b >= 0.0 && g_1b < g_1r) {
        return Err(Error::Instability(format!(
            "need 0 <= g_1b < g_1r, got g_1b = {g_1b:.4e}, g_1r = {g_1r:.4e}"
        )));
    }
    Ok((g_1b / g_1r).atanh())
}

/// Steady-state mechanical moments under simultaneous red and blue driving.
///
/// Closed-form solution of the linear cavity–mechanics Langevin equations:
///
/// ```text
/// A, B = [(2n̄+1) γ (4g² + κ(κ+γ)) + 4κ (g_1r ∓ g_1b)²] / [(κ+γ)(4g² + κγ)]
/// g²   = g_1r² - g_1b²
/// ```
///
/// The squeezed axis follows the blue-drive phase; the moments are reported
/// with the squeezed quadrature first (φ = π).
pub fn steady_state_moments(
    g_1r: f64,
    g_1b: f64,
    kappa_c: f64,
    gamma_m: f64,
    nbar_th: f64,
) -> Result<SingleModeGaussian> {
    nominal_squeezing(g_1r, g_1b)?;
    let g_sq = g_1r * g_1r - g_1b * g_1b;
    let thermal = (2.0 * nbar_th + 1.0) * gamma_m * (4.0 * g_sq + kappa_c * (kappa_c + gamma_m));
    let denom = (kappa_c + gamma_m) * (4.0 * g_sq + kappa_c * gamma_m);
    let a = (thermal + 4.0 * kappa_c * (g_1r - g_1b).powi(2)) / denom;
    let b = (thermal + 4.0 * kappa_c * (g_1r + g_1b).powi(2)) / denom;
    SingleModeGaussian::new(a, b, ModeKind::Mechanical)
}

/// Squeezing degree, angle and thermal occupation of the step-one steady state.
pub fn steady_state_squeezing(
    g_1r: f64,
    g_1b: f64,
    kappa_c: f64,
    gamma_m: f64,
    nbar_th: f64,
) -> Result<SqueezedThermalSpec> {
    let moments = steady_state_moments(g_1r, g_1b, kappa_c, gamma_m, nbar_th)?;
    let mut spec = moments.spec();
    spec.phi = PI;
    Ok(spec)
}

/// Steady covariance of `(x_c, p_c, x_m, p_m)` from the Lyapunov equation
/// `D V + V Dᵀ + N = 0` of the linearized equations of motion.
///
/// Quadratures are `x = o + o†`, `p = -i(o - o†)`, so the vacuum is the
/// identity. `g_1b` is signed: its sign is the blue-drive phase, and
/// `-g_1b` reproduces the φ = π orientation of [`steady_state_moments`].
pub fn lyapunov_steady_state(
    g_1r: f64,
    g_1b: f64,
    kappa_c: f64,
    gamma_m: f64,
    nbar_th: f64,
) -> Result<Matrix4<f64>> {
    // d/dt a = -κ/2 a - i g_1b b† - i g_1r b + noise
    // d/dt b = -γ/2 b - i g_1b a† - i g_1r a + noise
    let (kh, gh) = (0.5 * kappa_c, 0.5 * gamma_m);
    let (minus, plus) = (g_1r - g_1b, g_1r + g_1b);
    #[rustfmt::skip]
    let drift = Matrix4::new(
        -kh,   0.0,   0.0,   minus,
        0.0,   -kh,   -plus, 0.0,
        0.0,   minus, -gh,   0.0,
        -plus, 0.0,   0.0,   -gh,
    );
    let eig = drift.complex_eigenvalues();
    if let Some(bad) = eig.iter().find(|z| z.re >= 0.0) {
        return Err(Error::Instability(format!(
            "drift eigenvalue {:.4e}{:+.4e}i has non-negative real part",
            bad.re, bad.im
        )));
    }
    let noise = Matrix4::from_diagonal(&nalgebra::Vector4::new(
        kappa_c,
        kappa_c,
        gamma_m * (2.0 * nbar_th + 1.0),
        gamma_m * (2.0 * nbar_th + 1.0),
    ));

    // Column-major vec: vec(DV) = (I ⊗ D) vec V, vec(V Dᵀ) = (D ⊗ I) vec V.
    let mut kron = SMatrix::<f64, 16, 16>::zeros();
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                kron[(4 * i + j, 4 * i + k)] += drift[(j, k)];
                kron[(4 * i + k, 4 * j + k)] += drift[(i, j)];
            }
        }
    }
    let rhs = SVector::<f64, 16>::from_iterator(noise.iter().map(|x| -x));
    let vec = kron
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Instability("singular Lyapunov operator".into()))?;
    let v = Matrix4::from_iterator(vec.iter().copied());
    Ok(0.5 * (v + v.transpose()))
}

/// Correlation matrix of the two beam-splitter output modes over
/// `(η_r, η_i, ζ_r, ζ_i)`; only the six listed entries are non-zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoModeCovariance {
    pub s11: f64,
    pub s22: f64,
    pub s33: f64,
    pub s44: f64,
    pub s13: f64,
    pub s24: f64,
}

impl TwoModeCovariance {
    pub fn validate(&self) -> Result<()> {
        let blocks = [(self.s11, self.s33, self.s13), (self.s22, self.s44, self.s24)];
        for (p, q, c) in blocks {
            if !(p > 0.0 && q > 0.0 && p * q - c * c > 0.0) {
                return Err(Error::Domain(format!(
                    "covariance block [[{p}, {c}], [{c}, {q}]] is not positive definite"
                )));
            }
        }
        Ok(())
    }

    /// `F_1 = (σ_33 + 1)/2`
    pub fn f1(&self) -> f64 {
        0.5 * (self.s33 + 1.0)
    }

    /// `F_2 = (σ_44 + 1)/2`
    pub fn f2(&self) -> f64 {
        0.5 * (self.s44 + 1.0)
    }

    pub fn matrix(&self) -> Matrix4<f64> {
        #[rustfmt::skip]
        let m = Matrix4::new(
            self.s11, 0.0,      self.s13, 0.0,
            0.0,      self.s22, 0.0,      self.s24,
            self.s13, 0.0,      self.s33, 0.0,
            0.0,      self.s24, 0.0,      self.s44,
        );
        m
    }

    pub fn rows(&self) -> [[f64; 4]; 4] {
        let m = self.matrix();
        let mut out = [[0.0; 4]; 4];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = m[(i, j)];
            }
        }
        out
    }
}

/// Output correlations of the effective beam splitter fed by the mechanical
/// and cavity inputs.
pub fn assemble_output_covariance(
    mech: &SingleModeGaussian,
    cav: &SingleModeGaussian,
    t: Transmissivity,
) -> TwoModeCovariance {
    let tt = t.power();
    let rr = 1.0 - tt;
    let tr = t.amplitude() * t.reflectivity();
    TwoModeCovariance {
        s11: mech.a * tt + cav.a * rr,
        s22: mech.b * tt + cav.b * rr,
        s33: mech.a * rr + cav.a * tt,
        s44: mech.b * rr + cav.b * tt,
        s13: tr * (mech.a - cav.a),
        s24: tr * (mech.b - cav.b),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{collective_coupling, thermal_occupancy, PhysicalParams};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn reference_couplings() -> (f64, f64, PhysicalParams) {
        let p = PhysicalParams::reference_device();
        let g1r = collective_coupling(80e-6, &p).unwrap();
        let g1b = collective_coupling(50e-6, &p).unwrap();
        (g1r, g1b, p)
    }

    #[test]
    fn moments_of_simple_states() {
        let vac = squeezed_thermal_moments(&SqueezedThermalSpec::vacuum(), ModeKind::Cavity).unwrap();
        assert_eq!((vac.a, vac.b), (1.0, 1.0));
        let sq = squeezed_thermal_moments(&SqueezedThermalSpec::mechanical(1.1, 0.0).unwrap(), ModeKind::Mechanical)
            .unwrap();
        assert_relative_eq!(sq.a, (-2.2f64).exp(), max_relative = 1e-14);
        assert_relative_eq!(sq.b, 2.2f64.exp(), max_relative = 1e-14);
        assert!((sq.a - 0.1108).abs() < 1e-4 && (sq.b - 9.025).abs() < 1e-3);
        let th = squeezed_thermal_moments(&SqueezedThermalSpec::new(0.0, 0.0, 3.5).unwrap(), ModeKind::Mechanical)
            .unwrap();
        assert_eq!((th.a, th.b), (8.0, 8.0));
        let cav = squeezed_thermal_moments(&SqueezedThermalSpec::cavity(0.5).unwrap(), ModeKind::Cavity).unwrap();
        assert_relative_eq!(cav.a, 1f64.exp(), max_relative = 1e-14);
    }

    #[test]
    fn unsupported_angle_rejected() {
        let spec = SqueezedThermalSpec::new(0.3, 0.5, 0.0).unwrap();
        assert!(matches!(
            squeezed_thermal_moments(&spec, ModeKind::Cavity),
            Err(Error::Domain(_))
        ));
        assert!(SqueezedThermalSpec::new(-0.1, 0.0, 0.0).is_err());
    }

    #[test]
    fn no_blue_drive_means_no_squeezing() {
        let (g1r, _, p) = reference_couplings();
        let spec = steady_state_squeezing(g1r, 0.0, p.kappa_c, p.gamma_m, 2.0).unwrap();
        assert!(spec.r.abs() < 1e-12);
        // plain sideband cooling from n̄_th = 2
        assert!(spec.nbar > 0.0 && spec.nbar < 2.0);
    }

    #[test]
    fn vanishing_damping_gives_squeezed_vacuum() {
        let (g1r, g1b, p) = reference_couplings();
        let spec = steady_state_squeezing(g1r, g1b, p.kappa_c, p.gamma_m * 1e-9, 0.0).unwrap();
        assert!(spec.nbar < 1e-9, "{}", spec.nbar);
        assert_relative_eq!(spec.r, (g1b / g1r).atanh(), max_relative = 1e-8);
    }

    #[test]
    fn reference_drive_squeezing() {
        let (g1r, g1b, p) = reference_couplings();
        let nominal = nominal_squeezing(g1r, g1b).unwrap();
        assert!((1.05..=1.10).contains(&nominal), "{nominal}");
        let nbar = thermal_occupancy(p.omega_m, p.temperature);
        let spec = steady_state_squeezing(g1r, g1b, p.kappa_c, p.gamma_m, nbar).unwrap();
        assert!((spec.r - 1.07).abs() < 0.01, "{}", spec.r);
        assert!(spec.nbar > 0.004 && spec.nbar < 0.007, "{}", spec.nbar);
        assert_eq!(spec.phi, PI);
    }

    #[test]
    fn lyapunov_decoupled_modes() {
        let v = lyapunov_steady_state(0.0, 0.0, 3.0, 0.5, 2.5).unwrap();
        assert_relative_eq!(v, Matrix4::from_diagonal(&nalgebra::Vector4::new(1.0, 1.0, 6.0, 6.0)), epsilon = 1e-12);
    }

    #[test]
    fn lyapunov_rejects_antidamping() {
        let (g1r, g1b, p) = reference_couplings();
        assert!(matches!(
            lyapunov_steady_state(g1b, g1r, p.kappa_c, p.gamma_m, 0.0),
            Err(Error::Instability(_))
        ));
        assert!(steady_state_squeezing(g1b, g1r, p.kappa_c, p.gamma_m, 0.0).is_err());
    }

    #[test]
    fn lyapunov_matches_closed_form_at_reference_drive() {
        let (g1r, g1b, p) = reference_couplings();
        let nbar = 7.5e-4;
        let v = lyapunov_steady_state(g1r, -g1b, p.kappa_c, p.gamma_m, nbar).unwrap();
        let m = steady_state_moments(g1r, g1b, p.kappa_c, p.gamma_m, nbar).unwrap();
        assert!((v[(3, 3)] - m.a).abs() < 1e-6);
        assert!((v[(2, 2)] - m.b).abs() < 1e-6);
        assert!(v[(2, 3)].abs() < 1e-9);
    }

    #[test]
    fn blue_phase_rotates_squeezed_axis() {
        let (g1r, g1b, p) = reference_couplings();
        let plus = lyapunov_steady_state(g1r, g1b, p.kappa_c, p.gamma_m, 0.0).unwrap();
        let minus = lyapunov_steady_state(g1r, -g1b, p.kappa_c, p.gamma_m, 0.0).unwrap();
        assert_relative_eq!(plus[(2, 2)], minus[(3, 3)], max_relative = 1e-9);
        assert_relative_eq!(plus[(3, 3)], minus[(2, 2)], max_relative = 1e-9);
    }

    #[test]
    fn identity_beam_splitter_keeps_inputs() {
        let mech = SingleModeGaussian::new(0.2, 6.0, ModeKind::Mechanical).unwrap();
        let cav = SingleModeGaussian::vacuum(ModeKind::Cavity);
        let s = assemble_output_covariance(&mech, &cav, Transmissivity::from_amplitude(1.0).unwrap());
        assert_eq!((s.s11, s.s22, s.s33, s.s44, s.s13, s.s24), (0.2, 6.0, 1.0, 1.0, 0.0, 0.0));
    }

    #[test]
    fn identical_inputs_do_not_correlate() {
        let m = SingleModeGaussian::new(0.5, 3.0, ModeKind::Mechanical).unwrap();
        let c = SingleModeGaussian::new(0.5, 3.0, ModeKind::Cavity).unwrap();
        let s = assemble_output_covariance(&m, &c, Transmissivity::from_power(0.3).unwrap());
        assert_eq!((s.s13, s.s24), (0.0, 0.0));
    }

    proptest! {
        #[test]
        fn lyapunov_agrees_with_closed_form(ratio in 0.0f64..0.95, nbar in 0.0f64..10.0, kappa in 1e6f64..1e10, gamma in 1e2f64..1e6, g1r in 1e6f64..1e9) {
            let g1b = ratio * g1r;
            let v = lyapunov_steady_state(g1r, -g1b, kappa, gamma, nbar).unwrap();
            let m = steady_state_moments(g1r, g1b, kappa, gamma, nbar).unwrap();
            prop_assert!((v[(3, 3)] - m.a).abs() <= 1e-6 * m.a.max(1.0));
            prop_assert!((v[(2, 2)] - m.b).abs() <= 1e-6 * m.b.max(1.0));
        }

        #[test]
        fn beam_splitter_conserves_trace(a in 0.05f64..20.0, b in 1.0f64..20.0, r in 0.0f64..1.5, t in 0.01f64..1.0) {
            let mech = SingleModeGaussian::new(a, b.max(1.0 / a), ModeKind::Mechanical).unwrap();
            let cav = squeezed_thermal_moments(&SqueezedThermalSpec::cavity(r).unwrap(), ModeKind::Cavity).unwrap();
            let s = assemble_output_covariance(&mech, &cav, Transmissivity::from_amplitude(t).unwrap());
            let trace = s.s11 + s.s22 + s.s33 + s.s44;
            prop_assert!((trace - (mech.a + mech.b + cav.a + cav.b)).abs() < 1e-10 * trace);
            prop_assert!(s.validate().is_ok());
            prop_assert!(s.f1() >= 0.5 && s.f2() >= 0.5);
        }

        #[test]
        fn heisenberg_bound(r in 0.0f64..3.0, nbar in 0.0f64..5.0, odd in proptest::bool::ANY) {
            let spec = SqueezedThermalSpec::new(r, if odd { PI } else { 0.0 }, nbar).unwrap();
            let m = squeezed_thermal_moments(&spec, ModeKind::Mechanical).unwrap();
            let ab = m.a * m.b;
            prop_assert!(ab >= 1.0 - 1e-12);
            if nbar == 0.0 {
                prop_assert!((ab - 1.0).abs() < 1e-12);
            } else {
                prop_assert!(ab > 1.0);
            }
        }
    }
}

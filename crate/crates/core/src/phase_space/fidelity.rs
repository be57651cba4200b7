use std::f64::consts::PI;

use super::chi::CharacteristicFunction;
use super::quadrature::CompositeRule;
use super::wigner::GridSpec;
use crate::error::{Error, Result};

/// `F = π⁻¹ ∫ χ_a(λ) χ_b(-λ) d²λ`, the overlap `Tr[ρ_a ρ_b]`.
///
/// Equals the fidelity when either state is pure. Round-off below zero is
/// clamped; a result above one signals an under-resolved quadrature.
pub fn fidelity_chi_overlap<A, B>(chi_a: &A, chi_b: &B, spec: &GridSpec) -> Result<f64>
where
    A: CharacteristicFunction + ?Sized,
    B: CharacteristicFunction + ?Sized,
{
    let (ar, ai) = chi_a.support(spec.lambda_tol)?;
    let (br, bi) = chi_b.support(spec.lambda_tol)?;
    let rx = CompositeRule::symmetric(ar.min(br), spec.panel_width);
    let ry = CompositeRule::symmetric(ai.min(bi), spec.panel_width);
    let neg_x: Vec<f64> = rx.nodes.iter().map(|x| -x).collect();
    let neg_y: Vec<f64> = ry.nodes.iter().map(|y| -y).collect();
    let a = chi_a.eval_grid(&rx.nodes, &ry.nodes);
    let b = chi_b.eval_grid(&neg_x, &neg_y);
    let mut total = 0.0;
    for (j, wx) in rx.weights.iter().enumerate() {
        let mut row = 0.0;
        for (k, wy) in ry.weights.iter().enumerate() {
            let mut v = a.re[(j, k)] * b.re[(j, k)];
            if let (Some(ai), Some(bi)) = (&a.im, &b.im) {
                v -= ai[(j, k)] * bi[(j, k)];
            }
            row += wy * v;
        }
        total += wx * row;
    }
    check_overlap(total / PI)
}

pub(crate) fn check_overlap(f: f64) -> Result<f64> {
    if !f.is_finite() || f > 1.0 + 1e-6 || f < -1e-6 {
        return Err(Error::Convergence(format!(
            "overlap {f:.8} outside [0, 1]; refine the λ quadrature"
        )));
    }
    Ok(f.clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase_space::chi::{CatState, GaussianChi, Rotated};
    use approx::assert_relative_eq;

    #[test]
    fn self_overlaps() {
        let spec = GridSpec::default();
        let vac = GaussianChi::vacuum();
        assert_relative_eq!(fidelity_chi_overlap(&vac, &vac, &spec).unwrap(), 1.0, epsilon = 1e-12);
        let cat = CatState::odd(2.0).unwrap();
        assert_relative_eq!(fidelity_chi_overlap(&cat, &cat, &spec).unwrap(), 1.0, epsilon = 1e-10);
        // thermal purity 1/(2n̄+1)
        let th = GaussianChi::thermal(1.5);
        assert_relative_eq!(fidelity_chi_overlap(&th, &th, &spec).unwrap(), 0.25, epsilon = 1e-12);
    }

    #[test]
    fn cat_vacuum_overlap() {
        // |⟨0|ψ_+⟩|² = 2 e^{-α²} / (1 + e^{-2α²})
        let a: f64 = 1.3;
        let cat = CatState::even(a).unwrap();
        let exact = 2.0 * (-a * a).exp() / (1.0 + (-2.0 * a * a).exp());
        let f = fidelity_chi_overlap(&cat, &GaussianChi::vacuum(), &GridSpec::default()).unwrap();
        assert_relative_eq!(f, exact, epsilon = 1e-12);
        let odd = CatState::odd(a).unwrap();
        assert!(fidelity_chi_overlap(&odd, &GaussianChi::vacuum(), &GridSpec::default()).unwrap() < 1e-12);
    }

    #[test]
    fn symmetric_in_arguments() {
        let spec = GridSpec::default();
        let cat = CatState::odd(1.1).unwrap();
        let sq = Rotated { inner: GaussianChi::new(0.3, 1.0 / 0.3), theta: 0.4 };
        let ab = fidelity_chi_overlap(&cat, &sq, &spec).unwrap();
        let ba = fidelity_chi_overlap(&sq, &cat, &spec).unwrap();
        assert!((ab - ba).abs() < 1e-12);
        assert!((0.0..=1.0).contains(&ab));
    }
}

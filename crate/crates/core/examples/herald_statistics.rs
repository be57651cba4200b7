//! Photon-count statistics of the heralding detector for the reference
//! squeezed state, and the conditional states they herald.

use mechcat::gaussian::{assemble_output_covariance, squeezed_thermal_moments, ModeKind, SingleModeGaussian, SqueezedThermalSpec};
use mechcat::{detection_probability, ConditionalChi, Complex64, Transmissivity};
use mechcat::phase_space::CharacteristicFunction;

fn main() -> mechcat::Result<()> {
    let mech = squeezed_thermal_moments(&SqueezedThermalSpec::mechanical(1.1, 0.0)?, ModeKind::Mechanical)?;
    let vacuum = SingleModeGaussian::vacuum(ModeKind::Cavity);

    for power in [0.46, 0.51, 0.65, 0.77] {
        let sigma = assemble_output_covariance(&mech, &vacuum, Transmissivity::from_power(power)?);
        let probs: Vec<f64> = (0..8).map(|n| detection_probability(&sigma, n)).collect::<Result<_, _>>()?;
        let shown: Vec<String> = probs.iter().map(|p| format!("{:.4}", p)).collect();
        println!("T = {power:.2}: P_0..7 = [{}], sum {:.6}", shown.join(", "), probs.iter().sum::<f64>());
    }

    let sigma = assemble_output_covariance(&mech, &vacuum, Transmissivity::from_power(0.51)?);
    let chi = ConditionalChi::new(sigma, 1)?;
    println!("\none-photon herald, P = {:.4}", chi.probability());
    for (x, y) in [(0.0, 0.0), (0.5, 0.0), (0.0, 0.5), (1.0, 1.0)] {
        println!("  chi({x}, {y}) = {:+.6}", chi.eval(Complex64::new(x, y)).re);
    }
    Ok(())
}

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::FockDensityMatrix;
use crate::error::{Error, Result};
use crate::special::ln_binomial;

/// Thermal Lindblad generator
/// `γ(n̄+1) D[a]ρ + γ n̄ D[a†]ρ`, with the truncated `a a†` so that the
/// trace is conserved exactly.
fn lindblad(rho: &DMatrix<Complex64>, gamma: f64, nbar: f64) -> DMatrix<Complex64> {
    let d = rho.nrows();
    let down = gamma * (nbar + 1.0);
    let up = gamma * nbar;
    let aad = |k: usize| if k + 1 < d { (k + 1) as f64 } else { 0.0 };
    DMatrix::from_fn(d, d, |m, n| {
        let mut v = rho[(m, n)] * (-0.5 * down * (m + n) as f64 - 0.5 * up * (aad(m) + aad(n)));
        if m + 1 < d && n + 1 < d {
            v += rho[(m + 1, n + 1)] * (down * (((m + 1) * (n + 1)) as f64).sqrt());
        }
        if m >= 1 && n >= 1 {
            v += rho[(m - 1, n - 1)] * (up * ((m * n) as f64).sqrt());
        }
        v
    })
}

fn rk4(rho: &DMatrix<Complex64>, gamma: f64, nbar: f64, t: f64, steps: usize) -> DMatrix<Complex64> {
    let h = t / steps as f64;
    let c = |x: f64| Complex64::new(x, 0.0);
    let mut state = rho.clone();
    for _ in 0..steps {
        let k1 = lindblad(&state, gamma, nbar);
        let k2 = lindblad(&(&state + &k1 * c(0.5 * h)), gamma, nbar);
        let k3 = lindblad(&(&state + &k2 * c(0.5 * h)), gamma, nbar);
        let k4 = lindblad(&(&state + &k3 * c(h)), gamma, nbar);
        state += (k1 + k2 * c(2.0) + k3 * c(2.0) + k4) * c(h / 6.0);
    }
    state
}

/// Evolve under thermal damping for time `t`, halving the RK4 step until the
/// result moves by less than 1e-8.
pub fn damp_rho(rho: &FockDensityMatrix, gamma_m: f64, nbar: f64, t: f64) -> Result<FockDensityMatrix> {
    if t == 0.0 || gamma_m == 0.0 {
        return Ok(rho.clone());
    }
    let d = rho.dim() as f64;
    // keep h inside the RK4 stability region of the fastest decay
    let stiff = gamma_m * ((2.0 * nbar + 1.0) * d + 1.0);
    let mut steps = ((stiff * t / 2.0).ceil() as usize).max(4);
    let mut last = rk4(&rho.matrix, gamma_m, nbar, t, steps);
    for _ in 0..20 {
        steps *= 2;
        let next = rk4(&rho.matrix, gamma_m, nbar, t, steps);
        let change = (&next - &last).camax();
        last = next;
        if change < 1e-8 {
            let out = FockDensityMatrix { matrix: last };
            out.check_tail()?;
            return Ok(out);
        }
    }
    Err(Error::Convergence("damping integration did not settle".into()))
}

/// Mix with vacuum at amplitude transmissivity `eta` and trace out the
/// environment: Kraus operators `K_k = Σ_n √C(n,k) η^{n-k} (1-η²)^{k/2} |n-k⟩⟨n|`.
pub fn loss_channel(rho: &FockDensityMatrix, eta: f64) -> FockDensityMatrix {
    let d = rho.dim();
    let r = (1.0 - eta * eta).max(0.0).sqrt();
    let coeff = |n: usize, k: usize| -> f64 {
        let mut ln = 0.5 * ln_binomial(n as u32, k as u32);
        let (pe, pr) = ((n - k) as f64, k as f64);
        if pe > 0.0 {
            if eta == 0.0 {
                return 0.0;
            }
            ln += pe * eta.ln();
        }
        if pr > 0.0 {
            if r == 0.0 {
                return 0.0;
            }
            ln += pr * r.ln();
        }
        ln.exp()
    };
    let mut out = DMatrix::<Complex64>::zeros(d, d);
    for k in 0..d {
        for m in k..d {
            let cm = coeff(m, k);
            if cm == 0.0 {
                continue;
            }
            for n in k..d {
                let cn = coeff(n, k);
                out[(m - k, n - k)] += rho.matrix[(m, n)] * (cm * cn);
            }
        }
    }
    FockDensityMatrix { matrix: out }
}

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::FockDensityMatrix;
use crate::error::{Error, Result};
use crate::params::Transmissivity;
use crate::special::{ln_binomial, ln_factorial};

fn ln_pow(ln_base: f64, exponent: u32) -> f64 {
    if exponent == 0 {
        0.0
    } else {
        f64::from(exponent) * ln_base
    }
}

/// `⟨j, n| U |a, j + n - a⟩` (mechanics first, cavity second) for the
/// passive unitary with `U† b U = t b + R a`, `U† a U = t a - R b`.
///
/// Expanding `U†|j, n⟩ = (t a† - R b†)^j (R a† + t b†)^n |0⟩ / √(j! n!)`
/// leaves a sum over at most `n + 1` terms.
pub fn beam_splitter_amplitude(t: Transmissivity, j: u32, n: u32, a: u32) -> f64 {
    let total = j + n;
    if a > total {
        return 0.0;
    }
    let (ln_t, ln_r) = (t.amplitude().ln(), t.reflectivity().ln());
    let norm = 0.5 * (ln_factorial(a) + ln_factorial(total - a) - ln_factorial(j) - ln_factorial(n));
    let mut acc = 0.0;
    for q in a.saturating_sub(j)..=n.min(a) {
        let p = a - q;
        let ln_mag = ln_binomial(n, q)
            + ln_binomial(j, p)
            + ln_pow(ln_t, (n - q) + p)
            + ln_pow(ln_r, q + (j - p))
            + norm;
        let sign = if (j - p) % 2 == 0 { 1.0 } else { -1.0 };
        acc += sign * ln_mag.exp();
    }
    acc
}

/// Mix the two modes, detect `n` photons in the cavity mode and return the
/// normalized mechanical state with its probability.
pub fn beam_splitter_project(
    rho_m: &FockDensityMatrix,
    rho_c: &FockDensityMatrix,
    t: Transmissivity,
    n: u32,
) -> Result<(FockDensityMatrix, f64)> {
    let (dm, dc) = (rho_m.dim(), rho_c.dim());
    let d = dm;
    // rows[j][a] = ⟨j, n|U|a, j + n - a⟩ for admissible input levels
    let rows: Vec<Vec<(usize, usize, f64)>> = (0..d)
        .map(|j| {
            let total = j + n as usize;
            (0..=total)
                .filter(|&a| a < dm && total - a < dc)
                .map(|a| (a, total - a, beam_splitter_amplitude(t, j as u32, n, a as u32)))
                .filter(|&(_, _, u)| u != 0.0)
                .collect()
        })
        .collect();
    let cavity_vacuum = rho_c.matrix.iter().enumerate().all(|(k, v)| k == 0 || *v == Complex64::new(0.0, 0.0));
    let mut out = DMatrix::<Complex64>::zeros(d, d);
    for j in 0..d {
        for jp in 0..=j {
            let mut acc = Complex64::new(0.0, 0.0);
            if cavity_vacuum {
                let total = j + n as usize;
                let total_p = jp + n as usize;
                if total < dm && total_p < dm {
                    let u = beam_splitter_amplitude(t, j as u32, n, total as u32);
                    let up = beam_splitter_amplitude(t, jp as u32, n, total_p as u32);
                    acc = rho_m.matrix[(total, total_p)] * rho_c.matrix[(0, 0)] * (u * up);
                }
            } else {
                for &(a, b, u) in &rows[j] {
                    for &(ap, bp, up) in &rows[jp] {
                        let c = rho_c.matrix[(b, bp)];
                        if c.re == 0.0 && c.im == 0.0 {
                            continue;
                        }
                        acc += rho_m.matrix[(a, ap)] * c * (u * up);
                    }
                }
            }
            out[(j, jp)] = acc;
            out[(jp, j)] = acc.conj();
        }
    }
    let p = out.trace().re;
    if !(p >= 1e-15) {
        return Err(Error::HeraldImpossible { n, probability: p.max(0.0) });
    }
    let state = FockDensityMatrix { matrix: out }.normalized();
    state.check_tail()?;
    Ok((state, p))
}

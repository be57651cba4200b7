//! Gamma function at half-integers and the terminating Kummer series
//! M(-l, 1/2, z), plus a compensated accumulator used by the double sums of
//! the heralded-state formulas.

use std::f64::consts::PI;

/// Γ(1/2 + k) = (2k)! √π / (4^k k!), evaluated as √π ∏_{j=1}^{k} (j - 1/2).
pub fn gamma_half_integer(k: u32) -> f64 {
    (1..=k).fold(PI.sqrt(), |acc, j| acc * (f64::from(j) - 0.5))
}

/// ln Γ(1/2 + k).
pub fn ln_gamma_half_integer(k: u32) -> f64 {
    (1..=k).fold(0.5 * PI.ln(), |acc, j| acc + (f64::from(j) - 0.5).ln())
}

/// ln k!
pub fn ln_factorial(k: u32) -> f64 {
    (2..=k).map(|j| f64::from(j).ln()).sum()
}

/// ln C(n, k)
pub fn ln_binomial(n: u32, k: u32) -> f64 {
    debug_assert!(k <= n);
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

/// Confluent hypergeometric M(-l, 1/2, z), a degree-`l` polynomial in `z`.
///
/// Summed from the terminating series
/// `Σ_{j=0}^{l} (-l)_j / ((1/2)_j j!) z^j`.
pub fn kummer_terminating(l: u32, z: f64) -> f64 {
    let mut acc = NeumaierSum::default();
    let mut term = 1.0;
    for j in 0..=l {
        acc.add(term);
        let jf = f64::from(j);
        term *= (jf - f64::from(l)) / (0.5 + jf) * z / (jf + 1.0);
    }
    acc.total()
}

/// Fill `out[l] = M(-l, 1/2, z)` for `l = 0..out.len()`.
///
/// Uses the contiguous relation
/// `(l+1/2) M(-l-1) = (2l + 1/2 - z) M(-l) - l M(-l+1)` (with b = 1/2), which
/// is stable for the non-positive `z` the heralded formulas produce.
pub fn kummer_terminating_all(z: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = 1.0;
    if out.len() > 1 {
        out[1] = 1.0 - 2.0 * z;
    }
    for l in 1..out.len().saturating_sub(1) {
        let lf = l as f64;
        out[l + 1] = ((2.0 * lf + 0.5 - z) * out[l] - lf * out[l - 1]) / (lf + 0.5);
    }
}

/// Neumaier (improved Kahan–Babuška) summation.
#[derive(Debug, Default, Clone, Copy)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = NeumaierSum::default();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gamma_at_half_integers() {
        assert_relative_eq!(gamma_half_integer(0), PI.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(gamma_half_integer(1), PI.sqrt() / 2.0, max_relative = 1e-15);
        // Γ(7/2) = 5/2 · 3/2 · 1/2 · √π
        assert_relative_eq!(gamma_half_integer(3), 15.0 * PI.sqrt() / 8.0, max_relative = 1e-15);
        for k in 0..20 {
            assert_relative_eq!(
                gamma_half_integer(k).ln(),
                ln_gamma_half_integer(k),
                max_relative = 1e-13
            );
        }
    }

    #[test]
    fn gamma_matches_factorial_closed_form() {
        for k in 0..15u32 {
            let closed = (ln_factorial(2 * k) - f64::from(k) * 4f64.ln() - ln_factorial(k)).exp()
                * PI.sqrt();
            assert_relative_eq!(gamma_half_integer(k), closed, max_relative = 1e-12);
        }
    }

    #[test]
    fn kummer_low_orders() {
        for &z in &[-3.0, -0.2, 0.0, 0.7, 2.5] {
            assert_eq!(kummer_terminating(0, z), 1.0);
            assert_relative_eq!(kummer_terminating(1, z), 1.0 - 2.0 * z, epsilon = 1e-15);
        }
    }

    #[test]
    fn kummer_l2_against_rational_series() {
        // M(-2, 1/2, z) = 1 - 4z + 4z²/3, summed with exact rational
        // coefficients: (-2)(-1)/((1/2)(3/2) 2!) = 4/3.
        let z = 0.3;
        let exact = 1.0 - 4.0 * z + 4.0 * z * z / 3.0;
        assert_relative_eq!(exact, -0.08, epsilon = 1e-15);
        assert_relative_eq!(kummer_terminating(2, z), exact, epsilon = 1e-15);
    }

    #[test]
    fn kummer_recurrence_matches_series() {
        let mut buf = [0.0; 12];
        for &z in &[-40.0, -5.0, -0.3, 0.0] {
            kummer_terminating_all(z, &mut buf);
            for (l, &v) in buf.iter().enumerate() {
                assert_relative_eq!(v, kummer_terminating(l as u32, z), max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn neumaier_recovers_cancelled_terms() {
        let acc: NeumaierSum = [1.0, 1e100, 1.0, -1e100].into_iter().collect();
        assert_eq!(acc.total(), 2.0);
    }
}

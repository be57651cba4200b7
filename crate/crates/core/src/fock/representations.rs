use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use super::FockDensityMatrix;
use crate::phase_space::{CatState, WignerGrid, WignerMeta};
use crate::special::ln_factorial;

/// Displacement matrix elements `⟨n+L|D(λ)|n⟩ = e^{iLφ} g_n^L(|λ|²)` with
/// `g_n^L(x) = √(n!/(n+L)!) x^{L/2} e^{-x/2} L_n^{(L)}(x)`, contracted
/// against the upper diagonals of a density matrix.
///
/// `g` is bounded by one, so the upward recurrence in `n` cannot overflow;
/// its square-root coefficients are tabulated once per state.
struct Kernel {
    /// `re[L][n] = Re ρ_{n, n+L}`; diagonals that vanish identically are empty.
    re: Vec<Vec<f64>>,
    /// Imaginary parts, absent for a real density matrix.
    im: Option<Vec<Vec<f64>>>,
    /// `1/√((n+1)(n+L+1))`
    up: Vec<Vec<f64>>,
    /// `√(n(n+L))`
    down: Vec<Vec<f64>>,
    half_ln_fact: Vec<f64>,
}

impl Kernel {
    /// `parity` folds `(-1)^n` into the diagonals, as the Wigner function needs.
    fn new(rho: &FockDensityMatrix, parity: bool) -> Self {
        let d = rho.dim();
        let m = &rho.matrix;
        let sign = |n: usize| if parity && n % 2 == 1 { -1.0 } else { 1.0 };
        let diagonal = |l: usize, part: fn(&Complex64) -> f64| -> Vec<f64> {
            let row: Vec<f64> = (0..d - l).map(|n| part(&m[(n, n + l)]) * sign(n)).collect();
            if row.iter().all(|v| *v == 0.0) {
                Vec::new()
            } else {
                row
            }
        };
        let re = (0..d).map(|l| diagonal(l, |z| z.re)).collect();
        let im = m
            .iter()
            .any(|z| z.im != 0.0)
            .then(|| (0..d).map(|l| diagonal(l, |z| z.im)).collect());
        let (mut up, mut down) = (Vec::with_capacity(d), Vec::with_capacity(d));
        for l in 0..d {
            let lf = l as f64;
            up.push((0..d - l).map(|n| 1.0 / ((n as f64 + 1.0) * (n as f64 + lf + 1.0)).sqrt()).collect());
            down.push((0..d - l).map(|n| (n as f64 * (n as f64 + lf)).sqrt()).collect());
        }
        let half_ln_fact = (0..d).map(|l| 0.5 * ln_factorial(l as u32)).collect();
        Kernel { re, im, up, down, half_ln_fact }
    }

    /// `S_L = Σ_n ρ_{n,n+L} g_n^L(x)` for every `L`.
    fn sums(&self, x: f64) -> Vec<Complex64> {
        let ln_x = x.ln();
        let empty = Vec::new();
        (0..self.re.len())
            .map(|l| {
                let re = &self.re[l];
                let im = self.im.as_ref().map_or(&empty, |im| &im[l]);
                if re.is_empty() && im.is_empty() {
                    return Complex64::new(0.0, 0.0);
                }
                let g0 = if x == 0.0 {
                    if l == 0 {
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    (0.5 * l as f64 * ln_x - 0.5 * x - self.half_ln_fact[l]).exp()
                };
                let (up, down) = (&self.up[l], &self.down[l]);
                let shift = l as f64 + 1.0 - x;
                let (mut prev, mut cur) = (0.0, g0);
                let at = |row: &[f64], n: usize| row.get(n).copied().unwrap_or(0.0);
                let (mut sum_re, mut sum_im) = (at(re, 0) * cur, at(im, 0) * cur);
                if im.is_empty() {
                    for n in 0..up.len() - 1 {
                        let next = ((2.0 * n as f64 + shift) * cur - down[n] * prev) * up[n];
                        prev = cur;
                        cur = next;
                        sum_re += re[n + 1] * cur;
                    }
                } else {
                    for n in 0..up.len() - 1 {
                        let next = ((2.0 * n as f64 + shift) * cur - down[n] * prev) * up[n];
                        prev = cur;
                        cur = next;
                        sum_re += at(re, n + 1) * cur;
                        sum_im += im[n + 1] * cur;
                    }
                }
                Complex64::new(sum_re, sum_im)
            })
            .collect()
    }

    /// `Tr[ρ D(λ)]`, or `Tr[ρ D(λ) Π]` for a parity kernel.
    fn trace(&self, lambda: Complex64, parity: bool) -> Complex64 {
        let sums = self.sums(lambda.norm_sqr());
        let step = Complex64::from_polar(1.0, lambda.arg());
        let mut phase = Complex64::new(1.0, 0.0);
        let mut total = sums[0];
        for (l, s) in sums.iter().enumerate().skip(1) {
            phase *= step;
            // Lower diagonals are the conjugates, where D(λ) contributes
            // (-1)^L e^{-iLφ}; with Π the parity of n + L cancels that sign.
            let lower = if !parity && l % 2 == 1 { -1.0 } else { 1.0 };
            total += phase * s + (phase * s).conj() * lower;
        }
        total
    }
}

/// `χ(λ) = Tr[ρ D(λ)]`
pub fn chi_of_rho(rho: &FockDensityMatrix, lambda: Complex64) -> Complex64 {
    Kernel::new(rho, false).trace(lambda, false)
}

/// `W(β) = (2/π) Tr[ρ D(2β) Π]` with the parity operator `Π`.
pub fn wigner_of_rho(rho: &FockDensityMatrix, beta: Complex64) -> f64 {
    2.0 / PI * Kernel::new(rho, true).trace(2.0 * beta, true).re
}

/// W on a tensor grid, rows evaluated in parallel.
pub fn wigner_grid_of_rho(rho: &FockDensityMatrix, beta_re: &[f64], beta_im: &[f64]) -> WignerGrid {
    let kernel = Kernel::new(rho, true);
    let rows: Vec<Vec<f64>> = beta_re
        .par_iter()
        .map(|&br| {
            beta_im
                .iter()
                .map(|&bi| 2.0 / PI * kernel.trace(Complex64::new(2.0 * br, 2.0 * bi), true).re)
                .collect()
        })
        .collect();
    let values = DMatrix::from_fn(beta_re.len(), beta_im.len(), |i, j| rows[i][j]);
    let mut grid = WignerGrid {
        beta_re: beta_re.to_vec(),
        beta_im: beta_im.to_vec(),
        values,
        meta: WignerMeta {
            lambda_cutoff: [0.0; 2],
            lambda_nodes: [0; 2],
            panel_width: 0.0,
            lambda_tol: 0.0,
            imag_residual: 0.0,
            expansions: 0,
            integral: 0.0,
        },
    };
    grid.meta.integral = grid.integral();
    grid
}

/// `⟨ψ|ρ|ψ⟩` for a cat target.
pub fn fidelity_fock(rho: &FockDensityMatrix, cat: &CatState) -> f64 {
    let amp = cat.fock_amplitudes(rho.dim());
    let mut total = Complex64::new(0.0, 0.0);
    for (i, ai) in amp.iter().enumerate() {
        for (j, aj) in amp.iter().enumerate() {
            total += rho.matrix[(i, j)] * (ai * aj);
        }
    }
    total.re
}

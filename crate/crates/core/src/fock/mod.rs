//! Truncated Fock-space model of the heralding, storage and readout steps.
//!
//! Nothing here reuses the phase-space formulas: states are density matrices,
//! the beam splitter is the passive two-mode unitary and χ, W are evaluated
//! from displacement matrix elements. It exists to referee the analytic path.

mod beam_splitter;
mod channels;
mod representations;

pub use beam_splitter::{beam_splitter_amplitude, beam_splitter_project};
pub use channels::{damp_rho, loss_channel};
pub use representations::{chi_of_rho, fidelity_fock, wigner_grid_of_rho, wigner_of_rho};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gaussian::SqueezedThermalSpec;
use crate::phase_space::CatState;

/// Default truncation per mode before auto-doubling.
pub const DEFAULT_DIM: usize = 60;
/// Largest truncation auto-doubling may reach.
pub const MAX_DIM: usize = 480;
/// Allowed population in the top tenth of the retained levels.
pub const TAIL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct FockDensityMatrix {
    pub matrix: DMatrix<Complex64>,
}

impl FockDensityMatrix {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn vacuum(dim: usize) -> Self {
        Self::pure(&DVector::from_fn(dim, |k, _| if k == 0 { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) }))
    }

    pub fn number(k: usize, dim: usize) -> Self {
        let mut m = DMatrix::zeros(dim, dim);
        m[(k, k)] = Complex64::new(1.0, 0.0);
        FockDensityMatrix { matrix: m }
    }

    pub fn pure(psi: &DVector<Complex64>) -> Self {
        FockDensityMatrix {
            matrix: psi * psi.adjoint(),
        }
    }

    pub fn thermal(nbar: f64, dim: usize) -> Self {
        let q = nbar / (nbar + 1.0);
        let diag = DVector::from_fn(dim, |k, _| Complex64::new(q.powi(k as i32) / (nbar + 1.0), 0.0));
        FockDensityMatrix {
            matrix: DMatrix::from_diagonal(&diag),
        }
    }

    pub fn cat(cat: &CatState, dim: usize) -> Self {
        let amp = cat.fock_amplitudes(dim);
        Self::pure(&DVector::from_iterator(dim, amp.into_iter().map(|c| Complex64::new(c, 0.0))))
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim()).map(|k| self.matrix[(k, k)].re).collect()
    }

    /// Population of the top tenth of the levels.
    pub fn tail(&self) -> f64 {
        let d = self.dim();
        let start = d - d.div_ceil(10);
        (start..d).map(|k| self.matrix[(k, k)].re.abs()).sum()
    }

    pub fn check_tail(&self) -> Result<()> {
        let tail = self.tail();
        if tail < TAIL_TOL {
            Ok(())
        } else {
            Err(Error::Dimension { dim: self.dim(), tail })
        }
    }

    /// Hermiticity, unit trace and positivity.
    pub fn validate(&self) -> Result<()> {
        let herm = (&self.matrix - self.matrix.adjoint()).camax();
        if herm > 1e-12 {
            return Err(Error::Domain(format!("density matrix not Hermitian ({herm:.2e})")));
        }
        if (self.trace() - 1.0).abs() > 1e-10 {
            return Err(Error::Domain(format!("trace {} != 1", self.trace())));
        }
        let min_eig = self.matrix.clone().symmetric_eigenvalues().min();
        if min_eig < -1e-10 {
            return Err(Error::Domain(format!("negative eigenvalue {min_eig:.3e}")));
        }
        Ok(())
    }

    /// Quadrature moments `(⟨P²⟩, ⟨X²⟩)` with `X = a + a†`, `P = -i(a - a†)`.
    pub fn moments(&self) -> (f64, f64) {
        let d = self.dim();
        let n: f64 = (0..d).map(|k| k as f64 * self.matrix[(k, k)].re).sum();
        // ⟨a²⟩ = Σ_k √(k(k-1)) ρ_{k, k-2}
        let a2: Complex64 = (2..d)
            .map(|k| self.matrix[(k, k - 2)] * ((k * (k - 1)) as f64).sqrt())
            .sum();
        (2.0 * n - 2.0 * a2.re + 1.0, 2.0 * n + 2.0 * a2.re + 1.0)
    }

    pub fn normalized(mut self) -> Self {
        let t = self.trace();
        self.matrix /= Complex64::new(t, 0.0);
        self
    }
}

/// `exp(s K) v` for the squeeze generator `K = (ξ* a² - ξ a†²)/2`, by
/// Taylor series over substeps short enough that each series converges fast.
fn squeeze_vector(xi: Complex64, v: &mut DVector<Complex64>) {
    let d = v.len();
    let apply = |x: &DVector<Complex64>| {
        let mut out = DVector::zeros(d);
        for k in 0..d {
            let mut acc = Complex64::new(0.0, 0.0);
            if k + 2 < d {
                acc += xi.conj() * x[k + 2] * (((k + 1) * (k + 2)) as f64).sqrt();
            }
            if k >= 2 {
                acc -= xi * x[k - 2] * ((k * (k - 1)) as f64).sqrt();
            }
            out[k] = 0.5 * acc;
        }
        out
    };
    let norm_k = xi.norm() * d as f64;
    let steps = (2.0 * norm_k).ceil().max(1.0) as usize;
    let h = 1.0 / steps as f64;
    for _ in 0..steps {
        let mut term = v.clone();
        let mut sum = v.clone();
        for j in 1..60 {
            term = apply(&term) * Complex64::new(h / j as f64, 0.0);
            sum += &term;
            if term.norm() < 1e-18 * sum.norm() {
                break;
            }
        }
        *v = sum;
    }
}

/// `S(ξ) ρ_th(n̄) S†(ξ)` truncated to `dim` levels.
pub fn build_squeezed_thermal(spec: &SqueezedThermalSpec, dim: usize) -> Result<FockDensityMatrix> {
    let spec = SqueezedThermalSpec::new(spec.r, spec.phi, spec.nbar)?;
    let xi = Complex64::from_polar(spec.r, spec.phi);
    let big = 2 * dim + 40;
    let q = spec.nbar / (spec.nbar + 1.0);
    let mut rho = DMatrix::<Complex64>::zeros(dim, dim);
    let mut mass = 0.0;
    for k in 0..dim {
        let p = q.powi(k as i32) / (spec.nbar + 1.0);
        if p < 1e-18 && k > 0 {
            break;
        }
        let mut v = DVector::zeros(big);
        v[k] = Complex64::new(1.0, 0.0);
        if spec.r > 0.0 {
            squeeze_vector(xi, &mut v);
        }
        let head = v.rows(0, dim).into_owned();
        rho += (&head * head.adjoint()) * Complex64::new(p, 0.0);
        mass += p;
        if 1.0 - mass < 1e-16 {
            break;
        }
    }
    let state = FockDensityMatrix { matrix: rho };
    state.check_tail()?;
    Ok(state)
}

/// Retry `build` with doubled truncation until the tail check passes.
pub fn with_auto_dim<T>(start: usize, mut build: impl FnMut(usize) -> Result<T>) -> Result<(T, usize)> {
    let mut dim = start;
    loop {
        match build(dim) {
            Err(Error::Dimension { .. }) if dim * 2 <= MAX_DIM => dim *= 2,
            other => return other.map(|v| (v, dim)),
        }
    }
}

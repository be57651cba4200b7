//! Wigner functions from characteristic functions and their negativity.
//!
//! `W(β) = π⁻² ∫ χ(λ) e^{βλ* - β*λ} d²λ`. The exponent equals
//! `2i(β_i λ_r - β_r λ_i)`, so the kernel factorizes and the transform over a
//! tensor grid is a pair of real matrix products.

use std::f64::consts::PI;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::chi::CharacteristicFunction;
use super::quadrature::CompositeRule;
use crate::error::{Error, Result};

/// Phase-space grid and λ-quadrature settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSpec {
    /// Initial half-width of the square β grid.
    pub beta_max: f64,
    /// Samples per β axis (odd so that β = 0 is a node).
    pub points: usize,
    /// |χ| below this outside the λ cutoff.
    pub lambda_tol: f64,
    /// Widest Gauss–Legendre panel in λ.
    pub panel_width: f64,
    /// Grid grows until |W| on its boundary is below this.
    pub boundary_tol: f64,
    pub max_expansions: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            beta_max: 6.0,
            points: 301,
            lambda_tol: 1e-12,
            panel_width: 1.0,
            boundary_tol: 1e-10,
            max_expansions: 8,
        }
    }
}

impl GridSpec {
    /// Refine both the β grid and the λ panels by `factor`.
    pub fn scaled(self, factor: f64) -> Result<Self> {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(Error::Config(format!("grid scale must be positive, got {factor}")));
        }
        let intervals = ((self.points.max(2) - 1) as f64 * factor).round().max(2.0) as usize;
        Ok(GridSpec {
            points: 2 * intervals.div_ceil(2) + 1,
            panel_width: self.panel_width / factor,
            ..self
        })
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.beta_max > 0.0
            && self.points >= 3
            && self.lambda_tol > 0.0
            && self.lambda_tol < 1.0
            && self.panel_width > 0.0
            && self.boundary_tol > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("invalid grid settings {self:?}")))
        }
    }

    fn axis(&self, beta_max: f64) -> Vec<f64> {
        let h = 2.0 * self.beta_max / (self.points - 1) as f64;
        let half = (beta_max / h).round() as i64;
        (-half..=half).map(|k| k as f64 * h).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WignerMeta {
    pub lambda_cutoff: [f64; 2],
    pub lambda_nodes: [usize; 2],
    pub panel_width: f64,
    pub lambda_tol: f64,
    pub imag_residual: f64,
    pub expansions: usize,
    pub integral: f64,
}

/// `values[(i, j)] = W(beta_re[i] + i beta_im[j])`.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerGrid {
    pub beta_re: Vec<f64>,
    pub beta_im: Vec<f64>,
    pub values: DMatrix<f64>,
    pub meta: WignerMeta,
}

fn trapezoid_weights(axis: &[f64]) -> Vec<f64> {
    let h = axis[1] - axis[0];
    let mut w = vec![h; axis.len()];
    w[0] *= 0.5;
    *w.last_mut().unwrap() *= 0.5;
    w
}

impl WignerGrid {
    /// Trapezoid-rule integral of `f(W)` over the grid.
    fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        let wr = trapezoid_weights(&self.beta_re);
        let wi = trapezoid_weights(&self.beta_im);
        let mut total = 0.0;
        for (i, a) in wr.iter().enumerate() {
            let row: f64 = wi.iter().enumerate().map(|(j, b)| b * f(self.values[(i, j)])).sum();
            total += a * row;
        }
        total
    }

    pub fn integral(&self) -> f64 {
        self.integrate(|w| w)
    }

    pub fn abs_integral(&self) -> f64 {
        self.integrate(f64::abs)
    }

    pub fn min_value(&self) -> f64 {
        self.values.min()
    }

    /// Value at the grid node nearest to `β`.
    pub fn value_near(&self, beta_re: f64, beta_im: f64) -> f64 {
        let nearest = |axis: &[f64], x: f64| {
            let h = axis[1] - axis[0];
            (((x - axis[0]) / h).round().max(0.0) as usize).min(axis.len() - 1)
        };
        self.values[(nearest(&self.beta_re, beta_re), nearest(&self.beta_im, beta_im))]
    }

    pub fn value_at_origin(&self) -> f64 {
        self.value_near(0.0, 0.0)
    }

    fn boundary_max(&self) -> f64 {
        let (nr, ni) = self.values.shape();
        let mut m: f64 = 0.0;
        for i in 0..nr {
            m = m.max(self.values[(i, 0)].abs()).max(self.values[(i, ni - 1)].abs());
        }
        for j in 0..ni {
            m = m.max(self.values[(0, j)].abs()).max(self.values[(nr - 1, j)].abs());
        }
        m
    }

    /// CSV with header `beta_re,beta_im,W`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut out = BufWriter::new(File::create(path)?);
        writeln!(out, "beta_re,beta_im,W")?;
        for (i, br) in self.beta_re.iter().enumerate() {
            for (j, bi) in self.beta_im.iter().enumerate() {
                writeln!(out, "{br},{bi},{:e}", self.values[(i, j)])?;
            }
        }
        out.flush()?;
        Ok(())
    }

    pub fn sidecar(&self) -> serde_json::Value {
        serde_json::json!({
            "beta_re": [self.beta_re[0], *self.beta_re.last().unwrap()],
            "beta_im": [self.beta_im[0], *self.beta_im.last().unwrap()],
            "n_re": self.beta_re.len(),
            "n_im": self.beta_im.len(),
            "quadrature": self.meta,
            "w_at_origin": self.value_at_origin(),
            "negativity": (self.abs_integral() - 1.0).max(0.0),
        })
    }

    /// Write `<stem>.csv` and `<stem>.json` into `dir`; returns both file names.
    pub fn write(&self, dir: &Path, stem: &str) -> Result<[String; 2]> {
        let csv = format!("{stem}.csv");
        let json = format!("{stem}.json");
        self.write_csv(&dir.join(&csv))?;
        std::fs::write(dir.join(&json), serde_json::to_string_pretty(&self.sidecar())?)?;
        Ok([csv, json])
    }
}

fn trig_tables(betas: &[f64], nodes: &[f64]) -> (DMatrix<f64>, DMatrix<f64>) {
    let c = DMatrix::from_fn(betas.len(), nodes.len(), |p, k| (2.0 * betas[p] * nodes[k]).cos());
    let s = DMatrix::from_fn(betas.len(), nodes.len(), |p, k| (2.0 * betas[p] * nodes[k]).sin());
    (c, s)
}

fn transform<C: CharacteristicFunction + ?Sized>(
    chi: &C,
    beta_re: &[f64],
    beta_im: &[f64],
    spec: &GridSpec,
) -> Result<(DMatrix<f64>, f64, [f64; 2], [usize; 2])> {
    let (lr, li) = chi.support(spec.lambda_tol)?;
    let rx = CompositeRule::symmetric(lr, spec.panel_width);
    let ry = CompositeRule::symmetric(li, spec.panel_width);
    let samples = chi.eval_grid(&rx.nodes, &ry.nodes);
    let scale = 1.0 / (PI * PI);
    let weigh = |m: &DMatrix<f64>| {
        DMatrix::from_fn(m.nrows(), m.ncols(), |j, k| m[(j, k)] * rx.weights[j] * ry.weights[k] * scale)
            .transpose()
    };
    // Tables: cy[p, k] = cos(2 β_r,p λ_i,k), cx[q, j] = cos(2 β_i,q λ_r,j).
    let (cy, sy) = trig_tables(beta_re, &ry.nodes);
    let (cx, sx) = trig_tables(beta_im, &rx.nodes);
    let xr = weigh(&samples.re);
    let cy_xr = &cy * &xr;
    let mut w = &cy_xr * cx.transpose();
    let mut imag = DMatrix::zeros(beta_re.len(), beta_im.len());
    if !chi.is_axis_even() {
        let sy_xr = &sy * &xr;
        w += &sy_xr * sx.transpose();
        imag += &cy_xr * sx.transpose() - &sy_xr * cx.transpose();
    }
    if let Some(im) = samples.im.as_ref().filter(|_| !chi.is_real()) {
        let xi = weigh(im);
        let cy_xi = &cy * &xi;
        let sy_xi = &sy * &xi;
        w -= &cy_xi * sx.transpose() - &sy_xi * cx.transpose();
        imag += &cy_xi * cx.transpose() + &sy_xi * sx.transpose();
    }
    let residual = imag.amax();
    if residual > 1e-8 {
        return Err(Error::Convergence(format!(
            "Wigner function has imaginary residue {residual:.3e}"
        )));
    }
    Ok((w, residual, [lr, li], [rx.len(), ry.len()]))
}

/// Wigner function on a square grid that grows until W vanishes on its edge.
pub fn wigner_from_chi<C: CharacteristicFunction + ?Sized>(chi: &C, spec: &GridSpec) -> Result<WignerGrid> {
    spec.validate()?;
    let mut beta_max = spec.beta_max;
    for expansions in 0..=spec.max_expansions {
        let axis = spec.axis(beta_max);
        // The kernel oscillates at 2β; keep the panels per period fixed.
        let local = GridSpec {
            panel_width: spec.panel_width * spec.beta_max / beta_max,
            ..*spec
        };
        let (values, imag_residual, cutoff, nodes) = transform(chi, &axis, &axis, &local)?;
        let mut grid = WignerGrid {
            beta_re: axis.clone(),
            beta_im: axis,
            values,
            meta: WignerMeta {
                lambda_cutoff: cutoff,
                lambda_nodes: nodes,
                panel_width: local.panel_width,
                lambda_tol: spec.lambda_tol,
                imag_residual,
                expansions,
                integral: 0.0,
            },
        };
        if grid.boundary_max() < spec.boundary_tol {
            grid.meta.integral = grid.integral();
            return Ok(grid);
        }
        beta_max *= 1.25;
    }
    Err(Error::Convergence(format!(
        "Wigner function still above {:.1e} at |β| = {beta_max:.2}",
        spec.boundary_tol
    )))
}

/// W at arbitrary points, without the grid-growth loop.
pub fn wigner_at<C: CharacteristicFunction + ?Sized>(
    chi: &C,
    beta_re: &[f64],
    beta_im: &[f64],
    spec: &GridSpec,
) -> Result<DMatrix<f64>> {
    Ok(transform(chi, beta_re, beta_im, spec)?.0)
}

/// `∫|W| d²β - 1`
pub fn negativity(grid: &WignerGrid) -> Result<f64> {
    let norm = grid.integral();
    if (norm - 1.0).abs() > 1e-3 {
        return Err(Error::Convergence(format!(
            "Wigner grid integrates to {norm:.6}; enlarge the grid or the λ cutoff"
        )));
    }
    Ok((grid.abs_integral() - 1.0).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase_space::chi::{CatState, FnChi, GaussianChi, Rotated};
    use approx::assert_relative_eq;
    use num_complex::Complex64;

    fn coarse() -> GridSpec {
        GridSpec { points: 121, ..GridSpec::default() }
    }

    #[test]
    fn vacuum_wigner() {
        let g = wigner_from_chi(&GaussianChi::vacuum(), &coarse()).unwrap();
        assert_relative_eq!(g.value_at_origin(), 2.0 / PI, max_relative = 1e-10);
        assert_relative_eq!(g.value_near(0.5, -0.3), 2.0 / PI * (-2.0 * 0.34f64).exp(), max_relative = 1e-10);
        assert!(negativity(&g).unwrap() < 1e-9);
        assert!((g.meta.integral - 1.0).abs() < 1e-9);
    }

    #[test]
    fn thermal_peak() {
        let g = wigner_from_chi(&GaussianChi::thermal(3.5), &coarse()).unwrap();
        assert_relative_eq!(g.value_at_origin(), 2.0 / PI / 8.0, max_relative = 1e-9);
        assert!(g.min_value() > -1e-12);
        assert!(g.meta.expansions > 0);
    }

    #[test]
    fn odd_cat_is_negative_at_origin() {
        let cat = CatState::odd(1.5).unwrap();
        let g = wigner_from_chi(&cat, &coarse()).unwrap();
        assert_relative_eq!(g.value_at_origin(), -2.0 / PI, max_relative = 1e-9);
        assert!(negativity(&g).unwrap() > 0.1);
    }

    #[test]
    fn general_path_matches_fast_path() {
        let cat = CatState::even(1.2).unwrap();
        let generic = FnChi::new(|l| cat.eval(l), cat.support(1e-12).unwrap());
        let axis: Vec<f64> = (-8..=8).map(|k| 0.3 * k as f64).collect();
        let spec = GridSpec::default();
        let a = wigner_at(&cat, &axis, &axis, &spec).unwrap();
        let b = wigner_at(&generic, &axis, &axis, &spec).unwrap();
        assert!((a - b).amax() < 1e-12);
    }

    #[test]
    fn negativity_rotation_invariant() {
        let cat = CatState::odd(1.3).unwrap();
        let spec = GridSpec::default();
        let base = negativity(&wigner_from_chi(&cat, &spec).unwrap()).unwrap();
        let rotated = Rotated { inner: cat, theta: 0.7 };
        let turned = negativity(&wigner_from_chi(&rotated, &spec).unwrap()).unwrap();
        assert!((base - turned).abs() < 1e-3, "{base} vs {turned}");
    }

    #[test]
    fn non_decaying_chi_rejected() {
        assert!(matches!(
            wigner_from_chi(&GaussianChi::new(-1.0, 1.0), &coarse()),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn unnormalized_grid_rejected() {
        let half = FnChi::new(|l: Complex64| GaussianChi::vacuum().eval(l) * 0.5, (8.0, 8.0));
        let g = wigner_from_chi(&half, &coarse()).unwrap();
        assert!(matches!(negativity(&g), Err(Error::Convergence(_))));
    }

    #[test]
    fn scaled_spec_keeps_origin_node() {
        let s = GridSpec::default().scaled(1.5).unwrap();
        assert_eq!(s.points % 2, 1);
        assert!(s.axis(s.beta_max).iter().any(|&b| b == 0.0));
        assert!(GridSpec::default().scaled(0.0).is_err());
    }
}

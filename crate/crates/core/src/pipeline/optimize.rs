//! Coarse grid scan followed by a bounded Nelder–Mead refinement.
//!
//! Everything is deterministic: the grid is evaluated in parallel but
//! reduced in index order, and ties go to the earliest grid point.

use rayon::prelude::*;
use serde::Serialize;

use super::config::RcMode;
use super::model::Protocol;
use crate::error::{Error, Result};
use crate::params::Transmissivity;
use crate::phase_space::{CatState, GridSpec, Parity};

/// Closed search interval with the spacing of the coarse scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SearchAxis {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl SearchAxis {
    pub fn new(lo: f64, hi: f64, step: f64) -> Self {
        SearchAxis { lo, hi, step }
    }

    pub fn point(x: f64) -> Self {
        SearchAxis { lo: x, hi: x, step: 1.0 }
    }

    fn is_fixed(&self) -> bool {
        self.hi <= self.lo
    }

    fn nodes(&self) -> Vec<f64> {
        if self.is_fixed() {
            return vec![self.lo];
        }
        let count = ((self.hi - self.lo) / self.step + 1e-9).floor() as usize;
        (0..=count).map(|k| (self.lo + k as f64 * self.step).min(self.hi)).collect()
    }

    fn clamp(&self, x: f64) -> f64 {
        x.clamp(self.lo, self.hi)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Maximum {
    pub x: Vec<f64>,
    pub value: f64,
    /// Best point of the coarse scan.
    pub grid_x: Vec<f64>,
    pub grid_value: f64,
    pub evaluations: usize,
}

/// Maximize `f` over the box spanned by `axes`. The simplex stops once its
/// extent along every free axis is at most `tol`.
pub fn maximize<F>(axes: &[SearchAxis], tol: f64, f: F) -> Result<Maximum>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    let lists: Vec<Vec<f64>> = axes.iter().map(SearchAxis::nodes).collect();
    let total: usize = lists.iter().map(Vec::len).product();
    let point = |mut idx: usize| -> Vec<f64> {
        lists
            .iter()
            .rev()
            .map(|l| {
                let v = l[idx % l.len()];
                idx /= l.len();
                v
            })
            .collect::<Vec<_>>()
            .into_iter()
            .rev()
            .collect()
    };
    let values: Vec<f64> = (0..total).into_par_iter().map(|i| f(&point(i))).collect::<Result<_>>()?;
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    let grid_x = point(best);
    let grid_value = values[best];

    let free: Vec<usize> = (0..axes.len()).filter(|&k| !axes[k].is_fixed()).collect();
    let mut evaluations = total;
    if free.is_empty() {
        return Ok(Maximum { x: grid_x.clone(), value: grid_value, grid_x, grid_value, evaluations });
    }

    let embed = |y: &[f64]| -> Vec<f64> {
        let mut x = grid_x.clone();
        for (k, &axis) in free.iter().enumerate() {
            x[axis] = axes[axis].clamp(y[k]);
        }
        x
    };
    let mut objective = |y: &[f64]| -> Result<f64> {
        evaluations += 1;
        // Nelder–Mead minimizes.
        f(&embed(y)).map(|v| -v)
    };

    // Initial simplex: one coarse step along each free axis, pointing inwards.
    let start: Vec<f64> = free.iter().map(|&a| grid_x[a]).collect();
    let mut simplex = vec![(start.clone(), -grid_value)];
    for (k, &axis) in free.iter().enumerate() {
        let ax = axes[axis];
        let mut y = start.clone();
        y[k] = if y[k] + ax.step <= ax.hi { y[k] + ax.step } else { y[k] - ax.step };
        let v = objective(&y)?;
        simplex.push((y, v));
    }
    let clamp = |y: Vec<f64>| -> Vec<f64> {
        y.iter().zip(&free).map(|(v, &a)| axes[a].clamp(*v)).collect()
    };
    let dims = free.len();
    for _ in 0..2000 {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let extent = (0..dims)
            .map(|k| {
                let (lo, hi) = simplex
                    .iter()
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (y, _)| (lo.min(y[k]), hi.max(y[k])));
                hi - lo
            })
            .fold(0.0, f64::max);
        if extent <= tol {
            break;
        }
        let centroid: Vec<f64> = (0..dims)
            .map(|k| simplex[..dims].iter().map(|(y, _)| y[k]).sum::<f64>() / dims as f64)
            .collect();
        let worst = simplex[dims].clone();
        let along = |c: f64| -> Vec<f64> {
            clamp(centroid.iter().zip(&worst.0).map(|(m, w)| m + c * (m - w)).collect())
        };
        let reflected = along(1.0);
        let fr = objective(&reflected)?;
        if fr < simplex[0].1 {
            let expanded = along(2.0);
            let fe = objective(&expanded)?;
            simplex[dims] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
            continue;
        }
        if fr < simplex[dims - 1].1 {
            simplex[dims] = (reflected, fr);
            continue;
        }
        let (contracted, fc) = if fr < worst.1 {
            let y = along(0.5);
            let v = objective(&y)?;
            (y, v)
        } else {
            let y = along(-0.5);
            let v = objective(&y)?;
            (y, v)
        };
        if fc < worst.1.min(fr) {
            simplex[dims] = (contracted, fc);
            continue;
        }
        let best_y = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            let y: Vec<f64> = best_y.iter().zip(&vertex.0).map(|(b, v)| b + 0.5 * (v - b)).collect();
            let v = objective(&y)?;
            *vertex = (y, v);
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (y, v) = simplex.swap_remove(0);
    let (x, value) = if -v >= grid_value { (embed(&y), -v) } else { (grid_x.clone(), grid_value) };
    Ok(Maximum { x, value, grid_x, grid_value, evaluations })
}

/// Transmissivity scan range and step (power).
pub const T_AXIS: SearchAxis = SearchAxis { lo: 0.05, hi: 0.99, step: 0.01 };
/// Cavity squeezing scan range and step.
pub const RC_AXIS: SearchAxis = SearchAxis { lo: 0.0, hi: 1.5, step: 0.05 };
/// Simplex extent at which refinement stops.
pub const REFINE_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FidelityOptimum {
    /// Power transmissivity.
    pub transmissivity: f64,
    pub cavity_r: f64,
    pub fidelity: f64,
    pub grid_fidelity: f64,
    pub evaluations: usize,
}

/// Cat fidelity of the analytically heralded state; impossible heralds score 0.
pub fn herald_fidelity(
    protocol: &Protocol,
    n: u32,
    cat: &CatState,
    power: f64,
    cavity_r: f64,
    spec: &GridSpec,
) -> Result<f64> {
    let setup = protocol.herald(n, Transmissivity::from_power(power)?, cavity_r);
    match setup.analytic() {
        Ok(chi) => chi.fidelity_with_cat(cat, spec),
        Err(e) if matches!(e.root(), Error::HeraldImpossible { .. }) => Ok(0.0),
        Err(e) => Err(e),
    }
}

/// Best `(𝒯, r_c)` for heralding `n` photons towards a cat of amplitude `alpha`.
/// `transmissivity` pins 𝒯 when given; `rc` decides whether r_c is searched.
pub fn optimize_fidelity(
    protocol: &Protocol,
    n: u32,
    alpha: f64,
    parity: Parity,
    transmissivity: Option<Transmissivity>,
    rc: RcMode,
    spec: &GridSpec,
) -> Result<FidelityOptimum> {
    if parity != Parity::of_photon_count(n) {
        return Err(Error::Config(format!("n = {n} cannot herald a {parity:?} cat")));
    }
    let cat = CatState::new(alpha, parity)?;
    let t_axis = transmissivity.map_or(T_AXIS, |t| SearchAxis::point(t.power()));
    let rc_axis = match rc {
        RcMode::Zero => SearchAxis::point(0.0),
        RcMode::Fixed { value } => SearchAxis::point(value),
        RcMode::Optimize => RC_AXIS,
    };
    optimize_over(protocol, n, &cat, t_axis, rc_axis, spec)
}

/// As [`optimize_fidelity`] with explicit search axes.
pub fn optimize_over(
    protocol: &Protocol,
    n: u32,
    cat: &CatState,
    t_axis: SearchAxis,
    rc_axis: SearchAxis,
    spec: &GridSpec,
) -> Result<FidelityOptimum> {
    let best = maximize(&[t_axis, rc_axis], REFINE_TOL, |x| herald_fidelity(protocol, n, cat, x[0], x[1], spec))
        .map_err(Error::at("optimize"))?;
    Ok(FidelityOptimum {
        transmissivity: best.x[0],
        cavity_r: best.x[1],
        fidelity: best.value,
        grid_fidelity: best.grid_value,
        evaluations: best.evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::config::RunConfig;
    use approx::assert_relative_eq;

    #[test]
    fn quadratic_bowl() {
        let axes = [SearchAxis::new(-1.0, 1.0, 0.1), SearchAxis::new(0.0, 2.0, 0.1)];
        let m = maximize(&axes, 1e-6, |x| Ok(-(x[0] - 0.237).powi(2) - 2.0 * (x[1] - 1.311).powi(2))).unwrap();
        assert_relative_eq!(m.x[0], 0.237, epsilon = 1e-5);
        assert_relative_eq!(m.x[1], 1.311, epsilon = 1e-5);
        assert!(m.value >= m.grid_value);
    }

    #[test]
    fn optimum_on_the_boundary() {
        let axes = [SearchAxis::new(0.0, 1.0, 0.1)];
        let m = maximize(&axes, 1e-6, |x| Ok(x[0])).unwrap();
        assert_eq!(m.x[0], 1.0);
    }

    #[test]
    fn single_point_domain() {
        let m = maximize(&[SearchAxis::point(0.3), SearchAxis::point(0.7)], 1e-4, |x| Ok(x[0] * x[1])).unwrap();
        assert_eq!(m.x, vec![0.3, 0.7]);
        assert_eq!(m.evaluations, 1);
    }

    #[test]
    fn parity_mismatch_rejected() {
        let p = Protocol::new(&RunConfig::default()).unwrap();
        let r = optimize_fidelity(&p, 2, 1.2, Parity::Odd, None, RcMode::Zero, &GridSpec::default());
        assert!(matches!(r, Err(Error::Config(_))));
    }

    #[test]
    fn single_photon_optimum() {
        let p = Protocol::new(&RunConfig::default()).unwrap();
        let o = optimize_fidelity(&p, 1, 1.2, Parity::Odd, None, RcMode::Zero, &GridSpec::default()).unwrap();
        assert!((o.transmissivity - 0.51).abs() < 0.03, "{o:?}");
        assert!((o.fidelity - 0.98).abs() < 0.02, "{o:?}");
        assert!(o.fidelity >= o.grid_fidelity);
    }
}

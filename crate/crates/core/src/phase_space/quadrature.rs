//! Composite Gauss–Legendre rules.

use std::f64::consts::PI;
use std::sync::OnceLock;

/// Points per panel.
pub const ORDER: usize = 16;

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Nodes and weights of the `n`-point rule on [-1, 1], ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn reference_rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(ORDER))
}

/// Nodes and weights covering `[-half_width, half_width]` with panels no
/// wider than `max_panel`. Nodes are symmetric about zero.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositeRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl CompositeRule {
    pub fn symmetric(half_width: f64, max_panel: f64) -> Self {
        let (x, w) = reference_rule();
        let panels = ((2.0 * half_width / max_panel).ceil() as usize).max(1);
        let h = 2.0 * half_width / panels as f64;
        let mut nodes = Vec::with_capacity(panels * ORDER);
        let mut weights = Vec::with_capacity(panels * ORDER);
        for p in 0..panels {
            let mid = -half_width + (p as f64 + 0.5) * h;
            for (xi, wi) in x.iter().zip(w) {
                nodes.push(mid + 0.5 * h * xi);
                weights.push(0.5 * h * wi);
            }
        }
        CompositeRule { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exact_for_polynomials() {
        let (x, w) = gauss_legendre(ORDER);
        for deg in 0..(2 * ORDER) {
            let approx: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
            let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
            assert!((approx - exact).abs() < 1e-14, "degree {deg}");
        }
    }

    #[test]
    fn gaussian_integral() {
        let rule = CompositeRule::symmetric(9.0, 1.0);
        assert_eq!(rule.len(), 18 * ORDER);
        assert_relative_eq!(rule.integrate(|x| (-x * x).exp()), PI.sqrt(), max_relative = 1e-14);
        for (a, b) in rule.nodes.iter().zip(rule.nodes.iter().rev()) {
            assert!((a + b).abs() < 1e-14);
        }
    }
}

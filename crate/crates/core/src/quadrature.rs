//! Composite Gauss–Legendre quadrature for the oscillatory kernels.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d != 0.0 { d } else { dp };
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

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite Gauss–Legendre rule over a unit-length interval.
///
/// `panels` is the panel count per unit length; shorter sub-intervals use a
/// proportional number of panels (at least one).
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub panels: usize,
    pub nodes_per_panel: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

/// Fraction of a wavelength allowed per panel.
const WAVELENGTH_FRACTION: f64 = 2.0 * PI / 10.0;

impl QuadratureRule {
    pub fn new(panels: usize, nodes_per_panel: usize) -> Self {
        let (nodes, weights) = gauss_legendre(nodes_per_panel);
        Self {
            panels: panels.max(1),
            nodes_per_panel,
            nodes,
            weights,
        }
    }

    /// Panels per unit length needed for a kernel oscillating at `rate`.
    pub fn required_panels(rate: f64) -> usize {
        (rate.max(1.0) / WAVELENGTH_FRACTION).ceil() as usize
    }

    /// Rule fine enough for both the wave kernels (rate `|λ|`) and the heat
    /// kernels (rate `|√λ|`).
    pub fn for_rate(rate: f64) -> Self {
        Self::new(Self::required_panels(rate), 8)
    }

    /// Refuse to integrate a kernel oscillating at `rate` with too few panels.
    pub fn check(&self, rate: f64) -> Result<()> {
        let required = Self::required_panels(rate);
        if self.panels < required {
            return Err(Error::QuadratureTooCoarse {
                required,
                panels: self.panels,
            });
        }
        Ok(())
    }

    /// `∫_a^b f` for any `T` closed under scaling by reals.
    pub fn integrate<T, F>(&self, a: f64, b: f64, mut f: F) -> T
    where
        T: Copy + std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T> + Default,
        F: FnMut(f64) -> T,
    {
        let len = b - a;
        if len == 0.0 {
            return T::default();
        }
        let count = ((self.panels as f64) * len.abs()).ceil().max(1.0) as usize;
        let h = len / count as f64;
        let mut acc = T::default();
        for p in 0..count {
            let mid = a + (p as f64 + 0.5) * h;
            let mut panel = T::default();
            for (x, w) in self.nodes.iter().zip(&self.weights) {
                panel = panel + f(mid + 0.5 * h * x) * *w;
            }
            acc = acc + panel * (0.5 * h);
        }
        acc
    }
}

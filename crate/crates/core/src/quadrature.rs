//! Gauss–Legendre rules and contour integrals of square-root integrands with
//! continuous branch tracking.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`,
/// nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 0 { 1.0 } else { p1 };
            dp = n as f64 * (x * p - p0) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// The 20-point rule, computed once.
pub fn gauss_legendre_20() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(20))
}

/// Picks the sign of `√w` closest to the previous value.
#[derive(Debug, Clone, Copy, Default)]
pub struct BranchTracker {
    prev: Option<Complex64>,
}

impl BranchTracker {
    pub fn new() -> Self {
        Self::default()
    }

    /// Start from a known value of the root.
    pub fn seeded(value: Complex64) -> Self {
        BranchTracker { prev: Some(value) }
    }

    /// Continuous square root. Fails when both signs are equally close,
    /// which means the sampling is too coarse near a branch point.
    pub fn sqrt(&mut self, w: Complex64) -> Result<Complex64> {
        let mut s = w.sqrt();
        if let Some(prev) = self.prev {
            let (d_plus, d_minus) = ((s - prev).norm(), (s + prev).norm());
            if d_minus < d_plus {
                s = -s;
            }
            let jump = d_plus.min(d_minus);
            let size = s.norm().max(prev.norm());
            if size > 0.0 && jump > 1.5 * size {
                return Err(Error::BranchTracking(format!(
                    "ambiguous square-root branch at w = {w}"
                )));
            }
        }
        self.prev = Some(s);
        Ok(s)
    }
}

/// `∫ f(x) dx` along the straight segment `a → b`, using the substitution
/// `x = m + h sin u` that removes inverse-square-root endpoint singularities.
/// Nodes are visited in order from `a` to `b`, so `f` may carry state.
pub fn segment_integral_sine<F>(a: Complex64, b: Complex64, panels: usize, mut f: F) -> Result<Complex64>
where
    F: FnMut(Complex64) -> Result<Complex64>,
{
    let (nodes, weights) = gauss_legendre_20();
    let m = (a + b) / 2.0;
    let h = (b - a) / 2.0;
    let du = PI / panels as f64;
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 0..panels {
        let u0 = -PI / 2.0 + k as f64 * du;
        for (node, w) in nodes.iter().zip(weights) {
            let u = u0 + (node + 1.0) * du / 2.0;
            let x = m + h * u.sin();
            sum += f(x)? * h * (u.cos() * w * du / 2.0);
        }
    }
    Ok(sum)
}

/// `∫ f(x) dx` along `a → b` with plain composite Gauss–Legendre.
pub fn segment_integral<F>(a: Complex64, b: Complex64, panels: usize, mut f: F) -> Result<Complex64>
where
    F: FnMut(Complex64) -> Result<Complex64>,
{
    let (nodes, weights) = gauss_legendre_20();
    let d = (b - a) / panels as f64;
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 0..panels {
        let x0 = a + d * k as f64;
        for (node, w) in nodes.iter().zip(weights) {
            sum += f(x0 + d * ((node + 1.0) / 2.0))? * d * (w / 2.0);
        }
    }
    Ok(sum)
}

/// Distance from `p` to the segment `a → b`.
pub fn point_segment_distance(p: Complex64, a: Complex64, b: Complex64) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = ((p - a) * d.conj()).re / len2;
    (p - (a + d * t.clamp(0.0, 1.0))).norm()
}

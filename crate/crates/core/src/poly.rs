//! Complex polynomial helpers: Horner evaluation and simultaneous root
//! finding by the Aberth–Ehrlich iteration.

use num_complex::Complex64;

/// Coefficients in ascending order: `c[0] + c[1] x + ... + c[n] x^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<Complex64>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.len() > 1 && coeffs.last().map_or(false, |c| c.norm() == 0.0) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Value and first derivative.
    pub fn eval_with_derivative(&self, x: Complex64) -> (Complex64, Complex64) {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            dp = dp * x + p;
            p = p * x + c;
        }
        (p, dp)
    }

    pub fn eval(&self, x: Complex64) -> Complex64 {
        self.eval_with_derivative(x).0
    }

    /// All roots, unordered. Deterministic: the starting points are fixed.
    pub fn roots(&self) -> Vec<Complex64> {
        let n = self.degree();
        if n == 0 {
            return Vec::new();
        }
        let lead = self.coeffs[n];
        // Cauchy-type bound gives the radius of the initial circle.
        let radius = self.coeffs[..n]
            .iter()
            .enumerate()
            .map(|(k, c)| (c.norm() / lead.norm()).powf(1.0 / (n - k) as f64))
            .fold(0.0_f64, f64::max)
            .max(1e-3);
        let mut z: Vec<Complex64> = (0..n)
            .map(|k| {
                let angle = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
                Complex64::from_polar(radius, angle)
            })
            .collect();

        for _ in 0..500 {
            let mut max_step: f64 = 0.0;
            for i in 0..n {
                let (p, dp) = self.eval_with_derivative(z[i]);
                if p.norm() == 0.0 {
                    continue;
                }
                let ratio = p / dp;
                let repulsion: Complex64 = (0..n)
                    .filter(|&j| j != i)
                    .map(|j| (z[i] - z[j]).inv())
                    .sum();
                let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
                if step.is_finite() {
                    z[i] -= step;
                    max_step = max_step.max(step.norm() / z[i].norm().max(1e-300));
                }
            }
            if max_step < 1e-15 {
                break;
            }
        }
        // Newton polish.
        for root in z.iter_mut() {
            for _ in 0..3 {
                let (p, dp) = self.eval_with_derivative(*root);
                if dp.norm() == 0.0 {
                    break;
                }
                let step = p / dp;
                if !step.is_finite() {
                    break;
                }
                *root -= step;
            }
        }
        z
    }
}

//! Independent oracles: dense finite differences on a real interval.
#![allow(dead_code)]

use num_complex::Complex64;

/// Eigenvalues `0..count` of `-ψ'' + V ψ` on `[-l, l]` with Dirichlet ends
/// and `points` interior nodes, found by Sturm-sequence bisection.
pub fn real_line_levels(v: impl Fn(f64) -> f64, l: f64, points: usize, count: usize) -> Vec<f64> {
    let h = 2.0 * l / (points + 1) as f64;
    let diag: Vec<f64> = (1..=points).map(|i| 2.0 / (h * h) + v(-l + i as f64 * h)).collect();
    let off = -1.0 / (h * h);
    let below = |lambda: f64| {
        let mut count = 0;
        let mut d = 1.0;
        for (i, a) in diag.iter().enumerate() {
            d = a - lambda - if i == 0 { 0.0 } else { off * off / d };
            if d == 0.0 {
                d = 1e-300;
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    };
    let hi0 = diag.iter().cloned().fold(f64::MIN, f64::max) + 2.0 * off.abs();
    let lo0 = diag.iter().cloned().fold(f64::MAX, f64::min) - 2.0 * off.abs();
    (0..count)
        .map(|k| {
            let (mut lo, mut hi) = (lo0, hi0);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if below(mid) > k {
                    hi = mid;
                } else {
                    lo = mid;
                }
                if hi - lo < 1e-13 * hi.abs().max(1.0) {
                    break;
                }
            }
            0.5 * (lo + hi)
        })
        .collect()
}

/// Richardson-extrapolated levels from `points` and `2 * points + 1` nodes.
pub fn extrapolated_levels(v: impl Fn(f64) -> f64 + Copy, l: f64, points: usize, count: usize) -> Vec<f64> {
    let coarse = real_line_levels(v, l, points, count);
    let fine = real_line_levels(v, l, 2 * points + 1, count);
    coarse.iter().zip(&fine).map(|(c, f)| (4.0 * f - c) / 3.0).collect()
}

/// Complex eigenvalue of the real-line discretization nearest `seed`,
/// found by Rayleigh-quotient inverse iteration on the complex-symmetric
/// tridiagonal matrix.
pub fn real_line_level_near(v: impl Fn(f64) -> Complex64, l: f64, points: usize, seed: Complex64) -> Complex64 {
    let h = 2.0 * l / (points + 1) as f64;
    let diag: Vec<Complex64> = (1..=points)
        .map(|i| v(-l + i as f64 * h) + 2.0 / (h * h))
        .collect();
    let off = -1.0 / (h * h);
    let apply = |u: &[Complex64]| -> Vec<Complex64> {
        (0..points)
            .map(|i| {
                let mut s = diag[i] * u[i];
                if i > 0 {
                    s += off * u[i - 1];
                }
                if i + 1 < points {
                    s += off * u[i + 1];
                }
                s
            })
            .collect()
    };
    let solve = |shift: Complex64, rhs: &[Complex64]| -> Vec<Complex64> {
        let mut c = vec![Complex64::new(0.0, 0.0); points];
        let mut d = vec![Complex64::new(0.0, 0.0); points];
        let mut denom = diag[0] - shift;
        c[0] = off / denom;
        d[0] = rhs[0] / denom;
        for i in 1..points {
            denom = diag[i] - shift - off * c[i - 1];
            c[i] = off / denom;
            d[i] = (rhs[i] - off * d[i - 1]) / denom;
        }
        for i in (0..points - 1).rev() {
            d[i] = d[i] - c[i] * d[i + 1];
        }
        d
    };
    let mut u: Vec<Complex64> = (1..=points)
        .map(|i| {
            let x = -l + i as f64 * h;
            Complex64::new((-x * x / 2.0).exp(), 0.0)
        })
        .collect();
    let mut shift = seed;
    for _ in 0..50 {
        let w = solve(shift, &u);
        let norm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        u = w.into_iter().map(|z| z / norm).collect();
        let au = apply(&u);
        let num: Complex64 = u.iter().zip(&au).map(|(a, b)| a * b).sum();
        let den: Complex64 = u.iter().map(|a| a * a).sum();
        let next = num / den;
        if (next - shift).norm() < 1e-14 * next.norm().max(1.0) {
            return next;
        }
        shift = next;
    }
    shift
}

pub fn extrapolated_level_near(v: impl Fn(f64) -> Complex64 + Copy, l: f64, points: usize, seed: Complex64) -> Complex64 {
    let coarse = real_line_level_near(v, l, points, seed);
    let fine = real_line_level_near(v, l, 2 * points + 1, coarse);
    (4.0 * fine - coarse) / 3.0
}

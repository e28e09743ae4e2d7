//! Path geometry: transversal self-crossings and the Riemann sphere.

use std::collections::HashMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::Trajectory;

fn cross(a: Complex64, b: Complex64) -> f64 {
    a.re * b.im - a.im * b.re
}

/// Signed distance of `p` from the line through `a` and `b`.
fn side(a: Complex64, b: Complex64, p: Complex64) -> f64 {
    let d = b - a;
    let len = d.norm();
    if len == 0.0 {
        return 0.0;
    }
    cross(d, p - a) / len
}

fn crosses(a: Complex64, b: Complex64, c: Complex64, d: Complex64, tol: f64) -> bool {
    let (s1, s2) = (side(a, b, c), side(a, b, d));
    let (s3, s4) = (side(c, d, a), side(c, d, b));
    let strict = |u: f64, v: f64| u.abs() > tol && v.abs() > tol && u.signum() != v.signum();
    strict(s1, s2) && strict(s3, s4)
}

/// True if two non-adjacent segments of the `x(t)` polyline cross
/// transversally, every endpoint lying more than `tol` from the other
/// segment's line. Overlapping retraced segments do not count.
pub fn self_intersects(traj: &Trajectory, tol: f64) -> bool {
    let points: Vec<Complex64> = traj.samples.iter().map(|s| s.x).collect();
    polyline_self_intersects(&points, tol)
}

/// [`self_intersects`] on a bare polyline.
pub fn polyline_self_intersects(points: &[Complex64], tol: f64) -> bool {
    let n = points.len();
    if n < 4 {
        return false;
    }
    let mean_len = points.windows(2).map(|w| (w[1] - w[0]).norm()).sum::<f64>() / (n - 1) as f64;
    let cell = mean_len.max(1e-12) * 2.0;
    let key = |z: Complex64| ((z.re / cell).floor() as i64, (z.im / cell).floor() as i64);

    let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for i in 0..n - 1 {
        let (a, b) = (points[i], points[i + 1]);
        let (k0, k1) = (key(a), key(b));
        let span = (k0.0.min(k1.0)..=k0.0.max(k1.0), k0.1.min(k1.1)..=k0.1.max(k1.1));
        // Very long segments are rare; cap the cells they are binned into.
        let cells = (span.0.end() - span.0.start() + 1) * (span.1.end() - span.1.start() + 1);
        if cells > 10_000 {
            for j in 0..i.saturating_sub(1) {
                if crosses(a, b, points[j], points[j + 1], tol) {
                    return true;
                }
            }
        }
        let mut candidates: Vec<usize> = Vec::new();
        for gx in span.0.clone() {
            for gy in span.1.clone() {
                if cells <= 10_000 {
                    if let Some(list) = grid.get(&(gx, gy)) {
                        candidates.extend(list.iter().copied());
                    }
                }
            }
        }
        candidates.sort_unstable();
        candidates.dedup();
        for j in candidates {
            if j + 1 < i && crosses(a, b, points[j], points[j + 1], tol) {
                return true;
            }
        }
        if cells <= 10_000 {
            for gx in span.0.clone() {
                for gy in span.1.clone() {
                    grid.entry((gx, gy)).or_default().push(i);
                }
            }
        }
    }
    false
}

/// A point of the extended complex plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SpherePoint {
    Finite(Complex64),
    Infinity,
}

/// Stereographic image on the unit sphere: `0` at the south pole, `∞` at
/// the north pole, the unit circle on the equator.
pub fn riemann_sphere_projection(z: SpherePoint) -> [f64; 3] {
    match z {
        SpherePoint::Infinity => [0.0, 0.0, 1.0],
        SpherePoint::Finite(z) => {
            let r2 = z.norm_sqr();
            if r2.is_infinite() {
                return [0.0, 0.0, 1.0];
            }
            let d = 1.0 + r2;
            [2.0 * z.re / d, 2.0 * z.im / d, (r2 - 1.0) / d]
        }
    }
}

/// Inverse of [`riemann_sphere_projection`].
pub fn inverse_riemann_sphere_projection(point: [f64; 3]) -> SpherePoint {
    let [x, y, z] = point;
    let rho2 = x * x + y * y;
    if rho2 == 0.0 {
        return if z > 0.0 {
            SpherePoint::Infinity
        } else {
            SpherePoint::Finite(Complex64::new(0.0, 0.0))
        };
    }
    // (X + iY)/(1 - Z) written without the cancellation near the north pole.
    SpherePoint::Finite(Complex64::new(x, y) * ((1.0 + z) / rho2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn figure_eight_crosses() {
        let pts: Vec<Complex64> = (0..=200)
            .map(|k| {
                let t = 2.0 * PI * (k as f64 + 0.3) / 200.0;
                c(t.sin(), (2.0 * t).sin() / 2.0)
            })
            .collect();
        assert!(polyline_self_intersects(&pts, 1e-9));
    }

    #[test]
    fn retraced_circle_does_not_cross() {
        let pts: Vec<Complex64> = (0..=300)
            .map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / 200.0))
            .collect();
        assert!(!polyline_self_intersects(&pts, 1e-9));
    }

    #[test]
    fn spiral_does_not_cross() {
        let pts: Vec<Complex64> = (0..2000)
            .map(|k| {
                let t = k as f64 * 0.02;
                Complex64::from_polar(1.0 + 0.05 * t, t)
            })
            .collect();
        assert!(!polyline_self_intersects(&pts, 1e-9));
    }

    #[test]
    fn sphere_examples() {
        assert_eq!(riemann_sphere_projection(SpherePoint::Finite(c(0.0, 0.0))), [0.0, 0.0, -1.0]);
        assert_eq!(riemann_sphere_projection(SpherePoint::Infinity), [0.0, 0.0, 1.0]);
        assert_eq!(riemann_sphere_projection(SpherePoint::Finite(c(1.0, 0.0))), [1.0, 0.0, 0.0]);
        assert_eq!(inverse_riemann_sphere_projection([0.0, 0.0, 1.0]), SpherePoint::Infinity);
    }
}

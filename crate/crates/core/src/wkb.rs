//! Leading-order WKB quantization between complex turning points.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potentials::{
    angle_distance, eval_potential, sector_pair_by_label, turning_points, wrap_angle,
    PotentialSpec, SectorPair,
};
use crate::quadrature::{point_segment_distance, segment_integral_sine, BranchTracker};
use crate::spectral::{find_eigenvalues, ShootingProblem};

/// Minimum distance between the quantization path and other turning points.
pub const CLEARANCE: f64 = 1e-3;

const PANELS: usize = 24;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantizationResult {
    /// `(1/π) ∫ √(E - V) dx - 1/2`.
    pub n_effective: Complex64,
    pub path: Vec<Complex64>,
    pub energy: Complex64,
}

/// Path from `a` to `b`: the straight segment when it clears the other
/// turning points and the branch cut, otherwise a two-segment detour.
pub fn quantization_path(spec: &PotentialSpec, tps: &[Complex64], a: Complex64, b: Complex64) -> Result<Vec<Complex64>> {
    let others: Vec<Complex64> = tps
        .iter()
        .copied()
        .filter(|t| (t - a).norm() > 1e-9 * a.norm().max(1.0) && (t - b).norm() > 1e-9 * b.norm().max(1.0))
        .collect();
    let clear = |path: &[Complex64]| {
        path.windows(2).all(|w| {
            !spec.segment_crosses_cut(w[0], w[1])
                && others
                    .iter()
                    .all(|&t| point_segment_distance(t, w[0], w[1]) > CLEARANCE)
        })
    };
    let straight = vec![a, b];
    if clear(&straight) {
        return Ok(straight);
    }
    let mid = (a + b) / 2.0;
    let normal = (b - a) * Complex64::new(0.0, 1.0);
    for bulge in [0.25, -0.25, 0.5, -0.5, 1.0, -1.0] {
        let path = vec![a, mid + normal * bulge, b];
        if clear(&path) {
            return Ok(path);
        }
    }
    // Round the branch point on the side away from the cut.
    if let Some(dir) = spec.branch_cut() {
        let r = a.norm().max(b.norm());
        for s in [0.5, 1.0, 0.25, 2.0] {
            let path = vec![a, -dir * (s * r), b];
            if clear(&path) {
                return Ok(path);
            }
        }
    }
    Err(Error::BranchTracking(format!(
        "no clear path between turning points {a} and {b}"
    )))
}

/// `(∫ √(E-V) dx, ∫ dx / 2√(E-V))` along the path, same branch for both,
/// sign chosen so the first has positive real part.
fn path_integrals(spec: &PotentialSpec, energy: Complex64, path: &[Complex64]) -> Result<(Complex64, Complex64)> {
    let mut tracker = BranchTracker::new();
    let mut action = Complex64::new(0.0, 0.0);
    let mut derivative = Complex64::new(0.0, 0.0);
    for w in path.windows(2) {
        let mut roots = Vec::new();
        action += segment_integral_sine(w[0], w[1], PANELS, |x| {
            let s = tracker.sqrt(energy - eval_potential(spec, x)?)?;
            roots.push(s);
            Ok(s)
        })?;
        // Same nodes again for the derivative, reusing the tracked roots.
        let mut it = roots.into_iter();
        derivative += segment_integral_sine(w[0], w[1], PANELS, |_| {
            let s = it.next().expect("same node count");
            Ok(if s.norm() == 0.0 { Complex64::new(0.0, 0.0) } else { (s * 2.0).inv() })
        })?;
    }
    if action.re < 0.0 {
        Ok((-action, -derivative))
    } else {
        Ok((action, derivative))
    }
}

/// `∫ √(E - V) dx` between two turning points, continued along the path and
/// signed to have positive real part.
pub fn quantization_integral(spec: &PotentialSpec, energy: Complex64, tp_pair: (Complex64, Complex64)) -> Result<Complex64> {
    let tps = turning_points(spec, energy)?;
    let path = quantization_path(spec, &tps, tp_pair.0, tp_pair.1)?;
    Ok(path_integrals(spec, energy, &path)?.0)
}

/// The turning points whose arguments are nearest the two sector centers,
/// as `(left, right)`.
pub fn select_turning_points(spec: &PotentialSpec, pair: &SectorPair, energy: Complex64) -> Result<(Complex64, Complex64)> {
    let tps = turning_points(spec, energy)?;
    let nearest = |theta: f64| {
        tps.iter()
            .copied()
            .min_by(|a, b| {
                angle_distance(a.arg(), theta)
                    .partial_cmp(&angle_distance(b.arg(), theta))
                    .unwrap()
            })
            .expect("turning_points never returns an empty list")
    };
    let left = nearest(pair.left.center_angle);
    let right = nearest(pair.right.center_angle);
    if (left - right).norm() <= 1e-12 * left.norm().max(1.0) {
        return Err(Error::BranchTracking(format!(
            "sectors {} and {} select the same turning point",
            pair.left.label, pair.right.label
        )));
    }
    Ok((left, right))
}

/// Quantization integral for one sector pair at energy `E`.
pub fn quantization(spec: &PotentialSpec, pair: &SectorPair, energy: Complex64) -> Result<QuantizationResult> {
    let (a, b) = select_turning_points(spec, pair, energy)?;
    let tps = turning_points(spec, energy)?;
    let path = quantization_path(spec, &tps, a, b)?;
    let (action, _) = path_integrals(spec, energy, &path)?;
    Ok(QuantizationResult {
        n_effective: action / PI - 0.5,
        path,
        energy,
    })
}

fn is_homogeneous(spec: &PotentialSpec) -> bool {
    match *spec {
        PotentialSpec::PureMonomial { .. } => true,
        PotentialSpec::DeformedMonomial {
            include_harmonic, ..
        } => !include_harmonic,
        PotentialSpec::RotatedQuartic { .. } => false,
    }
}

/// Energy of `∫ √(E - V) dx = (n + 1/2)π` for a homogeneous potential:
/// the integral scales as `E^{(N+2)/2N}`, so only the phase of `E` needs
/// iterating.
fn homogeneous_estimate(spec: &PotentialSpec, pair: &SectorPair, n: usize) -> Result<Complex64> {
    let (degree, _) = spec.asymptotic();
    let exponent = (degree + 2.0) / (2.0 * degree);
    // The turning-point selection jumps as the phase of E moves, so the
    // iteration is started from several phases and the first fixed point
    // wins.
    let mut best: Option<(f64, Complex64)> = None;
    for k in 0..STARTS {
        let mut phi = wrap_angle(2.0 * PI * k as f64 / STARTS as f64);
        let mut action = Complex64::new(0.0, 0.0);
        for _ in 0..60 {
            action = match quantization(spec, pair, Complex64::from_polar(1.0, phi)) {
                Ok(q) => (q.n_effective + 0.5) * PI,
                Err(_) => break,
            };
            let delta = action.arg();
            if delta.abs() < 1e-14 {
                break;
            }
            phi = wrap_angle(phi - delta / exponent);
        }
        let residual = action.arg().abs();
        if action.norm() > 0.0 && residual < 1e-10 {
            let modulus = ((n as f64 + 0.5) * PI / action.norm()).powf(1.0 / exponent);
            return Ok(Complex64::from_polar(modulus, phi));
        }
        if best.map_or(true, |(r, _)| residual < r) {
            best = Some((residual, Complex64::from_polar(1.0, phi)));
        }
    }
    let (residual, last) = best.unwrap_or((f64::INFINITY, Complex64::new(1.0, 0.0)));
    Err(Error::NoConvergence {
        iterations: STARTS * 60,
        last,
        residual,
    })
}

const STARTS: usize = 12;

/// WKB estimate of the `n`-th eigenvalue of the problem posed on `pair`.
///
/// Homogeneous potentials are solved in closed form up to a phase
/// iteration; otherwise the leading-term estimate is refined by complex
/// Newton iteration, using `dI/dE = ∫ dx / 2√(E - V)`.
pub fn wkb_energy_estimate(spec: &PotentialSpec, pair: &SectorPair, n: usize) -> Result<Complex64> {
    spec.validate()?;
    if is_homogeneous(spec) {
        return homogeneous_estimate(spec, pair, n);
    }
    let (degree, coefficient) = spec.asymptotic();
    let leading = match spec.integer_degree() {
        Some(d) => PotentialSpec::PureMonomial {
            degree: d,
            coefficient,
        },
        None => match *spec {
            PotentialSpec::DeformedMonomial {
                epsilon, conjugate, ..
            } => PotentialSpec::DeformedMonomial {
                epsilon,
                include_harmonic: false,
                conjugate,
            },
            _ => unreachable!("only deformed monomials have non-integer degree"),
        },
    };
    let _ = degree;
    let mut energy = homogeneous_estimate(&leading, pair, n)?;
    let target = Complex64::new((n as f64 + 0.5) * PI, 0.0);
    for _ in 0..60 {
        let (a, b) = select_turning_points(spec, pair, energy)?;
        let tps = turning_points(spec, energy)?;
        let path = quantization_path(spec, &tps, a, b)?;
        let (action, slope) = path_integrals(spec, energy, &path)?;
        let mut step = (action - target) / slope;
        // Keep Newton from jumping across the spectrum.
        let limit = 0.5 * energy.norm().max(1.0);
        if step.norm() > limit {
            step *= limit / step.norm();
        }
        energy -= step;
        if step.norm() <= 1e-13 * energy.norm().max(1.0) {
            return Ok(energy);
        }
    }
    let residual = quantization(spec, pair, energy)
        .map(|q| (q.n_effective - n as f64).norm())
        .unwrap_or(f64::INFINITY);
    if residual < 1e-9 {
        Ok(energy)
    } else {
        Err(Error::NoConvergence {
            iterations: 60,
            last: energy,
            residual,
        })
    }
}

/// Where the sextic eigenvalues in [`pt_hermitian_ratio`] come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RatioSource {
    Wkb,
    Shooting,
}

/// `E_BD(n) / E_AE(n)` for `H = p² + x⁶`.
pub fn pt_hermitian_ratio(n: usize, source: RatioSource) -> Result<f64> {
    let spec = PotentialSpec::sextic();
    let pt = sector_pair_by_label(&spec, "BD")?;
    let hermitian = sector_pair_by_label(&spec, "AE")?;
    let (e_pt, e_herm) = match source {
        RatioSource::Wkb => (
            wkb_energy_estimate(&spec, &pt, n)?,
            wkb_energy_estimate(&spec, &hermitian, n)?,
        ),
        RatioSource::Shooting => {
            let solve = |pair: SectorPair| -> Result<Complex64> {
                let problem = ShootingProblem::new(spec, pair)?;
                Ok(find_eigenvalues(&problem, n)?[n].energy)
            };
            (solve(pt)?, solve(hermitian)?)
        }
    };
    Ok(e_pt.re / e_herm.re)
}

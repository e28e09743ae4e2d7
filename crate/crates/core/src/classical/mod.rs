//! Complex classical mechanics for `H = p² + V(x)`: `ẋ = 2p`, `ṗ = -V'(x)`.

mod geometry;
mod regions;

pub use geometry::{
    inverse_riemann_sphere_projection, polyline_self_intersects, riemann_sphere_projection,
    self_intersects, SpherePoint,
};
pub use regions::{
    classify_regions, region_anchors, region_name, residence_statistics, RegionVisit,
    ResidenceEstimate,
};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ode::{dopri_increment, dopri_step, integrate_span, CompensatedState, State, StepController};
use crate::potentials::{eval_force, eval_potential, turning_points, PotentialSpec};
use crate::quadrature::{point_segment_distance, segment_integral, BranchTracker};

/// A point of complex phase space at time `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub t: f64,
    pub x: Complex64,
    pub p: Complex64,
}

impl PhasePoint {
    pub fn new(x: Complex64, p: Complex64) -> Self {
        PhasePoint { t: 0.0, x, p }
    }

    /// Start at `x` with the momentum fixed by `E`; see [`momentum_for_energy`].
    pub fn with_energy(spec: &PotentialSpec, x: Complex64, energy: Complex64) -> Result<Self> {
        Ok(PhasePoint::new(x, momentum_for_energy(spec, x, energy)?))
    }

    fn is_finite(&self) -> bool {
        self.t.is_finite() && self.x.is_finite() && self.p.is_finite()
    }
}

/// `p = √(E - V(x))` on the branch with `Re p > 0`, or `Im p > 0` if `Re p = 0`.
pub fn momentum_for_energy(spec: &PotentialSpec, x: Complex64, energy: Complex64) -> Result<Complex64> {
    let p = (energy - eval_potential(spec, x)?).sqrt();
    let flip = p.re < 0.0 || (p.re == 0.0 && p.im < 0.0);
    Ok(if flip { -p } else { p })
}

/// Hamiltonian `p² + V(x)`.
pub fn energy_of(spec: &PotentialSpec, x: Complex64, p: Complex64) -> Result<Complex64> {
    Ok(p * p + eval_potential(spec, x)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    /// Allowed `|H - E|`, relative to `max(1, |E|)`. Far out, where
    /// `|V|` is huge, the achievable drift is bounded below by the
    /// round-off in `p² + V` instead.
    pub energy_drift_tol: f64,
    pub escape_radius: f64,
    pub t_max: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            rel_tol: 1e-10,
            abs_tol: 1e-10,
            max_step: 0.05,
            energy_drift_tol: 1e-8,
            escape_radius: 1e4,
            t_max: 100.0,
        }
    }
}

impl IntegratorConfig {
    pub fn with_t_max(mut self, t_max: f64) -> Self {
        self.t_max = t_max;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            self.rel_tol,
            self.abs_tol,
            self.max_step,
            self.energy_drift_tol,
            self.escape_radius,
            self.t_max,
        ];
        if all.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::InvalidInput(
                "integrator settings must be positive and finite".into(),
            ));
        }
        if self.rel_tol > 1e-3 || self.abs_tol > 1e-3 {
            return Err(Error::InvalidInput("rel_tol and abs_tol must be <= 1e-3".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    /// Reached `t_max`.
    Completed,
    /// Crossed `escape_radius`; the last sample sits on the crossing.
    Escaped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub samples: Vec<PhasePoint>,
    pub energy: Complex64,
    pub spec: PotentialSpec,
    pub termination: Termination,
    pub config: IntegratorConfig,
}

impl Trajectory {
    pub fn last(&self) -> &PhasePoint {
        self.samples.last().expect("trajectories hold at least one sample")
    }

    /// Largest `|H - E|` over the samples.
    pub fn max_energy_drift(&self) -> f64 {
        self.samples
            .iter()
            .filter_map(|s| energy_of(&self.spec, s.x, s.p).ok())
            .map(|h| (h - self.energy).norm())
            .fold(0.0, f64::max)
    }
}

/// Consecutive step halvings tried before the momentum is projected.
const MAX_DRIFT_REJECTIONS: usize = 3;

fn hamilton(spec: &PotentialSpec) -> impl FnMut(f64, &State) -> Result<State> + '_ {
    move |_t, y| Ok([y[1] * 2.0, eval_force(spec, y[0])?])
}

/// Adaptive Dormand–Prince integration of Hamilton's equations.
pub fn integrate(spec: &PotentialSpec, start: PhasePoint, config: IntegratorConfig) -> Result<Trajectory> {
    config.validate()?;
    spec.validate()?;
    if !start.is_finite() {
        return Err(Error::InvalidInput("start point must be finite".into()));
    }
    let energy = energy_of(spec, start.x, start.p)?;
    let mut f = hamilton(spec);
    let mut samples = vec![start];
    let t_end = start.t + config.t_max;
    let mut t = start.t;
    let mut state = CompensatedState::new([start.x, start.p]);
    let mut h = config.max_step.min(1e-2);
    let mut control = StepController::default();
    let mut termination = Termination::Completed;
    let mut drift_rejections = 0;
    // Set while consecutive steps need projection, so they are not halved again.
    let mut projecting = false;
    let drift_allowance = config.energy_drift_tol * energy.norm().max(1.0);

    while t < t_end {
        let h_try = h.min(t_end - t);
        let min_step = 1e-13 * t.abs().max(1.0);
        if h_try < min_step && t_end - t > min_step {
            return Err(Error::StepUnderflow { t, h: h_try });
        }
        let y = state.value();
        let (delta, err) = match dopri_increment(&mut f, t, &y, h_try, config.rel_tol, config.abs_tol) {
            Ok(r) => r,
            Err(Error::BranchCut { x }) if h_try > min_step => {
                // A stage strayed across the cut; retry with a smaller step.
                let _ = x;
                h = h_try / 2.0;
                continue;
            }
            Err(e) => return Err(e),
        };
        if err > 1.0 {
            h = h_try * control.factor(err, false);
            continue;
        }
        let mut y_new = state.peek(&delta);
        let mut delta = delta;
        let drift = (energy_of(spec, y_new[0], y_new[1])? - energy).norm();
        if drift > drift_allowance {
            if !projecting && drift_rejections < MAX_DRIFT_REJECTIONS {
                drift_rejections += 1;
                h = h_try / 2.0;
                continue;
            }
            // Smaller steps do not help: the drift is round-off in the
            // state. Put p back on the energy shell.
            let root = (energy - eval_potential(spec, y_new[0])?).sqrt();
            let p = if (root - y_new[1]).norm() <= (root + y_new[1]).norm() { root } else { -root };
            delta[1] += p - y_new[1];
            y_new[1] = p;
            projecting = true;
        } else {
            projecting = false;
        }
        drift_rejections = 0;

        if y_new[0].norm() > config.escape_radius {
            let (mut lo, mut hi) = (0.0, h_try);
            let mut y_hi = y_new;
            while hi - lo > 1e-9 {
                let mid = 0.5 * (lo + hi);
                let (y_mid, _) = dopri_step(&mut f, t, &y, mid, config.rel_tol, config.abs_tol)?;
                if y_mid[0].norm() > config.escape_radius {
                    hi = mid;
                    y_hi = y_mid;
                } else {
                    lo = mid;
                }
            }
            samples.push(PhasePoint {
                t: t + hi,
                x: y_hi[0],
                p: y_hi[1],
            });
            termination = Termination::Escaped;
            break;
        }

        t = if t_end - t <= h_try { t_end } else { t + h_try };
        state.add(&delta);
        let y = state.value();
        samples.push(PhasePoint { t, x: y[0], p: y[1] });
        h = (h_try * control.factor(err, true)).min(config.max_step);
    }

    Ok(Trajectory {
        samples,
        energy,
        spec: *spec,
        termination,
        config,
    })
}

/// Advance a sample by `dt ≥ 0` with the trajectory's settings.
fn advance(spec: &PotentialSpec, config: &IntegratorConfig, from: &PhasePoint, dt: f64) -> Result<PhasePoint> {
    if dt == 0.0 {
        return Ok(*from);
    }
    let mut f = hamilton(spec);
    let y = integrate_span(
        &mut f,
        from.t,
        [from.x, from.p],
        from.t + dt,
        config.rel_tol.min(1e-12),
        config.abs_tol.min(1e-12),
        config.max_step,
        |_, _| Ok(()),
    )?;
    Ok(PhasePoint {
        t: from.t + dt,
        x: y[0],
        p: y[1],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitResult {
    pub closed: bool,
    /// Zero when the orbit is not closed.
    pub period: f64,
    /// Smallest phase-space distance to the start at a section crossing.
    pub closure_distance: f64,
}

/// Looks for the first return to the start point.
///
/// Returns are detected on the section through `x(0)` normal to the initial
/// velocity (or, when starting at rest, on the sign change of the momentum
/// along the initial force) and refined by re-integration.
pub fn detect_closed_orbit(traj: &Trajectory, closure_tol: f64) -> Result<OrbitResult> {
    let spec = &traj.spec;
    let start = traj.samples[0];
    let scale = start.p.norm().max(start.x.norm()).max(1.0);
    let at_rest = start.p.norm() <= 1e-8 * scale;
    let force0 = eval_force(spec, start.x)?;
    let section = |s: &PhasePoint| -> f64 {
        if at_rest {
            (force0.conj() * s.p).re
        } else {
            (start.p.conj() * (s.x - start.x)).re
        }
    };

    let mut best = f64::INFINITY;
    let values: Vec<f64> = traj.samples.iter().map(section).collect();
    for i in 1..traj.samples.len().saturating_sub(1) {
        if !(values[i] < 0.0 && values[i + 1] >= 0.0) {
            continue;
        }
        let from = traj.samples[i];
        let (mut lo, mut hi) = (0.0, traj.samples[i + 1].t - from.t);
        let (mut g_lo, mut g_hi) = (values[i], values[i + 1]);
        let mut point = traj.samples[i + 1];
        for _ in 0..80 {
            if hi - lo <= 1e-13 * from.t.abs().max(1.0) {
                break;
            }
            // Regula falsi with bisection safeguard.
            let mut dt = lo - g_lo * (hi - lo) / (g_hi - g_lo);
            if !(dt > lo && dt < hi) || (dt - lo).min(hi - dt) < 0.05 * (hi - lo) {
                dt = 0.5 * (lo + hi);
            }
            let trial = advance(spec, &traj.config, &from, dt)?;
            let g = section(&trial);
            point = trial;
            if g == 0.0 {
                break;
            }
            if g < 0.0 {
                lo = dt;
                g_lo = g;
            } else {
                hi = dt;
                g_hi = g;
            }
        }
        let distance = (point.x - start.x).norm() + (point.p - start.p).norm();
        best = best.min(distance);
        let aligned = at_rest || (point.p * start.p.conj()).re > 0.0;
        if distance < closure_tol && aligned {
            return Ok(OrbitResult {
                closed: true,
                period: point.t - start.t,
                closure_distance: distance,
            });
        }
    }
    Ok(OrbitResult {
        closed: false,
        period: 0.0,
        closure_distance: best,
    })
}

/// Time to reach `|x| = ∞`: the integrated time to the escape radius plus
/// the tail `∫_R^∞ dx / 2p`, evaluated on the ray through the exit point.
pub fn escape_time(spec: &PotentialSpec, start: PhasePoint, config: IntegratorConfig) -> Result<f64> {
    let traj = integrate(spec, start, config)?;
    if traj.termination != Termination::Escaped {
        return Err(Error::NotEscaped { t_max: config.t_max });
    }
    let exit = *traj.last();
    let energy = traj.energy;
    // x = x_e / v for v from 1 down to 0; p is continued from its value at exit.
    let mut tracker = BranchTracker::seeded(exit.p);
    let one = Complex64::new(1.0, 0.0);
    let tail = segment_integral(one, Complex64::new(0.0, 0.0), 8, |v| {
        let x = exit.x / v;
        let p = tracker.sqrt(energy - eval_potential(spec, x)?)?;
        Ok(-exit.x / (v * v * p * 2.0))
    })?;
    Ok(exit.t - start.t + tail.re)
}

fn nearest_turning_point_distance(tps: &[Complex64], a: Complex64, b: Complex64) -> f64 {
    tps.iter()
        .map(|&tp| point_segment_distance(tp, a, b))
        .fold(f64::INFINITY, f64::min)
}

/// Split `a → b` into pieces no longer than half their distance to the
/// nearest turning point.
fn graded_pieces(tps: &[Complex64], a: Complex64, b: Complex64, out: &mut Vec<(Complex64, Complex64)>, depth: usize) -> Result<()> {
    let clearance = nearest_turning_point_distance(tps, a, b);
    if clearance <= 1e-12 {
        return Err(Error::BranchTracking(format!(
            "contour passes through a turning point near {a}"
        )));
    }
    if (b - a).norm() <= 0.5 * clearance || depth > 60 {
        out.push((a, b));
        return Ok(());
    }
    let m = (a + b) / 2.0;
    graded_pieces(tps, a, m, out, depth + 1)?;
    graded_pieces(tps, m, b, out, depth + 1)
}

/// `∮ dx / (2√(E - V))` around a closed polyline, with the square root
/// continued along the path. The sign is fixed so the real part is positive.
pub fn orbit_period_quadrature(spec: &PotentialSpec, energy: Complex64, contour: &[Complex64]) -> Result<Complex64> {
    if contour.len() < 3 {
        return Err(Error::InvalidInput("a loop needs at least 3 vertices".into()));
    }
    let tps = turning_points(spec, energy)?;
    let mut pieces = Vec::new();
    for i in 0..contour.len() {
        let (a, b) = (contour[i], contour[(i + 1) % contour.len()]);
        if a != b {
            graded_pieces(&tps, a, b, &mut pieces, 0)?;
        }
    }
    let mut tracker = BranchTracker::new();
    let start_root = tracker.sqrt(energy - eval_potential(spec, contour[0])?)?;
    let mut total = Complex64::new(0.0, 0.0);
    for (a, b) in pieces {
        total += segment_integral(a, b, 1, |x| {
            Ok(tracker.sqrt(energy - eval_potential(spec, x)?)?.inv() / 2.0)
        })?;
    }
    let end_root = tracker.sqrt(energy - eval_potential(spec, contour[0])?)?;
    if (end_root - start_root).norm() > 1e-6 * start_root.norm().max(1.0) {
        return Err(Error::BranchTracking(
            "loop encloses an odd number of turning points".into(),
        ));
    }
    Ok(if total.re < 0.0 { -total } else { total })
}

/// An ellipse through `n` vertices enclosing the segment `a → b`.
pub fn loop_around(a: Complex64, b: Complex64, margin: f64, n: usize) -> Vec<Complex64> {
    let center = (a + b) / 2.0;
    let half = (b - a) / 2.0;
    let major = half.norm() + margin;
    let minor = margin;
    let dir = if half.norm() > 0.0 { half / half.norm() } else { Complex64::new(1.0, 0.0) };
    (0..n)
        .map(|k| {
            let phi = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
            center + dir * Complex64::new(major * phi.cos(), minor * phi.sin())
        })
        .collect()
}

/// Turning points of the trajectory's energy that its path winds around
/// or touches.
pub fn encircled_turning_points(traj: &Trajectory) -> Result<Vec<Complex64>> {
    let tps = turning_points(&traj.spec, traj.energy)?;
    Ok(tps
        .into_iter()
        .filter(|&a| {
            let scale = a.norm().max(1.0);
            if traj.samples.iter().any(|s| (s.x - a).norm() < 1e-6 * scale) {
                return true;
            }
            let mut turns = 0.0;
            for w in traj.samples.windows(2) {
                match segment_turn(traj, &w[0], &w[1], a, WINDING_DEPTH) {
                    Ok(angle) => turns += angle,
                    Err(_) => return false,
                }
            }
            (turns / (2.0 * std::f64::consts::PI)).abs() >= 0.5
        })
        .collect())
}

/// Bisections allowed when a chord passes close to a turning point.
const WINDING_DEPTH: usize = 24;

/// Angle swept about `a` between two samples. Chords that are long compared
/// with their distance from `a` are refined by re-integrating.
fn segment_turn(traj: &Trajectory, from: &PhasePoint, to: &PhasePoint, a: Complex64, depth: usize) -> Result<f64> {
    let chord = (to.x - from.x).norm();
    let distance = (from.x - a).norm().min((to.x - a).norm());
    if depth == 0 || chord < 0.25 * distance {
        return Ok(((to.x - a) / (from.x - a)).arg());
    }
    let mid = advance(&traj.spec, &traj.config, from, 0.5 * (to.t - from.t))?;
    Ok(segment_turn(traj, from, &mid, a, depth - 1)? + segment_turn(traj, &mid, to, a, depth - 1)?)
}

/// The quadrature period of the orbit that `traj` traces, taken around the
/// two turning points it encloses.
pub fn trajectory_quadrature_period(traj: &Trajectory) -> Result<Complex64> {
    let inside = encircled_turning_points(traj)?;
    let [a, b] = inside[..] else {
        return Err(Error::InvalidInput(format!(
            "orbit encloses {} turning points, expected 2",
            inside.len()
        )));
    };
    let others = turning_points(&traj.spec, traj.energy)?;
    let clearance = others
        .iter()
        .filter(|&&t| t != a && t != b)
        .map(|&t| point_segment_distance(t, a, b))
        .fold(f64::INFINITY, f64::min);
    let margin = (0.5 * clearance).min(0.5 * (b - a).norm());
    orbit_period_quadrature(&traj.spec, traj.energy, &loop_around(a, b, margin, 96))
}

//! Eigenvalues of `-ψ'' + V ψ = E ψ` posed on a pair of Stokes sectors.
//!
//! The contour is two straight rays, along the sector centers, meeting at
//! the match point. On each ray the decaying solution is integrated inward
//! from leading-order WKB data at radius `r_max`, and an eigenvalue is a
//! zero of the Wronskian of the two solutions at the match point.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ode::{dopri_step, State, StepController};
use crate::quadrature::{segment_integral_sine, BranchTracker};
use crate::potentials::{eval_force, eval_potential, enumerate_sector_pairs, pt_sector_pair, PotentialSpec, SectorPair};
use crate::wkb::{select_turning_points, wkb_energy_estimate};

/// Default decay budget: `Re ∫ √(V - E) dx` over the tail of each ray.
pub const DECAY_BUDGET: f64 = 30.0;
/// Two roots closer than this (relative) are the same eigenvalue.
pub const DEDUP_TOL: f64 = 1e-6;
/// `|Im E| ≤ REALITY_TOL · max(1, |E|)` counts as real.
pub const REALITY_TOL: f64 = 1e-8;
const MAX_SECANT_ITERATIONS: usize = 60;
const LOST_BRANCH_ITERATIONS: usize = 12;
const RESCALE: f64 = 1e100;
const WEIGHT_PANELS: usize = 24;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShootingProblem {
    pub spec: PotentialSpec,
    pub pair: SectorPair,
    /// Minimum outer radius of both rays; grown as needed per energy.
    pub ray_radius: f64,
    pub match_point: Complex64,
    /// Route the contour through the turning points that quantize this
    /// pair, keeping it off regions where one solution dominates both arms.
    pub follow_turning_points: bool,
    pub ode_tol: f64,
    pub root_tol: f64,
    pub decay_budget: f64,
}

impl ShootingProblem {
    pub fn new(spec: PotentialSpec, pair: SectorPair) -> Result<Self> {
        spec.validate()?;
        let mut problem = ShootingProblem {
            spec,
            pair,
            ray_radius: 0.0,
            match_point: Complex64::new(0.0, 0.0),
            follow_turning_points: true,
            ode_tol: 1e-12,
            root_tol: 1e-10,
            decay_budget: DECAY_BUDGET,
        };
        problem.ray_radius = problem.budget_radius(Complex64::new(0.0, 0.0));
        Ok(problem)
    }

    /// The PT-connected pair of a deformed monomial or rotated quartic.
    pub fn pt(spec: PotentialSpec) -> Result<Self> {
        let pair = pt_sector_pair(&spec)?;
        Self::new(spec, pair)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.ode_tol > 0.0
            && self.ode_tol < 1e-3
            && self.root_tol > 0.0
            && self.decay_budget > 0.0
            && self.ray_radius.is_finite()
            && self.match_point.is_finite();
        if !ok {
            return Err(Error::InvalidInput("invalid shooting problem settings".into()));
        }
        Ok(())
    }

    /// Radius beyond which `∫ √(|c| r^N - |E|) dr` exceeds the decay budget.
    pub fn budget_radius(&self, energy: Complex64) -> f64 {
        let (degree, c) = self.spec.asymptotic();
        let c = c.norm();
        let e = energy.norm();
        let r_turn = (e / c).powf(1.0 / degree);
        let dr = r_turn.max(1.0) * 1e-3;
        let mut r = r_turn;
        let mut decay = 0.0;
        while decay < self.decay_budget {
            let mid = r + dr / 2.0;
            decay += (c * mid.powf(degree) - e).max(0.0).sqrt() * dr;
            r += dr;
        }
        r + self.match_point.norm()
    }

    /// Outer radius actually used at energy `E`.
    pub fn radius_for(&self, energy: Complex64) -> f64 {
        self.ray_radius.max(self.budget_radius(energy))
    }

    /// The integration contour at energy `E`.
    ///
    /// With `follow_turning_points`, each arm leaves its sector along the
    /// center direction and runs into the turning point nearest that
    /// sector; the left arm then crosses to the right turning point, where
    /// the two solutions are matched. Otherwise both arms are straight rays
    /// to `match_point`.
    pub fn contour(&self, energy: Complex64) -> Contour {
        let radius = self.radius_for(energy);
        let (theta_l, theta_r) = (self.pair.left.center_angle, self.pair.right.center_angle);
        let straight = |theta: f64| vec![Complex64::from_polar(radius, theta), self.match_point];
        let turning = if self.follow_turning_points {
            select_turning_points(&self.spec, &self.pair, energy).ok()
        } else {
            None
        };
        match turning {
            Some((a, b)) => {
                let arm = |tp: Complex64, theta: f64| {
                    let length = (radius - tp.norm()).max(0.5 * radius);
                    vec![tp + Complex64::from_polar(length, theta), tp]
                };
                let mut left = arm(a, theta_l);
                left.extend(crossing_path(&self.spec, energy, a, b).into_iter().skip(1));
                Contour {
                    left,
                    right: arm(b, theta_r),
                }
            }
            None => Contour {
                left: straight(theta_l),
                right: straight(theta_r),
            },
        }
    }
}

const CROSSING_VERTICES: usize = 32;

/// `max |Re ∫ √(V - E) dx|` along the polyline, i.e. the worst exponential
/// imbalance between the two solutions on the way.
fn crossing_imbalance(spec: &PotentialSpec, energy: Complex64, path: &[Complex64]) -> f64 {
    let mut tracker = BranchTracker::new();
    let mut integral = Complex64::new(0.0, 0.0);
    let mut worst: f64 = 0.0;
    for w in path.windows(2) {
        let mid = (w[0] + w[1]) * 0.5;
        let Ok(root) = eval_potential(spec, mid).and_then(|v| tracker.sqrt(v - energy)) else {
            return f64::INFINITY;
        };
        integral += root * (w[1] - w[0]);
        worst = worst.max(integral.re.abs());
    }
    worst
}

fn bulged(a: Complex64, b: Complex64, bulge: Complex64) -> Vec<Complex64> {
    (0..=CROSSING_VERTICES)
        .map(|k| {
            let t = k as f64 / CROSSING_VERTICES as f64;
            a + (b - a) * t + (b - a) * bulge * (t * (1.0 - t))
        })
        .collect()
}

/// Path between the two turning points that keeps close to the curve on
/// which both solutions oscillate: a parabola `a + (b - a)(t + c t(1 - t))`
/// with `c` chosen by a coarse search. The straight segment can leave that
/// curve far enough for round-off in the small solution to dominate.
/// Parabolas that cross a branch cut are rejected; when the turning points
/// straddle the cut the search widens until the path passes round the
/// branch point.
fn crossing_path(spec: &PotentialSpec, energy: Complex64, a: Complex64, b: Complex64) -> Vec<Complex64> {
    let score = |c: Complex64| {
        let path = bulged(a, b, c);
        if path.windows(2).any(|w| spec.segment_crosses_cut(w[0], w[1])) {
            f64::INFINITY
        } else {
            crossing_imbalance(spec, energy, &path)
        }
    };
    let mut best = (score(Complex64::new(0.0, 0.0)), Complex64::new(0.0, 0.0));
    let consider = |c: Complex64, best: &mut (f64, Complex64)| {
        let value = score(c);
        if value < best.0 {
            *best = (value, c);
        }
    };
    for k in -10..=10 {
        consider(Complex64::new(0.0, 0.1 * k as f64), &mut best);
    }
    let mut reach = 1.0;
    while best.0.is_infinite() && reach < 256.0 {
        reach *= 2.0;
        for k in 1..=10 {
            let v = reach * (0.5 + 0.05 * k as f64);
            consider(Complex64::new(0.0, v), &mut best);
            consider(Complex64::new(0.0, -v), &mut best);
        }
    }
    let scale = best.1.norm().max(1.0);
    for step in [0.05, 0.02, 0.01] {
        let center = best.1;
        for (du, dv) in [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0)] {
            consider(center + Complex64::new(du, dv) * (step * scale), &mut best);
        }
    }
    bulged(a, b, best.1)
}

/// Two polylines, each running from deep inside a sector to the match point.
#[derive(Debug, Clone, PartialEq)]
pub struct Contour {
    pub left: Vec<Complex64>,
    pub right: Vec<Complex64>,
}

impl Contour {
    pub fn match_point(&self) -> Complex64 {
        *self.right.last().expect("contour arms are never empty")
    }
}

/// Where an eigenvalue came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Shooting,
    Wkb,
}

impl Source {
    pub fn as_str(&self) -> &'static str {
        match self {
            Source::Shooting => "shooting",
            Source::Wkb => "wkb",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenvalueRecord {
    pub index: usize,
    pub energy: Complex64,
    /// Normalized Wronskian at `energy`.
    pub residual: f64,
    pub pair_label: String,
    pub source: Source,
    /// False when continuation lost this branch; `energy` is then the
    /// prediction.
    pub converged: bool,
}

impl EigenvalueRecord {
    /// A lost branch is never counted as real.
    pub fn is_real(&self) -> bool {
        self.converged && self.energy.im.abs() <= REALITY_TOL * self.energy.norm().max(1.0)
    }
}

/// Inward solution at the end of one contour arm.
struct Arm {
    y: State,
    /// `ln` of the factor divided out of `y` to avoid overflow.
    log_scale: f64,
    /// Analytic estimate of `ln ψ` growth along the first leg,
    /// `-∫ √(V - E) dx` from the outer point, less `¼ ln|V - E|` there.
    log_weight: Complex64,
}

/// Inward solution along one contour arm, optionally recording `(x, ψ)`.
fn shoot_arm(
    problem: &ShootingProblem,
    energy: Complex64,
    path: &[Complex64],
    mut record: Option<&mut Vec<(Complex64, Complex64)>>,
) -> Result<Arm> {
    let spec = &problem.spec;
    let start = path[0];
    let outward = (start - path[1]) / (start - path[1]).norm();
    let q = eval_potential(spec, start)? - energy;
    let mut root = q.sqrt();
    if (outward * root).re < 0.0 {
        root = -root;
    }
    let dq = -eval_force(spec, start)?;
    let one = Complex64::new(1.0, 0.0);
    let mut y: State = [one, -root - dq / (q * 4.0)];
    if let Some(rec) = record.as_deref_mut() {
        rec.push((start, y[0]));
    }
    let mut tracker = BranchTracker::seeded(root);
    let decay = segment_integral_sine(start, path[1], WEIGHT_PANELS, |x| {
        tracker.sqrt(eval_potential(spec, x)? - energy)
    })?;
    let log_weight = decay - 0.25 * q.norm().ln();
    let mut log_scale = 0.0;

    for leg in path.windows(2) {
        let (from, length) = (leg[0], leg[1] - leg[0]);
        let mut f = |s: f64, y: &State| -> Result<State> {
            let v = eval_potential(spec, from + length * s)?;
            Ok([length * y[1], length * (v - energy) * y[0]])
        };
        let mut s = 0.0;
        let mut h: f64 = 1e-3;
        let mut control = StepController::default();
        while s < 1.0 {
            let h_try = h.min(1.0 - s);
            let size = y[0].norm().max(y[1].norm());
            let (y_new, err) = dopri_step(&mut f, s, &y, h_try, problem.ode_tol, problem.ode_tol * size)?;
            if err <= 1.0 {
                s = if 1.0 - s <= h_try { 1.0 } else { s + h_try };
                y = y_new;
                let size = y[0].norm().max(y[1].norm());
                if !size.is_finite() {
                    return Err(Error::Overflow { radius: start.norm() });
                }
                if size > RESCALE {
                    y = [y[0] / size, y[1] / size];
                    log_scale += size.ln();
                    if let Some(rec) = record.as_deref_mut() {
                        rec.iter_mut().for_each(|(_, psi)| *psi /= size);
                    }
                }
                if let Some(rec) = record.as_deref_mut() {
                    rec.push((from + length * s, y[0]));
                }
                h = h_try * control.factor(err, true);
            } else {
                h = h_try * control.factor(err, false);
                if h < 1e-15 {
                    return Err(Error::StepUnderflow { t: s, h });
                }
            }
        }
    }
    Ok(Arm {
        y,
        log_scale,
        log_weight,
    })
}

struct Shot {
    left: Arm,
    right: Arm,
}

impl Shot {
    /// The Wronskian with the WKB growth of both arms divided out. The
    /// divisor is analytic in `E`, so roots keep their multiplicity and the
    /// secant iteration sees a holomorphic function.
    fn normalized(&self) -> Complex64 {
        let (l, r) = (&self.left, &self.right);
        let w = l.y[0] * r.y[1] - l.y[1] * r.y[0];
        w * (l.log_scale + r.log_scale + l.log_weight + r.log_weight).exp()
    }
}

fn shoot(problem: &ShootingProblem, energy: Complex64) -> Result<Shot> {
    if !energy.is_finite() {
        return Err(Error::InvalidInput(format!("energy must be finite, got {energy}")));
    }
    let contour = problem.contour(energy);
    Ok(Shot {
        left: shoot_arm(problem, energy, &contour.left, None)?,
        right: shoot_arm(problem, energy, &contour.right, None)?,
    })
}

/// `W = ψ_L ψ_R' - ψ_L' ψ_R` at the match point, for solutions started
/// with `ψ = 1` and scaled by their WKB growth `exp(-∫ √(V - E) dx)` along
/// the outer leg of each arm, so that `|W|` is of order one away from
/// eigenvalues.
pub fn wronskian_mismatch(problem: &ShootingProblem, energy: Complex64) -> Result<Complex64> {
    problem.validate()?;
    Ok(shoot(problem, energy)?.normalized())
}

/// Complex secant iteration on the normalized Wronskian.
pub fn secant_root(problem: &ShootingProblem, e0: Complex64, e1: Complex64) -> Result<(Complex64, f64)> {
    secant_limited(problem, e0, e1, f64::INFINITY, MAX_SECANT_ITERATIONS)
}

/// Secant iteration whose steps never exceed `max_step` (nor half of
/// `max(1, |E|)`), so it stays near its seed.
fn secant_limited(
    problem: &ShootingProblem,
    e0: Complex64,
    e1: Complex64,
    max_step: f64,
    iterations: usize,
) -> Result<(Complex64, f64)> {
    let (mut e0, mut e1) = (e0, e1);
    let mut f0 = wronskian_mismatch(problem, e0)?;
    let mut f1 = wronskian_mismatch(problem, e1)?;
    for _ in 0..iterations {
        let denom = f1 - f0;
        if denom.norm() == 0.0 {
            break;
        }
        let mut step = f1 * (e1 - e0) / denom;
        let limit = (0.5 * e1.norm().max(1.0)).min(max_step);
        if step.norm() > limit {
            step *= limit / step.norm();
        }
        let e2 = e1 - step;
        let f2 = wronskian_mismatch(problem, e2)?;
        e0 = e1;
        f0 = f1;
        e1 = e2;
        f1 = f2;
        if step.norm() <= 1e-14 * e1.norm().max(1.0) || f1.norm() <= 1e-3 * problem.root_tol {
            break;
        }
    }
    let residual = f1.norm();
    if residual <= problem.root_tol {
        Ok((e1, residual))
    } else {
        Err(Error::NoConvergence {
            iterations,
            last: e1,
            residual,
        })
    }
}

fn seeds_around(e: Complex64) -> (Complex64, Complex64) {
    let scale = e.norm().max(1.0);
    (e, e + Complex64::new(1e-3 * scale, 1e-4 * scale))
}

fn same_root(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() < DEDUP_TOL * a.norm().max(b.norm()).max(1.0)
}

fn sort_by_modulus(roots: &mut [(Complex64, f64)]) {
    roots.sort_by(|a, b| {
        let (ma, mb) = (a.0.norm(), b.0.norm());
        if (ma - mb).abs() <= DEDUP_TOL * ma.max(1.0) {
            a.0.im.partial_cmp(&b.0.im).unwrap()
        } else {
            ma.partial_cmp(&mb).unwrap()
        }
    });
}

fn insert_unique(found: &mut Vec<(Complex64, f64)>, root: (Complex64, f64)) {
    if !found.iter().any(|r| same_root(r.0, root.0)) {
        found.push(root);
    }
}

/// Eigenvalues `0..=n_max`, ordered by increasing `|E|`.
///
/// Each index is seeded from its WKB estimate. If the converged roots skip
/// an index (a root lies beyond the next WKB level), extra seeds between
/// the WKB levels are tried before reporting the gap.
pub fn find_eigenvalues(problem: &ShootingProblem, n_max: usize) -> Result<Vec<EigenvalueRecord>> {
    problem.validate()?;
    let spec = &problem.spec;
    let wkb: Vec<Complex64> = (0..=n_max + 2)
        .map(|n| wkb_energy_estimate(spec, &problem.pair, n))
        .collect::<Result<_>>()?;

    // Half the local WKB level spacing bounds each secant step.
    let reach = |e: Complex64| -> f64 {
        wkb.windows(2)
            .map(|w| (w[1] - w[0]).norm())
            .zip(wkb.iter())
            .min_by(|a, b| (a.1 - e).norm().partial_cmp(&(b.1 - e).norm()).unwrap())
            .map_or(f64::INFINITY, |(spacing, _)| 0.5 * spacing)
    };
    let solve = |seeds: &[Complex64]| -> Vec<(Complex64, f64)> {
        seeds
            .par_iter()
            .filter_map(|&s| {
                let (a, b) = seeds_around(s);
                secant_limited(problem, a, b, reach(s), MAX_SECANT_ITERATIONS).ok()
            })
            .collect()
    };

    let mut found: Vec<(Complex64, f64)> = Vec::new();
    for root in solve(&wkb) {
        insert_unique(&mut found, root);
    }
    let gap = |found: &mut Vec<(Complex64, f64)>| -> Option<usize> {
        sort_by_modulus(found);
        (0..=n_max).find(|&n| n >= found.len() || found[n].0.norm() >= wkb[n + 1].norm() * 1.05)
    };
    if gap(&mut found).is_some() {
        let mut extra = vec![wkb[0] * 0.5, wkb[0] * 0.8];
        for w in wkb.windows(2) {
            for t in [0.25, 0.5, 0.75] {
                extra.push(w[0] + (w[1] - w[0]) * t);
            }
        }
        for root in solve(&extra) {
            insert_unique(&mut found, root);
        }
    }
    if let Some(index) = gap(&mut found) {
        return Err(Error::MissingIndex {
            index,
            label: problem.pair.label(),
        });
    }
    Ok(found
        .into_iter()
        .take(n_max + 1)
        .enumerate()
        .map(|(index, (energy, residual))| EigenvalueRecord {
            index,
            energy,
            residual,
            pair_label: problem.pair.label(),
            source: Source::Shooting,
            converged: true,
        })
        .collect())
}

/// Continues each level from the previous parameter value, keeping the
/// order of `predictions`. Duplicates, as when two real levels have merged
/// into a conjugate pair, are re-solved from the conjugate of the other
/// root.
fn continue_levels<F>(
    make_problem: &F,
    param: f64,
    predictions: &[Complex64],
    steps: &[Complex64],
    lost: &[bool],
) -> Result<Vec<EigenvalueRecord>>
where
    F: Fn(f64) -> Result<ShootingProblem> + Sync,
{
    let problem = make_problem(param)?;
    // Half the distance to the nearest other prediction bounds each step.
    let reach: Vec<f64> = predictions
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let nearest = predictions
                .iter()
                .enumerate()
                .filter(|&(j, q)| j != i && !same_root(*p, *q))
                .map(|(_, q)| (p - q).norm())
                .fold(f64::INFINITY, f64::min);
            (0.5 * nearest).max(1e-3 * p.norm().max(1.0))
        })
        .collect();
    let mut solved: Vec<Option<(Complex64, f64)>> = predictions
        .par_iter()
        .zip(steps)
        .zip(&reach)
        .zip(lost)
        .map(|(((&pred, &step), &reach), &lost)| {
            let scale = pred.norm().max(1.0);
            if lost {
                // One short attempt from where the branch was last seen.
                let (a, b) = seeds_around(pred);
                return secant_limited(&problem, a, b, reach, LOST_BRANCH_ITERATIONS).ok();
            }
            let nudge = if step.norm() > 0.0 { step * 0.05 } else { Complex64::new(1e-4 * scale, 0.0) };
            let b = pred + nudge + Complex64::new(0.0, 1e-6 * scale);
            secant_limited(&problem, pred, b, reach, MAX_SECANT_ITERATIONS)
                .or_else(|_| {
                    let (a, b) = seeds_around(pred);
                    secant_limited(&problem, a, b, reach, MAX_SECANT_ITERATIONS)
                })
                .ok()
        })
        .collect();

    for j in 0..solved.len() {
        let Some((ej, _)) = solved[j] else { continue };
        let duplicate = (0..j).find(|&i| matches!(solved[i], Some((ei, _)) if same_root(ei, ej)));
        if let Some(i) = duplicate {
            let (ei, _) = solved[i].unwrap();
            let conj = ei.conj();
            let retry = if same_root(conj, ei) {
                None
            } else {
                let (a, b) = seeds_around(conj);
                secant_root(&problem, a, b)
                    .ok()
                    .filter(|r| !solved.iter().flatten().any(|s| same_root(s.0, r.0)))
            };
            solved[j] = retry;
        }
    }

    let label = problem.pair.label();
    let records: Vec<EigenvalueRecord> = solved
        .iter()
        .zip(predictions)
        .map(|(s, &pred)| match s {
            Some((energy, residual)) => EigenvalueRecord {
                index: 0,
                energy: *energy,
                residual: *residual,
                pair_label: label.clone(),
                source: Source::Shooting,
                converged: true,
            },
            None => EigenvalueRecord {
                index: 0,
                energy: pred,
                residual: f64::NAN,
                pair_label: label.clone(),
                source: Source::Shooting,
                converged: false,
            },
        })
        .collect();
    Ok(records)
}

/// Records ordered by `|E|` (ties by Im E) and indexed in that order.
fn sorted_by_modulus(mut records: Vec<EigenvalueRecord>) -> Vec<EigenvalueRecord> {
    records.sort_by(|a, b| {
        let (ma, mb) = (a.energy.norm(), b.energy.norm());
        if (ma - mb).abs() <= DEDUP_TOL * ma.max(1.0) {
            a.energy.im.partial_cmp(&b.energy.im).unwrap()
        } else {
            ma.partial_cmp(&mb).unwrap()
        }
    });
    for (i, r) in records.iter_mut().enumerate() {
        r.index = i;
    }
    records
}

/// `W_n(to) - W_n(from)` for the WKB levels, the first-step predictor.
fn wkb_shifts<F>(make_problem: &F, from: f64, to: f64, levels: usize) -> Result<Vec<Complex64>>
where
    F: Fn(f64) -> Result<ShootingProblem> + Sync,
{
    let (a, b) = (make_problem(from)?, make_problem(to)?);
    (0..levels)
        .into_par_iter()
        .map(|n| Ok(wkb_energy_estimate(&b.spec, &b.pair, n)? - wkb_energy_estimate(&a.spec, &a.pair, n)?))
        .collect()
}

/// Spectra along a parameter grid, started at the grid point nearest zero
/// and continued outward in both directions. Branches keep their identity
/// along the grid; each point is sorted by `|E|` only on output.
fn continuation<F>(grid: &[f64], n_max: usize, make_problem: F) -> Result<Vec<Vec<EigenvalueRecord>>>
where
    F: Fn(f64) -> Result<ShootingProblem> + Sync,
{
    if grid.is_empty() {
        return Err(Error::InvalidInput("empty parameter grid".into()));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidInput("parameter grid must be strictly increasing".into()));
    }
    let start = (0..grid.len())
        .min_by(|&a, &b| grid[a].abs().partial_cmp(&grid[b].abs()).unwrap())
        .unwrap();
    let mut out: Vec<Option<Vec<EigenvalueRecord>>> = vec![None; grid.len()];
    out[start] = Some(find_eigenvalues(&make_problem(grid[start])?, n_max)?);

    for direction in [1isize, -1] {
        let mut k = start as isize + direction;
        while k >= 0 && (k as usize) < grid.len() {
            let cur = k as usize;
            let prev = (k - direction) as usize;
            let prev_records = out[prev].as_ref().unwrap();
            let before = k - 2 * direction;
            let dp = grid[cur] - grid[prev];
            let steps: Vec<Complex64> = match usize::try_from(before).ok().and_then(|b| out.get(b)?.as_ref()) {
                Some(older) => {
                    let ratio = dp / (grid[prev] - grid[before as usize]);
                    prev_records
                        .iter()
                        .zip(older)
                        .map(|(p, o)| {
                            if p.converged && o.converged {
                                (p.energy - o.energy) * ratio
                            } else {
                                Complex64::new(0.0, 0.0)
                            }
                        })
                        .collect()
                }
                None => wkb_shifts(&make_problem, grid[prev], grid[cur], prev_records.len())
                    .unwrap_or_else(|_| vec![Complex64::new(0.0, 0.0); prev_records.len()]),
            };
            let predictions: Vec<Complex64> = prev_records
                .iter()
                .zip(&steps)
                .map(|(r, s)| r.energy + s)
                .collect();
            let lost: Vec<bool> = prev_records.iter().map(|r| !r.converged).collect();
            out[cur] = Some(continue_levels(&make_problem, grid[cur], &predictions, &steps, &lost)?);
            k += direction;
        }
    }
    Ok(out.into_iter().map(|r| sorted_by_modulus(r.unwrap())).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumScan {
    pub include_harmonic: bool,
    pub epsilon_grid: Vec<f64>,
    pub records: Vec<Vec<EigenvalueRecord>>,
    pub reality_flags: Vec<Vec<bool>>,
}

fn deformed(epsilon: f64, include_harmonic: bool) -> PotentialSpec {
    PotentialSpec::DeformedMonomial {
        epsilon,
        include_harmonic,
        conjugate: false,
    }
}

/// The PT-pair spectrum of `p² + [x²] + x²(ix)^ε` along a grid of ε.
pub fn scan_epsilon(include_harmonic: bool, epsilon_grid: &[f64], n_max: usize) -> Result<SpectrumScan> {
    if epsilon_grid.iter().any(|&e| !(e > -1.0 && e <= 4.0)) {
        return Err(Error::InvalidInput("epsilon grid must lie in (-1, 4]".into()));
    }
    let records = continuation(epsilon_grid, n_max, |eps| ShootingProblem::pt(deformed(eps, include_harmonic)))?;
    let reality_flags = records
        .iter()
        .map(|rs| rs.iter().map(EigenvalueRecord::is_real).collect())
        .collect();
    Ok(SpectrumScan {
        include_harmonic,
        epsilon_grid: epsilon_grid.to_vec(),
        records,
        reality_flags,
    })
}

/// Spectra of `x² + e^{iθ} x⁴` on the pair centred at `-θ/6` and `π - θ/6`.
pub fn scan_theta(theta_grid: &[f64], n_max: usize) -> Result<Vec<Vec<EigenvalueRecord>>> {
    continuation(theta_grid, n_max, |theta| {
        ShootingProblem::pt(PotentialSpec::RotatedQuartic { theta })
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PtTransition {
    pub epsilon_star: f64,
    pub lower_index: usize,
}

fn is_conjugate_pair(a: &EigenvalueRecord, b: &EigenvalueRecord) -> bool {
    !a.is_real() && !b.is_real() && same_root(a.energy, b.energy.conj())
}

fn real_and_distinct(a: &EigenvalueRecord, b: &EigenvalueRecord) -> bool {
    a.is_real() && b.is_real() && !same_root(a.energy, b.energy)
}

/// Values of ε where levels `n` and `n + 1` merge into a conjugate pair,
/// refined by bisection between the last real grid point and the first
/// complex one.
pub fn detect_pt_transition(scan: &SpectrumScan) -> Result<Vec<PtTransition>> {
    let grid = &scan.epsilon_grid;
    let levels = scan.records.first().map_or(0, |r| r.len());
    let mut events = Vec::new();
    for n in 0..levels.saturating_sub(1) {
        for k in 0..grid.len().saturating_sub(1) {
            let (a, b) = (&scan.records[k], &scan.records[k + 1]);
            if !(a[n].converged && a[n + 1].converged && b[n].converged && b[n + 1].converged) {
                continue;
            }
            let (mut real_side, mut complex_side, mut seeds) =
                if real_and_distinct(&a[n], &a[n + 1]) && is_conjugate_pair(&b[n], &b[n + 1]) {
                    (grid[k], grid[k + 1], (a[n].energy, a[n + 1].energy))
                } else if real_and_distinct(&b[n], &b[n + 1]) && is_conjugate_pair(&a[n], &a[n + 1]) {
                    (grid[k + 1], grid[k], (b[n].energy, b[n + 1].energy))
                } else {
                    continue;
                };
            for _ in 0..20 {
                let mid = 0.5 * (real_side + complex_side);
                let problem = ShootingProblem::pt(deformed(mid, scan.include_harmonic))?;
                let spacing = (seeds.1 - seeds.0).norm();
                let gap = (seeds.1 - seeds.0) * 0.1;
                let lower = secant_limited(&problem, seeds.0, seeds.0 - gap, 0.5 * spacing, MAX_SECANT_ITERATIONS);
                let upper = secant_limited(&problem, seeds.1, seeds.1 + gap, 0.5 * spacing, MAX_SECANT_ITERATIONS);
                let split = match (lower, upper) {
                    (Ok((l, _)), Ok((u, _))) => {
                        let real = |e: Complex64| e.im.abs() <= REALITY_TOL * e.norm().max(1.0);
                        // Both roots must stay on their own branch.
                        let near = (l - seeds.0).norm() < spacing && (u - seeds.1).norm() < spacing;
                        (real(l) && real(u) && !same_root(l, u) && near).then_some((l, u))
                    }
                    _ => None,
                };
                match split {
                    Some(pair) => {
                        real_side = mid;
                        seeds = pair;
                    }
                    None => complex_side = mid,
                }
            }
            events.push(PtTransition {
                epsilon_star: 0.5 * (real_side + complex_side),
                lower_index: n,
            });
        }
    }
    events.sort_by(|a, b| b.epsilon_star.partial_cmp(&a.epsilon_star).unwrap());
    Ok(events)
}

pub type PhaseSpectra = BTreeMap<String, Result<Vec<EigenvalueRecord>>>;

/// Spectrum of every given sector pair; failures are kept per pair.
pub fn phase_spectra(spec: &PotentialSpec, pairs: &[SectorPair], n_max: usize) -> PhaseSpectra {
    pairs
        .par_iter()
        .map(|pair| {
            let result = ShootingProblem::new(*spec, pair.clone()).and_then(|p| find_eigenvalues(&p, n_max));
            (pair.label(), result)
        })
        .collect()
}

/// `Σ E_n` over the five phases of `p² + ix³`.
pub fn phase_sum_rule(n: usize) -> Result<Complex64> {
    let spec = PotentialSpec::cubic();
    let pairs = enumerate_sector_pairs(&spec)?;
    let spectra = phase_spectra(&spec, &pairs, n);
    let mut sum = Complex64::new(0.0, 0.0);
    for (_, records) in spectra {
        sum += records?[n].energy;
    }
    Ok(sum)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WavefunctionSample {
    /// Signed arc length from the match point: negative on the left arm.
    pub r: Vec<f64>,
    pub points: Vec<Complex64>,
    pub psi: Vec<Complex64>,
    pub energy: Complex64,
}

/// Largest normalized Wronskian accepted by [`wavefunction_samples`].
pub const EIGENVALUE_ACCEPT: f64 = 1e-6;

/// `ψ` along both rays, scaled so that `ψ = 1` at the match point, or
/// `ψ' = 1` there when `ψ` vanishes (odd states).
pub fn wavefunction_samples(problem: &ShootingProblem, energy: Complex64) -> Result<WavefunctionSample> {
    problem.validate()?;
    let shot = shoot(problem, energy)?;
    let residual = shot.normalized().norm();
    if residual > EIGENVALUE_ACCEPT.max(problem.root_tol) {
        return Err(Error::NotAnEigenvalue { energy, residual });
    }
    let contour = problem.contour(energy);
    let mut left = Vec::new();
    let mut right = Vec::new();
    let yl = shoot_arm(problem, energy, &contour.left, Some(&mut left))?.y;
    let yr = shoot_arm(problem, energy, &contour.right, Some(&mut right))?.y;
    let use_value = yl[0].norm() >= 1e-6 * yl[1].norm();
    let (sl, sr) = if use_value { (yl[0], yr[0]) } else { (yl[1], yr[1]) };

    let mut sample = WavefunctionSample {
        r: Vec::new(),
        points: Vec::new(),
        psi: Vec::new(),
        energy,
    };
    let arc = |points: &[(Complex64, Complex64)]| -> Vec<f64> {
        let mut to_end = vec![0.0; points.len()];
        for i in (0..points.len().saturating_sub(1)).rev() {
            to_end[i] = to_end[i + 1] + (points[i + 1].0 - points[i].0).norm();
        }
        to_end
    };
    for ((x, psi), d) in left.iter().zip(arc(&left)) {
        sample.r.push(-d);
        sample.points.push(*x);
        sample.psi.push(psi / sl);
    }
    let right_arc = arc(&right);
    for ((x, psi), d) in right.iter().zip(right_arc).rev().skip(1) {
        sample.r.push(d);
        sample.points.push(*x);
        sample.psi.push(psi / sr);
    }
    Ok(sample)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::sector_pair_by_label;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn harmonic_mismatch() {
        let problem = ShootingProblem::pt(PotentialSpec::harmonic()).unwrap();
        assert!(wronskian_mismatch(&problem, c(1.0, 0.0)).unwrap().norm() <= problem.root_tol);
        assert!(wronskian_mismatch(&problem, c(2.0, 0.0)).unwrap().norm() >= 10.0 * problem.root_tol);
    }

    #[test]
    fn harmonic_levels() {
        let problem = ShootingProblem::pt(PotentialSpec::harmonic()).unwrap();
        let records = find_eigenvalues(&problem, 3).unwrap();
        for (n, r) in records.iter().enumerate() {
            assert_eq!(r.index, n);
            assert!((r.energy - c((2 * n + 1) as f64, 0.0)).norm() < 1e-8, "{r:?}");
        }
    }

    #[test]
    fn cubic_ground_state() {
        let problem = ShootingProblem::pt(PotentialSpec::cubic()).unwrap();
        assert!(wronskian_mismatch(&problem, c(1.15627, 0.0)).unwrap().norm() < 1e-4);
        assert!(wronskian_mismatch(&problem, c(1.156267072, 0.0)).unwrap().norm() < 1e-8);
        let records = find_eigenvalues(&problem, 0).unwrap();
        assert!((records[0].energy - c(1.156267072, 0.0)).norm() < 1e-8);
    }

    #[test]
    fn sextic_imaginary_axis_pair_is_negative() {
        let spec = PotentialSpec::sextic();
        let problem = ShootingProblem::new(spec, sector_pair_by_label(&spec, "CG").unwrap()).unwrap();
        let records = find_eigenvalues(&problem, 2).unwrap();
        for (r, want) in records.iter().zip([-1.145, -4.339, -9.073]) {
            assert!((r.energy - c(want, 0.0)).norm() < 5e-3, "{r:?}");
        }
    }

    #[test]
    fn harmonic_wavefunction_is_gaussian() {
        let problem = ShootingProblem::pt(PotentialSpec::harmonic()).unwrap();
        let sample = wavefunction_samples(&problem, c(1.0, 0.0)).unwrap();
        let mut last = f64::INFINITY;
        for (x, psi) in sample.points.iter().zip(&sample.psi) {
            assert!(x.im.abs() < 1e-9);
            if x.re > 2.0 {
                assert!(psi.norm() < last * (1.0 + 1e-12));
                last = psi.norm();
            }
            if x.re.abs() < 4.0 {
                let expected = (0.5 - x.re * x.re / 2.0).exp();
                assert!((psi.norm() - expected).abs() <= 1e-6 * expected, "x = {x}");
            }
        }
        assert!(wavefunction_samples(&problem, c(2.0, 0.0)).is_err());
    }

    #[test]
    fn grid_must_increase() {
        assert!(scan_epsilon(false, &[0.1, 0.0], 1).is_err());
        assert!(scan_epsilon(false, &[-1.0, 0.0], 1).is_err());
    }

    #[test]
    fn mirror_pair_conjugates() {
        let spec = PotentialSpec::cubic();
        let ac = ShootingProblem::new(spec, sector_pair_by_label(&spec, "AC").unwrap()).unwrap();
        let bd = ShootingProblem::new(spec, sector_pair_by_label(&spec, "BD").unwrap()).unwrap();
        let a = find_eigenvalues(&ac, 1).unwrap();
        let b = find_eigenvalues(&bd, 1).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x.energy - y.energy.conj()).norm() < 1e-8 * x.energy.norm());
        }
    }
}

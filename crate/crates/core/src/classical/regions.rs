//! Which turning-point pair a complex-energy trajectory is winding around,
//! and for how long.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{integrate, momentum_for_energy, IntegratorConfig, PhasePoint, Trajectory};
use crate::error::{Error, Result};
use crate::potentials::{turning_points, wrap_angle, PotentialSpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionVisit {
    /// Index into [`region_anchors`], ordered from the top of the plane down.
    pub region_id: usize,
    pub t_enter: f64,
    pub t_exit: f64,
    pub windings: usize,
}

/// Centroids of the left-right mirror pairs `(x, -x*)` of turning points at
/// `Re E`, sorted by decreasing imaginary part.
pub fn region_anchors(spec: &PotentialSpec, energy: Complex64) -> Result<Vec<Complex64>> {
    let tps = turning_points(spec, Complex64::new(energy.re, 0.0))?;
    let tol = 1e-8 * tps.iter().map(|x| x.norm()).fold(1.0, f64::max);
    let mut anchors: Vec<Complex64> = Vec::new();
    for (i, &x) in tps.iter().enumerate() {
        if x.re <= tol {
            continue;
        }
        let mirror = -x.conj();
        if tps.iter().enumerate().any(|(j, y)| j != i && (y - mirror).norm() <= tol) {
            anchors.push(Complex64::new(0.0, x.im));
        }
    }
    if anchors.is_empty() {
        return Err(Error::InvalidInput(
            "no left-right symmetric turning-point pairs to anchor regions".into(),
        ));
    }
    anchors.sort_by(|a, b| b.im.partial_cmp(&a.im).unwrap());
    anchors.dedup_by(|a, b| (*a - *b).norm() <= tol);
    Ok(anchors)
}

/// `"upper"`, `"middle"` and `"lower"` for three regions, otherwise the index.
pub fn region_name(region_id: usize, count: usize) -> String {
    match (count, region_id) {
        (1, 0) => "middle".into(),
        (2, 0) => "upper".into(),
        (2, 1) => "lower".into(),
        (3, 0) => "upper".into(),
        (3, 1) => "middle".into(),
        (3, 2) => "lower".into(),
        _ => format!("region{region_id}"),
    }
}

/// Splits the path into loops: a loop ends as soon as the accumulated angle
/// around some anchor reaches a full turn, and is credited to that anchor.
/// Consecutive loops around the same anchor form one visit. A trailing
/// stretch that completes no loop is attached to the last visit.
pub fn classify_regions(traj: &Trajectory, spec: &PotentialSpec) -> Result<Vec<RegionVisit>> {
    let anchors = region_anchors(spec, traj.energy)?;
    let samples = &traj.samples;
    let mut visits: Vec<RegionVisit> = Vec::new();
    let mut accumulated = vec![0.0; anchors.len()];
    let mut loop_start = samples[0].t;
    for w in samples.windows(2) {
        for (acc, a) in accumulated.iter_mut().zip(&anchors) {
            *acc += wrap_angle((w[1].x - a).arg() - (w[0].x - a).arg());
        }
        if let Some(j) = accumulated.iter().position(|acc| acc.abs() >= 2.0 * PI) {
            match visits.last_mut() {
                Some(v) if v.region_id == j => {
                    v.t_exit = w[1].t;
                    v.windings += 1;
                }
                _ => visits.push(RegionVisit {
                    region_id: j,
                    t_enter: loop_start,
                    t_exit: w[1].t,
                    windings: 1,
                }),
            }
            loop_start = w[1].t;
            accumulated.iter_mut().for_each(|acc| *acc = 0.0);
        }
    }
    if let Some(v) = visits.last_mut() {
        v.t_exit = traj.last().t;
    }
    Ok(visits)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidenceEstimate {
    pub im_energy: f64,
    pub mean_residence: f64,
    /// Interior visits that entered the mean.
    pub visits: usize,
    /// Fewer than three complete visits were seen.
    pub low_confidence: bool,
}

/// Mean time spent per visit, for each energy. The first and last visits
/// are cut off by the time window and are left out.
pub fn residence_statistics(
    spec: &PotentialSpec,
    energies: &[Complex64],
    start: PhasePoint,
    config: IntegratorConfig,
) -> Result<Vec<ResidenceEstimate>> {
    if energies.is_empty() {
        return Err(Error::InvalidInput("no energies given".into()));
    }
    if let Some(e) = energies.iter().find(|e| e.im <= 0.0) {
        return Err(Error::InvalidInput(format!(
            "residence times need Im E > 0, got E = {e}"
        )));
    }
    energies
        .par_iter()
        .map(|&energy| {
            let p = momentum_for_energy(spec, start.x, energy)?;
            let traj = integrate(spec, PhasePoint { p, ..start }, config)?;
            let visits = classify_regions(&traj, spec)?;
            let interior: Vec<f64> = if visits.len() > 2 {
                visits[1..visits.len() - 1]
                    .iter()
                    .map(|v| v.t_exit - v.t_enter)
                    .collect()
            } else {
                Vec::new()
            };
            let mean = if interior.is_empty() {
                f64::NAN
            } else {
                interior.iter().sum::<f64>() / interior.len() as f64
            };
            Ok(ResidenceEstimate {
                im_energy: energy.im,
                mean_residence: mean,
                visits: interior.len(),
                low_confidence: interior.len() < 3,
            })
        })
        .collect()
}

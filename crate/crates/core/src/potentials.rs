//! Hamiltonian families `H = p² + V(x)` evaluated at complex `x`, together
//! with the Stokes-sector geometry of their eigenvalue problems.
//!
//! Three families are supported:
//!
//! * `DeformedMonomial`: `V = [x²] + x²(±ix)^ε`, the ε-deformation of the
//!   harmonic oscillator. `(ix)^ε` uses the principal logarithm, so for
//!   non-integer ε its cut lies on the positive imaginary axis (negative
//!   imaginary axis for the `(-ix)^ε` variant).
//! * `RotatedQuartic`: `V = x² + e^{iθ} x⁴`.
//! * `PureMonomial`: `V = c xᴺ`.
//!
//! A Stokes sector is a wedge at `|x| → ∞` inside which the WKB solution
//! `exp(-∫√V)` decays. For a leading term `c x^N` there are `N + 2` sectors
//! of opening `2π/(N+2)` centred at `(2kπ - arg c)/(N+2)`.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::Polynomial;

/// Tolerance used when comparing sector angles.
pub const ANGLE_TOL: f64 = 1e-9;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// A Hamiltonian family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialSpec {
    /// `V = [x²] + x²(ix)^ε`, or `x²(-ix)^ε` when `conjugate` is set.
    DeformedMonomial {
        epsilon: f64,
        include_harmonic: bool,
        conjugate: bool,
    },
    /// `V = x² + e^{iθ} x⁴`.
    RotatedQuartic { theta: f64 },
    /// `V = c x^degree`.
    PureMonomial { degree: u32, coefficient: Complex64 },
}

impl PotentialSpec {
    /// `p² + x²(ix)^ε`.
    pub fn deformed(epsilon: f64) -> Self {
        PotentialSpec::DeformedMonomial {
            epsilon,
            include_harmonic: false,
            conjugate: false,
        }
    }

    /// `p² + x²`.
    pub fn harmonic() -> Self {
        Self::deformed(0.0)
    }

    /// `p² + ix³`.
    pub fn cubic() -> Self {
        Self::deformed(1.0)
    }

    /// `p² + x⁶`.
    pub fn sextic() -> Self {
        PotentialSpec::PureMonomial {
            degree: 6,
            coefficient: Complex64::new(1.0, 0.0),
        }
    }

    /// `p² - x⁴`.
    pub fn inverted_quartic() -> Self {
        PotentialSpec::PureMonomial {
            degree: 4,
            coefficient: Complex64::new(-1.0, 0.0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            PotentialSpec::DeformedMonomial { epsilon, .. } => {
                if !epsilon.is_finite() || epsilon <= -2.0 {
                    return Err(Error::InvalidPotential(format!(
                        "epsilon must be finite and > -2, got {epsilon}"
                    )));
                }
            }
            PotentialSpec::RotatedQuartic { theta } => {
                if !theta.is_finite() {
                    return Err(Error::InvalidPotential("theta must be finite".into()));
                }
            }
            PotentialSpec::PureMonomial {
                degree,
                coefficient,
            } => {
                if degree < 2 {
                    return Err(Error::InvalidPotential(format!(
                        "monomial degree must be >= 2, got {degree}"
                    )));
                }
                if coefficient.norm() == 0.0 || !coefficient.is_finite() {
                    return Err(Error::InvalidPotential(
                        "monomial coefficient must be finite and non-zero".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Leading behaviour `c x^N` as `(N, c)`, on the sheet where the sectors
    /// connected to the harmonic oscillator live.
    pub fn asymptotic(&self) -> (f64, Complex64) {
        match *self {
            PotentialSpec::DeformedMonomial {
                epsilon, conjugate, ..
            } => {
                let sign = if conjugate { -1.0 } else { 1.0 };
                (2.0 + epsilon, Complex64::from_polar(1.0, sign * PI * epsilon / 2.0))
            }
            PotentialSpec::RotatedQuartic { theta } => (4.0, Complex64::from_polar(1.0, theta)),
            PotentialSpec::PureMonomial {
                degree,
                coefficient,
            } => (degree as f64, coefficient),
        }
    }

    /// Phase of the leading coefficient, not reduced to (-π, π] for the
    /// deformed family so that sectors move continuously with ε.
    pub fn asymptotic_phase(&self) -> f64 {
        match *self {
            PotentialSpec::DeformedMonomial {
                epsilon, conjugate, ..
            } => {
                let sign = if conjugate { -1.0 } else { 1.0 };
                sign * PI * epsilon / 2.0
            }
            _ => self.asymptotic().1.arg(),
        }
    }

    /// `Some(N)` when the asymptotic degree is an integer.
    pub fn integer_degree(&self) -> Option<u32> {
        let (n, _) = self.asymptotic();
        if n.fract() == 0.0 && n > 0.0 {
            Some(n as u32)
        } else {
            None
        }
    }

    /// Integer ε of a deformed monomial, if it is one.
    fn integer_epsilon(&self) -> Option<i32> {
        match *self {
            PotentialSpec::DeformedMonomial { epsilon, .. } if epsilon.fract() == 0.0 => {
                Some(epsilon as i32)
            }
            _ => None,
        }
    }

    /// Direction of the branch-cut ray from the origin, if `V` has one.
    pub fn branch_cut(&self) -> Option<Complex64> {
        match *self {
            PotentialSpec::DeformedMonomial { conjugate, .. } if self.integer_epsilon().is_none() => {
                Some(if conjugate { -I } else { I })
            }
            _ => None,
        }
    }

    /// True when the segment from `a` to `b` crosses or touches the branch cut.
    pub fn segment_crosses_cut(&self, a: Complex64, b: Complex64) -> bool {
        let Some(dir) = self.branch_cut() else { return false };
        // Rotate so the cut lies on the positive real axis.
        let (a, b) = (a / dir, b / dir);
        if (a.im > 0.0) == (b.im > 0.0) && a.im != 0.0 && b.im != 0.0 {
            return false;
        }
        if a.im == b.im {
            return a.re >= 0.0 || b.re >= 0.0;
        }
        let t = a.im / (a.im - b.im);
        a.re + (b.re - a.re) * t >= 0.0
    }

    /// True when `V(-x*) = V(x)*`.
    pub fn is_pt_symmetric(&self) -> bool {
        match *self {
            PotentialSpec::DeformedMonomial { .. } => true,
            PotentialSpec::RotatedQuartic { theta } => theta.sin().abs() < 1e-15,
            PotentialSpec::PureMonomial {
                degree,
                coefficient,
            } => {
                // c (-x*)^N = (c x^N)* requires c* = (-1)^N c.
                let parity = if degree % 2 == 0 { 1.0 } else { -1.0 };
                (coefficient.conj() - coefficient * parity).norm() < 1e-15 * coefficient.norm()
            }
        }
    }

    /// Explicit polynomial coefficients when `V` is a polynomial.
    pub fn polynomial(&self) -> Option<Polynomial> {
        let zero = Complex64::new(0.0, 0.0);
        match *self {
            PotentialSpec::DeformedMonomial {
                include_harmonic,
                conjugate,
                ..
            } => {
                let k = self.integer_epsilon()?;
                let degree = (2 + k) as usize;
                let sign = if conjugate { -1.0 } else { 1.0 };
                let mut coeffs = vec![zero; degree.max(2) + 1];
                coeffs[degree] += (I * sign).powi(k);
                if include_harmonic {
                    coeffs[2] += 1.0;
                }
                Some(Polynomial::new(coeffs))
            }
            PotentialSpec::RotatedQuartic { theta } => Some(Polynomial::new(vec![
                zero,
                zero,
                Complex64::new(1.0, 0.0),
                zero,
                Complex64::from_polar(1.0, theta),
            ])),
            PotentialSpec::PureMonomial {
                degree,
                coefficient,
            } => {
                let mut coeffs = vec![zero; degree as usize + 1];
                coeffs[degree as usize] = coefficient;
                Some(Polynomial::new(coeffs))
            }
        }
    }
}

impl fmt::Display for PotentialSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            PotentialSpec::DeformedMonomial {
                epsilon,
                include_harmonic,
                conjugate,
            } => {
                let harmonic = if include_harmonic { "x^2 + " } else { "" };
                let sign = if conjugate { "-" } else { "" };
                write!(f, "{harmonic}x^2({sign}ix)^{epsilon}")
            }
            PotentialSpec::RotatedQuartic { theta } => write!(f, "x^2 + e^(i{theta}) x^4"),
            PotentialSpec::PureMonomial {
                degree,
                coefficient,
            } => write!(f, "({coefficient}) x^{degree}"),
        }
    }
}

/// `(±ix)^ε` on the principal branch. `x = 0` is allowed for ε > 0.
fn deformation_factor(x: Complex64, epsilon: f64, conjugate: bool) -> Result<Complex64> {
    let sign = if conjugate { -1.0 } else { 1.0 };
    let w = I * x * sign;
    if w.im == 0.0 && w.re < 0.0 {
        return Err(Error::BranchCut { x });
    }
    if w.norm() == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    Ok((w.ln() * epsilon).exp())
}

/// `V(x)` for the selected family.
pub fn eval_potential(spec: &PotentialSpec, x: Complex64) -> Result<Complex64> {
    match *spec {
        PotentialSpec::DeformedMonomial {
            epsilon,
            include_harmonic,
            conjugate,
        } => {
            let x2 = x * x;
            let deformed = match spec.integer_epsilon() {
                Some(k) => {
                    let sign = if conjugate { -1.0 } else { 1.0 };
                    x.powi(2 + k) * (I * sign).powi(k)
                }
                None => x2 * deformation_factor(x, epsilon, conjugate)?,
            };
            Ok(if include_harmonic { x2 + deformed } else { deformed })
        }
        PotentialSpec::RotatedQuartic { theta } => {
            let x2 = x * x;
            Ok(x2 + Complex64::from_polar(1.0, theta) * x2 * x2)
        }
        PotentialSpec::PureMonomial {
            degree,
            coefficient,
        } => Ok(coefficient * x.powu(degree)),
    }
}

/// The force `-V'(x)`.
pub fn eval_force(spec: &PotentialSpec, x: Complex64) -> Result<Complex64> {
    let derivative = match *spec {
        PotentialSpec::DeformedMonomial {
            epsilon,
            include_harmonic,
            conjugate,
        } => {
            let deformed = match spec.integer_epsilon() {
                Some(k) => {
                    let sign = if conjugate { -1.0 } else { 1.0 };
                    (I * sign).powi(k) * x.powi(1 + k) * (2 + k) as f64
                }
                None => x * deformation_factor(x, epsilon, conjugate)? * (2.0 + epsilon),
            };
            if include_harmonic {
                deformed + x * 2.0
            } else {
                deformed
            }
        }
        PotentialSpec::RotatedQuartic { theta } => {
            x * 2.0 + Complex64::from_polar(4.0, theta) * x * x * x
        }
        PotentialSpec::PureMonomial {
            degree,
            coefficient,
        } => coefficient * x.powu(degree - 1) * degree as f64,
    };
    Ok(-derivative)
}

/// Map an angle into `(-π, π]`.
pub fn wrap_angle(theta: f64) -> f64 {
    let mut a = theta.rem_euclid(2.0 * PI);
    if a > PI {
        a -= 2.0 * PI;
    }
    a
}

/// Absolute angular distance on the circle.
pub fn angle_distance(a: f64, b: f64) -> f64 {
    wrap_angle(a - b).abs()
}

/// A wedge at infinity in which solutions may decay.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StokesSector {
    pub center_angle: f64,
    pub opening: f64,
    pub label: String,
}

impl StokesSector {
    pub fn new(center_angle: f64, opening: f64, label: impl Into<String>) -> Result<Self> {
        if !(opening > 0.0 && opening <= PI + ANGLE_TOL) {
            return Err(Error::InvalidInput(format!(
                "sector opening must lie in (0, π], got {opening}"
            )));
        }
        Ok(StokesSector {
            center_angle: wrap_angle(center_angle),
            opening,
            label: label.into(),
        })
    }

    /// `(lower, upper)` edge angles; not wrapped.
    pub fn edges(&self) -> (f64, f64) {
        (
            self.center_angle - self.opening / 2.0,
            self.center_angle + self.opening / 2.0,
        )
    }

    pub fn contains(&self, angle: f64) -> bool {
        angle_distance(angle, self.center_angle) < self.opening / 2.0
    }
}

/// Two non-contiguous sectors; one eigenvalue problem, one "phase".
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectorPair {
    pub left: StokesSector,
    pub right: StokesSector,
    pub pt_symmetric: bool,
}

impl SectorPair {
    /// Orders the two sectors so that `right` is the one nearer the positive
    /// real axis (ties go to the lower one) and computes the PT flag.
    pub fn new(a: StokesSector, b: StokesSector) -> Result<Self> {
        let separation = angle_distance(a.center_angle, b.center_angle);
        let contact = (a.opening + b.opening) / 2.0;
        if separation <= contact + ANGLE_TOL {
            return Err(Error::InvalidInput(format!(
                "sectors {} and {} are contiguous",
                a.label, b.label
            )));
        }
        let (ca, cb) = (a.center_angle.cos(), b.center_angle.cos());
        let a_is_right = if (ca - cb).abs() > 1e-12 {
            ca > cb
        } else {
            a.center_angle < b.center_angle
        };
        let (right, left) = if a_is_right { (a, b) } else { (b, a) };
        let pt_symmetric = angle_distance(PI - right.center_angle, left.center_angle) <= ANGLE_TOL;
        Ok(SectorPair {
            left,
            right,
            pt_symmetric,
        })
    }

    /// Reflection across the real axis maps one sector onto the other.
    pub fn up_down_symmetric(&self) -> bool {
        angle_distance(-self.right.center_angle, self.left.center_angle) <= ANGLE_TOL
            && angle_distance(self.right.center_angle, self.left.center_angle) > ANGLE_TOL
            && angle_distance(self.right.center_angle, 0.0) > ANGLE_TOL
    }

    /// Sector labels in alphabetical order, e.g. `"AD"`.
    pub fn label(&self) -> String {
        let (a, b) = (&self.left.label, &self.right.label);
        if a <= b {
            format!("{a}{b}")
        } else {
            format!("{b}{a}")
        }
    }

    /// The pair reflected across the imaginary axis (`θ ↦ π - θ`).
    pub fn pt_mirror(&self, sectors: &[StokesSector]) -> Result<SectorPair> {
        let find = |angle: f64| -> Result<StokesSector> {
            sectors
                .iter()
                .find(|s| angle_distance(s.center_angle, angle) <= 1e-7)
                .cloned()
                .ok_or_else(|| Error::InvalidInput(format!("no sector centred at {angle}")))
        };
        SectorPair::new(
            find(PI - self.left.center_angle)?,
            find(PI - self.right.center_angle)?,
        )
    }
}

fn sector_letter(index: usize) -> String {
    let letter = (b'A' + (index % 26) as u8) as char;
    if index < 26 {
        letter.to_string()
    } else {
        format!("{letter}{}", index / 26)
    }
}

/// Stokes sectors of `spec`.
///
/// For integer asymptotic degree all `N + 2` sectors are returned, labelled
/// `A, B, ...` counter-clockwise from the sector nearest the positive real
/// axis (on a tie, the one below it). For non-integer degree only the three
/// sectors reachable from the harmonic pair are returned, labelled `R`, `M`
/// and `L` (right, middle, left).
pub fn stokes_sectors(spec: &PotentialSpec) -> Result<Vec<StokesSector>> {
    spec.validate()?;
    let (n, _) = spec.asymptotic();
    let phase = spec.asymptotic_phase();
    let count = n + 2.0;
    let opening = 2.0 * PI / count;
    let center = |k: f64| (2.0 * k * PI - phase) / count;

    match spec.integer_degree() {
        Some(degree) => {
            let total = degree as usize + 2;
            let mut centers: Vec<f64> = (0..total).map(|k| wrap_angle(center(k as f64))).collect();
            // Start at the sector nearest the positive real axis, lower one on ties.
            let start = centers
                .iter()
                .enumerate()
                .min_by(|(_, a), (_, b)| {
                    let (da, db) = (a.abs(), b.abs());
                    if (da - db).abs() <= ANGLE_TOL {
                        a.partial_cmp(b).unwrap()
                    } else {
                        da.partial_cmp(&db).unwrap()
                    }
                })
                .map(|(_, &a)| a)
                .unwrap_or(0.0);
            centers.sort_by(|a, b| {
                let ra = (a - start).rem_euclid(2.0 * PI);
                let rb = (b - start).rem_euclid(2.0 * PI);
                // values within ANGLE_TOL of a full turn belong at the start
                let ra = if 2.0 * PI - ra < ANGLE_TOL { 0.0 } else { ra };
                let rb = if 2.0 * PI - rb < ANGLE_TOL { 0.0 } else { rb };
                ra.partial_cmp(&rb).unwrap()
            });
            centers
                .into_iter()
                .enumerate()
                .map(|(i, theta)| StokesSector::new(theta, opening, sector_letter(i)))
                .collect()
        }
        None => {
            // Sectors k = 0, ∓1, ∓2: downward for (ix)^ε, upward for (-ix)^ε.
            let conjugate = matches!(spec, PotentialSpec::DeformedMonomial { conjugate: true, .. });
            let step = if conjugate { 1.0 } else { -1.0 };
            [(0.0, "R"), (step, "M"), (2.0 * step, "L")]
                .into_iter()
                .map(|(k, label)| StokesSector::new(wrap_angle(center(k)), opening, label))
                .collect()
        }
    }
}

fn find_sector(sectors: &[StokesSector], angle: f64) -> Result<StokesSector> {
    sectors
        .iter()
        .find(|s| angle_distance(s.center_angle, angle) <= 1e-7)
        .cloned()
        .ok_or_else(|| Error::InvalidInput(format!("no sector centred at {angle}")))
}

/// The sector pair continuously connected to the harmonic-oscillator pair.
pub fn pt_sector_pair(spec: &PotentialSpec) -> Result<SectorPair> {
    spec.validate()?;
    let sectors = stokes_sectors(spec)?;
    let (right, left) = match *spec {
        PotentialSpec::DeformedMonomial {
            epsilon, conjugate, ..
        } => {
            let shift = epsilon * PI / (2.0 * (epsilon + 4.0));
            let (r, l) = (-shift, -PI + shift);
            if conjugate {
                (-r, -l)
            } else {
                (r, l)
            }
        }
        PotentialSpec::RotatedQuartic { theta } => (-theta / 6.0, PI - theta / 6.0),
        PotentialSpec::PureMonomial { .. } => {
            return Err(Error::Unsupported(
                "pt_sector_pair requires a deformed monomial or rotated quartic; \
                 use enumerate_sector_pairs for pure monomials"
                    .into(),
            ))
        }
    };
    SectorPair::new(find_sector(&sectors, left)?, find_sector(&sectors, right)?)
}

/// All unordered non-contiguous sector pairs, sorted by label.
pub fn enumerate_sector_pairs(spec: &PotentialSpec) -> Result<Vec<SectorPair>> {
    if spec.integer_degree().is_none() {
        return Err(Error::Unsupported(
            "sector pairs are only enumerated for integer asymptotic degree".into(),
        ));
    }
    let sectors = stokes_sectors(spec)?;
    let mut pairs = Vec::new();
    for i in 0..sectors.len() {
        for j in (i + 1)..sectors.len() {
            if let Ok(pair) = SectorPair::new(sectors[i].clone(), sectors[j].clone()) {
                pairs.push(pair);
            }
        }
    }
    pairs.sort_by_key(|p| p.label());
    Ok(pairs)
}

/// Look up a pair by its alphabetical label, e.g. `"BD"`.
pub fn sector_pair_by_label(spec: &PotentialSpec, label: &str) -> Result<SectorPair> {
    let wanted: String = {
        let mut chars: Vec<char> = label.to_ascii_uppercase().chars().collect();
        chars.sort_unstable();
        chars.into_iter().collect()
    };
    enumerate_sector_pairs(spec)?
        .into_iter()
        .find(|p| p.label() == wanted)
        .ok_or_else(|| Error::InvalidInput(format!("no non-contiguous sector pair {label}")))
}

fn polish_root(spec: &PotentialSpec, energy: Complex64, mut x: Complex64) -> Option<Complex64> {
    for _ in 0..60 {
        let f = eval_potential(spec, x).ok()? - energy;
        let df = -eval_force(spec, x).ok()?;
        if df.norm() == 0.0 {
            return None;
        }
        let step = f / df;
        if !step.is_finite() {
            return None;
        }
        x -= step;
        if step.norm() <= 1e-15 * x.norm().max(1e-300) {
            break;
        }
    }
    x.is_finite().then_some(x)
}

/// All principal-sheet solutions of `V(x) = E`, sorted by argument.
pub fn turning_points(spec: &PotentialSpec, energy: Complex64) -> Result<Vec<Complex64>> {
    spec.validate()?;
    let scale = energy.norm().max(1.0);
    let mut roots: Vec<Complex64> = if let Some(poly) = spec.polynomial() {
        let mut coeffs = poly.coeffs().to_vec();
        coeffs[0] -= energy;
        Polynomial::new(coeffs).roots()
    } else {
        let PotentialSpec::DeformedMonomial {
            epsilon,
            include_harmonic,
            conjugate,
        } = *spec
        else {
            unreachable!("only deformed monomials are non-polynomial")
        };
        let n = 2.0 + epsilon;
        let sign = if conjugate { -1.0 } else { 1.0 };
        let radius = energy.norm().powf(1.0 / n);
        // Candidates from both sheets of Log(±ix); verified below.
        let mut candidates = Vec::new();
        for beta in [sign * PI / 2.0, sign * PI / 2.0 - sign * 2.0 * PI] {
            for k in -8..=8 {
                let phi = (energy.arg() + 2.0 * PI * k as f64 - epsilon * beta) / n;
                if phi > -PI && phi <= PI {
                    candidates.push(Complex64::from_polar(radius, phi));
                }
            }
        }
        if include_harmonic {
            candidates.push(energy.sqrt());
            candidates.push(-energy.sqrt());
            let half = (energy / 2.0).sqrt();
            candidates.push(half);
            candidates.push(-half);
        }
        candidates
            .into_iter()
            .filter_map(|x0| polish_root(spec, energy, x0))
            .collect()
    };

    // Polish, verify and deduplicate.
    let mut accepted: Vec<Complex64> = Vec::new();
    for x in roots.drain(..) {
        let x = polish_root(spec, energy, x).unwrap_or(x);
        let Ok(v) = eval_potential(spec, x) else {
            continue;
        };
        if (v - energy).norm() > 1e-10 * scale {
            continue;
        }
        if spec.polynomial().is_none()
            && accepted
                .iter()
                .any(|a| (a - x).norm() <= 1e-9 * x.norm().max(1.0))
        {
            continue;
        }
        accepted.push(x);
    }
    if accepted.is_empty() {
        return Err(Error::NoTurningPoints { energy });
    }
    for i in 0..accepted.len() {
        for j in (i + 1)..accepted.len() {
            let gap = (accepted[i] - accepted[j]).norm();
            if gap <= 1e-7 * accepted[i].norm().max(1.0) {
                return Err(Error::DegenerateTurningPoints { x: accepted[i] });
            }
        }
    }
    accepted.sort_by(|a, b| a.arg().partial_cmp(&b.arg()).unwrap());
    Ok(accepted)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn deg(rad: f64) -> f64 {
        rad.to_degrees()
    }

    #[test]
    fn potential_examples() {
        let quartic_deformed = PotentialSpec::deformed(2.0);
        assert!((eval_potential(&quartic_deformed, c(1.0, 0.0)).unwrap() - c(-1.0, 0.0)).norm() < 1e-15);
        let cubic = PotentialSpec::cubic();
        assert!((eval_potential(&cubic, c(1.0, 0.0)).unwrap() - c(0.0, 1.0)).norm() < 1e-15);
        let sextic = PotentialSpec::sextic();
        assert!((eval_potential(&sextic, c(0.0, 1.0)).unwrap() - c(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn force_examples() {
        let q = PotentialSpec::inverted_quartic();
        assert!((eval_force(&q, c(1.0, 0.0)).unwrap() - c(4.0, 0.0)).norm() < 1e-15);
        assert!((eval_force(&q, c(0.0, 1.0)).unwrap() - c(0.0, -4.0)).norm() < 1e-15);
        let h = PotentialSpec::harmonic();
        assert!((eval_force(&h, c(1.0, 0.0)).unwrap() - c(-2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn branch_cut_is_flagged_for_non_integer_epsilon() {
        let spec = PotentialSpec::deformed(0.5);
        assert!(matches!(
            eval_potential(&spec, c(0.0, 2.0)),
            Err(Error::BranchCut { .. })
        ));
        // Same point is fine for the conjugate family, whose cut is below.
        let conj = PotentialSpec::DeformedMonomial {
            epsilon: 0.5,
            include_harmonic: false,
            conjugate: true,
        };
        assert!(eval_potential(&conj, c(0.0, 2.0)).is_ok());
        assert!(matches!(
            eval_potential(&conj, c(0.0, -2.0)),
            Err(Error::BranchCut { .. })
        ));
        // Integer ε has no cut.
        assert!(eval_potential(&PotentialSpec::cubic(), c(0.0, 2.0)).is_ok());
    }

    #[test]
    fn segments_crossing_the_cut() {
        let spec = PotentialSpec::deformed(-0.5);
        assert!(spec.segment_crosses_cut(c(-1.0, 1.0), c(1.0, 1.0)));
        assert!(!spec.segment_crosses_cut(c(-1.0, -1.0), c(1.0, 0.5)));
        assert!(spec.segment_crosses_cut(c(-1.0, -1.0), c(1.0, 1.0)));
        assert!(!spec.segment_crosses_cut(c(-1.0, 1.0), c(-1.0, -1.0)));
        assert!(spec.segment_crosses_cut(c(0.0, 0.5), c(0.0, 3.0)));
        assert!(!PotentialSpec::cubic().segment_crosses_cut(c(-1.0, 1.0), c(1.0, 1.0)));
        let conj = PotentialSpec::DeformedMonomial {
            epsilon: -0.5,
            include_harmonic: false,
            conjugate: true,
        };
        assert!(!conj.segment_crosses_cut(c(-1.0, 1.0), c(1.0, 1.0)));
        assert!(conj.segment_crosses_cut(c(-1.0, -1.0), c(1.0, -1.0)));
    }

    #[test]
    fn invalid_specs_are_rejected() {
        assert!(PotentialSpec::deformed(-2.0).validate().is_err());
        let zero = PotentialSpec::PureMonomial {
            degree: 4,
            coefficient: c(0.0, 0.0),
        };
        assert!(zero.validate().is_err());
        assert!(stokes_sectors(&zero).is_err());
    }

    #[test]
    fn cubic_sectors() {
        let sectors = stokes_sectors(&PotentialSpec::cubic()).unwrap();
        assert_eq!(sectors.len(), 5);
        for s in &sectors {
            assert!((deg(s.opening) - 72.0).abs() < 1e-12);
        }
        assert_eq!(sectors[0].label, "A");
        assert!((deg(sectors[0].center_angle) + 18.0).abs() < 1e-12);
        let labels: Vec<_> = sectors.iter().map(|s| s.label.as_str()).collect();
        assert_eq!(labels, ["A", "B", "C", "D", "E"]);
    }

    #[test]
    fn sextic_sectors() {
        let sectors = stokes_sectors(&PotentialSpec::sextic()).unwrap();
        assert_eq!(sectors.len(), 8);
        for (k, s) in sectors.iter().enumerate() {
            assert!((deg(s.opening) - 45.0).abs() < 1e-12);
            let expected = wrap_angle((k as f64 * 45.0).to_radians());
            assert!(angle_distance(s.center_angle, expected) < 1e-12);
        }
    }

    #[test]
    fn harmonic_sectors() {
        let sectors = stokes_sectors(&PotentialSpec::harmonic()).unwrap();
        assert_eq!(sectors.len(), 4);
        assert!(sectors.iter().all(|s| (deg(s.opening) - 90.0).abs() < 1e-12));
        assert!(sectors.iter().any(|s| s.center_angle.abs() < 1e-12));
        assert!(sectors.iter().any(|s| (s.center_angle - PI).abs() < 1e-12));
    }

    #[test]
    fn pt_pair_examples() {
        let pair = pt_sector_pair(&PotentialSpec::deformed(2.0)).unwrap();
        assert!((deg(pair.right.center_angle) + 30.0).abs() < 1e-9);
        assert!((deg(pair.left.center_angle) + 150.0).abs() < 1e-9);
        assert!((deg(pair.right.opening) - 60.0).abs() < 1e-9);
        // upper edges on the real axis
        assert!(pair.right.edges().1.abs() < 1e-12);
        assert!(pair.pt_symmetric);

        let pair = pt_sector_pair(&PotentialSpec::harmonic()).unwrap();
        assert!(pair.right.center_angle.abs() < 1e-12);
        assert!((deg(pair.left.center_angle) - 180.0).abs() < 1e-9);
        assert!((deg(pair.left.opening) - 90.0).abs() < 1e-9);

        let rotated = PotentialSpec::RotatedQuartic { theta: PI };
        let pair = pt_sector_pair(&rotated).unwrap();
        let (lo, hi) = pair.right.edges();
        assert!((deg(lo) + 60.0).abs() < 1e-9);
        assert!(hi.abs() < 1e-12);
        assert!(!pair.pt_symmetric);
        assert!(pt_sector_pair(&PotentialSpec::RotatedQuartic { theta: 0.0 })
            .unwrap()
            .pt_symmetric);
    }

    #[test]
    fn conjugate_pair_is_mirror_image() {
        let conj = PotentialSpec::DeformedMonomial {
            epsilon: 1.3,
            include_harmonic: true,
            conjugate: true,
        };
        let plain = PotentialSpec::DeformedMonomial {
            epsilon: 1.3,
            include_harmonic: true,
            conjugate: false,
        };
        let a = pt_sector_pair(&conj).unwrap();
        let b = pt_sector_pair(&plain).unwrap();
        assert!((a.right.center_angle + b.right.center_angle).abs() < 1e-12);
        assert!((a.left.center_angle + b.left.center_angle).abs() < 1e-12);
        assert!(a.pt_symmetric);
    }

    #[test]
    fn pair_enumeration_counts() {
        let cubic = enumerate_sector_pairs(&PotentialSpec::cubic()).unwrap();
        let labels: Vec<_> = cubic.iter().map(|p| p.label()).collect();
        assert_eq!(labels, ["AC", "AD", "BD", "BE", "CE"]);
        let pt: Vec<_> = cubic.iter().filter(|p| p.pt_symmetric).map(|p| p.label()).collect();
        assert_eq!(pt, ["AD"]);

        let sextic = enumerate_sector_pairs(&PotentialSpec::sextic()).unwrap();
        assert_eq!(sextic.len(), 20);
        let mut pt: Vec<_> = sextic.iter().filter(|p| p.pt_symmetric).map(|p| p.label()).collect();
        pt.sort();
        assert_eq!(pt, ["AE", "BD", "FH"]);
        let mut ud: Vec<_> = sextic
            .iter()
            .filter(|p| p.up_down_symmetric())
            .map(|p| p.label())
            .collect();
        ud.sort();
        assert_eq!(ud, ["BH", "CG", "DF"]);

        assert_eq!(enumerate_sector_pairs(&PotentialSpec::harmonic()).unwrap().len(), 2);
        assert!(matches!(
            enumerate_sector_pairs(&PotentialSpec::deformed(0.5)),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn pair_count_formula() {
        for degree in 2..=9u32 {
            let spec = PotentialSpec::PureMonomial {
                degree,
                coefficient: c(1.0, 0.0),
            };
            let n = degree as usize;
            let expected = (n + 2) * (n + 1) / 2 - (n + 2);
            assert_eq!(enumerate_sector_pairs(&spec).unwrap().len(), expected);
        }
    }

    #[test]
    fn contiguous_pair_rejected() {
        let sectors = stokes_sectors(&PotentialSpec::cubic()).unwrap();
        assert!(SectorPair::new(sectors[0].clone(), sectors[1].clone()).is_err());
    }

    #[test]
    fn turning_point_examples() {
        let tps = turning_points(&PotentialSpec::inverted_quartic(), c(1.0, 0.0)).unwrap();
        let expected = [-3.0 * PI / 4.0, -PI / 4.0, PI / 4.0, 3.0 * PI / 4.0];
        assert_eq!(tps.len(), 4);
        for (tp, angle) in tps.iter().zip(expected) {
            assert!((tp - Complex64::from_polar(1.0, angle)).norm() < 1e-13);
        }

        let tps = turning_points(&PotentialSpec::sextic(), c(1.0, 0.0)).unwrap();
        assert_eq!(tps.len(), 6);
        assert!(tps.iter().all(|x| (x.powu(6) - 1.0).norm() < 1e-12));

        let tps = turning_points(&PotentialSpec::cubic(), c(1.0, 0.0)).unwrap();
        let expected = [-5.0 * PI / 6.0, -PI / 6.0, PI / 2.0];
        assert_eq!(tps.len(), 3);
        for (tp, angle) in tps.iter().zip(expected) {
            assert!((tp - Complex64::from_polar(1.0, angle)).norm() < 1e-13);
        }
    }

    #[test]
    fn turning_points_errors() {
        assert!(matches!(
            turning_points(&PotentialSpec::sextic(), c(0.0, 0.0)),
            Err(Error::DegenerateTurningPoints { .. })
        ));
    }

    #[test]
    fn non_integer_turning_points() {
        for &(eps, harmonic) in &[(0.5, false), (1.5, false), (-0.5, false), (0.7, true), (2.5, true)] {
            let spec = PotentialSpec::DeformedMonomial {
                epsilon: eps,
                include_harmonic: harmonic,
                conjugate: false,
            };
            let energy = c(3.0, 0.0);
            let tps = turning_points(&spec, energy).unwrap();
            assert!(tps.len() >= 2, "ε = {eps}: {tps:?}");
            for x in &tps {
                let v = eval_potential(&spec, *x).unwrap();
                assert!((v - energy).norm() <= 1e-10 * 3.0);
            }
            // PT-symmetric: the set is closed under x -> -x*
            for x in &tps {
                assert!(tps.iter().any(|y| (y + x.conj()).norm() < 1e-8), "ε = {eps}");
            }
        }
    }
}

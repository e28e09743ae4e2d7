//! Fixtures shared by the benchmarks.

use complex_spectra::{Complex64, IntegratorConfig, PhasePoint, PotentialSpec, ShootingProblem};

/// The PT problem of `p² + ix³`.
pub fn cubic_problem() -> ShootingProblem {
    ShootingProblem::pt(PotentialSpec::cubic()).expect("cubic PT pair exists")
}

/// Start and settings of the complex-energy sextic trajectory.
pub fn hopping_start() -> (PotentialSpec, PhasePoint, IntegratorConfig) {
    let spec = PotentialSpec::sextic();
    let start = PhasePoint::with_energy(&spec, Complex64::new(0.0, 1.167), Complex64::new(1.0, 0.2))
        .expect("start is off the branch cut");
    (spec, start, IntegratorConfig::default().with_t_max(31.42))
}

//! Classical and quantum phases of complex-deformed Hamiltonians
//! `H = p² + V(x)`: complex trajectories and periods, Stokes-sector
//! geometry, eigenvalues on sector-pair contours, and WKB estimates.

pub mod classical;
pub mod error;
pub mod io;
pub mod ode;
pub mod poly;
pub mod potentials;
pub mod quadrature;
pub mod spectral;
pub mod wkb;

pub use num_complex::Complex64;

pub use classical::{
    classify_regions, detect_closed_orbit, escape_time, integrate, inverse_riemann_sphere_projection,
    orbit_period_quadrature, residence_statistics, riemann_sphere_projection, self_intersects,
    trajectory_quadrature_period, IntegratorConfig,
    OrbitResult, PhasePoint, RegionVisit, ResidenceEstimate, SpherePoint, Termination, Trajectory,
};
pub use error::{Error, Result};
pub use potentials::{
    enumerate_sector_pairs, eval_force, eval_potential, pt_sector_pair, stokes_sectors, turning_points,
    PotentialSpec, SectorPair, StokesSector,
};
pub use spectral::{
    detect_pt_transition, find_eigenvalues, phase_spectra, phase_sum_rule, scan_epsilon, scan_theta,
    wavefunction_samples, wronskian_mismatch, EigenvalueRecord, PtTransition, ShootingProblem, Source,
    SpectrumScan, WavefunctionSample,
};
pub use wkb::{pt_hermitian_ratio, quantization_integral, wkb_energy_estimate, QuantizationResult, RatioSource};

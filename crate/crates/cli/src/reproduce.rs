//! Canned runs that write the data behind each figure.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use complex_spectra::io::{
    write_periods_csv, write_regions_csv, write_scan_csv, write_sectors_csv, write_sphere_csv,
    write_trajectory_csv, write_trajectory_jsonl, write_transitions_csv,
};
use complex_spectra::{
    classify_regions, detect_pt_transition, enumerate_sector_pairs, integrate, phase_spectra, scan_epsilon,
    self_intersects, stokes_sectors, Complex64, IntegratorConfig, PhasePoint, PotentialSpec, Trajectory,
};

use crate::args::{Figure, ReproduceArgs};
use crate::commands::{emit, measure_periods, region_names, scan_summary, write_phase_spectra, Report};
use crate::error::CliError;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn reproduce(a: &ReproduceArgs) -> Result<Report, CliError> {
    fs::create_dir_all(&a.out_dir)?;
    let dir = a.out_dir.as_path();
    let summary = match a.figure {
        Figure::Fig2 => fig2(dir)?,
        Figure::Fig5 => fig5(dir)?,
        Figure::Fig6 => sector_phases(dir, "fig6", PotentialSpec::cubic(), 3)?,
        Figure::Fig7 => sector_phases(dir, "fig7", PotentialSpec::sextic(), 4)?,
        Figure::Fig8 => fig8(dir)?,
        Figure::Fig9 => fig9(dir)?,
    };
    Ok(Report {
        summary,
        stdout_taken: false,
    })
}

/// Orbits of `-x⁴` at `E = 1`: nested loops about the upper and lower
/// turning-point pairs, and the degenerate orbit between two turning points.
fn fig2(dir: &Path) -> Result<String, CliError> {
    let spec = PotentialSpec::inverted_quartic();
    let energy = c(1.0, 0.0);
    let mut starts: Vec<Complex64> = [0.1, 0.3, 0.5, 0.9, 1.2, 2.0].iter().map(|&s| c(0.0, s)).collect();
    starts.extend([0.3, 0.9].iter().map(|&s| c(0.0, -s)));
    starts.push(Complex64::from_polar(1.0, PI / 4.0));
    let config = IntegratorConfig::default().with_t_max(2.0);
    let measured = measure_periods(&spec, energy, &starts, config, 1e-6)?;
    for (k, (_, traj)) in measured.iter().enumerate() {
        emit(Some(&dir.join(format!("fig2_orbit{k}.csv"))), |w| write_trajectory_csv(w, traj))?;
    }
    let rows: Vec<_> = measured.into_iter().map(|(r, _)| r).collect();
    emit(Some(&dir.join("fig2_periods.csv")), |w| write_periods_csv(w, &rows))?;
    let closed = rows.iter().filter(|r| r.closed).count();
    let spread = rows
        .iter()
        .map(|r| r.period)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p), hi.max(p)));
    Ok(format!(
        "fig2: {closed}/{} closed orbits, periods in [{}, {}]",
        rows.len(),
        spread.0,
        spread.1
    ))
}

/// Spectrum of `p² + x²(ix)^ε` for the first 21 levels.
fn fig5(dir: &Path) -> Result<String, CliError> {
    let grid: Vec<f64> = (0..100).map(|k| ((-0.95 + 0.05 * k as f64) * 1e12).round() / 1e12).collect();
    let scan = scan_epsilon(false, &grid, 20)?;
    let events = detect_pt_transition(&scan)?;
    emit(Some(&dir.join("fig5_scan.csv")), |w| write_scan_csv(w, &scan))?;
    emit(Some(&dir.join("fig5_transitions.csv")), |w| write_transitions_csv(w, &events))?;
    Ok(format!("fig5: {}; {} merges", scan_summary(&scan), events.len()))
}

/// Stokes sectors and the spectrum of every sector pair.
fn sector_phases(dir: &Path, name: &str, spec: PotentialSpec, nmax: usize) -> Result<String, CliError> {
    let sectors = stokes_sectors(&spec)?;
    emit(Some(&dir.join(format!("{name}_sectors.csv"))), |w| write_sectors_csv(w, &sectors))?;
    let pairs = enumerate_sector_pairs(&spec)?;
    let spectra = phase_spectra(&spec, &pairs, nmax);
    write_phase_spectra(Some(&dir.join(format!("{name}_spectra.csv"))), &spectra)?;
    let failed: Vec<&str> = spectra
        .iter()
        .filter(|(_, r)| r.is_err())
        .map(|(k, _)| k.as_str())
        .collect();
    let real: Vec<&str> = spectra
        .iter()
        .filter(|(_, r)| matches!(r, Ok(records) if records.iter().all(|e| e.is_real() && e.energy.re > 0.0)))
        .map(|(k, _)| k.as_str())
        .collect();
    let mut summary = format!(
        "{name}: {} sectors, {}/{} pairs converged, real positive spectra: {}",
        sectors.len(),
        spectra.len() - failed.len(),
        spectra.len(),
        real.join(" ")
    );
    if !failed.is_empty() {
        summary += &format!("; failed: {}", failed.join(" "));
    }
    Ok(summary)
}

/// The three classical phases of `x⁶` at `E = 1`.
fn fig8(dir: &Path) -> Result<String, CliError> {
    let spec = PotentialSpec::sextic();
    let h = 3f64.sqrt() / 2.0;
    let starts = [c(0.0, h), c(0.0, 0.0), c(0.0, -h)];
    let config = IntegratorConfig::default().with_t_max(4.0);
    let measured = measure_periods(&spec, c(1.0, 0.0), &starts, config, 1e-6)?;
    for ((_, traj), name) in measured.iter().zip(["upper", "middle", "lower"]) {
        emit(Some(&dir.join(format!("fig8_{name}.csv"))), |w| write_trajectory_csv(w, traj))?;
    }
    let rows: Vec<_> = measured.into_iter().map(|(r, _)| r).collect();
    emit(Some(&dir.join("fig8_periods.csv")), |w| write_periods_csv(w, &rows))?;
    Ok(format!(
        "fig8: periods upper {}, middle {}, lower {}",
        rows[0].period, rows[1].period, rows[2].period
    ))
}

/// The complex-energy sextic trajectory that hops between phases.
pub fn fig9_trajectory() -> Result<Trajectory, CliError> {
    let spec = PotentialSpec::sextic();
    let energy = c(1.0, 0.2);
    let start = PhasePoint::with_energy(&spec, c(0.0, 1.167), energy)?;
    Ok(integrate(&spec, start, IntegratorConfig::default().with_t_max(31.42))?)
}

fn fig9(dir: &Path) -> Result<String, CliError> {
    let traj = fig9_trajectory()?;
    let spec = traj.spec;
    let visits = classify_regions(&traj, &spec)?;
    let names = region_names(&spec, traj.energy)?;
    emit(Some(&dir.join("fig9_trajectory.csv")), |w| write_trajectory_csv(w, &traj))?;
    emit(Some(&dir.join("fig9_trajectory.jsonl")), |w| write_trajectory_jsonl(w, &traj))?;
    emit(Some(&dir.join("fig9_sphere.csv")), |w| write_sphere_csv(w, &traj.samples))?;
    emit(Some(&dir.join("fig9_regions.csv")), |w| write_regions_csv(w, &visits, &names))?;
    let sequence: Vec<&str> = visits.iter().map(|v| names[v.region_id].as_str()).collect();
    Ok(format!(
        "fig9: {} samples, visits {}, self-crossing {}",
        traj.samples.len(),
        sequence.join(" -> "),
        self_intersects(&traj, 1e-9)
    ))
}

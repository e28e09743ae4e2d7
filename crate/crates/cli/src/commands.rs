use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use complex_spectra::classical::{momentum_for_energy, region_anchors, region_name};
use complex_spectra::io::{
    read_trajectory_jsonl, write_pair_spectrum_csv, write_parameter_spectrum_csv, write_periods_csv,
    write_regions_csv, write_sectors_csv, write_sphere_csv, write_trajectory_csv, write_trajectory_jsonl,
    write_transitions_csv, write_wavefunction_csv, PeriodRow, Schema,
};
use complex_spectra::potentials::sector_pair_by_label;
use complex_spectra::spectral::PhaseSpectra;
use complex_spectra::{
    classify_regions, detect_closed_orbit, detect_pt_transition, enumerate_sector_pairs, escape_time,
    find_eigenvalues, integrate, phase_spectra, phase_sum_rule, pt_hermitian_ratio, pt_sector_pair,
    riemann_sphere_projection, scan_epsilon, scan_theta, stokes_sectors, trajectory_quadrature_period,
    wavefunction_samples, wkb_energy_estimate, Complex64, EigenvalueRecord, IntegratorConfig, PhasePoint,
    PotentialSpec, RatioSource, SectorPair, ShootingProblem, Source, SpherePoint, Trajectory,
};
use rayon::prelude::*;

use crate::args::*;
use crate::error::CliError;

/// What a command prints once it is done.
pub struct Report {
    pub summary: String,
    /// Data went to standard output, so the summary must not.
    pub stdout_taken: bool,
}

type Outcome = Result<Report, CliError>;

/// Writes through `write` into `path`, or standard output when absent.
pub fn emit<F>(path: Option<&Path>, write: F) -> Result<bool, CliError>
where
    F: FnOnce(&mut dyn Write) -> complex_spectra::Result<()>,
{
    match path {
        Some(path) => {
            let file = File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            let mut out = BufWriter::new(file);
            write(&mut out)?;
            out.flush()?;
            Ok(false)
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            write(&mut lock)?;
            Ok(true)
        }
    }
}

fn report(summary: String, stdout_taken: bool) -> Outcome {
    Ok(Report { summary, stdout_taken })
}

/// Imaginary parts below round-off are left out.
fn fmt_energy(e: Complex64) -> String {
    if e.im.abs() <= 1e-12 * e.re.abs().max(1.0) {
        format!("{}", e.re)
    } else {
        format!("{}{:+}i", e.re, e.im)
    }
}

pub fn run(command: Command) -> Outcome {
    match command {
        Command::Sectors(a) => sectors(&a),
        Command::Trajectory(a) => trajectory(&a),
        Command::Escape(a) => escape(&a),
        Command::Period(a) => period(&a),
        Command::Regions(a) => regions(&a),
        Command::Spectrum(a) => spectrum(&a),
        Command::Scan(a) => scan(&a),
        Command::Transition(a) => transition(&a),
        Command::Sumrule(a) => sumrule(&a),
        Command::Wkb(a) => wkb(&a),
        Command::Sphere(a) => sphere(&a),
        Command::Reproduce(a) => crate::reproduce::reproduce(&a),
    }
}

fn sectors(a: &SectorsArgs) -> Outcome {
    let spec = a.family.spec()?;
    let sectors = stokes_sectors(&spec)?;
    let taken = emit(a.output.out.as_deref(), |w| write_sectors_csv(w, &sectors))?;
    let opening = sectors[0].opening.to_degrees();
    let mut summary = format!("{} sectors, opening {:.6} deg", sectors.len(), opening);
    if spec.integer_degree().is_some() {
        let pairs = enumerate_sector_pairs(&spec)?;
        let labels: Vec<String> = pairs
            .iter()
            .map(|p| if p.pt_symmetric { format!("{}*", p.label()) } else { p.label() })
            .collect();
        summary += &format!("; pairs {} (* = PT-symmetric)", labels.join(" "));
    }
    report(summary, taken)
}

fn start_point(spec: &PotentialSpec, x0: Complex64, p0: Option<Complex64>, energy: Option<Complex64>) -> Result<PhasePoint, CliError> {
    match (p0, energy) {
        (Some(p), None) => Ok(PhasePoint::new(x0, p)),
        (None, Some(e)) => Ok(PhasePoint::new(x0, momentum_for_energy(spec, x0, e)?)),
        _ => Err(CliError::Usage("give exactly one of --p0 and --energy".into())),
    }
}

fn trajectory_summary(traj: &Trajectory) -> String {
    let drift = traj.max_energy_drift() / traj.energy.norm().max(1.0);
    format!(
        "{} samples, t in [0, {}], {:?}, E = {}, max relative drift {:.3e}",
        traj.samples.len(),
        traj.last().t,
        traj.termination,
        fmt_energy(traj.energy),
        drift
    )
}

fn trajectory(a: &TrajectoryArgs) -> Outcome {
    let spec = a.family.spec()?;
    let start = start_point(&spec, a.x0, a.p0, a.energy)?;
    let traj = integrate(&spec, start, a.integrator.config(10.0)?)?;
    let taken = emit(a.output.out.as_deref(), |w| match a.format {
        Format::Csv => write_trajectory_csv(w, &traj),
        Format::Jsonl => write_trajectory_jsonl(w, &traj),
    })?;
    if let Some(path) = &a.sphere_out {
        emit(Some(path), |w| write_sphere_csv(w, &traj.samples))?;
    }
    report(trajectory_summary(&traj), taken)
}

fn escape(a: &EscapeArgs) -> Outcome {
    let spec = a.family.spec()?;
    let start = PhasePoint::new(a.x0, momentum_for_energy(&spec, a.x0, a.energy)?);
    let t = escape_time(&spec, start, a.integrator.config(100.0)?)?;
    report(format!("escape_time {t} (E = {}, x0 = {})", fmt_energy(a.energy), fmt_energy(a.x0)), false)
}

/// Integration period and quadrature period of the orbit through each start.
pub fn measure_periods(
    spec: &PotentialSpec,
    energy: Complex64,
    starts: &[Complex64],
    config: IntegratorConfig,
    closure_tol: f64,
) -> Result<Vec<(PeriodRow, Trajectory)>, CliError> {
    starts
        .par_iter()
        .map(|&x0| {
            let start = PhasePoint::new(x0, momentum_for_energy(spec, x0, energy)?);
            let traj = integrate(spec, start, config)?;
            let orbit = detect_closed_orbit(&traj, closure_tol)?;
            let quadrature = trajectory_quadrature_period(&traj).map(|q| q.re).unwrap_or(f64::NAN);
            let row = PeriodRow {
                start,
                closed: orbit.closed,
                period: if orbit.closed { orbit.period } else { f64::NAN },
                quadrature_period: quadrature,
            };
            Ok((row, traj))
        })
        .collect()
}

fn period(a: &PeriodArgs) -> Outcome {
    let spec = a.family.spec()?;
    let measured = measure_periods(&spec, a.energy, &a.x0, a.integrator.config(10.0)?, a.closure_tol)?;
    let rows: Vec<PeriodRow> = measured.into_iter().map(|(r, _)| r).collect();
    let taken = emit(a.output.out.as_deref(), |w| write_periods_csv(w, &rows))?;
    let list: Vec<String> = rows
        .iter()
        .map(|r| format!("{}/{}", r.period, r.quadrature_period))
        .collect();
    let closed = rows.iter().filter(|r| r.closed).count();
    report(
        format!("{closed}/{} orbits closed; period/quadrature: {}", rows.len(), list.join(" ")),
        taken,
    )
}

pub fn region_names(spec: &PotentialSpec, energy: Complex64) -> Result<Vec<String>, CliError> {
    let count = region_anchors(spec, energy)?.len();
    Ok((0..count).map(|i| region_name(i, count)).collect())
}

fn regions(a: &RegionsArgs) -> Outcome {
    let spec = a.family.spec()?;
    let start = start_point(&spec, a.x0, None, Some(a.energy))?;
    let traj = integrate(&spec, start, a.integrator.config(31.42)?)?;
    let visits = classify_regions(&traj, &spec)?;
    let names = region_names(&spec, a.energy)?;
    let taken = emit(a.output.out.as_deref(), |w| write_regions_csv(w, &visits, &names))?;
    let sequence: Vec<&str> = visits.iter().map(|v| names[v.region_id].as_str()).collect();
    report(format!("visits: {}", sequence.join(" -> ")), taken)
}

fn chosen_pair(spec: &PotentialSpec, label: Option<&str>) -> Result<SectorPair, CliError> {
    Ok(match label {
        Some(label) => sector_pair_by_label(spec, label)?,
        None => pt_sector_pair(spec)?,
    })
}

fn energies(records: &[EigenvalueRecord]) -> String {
    records
        .iter()
        .map(|r| fmt_energy(r.energy))
        .collect::<Vec<_>>()
        .join(", ")
}

fn wkb_records(spec: &PotentialSpec, pair: &SectorPair, nmax: usize) -> Result<Vec<EigenvalueRecord>, CliError> {
    (0..=nmax)
        .map(|n| {
            Ok(EigenvalueRecord {
                index: n,
                energy: wkb_energy_estimate(spec, pair, n)?,
                residual: f64::NAN,
                pair_label: pair.label(),
                source: Source::Wkb,
                converged: true,
            })
        })
        .collect()
}

pub fn write_phase_spectra(path: Option<&Path>, spectra: &PhaseSpectra) -> Result<bool, CliError> {
    let records: Vec<&EigenvalueRecord> = spectra.values().filter_map(|r| r.as_ref().ok()).flatten().collect();
    emit(path, |w| write_pair_spectrum_csv(w, records))
}

fn spectrum(a: &SpectrumArgs) -> Outcome {
    let spec = a.family.spec()?;
    if a.all_pairs {
        let pairs = enumerate_sector_pairs(&spec)?;
        let spectra = phase_spectra(&spec, &pairs, a.nmax);
        let taken = write_phase_spectra(a.output.out.as_deref(), &spectra)?;
        let failed: Vec<&String> = spectra.iter().filter(|(_, r)| r.is_err()).map(|(k, _)| k).collect();
        let mut summary = format!("{}/{} pairs converged", spectra.len() - failed.len(), spectra.len());
        for (label, result) in &spectra {
            match result {
                Ok(records) => summary += &format!("; {label}: {}", fmt_energy(records[0].energy)),
                Err(e) => summary += &format!("; {label}: failed ({e})"),
            }
        }
        return report(summary, taken);
    }
    let pair = chosen_pair(&spec, a.pair.as_deref())?;
    let problem = ShootingProblem::new(spec, pair.clone())?;
    let mut records = find_eigenvalues(&problem, a.nmax)?;
    let summary = format!("{}: {}", pair.label(), energies(&records));
    if let Some(path) = &a.psi_out {
        let level = records
            .get(a.psi_index)
            .ok_or_else(|| CliError::Usage(format!("--psi-index {} exceeds --nmax", a.psi_index)))?;
        let sample = wavefunction_samples(&problem, level.energy)?;
        emit(Some(path), |w| write_wavefunction_csv(w, &sample))?;
    }
    if a.wkb {
        records.extend(wkb_records(&spec, &pair, a.nmax)?);
    }
    let taken = emit(a.output.out.as_deref(), |w| write_pair_spectrum_csv(w, &records))?;
    report(summary, taken)
}

/// The grid and the spectra along it.
pub fn run_scan(a: &ScanArgs) -> Result<(Vec<f64>, complex_spectra::SpectrumScan), CliError> {
    let grid = a.grid.points()?;
    let scan = match a.parameter {
        Parameter::Epsilon => scan_epsilon(a.with_harmonic, &grid, a.nmax)?,
        Parameter::Theta => {
            if a.with_harmonic {
                return Err(CliError::Usage("--with-harmonic only applies to epsilon scans".into()));
            }
            let records = scan_theta(&grid, a.nmax)?;
            let reality_flags = records
                .iter()
                .map(|rs| rs.iter().map(EigenvalueRecord::is_real).collect())
                .collect();
            complex_spectra::SpectrumScan {
                include_harmonic: false,
                epsilon_grid: grid.clone(),
                records,
                reality_flags,
            }
        }
    };
    Ok((grid, scan))
}

pub fn scan_summary(scan: &complex_spectra::SpectrumScan) -> String {
    let total: usize = scan.records.iter().map(Vec::len).sum();
    let lost = scan.records.iter().flatten().filter(|r| !r.converged).count();
    let complex = scan.reality_flags.iter().flatten().filter(|f| !**f).count();
    format!(
        "{} grid points, {} levels each, {} complex, {} unconverged of {}",
        scan.epsilon_grid.len(),
        scan.records.first().map_or(0, Vec::len),
        complex,
        lost,
        total
    )
}

fn scan(a: &ScanArgs) -> Outcome {
    let (grid, scan) = run_scan(a)?;
    let schema = match a.parameter {
        Parameter::Epsilon => Schema::ScanSpectrum,
        Parameter::Theta => Schema::ThetaSpectrum,
    };
    let taken = emit(a.output.out.as_deref(), |w| write_parameter_spectrum_csv(w, schema, &grid, &scan.records))?;
    report(scan_summary(&scan), taken)
}

fn transition(a: &ScanArgs) -> Outcome {
    if a.parameter != Parameter::Epsilon {
        return Err(CliError::Usage("transitions are detected along epsilon only".into()));
    }
    let (_, scan) = run_scan(a)?;
    let events = detect_pt_transition(&scan)?;
    let taken = emit(a.output.out.as_deref(), |w| write_transitions_csv(w, &events))?;
    let list: Vec<String> = events
        .iter()
        .map(|e| format!("eps*={} (n={},{})", e.epsilon_star, e.lower_index, e.lower_index + 1))
        .collect();
    report(format!("{} merges: {}", events.len(), list.join(", ")), taken)
}

fn sumrule(a: &SumruleArgs) -> Outcome {
    let sum = phase_sum_rule(a.n)?;
    report(format!("sum over phases of E_{} = {}", a.n, fmt_energy(sum)), false)
}

fn wkb(a: &WkbArgs) -> Outcome {
    let spec = a.family.spec()?;
    if let Some(n) = a.ratio {
        if spec != PotentialSpec::sextic() {
            return Err(CliError::Usage("--ratio is defined for --family sextic".into()));
        }
        let source = match a.ratio_source {
            RatioSourceArg::Wkb => RatioSource::Wkb,
            RatioSourceArg::Shooting => RatioSource::Shooting,
        };
        let ratio = pt_hermitian_ratio(n, source)?;
        return report(format!("E_BD({n})/E_AE({n}) = {ratio}"), false);
    }
    let pair = chosen_pair(&spec, a.pair.as_deref())?;
    let records = wkb_records(&spec, &pair, a.nmax)?;
    let taken = emit(a.output.out.as_deref(), |w| write_pair_spectrum_csv(w, &records))?;
    report(format!("{} (wkb): {}", pair.label(), energies(&records)), taken)
}

fn parse_sphere_point(text: &str) -> Result<SpherePoint, CliError> {
    if matches!(text.trim().to_ascii_lowercase().as_str(), "inf" | "infinity") {
        return Ok(SpherePoint::Infinity);
    }
    parse_complex(text).map(SpherePoint::Finite).map_err(CliError::Usage)
}

fn sphere(a: &SphereArgs) -> Outcome {
    if let Some(point) = &a.point {
        let [x, y, z] = riemann_sphere_projection(parse_sphere_point(point)?);
        return report(format!("X = {x}, Y = {y}, Z = {z}"), false);
    }
    let path: &PathBuf = a.input.as_ref().expect("clap requires --input or --point");
    let file = File::open(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let samples = read_trajectory_jsonl(std::io::BufReader::new(file))?;
    let taken = emit(a.output.out.as_deref(), |w| write_sphere_csv(w, &samples))?;
    report(format!("{} points projected", samples.len()), taken)
}

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use complex_spectra::{Complex64, IntegratorConfig, PotentialSpec};

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "complex-spectra", version, about = "Classical and quantum phases of complex-deformed Hamiltonians")]
pub struct Cli {
    /// Read the command and its parameters from a JSON run configuration.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Stokes sectors of a potential.
    Sectors(SectorsArgs),
    /// Integrate a complex classical trajectory.
    Trajectory(TrajectoryArgs),
    /// Time to reach infinity.
    Escape(EscapeArgs),
    /// Periods of closed orbits, by integration and by contour quadrature.
    Period(PeriodArgs),
    /// Sequence of classical phases visited by a trajectory.
    Regions(RegionsArgs),
    /// Eigenvalues of one or all sector-pair problems.
    Spectrum(SpectrumArgs),
    /// Spectrum continued along a grid of ε or θ.
    Scan(ScanArgs),
    /// ε values where real eigenvalues merge into conjugate pairs.
    Transition(ScanArgs),
    /// Sum of the n-th eigenvalue over the five phases of p² + ix³.
    Sumrule(SumruleArgs),
    /// WKB eigenvalue estimates.
    Wkb(WkbArgs),
    /// Project points or a trajectory onto the Riemann sphere.
    Sphere(SphereArgs),
    /// Write the data behind one figure.
    Reproduce(ReproduceArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    /// p² + x²
    Harmonic,
    /// p² + ix³
    Cubic,
    /// p² + x⁶
    Sextic,
    /// p² - x⁴
    InvertedQuartic,
    /// p² + [x²] + x²(ix)^ε
    Deformed,
    /// p² + [x²] + x²(-ix)^ε
    DeformedConjugate,
    /// p² + x² + e^{iθ}x⁴
    RotatedQuartic,
    /// p² + c x^N
    Monomial,
}

#[derive(Debug, Clone, Args)]
pub struct FamilyArgs {
    #[arg(long, value_enum)]
    pub family: Family,
    /// ε for the deformed families.
    #[arg(long, allow_hyphen_values = true)]
    pub epsilon: Option<f64>,
    /// Add the x² term to the deformed families.
    #[arg(long)]
    pub with_harmonic: bool,
    /// θ for the rotated quartic.
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<f64>,
    /// Degree N of the monomial family.
    #[arg(long)]
    pub degree: Option<u32>,
    /// Coefficient c of the monomial family.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, default_value = "1")]
    pub coefficient: Complex64,
}

impl FamilyArgs {
    pub fn spec(&self) -> Result<PotentialSpec, CliError> {
        let deformed_only = |name: &str, set: bool| {
            if set && !matches!(self.family, Family::Deformed | Family::DeformedConjugate) {
                Err(CliError::Usage(format!("--{name} only applies to the deformed families")))
            } else {
                Ok(())
            }
        };
        deformed_only("epsilon", self.epsilon.is_some())?;
        deformed_only("with-harmonic", self.with_harmonic)?;
        if self.theta.is_some() && self.family != Family::RotatedQuartic {
            return Err(CliError::Usage("--theta only applies to rotated-quartic".into()));
        }
        if self.degree.is_some() && self.family != Family::Monomial {
            return Err(CliError::Usage("--degree only applies to monomial".into()));
        }
        let spec = match self.family {
            Family::Harmonic => PotentialSpec::harmonic(),
            Family::Cubic => PotentialSpec::cubic(),
            Family::Sextic => PotentialSpec::sextic(),
            Family::InvertedQuartic => PotentialSpec::inverted_quartic(),
            Family::Deformed | Family::DeformedConjugate => PotentialSpec::DeformedMonomial {
                epsilon: self
                    .epsilon
                    .ok_or_else(|| CliError::Usage("--epsilon is required for this family".into()))?,
                include_harmonic: self.with_harmonic,
                conjugate: self.family == Family::DeformedConjugate,
            },
            Family::RotatedQuartic => PotentialSpec::RotatedQuartic {
                theta: self
                    .theta
                    .ok_or_else(|| CliError::Usage("--theta is required for rotated-quartic".into()))?,
            },
            Family::Monomial => PotentialSpec::PureMonomial {
                degree: self
                    .degree
                    .ok_or_else(|| CliError::Usage("--degree is required for monomial".into()))?,
                coefficient: self.coefficient,
            },
        };
        spec.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(spec)
    }
}

#[derive(Debug, Clone, Args)]
pub struct IntegratorArgs {
    #[arg(long, default_value_t = 1e-10)]
    pub rel_tol: f64,
    #[arg(long, default_value_t = 1e-10)]
    pub abs_tol: f64,
    #[arg(long, default_value_t = 0.05)]
    pub max_step: f64,
    /// Allowed |H - E| relative to max(1, |E|).
    #[arg(long, default_value_t = 1e-8)]
    pub drift_tol: f64,
    #[arg(long, default_value_t = 1e4)]
    pub escape_radius: f64,
    /// End of the time window; each command has its own default.
    #[arg(long)]
    pub t_max: Option<f64>,
}

impl IntegratorArgs {
    pub fn config(&self, default_t_max: f64) -> Result<IntegratorConfig, CliError> {
        let config = IntegratorConfig {
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            max_step: self.max_step,
            energy_drift_tol: self.drift_tol,
            escape_radius: self.escape_radius,
            t_max: self.t_max.unwrap_or(default_t_max),
        };
        config.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(config)
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output file; CSV goes to standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SectorsArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Jsonl,
}

#[derive(Debug, Clone, Args)]
pub struct TrajectoryArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub x0: Complex64,
    /// Initial momentum; conflicts with --energy.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, conflicts_with = "energy")]
    pub p0: Option<Complex64>,
    /// Energy; the momentum is the root of E - V(x0) with Re p > 0.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub energy: Option<Complex64>,
    #[command(flatten)]
    pub integrator: IntegratorArgs,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Also write the Riemann-sphere projection as CSV.
    #[arg(long)]
    pub sphere_out: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct EscapeArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub energy: Complex64,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, default_value = "0")]
    pub x0: Complex64,
    #[command(flatten)]
    pub integrator: IntegratorArgs,
}

#[derive(Debug, Clone, Args)]
pub struct PeriodArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub energy: Complex64,
    /// Starting points, one per orbit.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, required = true, num_args = 1, action = clap::ArgAction::Append)]
    pub x0: Vec<Complex64>,
    #[arg(long, default_value_t = 1e-6)]
    pub closure_tol: f64,
    #[command(flatten)]
    pub integrator: IntegratorArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct RegionsArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub energy: Complex64,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub x0: Complex64,
    #[command(flatten)]
    pub integrator: IntegratorArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    /// Sector pair label such as AE; the PT pair when omitted.
    #[arg(long, conflicts_with = "all_pairs")]
    pub pair: Option<String>,
    /// Solve every non-adjacent sector pair.
    #[arg(long)]
    pub all_pairs: bool,
    /// Highest index n.
    #[arg(long, default_value_t = 4)]
    pub nmax: usize,
    /// Append WKB estimates as extra rows.
    #[arg(long)]
    pub wkb: bool,
    /// Write the eigenfunction of level --psi-index as CSV.
    #[arg(long)]
    pub psi_out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub psi_index: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Parameter {
    Epsilon,
    Theta,
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub start: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub stop: f64,
    #[arg(long)]
    pub step: f64,
}

impl GridArgs {
    /// `start, start + step, …` up to and including `stop`.
    pub fn points(&self) -> Result<Vec<f64>, CliError> {
        if !(self.step > 0.0 && self.stop >= self.start) {
            return Err(CliError::Usage("grid needs step > 0 and stop >= start".into()));
        }
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        if count > 100_000 {
            return Err(CliError::Usage("grid has too many points".into()));
        }
        Ok((0..=count)
            .map(|k| {
                let v = self.start + k as f64 * self.step;
                (v * 1e12).round() / 1e12
            })
            .collect())
    }
}

#[derive(Debug, Clone, Args)]
pub struct ScanArgs {
    #[arg(long, value_enum, default_value = "epsilon")]
    pub parameter: Parameter,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, default_value_t = 20)]
    pub nmax: usize,
    /// Scan p² + x² + x²(ix)^ε instead of p² + x²(ix)^ε.
    #[arg(long)]
    pub with_harmonic: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SumruleArgs {
    #[arg(long, default_value_t = 0)]
    pub n: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RatioSourceArg {
    Wkb,
    Shooting,
}

#[derive(Debug, Clone, Args)]
pub struct WkbArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[arg(long)]
    pub pair: Option<String>,
    #[arg(long, default_value_t = 4)]
    pub nmax: usize,
    /// Print E_BD(n) / E_AE(n) for the sextic instead of a spectrum.
    #[arg(long)]
    pub ratio: Option<usize>,
    #[arg(long, value_enum, default_value = "wkb")]
    pub ratio_source: RatioSourceArg,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SphereArgs {
    /// Trajectory in JSON lines, as written by `trajectory --format jsonl`.
    #[arg(long, conflicts_with = "point", required_unless_present = "point")]
    pub input: Option<PathBuf>,
    /// A single point to project; `inf` is the point at infinity.
    #[arg(long, allow_hyphen_values = true)]
    pub point: Option<String>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Figure {
    Fig2,
    Fig5,
    Fig6,
    Fig7,
    Fig8,
    Fig9,
}

#[derive(Debug, Clone, Args)]
pub struct ReproduceArgs {
    #[arg(value_enum)]
    pub figure: Figure,
    /// Directory for the data files.
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

/// Parses `a`, `bi`, `a+bi`, `a-bi` (and `j` for `i`).
pub fn parse_complex(text: &str) -> Result<Complex64, String> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || format!("cannot parse {text:?} as a complex number");
    if s.is_empty() {
        return Err(bad());
    }
    let Some(body) = s.strip_suffix('i').or_else(|| s.strip_suffix('j')) else {
        return s.parse::<f64>().map(|re| Complex64::new(re, 0.0)).map_err(|_| bad());
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let coefficient = |t: &str| match t {
        "" | "+" => Ok(1.0),
        "-" => Ok(-1.0),
        _ => t.parse::<f64>().map_err(|_| bad()),
    };
    match split {
        Some(k) => Ok(Complex64::new(
            body[..k].parse::<f64>().map_err(|_| bad())?,
            coefficient(&body[k..])?,
        )),
        None => Ok(Complex64::new(0.0, coefficient(body)?)),
    }
}

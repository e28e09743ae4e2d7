//! CSV and JSON-lines output, and the schemas every emitted CSV follows.
//!
//! Floats are written in Rust's shortest round-trip form, so reading a
//! file back gives the same bits and identical inputs give identical bytes.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::classical::{riemann_sphere_projection, PhasePoint, RegionVisit, SpherePoint, Trajectory};
use crate::error::{Error, Result};
use crate::potentials::StokesSector;
use crate::spectral::{EigenvalueRecord, PtTransition, SpectrumScan, WavefunctionSample};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Number,
    Integer,
    Text,
    Flag,
}

/// The column layout of one kind of CSV file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Schema {
    Trajectory,
    Sphere,
    /// Spectrum keyed by ε.
    ScanSpectrum,
    /// Spectrum keyed by sector pair.
    PairSpectrum,
    /// Spectrum keyed by the rotation angle θ.
    ThetaSpectrum,
    Wavefunction,
    Sectors,
    Transitions,
    Regions,
    Periods,
}

impl Schema {
    pub fn columns(&self) -> &'static [(&'static str, Kind)] {
        use Kind::*;
        match self {
            Schema::Trajectory => &[
                ("t", Number),
                ("re_x", Number),
                ("im_x", Number),
                ("re_p", Number),
                ("im_p", Number),
            ],
            Schema::Sphere => &[("t", Number), ("X", Number), ("Y", Number), ("Z", Number)],
            Schema::ScanSpectrum => &[
                ("epsilon", Number),
                ("n", Integer),
                ("re_e", Number),
                ("im_e", Number),
                ("residual", Number),
                ("source", Text),
            ],
            Schema::PairSpectrum => &[
                ("pair_label", Text),
                ("n", Integer),
                ("re_e", Number),
                ("im_e", Number),
                ("residual", Number),
                ("source", Text),
            ],
            Schema::ThetaSpectrum => &[
                ("theta", Number),
                ("n", Integer),
                ("re_e", Number),
                ("im_e", Number),
                ("residual", Number),
                ("source", Text),
            ],
            Schema::Wavefunction => &[
                ("r", Number),
                ("re_x", Number),
                ("im_x", Number),
                ("re_psi", Number),
                ("im_psi", Number),
            ],
            Schema::Sectors => &[
                ("label", Text),
                ("center_deg", Number),
                ("opening_deg", Number),
            ],
            Schema::Transitions => &[("epsilon_star", Number), ("lower_index", Integer)],
            Schema::Regions => &[
                ("region_id", Integer),
                ("region", Text),
                ("t_enter", Number),
                ("t_exit", Number),
                ("windings", Integer),
            ],
            Schema::Periods => &[
                ("orbit", Integer),
                ("re_x0", Number),
                ("im_x0", Number),
                ("closed", Flag),
                ("period", Number),
                ("quadrature_period", Number),
            ],
        }
    }

    pub fn header(&self) -> Vec<&'static str> {
        self.columns().iter().map(|(name, _)| *name).collect()
    }
}

fn num(x: f64) -> String {
    format!("{x:?}")
}

struct Table<W: Write> {
    inner: csv::Writer<W>,
}

impl<W: Write> Table<W> {
    fn new(out: W, schema: Schema) -> Result<Self> {
        let mut inner = csv::Writer::from_writer(out);
        inner.write_record(schema.header())?;
        Ok(Table { inner })
    }

    fn row(&mut self, fields: &[String]) -> Result<()> {
        self.inner.write_record(fields)?;
        Ok(())
    }

    fn finish(mut self) -> Result<()> {
        self.inner.flush()?;
        Ok(())
    }
}

pub fn write_trajectory_csv<W: Write>(out: W, traj: &Trajectory) -> Result<()> {
    let mut table = Table::new(out, Schema::Trajectory)?;
    for s in &traj.samples {
        table.row(&[num(s.t), num(s.x.re), num(s.x.im), num(s.p.re), num(s.p.im)])?;
    }
    table.finish()
}

/// One [`PhasePoint`] per line.
pub fn write_trajectory_jsonl<W: Write>(mut out: W, traj: &Trajectory) -> Result<()> {
    for s in &traj.samples {
        serde_json::to_writer(&mut out, s)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_trajectory_jsonl<R: Read>(input: R) -> Result<Vec<PhasePoint>> {
    serde_json::Deserializer::from_reader(input)
        .into_iter::<PhasePoint>()
        .map(|p| p.map_err(Error::from))
        .collect()
}

pub fn write_sphere_csv<W: Write>(out: W, samples: &[PhasePoint]) -> Result<()> {
    let mut table = Table::new(out, Schema::Sphere)?;
    for s in samples {
        let [x, y, z] = riemann_sphere_projection(SpherePoint::Finite(s.x));
        table.row(&[num(s.t), num(x), num(y), num(z)])?;
    }
    table.finish()
}

fn spectrum_row(key: String, r: &EigenvalueRecord) -> Vec<String> {
    vec![
        key,
        r.index.to_string(),
        num(r.energy.re),
        num(r.energy.im),
        num(r.residual),
        r.source.as_str().to_string(),
    ]
}

/// Rows keyed by sector-pair label.
pub fn write_pair_spectrum_csv<'a, W, I>(out: W, records: I) -> Result<()>
where
    W: Write,
    I: IntoIterator<Item = &'a EigenvalueRecord>,
{
    let mut table = Table::new(out, Schema::PairSpectrum)?;
    for r in records {
        table.row(&spectrum_row(r.pair_label.clone(), r))?;
    }
    table.finish()
}

/// Rows keyed by a real parameter; `schema` is [`Schema::ScanSpectrum`] or
/// [`Schema::ThetaSpectrum`].
pub fn write_parameter_spectrum_csv<W: Write>(
    out: W,
    schema: Schema,
    grid: &[f64],
    records: &[Vec<EigenvalueRecord>],
) -> Result<()> {
    if !matches!(schema, Schema::ScanSpectrum | Schema::ThetaSpectrum) {
        return Err(Error::Schema(format!("{schema:?} is not keyed by a parameter")));
    }
    let mut table = Table::new(out, schema)?;
    for (p, column) in grid.iter().zip(records) {
        for r in column {
            table.row(&spectrum_row(num(*p), r))?;
        }
    }
    table.finish()
}

pub fn write_scan_csv<W: Write>(out: W, scan: &SpectrumScan) -> Result<()> {
    write_parameter_spectrum_csv(out, Schema::ScanSpectrum, &scan.epsilon_grid, &scan.records)
}

pub fn write_wavefunction_csv<W: Write>(out: W, sample: &WavefunctionSample) -> Result<()> {
    let mut table = Table::new(out, Schema::Wavefunction)?;
    for ((r, x), psi) in sample.r.iter().zip(&sample.points).zip(&sample.psi) {
        table.row(&[num(*r), num(x.re), num(x.im), num(psi.re), num(psi.im)])?;
    }
    table.finish()
}

pub fn write_sectors_csv<W: Write>(out: W, sectors: &[StokesSector]) -> Result<()> {
    let mut table = Table::new(out, Schema::Sectors)?;
    for s in sectors {
        table.row(&[
            s.label.clone(),
            num(s.center_angle.to_degrees()),
            num(s.opening.to_degrees()),
        ])?;
    }
    table.finish()
}

pub fn write_transitions_csv<W: Write>(out: W, events: &[PtTransition]) -> Result<()> {
    let mut table = Table::new(out, Schema::Transitions)?;
    for e in events {
        table.row(&[num(e.epsilon_star), e.lower_index.to_string()])?;
    }
    table.finish()
}

pub fn write_regions_csv<W: Write>(out: W, visits: &[RegionVisit], names: &[String]) -> Result<()> {
    let mut table = Table::new(out, Schema::Regions)?;
    for v in visits {
        let name = names.get(v.region_id).cloned().unwrap_or_default();
        table.row(&[
            v.region_id.to_string(),
            name,
            num(v.t_enter),
            num(v.t_exit),
            v.windings.to_string(),
        ])?;
    }
    table.finish()
}

/// One closed-orbit measurement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodRow {
    pub start: PhasePoint,
    pub closed: bool,
    pub period: f64,
    pub quadrature_period: f64,
}

pub fn write_periods_csv<W: Write>(out: W, rows: &[PeriodRow]) -> Result<()> {
    let mut table = Table::new(out, Schema::Periods)?;
    for (i, r) in rows.iter().enumerate() {
        table.row(&[
            i.to_string(),
            num(r.start.x.re),
            num(r.start.x.im),
            r.closed.to_string(),
            num(r.period),
            num(r.quadrature_period),
        ])?;
    }
    table.finish()
}

/// Checks the header and every field of a CSV against `schema`, returning
/// the number of data rows.
pub fn validate_csv<R: Read>(input: R, schema: Schema) -> Result<usize> {
    let mut reader = csv::Reader::from_reader(input);
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if header != schema.header() {
        return Err(Error::Schema(format!(
            "expected columns {:?}, found {:?}",
            schema.header(),
            header
        )));
    }
    let mut rows = 0;
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        for ((name, kind), field) in schema.columns().iter().zip(record.iter()) {
            let ok = match kind {
                Kind::Number => field.parse::<f64>().is_ok(),
                Kind::Integer => field.parse::<i64>().is_ok(),
                Kind::Flag => field == "true" || field == "false",
                Kind::Text => !field.is_empty(),
            };
            if !ok {
                return Err(Error::Schema(format!(
                    "row {}: column {name} has invalid value {field:?}",
                    line + 1
                )));
            }
        }
        rows += 1;
    }
    Ok(rows)
}

//! CSV readers and writers for every table the pipeline produces.

use std::io::{Read, Write};

use chrono::NaiveDate;

use crate::error::{Error, Result};
use crate::hurst::{Estimator, HurstCurve, HurstPoint};
use crate::market_data::{RVSeries, RvDay, SignaturePoint};
use crate::mfdfa::FluctuationTable;
use crate::multifractal::{ShuffleEnsembleResult, SingularitySpectrum};
use crate::structure_function::{StructureFunctionTable, ZetaCurve};
use crate::volseries::DistributionSummary;

/// Numeric formatting for CSV output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Precision {
    /// Six significant digits.
    #[default]
    Significant6,
    /// Shortest representation that round-trips exactly.
    Full,
}

impl Precision {
    pub fn format(self, v: f64) -> String {
        match self {
            Precision::Full => format!("{v}"),
            Precision::Significant6 => format_significant(v, 6),
        }
    }
}

impl std::str::FromStr for Precision {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "6" | "default" => Ok(Precision::Significant6),
            "full" => Ok(Precision::Full),
            other => Err(format!("unknown precision {other:?}, expected 6 or full")),
        }
    }
}

/// `v` rounded to `digits` significant digits, trailing zeros removed.
pub fn format_significant(v: f64, digits: usize) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let exponent = v.abs().log10().floor() as i32;
    if (-5..15).contains(&exponent) {
        let decimals = (digits as i32 - 1 - exponent).max(0) as usize;
        let s = format!("{v:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        format!("{v:.*e}", digits - 1)
    }
}

fn writer<W: Write>(w: W, header: &[&str]) -> Result<csv::Writer<W>> {
    let mut out = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    out.write_record(header)?;
    Ok(out)
}

fn check_header<R: Read>(reader: &mut csv::Reader<R>, expected: &[&str]) -> Result<()> {
    let header = reader.headers()?;
    let got: Vec<&str> = header.iter().map(str::trim).collect();
    if got != expected {
        return Err(Error::Malformed {
            line: 1,
            message: format!("expected header {:?}, found {:?}", expected.join(","), got.join(",")),
        });
    }
    Ok(())
}

fn parse_field<T: std::str::FromStr>(record: &csv::StringRecord, i: usize, line: usize) -> Result<T> {
    let raw = record.get(i).ok_or_else(|| Error::Malformed { line, message: format!("missing column {}", i + 1) })?;
    raw.trim()
        .parse()
        .map_err(|_| Error::Malformed { line, message: format!("cannot parse {raw:?}") })
}

/// Reads a `date,rv` table with ISO-8601 dates.
pub fn read_rv_csv<R: Read>(source: R) -> Result<RVSeries> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(source);
    check_header(&mut reader, &["date", "rv"])?;
    let mut days = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let line = i + 2;
        let date: NaiveDate = parse_field(&record, 0, line)?;
        let rv: f64 = parse_field(&record, 1, line)?;
        days.push(RvDay { date, rv });
    }
    if days.is_empty() {
        return Err(Error::NoRecords);
    }
    RVSeries::from_days(None, days)
}

pub fn write_rv_csv<W: Write>(w: W, rv: &RVSeries, precision: Precision) -> Result<()> {
    let mut out = writer(w, &["date", "rv"])?;
    for d in &rv.days {
        out.write_record([d.date.to_string(), precision.format(d.rv)])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_signature_csv<W: Write>(w: W, rows: &[SignaturePoint], precision: Precision) -> Result<()> {
    let mut out = writer(w, &["delta_t_minutes", "mean_rv"])?;
    for r in rows {
        out.write_record([r.delta_t_minutes.to_string(), precision.format(r.mean_rv)])?;
    }
    out.flush()?;
    Ok(())
}

/// Reads an `index,value` table, returning the values in file order.
pub fn read_series_csv<R: Read>(source: R) -> Result<Vec<f64>> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(source);
    check_header(&mut reader, &["index", "value"])?;
    let mut values = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        values.push(parse_field::<f64>(&record, 1, i + 2)?);
    }
    if values.is_empty() {
        return Err(Error::NoRecords);
    }
    Ok(values)
}

pub fn write_series_csv<W: Write>(w: W, values: &[f64], precision: Precision) -> Result<()> {
    let mut out = writer(w, &["index", "value"])?;
    for (i, v) in values.iter().enumerate() {
        out.write_record([i.to_string(), precision.format(*v)])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_distribution_csv<W: Write>(w: W, summary: &DistributionSummary, precision: Precision) -> Result<()> {
    let mut out = writer(w, &["bin_center", "density", "gaussian_density"])?;
    for ((c, d), g) in summary.histogram.iter().zip(&summary.gaussian_density_at_bins) {
        out.write_record([precision.format(*c), precision.format(*d), precision.format(*g)])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_fluctuation_csv<W: Write>(w: W, table: &FluctuationTable, precision: Precision) -> Result<()> {
    let mut out = writer(w, &["s", "q", "F"])?;
    for (s, row) in table.s_grid.iter().zip(&table.entries) {
        for (q, f) in table.q_grid.iter().zip(row) {
            out.write_record([s.to_string(), precision.format(*q), precision.format(*f)])?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn write_hurst_csv<W: Write>(w: W, curve: &HurstCurve, precision: Precision) -> Result<()> {
    let mut out = writer(w, &["q", "h", "stderr", "r2"])?;
    for p in &curve.points {
        out.write_record([p.q, p.h, p.stderr, p.r2].map(|v| precision.format(v)))?;
    }
    out.flush()?;
    Ok(())
}

/// Reads a `q,h,stderr,r2` table. The estimator and fit window are not
/// stored in the file and are filled in from the arguments.
pub fn read_hurst_csv<R: Read>(source: R, estimator: Estimator, fit_window: (usize, usize)) -> Result<HurstCurve> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(source);
    check_header(&mut reader, &["q", "h", "stderr", "r2"])?;
    let mut points = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let line = i + 2;
        points.push(HurstPoint {
            q: parse_field(&record, 0, line)?,
            h: parse_field(&record, 1, line)?,
            stderr: parse_field(&record, 2, line)?,
            r2: parse_field(&record, 3, line)?,
        });
    }
    if points.is_empty() {
        return Err(Error::NoRecords);
    }
    if points.windows(2).any(|w| w[1].q <= w[0].q) {
        return Err(Error::Malformed { line: 2, message: "q column must be strictly increasing".into() });
    }
    Ok(HurstCurve { points, estimator, fit_window })
}

pub fn write_sf_table_csv<W: Write>(w: W, table: &StructureFunctionTable, precision: Precision) -> Result<()> {
    let mut out = writer(w, &["delta", "q", "m"])?;
    for (d, row) in table.delta_grid.iter().zip(&table.entries) {
        for (q, m) in table.q_grid.iter().zip(row) {
            out.write_record([d.to_string(), precision.format(*q), precision.format(*m)])?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn write_zeta_csv<W: Write>(w: W, zeta: &ZetaCurve, precision: Precision) -> Result<()> {
    let mut out = writer(w, &["q", "zeta", "h", "stderr"])?;
    for p in &zeta.points {
        out.write_record([p.q, p.zeta, p.h(), p.stderr].map(|v| precision.format(v)))?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_spectrum_csv<W: Write>(w: W, spectrum: &SingularitySpectrum, precision: Precision) -> Result<()> {
    let mut out = writer(w, &["q", "alpha", "f_alpha"])?;
    for p in &spectrum.points {
        out.write_record([p.q, p.alpha, p.f_alpha].map(|v| precision.format(v)))?;
    }
    out.flush()?;
    Ok(())
}

/// `measure,value` rows for `delta_h` and `delta_alpha`.
pub fn write_spectrum_summary_csv<W: Write>(w: W, spectrum: &SingularitySpectrum, precision: Precision) -> Result<()> {
    let mut out = writer(w, &["measure", "value"])?;
    out.write_record(["delta_h".to_string(), precision.format(spectrum.delta_h)])?;
    out.write_record(["delta_alpha".to_string(), precision.format(spectrum.delta_alpha)])?;
    out.flush()?;
    Ok(())
}

pub fn write_ensemble_csv<W: Write>(w: W, result: &ShuffleEnsembleResult, precision: Precision) -> Result<()> {
    let mut out = writer(w, &["q", "mean_h", "std_h"])?;
    for e in &result.per_q {
        out.write_record([e.q, e.mean_h, e.std_h].map(|v| precision.format(v)))?;
    }
    out.flush()?;
    Ok(())
}

/// `measure,mean,std` rows for `delta_h` and `delta_alpha` across replicates.
pub fn write_ensemble_summary_csv<W: Write>(w: W, result: &ShuffleEnsembleResult, precision: Precision) -> Result<()> {
    let mut out = writer(w, &["measure", "mean", "std"])?;
    out.write_record([
        "delta_h".to_string(),
        precision.format(result.delta_h_mean),
        precision.format(result.delta_h_std),
    ])?;
    out.write_record([
        "delta_alpha".to_string(),
        precision.format(result.delta_alpha_mean),
        precision.format(result.delta_alpha_std),
    ])?;
    out.flush()?;
    Ok(())
}

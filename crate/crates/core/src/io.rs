//! CSV and JSON artifacts.
//!
//! Floats are written with Rust's shortest round-trip formatting and
//! rationals as reduced `numerator,denominator` decimal strings, so every
//! file reads back bit-identically and identical inputs give identical bytes.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Num;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::{Event, Sample, Trajectory};
use crate::logistic::{PhaseCurve, SwitchbackLadder};
use crate::skellam::IntPolynomial;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

fn writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().flexible(true).from_writer(w)
}

fn reader<R: Read>(r: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new().flexible(true).from_reader(r)
}

fn parse_f64(field: &str) -> Result<f64> {
    field.trim().parse().map_err(|_| Error::Parse(format!("not a number: {field:?}")))
}

fn parse_int(field: &str) -> Result<BigInt> {
    BigInt::from_str_radix(field.trim(), 10).map_err(|_| Error::Parse(format!("not an integer: {field:?}")))
}

fn parse_usize(field: &str) -> Result<usize> {
    field.trim().parse().map_err(|_| Error::Parse(format!("not an index: {field:?}")))
}

fn field<'a>(rec: &'a csv::StringRecord, i: usize) -> Result<&'a str> {
    rec.get(i).ok_or_else(|| Error::Parse(format!("missing column {i} in {rec:?}")))
}

/// JSON sidecar describing a series file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesMeta {
    pub map: String,
    pub params: BTreeMap<String, String>,
    pub center: String,
    pub order: usize,
    pub mode: String,
    #[serde(rename = "tool-version")]
    pub tool_version: String,
}

impl SeriesMeta {
    pub fn new(map: &str, params: &[(&str, String)], center: String, order: usize, mode: &str) -> Self {
        SeriesMeta {
            map: map.to_string(),
            params: params.iter().map(|(k, v)| (k.to_string(), v.clone())).collect(),
            center,
            order,
            mode: mode.to_string(),
            tool_version: TOOL_VERSION.to_string(),
        }
    }
}

pub fn write_json<W: Write, T: Serialize>(mut w: W, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    Ok(())
}

pub fn read_series_meta<R: Read>(r: R) -> Result<SeriesMeta> {
    Ok(serde_json::from_reader(r)?)
}

/// Coefficients read back from a series CSV.
#[derive(Debug, Clone, PartialEq)]
pub enum SeriesTable {
    Rational(Vec<(usize, BigRational)>),
    Float(Vec<(usize, f64)>),
}

/// `index,numerator,denominator`, starting from `first_index`.
pub fn write_series_rational<W: Write>(w: W, first_index: usize, coeffs: &[BigRational]) -> Result<()> {
    let mut out = writer(w);
    out.write_record(["index", "numerator", "denominator"])?;
    for (i, c) in coeffs.iter().enumerate() {
        out.write_record([(first_index + i).to_string(), c.numer().to_string(), c.denom().to_string()])?;
    }
    out.flush()?;
    Ok(())
}

/// `index,coefficient`, starting from `first_index`.
pub fn write_series_float<W: Write>(w: W, first_index: usize, coeffs: &[f64]) -> Result<()> {
    let mut out = writer(w);
    out.write_record(["index", "coefficient"])?;
    for (i, c) in coeffs.iter().enumerate() {
        out.write_record([(first_index + i).to_string(), c.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_series<R: Read>(r: R) -> Result<SeriesTable> {
    let mut rd = reader(r);
    let header: Vec<String> = rd.headers()?.iter().map(str::to_string).collect();
    let rows: Vec<csv::StringRecord> = rd.records().collect::<std::result::Result<_, _>>()?;
    match header.iter().map(String::as_str).collect::<Vec<_>>()[..] {
        ["index", "numerator", "denominator"] => {
            let mut v = Vec::with_capacity(rows.len());
            for rec in &rows {
                let d = parse_int(field(rec, 2)?)?;
                if num_traits::Zero::is_zero(&d) {
                    return Err(Error::Parse("zero denominator".into()));
                }
                v.push((parse_usize(field(rec, 0)?)?, BigRational::new(parse_int(field(rec, 1)?)?, d)));
            }
            Ok(SeriesTable::Rational(v))
        }
        ["index", "coefficient"] => {
            let mut v = Vec::with_capacity(rows.len());
            for rec in &rows {
                v.push((parse_usize(field(rec, 0)?)?, parse_f64(field(rec, 1)?)?));
            }
            Ok(SeriesTable::Float(v))
        }
        _ => Err(Error::Parse(format!("unrecognised series header {header:?}"))),
    }
}

/// `n,degree,coefficients...`, coefficients in ascending powers of `k`.
pub fn write_p_table<W: Write>(w: W, polys: &[IntPolynomial]) -> Result<()> {
    let mut out = writer(w);
    out.write_record(["n", "degree", "coefficients..."])?;
    for (i, p) in polys.iter().enumerate() {
        let mut row = vec![(i + 1).to_string(), p.degree().to_string()];
        row.extend(p.coeffs.iter().map(|c| c.to_string()));
        out.write_record(&row)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_p_table<R: Read>(r: R) -> Result<Vec<IntPolynomial>> {
    let mut rd = reader(r);
    let mut out = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        let degree = parse_usize(field(&rec, 1)?)?;
        let coeffs = (2..rec.len()).map(|i| parse_int(&rec[i])).collect::<Result<Vec<_>>>()?;
        let poly = IntPolynomial::new(coeffs);
        if poly.degree() != degree {
            return Err(Error::Parse(format!("row {} declares degree {degree}", field(&rec, 0)?)));
        }
        out.push(poly);
    }
    Ok(out)
}

/// One row of a branch export.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchRow {
    pub p: usize,
    pub x: f64,
    pub v_pot: f64,
    pub v: f64,
    pub direction: &'static str,
}

/// `P,x,V,v,direction` for every branch of `ladder` sampled on `grid`.
pub fn branch_rows(ladder: &SwitchbackLadder, grid: &[f64]) -> Result<Vec<BranchRow>> {
    let mut rows = Vec::new();
    for b in &ladder.branches {
        for &x in grid.iter().filter(|&&x| b.contains(x)) {
            let x = x.clamp(b.lo, b.hi);
            rows.push(BranchRow { p: b.p, x, v_pot: b.potential(x)?, v: b.velocity(x)?, direction: b.direction.as_str() });
        }
    }
    Ok(rows)
}

pub fn write_branches<W: Write>(w: W, rows: &[BranchRow]) -> Result<()> {
    let mut out = writer(w);
    out.write_record(["P", "x", "V", "v", "direction"])?;
    for r in rows {
        out.write_record([r.p.to_string(), r.x.to_string(), r.v_pot.to_string(), r.v.to_string(), r.direction.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

/// `branch,x,p`.
pub fn write_phase<W: Write>(w: W, curve: &PhaseCurve) -> Result<()> {
    let mut out = writer(w);
    out.write_record(["branch", "x", "p"])?;
    for (i, line) in curve.branches.iter().enumerate() {
        for (x, p) in line {
            out.write_record([i.to_string(), x.to_string(), p.to_string()])?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn read_phase<R: Read>(r: R) -> Result<Vec<Vec<(f64, f64)>>> {
    let mut rd = reader(r);
    let mut out: Vec<Vec<(f64, f64)>> = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        let i = parse_usize(field(&rec, 0)?)?;
        while out.len() <= i {
            out.push(Vec::new());
        }
        out[i].push((parse_f64(field(&rec, 1)?)?, parse_f64(field(&rec, 2)?)?));
    }
    Ok(out)
}

/// `t,x,v,P,E_residual`.
pub fn write_trajectory<W: Write>(w: W, traj: &Trajectory) -> Result<()> {
    let mut out = writer(w);
    out.write_record(["t", "x", "v", "P", "E_residual"])?;
    for s in &traj.samples {
        out.write_record([s.t.to_string(), s.x.to_string(), s.v.to_string(), s.p.to_string(), s.e_residual.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_trajectory<R: Read>(r: R) -> Result<Vec<Sample>> {
    let mut rd = reader(r);
    let mut out = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        out.push(Sample {
            t: parse_f64(field(&rec, 0)?)?,
            x: parse_f64(field(&rec, 1)?)?,
            v: parse_f64(field(&rec, 2)?)?,
            p: parse_usize(field(&rec, 3)?)?,
            e_residual: parse_f64(field(&rec, 4)?)?,
        });
    }
    Ok(out)
}

/// `t,x,P_before,P_after`.
pub fn write_events<W: Write>(w: W, events: &[Event]) -> Result<()> {
    let mut out = writer(w);
    out.write_record(["t", "x", "P_before", "P_after"])?;
    for e in events {
        out.write_record([e.t.to_string(), e.x.to_string(), e.p_before.to_string(), e.p_after.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_events<R: Read>(r: R) -> Result<Vec<Event>> {
    let mut rd = reader(r);
    let mut out = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        out.push(Event {
            t: parse_f64(field(&rec, 0)?)?,
            x: parse_f64(field(&rec, 1)?)?,
            p_before: parse_usize(field(&rec, 2)?)?,
            p_after: parse_usize(field(&rec, 3)?)?,
        });
    }
    Ok(out)
}

/// Any two-column numeric table, e.g. `x,V` or `X,V`.
pub fn write_xy<W: Write>(w: W, header: [&str; 2], rows: &[(f64, f64)]) -> Result<()> {
    let mut out = writer(w);
    out.write_record(header)?;
    for (a, b) in rows {
        out.write_record([a.to_string(), b.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_xy<R: Read>(r: R) -> Result<Vec<(f64, f64)>> {
    let mut rd = reader(r);
    let mut out = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        out.push((parse_f64(field(&rec, 0)?)?, parse_f64(field(&rec, 1)?)?));
    }
    Ok(out)
}

/// Header plus preformatted rows, for tables with mixed column types.
pub fn write_table<W: Write>(w: W, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut out = writer(w);
    out.write_record(header)?;
    for r in rows {
        out.write_record(r)?;
    }
    out.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchMeta {
    pub p: usize,
    pub signs: String,
    pub interval: [f64; 2],
    pub start: f64,
    pub end: f64,
    pub turning_points: Vec<f64>,
    pub direction: String,
}

/// Ladder metadata: intervals, turning points, covering offsets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LadderMeta {
    pub s: f64,
    pub branches: Vec<BranchMeta>,
    pub offsets: Vec<f64>,
    pub halted: Option<String>,
    #[serde(rename = "tool-version")]
    pub tool_version: String,
}

impl LadderMeta {
    pub fn of(ladder: &SwitchbackLadder) -> Self {
        LadderMeta {
            s: ladder.s,
            branches: ladder
                .branches
                .iter()
                .map(|b| BranchMeta {
                    p: b.p,
                    signs: b.sign_path(),
                    interval: [b.lo, b.hi],
                    start: b.start,
                    end: b.end,
                    turning_points: b.turning_points.clone(),
                    direction: b.direction.as_str().to_string(),
                })
                .collect(),
            offsets: ladder.offsets.clone(),
            halted: ladder.halted.as_ref().map(|e| e.to_string()),
            tool_version: TOOL_VERSION.to_string(),
        }
    }
}

pub fn read_ladder_meta<R: Read>(r: R) -> Result<LadderMeta> {
    Ok(serde_json::from_reader(r)?)
}

use std::path::Path;

use super::{atomic_write, sig6};
use crate::calibration::ForceSample;
use crate::error::{Error, Result};
use crate::solver::{Event, MotionTrace, TraceRow};

pub const TRACE_HEADER: &str = "time_s,temp_C,q_left,q_right,x_left_mm,x_right_mm,event";
const SAMPLES_HEADER: [&str; 2] = ["temp_C", "force_N"];

pub fn format_trace(trace: &MotionTrace) -> String {
    let mut out = String::with_capacity(64 * (trace.len() + 1));
    out.push_str(TRACE_HEADER);
    out.push('\n');
    for r in &trace.rows {
        let cols = [r.time_s, r.temp_c, r.q_left, r.q_right, r.x_left_mm, r.x_right_mm];
        for v in cols {
            out.push_str(&sig6(v));
            out.push(',');
        }
        out.push_str(r.event.token());
        out.push('\n');
    }
    out
}

pub fn emit_trace(trace: &MotionTrace, path: &Path) -> Result<()> {
    atomic_write(path, format_trace(trace).as_bytes())
}

fn reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes())
}

fn number(field: Option<&str>, line: u64, column: &str) -> Result<f64> {
    let at = || format!("line {line}, column {column}");
    field
        .ok_or_else(|| Error::parse(at(), "missing field"))?
        .parse()
        .map_err(|_| Error::parse(at(), "not a number"))
}

pub fn parse_trace(text: &str) -> Result<MotionTrace> {
    let mut rdr = reader(text);
    let header = rdr.headers().map_err(|e| Error::parse("header", e.to_string()))?;
    if header.iter().collect::<Vec<_>>().join(",") != TRACE_HEADER {
        return Err(Error::parse("header", format!("expected `{TRACE_HEADER}`")));
    }
    let names: Vec<&str> = TRACE_HEADER.split(',').collect();
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let line = i as u64 + 2;
        let rec = rec.map_err(|e| Error::parse(format!("line {line}"), e.to_string()))?;
        let v = |k: usize| number(rec.get(k), line, names[k]);
        let token = rec.get(6).unwrap_or("");
        let event = Event::from_token(token)
            .ok_or_else(|| Error::parse(format!("line {line}, column event"), format!("unknown token `{token}`")))?;
        rows.push(TraceRow {
            time_s: v(0)?,
            temp_c: v(1)?,
            q_left: v(2)?,
            q_right: v(3)?,
            x_left_mm: v(4)?,
            x_right_mm: v(5)?,
            event,
        });
    }
    Ok(MotionTrace { rows })
}

pub fn parse_samples(text: &str) -> Result<Vec<ForceSample>> {
    let mut rdr = reader(text);
    let header = rdr.headers().map_err(|e| Error::parse("header", e.to_string()))?;
    if header.iter().collect::<Vec<_>>() != SAMPLES_HEADER {
        return Err(Error::parse("header", "expected `temp_C,force_N`"));
    }
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let line = i as u64 + 2;
        let rec = rec.map_err(|e| Error::parse(format!("line {line}"), e.to_string()))?;
        let t_c = number(rec.get(0), line, "temp_C")?;
        let f_n = number(rec.get(1), line, "force_N")?;
        if !(f_n >= 0.0) {
            return Err(Error::parse(format!("line {line}, column force_N"), "force must be non-negative"));
        }
        out.push(ForceSample { t_c, f_n });
    }
    if out.is_empty() {
        return Err(Error::parse("samples", "no samples"));
    }
    Ok(out)
}

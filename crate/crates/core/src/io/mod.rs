//! File formats: trace and sample CSVs, sweep tables, reports and SVG plots.

mod report;
mod svg;
mod table;
mod trace;

pub use report::{fit_report, metrics_document};
pub use svg::{emit_plot, render_plot, PlotSpec, RefLine, Series};
pub use table::{sweep_csv, sweep_table};
pub use trace::{emit_trace, format_trace, parse_samples, parse_trace, TRACE_HEADER};

use std::io::Write;
use std::path::Path;

use crate::error::Result;

/// Formats `x` with six significant digits, `%g` style: fixed notation for
/// decimal exponents in `[-4, 6)`, scientific otherwise, trailing zeros removed.
pub fn sig6(x: f64) -> String {
    const DIGITS: i32 = 6;
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    // Round first so that the exponent reflects the rounded value (9.999996 -> 10).
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..DIGITS).contains(&exp) {
        let decimals = (DIGITS - 1 - exp).max(0) as usize;
        trim_zeros(format!("{:.*}", decimals, x))
    } else {
        let m = trim_zeros(mantissa.to_string());
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    let t = s.trim_end_matches('0').trim_end_matches('.');
    if t == "-0" {
        "0".to_string()
    } else {
        t.to_string()
    }
}

/// Writes `bytes` to a temporary file next to `path` and renames it into place.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::sig6;

    #[test]
    fn six_significant_digits() {
        assert_eq!(sig6(0.0), "0");
        assert_eq!(sig6(-0.0), "0");
        assert_eq!(sig6(11.25), "11.25");
        assert_eq!(sig6(1.0 / 3.0), "0.333333");
        assert_eq!(sig6(123456.7), "123457");
        assert_eq!(sig6(1234567.0), "1.23457e+06");
        assert_eq!(sig6(9.9999996), "10");
        assert_eq!(sig6(1.5e-7), "1.5e-07");
        assert_eq!(sig6(-2.0e-5), "-2e-05");
        assert_eq!(sig6(0.0001), "0.0001");
        assert_eq!(sig6(-1e-12), "-1e-12");
    }
}

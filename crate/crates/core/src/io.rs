//! CSV encoding of series: `timestamp,value` or a single `value` column.
//!
//! Missing observations are empty fields or the literal `NaN` on input and
//! are written as empty fields.

use std::io::{BufRead, BufReader, Read, Write};

use crate::error::{Error, Result};
use crate::series::TimeSeries;

fn parse_value(field: &str, line: usize) -> Result<Option<f64>> {
    let field = field.trim();
    if field.is_empty() || field.eq_ignore_ascii_case("nan") {
        return Ok(None);
    }
    let v: f64 = field
        .parse()
        .map_err(|_| Error::Parse(format!("line {line}: `{field}` is not a number")))?;
    if !v.is_finite() {
        return Err(Error::Parse(format!("line {line}: non-finite value `{field}`")));
    }
    Ok(Some(v))
}

pub fn read_series<R: Read>(reader: R) -> Result<TimeSeries> {
    let mut lines = BufReader::new(reader).lines();
    let header = match lines.next() {
        Some(h) => h?,
        None => return Err(Error::Parse("empty file".into())),
    };
    let headers: Vec<&str> = header.trim_start_matches('\u{feff}').split(',').map(str::trim).collect();
    let value_col = headers
        .iter()
        .position(|&h| h == "value")
        .ok_or_else(|| Error::Parse("missing `value` column".into()))?;
    let ts_col = headers.iter().position(|&h| h == "timestamp");

    let mut observations = Vec::new();
    let mut timestamps = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        let lineno = i + 2;
        let line = line.trim_end_matches('\r');
        // blank lines carry no timestamp in the two-column schema
        if line.is_empty() && headers.len() > 1 {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != headers.len() {
            return Err(Error::Parse(format!(
                "line {lineno}: expected {} fields, found {}",
                headers.len(),
                fields.len()
            )));
        }
        observations.push(parse_value(fields[value_col], lineno)?);
        if let Some(c) = ts_col {
            let raw = fields[c].trim();
            let ts: i64 = raw
                .parse()
                .map_err(|_| Error::Parse(format!("line {lineno}: bad timestamp `{raw}`")))?;
            timestamps.push(ts);
        }
    }
    let series = TimeSeries::from_observations(observations)?;
    if ts_col.is_some() {
        series.with_timestamps(timestamps)
    } else {
        Ok(series)
    }
}

pub fn read_series_file(path: &std::path::Path) -> Result<TimeSeries> {
    read_series(std::fs::File::open(path)?)
}

fn format_value(v: Option<f64>) -> String {
    v.map(|x| format!("{x:?}")).unwrap_or_default()
}

pub fn write_series<W: Write>(series: &TimeSeries, writer: W) -> Result<()> {
    let mut w = std::io::BufWriter::new(writer);
    match series.timestamps() {
        Some(ts) => {
            writeln!(w, "timestamp,value")?;
            for (i, t) in ts.iter().enumerate() {
                writeln!(w, "{t},{}", format_value(series.get(i)))?;
            }
        }
        None => {
            writeln!(w, "value")?;
            for i in 0..series.len() {
                writeln!(w, "{}", format_value(series.get(i)))?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_series_file(series: &TimeSeries, path: &std::path::Path) -> Result<()> {
    write_series(series, std::fs::File::create(path)?)
}

//! Labelled feature matrices and column standardisation.

use std::fmt;
use std::io::{BufRead, BufReader, Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::FeatureVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Origin {
    Original,
    Synthetic,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Origin::Original => "original",
            Origin::Synthetic => "synthetic",
        })
    }
}

impl FromStr for Origin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "original" => Ok(Origin::Original),
            "synthetic" => Ok(Origin::Synthetic),
            other => Err(Error::Parse(format!("unknown origin `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowLabel {
    pub id: String,
    pub model: String,
    pub origin: Origin,
}

impl RowLabel {
    pub fn new(id: impl Into<String>, model: impl Into<String>, origin: Origin) -> Self {
        Self {
            id: id.into(),
            model: model.into(),
            origin,
        }
    }
}

/// Rows of finite feature values, one per series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureMatrix {
    rows: Vec<RowLabel>,
    columns: Vec<String>,
    data: Vec<Vec<f64>>,
    zero_variance: Vec<bool>,
}

impl FeatureMatrix {
    pub fn new(rows: Vec<RowLabel>, columns: Vec<String>, data: Vec<Vec<f64>>) -> Result<Self> {
        if rows.len() != data.len() {
            return Err(Error::LengthMismatch {
                left: rows.len(),
                right: data.len(),
            });
        }
        for row in &data {
            if row.len() != columns.len() {
                return Err(Error::LengthMismatch {
                    left: columns.len(),
                    right: row.len(),
                });
            }
            if let Some(i) = row.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFinite(i));
            }
        }
        let zero_variance = vec![false; columns.len()];
        Ok(Self {
            rows,
            columns,
            data,
            zero_variance,
        })
    }

    /// Stacks feature vectors that share one column layout.
    pub fn from_vectors(rows: Vec<RowLabel>, vectors: &[FeatureVector]) -> Result<Self> {
        let columns = match vectors.first() {
            Some(v) => v.names().to_vec(),
            None => Vec::new(),
        };
        if let Some(bad) = vectors.iter().find(|v| v.names() != columns.as_slice()) {
            return Err(Error::InvalidArgument(format!(
                "feature layout differs: {:?} vs {:?}",
                bad.names(),
                columns
            )));
        }
        let data = vectors.iter().map(|v| v.values().to_vec()).collect();
        Self::new(rows, columns, data)
    }

    pub fn nrows(&self) -> usize {
        self.data.len()
    }

    pub fn ncols(&self) -> usize {
        self.columns.len()
    }

    pub fn rows(&self) -> &[RowLabel] {
        &self.rows
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn data(&self) -> &[Vec<f64>] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.data.iter().map(|r| r[j]).collect()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Columns found constant by the last standardisation.
    pub fn zero_variance(&self) -> &[bool] {
        &self.zero_variance
    }

    pub fn zero_variance_columns(&self) -> Vec<&str> {
        self.columns
            .iter()
            .zip(&self.zero_variance)
            .filter(|(_, &z)| z)
            .map(|(c, _)| c.as_str())
            .collect()
    }

    /// Model label of each row as a dense integer, numbered by first
    /// appearance.
    pub fn model_labels(&self) -> Vec<usize> {
        let mut seen: Vec<&str> = Vec::new();
        self.rows
            .iter()
            .map(|r| match seen.iter().position(|m| *m == r.model) {
                Some(i) => i,
                None => {
                    seen.push(&r.model);
                    seen.len() - 1
                }
            })
            .collect()
    }

    /// Keeps the rows for which `keep` holds.
    pub fn filter_rows(&self, mut keep: impl FnMut(&RowLabel) -> bool) -> Self {
        let (rows, data) = self
            .rows
            .iter()
            .zip(&self.data)
            .filter(|(r, _)| keep(r))
            .map(|(r, d)| (r.clone(), d.clone()))
            .unzip();
        Self {
            rows,
            columns: self.columns.clone(),
            data,
            zero_variance: self.zero_variance.clone(),
        }
    }

    /// Keeps the named columns, in the given order.
    pub fn select_columns(&self, names: &[&str]) -> Result<Self> {
        let idx = names
            .iter()
            .map(|n| {
                self.column_index(n)
                    .ok_or_else(|| Error::InvalidArgument(format!("no column `{n}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            rows: self.rows.clone(),
            columns: idx.iter().map(|&j| self.columns[j].clone()).collect(),
            data: self.data.iter().map(|r| idx.iter().map(|&j| r[j]).collect()).collect(),
            zero_variance: idx.iter().map(|&j| self.zero_variance[j]).collect(),
        })
    }

    /// Appends `other`'s rows; both must have the same columns.
    pub fn concat(&self, other: &Self) -> Result<Self> {
        if self.columns != other.columns {
            return Err(Error::InvalidArgument("column sets differ".into()));
        }
        let mut out = self.clone();
        out.rows.extend(other.rows.iter().cloned());
        out.data.extend(other.data.iter().cloned());
        Ok(out)
    }

    /// `series_id,model,origin,<features...>` with a header row.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = std::io::BufWriter::new(writer);
        write!(w, "series_id,model,origin")?;
        for c in &self.columns {
            write!(w, ",{c}")?;
        }
        writeln!(w)?;
        for (label, row) in self.rows.iter().zip(&self.data) {
            write!(w, "{},{},{}", label.id, label.model, label.origin)?;
            for v in row {
                write!(w, ",{v:?}")?;
            }
            writeln!(w)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut lines = BufReader::new(reader).lines();
        let header = match lines.next() {
            Some(h) => h?,
            None => return Err(Error::Parse("empty feature file".into())),
        };
        let head: Vec<&str> = header.trim_end().split(',').collect();
        if head.len() < 3 || head[..3] != ["series_id", "model", "origin"] {
            return Err(Error::Parse(format!("unexpected feature header `{header}`")));
        }
        let columns: Vec<String> = head[3..].iter().map(|s| s.to_string()).collect();
        let mut rows = Vec::new();
        let mut data = Vec::new();
        for (n, line) in lines.enumerate() {
            let line = line?;
            let line = line.trim_end();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != head.len() {
                return Err(Error::Parse(format!(
                    "line {}: expected {} fields, found {}",
                    n + 2,
                    head.len(),
                    fields.len()
                )));
            }
            rows.push(RowLabel::new(fields[0], fields[1], fields[2].parse()?));
            let values = fields[3..]
                .iter()
                .map(|f| {
                    f.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::Parse(format!("line {}: bad number `{f}`", n + 2)))
                })
                .collect::<Result<Vec<_>>>()?;
            data.push(values);
        }
        Self::new(rows, columns, data)
    }
}

/// Centres each column and scales it to unit sample standard deviation
/// (denominator `n - 1`). Constant columns become zeros and are flagged.
pub fn standardize(m: &FeatureMatrix) -> Result<FeatureMatrix> {
    let n = m.nrows();
    if n < 2 {
        return Err(Error::TooFewRows { needed: 2, got: n });
    }
    let mut out = m.clone();
    for j in 0..m.ncols() {
        let col = m.column(j);
        let mean = col.iter().sum::<f64>() / n as f64;
        let ss: f64 = col.iter().map(|x| (x - mean).powi(2)).sum();
        let sd = (ss / (n - 1) as f64).sqrt();
        let scale = col.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        let constant = sd <= 1e-12 * scale || sd == 0.0;
        out.zero_variance[j] = constant;
        for (row, x) in out.data.iter_mut().zip(&col) {
            row[j] = if constant { 0.0 } else { (x - mean) / sd };
        }
    }
    Ok(out)
}

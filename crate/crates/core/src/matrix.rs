//! Observation-by-variable matrices and their CSV form.
//!
//! Both matrices are stored row-major: one row per observation (time point or
//! Fourier frequency), one column per variable. The CSV form has a header row
//! of variable labels followed by one line per observation.

use std::collections::HashSet;
use std::io::{Read, Write};

use crate::error::{Error, Result};

fn check_labels(labels: &[String]) -> Result<()> {
    let mut seen = HashSet::with_capacity(labels.len());
    for l in labels {
        if l.is_empty() {
            return Err(Error::invalid("empty variable label"));
        }
        if !seen.insert(l.as_str()) {
            return Err(Error::invalid(format!("duplicate variable label {l:?}")));
        }
    }
    Ok(())
}

/// Continuous multivariate series, `n_time × n_vars`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesMatrix {
    values: Vec<f64>,
    labels: Vec<String>,
    n_time: usize,
}

impl SeriesMatrix {
    pub fn new(labels: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self> {
        check_labels(&labels)?;
        if labels.is_empty() {
            return Err(Error::invalid("series matrix needs at least one variable"));
        }
        if rows.len() < 2 {
            return Err(Error::invalid("series matrix needs at least two time points"));
        }
        let n_vars = labels.len();
        let mut values = Vec::with_capacity(rows.len() * n_vars);
        for (t, row) in rows.iter().enumerate() {
            if row.len() != n_vars {
                return Err(Error::invalid(format!(
                    "time point {t} has {} values, expected {n_vars}",
                    row.len()
                )));
            }
            if let Some(bad) = row.iter().find(|v| !v.is_finite()) {
                return Err(Error::invalid(format!("non-finite value {bad} at time point {t}")));
            }
            values.extend_from_slice(row);
        }
        Ok(Self {
            values,
            labels,
            n_time: rows.len(),
        })
    }

    pub fn n_time(&self) -> usize {
        self.n_time
    }

    pub fn n_vars(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn get(&self, t: usize, v: usize) -> f64 {
        self.values[t * self.n_vars() + v]
    }

    /// Copy of one variable's series.
    pub fn column(&self, v: usize) -> Vec<f64> {
        (0..self.n_time).map(|t| self.get(t, v)).collect()
    }

    /// Keep only the listed columns, in the given order.
    pub fn select(&self, keep: &[usize]) -> Self {
        let labels = keep.iter().map(|&v| self.labels[v].clone()).collect();
        let mut values = Vec::with_capacity(self.n_time * keep.len());
        for t in 0..self.n_time {
            values.extend(keep.iter().map(|&v| self.get(t, v)));
        }
        Self {
            values,
            labels,
            n_time: self.n_time,
        }
    }

    pub fn read_csv<R: Read>(reader: R, source_name: &str) -> Result<Self> {
        let (labels, records) = read_records(reader, source_name)?;
        let mut rows = Vec::with_capacity(records.len());
        for (line, rec) in records {
            let row = rec
                .iter()
                .map(|cell| {
                    let cell = cell.trim();
                    if cell.is_empty() {
                        return Err(parse_err(source_name, line, "missing value"));
                    }
                    cell.parse::<f64>()
                        .ok()
                        .filter(|v| v.is_finite())
                        .ok_or_else(|| {
                            parse_err(source_name, line, format!("not a finite number: {cell:?}"))
                        })
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        Self::new(labels, rows)
    }
}

/// 0/1 matrix, `n_obs × n_vars`. The input to every topological computation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryMatrix {
    bits: Vec<u8>,
    labels: Vec<String>,
    n_obs: usize,
}

impl BinaryMatrix {
    pub fn new(labels: Vec<String>, rows: Vec<Vec<u8>>) -> Result<Self> {
        check_labels(&labels)?;
        let n_vars = labels.len();
        let mut bits = Vec::with_capacity(rows.len() * n_vars);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n_vars {
                return Err(Error::invalid(format!(
                    "observation {i} has {} entries, expected {n_vars}",
                    row.len()
                )));
            }
            if row.iter().any(|&b| b > 1) {
                return Err(Error::invalid(format!("observation {i} has a non-binary entry")));
            }
            bits.extend_from_slice(row);
        }
        Ok(Self {
            bits,
            labels,
            n_obs: rows.len(),
        })
    }

    /// Convenience constructor for fixtures: labels as `&str`, rows as 0/1 literals.
    pub fn from_rows<const V: usize>(labels: [&str; V], rows: &[[u8; V]]) -> Result<Self> {
        Self::new(
            labels.iter().map(|s| s.to_string()).collect(),
            rows.iter().map(|r| r.to_vec()).collect(),
        )
    }

    pub(crate) fn from_parts(labels: Vec<String>, n_obs: usize, bits: Vec<u8>) -> Self {
        debug_assert_eq!(bits.len(), n_obs * labels.len());
        Self { bits, labels, n_obs }
    }

    pub fn n_obs(&self) -> usize {
        self.n_obs
    }

    pub fn n_vars(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn get(&self, obs: usize, var: usize) -> bool {
        self.bits[obs * self.n_vars() + var] == 1
    }

    pub fn row(&self, obs: usize) -> &[u8] {
        let v = self.n_vars();
        &self.bits[obs * v..(obs + 1) * v]
    }

    /// Sorted indices of the variables active in observation `obs`.
    pub fn active_set(&self, obs: usize) -> Vec<u32> {
        self.row(obs)
            .iter()
            .enumerate()
            .filter(|(_, &b)| b == 1)
            .map(|(i, _)| i as u32)
            .collect()
    }

    pub fn column_sum(&self, var: usize) -> usize {
        (0..self.n_obs).filter(|&o| self.get(o, var)).count()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Resolve labels to variable indices.
    pub fn indices_of(&self, labels: &[&str]) -> Result<Vec<usize>> {
        labels
            .iter()
            .map(|l| {
                self.index_of(l)
                    .ok_or_else(|| Error::invalid(format!("unknown variable {l:?}")))
            })
            .collect()
    }

    /// Drop observation rows (kept rows in the given order).
    pub fn select_rows(&self, keep: &[usize]) -> Self {
        let mut bits = Vec::with_capacity(keep.len() * self.n_vars());
        for &o in keep {
            bits.extend_from_slice(self.row(o));
        }
        Self::from_parts(self.labels.clone(), keep.len(), bits)
    }

    /// Keep only the listed columns, in the given order.
    pub fn select_columns(&self, keep: &[usize]) -> Self {
        let labels = keep.iter().map(|&v| self.labels[v].clone()).collect();
        let mut bits = Vec::with_capacity(self.n_obs * keep.len());
        for o in 0..self.n_obs {
            bits.extend(keep.iter().map(|&v| self.bits[o * self.n_vars() + v]));
        }
        Self::from_parts(labels, self.n_obs, bits)
    }

    pub fn read_csv<R: Read>(reader: R, source_name: &str) -> Result<Self> {
        let (labels, records) = read_records(reader, source_name)?;
        let mut rows = Vec::with_capacity(records.len());
        for (line, rec) in records {
            let row = rec
                .iter()
                .map(|cell| match cell.trim() {
                    "0" => Ok(0u8),
                    "1" => Ok(1u8),
                    other => Err(parse_err(
                        source_name,
                        line,
                        format!("expected 0 or 1, found {other:?}"),
                    )),
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        Self::new(labels, rows)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().from_writer(writer);
        w.write_record(&self.labels).map_err(csv_io)?;
        for o in 0..self.n_obs {
            w.write_record(self.row(o).iter().map(|&b| if b == 1 { "1" } else { "0" }))
                .map_err(csv_io)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("csv output is utf-8")
    }
}

fn csv_io(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

fn parse_err(source_name: &str, line: u64, message: impl Into<String>) -> Error {
    Error::Parse {
        source_name: source_name.to_string(),
        line,
        message: message.into(),
    }
}

type Records = Vec<(u64, csv::StringRecord)>;

fn read_records<R: Read>(reader: R, source_name: &str) -> Result<(Vec<String>, Records)> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(reader);
    let header = rdr
        .headers()
        .map_err(|e| parse_err(source_name, 1, e.to_string()))?
        .clone();
    let labels: Vec<String> = header
        .iter()
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty() || header.len() > 1)
        .collect();
    let mut records = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            parse_err(source_name, line, e.to_string())
        })?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        records.push((line, rec));
    }
    Ok((labels, records))
}

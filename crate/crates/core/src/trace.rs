//! Per-iteration records and their CSV form.

use crate::environment::Feature;
use crate::error::{Error, Result};
use serde::Serialize;
use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

pub const CSV_HEADER: [&str; 16] = [
    "t",
    "E",
    "s0",
    "s1",
    "k1",
    "food",
    "predator",
    "tree",
    "rock",
    "sun",
    "w_tree_ex",
    "w_tree_in",
    "w_rock_ex",
    "w_rock_in",
    "w_sun_ex",
    "w_sun_in",
];

/// Post-iteration values of one iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub t: u64,
    /// Exploration computed in this iteration.
    pub e: f64,
    pub s0: f64,
    pub s1: f64,
    pub k1: f64,
    pub food: bool,
    pub predator: bool,
    pub tree: bool,
    pub rock: bool,
    pub sun: bool,
    /// tree_ex, tree_in, rock_ex, rock_in, sun_ex, sun_in
    pub weights: [f64; 6],
}

impl TraceRow {
    pub fn feature(&self, f: Feature) -> bool {
        match f {
            Feature::Tree => self.tree,
            Feature::Rock => self.rock,
            Feature::Sun => self.sun,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trace {
    pub rows: Vec<TraceRow>,
}

impl Trace {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn exploration(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.e).collect()
    }

    pub fn food_iterations(&self) -> Vec<u64> {
        self.rows.iter().filter(|r| r.food).map(|r| r.t).collect()
    }

    pub fn predator_iterations(&self) -> Vec<u64> {
        self.rows
            .iter()
            .filter(|r| r.predator)
            .map(|r| r.t)
            .collect()
    }

    /// First iteration with zero exploration after the agent has moved at least once.
    pub fn first_cessation(&self) -> Option<u64> {
        let started = self.rows.iter().position(|r| r.e > 0.0)?;
        self.rows[started..]
            .iter()
            .find(|r| r.e == 0.0)
            .map(|r| r.t)
    }

    pub fn summary(&self) -> TraceSummary {
        let es = self.exploration();
        let (mut e_min, mut e_max, mut e_max_at) = (f64::INFINITY, f64::NEG_INFINITY, 0);
        for r in &self.rows {
            e_min = e_min.min(r.e);
            if r.e > e_max {
                e_max = r.e;
                e_max_at = r.t;
            }
        }
        let total: f64 = es.iter().sum();
        let last = self.rows.last().map(|r| r.weights).unwrap_or_default();
        let final_weights = WEIGHT_COLUMNS
            .iter()
            .zip(last)
            .map(|(k, v)| (k.to_string(), v))
            .collect();
        TraceSummary {
            iterations: self.rows.len() as u64,
            food_iterations: self.food_iterations(),
            predator_iterations: self.predator_iterations(),
            e_min: if self.rows.is_empty() { 0.0 } else { e_min },
            e_max: if self.rows.is_empty() { 0.0 } else { e_max },
            e_max_at,
            e_mean: if es.is_empty() {
                0.0
            } else {
                total / es.len() as f64
            },
            total_exploration: total,
            first_cessation: self.first_cessation(),
            final_weights,
        }
    }
}

pub const WEIGHT_COLUMNS: [&str; 6] = [
    "w_tree_ex",
    "w_tree_in",
    "w_rock_ex",
    "w_rock_in",
    "w_sun_ex",
    "w_sun_in",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceSummary {
    pub iterations: u64,
    pub food_iterations: Vec<u64>,
    pub predator_iterations: Vec<u64>,
    pub e_min: f64,
    pub e_max: f64,
    pub e_max_at: u64,
    pub e_mean: f64,
    pub total_exploration: f64,
    pub first_cessation: Option<u64>,
    pub final_weights: BTreeMap<String, f64>,
}

impl TraceSummary {
    pub fn to_yaml(&self) -> String {
        serde_yaml::to_string(self).expect("summary serializes")
    }
}

/// Shortest decimal that parses back to the same `f64`; scientific notation
/// only for very small or very large magnitudes.
pub fn format_real(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-5..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn bit(b: bool) -> &'static str {
    if b {
        "1"
    } else {
        "0"
    }
}

pub fn write_trace_to<W: Write>(trace: &Trace, out: W) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in &trace.rows {
        let mut rec: Vec<String> = vec![
            r.t.to_string(),
            format_real(r.e),
            format_real(r.s0),
            format_real(r.s1),
            format_real(r.k1),
        ];
        rec.extend([r.food, r.predator, r.tree, r.rock, r.sun].map(|b| bit(b).to_string()));
        rec.extend(r.weights.iter().map(|w| format_real(*w)));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn trace_to_string(trace: &Trace) -> String {
    let mut buf = Vec::new();
    write_trace_to(trace, &mut buf).expect("in-memory write");
    String::from_utf8(buf).expect("ascii output")
}

/// Writes `contents` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(path, e))?;
    tmp.write_all(contents).map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

pub fn write_trace(trace: &Trace, path: &Path) -> Result<()> {
    write_atomic(path, trace_to_string(trace).as_bytes())
}

fn parse_field<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize, line: u64) -> Result<T> {
    rec.get(i)
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::Trace(format!("line {line}: bad `{}` value", CSV_HEADER[i])))
}

fn parse_bit(rec: &csv::StringRecord, i: usize, line: u64) -> Result<bool> {
    match rec.get(i) {
        Some("0") => Ok(false),
        Some("1") => Ok(true),
        _ => Err(Error::Trace(format!(
            "line {line}: `{}` must be 0 or 1",
            CSV_HEADER[i]
        ))),
    }
}

pub fn read_trace_from<R: std::io::Read>(input: R) -> Result<Trace> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(input);
    let header = rdr.headers().map_err(|e| Error::Trace(e.to_string()))?;
    if header.iter().ne(CSV_HEADER.iter().copied()) {
        return Err(Error::Trace(format!(
            "unexpected header `{}`",
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let line = i as u64 + 2;
        let rec = rec.map_err(|e| Error::Trace(e.to_string()))?;
        let mut weights = [0.0; 6];
        for (k, w) in weights.iter_mut().enumerate() {
            *w = parse_field(&rec, 10 + k, line)?;
        }
        rows.push(TraceRow {
            t: parse_field(&rec, 0, line)?,
            e: parse_field(&rec, 1, line)?,
            s0: parse_field(&rec, 2, line)?,
            s1: parse_field(&rec, 3, line)?,
            k1: parse_field(&rec, 4, line)?,
            food: parse_bit(&rec, 5, line)?,
            predator: parse_bit(&rec, 6, line)?,
            tree: parse_bit(&rec, 7, line)?,
            rock: parse_bit(&rec, 8, line)?,
            sun: parse_bit(&rec, 9, line)?,
            weights,
        });
    }
    Ok(Trace { rows })
}

pub fn read_trace(path: &Path) -> Result<Trace> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_trace_from(std::io::BufReader::new(file))
}

//! Parameter sweeps: a cartesian grid over run-config keys, replicated with
//! seeds derived from the base seed.
//!
//! ```yaml
//! base:                 # any run configuration
//!   c2: 0.5
//!   c3: 0.25
//! parameters:
//!   - path: k1_init
//!     values: [0.5, 0.7, 0.9]
//! replicates: 20
//! max_cells: 1000       # optional
//! statistics: [mean_e, total_e, first_cessation]   # optional, default all
//! ```
//!
//! Replicate `r` of every cell runs with seed `derive_seed(base.seed, r)`, so
//! cells are compared on common random numbers.

use crate::config::{RunConfig, KEYS};
use crate::engine::run;
use crate::error::{Error, Result};
use crate::rng::derive_seeds;
use crate::trace::{format_real, write_atomic, Trace, WEIGHT_COLUMNS};
use rayon::prelude::*;
use serde::Deserialize;
use serde_yaml::Value;
use std::path::Path;

pub const DEFAULT_MAX_CELLS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistic {
    MeanE,
    MinE,
    MaxE,
    TotalE,
    FirstCessation,
    FinalWeights,
}

impl Statistic {
    pub const ALL: [Statistic; 6] = [
        Statistic::MeanE,
        Statistic::MinE,
        Statistic::MaxE,
        Statistic::TotalE,
        Statistic::FirstCessation,
        Statistic::FinalWeights,
    ];

    fn columns(self) -> Vec<&'static str> {
        match self {
            Statistic::MeanE => vec!["mean_e"],
            Statistic::MinE => vec!["min_e"],
            Statistic::MaxE => vec!["max_e"],
            Statistic::TotalE => vec!["total_e"],
            Statistic::FirstCessation => vec!["first_cessation", "ceased"],
            Statistic::FinalWeights => WEIGHT_COLUMNS.to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub path: String,
    pub values: Vec<Value>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub base: RunConfig,
    pub axes: Vec<Axis>,
    pub replicates: u64,
    pub max_cells: usize,
    pub statistics: Vec<Statistic>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecFile {
    #[serde(default)]
    base: Value,
    #[serde(default)]
    parameters: Vec<AxisFile>,
    #[serde(default = "one")]
    replicates: u64,
    #[serde(default)]
    max_cells: Option<usize>,
    #[serde(default)]
    statistics: Option<Vec<Statistic>>,
}

fn one() -> u64 {
    1
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AxisFile {
    path: String,
    values: Vec<Value>,
}

impl SweepSpec {
    pub fn new(base: RunConfig, axes: Vec<Axis>, replicates: u64) -> Self {
        Self {
            base,
            axes,
            replicates,
            max_cells: DEFAULT_MAX_CELLS,
            statistics: Statistic::ALL.to_vec(),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let file: SpecFile = serde_yaml::from_str(text).map_err(|e| {
            let (line, column) = e
                .location()
                .map(|l| (l.line(), l.column()))
                .unwrap_or((0, 0));
            Error::Syntax {
                line,
                column,
                message: e.to_string(),
            }
        })?;
        let base = RunConfig::from_value(file.base)?;
        let spec = SweepSpec {
            base,
            axes: file
                .parameters
                .into_iter()
                .map(|a| Axis {
                    path: a.path,
                    values: a.values,
                })
                .collect(),
            replicates: file.replicates,
            max_cells: file.max_cells.unwrap_or(DEFAULT_MAX_CELLS),
            statistics: file.statistics.unwrap_or_else(|| Statistic::ALL.to_vec()),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicates < 1 {
            return Err(Error::invalid("replicates", "must be >= 1"));
        }
        for (i, axis) in self.axes.iter().enumerate() {
            if axis.path == "seed" {
                return Err(Error::invalid(
                    format!("parameters[{i}].path"),
                    "seeds are derived per replicate and cannot be swept",
                ));
            }
            if !KEYS.contains(&axis.path.as_str()) {
                return Err(Error::UnknownKey {
                    key: axis.path.clone(),
                });
            }
            if axis.values.is_empty() {
                return Err(Error::invalid(
                    format!("parameters[{i}].values"),
                    "must not be empty",
                ));
            }
        }
        let cells = self.cell_count();
        if cells > self.max_cells {
            return Err(Error::CellLimit {
                cells,
                limit: self.max_cells,
            });
        }
        Ok(())
    }

    pub fn cell_count(&self) -> usize {
        self.axes
            .iter()
            .map(|a| a.values.len())
            .fold(1usize, |acc, n| acc.saturating_mul(n))
    }

    /// Parameter values of cell `index`; the first axis varies slowest.
    fn cell_values(&self, mut index: usize) -> Vec<&Value> {
        let mut out = vec![&Value::Null; self.axes.len()];
        for (k, axis) in self.axes.iter().enumerate().rev() {
            let n = axis.values.len();
            out[k] = &axis.values[index % n];
            index /= n;
        }
        out
    }

    fn cell_config(&self, values: &[&Value], seed: u64) -> Result<RunConfig> {
        let mut tree = self.base.to_value();
        let map = tree.as_mapping_mut().expect("rendered config is a mapping");
        for (axis, v) in self.axes.iter().zip(values) {
            map.insert(Value::String(axis.path.clone()), (*v).clone());
        }
        map.insert(Value::String("seed".into()), Value::Number(seed.into()));
        RunConfig::from_value(tree)
    }
}

/// Per-run statistics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunStats {
    pub mean_e: f64,
    pub min_e: f64,
    pub max_e: f64,
    pub total_e: f64,
    pub first_cessation: Option<u64>,
    pub final_weights: [f64; 6],
}

impl RunStats {
    pub fn from_trace(trace: &Trace) -> Self {
        let s = trace.summary();
        RunStats {
            mean_e: s.e_mean,
            min_e: s.e_min,
            max_e: s.e_max,
            total_e: s.total_exploration,
            first_cessation: s.first_cessation,
            final_weights: trace.rows.last().map(|r| r.weights).unwrap_or_default(),
        }
    }
}

/// Means over the replicates of one cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellStats {
    pub mean_e: f64,
    pub min_e: f64,
    pub max_e: f64,
    pub total_e: f64,
    /// Mean over the replicates that ceased exploring.
    pub first_cessation: Option<f64>,
    pub ceased_fraction: f64,
    pub final_weights: [f64; 6],
}

impl CellStats {
    fn aggregate(runs: &[RunStats]) -> Self {
        let n = runs.len() as f64;
        let mean = |f: &dyn Fn(&RunStats) -> f64| runs.iter().map(f).sum::<f64>() / n;
        let ceased: Vec<f64> = runs
            .iter()
            .filter_map(|r| r.first_cessation)
            .map(|t| t as f64)
            .collect();
        let mut w = [0.0; 6];
        for (k, slot) in w.iter_mut().enumerate() {
            *slot = mean(&|r| r.final_weights[k]);
        }
        CellStats {
            mean_e: mean(&|r| r.mean_e),
            min_e: mean(&|r| r.min_e),
            max_e: mean(&|r| r.max_e),
            total_e: mean(&|r| r.total_e),
            first_cessation: (!ceased.is_empty())
                .then(|| ceased.iter().sum::<f64>() / ceased.len() as f64),
            ceased_fraction: ceased.len() as f64 / n,
            final_weights: w,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplicateRow {
    pub cell: usize,
    pub replicate: u64,
    pub seed: u64,
    pub stats: RunStats,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellRow {
    pub cell: usize,
    pub values: Vec<Value>,
    pub stats: CellStats,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub axes: Vec<String>,
    pub statistics: Vec<Statistic>,
    /// Ordered by cell, then replicate.
    pub runs: Vec<ReplicateRow>,
    pub cells: Vec<CellRow>,
}

/// Runs every (cell, replicate) pair, in parallel on `jobs` workers
/// (rayon's default pool when `None`). Output order does not depend on
/// scheduling.
pub fn sweep(spec: &SweepSpec, jobs: Option<usize>) -> Result<SweepResult> {
    spec.validate()?;
    let seeds = derive_seeds(spec.base.seed, spec.replicates)
        .map_err(|(first, second)| Error::SeedCollision { first, second })?;
    let cells = spec.cell_count();
    let mut plan = Vec::with_capacity(cells * seeds.len());
    for cell in 0..cells {
        let values = spec.cell_values(cell);
        for (r, &seed) in seeds.iter().enumerate() {
            plan.push((cell, r as u64, spec.cell_config(&values, seed)?));
        }
    }

    let execute = || -> Result<Vec<ReplicateRow>> {
        plan.par_iter()
            .map(|(cell, replicate, config)| {
                let trace = run(config)?;
                Ok(ReplicateRow {
                    cell: *cell,
                    replicate: *replicate,
                    seed: config.seed,
                    stats: RunStats::from_trace(&trace),
                })
            })
            .collect()
    };
    let runs = match jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::invalid("jobs", e.to_string()))?
            .install(execute)?,
        None => execute()?,
    };

    let per_cell = seeds.len();
    let cell_rows = (0..cells)
        .map(|cell| {
            let stats: Vec<RunStats> = runs[cell * per_cell..(cell + 1) * per_cell]
                .iter()
                .map(|r| r.stats)
                .collect();
            CellRow {
                cell,
                values: spec.cell_values(cell).into_iter().cloned().collect(),
                stats: CellStats::aggregate(&stats),
            }
        })
        .collect();

    Ok(SweepResult {
        axes: spec.axes.iter().map(|a| a.path.clone()).collect(),
        statistics: spec.statistics.clone(),
        runs,
        cells: cell_rows,
    })
}

fn render_value(v: &Value) -> String {
    match v {
        Value::Number(n) => n
            .as_f64()
            .filter(|_| n.is_f64())
            .map(format_real)
            .unwrap_or_else(|| n.to_string()),
        Value::String(s) => s.clone(),
        Value::Bool(b) => b.to_string(),
        other => serde_yaml::to_string(other)
            .unwrap_or_default()
            .trim()
            .replace('\n', " "),
    }
}

impl SweepResult {
    pub fn header(&self) -> Vec<String> {
        let mut h: Vec<String> = ["kind", "cell", "replicate", "seed"]
            .map(String::from)
            .to_vec();
        h.extend(self.axes.iter().cloned());
        for s in &self.statistics {
            h.extend(s.columns().into_iter().map(String::from));
        }
        h
    }

    fn stat_fields(&self, run: Option<&RunStats>, cell: Option<&CellStats>) -> Vec<String> {
        let mut out = Vec::new();
        for s in &self.statistics {
            match (s, run, cell) {
                (Statistic::MeanE, Some(r), _) => out.push(format_real(r.mean_e)),
                (Statistic::MeanE, _, Some(c)) => out.push(format_real(c.mean_e)),
                (Statistic::MinE, Some(r), _) => out.push(format_real(r.min_e)),
                (Statistic::MinE, _, Some(c)) => out.push(format_real(c.min_e)),
                (Statistic::MaxE, Some(r), _) => out.push(format_real(r.max_e)),
                (Statistic::MaxE, _, Some(c)) => out.push(format_real(c.max_e)),
                (Statistic::TotalE, Some(r), _) => out.push(format_real(r.total_e)),
                (Statistic::TotalE, _, Some(c)) => out.push(format_real(c.total_e)),
                (Statistic::FirstCessation, Some(r), _) => {
                    out.push(r.first_cessation.map(|t| t.to_string()).unwrap_or_default());
                    out.push(u8::from(r.first_cessation.is_some()).to_string());
                }
                (Statistic::FirstCessation, _, Some(c)) => {
                    out.push(c.first_cessation.map(format_real).unwrap_or_default());
                    out.push(format_real(c.ceased_fraction));
                }
                (Statistic::FinalWeights, Some(r), _) => {
                    out.extend(r.final_weights.map(format_real))
                }
                (Statistic::FinalWeights, _, Some(c)) => {
                    out.extend(c.final_weights.map(format_real))
                }
                _ => unreachable!("one of run or cell is present"),
            }
        }
        out
    }

    /// One `run` row per (cell, replicate), then one `cell` row of means per cell.
    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(self.header()).expect("in-memory write");
        for r in &self.runs {
            let mut rec = vec![
                "run".to_string(),
                r.cell.to_string(),
                r.replicate.to_string(),
                r.seed.to_string(),
            ];
            rec.extend(self.cells[r.cell].values.iter().map(render_value));
            rec.extend(self.stat_fields(Some(&r.stats), None));
            w.write_record(&rec).expect("in-memory write");
        }
        for c in &self.cells {
            let mut rec = vec![
                "cell".to_string(),
                c.cell.to_string(),
                String::new(),
                String::new(),
            ];
            rec.extend(c.values.iter().map(render_value));
            rec.extend(self.stat_fields(None, Some(&c.stats)));
            w.write_record(&rec).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush to memory")).expect("ascii output")
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.to_csv().as_bytes())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::derive_seed;

    const SPEC: &str = "base:\n  c2: 0.5\n  c3: 0.25\n  seed: 9\n  iterations: 60\nparameters:\n  - path: k1_init\n    values: [0.5, 0.7]\n  - path: c1\n    values: [0.5, 0.75, 1.0]\nreplicates: 3\n";

    #[test]
    fn parse_and_grid_shape() {
        let spec = SweepSpec::parse(SPEC).unwrap();
        assert_eq!(spec.cell_count(), 6);
        let res = sweep(&spec, Some(2)).unwrap();
        assert_eq!(res.runs.len(), 18);
        assert_eq!(res.cells.len(), 6);
        for (i, r) in res.runs.iter().enumerate() {
            assert_eq!((r.cell, r.replicate), (i / 3, (i % 3) as u64));
            assert_eq!(r.seed, derive_seed(9, r.replicate));
        }
        // First axis varies slowest.
        assert_eq!(render_value(&res.cells[2].values[0]), "0.5");
        assert_eq!(render_value(&res.cells[3].values[0]), "0.7");
        assert_eq!(render_value(&res.cells[4].values[1]), "0.75");
    }

    #[test]
    fn output_independent_of_worker_count() {
        let spec = SweepSpec::parse(SPEC).unwrap();
        let a = sweep(&spec, Some(1)).unwrap().to_csv();
        let b = sweep(&spec, Some(4)).unwrap().to_csv();
        assert_eq!(a, b);
        assert_eq!(a.lines().count(), 1 + 18 + 6);
    }

    #[test]
    fn single_cell_matches_plain_run() {
        let spec =
            SweepSpec::parse("base:\n  seed: 5\n  c2: 0.5\n  c3: 0.25\nreplicates: 1\n").unwrap();
        let res = sweep(&spec, None).unwrap();
        let mut config = spec.base.clone();
        config.seed = derive_seed(5, 0);
        let trace = run(&config).unwrap();
        assert_eq!(res.runs[0].stats, RunStats::from_trace(&trace));
        assert_eq!(res.runs.len(), 1);
    }

    #[test]
    fn cell_limit_refused_with_count() {
        let text = "parameters:\n  - path: c1\n    values: [0.1, 0.2, 0.3]\n  - path: c2\n    values: [0.1, 0.2]\nmax_cells: 5\n";
        match SweepSpec::parse(text).unwrap_err() {
            Error::CellLimit { cells, limit } => assert_eq!((cells, limit), (6, 5)),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn bad_paths_and_values() {
        assert!(matches!(
            SweepSpec::parse("parameters:\n  - path: speed\n    values: [1]\n").unwrap_err(),
            Error::UnknownKey { .. }
        ));
        assert!(SweepSpec::parse("parameters:\n  - path: seed\n    values: [1]\n").is_err());
        // Invalid cell values surface when the grid is expanded.
        let spec = SweepSpec::parse("parameters:\n  - path: c3\n    values: [0.5, 2.0]\n").unwrap();
        assert!(matches!(
            sweep(&spec, None).unwrap_err(),
            Error::Invalid { .. }
        ));
    }

    #[test]
    fn statistic_selection_controls_columns() {
        let spec = SweepSpec::parse(
            "base:\n  iterations: 20\nreplicates: 2\nstatistics: [total_e, first_cessation]\n",
        )
        .unwrap();
        let res = sweep(&spec, None).unwrap();
        assert_eq!(
            res.header().join(","),
            "kind,cell,replicate,seed,total_e,first_cessation,ceased"
        );
    }
}

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::{Assertion, ExperimentConfig};
use crate::error::Result;
use crate::stats::Histogram;

pub const SCHEMA_VERSION: u32 = 1;
pub const STREAM_SCHEME: &str = "chacha8, key seed_from_u64(seed), stream = replicate index";

/// One output value. `a = None` marks rows pooled across `a`;
/// `replicate = None` marks aggregates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub a: Option<f64>,
    pub replicate: Option<usize>,
    pub statistic: String,
    pub value: f64,
}

impl Row {
    pub fn replicate(a: f64, replicate: usize, statistic: impl Into<String>, value: f64) -> Self {
        Row { a: Some(a), replicate: Some(replicate), statistic: statistic.into(), value }
    }

    pub fn aggregate(a: f64, statistic: impl Into<String>, value: f64) -> Self {
        Row { a: Some(a), replicate: None, statistic: statistic.into(), value }
    }

    pub fn pooled(statistic: impl Into<String>, value: f64) -> Self {
        Row { a: None, replicate: None, statistic: statistic.into(), value }
    }
}

/// Contiguous block of replicates handled by one worker thread.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorkerLedger {
    pub worker: usize,
    pub first_replicate: usize,
    pub end_replicate: usize,
    /// Sub-stream ids of the first and last replicate in the block.
    pub streams: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub schema: u32,
    pub suite: String,
    pub config: ExperimentConfig,
    pub seed: u64,
    pub stream_scheme: String,
    pub workers: Vec<WorkerLedger>,
    pub row_count: usize,
    pub checks: Vec<CheckOutcome>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramRecord {
    pub a: f64,
    pub histogram: Histogram,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub rows: Vec<Row>,
    pub metadata: Metadata,
    pub histograms: Vec<HistogramRecord>,
    /// `(x, density)` of the Gaussian limit, when the suite has one.
    pub limit_curve: Vec<(f64, f64)>,
}

impl ExperimentResult {
    pub(crate) fn new(suite: &str, config: &ExperimentConfig, rows: Vec<Row>, workers: Vec<WorkerLedger>) -> Self {
        let checks = evaluate_assertions(&config.assertions, &config.a_list, &rows);
        ExperimentResult {
            metadata: Metadata {
                schema: SCHEMA_VERSION,
                suite: suite.to_string(),
                config: config.clone(),
                seed: config.seed,
                stream_scheme: STREAM_SCHEME.to_string(),
                workers,
                row_count: rows.len(),
                checks,
            },
            rows,
            histograms: Vec::new(),
            limit_curve: Vec::new(),
        }
    }

    /// Aggregate value of `statistic` at `a`.
    pub fn aggregate(&self, a: f64, statistic: &str) -> Option<f64> {
        self.rows.iter().find(|r| r.a == Some(a) && r.replicate.is_none() && r.statistic == statistic).map(|r| r.value)
    }

    pub fn pooled(&self, statistic: &str) -> Option<f64> {
        self.rows.iter().find(|r| r.a.is_none() && r.replicate.is_none() && r.statistic == statistic).map(|r| r.value)
    }

    /// Per-replicate values of `statistic` at `a`, in replicate order.
    pub fn replicate_values(&self, a: f64, statistic: &str) -> Vec<f64> {
        self.rows
            .iter()
            .filter(|r| r.a == Some(a) && r.replicate.is_some() && r.statistic == statistic)
            .map(|r| r.value)
            .collect()
    }

    pub fn passed(&self) -> bool {
        self.metadata.checks.iter().all(|c| c.passed)
    }

    pub fn write_rows_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["a", "replicate", "statistic", "value"])?;
        for r in &self.rows {
            let a = r.a.map_or_else(String::new, |a| a.to_string());
            let rep = r.replicate.map_or_else(|| "agg".to_string(), |i| i.to_string());
            w.write_record([a, rep, r.statistic.clone(), r.value.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn rows_csv(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_rows_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }

    pub fn metadata_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.metadata)?)
    }

    fn write_histograms<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["a", "bin", "left", "right", "count", "density"])?;
        for h in &self.histograms {
            let dens = h.histogram.density();
            for (k, c) in h.histogram.counts.iter().enumerate() {
                w.write_record([
                    h.a.to_string(),
                    k.to_string(),
                    h.histogram.edges[k].to_string(),
                    h.histogram.edges[k + 1].to_string(),
                    c.to_string(),
                    dens[k].to_string(),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Write `rows.csv`, `metadata.json` and, when present, `histograms.csv`
    /// and `limit_curve.csv` into `dir`. Returns the written paths.
    pub fn write_to_dir(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut paths = Vec::new();
        let rows = dir.join("rows.csv");
        self.write_rows_csv(fs::File::create(&rows)?)?;
        paths.push(rows);
        let meta = dir.join("metadata.json");
        fs::write(&meta, self.metadata_json()? + "\n")?;
        paths.push(meta);
        if !self.histograms.is_empty() {
            let p = dir.join("histograms.csv");
            self.write_histograms(fs::File::create(&p)?)?;
            paths.push(p);
        }
        if !self.limit_curve.is_empty() {
            let p = dir.join("limit_curve.csv");
            let mut w = csv::Writer::from_path(&p)?;
            w.write_record(["x", "density"])?;
            for (x, y) in &self.limit_curve {
                w.write_record([x.to_string(), y.to_string()])?;
            }
            w.flush()?;
            paths.push(p);
        }
        Ok(paths)
    }
}

fn aggregates<'a>(rows: &'a [Row], statistic: &'a str) -> impl Iterator<Item = &'a Row> + 'a {
    rows.iter().filter(move |r| r.replicate.is_none() && r.statistic == statistic)
}

pub(crate) fn evaluate_assertions(assertions: &[Assertion], a_list: &[f64], rows: &[Row]) -> Vec<CheckOutcome> {
    assertions
        .iter()
        .map(|asr| match asr {
            Assertion::Range { statistic, a, min, max } => {
                let hits: Vec<&Row> = aggregates(rows, statistic).filter(|r| a.is_none() || r.a == *a).collect();
                let lo = min.unwrap_or(f64::NEG_INFINITY);
                let hi = max.unwrap_or(f64::INFINITY);
                let bad: Vec<String> = hits
                    .iter()
                    .filter(|r| !(r.value >= lo && r.value <= hi))
                    .map(|r| format!("{}@{}", r.value, r.a.map_or("pooled".into(), |a| a.to_string())))
                    .collect();
                let name = match a {
                    Some(a) => format!("{statistic} in [{lo}, {hi}] at a={a}"),
                    None => format!("{statistic} in [{lo}, {hi}]"),
                };
                let passed = !hits.is_empty() && bad.is_empty();
                let detail = if hits.is_empty() {
                    "no matching aggregate rows".into()
                } else if bad.is_empty() {
                    format!("{} rows within range", hits.len())
                } else {
                    format!("out of range: {}", bad.join(", "))
                };
                CheckOutcome { name, passed, detail }
            }
            Assertion::Decreasing { statistic } => {
                let vals: Vec<Option<f64>> = a_list
                    .iter()
                    .map(|a| aggregates(rows, statistic).find(|r| r.a == Some(*a)).map(|r| r.value))
                    .collect();
                let passed = vals.iter().all(Option::is_some)
                    && vals.windows(2).all(|w| matches!((w[0], w[1]), (Some(x), Some(y)) if y < x));
                let shown: Vec<String> =
                    vals.iter().map(|v| v.map_or("missing".into(), |x| format!("{x:.5}"))).collect();
                CheckOutcome {
                    name: format!("{statistic} strictly decreasing in a"),
                    passed,
                    detail: shown.join(" > "),
                }
            }
            Assertion::Below { statistic, bound } => {
                let mut detail = Vec::new();
                let mut passed = true;
                for a in a_list {
                    let v = aggregates(rows, statistic).find(|r| r.a == Some(*a)).map(|r| r.value);
                    let b = aggregates(rows, bound).find(|r| r.a == Some(*a)).map(|r| r.value);
                    match (v, b) {
                        (Some(v), Some(b)) => {
                            passed &= v < b;
                            detail.push(format!("a={a}: {v:.5} vs {b:.5}"));
                        }
                        _ => {
                            passed = false;
                            detail.push(format!("a={a}: missing"));
                        }
                    }
                }
                CheckOutcome { name: format!("{statistic} < {bound}"), passed, detail: detail.join("; ") }
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows() -> Vec<Row> {
        vec![
            Row::aggregate(1.0, "ks", 0.2),
            Row::aggregate(2.0, "ks", 0.1),
            Row::aggregate(1.0, "crit", 0.15),
            Row::aggregate(2.0, "crit", 0.15),
            Row::replicate(1.0, 0, "ks", 9.0),
            Row::pooled("slope", -0.5),
        ]
    }

    #[test]
    fn assertion_outcomes() {
        let a_list = [1.0, 2.0];
        let checks = evaluate_assertions(
            &[
                Assertion::Decreasing { statistic: "ks".into() },
                Assertion::Range { statistic: "slope".into(), a: None, min: Some(-0.65), max: Some(-0.35) },
                Assertion::Range { statistic: "ks".into(), a: Some(2.0), min: None, max: Some(0.05) },
                Assertion::Below { statistic: "ks".into(), bound: "crit".into() },
                Assertion::Range { statistic: "nothing".into(), a: None, min: None, max: None },
            ],
            &a_list,
            &rows(),
        );
        let passed: Vec<bool> = checks.iter().map(|c| c.passed).collect();
        assert_eq!(passed, vec![true, true, false, false, false]);
    }

    #[test]
    fn csv_layout() {
        let cfg = ExperimentConfig::new(crate::levy::LevyFamily::dirichlet(), vec![1.0, 2.0], 1, 0);
        let res = ExperimentResult::new("test", &cfg, rows(), Vec::new());
        let text = res.rows_csv().unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "a,replicate,statistic,value");
        assert_eq!(lines[1], "1,agg,ks,0.2");
        assert_eq!(lines[5], "1,0,ks,9");
        assert_eq!(lines[6], ",agg,slope,-0.5");
        assert_eq!(res.aggregate(2.0, "ks"), Some(0.1));
        assert_eq!(res.pooled("slope"), Some(-0.5));
        assert_eq!(res.replicate_values(1.0, "ks"), vec![9.0]);
        assert!(res.metadata_json().unwrap().contains("\"schema\": 1"));
    }
}

//! Aggregated experiment output and its CSV form.
//!
//! CSV columns:
//! `experiment,sweep_name,sweep_value,device,metric,mean,std,q05,q95,n_feasible,n_total`.
//! `device` is a 1-based index, or `all` for totals over devices. Floats use
//! Rust's shortest round-trip formatting, so parsing a file gives back the
//! exact values.

use std::fmt;
use std::io::{BufRead, Write};
use std::path::Path;
use std::str::FromStr;

use statrs::statistics::{Data, OrderStatistics, Statistics};

use crate::error::{Error, Result};

pub const CSV_HEADER: &str =
    "experiment,sweep_name,sweep_value,device,metric,mean,std,q05,q95,n_feasible,n_total";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DeviceKey {
    All,
    /// Zero-based internally, written 1-based.
    Device(usize),
}

impl fmt::Display for DeviceKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DeviceKey::All => f.write_str("all"),
            DeviceKey::Device(j) => write!(f, "{}", j + 1),
        }
    }
}

impl FromStr for DeviceKey {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "all" {
            return Ok(DeviceKey::All);
        }
        match s.parse::<usize>() {
            Ok(n) if n >= 1 => Ok(DeviceKey::Device(n - 1)),
            _ => Err(Error::Config(format!("bad device column {s:?}"))),
        }
    }
}

/// Mean, sample standard deviation and 5/95 % quantiles over feasible
/// realizations.
#[derive(Debug, Clone, Copy)]
pub struct Summary {
    pub mean: f64,
    pub std: f64,
    pub q05: f64,
    pub q95: f64,
    pub n_feasible: usize,
}

impl PartialEq for Summary {
    // NaN marks an empty sample and compares equal to itself.
    fn eq(&self, other: &Self) -> bool {
        let same = |a: f64, b: f64| a.to_bits() == b.to_bits() || a == b;
        same(self.mean, other.mean)
            && same(self.std, other.std)
            && same(self.q05, other.q05)
            && same(self.q95, other.q95)
            && self.n_feasible == other.n_feasible
    }
}

impl Summary {
    pub fn from_values(values: &[f64]) -> Self {
        let n = values.len();
        if n == 0 {
            return Self {
                mean: f64::NAN,
                std: f64::NAN,
                q05: f64::NAN,
                q95: f64::NAN,
                n_feasible: 0,
            };
        }
        let mean = values.iter().mean();
        let std = if n > 1 { values.iter().std_dev() } else { 0.0 };
        let mut data = Data::new(values.to_vec());
        Self {
            mean,
            std,
            q05: data.quantile(0.05),
            q95: data.quantile(0.95),
            n_feasible: n,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricRow {
    pub device: DeviceKey,
    pub metric: String,
    pub summary: Summary,
}

/// Aggregates for one value of the swept parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub sweep_name: String,
    pub sweep_value: f64,
    pub n_total: usize,
    pub rows: Vec<MetricRow>,
}

impl SweepPoint {
    pub fn summary(&self, device: DeviceKey, metric: &str) -> Option<&Summary> {
        self.rows
            .iter()
            .find(|r| r.device == device && r.metric == metric)
            .map(|r| &r.summary)
    }

    /// Share of realizations in which at least one device is infeasible,
    /// read off the `all` row of `metric`.
    pub fn infeasibility_rate(&self, metric: &str) -> Option<f64> {
        let s = self.summary(DeviceKey::All, metric)?;
        Some(1.0 - s.n_feasible as f64 / self.n_total as f64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub experiment: String,
    pub points: Vec<SweepPoint>,
}

impl ExperimentResult {
    pub fn new(experiment: impl Into<String>) -> Self {
        Self {
            experiment: experiment.into(),
            points: Vec::new(),
        }
    }

    /// Sweep names in first-appearance order.
    pub fn sweep_names(&self) -> Vec<&str> {
        let mut names: Vec<&str> = Vec::new();
        for p in &self.points {
            if !names.contains(&p.sweep_name.as_str()) {
                names.push(&p.sweep_name);
            }
        }
        names
    }

    pub fn point(&self, sweep_name: &str, value: f64) -> Option<&SweepPoint> {
        self.points
            .iter()
            .find(|p| p.sweep_name == sweep_name && p.sweep_value == value)
    }

    /// `(sweep_value, summary)` along one curve, in ascending sweep order.
    pub fn curve(&self, sweep_name: &str, device: DeviceKey, metric: &str) -> Vec<(f64, Summary)> {
        let mut out: Vec<(f64, Summary)> = self
            .points
            .iter()
            .filter(|p| p.sweep_name == sweep_name)
            .filter_map(|p| p.summary(device, metric).map(|s| (p.sweep_value, *s)))
            .collect();
        out.sort_by(|a, b| a.0.total_cmp(&b.0));
        out
    }

    /// Keeps only the listed metrics.
    pub fn retain_metrics(&mut self, metrics: &[&str]) {
        for p in &mut self.points {
            p.rows.retain(|r| metrics.contains(&r.metric.as_str()));
        }
    }

    pub fn renamed(mut self, experiment: impl Into<String>) -> Self {
        self.experiment = experiment.into();
        self
    }

    /// Emission order: sweep name (first appearance), sweep value ascending,
    /// device (`all` first), then metric name.
    pub fn canonicalize(&mut self) {
        let names: Vec<String> = self.sweep_names().into_iter().map(String::from).collect();
        let rank = |n: &str| names.iter().position(|x| x == n).unwrap_or(usize::MAX);
        self.points.sort_by(|a, b| {
            rank(&a.sweep_name)
                .cmp(&rank(&b.sweep_name))
                .then(a.sweep_value.total_cmp(&b.sweep_value))
        });
        for p in &mut self.points {
            p.rows.sort_by(|a, b| {
                a.device
                    .cmp(&b.device)
                    .then_with(|| a.metric.cmp(&b.metric))
            });
        }
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let mut sorted = self.clone();
        sorted.canonicalize();
        writeln!(out, "{CSV_HEADER}")?;
        for p in &sorted.points {
            for r in &p.rows {
                let s = &r.summary;
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{},{},{}",
                    self.experiment,
                    p.sweep_name,
                    p.sweep_value,
                    r.device,
                    r.metric,
                    s.mean,
                    s.std,
                    s.q05,
                    s.q95,
                    s.n_feasible,
                    p.n_total
                )?;
            }
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)
            .expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("CSV is ASCII")
    }

    /// Parses CSV written by [`write_csv`](Self::write_csv). A header-only
    /// file yields an empty result named `experiment_if_empty`.
    pub fn read_csv<R: BufRead>(input: R, experiment_if_empty: &str) -> Result<Self> {
        let mut lines = input.lines();
        let header = lines
            .next()
            .transpose()
            .map_err(|e| Error::Config(e.to_string()))?
            .ok_or_else(|| Error::Config("empty CSV".into()))?;
        if header.trim_end() != CSV_HEADER {
            return Err(Error::Config(format!("unexpected CSV header {header:?}")));
        }
        let mut result = ExperimentResult::new(experiment_if_empty);
        for (n, line) in lines.enumerate() {
            let line = line.map_err(|e| Error::Config(e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 11 {
                return Err(Error::Config(format!("line {}: expected 11 fields", n + 2)));
            }
            let num = |s: &str| {
                s.parse::<f64>()
                    .map_err(|e| Error::Config(format!("line {}: {s:?}: {e}", n + 2)))
            };
            let count = |s: &str| {
                s.parse::<usize>()
                    .map_err(|e| Error::Config(format!("line {}: {s:?}: {e}", n + 2)))
            };
            result.experiment = f[0].to_string();
            let sweep_value = num(f[2])?;
            let n_total = count(f[10])?;
            let row = MetricRow {
                device: f[3].parse()?,
                metric: f[4].to_string(),
                summary: Summary {
                    mean: num(f[5])?,
                    std: num(f[6])?,
                    q05: num(f[7])?,
                    q95: num(f[8])?,
                    n_feasible: count(f[9])?,
                },
            };
            match result.points.last_mut() {
                Some(p)
                    if p.sweep_name == f[1] && p.sweep_value.to_bits() == sweep_value.to_bits() =>
                {
                    p.rows.push(row)
                }
                _ => result.points.push(SweepPoint {
                    sweep_name: f[1].to_string(),
                    sweep_value,
                    n_total,
                    rows: vec![row],
                }),
            }
        }
        Ok(result)
    }
}

/// Writes `result` as CSV to `path`.
pub fn emit_csv(result: &ExperimentResult, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let mut w = std::io::BufWriter::new(file);
    result
        .write_csv(&mut w)
        .and_then(|_| w.flush())
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

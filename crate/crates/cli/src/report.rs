use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use specsketch::{OpCounts, ProbeRecord};

use crate::source::GraphSummary;

pub const SCHEMA_ID: &str = "specsketch/report/v1";

/// Everything a run records besides its CSV artifacts. Only `timings` varies between
/// identical runs.
#[derive(Debug, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub config: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub graph: Option<GraphSummary>,
    pub timings: BTreeMap<&'static str, f64>,
    pub ops: BTreeMap<&'static str, OpCounts>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<LambdaReport>,
    pub metrics: BTreeMap<String, f64>,
    pub outputs: Vec<String>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct LambdaReport {
    pub method: &'static str,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
    pub history: Vec<ProbeRecord>,
}

impl Report {
    pub fn new(command: &'static str, config: serde_json::Value) -> Self {
        Self {
            schema: SCHEMA_ID,
            version: env!("CARGO_PKG_VERSION"),
            command,
            config,
            graph: None,
            timings: BTreeMap::new(),
            ops: BTreeMap::new(),
            lambda: None,
            metrics: BTreeMap::new(),
            outputs: Vec::new(),
            warnings: Vec::new(),
        }
    }
}

/// Output directory that remembers what was written to it.
pub struct OutDir {
    root: PathBuf,
    written: Vec<String>,
}

impl OutDir {
    pub fn create(root: &Path) -> Result<Self> {
        std::fs::create_dir_all(root)
            .with_context(|| format!("creating output directory {}", root.display()))?;
        Ok(Self {
            root: root.to_path_buf(),
            written: Vec::new(),
        })
    }

    /// Writes `name` through `f` and records it.
    pub fn write<F>(&mut self, name: &str, f: F) -> Result<()>
    where
        F: FnOnce(&mut BufWriter<File>) -> Result<()>,
    {
        let path = self.root.join(name);
        let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        let mut w = BufWriter::new(file);
        f(&mut w).with_context(|| format!("writing {}", path.display()))?;
        w.flush()?;
        self.written.push(name.to_string());
        Ok(())
    }

    pub fn finish(mut self, mut report: Report) -> Result<Report> {
        self.written.push("report.json".into());
        report.outputs = std::mem::take(&mut self.written);
        self.write("report.json", |w| {
            serde_json::to_writer_pretty(&mut *w, &report)?;
            writeln!(w)?;
            Ok(())
        })?;
        Ok(report)
    }
}

/// `iter,lambda,count,lambda_lb,lambda_ub,count_lb,count_ub`
pub fn write_history(history: &[ProbeRecord], out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["iter", "lambda", "count", "lambda_lb", "lambda_ub", "count_lb", "count_ub"])?;
    for (i, r) in history.iter().enumerate() {
        w.write_record([
            (i + 1).to_string(),
            r.lambda.to_string(),
            r.count.to_string(),
            r.lambda_lb.to_string(),
            r.lambda_ub.to_string(),
            r.count_lb.to_string(),
            r.count_ub.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

//! Table-style benchmark report over the built-in models.

use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use reachtube::model::{builtin_benchmarks, neural::Weights, Benchmark};
use reachtube::par::Parallelism;
use reachtube::reachtube::{run, RunSummary};

use crate::output::{fmt_f64, write_csv};
use crate::CliError;

pub struct Row {
    pub label: String,
    pub name: String,
    pub dim: usize,
    pub dt: f64,
    pub horizon: f64,
    pub radius: f64,
    pub order: u32,
    pub summary: RunSummary,
    pub wall: Duration,
}

impl Row {
    fn status(&self) -> String {
        match (self.summary.completed, self.summary.failure_time) {
            (true, _) => "completed".into(),
            (false, Some(t)) => format!("Fail (t = {})", fmt_f64(t)),
            (false, None) => "Fail".into(),
        }
    }
}

fn matches(b: &Benchmark, key: &str) -> bool {
    b.label.eq_ignore_ascii_case(key) || b.name().eq_ignore_ascii_case(key)
}

/// Benchmarks selected by `only` (all when empty). Neural models are kept
/// only when weights were supplied for them.
pub fn select(only: &[String], weights: &[(String, PathBuf)]) -> Result<Vec<Benchmark>, CliError> {
    let all = builtin_benchmarks();
    for key in only.iter().chain(weights.iter().map(|(k, _)| k)) {
        if !all.iter().any(|b| matches(b, key)) {
            return Err(CliError::Usage(format!("unknown benchmark `{key}` (see `list-models`)")));
        }
    }
    let mut out = Vec::new();
    for b in all {
        if !only.is_empty() && !only.iter().any(|k| matches(&b, k)) {
            continue;
        }
        if b.neural.is_none() {
            out.push(b);
            continue;
        }
        let Some((_, path)) = weights.iter().find(|(k, _)| matches(&b, k)) else {
            log::info!("skipping {}: no weights supplied", b.name());
            continue;
        };
        let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        let w = Weights::parse(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
        out.push(b.with_weights(&w).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?);
    }
    Ok(out)
}

fn run_one(b: &Benchmark, order: u32, out_dir: Option<&Path>) -> Result<Row, CliError> {
    let start = Instant::now();
    let summary = run(&b.system, &b.run_config(order));
    let wall = start.elapsed();
    if let Some(dir) = out_dir {
        let path = dir.join(format!("{}.csv", b.name()));
        let file = File::create(&path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        write_csv(BufWriter::new(file), b.system.dim(), &summary.steps)
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    }
    Ok(Row {
        label: b.label.to_string(),
        name: b.name().to_string(),
        dim: b.system.dim(),
        dt: b.dt,
        horizon: b.horizon,
        radius: b.initial.radii().iter().copied().fold(0.0, f64::max),
        order,
        summary,
        wall,
    })
}

/// Runs the selection concurrently; rows come back in table order.
pub fn run_all(benches: &[Benchmark], order: u32, out_dir: Option<&Path>) -> Result<Vec<Row>, CliError> {
    if let Some(dir) = out_dir {
        fs::create_dir_all(dir).map_err(|e| CliError::Usage(format!("{}: {e}", dir.display())))?;
    }
    Parallelism::Parallel
        .map_slice(benches, |b| run_one(b, order, out_dir))
        .into_iter()
        .collect()
}

pub fn render(rows: &[Row]) -> String {
    let header = ["model", "dt", "T", "r", "order", "AV", "time", "result"];
    let cells: Vec<[String; 8]> = rows
        .iter()
        .map(|r| {
            [
                format!("{}({}) {}", r.label, r.dim, r.name),
                fmt_f64(r.dt),
                fmt_f64(r.horizon),
                fmt_f64(r.radius),
                r.order.to_string(),
                format!("{:.3e}", r.summary.average_volume),
                format!("{:.2}s", r.wall.as_secs_f64()),
                r.status(),
            ]
        })
        .collect();
    let mut width = header.map(str::len);
    for row in &cells {
        for (w, c) in width.iter_mut().zip(row) {
            *w = (*w).max(c.chars().count());
        }
    }
    let mut out = String::new();
    let line = |out: &mut String, row: &[String]| {
        let parts: Vec<String> = row.iter().zip(&width).map(|(c, w)| format!("{c:<w$}")).collect();
        let _ = writeln!(out, "{}", parts.join("  ").trim_end());
    };
    line(&mut out, &header.map(String::from));
    for row in &cells {
        line(&mut out, row);
    }
    out
}

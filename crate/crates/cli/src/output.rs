//! Result files: `results.json`, `data.csv`, `figure.svg` and the
//! `run.meta.json` sidecar with wall-clock data.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use serde_json::json;

use crate::config::ExperimentConfig;
use crate::run::Outcome;

pub const SCHEMA: &str = "exdist.results/1";

/// Writes `bytes` to `dir/name` through a temporary file in the same directory.
fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf> {
    let target = dir.join(name);
    let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("creating a temporary file in {}", dir.display()))?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(&target).with_context(|| format!("renaming onto {}", target.display()))?;
    Ok(target)
}

/// Deterministic part of a run: the same config gives byte-identical output.
pub fn results_json(cfg: &ExperimentConfig, out: &Outcome) -> String {
    let v = json!({
        "schema": SCHEMA,
        "name": cfg.name,
        "kind": cfg.kind().name(),
        "description": cfg.description,
        "anchor": cfg.anchor,
        "seed": cfg.seed,
        "tolerance": cfg.tolerance,
        "status": out.status(),
        "summary": out.summary,
        "checks": out.checks,
        "config": serde_json::from_str::<serde_json::Value>(&cfg.to_json()).expect("config is JSON"),
    });
    let mut s = serde_json::to_string_pretty(&v).expect("results serialize");
    s.push('\n');
    s
}

pub fn data_csv(out: &Outcome) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&out.table.header)?;
    for r in &out.table.rows {
        w.write_record(r)?;
    }
    Ok(w.into_inner().map_err(|e| e.into_error())?)
}

fn unix_seconds(t: SystemTime) -> f64 {
    t.duration_since(UNIX_EPOCH).map_or(0.0, |d| d.as_secs_f64())
}

/// Writes all output files into `dir`, creating it if needed.
pub fn write_outputs(dir: &Path, cfg: &ExperimentConfig, out: &Outcome, started: SystemTime) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut files = vec![
        write_atomic(dir, "results.json", results_json(cfg, out).as_bytes())?,
        write_atomic(dir, "data.csv", &data_csv(out)?)?,
    ];
    if let Some(svg) = &out.figure {
        files.push(write_atomic(dir, "figure.svg", svg.as_bytes())?);
    }
    let meta = json!({
        "started_unix": unix_seconds(started),
        "finished_unix": unix_seconds(SystemTime::now()),
        "phases": out.timings.iter().map(|(k, v)| json!({"phase": k, "seconds": v})).collect::<Vec<_>>(),
        "version": env!("CARGO_PKG_VERSION"),
    });
    files.push(write_atomic(dir, "run.meta.json", serde_json::to_string_pretty(&meta)?.as_bytes())?);
    Ok(files)
}

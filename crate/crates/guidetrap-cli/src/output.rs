//! Provenance block, JSON/CSV emission.

use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use guidetrap::contour::ContourTable;
use guidetrap::ContourSpec;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::RunConfig;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub command: String,
    /// Fully resolved configuration; replaying it reproduces the run.
    pub config: RunConfig,
    /// SHA-256 of the resolved Fourier coefficients.
    pub contour_sha256: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_nodes: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outer_iterations: Option<usize>,
}

impl Provenance {
    pub fn new(command: &str, config: &RunConfig, spec: &ContourSpec) -> Result<Self> {
        Ok(Provenance {
            tool: "guidetrap".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            config: config.clone(),
            contour_sha256: contour_hash(spec)?,
            p_nodes: None,
            iterations: None,
            outer_iterations: None,
        })
    }
}

pub fn contour_hash(spec: &ContourSpec) -> Result<String> {
    let canonical = serde_json::to_vec(&ContourTable::from_spec(spec))?;
    Ok(hex::encode(Sha256::digest(&canonical)))
}

/// Any result object with the provenance block appended.
#[derive(Serialize)]
pub struct WithProvenance<'a, R: Serialize> {
    #[serde(flatten)]
    pub result: &'a R,
    pub provenance: &'a Provenance,
}

/// Only the provenance of a previous run is needed to replay it.
#[derive(Deserialize)]
pub struct Recorded {
    pub provenance: Provenance,
}

pub fn read_provenance(path: &Path) -> Result<Provenance> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let rec: Recorded =
        serde_json::from_str(&text).with_context(|| format!("{} holds no provenance block", path.display()))?;
    Ok(rec.provenance)
}

pub fn emit(out: Option<&Path>, body: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, body).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(body.as_bytes())?;
            Ok(())
        }
    }
}

pub fn json<R: Serialize>(result: &R, provenance: &Provenance) -> Result<String> {
    let mut s = serde_json::to_string_pretty(&WithProvenance { result, provenance })?;
    s.push('\n');
    Ok(s)
}

/// CSV with a mandatory header; fields never contain separators, so no quoting is needed.
pub fn csv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut s = header.join(",");
    s.push_str("\r\n");
    for row in rows {
        s.push_str(&row.join(","));
        s.push_str("\r\n");
    }
    s
}

/// Shortest representation that round-trips; NaN becomes an empty field.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        String::new()
    } else {
        format!("{x:?}")
    }
}

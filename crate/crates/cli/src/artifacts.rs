//! On-disk formats: run records, estimates streams, label files and the
//! provenance header they share.
//!
//! Estimates and label files start with `#` comment lines holding the tool
//! version, the effective configuration and the dataset fingerprint. They carry
//! no timings or paths, so a rerun on the same data writes the same bytes.

use std::fmt::Write as _;
use std::path::Path;

use modalcores::{Dataset, Error, ModalSetEstimate, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::settings::FitSettings;

pub const ESTIMATES_FORMAT: &str = "modalcores-estimates";
pub const RUN_FORMAT: &str = "modalcores-run";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fingerprint {
    pub n: usize,
    pub d: usize,
    /// SHA-256 of n, d and the coordinates as little-endian u64 / f64 bits.
    pub sha256: String,
}

pub fn fingerprint(data: &Dataset<f64>) -> Fingerprint {
    let mut h = Sha256::new();
    h.update((data.n() as u64).to_le_bytes());
    h.update((data.d() as u64).to_le_bytes());
    for c in data.as_flat() {
        h.update(c.to_bits().to_le_bytes());
    }
    Fingerprint {
        n: data.n(),
        d: data.d(),
        sha256: hex::encode(h.finalize()),
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Comment block written at the top of every estimates and labels file.
#[derive(Debug, Clone, PartialEq)]
pub struct Provenance {
    pub command: String,
    pub settings: Option<FitSettings>,
    pub fingerprint: Fingerprint,
}

impl Provenance {
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# modalcores {}", env!("CARGO_PKG_VERSION"));
        let _ = writeln!(out, "# command: {}", self.command);
        if let Some(s) = &self.settings {
            let json = serde_json::to_string(s).expect("settings serialize");
            let _ = writeln!(out, "# config: {json}");
        }
        let fp = &self.fingerprint;
        let _ = writeln!(out, "# dataset: n={} d={} sha256={}", fp.n, fp.d, fp.sha256);
        out
    }
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

pub fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

#[derive(Serialize, Deserialize)]
struct EstimatesHeader {
    format: String,
    version: u32,
    count: usize,
}

#[derive(Serialize, Deserialize)]
struct EstimateLine {
    rank: usize,
    founder: usize,
    creation_level: f64,
    members: Vec<usize>,
}

fn format_err(what: &'static str, message: impl ToString) -> Error {
    Error::Format {
        what,
        message: message.to_string(),
    }
}

/// Provenance comments, a header object, then one JSON object per estimate.
pub fn render_estimates(provenance: &Provenance, estimates: &[ModalSetEstimate<f64>]) -> String {
    let mut out = provenance.render();
    let header = EstimatesHeader {
        format: ESTIMATES_FORMAT.into(),
        version: FORMAT_VERSION,
        count: estimates.len(),
    };
    out.push_str(&serde_json::to_string(&header).expect("header serializes"));
    out.push('\n');
    for e in estimates {
        let line = EstimateLine {
            rank: e.rank,
            founder: e.founder,
            creation_level: e.creation_level,
            members: e.members.clone(),
        };
        out.push_str(&serde_json::to_string(&line).expect("estimate serializes"));
        out.push('\n');
    }
    out
}

pub fn parse_estimates(text: &str) -> Result<Vec<ModalSetEstimate<f64>>> {
    let mut lines = text
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty());
    let header: EstimatesHeader = serde_json::from_str(
        lines.next().ok_or_else(|| format_err("estimates", "missing header line"))?,
    )
    .map_err(|e| format_err("estimates", e))?;
    if header.format != ESTIMATES_FORMAT || header.version != FORMAT_VERSION {
        return Err(format_err(
            "estimates",
            format!("unsupported format {} v{}", header.format, header.version),
        ));
    }
    let estimates = lines
        .map(|l| {
            let e: EstimateLine = serde_json::from_str(l).map_err(|e| format_err("estimates", e))?;
            Ok(ModalSetEstimate {
                rank: e.rank,
                creation_level: e.creation_level,
                founder: e.founder,
                members: e.members,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if estimates.len() != header.count {
        return Err(format_err(
            "estimates",
            format!("header says {} estimates, found {}", header.count, estimates.len()),
        ));
    }
    Ok(estimates)
}

/// Single `label` column after the provenance comments.
pub fn render_labels(provenance: Option<&Provenance>, labels: &[i64]) -> String {
    let mut out = provenance.map(Provenance::render).unwrap_or_default();
    out.push_str("label\n");
    for l in labels {
        let _ = writeln!(out, "{l}");
    }
    out
}

/// Integer labels, one per line; comments and a non-numeric first line are skipped.
pub fn parse_labels(text: &str) -> Result<Vec<i64>> {
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match line.parse() {
            Ok(v) => out.push(v),
            Err(_) if out.is_empty() => continue,
            Err(_) => {
                return Err(Error::Parse {
                    line: idx + 1,
                    message: format!("label {line:?} is not an integer"),
                })
            }
        }
    }
    if out.is_empty() {
        return Err(Error::EmptyDataset);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputSpec {
    pub path: String,
    pub header: bool,
    pub label_column: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatesSummary {
    pub count: usize,
    pub sizes: Vec<usize>,
    pub creation_levels: Vec<f64>,
}

impl EstimatesSummary {
    pub fn of(estimates: &[ModalSetEstimate<f64>]) -> Self {
        Self {
            count: estimates.len(),
            sizes: estimates.iter().map(|e| e.members.len()).collect(),
            creation_levels: estimates.iter().map(|e| e.creation_level).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scores {
    pub ari: f64,
    pub ami: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub load_ms: f64,
    pub index_ms: f64,
    pub density_ms: f64,
    pub descent_ms: f64,
    pub assign_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Artifacts {
    pub estimates: String,
    pub estimates_sha256: String,
    pub labels: String,
}

/// Everything needed to repeat a fit and check that it reproduced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub format: String,
    pub version: u32,
    pub tool_version: String,
    pub input: InputSpec,
    /// `k` is always resolved here.
    pub config: FitSettings,
    pub beta_value: f64,
    pub dataset: Fingerprint,
    pub estimates: EstimatesSummary,
    pub scores: Option<Scores>,
    pub timings: Timings,
    pub artifacts: Artifacts,
}

impl RunRecord {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("record serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let record: RunRecord = serde_json::from_str(text).map_err(|e| format_err("run record", e))?;
        if record.format != RUN_FORMAT || record.version != FORMAT_VERSION {
            return Err(format_err(
                "run record",
                format!("unsupported format {} v{}", record.format, record.version),
            ));
        }
        Ok(record)
    }
}

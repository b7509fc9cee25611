//! Solution files.
//!
//! Native files carry a `#`-prefixed `key = value` header followed by one
//! `real imag` pair per component, written with 17 significant digits:
//!
//! ```text
//! # format = sic-fiducial
//! # dim = 3
//! # label = t0
//! # digits = 17
//! # seed = 1
//! 0.0000000000000000e0 0.0000000000000000e0
//! 7.0710678118654746e-1 0.0000000000000000e0
//! -7.0710678118654746e-1 0.0000000000000000e0
//! ```
//!
//! Export is strict. Import also accepts headerless files of whitespace- or
//! comma-separated pairs (or single real values), one component per line,
//! with the dimension taken from the line count.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use crate::objective::FiducialCandidate;
use crate::{Dim, Result, SicError, C64};

/// Significant digits written for each real number.
pub const DEFAULT_DIGITS: usize = 17;

const FORMAT_TAG: &str = "sic-fiducial";

#[derive(Debug, Clone, PartialEq)]
pub struct SolutionFile {
    pub dim: Dim,
    pub label: String,
    pub digits: usize,
    /// Extra header keys (seed, symmetry, tool version, timestamp, ...).
    pub metadata: BTreeMap<String, String>,
    pub components: Vec<C64>,
}

impl SolutionFile {
    pub fn new(components: Vec<C64>, label: impl Into<String>) -> Result<Self> {
        let dim = Dim::new(components.len() as i64)?;
        if components.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(SicError::Domain("components must be finite".into()));
        }
        Ok(SolutionFile { dim, label: label.into(), digits: DEFAULT_DIGITS, metadata: BTreeMap::new(), components })
    }

    pub fn from_candidate(candidate: &FiducialCandidate, label: impl Into<String>) -> Result<Self> {
        let mut file = SolutionFile::new(candidate.components.clone(), label)?;
        file.metadata.insert("seed".into(), candidate.seed.to_string());
        if let Some(tag) = &candidate.subspace_tag {
            file.metadata.insert("symmetry".into(), tag.clone());
        }
        file.metadata.insert("tool".into(), format!("sic {}", env!("CARGO_PKG_VERSION")));
        Ok(file)
    }

    pub fn to_candidate(&self) -> Result<FiducialCandidate> {
        let seed = self.metadata.get("seed").and_then(|s| s.parse().ok()).unwrap_or(0);
        FiducialCandidate::new(&self.components, seed, self.metadata.get("symmetry").cloned())
    }

    /// `sicfiducial.<d>.<label>.<digits>.txt`
    pub fn file_name(&self) -> String {
        format!("sicfiducial.{}.{}.{}.txt", self.dim.d(), self.label, self.digits)
    }

    /// Native text form. A `timestamp` header line is added when `timestamp`
    /// is set; everything else is a function of the contents.
    pub fn render(&self, timestamp: bool) -> String {
        let mut out = String::new();
        out.push_str(&format!("# format = {FORMAT_TAG}\n"));
        out.push_str(&format!("# dim = {}\n", self.dim.d()));
        out.push_str(&format!("# label = {}\n", self.label));
        out.push_str(&format!("# digits = {}\n", self.digits));
        for (k, v) in &self.metadata {
            if k != "timestamp" {
                out.push_str(&format!("# {k} = {v}\n"));
            }
        }
        if timestamp {
            let secs = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
            out.push_str(&format!("# timestamp = {secs}\n"));
        }
        let prec = self.digits.saturating_sub(1);
        for z in &self.components {
            out.push_str(&format!("{:.prec$e} {:.prec$e}\n", z.re, z.im));
        }
        out
    }
}

fn parse_number(token: &str, line: usize) -> Result<f64> {
    let v: f64 = token.parse().map_err(|_| SicError::Parse { line, message: format!("not a number: {token:?}") })?;
    if !v.is_finite() {
        return Err(SicError::Parse { line, message: format!("non-finite value: {token:?}") });
    }
    Ok(v)
}

/// Parse native or bare-pairs text. `expected` rejects files of another dimension.
pub fn parse_solution(text: &str, expected: Option<Dim>) -> Result<SolutionFile> {
    let mut header = BTreeMap::new();
    let mut components = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix('#') {
            if let Some((k, v)) = rest.split_once('=') {
                header.insert(k.trim().to_string(), v.trim().to_string());
            }
            continue;
        }
        let tokens: Vec<&str> =
            trimmed.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()).collect();
        let z = match tokens.as_slice() {
            [re] => C64::new(parse_number(re, line)?, 0.0),
            [re, im] => C64::new(parse_number(re, line)?, parse_number(im, line)?),
            _ => {
                return Err(SicError::Parse {
                    line,
                    message: format!("expected `real imag`, found {} fields", tokens.len()),
                });
            }
        };
        components.push(z);
    }

    if let Some(declared) = header.get("dim") {
        let declared: usize = declared
            .parse()
            .map_err(|_| SicError::Parse { line: 0, message: format!("bad dim header {declared:?}") })?;
        if declared != components.len() {
            return Err(SicError::Parse {
                line: 0,
                message: format!("header declares dim {declared} but the body has {} components", components.len()),
            });
        }
    }
    if components.len() < 2 {
        return Err(SicError::Parse {
            line: 0,
            message: format!("need at least 2 components, found {}", components.len()),
        });
    }
    if let Some(dim) = expected {
        if dim.size() != components.len() {
            return Err(SicError::DimensionMismatch { expected: dim.size(), found: components.len() });
        }
    }

    let label = header.remove("label").unwrap_or_else(|| "imported".into());
    let digits = match header.remove("digits") {
        Some(d) => d.parse().map_err(|_| SicError::Parse { line: 0, message: format!("bad digits header {d:?}") })?,
        None => DEFAULT_DIGITS,
    };
    header.remove("dim");
    header.remove("format");
    let mut file = SolutionFile::new(components, label)?;
    file.digits = digits;
    file.metadata = header;
    Ok(file)
}

pub fn read_solution(path: &Path, expected: Option<Dim>) -> Result<SolutionFile> {
    parse_solution(&fs::read_to_string(path)?, expected)
}

/// Write `file` into `dir` under its canonical name and return the path.
pub fn write_solution(dir: &Path, file: &SolutionFile, timestamp: bool) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(file.file_name());
    fs::write(&path, file.render(timestamp))?;
    Ok(path)
}

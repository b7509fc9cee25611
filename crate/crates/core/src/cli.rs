//! The `sic` command line.
//!
//! Every report line is a whitespace-separated list of `key=value` fields.
//! Exit codes: `0` success, `1` a check failed or an I/O error occurred, `2`
//! usage or parse error, `3` a search finished without finding a fiducial.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::classify::{classify_all, DEFAULT_ORBIT_TOL};
use crate::clifford::{pc_order, pec_order, KernelQuotient};
use crate::io::{read_solution, write_solution, SolutionFile, DEFAULT_DIGITS};
use crate::objective::{verify_sic, DEFAULT_VERIFY_TOL};
use crate::search::{distinct_fiducials, multi_start_search_with, Convergence, SearchConfig, SearchResult};
use crate::symmetry::{
    applicable_symmetries, build_symmetry, inapplicability_reason, verify_conjugacies, SymmetryKind,
};
use crate::{Dim, Result, SicError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NOT_FOUND: i32 = 3;

/// Overlap threshold for treating two search hits as the same ray.
const DUPLICATE_TOL: f64 = 1e-7;

#[derive(Debug, Parser)]
#[command(name = "sic", version, about = "Search, verify and classify SIC fiducial vectors")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Multi-start search for fiducials, optionally inside a symmetry subspace.
    Search(SearchArgs),
    /// Check solution files for equiangularity.
    Verify(VerifyArgs),
    /// Group solution files into extended-Clifford orbits (d <= 12).
    Classify(ClassifyArgs),
    /// Group orders, Zauner eigenspace dimensions and applicable symmetries.
    Info(InfoArgs),
}

#[derive(Debug, Args)]
struct SearchArgs {
    #[arg(long)]
    dim: i64,
    /// fz, fa, fb, fc, fd, fe, fep, j or none.
    #[arg(long, default_value = "none")]
    symmetry: String,
    /// Eigenvalue index m (eigenvalue exp(2 pi i m / n)). Without it every
    /// sector is tried in turn, starting at m = 0, until one yields a fiducial.
    #[arg(long)]
    eigenvalue: Option<u64>,
    #[arg(long, default_value_t = 100)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, env = "SIC_WORKERS")]
    workers: Option<usize>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[arg(long, default_value_t = 1e-13)]
    gap_tol: f64,
    #[arg(long, default_value_t = 20_000)]
    max_iters: usize,
    /// Stop after the batch in which this many fiducials have been found.
    #[arg(long)]
    stop_after: Option<usize>,
    #[arg(long, default_value_t = 32)]
    batch_size: u64,
    /// Omit the timestamp header so output files are reproducible byte for byte.
    #[arg(long)]
    no_timestamp: bool,
    /// Significant digits in output files. Only 17 is supported.
    #[arg(long, default_value_t = DEFAULT_DIGITS)]
    digits: usize,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(required = true)]
    files: Vec<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_VERIFY_TOL)]
    tol: f64,
    /// Reject files of any other dimension.
    #[arg(long)]
    dim: Option<i64>,
}

#[derive(Debug, Args)]
struct ClassifyArgs {
    #[arg(required = true)]
    files: Vec<PathBuf>,
    #[arg(long)]
    dim: Option<i64>,
    #[arg(long, default_value_t = DEFAULT_ORBIT_TOL)]
    tol: f64,
}

#[derive(Debug, Args)]
struct InfoArgs {
    #[arg(long)]
    dim: i64,
}

struct Usage(String);

enum Failure {
    Usage(String),
    Error(SicError),
}

impl From<SicError> for Failure {
    fn from(e: SicError) -> Self {
        match e {
            SicError::InvalidDimension(_)
            | SicError::Config(_)
            | SicError::Parse { .. }
            | SicError::DimensionMismatch { .. }
            | SicError::Capacity { .. } => Failure::Usage(e.to_string()),
            other => Failure::Error(other),
        }
    }
}

impl From<Usage> for Failure {
    fn from(u: Usage) -> Self {
        Failure::Usage(u.0)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Error(e.into())
    }
}

type CliResult = std::result::Result<i32, Failure>;

/// Run the command line with `args` (including the program name).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return code;
        }
    };
    let result = match cli.command {
        Command::Search(a) => search(a, out),
        Command::Verify(a) => verify(a, out, err),
        Command::Classify(a) => classify(a, out),
        Command::Info(a) => info(a, out),
    };
    match result {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Error(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_FAILURE
        }
    }
}

fn dim_arg(d: i64) -> std::result::Result<Dim, Usage> {
    Dim::new(d).map_err(|e| Usage(e.to_string()))
}

fn applicable_names(dim: Dim) -> Result<String> {
    let mut names: Vec<&str> = Vec::new();
    for spec in applicable_symmetries(dim)? {
        if !names.contains(&spec.kind.name()) {
            names.push(spec.kind.name());
        }
    }
    names.extend(["j", "none"]);
    Ok(names.join(", "))
}

fn search(a: SearchArgs, out: &mut dyn Write) -> CliResult {
    let dim = dim_arg(a.dim)?;
    if a.trials == 0 {
        return Err(Usage("--trials must be at least 1".into()).into());
    }
    if a.digits != DEFAULT_DIGITS {
        return Err(Usage(format!("--digits {} unsupported; only {DEFAULT_DIGITS} is available", a.digits)).into());
    }
    let spec = match a.symmetry.to_ascii_lowercase().as_str() {
        "none" => None,
        name => {
            let applicable = applicable_names(dim)?;
            let kind: SymmetryKind =
                name.parse().map_err(|_| Usage(format!("unknown symmetry {name:?}; applicable: {applicable}")))?;
            if let Some(reason) = inapplicability_reason(kind, dim).filter(|_| kind != SymmetryKind::J) {
                return Err(Usage(format!("{reason}; applicable: {applicable}")).into());
            }
            Some(build_symmetry(kind, dim)?)
        }
    };
    let sectors: Vec<Option<u64>> = match (&spec, a.eigenvalue) {
        (None, None) => vec![None],
        (None, Some(_)) => return Err(Usage("--eigenvalue needs --symmetry".into()).into()),
        (Some(s), Some(m)) if s.antiunitary && m != 0 => {
            return Err(Usage(format!("{} is anti-unitary; only --eigenvalue 0 applies", s.kind)).into());
        }
        (Some(s), Some(m)) if m >= s.order => {
            return Err(Usage(format!("--eigenvalue must be below the order {} of {}", s.order, s.kind)).into());
        }
        (Some(_), Some(m)) => vec![Some(m)],
        (Some(s), None) if s.antiunitary => vec![Some(0)],
        (Some(s), None) => (0..s.order).map(Some).collect(),
    };

    let mut config = SearchConfig::new(dim);
    config.trials = a.trials;
    config.master_seed = a.seed;
    config.gap_tol = a.gap_tol;
    config.max_iters = a.max_iters;
    config.stop_after = a.stop_after;
    config.batch_size = a.batch_size;
    if let Some(w) = a.workers {
        config.workers = w;
    }

    let mut results: Vec<SearchResult> = Vec::new();
    for sector in sectors {
        config.symmetry = sector.map(|m| (spec.clone().expect("sector implies a symmetry"), m));
        if let Some(s) = &spec {
            // An empty eigenspace is skipped when scanning sectors.
            if let (Some(m), false) = (sector, s.antiunitary) {
                if crate::subspace::symmetry_subspace(s, m)?.is_empty() {
                    writeln!(out, "event=skip symmetry={} eigenvalue={m} reason=empty-sector", s.kind)?;
                    continue;
                }
            }
        }
        let mut io_error = None;
        results = multi_start_search_with(&config, |e| {
            if let Err(err) = writeln!(out, "{e}") {
                io_error.get_or_insert(err);
            }
        })?;
        if let Some(e) = io_error {
            return Err(e.into());
        }
        if results.iter().any(|r| r.converged_to == Convergence::Fiducial) {
            break;
        }
    }

    let distinct = distinct_fiducials(&results, DUPLICATE_TOL);
    let mut written = 0;
    for r in &distinct {
        let file = SolutionFile::from_candidate(&r.candidate, format!("t{}", r.trial_index))?;
        let path = write_solution(&a.out, &file, !a.no_timestamp)?;
        let report = r.candidate.verify(DEFAULT_VERIFY_TOL);
        writeln!(
            out,
            "file={} trial={} gap={:.3e} max_dev={:.3e} iterations={}",
            path.display(),
            r.trial_index,
            r.candidate.objective_gap,
            report.max_dev,
            r.iterations
        )?;
        written += 1;
    }
    let fiducials = results.iter().filter(|r| r.converged_to == Convergence::Fiducial).count();
    writeln!(
        out,
        "summary dim={} trials={} fiducials={fiducials} distinct={} files={written}",
        dim.d(),
        results.len(),
        distinct.len()
    )?;
    Ok(if written > 0 { EXIT_OK } else { EXIT_NOT_FOUND })
}

fn verify(a: VerifyArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult {
    let expected = a.dim.map(dim_arg).transpose()?;
    let mut parse_failed = false;
    let mut all_pass = true;
    for path in &a.files {
        let file = match read_solution(path, expected) {
            Ok(f) => f,
            Err(e) => {
                match &e {
                    SicError::Parse { line, message } => {
                        writeln!(err, "error file={} line={line} message={message:?}", path.display())?
                    }
                    other => writeln!(err, "error file={} message={:?}", path.display(), other.to_string())?,
                }
                parse_failed = true;
                continue;
            }
        };
        let candidate = file.to_candidate()?;
        let report = verify_sic(&file.components, a.tol)?;
        all_pass &= report.pass;
        writeln!(
            out,
            "file={} dim={} max_dev={:.3e} gap={:.3e} norm_dev={:.3e} pass={}",
            path.display(),
            file.dim.d(),
            report.max_dev,
            candidate.objective_gap,
            report.norm_dev,
            report.pass
        )?;
    }
    Ok(if parse_failed {
        EXIT_USAGE
    } else if all_pass {
        EXIT_OK
    } else {
        EXIT_FAILURE
    })
}

fn classify(a: ClassifyArgs, out: &mut dyn Write) -> CliResult {
    let expected = a.dim.map(dim_arg).transpose()?;
    let files = a.files.iter().map(|p| read_solution(p, expected)).collect::<Result<Vec<_>>>()?;
    let dim = expected.unwrap_or(files[0].dim);
    if let Some(f) = files.iter().find(|f| f.dim != dim) {
        return Err(SicError::DimensionMismatch { expected: dim.size(), found: f.dim.size() }.into());
    }
    let candidates = files.iter().map(|f| f.to_candidate()).collect::<Result<Vec<_>>>()?;
    let records = classify_all(&candidates, dim, a.tol)?;
    let quotient = KernelQuotient::new(dim);
    for r in &records {
        writeln!(out, "{r}")?;
        for &m in &r.members {
            writeln!(out, "  member={}", a.files[m].display())?;
        }
        for g in r.stabiliser_generators() {
            writeln!(out, "  generator={g} order={} antiunitary={}", quotient.order(g), g.is_antiunitary())?;
        }
    }
    writeln!(out, "summary dim={} files={} orbits={}", dim.d(), files.len(), records.len())?;
    Ok(EXIT_OK)
}

/// `⌊(d + 3 − 2k)/3⌋`, the dimension of the `k`-th Zauner eigenspace.
pub fn zauner_dimensions(dim: Dim) -> [i64; 3] {
    let d = dim.d();
    [0, 1, 2].map(|k| (d + 3 - 2 * k) / 3)
}

fn info(a: InfoArgs, out: &mut dyn Write) -> CliResult {
    let dim = dim_arg(a.dim)?;
    writeln!(out, "dim={} dbar={} pc_order={} pec_order={}", dim.d(), dim.dbar(), pc_order(dim), pec_order(dim))?;
    let [z0, z1, z2] = zauner_dimensions(dim);
    writeln!(out, "zauner_dims={z0},{z1},{z2}")?;
    for spec in applicable_symmetries(dim)? {
        writeln!(out, "symmetry {spec}")?;
    }
    for c in verify_conjugacies(dim)?.checks {
        let [[a, b], [g, h]] = c.witness.entries();
        writeln!(
            out,
            "conjugacy identity={:?} witness=[[{a},{b}],[{g},{h}]] modulus={} pass={}",
            c.identity, c.modulus, c.pass
        )?;
    }
    Ok(EXIT_OK)
}

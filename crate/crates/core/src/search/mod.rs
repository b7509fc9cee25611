//! Multi-start minimization of the Welch functional.
//!
//! Each trial draws a Haar-random start inside the search space (all of `C^d`
//! or a symmetry subspace), runs L-BFGS on the reduced objective, and is
//! classified by its final objective gap. Trials are independent: trial `t`
//! draws from stream `t` of a ChaCha20 generator keyed by the master seed, so
//! results do not depend on the worker count or scheduling.

pub mod lbfgs;

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::objective::{normalized, pack, verify_sic, FiducialCandidate, WelchObjective, DEFAULT_VERIFY_TOL};
use crate::subspace::{symmetry_subspace, SubspaceBasis};
use crate::symmetry::SymmetrySpec;
use crate::{Dim, Result, SicError, C64};
use lbfgs::{minimize, LbfgsConfig, Minimum, Termination};

/// Upper edge of the gray zone of near-fiducial gaps.
pub const GRAY_ZONE_UPPER: f64 = 1e-8;

/// Iteration budget for polishing restarts.
const POLISH_ITERS: usize = 2_000;

/// A unit vector drawn from the unitarily invariant measure on `C^size`.
pub fn haar_random_state(size: usize, rng: &mut impl Rng) -> Result<Vec<C64>> {
    if size == 0 {
        return Err(SicError::Domain("state size must be at least 1".into()));
    }
    loop {
        let v: Vec<C64> = (0..size).map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect();
        if let Ok(v) = normalized(&v) {
            return Ok(v);
        }
    }
}

/// Generator for trial `trial` under `master_seed`.
pub fn trial_rng(master_seed: u64, trial: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(master_seed);
    rng.set_stream(trial);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Convergence {
    Fiducial,
    LocalMin,
    IterationCap,
}

impl fmt::Display for Convergence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Convergence::Fiducial => "fiducial",
            Convergence::LocalMin => "local-min",
            Convergence::IterationCap => "iteration-cap",
        })
    }
}

#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub dim: Dim,
    /// Symmetry and eigenvalue index `m` (eigenvalue `e^{2πim/n}`).
    pub symmetry: Option<(SymmetrySpec, u64)>,
    pub trials: u64,
    pub master_seed: u64,
    pub gap_tol: f64,
    pub grad_tol: f64,
    pub max_iters: usize,
    pub workers: usize,
    /// Trials per batch. Batches are the unit of progress reporting and of
    /// early stopping.
    pub batch_size: u64,
    /// Stop after the first batch that brings the fiducial count to this value.
    pub stop_after: Option<usize>,
}

impl SearchConfig {
    pub fn new(dim: Dim) -> Self {
        SearchConfig {
            dim,
            symmetry: None,
            trials: 1,
            master_seed: 0,
            gap_tol: 1e-13,
            grad_tol: 1e-10,
            max_iters: 20_000,
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            batch_size: 32,
            stop_after: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(SicError::Config("trials must be at least 1".into()));
        }
        if self.gap_tol.is_nan() || self.gap_tol <= 0.0 || self.grad_tol.is_nan() || self.grad_tol <= 0.0 {
            return Err(SicError::Config("tolerances must be positive".into()));
        }
        if self.max_iters == 0 || self.workers == 0 || self.batch_size == 0 {
            return Err(SicError::Config("max_iters, workers and batch_size must be at least 1".into()));
        }
        if let Some((spec, _)) = &self.symmetry {
            if spec.dim != self.dim {
                return Err(SicError::Config(format!(
                    "symmetry is for d = {}, search is for d = {}",
                    spec.dim.d(),
                    self.dim.d()
                )));
            }
        }
        Ok(())
    }

    fn lbfgs(&self) -> LbfgsConfig {
        LbfgsConfig { grad_tol: self.grad_tol, max_iters: self.max_iters, ..Default::default() }
    }
}

#[derive(Debug, Clone)]
pub struct SearchResult {
    pub candidate: FiducialCandidate,
    pub trial_index: u64,
    pub iterations: usize,
    pub converged_to: Convergence,
    pub termination: Termination,
}

/// The Welch functional restricted to the span of a subspace basis.
#[derive(Debug, Clone)]
pub struct SearchSpace {
    basis: SubspaceBasis,
    welch: WelchObjective,
}

impl SearchSpace {
    pub fn new(basis: SubspaceBasis) -> Self {
        let welch = WelchObjective::new(basis.dim);
        SearchSpace { basis, welch }
    }

    pub fn full(dim: Dim) -> Self {
        SearchSpace::new(SubspaceBasis::full(dim))
    }

    pub fn for_config(config: &SearchConfig) -> Result<Self> {
        match &config.symmetry {
            None => Ok(SearchSpace::full(config.dim)),
            Some((spec, m)) => {
                let basis = symmetry_subspace(spec, *m)?;
                if basis.is_empty() {
                    return Err(SicError::Degenerate(format!("{} has an empty eigenspace for index {m}", spec.kind)));
                }
                Ok(SearchSpace::new(basis))
            }
        }
    }

    pub fn basis(&self) -> &SubspaceBasis {
        &self.basis
    }

    /// Number of real search parameters.
    pub fn parameters(&self) -> usize {
        self.basis.real_parameters()
    }

    pub fn value_and_gradient(&self, coords: &[f64], grad: &mut [f64]) -> f64 {
        let phi = self.basis.lift(coords).expect("coordinate length matches the basis");
        let x = pack(&phi);
        let mut full = vec![0.0; x.len()];
        let f = self.welch.value_and_gradient(&x, &mut full);
        self.basis.pull_back_gradient(&full, grad);
        f
    }

    /// A Haar-random unit vector of the space, in coordinates.
    pub fn random_start(&self, rng: &mut impl Rng) -> Vec<f64> {
        if self.basis.antiunitary_mode {
            let v: Vec<f64> = (0..self.parameters()).map(|_| rng.sample(StandardNormal)).collect();
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.into_iter().map(|x| x / n).collect()
        } else {
            let v = haar_random_state(self.basis.len(), rng).expect("search space is nonempty");
            v.iter().flat_map(|z| [z.re, z.im]).collect()
        }
    }

    fn minimize(&self, coords: &[f64], cfg: &LbfgsConfig) -> Minimum {
        minimize(|x, g| self.value_and_gradient(x, g), coords, cfg)
    }

    /// Run to the floor of double precision from a near-optimal point.
    fn polish(&self, coords: &[f64]) -> Minimum {
        let cfg = LbfgsConfig { grad_tol: 0.0, max_iters: POLISH_ITERS, ..Default::default() };
        self.minimize(coords, &cfg)
    }
}

/// Local minimization from `coords0`. A result below the gray-zone edge that
/// is not yet fiducial-grade (gap under `gap_tol` and overlaps within `1e-8`)
/// gets a polishing restart before classification.
pub fn local_minimize(
    space: &SearchSpace,
    coords0: &[f64],
    config: &SearchConfig,
    trial_index: u64,
) -> Result<SearchResult> {
    let mut m = space.minimize(coords0, &config.lbfgs());
    let mut iterations = m.iterations;
    let fiducial_grade = |m: &Minimum| -> Result<bool> {
        let phi = space.basis.lift(&m.x)?;
        Ok(m.f < config.gap_tol && verify_sic(&normalized(&phi)?, DEFAULT_VERIFY_TOL)?.pass)
    };
    if m.f < GRAY_ZONE_UPPER && !fiducial_grade(&m)? {
        let polished = space.polish(&m.x);
        iterations += polished.iterations;
        if polished.f < m.f {
            m = Minimum { termination: m.termination, ..polished };
        }
    }
    let phi = space.basis.lift(&m.x)?;
    let tag = config.symmetry.as_ref().map(|_| space.basis.tag.clone());
    let candidate = FiducialCandidate::new(&phi, config.master_seed, tag)?;
    let converged_to = if fiducial_grade(&m)? {
        Convergence::Fiducial
    } else if m.termination == Termination::IterationCap {
        Convergence::IterationCap
    } else {
        Convergence::LocalMin
    };
    Ok(SearchResult { candidate, trial_index, iterations, converged_to, termination: m.termination })
}

/// Progress records, rendered as one `key=value` line each.
#[derive(Debug, Clone, PartialEq)]
pub enum SearchEvent {
    Started { dim: i64, trials: u64, parameters: usize, space: String, workers: usize },
    Batch { batch: u64, trials_done: u64, fiducials: usize, best_gap: f64 },
    Finished { trials_done: u64, fiducials: usize, stopped_early: bool },
}

impl fmt::Display for SearchEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SearchEvent::Started { dim, trials, parameters, space, workers } => {
                write!(
                    f,
                    "event=start dim={dim} trials={trials} parameters={parameters} space={space} workers={workers}"
                )
            }
            SearchEvent::Batch { batch, trials_done, fiducials, best_gap } => {
                write!(
                    f,
                    "event=batch batch={batch} trials_done={trials_done} fiducials={fiducials} best_gap={best_gap:.3e}"
                )
            }
            SearchEvent::Finished { trials_done, fiducials, stopped_early } => {
                write!(f, "event=finish trials_done={trials_done} fiducials={fiducials} stopped_early={stopped_early}")
            }
        }
    }
}

pub fn multi_start_search(config: &SearchConfig) -> Result<Vec<SearchResult>> {
    multi_start_search_with(config, |_| {})
}

/// Run `config.trials` trials in batches, reporting through `on_event`.
/// Results are ordered by trial index.
pub fn multi_start_search_with(
    config: &SearchConfig,
    mut on_event: impl FnMut(&SearchEvent),
) -> Result<Vec<SearchResult>> {
    config.validate()?;
    let space = SearchSpace::for_config(config)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| SicError::Config(format!("cannot start worker pool: {e}")))?;
    on_event(&SearchEvent::Started {
        dim: config.dim.d(),
        trials: config.trials,
        parameters: space.parameters(),
        space: space.basis.tag.clone(),
        workers: config.workers,
    });

    let mut results: Vec<SearchResult> = Vec::new();
    let mut fiducials = 0;
    let mut best_gap = f64::INFINITY;
    let mut stopped_early = false;
    let mut start = 0;
    let mut batch = 0;
    while start < config.trials {
        let end = (start + config.batch_size).min(config.trials);
        let outcome: Result<Vec<SearchResult>> = pool.install(|| {
            (start..end)
                .into_par_iter()
                .map(|t| {
                    let x0 = space.random_start(&mut trial_rng(config.master_seed, t));
                    local_minimize(&space, &x0, config, t)
                })
                .collect()
        });
        for r in outcome? {
            best_gap = best_gap.min(r.candidate.objective_gap);
            if r.converged_to == Convergence::Fiducial {
                fiducials += 1;
            }
            results.push(r);
        }
        on_event(&SearchEvent::Batch { batch, trials_done: end, fiducials, best_gap });
        start = end;
        batch += 1;
        if config.stop_after.is_some_and(|n| fiducials >= n) && start < config.trials {
            stopped_early = true;
            break;
        }
    }
    on_event(&SearchEvent::Finished { trials_done: start, fiducials, stopped_early });
    Ok(results)
}

/// Fiducial-grade results with one representative per ray (vectors equal up
/// to a global phase, within `tol` on the overlap modulus, are merged).
pub fn distinct_fiducials(results: &[SearchResult], tol: f64) -> Vec<&SearchResult> {
    let mut kept: Vec<&SearchResult> = Vec::new();
    for r in results.iter().filter(|r| r.converged_to == Convergence::Fiducial) {
        let duplicate = kept.iter().any(|k| {
            let overlap: C64 =
                k.candidate.components.iter().zip(&r.candidate.components).map(|(a, b)| a.conj() * b).sum();
            overlap.norm() >= 1.0 - tol
        });
        if !duplicate {
            kept.push(r);
        }
    }
    kept
}

#[derive(Debug, Clone, PartialEq)]
pub struct RefineOutcome {
    pub candidate: FiducialCandidate,
    /// False when the input was outside the refinable range or polishing
    /// failed to bring it below `1e-13`; the input is then returned unchanged.
    pub converged: bool,
}

/// Gap below which a refined candidate counts as converged.
pub const REFINED_GAP: f64 = 1e-13;

/// Gradient-polish a near-fiducial in the full space.
pub fn refine(candidate: &FiducialCandidate) -> RefineOutcome {
    let unchanged = RefineOutcome { candidate: candidate.clone(), converged: false };
    if candidate.objective_gap.is_nan() || candidate.objective_gap >= GRAY_ZONE_UPPER {
        return unchanged;
    }
    let space = SearchSpace::full(candidate.dim);
    let m = space.polish(&pack(&candidate.components));
    let Ok(phi) = space.basis.lift(&m.x) else { return unchanged };
    let Ok(polished) = FiducialCandidate::new(&phi, candidate.seed, candidate.subspace_tag.clone()) else {
        return unchanged;
    };
    if polished.objective_gap <= candidate.objective_gap && polished.objective_gap < REFINED_GAP {
        RefineOutcome { candidate: polished, converged: true }
    } else if candidate.objective_gap < REFINED_GAP {
        RefineOutcome { candidate: candidate.clone(), converged: true }
    } else {
        unchanged
    }
}

//! Extended-Clifford orbits and stabilisers of fiducials, by exhaustive
//! enumeration of `PEC(d)` for `d ≤ 12`.
//!
//! For each linear part `F ∈ ESL2(Z_d̄)` the operator `E_[F|0]` is applied
//! once; all `d²` translates `D_p E_[F|0] = E_[F|p]` are then tested together
//! through one overlap table.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::fmt;

use rayon::prelude::*;

use crate::clifford::{pec_order, CliffordElement, KernelQuotient, RealizedOperator, Realizer, MAX_ENUMERATION_DIM};
use crate::heisenberg::{DisplacementIndex, WeylHeisenberg};
use crate::objective::{FiducialCandidate, DEFAULT_VERIFY_TOL};
use crate::zmod::{enumerate_esl2, SymplecticExt};
use crate::{Dim, Result, SicError, C64};

/// Default tolerance on `|⟨φ|g|ψ⟩| ≥ 1 − tol`.
pub const DEFAULT_ORBIT_TOL: f64 = 1e-7;

/// Elementwise tolerance when comparing orbit invariants.
pub const INVARIANT_TOL: f64 = 1e-6;

fn guard(dim: Dim) -> Result<()> {
    if dim.d() > MAX_ENUMERATION_DIM {
        return Err(SicError::Capacity {
            what: format!("orbit enumeration in d = {}", dim.d()),
            limit: MAX_ENUMERATION_DIM,
        });
    }
    Ok(())
}

/// `|⟨ψ|D_p|w⟩|` for `p ∈ [0, d)²`, row-major in `(p1, p2)`.
fn cross_overlap_moduli(psi: &[C64], w: &[C64], omega: &[C64]) -> Vec<f64> {
    let d = psi.len();
    let mut out = vec![0.0; d * d];
    let mut a = vec![C64::new(0.0, 0.0); d];
    for p1 in 0..d {
        for k in 0..d {
            a[k] = psi[(k + p1) % d].conj() * w[k];
        }
        for p2 in 0..d {
            let mut acc = C64::new(0.0, 0.0);
            let mut idx = 0;
            for ak in &a {
                acc += ak * omega[idx];
                idx += p2;
                if idx >= d {
                    idx -= d;
                }
            }
            out[p1 * d + p2] = acc.norm();
        }
    }
    out
}

/// The linear parts `E_[F|0]` of one dimension, realized once and shared.
pub struct CliffordTable {
    dim: Dim,
    linear: Vec<(SymplecticExt, RealizedOperator)>,
    omega: Vec<C64>,
    quotient: KernelQuotient,
}

impl CliffordTable {
    pub fn new(dim: Dim) -> Result<Self> {
        guard(dim)?;
        let realizer = Realizer::new(dim);
        let mut parts = enumerate_esl2(dim.dbar());
        // Identity first, so trivial matches are found immediately.
        let id = SymplecticExt::identity(dim.dbar());
        parts.sort_by_key(|f| *f != id);
        let linear = parts
            .into_par_iter()
            .map(|f| realizer.realize_linear_part(&f).map(|op| (f, op)))
            .collect::<Result<Vec<_>>>()?;
        let d = dim.size();
        let omega = (0..d).map(|j| C64::from_polar(1.0, 2.0 * PI * j as f64 / d as f64)).collect();
        Ok(CliffordTable { dim, linear, omega, quotient: KernelQuotient::new(dim) })
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn quotient(&self) -> &KernelQuotient {
        &self.quotient
    }

    /// Elements `g = [F|p]` with `|⟨target|g|source⟩| ≥ 1 − tol` for one `F`,
    /// with the largest rejected overlap.
    fn matches_for(&self, idx: usize, source: &[C64], target: &[C64], tol: f64) -> (Vec<CliffordElement>, f64) {
        let (f, op) = &self.linear[idx];
        let w = op.apply(source);
        let moduli = cross_overlap_moduli(target, &w, &self.omega);
        let d = self.dim.size();
        let mut hits = Vec::new();
        let mut best_miss: f64 = 0.0;
        for (i, &m) in moduli.iter().enumerate() {
            if m >= 1.0 - tol {
                let p = DisplacementIndex::new((i / d) as i64, (i % d) as i64);
                let g = CliffordElement::new(*f, p, self.dim).expect("linear parts live over Z_d̄");
                hits.push(self.quotient.canonical(&g));
            } else {
                best_miss = best_miss.max(m);
            }
        }
        (hits, best_miss)
    }

    /// Some `g` with `realize(g) φ ∝ ψ`, searched with early exit.
    pub fn same_orbit(&self, phi: &[C64], psi: &[C64], tol: f64) -> Option<CliffordElement> {
        (0..self.linear.len())
            .into_par_iter()
            .find_map_first(|i| self.matches_for(i, phi, psi, tol).0.into_iter().min())
    }

    /// All of `stab(φ)` as canonical coset representatives, and the largest
    /// overlap modulus among the rejected elements.
    pub fn stabiliser_elements(&self, phi: &[C64], tol: f64) -> (BTreeSet<CliffordElement>, f64) {
        (0..self.linear.len())
            .into_par_iter()
            .map(|i| self.matches_for(i, phi, phi, tol))
            .collect::<Vec<_>>()
            .into_iter()
            .fold((BTreeSet::new(), 0.0), |(mut set, miss), (hits, m)| {
                set.extend(hits);
                (set, f64::max(miss, m))
            })
    }
}

/// Stabiliser of one fiducial.
#[derive(Debug, Clone, PartialEq)]
pub struct Stabiliser {
    pub elements: Vec<CliffordElement>,
    pub generators: Vec<CliffordElement>,
    pub order: u64,
    /// Largest `|⟨φ|g|φ⟩|` over `g ∉ stab(φ)`: how far the threshold is from
    /// the nearest non-member.
    pub separation: f64,
}

impl Stabiliser {
    pub fn contains(&self, quotient: &KernelQuotient, g: &CliffordElement) -> bool {
        self.elements.binary_search(&quotient.canonical(g)).is_ok()
    }
}

fn closure(
    quotient: &KernelQuotient,
    gens: &[CliffordElement],
    identity: CliffordElement,
) -> BTreeSet<CliffordElement> {
    let mut seen = BTreeSet::from([identity]);
    let mut frontier = vec![identity];
    while let Some(x) = frontier.pop() {
        for g in gens {
            let y = quotient.mul(&x, g);
            if seen.insert(y) {
                frontier.push(y);
            }
        }
    }
    seen
}

/// Compute `stab(φ)`, check that it is a group, and pick generators greedily
/// from the elements of largest order.
pub fn stabiliser_with(table: &CliffordTable, phi: &[C64], tol: f64) -> Result<Stabiliser> {
    let q = table.quotient();
    let (set, separation) = table.stabiliser_elements(phi, tol);
    let identity = q.canonical(&CliffordElement::identity(table.dim()));
    if !set.contains(&identity) {
        return Err(SicError::Structural(format!(
            "identity missing from stabiliser at tol {tol}; vector is not normalized?"
        )));
    }
    for a in &set {
        if !set.contains(&q.canonical(&a.inverse())) || set.iter().any(|b| !set.contains(&q.mul(a, b))) {
            return Err(SicError::Structural(format!(
                "stabiliser at tol {tol} is not closed ({} elements, nearest non-member overlap {separation:.3e}); adjust the tolerance",
                set.len()
            )));
        }
    }
    let mut by_order: Vec<(u64, CliffordElement)> = set.iter().map(|g| (q.order(g), *g)).collect();
    by_order.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    let mut generators = Vec::new();
    let mut generated = BTreeSet::from([identity]);
    for (_, g) in by_order {
        if !generated.contains(&g) {
            generators.push(g);
            generated = closure(q, &generators, identity);
        }
    }
    Ok(Stabiliser { order: set.len() as u64, elements: set.into_iter().collect(), generators, separation })
}

pub fn stabiliser(phi: &FiducialCandidate, tol: f64) -> Result<Stabiliser> {
    stabiliser_with(&CliffordTable::new(phi.dim)?, &phi.components, tol)
}

/// Some `g` with `|⟨ψ| realize(g) |φ⟩| ≥ 1 − tol`, i.e. `g` carries `φ` to `ψ`.
pub fn same_orbit(phi: &FiducialCandidate, psi: &FiducialCandidate, tol: f64) -> Result<Option<CliffordElement>> {
    if phi.dim != psi.dim {
        return Err(SicError::DimensionMismatch { expected: phi.dim.size(), found: psi.dim.size() });
    }
    Ok(CliffordTable::new(phi.dim)?.same_orbit(&phi.components, &psi.components, tol))
}

/// Sorted real parts of the Bargmann invariants `⟨x_0|x_b⟩⟨x_b|x_c⟩⟨x_c|x_0⟩`
/// of the SIC `x_b = D_b φ`. Equal for fiducials in one extended-Clifford
/// orbit, so unequal invariants certify distinct orbits.
pub fn orbit_invariant(phi: &[C64]) -> Vec<f64> {
    let d = phi.len();
    let wh = WeylHeisenberg::new(Dim::new(d as i64).expect("fiducials have d ≥ 2"));
    let vectors: Vec<Vec<C64>> =
        (0..d * d).map(|b| wh.apply(DisplacementIndex::new((b / d) as i64, (b % d) as i64), phi)).collect();
    let inner = |u: &[C64], v: &[C64]| -> C64 { u.iter().zip(v).map(|(a, b)| a.conj() * b).sum() };
    let from_base: Vec<C64> = vectors.iter().map(|v| inner(phi, v)).collect();
    let mut values = Vec::with_capacity(d.pow(4));
    for b in 0..d * d {
        for c in 0..d * d {
            let t = from_base[b] * inner(&vectors[b], &vectors[c]) * from_base[c].conj();
            values.push(t.re);
        }
    }
    values.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    values
}

fn invariants_match(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= INVARIANT_TOL)
}

fn compare_invariants(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        if (x - y).abs() > INVARIANT_TOL {
            return x.partial_cmp(y).unwrap_or(Ordering::Equal);
        }
    }
    a.len().cmp(&b.len())
}

/// `a, b, ..., z, aa, ab, ...`
pub fn orbit_label(mut index: usize) -> String {
    let mut label = Vec::new();
    loop {
        label.push(b'a' + (index % 26) as u8);
        if index < 26 {
            break;
        }
        index = index / 26 - 1;
    }
    label.reverse();
    String::from_utf8(label).expect("ascii")
}

#[derive(Debug, Clone)]
pub struct OrbitRecord {
    pub dim: Dim,
    pub label: String,
    pub representative: FiducialCandidate,
    /// Indices of the input candidates in this orbit.
    pub members: Vec<usize>,
    pub stabiliser: Stabiliser,
    pub stabiliser_order: u64,
    pub orbit_size: u64,
    pub invariant: Vec<f64>,
}

impl OrbitRecord {
    pub fn stabiliser_generators(&self) -> &[CliffordElement] {
        &self.stabiliser.generators
    }
}

impl fmt::Display for OrbitRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "orbit={} dim={} members={} stabiliser_order={} orbit_size={} separation={:.3e}",
            self.label,
            self.dim.d(),
            self.members.len(),
            self.stabiliser_order,
            self.orbit_size,
            self.stabiliser.separation
        )
    }
}

/// Partition verified fiducials into orbits. Labels follow stabiliser order
/// (largest first), then the orbit invariant.
pub fn classify_all(candidates: &[FiducialCandidate], dim: Dim, tol: f64) -> Result<Vec<OrbitRecord>> {
    let table = CliffordTable::new(dim)?;
    for c in candidates {
        if c.dim != dim {
            return Err(SicError::DimensionMismatch { expected: dim.size(), found: c.dim.size() });
        }
        let report = c.verify(DEFAULT_VERIFY_TOL);
        if !report.pass {
            return Err(SicError::Domain(format!(
                "candidate is not a fiducial (max deviation {:.3e})",
                report.max_dev
            )));
        }
    }

    // (representative index, invariant, members)
    let mut groups: Vec<(usize, Vec<f64>, Vec<usize>)> = Vec::new();
    for (i, c) in candidates.iter().enumerate() {
        let inv = orbit_invariant(&c.components);
        let home = groups.iter().position(|(rep, rep_inv, _)| {
            invariants_match(rep_inv, &inv)
                && table.same_orbit(&candidates[*rep].components, &c.components, tol).is_some()
        });
        match home {
            Some(g) => groups[g].2.push(i),
            None => groups.push((i, inv, vec![i])),
        }
    }

    let total = pec_order(dim);
    let mut records = groups
        .into_iter()
        .map(|(rep, invariant, members)| {
            let stab = stabiliser_with(&table, &candidates[rep].components, tol)?;
            if !total.is_multiple_of(stab.order) {
                return Err(SicError::Structural(format!(
                    "stabiliser order {} does not divide |PEC| = {total}",
                    stab.order
                )));
            }
            Ok(OrbitRecord {
                dim,
                label: String::new(),
                representative: candidates[rep].clone(),
                members,
                stabiliser_order: stab.order,
                orbit_size: total / stab.order,
                stabiliser: stab,
                invariant,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    records.sort_by(|a, b| {
        b.stabiliser_order.cmp(&a.stabiliser_order).then_with(|| compare_invariants(&a.invariant, &b.invariant))
    });
    for (i, r) in records.iter_mut().enumerate() {
        r.label = orbit_label(i);
    }
    Ok(records)
}

//! Catalog of the known SIC symmetry series and the conjugacy identities that
//! tie them together.
//!
//! | kind | applies when | type |
//! |------|--------------|------|
//! | `Fz` | every `d` | order-3 unitary |
//! | `Fa` | `d = 9k + 3` | order-3 unitary |
//! | `Fb` | `d = k² - 1` | order-2 unitary |
//! | `Fc` | `d = (3k ± 1)² + 3` | order-2 anti-unitary |
//! | `Fd` | `d = (k + 3)k² - 1` | order-9 unitary |
//! | `Fe` | `d = 9k² + 3` | order-6 anti-unitary |
//! | `Fe'` | `d = l² + 3` | anti-unitary |
//!
//! The catalog is not claimed to be complete.

use std::fmt;
use std::str::FromStr;

use crate::clifford::{
    projective_order, zauner_matrix, zauner_symplectic, CliffordElement, RealizedOperator, Realizer,
};
use crate::heisenberg::DisplacementIndex;
use crate::zmod::{is_conjugate, mat_order, SymplecticExt, MAX_CONJUGACY_MODULUS};
use crate::{Dim, Result, SicError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SymmetryKind {
    Fz,
    Fa,
    Fb,
    Fc,
    Fd,
    Fe,
    Fep,
    J,
}

impl SymmetryKind {
    pub const ALL: [SymmetryKind; 8] = [
        SymmetryKind::Fz,
        SymmetryKind::Fa,
        SymmetryKind::Fb,
        SymmetryKind::Fc,
        SymmetryKind::Fd,
        SymmetryKind::Fe,
        SymmetryKind::Fep,
        SymmetryKind::J,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SymmetryKind::Fz => "fz",
            SymmetryKind::Fa => "fa",
            SymmetryKind::Fb => "fb",
            SymmetryKind::Fc => "fc",
            SymmetryKind::Fd => "fd",
            SymmetryKind::Fe => "fe",
            SymmetryKind::Fep => "fep",
            SymmetryKind::J => "j",
        }
    }

    /// Why the kind does not apply, phrased as the failed series condition.
    fn condition(&self) -> &'static str {
        match self {
            SymmetryKind::Fz | SymmetryKind::J => "always applicable",
            SymmetryKind::Fa => "d is not 9k+3 with k >= 1",
            SymmetryKind::Fb => "d+1 not a square",
            SymmetryKind::Fc => "d-3 is not (3k+-1)^2",
            SymmetryKind::Fd => "d is not (k+3)k^2-1 with k >= 2",
            SymmetryKind::Fe => "d is not 9k^2+3 with k >= 1",
            SymmetryKind::Fep => "d-3 is not a positive square",
        }
    }
}

impl fmt::Display for SymmetryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SymmetryKind {
    type Err = SicError;

    fn from_str(s: &str) -> Result<Self> {
        SymmetryKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s) || (s.eq_ignore_ascii_case("fe'") && *k == SymmetryKind::Fep))
            .ok_or_else(|| SicError::Domain(format!("unknown symmetry kind '{s}'")))
    }
}

/// Integer parameters of a series member; unused ones are `None`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SymmetryParams {
    pub k: Option<i64>,
    pub l: Option<i64>,
    pub kappa: Option<i64>,
    /// `+1` / `-1` branch of `Fc`'s `3k ± 1`.
    pub branch: Option<i8>,
}

impl fmt::Display for SymmetryParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if let Some(k) = self.k {
            parts.push(format!("k={k}"));
        }
        if let Some(l) = self.l {
            parts.push(format!("l={l}"));
        }
        if let Some(kappa) = self.kappa {
            parts.push(format!("kappa={kappa}"));
        }
        if let Some(b) = self.branch {
            parts.push(format!("branch={}", if b > 0 { '+' } else { '-' }));
        }
        f.write_str(&parts.join(","))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymmetrySpec {
    pub kind: SymmetryKind,
    pub dim: Dim,
    pub params: SymmetryParams,
    /// Closed-form matrix reduced mod `d̄`.
    pub matrix: SymplecticExt,
    /// Projective order of the realized operator.
    pub order: u64,
    pub antiunitary: bool,
}

impl SymmetrySpec {
    pub fn element(&self) -> CliffordElement {
        CliffordElement::new(self.matrix, DisplacementIndex::ZERO, self.dim).expect("catalog matrices live over Z_d̄")
    }

    /// `E_[F|0]`. `Fz` uses the phase for which `Sz³ = I`.
    pub fn realize(&self) -> RealizedOperator {
        match self.kind {
            SymmetryKind::Fz => zauner_matrix(self.dim),
            _ => Realizer::new(self.dim).realize_linear_part(&self.matrix).expect("catalog matrices are in ESL2"),
        }
    }
}

impl fmt::Display for SymmetrySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [[a, b], [g, h]] = self.matrix.entries();
        write!(
            f,
            "kind={} params={} matrix=[[{a},{b}],[{g},{h}]] modulus={} order={} antiunitary={}",
            self.kind,
            if self.params == SymmetryParams::default() { "-".to_string() } else { self.params.to_string() },
            self.matrix.modulus(),
            self.order,
            self.antiunitary
        )
    }
}

fn exact_sqrt(n: i64) -> Option<i64> {
    if n < 0 {
        return None;
    }
    let r = (n as f64).sqrt().round() as i64;
    (r.saturating_mul(r) == n).then_some(r)
}

/// Every parameter set for which `kind` applies in dimension `d`, paired with
/// its unreduced closed-form matrix and determinant sign.
fn closed_forms(kind: SymmetryKind, d: i64) -> Vec<(SymmetryParams, [[i64; 2]; 2], i8)> {
    let none = SymmetryParams::default();
    match kind {
        SymmetryKind::Fz => vec![(none, [[0, d - 1], [d + 1, d - 1]], 1)],
        SymmetryKind::J => vec![(none, [[1, 0], [0, -1]], -1)],
        SymmetryKind::Fa => {
            if d >= 12 && (d - 3) % 9 == 0 {
                let k = (d - 3) / 9;
                vec![(SymmetryParams { k: Some(k), ..none }, [[1, d + 3], [d + 3 * k, d - 2]], 1)]
            } else {
                vec![]
            }
        }
        SymmetryKind::Fb => match exact_sqrt(d + 1) {
            Some(k) if k >= 3 => vec![(SymmetryParams { k: Some(k), ..none }, [[-k, d], [d, d - k]], 1)],
            _ => vec![],
        },
        SymmetryKind::Fc => {
            let Some(s) = exact_sqrt(d - 3) else { return vec![] };
            if s == 0 || s % 3 == 0 {
                return vec![];
            }
            let mut out = Vec::new();
            for branch in [1i8, -1] {
                // 3k + branch = ±s with k ≥ 0
                for target in [s, -s] {
                    let num = target - branch as i64;
                    if num % 3 == 0 && num >= 0 {
                        let k = num / 3;
                        let kappa = 3 * k * k + branch as i64 * k + 1;
                        let m = [[kappa, d - 2 * kappa], [d + 2 * kappa, d - kappa]];
                        if !out.iter().any(|(_, prev, _)| *prev == m) {
                            out.push((
                                SymmetryParams { k: Some(k), kappa: Some(kappa), branch: Some(branch), ..none },
                                m,
                                -1,
                            ));
                        }
                    }
                }
            }
            out
        }
        SymmetryKind::Fd => (2..)
            .take_while(|k| (k + 3) * k * k - 1 <= d)
            .filter(|k| (k + 3) * k * k - 1 == d)
            .map(|k| (SymmetryParams { k: Some(k), ..none }, [[0, 1], [-1, -(k + 3) * k]], 1))
            .collect(),
        SymmetryKind::Fe => {
            if (d - 3) % 9 != 0 {
                return vec![];
            }
            match exact_sqrt((d - 3) / 9) {
                Some(k) if k >= 1 => vec![(SymmetryParams { k: Some(k), ..none }, [[0, 1], [1, d + 3 * k]], -1)],
                _ => vec![],
            }
        }
        SymmetryKind::Fep => match exact_sqrt(d - 3) {
            Some(l) if l >= 1 => {
                let corner = if (l + 1) % 3 == 0 { d - l } else { d + l };
                vec![(SymmetryParams { l: Some(l), ..none }, [[0, 1], [1, corner]], -1)]
            }
            _ => vec![],
        },
    }
}

fn make_spec(
    kind: SymmetryKind,
    dim: Dim,
    params: SymmetryParams,
    entries: [[i64; 2]; 2],
    sign: i8,
) -> Result<SymmetrySpec> {
    let matrix = SymplecticExt::with_sign(entries, sign, dim.dbar())
        .map_err(|e| SicError::Structural(format!("{kind} closed form for d = {dim}: {e}")))?;
    let mut spec = SymmetrySpec { kind, dim, params, matrix, order: 0, antiunitary: sign == -1 };
    let cap = mat_order(&matrix)?;
    spec.order = projective_order(&spec.realize(), cap)
        .ok_or_else(|| SicError::Structural(format!("{kind}: projective order exceeds matrix order {cap}")))?;
    Ok(spec)
}

/// All variants of `kind` in dimension `dim` (two for `Fc` when both sign
/// branches give distinct matrices).
pub fn build_symmetry_variants(kind: SymmetryKind, dim: Dim) -> Result<Vec<SymmetrySpec>> {
    let forms = closed_forms(kind, dim.d());
    if forms.is_empty() {
        return Err(SicError::Domain(format!("{kind} inapplicable: {}", kind.condition())));
    }
    forms.into_iter().map(|(p, m, s)| make_spec(kind, dim, p, m, s)).collect()
}

pub fn build_symmetry(kind: SymmetryKind, dim: Dim) -> Result<SymmetrySpec> {
    Ok(build_symmetry_variants(kind, dim)?.remove(0))
}

pub fn is_applicable(kind: SymmetryKind, dim: Dim) -> bool {
    !closed_forms(kind, dim.d()).is_empty()
}

/// The series that apply in `dim`, in catalog order. `J` is always available
/// via [`build_symmetry`] but not listed here.
pub fn applicable_symmetries(dim: Dim) -> Result<Vec<SymmetrySpec>> {
    let mut out = Vec::new();
    for kind in SymmetryKind::ALL.into_iter().filter(|k| *k != SymmetryKind::J) {
        if is_applicable(kind, dim) {
            out.extend(build_symmetry_variants(kind, dim)?);
        }
    }
    Ok(out)
}

/// Human-readable reason why `kind` is not available in `dim`, if it isn't.
pub fn inapplicability_reason(kind: SymmetryKind, dim: Dim) -> Option<String> {
    (!is_applicable(kind, dim)).then(|| format!("{kind} inapplicable: {}", kind.condition()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConjugacyCheck {
    pub identity: String,
    pub witness: SymplecticExt,
    pub modulus: i64,
    pub pass: bool,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConjugacyReport {
    pub checks: Vec<ConjugacyCheck>,
}

impl ConjugacyReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

fn check(
    identity: &str,
    witness: [[i64; 2]; 2],
    lhs: &SymplecticExt,
    rhs: &SymplecticExt,
    modulus: i64,
) -> Result<ConjugacyCheck> {
    let g = SymplecticExt::new(witness, modulus)?;
    let lhs = lhs.reduce_to(modulus)?;
    let rhs = rhs.reduce_to(modulus)?;
    Ok(ConjugacyCheck {
        identity: identity.to_string(),
        witness: g,
        modulus,
        pass: g.mul_unchecked(&lhs) == rhs.mul_unchecked(&g),
    })
}

/// Check the explicit-witness identities `G·Fa = Fe²·G`, `G·Fc·Fz = Fe'·G`
/// and `G·J = Fe'³·G` wherever the involved series apply. Each identity is
/// checked mod `d̄`, and additionally mod `d` when the two differ.
pub fn verify_conjugacies(dim: Dim) -> Result<ConjugacyReport> {
    let d = dim.d();
    let mut moduli = vec![dim.dbar()];
    if dim.is_even() {
        moduli.push(d);
    }
    let mut report = ConjugacyReport::default();

    if let (Some(fa), Some(fe)) = (first_form(SymmetryKind::Fa, dim)?, first_form(SymmetryKind::Fe, dim)?) {
        let k = fe.0.k.expect("Fe carries k");
        let fe2 = fe.1.mul_unchecked(&fe.1);
        for &m in &moduli {
            report.checks.push(check("G*Fa = Fe^2*G", [[k + 1, 1], [k, 1]], &fa.1, &fe2, m)?);
        }
    }

    if let Some(fep) = first_form(SymmetryKind::Fep, dim)? {
        let fz = zauner_symplectic(dim);
        for (params, entries, sign) in closed_forms(SymmetryKind::Fc, d) {
            let fc = SymplecticExt::with_sign(entries, sign, dim.dbar())?;
            let kappa = params.kappa.expect("Fc carries kappa");
            let fcfz = fc.mul_unchecked(&fz);
            for &m in &moduli {
                report.checks.push(check(
                    "G*Fc*Fz = Fe'*G",
                    [[kappa, kappa - 1], [kappa + 1, kappa]],
                    &fcfz,
                    &fep.1,
                    m,
                )?);
            }
        }
        let l = fep.0.l.expect("Fe' carries l");
        if l % 2 == 0 {
            let mm = l / 2;
            let t = if (2 * mm + 1) % 3 == 0 { mm * (2 * mm - 1) } else { mm * (2 * mm + 1) };
            let fep3 = fep.1.pow(3);
            let j = SymplecticExt::j(dim.dbar());
            for &m in &moduli {
                report.checks.push(check("G*J = Fe'^3*G", [[t + 2, -t - 1], [-1, 1]], &j, &fep3, m)?);
            }
        }
    }
    Ok(report)
}

fn first_form(kind: SymmetryKind, dim: Dim) -> Result<Option<(SymmetryParams, SymplecticExt)>> {
    match closed_forms(kind, dim.d()).into_iter().next() {
        Some((p, e, s)) => Ok(Some((p, SymplecticExt::with_sign(e, s, dim.dbar())?))),
        None => Ok(None),
    }
}

/// Outcome of an exhaustive conjugacy test that may be out of reach.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConjugacyStatus {
    Conjugate,
    NotConjugate,
    /// The modulus exceeds the exhaustive-search cap.
    Unverified,
}

/// Conjugacy of `F` and `G` modulo `modulus` (which must divide theirs).
pub fn conjugacy_status(f: &SymplecticExt, g: &SymplecticExt, modulus: i64) -> Result<ConjugacyStatus> {
    if modulus > MAX_CONJUGACY_MODULUS {
        return Ok(ConjugacyStatus::Unverified);
    }
    Ok(match is_conjugate(&f.reduce_to(modulus)?, &g.reduce_to(modulus)?)? {
        Some(_) => ConjugacyStatus::Conjugate,
        None => ConjugacyStatus::NotConjugate,
    })
}

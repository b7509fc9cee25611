//! The extended Clifford group.
//!
//! Elements are affine pairs `[F|p]` with `F ∈ ESL2(Z_d̄)` and `p ∈ Z_d̄²`,
//! multiplied by `[F|p][G|q] = [FG | p + Fq]`. The map `E` sends a symplectic
//! pair to the unitary `C_[F|p] = D_p V_F` and an anti-symplectic pair to the
//! anti-unitary `Ĵ C_[JF|Jp]`. Operators are only meaningful up to a global
//! phase; every cross-module contract here is stated projectively.

use std::collections::{BTreeSet, VecDeque};
use std::f64::consts::PI;
use std::fmt;

use nalgebra::DMatrix;

use crate::heisenberg::{DisplacementIndex, PhaseTable, WeylHeisenberg};
use crate::zmod::{enumerate_esl2, inverse_mod, reduce, sl2_group_order, SymplecticExt};
use crate::{Dim, Result, SicError, C64};

/// Largest dimension for which `PEC(d)` is enumerated exhaustively.
pub const MAX_ENUMERATION_DIM: i64 = 12;

/// Tolerance on `| |tr(A†B)| - d |` for projective equality.
pub const PROJECTIVE_TOL: f64 = 1e-10;

/// An element `[F|p]` of `ESL2(Z_d̄) ⋉ Z_d̄²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CliffordElement {
    f: SymplecticExt,
    p: DisplacementIndex,
}

impl CliffordElement {
    pub fn new(f: SymplecticExt, p: DisplacementIndex, dim: Dim) -> Result<Self> {
        if f.modulus() != dim.dbar() {
            return Err(SicError::ModulusMismatch(f.modulus(), dim.dbar()));
        }
        Ok(CliffordElement { f, p: p.canonical(dim) })
    }

    pub fn identity(dim: Dim) -> Self {
        CliffordElement { f: SymplecticExt::identity(dim.dbar()), p: DisplacementIndex::ZERO }
    }

    pub fn displacement(p: DisplacementIndex, dim: Dim) -> Self {
        CliffordElement { f: SymplecticExt::identity(dim.dbar()), p: p.canonical(dim) }
    }

    /// The pure conjugation `[J|0]`.
    pub fn conjugation(dim: Dim) -> Self {
        CliffordElement { f: SymplecticExt::j(dim.dbar()), p: DisplacementIndex::ZERO }
    }

    pub fn f(&self) -> &SymplecticExt {
        &self.f
    }

    pub fn p(&self) -> DisplacementIndex {
        self.p
    }

    pub fn is_antiunitary(&self) -> bool {
        self.f.det_sign() == -1
    }

    fn modulus(&self) -> i64 {
        self.f.modulus()
    }

    pub fn mul(&self, other: &CliffordElement) -> CliffordElement {
        let m = self.modulus();
        let fq = self.f.apply((other.p.p1, other.p.p2));
        CliffordElement {
            f: self.f.mul_unchecked(&other.f),
            p: DisplacementIndex::new(reduce(self.p.p1 + fq.0, m), reduce(self.p.p2 + fq.1, m)),
        }
    }

    pub fn inverse(&self) -> CliffordElement {
        let m = self.modulus();
        let finv = self.f.inverse();
        let q = finv.apply((self.p.p1, self.p.p2));
        CliffordElement { f: finv, p: DisplacementIndex::new(reduce(-q.0, m), reduce(-q.1, m)) }
    }

    pub fn pow(&self, n: u64) -> CliffordElement {
        let mut acc = CliffordElement { f: SymplecticExt::identity(self.modulus()), p: DisplacementIndex::ZERO };
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn is_identity(&self) -> bool {
        self.f.is_identity() && self.p == DisplacementIndex::ZERO
    }
}

impl fmt::Display for CliffordElement {
    /// Block form `[F11 F12 | p1; F21 F22 | p2]`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [[a, b], [g, h]] = self.f.entries();
        write!(f, "[{a} {b} | {}; {g} {h} | {}]", self.p.p1, self.p.p2)
    }
}

/// A unitary matrix `M`, optionally preceded by complex conjugation: the
/// operator acts as `v ↦ M v` or `v ↦ M v*`.
#[derive(Debug, Clone, PartialEq)]
pub struct RealizedOperator {
    pub matrix: DMatrix<C64>,
    pub conjugate_first: bool,
}

impl RealizedOperator {
    pub fn unitary(matrix: DMatrix<C64>) -> Self {
        RealizedOperator { matrix, conjugate_first: false }
    }

    pub fn identity(n: usize) -> Self {
        Self::unitary(DMatrix::identity(n, n))
    }

    pub fn size(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn is_antiunitary(&self) -> bool {
        self.conjugate_first
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        let n = self.size();
        assert_eq!(v.len(), n);
        let mut out = vec![C64::new(0.0, 0.0); n];
        for (j, &vj) in v.iter().enumerate() {
            let x = if self.conjugate_first { vj.conj() } else { vj };
            for (i, o) in out.iter_mut().enumerate() {
                *o += self.matrix[(i, j)] * x;
            }
        }
        out
    }

    /// `self ∘ other`
    pub fn compose(&self, other: &RealizedOperator) -> RealizedOperator {
        let rhs = if self.conjugate_first { other.matrix.map(|z| z.conj()) } else { other.matrix.clone() };
        RealizedOperator { matrix: &self.matrix * rhs, conjugate_first: self.conjugate_first ^ other.conjugate_first }
    }

    pub fn inverse(&self) -> RealizedOperator {
        if self.conjugate_first {
            // (M K)⁻¹ = K M† = (M†)* K
            RealizedOperator { matrix: self.matrix.transpose(), conjugate_first: true }
        } else {
            RealizedOperator::unitary(self.matrix.adjoint())
        }
    }

    pub fn pow(&self, n: u64) -> RealizedOperator {
        let mut acc = RealizedOperator::identity(self.size());
        for _ in 0..n {
            acc = acc.compose(self);
        }
        acc
    }

    pub fn scaled(&self, phase: C64) -> RealizedOperator {
        RealizedOperator { matrix: &self.matrix * phase, conjugate_first: self.conjugate_first }
    }

    /// `‖M†M - I‖_max`
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.size();
        (self.matrix.adjoint() * &self.matrix - DMatrix::<C64>::identity(n, n))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Conjugate a linear operator: `A X A⁻¹` (a linear map even when `A` is anti-linear).
    pub fn conjugate(&self, x: &DMatrix<C64>) -> DMatrix<C64> {
        let inner = if self.conjugate_first { x.map(|z| z.conj()) } else { x.clone() };
        &self.matrix * inner * self.matrix.adjoint()
    }

    /// If `self` is `e^{iθ} I` (as a linear operator), return `e^{iθ}`.
    pub fn scalar_value(&self, tol: f64) -> Option<C64> {
        if self.conjugate_first {
            return None;
        }
        let n = self.size();
        let z = self.matrix[(0, 0)];
        let ok = (0..n).all(|i| {
            (0..n).all(|j| {
                let expect = if i == j { z } else { C64::new(0.0, 0.0) };
                (self.matrix[(i, j)] - expect).norm() <= tol
            })
        });
        ok.then_some(z)
    }
}

/// `A = e^{iξ} B` for some real `ξ`, tested as `|tr(A†B)| = d`.
pub fn projective_equal(a: &RealizedOperator, b: &RealizedOperator) -> bool {
    if a.conjugate_first != b.conjugate_first || a.size() != b.size() {
        return false;
    }
    let tr: C64 = a.matrix.iter().zip(b.matrix.iter()).map(|(x, y)| x.conj() * y).sum();
    (tr.norm() - a.size() as f64).abs() <= PROJECTIVE_TOL
}

/// Smallest `n ≥ 1` with `Aⁿ ∝ I`, up to `cap`.
pub fn projective_order(a: &RealizedOperator, cap: u64) -> Option<u64> {
    let id = RealizedOperator::identity(a.size());
    let mut power = a.clone();
    for n in 1..=cap {
        if projective_equal(&power, &id) {
            return Some(n);
        }
        power = power.compose(a);
    }
    None
}

/// `V_F` from the closed form, assuming `β` is invertible mod `d̄`.
fn metaplectic_direct(f: &SymplecticExt, beta_inv: i64, phases: &PhaseTable) -> DMatrix<C64> {
    let dim = phases.dim();
    let d = dim.d();
    let dbar = dim.dbar();
    let (alpha, delta) = (f.alpha(), f.delta());
    let norm = 1.0 / (d as f64).sqrt();
    DMatrix::from_fn(d as usize, d as usize, |j, k| {
        let (j, k) = (j as i64, k as i64);
        let quad = reduce(alpha * k * k - 2 * j * k + delta * j * j, dbar);
        phases.tau_pow(reduce(beta_inv * quad, dbar)) * norm
    })
}

fn metaplectic_matrix(f: &SymplecticExt, phases: &PhaseTable) -> Result<DMatrix<C64>> {
    let dbar = phases.dim().dbar();
    if let Some(beta_inv) = inverse_mod(f.beta(), dbar) {
        return Ok(metaplectic_direct(f, beta_inv, phases));
    }
    // F = F1 F2 with F1 = [[0, -1], [1, x]], F2 = [[γ + xα, δ + xβ], [-α, -β]].
    let (alpha, beta, gamma, delta) = (f.alpha(), f.beta(), f.gamma(), f.delta());
    let x = (0..dbar)
        .find(|x| inverse_mod(delta + x * beta, dbar).is_some())
        .ok_or_else(|| SicError::Structural(format!("no x with δ + xβ invertible for {f}")))?;
    let f1 = SymplecticExt::with_sign([[0, -1], [1, x]], 1, dbar)?;
    let f2 = SymplecticExt::with_sign([[gamma + x * alpha, delta + x * beta], [-alpha, -beta]], 1, dbar)?;
    debug_assert_eq!(f1.mul_unchecked(&f2), *f);
    let v1 = metaplectic_direct(&f1, inverse_mod(f1.beta(), dbar).expect("β = -1"), phases);
    let v2 = metaplectic_direct(&f2, inverse_mod(f2.beta(), dbar).expect("chosen invertible"), phases);
    Ok(v1 * v2)
}

/// The metaplectic unitary `V_F` for `F ∈ SL2(Z_d̄)`, with phase `ξ = 0`.
pub fn metaplectic(f: &SymplecticExt, dim: Dim) -> Result<RealizedOperator> {
    Realizer::new(dim).metaplectic(f)
}

/// `E_[F|p]` as a concrete (anti-)unitary.
pub fn realize(g: &CliffordElement, dim: Dim) -> Result<RealizedOperator> {
    Realizer::new(dim).realize(g)
}

/// `Fz = [[0, d-1], [d+1, d-1]]` over `Z_d̄`.
pub fn zauner_symplectic(dim: Dim) -> SymplecticExt {
    let d = dim.d();
    SymplecticExt::with_sign([[0, d - 1], [d + 1, d - 1]], 1, dim.dbar()).expect("Fz has determinant 1")
}

/// Zauner's matrix `Sz = e^{iπ(d-1)/12} C_[Fz|0]`, phased so that `Sz³ = I`.
pub fn zauner_matrix(dim: Dim) -> RealizedOperator {
    let op = metaplectic(&zauner_symplectic(dim), dim).expect("Fz is symplectic");
    op.scaled(C64::from_polar(1.0, PI * (dim.d() - 1) as f64 / 12.0))
}

/// Realizes many elements of one dimension while sharing the phase table.
#[derive(Debug, Clone)]
pub struct Realizer {
    wh: WeylHeisenberg,
}

impl Realizer {
    pub fn new(dim: Dim) -> Self {
        Realizer { wh: WeylHeisenberg::new(dim) }
    }

    pub fn dim(&self) -> Dim {
        self.wh.dim()
    }

    pub fn heisenberg(&self) -> &WeylHeisenberg {
        &self.wh
    }

    fn check_modulus(&self, f: &SymplecticExt) -> Result<()> {
        if f.modulus() != self.dim().dbar() {
            return Err(SicError::ModulusMismatch(f.modulus(), self.dim().dbar()));
        }
        Ok(())
    }

    pub fn metaplectic(&self, f: &SymplecticExt) -> Result<RealizedOperator> {
        self.check_modulus(f)?;
        if !f.is_symplectic() {
            return Err(SicError::Domain(format!("metaplectic operator needs det F = +1, got {f}")));
        }
        Ok(RealizedOperator::unitary(metaplectic_matrix(f, self.wh.phases())?))
    }

    /// `E_[F|0]`: `V_F`, or `Ĵ V_{JF}` when `F` is anti-symplectic.
    pub fn realize_linear_part(&self, f: &SymplecticExt) -> Result<RealizedOperator> {
        self.check_modulus(f)?;
        if f.is_symplectic() {
            return self.metaplectic(f);
        }
        let jf = SymplecticExt::j(f.modulus()).mul_unchecked(f);
        let v = metaplectic_matrix(&jf, self.wh.phases())?;
        Ok(RealizedOperator { matrix: v.map(|z| z.conj()), conjugate_first: true })
    }

    pub fn realize(&self, g: &CliffordElement) -> Result<RealizedOperator> {
        let dim = self.dim();
        if g.is_antiunitary() {
            // Ĵ C_[JF|Jp] v = (D_{Jp} V_{JF})* v*
            let jf = SymplecticExt::j(dim.dbar()).mul_unchecked(g.f());
            let jp = DisplacementIndex::new(g.p().p1, -g.p().p2);
            let c = self.wh.matrix(jp) * metaplectic_matrix(&jf, self.wh.phases())?;
            Ok(RealizedOperator { matrix: c.map(|z| z.conj()), conjugate_first: true })
        } else {
            let v = metaplectic_matrix(g.f(), self.wh.phases())?;
            Ok(RealizedOperator::unitary(self.wh.matrix(g.p()) * v))
        }
    }
}

/// `ker(C)`: the trivial group for odd `d`, and the 32-element group generated
/// by `[(1+d)I|0]`, `[[1, d], [0, 1]] | (d/2, 0)]`, `[[1, 0], [d, 1]] | (0, d/2)]`
/// for even `d`.
pub fn kernel_cosets(dim: Dim) -> Vec<CliffordElement> {
    let id = CliffordElement::identity(dim);
    if !dim.is_even() {
        return vec![id];
    }
    let (d, m) = (dim.d(), dim.dbar());
    let gens = [
        CliffordElement::new(
            SymplecticExt::with_sign([[1 + d, 0], [0, 1 + d]], 1, m).unwrap(),
            DisplacementIndex::ZERO,
            dim,
        ),
        CliffordElement::new(
            SymplecticExt::with_sign([[1, d], [0, 1]], 1, m).unwrap(),
            DisplacementIndex::new(d / 2, 0),
            dim,
        ),
        CliffordElement::new(
            SymplecticExt::with_sign([[1, 0], [d, 1]], 1, m).unwrap(),
            DisplacementIndex::new(0, d / 2),
            dim,
        ),
    ]
    .map(|g| g.expect("kernel generators live over Z_d̄"));
    generate_group(&gens, id)
}

/// Closure of `gens` under multiplication, as a sorted list.
pub fn generate_group(gens: &[CliffordElement], identity: CliffordElement) -> Vec<CliffordElement> {
    let mut seen = BTreeSet::from([identity]);
    let mut queue = VecDeque::from([identity]);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = x.mul(g);
            if seen.insert(y) {
                queue.push_back(y);
            }
        }
    }
    seen.into_iter().collect()
}

/// Coset arithmetic in `PEC(d) ≅ ecl(d̄) / ker(C)`.
#[derive(Debug, Clone)]
pub struct KernelQuotient {
    kernel: Vec<CliffordElement>,
}

impl KernelQuotient {
    pub fn new(dim: Dim) -> Self {
        KernelQuotient { kernel: kernel_cosets(dim) }
    }

    pub fn kernel(&self) -> &[CliffordElement] {
        &self.kernel
    }

    /// Smallest element of the coset `g·ker(C)`.
    pub fn canonical(&self, g: &CliffordElement) -> CliffordElement {
        self.kernel.iter().map(|k| g.mul(k)).min().expect("kernel contains the identity")
    }

    pub fn is_canonical(&self, g: &CliffordElement) -> bool {
        self.kernel.iter().all(|k| *g <= g.mul(k))
    }

    pub fn mul(&self, a: &CliffordElement, b: &CliffordElement) -> CliffordElement {
        self.canonical(&a.mul(b))
    }

    pub fn is_trivial(&self, g: &CliffordElement) -> bool {
        self.kernel.contains(g)
    }

    /// Order of `g` in the quotient.
    pub fn order(&self, g: &CliffordElement) -> u64 {
        let mut power = *g;
        let mut n = 1;
        while !self.is_trivial(&power) {
            power = power.mul(g);
            n += 1;
        }
        n
    }
}

/// `|PC(d)| = d⁵ ∏_{p | d} (1 - p⁻²)`
pub fn pc_order(dim: Dim) -> u64 {
    let d = dim.d() as u64;
    d * d * sl2_group_order(dim.d())
}

/// `|PEC(d)| = 2 |PC(d)|`
pub fn pec_order(dim: Dim) -> u64 {
    2 * pc_order(dim)
}

fn enumeration_guard(dim: Dim) -> Result<()> {
    if dim.d() > MAX_ENUMERATION_DIM {
        return Err(SicError::Capacity {
            what: format!("exhaustive enumeration of PEC({})", dim.d()),
            limit: MAX_ENUMERATION_DIM,
        });
    }
    Ok(())
}

/// Every `F ∈ ESL2(Z_d̄)` paired with every `p ∈ Z_d̄²`: the full affine
/// group before quotienting by `ker(C)`.
pub fn enumerate_ecl(dim: Dim) -> Result<impl Iterator<Item = CliffordElement>> {
    enumeration_guard(dim)?;
    let m = dim.dbar();
    Ok(enumerate_esl2(m).into_iter().flat_map(move |f| {
        (0..m).flat_map(move |p1| (0..m).map(move |p2| CliffordElement { f, p: DisplacementIndex::new(p1, p2) }))
    }))
}

/// One representative of each element of `PEC(d)`: the minimal element of
/// its `ker(C)` coset.
pub fn enumerate_pec(dim: Dim) -> Result<impl Iterator<Item = CliffordElement>> {
    let quotient = KernelQuotient::new(dim);
    Ok(enumerate_ecl(dim)?.filter(move |g| quotient.is_canonical(g)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heisenberg::symplectic_form;
    use crate::zmod::enumerate_sl2;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn dim(d: i64) -> Dim {
        Dim::new(d).unwrap()
    }

    fn max_diff(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
        (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    fn random_element(rng: &mut impl Rng, dim: Dim, esl2: &[SymplecticExt]) -> CliffordElement {
        let f = esl2[rng.random_range(0..esl2.len())];
        let m = dim.dbar();
        CliffordElement::new(f, DisplacementIndex::new(rng.random_range(0..m), rng.random_range(0..m)), dim).unwrap()
    }

    /// `C = D_p Σ_r D_{Fr} D_r† / (d √η(F))`, odd `d` only.
    fn sum_formula(f: &SymplecticExt, p: DisplacementIndex, dm: Dim) -> (DMatrix<C64>, usize) {
        let wh = WeylHeisenberg::new(dm);
        let d = dm.d();
        let n = dm.size();
        let mut acc = DMatrix::<C64>::zeros(n, n);
        let mut eta = 0;
        for r1 in 0..d {
            for r2 in 0..d {
                let (a, b) = f.apply((r1, r2));
                if a == r1 && b == r2 {
                    eta += 1;
                }
                let r = DisplacementIndex::new(r1, r2);
                acc += wh.matrix(DisplacementIndex::new(a, b)) * wh.matrix(r).adjoint();
            }
        }
        let scale = 1.0 / (d as f64 * (eta as f64).sqrt());
        (wh.matrix(p) * acc * C64::new(scale, 0.0), eta)
    }

    #[test]
    fn identity_and_unitarity() {
        for d in 2..=9 {
            let dm = dim(d);
            let id = metaplectic(&SymplecticExt::identity(dm.dbar()), dm).unwrap();
            assert!(projective_equal(&id, &RealizedOperator::identity(d as usize)));
            for f in enumerate_sl2(dm.dbar()).iter().step_by(7) {
                assert!(metaplectic(f, dm).unwrap().unitarity_defect() < 1e-13, "d = {d}, F = {f}");
            }
        }
    }

    #[test]
    fn direct_branch_d4() {
        let dm = dim(4);
        let f = SymplecticExt::new([[0, 7], [1, 7]], 8).unwrap();
        assert!(inverse_mod(f.beta(), 8).is_some());
        assert!(metaplectic(&f, dm).unwrap().unitarity_defect() < 1e-13);
    }

    #[test]
    fn rejects_antisymplectic() {
        let dm = dim(5);
        assert!(metaplectic(&SymplecticExt::j(5), dm).is_err());
        assert!(metaplectic(&SymplecticExt::identity(10), dm).is_err());
    }

    #[test]
    fn zauner_is_closed_form() {
        for d in [3, 5, 7, 9] {
            let dm = dim(d);
            let t = PhaseTable::new(dm);
            let sz = metaplectic(&zauner_symplectic(dm), dm).unwrap();
            let closed = DMatrix::from_fn(d as usize, d as usize, |j, k| {
                let (j, k) = (j as i64, k as i64);
                t.tau_pow(2 * j * k + j * j) / (d as f64).sqrt()
            });
            assert!(projective_equal(&sz, &RealizedOperator::unitary(closed)));
        }
    }

    #[test]
    fn zauner_has_order_three() {
        for d in 2..=50 {
            let sz = zauner_matrix(dim(d));
            let cube = sz.pow(3);
            assert!(max_diff(&cube.matrix, &DMatrix::identity(d as usize, d as usize)) < 1e-12, "d = {d}");
        }
    }

    #[test]
    fn realize_special_elements() {
        let dm = dim(6);
        let r = Realizer::new(dm);
        let p = DisplacementIndex::new(3, 5);
        let disp = r.realize(&CliffordElement::displacement(p, dm)).unwrap();
        assert!(max_diff(&disp.matrix, &r.heisenberg().matrix(p)) < 1e-13);

        let j = r.realize(&CliffordElement::conjugation(dm)).unwrap();
        assert!(j.is_antiunitary());
        assert!(projective_equal(&j, &RealizedOperator { matrix: DMatrix::identity(6, 6), conjugate_first: true }));
    }

    #[test]
    fn conjugation_law() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for d in [3, 4, 5, 8] {
            let dm = dim(d);
            let r = Realizer::new(dm);
            let esl2 = enumerate_esl2(dm.dbar());
            let wh = r.heisenberg();
            for _ in 0..100 {
                let g = random_element(&mut rng, dm, &esl2);
                let q = DisplacementIndex::new(rng.random_range(0..dm.dbar()), rng.random_range(0..dm.dbar()));
                let op = r.realize(&g).unwrap();
                let fq = g.f().apply((q.p1, q.p2));
                let fq = DisplacementIndex::new(fq.0, fq.1);
                let expected = wh.matrix(fq) * wh.phases().omega_pow(symplectic_form(g.p(), fq));
                assert!(max_diff(&op.conjugate(&wh.matrix(q)), &expected) < 1e-12, "d = {d}, g = {g}");
            }
        }
    }

    #[test]
    fn projective_equality_examples() {
        let dm = dim(5);
        let r = Realizer::new(dm);
        let m = r.metaplectic(&zauner_symplectic(dm)).unwrap();
        assert!(projective_equal(&m, &m.scaled(C64::from_polar(1.0, PI / 5.0))));
        for d in 2..=6 {
            let wh = WeylHeisenberg::new(dim(d));
            let a = RealizedOperator::identity(d as usize);
            let b = RealizedOperator::unitary(wh.matrix(DisplacementIndex::new(1, 0)));
            assert!(!projective_equal(&a, &b));
        }
    }

    #[test]
    fn homomorphism() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for d in [2, 3, 4, 5, 6, 7] {
            let dm = dim(d);
            let r = Realizer::new(dm);
            let esl2 = enumerate_esl2(dm.dbar());
            for _ in 0..100 {
                let g = random_element(&mut rng, dm, &esl2);
                let h = random_element(&mut rng, dm, &esl2);
                let lhs = r.realize(&g).unwrap().compose(&r.realize(&h).unwrap());
                let rhs = r.realize(&g.mul(&h)).unwrap();
                assert!(projective_equal(&lhs, &rhs), "d = {d}, g = {g}, h = {h}");
                let inv = r.realize(&g.inverse()).unwrap();
                assert!(projective_equal(&inv, &r.realize(&g).unwrap().inverse()));
            }
        }
    }

    #[test]
    fn odd_sum_formula_and_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for d in [3, 5, 7] {
            let dm = dim(d);
            let r = Realizer::new(dm);
            let sl2 = enumerate_sl2(d);
            for _ in 0..20 {
                let f = sl2[rng.random_range(0..sl2.len())];
                let p = DisplacementIndex::new(rng.random_range(0..d), rng.random_range(0..d));
                let (oracle, eta) = sum_formula(&f, p, dm);
                let g = CliffordElement::new(f, p, dm).unwrap();
                let op = r.realize(&g).unwrap();
                assert!(projective_equal(&op, &RealizedOperator::unitary(oracle)), "d = {d}, F = {f}");
                let tr = r.metaplectic(&f).unwrap().matrix.trace();
                assert!((tr.norm_sqr() - eta as f64).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(kernel_cosets(dim(5)).len(), 1);
        for d in [2, 4, 6] {
            let dm = dim(d);
            let ker = kernel_cosets(dm);
            assert_eq!(ker.len(), 32, "d = {d}");
            let r = Realizer::new(dm);
            let id = RealizedOperator::identity(d as usize);
            for k in &ker {
                assert!(projective_equal(&r.realize(k).unwrap(), &id), "d = {d}, k = {k}");
            }
        }
    }

    #[test]
    fn group_orders() {
        assert_eq!(pec_order(dim(2)), 48);
        assert_eq!(pec_order(dim(3)), 432);
        assert_eq!(pec_order(dim(4)), 1536);
        assert_eq!(pec_order(dim(5)), 6000);
        assert_eq!(pec_order(dim(7)), 32928);
    }

    #[test]
    fn enumeration_is_distinct() {
        for d in [2, 3] {
            let dm = dim(d);
            let r = Realizer::new(dm);
            let ops: Vec<_> = enumerate_pec(dm).unwrap().map(|g| r.realize(&g).unwrap()).collect();
            assert_eq!(ops.len() as u64, pec_order(dm));
            for i in 0..ops.len() {
                for j in 0..i {
                    assert!(!projective_equal(&ops[i], &ops[j]));
                }
            }
        }
    }

    #[test]
    fn enumeration_capacity() {
        assert!(enumerate_pec(dim(13)).is_err());
    }

    #[test]
    fn quotient_order() {
        let dm = dim(4);
        let q = KernelQuotient::new(dm);
        let fz = CliffordElement::new(zauner_symplectic(dm), DisplacementIndex::ZERO, dm).unwrap();
        assert_eq!(q.order(&fz), 3);
        assert_eq!(q.order(&CliffordElement::conjugation(dm)), 2);
    }
}

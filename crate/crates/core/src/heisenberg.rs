//! Weyl displacement operators `D_p = τ^{p1 p2} V^{p1} U^{p2}`.
//!
//! `V|k⟩ = |k+1 mod d⟩`, `U|k⟩ = ω^k|k⟩`, `τ = e^{iπ(d+1)/d}`, `ω = τ²`.
//! Every phase is looked up from an exact integer exponent modulo `2d`, so
//! large indices never accumulate rounding error.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::zmod::reduce;
use crate::{Dim, C64};

/// Table of the `2d`-th roots of unity `e^{iπj/d}`, from which every power of
/// `τ` and `ω` is read.
#[derive(Debug, Clone)]
pub struct PhaseTable {
    dim: Dim,
    roots: Vec<C64>,
}

impl PhaseTable {
    pub fn new(dim: Dim) -> Self {
        let two_d = 2 * dim.d();
        let roots = (0..two_d).map(|j| C64::from_polar(1.0, PI * j as f64 / dim.d() as f64)).collect();
        PhaseTable { dim, roots }
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    /// `e^{iπ j / d}`
    #[inline]
    pub fn root(&self, j: i64) -> C64 {
        self.roots[reduce(j, 2 * self.dim.d()) as usize]
    }

    /// `τⁿ = e^{iπ n(d+1)/d}`
    #[inline]
    pub fn tau_pow(&self, n: i64) -> C64 {
        let two_d = 2 * self.dim.d();
        self.roots[(reduce(n, two_d) * (self.dim.d() + 1) % two_d) as usize]
    }

    /// `ωⁿ = e^{2πin/d}`
    #[inline]
    pub fn omega_pow(&self, n: i64) -> C64 {
        self.roots[(2 * reduce(n, self.dim.d())) as usize]
    }

    pub fn tau(&self) -> C64 {
        self.tau_pow(1)
    }

    pub fn omega(&self) -> C64 {
        self.omega_pow(1)
    }
}

/// A displacement label `p = (p1, p2) ∈ Z²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DisplacementIndex {
    pub p1: i64,
    pub p2: i64,
}

impl DisplacementIndex {
    pub const ZERO: DisplacementIndex = DisplacementIndex { p1: 0, p2: 0 };

    pub fn new(p1: i64, p2: i64) -> Self {
        DisplacementIndex { p1, p2 }
    }

    /// Canonical representative in `[0, d̄)²`. `D_p` depends only on `p mod d̄`.
    pub fn canonical(&self, dim: Dim) -> Self {
        DisplacementIndex::new(reduce(self.p1, dim.dbar()), reduce(self.p2, dim.dbar()))
    }

    /// Write `p = r + d q` with `r ∈ [0, d)²` and return `(r, s)` where
    /// `D_p = s · D_r`, `s = (-1)^{⟨r, q⟩}` for even `d` and `s = 1` for odd `d`.
    pub fn reduce_mod_d(&self, dim: Dim) -> (Self, i8) {
        let d = dim.d();
        let r = DisplacementIndex::new(reduce(self.p1, d), reduce(self.p2, d));
        let q = DisplacementIndex::new((self.p1 - r.p1) / d, (self.p2 - r.p2) / d);
        let sign = if dim.is_even() && symplectic_form(r, q).rem_euclid(2) == 1 { -1 } else { 1 };
        (r, sign)
    }

    pub fn neg(&self) -> Self {
        DisplacementIndex::new(-self.p1, -self.p2)
    }

    pub fn add(&self, other: &Self) -> Self {
        DisplacementIndex::new(self.p1 + other.p1, self.p2 + other.p2)
    }

    pub fn is_zero_mod(&self, m: i64) -> bool {
        reduce(self.p1, m) == 0 && reduce(self.p2, m) == 0
    }
}

impl From<(i64, i64)> for DisplacementIndex {
    fn from((p1, p2): (i64, i64)) -> Self {
        DisplacementIndex::new(p1, p2)
    }
}

/// `⟨p, q⟩ = p2 q1 - p1 q2`
#[inline]
pub fn symplectic_form(p: DisplacementIndex, q: DisplacementIndex) -> i64 {
    p.p2 * q.p1 - p.p1 * q.p2
}

/// Dense `d×d` matrix of `D_p`: entry `τ^{p1 p2} ω^{k p2}` at row `k + p1`, column `k`.
pub fn displacement_matrix(p: DisplacementIndex, dim: Dim) -> DMatrix<C64> {
    WeylHeisenberg::new(dim).matrix(p)
}

/// `D_p v` in `O(d)` time.
pub fn apply_displacement(p: DisplacementIndex, v: &[C64], dim: Dim) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); v.len()];
    WeylHeisenberg::new(dim).apply_into(p, v, &mut out);
    out
}

/// Cached phase table for repeated displacement work in one dimension.
#[derive(Debug, Clone)]
pub struct WeylHeisenberg {
    phases: PhaseTable,
}

impl WeylHeisenberg {
    pub fn new(dim: Dim) -> Self {
        WeylHeisenberg { phases: PhaseTable::new(dim) }
    }

    pub fn dim(&self) -> Dim {
        self.phases.dim()
    }

    pub fn phases(&self) -> &PhaseTable {
        &self.phases
    }

    pub fn matrix(&self, p: DisplacementIndex) -> DMatrix<C64> {
        let d = self.dim().size();
        let di = self.dim().d();
        let mut m = DMatrix::zeros(d, d);
        for k in 0..di {
            let row = reduce(k + p.p1, di) as usize;
            m[(row, k as usize)] = self.phases.tau_pow(p.p1 * p.p2 + 2 * k * p.p2);
        }
        m
    }

    pub fn apply_into(&self, p: DisplacementIndex, v: &[C64], out: &mut [C64]) {
        let di = self.dim().d();
        assert_eq!(v.len(), di as usize);
        assert_eq!(out.len(), di as usize);
        // Reduce first so the exponents stay small.
        let p = p.canonical(self.dim());
        for (k, &vk) in v.iter().enumerate() {
            let k = k as i64;
            let row = reduce(k + p.p1, di) as usize;
            out[row] = self.phases.tau_pow(p.p1 * p.p2 + 2 * k * p.p2) * vk;
        }
    }

    pub fn apply(&self, p: DisplacementIndex, v: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); v.len()];
        self.apply_into(p, v, &mut out);
        out
    }

    /// `⟨u| D_p |v⟩`
    pub fn matrix_element(&self, u: &[C64], p: DisplacementIndex, v: &[C64]) -> C64 {
        let di = self.dim().d();
        let p = p.canonical(self.dim());
        let mut acc = C64::new(0.0, 0.0);
        for (k, &vk) in v.iter().enumerate() {
            let k = k as i64;
            let row = reduce(k + p.p1, di) as usize;
            acc += u[row].conj() * self.phases.tau_pow(p.p1 * p.p2 + 2 * k * p.p2) * vk;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn dim(d: i64) -> Dim {
        Dim::new(d).unwrap()
    }

    fn max_diff(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
        (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    fn random_vec(rng: &mut impl Rng, d: usize) -> Vec<C64> {
        (0..d).map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect()
    }

    #[test]
    fn phase_constants() {
        for d in 2..=20 {
            let t = PhaseTable::new(dim(d));
            let tau = C64::from_polar(1.0, PI * (d + 1) as f64 / d as f64);
            assert!((t.tau() - tau).norm() < 1e-14);
            assert!((t.omega() - tau * tau).norm() < 1e-14);
            assert!((t.tau().powi(2 * d as i32) - 1.0).norm() < 1e-13);
            assert!((t.omega().powi(d as i32) - 1.0).norm() < 1e-13);
            assert!((t.tau_pow(2 * d) - 1.0).norm() < 1e-15);
        }
    }

    #[test]
    fn symplectic_form_examples() {
        let p = DisplacementIndex::new;
        assert_eq!(symplectic_form(p(1, 2), p(3, 4)), 2);
        assert_eq!(symplectic_form(p(5, -3), p(5, -3)), 0);
        assert_eq!(symplectic_form(p(1, 0), p(0, 1)), -1);
    }

    #[test]
    fn displacement_examples() {
        let d2 = dim(2);
        assert!(max_diff(&displacement_matrix(DisplacementIndex::ZERO, d2), &DMatrix::identity(2, 2)) < 1e-15);

        // d = 2, p = (1, 1): entries τ·ω^k at (k+1 mod 2, k).
        let t = PhaseTable::new(d2);
        let m = displacement_matrix(DisplacementIndex::new(1, 1), d2);
        let expected =
            DMatrix::from_row_slice(2, 2, &[C64::new(0.0, 0.0), t.tau() * t.omega(), t.tau(), C64::new(0.0, 0.0)]);
        assert!(max_diff(&m, &expected) < 1e-15);
    }

    #[test]
    fn composition_law() {
        let d5 = dim(5);
        let wh = WeylHeisenberg::new(d5);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let p = DisplacementIndex::new(rng.random_range(-20..20), rng.random_range(-20..20));
            let q = DisplacementIndex::new(rng.random_range(-20..20), rng.random_range(-20..20));
            let lhs = wh.matrix(p) * wh.matrix(q);
            let rhs = wh.matrix(p.add(&q)) * wh.phases().tau_pow(symplectic_form(p, q));
            assert!(max_diff(&lhs, &rhs) < 1e-14);
        }
    }

    #[test]
    fn adjoint_and_unitarity() {
        for d in 2..=9 {
            let wh = WeylHeisenberg::new(dim(d));
            for p1 in 0..2 * d {
                for p2 in 0..2 * d {
                    let p = DisplacementIndex::new(p1, p2);
                    let m = wh.matrix(p);
                    assert!(max_diff(&m.adjoint(), &wh.matrix(p.neg())) < 1e-14);
                    let n = m.nrows();
                    assert!(max_diff(&(m.adjoint() * &m), &DMatrix::identity(n, n)) < 1e-13);
                }
            }
        }
    }

    #[test]
    fn periodicity_signs() {
        for d in 2..=6 {
            let dm = dim(d);
            let wh = WeylHeisenberg::new(dm);
            for p1 in 0..d {
                for p2 in 0..d {
                    for q1 in -2..=2 {
                        for q2 in -2..=2 {
                            let p = DisplacementIndex::new(p1, p2);
                            let q = DisplacementIndex::new(q1, q2);
                            let shifted = DisplacementIndex::new(p1 + d * q1, p2 + d * q2);
                            let sign = if d % 2 == 0 && symplectic_form(p, q).rem_euclid(2) == 1 { -1.0 } else { 1.0 };
                            assert!(max_diff(&wh.matrix(shifted), &(wh.matrix(p) * C64::new(sign, 0.0))) < 1e-13);
                            let (r, s) = shifted.reduce_mod_d(dm);
                            assert_eq!(r, p);
                            assert_eq!(s as f64, sign);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn shift_and_clock_on_basis() {
        let d = 6;
        let wh = WeylHeisenberg::new(dim(d));
        for k in 0..d as usize {
            let mut e = vec![C64::new(0.0, 0.0); d as usize];
            e[k] = C64::new(1.0, 0.0);
            assert_eq!(wh.apply(DisplacementIndex::ZERO, &e), e);
            let shifted = wh.apply(DisplacementIndex::new(1, 0), &e);
            assert!((shifted[(k + 1) % d as usize] - 1.0).norm() < 1e-15);
            let clocked = wh.apply(DisplacementIndex::new(0, 1), &e);
            assert!((clocked[k] - wh.phases().omega_pow(k as i64)).norm() < 1e-15);
        }
    }

    #[test]
    fn matrix_free_action_matches_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for d in 2..=16 {
            let dm = dim(d);
            let wh = WeylHeisenberg::new(dm);
            for _ in 0..10 {
                let p = DisplacementIndex::new(rng.random_range(-50..50), rng.random_range(-50..50));
                let v = random_vec(&mut rng, d as usize);
                let dense = wh.matrix(p) * nalgebra::DVector::from_vec(v.clone());
                let fast = apply_displacement(p, &v, dm);
                for (x, y) in dense.iter().zip(&fast) {
                    assert!((x - y).norm() < 1e-14);
                }
            }
        }
    }
}

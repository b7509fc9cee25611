//! Symmetry-restricted search spaces.
//!
//! A unitary symmetry `U` of order `n` restricts the search to one of its
//! eigenspaces, with projector `P = (1/n) Σ_j e^{-2πijm/n} U^j`. An
//! anti-unitary symmetry `ĴU` restricts it to the coneigenvectors
//! `{ψ : (Uψ)* = ψ}`, a real-linear space reached through
//! `ψ' = U* Q* φ* + Q φ` with `Q = (1/n) Σ_j (U*U)^j`.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::clifford::RealizedOperator;
use crate::symmetry::SymmetrySpec;
use crate::{Dim, Result, SicError, C64};

/// Tolerance on the defining (co)eigen relations and on `Uⁿ = I`.
pub const RELATION_TOL: f64 = 1e-10;

/// Pivot threshold for basis extraction.
pub const PIVOT_TOL: f64 = 1e-8;

fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn identity_defect(m: &DMatrix<C64>) -> f64 {
    max_abs(&(m - DMatrix::<C64>::identity(m.nrows(), m.ncols())))
}

fn matrix_pow(m: &DMatrix<C64>, n: u64) -> DMatrix<C64> {
    let mut acc = DMatrix::identity(m.nrows(), m.ncols());
    for _ in 0..n {
        acc = &acc * m;
    }
    acc
}

/// Rescale `U` so that `Uⁿ = I` exactly, assuming `Uⁿ ∝ I`. Uses the
/// principal `n`-th root of the scalar.
pub fn phase_corrected(u: &RealizedOperator, n: u64) -> Result<RealizedOperator> {
    if u.is_antiunitary() || n == 0 {
        return Err(SicError::Domain("phase correction needs a unitary operator and n >= 1".into()));
    }
    let power = RealizedOperator::unitary(matrix_pow(&u.matrix, n));
    let scalar = power
        .scalar_value(RELATION_TOL)
        .ok_or_else(|| SicError::Domain(format!("operator is not of projective order dividing {n}")))?;
    Ok(u.scaled(C64::from_polar(1.0, -scalar.arg() / n as f64)))
}

/// Projector onto the eigenspace of `U` with eigenvalue `e^{2πim/n}`.
pub fn eigenspace_projector(u: &RealizedOperator, n: u64, m: u64) -> Result<DMatrix<C64>> {
    let u = phase_corrected(u, n)?;
    let size = u.size();
    let mut p = DMatrix::<C64>::zeros(size, size);
    let mut power = DMatrix::<C64>::identity(size, size);
    for j in 0..n {
        let angle = -2.0 * PI * ((j * m) % n) as f64 / n as f64;
        p += &power * C64::from_polar(1.0, angle);
        power = &power * &u.matrix;
    }
    if identity_defect(&power) > RELATION_TOL {
        return Err(SicError::Domain(format!("U^{n} != I after phase correction")));
    }
    Ok(p / C64::new(n as f64, 0.0))
}

/// Modified Gram-Schmidt with largest-residual pivoting over `candidates`,
/// under the inner product `inner`. Stops when no residual exceeds `PIVOT_TOL`.
fn pivoted_orthonormalize(mut candidates: Vec<Vec<C64>>, inner: impl Fn(&[C64], &[C64]) -> C64) -> Vec<Vec<C64>> {
    let norm2 = |v: &[C64]| inner(v, v).re;
    let mut basis: Vec<Vec<C64>> = Vec::new();
    loop {
        let best = candidates.iter().enumerate().map(|(i, v)| (i, norm2(v))).fold(
            None,
            |acc: Option<(usize, f64)>, (i, n)| match acc {
                Some((_, best)) if best >= n => acc,
                _ => Some((i, n)),
            },
        );
        let Some((idx, n2)) = best else { break };
        if n2.sqrt() < PIVOT_TOL {
            break;
        }
        let mut v = candidates.swap_remove(idx);
        // Second pass restores orthogonality lost to cancellation.
        for _ in 0..2 {
            for b in &basis {
                let c = inner(b, &v);
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= c * bi;
                }
            }
        }
        let n = norm2(&v).sqrt();
        for vi in v.iter_mut() {
            *vi /= n;
        }
        for w in candidates.iter_mut() {
            let c = inner(&v, w);
            for (wi, vi) in w.iter_mut().zip(&v) {
                *wi -= c * vi;
            }
        }
        basis.push(v);
    }
    basis
}

fn complex_inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn real_inner(a: &[C64], b: &[C64]) -> C64 {
    C64::new(complex_inner(a, b).re, 0.0)
}

fn expected_rank(p: &DMatrix<C64>) -> Result<usize> {
    let tr = p.trace().re;
    let r = tr.round();
    if (tr - r).abs() > 1e-6 || r < 0.0 {
        return Err(SicError::Degenerate(format!("projector trace {tr} is not an integer")));
    }
    Ok(r as usize)
}

/// A basis of a symmetry-restricted subspace of `C^d`.
///
/// In anti-unitary mode the space is real-linear and coordinates are real;
/// otherwise coordinates are complex and passed interleaved.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceBasis {
    pub dim: Dim,
    pub vectors: Vec<Vec<C64>>,
    pub antiunitary_mode: bool,
    pub tag: String,
}

impl SubspaceBasis {
    /// The standard basis of `C^d`.
    pub fn full(dim: Dim) -> Self {
        let d = dim.size();
        let vectors = (0..d).map(|k| (0..d).map(|j| C64::new(if j == k { 1.0 } else { 0.0 }, 0.0)).collect()).collect();
        SubspaceBasis { dim, vectors, antiunitary_mode: false, tag: "none".into() }
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Number of real parameters needed to address the space.
    pub fn real_parameters(&self) -> usize {
        if self.antiunitary_mode {
            self.len()
        } else {
            2 * self.len()
        }
    }

    /// `Σ c_i b_i`.
    pub fn lift(&self, coords: &[f64]) -> Result<Vec<C64>> {
        if coords.len() != self.real_parameters() {
            return Err(SicError::DimensionMismatch { expected: self.real_parameters(), found: coords.len() });
        }
        let mut out = vec![C64::new(0.0, 0.0); self.dim.size()];
        for (i, b) in self.vectors.iter().enumerate() {
            let c = if self.antiunitary_mode {
                C64::new(coords[i], 0.0)
            } else {
                C64::new(coords[2 * i], coords[2 * i + 1])
            };
            for (o, bi) in out.iter_mut().zip(b) {
                *o += c * bi;
            }
        }
        Ok(out)
    }

    /// Coordinates of the orthogonal projection of `phi` onto the space.
    pub fn project(&self, phi: &[C64]) -> Vec<f64> {
        if self.antiunitary_mode {
            self.vectors.iter().map(|b| complex_inner(b, phi).re).collect()
        } else {
            self.vectors
                .iter()
                .flat_map(|b| {
                    let c = complex_inner(b, phi);
                    [c.re, c.im]
                })
                .collect()
        }
    }

    /// Pull back a full-space gradient (interleaved, length `2d`) to coordinates.
    pub fn pull_back_gradient(&self, full: &[f64], out: &mut [f64]) {
        for (i, b) in self.vectors.iter().enumerate() {
            let mut c = C64::new(0.0, 0.0);
            for (k, bk) in b.iter().enumerate() {
                c += bk.conj() * C64::new(full[2 * k], full[2 * k + 1]);
            }
            if self.antiunitary_mode {
                out[i] = c.re;
            } else {
                out[2 * i] = c.re;
                out[2 * i + 1] = c.im;
            }
        }
    }

    /// `max_{i,j} |G_ij − δ_ij|` for the (real or complex) Gram matrix.
    pub fn gram_defect(&self) -> f64 {
        let inner = if self.antiunitary_mode { real_inner } else { complex_inner };
        let mut worst: f64 = 0.0;
        for (i, a) in self.vectors.iter().enumerate() {
            for (j, b) in self.vectors.iter().enumerate() {
                let expect = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((inner(a, b) - expect).norm());
            }
        }
        worst
    }
}

/// Orthonormal basis of the range of a Hermitian projector.
pub fn orthonormal_basis(p: &DMatrix<C64>, dim: Dim, tag: impl Into<String>) -> Result<SubspaceBasis> {
    if max_abs(&(p * p - p)) > RELATION_TOL || max_abs(&(p.adjoint() - p)) > RELATION_TOL {
        return Err(SicError::Domain("matrix is not a Hermitian projector".into()));
    }
    let rank = expected_rank(p)?;
    let columns: Vec<Vec<C64>> = p.column_iter().map(|c| c.iter().copied().collect()).collect();
    let vectors = pivoted_orthonormalize(columns, complex_inner);
    if vectors.len() != rank {
        return Err(SicError::Degenerate(format!("extracted {} vectors for a rank-{rank} projector", vectors.len())));
    }
    Ok(SubspaceBasis { dim, vectors, antiunitary_mode: false, tag: tag.into() })
}

/// `Q = (1/n) Σ_j (U*U)^j`, the projector onto the fixed space of `U*U`.
fn coneigen_projector(u: &DMatrix<C64>, n: u64) -> Result<DMatrix<C64>> {
    if n == 0 {
        return Err(SicError::Domain("order must be at least 1".into()));
    }
    let b = u.map(|z| z.conj()) * u;
    let size = u.nrows();
    let mut q = DMatrix::<C64>::zeros(size, size);
    let mut power = DMatrix::<C64>::identity(size, size);
    for _ in 0..n {
        q += &power;
        power = &power * &b;
    }
    if identity_defect(&power) > RELATION_TOL {
        return Err(SicError::Domain(format!("(U*U)^{n} != I")));
    }
    Ok(q / C64::new(n as f64, 0.0))
}

/// `U* Q* φ* + Q φ`, unnormalized.
fn coneigen_map(u: &DMatrix<C64>, q: &DMatrix<C64>, phi: &[C64]) -> Vec<C64> {
    let v = nalgebra::DVector::from_column_slice(phi);
    let direct = q * &v;
    let twisted = u.map(|z| z.conj()) * q.map(|z| z.conj()) * v.map(|z| z.conj());
    (direct + twisted).iter().copied().collect()
}

/// Normalized solution of `(Uψ)* = ψ` built from `phi`.
pub fn coneigen_candidate(u: &DMatrix<C64>, n: u64, phi: &[C64]) -> Result<Vec<C64>> {
    let q = coneigen_projector(u, n)?;
    let psi = coneigen_map(u, &q, phi);
    let norm = complex_inner(&psi, &psi).re.sqrt();
    let scale = complex_inner(phi, phi).re.sqrt();
    if norm <= 1e-10 * scale.max(f64::MIN_POSITIVE) {
        return Err(SicError::Degenerate("coneigen projection vanished; retry with another vector".into()));
    }
    Ok(psi.into_iter().map(|z| z / norm).collect())
}

/// Real-orthonormal basis of `{ψ : (Uψ)* = ψ}`, spanned by the coneigen map
/// applied to `e_k` and `i·e_k`.
pub fn coneigen_basis(u: &DMatrix<C64>, n: u64, dim: Dim, tag: impl Into<String>) -> Result<SubspaceBasis> {
    let q = coneigen_projector(u, n)?;
    let rank = expected_rank(&q)?;
    let d = dim.size();
    let mut spanning = Vec::with_capacity(2 * d);
    for k in 0..d {
        for unit in [C64::new(1.0, 0.0), C64::new(0.0, 1.0)] {
            let mut e = vec![C64::new(0.0, 0.0); d];
            e[k] = unit;
            spanning.push(coneigen_map(u, &q, &e));
        }
    }
    let vectors = pivoted_orthonormalize(spanning, real_inner);
    if vectors.len() != rank {
        return Err(SicError::Degenerate(format!(
            "coneigen space has real dimension {}, expected {rank}",
            vectors.len()
        )));
    }
    Ok(SubspaceBasis { dim, vectors, antiunitary_mode: true, tag: tag.into() })
}

/// Coordinates of a coefficient vector mapped into `C^d`.
pub fn lift_coordinates(basis: &SubspaceBasis, coords: &[f64]) -> Result<Vec<C64>> {
    basis.lift(coords)
}

/// Search space for a catalog symmetry: the eigenvalue-`e^{2πim/n}` eigenspace
/// for a unitary symmetry, the coneigenvector space for an anti-unitary one
/// (where only `m = 0` is meaningful).
pub fn symmetry_subspace(spec: &SymmetrySpec, eigenvalue: u64) -> Result<SubspaceBasis> {
    let op = spec.realize();
    if spec.antiunitary {
        if eigenvalue != 0 {
            return Err(SicError::Config(format!("{} is anti-unitary; only eigenvalue index 0 applies", spec.kind)));
        }
        // op = M K, so ĴU with U = M*.
        let u = op.matrix.map(|z| z.conj());
        let n = (spec.order / 2).max(1);
        coneigen_basis(&u, n, spec.dim, format!("{}:coneigen", spec.kind))
    } else {
        if eigenvalue >= spec.order {
            return Err(SicError::Config(format!(
                "eigenvalue index {eigenvalue} out of range for order {}",
                spec.order
            )));
        }
        let p = eigenspace_projector(&op, spec.order, eigenvalue)?;
        orthonormal_basis(&p, spec.dim, format!("{}:m={eigenvalue}", spec.kind))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::zauner_matrix;
    use crate::symmetry::{applicable_symmetries, build_symmetry, SymmetryKind};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn dim(d: i64) -> Dim {
        Dim::new(d).unwrap()
    }

    fn gaussian(rng: &mut impl Rng, d: usize) -> Vec<C64> {
        (0..d).map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect()
    }

    fn zauner_dim(d: i64, k: i64) -> usize {
        ((d + 3 - 2 * k) / 3) as usize
    }

    #[test]
    fn identity_projector() {
        let p = eigenspace_projector(&RealizedOperator::identity(4), 1, 0).unwrap();
        assert!(identity_defect(&p) < 1e-15);
        assert_eq!(orthonormal_basis(&p, dim(4), "id").unwrap().len(), 4);
        let zero = DMatrix::<C64>::zeros(3, 3);
        assert!(orthonormal_basis(&zero, dim(3), "zero").unwrap().is_empty());
    }

    #[test]
    fn zauner_ranks() {
        for d in 2..=30 {
            let sz = zauner_matrix(dim(d));
            let projectors: Vec<_> = (0..3).map(|k| eigenspace_projector(&sz, 3, k).unwrap()).collect();
            let mut total = 0;
            for (k, p) in projectors.iter().enumerate() {
                let basis = orthonormal_basis(p, dim(d), "fz").unwrap();
                assert_eq!(basis.len(), zauner_dim(d, k as i64), "d = {d}, k = {k}");
                total += basis.len();
                assert!(basis.gram_defect() < 1e-12);
                let lambda = C64::from_polar(1.0, 2.0 * PI * k as f64 / 3.0);
                assert!(max_abs(&(p * &sz.matrix - p * lambda)) < 1e-10);
                for q in &projectors[..k] {
                    assert!(max_abs(&(p * q)) < 1e-10);
                }
            }
            assert_eq!(total, d as usize);
        }
    }

    #[test]
    fn wrong_order_rejected() {
        let sz = zauner_matrix(dim(7));
        assert!(eigenspace_projector(&sz, 2, 0).is_err());
        assert!(orthonormal_basis(&(sz.matrix.clone()), dim(7), "x").is_err());
    }

    #[test]
    fn lift_and_project() {
        let sz = zauner_matrix(dim(9));
        let basis = orthonormal_basis(&eigenspace_projector(&sz, 3, 0).unwrap(), dim(9), "fz").unwrap();
        let mut e1 = vec![0.0; basis.real_parameters()];
        e1[0] = 1.0;
        assert_eq!(basis.lift(&e1).unwrap(), basis.vectors[0]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let coords: Vec<f64> = (0..basis.real_parameters()).map(|_| rng.sample(StandardNormal)).collect();
        let v = basis.lift(&coords).unwrap();
        let sv = sz.apply(&v);
        assert!(sv.iter().zip(&v).all(|(a, b)| (a - b).norm() < 1e-10));
        let back = basis.project(&v);
        assert!(back.iter().zip(&coords).all(|(a, b)| (a - b).abs() < 1e-10));
        assert!(basis.lift(&coords[1..]).is_err());
    }

    #[test]
    fn coneigen_identity_is_real() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let u = DMatrix::<C64>::identity(5, 5);
        let psi = coneigen_candidate(&u, 1, &gaussian(&mut rng, 5)).unwrap();
        assert!(psi.iter().all(|z| z.im.abs() < 1e-15));
    }

    #[test]
    fn coneigen_relation_for_antiunitary_symmetries() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for d in [4, 7, 12, 19] {
            for spec in applicable_symmetries(dim(d)).unwrap().into_iter().filter(|s| s.antiunitary) {
                let op = spec.realize();
                let u = op.matrix.map(|z| z.conj());
                let n = spec.order / 2;
                for _ in 0..5 {
                    let psi = coneigen_candidate(&u, n, &gaussian(&mut rng, d as usize)).unwrap();
                    // ĴUψ = ψ, i.e. the anti-unitary operator fixes ψ.
                    let image = op.apply(&psi);
                    let err = image.iter().zip(&psi).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
                    assert!(err < 1e-10, "{} d = {d}: {err}", spec.kind);
                }
                let basis = symmetry_subspace(&spec, 0).unwrap();
                assert!(basis.gram_defect() < 1e-12);
                for v in &basis.vectors {
                    let image = op.apply(v);
                    assert!(image.iter().zip(v).all(|(a, b)| (a - b).norm() < 1e-9));
                }
            }
        }
    }

    #[test]
    fn coneigen_map_is_real_linear() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let spec = build_symmetry(SymmetryKind::Fc, dim(4)).unwrap();
        let u = spec.realize().matrix.map(|z| z.conj());
        let q = coneigen_projector(&u, 1).unwrap();
        let a = gaussian(&mut rng, 4);
        let b = gaussian(&mut rng, 4);
        let (s, t) = (0.3, -1.7);
        let combo: Vec<C64> = a.iter().zip(&b).map(|(x, y)| x * s + y * t).collect();
        let lhs = coneigen_map(&u, &q, &combo);
        let ma = coneigen_map(&u, &q, &a);
        let mb = coneigen_map(&u, &q, &b);
        for i in 0..4 {
            assert!((lhs[i] - (ma[i] * s + mb[i] * t)).norm() < 1e-12);
        }
    }

    #[test]
    fn j_space_is_real_euclidean() {
        let spec = build_symmetry(SymmetryKind::J, dim(7)).unwrap();
        let basis = symmetry_subspace(&spec, 0).unwrap();
        assert!(basis.antiunitary_mode);
        assert_eq!(basis.len(), 7);
        assert!(basis.vectors.iter().flatten().all(|z| z.im.abs() < 1e-15));
    }

    #[test]
    fn unitary_symmetry_spaces() {
        for d in [8, 12, 15, 19] {
            for spec in applicable_symmetries(dim(d)).unwrap().into_iter().filter(|s| !s.antiunitary) {
                let mut total = 0;
                for m in 0..spec.order {
                    let basis = symmetry_subspace(&spec, m).unwrap();
                    assert!(basis.gram_defect() < 1e-12);
                    total += basis.len();
                }
                assert_eq!(total, d as usize, "{} d = {d}", spec.kind);
            }
        }
    }
}

//! The Welch-bound functional for Weyl-Heisenberg orbits.
//!
//! For a unit vector `φ ∈ C^d`,
//!
//! ```text
//! f(φ) = Σ_{j,k} |Σ_l φ*_{j+l} φ_l φ*_{k+l} φ_{j+k+l}|² − 2/(d+1)
//!      = (1/d) Σ_p |⟨φ|D_p|φ⟩|⁴ − 2/(d+1)  ≥ 0,
//! ```
//!
//! with equality exactly at SIC fiducial vectors. All functions evaluate at
//! `φ/‖φ‖`, so the optimizer can work unconstrained in `R^{2d}`.
//!
//! Real parameter vectors are interleaved: `x = [Re φ_0, Im φ_0, Re φ_1, ...]`.

use std::f64::consts::PI;

use crate::heisenberg::{DisplacementIndex, WeylHeisenberg};
use crate::{Dim, Result, SicError, C64};

/// Default tolerance for [`verify_sic`].
pub const DEFAULT_VERIFY_TOL: f64 = 1e-8;

/// Right-hand side of the Welch bound, `2/(d+1)`.
pub fn welch_bound(d: usize) -> f64 {
    2.0 / (d as f64 + 1.0)
}

pub fn norm(phi: &[C64]) -> f64 {
    phi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `φ/‖φ‖`, rejecting zero and non-finite input.
pub fn normalized(phi: &[C64]) -> Result<Vec<C64>> {
    let n = norm(phi);
    if phi.is_empty() || n == 0.0 || !n.is_finite() {
        return Err(SicError::Domain("vector must be non-zero and finite".into()));
    }
    Ok(phi.iter().map(|z| z / n).collect())
}

pub fn pack(phi: &[C64]) -> Vec<f64> {
    phi.iter().flat_map(|z| [z.re, z.im]).collect()
}

pub fn unpack(x: &[f64]) -> Vec<C64> {
    x.chunks_exact(2).map(|c| C64::new(c[0], c[1])).collect()
}

/// Direct `O(d³)` evaluation of the quadruple-product sum.
pub fn welch_functional(phi: &[C64]) -> Result<f64> {
    let psi = normalized(phi)?;
    let d = psi.len();
    let conj: Vec<C64> = psi.iter().map(|z| z.conj()).collect();
    let mut total = 0.0;
    for j in 0..d {
        for k in 0..d {
            let mut t = C64::new(0.0, 0.0);
            for l in 0..d {
                t += conj[(j + l) % d] * psi[l] * conj[(k + l) % d] * psi[(j + k + l) % d];
            }
            total += t.norm_sqr();
        }
    }
    Ok(total - welch_bound(d))
}

/// Gradient of [`welch_functional`] with respect to the interleaved real and
/// imaginary parts of `φ` (length `2d`).
pub fn welch_gradient(phi: &[C64]) -> Result<Vec<f64>> {
    normalized(phi)?;
    let obj = WelchObjective::new(Dim::new(phi.len() as i64)?);
    let x = pack(phi);
    let mut grad = vec![0.0; x.len()];
    obj.value_and_gradient(&x, &mut grad);
    Ok(grad)
}

/// Overlap-based evaluator of the functional and its gradient.
///
/// With `A_{p1,p2} = Σ_k φ*_{k+p1} φ_k ω^{k p2}` (so `|A_p| = |⟨φ|D_p|φ⟩|`),
/// `a_p = |A_p|²/‖φ‖⁴` and `c = 1/(d+1)`, the functional is evaluated as
///
/// ```text
/// f = (1/d) Σ_{p≠0} (a_p − c)²,
/// ```
///
/// which equals the quartic form above because `Σ_{p≠0} a_p = d − 1`. Unlike
/// the quartic form it has no cancellation, so it resolves gaps far below
/// `1e-16`; near a fiducial the overlap deviations scale like `√(d f)`.
#[derive(Debug, Clone)]
pub struct WelchObjective {
    d: usize,
    omega: Vec<C64>,
}

impl WelchObjective {
    pub fn new(dim: Dim) -> Self {
        let d = dim.size();
        let omega = (0..d).map(|j| C64::from_polar(1.0, 2.0 * PI * j as f64 / d as f64)).collect();
        WelchObjective { d, omega }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Row-major `d×d` table of `A_{p1,p2}` for an unnormalized `φ`.
    pub fn overlap_table(&self, phi: &[C64]) -> Vec<C64> {
        let d = self.d;
        let mut table = vec![C64::new(0.0, 0.0); d * d];
        let mut a = vec![C64::new(0.0, 0.0); d];
        for p1 in 0..d {
            for k in 0..d {
                a[k] = phi[(k + p1) % d].conj() * phi[k];
            }
            for p2 in 0..d {
                let mut acc = C64::new(0.0, 0.0);
                let mut idx = 0;
                for &ak in &a {
                    acc += ak * self.omega[idx];
                    idx += p2;
                    if idx >= d {
                        idx -= d;
                    }
                }
                table[p1 * d + p2] = acc;
            }
        }
        table
    }

    fn deviation(&self, p: usize, a: C64, n4: f64) -> f64 {
        if p == 0 {
            0.0
        } else {
            a.norm_sqr() / n4 - 1.0 / (self.d as f64 + 1.0)
        }
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        let phi = unpack(x);
        let n2: f64 = phi.iter().map(|z| z.norm_sqr()).sum();
        let n4 = n2 * n2;
        let table = self.overlap_table(&phi);
        table.iter().enumerate().map(|(p, &a)| self.deviation(p, a, n4).powi(2)).sum::<f64>() / self.d as f64
    }

    /// Returns `f(x)` and writes `∇f(x)` into `grad`.
    ///
    /// `∂f/∂φ*_{k+p1} = (4/(d‖φ‖⁴)) Σ_{p2} w_p conj(A_p) ω^{k p2} φ_k − (4/(d‖φ‖²)) (Σ_p w_p a_p) φ_{k+p1}`
    /// with `w_p = a_p − c`; the real gradient is twice the Wirtinger one.
    pub fn value_and_gradient(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        let d = self.d;
        assert_eq!(x.len(), 2 * d);
        assert_eq!(grad.len(), 2 * d);
        let phi = unpack(x);
        let n2: f64 = phi.iter().map(|z| z.norm_sqr()).sum();
        let n4 = n2 * n2;
        let table = self.overlap_table(&phi);

        let mut sum_w2 = 0.0;
        let mut sum_wa = 0.0;
        let mut dphi = vec![C64::new(0.0, 0.0); d];
        let mut w = vec![C64::new(0.0, 0.0); d];
        for p1 in 0..d {
            let row = &table[p1 * d..(p1 + 1) * d];
            for (p2, (wi, a)) in w.iter_mut().zip(row).enumerate() {
                let dev = self.deviation(p1 * d + p2, *a, n4);
                sum_w2 += dev * dev;
                sum_wa += dev * a.norm_sqr() / n4;
                *wi = a.conj() * dev;
            }
            for k in 0..d {
                let mut b = C64::new(0.0, 0.0);
                let mut idx = 0;
                for wi in &w {
                    b += wi * self.omega[idx];
                    idx += k;
                    if idx >= d {
                        idx -= d;
                    }
                }
                dphi[(k + p1) % d] += b * phi[k];
            }
        }
        let gs = 8.0 / (d as f64 * n4);
        let radial = 8.0 * sum_wa / (d as f64 * n2);
        for (k, z) in dphi.iter().enumerate() {
            grad[2 * k] = gs * z.re - radial * x[2 * k];
            grad[2 * k + 1] = gs * z.im - radial * x[2 * k + 1];
        }
        sum_w2 / d as f64
    }
}

/// Result of a direct equiangularity check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SicReport {
    /// `max_p | |⟨φ|D_p|φ⟩|² − (dδ_{p,0} + 1)/(d+1) |`
    pub max_dev: f64,
    /// `| ‖φ‖ − 1 |`
    pub norm_dev: f64,
    pub pass: bool,
}

/// Check `|⟨φ|D_p|φ⟩|² = 1/(d+1)` for all `p ≠ 0` and `‖φ‖ = 1`.
pub fn verify_sic(phi: &[C64], tol: f64) -> Result<SicReport> {
    let dim = Dim::new(phi.len() as i64)?;
    let wh = WeylHeisenberg::new(dim);
    let d = dim.d();
    let target = 1.0 / (d as f64 + 1.0);
    let mut max_dev: f64 = 0.0;
    for p1 in 0..d {
        for p2 in 0..d {
            let m2 = wh.matrix_element(phi, DisplacementIndex::new(p1, p2), phi).norm_sqr();
            let expect = if p1 == 0 && p2 == 0 { 1.0 } else { target };
            max_dev = max_dev.max((m2 - expect).abs());
        }
    }
    let norm_dev = (norm(phi) - 1.0).abs();
    Ok(SicReport { max_dev, norm_dev, pass: max_dev <= tol })
}

/// A unit vector proposed as a fiducial, with provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct FiducialCandidate {
    pub dim: Dim,
    pub components: Vec<C64>,
    pub norm_gap: f64,
    pub objective_gap: f64,
    pub seed: u64,
    pub subspace_tag: Option<String>,
}

impl FiducialCandidate {
    /// Normalizes `components` and evaluates the objective gap.
    pub fn new(components: &[C64], seed: u64, subspace_tag: Option<String>) -> Result<Self> {
        let dim = Dim::new(components.len() as i64)?;
        let components = normalized(components)?;
        let objective_gap = WelchObjective::new(dim).value(&pack(&components));
        let norm_gap = (norm(&components) - 1.0).abs();
        Ok(FiducialCandidate { dim, components, norm_gap, objective_gap, seed, subspace_tag })
    }

    pub fn verify(&self, tol: f64) -> SicReport {
        verify_sic(&self.components, tol).expect("candidate dimension is valid")
    }
}

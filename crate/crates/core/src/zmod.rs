//! Modular integer arithmetic and the groups `SL2(Z_m)` / `ESL2(Z_m)`.
//!
//! Symplectic index arithmetic lives over `Z_d̄` where `d̄ = d` for odd `d`
//! and `d̄ = 2d` for even `d`. Matrices carry their modulus so that products
//! of matrices over different rings are rejected instead of silently mixed.

use std::fmt;

use num_integer::Integer;

use crate::{Result, SicError};

/// Largest modulus accepted by the exhaustive conjugacy search (`d̄` for `d = 12`).
pub const MAX_CONJUGACY_MODULUS: i64 = 24;

/// Hilbert-space dimension `d` together with the symplectic modulus `d̄`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dim {
    d: i64,
    dbar: i64,
}

impl Dim {
    pub fn new(d: i64) -> Result<Self> {
        if d < 2 {
            return Err(SicError::InvalidDimension(d));
        }
        let dbar = if d % 2 == 0 { 2 * d } else { d };
        Ok(Dim { d, dbar })
    }

    #[inline]
    pub fn d(&self) -> i64 {
        self.d
    }

    /// `d` as a `usize`, for indexing vectors and matrices.
    #[inline]
    pub fn size(&self) -> usize {
        self.d as usize
    }

    #[inline]
    pub fn dbar(&self) -> i64 {
        self.dbar
    }

    #[inline]
    pub fn is_even(&self) -> bool {
        self.d % 2 == 0
    }
}

impl fmt::Display for Dim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.d)
    }
}

/// Reduce `x` into `[0, m)`.
#[inline]
pub fn reduce(x: i64, m: i64) -> i64 {
    x.rem_euclid(m)
}

/// Multiplicative inverse of `x` modulo `m`, if `gcd(x, m) = 1`.
pub fn inverse_mod(x: i64, m: i64) -> Option<i64> {
    assert!(m >= 2, "modulus must be at least 2");
    let x = reduce(x, m);
    let egcd = x.extended_gcd(&m);
    if egcd.gcd != 1 {
        return None;
    }
    Some(reduce(egcd.x, m))
}

/// Distinct prime divisors of `n`, in increasing order.
pub fn prime_divisors(mut n: i64) -> Vec<i64> {
    let mut primes = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            primes.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        primes.push(n);
    }
    primes
}

/// `|SL2(Z_m)| = m³ ∏_{p | m} (1 - p⁻²)`, evaluated in exact integer arithmetic.
pub fn sl2_group_order(m: i64) -> u64 {
    assert!(m >= 2, "modulus must be at least 2");
    let mut order = (m as u64).pow(3);
    for p in prime_divisors(m) {
        let p = p as u64;
        order = order / (p * p) * (p * p - 1);
    }
    order
}

/// Order of `ESL2(Z_m)`: twice `|SL2|` unless `+1 ≡ -1`.
pub fn esl2_group_order(m: i64) -> u64 {
    if m <= 2 {
        sl2_group_order(m)
    } else {
        2 * sl2_group_order(m)
    }
}

/// A 2×2 matrix over `Z_m` with determinant `±1`.
///
/// Entries are stored as `[[a, b], [g, h]]`, reduced into `[0, m)`. The
/// determinant sign is recorded at construction and checked against the
/// entries; for `m = 2` the two signs coincide and `+1` is recorded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymplecticExt {
    a: i64,
    b: i64,
    g: i64,
    h: i64,
    det_sign: i8,
    modulus: i64,
}

impl SymplecticExt {
    /// Build from entries, inferring the determinant sign.
    pub fn new(entries: [[i64; 2]; 2], modulus: i64) -> Result<Self> {
        let [[a, b], [g, h]] = entries;
        let det = reduce(a * h - b * g, modulus);
        let det_sign = if det == reduce(1, modulus) {
            1
        } else if det == reduce(-1, modulus) {
            -1
        } else {
            return Err(SicError::NotExtendedSymplectic { det, modulus });
        };
        Ok(Self::from_parts(entries, det_sign, modulus))
    }

    /// Build from entries with an explicitly claimed determinant sign.
    pub fn with_sign(entries: [[i64; 2]; 2], det_sign: i8, modulus: i64) -> Result<Self> {
        let [[a, b], [g, h]] = entries;
        let det = reduce(a * h - b * g, modulus);
        if (det_sign != 1 && det_sign != -1) || det != reduce(det_sign as i64, modulus) {
            return Err(SicError::NotExtendedSymplectic { det, modulus });
        }
        // m = 2 cannot tell the signs apart; keep the canonical +1.
        let det_sign = if modulus == 2 { 1 } else { det_sign };
        Ok(Self::from_parts(entries, det_sign, modulus))
    }

    fn from_parts(entries: [[i64; 2]; 2], det_sign: i8, modulus: i64) -> Self {
        let [[a, b], [g, h]] = entries;
        SymplecticExt {
            a: reduce(a, modulus),
            b: reduce(b, modulus),
            g: reduce(g, modulus),
            h: reduce(h, modulus),
            det_sign,
            modulus,
        }
    }

    pub fn identity(modulus: i64) -> Self {
        Self::from_parts([[1, 0], [0, 1]], 1, modulus)
    }

    /// The anti-symplectic matrix `J = diag(1, -1)`.
    pub fn j(modulus: i64) -> Self {
        let sign = if modulus == 2 { 1 } else { -1 };
        Self::from_parts([[1, 0], [0, -1]], sign, modulus)
    }

    pub fn entries(&self) -> [[i64; 2]; 2] {
        [[self.a, self.b], [self.g, self.h]]
    }

    #[inline]
    pub fn alpha(&self) -> i64 {
        self.a
    }
    #[inline]
    pub fn beta(&self) -> i64 {
        self.b
    }
    #[inline]
    pub fn gamma(&self) -> i64 {
        self.g
    }
    #[inline]
    pub fn delta(&self) -> i64 {
        self.h
    }
    #[inline]
    pub fn det_sign(&self) -> i8 {
        self.det_sign
    }
    #[inline]
    pub fn modulus(&self) -> i64 {
        self.modulus
    }

    pub fn is_symplectic(&self) -> bool {
        self.det_sign == 1
    }

    pub fn is_identity(&self) -> bool {
        self.a == reduce(1, self.modulus) && self.b == 0 && self.g == 0 && self.h == reduce(1, self.modulus)
    }

    pub fn mul(&self, other: &SymplecticExt) -> Result<SymplecticExt> {
        if self.modulus != other.modulus {
            return Err(SicError::ModulusMismatch(self.modulus, other.modulus));
        }
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn mul_unchecked(&self, o: &SymplecticExt) -> SymplecticExt {
        let m = self.modulus;
        let sign = if m == 2 { 1 } else { self.det_sign * o.det_sign };
        SymplecticExt {
            a: reduce(self.a * o.a + self.b * o.g, m),
            b: reduce(self.a * o.b + self.b * o.h, m),
            g: reduce(self.g * o.a + self.h * o.g, m),
            h: reduce(self.g * o.b + self.h * o.h, m),
            det_sign: sign,
            modulus: m,
        }
    }

    /// Inverse: `det · adj(F)`, since `det = ±1`.
    pub fn inverse(&self) -> SymplecticExt {
        let s = self.det_sign as i64;
        Self::from_parts([[s * self.h, -s * self.b], [-s * self.g, s * self.a]], self.det_sign, self.modulus)
    }

    pub fn pow(&self, mut n: u64) -> SymplecticExt {
        let mut base = *self;
        let mut acc = SymplecticExt::identity(self.modulus);
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul_unchecked(&base);
            }
            base = base.mul_unchecked(&base);
            n >>= 1;
        }
        acc
    }

    /// Apply to a column vector.
    pub fn apply(&self, v: (i64, i64)) -> (i64, i64) {
        let m = self.modulus;
        (reduce(self.a * v.0 + self.b * v.1, m), reduce(self.g * v.0 + self.h * v.1, m))
    }

    /// Reduce to a modulus dividing the current one (e.g. `d̄ → d`).
    pub fn reduce_to(&self, modulus: i64) -> Result<SymplecticExt> {
        if modulus < 2 || self.modulus % modulus != 0 {
            return Err(SicError::ModulusMismatch(self.modulus, modulus));
        }
        SymplecticExt::with_sign(self.entries(), self.det_sign, modulus)
    }
}

impl fmt::Display for SymplecticExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]] mod {}", self.a, self.b, self.g, self.h, self.modulus)
    }
}

/// Entrywise product modulo `d̄`.
pub fn mat_mul(f: &SymplecticExt, g: &SymplecticExt) -> Result<SymplecticExt> {
    f.mul(g)
}

/// Smallest `n ≥ 1` with `Fⁿ ≡ I`.
pub fn mat_order(f: &SymplecticExt) -> Result<u64> {
    let cap = esl2_group_order(f.modulus());
    let mut power = *f;
    for n in 1..=cap {
        if power.is_identity() {
            return Ok(n);
        }
        power = power.mul_unchecked(f);
    }
    Err(SicError::Structural(format!("order of {f} exceeds |ESL2| = {cap}")))
}

/// All elements of `SL2(Z_m)` in lexicographic order of their entries.
pub fn enumerate_sl2(m: i64) -> Vec<SymplecticExt> {
    enumerate_with_det(m, &[1])
}

/// All elements of `ESL2(Z_m)`: symplectic first, then anti-symplectic.
pub fn enumerate_esl2(m: i64) -> Vec<SymplecticExt> {
    if m == 2 {
        enumerate_with_det(m, &[1])
    } else {
        enumerate_with_det(m, &[1, -1])
    }
}

fn enumerate_with_det(m: i64, signs: &[i8]) -> Vec<SymplecticExt> {
    let mut out = Vec::new();
    for &sign in signs {
        let target = reduce(sign as i64, m);
        for a in 0..m {
            for b in 0..m {
                for g in 0..m {
                    for h in 0..m {
                        if reduce(a * h - b * g, m) == target {
                            out.push(SymplecticExt::from_parts([[a, b], [g, h]], sign, m));
                        }
                    }
                }
            }
        }
    }
    out
}

/// Search `SL2(Z_m)` for `H` with `H·F ≡ G·H`, i.e. `G = H F H⁻¹`.
///
/// Both matrices must share the modulus `m`, which is capped at
/// [`MAX_CONJUGACY_MODULUS`].
pub fn is_conjugate(f: &SymplecticExt, g: &SymplecticExt) -> Result<Option<SymplecticExt>> {
    let m = f.modulus();
    if g.modulus() != m {
        return Err(SicError::ModulusMismatch(m, g.modulus()));
    }
    if m > MAX_CONJUGACY_MODULUS {
        return Err(SicError::Capacity {
            what: format!("exhaustive conjugacy search mod {m}"),
            limit: MAX_CONJUGACY_MODULUS,
        });
    }
    if f.det_sign() != g.det_sign() {
        return Ok(None);
    }
    Ok(enumerate_sl2(m).into_iter().find(|h| h.mul_unchecked(f) == g.mul_unchecked(h)))
}

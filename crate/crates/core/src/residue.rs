//! Exact arithmetic in ℤ/pᵏ and matrix algebra over it.
//!
//! Entries are canonical representatives in [0, pᵏ) stored in machine
//! integers, with pᵏ capped at 2³¹. Matrices are immutable values carrying a
//! precomputed hash over the packed entries, so they can serve as hash-set
//! keys in enumeration-heavy code. A matrix over ℤ/pᵏ is invertible iff its
//! reduction mod p is invertible; inversion runs Gaussian elimination over
//! F_p followed by a Newton–Hensel lift x ← x(2 − mx).

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use thiserror::Error;

use crate::unity::Unity;

pub const MAX_MODULUS: u64 = 1 << 31;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ResidueError {
    #[error("matrix is not a unit: det ≡ 0 mod p")]
    NotAUnit,
    #[error("reduction exponent {j} out of range 1..={k}")]
    BadExponent { j: u32, k: u32 },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus {p}^{k} exceeds cap 2^31")]
    ModulusTooLarge { p: u64, k: u32 },
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// The ring ℤ/pᵏ with canonical representatives in [0, pᵏ).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ResidueRing {
    p: u32,
    k: u32,
    modulus: u32,
}

impl std::fmt::Debug for ResidueRing {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Z/{}^{}", self.p, self.k)
    }
}

impl ResidueRing {
    pub fn new(p: u64, k: u32) -> Result<Self, ResidueError> {
        if !is_prime(p) {
            return Err(ResidueError::NotPrime(p));
        }
        assert!(k >= 1, "exponent must be ≥ 1");
        let modulus = p
            .checked_pow(k)
            .filter(|&m| m <= MAX_MODULUS)
            .ok_or(ResidueError::ModulusTooLarge { p, k })?;
        Ok(ResidueRing {
            p: p as u32,
            k,
            modulus: modulus as u32,
        })
    }

    pub fn p(&self) -> u64 {
        self.p as u64
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn modulus(&self) -> u64 {
        self.modulus as u64
    }

    pub fn reduce_to(&self, j: u32) -> Result<ResidueRing, ResidueError> {
        if j < 1 || j > self.k {
            return Err(ResidueError::BadExponent { j, k: self.k });
        }
        ResidueRing::new(self.p(), j)
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        (a + b) % self.modulus()
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        (a + self.modulus() - b % self.modulus()) % self.modulus()
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        a * b % self.modulus()
    }

    pub fn neg(&self, a: u64) -> u64 {
        (self.modulus() - a % self.modulus()) % self.modulus()
    }

    pub fn is_unit(&self, a: u64) -> bool {
        a % self.p() != 0
    }

    /// p-adic valuation of a canonical representative, clamped to k for 0.
    pub fn val(&self, a: u64) -> u32 {
        if a % self.modulus() == 0 {
            return self.k;
        }
        let mut a = a % self.modulus();
        let mut v = 0;
        while a % self.p() == 0 {
            a /= self.p();
            v += 1;
        }
        v
    }

    /// Inverse of a unit, by Fermat mod p and a Hensel lift.
    pub fn inv(&self, a: u64) -> Result<u64, ResidueError> {
        let a = a % self.modulus();
        if !self.is_unit(a) {
            return Err(ResidueError::NotAUnit);
        }
        let p = self.p();
        let mut x = pow_mod(a % p, p - 2, p);
        let mut pe = p;
        while pe < self.modulus() {
            pe = (pe * pe).min(self.modulus());
            // x ← x(2 − ax) mod p^{2e}
            let t = (2 + pe - a % pe * x % pe) % pe;
            x = x * t % pe;
        }
        Ok(x % self.modulus())
    }

    /// The unit group (ℤ/pᵏ)ˣ, cyclic for odd p: generator, order, and
    /// discrete logs for character evaluation.
    pub fn unit_log(&self) -> &'static UnitLog {
        static CACHE: OnceLock<Mutex<HashMap<(u32, u32), &'static UnitLog>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().unwrap();
        if let Some(t) = guard.get(&(self.p, self.k)) {
            return t;
        }
        let table = Box::leak(Box::new(UnitLog::build(self)));
        guard.insert((self.p, self.k), table);
        table
    }
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

/// Discrete-log table for (ℤ/pᵏ)ˣ, p odd. Used by unit-group characters.
pub struct UnitLog {
    pub generator: u64,
    pub order: u64,
    log: Vec<u32>, // log[u] for units, u32::MAX elsewhere
}

impl UnitLog {
    fn build(ring: &ResidueRing) -> UnitLog {
        assert!(ring.p() > 2, "unit group of Z/2^k is not cyclic");
        let m = ring.modulus();
        let order = m / ring.p() * (ring.p() - 1);
        let generator = (2..m)
            .find(|&g| {
                ring.is_unit(g) && {
                    let mut x = g;
                    let mut ord = 1;
                    while x != 1 {
                        x = x * g % m;
                        ord += 1;
                    }
                    ord == order
                }
            })
            .expect("cyclic unit group has a generator");
        let mut log = vec![u32::MAX; m as usize];
        let mut x = 1u64;
        for e in 0..order {
            log[x as usize] = e as u32;
            x = x * generator % m;
        }
        UnitLog {
            generator,
            order,
            log,
        }
    }

    pub fn log(&self, u: u64) -> u64 {
        let l = self.log[u as usize];
        assert!(l != u32::MAX, "discrete log of a non-unit");
        l as u64
    }
}

/// Character of (ℤ/pᵏ)ˣ given by generator ↦ e^{2πi·index/order}.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct UnitChar {
    ring: ResidueRing,
    index: u64,
}

impl UnitChar {
    pub fn new(ring: ResidueRing, index: u64) -> Self {
        let order = ring.unit_log().order;
        UnitChar {
            ring,
            index: index % order,
        }
    }

    pub fn trivial(ring: ResidueRing) -> Self {
        UnitChar { ring, index: 0 }
    }

    pub fn ring(&self) -> ResidueRing {
        self.ring
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    pub fn eval(&self, u: u64) -> Unity {
        let t = self.ring.unit_log();
        Unity::new((self.index * t.log(u % self.ring.modulus())) as i64, t.order)
    }

    pub fn mul(&self, other: &UnitChar) -> UnitChar {
        assert_eq!(self.ring, other.ring);
        UnitChar::new(self.ring, self.index + other.index)
    }

    pub fn inv(&self) -> UnitChar {
        let order = self.ring.unit_log().order;
        UnitChar::new(self.ring, order - self.index)
    }

    /// Level: least m ≥ 0 with the character trivial on 1 + pᵐ𝒪 (m = 0 means
    /// trivial on all units). Exhaustive sweep; desk-scale moduli are tiny.
    pub fn level(&self) -> u32 {
        let m = self.ring.modulus();
        for lvl in 0..=self.ring.k() {
            let pe = self.ring.p().pow(lvl);
            let mut trivial = true;
            let mut y = 1u64;
            while y < m {
                if self.ring.is_unit(y) && !self.eval(y).is_one() {
                    trivial = false;
                    break;
                }
                y += pe;
            }
            if trivial {
                return lvl;
            }
        }
        self.ring.k()
    }

    /// All characters of the unit group, trivial first.
    pub fn all(ring: ResidueRing) -> Vec<UnitChar> {
        (0..ring.unit_log().order)
            .map(|i| UnitChar::new(ring, i))
            .collect()
    }

    /// The tame characters (level ≤ 1).
    pub fn tame(ring: ResidueRing) -> Vec<UnitChar> {
        UnitChar::all(ring)
            .into_iter()
            .filter(|c| c.level() <= 1)
            .collect()
    }
}

const MAX_N: usize = 3;

/// An n×n matrix over a [`ResidueRing`], entries reduced, with a precomputed
/// hash of the packed entries.
#[derive(Clone, Copy)]
pub struct ResidueMatrix {
    ring: ResidueRing,
    n: u8,
    a: [u32; MAX_N * MAX_N],
    hash: u64,
}

impl PartialEq for ResidueMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.hash == other.hash && self.n == other.n && self.ring == other.ring && self.a == other.a
    }
}

impl Eq for ResidueMatrix {}

impl std::hash::Hash for ResidueMatrix {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        state.write_u64(self.hash);
    }
}

impl PartialOrd for ResidueMatrix {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ResidueMatrix {
    /// Lexicographic order on the packed entries (row-major); the crate-wide
    /// tie-breaking order for representatives and element lists.
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.n, &self.a, self.ring).cmp(&(other.n, &other.a, other.ring))
    }
}

impl std::fmt::Debug for ResidueMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let n = self.n as usize;
        write!(f, "[")?;
        for i in 0..n {
            write!(f, "[")?;
            for j in 0..n {
                write!(f, "{}", self.a[i * MAX_N + j])?;
                if j + 1 < n {
                    write!(f, ",")?;
                }
            }
            write!(f, "]")?;
        }
        write!(f, "] mod {}", self.ring.modulus())
    }
}

fn fnv1a(seed: u64, x: u64) -> u64 {
    let mut h = seed ^ x;
    h = h.wrapping_mul(0x100000001b3);
    h ^= h >> 29;
    h
}

impl ResidueMatrix {
    fn finish(ring: ResidueRing, n: usize, a: [u32; MAX_N * MAX_N]) -> ResidueMatrix {
        let mut h = 0xcbf29ce484222325u64;
        h = fnv1a(h, ring.modulus());
        h = fnv1a(h, n as u64);
        for i in 0..n {
            for j in 0..n {
                h = fnv1a(h, a[i * MAX_N + j] as u64);
            }
        }
        ResidueMatrix {
            ring,
            n: n as u8,
            a,
            hash: h,
        }
    }

    pub fn from_rows(ring: ResidueRing, rows: &[&[u64]]) -> ResidueMatrix {
        let n = rows.len();
        assert!(n >= 1 && n <= MAX_N);
        let mut a = [0u32; MAX_N * MAX_N];
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), n, "non-square rows");
            for (j, &x) in r.iter().enumerate() {
                a[i * MAX_N + j] = (x % ring.modulus()) as u32;
            }
        }
        ResidueMatrix::finish(ring, n, a)
    }

    pub fn from_fn(ring: ResidueRing, n: usize, f: impl Fn(usize, usize) -> u64) -> ResidueMatrix {
        assert!(n >= 1 && n <= MAX_N);
        let mut a = [0u32; MAX_N * MAX_N];
        for i in 0..n {
            for j in 0..n {
                a[i * MAX_N + j] = (f(i, j) % ring.modulus()) as u32;
            }
        }
        ResidueMatrix::finish(ring, n, a)
    }

    pub fn identity(ring: ResidueRing, n: usize) -> ResidueMatrix {
        ResidueMatrix::from_fn(ring, n, |i, j| u64::from(i == j))
    }

    pub fn scalar(ring: ResidueRing, n: usize, c: u64) -> ResidueMatrix {
        ResidueMatrix::from_fn(ring, n, |i, j| if i == j { c } else { 0 })
    }

    /// Identity plus c in entry (i, j).
    pub fn transvection(ring: ResidueRing, n: usize, i: usize, j: usize, c: u64) -> ResidueMatrix {
        assert_ne!(i, j);
        ResidueMatrix::from_fn(ring, n, |a, b| {
            if a == b {
                1
            } else if (a, b) == (i, j) {
                c
            } else {
                0
            }
        })
    }

    pub fn ring(&self) -> ResidueRing {
        self.ring
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn entry(&self, i: usize, j: usize) -> u64 {
        self.a[i * MAX_N + j] as u64
    }

    pub fn is_identity(&self) -> bool {
        *self == ResidueMatrix::identity(self.ring, self.n())
    }

    pub fn mul(&self, other: &ResidueMatrix) -> ResidueMatrix {
        assert_eq!(self.ring, other.ring);
        assert_eq!(self.n, other.n);
        let n = self.n();
        let m = self.ring.modulus();
        let mut a = [0u32; MAX_N * MAX_N];
        for i in 0..n {
            for j in 0..n {
                let mut acc = 0u64;
                for l in 0..n {
                    acc += self.a[i * MAX_N + l] as u64 * other.a[l * MAX_N + j] as u64 % m;
                }
                a[i * MAX_N + j] = (acc % m) as u32;
            }
        }
        ResidueMatrix::finish(self.ring, n, a)
    }

    pub fn add(&self, other: &ResidueMatrix) -> ResidueMatrix {
        assert_eq!(self.ring, other.ring);
        assert_eq!(self.n, other.n);
        ResidueMatrix::from_fn(self.ring, self.n(), |i, j| {
            self.ring.add(self.entry(i, j), other.entry(i, j))
        })
    }

    pub fn sub(&self, other: &ResidueMatrix) -> ResidueMatrix {
        assert_eq!(self.ring, other.ring);
        assert_eq!(self.n, other.n);
        ResidueMatrix::from_fn(self.ring, self.n(), |i, j| {
            self.ring.sub(self.entry(i, j), other.entry(i, j))
        })
    }

    pub fn transpose(&self) -> ResidueMatrix {
        ResidueMatrix::from_fn(self.ring, self.n(), |i, j| self.entry(j, i))
    }

    pub fn det(&self) -> u64 {
        let r = &self.ring;
        match self.n() {
            1 => self.entry(0, 0),
            2 => r.sub(
                r.mul(self.entry(0, 0), self.entry(1, 1)),
                r.mul(self.entry(0, 1), self.entry(1, 0)),
            ),
            3 => {
                let e = |i, j| self.entry(i, j);
                let pos = r.mul(e(0, 0), r.mul(e(1, 1), e(2, 2)))
                    + r.mul(e(0, 1), r.mul(e(1, 2), e(2, 0)))
                    + r.mul(e(0, 2), r.mul(e(1, 0), e(2, 1)));
                let neg = r.mul(e(0, 2), r.mul(e(1, 1), e(2, 0)))
                    + r.mul(e(0, 1), r.mul(e(1, 0), e(2, 2)))
                    + r.mul(e(0, 0), r.mul(e(1, 2), e(2, 1)));
                r.sub(pos % r.modulus(), neg % r.modulus())
            }
            _ => unreachable!(),
        }
    }

    pub fn trace(&self) -> u64 {
        let mut t = 0;
        for i in 0..self.n() {
            t = self.ring.add(t, self.entry(i, i));
        }
        t
    }

    pub fn is_unit(&self) -> bool {
        self.ring.is_unit(self.det())
    }

    /// Inverse over ℤ/pᵏ: adjugate formula for n ≤ 2, otherwise Gaussian
    /// elimination mod p followed by the Newton–Hensel lift x ← x(2 − mx).
    pub fn invert(&self) -> Result<ResidueMatrix, ResidueError> {
        if !self.is_unit() {
            return Err(ResidueError::NotAUnit);
        }
        let n = self.n();
        let r = self.ring;
        if n == 1 {
            return Ok(ResidueMatrix::from_fn(r, 1, |_, _| {
                r.inv(self.entry(0, 0)).unwrap()
            }));
        }
        if n == 2 {
            let di = r.inv(self.det())?;
            let e = |i, j| self.entry(i, j);
            return Ok(ResidueMatrix::from_rows(
                r,
                &[
                    &[r.mul(di, e(1, 1)), r.mul(di, r.neg(e(0, 1)))],
                    &[r.mul(di, r.neg(e(1, 0))), r.mul(di, e(0, 0))],
                ],
            ));
        }
        let p = self.ring.p();
        // invert mod p
        let fp = ResidueRing::new(p, 1).unwrap();
        let mut aug: Vec<Vec<u64>> = (0..n)
            .map(|i| {
                (0..2 * n)
                    .map(|j| {
                        if j < n {
                            self.entry(i, j) % p
                        } else {
                            u64::from(j - n == i)
                        }
                    })
                    .collect()
            })
            .collect();
        for col in 0..n {
            let piv = (col..n)
                .find(|&r| aug[r][col] % p != 0)
                .expect("unit matrix has a pivot mod p");
            aug.swap(col, piv);
            let inv = fp.inv(aug[col][col]).unwrap();
            for j in 0..2 * n {
                aug[col][j] = aug[col][j] * inv % p;
            }
            for r in 0..n {
                if r != col && aug[r][col] != 0 {
                    let f = aug[r][col];
                    for j in 0..2 * n {
                        aug[r][j] = (aug[r][j] + p * f - f * aug[col][j] % p) % p;
                    }
                }
            }
        }
        let mut x = ResidueMatrix::from_fn(self.ring, n, |i, j| aug[i][j + n]);
        // lift: x ← x(2 − mx)
        let two = ResidueMatrix::scalar(self.ring, n, 2);
        let mut precision = 1u32;
        while precision < self.ring.k() {
            let t = two.sub(&self.mul(&x));
            x = x.mul(&t);
            precision *= 2;
        }
        Ok(x)
    }

    /// Entrywise reduction to ℤ/pʲ; a surjective ring homomorphism.
    pub fn reduce(&self, j: u32) -> Result<ResidueMatrix, ResidueError> {
        let ring = self.ring.reduce_to(j)?;
        Ok(ResidueMatrix::from_fn(ring, self.n(), |a, b| {
            self.entry(a, b) % ring.modulus()
        }))
    }

    /// Lift to ℤ/pᵏ (canonical representative), k ≥ current exponent.
    pub fn lift_to(&self, ring: ResidueRing) -> ResidueMatrix {
        assert_eq!(ring.p(), self.ring.p());
        assert!(ring.k() >= self.ring.k());
        ResidueMatrix::from_fn(ring, self.n(), |i, j| self.entry(i, j))
    }

    pub fn pow(&self, e: u64) -> ResidueMatrix {
        let mut acc = ResidueMatrix::identity(self.ring, self.n());
        let mut b = *self;
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&b);
            }
            b = b.mul(&b);
            e >>= 1;
        }
        acc
    }

    pub fn conj_by(&self, g: &ResidueMatrix, g_inv: &ResidueMatrix) -> ResidueMatrix {
        g.mul(self).mul(g_inv)
    }

    /// Packed entries, row-major: the deterministic sort key.
    pub fn packed(&self) -> Vec<u64> {
        let n = self.n();
        (0..n * n).map(|i| self.a[(i / n) * MAX_N + i % n] as u64).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(p: u64, k: u32) -> ResidueRing {
        ResidueRing::new(p, k).unwrap()
    }

    #[test]
    fn scalar_inverse_mod9() {
        // 2·5 = 10 ≡ 1 mod 9
        let r = z(3, 2);
        let m = ResidueMatrix::from_rows(r, &[&[2]]);
        assert_eq!(m.invert().unwrap(), ResidueMatrix::from_rows(r, &[&[5]]));
    }

    #[test]
    fn identity_inverse_mod9() {
        let r = z(3, 2);
        let id = ResidueMatrix::identity(r, 3);
        assert_eq!(id.invert().unwrap(), id);
    }

    #[test]
    fn unipotent_inverse_mod9() {
        let r = z(3, 2);
        let m = ResidueMatrix::from_rows(r, &[&[1, 1], &[0, 1]]);
        let expected = ResidueMatrix::from_rows(r, &[&[1, 8], &[0, 1]]);
        assert_eq!(m.invert().unwrap(), expected);
    }

    #[test]
    fn non_unit_rejected() {
        let r = z(3, 2);
        let m = ResidueMatrix::from_rows(r, &[&[3, 0], &[0, 1]]);
        assert_eq!(m.invert(), Err(ResidueError::NotAUnit));
    }

    #[test]
    fn reduce_example() {
        let r = z(3, 2);
        let m = ResidueMatrix::from_rows(r, &[&[4, 9], &[3, 1]]);
        let red = m.reduce(1).unwrap();
        let f3 = z(3, 1);
        assert_eq!(red, ResidueMatrix::from_rows(f3, &[&[1, 0], &[0, 1]]));
        assert_eq!(m.reduce(2).unwrap(), m);
        assert!(m.reduce(3).is_err());
    }

    #[test]
    fn exhaustive_inverse_gl2_small() {
        // every unit of M_2(Z/p^k) satisfies m·m⁻¹ = m⁻¹·m = 1, p = 3, k ≤ 2
        for k in 1..=2 {
            let r = z(3, k);
            let m = r.modulus();
            let mut count = 0u64;
            for code in 0..m.pow(4) {
                let e = [code % m, code / m % m, code / (m * m) % m, code / (m * m * m)];
                let g = ResidueMatrix::from_rows(r, &[&[e[0], e[1]], &[e[2], e[3]]]);
                if g.is_unit() {
                    count += 1;
                    let gi = g.invert().unwrap();
                    let id = ResidueMatrix::identity(r, 2);
                    assert_eq!(g.mul(&gi), id);
                    assert_eq!(gi.mul(&g), id);
                }
            }
            let expected = if k == 1 { 48 } else { 48 * 81 };
            assert_eq!(count, expected);
        }
    }

    #[test]
    fn reduce_kernel_size() {
        // kernel of reduce(·, j) on M_n(Z/p^k) has size p^{(k−j)·n²}
        let r = z(3, 2);
        let m = r.modulus();
        let mut kernel = 0u64;
        for code in 0..m.pow(4) {
            let e = [code % m, code / m % m, code / (m * m) % m, code / (m * m * m)];
            let g = ResidueMatrix::from_rows(r, &[&[e[0], e[1]], &[e[2], e[3]]]);
            if g.reduce(1).unwrap() == ResidueMatrix::from_fn(z(3, 1), 2, |_, _| 0) {
                kernel += 1;
            }
        }
        assert_eq!(kernel, 3u64.pow(4));
    }

    #[test]
    fn unit_char_levels() {
        let r = z(3, 2);
        let chars = UnitChar::all(r);
        assert_eq!(chars.len(), 6);
        assert_eq!(chars[0].level(), 0);
        // characters of level ≤ 1 factor through (Z/3)^×, so there are p−1 of them
        let tame = UnitChar::tame(r);
        assert_eq!(tame.len(), 2);
        for c in &tame {
            for u in [1u64, 2, 4, 5, 7, 8] {
                assert_eq!(c.eval(u), c.eval(u % 3));
            }
        }
        // a level-2 character exists
        assert!(UnitChar::all(r).iter().any(|c| c.level() == 2));
    }

    #[test]
    fn unit_char_multiplicative() {
        let r = z(5, 2);
        for c in UnitChar::all(r).iter().step_by(5) {
            for a in 1..25u64 {
                if !r.is_unit(a) {
                    continue;
                }
                for b in 1..25u64 {
                    if !r.is_unit(b) {
                        continue;
                    }
                    assert_eq!(c.eval(a * b % 25), c.eval(a).mul(&c.eval(b)));
                }
            }
        }
    }
}

//! Small finite fields F_q and their quadratic extensions, table-backed.
//!
//! Elements of F_{p^f} are indices 0..q encoding coefficient vectors of
//! polynomials over F_p modulo the lexicographically least monic irreducible
//! of degree f. Everything is precomputed into tables at construction, which
//! is all the GL₂(F_q) character table needs (q ≤ 7 at desk scale, and the
//! quadratic extension F_{q²} on top of it).

/// F_{p^f} with full add/mul tables and a fixed multiplicative generator.
pub struct SmallField {
    pub p: u64,
    pub f: u32,
    pub q: u64,
    add: Vec<u16>,
    mul: Vec<u16>,
    inv: Vec<u16>,
    /// least multiplicative generator (as an element index)
    pub generator: u16,
    /// log[x] for x ≠ 0, with generator^log[x] = x
    log: Vec<u32>,
    /// modulus polynomial coefficients, degree f monic
    modulus: Vec<u64>,
}

fn poly_index(coeffs: &[u64], p: u64) -> u16 {
    let mut ix = 0u64;
    for &c in coeffs.iter().rev() {
        ix = ix * p + c % p;
    }
    ix as u16
}

fn index_poly(ix: u16, p: u64, f: u32) -> Vec<u64> {
    let mut v = Vec::with_capacity(f as usize);
    let mut ix = ix as u64;
    for _ in 0..f {
        v.push(ix % p);
        ix /= p;
    }
    v
}

fn poly_mul_mod(a: &[u64], b: &[u64], modulus: &[u64], p: u64) -> Vec<u64> {
    let f = modulus.len() - 1;
    let mut prod = vec![0u64; a.len() + b.len()];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    // reduce by the monic modulus
    for d in (f..prod.len()).rev() {
        let c = prod[d];
        if c == 0 {
            continue;
        }
        prod[d] = 0;
        for (i, &m) in modulus.iter().enumerate().take(f) {
            let t = d - f + i;
            prod[t] = (prod[t] + c * (p - m % p)) % p;
        }
    }
    prod.truncate(f);
    prod.resize(f, 0);
    prod
}

fn poly_divides(d: &[u64], a: &[u64], p: u64) -> bool {
    let mut rem: Vec<u64> = a.to_vec();
    let dd = d.len() - 1;
    while rem.len() > dd {
        let lead = *rem.last().unwrap();
        if lead != 0 {
            let shift = rem.len() - 1 - dd;
            for (i, &c) in d.iter().enumerate() {
                rem[shift + i] = (rem[shift + i] + lead * (p - c % p)) % p;
            }
        }
        rem.pop();
    }
    rem.iter().all(|&c| c == 0)
}

fn find_irreducible(p: u64, f: u32) -> Vec<u64> {
    // least monic polynomial of degree f with no monic divisor of degree ≤ f/2
    let count = p.pow(f);
    'cand: for low in 0..count {
        let mut coeffs = index_poly(low as u16, p, f);
        coeffs.push(1); // monic of degree f
        for d in 1..=f / 2 {
            for divlow in 0..p.pow(d) {
                let mut div = index_poly(divlow as u16, p, d);
                div.push(1);
                if poly_divides(&div, &coeffs, p) {
                    continue 'cand;
                }
            }
        }
        return coeffs;
    }
    unreachable!("an irreducible of degree {f} over F_{p} exists")
}

impl SmallField {
    pub fn new(p: u64, f: u32) -> SmallField {
        let q = p.pow(f);
        assert!(q <= 1 << 12, "table-backed fields are for desk scale");
        let modulus = find_irreducible(p, f);
        let qs = q as usize;
        let mut add = vec![0u16; qs * qs];
        let mut mul = vec![0u16; qs * qs];
        for x in 0..qs {
            let xp = index_poly(x as u16, p, f);
            for y in 0..qs {
                let yp = index_poly(y as u16, p, f);
                let s: Vec<u64> = xp.iter().zip(&yp).map(|(&a, &b)| (a + b) % p).collect();
                add[x * qs + y] = poly_index(&s, p);
                mul[x * qs + y] = poly_index(&poly_mul_mod(&xp, &yp, &modulus, p), p);
            }
        }
        let mut inv = vec![0u16; qs];
        for x in 1..qs {
            inv[x] = (1..qs).find(|&y| mul[x * qs + y] == 1).unwrap() as u16;
        }
        let generator = (1..qs)
            .find(|&g| {
                let mut x = g;
                let mut ord = 1;
                while x != 1 {
                    x = mul[x * qs + g] as usize;
                    ord += 1;
                }
                ord == qs - 1
            })
            .expect("multiplicative group is cyclic") as u16;
        let mut log = vec![0u32; qs];
        let mut x = 1usize;
        for e in 0..qs - 1 {
            log[x] = e as u32;
            x = mul[x * qs + generator as usize] as usize;
        }
        SmallField {
            p,
            f,
            q,
            add,
            mul,
            inv,
            generator,
            log,
            modulus,
        }
    }

    pub fn add(&self, x: u16, y: u16) -> u16 {
        self.add[x as usize * self.q as usize + y as usize]
    }

    pub fn sub(&self, x: u16, y: u16) -> u16 {
        self.add(x, self.neg(y))
    }

    pub fn neg(&self, x: u16) -> u16 {
        let mut c = index_poly(x, self.p, self.f);
        for v in &mut c {
            *v = (self.p - *v) % self.p;
        }
        poly_index(&c, self.p)
    }

    pub fn mul(&self, x: u16, y: u16) -> u16 {
        self.mul[x as usize * self.q as usize + y as usize]
    }

    pub fn inv(&self, x: u16) -> u16 {
        assert!(x != 0);
        self.inv[x as usize]
    }

    pub fn pow(&self, x: u16, e: u64) -> u16 {
        let mut acc = 1u16;
        let mut b = x;
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        acc
    }

    /// Discrete log base the fixed generator; x must be non-zero.
    pub fn log(&self, x: u16) -> u64 {
        assert!(x != 0);
        self.log[x as usize] as u64
    }

    /// The prime-subfield element for an integer.
    pub fn from_int(&self, n: u64) -> u16 {
        poly_index(&[n % self.p], self.p)
    }

    pub fn elements(&self) -> impl Iterator<Item = u16> {
        0..self.q as u16
    }

    pub fn units(&self) -> impl Iterator<Item = u16> {
        1..self.q as u16
    }
}

/// F_{q²} together with the embedded copy of F_q and Frobenius x ↦ x^q.
///
/// Built as F_{p^{2f}}; the subfield is located as the fixed points of
/// Frobenius, and the embedding F_q → F_{q²} is tabulated by sending the
/// generator-polynomial variable of F_q to a root of its modulus inside the
/// extension.
pub struct QuadraticExtension {
    pub base: SmallField,
    pub ext: SmallField,
    embed: Vec<u16>,
}

impl QuadraticExtension {
    pub fn new(p: u64, f: u32) -> QuadraticExtension {
        let base = SmallField::new(p, f);
        let ext = SmallField::new(p, 2 * f);
        let root = ext
            .elements()
            .find(|&r| {
                let mut acc = 0u16;
                let mut rp = 1u16;
                for &c in &base.modulus {
                    acc = ext.add(acc, ext.mul(ext.from_int(c), rp));
                    rp = ext.mul(rp, r);
                }
                acc == 0
            })
            .expect("base modulus splits in the quadratic extension");
        let embed: Vec<u16> = base
            .elements()
            .map(|x| {
                let coeffs = index_poly(x, p, f);
                let mut acc = 0u16;
                let mut rp = 1u16;
                for &c in &coeffs {
                    acc = ext.add(acc, ext.mul(ext.from_int(c), rp));
                    rp = ext.mul(rp, root);
                }
                acc
            })
            .collect();
        QuadraticExtension { base, ext, embed }
    }

    pub fn q(&self) -> u64 {
        self.base.q
    }

    pub fn embed(&self, x: u16) -> u16 {
        self.embed[x as usize]
    }

    pub fn frobenius(&self, x: u16) -> u16 {
        self.ext.pow(x, self.q())
    }

    pub fn in_base(&self, x: u16) -> bool {
        self.frobenius(x) == x
    }

    /// Preimage under the embedding, for elements fixed by Frobenius.
    pub fn to_base(&self, x: u16) -> u16 {
        self.embed
            .iter()
            .position(|&e| e == x)
            .map(|i| i as u16)
            .expect("element lies in the base field")
    }

    pub fn norm(&self, x: u16) -> u16 {
        self.to_base(self.ext.mul(x, self.frobenius(x)))
    }

    pub fn trace(&self, x: u16) -> u16 {
        self.to_base(self.ext.add(x, self.frobenius(x)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f4_is_a_field() {
        let f4 = SmallField::new(2, 2);
        assert_eq!(f4.q, 4);
        for x in f4.units() {
            assert_eq!(f4.mul(x, f4.inv(x)), 1);
        }
        for x in f4.elements() {
            assert_eq!(f4.add(x, x), 0);
        }
    }

    #[test]
    fn f9_lives_over_f3() {
        let e = QuadraticExtension::new(3, 1);
        assert_eq!(e.ext.q, 9);
        // embedding is a ring homomorphism
        for x in e.base.elements() {
            for y in e.base.elements() {
                assert_eq!(e.embed(e.base.mul(x, y)), e.ext.mul(e.embed(x), e.embed(y)));
                assert_eq!(e.embed(e.base.add(x, y)), e.ext.add(e.embed(x), e.embed(y)));
            }
        }
        assert_eq!(e.ext.elements().filter(|&x| e.in_base(x)).count(), 3);
    }

    #[test]
    fn f16_over_f4() {
        let e = QuadraticExtension::new(2, 2);
        assert_eq!(e.q(), 4);
        assert_eq!(e.ext.q, 16);
        assert_eq!(e.ext.elements().filter(|&x| e.in_base(x)).count(), 4);
        for x in e.ext.units() {
            let n = e.norm(x);
            let t = e.trace(x);
            // x satisfies X² − tX + n over the base field
            let xe = x;
            let lhs = e.ext.add(
                e.ext.mul(xe, xe),
                e.ext.add(
                    e.ext.neg(e.ext.mul(e.embed(t), xe)),
                    e.embed(n),
                ),
            );
            assert_eq!(lhs, 0);
        }
    }

    #[test]
    fn generator_order() {
        for (p, f) in [(3, 1), (5, 1), (3, 2), (5, 2), (2, 4)] {
            let fq = SmallField::new(p, f);
            let g = fq.generator;
            let mut x = g;
            let mut ord = 1;
            while x != 1 {
                x = fq.mul(x, g);
                ord += 1;
            }
            assert_eq!(ord, fq.q - 1);
        }
    }
}

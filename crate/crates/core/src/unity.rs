//! Exact roots of unity as reduced angle fractions.
//!
//! Every one-dimensional character value appearing in this crate is a root of
//! unity e^{2πi·n/d} with small d (a divisor of p^k(p−1) or q²−1). Storing the
//! angle as a reduced fraction keeps character agreement tests exact and the
//! reports deterministic; conversion to `Complex64` happens only at the point
//! where values are summed into inner products.

use num_complex::Complex64;

/// e^{2πi·num/den}, with 0 ≤ num < den and gcd(num, den) = 1.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Unity {
    num: u64,
    den: u64,
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl Unity {
    pub fn new(num: i64, den: u64) -> Self {
        assert!(den > 0, "zero denominator");
        let num = num.rem_euclid(den as i64) as u64;
        let g = gcd(num, den);
        Unity {
            num: num / g,
            den: den / g,
        }
    }

    pub fn one() -> Self {
        Unity { num: 0, den: 1 }
    }

    pub fn is_one(&self) -> bool {
        self.num == 0
    }

    /// Multiplication of the underlying roots of unity (addition of angles).
    pub fn mul(&self, other: &Unity) -> Unity {
        let den = self.den / gcd(self.den, other.den) * other.den;
        let num = self.num * (den / self.den) + other.num * (den / other.den);
        Unity::new(num as i64, den)
    }

    pub fn conj(&self) -> Unity {
        Unity::new(-(self.num as i64), self.den)
    }

    pub fn pow(&self, e: i64) -> Unity {
        let e = e.rem_euclid(self.den as i64) as u64;
        Unity::new((self.num * e) as i64, self.den)
    }

    pub fn order(&self) -> u64 {
        self.den
    }

    pub fn to_complex(&self) -> Complex64 {
        let theta = 2.0 * std::f64::consts::PI * (self.num as f64) / (self.den as f64);
        Complex64::new(theta.cos(), theta.sin())
    }
}

impl std::fmt::Debug for Unity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "e({}/{})", self.num, self.den)
    }
}

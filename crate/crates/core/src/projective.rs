//! Points of 𝐏^{n−1}(ℤ/pᵐ) as normalized unimodular row vectors, and the
//! identification G/P(m) ≅ 𝐏^{n−1}(ℤ/pᵐ) for the parabolic congruence
//! subgroups P(m) = {g : g mod pᵐ is block upper triangular of type (n−1,1)}.
//!
//! The identification sends the coset gP(m) to the last row of g⁻¹ reduced
//! mod pᵐ, viewed up to unit scaling; left translation by h becomes right
//! multiplication of the row by h⁻¹. This keeps double-coset and Mackey
//! computations on point sets of a few hundred elements even when the
//! ambient GL₃(ℤ/pᵏ) is far beyond the enumeration budget.
//!
//! Normal form: each unimodular row has a unique representative whose last
//! unit coordinate is scaled to 1 (which coordinate is the last unit is a
//! scaling invariant).

use crate::residue::{ResidueMatrix, ResidueRing};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProjPoint {
    n: u8,
    coords: [u32; 3],
}

impl std::fmt::Debug for ProjPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{:?}]", &self.coords[..self.n as usize])
    }
}

impl ProjPoint {
    pub fn coords(&self) -> Vec<u64> {
        self.coords[..self.n as usize].iter().map(|&c| c as u64).collect()
    }
}

#[derive(Clone, Copy)]
pub struct ProjSpace {
    pub ring: ResidueRing,
    pub n: usize,
}

impl ProjSpace {
    pub fn new(ring: ResidueRing, n: usize) -> Self {
        assert!(n == 2 || n == 3);
        ProjSpace { ring, n }
    }

    /// |𝐏^{n−1}(ℤ/pᵏ)| = p^{(n−1)(k−1)} · (p^n − 1)/(p − 1).
    pub fn point_count(&self) -> u64 {
        let p = self.ring.p();
        let k = self.ring.k();
        let geom: u64 = (0..self.n as u32).map(|i| p.pow(i)).sum();
        p.pow((self.n as u32 - 1) * (k - 1)) * geom
    }

    /// Normalize a unimodular row to its canonical representative.
    pub fn normalize(&self, raw: &[u64]) -> ProjPoint {
        assert_eq!(raw.len(), self.n);
        let last_unit = (0..self.n)
            .rev()
            .find(|&i| self.ring.is_unit(raw[i]))
            .expect("row is not unimodular");
        let inv = self.ring.inv(raw[last_unit]).unwrap();
        let mut coords = [0u32; 3];
        for i in 0..self.n {
            coords[i] = self.ring.mul(raw[i], inv) as u32;
        }
        ProjPoint {
            n: self.n as u8,
            coords,
        }
    }

    /// All points, sorted.
    pub fn points(&self) -> Vec<ProjPoint> {
        let m = self.ring.modulus();
        let mut out = Vec::with_capacity(self.point_count() as usize);
        for code in 0..m.pow(self.n as u32) {
            let mut c = code;
            let mut raw = vec![0u64; self.n];
            for r in raw.iter_mut() {
                *r = c % m;
                c /= m;
            }
            if raw.iter().any(|&x| self.ring.is_unit(x)) {
                let pt = self.normalize(&raw);
                if pt.coords().as_slice() == raw.as_slice() {
                    out.push(pt);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Right multiplication of the row by g (g reduced to this ring first).
    pub fn act_row(&self, x: &ProjPoint, g: &ResidueMatrix) -> ProjPoint {
        let g = if g.ring() == self.ring {
            *g
        } else {
            g.reduce(self.ring.k()).expect("action matrix reduces to the point ring")
        };
        let mut raw = vec![0u64; self.n];
        for (j, r) in raw.iter_mut().enumerate() {
            let mut acc = 0;
            for i in 0..self.n {
                acc = self.ring.add(acc, self.ring.mul(x.coords[i] as u64, g.entry(i, j)));
            }
            *r = acc;
        }
        self.normalize(&raw)
    }

    /// The point of the coset gP(m): last row of g⁻¹, reduced.
    pub fn point_of_coset(&self, g: &ResidueMatrix) -> ProjPoint {
        let gi = g.invert().expect("coset representative is a unit");
        let red = gi.reduce(self.ring.k()).expect("matrix reduces to the point ring");
        let raw: Vec<u64> = (0..self.n).map(|j| red.entry(self.n - 1, j)).collect();
        self.normalize(&raw)
    }

    /// Left translation of cosets: point(hgP) = point(gP)·h⁻¹.
    pub fn translate(&self, h: &ResidueMatrix, x: &ProjPoint) -> ProjPoint {
        self.act_row(x, &h.invert().expect("group element is a unit"))
    }

    /// A coset representative g (over `target`) with point_of_coset(g) = x:
    /// complete the lifted row to an invertible matrix and invert.
    pub fn section(&self, x: &ProjPoint, target: ResidueRing) -> ResidueMatrix {
        assert_eq!(target.p(), self.ring.p());
        let pivot = (0..self.n)
            .rev()
            .find(|&i| self.ring.is_unit(x.coords[i] as u64))
            .unwrap();
        // rows: standard basis vectors for all indices except the pivot,
        // last row = x lifted
        let mut rows: Vec<Vec<u64>> = Vec::new();
        for i in 0..self.n {
            if i != pivot {
                let mut e = vec![0u64; self.n];
                e[i] = 1;
                rows.push(e);
            }
        }
        rows.push(x.coords().to_vec());
        let w = ResidueMatrix::from_fn(target, self.n, |i, j| rows[i][j]);
        w.invert().expect("completed basis matrix is a unit")
    }

    /// The base point [0, …, 0, 1] (the coset of the identity).
    pub fn base_point(&self) -> ProjPoint {
        let mut raw = vec![0u64; self.n];
        raw[self.n - 1] = 1;
        self.normalize(&raw)
    }
}

/// G/P(m) as a point set: the coset space of a parabolic congruence
/// subgroup, realized projectively. `ambient` is the ring of the ambient
/// group (truncation k ≥ m); sections are produced over it.
pub struct ProjCosets {
    pub space: ProjSpace,
    pub ambient: ResidueRing,
}

impl ProjCosets {
    /// Cosets of P(m) (type (n−1,1)) inside GL_n(ℤ/pᵏ).
    pub fn new(ambient: ResidueRing, n: usize, m: u32) -> Self {
        let ring = ResidueRing::new(ambient.p(), m).unwrap();
        ProjCosets {
            space: ProjSpace::new(ring, n),
            ambient,
        }
    }
}

impl crate::group::CosetPoints for ProjCosets {
    type Point = ProjPoint;

    fn all_points(&self) -> Vec<ProjPoint> {
        self.space.points()
    }

    fn translate(&self, h: &ResidueMatrix, x: &ProjPoint) -> ProjPoint {
        self.space.translate(h, x)
    }

    fn section(&self, x: &ProjPoint) -> ResidueMatrix {
        self.space.section(x, self.ambient)
    }
}

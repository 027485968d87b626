//! Finite subgroups of GL_n(ℤ/pᵏ) as first-class objects.
//!
//! A group carries a membership predicate, generators when known, and
//! optionally structured block coordinates (Iwahori parameterization) so that
//! congruence subgroups enumerate in O(|H|) instead of O(|GL_n|). Enumeration
//! is budgeted: exceeding the budget is an error, never silent sampling.
//!
//! Orbits and stabilizers run on generators (Schreier's lemma), so double
//! cosets of huge ambient groups are computed as orbits on small coset
//! spaces without ever enumerating the ambient group.

use std::collections::{HashMap, HashSet};
use std::sync::{Arc, OnceLock};

use thiserror::Error;

use crate::residue::{ResidueMatrix, ResidueRing};

pub const DEFAULT_BUDGET: u64 = 10_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GroupError {
    #[error("budget exceeded: predicted order {predicted} > budget {budget}")]
    BudgetExceeded { predicted: u64, budget: u64 },
    #[error("group has no generating set")]
    NoGenerators,
    #[error("coset index exceeded bound {0}")]
    IndexExceeded(u64),
}

/// One diagonal block of a structured congruence group.
#[derive(Clone)]
pub enum LeviBlock {
    /// Full GL of the given size over the ring.
    Gl { size: usize },
    /// An explicit subgroup of GL_size, given by its sorted element list and
    /// a generating set (matrices of the block size over the same ring).
    Explicit {
        size: usize,
        elements: Arc<Vec<ResidueMatrix>>,
        generators: Vec<ResidueMatrix>,
    },
}

impl LeviBlock {
    pub fn size(&self) -> usize {
        match self {
            LeviBlock::Gl { size } => *size,
            LeviBlock::Explicit { size, .. } => *size,
        }
    }
}

/// Iwahori block coordinates: diagonal Levi blocks and minimum valuations
/// for entries outside the blocks (absent positions are free; valuation ≥ k
/// forces an entry to vanish, which is how pure Levi and unipotent
/// subgroups are carved out).
#[derive(Clone)]
pub struct BlockShape {
    pub ring: ResidueRing,
    pub levi: Vec<LeviBlock>,
    /// (row, col, min valuation) for positions below the block diagonal
    pub lower_val: Vec<(usize, usize, u32)>,
    /// (row, col, min valuation) for positions above the block diagonal
    pub upper_val: Vec<(usize, usize, u32)>,
}

impl BlockShape {
    pub fn n(&self) -> usize {
        self.levi.iter().map(LeviBlock::size).sum()
    }

    /// Block index boundaries: starts[i]..starts[i+1] is block i.
    fn starts(&self) -> Vec<usize> {
        let mut s = vec![0];
        for b in &self.levi {
            s.push(s.last().unwrap() + b.size());
        }
        s
    }

    fn block_of(&self, i: usize) -> usize {
        let starts = self.starts();
        (0..self.levi.len()).find(|&b| i < starts[b + 1]).unwrap()
    }

    pub fn lower_positions(&self) -> Vec<(usize, usize)> {
        let n = self.n();
        let mut pos = Vec::new();
        for i in 0..n {
            for j in 0..i {
                if self.block_of(i) != self.block_of(j) {
                    pos.push((i, j));
                }
            }
        }
        pos
    }

    pub fn upper_positions(&self) -> Vec<(usize, usize)> {
        self.lower_positions().iter().map(|&(i, j)| (j, i)).collect()
    }

    pub fn exponent(&self, i: usize, j: usize) -> u32 {
        let table = if i > j { &self.lower_val } else { &self.upper_val };
        table
            .iter()
            .find(|&&(a, b, _)| (a, b) == (i, j))
            .map(|&(_, _, v)| v)
            .unwrap_or(0)
    }

    pub fn order(&self) -> u64 {
        let k = self.ring.k();
        let p = self.ring.p();
        let mut ord: u64 = 1;
        for &(i, j) in self.lower_positions().iter().chain(&self.upper_positions()) {
            let v = self.exponent(i, j).min(k);
            ord *= p.pow(k - v);
        }
        for b in &self.levi {
            ord *= match b {
                LeviBlock::Gl { size } => gl_order(self.ring, *size),
                LeviBlock::Explicit { elements, .. } => elements.len() as u64,
            };
        }
        ord
    }

    /// Factor g as (lower unipotent)·(block diagonal)·(upper unipotent) for
    /// this shape's block sizes.
    pub fn factorize(
        &self,
        g: &ResidueMatrix,
    ) -> Option<(ResidueMatrix, ResidueMatrix, ResidueMatrix)> {
        let sizes: Vec<usize> = self.levi.iter().map(LeviBlock::size).collect();
        factor_blocks(g, &sizes)
    }

    /// Membership: factorizable, outer valuations met, Levi blocks in their
    /// block groups.
    pub fn contains(&self, g: &ResidueMatrix) -> bool {
        if g.n() != self.n() || g.ring() != self.ring {
            return false;
        }
        let Some((lower, mid, upper)) = self.factorize(g) else {
            return false;
        };
        for &(i, j) in &self.lower_positions() {
            if self.ring.val(lower.entry(i, j)) < self.exponent(i, j).min(self.ring.k()) {
                return false;
            }
        }
        for &(i, j) in &self.upper_positions() {
            if self.ring.val(upper.entry(i, j)) < self.exponent(i, j).min(self.ring.k()) {
                return false;
            }
        }
        let starts = self.starts();
        for (bi, b) in self.levi.iter().enumerate() {
            let s = starts[bi];
            let blk = ResidueMatrix::from_fn(self.ring, b.size(), |i, j| mid.entry(s + i, s + j));
            match b {
                LeviBlock::Gl { .. } => {
                    if !blk.is_unit() {
                        return false;
                    }
                }
                LeviBlock::Explicit { elements, .. } => {
                    if elements.binary_search(&blk).is_err() {
                        return false;
                    }
                }
            }
        }
        true
    }

    pub fn generators(&self) -> Vec<ResidueMatrix> {
        let n = self.n();
        let ring = self.ring;
        let starts = self.starts();
        let mut gens = Vec::new();
        for (bi, b) in self.levi.iter().enumerate() {
            let s = starts[bi];
            match b {
                LeviBlock::Gl { size } => {
                    for i in 0..*size {
                        for j in 0..*size {
                            if i != j {
                                gens.push(ResidueMatrix::transvection(ring, n, s + i, s + j, 1));
                            }
                        }
                    }
                    let r = ring.unit_log().generator;
                    gens.push(ResidueMatrix::from_fn(ring, n, |i, j| {
                        if i == j {
                            if i == s {
                                r
                            } else {
                                1
                            }
                        } else {
                            0
                        }
                    }));
                }
                LeviBlock::Explicit { size, generators, .. } => {
                    for g in generators {
                        gens.push(embed_block(ring, n, s, *size, g));
                    }
                }
            }
        }
        for &(i, j) in self.upper_positions().iter().chain(&self.lower_positions()) {
            let v = self.exponent(i, j);
            if v < ring.k() {
                gens.push(ResidueMatrix::transvection(ring, n, i, j, ring.p().pow(v)));
            }
        }
        gens
    }

    /// Enumerate the three Iwahori factors; the group is their product set.
    pub fn factors(&self, budget: u64) -> Result<[Vec<ResidueMatrix>; 3], GroupError> {
        let predicted = self.order();
        if predicted > budget {
            return Err(GroupError::BudgetExceeded { predicted, budget });
        }
        let ring = self.ring;
        let n = self.n();
        let k = ring.k();
        let p = ring.p();
        let unipotents = |positions: &[(usize, usize)]| -> Vec<ResidueMatrix> {
            let counts: Vec<u64> = positions
                .iter()
                .map(|&(i, j)| p.pow(k - self.exponent(i, j).min(k)))
                .collect();
            let total: u64 = counts.iter().product();
            let mut out = Vec::with_capacity(total as usize);
            for code in 0..total {
                let mut c = code;
                let mut entries = vec![0u64; positions.len()];
                for (t, &cnt) in counts.iter().enumerate() {
                    let (i, j) = positions[t];
                    entries[t] = c % cnt * p.pow(self.exponent(i, j).min(k));
                    c /= cnt;
                }
                out.push(ResidueMatrix::from_fn(ring, n, |i, j| {
                    if i == j {
                        1
                    } else if let Some(t) = positions.iter().position(|&(a, b)| (a, b) == (i, j)) {
                        entries[t]
                    } else {
                        0
                    }
                }));
            }
            out
        };
        let lowers = unipotents(&self.lower_positions());
        let starts = self.starts();
        let mut levis = vec![ResidueMatrix::identity(ring, n)];
        for (bi, b) in self.levi.iter().enumerate() {
            let s = starts[bi];
            let block_elems: Vec<ResidueMatrix> = match b {
                LeviBlock::Gl { size } => enumerate_gl(ring, *size, budget)?,
                LeviBlock::Explicit { elements, .. } => elements.as_ref().clone(),
            };
            let mut next = Vec::with_capacity(levis.len() * block_elems.len());
            for base in &levis {
                for blk in &block_elems {
                    next.push(overlay_block(base, s, b.size(), blk));
                }
            }
            levis = next;
        }
        let uppers = unipotents(&self.upper_positions());
        Ok([lowers, levis, uppers])
    }
}

/// Factor g into (lower unipotent)·(block diagonal)·(upper unipotent) for
/// the given diagonal block sizes, peeling the last block repeatedly. Fails
/// (None) when a leading principal block is not invertible — e.g. the long
/// Weyl element never factors.
pub fn factor_blocks(
    g: &ResidueMatrix,
    sizes: &[usize],
) -> Option<(ResidueMatrix, ResidueMatrix, ResidueMatrix)> {
    let n = g.n();
    assert_eq!(sizes.iter().sum::<usize>(), n);
    let ring = g.ring();
    let mut starts = vec![0usize];
    for s in sizes {
        starts.push(starts.last().unwrap() + s);
    }
    let id = ResidueMatrix::identity(ring, n);
    let mut lower = id;
    let mut upper = id;
    let mut mid = *g;
    for split in (1..sizes.len()).rev() {
        let s = starts[split];
        let a = submatrix(&mid, 0, 0, s);
        let a_inv = a.invert().ok()?;
        // n_l = I + (C·A⁻¹) below, n_u = I + (A⁻¹·B) above; both are
        // one-band block unipotents, so their inverses just negate the band
        let nl = ResidueMatrix::from_fn(ring, n, |i, j| {
            if i == j {
                1
            } else if i >= s && j < s {
                let mut acc = 0;
                for l in 0..s {
                    acc = ring.add(acc, ring.mul(mid.entry(i, l), a_inv.entry(l, j)));
                }
                acc
            } else {
                0
            }
        });
        let nu = ResidueMatrix::from_fn(ring, n, |i, j| {
            if i == j {
                1
            } else if i < s && j >= s {
                let mut acc = 0;
                for l in 0..s {
                    acc = ring.add(acc, ring.mul(a_inv.entry(i, l), mid.entry(l, j)));
                }
                acc
            } else {
                0
            }
        });
        let nl_inv = negate_band(&nl);
        let nu_inv = negate_band(&nu);
        mid = nl_inv.mul(&mid).mul(&nu_inv);
        lower = lower.mul(&nl);
        upper = nu.mul(&upper);
    }
    Some((lower, mid, upper))
}

/// Inverse of I + N with N supported on one side of the diagonal block
/// boundary (N² = 0): just negate the off-diagonal part.
fn negate_band(m: &ResidueMatrix) -> ResidueMatrix {
    let ring = m.ring();
    ResidueMatrix::from_fn(ring, m.n(), |i, j| {
        if i == j {
            1
        } else {
            ring.neg(m.entry(i, j))
        }
    })
}

fn submatrix(m: &ResidueMatrix, r0: usize, c0: usize, size: usize) -> ResidueMatrix {
    ResidueMatrix::from_fn(m.ring(), size, |i, j| m.entry(r0 + i, c0 + j))
}

/// Write `blk` (size×size) into `base` at diagonal offset s.
fn overlay_block(base: &ResidueMatrix, s: usize, size: usize, blk: &ResidueMatrix) -> ResidueMatrix {
    ResidueMatrix::from_fn(base.ring(), base.n(), |i, j| {
        if i >= s && i < s + size && j >= s && j < s + size {
            blk.entry(i - s, j - s)
        } else {
            base.entry(i, j)
        }
    })
}

/// Embed a size×size block at diagonal offset s of the n×n identity.
pub fn embed_block(ring: ResidueRing, n: usize, s: usize, size: usize, blk: &ResidueMatrix) -> ResidueMatrix {
    ResidueMatrix::from_fn(ring, n, |i, j| {
        if i >= s && i < s + size && j >= s && j < s + size {
            blk.entry(i - s, j - s)
        } else {
            u64::from(i == j)
        }
    })
}

pub fn gl_order(ring: ResidueRing, n: usize) -> u64 {
    let p = ring.p();
    let k = ring.k();
    let mut ord = 1u64;
    for i in 0..n {
        ord *= p.pow(n as u32) - p.pow(i as u32);
    }
    ord * p.pow((n * n) as u32 * (k - 1))
}

/// All of GL_n(ℤ/pᵏ): filter mod p, then lift level by level (each element
/// has exactly p^{n²} lifts, all invertible).
pub fn enumerate_gl(ring: ResidueRing, n: usize, budget: u64) -> Result<Vec<ResidueMatrix>, GroupError> {
    let predicted = gl_order(ring, n);
    if predicted > budget {
        return Err(GroupError::BudgetExceeded { predicted, budget });
    }
    let p = ring.p();
    let fp = ResidueRing::new(p, 1).unwrap();
    let nn = n * n;
    let decode = |code: u64| -> Vec<u64> {
        let mut c = code;
        (0..nn)
            .map(|_| {
                let e = c % p;
                c /= p;
                e
            })
            .collect()
    };
    let mut cur: Vec<ResidueMatrix> = Vec::new();
    for code in 0..p.pow(nn as u32) {
        let digits = decode(code);
        let m = ResidueMatrix::from_fn(fp, n, |i, j| digits[i * n + j]);
        if m.is_unit() {
            cur.push(m);
        }
    }
    for j in 2..=ring.k() {
        let rj = ResidueRing::new(p, j).unwrap();
        let pe = p.pow(j - 1);
        let mut next = Vec::with_capacity(cur.len() * p.pow(nn as u32) as usize);
        for base in &cur {
            let lifted = base.lift_to(rj);
            for code in 0..p.pow(nn as u32) {
                let digits = decode(code);
                next.push(ResidueMatrix::from_fn(rj, n, |i, jx| {
                    lifted.entry(i, jx) + digits[i * n + jx] * pe
                }));
            }
        }
        cur = next;
    }
    cur.sort_unstable();
    Ok(cur)
}

type MemberFn = Arc<dyn Fn(&ResidueMatrix) -> bool + Send + Sync>;

/// A finite subgroup of GL_n(ℤ/pᵏ): membership predicate, generators when
/// known, optional block structure, lazily cached exhaustive enumeration.
pub struct FiniteMatrixGroup {
    ring: ResidueRing,
    n: usize,
    name: String,
    membership: MemberFn,
    generators: Option<Vec<ResidueMatrix>>,
    shape: Option<BlockShape>,
    order_hint: Option<u64>,
    is_full_gl: bool,
    elements_cache: OnceLock<Arc<Vec<ResidueMatrix>>>,
}

impl FiniteMatrixGroup {
    pub fn from_membership(
        ring: ResidueRing,
        n: usize,
        name: impl Into<String>,
        membership: MemberFn,
        generators: Option<Vec<ResidueMatrix>>,
        order_hint: Option<u64>,
    ) -> Self {
        FiniteMatrixGroup {
            ring,
            n,
            name: name.into(),
            membership,
            generators,
            shape: None,
            order_hint,
            is_full_gl: false,
            elements_cache: OnceLock::new(),
        }
    }

    pub fn from_elements(
        ring: ResidueRing,
        n: usize,
        name: impl Into<String>,
        mut elements: Vec<ResidueMatrix>,
    ) -> Self {
        elements.sort_unstable();
        elements.dedup();
        let sorted = Arc::new(elements);
        let for_pred = Arc::clone(&sorted);
        let g = FiniteMatrixGroup {
            ring,
            n,
            name: name.into(),
            membership: Arc::new(move |m| for_pred.binary_search(m).is_ok()),
            generators: Some(sorted.as_ref().clone()),
            shape: None,
            order_hint: Some(sorted.len() as u64),
            is_full_gl: false,
            elements_cache: OnceLock::new(),
        };
        let _ = g.elements_cache.set(sorted);
        g
    }

    pub fn from_shape(name: impl Into<String>, shape: BlockShape) -> Self {
        let s = shape.clone();
        FiniteMatrixGroup {
            ring: shape.ring,
            n: shape.n(),
            name: name.into(),
            membership: Arc::new(move |m| s.contains(m)),
            generators: Some(shape.generators()),
            order_hint: Some(shape.order()),
            shape: Some(shape),
            is_full_gl: false,
            elements_cache: OnceLock::new(),
        }
    }

    pub fn from_generators(
        ring: ResidueRing,
        n: usize,
        name: impl Into<String>,
        generators: Vec<ResidueMatrix>,
        budget: u64,
    ) -> Result<Self, GroupError> {
        let elements = closure(&generators, ring, n, budget)?;
        let mut g = FiniteMatrixGroup::from_elements(ring, n, name, elements);
        g.generators = Some(generators);
        Ok(g)
    }

    /// Full GL_n(ℤ/pᵏ): transvections plus one diagonal primitive-root unit.
    pub fn gl(ring: ResidueRing, n: usize) -> Self {
        let mut gens = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    gens.push(ResidueMatrix::transvection(ring, n, i, j, 1));
                }
            }
        }
        gens.push(ResidueMatrix::from_fn(ring, n, |i, j| {
            if i == j {
                if i == 0 {
                    ring.unit_log().generator
                } else {
                    1
                }
            } else {
                0
            }
        }));
        FiniteMatrixGroup {
            ring,
            n,
            name: format!("GL{}(Z/{}^{})", n, ring.p(), ring.k()),
            membership: Arc::new(ResidueMatrix::is_unit),
            generators: Some(gens),
            shape: None,
            order_hint: Some(gl_order(ring, n)),
            is_full_gl: true,
            elements_cache: OnceLock::new(),
        }
    }

    pub fn trivial(ring: ResidueRing, n: usize) -> Self {
        FiniteMatrixGroup::from_elements(ring, n, "1", vec![ResidueMatrix::identity(ring, n)])
    }

    pub fn ring(&self) -> ResidueRing {
        self.ring
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn shape(&self) -> Option<&BlockShape> {
        self.shape.as_ref()
    }

    pub fn membership_fn(&self) -> MemberFn {
        Arc::clone(&self.membership)
    }

    pub fn contains(&self, m: &ResidueMatrix) -> bool {
        (self.membership)(m)
    }

    pub fn generators(&self) -> Result<&[ResidueMatrix], GroupError> {
        self.generators.as_deref().ok_or(GroupError::NoGenerators)
    }

    /// Exact order; from structure when available, else by enumeration.
    pub fn order(&self, budget: u64) -> Result<u64, GroupError> {
        if let Some(o) = self.order_hint {
            return Ok(o);
        }
        Ok(self.elements(budget)?.len() as u64)
    }

    pub fn predicted_order(&self) -> Option<u64> {
        self.order_hint
            .or_else(|| self.elements_cache.get().map(|e| e.len() as u64))
    }

    /// Exhaustive, duplicate-free, sorted element list.
    pub fn elements(&self, budget: u64) -> Result<&Arc<Vec<ResidueMatrix>>, GroupError> {
        if let Some(e) = self.elements_cache.get() {
            return Ok(e);
        }
        if let Some(predicted) = self.order_hint {
            if predicted > budget {
                return Err(GroupError::BudgetExceeded { predicted, budget });
            }
        }
        let elems: Vec<ResidueMatrix> = if let Some(shape) = &self.shape {
            let [lowers, levis, uppers] = shape.factors(budget)?;
            let mut v = Vec::with_capacity(lowers.len() * levis.len() * uppers.len());
            for l in &lowers {
                for m in &levis {
                    let lm = l.mul(m);
                    for u in &uppers {
                        v.push(lm.mul(u));
                    }
                }
            }
            v.sort_unstable();
            v.dedup();
            v
        } else if self.is_full_gl {
            enumerate_gl(self.ring, self.n, budget)?
        } else if let Some(gens) = &self.generators {
            closure(gens, self.ring, self.n, budget)?
        } else {
            return Err(GroupError::NoGenerators);
        };
        let arc = Arc::new(elems);
        let _ = self.elements_cache.set(Arc::clone(&arc));
        Ok(self.elements_cache.get().unwrap())
    }

    /// Visit every element without materializing the list when the group has
    /// block structure. Returns the first `Some` produced by `f` in
    /// deterministic index order.
    pub fn stream_find<T: Send>(
        &self,
        budget: u64,
        f: impl Fn(&ResidueMatrix) -> Option<T> + Sync + Send,
    ) -> Result<Option<T>, GroupError> {
        if let Some(e) = self.elements_cache.get() {
            return Ok(crate::par::find_first_indexed(e.len() as u64, |i| f(&e[i as usize])));
        }
        if let Some(shape) = &self.shape {
            let [lowers, levis, uppers] = shape.factors(budget)?;
            let nu = uppers.len() as u64;
            let lu = levis.len() as u64 * nu;
            let total = lowers.len() as u64 * lu;
            return Ok(crate::par::find_first_indexed(total, |ix| {
                let l = &lowers[(ix / lu) as usize];
                let m = &levis[(ix % lu / nu) as usize];
                let u = &uppers[(ix % nu) as usize];
                f(&l.mul(m).mul(u))
            }));
        }
        let elems = self.elements(budget)?;
        Ok(crate::par::find_first_indexed(elems.len() as u64, |i| f(&elems[i as usize])))
    }

    /// Count elements satisfying `pred`, streaming when block-structured.
    pub fn stream_count(
        &self,
        budget: u64,
        pred: impl Fn(&ResidueMatrix) -> bool + Sync + Send,
    ) -> Result<u64, GroupError> {
        if let Some(e) = self.elements_cache.get() {
            return Ok(crate::par::sum_indexed(e.len() as u64, |i| u64::from(pred(&e[i as usize]))));
        }
        if let Some(shape) = &self.shape {
            let [lowers, levis, uppers] = shape.factors(budget)?;
            let nu = uppers.len() as u64;
            let lu = levis.len() as u64 * nu;
            let total = lowers.len() as u64 * lu;
            return Ok(crate::par::sum_indexed(total, |ix| {
                let l = &lowers[(ix / lu) as usize];
                let m = &levis[(ix % lu / nu) as usize];
                let u = &uppers[(ix % nu) as usize];
                u64::from(pred(&l.mul(m).mul(u)))
            }));
        }
        let elems = self.elements(budget)?;
        Ok(crate::par::sum_indexed(elems.len() as u64, |i| u64::from(pred(&elems[i as usize]))))
    }
}

/// Closure of a generating set under products (BFS rounds).
pub fn closure(
    generators: &[ResidueMatrix],
    ring: ResidueRing,
    n: usize,
    budget: u64,
) -> Result<Vec<ResidueMatrix>, GroupError> {
    let id = ResidueMatrix::identity(ring, n);
    let mut seen: HashSet<ResidueMatrix> = HashSet::new();
    seen.insert(id);
    let mut frontier = vec![id];
    while !frontier.is_empty() {
        let mut produced: Vec<ResidueMatrix> = crate::par::map_indexed(
            (frontier.len() * generators.len()) as u64,
            |ix| {
                frontier[(ix as usize) / generators.len()]
                    .mul(&generators[(ix as usize) % generators.len()])
            },
        );
        produced.sort_unstable();
        produced.dedup();
        let next: Vec<ResidueMatrix> = produced.into_iter().filter(|m| !seen.contains(m)).collect();
        for m in &next {
            seen.insert(*m);
        }
        if seen.len() as u64 > budget {
            return Err(GroupError::BudgetExceeded {
                predicted: seen.len() as u64,
                budget,
            });
        }
        frontier = next;
    }
    let mut v: Vec<ResidueMatrix> = seen.into_iter().collect();
    v.sort_unstable();
    Ok(v)
}

/// Left coset space G/K with an explicit transversal (transversal[0] = id).
pub struct CosetSpace {
    pub transversal: Vec<ResidueMatrix>,
    subgroup_membership: MemberFn,
}

impl CosetSpace {
    /// BFS over G-generators, identifying cosets by membership tests against
    /// K. Suitable for small index; aborts past `max_index`.
    pub fn by_bfs(g: &FiniteMatrixGroup, k: &FiniteMatrixGroup, max_index: u64) -> Result<CosetSpace, GroupError> {
        let gens = g.generators()?.to_vec();
        let id = ResidueMatrix::identity(g.ring(), g.n());
        let membership = k.membership_fn();
        let mut reps: Vec<ResidueMatrix> = vec![id];
        let mut rep_invs: Vec<ResidueMatrix> = vec![id];
        let mut head = 0;
        while head < reps.len() {
            let r = reps[head];
            head += 1;
            for s in &gens {
                let c = s.mul(&r);
                let known = rep_invs.iter().any(|ti| membership(&ti.mul(&c)));
                if !known {
                    rep_invs.push(c.invert().expect("coset representative is a unit"));
                    reps.push(c);
                    if reps.len() as u64 > max_index {
                        return Err(GroupError::IndexExceeded(max_index));
                    }
                }
            }
        }
        Ok(CosetSpace {
            transversal: reps,
            subgroup_membership: membership,
        })
    }

    /// From a known transversal (validated: pairwise distinct cosets).
    pub fn from_transversal(k: &FiniteMatrixGroup, transversal: Vec<ResidueMatrix>) -> CosetSpace {
        let membership = k.membership_fn();
        for (i, a) in transversal.iter().enumerate() {
            let ai = a.invert().unwrap();
            for b in transversal.iter().skip(i + 1) {
                assert!(!membership(&ai.mul(b)), "transversal elements share a coset");
            }
        }
        CosetSpace {
            transversal,
            subgroup_membership: membership,
        }
    }

    pub fn len(&self) -> usize {
        self.transversal.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transversal.is_empty()
    }

    /// Index of the coset xK.
    pub fn index_of(&self, x: &ResidueMatrix) -> Option<usize> {
        let xi = x.invert().ok()?;
        self.transversal
            .iter()
            .position(|t| (self.subgroup_membership)(&xi.mul(t)))
    }
}

/// A realization of a coset space G/K as an abstract point set with a left
/// G-action and a section back into G. Lets double-coset and Mackey
/// computations run on points when G is far beyond the enumeration budget.
pub trait CosetPoints {
    type Point: Clone + Eq + Ord + std::hash::Hash + Send + Sync + 'static;
    fn all_points(&self) -> Vec<Self::Point>;
    /// Left translation: the point of h·(coset of x).
    fn translate(&self, h: &ResidueMatrix, x: &Self::Point) -> Self::Point;
    /// A group element g whose coset is x.
    fn section(&self, x: &Self::Point) -> ResidueMatrix;
}

impl CosetPoints for CosetSpace {
    type Point = usize;

    fn all_points(&self) -> Vec<usize> {
        (0..self.len()).collect()
    }

    fn translate(&self, h: &ResidueMatrix, x: &usize) -> usize {
        self.index_of(&h.mul(&self.transversal[*x]))
            .expect("translation leaves the coset space")
    }

    fn section(&self, x: &usize) -> ResidueMatrix {
        self.transversal[*x]
    }
}

/// One double coset H·g·K, produced as an H-orbit on the points of G/K.
pub struct DoubleCoset {
    /// section of the seed point: a representative of the double coset
    pub rep: ResidueMatrix,
    pub orbit_size: u64,
    /// Schreier generators of Stab_H(seed) = H ∩ rep·K·rep⁻¹
    pub stabilizer_generators: Vec<ResidueMatrix>,
}

/// Decompose G/K into H-orbits: the double cosets H\G/K. Seeds are taken in
/// sorted point order, so the output is deterministic. The partition
/// identity Σ |orbit| = |G/K| is asserted.
pub fn double_cosets_on<C: CosetPoints>(h: &Arc<FiniteMatrixGroup>, cosets: &C) -> Vec<DoubleCoset> {
    let gens = h.generators().expect("H needs generators").to_vec();
    let mut points = cosets.all_points();
    points.sort_unstable();
    let total = points.len() as u64;
    let mut seen: HashSet<C::Point> = HashSet::new();
    let mut out = Vec::new();
    for seed in points {
        if seen.contains(&seed) {
            continue;
        }
        // BFS orbit with transversal
        let id = ResidueMatrix::identity(h.ring(), h.n());
        let mut order: Vec<C::Point> = vec![seed.clone()];
        let mut trans: HashMap<C::Point, ResidueMatrix> = HashMap::new();
        trans.insert(seed.clone(), id);
        let mut head = 0;
        while head < order.len() {
            let y = order[head].clone();
            let ty = trans[&y];
            head += 1;
            for s in &gens {
                let z = cosets.translate(s, &y);
                if !trans.contains_key(&z) {
                    trans.insert(z.clone(), s.mul(&ty));
                    order.push(z);
                }
            }
        }
        let mut schreier = Vec::new();
        for y in &order {
            let ty = trans[y];
            for s in &gens {
                let z = cosets.translate(s, y);
                let tz = trans[&z];
                let gen = tz.invert().unwrap().mul(s).mul(&ty);
                if !gen.is_identity() {
                    schreier.push(gen);
                }
            }
        }
        schreier.sort_unstable();
        schreier.dedup();
        for y in &order {
            seen.insert(y.clone());
        }
        out.push(DoubleCoset {
            rep: cosets.section(&seed),
            orbit_size: order.len() as u64,
            stabilizer_generators: schreier,
        });
    }
    assert_eq!(
        out.iter().map(|d| d.orbit_size).sum::<u64>(),
        total,
        "double cosets must partition the coset space"
    );
    out
}

/// A left action of a matrix group on an abstract point set.
pub struct GroupAction<P> {
    pub group: Arc<FiniteMatrixGroup>,
    act: Arc<dyn Fn(&ResidueMatrix, &P) -> P + Send + Sync>,
}

impl<P: Clone + Eq + Ord + std::hash::Hash + Send + Sync + 'static> GroupAction<P> {
    pub fn new(
        group: Arc<FiniteMatrixGroup>,
        act: impl Fn(&ResidueMatrix, &P) -> P + Send + Sync + 'static,
    ) -> Self {
        GroupAction {
            group,
            act: Arc::new(act),
        }
    }

    pub fn apply(&self, g: &ResidueMatrix, x: &P) -> P {
        (self.act)(g, x)
    }

    /// Orbit of x with a transversal: for each point y an element t with
    /// t·x = y. BFS over generators, deterministic order.
    pub fn orbit_transversal(&self, x: &P) -> (Vec<P>, HashMap<P, ResidueMatrix>) {
        let gens = self.group.generators().expect("action group needs generators");
        let id = ResidueMatrix::identity(self.group.ring(), self.group.n());
        let mut order: Vec<P> = vec![x.clone()];
        let mut trans: HashMap<P, ResidueMatrix> = HashMap::new();
        trans.insert(x.clone(), id);
        let mut head = 0;
        while head < order.len() {
            let y = order[head].clone();
            let ty = trans[&y];
            head += 1;
            for s in gens {
                let z = (self.act)(s, &y);
                if !trans.contains_key(&z) {
                    trans.insert(z.clone(), s.mul(&ty));
                    order.push(z);
                }
            }
        }
        (order, trans)
    }

    pub fn orbit(&self, x: &P) -> Vec<P> {
        self.orbit_transversal(x).0
    }

    /// Orbit and stabilizer; the stabilizer comes back as a predicate group
    /// with Schreier generators derived from the orbit transversal. When the
    /// acting group's order is known, |orbit| must divide it (asserted).
    pub fn orbit_stabilizer(&self, x: &P) -> (Vec<P>, FiniteMatrixGroup) {
        let (orbit, trans) = self.orbit_transversal(x);
        let gens = self.group.generators().expect("action group needs generators");
        let mut schreier: Vec<ResidueMatrix> = Vec::new();
        for y in &orbit {
            let ty = trans[y];
            for s in gens {
                let z = (self.act)(s, y);
                let tz = trans[&z];
                let gen = tz.invert().unwrap().mul(s).mul(&ty);
                if !gen.is_identity() {
                    assert!((self.act)(&gen, x) == *x, "Schreier generator must fix the point");
                    schreier.push(gen);
                }
            }
        }
        schreier.sort_unstable();
        schreier.dedup();
        let order_hint = self.group.predicted_order().map(|o| {
            assert_eq!(o % orbit.len() as u64, 0, "orbit size must divide |G|");
            o / orbit.len() as u64
        });
        let act = Arc::clone(&self.act);
        let group = Arc::clone(&self.group);
        let x0 = x.clone();
        let stab = FiniteMatrixGroup::from_membership(
            self.group.ring(),
            self.group.n(),
            format!("Stab_{}", self.group.name()),
            Arc::new(move |g| group.contains(g) && (act)(g, &x0) == x0),
            Some(schreier),
            order_hint,
        );
        (orbit, stab)
    }

    /// Partition a point set into orbits; seeds taken in sorted order.
    pub fn orbits(&self, points: &[P]) -> Vec<Vec<P>> {
        let mut sorted: Vec<&P> = points.iter().collect();
        sorted.sort();
        let mut seen: HashSet<P> = HashSet::new();
        let mut out = Vec::new();
        for p in sorted {
            if seen.contains(p) {
                continue;
            }
            let orb = self.orbit(p);
            for y in &orb {
                seen.insert(y.clone());
            }
            out.push(orb);
        }
        out
    }
}

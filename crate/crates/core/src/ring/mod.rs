//! Finite commutative local principal rings of odd order.
//!
//! A [`Ring`] of order `q^n` stores its elements as dense indices in
//! `[0, q^n)`. Internally every family is a truncated polynomial ring
//! `((Z/P)[t]/(f))[u]/(u^m)` where either `P = p` (truncated family, `m = n`)
//! or `m = 1` (integer and Galois families, `P = p^n`). An index is the
//! mixed-radix code of the `m * r` coefficients in base `P`, lowest first.

mod poly;
mod spec;
mod structure;

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, OnceLock};

pub use spec::{Family, RingSpec, MAX_RING_SIZE};
pub use structure::{QuotientMap, SquareClass};

use crate::error::{Error, Result};

/// Rings up to this order get materialized add/mul tables.
pub const TABLE_THRESHOLD: u32 = 512;

const MAX_DIGITS: usize = 20;
type Digits = [u64; MAX_DIGITS];

/// Identifies the ring an [`Elem`] belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RingTag(u32);

/// A ring element: a dense index plus the tag of its ring.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Elem {
    index: u32,
    tag: RingTag,
}

impl Elem {
    #[inline]
    pub fn index(self) -> u32 {
        self.index
    }

    #[inline]
    pub fn tag(self) -> RingTag {
        self.tag
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.index)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Mul,
    Neg,
    Inv,
}

#[derive(Clone, Debug)]
pub(crate) struct Tables {
    pub(crate) add: Vec<u32>,
    pub(crate) mul: Vec<u32>,
    pub(crate) neg: Vec<u32>,
}

#[derive(Clone, Debug)]
pub struct Ring {
    spec: RingSpec,
    tag: RingTag,
    q: u32,
    size: u32,
    /// Coefficient modulus `P`.
    base: u64,
    /// Extension degree `r`.
    ext: usize,
    /// Number of `u`-layers `m`.
    layers: usize,
    /// Lifted modulus `f`, lowest first, length `r + 1`.
    modulus: Vec<u64>,
    tables: Option<Tables>,
    inv: Vec<u32>,
    valuation: Vec<u8>,
    radical_generator: u32,
    teichmuller_gen: u32,
    /// Residue index -> Teichmüller representative.
    teichmuller: Vec<u32>,
    quotients: Vec<OnceLock<Arc<Ring>>>,
}

const NO_INVERSE: u32 = u32::MAX;

impl Ring {
    pub fn build(spec: &RingSpec) -> Result<Ring> {
        let spec = spec.validate()?;
        let p = spec.p as u64;
        let q = p.pow(spec.r);
        let size = q.pow(spec.n);
        let (base, layers) = match spec.family {
            Family::TruncatedPolynomialOverField => (p, spec.n as usize),
            Family::IntegersModPn | Family::GaloisRing => (p.pow(spec.n), 1),
        };
        let modulus = match &spec.modulus {
            Some(f) => f.iter().map(|&c| c as u64).collect(),
            None => vec![0, 1],
        };
        let mut hasher = std::collections::hash_map::DefaultHasher::new();
        spec.hash(&mut hasher);
        let tag = RingTag(hasher.finish() as u32);

        let mut ring = Ring {
            tag,
            q: q as u32,
            size: size as u32,
            base,
            ext: spec.r as usize,
            layers,
            modulus,
            tables: None,
            inv: Vec::new(),
            valuation: Vec::new(),
            radical_generator: 0,
            teichmuller_gen: 0,
            teichmuller: Vec::new(),
            quotients: (0..=spec.n).map(|_| OnceLock::new()).collect(),
            spec,
        };
        ring.valuation = (0..ring.size)
            .map(|i| ring.valuation_of_digits(&ring.decode(i)))
            .collect();
        ring.radical_generator = ring.x_pow_index(1);
        if ring.size <= TABLE_THRESHOLD {
            ring.tables = Some(ring.compute_tables());
            let mul = &ring.tables.as_ref().unwrap().mul;
            let n = ring.size as usize;
            let mut inv = vec![NO_INVERSE; n];
            for a in 0..n {
                if inv[a] == NO_INVERSE && ring.valuation[a] == 0 {
                    let b = (0..n)
                        .find(|&b| mul[a * n + b] == 1)
                        .expect("units are invertible");
                    inv[a] = b as u32;
                    inv[b] = a as u32;
                }
            }
            ring.inv = inv;
        }
        ring.teichmuller_gen = ring.find_teichmuller_gen();
        ring.teichmuller = ring.teichmuller_table();
        Ok(ring)
    }

    pub fn spec(&self) -> &RingSpec {
        &self.spec
    }

    pub fn family(&self) -> Family {
        self.spec.family
    }

    pub fn p(&self) -> u32 {
        self.spec.p
    }

    pub fn r(&self) -> u32 {
        self.spec.r
    }

    /// Radical length: `J^n = 0`, `J^(n-1) != 0`.
    pub fn n(&self) -> u32 {
        self.spec.n
    }

    /// Order of the residue field.
    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn size(&self) -> u32 {
        self.size
    }

    pub fn tag(&self) -> RingTag {
        self.tag
    }

    pub fn is_field(&self) -> bool {
        self.spec.n == 1
    }

    pub fn has_tables(&self) -> bool {
        self.tables.is_some()
    }

    pub(crate) fn tables(&self) -> Option<&Tables> {
        self.tables.as_ref()
    }

    pub fn owns(&self, e: Elem) -> bool {
        e.tag == self.tag && e.index < self.size
    }

    pub fn elem(&self, index: u64) -> Result<Elem> {
        if index < self.size as u64 {
            Ok(Elem {
                index: index as u32,
                tag: self.tag,
            })
        } else {
            Err(Error::IndexOutOfRange {
                index,
                size: self.size,
            })
        }
    }

    /// Like [`Ring::elem`] but panics on an out-of-range index.
    #[inline]
    pub fn at(&self, index: u32) -> Elem {
        assert!(
            index < self.size,
            "index {index} out of range for ring of size {}",
            self.size
        );
        Elem {
            index,
            tag: self.tag,
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> + '_ {
        (0..self.size).map(move |i| self.at(i))
    }

    pub fn zero(&self) -> Elem {
        self.at(0)
    }

    pub fn one(&self) -> Elem {
        self.at(1)
    }

    /// The image of an integer under `Z -> R`.
    pub fn from_int(&self, k: i64) -> Elem {
        let v = k.rem_euclid(self.base as i64) as u64;
        let mut d = [0; MAX_DIGITS];
        d[0] = v;
        self.at(self.encode(&d))
    }

    #[inline]
    fn ix(&self, e: Elem) -> u32 {
        assert_eq!(e.tag, self.tag, "element from a different ring");
        e.index
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        let (a, b) = (self.ix(a), self.ix(b));
        self.at(self.add_idx(a, b))
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        let (a, b) = (self.ix(a), self.ix(b));
        self.at(self.add_idx(a, self.neg_idx(b)))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        let (a, b) = (self.ix(a), self.ix(b));
        self.at(self.mul_idx(a, b))
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        let a = self.ix(a);
        self.at(self.neg_idx(a))
    }

    pub fn inv(&self, a: Elem) -> Result<Elem> {
        let i = self.ix(a);
        self.inv_idx(i)
            .map(|j| self.at(j))
            .ok_or(Error::NotAUnit(i))
    }

    pub fn pow(&self, a: Elem, e: u64) -> Elem {
        let a = self.ix(a);
        self.at(self.pow_idx(a, e))
    }

    /// Checked entry point: validates ring membership and arity.
    pub fn arith(&self, op: ArithOp, a: Elem, b: Option<Elem>) -> Result<Elem> {
        if !self.owns(a) || b.is_some_and(|b| !self.owns(b)) {
            return Err(Error::RingMismatch);
        }
        let binary = |b: Option<Elem>| {
            b.ok_or_else(|| Error::InvalidParams(format!("{op:?} needs two operands")))
        };
        match op {
            ArithOp::Add => Ok(self.add(a, binary(b)?)),
            ArithOp::Mul => Ok(self.mul(a, binary(b)?)),
            ArithOp::Neg => Ok(self.neg(a)),
            ArithOp::Inv => self.inv(a),
        }
    }

    /// Largest `k` with `e ∈ J^k`; `0` for units and `n` for zero.
    #[inline]
    pub fn valuation(&self, e: Elem) -> u32 {
        self.valuation[self.ix(e) as usize] as u32
    }

    #[inline]
    pub fn is_unit(&self, e: Elem) -> bool {
        self.valuation(e) == 0
    }

    pub fn unit_count(&self) -> u32 {
        self.size - self.size / self.q
    }

    /// The generator `x` of the radical.
    pub fn radical_generator(&self) -> Elem {
        self.at(self.radical_generator)
    }

    /// `x^k`; zero for `k >= n`.
    pub fn x_pow(&self, k: u32) -> Elem {
        self.at(self.x_pow_index(k))
    }

    /// The Teichmüller generator `g`: `g^q = g` and its residue generates
    /// `GF(q)^*`.
    pub fn teichmuller_gen(&self) -> Elem {
        self.at(self.teichmuller_gen)
    }

    /// Elements of `J^k`, in index order.
    pub fn ideal_power(&self, k: u32) -> impl Iterator<Item = Elem> + '_ {
        self.elements().filter(move |&e| self.valuation(e) >= k)
    }

    /// Index of the residue of `e` in `GF(q)` (the encoding used by
    /// the residue field `quotient(1)`).
    pub fn residue_index(&self, e: Elem) -> u32 {
        let d = self.decode(self.ix(e));
        let p = self.spec.p as u64;
        (0..self.ext).rev().fold(0u64, |acc, j| acc * p + d[j] % p) as u32
    }

    /// Canonical lift of a residue index: layer-0 coefficients below `p`.
    pub fn lift_residue(&self, residue: u32) -> Elem {
        assert!(residue < self.q, "residue index out of range");
        let mut d = [0; MAX_DIGITS];
        let mut c = residue as u64;
        for digit in d.iter_mut().take(self.ext) {
            *digit = c % self.spec.p as u64;
            c /= self.spec.p as u64;
        }
        self.at(self.encode(&d))
    }

    /// The Teichmüller representative with the given residue.
    pub fn teichmuller_lift(&self, residue: u32) -> Elem {
        self.at(self.teichmuller[residue as usize])
    }

    /// The set `{0, g, g^2, ..., g^(q-1)}`, ordered by residue index.
    pub fn teichmuller_set(&self) -> impl Iterator<Item = Elem> + '_ {
        self.teichmuller.iter().map(move |&i| self.at(i))
    }

    /// Canonical `y` with `x^k * y = e`, or `None` if `e ∉ J^k`. The result
    /// has coordinates only below layer `n - k`, so it is the section of its
    /// image in `R/J^(n-k)`.
    pub fn div_by_x_pow(&self, e: Elem, k: u32) -> Option<Elem> {
        if self.valuation(e) < k {
            return None;
        }
        let d = self.decode(e.index);
        let mut out = [0; MAX_DIGITS];
        if self.layers > 1 {
            let shift = k as usize * self.ext;
            let len = self.layers * self.ext;
            out[..len - shift].copy_from_slice(&d[shift..len]);
        } else {
            let pk = (self.spec.p as u64).pow(k);
            for j in 0..self.ext {
                out[j] = d[j] / pk;
            }
        }
        Some(self.at(self.encode(&out)))
    }

    // ---- raw index arithmetic ----

    #[inline]
    pub(crate) fn add_idx(&self, a: u32, b: u32) -> u32 {
        match &self.tables {
            Some(t) => t.add[(a * self.size + b) as usize],
            None => self.add_digits(a, b),
        }
    }

    #[inline]
    pub(crate) fn mul_idx(&self, a: u32, b: u32) -> u32 {
        match &self.tables {
            Some(t) => t.mul[(a * self.size + b) as usize],
            None => self.mul_digits(a, b),
        }
    }

    #[inline]
    pub(crate) fn neg_idx(&self, a: u32) -> u32 {
        match &self.tables {
            Some(t) => t.neg[a as usize],
            None => self.neg_digits(a),
        }
    }

    pub(crate) fn inv_idx(&self, a: u32) -> Option<u32> {
        if self.valuation[a as usize] != 0 {
            return None;
        }
        if !self.inv.is_empty() {
            return Some(self.inv[a as usize]);
        }
        Some(self.pow_idx(a, self.unit_count() as u64 - 1))
    }

    pub(crate) fn pow_idx(&self, a: u32, mut e: u64) -> u32 {
        let (mut base, mut acc) = (a, 1);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_idx(acc, base);
            }
            base = self.mul_idx(base, base);
            e >>= 1;
        }
        acc
    }

    fn x_pow_index(&self, k: u32) -> u32 {
        if k >= self.spec.n {
            return 0;
        }
        let mut d = [0; MAX_DIGITS];
        if self.layers > 1 {
            d[k as usize * self.ext] = 1;
        } else {
            d[0] = (self.spec.p as u64).pow(k);
        }
        self.encode(&d)
    }

    // ---- coefficient arithmetic ----

    fn digit_count(&self) -> usize {
        self.layers * self.ext
    }

    fn decode(&self, mut idx: u32) -> Digits {
        let mut d = [0; MAX_DIGITS];
        for digit in d.iter_mut().take(self.digit_count()) {
            *digit = idx as u64 % self.base;
            idx = (idx as u64 / self.base) as u32;
        }
        d
    }

    fn encode(&self, d: &Digits) -> u32 {
        (0..self.digit_count())
            .rev()
            .fold(0u64, |acc, k| acc * self.base + d[k]) as u32
    }

    fn valuation_of_digits(&self, d: &Digits) -> u8 {
        let n = self.spec.n;
        let p = self.spec.p as u64;
        let mut best = n;
        for (k, &c) in d.iter().enumerate().take(self.digit_count()) {
            if c == 0 {
                continue;
            }
            let mut v = (k / self.ext) as u32;
            let mut c = c;
            while c % p == 0 {
                c /= p;
                v += 1;
            }
            best = best.min(v);
        }
        best as u8
    }

    fn add_digits(&self, a: u32, b: u32) -> u32 {
        let (x, y) = (self.decode(a), self.decode(b));
        let mut z = [0; MAX_DIGITS];
        for k in 0..self.digit_count() {
            z[k] = (x[k] + y[k]) % self.base;
        }
        self.encode(&z)
    }

    fn neg_digits(&self, a: u32) -> u32 {
        let x = self.decode(a);
        let mut z = [0; MAX_DIGITS];
        for k in 0..self.digit_count() {
            z[k] = (self.base - x[k]) % self.base;
        }
        self.encode(&z)
    }

    fn mul_digits(&self, a: u32, b: u32) -> u32 {
        let (x, y) = (self.decode(a), self.decode(b));
        let (r, m, big) = (self.ext, self.layers, self.base);
        let mut z = [0; MAX_DIGITS];
        for i1 in 0..m {
            for i2 in 0..m - i1 {
                let mut prod = [0u64; 2 * MAX_DIGITS];
                for j1 in 0..r {
                    let c1 = x[i1 * r + j1];
                    if c1 == 0 {
                        continue;
                    }
                    for j2 in 0..r {
                        prod[j1 + j2] = (prod[j1 + j2] + c1 * y[i2 * r + j2]) % big;
                    }
                }
                // reduce modulo the monic f
                for deg in (r..2 * r - 1).rev() {
                    let c = prod[deg];
                    if c == 0 {
                        continue;
                    }
                    prod[deg] = 0;
                    for j in 0..r {
                        let t = c * self.modulus[j] % big;
                        prod[deg - r + j] = (prod[deg - r + j] + big - t) % big;
                    }
                }
                let layer = (i1 + i2) * r;
                for j in 0..r {
                    z[layer + j] = (z[layer + j] + prod[j]) % big;
                }
            }
        }
        self.encode(&z)
    }

    fn compute_tables(&self) -> Tables {
        let n = self.size;
        let mut add = Vec::with_capacity((n * n) as usize);
        let mut mul = Vec::with_capacity((n * n) as usize);
        for a in 0..n {
            for b in 0..n {
                add.push(self.add_digits(a, b));
                mul.push(self.mul_digits(a, b));
            }
        }
        let neg = (0..n).map(|a| self.neg_digits(a)).collect();
        Tables { add, mul, neg }
    }

    /// Overwrites one multiplication-table entry. Used to check that the
    /// self-test suites detect a broken ring.
    #[doc(hidden)]
    pub fn corrupt_mul_entry(&mut self, a: u32, b: u32, value: u32) {
        let n = self.size;
        if let Some(t) = self.tables.as_mut() {
            t.mul[(a * n + b) as usize] = value % n;
        }
    }
}

impl PartialEq for Ring {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec
    }
}

impl Eq for Ring {}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.spec)
    }
}

//! Radical structure: Teichmüller coordinates, square roots in `1 + J`,
//! square classes of the residue field and the quotients `R/J^k`.

use std::sync::Arc;

use super::{poly, Digits, Elem, Ring, MAX_DIGITS};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SquareClass {
    Square,
    NonSquare,
}

/// Sizes of `J` up to which square roots are found by exhaustive search.
const EXHAUSTIVE_SQRT_LIMIT: u32 = 4096;

impl Ring {
    pub(super) fn find_teichmuller_gen(&self) -> u32 {
        let q = self.q as u64;
        let factors = poly::prime_factors(q - 1);
        let one = self.one();
        let generator = (1..self.q)
            .map(|i| self.lift_residue(i))
            .find(|&s| {
                factors
                    .iter()
                    .all(|&l| self.residue_index(self.pow(s, (q - 1) / l)) != one.index)
            })
            .expect("GF(q)^* is cyclic");
        // s -> s^q converges to the Teichmüller lift within n steps
        let mut t = generator;
        loop {
            let next = self.pow(t, q);
            if next == t {
                return t.index;
            }
            t = next;
        }
    }

    pub(super) fn teichmuller_table(&self) -> Vec<u32> {
        let g = self.teichmuller_gen();
        let mut table = vec![0; self.q as usize];
        let mut cur = self.one();
        for _ in 0..self.q - 1 {
            table[self.residue_index(cur) as usize] = cur.index;
            cur = self.mul(cur, g);
        }
        table
    }

    /// The unique `λ_0, ..., λ_(n-1)` from the Teichmüller set with
    /// `e = Σ λ_i x^i`.
    pub fn teichmuller_coords(&self, e: Elem) -> Vec<Elem> {
        let mut rem = e;
        (0..self.n())
            .map(|i| {
                let y = self.div_by_x_pow(rem, i).expect("remainder lies in J^i");
                let lambda = self.teichmuller_lift(self.residue_index(y));
                rem = self.sub(rem, self.mul(lambda, self.x_pow(i)));
                lambda
            })
            .collect()
    }

    pub fn from_teichmuller_coords(&self, coords: &[Elem]) -> Result<Elem> {
        if coords.len() != self.n() as usize {
            return Err(Error::InvalidParams(format!(
                "expected {} coordinates, got {}",
                self.n(),
                coords.len()
            )));
        }
        if coords.iter().any(|&c| !self.owns(c)) {
            return Err(Error::RingMismatch);
        }
        Ok(coords.iter().enumerate().fold(self.zero(), |acc, (i, &c)| {
            self.add(acc, self.mul(c, self.x_pow(i as u32)))
        }))
    }

    /// `1 + x` with `x ∈ J` and `(1 + x)^2 = 1 + j`.
    pub fn sqrt_one_plus_j(&self, j: Elem) -> Result<Elem> {
        if self.size / self.q <= EXHAUSTIVE_SQRT_LIMIT {
            self.sqrt_one_plus_j_exhaustive(j)
        } else {
            self.sqrt_one_plus_j_newton(j)
        }
    }

    /// Searches `J` for the unique root of `x^2 + 2x = j`.
    pub fn sqrt_one_plus_j_exhaustive(&self, j: Elem) -> Result<Elem> {
        if self.valuation(j) < 1 {
            return Err(Error::NotInRadical(j.index()));
        }
        let two = self.from_int(2);
        self.ideal_power(1)
            .find(|&x| self.add(self.mul(x, x), self.mul(two, x)) == j)
            .map(|x| self.add(self.one(), x))
            .ok_or(Error::NotInRadical(j.index()))
    }

    /// Newton iteration `x <- x - (x^2 + 2x - j) / (2 + 2x)` from `x = 0`.
    pub fn sqrt_one_plus_j_newton(&self, j: Elem) -> Result<Elem> {
        if self.valuation(j) < 1 {
            return Err(Error::NotInRadical(j.index()));
        }
        let two = self.from_int(2);
        let mut x = self.zero();
        for _ in 0..=2 * self.n() + 2 {
            let fx = self.sub(self.add(self.mul(x, x), self.mul(two, x)), j);
            if fx == self.zero() {
                return Ok(self.add(self.one(), x));
            }
            let slope = self.inv(self.add(two, self.mul(two, x)))?;
            x = self.sub(x, self.mul(fx, slope));
        }
        unreachable!("Newton iteration on J converges in O(log n) steps")
    }

    fn field_unit_check(&self, u: Elem) -> Result<()> {
        if !self.is_field() {
            return Err(Error::NotAField(self.n()));
        }
        if u == self.zero() {
            return Err(Error::ZeroArgument);
        }
        Ok(())
    }

    /// Square class in `GF(q)` by the parity of the discrete log base `g`.
    pub fn square_class_by_log(&self, u: Elem) -> Result<SquareClass> {
        self.field_unit_check(u)?;
        let g = self.teichmuller_gen();
        let mut cur = self.one();
        for k in 0..self.q {
            if cur == u {
                return Ok(if k % 2 == 0 {
                    SquareClass::Square
                } else {
                    SquareClass::NonSquare
                });
            }
            cur = self.mul(cur, g);
        }
        unreachable!("g generates the unit group")
    }

    /// Square class in `GF(q)` by Euler's criterion `u^((q-1)/2) = 1`.
    pub fn square_class_by_euler(&self, u: Elem) -> Result<SquareClass> {
        self.field_unit_check(u)?;
        Ok(self.euler(u))
    }

    pub fn square_class(&self, u: Elem) -> Result<SquareClass> {
        let class = self.square_class_by_euler(u)?;
        debug_assert_eq!(Ok(class), self.square_class_by_log(u));
        Ok(class)
    }

    /// Square class of the residue of a unit `u` in the residue field.
    pub fn residue_square_class(&self, u: Elem) -> Result<SquareClass> {
        if self.residue_index(u) == 0 {
            return Err(Error::ZeroArgument);
        }
        Ok(self.euler(u))
    }

    fn euler(&self, u: Elem) -> SquareClass {
        let t = self.pow(u, (self.q as u64 - 1) / 2);
        if self.residue_index(t) == 1 {
            SquareClass::Square
        } else {
            SquareClass::NonSquare
        }
    }

    /// The lexicographically least `(a, b)` by index with `a^2 + b^2 = -1`
    /// and `a` a unit.
    pub fn find_sum_of_squares_minus_one(&self) -> (Elem, Elem) {
        let minus_one = self.neg(self.one());
        let squares: Vec<Elem> = self.elements().map(|b| self.mul(b, b)).collect();
        for a in self.elements().filter(|&a| self.is_unit(a)) {
            let target = self.sub(minus_one, self.mul(a, a));
            if let Some(b) = squares.iter().position(|&s| s == target) {
                return (a, self.at(b as u32));
            }
        }
        unreachable!("-1 is a sum of two squares in every finite ring of odd order")
    }

    /// `R/J^k` together with the projection and its canonical section.
    pub fn quotient(&self, k: u32) -> Result<QuotientMap<'_>> {
        if k < 1 || k > self.n() {
            return Err(Error::InvalidK { k, n: self.n() });
        }
        let target = self.quotients[k as usize]
            .get_or_init(|| {
                let mut spec = self.spec.clone();
                spec.n = k;
                Arc::new(Ring::build(&spec).expect("quotient of a valid ring is valid"))
            })
            .clone();
        Ok(QuotientMap {
            parent: self,
            target,
            k,
        })
    }

    pub fn residue_field(&self) -> Arc<Ring> {
        self.quotient(1).expect("n >= 1").target
    }
}

/// The canonical projection `R -> R/J^k`.
#[derive(Clone, Debug)]
pub struct QuotientMap<'a> {
    parent: &'a Ring,
    target: Arc<Ring>,
    k: u32,
}

impl<'a> QuotientMap<'a> {
    pub fn ring(&self) -> &Ring {
        &self.target
    }

    pub fn ring_arc(&self) -> Arc<Ring> {
        self.target.clone()
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn project(&self, e: Elem) -> Elem {
        let parent = self.parent;
        let d = parent.decode(parent.ix(e));
        let mut out: Digits = [0; MAX_DIGITS];
        let count = self.target.digit_count();
        out[..count].copy_from_slice(&d[..count]);
        if parent.layers == 1 {
            for c in out.iter_mut().take(count) {
                *c %= self.target.base;
            }
        }
        self.target.at(self.target.encode(&out))
    }

    /// The lift of `e` whose coordinates above length `k` vanish.
    pub fn section(&self, e: Elem) -> Elem {
        let d = self.target.decode(self.target.ix(e));
        self.parent.at(self.parent.encode(&d))
    }
}

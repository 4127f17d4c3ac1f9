//! 2×2 matrices over a [`Ring`].

mod word;

use std::fmt;

pub use word::{ElementaryWord, Factor};

use crate::error::{Error, Result};
use crate::ring::{Elem, Ring};

/// The matrix `[[a, b], [c, d]]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mat {
    pub a: Elem,
    pub b: Elem,
    pub c: Elem,
    pub d: Elem,
}

impl Mat {
    pub fn entries(&self) -> [Elem; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn indices(&self) -> [u32; 4] {
        self.entries().map(Elem::index)
    }
}

impl fmt::Display for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{},{}],[{},{}]]", self.a, self.b, self.c, self.d)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatOp {
    Add,
    Mul,
    Neg,
}

/// `M_2(R)` for a borrowed ring.
#[derive(Clone, Copy, Debug)]
pub struct MatRing<'r> {
    ring: &'r Ring,
}

impl Ring {
    pub fn matrices(&self) -> MatRing<'_> {
        MatRing { ring: self }
    }
}

impl<'r> MatRing<'r> {
    pub fn ring(&self) -> &'r Ring {
        self.ring
    }

    pub fn from_indices(&self, [a, b, c, d]: [u32; 4]) -> Result<Mat> {
        let r = self.ring;
        Ok(Mat {
            a: r.elem(a as u64)?,
            b: r.elem(b as u64)?,
            c: r.elem(c as u64)?,
            d: r.elem(d as u64)?,
        })
    }

    /// Panicking variant of [`MatRing::from_indices`].
    pub fn at(&self, idx: [u32; 4]) -> Mat {
        self.from_indices(idx).expect("matrix entries in range")
    }

    pub fn owns(&self, m: &Mat) -> bool {
        m.entries().iter().all(|&e| self.ring.owns(e))
    }

    fn check(&self, m: &Mat) -> Result<()> {
        if self.owns(m) {
            Ok(())
        } else {
            Err(Error::RingMismatch)
        }
    }

    pub fn scalar(&self, e: Elem) -> Mat {
        let z = self.ring.zero();
        Mat {
            a: e,
            b: z,
            c: z,
            d: e,
        }
    }

    pub fn identity(&self) -> Mat {
        self.scalar(self.ring.one())
    }

    pub fn zero(&self) -> Mat {
        self.scalar(self.ring.zero())
    }

    /// `U(t) = I + t E_12`.
    pub fn upper(&self, t: Elem) -> Mat {
        Mat {
            b: t,
            ..self.identity()
        }
    }

    /// `L(s) = I + s E_21`.
    pub fn lower(&self, s: Elem) -> Mat {
        Mat {
            c: s,
            ..self.identity()
        }
    }

    pub fn diag(&self, x: Elem, y: Elem) -> Mat {
        Mat {
            a: x,
            d: y,
            ..self.zero()
        }
    }

    pub fn is_scalar(&self, m: &Mat) -> bool {
        m.b == self.ring.zero() && m.c == self.ring.zero() && m.a == m.d
    }

    pub fn all(&self) -> impl Iterator<Item = Mat> + '_ {
        let n = self.ring.size() as u64;
        (0..n.pow(4)).map(move |k| {
            self.at([
                (k / (n * n * n)) as u32,
                (k / (n * n) % n) as u32,
                (k / n % n) as u32,
                (k % n) as u32,
            ])
        })
    }

    pub fn add(&self, x: &Mat, y: &Mat) -> Mat {
        let r = self.ring;
        Mat {
            a: r.add(x.a, y.a),
            b: r.add(x.b, y.b),
            c: r.add(x.c, y.c),
            d: r.add(x.d, y.d),
        }
    }

    pub fn sub(&self, x: &Mat, y: &Mat) -> Mat {
        self.add(x, &self.neg(y))
    }

    pub fn neg(&self, x: &Mat) -> Mat {
        let r = self.ring;
        Mat {
            a: r.neg(x.a),
            b: r.neg(x.b),
            c: r.neg(x.c),
            d: r.neg(x.d),
        }
    }

    pub fn mul(&self, x: &Mat, y: &Mat) -> Mat {
        let r = self.ring;
        let dot = |p: Elem, q: Elem, s: Elem, t: Elem| r.add(r.mul(p, q), r.mul(s, t));
        Mat {
            a: dot(x.a, y.a, x.b, y.c),
            b: dot(x.a, y.b, x.b, y.d),
            c: dot(x.c, y.a, x.d, y.c),
            d: dot(x.c, y.b, x.d, y.d),
        }
    }

    pub fn scale(&self, e: Elem, x: &Mat) -> Mat {
        let r = self.ring;
        Mat {
            a: r.mul(e, x.a),
            b: r.mul(e, x.b),
            c: r.mul(e, x.c),
            d: r.mul(e, x.d),
        }
    }

    pub fn pow(&self, x: &Mat, k: u32) -> Mat {
        (0..k).fold(self.identity(), |acc, _| self.mul(&acc, x))
    }

    /// Checked arithmetic; `Neg` ignores `y`.
    pub fn arith(&self, op: MatOp, x: &Mat, y: Option<&Mat>) -> Result<Mat> {
        self.check(x)?;
        if let Some(y) = y {
            self.check(y)?;
        }
        let rhs = || y.ok_or_else(|| Error::InvalidParams(format!("{op:?} needs two operands")));
        Ok(match op {
            MatOp::Add => self.add(x, rhs()?),
            MatOp::Mul => self.mul(x, rhs()?),
            MatOp::Neg => self.neg(x),
        })
    }

    pub fn try_scale(&self, e: Elem, x: &Mat) -> Result<Mat> {
        self.check(x)?;
        if !self.ring.owns(e) {
            return Err(Error::RingMismatch);
        }
        Ok(self.scale(e, x))
    }

    pub fn det(&self, x: &Mat) -> Elem {
        let r = self.ring;
        r.sub(r.mul(x.a, x.d), r.mul(x.b, x.c))
    }

    pub fn trace(&self, x: &Mat) -> Elem {
        self.ring.add(x.a, x.d)
    }

    pub fn is_invertible(&self, x: &Mat) -> bool {
        self.ring.is_unit(self.det(x))
    }

    /// Adjugate divided by the determinant.
    pub fn inverse(&self, x: &Mat) -> Result<Mat> {
        self.check(x)?;
        let r = self.ring;
        let det_inv = r.inv(self.det(x)).map_err(|_| Error::NotInvertible)?;
        let adj = Mat {
            a: x.d,
            b: r.neg(x.b),
            c: r.neg(x.c),
            d: x.a,
        };
        Ok(self.scale(det_inv, &adj))
    }

    /// `[[x, y], [z, w]]` is nilpotent iff `x + w` and `x^2 + zy` lie in `J`.
    pub fn is_nilpotent(&self, m: &Mat) -> bool {
        let r = self.ring;
        r.valuation(r.add(m.a, m.d)) >= 1
            && r.valuation(r.add(r.mul(m.a, m.a), r.mul(m.c, m.b))) >= 1
    }

    pub fn is_unipotent(&self, m: &Mat) -> bool {
        self.is_nilpotent(&self.sub(m, &self.identity()))
    }

    /// `1 + Tr(A) + det(A)`, which equals `det(I + A)`.
    pub fn det_one_plus(&self, m: &Mat) -> Elem {
        let r = self.ring;
        r.add(r.add(r.one(), self.trace(m)), self.det(m))
    }

    /// `P A P^{-1}`.
    pub fn conj(&self, p: &Mat, m: &Mat) -> Result<Mat> {
        self.check(m)?;
        let p_inv = self.inverse(p)?;
        Ok(self.mul(&self.mul(p, m), &p_inv))
    }

    /// `U(t) A U(t)^{-1}` in closed form.
    #[inline]
    pub fn conj_by_u(&self, t: Elem, m: &Mat) -> Mat {
        let r = self.ring;
        let tc = r.mul(t, m.c);
        let b = r.sub(r.add(m.b, r.mul(t, r.sub(m.d, m.a))), r.mul(t, tc));
        Mat {
            a: r.add(m.a, tc),
            b,
            c: m.c,
            d: r.sub(m.d, tc),
        }
    }

    /// `L(s) A L(s)^{-1}` in closed form.
    #[inline]
    pub fn conj_by_l(&self, s: Elem, m: &Mat) -> Mat {
        let r = self.ring;
        let sb = r.mul(s, m.b);
        let c = r.sub(r.add(m.c, r.mul(s, r.sub(m.a, m.d))), r.mul(s, sb));
        Mat {
            a: r.sub(m.a, sb),
            b: m.b,
            c,
            d: r.add(m.d, sb),
        }
    }

    /// `ad(A)(Y) = YA - AY`.
    pub fn ad_apply(&self, a: &Mat, y: &Mat) -> Mat {
        self.sub(&self.mul(y, a), &self.mul(a, y))
    }

    /// Rank over `GF(q)` of `ad(Ā)` acting on `M_2(GF(q))`.
    pub fn ad_rank_residue(&self, a: &Mat) -> u32 {
        let field = self.ring.residue_field();
        let fm = field.matrices();
        let bar = fm.at(a.entries().map(|e| self.ring.residue_index(e)));
        let (zero, one) = (field.zero(), field.one());
        // columns: images of the unit matrices E11, E12, E21, E22
        let mut rows = [[zero; 4]; 4];
        for col in 0..4 {
            let mut basis = [zero; 4];
            basis[col] = one;
            let y = Mat {
                a: basis[0],
                b: basis[1],
                c: basis[2],
                d: basis[3],
            };
            for (row, e) in fm.ad_apply(&bar, &y).entries().into_iter().enumerate() {
                rows[row][col] = e;
            }
        }
        rank(&field, &mut rows)
    }
}

/// Rank of a 4×4 matrix over a field by Gaussian elimination.
fn rank(field: &Ring, m: &mut [[Elem; 4]; 4]) -> u32 {
    let mut rank = 0;
    for col in 0..4 {
        let Some(pivot) = (rank..4).find(|&r| m[r][col] != field.zero()) else {
            continue;
        };
        m.swap(rank, pivot);
        let inv = field.inv(m[rank][col]).expect("nonzero field element");
        for r in 0..4 {
            if r != rank && m[r][col] != field.zero() {
                let factor = field.mul(m[r][col], inv);
                let pivot_row = m[rank];
                for (cell, &p) in m[r].iter_mut().zip(&pivot_row) {
                    *cell = field.sub(*cell, field.mul(factor, p));
                }
            }
        }
        rank += 1;
    }
    rank as u32
}

#[cfg(test)]
mod tests;

//! The quaternion ring `H(R)` and its isomorphism with `M_2(R)`.
//!
//! `i ↦ [[a, b], [b, -a]]`, `j ↦ [[0, 1], [-1, 0]]`, `k ↦ ij` where
//! `a^2 + b^2 = -1` and `a` is a unit.

use std::fmt;

use crate::error::{Error, Result};
use crate::mat2::{Mat, MatRing};
use crate::ring::{Elem, Ring};

/// `r1 + r2 i + r3 j + r4 k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Quat {
    pub r1: Elem,
    pub r2: Elem,
    pub r3: Elem,
    pub r4: Elem,
}

impl Quat {
    pub fn coefficients(&self) -> [Elem; 4] {
        [self.r1, self.r2, self.r3, self.r4]
    }

    pub fn indices(&self) -> [u32; 4] {
        self.coefficients().map(Elem::index)
    }
}

impl fmt::Display for Quat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}+{}*i+{}*j+{}*k", self.r1, self.r2, self.r3, self.r4)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuatOp {
    Add,
    Mul,
    Neg,
    Conjugate,
}

#[derive(Clone, Copy, Debug)]
pub struct QuatRing<'r> {
    ring: &'r Ring,
}

impl Ring {
    pub fn quaternions(&self) -> QuatRing<'_> {
        QuatRing { ring: self }
    }
}

impl<'r> QuatRing<'r> {
    pub fn ring(&self) -> &'r Ring {
        self.ring
    }

    pub fn from_indices(&self, [r1, r2, r3, r4]: [u32; 4]) -> Result<Quat> {
        let r = self.ring;
        Ok(Quat {
            r1: r.elem(r1 as u64)?,
            r2: r.elem(r2 as u64)?,
            r3: r.elem(r3 as u64)?,
            r4: r.elem(r4 as u64)?,
        })
    }

    pub fn at(&self, idx: [u32; 4]) -> Quat {
        self.from_indices(idx)
            .expect("quaternion coefficients in range")
    }

    pub fn owns(&self, x: &Quat) -> bool {
        x.coefficients().iter().all(|&e| self.ring.owns(e))
    }

    pub fn scalar(&self, e: Elem) -> Quat {
        let z = self.ring.zero();
        Quat {
            r1: e,
            r2: z,
            r3: z,
            r4: z,
        }
    }

    pub fn one(&self) -> Quat {
        self.scalar(self.ring.one())
    }

    pub fn zero(&self) -> Quat {
        self.scalar(self.ring.zero())
    }

    pub fn i(&self) -> Quat {
        Quat {
            r2: self.ring.one(),
            ..self.zero()
        }
    }

    pub fn j(&self) -> Quat {
        Quat {
            r3: self.ring.one(),
            ..self.zero()
        }
    }

    pub fn k(&self) -> Quat {
        Quat {
            r4: self.ring.one(),
            ..self.zero()
        }
    }

    pub fn all(&self) -> impl Iterator<Item = Quat> + '_ {
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

    pub fn add(&self, x: &Quat, y: &Quat) -> Quat {
        let r = self.ring;
        Quat {
            r1: r.add(x.r1, y.r1),
            r2: r.add(x.r2, y.r2),
            r3: r.add(x.r3, y.r3),
            r4: r.add(x.r4, y.r4),
        }
    }

    pub fn neg(&self, x: &Quat) -> Quat {
        let r = self.ring;
        Quat {
            r1: r.neg(x.r1),
            r2: r.neg(x.r2),
            r3: r.neg(x.r3),
            r4: r.neg(x.r4),
        }
    }

    pub fn sub(&self, x: &Quat, y: &Quat) -> Quat {
        self.add(x, &self.neg(y))
    }

    /// Hamilton product: `ij = k`, `jk = i`, `ki = j`, anticommuting.
    pub fn mul(&self, x: &Quat, y: &Quat) -> Quat {
        let r = self.ring;
        let m = |a, b| r.mul(a, b);
        let sum = |terms: [(bool, Elem, Elem); 4]| {
            terms.into_iter().fold(r.zero(), |acc, (plus, a, b)| {
                if plus {
                    r.add(acc, m(a, b))
                } else {
                    r.sub(acc, m(a, b))
                }
            })
        };
        Quat {
            r1: sum([
                (true, x.r1, y.r1),
                (false, x.r2, y.r2),
                (false, x.r3, y.r3),
                (false, x.r4, y.r4),
            ]),
            r2: sum([
                (true, x.r1, y.r2),
                (true, x.r2, y.r1),
                (true, x.r3, y.r4),
                (false, x.r4, y.r3),
            ]),
            r3: sum([
                (true, x.r1, y.r3),
                (false, x.r2, y.r4),
                (true, x.r3, y.r1),
                (true, x.r4, y.r2),
            ]),
            r4: sum([
                (true, x.r1, y.r4),
                (true, x.r2, y.r3),
                (false, x.r3, y.r2),
                (true, x.r4, y.r1),
            ]),
        }
    }

    pub fn conjugate(&self, x: &Quat) -> Quat {
        let r = self.ring;
        Quat {
            r1: x.r1,
            r2: r.neg(x.r2),
            r3: r.neg(x.r3),
            r4: r.neg(x.r4),
        }
    }

    /// `r1^2 + r2^2 + r3^2 + r4^2`.
    pub fn norm(&self, x: &Quat) -> Elem {
        let r = self.ring;
        x.coefficients()
            .iter()
            .fold(r.zero(), |acc, &c| r.add(acc, r.mul(c, c)))
    }

    /// `2 r1`.
    pub fn trace(&self, x: &Quat) -> Elem {
        self.ring.add(x.r1, x.r1)
    }

    pub fn arith(&self, op: QuatOp, x: &Quat, y: Option<&Quat>) -> Result<Quat> {
        if !self.owns(x) || y.is_some_and(|y| !self.owns(y)) {
            return Err(Error::RingMismatch);
        }
        let rhs = || y.ok_or_else(|| Error::InvalidParams(format!("{op:?} needs two operands")));
        Ok(match op {
            QuatOp::Add => self.add(x, rhs()?),
            QuatOp::Mul => self.mul(x, rhs()?),
            QuatOp::Neg => self.neg(x),
            QuatOp::Conjugate => self.conjugate(x),
        })
    }

    /// Nilpotent iff trace and norm both lie in `J`.
    pub fn is_nilpotent_by_norm(&self, x: &Quat) -> bool {
        self.ring.valuation(self.trace(x)) >= 1 && self.ring.valuation(self.norm(x)) >= 1
    }
}

/// An explicit isomorphism `H(R) -> M_2(R)`.
#[derive(Clone, Debug)]
pub struct QuatMatIso<'r> {
    ring: &'r Ring,
    a: Elem,
    b: Elem,
    m_i: Mat,
    m_j: Mat,
    m_k: Mat,
}

impl<'r> QuatMatIso<'r> {
    /// Uses the least `(a, b)` from [`Ring::find_sum_of_squares_minus_one`]
    /// and checks the defining relations on the images of `i`, `j`, `k`.
    pub fn build(ring: &'r Ring) -> QuatMatIso<'r> {
        let (a, b) = ring.find_sum_of_squares_minus_one();
        let m = ring.matrices();
        let (zero, one) = (ring.zero(), ring.one());
        let m_i = Mat {
            a,
            b,
            c: b,
            d: ring.neg(a),
        };
        let m_j = Mat {
            a: zero,
            b: one,
            c: ring.neg(one),
            d: zero,
        };
        let m_k = m.mul(&m_i, &m_j);
        let iso = QuatMatIso {
            ring,
            a,
            b,
            m_i,
            m_j,
            m_k,
        };
        assert!(
            iso.relations_hold(),
            "quaternion relations fail for (a, b) = ({a}, {b})"
        );
        iso
    }

    pub fn ring(&self) -> &'r Ring {
        self.ring
    }

    pub fn pair(&self) -> (Elem, Elem) {
        (self.a, self.b)
    }

    pub fn images(&self) -> [Mat; 3] {
        [self.m_i, self.m_j, self.m_k]
    }

    /// `M_i^2 = M_j^2 = M_k^2 = -I` and `M_i M_j = -M_j M_i`.
    pub fn relations_hold(&self) -> bool {
        let m = self.ring.matrices();
        let minus_one = m.neg(&m.identity());
        [self.m_i, self.m_j, self.m_k]
            .iter()
            .all(|x| m.mul(x, x) == minus_one)
            && m.mul(&self.m_i, &self.m_j) == m.neg(&m.mul(&self.m_j, &self.m_i))
            && m.mul(&self.m_k, &m.neg(&self.m_k)) == m.identity()
    }

    fn mats(&self) -> MatRing<'r> {
        self.ring.matrices()
    }

    /// `r1 I + r2 M_i + r3 M_j + r4 M_k`.
    pub fn to_matrix(&self, x: &Quat) -> Result<Mat> {
        if !self.ring.quaternions().owns(x) {
            return Err(Error::IsoMismatch);
        }
        let m = self.mats();
        let terms = [
            m.scalar(x.r1),
            m.scale(x.r2, &self.m_i),
            m.scale(x.r3, &self.m_j),
            m.scale(x.r4, &self.m_k),
        ];
        Ok(terms.iter().fold(m.zero(), |acc, t| m.add(&acc, t)))
    }

    /// Inverse of [`QuatMatIso::to_matrix`].
    pub fn from_matrix(&self, mat: &Mat) -> Result<Quat> {
        if !self.mats().owns(mat) {
            return Err(Error::IsoMismatch);
        }
        let r = self.ring;
        let half = r
            .inv(r.from_int(2))
            .expect("2 is a unit in odd characteristic");
        let halve = |e| r.mul(half, e);
        let r1 = halve(r.add(mat.a, mat.d));
        let r3 = halve(r.sub(mat.b, mat.c));
        // u = a r2 - b r4 and v = b r2 + a r4; the system has determinant a^2 + b^2 = -1
        let u = halve(r.sub(mat.a, mat.d));
        let v = halve(r.add(mat.b, mat.c));
        let (a, b) = (self.a, self.b);
        let r2 = r.neg(r.add(r.mul(a, u), r.mul(b, v)));
        let r4 = r.sub(r.mul(b, u), r.mul(a, v));
        Ok(Quat { r1, r2, r3, r4 })
    }

    pub fn is_nilpotent(&self, x: &Quat) -> Result<bool> {
        Ok(self.mats().is_nilpotent(&self.to_matrix(x)?))
    }

    pub fn is_unipotent(&self, x: &Quat) -> Result<bool> {
        Ok(self.mats().is_unipotent(&self.to_matrix(x)?))
    }
}

//! Products of elementary unipotents and central factors.

use serde::{Deserialize, Serialize};

use super::{Mat, MatRing};
use crate::error::{Error, Result};
use crate::ring::{Elem, Ring};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Factor {
    /// `U(t) = [[1, t], [0, 1]]`.
    Upper(Elem),
    /// `L(s) = [[1, 0], [s, 1]]`.
    Lower(Elem),
    /// `rI` with `r ∈ 1 + J`.
    Central(Elem),
}

impl Factor {
    pub fn value(self) -> Elem {
        match self {
            Factor::Upper(e) | Factor::Lower(e) | Factor::Central(e) => e,
        }
    }

    fn kind(self) -> &'static str {
        match self {
            Factor::Upper(_) => "U",
            Factor::Lower(_) => "L",
            Factor::Central(_) => "C",
        }
    }

    /// Conjugation by the swap matrix `[[0, 1], [1, 0]]`.
    fn swapped(self) -> Factor {
        match self {
            Factor::Upper(e) => Factor::Lower(e),
            Factor::Lower(e) => Factor::Upper(e),
            c @ Factor::Central(_) => c,
        }
    }

    pub fn matrix(self, m: &MatRing<'_>) -> Mat {
        match self {
            Factor::Upper(t) => m.upper(t),
            Factor::Lower(s) => m.lower(s),
            Factor::Central(r) => m.scalar(r),
        }
    }
}

/// A plain matrix product, evaluated left to right; empty means `I`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct ElementaryWord(pub Vec<Factor>);

#[derive(Serialize, Deserialize)]
struct FactorRecord {
    kind: String,
    value: u32,
}

impl ElementaryWord {
    pub fn factors(&self) -> &[Factor] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Drops identity factors and merges neighbours of the same kind,
    /// using `U(s)U(t) = U(s + t)`, `L(s)L(t) = L(s + t)` and
    /// `(rI)(sI) = (rs)I`.
    pub fn normalized(&self, ring: &Ring) -> ElementaryWord {
        let mut out: Vec<Factor> = Vec::with_capacity(self.0.len());
        for &f in &self.0 {
            let merged = match (out.last().copied(), f) {
                (Some(Factor::Upper(s)), Factor::Upper(t)) => Some(Factor::Upper(ring.add(s, t))),
                (Some(Factor::Lower(s)), Factor::Lower(t)) => Some(Factor::Lower(ring.add(s, t))),
                (Some(Factor::Central(s)), Factor::Central(t)) => {
                    Some(Factor::Central(ring.mul(s, t)))
                }
                _ => None,
            };
            match merged {
                Some(m) => *out.last_mut().unwrap() = m,
                None => out.push(f),
            }
            let trivial = match out.last() {
                Some(Factor::Upper(t) | Factor::Lower(t)) => *t == ring.zero(),
                Some(Factor::Central(r)) => *r == ring.one(),
                None => false,
            };
            if trivial {
                out.pop();
            }
        }
        ElementaryWord(out)
    }

    pub fn to_json(&self) -> String {
        let records: Vec<FactorRecord> = self
            .0
            .iter()
            .map(|f| FactorRecord {
                kind: f.kind().to_string(),
                value: f.value().index(),
            })
            .collect();
        serde_json::to_string(&records).expect("plain records serialize")
    }

    pub fn from_json(ring: &Ring, s: &str) -> Result<ElementaryWord> {
        let records: Vec<FactorRecord> =
            serde_json::from_str(s).map_err(|e| Error::Parse(format!("elementary word: {e}")))?;
        records
            .into_iter()
            .map(|rec| {
                let e = ring.elem(rec.value as u64)?;
                match rec.kind.as_str() {
                    "U" => Ok(Factor::Upper(e)),
                    "L" => Ok(Factor::Lower(e)),
                    "C" => Ok(Factor::Central(e)),
                    other => Err(Error::Parse(format!("unknown factor kind {other:?}"))),
                }
            })
            .collect::<Result<_>>()
            .map(ElementaryWord)
    }
}

impl<'r> MatRing<'r> {
    pub fn evaluate_word(&self, w: &ElementaryWord) -> Result<Mat> {
        let ring = self.ring();
        if w.0.iter().any(|f| !ring.owns(f.value())) {
            return Err(Error::RingMismatch);
        }
        Ok(w.0
            .iter()
            .fold(self.identity(), |acc, f| self.mul(&acc, &f.matrix(self))))
    }

    /// `L(-u^{-1}) U(u - 1) L(1) U(u^{-1} - 1) = diag(u, u^{-1})`.
    pub fn diag_factorization(&self, u: Elem) -> Result<ElementaryWord> {
        let r = self.ring();
        let u_inv = r.inv(u)?;
        Ok(ElementaryWord(vec![
            Factor::Lower(r.neg(u_inv)),
            Factor::Upper(r.sub(u, r.one())),
            Factor::Lower(r.one()),
            Factor::Upper(r.sub(u_inv, r.one())),
        ]))
    }

    /// Writes a unipotent matrix as a product of elementary unipotents and
    /// at most one central factor from `1 + J`.
    pub fn factor_unipotent(&self, m: &Mat) -> Result<ElementaryWord> {
        if !self.owns(m) {
            return Err(Error::RingMismatch);
        }
        if !self.is_unipotent(m) {
            return Err(Error::NotUnipotent);
        }
        let r = self.ring();
        let word = if r.is_unit(m.a) {
            self.factor_unit_corner(m)?
        } else {
            // for odd p, a unipotent matrix cannot have both diagonal entries in J
            debug_assert!(r.is_unit(m.d));
            let swapped = Mat {
                a: m.d,
                b: m.c,
                c: m.b,
                d: m.a,
            };
            let w = self.factor_unit_corner(&swapped)?;
            ElementaryWord(w.0.into_iter().map(Factor::swapped).collect())
        };
        Ok(word.normalized(r))
    }

    /// `A = L(c/a) · rI · diag(a/r, r/a) · U(b/a)` with `r^2 = det A`.
    fn factor_unit_corner(&self, m: &Mat) -> Result<ElementaryWord> {
        let r = self.ring();
        let a_inv = r.inv(m.a)?;
        let root = r.sqrt_one_plus_j(r.sub(self.det(m), r.one()))?;
        let u = r.mul(m.a, r.inv(root)?);
        let mut factors = vec![Factor::Lower(r.mul(m.c, a_inv)), Factor::Central(root)];
        factors.extend(self.diag_factorization(u)?.0);
        factors.push(Factor::Upper(r.mul(m.b, a_inv)));
        Ok(ElementaryWord(factors))
    }
}

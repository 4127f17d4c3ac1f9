//! Canonical forms, orbit typing and the closed-form orbit census.
//!
//! Every non-scalar `A` is unipotent similar to `dI + x^δ [[a, b], [c, 0]]`
//! with `a` a unit, where `δ` is the valuation of the traceless part of `A`.
//! The orbit is then determined, up to the scalar part, by the orbit of the
//! residual over `R/J^(n-δ)`, whose size follows from its type over `GF(q)`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mat2::{ElementaryWord, Factor, Mat, MatRing};
use crate::ring::{Elem, Ring, SquareClass};

/// Root behaviour of the residual characteristic polynomial over `GF(q)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrbitType {
    Scalar,
    /// Two distinct roots.
    Split,
    /// A double root.
    Ramified,
    /// No root.
    Inert,
}

impl OrbitType {
    pub fn as_str(self) -> &'static str {
        match self {
            OrbitType::Scalar => "scalar",
            OrbitType::Split => "split",
            OrbitType::Ramified => "ramified",
            OrbitType::Inert => "inert",
        }
    }
}

impl fmt::Display for OrbitType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for OrbitType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "scalar" => Ok(OrbitType::Scalar),
            "split" => Ok(OrbitType::Split),
            "ramified" => Ok(OrbitType::Ramified),
            "inert" => Ok(OrbitType::Inert),
            other => Err(Error::Parse(format!("unknown orbit type {other:?}"))),
        }
    }
}

/// One census row: `orbit_count` orbits of `orbit_size` elements each.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OrbitClass {
    pub delta: u32,
    #[serde(rename = "type")]
    pub orbit_type: OrbitType,
    pub orbit_size: u128,
    pub orbit_count: u128,
}

impl OrbitClass {
    /// Scalar rows first, then by `δ`, type and size.
    pub fn sort_key(&self) -> (bool, u32, OrbitType, u128, u128) {
        (
            self.orbit_type != OrbitType::Scalar,
            self.delta,
            self.orbit_type,
            self.orbit_size,
            self.orbit_count,
        )
    }
}

pub fn sort_census(rows: &mut [OrbitClass]) {
    rows.sort_by_key(OrbitClass::sort_key);
}

#[derive(Clone, Debug)]
pub struct CanonicalForm {
    /// Scalar part.
    pub d: Elem,
    pub delta: u32,
    /// `[[a, b], [c, 0]]` over `R/J^(n-δ)`, with `a` a unit there.
    pub residual: Mat,
    pub residual_ring: Arc<Ring>,
    /// `W` with `W A W^{-1} = dI + x^δ · lift(residual)`.
    pub reduction_word: ElementaryWord,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct OrbitInvariants {
    pub trace: Elem,
    pub det: Elem,
    pub delta: u32,
    /// Canonical lift of `Tr(A)/2 mod J^δ` (zero when `δ = 0`).
    pub d_mod_j_delta: Elem,
    pub orbit_type: OrbitType,
}

/// Classification routines bound to one ring.
#[derive(Clone, Debug)]
pub struct Classifier<'r> {
    ring: &'r Ring,
    residue: Arc<Ring>,
    half: Elem,
}

struct Reduction {
    delta: u32,
    reduced: Mat,
    word: ElementaryWord,
}

impl<'r> Classifier<'r> {
    pub fn new(ring: &'r Ring) -> Self {
        let half = ring
            .inv(ring.from_int(2))
            .expect("2 is a unit in odd characteristic");
        Classifier {
            ring,
            residue: ring.residue_field(),
            half,
        }
    }

    pub fn ring(&self) -> &'r Ring {
        self.ring
    }

    fn mats(&self) -> MatRing<'r> {
        self.ring.matrices()
    }

    pub fn half_trace(&self, m: &Mat) -> Elem {
        self.ring.mul(self.half, self.mats().trace(m))
    }

    /// Valuation of `A - (Tr(A)/2) I`; `n` exactly for scalar matrices.
    pub fn traceless_valuation(&self, m: &Mat) -> u32 {
        let r = self.ring;
        let h = self.half_trace(m);
        r.valuation(r.sub(m.a, h))
            .min(r.valuation(m.b))
            .min(r.valuation(m.c))
    }

    fn reduce(&self, m: &Mat) -> Reduction {
        let r = self.ring;
        let mats = self.mats();
        let delta = self.traceless_valuation(m);
        let alpha = r.valuation(r.sub(m.a, m.d));
        let gamma = r.valuation(m.c);
        let one = r.one();
        let (reduced, word) = if alpha == delta {
            (*m, ElementaryWord::default())
        } else if gamma == delta {
            // a - d + 2c has valuation exactly δ
            (
                mats.conj_by_u(one, m),
                ElementaryWord(vec![Factor::Upper(one)]),
            )
        } else {
            (
                mats.conj_by_l(one, m),
                ElementaryWord(vec![Factor::Lower(one)]),
            )
        };
        Reduction {
            delta,
            reduced,
            word,
        }
    }

    pub fn canonical_reduce(&self, m: &Mat) -> Result<CanonicalForm> {
        if !self.mats().owns(m) {
            return Err(Error::RingMismatch);
        }
        let r = self.ring;
        let Reduction {
            delta,
            reduced,
            word,
        } = self.reduce(m);
        if delta == r.n() {
            return Err(Error::ScalarInput);
        }
        let d = reduced.d;
        let quotient = r.quotient(r.n() - delta)?;
        let shrink =
            |e: Elem| quotient.project(r.div_by_x_pow(e, delta).expect("entry lies in J^δ"));
        let qr = quotient.ring();
        let residual = Mat {
            a: shrink(r.sub(reduced.a, d)),
            b: shrink(reduced.b),
            c: shrink(reduced.c),
            d: qr.zero(),
        };
        Ok(CanonicalForm {
            d,
            delta,
            residual,
            residual_ring: quotient.ring_arc(),
            reduction_word: word,
        })
    }

    /// `Tr(A)^2 - 4 det(A)`.
    pub fn discriminant(&self, m: &Mat) -> Elem {
        let r = self.ring;
        let mats = self.mats();
        let t = mats.trace(m);
        r.sub(r.mul(t, t), r.mul(r.from_int(4), mats.det(m)))
    }

    /// Residue of `ā^2 + 4 b̄ c̄` for the canonical residual, as an element
    /// of the residue field; `None` for scalar input.
    pub fn residual_discriminant(&self, m: &Mat) -> Option<Elem> {
        let r = self.ring;
        let Reduction { delta, reduced, .. } = self.reduce(m);
        if delta == r.n() {
            return None;
        }
        let f = &*self.residue;
        let bar =
            |e: Elem| f.at(r.residue_index(r.div_by_x_pow(e, delta).expect("entry lies in J^δ")));
        let (a, b, c) = (
            bar(r.sub(reduced.a, reduced.d)),
            bar(reduced.b),
            bar(reduced.c),
        );
        Some(f.add(f.mul(a, a), f.mul(f.from_int(4), f.mul(b, c))))
    }

    pub fn orbit_type(&self, m: &Mat) -> OrbitType {
        match self.residual_discriminant(m) {
            None => OrbitType::Scalar,
            Some(disc) if disc == self.residue.zero() => OrbitType::Ramified,
            Some(disc) => match self
                .residue
                .square_class(disc)
                .expect("nonzero element of a field")
            {
                SquareClass::Square => OrbitType::Split,
                SquareClass::NonSquare => OrbitType::Inert,
            },
        }
    }

    pub fn orbit_size_formula(&self, m: &Mat) -> u128 {
        let delta = self.traceless_valuation(m);
        orbit_size(
            self.ring.q() as u128,
            self.ring.n(),
            delta,
            self.orbit_type(m),
        )
    }

    pub fn orbit_invariants(&self, m: &Mat) -> OrbitInvariants {
        let r = self.ring;
        let mats = self.mats();
        let delta = self.traceless_valuation(m);
        let d_mod_j_delta = match delta {
            0 => r.zero(),
            k => {
                let q = r.quotient(k).expect("1 <= δ <= n");
                q.section(q.project(self.half_trace(m)))
            }
        };
        OrbitInvariants {
            trace: mats.trace(m),
            det: mats.det(m),
            delta,
            d_mod_j_delta,
            orbit_type: self.orbit_type(m),
        }
    }
}

/// Orbit size for a class of the given `δ` and type in `M_2(R)`, `|R| = q^n`.
pub fn orbit_size(q: u128, n: u32, delta: u32, orbit_type: OrbitType) -> u128 {
    if orbit_type == OrbitType::Scalar || delta >= n {
        return 1;
    }
    let k = n - delta;
    match orbit_type {
        OrbitType::Split => q.pow(2 * k - 1) * (q + 1),
        OrbitType::Inert => q.pow(2 * k - 1) * (q - 1),
        OrbitType::Ramified => q.pow(2 * (k - 1)) * (q * q - 1) / 2,
        OrbitType::Scalar => unreachable!(),
    }
}

/// The closed-form census of `M_2(R)` for `|R| = q^n`.
///
/// With `scalar_multiplicity` each `δ`-stratum is counted once per value of
/// the scalar part modulo `J^δ` (factor `q^δ`), which makes the sizes sum to
/// `q^(4n)`. Without it the bare per-`δ` counts are reported.
pub fn census_formula_for(q: u64, n: u32, scalar_multiplicity: bool) -> Vec<OrbitClass> {
    let q = q as u128;
    let mut rows = vec![OrbitClass {
        delta: n,
        orbit_type: OrbitType::Scalar,
        orbit_size: 1,
        orbit_count: q.pow(n),
    }];
    for delta in 0..n {
        let m = if scalar_multiplicity { q.pow(delta) } else { 1 };
        let base = q.pow(2 * (n - delta) - 1);
        let counts = [
            (OrbitType::Split, m * base * (q - 1) / 2),
            (OrbitType::Ramified, m * 2 * base),
            (OrbitType::Inert, m * base * (q - 1) / 2),
        ];
        for (orbit_type, orbit_count) in counts {
            rows.push(OrbitClass {
                delta,
                orbit_type,
                orbit_size: orbit_size(q, n, delta, orbit_type),
                orbit_count,
            });
        }
    }
    rows
}

pub fn census_formula(ring: &Ring, scalar_multiplicity: bool) -> Vec<OrbitClass> {
    census_formula_for(ring.q() as u64, ring.n(), scalar_multiplicity)
}

/// `Σ size · count`.
pub fn census_total(rows: &[OrbitClass]) -> u128 {
    rows.iter().map(|r| r.orbit_size * r.orbit_count).sum()
}

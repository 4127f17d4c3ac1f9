use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::poly;
use crate::error::{Error, Result};

/// Largest ring accepted by [`RingSpec::validate`].
pub const MAX_RING_SIZE: u64 = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    /// `Z/p^n`.
    IntegersModPn,
    /// `GF(p^r)[u]/(u^n)`; a field when `n = 1`.
    TruncatedPolynomialOverField,
    /// `GR(p^n, r) = (Z/p^n)[t]/(f)` with `f` monic and irreducible mod `p`.
    GaloisRing,
}

/// Parameters of a finite commutative local principal ring of order `q^n`,
/// `q = p^r`, with residue field `GF(q)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RingSpec {
    pub family: Family,
    pub p: u32,
    pub r: u32,
    pub n: u32,
    /// Monic modulus over GF(p), lowest coefficient first. Only used when
    /// `r > 1`; filled with the least irreducible by [`RingSpec::validate`].
    pub modulus: Option<Vec<u32>>,
}

impl RingSpec {
    pub fn integers_mod(p: u32, n: u32) -> Self {
        Self {
            family: Family::IntegersModPn,
            p,
            r: 1,
            n,
            modulus: None,
        }
    }

    pub fn truncated(p: u32, r: u32, n: u32) -> Self {
        Self {
            family: Family::TruncatedPolynomialOverField,
            p,
            r,
            n,
            modulus: None,
        }
    }

    pub fn field(p: u32, r: u32) -> Self {
        Self::truncated(p, r, 1)
    }

    pub fn galois(p: u32, n: u32, r: u32) -> Self {
        Self {
            family: Family::GaloisRing,
            p,
            r,
            n,
            modulus: None,
        }
    }

    pub fn q(&self) -> u64 {
        (self.p as u64).pow(self.r)
    }

    /// Checks the invariants and returns a copy with the modulus filled in.
    pub fn validate(&self) -> Result<RingSpec> {
        if self.p == 2 || !poly::is_prime(self.p as u64) {
            return Err(Error::NonOddPrime(self.p as u64));
        }
        if self.r < 1 || self.n < 1 {
            return Err(Error::InvalidParams(format!(
                "r = {} and n = {} must be at least 1",
                self.r, self.n
            )));
        }
        if self.family == Family::IntegersModPn && self.r != 1 {
            return Err(Error::InvalidParams("Z/p^n has extension degree 1".into()));
        }
        let size = poly::checked_pow(self.p as u64, self.r * self.n)
            .filter(|&s| s <= MAX_RING_SIZE)
            .ok_or_else(|| Error::InvalidParams(format!("ring order exceeds {MAX_RING_SIZE}")))?;
        debug_assert!(size >= 3);

        let mut spec = self.clone();
        if self.r == 1 {
            spec.modulus = None;
            return Ok(spec);
        }
        match &self.modulus {
            None => spec.modulus = Some(poly::least_irreducible(self.r, self.p)),
            Some(f) => {
                let monic = f.len() == self.r as usize + 1 && f.last() == Some(&1);
                if !monic || f.iter().any(|&c| c >= self.p) {
                    return Err(Error::InvalidParams(format!(
                        "modulus {f:?} is not a monic degree-{} polynomial over GF({})",
                        self.r, self.p
                    )));
                }
                if !poly::is_irreducible(f, self.p) {
                    return Err(Error::ReducibleModulus(f.clone()));
                }
            }
        }
        Ok(spec)
    }
}

impl fmt::Display for RingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (p, r, n) = (self.p, self.r, self.n);
        match self.family {
            Family::IntegersModPn => write!(f, "Z/{p}^{n}"),
            Family::TruncatedPolynomialOverField if n == 1 => write!(f, "GF({p}^{r})"),
            Family::TruncatedPolynomialOverField => write!(f, "GF({p}^{r})[u]/u^{n}"),
            Family::GaloisRing => write!(f, "GR({p}^{n},{r})"),
        }
    }
}

fn parse_u32(s: &str, what: &str) -> Result<u32> {
    s.parse::<u32>()
        .map_err(|_| Error::Parse(format!("expected an integer for {what}, found {s:?}")))
}

/// Parses `p^k` or a bare prime power `m`, returning `(p, k)`.
fn parse_prime_power(s: &str) -> Result<(u32, u32)> {
    if let Some((base, exp)) = s.split_once('^') {
        return Ok((parse_u32(base, "prime")?, parse_u32(exp, "exponent")?));
    }
    let m = parse_u32(s, "prime power")?;
    match poly::prime_power(m as u64) {
        Some((p, k)) => Ok((p as u32, k)),
        None => Err(Error::NonOddPrime(m as u64)),
    }
}

impl FromStr for RingSpec {
    type Err = Error;

    /// Grammar (case-insensitive, whitespace ignored): `Z/p^n`, `GF(p^r)`,
    /// `GF(p^r)[u]/u^n`, `GR(p^n,r)`. Bare prime powers are accepted in place
    /// of `p^k` (e.g. `GF(9)`, `Z/27`), and `u^n` may be parenthesized.
    fn from_str(s: &str) -> Result<Self> {
        let s: String = s
            .chars()
            .filter(|c| !c.is_whitespace())
            .collect::<String>()
            .to_lowercase();
        let bad = || Error::Parse(format!("unrecognized ring spec {s:?}"));

        let spec = if let Some(rest) = s.strip_prefix("z/") {
            let (p, n) = parse_prime_power(rest)?;
            RingSpec::integers_mod(p, n)
        } else if let Some(rest) = s.strip_prefix("gf(") {
            let (inner, tail) = rest.split_once(')').ok_or_else(bad)?;
            let (p, r) = parse_prime_power(inner)?;
            if tail.is_empty() {
                RingSpec::field(p, r)
            } else {
                let tail = tail.strip_prefix("[u]/").ok_or_else(bad)?;
                let tail = tail
                    .strip_prefix('(')
                    .and_then(|t| t.strip_suffix(')'))
                    .unwrap_or(tail);
                let n = tail.strip_prefix("u^").ok_or_else(bad)?;
                RingSpec::truncated(p, r, parse_u32(n, "radical length")?)
            }
        } else if let Some(rest) = s.strip_prefix("gr(") {
            let inner = rest.strip_suffix(')').ok_or_else(bad)?;
            let (pn, r) = inner.split_once(',').ok_or_else(bad)?;
            let (p, n) = parse_prime_power(pn)?;
            RingSpec::galois(p, n, parse_u32(r, "extension degree")?)
        } else {
            return Err(bad());
        };
        spec.validate()
    }
}

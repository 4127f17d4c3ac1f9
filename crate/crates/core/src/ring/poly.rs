//! Small number-theory helpers and dense polynomials over GF(p).
//!
//! Polynomials are coefficient vectors, lowest degree first, with no
//! trailing zeros (the zero polynomial is the empty vector).

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Returns `(p, k)` with `n = p^k` and `p` prime, or `None`.
pub(crate) fn prime_power(n: u64) -> Option<(u64, u32)> {
    if n < 2 {
        return None;
    }
    let p = (2..=n).find(|d| n.is_multiple_of(*d))?;
    let mut m = n;
    let mut k = 0;
    while m.is_multiple_of(p) {
        m /= p;
        k += 1;
    }
    (m == 1).then_some((p, k))
}

pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub(crate) fn checked_pow(base: u64, exp: u32) -> Option<u64> {
    (0..exp).try_fold(1u64, |acc, _| acc.checked_mul(base))
}

fn trim(mut f: Vec<u32>) -> Vec<u32> {
    while f.last() == Some(&0) {
        f.pop();
    }
    f
}

fn inv_mod_p(a: u32, p: u32) -> u32 {
    let (p64, mut base, mut e, mut acc) = (p as u64, a as u64 % p as u64, p as u64 - 2, 1u64);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p64;
        }
        base = base * base % p64;
        e >>= 1;
    }
    acc as u32
}

/// Remainder of `f` modulo a nonzero `g` over GF(p).
pub(crate) fn rem(f: &[u32], g: &[u32], p: u32) -> Vec<u32> {
    let g = trim(g.to_vec());
    assert!(!g.is_empty(), "division by the zero polynomial");
    let mut f = trim(f.to_vec());
    let lead_inv = inv_mod_p(*g.last().unwrap(), p) as u64;
    let p64 = p as u64;
    while f.len() >= g.len() {
        let shift = f.len() - g.len();
        let c = *f.last().unwrap() as u64 * lead_inv % p64;
        for (j, &gj) in g.iter().enumerate() {
            let t = c * gj as u64 % p64;
            f[shift + j] = ((f[shift + j] as u64 + p64 - t) % p64) as u32;
        }
        f = trim(f);
    }
    f
}

/// The monic polynomial of degree `deg` whose lower coefficients are the
/// base-`p` digits of `code`.
pub(crate) fn monic_from_code(code: u64, deg: u32, p: u32) -> Vec<u32> {
    let mut c = code;
    let mut f: Vec<u32> = (0..deg)
        .map(|_| {
            let d = (c % p as u64) as u32;
            c /= p as u64;
            d
        })
        .collect();
    f.push(1);
    f
}

/// Trial division by every monic polynomial of degree `1..=deg/2`.
pub(crate) fn is_irreducible(f: &[u32], p: u32) -> bool {
    let f = trim(f.to_vec());
    let deg = match f.len() {
        0 => return false,
        len => (len - 1) as u32,
    };
    if deg == 0 {
        return false;
    }
    for d in 1..=deg / 2 {
        let count = (p as u64).pow(d);
        for code in 0..count {
            let g = monic_from_code(code, d, p);
            if rem(&f, &g, p).is_empty() {
                return false;
            }
        }
    }
    true
}

/// Least monic irreducible of degree `deg`, ordering candidates by the
/// base-`p` code of their lower coefficients.
pub(crate) fn least_irreducible(deg: u32, p: u32) -> Vec<u32> {
    let count = (p as u64).pow(deg);
    (0..count)
        .map(|code| monic_from_code(code, deg, p))
        .find(|f| is_irreducible(f, p))
        .expect("an irreducible polynomial exists in every degree")
}

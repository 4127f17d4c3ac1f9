//! Text forms for matrices and quaternions, written with element indices:
//! `[[a,b],[c,d]]`, `r1+r2*i+r3*j+r4*k` or `[r1,r2,r3,r4]`.

use std::fmt;

use crate::error::{Error, Result};
use crate::mat2::Mat;
use crate::quat::Quat;
use crate::ring::Ring;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Literal {
    Matrix(Mat),
    Quaternion(Quat),
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Matrix(m) => m.fmt(f),
            Literal::Quaternion(q) => q.fmt(f),
        }
    }
}

fn strip(s: &str) -> String {
    s.chars().filter(|c| !c.is_whitespace()).collect()
}

fn index(ring: &Ring, token: &str) -> Result<u32> {
    let value: u64 = token
        .parse()
        .map_err(|_| Error::Parse(format!("expected an element index, found {token:?}")))?;
    Ok(ring.elem(value)?.index())
}

/// Parses `[[a,b],[c,d]]`.
pub fn parse_matrix(ring: &Ring, s: &str) -> Result<Mat> {
    let body = strip(s);
    let inner = body
        .strip_prefix("[[")
        .and_then(|b| b.strip_suffix("]]"))
        .ok_or_else(|| {
            Error::Parse(format!(
                "matrix literal must look like [[a,b],[c,d]], got {s:?}"
            ))
        })?;
    let rows: Vec<&str> = inner.split("],[").collect();
    let cells: Vec<&str> = rows.iter().flat_map(|r| r.split(',')).collect();
    if rows.len() != 2 || rows.iter().any(|r| r.split(',').count() != 2) {
        return Err(Error::Parse(format!(
            "matrix literal must be 2x2, got {s:?}"
        )));
    }
    let idx = [
        index(ring, cells[0])?,
        index(ring, cells[1])?,
        index(ring, cells[2])?,
        index(ring, cells[3])?,
    ];
    Ok(ring.matrices().at(idx))
}

/// Parses `r1+r2*i+r3*j+r4*k` (terms in any order, missing terms zero) or `[r1,r2,r3,r4]`.
pub fn parse_quaternion(ring: &Ring, s: &str) -> Result<Quat> {
    let body = strip(s);
    let mut coeffs = [0u32; 4];
    if let Some(inner) = body.strip_prefix('[').and_then(|b| b.strip_suffix(']')) {
        let parts: Vec<&str> = inner.split(',').collect();
        if parts.len() != 4 {
            return Err(Error::Parse(format!(
                "quaternion list needs 4 entries, got {s:?}"
            )));
        }
        for (slot, p) in coeffs.iter_mut().zip(parts) {
            *slot = index(ring, p)?;
        }
    } else {
        let mut seen = [false; 4];
        for term in body.split('+') {
            let (coeff, unit) = match term.rsplit_once('*') {
                Some((c, u)) => (c, u),
                None if term.ends_with(['i', 'j', 'k']) => {
                    (&term[..term.len() - 1], &term[term.len() - 1..])
                }
                None => (term, ""),
            };
            let slot = match unit {
                "" => 0,
                "i" => 1,
                "j" => 2,
                "k" => 3,
                other => return Err(Error::Parse(format!("unknown quaternion unit {other:?}"))),
            };
            if seen[slot] {
                return Err(Error::Parse(format!("repeated quaternion term in {s:?}")));
            }
            seen[slot] = true;
            coeffs[slot] = if coeff.is_empty() && slot > 0 {
                1
            } else {
                index(ring, coeff)?
            };
        }
    }
    Ok(ring.quaternions().at(coeffs))
}

/// Accepts either form; anything starting with `[[` is a matrix.
pub fn parse_literal(ring: &Ring, s: &str) -> Result<Literal> {
    let body = strip(s);
    if body.starts_with("[[") {
        parse_matrix(ring, &body).map(Literal::Matrix)
    } else {
        parse_quaternion(ring, &body).map(Literal::Quaternion)
    }
}

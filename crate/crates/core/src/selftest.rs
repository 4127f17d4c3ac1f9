//! Runtime self-checks of every module against exhaustive or sampled oracles.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng as _, SeedableRng};
use serde::Serialize;

use crate::classify::{census_formula, Classifier, OrbitType};
use crate::enumerate::{
    census_brute, orbit_of, partition_all, sl2_centralizer_order, PartitionOptions,
};
use crate::mat2::{Factor, Mat};
use crate::quat::QuatMatIso;
use crate::ring::{Ring, RingSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    /// Rings with at most 9 elements.
    Quick,
    /// The full acceptance matrix.
    Full,
}

/// Deliberate damage used to confirm the suites can fail.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fault {
    CorruptMulTable,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub name: &'static str,
    pub passed: bool,
    /// Nothing to check at this level.
    pub skipped: bool,
    pub checks: u64,
    pub detail: Option<String>,
    #[serde(serialize_with = "secs")]
    pub elapsed: Duration,
}

fn secs<S: serde::Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64())
}

type Outcome = Result<u64, String>;
type Suite = fn(&Ctx, &Plan) -> Outcome;

struct Ctx {
    fault: Option<Fault>,
}

impl Ctx {
    fn ring(&self, spec: &str) -> Ring {
        let mut r =
            Ring::build(&spec.parse::<RingSpec>().expect("built-in spec")).expect("built-in spec");
        if self.fault == Some(Fault::CorruptMulTable) && r.size() > 2 {
            r.corrupt_mul_entry(1, 1, 2);
        }
        r
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

struct Plan {
    fields: &'static [&'static str],
    rings: &'static [&'static str],
    radicals: &'static [&'static str],
    census: &'static [&'static str],
    centralizers: &'static [&'static str],
    quat_exhaustive: &'static [&'static str],
    quat_sampled: &'static [(&'static str, u64)],
    nil_sampled: &'static [(&'static str, u64)],
    lifting: Option<(&'static str, u64)>,
    parallel: &'static [&'static str],
}

const QUICK: Plan = Plan {
    fields: &["GF(3)", "GF(5)", "GF(7)", "GF(9)"],
    rings: &["Z/9", "GF(3)[u]/u^2"],
    radicals: &["Z/9", "GF(3)[u]/u^2"],
    census: &["GF(3)", "GF(5)", "GF(7)", "GF(9)", "Z/9", "GF(3)[u]/u^2"],
    centralizers: &["GF(3)"],
    quat_exhaustive: &["Z/3"],
    quat_sampled: &[("Z/9", 10_000)],
    nil_sampled: &[],
    lifting: None,
    parallel: &["Z/9"],
};

const FULL: Plan = Plan {
    fields: &["GF(3)", "GF(5)", "GF(7)", "GF(9)"],
    rings: &["Z/9", "GF(3)[u]/u^2"],
    radicals: &["Z/9", "Z/27", "GF(9)[u]/u^2"],
    census: &[
        "GF(3)",
        "GF(5)",
        "GF(7)",
        "GF(9)",
        "Z/9",
        "GF(3)[u]/u^2",
        "Z/25",
        "Z/27",
    ],
    centralizers: &["GF(3)", "GF(5)"],
    quat_exhaustive: &["Z/3"],
    quat_sampled: &[("Z/9", 100_000)],
    nil_sampled: &[("Z/27", 100_000)],
    lifting: Some(("Z/27", 1_000)),
    parallel: &["Z/27"],
};

pub fn run(level: Level, fault: Option<Fault>) -> Vec<SuiteReport> {
    let plan = match level {
        Level::Quick => &QUICK,
        Level::Full => &FULL,
    };
    let ctx = Ctx { fault };
    let suites: [(&'static str, Suite); 9] = [
        ("ring-axioms", ring_axioms),
        ("nilpotency", nilpotency),
        ("conjugation", conjugation),
        ("square-roots", square_roots),
        ("factorization", factorization),
        ("quaternions", quaternions),
        ("census", census),
        ("centralizers", centralizers),
        ("lifting", lifting),
    ];
    suites
        .into_iter()
        .map(|(name, suite)| {
            let start = Instant::now();
            let outcome =
                catch_unwind(AssertUnwindSafe(|| suite(&ctx, plan))).unwrap_or_else(|panic| {
                    let msg = panic
                        .downcast_ref::<String>()
                        .cloned()
                        .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                        .unwrap_or_default();
                    Err(format!("panicked: {msg}"))
                });
            let (passed, checks, detail) = match outcome {
                Ok(checks) => (true, checks, None),
                Err(e) => (false, 0, Some(e)),
            };
            SuiteReport {
                name,
                passed,
                skipped: passed && checks == 0,
                checks,
                detail,
                elapsed: start.elapsed(),
            }
        })
        .collect()
}

fn small_rings(plan: &Plan) -> impl Iterator<Item = &'static str> + '_ {
    plan.fields.iter().chain(plan.rings).copied()
}

fn ring_axioms(ctx: &Ctx, plan: &Plan) -> Outcome {
    let mut checks = 0;
    for spec in small_rings(plan) {
        let r = ctx.ring(spec);
        for a in r.elements() {
            ensure(r.mul(a, r.one()) == a && r.add(a, r.zero()) == a, || {
                format!("{spec}: identities fail at {a}")
            })?;
            for b in r.elements() {
                ensure(r.mul(a, b) == r.mul(b, a), || {
                    format!("{spec}: {a}·{b} not commutative")
                })?;
                for c in r.elements() {
                    ensure(r.mul(r.mul(a, b), c) == r.mul(a, r.mul(b, c)), || {
                        format!("{spec}: associativity fails")
                    })?;
                    ensure(
                        r.mul(a, r.add(b, c)) == r.add(r.mul(a, b), r.mul(a, c)),
                        || format!("{spec}: distributivity fails"),
                    )?;
                    checks += 2;
                }
            }
        }
        for k in 0..=r.n() {
            let count = r.elements().filter(|&e| r.valuation(e) >= k).count() as u64;
            ensure(count == (r.q() as u64).pow(r.n() - k), || {
                format!("{spec}: |J^{k}| = {count}")
            })?;
        }
    }
    Ok(checks)
}

fn nilpotent_by_powers(r: &Ring, x: &Mat) -> bool {
    let m = r.matrices();
    m.pow(x, 2 * r.n()) == m.zero()
}

fn nilpotency(ctx: &Ctx, plan: &Plan) -> Outcome {
    let mut checks = 0;
    for spec in small_rings(plan) {
        let r = ctx.ring(spec);
        let m = r.matrices();
        let mut nilpotent = 0u64;
        for x in m.all() {
            let fast = m.is_nilpotent(&x);
            ensure(fast == nilpotent_by_powers(&r, &x), || {
                format!("{spec}: criterion disagrees at {x}")
            })?;
            nilpotent += fast as u64;
            checks += 1;
        }
        let expected = (r.q() as u64).pow(4 * r.n() - 2);
        ensure(nilpotent == expected, || {
            format!("{spec}: {nilpotent} nilpotents, expected {expected}")
        })?;
    }
    let mut rng = StdRng::seed_from_u64(0x5eed);
    for &(spec, samples) in plan.nil_sampled {
        let r = ctx.ring(spec);
        let m = r.matrices();
        for _ in 0..samples {
            let x = m.at(std::array::from_fn(|_| rng.gen_range(0..r.size())));
            ensure(m.is_nilpotent(&x) == nilpotent_by_powers(&r, &x), || {
                format!("{spec}: criterion disagrees at {x}")
            })?;
            checks += 1;
        }
    }
    Ok(checks)
}

fn conjugation(ctx: &Ctx, plan: &Plan) -> Outcome {
    let mut checks = 0;
    for spec in small_rings(plan).filter(|s| ["GF(3)", "Z/9"].contains(s)) {
        let r = ctx.ring(spec);
        let m = r.matrices();
        for x in m.all() {
            let plus = m.add(&m.identity(), &x);
            ensure(m.det_one_plus(&x) == m.det(&plus), || {
                format!("{spec}: det(I+A) identity fails at {x}")
            })?;
            for t in r.elements() {
                ensure(
                    m.conj_by_u(t, &x) == m.conj(&m.upper(t), &x).map_err(|e| e.to_string())?,
                    || format!("{spec}: upper conjugation formula fails at {x}, t={t}"),
                )?;
                ensure(
                    m.conj_by_l(t, &x) == m.conj(&m.lower(t), &x).map_err(|e| e.to_string())?,
                    || format!("{spec}: lower conjugation formula fails at {x}, t={t}"),
                )?;
                checks += 2;
            }
        }
    }
    Ok(checks)
}

fn square_roots(ctx: &Ctx, plan: &Plan) -> Outcome {
    let mut checks = 0;
    for spec in plan.radicals {
        let r = ctx.ring(spec);
        let radical: Vec<_> = r.elements().filter(|&e| r.valuation(e) >= 1).collect();
        let mut image: Vec<u32> = radical
            .iter()
            .map(|&j| r.add(r.mul(j, j), r.mul(r.from_int(2), j)).index())
            .collect();
        image.sort_unstable();
        image.dedup();
        ensure(image.len() == radical.len(), || {
            format!("{spec}: x²+2x is not injective on J")
        })?;
        for &j in &radical {
            let s = r.sqrt_one_plus_j(j).map_err(|e| e.to_string())?;
            ensure(r.mul(s, s) == r.add(r.one(), j), || {
                format!("{spec}: sqrt(1+{j}) wrong")
            })?;
            checks += 1;
        }
    }
    Ok(checks)
}

fn factorization(ctx: &Ctx, plan: &Plan) -> Outcome {
    let mut checks = 0;
    for spec in small_rings(plan) {
        let r = ctx.ring(spec);
        let m = r.matrices();
        for u in r.elements().filter(|&u| r.is_unit(u)) {
            let inv = r.inv(u).map_err(|e| e.to_string())?;
            let w = m.diag_factorization(u).map_err(|e| e.to_string())?;
            ensure(
                m.evaluate_word(&w).map_err(|e| e.to_string())? == m.diag(u, inv),
                || format!("{spec}: diagonal word for {u} is wrong"),
            )?;
            checks += 1;
        }
        for x in m.all().filter(|x| m.is_unipotent(x)) {
            let w = m
                .factor_unipotent(&x)
                .map_err(|e| format!("{spec}: {x}: {e}"))?;
            ensure(m.evaluate_word(&w).map_err(|e| e.to_string())? == x, || {
                format!("{spec}: word for {x} is wrong")
            })?;
            ensure(w.len() <= 12, || format!("{spec}: word for {x} too long"))?;
            let shapes_ok = w.factors().iter().all(|f| match f {
                Factor::Central(c) => r.valuation(r.sub(*c, r.one())) >= 1,
                _ => true,
            });
            ensure(shapes_ok, || {
                format!("{spec}: central factor outside 1+J for {x}")
            })?;
            checks += 1;
        }
    }
    Ok(checks)
}

fn quaternions(ctx: &Ctx, plan: &Plan) -> Outcome {
    let mut checks = 0;
    let err = |e: crate::Error| e.to_string();
    for spec in plan.quat_exhaustive {
        let r = ctx.ring(spec);
        let (h, m) = (r.quaternions(), r.matrices());
        let iso = QuatMatIso::build(&r);
        ensure(iso.relations_hold(), || {
            format!("{spec}: relation images fail")
        })?;
        let all: Vec<_> = h.all().collect();
        let images: Vec<Mat> = all
            .iter()
            .map(|x| iso.to_matrix(x))
            .collect::<Result<_, _>>()
            .map_err(err)?;
        for (x, mx) in all.iter().zip(&images) {
            ensure(m.det(mx) == h.norm(x) && m.trace(mx) == h.trace(x), || {
                format!("{spec}: norm/trace mismatch at {x}")
            })?;
            for (y, my) in all.iter().zip(&images) {
                ensure(
                    iso.to_matrix(&h.mul(x, y)).map_err(err)? == m.mul(mx, my),
                    || format!("{spec}: not multiplicative"),
                )?;
                ensure(
                    iso.to_matrix(&h.add(x, y)).map_err(err)? == m.add(mx, my),
                    || format!("{spec}: not additive"),
                )?;
                checks += 2;
            }
        }
        let mut keys: Vec<[u32; 4]> = images.iter().map(Mat::indices).collect();
        keys.sort_unstable();
        keys.dedup();
        ensure(keys.len() == all.len(), || format!("{spec}: not injective"))?;
    }
    let mut rng = StdRng::seed_from_u64(0x9a7);
    for &(spec, samples) in plan.quat_sampled {
        let r = ctx.ring(spec);
        let (h, m) = (r.quaternions(), r.matrices());
        let iso = QuatMatIso::build(&r);
        ensure(iso.relations_hold(), || {
            format!("{spec}: relation images fail")
        })?;
        for x in h.all() {
            let back = iso
                .from_matrix(&iso.to_matrix(&x).map_err(err)?)
                .map_err(err)?;
            ensure(back == x, || format!("{spec}: round trip fails at {x}"))?;
        }
        for _ in 0..samples {
            let mut pick = || h.at(std::array::from_fn(|_| rng.gen_range(0..r.size())));
            let (x, y) = (pick(), pick());
            let lhs = iso.to_matrix(&h.mul(&x, &y)).map_err(err)?;
            ensure(
                lhs == m.mul(
                    &iso.to_matrix(&x).map_err(err)?,
                    &iso.to_matrix(&y).map_err(err)?,
                ),
                || format!("{spec}: not multiplicative at {x}, {y}"),
            )?;
            checks += 1;
        }
    }
    Ok(checks)
}

fn census(ctx: &Ctx, plan: &Plan) -> Outcome {
    let mut checks = 0;
    for spec in plan.census {
        let r = ctx.ring(spec);
        let p = partition_all(&r, &PartitionOptions::default()).map_err(|e| e.to_string())?;
        let brute = census_brute(&r, &p).map_err(|e| e.to_string())?;
        ensure(brute == census_formula(&r, true), || {
            format!("{spec}: brute census differs from formula")
        })?;
        checks += p.len() as u64;
    }
    for spec in plan.parallel {
        let r = ctx.ring(spec);
        let one = partition_all(&r, &PartitionOptions::default()).map_err(|e| e.to_string())?;
        let four = partition_all(
            &r,
            &PartitionOptions {
                threads: 4,
                ..PartitionOptions::default()
            },
        )
        .map_err(|e| e.to_string())?;
        ensure(one == four, || {
            format!("{spec}: parallel partition differs")
        })?;
        checks += 1;
    }
    Ok(checks)
}

fn centralizers(ctx: &Ctx, plan: &Plan) -> Outcome {
    let mut checks = 0;
    for spec in plan.centralizers {
        let r = ctx.ring(spec);
        let c = Classifier::new(&r);
        let q = r.q() as u128;
        for x in r.matrices().all() {
            let order = sl2_centralizer_order(&r, &x).map_err(|e| e.to_string())?;
            let expected = match c.orbit_type(&x) {
                OrbitType::Scalar => q * (q * q - 1),
                OrbitType::Split => q - 1,
                OrbitType::Ramified => 2 * q,
                OrbitType::Inert => q + 1,
            };
            ensure(order == expected, || {
                format!("{spec}: centralizer of {x} has order {order}")
            })?;
            let orbit = orbit_of(&r, &x).len() as u128;
            ensure(order * orbit == q * (q * q - 1), || {
                format!("{spec}: orbit-stabilizer fails at {x}")
            })?;
            checks += 1;
        }
    }
    Ok(checks)
}

fn lifting(ctx: &Ctx, plan: &Plan) -> Outcome {
    let Some((spec, samples)) = plan.lifting else {
        return Ok(0);
    };
    let r = ctx.ring(spec);
    let f = r.residue_field();
    let c = Classifier::new(&r);
    let (m, fm) = (r.matrices(), f.matrices());
    let factor = (r.q() as usize).pow(2 * (r.n() - 1));
    let mut rng = StdRng::seed_from_u64(0x11f7);
    let mut checks = 0;
    while checks < samples {
        let x = m.at(std::array::from_fn(|_| rng.gen_range(0..r.size())));
        if c.traceless_valuation(&x) != 0 {
            continue;
        }
        let bar = fm.at(x.entries().map(|e| r.residue_index(e)));
        let (big, small) = (orbit_of(&r, &x).len(), orbit_of(&f, &bar).len());
        ensure(big == small * factor, || {
            format!("{spec}: orbit of {x} has {big} elements, residue orbit {small}")
        })?;
        checks += 1;
    }
    Ok(checks)
}

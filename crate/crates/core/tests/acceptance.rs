//! Acceptance matrix. Prints one line per criterion and exits non-zero if
//! any criterion fails.

use std::collections::{BTreeMap, HashSet, VecDeque};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng as _, SeedableRng};

use orbit_atlas::atlas::Atlas;
use orbit_atlas::census::compare_census;
use orbit_atlas::classify::{census_formula, census_total, Classifier, OrbitClass, OrbitType};
use orbit_atlas::enumerate::{
    census_brute, orbit_of, partition_all, sl2_centralizer_order, OrbitPartition, PartitionOptions,
};
use orbit_atlas::{Elem, Factor, Mat, Quat, QuatMatIso, Ring, RingSpec};

fn ring(s: &str) -> Ring {
    Ring::build(&s.parse::<RingSpec>().unwrap()).unwrap()
}

fn partition(r: &Ring, threads: usize) -> OrbitPartition {
    partition_all(
        r,
        &PartitionOptions {
            threads,
            ..PartitionOptions::default()
        },
    )
    .unwrap()
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

/// Matrix product written out entrywise, independent of the library's `mul`.
fn mat_mul(r: &Ring, x: &Mat, y: &Mat) -> Mat {
    let dot = |a: Elem, b: Elem, c: Elem, d: Elem| r.add(r.mul(a, b), r.mul(c, d));
    Mat {
        a: dot(x.a, y.a, x.b, y.c),
        b: dot(x.a, y.b, x.b, y.d),
        c: dot(x.c, y.a, x.d, y.c),
        d: dot(x.c, y.b, x.d, y.d),
    }
}

fn elementary(r: &Ring, upper: bool, t: Elem) -> Mat {
    let (z, o) = (r.zero(), r.one());
    if upper {
        Mat {
            a: o,
            b: t,
            c: z,
            d: o,
        }
    } else {
        Mat {
            a: o,
            b: z,
            c: t,
            d: o,
        }
    }
}

/// `E(t) A E(-t)` through plain products.
fn conj_oracle(r: &Ring, upper: bool, t: Elem, x: &Mat) -> Mat {
    mat_mul(
        r,
        &mat_mul(r, &elementary(r, upper, t), x),
        &elementary(r, upper, r.neg(t)),
    )
}

/// Orbit size by BFS over every `U(t)`, `L(t)` using plain products.
fn orbit_size_oracle(r: &Ring, x: &Mat) -> usize {
    let mut seen = HashSet::from([x.indices()]);
    let mut queue = VecDeque::from([*x]);
    while let Some(y) = queue.pop_front() {
        for t in r.elements() {
            for upper in [true, false] {
                let z = conj_oracle(r, upper, t, &y);
                if seen.insert(z.indices()) {
                    queue.push_back(z);
                }
            }
        }
    }
    seen.len()
}

fn nilpotent_oracle(r: &Ring, x: &Mat) -> bool {
    let mut p = *x;
    for _ in 1..2 * r.n() {
        p = mat_mul(r, &p, x);
    }
    p.entries().iter().all(|&e| e == r.zero())
}

fn census_key(rows: &[OrbitClass]) -> BTreeMap<(u32, OrbitType, u128), u128> {
    let mut m = BTreeMap::new();
    for r in rows {
        *m.entry((r.delta, r.orbit_type, r.orbit_size)).or_default() += r.orbit_count;
    }
    m
}

type Check = Result<String, String>;
type Criterion = fn() -> Check;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn c1_field_census() -> Check {
    let mut notes = Vec::new();
    for q in [3u64, 5, 7, 9] {
        let r = ring(&format!("GF({q})"));
        let (p, took) = timed(|| partition(&r, 1));
        let mut sizes: BTreeMap<u64, u64> = BTreeMap::new();
        for &s in &p.sizes {
            *sizes.entry(s).or_default() += 1;
        }
        let expected = BTreeMap::from([
            (1, q),
            (q * (q + 1), q * (q - 1) / 2),
            (q * (q - 1), q * (q - 1) / 2),
            ((q * q - 1) / 2, 2 * q),
        ]);
        ensure(sizes == expected, || format!("GF({q}) sizes {sizes:?}"))?;
        ensure(took < Duration::from_secs(10), || {
            format!("GF({q}) took {took:?}")
        })?;
        notes.push(format!("GF({q}) {} orbits {:.0?}", p.len(), took));
    }
    Ok(notes.join(", "))
}

fn c2_ring_census() -> Check {
    let mut notes = Vec::new();
    for (spec, limit) in [("Z/9", 1), ("Z/27", 60), ("Z/25", 60), ("GF(3)[u]/u^2", 60)] {
        let r = ring(spec);
        let ((brute, count), took) = timed(|| {
            let p = partition(&r, 1);
            (census_brute(&r, &p).unwrap(), p.len())
        });
        let formula = census_formula(&r, true);
        ensure(census_key(&brute) == census_key(&formula), || {
            format!("{spec}: brute {brute:?} vs formula {formula:?}")
        })?;
        let q4n = (r.q() as u128).pow(4 * r.n());
        ensure(
            census_total(&brute) == q4n && census_total(&formula) == q4n,
            || format!("{spec}: total is not q^4n"),
        )?;
        ensure(took < Duration::from_secs(limit), || {
            format!("{spec} took {took:?}")
        })?;
        notes.push(format!("{spec} {count} orbits {:.0?}", took));
    }
    let r = ring("Z/9");
    let p = partition(&r, 1);
    ensure(p.len() == 153, || format!("Z/9 has {} orbits", p.len()))?;
    use OrbitType::*;
    let expected = BTreeMap::from([
        ((2, Scalar, 1), 9),
        ((0, Split, 108), 27),
        ((0, Inert, 54), 27),
        ((0, Ramified, 36), 54),
        ((1, Split, 12), 9),
        ((1, Inert, 6), 9),
        ((1, Ramified, 4), 18),
    ]);
    ensure(
        census_key(&census_brute(&r, &p).unwrap()) == expected,
        || "Z/9 rows differ from the stated table".into(),
    )?;
    Ok(notes.join(", "))
}

fn c3_statement_discrepancy() -> Check {
    let r = ring("Z/9");
    let bare = census_formula(&r, false);
    let brute = census_brute(&r, &partition(&r, 1)).unwrap();
    let cmp = compare_census(&bare, &brute);
    ensure(census_total(&bare) == 6405, || {
        format!("bare total {}", census_total(&bare))
    })?;
    ensure(!cmp.equal && cmp.exit_code() == 1, || {
        "comparison did not report a mismatch".into()
    })?;
    Ok(format!(
        "bare total 6405 vs 6561, {} differing rows, exit 1",
        cmp.diffs.len()
    ))
}

fn c4_cross_family() -> Check {
    let (a, b) = (ring("Z/9"), ring("GF(3)[u]/u^2"));
    let ca = census_brute(&a, &partition(&a, 1)).unwrap();
    let cb = census_brute(&b, &partition(&b, 1)).unwrap();
    ensure(ca == cb, || "census tables differ".into())?;
    Ok(format!("{} identical rows", ca.len()))
}

fn c5_factorization() -> Check {
    let start = Instant::now();
    let mut total = 0;
    for spec in ["Z/9", "GF(3)", "GF(5)", "GF(7)", "GF(9)"] {
        let r = ring(spec);
        let m = r.matrices();
        let mut count = 0;
        for x in m
            .all()
            .filter(|x| nilpotent_oracle(&r, &m.sub(x, &m.identity())))
        {
            let w = m
                .factor_unipotent(&x)
                .map_err(|e| format!("{spec} {x}: {e}"))?;
            let mut acc = m.identity();
            for f in w.factors() {
                let g = match *f {
                    Factor::Upper(t) => elementary(&r, true, t),
                    Factor::Lower(t) => elementary(&r, false, t),
                    Factor::Central(c) => {
                        ensure(r.valuation(r.sub(c, r.one())) >= 1, || {
                            format!("{spec} {x}: central factor {c} not in 1+J")
                        })?;
                        m.scalar(c)
                    }
                };
                acc = mat_mul(&r, &acc, &g);
            }
            ensure(acc == x, || {
                format!("{spec}: word for {x} evaluates to {acc}")
            })?;
            ensure(w.len() <= 12, || {
                format!("{spec}: word for {x} has {} factors", w.len())
            })?;
            count += 1;
        }
        if spec == "Z/9" {
            ensure(count == 729, || format!("Z/9 has {count} unipotents"))?;
        }
        total += count;
    }
    let took = start.elapsed();
    ensure(took < Duration::from_secs(10), || format!("took {took:?}"))?;
    Ok(format!("{total} unipotents {took:.0?}"))
}

fn small_specs() -> Vec<RingSpec> {
    let mut out = Vec::new();
    for p in (3u32..=81)
        .step_by(2)
        .filter(|&p| (2..p).take_while(|d| d * d <= p).all(|d| p % d != 0))
    {
        for r in 1..=4u32 {
            for n in 1..=4u32 {
                if (p as u64).checked_pow(r * n).is_none_or(|s| s > 81) {
                    continue;
                }
                if r == 1 {
                    out.push(RingSpec::integers_mod(p, n));
                }
                out.push(RingSpec::truncated(p, r, n));
                out.push(RingSpec::galois(p, n, r));
            }
        }
    }
    out
}

fn c6_diagonal_word() -> Check {
    let specs = small_specs();
    let mut units = 0;
    for spec in &specs {
        let r = Ring::build(spec).map_err(|e| format!("{spec}: {e}"))?;
        let m = r.matrices();
        for u in r.elements().filter(|&u| r.is_unit(u)) {
            let w = m.diag_factorization(u).map_err(|e| e.to_string())?;
            ensure(w.len() == 4, || {
                format!("{spec}: word for {u} has {} factors", w.len())
            })?;
            let inv = r.inv(u).unwrap();
            ensure(r.mul(u, inv) == r.one(), || {
                format!("{spec}: bad inverse of {u}")
            })?;
            let value = w
                .factors()
                .iter()
                .fold(m.identity(), |acc, f| mat_mul(&r, &acc, &f.matrix(&m)));
            let target = Mat {
                a: u,
                b: r.zero(),
                c: r.zero(),
                d: inv,
            };
            ensure(value == target, || {
                format!("{spec}: word for {u} evaluates to {value}")
            })?;
            units += 1;
        }
    }
    Ok(format!("{units} units across {} rings", specs.len()))
}

fn c7_nilpotency() -> Check {
    let r = ring("Z/9");
    let m = r.matrices();
    for x in m.all() {
        ensure(m.is_nilpotent(&x) == nilpotent_oracle(&r, &x), || {
            format!("Z/9 disagrees at {x}")
        })?;
    }
    let r = ring("Z/27");
    let m = r.matrices();
    let mut rng = StdRng::seed_from_u64(7);
    let samples = 100_000;
    let mut hits = 0;
    for _ in 0..samples {
        let x = m.at(std::array::from_fn(|_| rng.gen_range(0..27)));
        let fast = m.is_nilpotent(&x);
        ensure(fast == nilpotent_oracle(&r, &x), || {
            format!("Z/27 disagrees at {x}")
        })?;
        hits += fast as u32;
    }
    Ok(format!(
        "6561 exhaustive on Z/9, {samples} random on Z/27 ({hits} nilpotent)"
    ))
}

fn c8_det_and_conjugation() -> Check {
    let mut pairs = 0;
    for spec in ["GF(3)", "Z/9"] {
        let r = ring(spec);
        let m = r.matrices();
        for x in m.all() {
            let ipx = Mat {
                a: r.add(r.one(), x.a),
                b: x.b,
                c: x.c,
                d: r.add(r.one(), x.d),
            };
            let det = r.sub(r.mul(ipx.a, ipx.d), r.mul(ipx.b, ipx.c));
            ensure(m.det_one_plus(&x) == det, || {
                format!("{spec}: det(I+A) fails at {x}")
            })?;
            for t in r.elements() {
                ensure(m.conj_by_u(t, &x) == conj_oracle(&r, true, t, &x), || {
                    format!("{spec}: U({t}) at {x}")
                })?;
                ensure(m.conj_by_l(t, &x) == conj_oracle(&r, false, t, &x), || {
                    format!("{spec}: L({t}) at {x}")
                })?;
                pairs += 1;
            }
        }
    }
    Ok(format!("{pairs} (t, A) pairs"))
}

fn c9_square_roots() -> Check {
    let mut notes = Vec::new();
    for spec in ["Z/9", "Z/27", "GF(9)[u]/u^2"] {
        let r = ring(spec);
        let radical: Vec<Elem> = r.elements().filter(|&e| r.valuation(e) >= 1).collect();
        let image: HashSet<Elem> = radical
            .iter()
            .map(|&x| r.add(r.mul(x, x), r.add(x, x)))
            .collect();
        ensure(
            image.len() == radical.len() && image.iter().all(|&y| r.valuation(y) >= 1),
            || format!("{spec}: x^2+2x is not a bijection of J"),
        )?;
        for &j in &radical {
            let s = r.sqrt_one_plus_j(j).map_err(|e| e.to_string())?;
            ensure(r.mul(s, s) == r.add(r.one(), j), || {
                format!("{spec}: sqrt(1+{j}) = {s}")
            })?;
        }
        notes.push(format!("{spec} |J|={}", radical.len()));
    }
    Ok(notes.join(", "))
}

/// Hamilton product with `i^2 = j^2 = -1`, `k = ij`.
fn hamilton(r: &Ring, x: &Quat, y: &Quat) -> Quat {
    let [a1, b1, c1, d1] = x.coefficients();
    let [a2, b2, c2, d2] = y.coefficients();
    let m = |a, b| r.mul(a, b);
    let sum = |v: [Elem; 4], s: [bool; 4]| {
        v.iter().zip(s).fold(
            r.zero(),
            |acc, (&e, plus)| if plus { r.add(acc, e) } else { r.sub(acc, e) },
        )
    };
    r.quaternions().at([
        sum(
            [m(a1, a2), m(b1, b2), m(c1, c2), m(d1, d2)],
            [true, false, false, false],
        )
        .index(),
        sum(
            [m(a1, b2), m(b1, a2), m(c1, d2), m(d1, c2)],
            [true, true, true, false],
        )
        .index(),
        sum(
            [m(a1, c2), m(b1, d2), m(c1, a2), m(d1, b2)],
            [true, false, true, true],
        )
        .index(),
        sum(
            [m(a1, d2), m(b1, c2), m(c1, b2), m(d1, a2)],
            [true, true, false, true],
        )
        .index(),
    ])
}

fn c10_quaternions() -> Check {
    let r = ring("Z/3");
    let (h, m) = (r.quaternions(), r.matrices());
    let iso = QuatMatIso::build(&r);
    let all: Vec<Quat> = h.all().collect();
    let images: Vec<Mat> = all.iter().map(|x| iso.to_matrix(x).unwrap()).collect();
    let distinct: HashSet<[u32; 4]> = images.iter().map(Mat::indices).collect();
    ensure(distinct.len() == 81, || "Z/3: not bijective".into())?;
    for (x, mx) in all.iter().zip(&images) {
        let norm = [x.r1, x.r2, x.r3, x.r4]
            .iter()
            .fold(r.zero(), |acc, &c| r.add(acc, r.mul(c, c)));
        ensure(m.det(mx) == norm, || format!("Z/3: det != norm at {x}"))?;
        ensure(m.trace(mx) == r.add(x.r1, x.r1), || {
            format!("Z/3: trace != 2r1 at {x}")
        })?;
        for (y, my) in all.iter().zip(&images) {
            ensure(
                iso.to_matrix(&hamilton(&r, x, y)).unwrap() == mat_mul(&r, mx, my),
                || format!("Z/3: product {x}·{y}"),
            )?;
            ensure(
                iso.to_matrix(&h.add(x, y)).unwrap() == m.add(mx, my),
                || format!("Z/3: sum {x}+{y}"),
            )?;
        }
    }

    let r = ring("Z/9");
    let (h, m) = (r.quaternions(), r.matrices());
    let iso = QuatMatIso::build(&r);
    let [mi, mj, mk] = iso.images();
    let minus_one = m.scalar(r.neg(r.one()));
    ensure(
        mat_mul(&r, &mi, &mi) == minus_one && mat_mul(&r, &mj, &mj) == minus_one,
        || "Z/9: i^2 or j^2 != -1".into(),
    )?;
    ensure(
        mat_mul(&r, &mi, &mj) == mk && mat_mul(&r, &mj, &mi) == m.neg(&mk),
        || "Z/9: ij != k or ji != -k".into(),
    )?;
    let mut seen = HashSet::new();
    for x in h.all() {
        let mx = iso.to_matrix(&x).unwrap();
        ensure(seen.insert(mx.indices()), || {
            format!("Z/9: collision at {x}")
        })?;
        ensure(iso.from_matrix(&mx).unwrap() == x, || {
            format!("Z/9: round trip fails at {x}")
        })?;
    }
    ensure(seen.len() == 6561, || "Z/9: not surjective".into())?;
    let mut rng = StdRng::seed_from_u64(10);
    let samples = 100_000;
    for _ in 0..samples {
        let mut pick = || h.at(std::array::from_fn(|_| rng.gen_range(0..9)));
        let (x, y) = (pick(), pick());
        let lhs = iso.to_matrix(&hamilton(&r, &x, &y)).unwrap();
        ensure(
            lhs == mat_mul(&r, &iso.to_matrix(&x).unwrap(), &iso.to_matrix(&y).unwrap()),
            || format!("Z/9: product {x}·{y}"),
        )?;
    }
    Ok(format!(
        "Z/3 6561 pairs exhaustive, Z/9 bijective + {samples} sampled products"
    ))
}

fn c11_centralizers() -> Check {
    let mut notes = Vec::new();
    for q in [3u128, 5] {
        let r = ring(&format!("GF({q})"));
        let c = Classifier::new(&r);
        let m = r.matrices();
        let sl2 = q * (q * q - 1);
        for x in m.all().filter(|x| !m.is_scalar(x)) {
            let order = sl2_centralizer_order(&r, &x).map_err(|e| e.to_string())?;
            let expected = match c.orbit_type(&x) {
                OrbitType::Split => q - 1,
                OrbitType::Ramified => 2 * q,
                OrbitType::Inert => q + 1,
                OrbitType::Scalar => unreachable!(),
            };
            ensure(order == expected, || {
                format!("GF({q}): |C(A)| = {order} at {x}")
            })?;
            let orbit = orbit_size_oracle(&r, &x) as u128;
            ensure(order * orbit == sl2, || {
                format!("GF({q}): {order}·{orbit} != {sl2} at {x}")
            })?;
        }
        notes.push(format!("GF({q}) product {sl2}"));
    }
    Ok(notes.join(", "))
}

fn c12_lifting_law() -> Check {
    let r = ring("Z/27");
    let f = ring("GF(3)");
    let c = Classifier::new(&r);
    let (m, fm) = (r.matrices(), f.matrices());
    let mut rng = StdRng::seed_from_u64(12);
    let (mut checked, mut oracle_checked) = (0, 0);
    while checked < 1000 {
        let x = m.at(std::array::from_fn(|_| rng.gen_range(0..27)));
        if m.is_scalar(&x) || c.traceless_valuation(&x) != 0 {
            continue;
        }
        let bar = fm.at(x.indices().map(|i| i % 3));
        let small = orbit_size_oracle(&f, &bar);
        let big = if checked < 100 {
            oracle_checked += 1;
            orbit_size_oracle(&r, &x)
        } else {
            orbit_of(&r, &x).len()
        };
        ensure(big == small * 81, || {
            format!("{x}: orbit {big}, residue orbit {small}")
        })?;
        checked += 1;
    }
    Ok(format!(
        "{checked} samples ({oracle_checked} by plain-product BFS)"
    ))
}

fn c13_performance() -> Check {
    let r = ring("Z/27");
    let (one, t1) = timed(|| partition(&r, 1));
    let (four, t4) = timed(|| partition(&r, 4));
    ensure(one.total() == 531_441, || {
        format!("sizes sum to {}", one.total())
    })?;
    ensure(t1 < Duration::from_secs(60), || {
        format!("single-threaded {t1:?}")
    })?;
    ensure(t4 < Duration::from_secs(20), || format!("4 workers {t4:?}"))?;
    let text1 = Atlas::from_partition(&r, &one).unwrap().to_text();
    let text4 = Atlas::from_partition(&r, &four).unwrap().to_text();
    ensure(text1.as_bytes() == text4.as_bytes(), || {
        "atlas output differs between worker counts".into()
    })?;
    Ok(format!(
        "{} orbits, 1 worker {t1:.0?}, 4 workers {t4:.0?}, identical atlas",
        one.len()
    ))
}

fn main() {
    let criteria: [(&str, Criterion); 13] = [
        ("field census", c1_field_census),
        ("ring census", c2_ring_census),
        ("statement discrepancy", c3_statement_discrepancy),
        ("cross-family census", c4_cross_family),
        ("unipotent factorization", c5_factorization),
        ("diagonal word", c6_diagonal_word),
        ("nilpotency criterion", c7_nilpotency),
        ("det identity and conjugation", c8_det_and_conjugation),
        ("square roots in 1+J", c9_square_roots),
        ("quaternion transport", c10_quaternions),
        ("centralizer orders", c11_centralizers),
        ("lifting law", c12_lifting_law),
        ("partition performance", c13_performance),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome =
            catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(note) => println!("PASS {:>2} {name} [{secs:.2}s]: {note}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name} [{secs:.2}s]: {why}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}

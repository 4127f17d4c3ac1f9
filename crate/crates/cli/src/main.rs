use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::rngs::StdRng;
use rand::{Rng as _, SeedableRng};
use serde_json::{json, Value};

use orbit_atlas::atlas::Atlas;
use orbit_atlas::census::{self, compare_census, CensusComparison};
use orbit_atlas::classify::{census_formula, Classifier, OrbitClass};
use orbit_atlas::enumerate::{
    census_brute, orbit_of_within, partition_all, state_count, MatKey, PartitionOptions,
    DEFAULT_BUDGET,
};
use orbit_atlas::literal::{parse_literal, parse_matrix, Literal};
use orbit_atlas::selftest::{self, Fault, Level};
use orbit_atlas::{Mat, QuatMatIso, Ring, RingSpec};

/// Unipotent conjugation orbits of 2x2 matrices and quaternions over finite local rings.
#[derive(Parser, Debug)]
#[command(name = "orbit-atlas", version)]
struct Cli {
    /// Write the report to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the basic invariants of a ring.
    RingInfo {
        #[command(flatten)]
        ring: RingArgs,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Tabulate the orbit census by formula, by brute force, or both and compare.
    Census {
        #[command(flatten)]
        ring: RingArgs,
        /// Defaults to `both` when M_2(R) has at most 2^20 elements, else `formula`.
        #[arg(long, value_enum)]
        method: Option<Method>,
        #[arg(long, value_enum, default_value_t = Format::Md)]
        format: Format,
        /// Count each stratum once instead of once per scalar part modulo J^δ.
        #[arg(long)]
        no_scalar_multiplicity: bool,
        #[command(flatten)]
        enumeration: EnumerationArgs,
        /// Also save the brute-force orbit atlas (gzip when the name ends in .gz).
        #[arg(long)]
        atlas: Option<PathBuf>,
    },
    /// Canonical form, type and orbit size of a matrix or quaternion.
    Classify {
        #[command(flatten)]
        ring: RingArgs,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Enumerate the orbit of a matrix or quaternion and check it against the formula.
    Orbit {
        #[command(flatten)]
        ring: RingArgs,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// List every orbit member.
        #[arg(long)]
        members: bool,
        /// Refuse orbits predicted to be larger than this.
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Write a unipotent matrix as a word in elementary and central factors.
    Factor {
        #[command(flatten)]
        ring: RingArgs,
    },
    /// Verify the quaternion-matrix isomorphism.
    IsoCheck {
        #[command(flatten)]
        ring: RingArgs,
        /// Number of random pairs; the check is exhaustive when all pairs fit in 2^20.
        #[arg(long, default_value_t = 100_000)]
        sample: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run the built-in invariant suites.
    Selftest {
        #[arg(value_enum, default_value_t = LevelArg::Quick)]
        level: LevelArg,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
}

#[derive(Args, Debug)]
struct RingArgs {
    #[arg(long = "ring", help = "Ring, e.g. Z/3^2, GF(9), GF(3)[u]/u^2, GR(9,2)")]
    flag: Option<String>,
    /// Ring (unless --ring is given) followed by a literal where one is needed.
    positional: Vec<String>,
}

#[derive(Args, Debug)]
struct EnumerationArgs {
    /// Maximum number of matrices to enumerate.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    #[arg(long, env = "ORBIT_ATLAS_THREADS", default_value_t = 1)]
    threads: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Method {
    Formula,
    Brute,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
    Md,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum LevelArg {
    Quick,
    Full,
}

/// Report text plus exit status (0 pass, 1 mismatch).
struct Outcome {
    report: String,
    status: u8,
}

impl Outcome {
    fn pass(report: String) -> Outcome {
        Outcome { report, status: 0 }
    }

    fn check(report: String, ok: bool) -> Outcome {
        Outcome {
            report,
            status: if ok { 0 } else { 1 },
        }
    }
}

impl RingArgs {
    /// The ring and the remaining positional arguments.
    fn resolve(&self, literals: usize) -> Result<(Ring, Vec<&str>)> {
        let mut rest: Vec<&str> = self.positional.iter().map(String::as_str).collect();
        let spec = match &self.flag {
            Some(s) => s.as_str(),
            None if !rest.is_empty() => rest.remove(0),
            None => bail!("missing ring spec (positional or --ring)"),
        };
        if rest.len() != literals {
            bail!(
                "expected {literals} literal argument(s) after the ring, got {}",
                rest.len()
            );
        }
        let spec: RingSpec = spec
            .parse()
            .with_context(|| format!("invalid ring spec {spec:?}"))?;
        let ring = Ring::build(&spec).with_context(|| format!("invalid ring spec {spec}"))?;
        Ok((ring, rest))
    }
}

fn text_or_json(format: Format) -> Result<bool> {
    match format {
        Format::Text => Ok(false),
        Format::Json => Ok(true),
        other => bail!("format {other:?} is only available for census"),
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json values serialize")
}

fn ring_info(ring: &Ring, json: bool) -> Outcome {
    let ideals: Vec<u64> = (0..=ring.n())
        .map(|k| ring.ideal_power(k).count() as u64)
        .collect();
    if json {
        return Outcome::pass(pretty(&json!({
            "ring": ring.spec().to_string(),
            "family": ring.family(),
            "p": ring.p(),
            "r": ring.r(),
            "q": ring.q(),
            "n": ring.n(),
            "size": ring.size(),
            "x": ring.radical_generator().index(),
            "g": ring.teichmuller_gen().index(),
            "ideal_sizes": ideals,
            "units": ring.unit_count(),
        })));
    }
    let ideals: Vec<String> = ideals
        .iter()
        .enumerate()
        .map(|(k, s)| format!("|J^{k}|={s}"))
        .collect();
    Outcome::pass(format!(
        "ring  {}\nq     {}\nn     {}\n|R|   {}\nx     {}\ng     {}\nJ     {}\nunits {}",
        ring.spec(),
        ring.q(),
        ring.n(),
        ring.size(),
        ring.radical_generator(),
        ring.teichmuller_gen(),
        ideals.join(" "),
        ring.unit_count(),
    ))
}

fn render_rows(rows: &[OrbitClass], format: Format) -> String {
    match format {
        Format::Json => census::to_json(rows),
        Format::Csv => census::to_csv(rows).trim_end().to_owned(),
        Format::Md | Format::Text => census::to_markdown(rows).trim_end().to_owned(),
    }
}

fn describe_comparison(cmp: &CensusComparison) -> String {
    if cmp.equal {
        return format!("formula and brute force agree (total {})", cmp.left_total);
    }
    let mut out = format!(
        "MISMATCH: formula total {}, brute-force total {}",
        cmp.left_total, cmp.right_total
    );
    for d in &cmp.diffs {
        out.push_str(&format!(
            "\n  delta={} type={} size={}: formula {} vs brute {}",
            d.delta, d.orbit_type, d.orbit_size, d.left_count, d.right_count
        ));
    }
    out
}

fn census_cmd(
    ring: &Ring,
    method: Option<Method>,
    format: Format,
    multiplicity: bool,
    enumeration: &EnumerationArgs,
    atlas: Option<&PathBuf>,
) -> Result<Outcome> {
    let method = method.unwrap_or(if state_count(ring) <= 1 << 20 {
        Method::Both
    } else {
        Method::Formula
    });
    let formula = census_formula(ring, multiplicity);
    if method == Method::Formula {
        if atlas.is_some() {
            bail!("--atlas needs --method brute or both");
        }
        return Ok(Outcome::pass(render_rows(&formula, format)));
    }
    let options = PartitionOptions {
        budget: enumeration.budget,
        threads: enumeration.threads,
        ..PartitionOptions::default()
    };
    let partition = partition_all(ring, &options)?;
    if let Some(path) = atlas {
        Atlas::from_partition(ring, &partition)?
            .save(path)
            .with_context(|| format!("writing {}", path.display()))?;
    }
    let brute = census_brute(ring, &partition)?;
    if method == Method::Brute {
        return Ok(Outcome::pass(render_rows(&brute, format)));
    }
    let cmp = compare_census(&formula, &brute);
    let report = if format == Format::Json {
        pretty(&json!({ "formula": formula, "brute": brute, "comparison": cmp }))
    } else {
        eprintln!("{}", describe_comparison(&cmp));
        render_rows(&formula, format)
    };
    Ok(Outcome::check(report, cmp.equal))
}

/// Turns a literal into a matrix, transporting quaternions through the isomorphism.
fn as_matrix(ring: &Ring, literal: &str) -> Result<(Literal, Mat)> {
    let lit = parse_literal(ring, literal)?;
    let m = match lit {
        Literal::Matrix(m) => m,
        Literal::Quaternion(q) => QuatMatIso::build(ring).to_matrix(&q)?,
    };
    Ok((lit, m))
}

fn classify_cmd(ring: &Ring, literal: &str, json: bool) -> Result<Outcome> {
    let (lit, m) = as_matrix(ring, literal)?;
    let c = Classifier::new(ring);
    let inv = c.orbit_invariants(&m);
    let size = c.orbit_size_formula(&m);
    let form = c.canonical_reduce(&m).ok();
    if json {
        let canonical = form.as_ref().map(|f| {
            json!({
                "d": f.d.index(),
                "delta": f.delta,
                "residual": f.residual.indices(),
                "residual_ring": f.residual_ring.spec().to_string(),
                "reduction_word": serde_json::from_str::<Value>(&f.reduction_word.to_json()).expect("word json"),
            })
        });
        return Ok(Outcome::pass(pretty(&json!({
            "input": lit.to_string(),
            "matrix": m.indices(),
            "delta": inv.delta,
            "type": inv.orbit_type,
            "orbit_size": size,
            "invariants": {
                "trace": inv.trace.index(),
                "det": inv.det.index(),
                "delta": inv.delta,
                "d_mod_j_delta": inv.d_mod_j_delta.index(),
                "type": inv.orbit_type,
            },
            "canonical_form": canonical,
        }))));
    }
    let mut out = String::new();
    if let Literal::Quaternion(q) = lit {
        out.push_str(&format!("quaternion {q} -> matrix {m}\n"));
    } else {
        out.push_str(&format!("matrix {m}\n"));
    }
    out.push_str(&format!(
        "delta {}\ntype {}\norbit size {size}\n",
        inv.delta, inv.orbit_type
    ));
    out.push_str(&format!(
        "invariants trace={} det={} d mod J^delta={}\n",
        inv.trace, inv.det, inv.d_mod_j_delta
    ));
    match form {
        Some(f) => out.push_str(&format!(
            "canonical form d={} residual {} over {}\nreduction word {}",
            f.d,
            f.residual,
            f.residual_ring.spec(),
            f.reduction_word.to_json()
        )),
        None => out.push_str("canonical form scalar"),
    }
    Ok(Outcome::pass(out))
}

fn orbit_cmd(
    ring: &Ring,
    literal: &str,
    json: bool,
    members: bool,
    budget: u64,
) -> Result<Outcome> {
    let (_, m) = as_matrix(ring, literal)?;
    let c = Classifier::new(ring);
    let orbit = orbit_of_within(ring, &m, budget)?;
    let formula = c.orbit_size_formula(&m);
    let rep = orbit[0].decode(ring)?;
    let ok = orbit.len() as u128 == formula;
    let listed: Vec<Mat> = if members {
        orbit
            .iter()
            .map(|k| k.decode(ring))
            .collect::<Result<_, _>>()?
    } else {
        Vec::new()
    };
    let report = if json {
        let mut v = json!({
            "matrix": m.indices(),
            "orbit_size": orbit.len(),
            "formula_size": formula,
            "representative": { "key": orbit[0], "matrix": rep.indices() },
            "delta": c.traceless_valuation(&m),
            "type": c.orbit_type(&m),
        });
        if members {
            v["members"] = json!(listed.iter().map(Mat::indices).collect::<Vec<_>>());
        }
        pretty(&v)
    } else {
        let mut out = format!(
            "matrix {m}\norbit size {} (formula {formula})\nrepresentative {rep} (key {})\ndelta {}\ntype {}",
            orbit.len(),
            orbit[0],
            c.traceless_valuation(&m),
            c.orbit_type(&m)
        );
        for x in &listed {
            out.push_str(&format!("\n  {x}"));
        }
        out
    };
    Ok(Outcome::check(report, ok))
}

fn factor_cmd(ring: &Ring, literal: &str) -> Result<Outcome> {
    let m = parse_matrix(ring, literal)?;
    let mats = ring.matrices();
    let word = mats.factor_unipotent(&m)?;
    let back = mats.evaluate_word(&word)?;
    if back != m {
        bail!("internal error: word evaluates to {back}, not {m}");
    }
    Ok(Outcome::pass(word.to_json()))
}

fn iso_check(ring: &Ring, sample: u64, seed: u64) -> Result<Outcome> {
    use orbit_atlas::Quat;
    let iso = QuatMatIso::build(ring);
    let (h, mats) = (ring.quaternions(), ring.matrices());
    let mut lines = Vec::new();
    let mut ok = true;
    let mut record = |name: &str, pass: bool, detail: String| {
        ok &= pass;
        lines.push(format!(
            "{} {name}: {detail}",
            if pass { "PASS" } else { "FAIL" }
        ));
    };

    let (a, b) = iso.pair();
    record(
        "relations",
        iso.relations_hold(),
        format!("a={a} b={b}, i^2 = j^2 = -1, ij = -ji = k"),
    );

    let all: Vec<Quat> = h.all().collect();
    let images: Vec<Mat> = all
        .iter()
        .map(|x| iso.to_matrix(x))
        .collect::<Result<_, _>>()?;
    let mut keys: Vec<MatKey> = images.iter().map(|m| MatKey::encode(ring, m)).collect();
    keys.sort_unstable();
    keys.dedup();
    let round_trip = all
        .iter()
        .zip(&images)
        .all(|(x, m)| iso.from_matrix(m).as_ref() == Ok(x));
    record(
        "bijective",
        keys.len() as u128 == state_count(ring) && round_trip,
        format!(
            "{} distinct images of {} quaternions",
            keys.len(),
            all.len()
        ),
    );
    let norms = all
        .iter()
        .zip(&images)
        .all(|(x, m)| mats.det(m) == h.norm(x) && mats.trace(m) == h.trace(x));
    record(
        "norm-trace",
        norms,
        "det = norm and trace = 2*r1 on every element".into(),
    );

    let pairs = (all.len() as u128).pow(2);
    let hom = |i: usize, j: usize| {
        let (x, y) = (&all[i], &all[j]);
        iso.to_matrix(&h.mul(x, y)).ok() == Some(mats.mul(&images[i], &images[j]))
            && iso.to_matrix(&h.add(x, y)).ok() == Some(mats.add(&images[i], &images[j]))
    };
    let (checked, hom_ok) = if pairs <= 1 << 20 {
        let n = all.len();
        (pairs as u64, (0..n).all(|i| (0..n).all(|j| hom(i, j))))
    } else {
        let mut rng = StdRng::seed_from_u64(seed);
        let mut next = || rng.gen_range(0..all.len());
        (sample, (0..sample).all(|_| hom(next(), next())))
    };
    let mode = if pairs <= 1 << 20 {
        "exhaustive"
    } else {
        "sampled"
    };
    record("homomorphism", hom_ok, format!("{checked} pairs ({mode})"));

    Ok(Outcome::check(lines.join("\n"), ok))
}

fn selftest_cmd(level: LevelArg, json: bool, inject_fault: bool) -> Outcome {
    let level = match level {
        LevelArg::Quick => Level::Quick,
        LevelArg::Full => Level::Full,
    };
    let reports = selftest::run(level, inject_fault.then_some(Fault::CorruptMulTable));
    let ok = reports.iter().all(|r| r.passed);
    let report = if json {
        serde_json::to_string_pretty(&reports).expect("reports serialize")
    } else {
        reports
            .iter()
            .map(|r| {
                let status = match (r.passed, r.skipped) {
                    (true, true) => "SKIP",
                    (true, false) => "PASS",
                    (false, _) => "FAIL",
                };
                let detail = r
                    .detail
                    .as_deref()
                    .map(|d| format!(" ({d})"))
                    .unwrap_or_default();
                format!(
                    "{status} {:<14} {:>9} checks {:>8.3}s{detail}",
                    r.name,
                    r.checks,
                    r.elapsed.as_secs_f64()
                )
            })
            .collect::<Vec<_>>()
            .join("\n")
    };
    Outcome::check(report, ok)
}

fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::RingInfo { ring, format } => {
            let json = text_or_json(*format)?;
            Ok(ring_info(&ring.resolve(0)?.0, json))
        }
        Command::Census {
            ring,
            method,
            format,
            no_scalar_multiplicity,
            enumeration,
            atlas,
        } => {
            if *format == Format::Text {
                bail!("census supports --format json, csv or md");
            }
            let (ring, _) = ring.resolve(0)?;
            census_cmd(
                &ring,
                *method,
                *format,
                !no_scalar_multiplicity,
                enumeration,
                atlas.as_ref(),
            )
        }
        Command::Classify { ring, format } => {
            let json = text_or_json(*format)?;
            let (ring, lit) = ring.resolve(1)?;
            classify_cmd(&ring, lit[0], json)
        }
        Command::Orbit {
            ring,
            format,
            members,
            budget,
        } => {
            let json = text_or_json(*format)?;
            let (ring, lit) = ring.resolve(1)?;
            orbit_cmd(&ring, lit[0], json, *members, *budget)
        }
        Command::Factor { ring } => {
            let (ring, lit) = ring.resolve(1)?;
            factor_cmd(&ring, lit[0])
        }
        Command::IsoCheck { ring, sample, seed } => iso_check(&ring.resolve(0)?.0, *sample, *seed),
        Command::Selftest {
            level,
            format,
            inject_fault,
        } => Ok(selftest_cmd(*level, text_or_json(*format)?, *inject_fault)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            let text = format!("{}\n", outcome.report);
            match &cli.out {
                Some(path) => {
                    if let Err(e) = fs::write(path, text) {
                        eprintln!("error: writing {}: {e}", path.display());
                        return ExitCode::from(2);
                    }
                }
                None => print!("{text}"),
            }
            ExitCode::from(outcome.status)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

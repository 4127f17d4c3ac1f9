//! Census tables: comparison and the JSON / CSV / markdown emitters.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::classify::{census_total, sort_census, OrbitClass, OrbitType};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RowDiff {
    pub delta: u32,
    #[serde(rename = "type")]
    pub orbit_type: OrbitType,
    pub orbit_size: u128,
    pub left_count: u128,
    pub right_count: u128,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CensusComparison {
    pub equal: bool,
    pub left_total: u128,
    pub right_total: u128,
    pub diffs: Vec<RowDiff>,
}

impl CensusComparison {
    /// Process exit status: 0 when equal, 1 on mismatch.
    pub fn exit_code(&self) -> i32 {
        if self.equal {
            0
        } else {
            1
        }
    }
}

/// Compares two censuses as multisets of `(δ, type, size, count)` rows.
pub fn compare_census(left: &[OrbitClass], right: &[OrbitClass]) -> CensusComparison {
    let tally = |rows: &[OrbitClass]| {
        let mut map: BTreeMap<(bool, u32, OrbitType, u128), u128> = BTreeMap::new();
        for r in rows {
            let key = (
                r.orbit_type != OrbitType::Scalar,
                r.delta,
                r.orbit_type,
                r.orbit_size,
            );
            *map.entry(key).or_default() += r.orbit_count;
        }
        map
    };
    let (l, rt) = (tally(left), tally(right));
    let mut keys: Vec<_> = l.keys().chain(rt.keys()).copied().collect();
    keys.sort();
    keys.dedup();
    let diffs: Vec<RowDiff> = keys
        .into_iter()
        .filter_map(|key @ (_, delta, orbit_type, orbit_size)| {
            let (lc, rc) = (
                l.get(&key).copied().unwrap_or(0),
                rt.get(&key).copied().unwrap_or(0),
            );
            (lc != rc).then_some(RowDiff {
                delta,
                orbit_type,
                orbit_size,
                left_count: lc,
                right_count: rc,
            })
        })
        .collect();
    CensusComparison {
        equal: diffs.is_empty(),
        left_total: census_total(left),
        right_total: census_total(right),
        diffs,
    }
}

fn sorted(rows: &[OrbitClass]) -> Vec<OrbitClass> {
    let mut rows = rows.to_vec();
    sort_census(&mut rows);
    rows
}

pub fn to_json(rows: &[OrbitClass]) -> String {
    serde_json::to_string_pretty(&sorted(rows)).expect("census rows serialize")
}

pub fn from_json(s: &str) -> Result<Vec<OrbitClass>> {
    serde_json::from_str(s).map_err(|e| Error::Parse(format!("census json: {e}")))
}

pub fn to_csv(rows: &[OrbitClass]) -> String {
    let mut out = String::from("delta,type,orbit_size,orbit_count\n");
    for r in sorted(rows) {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            r.delta, r.orbit_type, r.orbit_size, r.orbit_count
        );
    }
    out
}

pub fn to_markdown(rows: &[OrbitClass]) -> String {
    let rows = sorted(rows);
    let header = ["delta", "type", "orbit_size", "orbit_count"];
    let cells: Vec<[String; 4]> = rows
        .iter()
        .map(|r| {
            [
                r.delta.to_string(),
                r.orbit_type.to_string(),
                r.orbit_size.to_string(),
                r.orbit_count.to_string(),
            ]
        })
        .collect();
    let widths: Vec<usize> = (0..4)
        .map(|i| {
            cells
                .iter()
                .map(|c| c[i].len())
                .chain([header[i].len()])
                .max()
                .unwrap()
        })
        .collect();
    let line = |vals: [&str; 4]| {
        let padded: Vec<String> = vals
            .iter()
            .zip(&widths)
            .map(|(v, w)| format!("{v:>w$}"))
            .collect();
        format!("| {} |\n", padded.join(" | "))
    };
    let mut out = line(header);
    let rule: Vec<String> = widths
        .iter()
        .map(|w| format!("{}:", "-".repeat(*w - 1)))
        .collect();
    out.push_str(&format!("| {} |\n", rule.join(" | ")));
    for c in &cells {
        out.push_str(&line([&c[0], &c[1], &c[2], &c[3]]));
    }
    out
}

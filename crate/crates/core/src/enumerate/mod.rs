//! Exhaustive orbit enumeration of `M_2(R)` under conjugation by elementary
//! unipotents, used as the oracle for every closed-form count.

use std::borrow::Cow;
use std::collections::{BTreeMap, HashSet};
use std::sync::atomic::{AtomicU32, AtomicU64, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::classify::{sort_census, Classifier, OrbitClass};
use crate::error::{Error, Result};
use crate::mat2::Mat;
use crate::ring::Ring;

/// Default state budget for [`partition_all`].
pub const DEFAULT_BUDGET: u64 = 1 << 26;

/// Largest ring whose matrices have a 64-bit [`MatKey`].
pub const MAX_KEYED_SIZE: u32 = 65535;

const SEED_CHUNK: u64 = 1 << 12;

/// Positional code `((a·N + b)·N + c)·N + d` of a matrix over a ring of size `N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MatKey(pub u64);

impl MatKey {
    /// Panics if `|R|` exceeds [`MAX_KEYED_SIZE`].
    pub fn encode(ring: &Ring, m: &Mat) -> MatKey {
        assert!(
            ring.size() <= MAX_KEYED_SIZE,
            "{} is too large for 64-bit matrix keys",
            ring.spec()
        );
        let n = ring.size() as u64;
        let [a, b, c, d] = m.indices().map(u64::from);
        MatKey(((a * n + b) * n + c) * n + d)
    }

    pub fn decode(self, ring: &Ring) -> Result<Mat> {
        let [a, b, c, d] = split_key(self.0, ring.size() as u64);
        let total = state_count(ring);
        if u128::from(self.0) >= total {
            return Err(Error::IndexOutOfRange {
                index: self.0,
                size: ring.size(),
            });
        }
        Ok(ring.matrices().at([a, b, c, d]))
    }
}

impl std::fmt::Display for MatKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn split_key(key: u64, n: u64) -> [u32; 4] {
    let d = key % n;
    let rest = key / n;
    let c = rest % n;
    let rest = rest / n;
    [(rest / n) as u32, (rest % n) as u32, c as u32, d as u32]
}

/// `|M_2(R)| = |R|^4`.
pub fn state_count(ring: &Ring) -> u128 {
    (ring.size() as u128).pow(4)
}

/// Which translations `t` are used for the generators `U(t)`, `L(t)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GeneratorSet {
    /// Every nonzero `t ∈ R`.
    Full,
    /// `λ x^i` with `λ` a nonzero Teichmüller element and `0 <= i < n`.
    /// These generate `R` additively, so the orbits are the same.
    #[default]
    Teichmuller,
}

impl GeneratorSet {
    pub fn translations(self, ring: &Ring) -> Vec<u32> {
        let mut out: Vec<u32> = match self {
            GeneratorSet::Full => (1..ring.size()).collect(),
            GeneratorSet::Teichmuller => (0..ring.n())
                .flat_map(|i| {
                    let xi = ring.x_pow(i);
                    ring.teichmuller_set()
                        .filter(|l| l.index() != 0)
                        .map(move |l| ring.mul(l, xi).index())
                })
                .collect(),
        };
        out.sort_unstable();
        out.dedup();
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionOptions {
    pub budget: u64,
    pub threads: usize,
    pub generators: GeneratorSet,
    /// Keep the key → orbit map (4 bytes per state).
    pub membership: bool,
}

impl Default for PartitionOptions {
    fn default() -> Self {
        PartitionOptions {
            budget: DEFAULT_BUDGET,
            threads: 1,
            generators: GeneratorSet::default(),
            membership: false,
        }
    }
}

/// Orbits listed by ascending minimal key.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitPartition {
    pub representatives: Vec<MatKey>,
    pub sizes: Vec<u64>,
    pub membership: Option<Vec<u32>>,
}

impl OrbitPartition {
    pub fn len(&self) -> usize {
        self.representatives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.representatives.is_empty()
    }

    pub fn total(&self) -> u128 {
        self.sizes.iter().map(|&s| s as u128).sum()
    }

    /// Orbit index of `key`, from the membership map when present and by
    /// recomputing the orbit otherwise.
    pub fn orbit_id(&self, ring: &Ring, key: MatKey) -> Result<usize> {
        if let Some(map) = &self.membership {
            return map
                .get(key.0 as usize)
                .map(|&i| i as usize)
                .ok_or(Error::IndexOutOfRange {
                    index: key.0,
                    size: ring.size(),
                });
        }
        let m = key.decode(ring)?;
        let min = *orbit_of(ring, &m).first().expect("orbit contains its seed");
        self.representatives
            .binary_search(&min)
            .map_err(|_| Error::Atlas(format!("key {key} not covered by partition")))
    }
}

/// Conjugation by the generator set on packed keys.
struct Engine<'a> {
    n: u64,
    add: Cow<'a, [u32]>,
    neg: Cow<'a, [u32]>,
    /// Per generator `t`: `t·x` and `t²·x` for every `x`.
    rows: Vec<(Vec<u32>, Vec<u32>)>,
}

impl<'a> Engine<'a> {
    fn new(ring: &'a Ring, generators: GeneratorSet) -> Engine<'a> {
        let size = ring.size();
        let (add, neg) = match ring.tables() {
            Some(t) => (Cow::Borrowed(&t.add[..]), Cow::Borrowed(&t.neg[..])),
            None => {
                let add = (0..size)
                    .flat_map(|a| (0..size).map(move |b| ring.add_idx(a, b)))
                    .collect();
                let neg = (0..size).map(|a| ring.neg_idx(a)).collect();
                (Cow::Owned(add), Cow::Owned(neg))
            }
        };
        let rows = generators
            .translations(ring)
            .into_iter()
            .map(|t| {
                let t2 = ring.mul_idx(t, t);
                (
                    (0..size).map(|x| ring.mul_idx(t, x)).collect(),
                    (0..size).map(|x| ring.mul_idx(t2, x)).collect(),
                )
            })
            .collect();
        Engine {
            n: size as u64,
            add,
            neg,
            rows,
        }
    }

    #[inline]
    fn add(&self, a: u32, b: u32) -> u32 {
        self.add[(a as u64 * self.n + b as u64) as usize]
    }

    #[inline]
    fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg[b as usize])
    }

    #[inline]
    fn pack(&self, [a, b, c, d]: [u32; 4]) -> u64 {
        ((a as u64 * self.n + b as u64) * self.n + c as u64) * self.n + d as u64
    }

    /// Calls `f` on `U(t) A U(-t)` and `L(t) A L(-t)` for every generator.
    #[inline]
    fn for_each_neighbour(&self, key: u64, mut f: impl FnMut(u64)) {
        let [a, b, c, d] = split_key(key, self.n);
        let dma = self.sub(d, a);
        for (tx, t2x) in &self.rows {
            let tc = tx[c as usize];
            let upper = [
                self.add(a, tc),
                self.sub(self.add(b, tx[dma as usize]), t2x[c as usize]),
                c,
                self.sub(d, tc),
            ];
            f(self.pack(upper));
            let tb = tx[b as usize];
            let amd = self.neg[dma as usize];
            let lower = [
                self.sub(a, tb),
                b,
                self.sub(self.add(c, tx[amd as usize]), t2x[b as usize]),
                self.add(d, tb),
            ];
            f(self.pack(lower));
        }
    }
}

/// All keys in the unipotent-similarity class of `m`, ascending.
pub fn orbit_of(ring: &Ring, m: &Mat) -> Vec<MatKey> {
    orbit_of_with(ring, m, GeneratorSet::default())
}

/// [`orbit_of`], refusing orbits whose predicted size exceeds `budget`.
pub fn orbit_of_within(ring: &Ring, m: &Mat, budget: u64) -> Result<Vec<MatKey>> {
    if ring.size() > MAX_KEYED_SIZE {
        return Err(Error::InvalidParams(format!(
            "{} is too large for 64-bit matrix keys",
            ring.spec()
        )));
    }
    let required = Classifier::new(ring).orbit_size_formula(m);
    if required > budget as u128 {
        return Err(Error::BudgetExceeded { required, budget });
    }
    Ok(orbit_of(ring, m))
}

pub fn orbit_of_with(ring: &Ring, m: &Mat, generators: GeneratorSet) -> Vec<MatKey> {
    let engine = Engine::new(ring, generators);
    let start = MatKey::encode(ring, m).0;
    let mut seen = HashSet::from([start]);
    let mut frontier = vec![start];
    while let Some(key) = frontier.pop() {
        engine.for_each_neighbour(key, |y| {
            if seen.insert(y) {
                frontier.push(y);
            }
        });
    }
    let mut out: Vec<MatKey> = seen.into_iter().map(MatKey).collect();
    out.sort_unstable();
    out
}

fn check_budget(ring: &Ring, budget: u64) -> Result<u64> {
    let required = state_count(ring);
    if required > budget as u128 || required > usize::MAX as u128 {
        return Err(Error::BudgetExceeded { required, budget });
    }
    Ok(required as u64)
}

/// Partitions all of `M_2(R)` into orbits.
///
/// Output is independent of `threads`: orbits are sorted by minimal key.
pub fn partition_all(ring: &Ring, options: &PartitionOptions) -> Result<OrbitPartition> {
    let total = check_budget(ring, options.budget)?;
    let engine = Engine::new(ring, options.generators);
    if options.threads <= 1 {
        Ok(partition_sequential(&engine, total, options.membership))
    } else {
        Ok(partition_parallel(
            &engine,
            total,
            options.threads,
            options.membership,
        ))
    }
}

fn partition_sequential(engine: &Engine<'_>, total: u64, membership: bool) -> OrbitPartition {
    let mut visited = vec![0u64; total.div_ceil(64) as usize];
    let mut owner = membership.then(|| vec![0u32; total as usize]);
    let (mut representatives, mut sizes) = (Vec::new(), Vec::new());
    let mut frontier = Vec::new();
    for seed in 0..total {
        if visited[(seed / 64) as usize] >> (seed % 64) & 1 == 1 {
            continue;
        }
        // every smaller key is already placed, so the seed is the orbit minimum
        let id = representatives.len() as u32;
        visited[(seed / 64) as usize] |= 1 << (seed % 64);
        frontier.push(seed);
        let mut size = 0u64;
        while let Some(key) = frontier.pop() {
            size += 1;
            if let Some(o) = owner.as_mut() {
                o[key as usize] = id;
            }
            engine.for_each_neighbour(key, |y| {
                let (word, bit) = ((y / 64) as usize, y % 64);
                if visited[word] >> bit & 1 == 0 {
                    visited[word] |= 1 << bit;
                    frontier.push(y);
                }
            });
        }
        representatives.push(MatKey(seed));
        sizes.push(size);
    }
    OrbitPartition {
        representatives,
        sizes,
        membership: owner,
    }
}

struct Fragment {
    id: u32,
    size: u64,
    min: u64,
    touches: Vec<u32>,
}

/// Workers claim seeds in chunks and grow fragments over a shared owner
/// array; fragments of one orbit that collide are merged afterwards.
fn partition_parallel(
    engine: &Engine<'_>,
    total: u64,
    threads: usize,
    membership: bool,
) -> OrbitPartition {
    const FREE: u32 = 0;
    let owner: Vec<AtomicU32> = (0..total).map(|_| AtomicU32::new(FREE)).collect();
    let next_chunk = AtomicU64::new(0);
    let next_id = AtomicU32::new(1);
    let fragments = Mutex::new(Vec::new());

    std::thread::scope(|scope| {
        for _ in 0..threads {
            scope.spawn(|| {
                let mut local = Vec::new();
                let mut frontier = Vec::new();
                loop {
                    let start = next_chunk.fetch_add(SEED_CHUNK, Ordering::Relaxed);
                    if start >= total {
                        break;
                    }
                    for seed in start..(start + SEED_CHUNK).min(total) {
                        if owner[seed as usize].load(Ordering::Relaxed) != FREE {
                            continue;
                        }
                        let id = next_id.fetch_add(1, Ordering::Relaxed);
                        if owner[seed as usize]
                            .compare_exchange(FREE, id, Ordering::AcqRel, Ordering::Acquire)
                            .is_err()
                        {
                            continue;
                        }
                        let mut frag = Fragment {
                            id,
                            size: 0,
                            min: seed,
                            touches: Vec::new(),
                        };
                        frontier.push(seed);
                        while let Some(key) = frontier.pop() {
                            frag.size += 1;
                            frag.min = frag.min.min(key);
                            engine.for_each_neighbour(key, |y| {
                                let cell = &owner[y as usize];
                                let found = match cell.load(Ordering::Acquire) {
                                    FREE => match cell.compare_exchange(
                                        FREE,
                                        id,
                                        Ordering::AcqRel,
                                        Ordering::Acquire,
                                    ) {
                                        Ok(_) => {
                                            frontier.push(y);
                                            return;
                                        }
                                        Err(other) => other,
                                    },
                                    other => other,
                                };
                                if found != id {
                                    frag.touches.push(found);
                                }
                            });
                        }
                        frag.touches.sort_unstable();
                        frag.touches.dedup();
                        local.push(frag);
                    }
                }
                fragments.lock().expect("worker panicked").extend(local);
            });
        }
    });

    let fragments = fragments.into_inner().expect("worker panicked");
    let slots = next_id.load(Ordering::Relaxed) as usize;
    let mut parent: Vec<u32> = (0..slots as u32).collect();
    fn find(parent: &mut [u32], mut x: u32) -> u32 {
        while parent[x as usize] != x {
            parent[x as usize] = parent[parent[x as usize] as usize];
            x = parent[x as usize];
        }
        x
    }
    for f in &fragments {
        for &t in &f.touches {
            let (a, b) = (find(&mut parent, f.id), find(&mut parent, t));
            if a != b {
                parent[a.max(b) as usize] = a.min(b);
            }
        }
    }
    let mut orbits: BTreeMap<u32, (u64, u64)> = BTreeMap::new();
    for f in &fragments {
        let root = find(&mut parent, f.id);
        let e = orbits.entry(root).or_insert((u64::MAX, 0));
        e.0 = e.0.min(f.min);
        e.1 += f.size;
    }
    let mut rows: Vec<(u64, u64, u32)> = orbits
        .into_iter()
        .map(|(root, (min, size))| (min, size, root))
        .collect();
    rows.sort_unstable();

    let membership = membership.then(|| {
        let mut index = vec![u32::MAX; slots];
        for (i, &(_, _, root)) in rows.iter().enumerate() {
            index[root as usize] = i as u32;
        }
        owner
            .iter()
            .map(|o| index[find(&mut parent, o.load(Ordering::Relaxed)) as usize])
            .collect()
    });
    OrbitPartition {
        representatives: rows.iter().map(|r| MatKey(r.0)).collect(),
        sizes: rows.iter().map(|r| r.1).collect(),
        membership,
    }
}

/// Groups orbits by `(δ, type, size)` of their representatives.
pub fn census_brute(ring: &Ring, partition: &OrbitPartition) -> Result<Vec<OrbitClass>> {
    let classifier = Classifier::new(ring);
    let mut tally: BTreeMap<(u32, crate::classify::OrbitType, u128), u128> = BTreeMap::new();
    for (&rep, &size) in partition.representatives.iter().zip(&partition.sizes) {
        let m = rep.decode(ring)?;
        let key = (
            classifier.traceless_valuation(&m),
            classifier.orbit_type(&m),
            size as u128,
        );
        *tally.entry(key).or_default() += 1;
    }
    let mut rows: Vec<OrbitClass> = tally
        .into_iter()
        .map(
            |((delta, orbit_type, orbit_size), orbit_count)| OrbitClass {
                delta,
                orbit_type,
                orbit_size,
                orbit_count,
            },
        )
        .collect();
    sort_census(&mut rows);
    Ok(rows)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupCounts {
    /// `|SL_2(R)|`, only computed over fields.
    pub sl2_order: Option<u128>,
    pub unipotent_count: u128,
    pub nilpotent_count: u128,
}

/// Exhaustive scans of `M_2(R)`.
pub fn group_counts(ring: &Ring) -> GroupCounts {
    let m = ring.matrices();
    let (mut nilpotent, mut unipotent, mut sl2) = (0u128, 0u128, 0u128);
    let one = ring.one();
    for x in m.all() {
        nilpotent += m.is_nilpotent(&x) as u128;
        unipotent += m.is_unipotent(&x) as u128;
        sl2 += (m.det(&x) == one) as u128;
    }
    GroupCounts {
        sl2_order: ring.is_field().then_some(sl2),
        unipotent_count: unipotent,
        nilpotent_count: nilpotent,
    }
}

/// `|{P ∈ SL_2(F) : PA = AP}|` by exhaustive scan.
pub fn sl2_centralizer_order(ring: &Ring, a: &Mat) -> Result<u128> {
    if !ring.is_field() {
        return Err(Error::NotAField(ring.n()));
    }
    let m = ring.matrices();
    if !m.owns(a) {
        return Err(Error::RingMismatch);
    }
    let one = ring.one();
    Ok(m.all()
        .filter(|p| m.det(p) == one && m.mul(p, a) == m.mul(a, p))
        .count() as u128)
}

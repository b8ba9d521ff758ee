//! Sliding-window pattern counting and the argmax guess rule.
//!
//! For every shift `i ∈ [0, n − L]` the counter reads `X` on `D + i` and
//! `G + i` and increments `N(b, a)`. The fitted rule maps each observed data
//! pattern `b` to the guess pattern `a` with the largest `N(b, a)`, breaking
//! ties by the lexicographically smallest `a`. Data patterns never seen in
//! training map to the overall most frequent guess pattern.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::ops::Range;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{window_count, IndexPair, Pattern, Sample, Symbol};

/// Dense counting is used when the packed key space has at most this many cells.
const DENSE_LIMIT: u64 = 1 << 20;

/// Occurrence counts `N(b, a)` and `N(b)` of one sample.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountTable {
    pair: IndexPair,
    joint: BTreeMap<Pattern, BTreeMap<Pattern, u64>>,
    data_marginal: BTreeMap<Pattern, u64>,
    windows: u64,
}

impl CountTable {
    pub fn empty(pair: IndexPair) -> Self {
        CountTable { pair, joint: BTreeMap::new(), data_marginal: BTreeMap::new(), windows: 0 }
    }

    /// Builds a table from explicit `(b, a) → count` entries.
    pub fn from_counts(pair: IndexPair, counts: impl IntoIterator<Item = ((Pattern, Pattern), u64)>) -> Result<Self> {
        let mut t = CountTable::empty(pair);
        for ((b, a), c) in counts {
            t.check_shapes(&b, &a)?;
            t.add(b, a, c);
        }
        Ok(t)
    }

    fn check_shapes(&self, b: &Pattern, a: &Pattern) -> Result<()> {
        if b.len() != self.pair.data().len() {
            return Err(Error::SupportMismatch { expected: self.pair.data().len(), got: b.len() });
        }
        if a.len() != self.pair.guess().len() {
            return Err(Error::SupportMismatch { expected: self.pair.guess().len(), got: a.len() });
        }
        Ok(())
    }

    fn add(&mut self, b: Pattern, a: Pattern, c: u64) {
        if c == 0 {
            return;
        }
        *self.data_marginal.entry(b.clone()).or_default() += c;
        *self.joint.entry(b).or_default().entry(a).or_default() += c;
        self.windows += c;
    }

    pub fn pair(&self) -> &IndexPair {
        &self.pair
    }

    pub fn windows(&self) -> u64 {
        self.windows
    }

    /// `N(b, a)`.
    pub fn joint(&self, b: &Pattern, a: &Pattern) -> u64 {
        self.joint.get(b).and_then(|row| row.get(a)).copied().unwrap_or(0)
    }

    /// `N(b)`.
    pub fn data_count(&self, b: &Pattern) -> u64 {
        self.data_marginal.get(b).copied().unwrap_or(0)
    }

    /// Observed data patterns with their guess-pattern counts, in lexicographic order.
    pub fn rows(&self) -> impl Iterator<Item = (&Pattern, &BTreeMap<Pattern, u64>)> {
        self.joint.iter()
    }

    pub fn data_marginal(&self) -> &BTreeMap<Pattern, u64> {
        &self.data_marginal
    }

    /// Totals `Σ_b N(b, a)` per guess pattern.
    pub fn guess_marginal(&self) -> BTreeMap<Pattern, u64> {
        let mut out = BTreeMap::new();
        for row in self.joint.values() {
            for (a, &c) in row {
                *out.entry(a.clone()).or_default() += c;
            }
        }
        out
    }

    /// Adds the counts of `other`, which must be over the same pair.
    pub fn merge(&mut self, other: CountTable) -> Result<()> {
        if other.pair != self.pair {
            return Err(Error::InvalidArgument("cannot merge count tables over different index pairs".into()));
        }
        for (b, row) in other.joint {
            for (a, c) in row {
                self.add(b.clone(), a, c);
            }
        }
        Ok(())
    }
}

/// Counts every window of `sample` in one pass.
pub fn count_patterns(sample: &Sample, pair: &IndexPair) -> CountTable {
    let shifts = window_count(sample.len(), pair);
    count_range(sample.symbols(), pair, 0..shifts)
}

/// Splits the shift range into `shards` contiguous pieces, counts them in
/// parallel and merges. The result equals [`count_patterns`].
pub fn count_patterns_sharded(sample: &Sample, pair: &IndexPair, shards: usize) -> CountTable {
    let shifts = window_count(sample.len(), pair);
    let shards = shards.clamp(1, shifts.max(1));
    let step = shifts.div_ceil(shards);
    let parts: Vec<CountTable> = (0..shards)
        .into_par_iter()
        .map(|k| count_range(sample.symbols(), pair, (k * step).min(shifts)..((k + 1) * step).min(shifts)))
        .collect();
    let mut out = CountTable::empty(pair.clone());
    for p in parts {
        out.merge(p).expect("same pair");
    }
    out
}

fn count_range(xs: &[Symbol], pair: &IndexPair, shifts: Range<usize>) -> CountTable {
    let mut table = CountTable::empty(pair.clone());
    if shifts.is_empty() {
        return table;
    }
    let offsets: Vec<usize> = pair.data_offsets().into_iter().chain(pair.guess_offsets()).collect();
    let kd = pair.data().len();
    let span = pair.span();
    let radix = xs[shifts.start..shifts.end - 1 + span].iter().map(|s| s.0 as u64).max().unwrap_or(0) + 1;
    let cells = u32::try_from(offsets.len()).ok().and_then(|k| radix.checked_pow(k));

    let key = |i: usize| offsets.iter().fold(0u64, |acc, &o| acc * radix + xs[i + o].0 as u64);
    let decode = |mut key: u64| {
        let mut ids = vec![0u32; offsets.len()];
        for slot in ids.iter_mut().rev() {
            *slot = (key % radix) as u32;
            key /= radix;
        }
        (Pattern::from_ids(&ids[..kd]), Pattern::from_ids(&ids[kd..]))
    };

    match cells {
        Some(c) if c <= DENSE_LIMIT && c <= 4 * shifts.len() as u64 + 64 => {
            let mut dense = vec![0u64; c as usize];
            for i in shifts {
                dense[key(i) as usize] += 1;
            }
            for (k, &n) in dense.iter().enumerate() {
                if n > 0 {
                    let (b, a) = decode(k as u64);
                    table.add(b, a, n);
                }
            }
        }
        Some(_) => {
            let mut sparse: HashMap<u64, u64> = HashMap::new();
            for i in shifts {
                *sparse.entry(key(i)).or_default() += 1;
            }
            for (k, n) in sparse {
                let (b, a) = decode(k);
                table.add(b, a, n);
            }
        }
        None => {
            let mut sparse: HashMap<Vec<u32>, u64> = HashMap::new();
            for i in shifts {
                let ids: Vec<u32> = offsets.iter().map(|&o| xs[i + o].0).collect();
                *sparse.entry(ids).or_default() += 1;
            }
            for (ids, n) in sparse {
                table.add(Pattern::from_ids(&ids[..kd]), Pattern::from_ids(&ids[kd..]), n);
            }
        }
    }
    table
}

/// The fitted map `b ↦ â(b)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GuessRule {
    pair: IndexPair,
    table: BTreeMap<Pattern, Pattern>,
    fallback: Pattern,
    tie_broken: BTreeSet<Pattern>,
}

/// First maximizer in iteration order (lexicographic for `BTreeMap`), and
/// whether another entry attains the same count.
fn argmax<'a>(counts: impl Iterator<Item = (&'a Pattern, u64)>) -> Option<(&'a Pattern, bool)> {
    let mut best: Option<(&Pattern, u64, bool)> = None;
    for (a, c) in counts {
        match &mut best {
            None => best = Some((a, c, false)),
            Some((_, bc, tied)) if c == *bc => *tied = true,
            Some(b) if c > b.1 => *b = (a, c, false),
            _ => {}
        }
    }
    best.map(|(a, _, tied)| (a, tied))
}

/// Fits the argmax rule. Fails when the table holds no windows.
pub fn fit_guess_rule(counts: &CountTable) -> Result<GuessRule> {
    if counts.windows == 0 {
        return Err(Error::NoTrainingWindows);
    }
    let mut table = BTreeMap::new();
    let mut tie_broken = BTreeSet::new();
    for (b, row) in &counts.joint {
        let (a, tied) = argmax(row.iter().map(|(a, &c)| (a, c))).expect("observed rows are non-empty");
        table.insert(b.clone(), a.clone());
        if tied {
            tie_broken.insert(b.clone());
        }
    }
    let totals = counts.guess_marginal();
    let (fallback, _) = argmax(totals.iter().map(|(a, &c)| (a, c))).expect("windows > 0");
    Ok(GuessRule { pair: counts.pair.clone(), table, fallback: fallback.clone(), tie_broken })
}

impl GuessRule {
    pub fn pair(&self) -> &IndexPair {
        &self.pair
    }

    /// The guess for `b`, or the fallback when `b` was never observed.
    pub fn guess(&self, b: &Pattern) -> Result<&Pattern> {
        if b.len() != self.pair.data().len() {
            return Err(Error::SupportMismatch { expected: self.pair.data().len(), got: b.len() });
        }
        Ok(self.table.get(b).unwrap_or(&self.fallback))
    }

    pub fn table(&self) -> &BTreeMap<Pattern, Pattern> {
        &self.table
    }

    pub fn fallback(&self) -> &Pattern {
        &self.fallback
    }

    /// Observed data patterns whose maximizer was not unique.
    pub fn tie_broken(&self) -> &BTreeSet<Pattern> {
        &self.tie_broken
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CountTableRepr {
    data_marginal: BTreeMap<Pattern, u64>,
    joint: BTreeMap<Pattern, BTreeMap<Pattern, u64>>,
    pair: IndexPair,
    windows: u64,
}

impl Serialize for CountTable {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CountTableRepr {
            pair: self.pair.clone(),
            windows: self.windows,
            joint: self.joint.clone(),
            data_marginal: self.data_marginal.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CountTable {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = CountTableRepr::deserialize(d)?;
        let entries = r.joint.into_iter().flat_map(|(b, row)| row.into_iter().map(move |(a, c)| ((b.clone(), a), c)));
        let t = CountTable::from_counts(r.pair, entries).map_err(D::Error::custom)?;
        if t.windows != r.windows || t.data_marginal != r.data_marginal {
            return Err(D::Error::custom("count table totals are inconsistent with the joint counts"));
        }
        Ok(t)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GuessRuleRepr {
    fallback: Pattern,
    pair: IndexPair,
    table: BTreeMap<Pattern, Pattern>,
    tie_broken: BTreeSet<Pattern>,
}

impl Serialize for GuessRule {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GuessRuleRepr {
            pair: self.pair.clone(),
            table: self.table.clone(),
            fallback: self.fallback.clone(),
            tie_broken: self.tie_broken.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for GuessRule {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = GuessRuleRepr::deserialize(d)?;
        let (kd, kg) = (r.pair.data().len(), r.pair.guess().len());
        let shapes_ok = r.fallback.len() == kg
            && r.table.iter().all(|(b, a)| b.len() == kd && a.len() == kg)
            && r.tie_broken.iter().all(|b| r.table.contains_key(b));
        if !shapes_ok {
            return Err(D::Error::custom("guess rule patterns do not match the index pair"));
        }
        Ok(GuessRule { pair: r.pair, table: r.table, fallback: r.fallback, tie_broken: r.tie_broken })
    }
}

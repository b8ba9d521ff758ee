//! Symbols, patterns, samples and the index-set geometry shared by every
//! other module.
//!
//! Positions are 1-based integers as in a sample `X_1..X_n`. An [`IndexPair`]
//! holds the data set `D` and the guess set `G`, always normalized so that
//! `min(D ∪ G) = 1`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A category, stored as a dense integer id. For count processes the id is
/// the count itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
#[repr(transparent)]
pub struct Symbol(pub u32);

impl Symbol {
    #[inline]
    pub fn id(self) -> usize {
        self.0 as usize
    }
}

impl From<u32> for Symbol {
    fn from(v: u32) -> Self {
        Symbol(v)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Size of the state space a process lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Alphabet {
    Finite(usize),
    /// Count alphabets such as ℕ. Only bounded-support operations may enumerate them.
    Unbounded,
}

impl Alphabet {
    pub fn finite(self) -> Option<usize> {
        match self {
            Alphabet::Finite(a) => Some(a),
            Alphabet::Unbounded => None,
        }
    }

    pub fn contains(self, s: Symbol) -> bool {
        match self {
            Alphabet::Finite(a) => s.id() < a,
            Alphabet::Unbounded => true,
        }
    }
}

/// Values of a process on an ordered support (`D` or `G`). The support itself
/// is carried by the owning [`IndexPair`]; a pattern only stores one symbol per
/// support position, in increasing position order.
///
/// The derived order is lexicographic: first by support position, then by
/// symbol id.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Pattern(Vec<Symbol>);

impl Pattern {
    pub fn new(symbols: Vec<Symbol>) -> Self {
        Pattern(symbols)
    }

    pub fn empty() -> Self {
        Pattern(Vec::new())
    }

    pub fn from_ids(ids: &[u32]) -> Self {
        Pattern(ids.iter().map(|&v| Symbol(v)).collect())
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn ids(&self) -> Vec<u32> {
        self.0.iter().map(|s| s.0).collect()
    }

    /// Mixed-radix index in lexicographic order for an alphabet of size `a`.
    pub fn index(&self, a: usize) -> Option<usize> {
        let mut idx = 0usize;
        for s in &self.0 {
            if s.id() >= a {
                return None;
            }
            idx = idx * a + s.id();
        }
        Some(idx)
    }

    /// Inverse of [`Pattern::index`].
    pub fn from_index(mut idx: usize, len: usize, a: usize) -> Self {
        let mut v = vec![Symbol(0); len];
        for slot in v.iter_mut().rev() {
            *slot = Symbol((idx % a) as u32);
            idx /= a;
        }
        Pattern(v)
    }

    pub fn map(&self, f: impl Fn(Symbol) -> Symbol) -> Pattern {
        Pattern(self.0.iter().map(|&s| f(s)).collect())
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", s.0)?;
        }
        Ok(())
    }
}

impl FromStr for Pattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Pattern::empty());
        }
        s.split(',')
            .map(|t| {
                t.trim()
                    .parse::<u32>()
                    .map(Symbol)
                    .map_err(|e| Error::Parse(format!("pattern entry {t:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()
            .map(Pattern)
    }
}

impl Serialize for Pattern {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Pattern {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// An observed trajectory `X_1..X_n`, `n ≥ 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sample {
    symbols: Vec<Symbol>,
}

impl Sample {
    pub fn new(symbols: Vec<Symbol>) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::InvalidArgument("sample must contain at least one symbol".into()));
        }
        Ok(Sample { symbols })
    }

    pub fn from_ids(ids: &[u32]) -> Result<Self> {
        Sample::new(ids.iter().map(|&v| Symbol(v)).collect())
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    /// Always false; samples are non-empty by construction.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    /// 1-based access.
    pub fn at(&self, position: usize) -> Symbol {
        self.symbols[position - 1]
    }

    pub fn check_alphabet(&self, alphabet: Alphabet) -> Result<()> {
        if let Alphabet::Finite(a) = alphabet {
            if let Some(bad) = self.symbols.iter().find(|s| s.id() >= a) {
                return Err(Error::SymbolOutOfRange { symbol: bad.0, alphabet: a });
            }
        }
        Ok(())
    }

    pub fn into_symbols(self) -> Vec<Symbol> {
        self.symbols
    }
}

/// Data set `D` and guess set `G`, shifted so that `min(D ∪ G) = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IndexPair {
    data: Vec<i64>,
    guess: Vec<i64>,
    offset: i64,
}

impl IndexPair {
    /// Normalizes `(D, G)`: sorts, removes duplicates and shifts by
    /// `1 − min(D ∪ G)`. The applied shift is kept as [`IndexPair::offset`].
    pub fn new(data: &[i64], guess: &[i64]) -> Result<Self> {
        let mut d = data.to_vec();
        let mut g = guess.to_vec();
        d.sort_unstable();
        d.dedup();
        g.sort_unstable();
        g.dedup();
        if g.is_empty() {
            return Err(Error::EmptyGuessSet);
        }
        if let Some(&x) = d.iter().find(|x| g.binary_search(x).is_ok()) {
            return Err(Error::Overlap(x));
        }
        let min = d.first().copied().unwrap_or(i64::MAX).min(g[0]);
        let offset = 1 - min;
        d.iter_mut().for_each(|x| *x += offset);
        g.iter_mut().for_each(|x| *x += offset);
        Ok(IndexPair { data: d, guess: g, offset })
    }

    pub fn data(&self) -> &[i64] {
        &self.data
    }

    pub fn guess(&self) -> &[i64] {
        &self.guess
    }

    /// Shift that was added to the caller's indices.
    pub fn offset(&self) -> i64 {
        self.offset
    }

    /// `L = diam(G ∪ D) = max − min + 1`.
    pub fn span(&self) -> usize {
        let max = self.data.last().copied().unwrap_or(i64::MIN).max(*self.guess.last().unwrap());
        max as usize
    }

    /// `K = |G| + |D|`.
    pub fn size(&self) -> usize {
        self.data.len() + self.guess.len()
    }

    /// Sorted `D ∪ G`.
    pub fn union(&self) -> Vec<i64> {
        let mut u: Vec<i64> = self.data.iter().chain(&self.guess).copied().collect();
        u.sort_unstable();
        u
    }

    /// Zero-based offsets of `D` within a window.
    pub fn data_offsets(&self) -> Vec<usize> {
        self.data.iter().map(|&x| (x - 1) as usize).collect()
    }

    /// Zero-based offsets of `G` within a window.
    pub fn guess_offsets(&self) -> Vec<usize> {
        self.guess.iter().map(|&x| (x - 1) as usize).collect()
    }
}

#[derive(Serialize, Deserialize)]
struct IndexPairRepr {
    #[serde(rename = "D")]
    data: Vec<i64>,
    #[serde(rename = "G")]
    guess: Vec<i64>,
    #[serde(rename = "K", default, skip_deserializing)]
    size: usize,
    #[serde(rename = "L", default, skip_deserializing)]
    span: usize,
    #[serde(default)]
    offset: i64,
}

impl Serialize for IndexPair {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        IndexPairRepr {
            data: self.data.clone(),
            guess: self.guess.clone(),
            size: self.size(),
            span: self.span(),
            offset: self.offset,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for IndexPair {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = IndexPairRepr::deserialize(d)?;
        IndexPair::new(&r.data, &r.guess).map_err(serde::de::Error::custom)
    }
}

/// Number of shifts `i ≥ 0` with `θ^i(D ∪ G) ⊆ [1, n]`, i.e. `max(0, n − L + 1)`.
pub fn window_count(n: usize, pair: &IndexPair) -> usize {
    (n + 1).saturating_sub(pair.span())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn normalize_shifts_to_one() {
        let p = IndexPair::new(&[5], &[6]).unwrap();
        assert_eq!(p.data(), &[1]);
        assert_eq!(p.guess(), &[2]);
        assert_eq!((p.span(), p.size(), p.offset()), (2, 2, -4));

        let p = IndexPair::new(&[], &[3]).unwrap();
        assert!(p.data().is_empty());
        assert_eq!(p.guess(), &[1]);
        assert_eq!((p.span(), p.size()), (1, 1));
    }

    #[test]
    fn normalize_rejects_bad_sets() {
        assert!(matches!(IndexPair::new(&[1, 2], &[2]), Err(Error::Overlap(2))));
        assert!(matches!(IndexPair::new(&[1], &[]), Err(Error::EmptyGuessSet)));
    }

    #[test]
    fn window_count_examples() {
        let l2 = IndexPair::new(&[1], &[2]).unwrap();
        let l1 = IndexPair::new(&[], &[1]).unwrap();
        // shifts i = 0, 1 for n = 3
        assert_eq!(window_count(3, &l2), 2);
        assert_eq!(window_count(5, &l1), 5);
        assert_eq!(window_count(1, &l2), 0);
    }

    #[test]
    fn pattern_text_round_trip() {
        let p: Pattern = "3,0,12".parse().unwrap();
        assert_eq!(p, Pattern::from_ids(&[3, 0, 12]));
        assert_eq!(p.to_string(), "3,0,12");
        assert_eq!("".parse::<Pattern>().unwrap(), Pattern::empty());
        assert!("1,x".parse::<Pattern>().is_err());
    }

    #[test]
    fn lexicographic_order_is_total_on_small_cubes() {
        for a in 1..=3usize {
            for len in 0..=3usize {
                let count = a.pow(len as u32);
                let all: Vec<Pattern> = (0..count).map(|i| Pattern::from_index(i, len, a)).collect();
                for (i, x) in all.iter().enumerate() {
                    assert_eq!(x.index(a), Some(i));
                    for (j, y) in all.iter().enumerate() {
                        // enumeration order is lexicographic order
                        assert_eq!(x.cmp(y), i.cmp(&j));
                        for z in &all {
                            if x <= y && y <= z {
                                assert!(x <= z);
                            }
                        }
                    }
                }
            }
        }
    }

    fn brute_windows(n: usize, pair: &IndexPair) -> usize {
        let support = pair.union();
        (0..n as i64)
            .filter(|i| support.iter().all(|&x| x + i >= 1 && x + i <= n as i64))
            .count()
    }

    proptest! {
        #[test]
        fn normalize_is_idempotent(
            d in proptest::collection::btree_set(-20i64..20, 0..4),
            g in proptest::collection::btree_set(-20i64..20, 1..4),
        ) {
            let d: Vec<i64> = d.into_iter().collect();
            let g: Vec<i64> = g.into_iter().filter(|x| !d.contains(x)).collect();
            prop_assume!(!g.is_empty());
            let once = IndexPair::new(&d, &g).unwrap();
            let twice = IndexPair::new(once.data(), once.guess()).unwrap();
            prop_assert_eq!(once.data(), twice.data());
            prop_assert_eq!(once.guess(), twice.guess());
            prop_assert_eq!(twice.offset(), 0);
            prop_assert_eq!(once.union()[0], 1);
            prop_assert!(once.span() >= once.size());
        }

        #[test]
        fn window_count_matches_enumeration(
            n in 1usize..=20,
            d in proptest::collection::btree_set(1i64..=5, 0..3),
            g in proptest::collection::btree_set(1i64..=5, 1..3),
        ) {
            let d: Vec<i64> = d.into_iter().collect();
            let g: Vec<i64> = g.into_iter().filter(|x| !d.contains(x)).collect();
            prop_assume!(!g.is_empty());
            let pair = IndexPair::new(&d, &g).unwrap();
            prop_assert_eq!(window_count(n, &pair), brute_windows(n, &pair));
        }
    }
}

//! Indices s ∈ N^r and the comma/plus word calculus on them.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A tuple of positive integers (s_1, …, s_r) with r >= 1.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Index(Vec<u32>);

impl Index {
    pub fn new(entries: Vec<u32>) -> Result<Index> {
        if entries.is_empty() {
            return Err(Error::Invalid("an index needs at least one entry".into()));
        }
        if entries.contains(&0) {
            return Err(Error::Invalid("index entries must be positive".into()));
        }
        Ok(Index(entries))
    }

    /// Comma-separated text such as `1,3`.
    pub fn parse(src: &str) -> Result<Index> {
        let mut entries = Vec::new();
        let mut pos = 0;
        for part in src.split(',') {
            let trimmed = part.trim();
            let value = trimmed
                .parse::<u32>()
                .map_err(|_| Error::parse(pos, format!("expected a positive integer, found {trimmed:?}")))?;
            entries.push(value);
            pos += part.len() + 1;
        }
        Index::new(entries)
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }

    pub fn weight(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn min_entry(&self) -> u32 {
        *self.0.iter().min().expect("nonempty")
    }

    pub fn reversed(&self) -> Index {
        Index(self.0.iter().rev().copied().collect())
    }

    /// Suffix weights d_ℓ = s_ℓ + … + s_r.
    pub fn suffix_weights(&self) -> Vec<u32> {
        let mut out = vec![0; self.0.len()];
        let mut acc = 0;
        for (k, &s) in self.0.iter().enumerate().rev() {
            acc += s;
            out[k] = acc;
        }
        out
    }

    /// Every index with weight <= `weight_max` and depth <= `depth_max`, ordered by weight,
    /// then depth, then lexicographically.
    pub fn all_up_to(weight_max: u32, depth_max: usize) -> Vec<Index> {
        let mut out = Vec::new();
        for w in 1..=weight_max {
            for r in 1..=depth_max.min(w as usize) {
                compositions(w, r, &mut Vec::new(), &mut out);
            }
        }
        out
    }
}

fn compositions(rest: u32, parts: usize, prefix: &mut Vec<u32>, out: &mut Vec<Index>) {
    if parts == 1 {
        prefix.push(rest);
        out.push(Index(prefix.clone()));
        prefix.pop();
        return;
    }
    for first in 1..=rest - (parts as u32 - 1) {
        prefix.push(first);
        compositions(rest - first, parts - 1, prefix, out);
        prefix.pop();
    }
}

impl TryFrom<Vec<u32>> for Index {
    type Error = Error;
    fn try_from(v: Vec<u32>) -> Result<Index> {
        Index::new(v)
    }
}

impl From<Index> for Vec<u32> {
    fn from(s: Index) -> Vec<u32> {
        s.0
    }
}

impl fmt::Display for Index {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl fmt::Debug for Index {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A word in the symbols comma and plus of length r - 1.
///
/// Symbol k sits between entries k and k+1; plus merges them.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Word {
    depth: usize,
    /// Bit k set means symbol k is plus.
    code: u64,
}

impl Word {
    pub fn new(depth: usize, code: u64) -> Result<Word> {
        if depth == 0 || depth > 64 || code >> (depth - 1) != 0 {
            return Err(Error::Invalid(format!("no word of code {code} for depth {depth}")));
        }
        Ok(Word { depth, code })
    }

    pub fn identity(depth: usize) -> Word {
        Word { depth, code: 0 }
    }

    /// All 2^{r-1} words ordered by binary counting, comma = 0, plus = 1,
    /// least significant symbol first.
    pub fn all(depth: usize) -> Vec<Word> {
        assert!((1..=64).contains(&depth), "word depth out of range");
        (0..1u64 << (depth - 1)).map(|code| Word { depth, code }).collect()
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn code(&self) -> u64 {
        self.code
    }

    pub fn is_plus(&self, k: usize) -> bool {
        self.code >> k & 1 == 1
    }

    /// Number of plus symbols.
    pub fn plus_count(&self) -> u32 {
        self.code.count_ones()
    }

    /// Depth of the merged index.
    pub fn merged_depth(&self) -> usize {
        self.depth - self.plus_count() as usize
    }

    /// (-1)^{#plus}.
    pub fn sign_is_negative(&self) -> bool {
        self.plus_count() % 2 == 1
    }

    /// Groups of consecutive entries merged by this word.
    pub fn groups(&self) -> Vec<std::ops::Range<usize>> {
        let mut out = Vec::new();
        let mut start = 0;
        for k in 0..self.depth - 1 {
            if !self.is_plus(k) {
                out.push(start..k + 1);
                start = k + 1;
            }
        }
        out.push(start..self.depth);
        out
    }

    /// The merged index: plus adds neighbouring entries.
    pub fn apply_index(&self, s: &Index) -> Result<Index> {
        self.check(s.depth())?;
        Ok(Index(self.groups().into_iter().map(|g| s.0[g].iter().sum()).collect()))
    }

    /// The merged point: plus multiplies neighbouring coordinates.
    pub fn apply_point<T: Clone>(&self, u: &[T], mul: impl Fn(&T, &T) -> T) -> Result<Vec<T>> {
        self.check(u.len())?;
        Ok(self
            .groups()
            .into_iter()
            .map(|g| {
                let (first, rest) = u[g].split_first().expect("groups are nonempty");
                rest.iter().fold(first.clone(), |acc, x| mul(&acc, x))
            })
            .collect())
    }

    fn check(&self, len: usize) -> Result<()> {
        if len != self.depth {
            return Err(Error::Dimension(format!("word of depth {} applied to length {len}", self.depth)));
        }
        Ok(())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let symbols: String = (0..self.depth - 1).map(|k| if self.is_plus(k) { '+' } else { ',' }).collect();
        write!(f, "({symbols})")
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

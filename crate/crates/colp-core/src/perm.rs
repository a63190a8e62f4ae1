//! Permutations of category labels.
//!
//! A permutation assigns each category a rank; ranks are stored 0-based.
//! A permutation and its reversal describe the same ordering read from the
//! other end, so equivalence classes are represented by the canonical member
//! with `rank(0) < rank(1)`.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Bijection from category index to rank, both 0-based.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Permutation {
    map: Vec<usize>,
}

impl Permutation {
    /// Identity permutation on `len` categories.
    pub fn identity(len: usize) -> Self {
        Self {
            map: (0..len).collect(),
        }
    }

    /// Build from a 0-based rank vector, validating bijectivity.
    pub fn from_map(map: Vec<usize>) -> Result<Self> {
        let len = map.len();
        let mut seen = vec![false; len];
        for &r in &map {
            if r >= len {
                return Err(Error::InvalidPermutation(format!(
                    "rank {r} out of range for length {len}"
                )));
            }
            if seen[r] {
                return Err(Error::InvalidPermutation(format!("rank {r} repeated")));
            }
            seen[r] = true;
        }
        Ok(Self { map })
    }

    /// Build from 1-based ranks, e.g. `(1, 3, 2)`.
    pub fn from_one_based(ranks: &[usize]) -> Result<Self> {
        let map = ranks
            .iter()
            .map(|&r| {
                r.checked_sub(1).ok_or_else(|| {
                    Error::InvalidPermutation("1-based rank must be positive".into())
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_map(map)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Rank of category `level` (0-based on both sides).
    pub fn rank_of(&self, level: usize) -> usize {
        self.map[level]
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    /// Ranks as 1-based values, for display.
    pub fn one_based(&self) -> Vec<usize> {
        self.map.iter().map(|&r| r + 1).collect()
    }

    /// Reversal: rank r becomes len-1-r. Describes the same ordering.
    pub fn reversal(&self) -> Self {
        let len = self.map.len();
        Self {
            map: self.map.iter().map(|&r| len - 1 - r).collect(),
        }
    }

    /// The canonical representative has `rank(0) < rank(1)`.
    pub fn is_canonical(&self) -> bool {
        self.map.len() < 2 || self.map[0] < self.map[1]
    }

    /// Canonical member of this permutation's reversal pair.
    pub fn canonicalize(&self) -> Self {
        if self.is_canonical() {
            self.clone()
        } else {
            self.reversal()
        }
    }

    /// All permutations reachable by swapping the ranks at two positions.
    /// There are len*(len-1)/2 of them and the relation is symmetric.
    pub fn transposition_neighbors(&self) -> Vec<Self> {
        let len = self.map.len();
        let mut out = Vec::with_capacity(len * (len.saturating_sub(1)) / 2);
        for i in 0..len {
            for j in i + 1..len {
                let mut map = self.map.clone();
                map.swap(i, j);
                out.push(Self { map });
            }
        }
        out
    }

    /// Restriction of the neighborhood to swaps of adjacent positions.
    pub fn adjacent_neighbors(&self) -> Vec<Self> {
        let len = self.map.len();
        let mut out = Vec::with_capacity(len.saturating_sub(1));
        for i in 0..len.saturating_sub(1) {
            let mut map = self.map.clone();
            map.swap(i, i + 1);
            out.push(Self { map });
        }
        out
    }

    /// Category indices sorted by rank: the ordering this permutation encodes.
    pub fn ordering(&self) -> Vec<usize> {
        let mut levels: Vec<usize> = (0..self.map.len()).collect();
        levels.sort_by_key(|&l| self.map[l]);
        levels
    }

    /// Level names in rank order, e.g. `["low", "mid", "high"]`.
    pub fn ordering_labels<'a>(&self, labels: &'a [String]) -> Vec<&'a str> {
        self.ordering()
            .into_iter()
            .map(|l| labels[l].as_str())
            .collect()
    }
}

impl std::fmt::Display for Permutation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, r) in self.map.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", r + 1)?;
        }
        write!(f, ")")
    }
}

/// All permutations of `len` items, yielded in lexicographic order of their
/// rank vectors. The count is len!.
pub fn enumerate_all(len: usize) -> impl Iterator<Item = Permutation> {
    LexPermutations {
        next: Some((0..len).collect()),
    }
}

/// The canonical half of the permutation space: len!/2 members for len >= 2.
pub fn enumerate_canonical(len: usize) -> impl Iterator<Item = Permutation> {
    enumerate_all(len).filter(Permutation::is_canonical)
}

struct LexPermutations {
    next: Option<Vec<usize>>,
}

impl Iterator for LexPermutations {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        self.next = next_lex(&mut succ).then_some(succ);
        Some(Permutation { map: current })
    }
}

/// Standard in-place next-permutation step; false once the sequence wraps.
fn next_lex(a: &mut [usize]) -> bool {
    if a.len() < 2 {
        return false;
    }
    let mut i = a.len() - 1;
    while i > 0 && a[i - 1] >= a[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = a.len() - 1;
    while a[j] <= a[i - 1] {
        j -= 1;
    }
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}

/// Kendall rank correlation between two permutations of equal length:
/// (concordant - discordant) / (len*(len-1)/2). Always in [-1, 1].
pub fn kendall_tau(a: &Permutation, b: &Permutation) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::PermutationLengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let len = a.len();
    if len < 2 {
        return Err(Error::InvalidPermutation(
            "kendall tau needs at least 2 items".into(),
        ));
    }
    let mut concordant = 0i64;
    let mut discordant = 0i64;
    for i in 0..len {
        for j in i + 1..len {
            let da = a.map[i] as i64 - a.map[j] as i64;
            let db = b.map[i] as i64 - b.map[j] as i64;
            if da * db > 0 {
                concordant += 1;
            } else {
                discordant += 1;
            }
        }
    }
    let pairs = (len * (len - 1) / 2) as f64;
    Ok((concordant - discordant) as f64 / pairs)
}

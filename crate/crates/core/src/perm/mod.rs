//! Permutations as pairs of linear orders, pattern containment, and the
//! coding of permutations into leveled points.

mod growth;
mod sigma;

use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use growth::{
    growth_lower_bound, triviality_failure_witness, triviality_failure_witness_with_cut, TrivialityReport,
};
pub use sigma::{decode_perm, decode_structure, encode_perm, SigmaStructure};

/// A permutation of `1..=n` in one-line notation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Perm {
    values: Vec<usize>,
}

impl Perm {
    pub fn new(values: Vec<usize>) -> Result<Self> {
        let n = values.len();
        let mut seen = vec![false; n + 1];
        for &v in &values {
            if v == 0 || v > n || seen[v] {
                return Err(Error::InvalidPerm(format!("{values:?} is not a permutation of 1..={n}")));
            }
            seen[v] = true;
        }
        Ok(Perm { values })
    }

    pub fn identity(n: usize) -> Self {
        Perm { values: (1..=n).collect() }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    /// Value at 1-based position `i`.
    pub fn at(&self, i: usize) -> usize {
        self.values[i - 1]
    }

    /// Every permutation of length `n`, lexicographically.
    pub fn all(n: usize) -> Vec<Perm> {
        (1..=n).permutations(n).map(|values| Perm { values }).collect()
    }

    /// The permutation order-isomorphic to `seq` (distinct entries).
    pub fn standardize(seq: &[usize]) -> Perm {
        let mut sorted = seq.to_vec();
        sorted.sort_unstable();
        Perm { values: seq.iter().map(|x| sorted.binary_search(x).unwrap() + 1).collect() }
    }

    /// Replaces the entry at 0-based position `pos` by a copy of `block`.
    pub fn inflate(&self, pos: usize, block: &Perm) -> Perm {
        let v = self.values[pos];
        let b = block.len();
        let mut out = Vec::with_capacity(self.len() + b - 1);
        for (i, &x) in self.values.iter().enumerate() {
            if i == pos {
                out.extend(block.values.iter().map(|&y| v + y - 1));
            } else {
                out.push(if x < v { x } else { x + b - 1 });
            }
        }
        Perm { values: out }
    }

    /// Inversion graph adjacency (0-based positions).
    pub fn inversion_graph(&self) -> Vec<Vec<usize>> {
        let n = self.len();
        let mut adj = vec![Vec::new(); n];
        for (i, j) in (0..n).tuple_combinations() {
            if self.values[i] > self.values[j] {
                adj[i].push(j);
                adj[j].push(i);
            }
        }
        adj
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.values.iter().join(" "))
    }
}

impl FromStr for Perm {
    type Err = Error;
    /// Accepts `"3 1 2"`, `"3,1,2"` or, for `n <= 9`, `"312"`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let parts: Vec<&str> = s.split(|c: char| c.is_whitespace() || c == ',').filter(|p| !p.is_empty()).collect();
        let values: Vec<usize> = if parts.len() == 1 && parts[0].len() > 1 {
            parts[0]
                .chars()
                .map(|c| c.to_digit(10).map(|d| d as usize))
                .collect::<Option<_>>()
                .ok_or_else(|| Error::InvalidPerm(s.to_string()))?
        } else {
            parts
                .iter()
                .map(|p| p.parse::<usize>().map_err(|_| Error::InvalidPerm(s.to_string())))
                .collect::<Result<_>>()?
        };
        Perm::new(values)
    }
}

impl TryFrom<String> for Perm {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Perm> for String {
    fn from(p: Perm) -> Self {
        p.to_string()
    }
}

/// Whether some subsequence of `tau` is order-isomorphic to `sigma`.
pub fn perm_contains(tau: &Perm, sigma: &Perm) -> bool {
    let k = sigma.len();
    if k > tau.len() {
        return false;
    }
    let s = &sigma.values;
    let t = &tau.values;
    (0..tau.len()).combinations(k).any(|pos| {
        (0..k).tuple_combinations().all(|(a, b)| (s[a] < s[b]) == (t[pos[a]] < t[pos[b]]))
    })
}

/// The increasing oscillation of odd length `m`, the standardized prefix of
/// `2, 4, 1, 6, 3, 8, 5, ...`. Its inversion graph is a path.
pub fn increasing_oscillation(m: usize) -> Perm {
    let seq: Vec<usize> = (1..=m)
        .map(|k| if k == 1 { 2 } else if k % 2 == 0 { k + 2 } else { k - 2 })
        .collect();
    Perm::standardize(&seq)
}

/// Member `i >= 1` of an infinite antichain: the increasing oscillation of
/// length `2i + 3` with both ends of its inversion path inflated by `21`.
pub fn antichain_member(i: usize) -> Result<Perm> {
    if i == 0 {
        return Err(Error::InvalidArgument("antichain members are indexed from 1".into()));
    }
    let base = increasing_oscillation(2 * i + 3);
    let ends: Vec<usize> = base
        .inversion_graph()
        .iter()
        .enumerate()
        .filter(|(_, adj)| adj.len() == 1)
        .map(|(v, _)| v)
        .collect();
    debug_assert_eq!(ends.len(), 2);
    let block = Perm { values: vec![2, 1] };
    Ok(base.inflate(ends[1], &block).inflate(ends[0], &block))
}

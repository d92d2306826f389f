//! Towers carrying the four indiscernible sequence patterns.

use std::str::FromStr;

use super::generate::LevelDraft;
use super::Tower;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// One level, caterpillar with leaves in path order.
    Dset,
    /// `L(a_i; a_j, a_k)` for `i < j < k`, witnessed at increasing levels.
    UpSFree,
    /// `L(a_k; a_i, a_j)` for `i < j < k`, witnessed at decreasing levels.
    DownSFree,
    /// Nested branchings with the tail of the sequence collapsed into one class.
    Mixed,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::Dset, Family::UpSFree, Family::DownSFree, Family::Mixed];

    pub fn name(self) -> &'static str {
        match self {
            Family::Dset => "dset",
            Family::UpSFree => "up_sfree",
            Family::DownSFree => "down_sfree",
            Family::Mixed => "mixed",
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s.trim())
            .ok_or_else(|| Error::InvalidArgument(format!("unknown family {s}")))
    }
}

/// Star on `pts` with the leaf of `pts[sp]` special.
fn star(pts: &[usize], sp: usize) -> LevelDraft {
    let c = pts.len();
    let mut d = LevelDraft {
        nodes: c + 1,
        edges: (0..c).map(|i| (c, i)).collect(),
        hosted: pts.iter().map(|&p| vec![p]).chain([vec![]]).collect(),
        special: vec![None; c + 1],
    };
    d.special[c] = Some(sp);
    d
}

/// A valid tower and the sequence `a1..an` (point ids in order) of `family`.
pub fn indiscernible_prefix(family: Family, n: usize) -> Result<(Tower, Vec<usize>)> {
    if n < 4 {
        return Err(Error::InvalidArgument(format!("sequence length {n} < 4")));
    }
    let names: Vec<String> = (1..=n).map(|i| format!("a{i}")).collect();
    let seq: Vec<usize> = (0..n).collect();
    let (exit, drafts) = match family {
        Family::Dset => {
            // inner node n + k - 1 carries a_k for 1 < k < n - 2, a_0 and a_1
            // hang from the first, a_{n-2} and a_{n-1} from the last
            let inner = |k: usize| n + k - 1;
            let mut d = LevelDraft {
                nodes: 2 * n - 2,
                edges: vec![],
                hosted: (0..2 * n - 2).map(|v| if v < n { vec![v] } else { vec![] }).collect(),
                special: vec![None; 2 * n - 2],
            };
            for k in 1..=n - 2 {
                if k > 1 {
                    d.edges.push((inner(k - 1), inner(k)));
                    d.special[inner(k)] = Some(inner(k - 1));
                } else {
                    d.special[inner(1)] = Some(0);
                }
            }
            d.edges.extend([(0, inner(1)), (1, inner(1)), (n - 2, inner(n - 2)), (n - 1, inner(n - 2))]);
            for k in 2..n - 2 {
                d.edges.push((k, inner(k)));
            }
            (vec![1; n], vec![d])
        }
        Family::UpSFree => {
            let exit = (0..n).map(|i| (i + 1).min(n - 2)).collect();
            let drafts = (1..=n - 2).map(|l| star(&seq[l - 1..], 0)).collect();
            (exit, drafts)
        }
        Family::DownSFree => {
            let exit = (0..n).map(|i| if i < 2 { n - 2 } else { n - i }).collect();
            let drafts = (1..=n - 2).map(|l| star(&seq[..=n - l], n - l)).collect();
            (exit, drafts)
        }
        Family::Mixed => {
            let drafts = (0..=n - 3)
                .rev()
                .map(|i| {
                    // leaves: a_0..=a_{i+1}, then the class of the tail
                    let tail: Vec<usize> = (i + 2..n).collect();
                    let leaves = i + 3;
                    let w = leaves;
                    let mut d = LevelDraft {
                        nodes: leaves + 1,
                        edges: vec![(w, i + 1), (w, i + 2)],
                        hosted: (0..=i + 1).map(|p| vec![p]).chain([tail, vec![]]).collect(),
                        special: vec![None; leaves + 1],
                    };
                    if i == 0 {
                        d.edges.push((w, 0));
                        d.special[w] = Some(0);
                    } else {
                        let v = d.add_inner();
                        d.edges.push((w, v));
                        d.special[w] = Some(v);
                        d.edges.extend((0..=i).map(|p| (v, p)));
                        d.special[v] = Some(0);
                    }
                    d
                })
                .collect();
            (vec![n - 2; n], drafts)
        }
    };
    Ok((Tower::from_drafts(names, exit, &drafts), seq))
}

#[cfg(test)]
mod tests {
    use super::super::atoms::{tuples3, tuples4};
    use super::*;

    #[test]
    fn all_families_validate() {
        for f in Family::ALL {
            for n in 4..=10 {
                let (t, seq) = indiscernible_prefix(f, n).unwrap();
                let r = t.validate();
                assert!(r.ok, "{} {n}: {:?}", f.name(), r.violations);
                assert_eq!(seq.len(), n);
            }
        }
        assert!(indiscernible_prefix(Family::Dset, 3).is_err());
    }

    #[test]
    fn dset_pattern() {
        let (t, _) = indiscernible_prefix(Family::Dset, 5).unwrap();
        let mut count = 0;
        for [a, b, c, d] in tuples4(5) {
            let holds = t.witness_s(a, b, c, d).is_some();
            count += holds as usize;
            let mut q = [a, b, c, d];
            q.sort();
            let first = [q[0], q[1]];
            let expect = (first.contains(&a) && first.contains(&b)) || (first.contains(&c) && first.contains(&d));
            assert_eq!(holds, expect, "{a}{b}{c}{d}");
        }
        assert_eq!(count, 40);
    }

    #[test]
    fn up_sfree_pattern() {
        let (t, _) = indiscernible_prefix(Family::UpSFree, 5).unwrap();
        for [a, b, c] in tuples3(5) {
            let w = t.witness_l(a, b, c);
            assert_eq!(w, if a < b && a < c { Some(a + 1) } else { None });
        }
        assert!(tuples4(5).all(|[a, b, c, d]| t.witness_s(a, b, c, d).is_none()));
    }

    #[test]
    fn down_sfree_pattern() {
        let n = 6;
        let (t, _) = indiscernible_prefix(Family::DownSFree, n).unwrap();
        for [a, b, c] in tuples3(n) {
            let w = t.witness_l(a, b, c);
            assert_eq!(w, if a > b && a > c { Some(n - a) } else { None }, "{a}{b}{c}");
        }
        assert!(tuples4(n).all(|[a, b, c, d]| t.witness_s(a, b, c, d).is_none()));
    }

    #[test]
    fn mixed_pattern() {
        for n in [5, 7] {
            let (t, _) = indiscernible_prefix(Family::Mixed, n).unwrap();
            for i in 1..=n - 3 {
                for p in 0..=i {
                    for q in 0..=i {
                        for r in i + 2..n {
                            if p != q {
                                assert_eq!(t.witness_s(p, q, i + 1, r), Some(n - 2 - i));
                            }
                        }
                    }
                }
            }
        }
    }
}

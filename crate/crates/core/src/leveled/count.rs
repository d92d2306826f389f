use std::collections::BTreeSet;

/// Set partitions of `0..n` as restricted growth strings.
fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    fn rec(i: usize, mx: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == cur.len() {
            out.push(cur.clone());
            return;
        }
        for b in 0..=mx + 1 {
            cur[i] = b;
            rec(i + 1, mx.max(b), cur, out);
        }
    }
    let mut out = Vec::new();
    if n > 0 {
        rec(1, 0, &mut vec![0; n], &mut out);
    }
    out
}

/// Canonical codes of ranked meet trees with `k` unlabeled leaves.
///
/// Trees are grown bottom-up: each round merges one or more disjoint groups
/// of at least two current trees under new nodes sharing that round's
/// height. Forests are deduplicated by their sorted tree codes after every
/// round.
pub fn iso_type_codes(k: usize) -> BTreeSet<String> {
    let mut done = BTreeSet::new();
    if k == 0 {
        return done;
    }
    let mut frontier: BTreeSet<Vec<String>> = BTreeSet::new();
    frontier.insert(vec!["*".to_string(); k]);
    let mut height = 0u32;
    while !frontier.is_empty() {
        height += 1;
        let mut next = BTreeSet::new();
        for forest in frontier {
            if forest.len() == 1 {
                done.insert(forest[0].clone());
                continue;
            }
            for part in set_partitions(forest.len()) {
                let blocks = part.iter().max().unwrap() + 1;
                let mut merged: Vec<String> = Vec::new();
                let mut any = false;
                for b in 0..blocks {
                    let mut members: Vec<String> = forest
                        .iter()
                        .zip(&part)
                        .filter(|(_, &p)| p == b)
                        .map(|(t, _)| t.clone())
                        .collect();
                    if members.len() == 1 {
                        merged.push(members.pop().unwrap());
                    } else {
                        any = true;
                        members.sort();
                        merged.push(format!("({height}:{})", members.join(",")));
                    }
                }
                if any {
                    merged.sort();
                    next.insert(merged);
                }
            }
        }
        frontier = next;
    }
    done
}

/// Number of isomorphism types of `k`-point subsets.
pub fn count_iso_types(k: usize) -> u64 {
    iso_type_codes(k).len() as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use itertools::Itertools;

    /// Labeled meet-rank functions on pairs: every triple attains its
    /// minimum at least twice and the used ranks are `0..r-1`. Orbits under
    /// relabeling are counted by minimizing over all permutations.
    fn oracle(k: usize) -> usize {
        if k <= 1 {
            return k;
        }
        let pairs: Vec<(usize, usize)> = (0..k).tuple_combinations().collect();
        let idx = |a: usize, b: usize| pairs.iter().position(|&p| p == (a.min(b), a.max(b))).unwrap();
        let triples: Vec<[usize; 3]> = (0..k)
            .tuple_combinations()
            .map(|(a, b, c)| [idx(a, b), idx(a, c), idx(b, c)])
            .collect();
        let perms: Vec<Vec<usize>> = (0..k).permutations(k).collect();
        let maxr = k - 1;
        let mut orbits = BTreeSet::new();
        for d in (0..pairs.len()).map(|_| 0..maxr).multi_cartesian_product() {
            let used: BTreeSet<usize> = d.iter().copied().collect();
            if used.len() != used.iter().max().unwrap() + 1 {
                continue;
            }
            let ok = triples.iter().all(|t| {
                let mut v = [d[t[0]], d[t[1]], d[t[2]]];
                v.sort();
                v[0] == v[1]
            });
            if !ok {
                continue;
            }
            let best = perms
                .iter()
                .map(|p| {
                    let mut e = vec![0; pairs.len()];
                    for (i, &(a, b)) in pairs.iter().enumerate() {
                        e[idx(p[a], p[b])] = d[i];
                    }
                    e
                })
                .min()
                .unwrap();
            orbits.insert(best);
        }
        orbits.len()
    }

    #[test]
    fn small_values() {
        assert_eq!(count_iso_types(1), 1);
        assert_eq!(count_iso_types(2), 1);
        assert_eq!(count_iso_types(3), 2);
    }

    #[test]
    fn agrees_with_rank_function_oracle() {
        for k in 1..=5 {
            assert_eq!(count_iso_types(k) as usize, oracle(k), "k={k}");
        }
    }

    #[test]
    fn nondecreasing() {
        let v: Vec<u64> = (1..=6).map(count_iso_types).collect();
        assert!(v.windows(2).all(|w| w[0] <= w[1]), "{v:?}");
    }
}

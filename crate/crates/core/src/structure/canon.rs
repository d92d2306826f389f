//! Exact canonical codes by colour refinement and individualization.

use super::FinStructure;

struct Canon<'a> {
    s: &'a FinStructure,
    /// All tuples as (symbol, entries).
    tuples: Vec<(u32, &'a [usize])>,
    /// Per element: (tuple index, position) occurrences.
    incident: Vec<Vec<(u32, u32)>>,
    best: Option<(Vec<u32>, Vec<usize>)>,
    autos: Vec<Vec<usize>>,
    /// Tuple keys fit in a `u128`.
    packable: bool,
}

/// Symbol, then per position the entry's colour and the index of its first
/// earlier repeat (or none).
fn vec_key(sym: u32, t: &[usize], colour: &[usize]) -> Vec<u32> {
    let mut k = Vec::with_capacity(t.len() * 2 + 1);
    k.push(sym);
    for (p, &u) in t.iter().enumerate() {
        k.push(colour[u] as u32);
        k.push(t[..p].iter().position(|&v| v == u).map_or(u32::MAX, |x| x as u32));
    }
    k
}

/// Same order as [`vec_key`] for arity <= 8, fewer than 2^11 colours and
/// 2^16 symbols.
fn pack_key(sym: u32, t: &[usize], colour: &[usize]) -> u128 {
    let mut k = sym as u128;
    for (p, &u) in t.iter().enumerate() {
        let rep = t[..p].iter().position(|&v| v == u).map_or(15, |x| x as u128);
        k = (k << 15) | ((colour[u] as u128) << 4) | rep;
    }
    k << (15 * (8 - t.len()))
}

fn rerank<K: Ord + Clone>(keys: &[K]) -> (Vec<usize>, usize) {
    let mut sorted: Vec<K> = keys.to_vec();
    sorted.sort();
    sorted.dedup();
    let ranks = keys.iter().map(|k| sorted.binary_search(k).unwrap()).collect();
    (ranks, sorted.len())
}

impl<'a> Canon<'a> {
    fn new(s: &'a FinStructure) -> Self {
        let mut tuples = Vec::new();
        let mut incident = vec![Vec::new(); s.len()];
        for (sym, rel) in s.relations.iter().enumerate() {
            for t in rel {
                let ti = tuples.len() as u32;
                tuples.push((sym as u32, t.as_slice()));
                for (p, &e) in t.iter().enumerate() {
                    incident[e].push((ti, p as u32));
                }
            }
        }
        let packable = s.len() < (1 << 11)
            && s.signature.len() < (1 << 8)
            && s.signature.symbols().iter().all(|(_, a)| *a <= 8);
        Canon { s, tuples, incident, best: None, autos: Vec::new(), packable }
    }

    fn refine(&self, mut colour: Vec<usize>) -> Vec<usize> {
        let mut cells = colour.iter().collect::<std::collections::BTreeSet<_>>().len();
        loop {
            let tr = if self.packable {
                rerank(&self.tuples.iter().map(|&(sym, t)| pack_key(sym, t, &colour)).collect::<Vec<_>>()).0
            } else {
                rerank(&self.tuples.iter().map(|&(sym, t)| vec_key(sym, t, &colour)).collect::<Vec<_>>()).0
            };
            let keys: Vec<(usize, Vec<(usize, u32)>)> = (0..self.s.len())
                .map(|e| {
                    let mut sig: Vec<(usize, u32)> =
                        self.incident[e].iter().map(|&(ti, p)| (tr[ti as usize], p)).collect();
                    sig.sort_unstable();
                    (colour[e], sig)
                })
                .collect();
            let (next, n) = rerank(&keys);
            colour = next;
            if n == cells {
                return colour;
            }
            cells = n;
        }
    }

    fn leaf_code(&self, colour: &[usize]) -> Vec<u32> {
        let mut code = vec![self.s.len() as u32];
        for rel in &self.s.relations {
            code.push(rel.len() as u32);
            if self.packable {
                let arity = rel.first().map_or(0, |t| t.len());
                let mut ts: Vec<u128> = rel
                    .iter()
                    .map(|t| t.iter().fold(0u128, |acc, &u| (acc << 16) | colour[u] as u128))
                    .collect();
                ts.sort_unstable();
                for x in ts {
                    code.extend((0..arity).rev().map(|i| ((x >> (16 * i)) & 0xffff) as u32));
                }
            } else {
                let mut ts: Vec<Vec<u32>> =
                    rel.iter().map(|t| t.iter().map(|&u| colour[u] as u32).collect()).collect();
                ts.sort_unstable();
                code.extend(ts.into_iter().flatten());
            }
        }
        code
    }

    fn search(&mut self, colour: Vec<usize>, prefix: &mut Vec<usize>) {
        let n = self.s.len();
        let mut counts = vec![0usize; n];
        for &c in &colour {
            counts[c] += 1;
        }
        let Some(target) = (0..n).find(|&c| counts[c] > 1) else {
            let code = self.leaf_code(&colour);
            match &self.best {
                None => self.best = Some((code, colour)),
                Some((b, bc)) => {
                    if code < *b {
                        self.best = Some((code, colour));
                    } else if code == *b {
                        // colour maps elements to labels; recover an automorphism
                        let mut inv = vec![0; n];
                        for (e, &c) in bc.iter().enumerate() {
                            inv[c] = e;
                        }
                        let auto: Vec<usize> = colour.iter().map(|&c| inv[c]).collect();
                        self.autos.push(auto);
                    }
                }
            }
            return;
        };
        let cell: Vec<usize> = (0..n).filter(|&e| colour[e] == target).collect();
        let mut done: Vec<usize> = Vec::new();
        for &v in &cell {
            if self.in_explored_orbit(v, &done, prefix) {
                continue;
            }
            done.push(v);
            let keyed: Vec<(usize, bool)> = (0..n).map(|e| (colour[e], e != v)).collect();
            let (next, _) = rerank(&keyed);
            let refined = self.refine(next);
            prefix.push(v);
            self.search(refined, prefix);
            prefix.pop();
        }
    }

    /// Whether `v` is the image of an explored sibling under the group
    /// generated by known automorphisms fixing `prefix` pointwise.
    fn in_explored_orbit(&self, v: usize, done: &[usize], prefix: &[usize]) -> bool {
        if done.is_empty() {
            return false;
        }
        let gens: Vec<&Vec<usize>> = self
            .autos
            .iter()
            .filter(|g| prefix.iter().all(|&p| g[p] == p))
            .collect();
        if gens.is_empty() {
            return false;
        }
        let mut orbit = vec![v];
        let mut seen = vec![false; self.s.len()];
        seen[v] = true;
        while let Some(x) = orbit.pop() {
            if done.contains(&x) {
                return true;
            }
            for g in &gens {
                let y = g[x];
                if !seen[y] {
                    seen[y] = true;
                    orbit.push(y);
                }
            }
        }
        false
    }
}

/// Exact isomorphism invariant: two structures over the same signature get
/// equal codes iff they are isomorphic.
pub fn canonical_code(s: &FinStructure) -> Vec<u8> {
    let mut out = Vec::new();
    for (name, arity) in s.signature.symbols() {
        out.extend((name.len() as u32).to_le_bytes());
        out.extend(name.as_bytes());
        out.extend((*arity as u32).to_le_bytes());
    }
    let mut canon = Canon::new(s);
    let start = canon.refine(vec![0; s.len()]);
    canon.search(start, &mut Vec::new());
    let code = match canon.best {
        Some((code, _)) => code,
        None => canon.leaf_code(&[]),
    };
    for x in code {
        out.extend(x.to_le_bytes());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::{is_isomorphic, Signature};
    use proptest::prelude::*;

    fn sig() -> Signature {
        Signature::new([("E", 2), ("T", 3)]).unwrap()
    }

    fn build(n: usize, e: &[(usize, usize)], t: &[(usize, usize, usize)]) -> FinStructure {
        let mut s = FinStructure::with_size(sig(), n);
        for &(a, b) in e {
            s.insert(0, vec![a, b]).unwrap();
        }
        for &(a, b, c) in t {
            s.insert(1, vec![a, b, c]).unwrap();
        }
        s
    }

    #[test]
    fn empty_structure() {
        let a = build(0, &[], &[]);
        assert_eq!(canonical_code(&a), canonical_code(&build(0, &[], &[])));
        assert_ne!(canonical_code(&a), canonical_code(&build(1, &[], &[])));
    }

    #[test]
    fn cycle_orientations_agree() {
        let a = build(3, &[(0, 1), (1, 2), (2, 0)], &[]);
        let b = build(3, &[(0, 2), (2, 1), (1, 0)], &[]);
        let c = build(3, &[(0, 1), (1, 2), (0, 2)], &[]);
        assert_eq!(canonical_code(&a), canonical_code(&b));
        assert_ne!(canonical_code(&a), canonical_code(&c));
    }

    #[test]
    fn regular_graphs_distinguished() {
        // two disjoint triangles versus a hexagon: refinement alone cannot split them
        let tri = build(6, &[(0, 1), (1, 0), (1, 2), (2, 1), (2, 0), (0, 2), (3, 4), (4, 3), (4, 5), (5, 4), (5, 3), (3, 5)], &[]);
        let hex_edges: Vec<(usize, usize)> =
            (0..6).flat_map(|i| [(i, (i + 1) % 6), ((i + 1) % 6, i)]).collect();
        let hex = build(6, &hex_edges, &[]);
        assert_ne!(canonical_code(&tri), canonical_code(&hex));
        let shuffled = hex.permuted(&[3, 0, 4, 1, 5, 2]);
        assert_eq!(canonical_code(&hex), canonical_code(&shuffled));
    }

    #[test]
    fn large_symmetric_structure_is_fast() {
        let n = 40;
        let edges: Vec<(usize, usize)> = (1..n).map(|i| (0, i)).collect();
        let s = build(n, &edges, &[]);
        let code = canonical_code(&s);
        let p: Vec<usize> = (0..n).map(|i| (i * 7 + 3) % n).collect();
        assert_eq!(code, canonical_code(&s.permuted(&p)));
    }

    fn arb_structure() -> impl Strategy<Value = FinStructure> {
        (0usize..=6).prop_flat_map(|n| {
            let m = n.max(1);
            (
                Just(n),
                proptest::collection::vec((0..m, 0..m), 0..8),
                proptest::collection::vec((0..m, 0..m, 0..m), 0..4),
            )
                .prop_map(|(n, e, t)| {
                    if n == 0 {
                        build(0, &[], &[])
                    } else {
                        build(n, &e, &t)
                    }
                })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn code_matches_isomorphism(a in arb_structure(), b in arb_structure()) {
            let same = is_isomorphic(&a, &b).unwrap();
            prop_assert_eq!(same, canonical_code(&a) == canonical_code(&b));
        }

        #[test]
        fn code_is_invariant(a in arb_structure(), seed in any::<u64>()) {
            use rand::{seq::SliceRandom, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut p: Vec<usize> = (0..a.len()).collect();
            p.shuffle(&mut rng);
            let b = a.permuted(&p);
            prop_assert!(is_isomorphic(&a, &b).unwrap());
            prop_assert_eq!(canonical_code(&a), canonical_code(&b));
        }
    }
}

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{check_distinct, meet_level, LeveledPoint};
use crate::error::{Error, Result};
use crate::scalar::Level;

/// Rooted meet tree with labeled leaves and ranked internal nodes.
///
/// Leaf labels index the point list the tree describes. Ranks form a weak
/// order on internal nodes that strictly increases away from the root.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LevelTree {
    Leaf { leaf: usize },
    Node { rank: u32, children: Vec<LevelTree> },
}

impl LevelTree {
    pub fn leaves(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves(&self, out: &mut Vec<usize>) {
        match self {
            LevelTree::Leaf { leaf } => out.push(*leaf),
            LevelTree::Node { children, .. } => children.iter().for_each(|c| c.collect_leaves(out)),
        }
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            LevelTree::Leaf { .. } => 1,
            LevelTree::Node { children, .. } => children.iter().map(|c| c.leaf_count()).sum(),
        }
    }

    fn min_leaf(&self) -> usize {
        match self {
            LevelTree::Leaf { leaf } => *leaf,
            LevelTree::Node { children, .. } => children.iter().map(|c| c.min_leaf()).min().unwrap_or(usize::MAX),
        }
    }

    fn ranks(&self, out: &mut BTreeSet<u32>) {
        if let LevelTree::Node { rank, children } = self {
            out.insert(*rank);
            children.iter().for_each(|c| c.ranks(out));
        }
    }

    pub fn validate(&self) -> Result<()> {
        let mut leaves = self.leaves();
        leaves.sort_unstable();
        if leaves.iter().enumerate().any(|(i, &l)| i != l) {
            return Err(Error::InvalidLevelTree("leaf labels must be 0..k-1, each once".into()));
        }
        self.check_node(None)
    }

    fn check_node(&self, parent: Option<u32>) -> Result<()> {
        if let LevelTree::Node { rank, children } = self {
            if children.len() < 2 {
                return Err(Error::InvalidLevelTree("internal node with fewer than 2 children".into()));
            }
            if let Some(p) = parent {
                if *rank <= p {
                    return Err(Error::InvalidLevelTree(format!("rank {rank} not above parent rank {p}")));
                }
            }
            for c in children {
                c.check_node(Some(*rank))?;
            }
        }
        Ok(())
    }

    /// Dense ranks `0..r-1` and children ordered by least leaf label.
    pub fn normalized(&self) -> LevelTree {
        let mut ranks = BTreeSet::new();
        self.ranks(&mut ranks);
        let ranks: Vec<u32> = ranks.into_iter().collect();
        self.relabel_ranks(&ranks)
    }

    fn relabel_ranks(&self, ranks: &[u32]) -> LevelTree {
        match self {
            LevelTree::Leaf { leaf } => LevelTree::Leaf { leaf: *leaf },
            LevelTree::Node { rank, children } => {
                let mut cs: Vec<LevelTree> = children.iter().map(|c| c.relabel_ranks(ranks)).collect();
                cs.sort_by_key(|c| c.min_leaf());
                LevelTree::Node { rank: ranks.binary_search(rank).unwrap() as u32, children: cs }
            }
        }
    }

    /// A string equal for two trees iff they agree up to leaf relabeling
    /// and order-preserving rank changes.
    pub fn shape_code(&self) -> String {
        fn go(t: &LevelTree) -> String {
            match t {
                LevelTree::Leaf { .. } => "*".into(),
                LevelTree::Node { rank, children } => {
                    let mut cs: Vec<String> = children.iter().map(go).collect();
                    cs.sort();
                    format!("({rank}:{})", cs.join(","))
                }
            }
        }
        go(&self.normalized())
    }
}

enum Raw<Q> {
    Leaf(usize),
    Node(Q, Vec<Raw<Q>>),
}

fn build<Q: Level>(points: &[LeveledPoint<Q>], idx: Vec<usize>, levels: &mut BTreeSet<Q>) -> Raw<Q> {
    if idx.len() == 1 {
        return Raw::Leaf(idx[0]);
    }
    let first = &points[idx[0]];
    let q = idx[1..]
        .iter()
        .map(|&j| meet_level(first, &points[j]).expect("distinct"))
        .min()
        .unwrap();
    let mut parts: Vec<(u32, Vec<usize>)> = Vec::new();
    for &j in &idx {
        let x = points[j].get(&q);
        match parts.iter_mut().find(|(y, _)| *y == x) {
            Some((_, v)) => v.push(j),
            None => parts.push((x, vec![j])),
        }
    }
    levels.insert(q.clone());
    let children = parts.into_iter().map(|(_, v)| build(points, v, levels)).collect();
    Raw::Node(q, children)
}

fn to_tree<Q: Level>(raw: Raw<Q>, levels: &[Q]) -> LevelTree {
    match raw {
        Raw::Leaf(i) => LevelTree::Leaf { leaf: i },
        Raw::Node(q, cs) => LevelTree::Node {
            rank: levels.binary_search(&q).unwrap() as u32,
            children: cs.into_iter().map(|c| to_tree(c, levels)).collect(),
        },
    }
}

/// Meet tree of `points`; leaf `i` is `points[i]`. The result is normalized.
pub fn extract_level_tree<Q: Level>(points: &[LeveledPoint<Q>]) -> Result<LevelTree> {
    if points.is_empty() {
        return Err(Error::InvalidArgument("at least one point required".into()));
    }
    check_distinct(points)?;
    let mut levels = BTreeSet::new();
    let raw = build(points, (0..points.len()).collect(), &mut levels);
    let levels: Vec<Q> = levels.into_iter().collect();
    Ok(to_tree(raw, &levels).normalized())
}

/// Points realizing `tree`: rank `r` sits at position `r`, and the `c`-th
/// child of a node takes letter `c` there.
pub fn realize<Q: Level>(tree: &LevelTree) -> Result<Vec<LeveledPoint<Q>>> {
    tree.validate()?;
    let mut out = vec![LeveledPoint::empty(); tree.leaf_count()];
    fill(tree, &mut Vec::new(), &mut out, &|r| Q::from_int(r as i64), &|_, c| c as u32);
    Ok(out)
}

fn fill<Q: Level>(
    t: &LevelTree,
    path: &mut Vec<(Q, u32)>,
    out: &mut [LeveledPoint<Q>],
    level: &dyn Fn(u32) -> Q,
    letter: &dyn Fn(&[(Q, u32)], usize) -> u32,
) {
    match t {
        LevelTree::Leaf { leaf } => out[*leaf] = LeveledPoint::from_pairs(path.iter().cloned()),
        LevelTree::Node { rank, children } => {
            for (c, child) in children.iter().enumerate() {
                path.push((level(*rank), letter(path, c)));
                fill(child, path, out, level, letter);
                path.pop();
            }
        }
    }
}

/// A randomly placed realization: ranks go to random increasing rationals
/// and each node's children get random distinct letters.
pub fn realize_random<Q: Level, R: Rng + ?Sized>(tree: &LevelTree, rng: &mut R) -> Result<Vec<LeveledPoint<Q>>> {
    tree.validate()?;
    let t = tree.normalized();
    let mut ranks = BTreeSet::new();
    t.ranks(&mut ranks);
    let mut levels = Vec::with_capacity(ranks.len());
    let mut cur = Q::from_int(rng.gen_range(-4..=4)) / Q::from_int(rng.gen_range(1..=3));
    for _ in 0..ranks.len() {
        levels.push(cur.clone());
        cur = cur + Q::from_int(rng.gen_range(1..=5)) / Q::from_int(rng.gen_range(1..=4));
    }
    let mut out = vec![LeveledPoint::empty(); t.leaf_count()];
    place(&t, &mut Vec::new(), &mut out, &levels, rng);
    Ok(out)
}

fn place<Q: Level, R: Rng + ?Sized>(
    t: &LevelTree,
    path: &mut Vec<(Q, u32)>,
    out: &mut [LeveledPoint<Q>],
    levels: &[Q],
    rng: &mut R,
) {
    match t {
        LevelTree::Leaf { leaf } => out[*leaf] = LeveledPoint::from_pairs(path.iter().cloned()),
        LevelTree::Node { rank, children } => {
            let mut letters: Vec<u32> = (0..children.len() as u32 + 3).collect();
            letters.shuffle(rng);
            for (child, &x) in children.iter().zip(&letters) {
                path.push((levels[*rank as usize].clone(), x));
                place(child, path, out, levels, rng);
                path.pop();
            }
        }
    }
}

/// Random tree on `k` leaves built by rounds of random merges.
pub fn random_level_tree<R: Rng + ?Sized>(k: usize, rng: &mut R) -> LevelTree {
    assert!(k >= 1, "k must be positive");
    let mut forest: Vec<LevelTree> = (0..k).map(|i| LevelTree::Leaf { leaf: i }).collect();
    let mut round = 0u32;
    while forest.len() > 1 {
        let buckets = rng.gen_range(1..=forest.len() - 1);
        let mut groups: Vec<Vec<LevelTree>> = vec![Vec::new(); buckets];
        for t in forest.drain(..) {
            groups[rng.gen_range(0..buckets)].push(t);
        }
        if groups.iter().all(|g| g.len() < 2) {
            forest = groups.into_iter().flatten().collect();
            continue;
        }
        for g in groups {
            if g.len() >= 2 {
                forest.push(LevelTree::Node { rank: u32::MAX - round, children: g });
            } else {
                forest.extend(g);
            }
        }
        round += 1;
    }
    forest.pop().unwrap().normalized()
}

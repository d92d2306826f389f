//! Closure of a point set under special-branch directions, and induced sub-towers.

use std::collections::BTreeSet;

use super::{DTree, Tower};
use crate::error::{Error, Result};

/// Nodes of the smallest subtree spanning `leaves`.
fn span(t: &DTree, leaves: &[usize]) -> BTreeSet<usize> {
    let mut out: BTreeSet<usize> = leaves.iter().copied().collect();
    if let Some((&first, rest)) = leaves.split_first() {
        for &l in rest {
            out.extend(t.path(first, l));
        }
    }
    out
}

fn induced_degree(t: &DTree, nodes: &BTreeSet<usize>, v: usize) -> usize {
    t.neighbours(v).iter().filter(|w| nodes.contains(w)).count()
}

impl Tower {
    fn leaves_of(&self, j: usize, pts: &BTreeSet<usize>) -> Vec<usize> {
        let set: BTreeSet<usize> = pts.iter().filter_map(|&p| self.leaf(j, p)).collect();
        set.into_iter().collect()
    }

    /// First branching node of `pts` at level `j` whose special side holds
    /// none of `pts`, with the point to adopt there.
    fn missing_direction(&self, j: usize, pts: &BTreeSet<usize>) -> Result<Option<usize>> {
        let t = self.level(j);
        let leaves = self.leaves_of(j, pts);
        if leaves.len() < 3 {
            return Ok(None);
        }
        let nodes = span(t, &leaves);
        for &v in &nodes {
            if induced_degree(t, &nodes, v) < 3 {
                continue;
            }
            let sp = t.special(v).ok_or(Error::NotClassD)?;
            if leaves.iter().any(|&l| t.in_branch(v, sp, l)) {
                continue;
            }
            let adopt = self
                .present(j)
                .into_iter()
                .find(|&p| t.in_branch(v, sp, self.leaf(j, p).unwrap()))
                .ok_or(Error::NotClassD)?;
            return Ok(Some(adopt));
        }
        Ok(None)
    }
}

/// Adds, level by level from the bottom, a point on the special side of
/// every branching node of the induced tree that lacks one, until no level
/// needs more. Returns the sorted superset.
pub fn complete(t: &Tower, subset: &[usize]) -> Result<Vec<usize>> {
    if subset.is_empty() {
        return Err(Error::InvalidArgument("empty subset".into()));
    }
    if let Some(&p) = subset.iter().find(|&&p| p >= t.point_count()) {
        return Err(Error::UnknownPoint(p.to_string()));
    }
    let mut set: BTreeSet<usize> = subset.iter().copied().collect();
    loop {
        let mut changed = false;
        for j in 1..=t.level_count() {
            while let Some(p) = t.missing_direction(j, &set)? {
                set.insert(p);
                changed = true;
            }
        }
        if !changed {
            return Ok(set.into_iter().collect());
        }
    }
}

/// The tower induced on `subset`: at each level the spanning subtree with
/// degree-2 nodes suppressed; a special branch survives where the induced
/// tree continues into it.
pub fn induced_tower(t: &Tower, subset: &[usize]) -> Result<Tower> {
    if subset.is_empty() {
        return Err(Error::InvalidArgument("empty subset".into()));
    }
    let pts: BTreeSet<usize> = subset.iter().copied().collect();
    if let Some(&p) = pts.iter().find(|&&p| p >= t.point_count()) {
        return Err(Error::UnknownPoint(p.to_string()));
    }
    let order: Vec<usize> = pts.iter().copied().collect();
    let local = |p: usize| order.iter().position(|&q| q == p).unwrap();
    let top = order.iter().map(|&p| t.exit(p)).max().unwrap();
    let mut levels = Vec::new();
    let mut leaf_of = Vec::new();
    for j in 1..=top {
        let tree = t.level(j);
        let leaves = t.leaves_of(j, &pts);
        let nodes = span(tree, &leaves);
        let kept: Vec<usize> =
            nodes.iter().copied().filter(|&v| leaves.contains(&v) || induced_degree(tree, &nodes, v) >= 3).collect();
        let idx = |v: usize| kept.iter().position(|&k| k == v).unwrap();
        // walk from `v` through `w` along suppressed nodes to the next kept node
        let reach = |v: usize, w: usize| {
            let (mut prev, mut cur) = (v, w);
            while !kept.contains(&cur) {
                let next = *tree.neighbours(cur).iter().find(|&&u| u != prev && nodes.contains(&u)).unwrap();
                prev = cur;
                cur = next;
            }
            cur
        };
        let mut edges = Vec::new();
        let mut special = vec![None; kept.len()];
        for &v in &kept {
            for &w in tree.neighbours(v).iter().filter(|w| nodes.contains(w)) {
                let u = reach(v, w);
                if v < u {
                    edges.push((idx(v), idx(u)));
                }
                if tree.special(v) == Some(w) && induced_degree(tree, &nodes, v) >= 3 {
                    special[idx(v)] = Some(idx(u));
                }
            }
        }
        let hosted: Vec<Vec<usize>> = kept
            .iter()
            .map(|&v| tree.hosted(v).iter().filter(|p| pts.contains(p)).map(|&p| local(p)).collect())
            .collect();
        let mut lo = vec![None; order.len()];
        for (k, h) in hosted.iter().enumerate() {
            for &p in h {
                lo[p] = Some(k);
            }
        }
        let names = kept.iter().map(|&v| tree.name(v).to_string()).collect();
        levels.push(DTree::new(names, &edges, hosted, special));
        leaf_of.push(lo);
    }
    Ok(Tower {
        points: order.iter().map(|&p| t.name(p).to_string()).collect(),
        exit: order.iter().map(|&p| t.exit(p)).collect(),
        levels,
        leaf_of,
    })
}

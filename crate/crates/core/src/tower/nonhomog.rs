//! Search for two five-point sets that agree on L¹ but not on L².

use std::collections::{BTreeMap, HashMap};

use itertools::Itertools;
use serde::Serialize;

use super::complete::complete;
use super::generate::{all_xtrees, branches, locations, partitions, LevelDraft, Loc, XTree};
use super::{Language, Profile, Tower};
use crate::error::{Error, Result};

/// Size limits of the candidate towers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SearchBounds {
    pub max_levels: usize,
    pub max_leaves: usize,
    pub max_points: usize,
}

impl Default for SearchBounds {
    fn default() -> Self {
        SearchBounds { max_levels: 2, max_leaves: 8, max_points: 8 }
    }
}

/// Two towers with five-point sets `c1`, `c2` such that `c1[i] ↦ c2[i]` is an
/// L¹-isomorphism, while the S-atoms `s1`, `s2` (positions into the sets)
/// share a witness level in `t2` but not in `t1`.
#[derive(Debug, Clone)]
pub struct NonHomogeneityWitness {
    pub t1: Tower,
    pub c1: Vec<usize>,
    pub t2: Tower,
    pub c2: Vec<usize>,
    pub s1: [usize; 4],
    pub s2: [usize; 4],
    pub levels1: (usize, usize),
    pub levels2: (usize, usize),
    /// Number of candidate towers examined.
    pub examined: usize,
}

impl NonHomogeneityWitness {
    /// Whether the map preserves every L¹ atom both ways.
    pub fn preserves_l1(&self) -> Result<bool> {
        let a = self.t1.reduct(&self.c1, Language::L1)?;
        let b = self.t2.reduct(&self.c2, Language::L1)?;
        Ok(a.same_atoms(&b))
    }

    /// Whether the map preserves every L² atom both ways.
    pub fn preserves_l2(&self) -> Result<bool> {
        let a = self.t1.reduct(&self.c1, Language::L2)?;
        let b = self.t2.reduct(&self.c2, Language::L2)?;
        Ok(a.same_atoms(&b))
    }

    /// Extensions of the map to an L¹-isomorphism between the completions.
    /// Each is a bijection of the completions listed as pairs of point ids.
    pub fn completion_extensions(&self) -> Result<Vec<Vec<(usize, usize)>>> {
        extensions(&self.t1, &self.c1, &self.t2, &self.c2)
    }
}

/// L¹-isomorphisms between `complete(t1, a1)` and `complete(t2, a2)` that
/// extend `a1[i] ↦ a2[i]`.
pub(crate) fn extensions(t1: &Tower, a1: &[usize], t2: &Tower, a2: &[usize]) -> Result<Vec<Vec<(usize, usize)>>> {
    let k1 = complete(t1, a1)?;
    let k2 = complete(t2, a2)?;
    if k1.len() != k2.len() {
        return Ok(vec![]);
    }
    let order = |a: &[usize], k: &[usize]| a.iter().copied().chain(k.iter().copied().filter(|p| !a.contains(p))).collect_vec();
    let (o1, o2) = (order(a1, &k1), order(a2, &k2));
    let (p1, p2) = (Profile::new(t1, &o1)?, Profile::new(t2, &o2)?);
    Ok(p1
        .l1_isos_fixing(&p2, a1.len())
        .into_iter()
        .map(|perm| (0..o1.len()).map(|i| (o1[i], o2[perm[i]])).collect())
        .collect())
}

const C: usize = 5;
const C_NAMES: [&str; C] = ["x", "y", "z", "w", "u"];

/// Special choice per inner node: a neighbour, or `None` for a fresh branch
/// holding a new point.
fn special_options(x: &XTree) -> Vec<Vec<Option<usize>>> {
    let mut out = vec![vec![]];
    for v in x.inner() {
        let opts: Vec<Option<usize>> = x.neighbours(v).into_iter().map(Some).chain([None]).collect();
        out = out
            .into_iter()
            .flat_map(|c: Vec<Option<usize>>| {
                opts.iter().map(move |&o| {
                    let mut c = c.clone();
                    c.push(o);
                    c
                })
            })
            .collect();
    }
    out
}

struct Build {
    exit: Vec<usize>,
}

impl Build {
    fn fresh(&mut self, exit: usize) -> usize {
        self.exit.push(exit);
        self.exit.len() - 1
    }

    /// Level over `x`; fresh-branch nodes get a new point with exit `exit`.
    /// Returns the draft and the (node, point) pairs of fresh branches.
    fn level(
        &mut self,
        x: &XTree,
        classes: &[Vec<usize>],
        opts: &[Option<usize>],
        fresh_points: &mut dyn FnMut(&mut Self) -> usize,
    ) -> (LevelDraft, Vec<(usize, usize)>) {
        let mut d = LevelDraft::from_xtree(x, classes, |_, nb| nb[0]);
        let mut fresh = vec![];
        for (i, v) in x.inner().enumerate() {
            match opts[i] {
                Some(w) => d.special[v] = Some(w),
                None => {
                    let p = fresh_points(self);
                    let leaf = d.add_leaf(v, vec![p]);
                    d.special[v] = Some(leaf);
                    fresh.push((v, p));
                }
            }
        }
        (d, fresh)
    }

    fn tower(self, drafts: &[LevelDraft]) -> Tower {
        let names = (0..self.exit.len())
            .map(|p| if p < C { C_NAMES[p].to_string() } else { format!("e{}", p - C + 1) })
            .collect();
        Tower::from_drafts(names, self.exit, drafts)
    }
}

fn leaves_ok(d: &LevelDraft, max: usize) -> bool {
    (0..d.nodes).filter(|&v| !d.hosted[v].is_empty()).count() <= max
}

/// Rooted encoding of a level layout on the five points below `v`.
fn encode(x: &XTree, classes: &[Vec<usize>], opts: &[Option<usize>], v: usize, parent: Option<usize>) -> String {
    if v < x.leaves && parent.is_some() {
        return format!("{:?}", classes[v]);
    }
    let sp = if v >= x.leaves { opts[v - x.leaves] } else { None };
    let mut kids: Vec<String> = x
        .neighbours(v)
        .into_iter()
        .filter(|&w| Some(w) != parent)
        .map(|w| {
            let e = encode(x, classes, opts, w, Some(v));
            if sp == Some(w) {
                format!("*{e}")
            } else {
                e
            }
        })
        .collect();
    kids.sort();
    let mark = match (v >= x.leaves, sp) {
        (false, _) => format!("{:?}", classes[v]),
        (true, None) => "F".into(),
        (true, Some(w)) if Some(w) == parent => "^".into(),
        _ => String::new(),
    };
    format!("({mark}{})", kids.join(","))
}

/// Relabelling-invariant form of a level layout.
fn layout_code(x: &XTree, classes: &[Vec<usize>], opts: &[Option<usize>]) -> String {
    (0..C)
        .permutations(C)
        .flat_map(|perm| {
            let relabelled: Vec<Vec<usize>> =
                classes.iter().map(|c| c.iter().map(|&p| perm[p]).sorted().collect()).collect();
            (0..x.nodes).map(move |r| encode(x, &relabelled, opts, r, None)).collect_vec()
        })
        .min()
        .unwrap_or_default()
}

/// Calls `f` on the candidate towers: the five points `x, y, z, w, u` come
/// first; every configuration of them on at most two levels is realized,
/// up to renaming the five points, with one extra point per node whose
/// special branch avoids them.
fn for_each_candidate(bounds: SearchBounds, mut f: impl FnMut(Tower)) {
    let xtrees: Vec<Vec<XTree>> = (0..=C).map(all_xtrees).collect();
    let options: Vec<Vec<Vec<Vec<Option<usize>>>>> =
        xtrees.iter().map(|ts| ts.iter().map(special_options).collect()).collect();
    let pts: Vec<usize> = (0..C).collect();
    let mut layouts = std::collections::HashSet::new();
    for classes1 in partitions(&pts) {
        let m1 = classes1.len();
        for (xi, x1) in xtrees[m1].iter().enumerate() {
            for opts1 in &options[m1][xi] {
                if !layouts.insert(layout_code(x1, &classes1, opts1)) {
                    continue;
                }
                let mut b = Build { exit: vec![1; C] };
                let (d1, fresh1) = b.level(x1, &classes1, opts1, &mut |b| b.fresh(1));
                if b.exit.len() > bounds.max_points || !leaves_ok(&d1, bounds.max_leaves) {
                    continue;
                }
                f(Build { exit: b.exit.clone() }.tower(std::slice::from_ref(&d1)));
                if bounds.max_levels < 2 || m1 < 2 {
                    continue;
                }
                let t1 = d1.tree();
                let leaf_of = |p: usize| classes1.iter().position(|c| c.contains(&p)).unwrap();
                // one location per upper grouping, preferring a node with a fresh branch
                let mut uppers: BTreeMap<(u32, Vec<Vec<usize>>), Loc> = BTreeMap::new();
                for loc in locations(&t1) {
                    if matches!(loc, Loc::Node(v) if v >= x1.nodes) {
                        continue;
                    }
                    let reuses = matches!(loc, Loc::Node(v) if fresh1.iter().any(|&(n, _)| n == v));
                    for mask in 1u32..(1 << C) {
                        let mut by_branch: Vec<(usize, Vec<usize>)> = Vec::new();
                        for p in (0..C).filter(|&p| mask >> p & 1 == 1) {
                            let br = branches(&t1, loc, leaf_of(p));
                            match by_branch.iter_mut().find(|(bb, _)| *bb == br) {
                                Some((_, c)) => c.push(p),
                                None => by_branch.push((br, vec![p])),
                            }
                        }
                        let groups: Vec<Vec<usize>> = by_branch.into_iter().map(|(_, c)| c).collect();
                        for grouping in partitions(&groups) {
                            let mut classes2: Vec<Vec<usize>> =
                                grouping.iter().map(|g| g.iter().flatten().copied().sorted().collect()).collect();
                            classes2.sort();
                            match uppers.entry((mask, classes2)) {
                                std::collections::btree_map::Entry::Vacant(e) => {
                                    e.insert(loc);
                                }
                                std::collections::btree_map::Entry::Occupied(mut e) => {
                                    if reuses && !matches!(*e.get(), Loc::Node(v) if fresh1.iter().any(|&(n, _)| n == v)) {
                                        e.insert(loc);
                                    }
                                }
                            }
                        }
                    }
                }
                for ((mask, classes2), loc) in &uppers {
                    let m2 = classes2.len();
                    for (x2i, x2) in xtrees[m2].iter().enumerate() {
                        for opts2 in &options[m2][x2i] {
                            if let Some(t) = two_levels(&b, &d1, &fresh1, *loc, *mask, x2, classes2, opts2, bounds) {
                                f(t);
                            }
                        }
                    }
                }
            }
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn two_levels(
    base: &Build,
    d1: &LevelDraft,
    fresh1: &[(usize, usize)],
    loc: Loc,
    mask: u32,
    x2: &XTree,
    classes2: &[Vec<usize>],
    opts2: &[Option<usize>],
    bounds: SearchBounds,
) -> Option<Tower> {
    let mut b = Build { exit: base.exit.clone() };
    let mut d1 = d1.clone();
    for p in (0..C).filter(|&p| mask >> p & 1 == 1) {
        b.exit[p] = 2;
    }
    let need = opts2.iter().filter(|o| o.is_none()).count();
    let mut upper = Vec::new();
    if need > 0 {
        match loc {
            Loc::Node(v) => {
                if let Some(&(_, p)) = fresh1.iter().find(|(n, _)| *n == v) {
                    b.exit[p] = 2;
                    upper.push(p);
                }
                while upper.len() < need {
                    let p = b.fresh(2);
                    d1.add_leaf(v, vec![p]);
                    upper.push(p);
                }
            }
            Loc::Edge(a, c) => {
                let u = d1.subdivide(a, c);
                for i in 0..need {
                    let p = b.fresh(2);
                    let leaf = d1.add_leaf(u, vec![p]);
                    if i == 0 {
                        d1.special[u] = Some(leaf);
                    }
                    upper.push(p);
                }
            }
        }
    }
    if b.exit.len() > bounds.max_points {
        return None;
    }
    let mut next = upper.into_iter();
    let (d2, _) = b.level(x2, classes2, opts2, &mut |_| next.next().unwrap());
    if !leaves_ok(&d1, bounds.max_leaves) || !leaves_ok(&d2, bounds.max_leaves) {
        return None;
    }
    Some(b.tower(&[d1, d2]))
}

struct Entry {
    tower: Tower,
    profile: Profile,
    l2: Vec<u32>,
}

/// An L¹-isomorphism from `a` to `b` (as a relabelling of `a`'s positions)
/// and two S-atoms of `a` on distinct levels whose images share a level in `b`.
fn split_pair(a: &Profile, b: &Profile) -> Option<(Vec<usize>, [usize; 4], [usize; 4])> {
    let (wa, wb) = (a.witnesses(), b.witnesses());
    let quads: Vec<[usize; 4]> = (0..C)
        .permutations(4)
        .map(|q| [q[0], q[1], q[2], q[3]])
        .filter(|q| wa.s(q[0], q[1], q[2], q[3]).is_some())
        .collect();
    for perm in a.l1_isos_fixing(b, 0) {
        let img = |q: &[usize; 4]| q.map(|i| perm[i]);
        for (i, q1) in quads.iter().enumerate() {
            for q2 in &quads[i + 1..] {
                let (i1, i2) = (img(q1), img(q2));
                let la = (wa.s(q1[0], q1[1], q1[2], q1[3]), wa.s(q2[0], q2[1], q2[2], q2[3]));
                let lb = (wb.s(i1[0], i1[1], i1[2], i1[3]), wb.s(i2[0], i2[1], i2[2], i2[3]));
                if la.0 != la.1 && lb.0 == lb.1 {
                    return Some((perm, *q1, *q2));
                }
            }
        }
    }
    None
}

/// Exhaustive search over the candidate towers within `bounds`.
pub fn nonhomogeneity_witness(bounds: SearchBounds) -> Result<NonHomogeneityWitness> {
    let mut buckets: BTreeMap<Vec<u32>, Vec<Entry>> = BTreeMap::new();
    let mut seen_l2: HashMap<Vec<u32>, ()> = HashMap::new();
    let mut examined = 0;
    let ids: Vec<usize> = (0..C).collect();
    for_each_candidate(bounds, |t| {
        examined += 1;
        let profile = Profile::new(&t, &ids).expect("ids in range");
        let l2 = profile.canonical_l2();
        let l1 = profile.canonical_l1();
        let mut key = l1.clone();
        key.push(u32::MAX);
        key.extend(&l2);
        if seen_l2.insert(key, ()).is_none() {
            buckets.entry(l1).or_default().push(Entry { tower: t, profile, l2 });
        }
    });
    for entries in buckets.values() {
        if entries.iter().map(|e| &e.l2).all_equal() {
            continue;
        }
        for a in entries {
            for b in entries {
                if a.l2 == b.l2 {
                    continue;
                }
                let Some((perm, q1, q2)) = split_pair(&a.profile, &b.profile) else { continue };
                let mut c2 = vec![0; C];
                for i in 0..C {
                    c2[i] = perm[i];
                }
                let wa = a.profile.witnesses();
                let wb = b.profile.witnesses();
                let lv = |w: &super::Witnesses, q: [usize; 4]| w.s(q[0], q[1], q[2], q[3]).unwrap();
                let (i1, i2) = (q1.map(|i| perm[i]), q2.map(|i| perm[i]));
                return Ok(NonHomogeneityWitness {
                    t1: a.tower.clone(),
                    c1: ids.clone(),
                    t2: b.tower.clone(),
                    c2,
                    s1: q1,
                    s2: q2,
                    levels1: (lv(wa, q1), lv(wa, q2)),
                    levels2: (lv(wb, i1), lv(wb, i2)),
                    examined,
                });
            }
        }
    }
    Err(Error::NoWitness)
}

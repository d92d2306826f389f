//! Tree enumeration and tower generators.

use rand::seq::SliceRandom;
use rand::Rng;

use super::{DTree, Tower};

/// A phylogenetic tree: leaves `0..leaves`, inner nodes `leaves..nodes`,
/// every inner node of degree at least 3.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XTree {
    pub leaves: usize,
    pub nodes: usize,
    pub edges: Vec<(usize, usize)>,
}

impl XTree {
    pub fn neighbours(&self, v: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .edges
            .iter()
            .filter_map(|&(a, b)| if a == v { Some(b) } else if b == v { Some(a) } else { None })
            .collect();
        out.sort_unstable();
        out
    }

    pub fn inner(&self) -> std::ops::Range<usize> {
        self.leaves..self.nodes
    }

    /// Tree on `k + 1` leaves with leaf `k` attached at inner node `v`.
    fn attach(&self, k: usize, v: usize) -> XTree {
        let mut t = self.clone();
        t.edges.push((k, v));
        t
    }

    /// Tree on `k + 1` leaves with leaf `k` hung from the middle of edge `e`.
    fn subdivide(&self, k: usize, e: usize) -> XTree {
        let mut t = self.clone();
        let (a, b) = t.edges.swap_remove(e);
        let u = t.nodes;
        t.nodes += 1;
        t.edges.extend([(a, u), (u, b), (u, k)]);
        t
    }

    fn seed(m: usize) -> XTree {
        if m == 1 {
            XTree { leaves: 1, nodes: 1, edges: vec![] }
        } else {
            XTree { leaves: m, nodes: m, edges: vec![(0, 1)] }
        }
    }

    /// Renumbers inner nodes after the leaves; leaves not yet inserted are
    /// absent from the edge list until the final tree.
    fn finish(mut self) -> XTree {
        self.edges.iter_mut().for_each(|e| {
            if e.0 > e.1 {
                *e = (e.1, e.0)
            }
        });
        self.edges.sort_unstable();
        self
    }
}

/// All phylogenetic trees on `m` labelled leaves (1, 1, 1, 4, 26, 236, … for m = 1, 2, …).
pub fn all_xtrees(m: usize) -> Vec<XTree> {
    if m == 0 {
        return vec![];
    }
    let mut cur = vec![XTree::seed(m)];
    for k in 2..m {
        let mut next = Vec::new();
        for t in &cur {
            for v in t.inner() {
                next.push(t.attach(k, v));
            }
            for e in 0..t.edges.len() {
                next.push(t.subdivide(k, e));
            }
        }
        cur = next;
    }
    cur.into_iter().map(XTree::finish).collect()
}

/// A random phylogenetic tree on `m` leaves; binary when `binary` holds.
pub fn random_xtree<R: Rng>(rng: &mut R, m: usize, binary: bool) -> XTree {
    let mut t = XTree::seed(m.max(1));
    for k in 2..m {
        let inner = if binary { 0 } else { t.nodes - t.leaves };
        let pick = rng.gen_range(0..inner + t.edges.len());
        t = if pick < inner { t.attach(k, t.leaves + pick) } else { t.subdivide(k, pick - inner) };
    }
    t.finish()
}

/// A level under construction: tree edges, hosted points and specials.
#[derive(Debug, Clone, Default)]
pub(crate) struct LevelDraft {
    pub nodes: usize,
    pub edges: Vec<(usize, usize)>,
    pub hosted: Vec<Vec<usize>>,
    pub special: Vec<Option<usize>>,
}

impl LevelDraft {
    /// Level over `x` with leaf `i` hosting `classes[i]` and inner node `v`
    /// special towards `special(v, neighbours)`.
    pub fn from_xtree(x: &XTree, classes: &[Vec<usize>], mut special: impl FnMut(usize, &[usize]) -> usize) -> Self {
        let mut hosted = vec![Vec::new(); x.nodes];
        hosted[..x.leaves].clone_from_slice(&classes[..x.leaves]);
        let mut sp = vec![None; x.nodes];
        for v in x.inner() {
            let nb = x.neighbours(v);
            sp[v] = Some(special(v, &nb));
        }
        LevelDraft { nodes: x.nodes, edges: x.edges.clone(), hosted, special: sp }
    }

    pub fn add_inner(&mut self) -> usize {
        self.nodes += 1;
        self.hosted.push(vec![]);
        self.special.push(None);
        self.nodes - 1
    }

    pub fn add_leaf(&mut self, at: usize, pts: Vec<usize>) -> usize {
        let u = self.nodes;
        self.nodes += 1;
        self.edges.push((at, u));
        self.hosted.push(pts);
        self.special.push(None);
        u
    }

    /// Splits edge `(a, b)` with a new node and returns it.
    pub fn subdivide(&mut self, a: usize, b: usize) -> usize {
        let i = self.edges.iter().position(|&e| e == (a, b) || e == (b, a)).expect("edge exists");
        self.edges.swap_remove(i);
        let u = self.nodes;
        self.nodes += 1;
        self.edges.extend([(a, u), (u, b)]);
        self.hosted.push(vec![]);
        self.special.push(Some(a));
        u
    }

    pub fn tree(&self) -> DTree {
        let names = (0..self.nodes).map(|v| format!("v{v}")).collect();
        let mut hosted = self.hosted.clone();
        hosted.iter_mut().for_each(|h| h.sort_unstable());
        DTree::new(names, &self.edges, hosted, self.special.clone())
    }
}

impl Tower {
    pub(crate) fn from_drafts(points: Vec<String>, exit: Vec<usize>, drafts: &[LevelDraft]) -> Tower {
        let mut levels = Vec::new();
        let mut leaf_of = Vec::new();
        for (j, d) in drafts.iter().enumerate() {
            let t = d.tree();
            let mut lo = vec![None; points.len()];
            for v in 0..t.node_count() {
                for &p in t.hosted(v) {
                    lo[p] = Some(v);
                }
            }
            let names = t.names.iter().map(|n| format!("l{}{n}", j + 1)).collect();
            levels.push(DTree { names, ..t });
            leaf_of.push(lo);
        }
        Tower { points, exit, levels, leaf_of }
    }
}

fn point_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("p{i}")).collect()
}

fn random_special<R: Rng>(rng: &mut R) -> impl FnMut(usize, &[usize]) -> usize + '_ {
    move |_, nb: &[usize]| *nb.choose(rng).unwrap()
}

/// Branch index of each present point around a location of `t`: an inner
/// node, or an edge given as an ordered pair.
pub(crate) fn branches(t: &DTree, loc: Loc, leaf: usize) -> usize {
    match loc {
        Loc::Node(v) => t.toward(v, leaf),
        Loc::Edge(a, b) => {
            if leaf == b || t.in_branch(a, b, leaf) {
                b
            } else {
                a
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Loc {
    Node(usize),
    Edge(usize, usize),
}

pub(crate) fn locations(t: &DTree) -> Vec<Loc> {
    let mut out: Vec<Loc> = t.inner_nodes().map(Loc::Node).collect();
    for a in 0..t.node_count() {
        for &b in t.neighbours(a) {
            if a < b {
                out.push(Loc::Edge(a, b));
            }
        }
    }
    out
}

/// A random valid tower with up to `max_points` points and `max_levels` levels.
pub fn random_tower<R: Rng>(rng: &mut R, max_points: usize, max_levels: usize) -> Tower {
    let n = rng.gen_range(3.min(max_points)..=max_points.max(1));
    let mut exit = vec![1; n];
    let k = rng.gen_range(1..=n);
    let mut classes = vec![Vec::new(); k];
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    for (i, &p) in order.iter().enumerate() {
        let c = if i < k { i } else { rng.gen_range(0..k) };
        classes[c].push(p);
    }
    let x = random_xtree(rng, k, false);
    let mut drafts = vec![LevelDraft::from_xtree(&x, &classes, random_special(rng))];
    while drafts.len() < max_levels {
        let t = drafts.last().unwrap().tree();
        let locs = locations(&t);
        if locs.is_empty() {
            break;
        }
        let loc = *locs.choose(rng).unwrap();
        let present: Vec<usize> = (0..n).filter(|&p| exit[p] == drafts.len()).collect();
        let mut groups: Vec<(usize, usize)> = Vec::new();
        let mut next: Vec<Vec<usize>> = Vec::new();
        for &p in &present {
            let leaf = (0..t.node_count()).find(|&v| t.hosted(v).contains(&p)).unwrap();
            let b = branches(&t, loc, leaf);
            let g = match groups.iter().find(|(bb, _)| *bb == b) {
                Some(&(_, g)) => g,
                None => {
                    let g = if rng.gen_bool(0.25) { usize::MAX } else { rng.gen_range(0..4) };
                    groups.push((b, g));
                    g
                }
            };
            if g == usize::MAX || rng.gen_bool(0.15) {
                continue;
            }
            while next.len() <= g {
                next.push(vec![]);
            }
            next[g].push(p);
        }
        next.retain(|c| !c.is_empty());
        if next.is_empty() {
            break;
        }
        for c in &next {
            for &p in c {
                exit[p] += 1;
            }
        }
        let x = random_xtree(rng, next.len(), false);
        drafts.push(LevelDraft::from_xtree(&x, &next, random_special(rng)));
    }
    Tower::from_drafts(point_names(n), exit, &drafts)
}

/// A random tower in which each level sits above one node of the level
/// below: points on that node's special branch leave, and every other branch
/// there becomes one class of the next level. Leaves are single points at
/// level 1.
pub fn generic_tower<R: Rng>(rng: &mut R, n: usize, max_levels: usize) -> Tower {
    let mut exit = vec![1; n];
    let classes: Vec<Vec<usize>> = (0..n).map(|p| vec![p]).collect();
    let x = random_xtree(rng, n, false);
    let mut drafts = vec![LevelDraft::from_xtree(&x, &classes, random_special(rng))];
    while drafts.len() < max_levels {
        let t = drafts.last().unwrap().tree();
        let Some(v) = t.inner_nodes().max_by_key(|&v| (t.degree(v), std::cmp::Reverse(v))) else {
            break;
        };
        let sp = t.special(v).unwrap();
        let mut next: Vec<(usize, Vec<usize>)> = Vec::new();
        for p in (0..n).filter(|&p| exit[p] == drafts.len()) {
            let leaf = (0..t.node_count()).find(|&u| t.hosted(u).contains(&p)).unwrap();
            let b = t.toward(v, leaf);
            if b == sp {
                continue;
            }
            match next.iter_mut().find(|(bb, _)| *bb == b) {
                Some((_, c)) => c.push(p),
                None => next.push((b, vec![p])),
            }
        }
        if next.len() < 2 {
            break;
        }
        let next: Vec<Vec<usize>> = next.into_iter().map(|(_, c)| c).collect();
        for &p in next.iter().flatten() {
            exit[p] += 1;
        }
        let x = random_xtree(rng, next.len(), false);
        drafts.push(LevelDraft::from_xtree(&x, &next, random_special(rng)));
    }
    Tower::from_drafts(point_names(n), exit, &drafts)
}

/// Every special-branch assignment on `x`: one neighbour per inner node.
pub(crate) fn special_choices(x: &XTree) -> Vec<Vec<usize>> {
    let nbs: Vec<Vec<usize>> = x.inner().map(|v| x.neighbours(v)).collect();
    let mut out = vec![vec![]];
    for nb in &nbs {
        out = out
            .into_iter()
            .flat_map(|c: Vec<usize>| {
                nb.iter().map(move |&w| {
                    let mut c = c.clone();
                    c.push(w);
                    c
                })
            })
            .collect();
    }
    out
}

/// All set partitions of `items`, blocks in order of first element.
pub(crate) fn partitions<T: Clone>(items: &[T]) -> Vec<Vec<Vec<T>>> {
    let Some((first, rest)) = items.split_first() else {
        return vec![vec![]];
    };
    let mut out = Vec::new();
    for p in partitions(rest) {
        for i in 0..p.len() {
            let mut q = p.clone();
            q[i].insert(0, first.clone());
            out.push(q);
        }
        let mut q = p;
        q.insert(0, vec![first.clone()]);
        out.push(q);
    }
    out
}

/// Calls `f` on every tower of the following family: level 1 carries one
/// point per leaf on any tree with at most `max_leaves` leaves; an optional
/// level 2 is built over a location of level 1 from any nonempty set of
/// surviving branches, any grouping of them into classes, and any tree and
/// special assignment on those classes.
pub fn small_towers(max_leaves: usize, mut f: impl FnMut(&Tower)) {
    for m in 1..=max_leaves {
        let names = point_names(m);
        let classes: Vec<Vec<usize>> = (0..m).map(|p| vec![p]).collect();
        for x in all_xtrees(m) {
            for sp in special_choices(&x) {
                let d1 = LevelDraft::from_xtree(&x, &classes, |v, _| sp[v - x.leaves]);
                f(&Tower::from_drafts(names.clone(), vec![1; m], std::slice::from_ref(&d1)));
                let t = d1.tree();
                for loc in locations(&t) {
                    let mut by_branch: Vec<(usize, Vec<usize>)> = Vec::new();
                    for p in 0..m {
                        let b = branches(&t, loc, p);
                        match by_branch.iter_mut().find(|(bb, _)| *bb == b) {
                            Some((_, c)) => c.push(p),
                            None => by_branch.push((b, vec![p])),
                        }
                    }
                    let nb = by_branch.len();
                    for mask in 1u32..(1 << nb) {
                        let alive: Vec<Vec<usize>> =
                            (0..nb).filter(|&i| mask >> i & 1 == 1).map(|i| by_branch[i].1.clone()).collect();
                        for grouping in partitions(&alive) {
                            let upper: Vec<Vec<usize>> =
                                grouping.iter().map(|g| g.iter().flatten().copied().collect()).collect();
                            let mut exit = vec![1; m];
                            upper.iter().flatten().for_each(|&p| exit[p] = 2);
                            for x2 in all_xtrees(upper.len()) {
                                for sp2 in special_choices(&x2) {
                                    let d2 = LevelDraft::from_xtree(&x2, &upper, |v, _| sp2[v - x2.leaves]);
                                    f(&Tower::from_drafts(names.clone(), exit.clone(), &[d1.clone(), d2]));
                                }
                            }
                        }
                    }
                }
            }
        }
    }
}

//! Finite towers of D-sets: a chain of levels, each a tree whose leaves
//! host point classes and whose inner nodes carry a special branch.

mod alternation;
mod atoms;
mod btower;
mod complete;
mod generate;
mod homog;
mod indisc;
mod nonhomog;
mod witness;

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use alternation::{max_alternation, Formula};
pub use atoms::{Language, Symbol};
pub use btower::{BLevelSpec, BTower, BTowerSpec};
pub use complete::{complete, induced_tower};
pub use generate::{all_xtrees, generic_tower, random_tower, small_towers, XTree};
pub use homog::{homogenization_check, ExtensionFailure, HomogenizationReport};
pub use indisc::{indiscernible_prefix, Family};
pub use nonhomog::{nonhomogeneity_witness, NonHomogeneityWitness, SearchBounds};
pub use witness::{Profile, Witnesses};

/// One level of a tower: an unrooted tree with hosted points and special branches.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DTree {
    names: Vec<String>,
    adj: Vec<Vec<usize>>,
    hosted: Vec<Vec<usize>>,
    special: Vec<Option<usize>>,
    parent: Vec<usize>,
    depth: Vec<usize>,
    is_tree: bool,
}

impl DTree {
    fn new(
        names: Vec<String>,
        edges: &[(usize, usize)],
        hosted: Vec<Vec<usize>>,
        special: Vec<Option<usize>>,
    ) -> Self {
        let n = names.len();
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj.iter_mut().for_each(|a| a.sort_unstable());
        let mut parent = vec![usize::MAX; n];
        let mut depth = vec![0; n];
        let mut seen = vec![false; n];
        if n > 0 {
            let mut queue = VecDeque::from([0]);
            seen[0] = true;
            parent[0] = 0;
            while let Some(v) = queue.pop_front() {
                for &w in &adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        parent[w] = v;
                        depth[w] = depth[v] + 1;
                        queue.push_back(w);
                    }
                }
            }
        }
        let is_tree = seen.iter().all(|&s| s) && edges.len() + 1 == n.max(1) && n > 0;
        DTree { names, adj, hosted, special, parent, depth, is_tree }
    }

    pub fn node_count(&self) -> usize {
        self.names.len()
    }

    pub fn name(&self, v: usize) -> &str {
        &self.names[v]
    }

    pub fn node_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn neighbours(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn is_leaf(&self, v: usize) -> bool {
        self.adj[v].len() <= 1
    }

    pub fn hosted(&self, v: usize) -> &[usize] {
        &self.hosted[v]
    }

    pub fn special(&self, v: usize) -> Option<usize> {
        self.special[v]
    }

    pub fn inner_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.node_count()).filter(move |&v| !self.is_leaf(v))
    }

    pub fn leaves(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.node_count()).filter(move |&v| self.is_leaf(v))
    }

    pub fn lca(&self, mut a: usize, mut b: usize) -> usize {
        while self.depth[a] > self.depth[b] {
            a = self.parent[a];
        }
        while self.depth[b] > self.depth[a] {
            b = self.parent[b];
        }
        while a != b {
            a = self.parent[a];
            b = self.parent[b];
        }
        a
    }

    /// Nodes on the path from `a` to `b`, both included.
    pub fn path(&self, a: usize, b: usize) -> Vec<usize> {
        let m = self.lca(a, b);
        let mut left = vec![];
        let mut x = a;
        while x != m {
            left.push(x);
            x = self.parent[x];
        }
        left.push(m);
        let mut right = vec![];
        let mut y = b;
        while y != m {
            right.push(y);
            y = self.parent[y];
        }
        left.extend(right.into_iter().rev());
        left
    }

    pub fn median(&self, a: usize, b: usize, c: usize) -> usize {
        let cands = [self.lca(a, b), self.lca(a, c), self.lca(b, c)];
        *cands.iter().max_by_key(|&&v| self.depth[v]).unwrap()
    }

    /// The neighbour of `v` on the path towards `u` (`u != v`).
    pub fn toward(&self, v: usize, u: usize) -> usize {
        if self.lca(v, u) == v {
            let mut x = u;
            while self.parent[x] != v {
                x = self.parent[x];
            }
            x
        } else {
            self.parent[v]
        }
    }

    /// Whether `u` lies in the branch at `v` entered through neighbour `w`.
    pub fn in_branch(&self, v: usize, w: usize, u: usize) -> bool {
        u != v && self.toward(v, u) == w
    }
}

/// JSON form of one level.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct LevelSpec {
    pub nodes: Vec<String>,
    pub edges: Vec<(String, String)>,
    pub leaves: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    pub special: BTreeMap<String, String>,
}

/// JSON form of a tower. Points missing from `exit` are present at every level.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct TowerSpec {
    pub levels: Vec<LevelSpec>,
    #[serde(default)]
    pub exit: BTreeMap<String, usize>,
}

/// A chain of levels; level 1 is the lowest and holds every point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tower {
    points: Vec<String>,
    exit: Vec<usize>,
    levels: Vec<DTree>,
    leaf_of: Vec<Vec<Option<usize>>>,
}

/// Outcome of [`Tower::validate`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub violations: Vec<String>,
}

impl Tower {
    /// Builds a tower from its JSON form. Structural violations are left for
    /// [`Tower::validate`]; only dangling names are errors.
    pub fn from_spec(spec: &TowerSpec) -> Result<Self> {
        if spec.levels.is_empty() {
            return Err(Error::InvalidTower("no levels".into()));
        }
        let mut points: Vec<String> = Vec::new();
        let mut index: BTreeMap<String, usize> = BTreeMap::new();
        for lv in &spec.levels {
            for ps in lv.leaves.values() {
                for p in ps {
                    if !index.contains_key(p) {
                        index.insert(p.clone(), points.len());
                        points.push(p.clone());
                    }
                }
            }
        }
        for p in spec.exit.keys() {
            if !index.contains_key(p) {
                return Err(Error::UnknownPoint(p.clone()));
            }
        }
        let m = spec.levels.len();
        let exit: Vec<usize> = points.iter().map(|p| spec.exit.get(p).copied().unwrap_or(m)).collect();
        let mut levels = Vec::with_capacity(m);
        let mut leaf_of = Vec::with_capacity(m);
        for (li, lv) in spec.levels.iter().enumerate() {
            let mut names = lv.nodes.clone();
            let mut node_index: BTreeMap<&str, usize> = BTreeMap::new();
            for (i, n) in lv.nodes.iter().enumerate() {
                if node_index.insert(n.as_str(), i).is_some() {
                    return Err(Error::InvalidTower(format!("level {}: duplicate node {n}", li + 1)));
                }
            }
            let lookup = |n: &str| {
                node_index
                    .get(n)
                    .copied()
                    .ok_or_else(|| Error::InvalidTower(format!("level {}: unknown node {n}", li + 1)))
            };
            let edges = lv
                .edges
                .iter()
                .map(|(a, b)| Ok((lookup(a)?, lookup(b)?)))
                .collect::<Result<Vec<_>>>()?;
            let mut hosted = vec![Vec::new(); names.len()];
            let mut lo = vec![None; points.len()];
            for (leaf, ps) in &lv.leaves {
                let v = lookup(leaf)?;
                for p in ps {
                    let pi = index[p];
                    if lo[pi].is_some() {
                        return Err(Error::InvalidTower(format!("level {}: point {p} hosted twice", li + 1)));
                    }
                    lo[pi] = Some(v);
                    hosted[v].push(pi);
                }
            }
            hosted.iter_mut().for_each(|h| h.sort_unstable());
            let mut special = vec![None; names.len()];
            for (a, b) in &lv.special {
                special[lookup(a)?] = Some(lookup(b)?);
            }
            names.shrink_to_fit();
            levels.push(DTree::new(names, &edges, hosted, special));
            leaf_of.push(lo);
        }
        Ok(Tower { points, exit, levels, leaf_of })
    }

    pub fn to_spec(&self) -> TowerSpec {
        let m = self.levels.len();
        let levels = self
            .levels
            .iter()
            .map(|t| {
                let mut edges = Vec::new();
                for v in 0..t.node_count() {
                    for &w in &t.adj[v] {
                        if v < w {
                            edges.push((t.names[v].clone(), t.names[w].clone()));
                        }
                    }
                }
                LevelSpec {
                    nodes: t.names.clone(),
                    edges,
                    leaves: (0..t.node_count())
                        .filter(|&v| !t.hosted[v].is_empty())
                        .map(|v| (t.names[v].clone(), t.hosted[v].iter().map(|&p| self.points[p].clone()).collect()))
                        .collect(),
                    special: (0..t.node_count())
                        .filter_map(|v| t.special[v].map(|w| (t.names[v].clone(), t.names[w].clone())))
                        .collect(),
                }
            })
            .collect();
        let exit = self
            .points
            .iter()
            .zip(&self.exit)
            .filter(|(_, &e)| e != m)
            .map(|(p, &e)| (p.clone(), e))
            .collect();
        TowerSpec { levels, exit }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let spec: TowerSpec = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Tower::from_spec(&spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_spec()).expect("serializable")
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn point_count(&self) -> usize {
        self.points.len()
    }

    pub fn level_count(&self) -> usize {
        self.levels.len()
    }

    /// Tree at 1-based level `j`.
    pub fn level(&self, j: usize) -> &DTree {
        &self.levels[j - 1]
    }

    /// Highest 1-based level at which `p` is present.
    pub fn exit(&self, p: usize) -> usize {
        self.exit[p]
    }

    pub fn id(&self, name: &str) -> Result<usize> {
        self.points.iter().position(|p| p == name).ok_or_else(|| Error::UnknownPoint(name.to_string()))
    }

    pub fn ids(&self, names: &[&str]) -> Result<Vec<usize>> {
        names.iter().map(|n| self.id(n)).collect()
    }

    pub fn name(&self, p: usize) -> &str {
        &self.points[p]
    }

    /// Leaf hosting `p` at 1-based level `j`, if present.
    pub fn leaf(&self, j: usize, p: usize) -> Option<usize> {
        if self.exit[p] < j {
            return None;
        }
        self.leaf_of[j - 1][p]
    }

    pub fn present(&self, j: usize) -> Vec<usize> {
        (0..self.points.len()).filter(|&p| self.exit[p] >= j).collect()
    }

    /// Leaves of `pts` at level `j` when all are present on pairwise distinct leaves.
    fn distinct_leaves<const K: usize>(&self, j: usize, pts: [usize; K]) -> Option<[usize; K]> {
        let mut out = [0; K];
        for (i, &p) in pts.iter().enumerate() {
            out[i] = self.leaf(j, p)?;
            if out[..i].contains(&out[i]) {
                return None;
            }
        }
        Some(out)
    }

    fn l_at(&self, j: usize, x: usize, y: usize, z: usize) -> bool {
        let Some([a, b, c]) = self.distinct_leaves(j, [x, y, z]) else {
            return false;
        };
        let t = &self.levels[j - 1];
        let v = t.median(a, b, c);
        match t.special(v) {
            Some(s) => v != a && t.toward(v, a) == s,
            None => false,
        }
    }

    fn s_at(&self, j: usize, x: usize, y: usize, z: usize, w: usize) -> bool {
        let Some([a, b, c, d]) = self.distinct_leaves(j, [x, y, z, w]) else {
            return false;
        };
        paths_disjoint(&self.levels[j - 1], a, b, c, d)
    }

    /// Greatest level witnessing `L(x; y, z)`.
    pub fn witness_l(&self, x: usize, y: usize, z: usize) -> Option<usize> {
        (1..=self.levels.len()).rev().find(|&j| self.l_at(j, x, y, z))
    }

    /// Greatest level witnessing `S(x, y; z, w)`.
    pub fn witness_s(&self, x: usize, y: usize, z: usize, w: usize) -> Option<usize> {
        (1..=self.levels.len()).rev().find(|&j| self.s_at(j, x, y, z, w))
    }

    /// Median node of the leaves of `x, y, z` at level `j`.
    pub fn ram(&self, j: usize, x: usize, y: usize, z: usize) -> Result<usize> {
        let [a, b, c] = self.distinct_leaves(j, [x, y, z]).ok_or(Error::NotPairwiseInequivalent)?;
        Ok(self.levels[j - 1].median(a, b, c))
    }

    /// Disjointness of the leaf paths `x–y` and `z–w` at level `j`.
    pub fn atom_d(&self, j: usize, x: usize, y: usize, z: usize, w: usize) -> Result<bool> {
        let [a, b, c, d] = self.distinct_leaves(j, [x, y, z, w]).ok_or(Error::NotPairwiseInequivalent)?;
        Ok(paths_disjoint(&self.levels[j - 1], a, b, c, d))
    }

    pub fn validate(&self) -> ValidationReport {
        let mut v = Vec::new();
        let m = self.levels.len();
        for (p, &e) in self.exit.iter().enumerate() {
            if e == 0 || e > m {
                v.push(format!("exit level {e} of {} out of range", self.points[p]));
            }
        }
        for j in 1..=m {
            let t = &self.levels[j - 1];
            if !t.is_tree {
                v.push(format!("level {j}: not a tree"));
                continue;
            }
            for node in 0..t.node_count() {
                let deg = t.degree(node);
                if deg == 2 {
                    v.push(format!("level {j}: inner degree < 3 at {}", t.names[node]));
                }
                if deg >= 2 {
                    if !t.hosted[node].is_empty() {
                        v.push(format!("level {j}: inner node {} hosts points", t.names[node]));
                    }
                    match t.special[node] {
                        None => v.push(format!("level {j}: no special branch at {}", t.names[node])),
                        Some(s) if !t.adj[node].contains(&s) => {
                            v.push(format!("level {j}: special of {} is not a neighbour", t.names[node]))
                        }
                        _ => {}
                    }
                } else {
                    if t.hosted[node].is_empty() {
                        v.push(format!("level {j}: leaf {} hosts no point", t.names[node]));
                    }
                    if t.special[node].is_some() {
                        v.push(format!("level {j}: leaf {} has a special branch", t.names[node]));
                    }
                }
            }
            for p in 0..self.points.len() {
                let here = self.leaf_of[j - 1][p].is_some();
                if here != (self.exit[p] >= j) {
                    v.push(format!("level {j}: presence of {} disagrees with its exit level", self.points[p]));
                }
            }
        }
        if !v.is_empty() {
            return ValidationReport { ok: false, violations: v };
        }
        for j in 1..m {
            let upper = self.present(j + 1);
            for (i, &p) in upper.iter().enumerate() {
                for &q in &upper[i + 1..] {
                    if self.leaf(j, p) == self.leaf(j, q) && self.leaf(j + 1, p) != self.leaf(j + 1, q) {
                        v.push(format!(
                            "levels {j}/{}: {} and {} share a leaf below but not above",
                            j + 1,
                            self.points[p],
                            self.points[q]
                        ));
                    }
                }
            }
            if !self.cone_coherent(j) {
                v.push(format!("levels {j}/{}: no cone location for the upper classes", j + 1));
            }
        }
        ValidationReport { ok: v.is_empty(), violations: v }
    }

    /// Some node or edge of level `j` splits the level-`j+1` points so that
    /// every branch holds points of at most one upper class.
    fn cone_coherent(&self, j: usize) -> bool {
        let upper = self.present(j + 1);
        let classes: BTreeSet<usize> = upper.iter().map(|&p| self.leaf(j + 1, p).unwrap()).collect();
        if classes.len() <= 1 {
            return true;
        }
        let t = &self.levels[j - 1];
        let fits = |branch_of: &dyn Fn(usize) -> Option<usize>| {
            let mut owner: BTreeMap<usize, usize> = BTreeMap::new();
            for &p in &upper {
                let Some(b) = branch_of(self.leaf(j, p).unwrap()) else {
                    return false;
                };
                let c = self.leaf(j + 1, p).unwrap();
                if *owner.entry(b).or_insert(c) != c {
                    return false;
                }
            }
            true
        };
        for v in t.inner_nodes() {
            if fits(&|leaf| if leaf == v { None } else { Some(t.toward(v, leaf)) }) {
                return true;
            }
        }
        for a in 0..t.node_count() {
            for &b in &t.adj[a] {
                if a < b && fits(&|leaf| Some(if leaf == b || t.in_branch(a, b, leaf) { b } else { a })) {
                    return true;
                }
            }
        }
        false
    }
}

/// Whether `v` lies on the path from `x` to `y`.
fn on_path(t: &DTree, v: usize, x: usize, y: usize) -> bool {
    let m = t.lca(x, y);
    (t.lca(v, x) == v || t.lca(v, y) == v) && t.lca(v, m) == m
}

/// Two tree paths meet iff one contains the top node of the other.
fn paths_disjoint(t: &DTree, a: usize, b: usize, c: usize, d: usize) -> bool {
    !on_path(t, t.lca(a, b), c, d) && !on_path(t, t.lca(c, d), a, b)
}

/// The two reference towers shipped with the crate.
pub mod fixtures {
    use super::Tower;

    pub const T_STAR_JSON: &str = include_str!("../../fixtures/tstar.json");
    pub const T_DIAMOND_JSON: &str = include_str!("../../fixtures/tdiamond.json");

    /// Level 1: star on x, y, z, w, special towards x. Level 2: star on
    /// x, y, z, special towards y. `w` exits at level 1.
    pub fn t_star() -> Tower {
        Tower::from_json(T_STAR_JSON).expect("fixture parses")
    }

    /// One level: path u1–u2 with x, y at u1 and z, w at u2; specials towards x and z.
    pub fn t_diamond() -> Tower {
        Tower::from_json(T_DIAMOND_JSON).expect("fixture parses")
    }
}

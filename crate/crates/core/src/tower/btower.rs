//! Towers of B-sets: trees whose vertices host point classes, closed under medians.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{DTree, ValidationReport};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct BLevelSpec {
    pub vertices: Vec<String>,
    pub edges: Vec<(String, String)>,
    pub hosts: BTreeMap<String, Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct BTowerSpec {
    pub levels: Vec<BLevelSpec>,
    #[serde(default)]
    pub exit: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BTower {
    points: Vec<String>,
    exit: Vec<usize>,
    levels: Vec<DTree>,
    vertex_of: Vec<Vec<Option<usize>>>,
}

impl BTower {
    pub fn from_spec(spec: &BTowerSpec) -> Result<Self> {
        if spec.levels.is_empty() {
            return Err(Error::InvalidTower("no levels".into()));
        }
        let mut points: Vec<String> = Vec::new();
        for lv in &spec.levels {
            for p in lv.hosts.values().flatten() {
                if !points.contains(p) {
                    points.push(p.clone());
                }
            }
        }
        if let Some(p) = spec.exit.keys().find(|p| !points.contains(p)) {
            return Err(Error::UnknownPoint(p.clone()));
        }
        let m = spec.levels.len();
        let exit = points.iter().map(|p| spec.exit.get(p).copied().unwrap_or(m)).collect();
        let mut levels = Vec::new();
        let mut vertex_of = Vec::new();
        for (li, lv) in spec.levels.iter().enumerate() {
            let lookup = |n: &str| {
                lv.vertices
                    .iter()
                    .position(|v| v == n)
                    .ok_or_else(|| Error::InvalidTower(format!("level {}: unknown vertex {n}", li + 1)))
            };
            let edges = lv.edges.iter().map(|(a, b)| Ok((lookup(a)?, lookup(b)?))).collect::<Result<Vec<_>>>()?;
            let mut hosted = vec![Vec::new(); lv.vertices.len()];
            let mut vo = vec![None; points.len()];
            for (v, ps) in &lv.hosts {
                let vi = lookup(v)?;
                for p in ps {
                    let pi = points.iter().position(|q| q == p).unwrap();
                    if vo[pi].replace(vi).is_some() {
                        return Err(Error::InvalidTower(format!("level {}: point {p} hosted twice", li + 1)));
                    }
                    hosted[vi].push(pi);
                }
            }
            hosted.iter_mut().for_each(|h| h.sort_unstable());
            levels.push(DTree::new(lv.vertices.clone(), &edges, hosted, vec![None; lv.vertices.len()]));
            vertex_of.push(vo);
        }
        Ok(BTower { points, exit, levels, vertex_of })
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let spec: BTowerSpec = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        BTower::from_spec(&spec)
    }

    pub fn id(&self, name: &str) -> Result<usize> {
        self.points.iter().position(|p| p == name).ok_or_else(|| Error::UnknownPoint(name.to_string()))
    }

    pub fn name(&self, p: usize) -> &str {
        &self.points[p]
    }

    fn vertex(&self, j: usize, p: usize) -> Option<usize> {
        if self.exit[p] < j {
            None
        } else {
            self.vertex_of[j - 1][p]
        }
    }

    pub fn validate(&self) -> ValidationReport {
        let mut v = Vec::new();
        let m = self.levels.len();
        for j in 1..=m {
            let t = &self.levels[j - 1];
            if !t.is_tree {
                v.push(format!("level {j}: not a tree"));
                continue;
            }
            for p in 0..self.points.len() {
                if self.vertex_of[j - 1][p].is_some() != (self.exit[p] >= j) {
                    v.push(format!("level {j}: presence of {} disagrees with its exit level", self.points[p]));
                }
            }
            let occ: Vec<usize> = (0..t.node_count()).filter(|&u| !t.hosted(u).is_empty()).collect();
            'outer: for (i, &a) in occ.iter().enumerate() {
                for (k, &b) in occ.iter().enumerate().skip(i + 1) {
                    for &c in &occ[k + 1..] {
                        let med = t.median(a, b, c);
                        if t.hosted(med).is_empty() {
                            v.push(format!("level {j}: median of {}, {}, {} unoccupied", t.name(a), t.name(b), t.name(c)));
                            break 'outer;
                        }
                    }
                }
            }
        }
        for j in 1..m {
            for p in 0..self.points.len() {
                for q in p + 1..self.points.len() {
                    let (Some(a), Some(b)) = (self.vertex(j + 1, p), self.vertex(j + 1, q)) else { continue };
                    if self.vertex(j, p) == self.vertex(j, q) && a != b {
                        v.push(format!("levels {j}/{}: {} and {} split above", j + 1, self.points[p], self.points[q]));
                    }
                }
            }
        }
        ValidationReport { ok: v.is_empty(), violations: v }
    }

    /// Some level has the three classes distinct with `x` between `y` and `z`.
    pub fn atom_l(&self, x: usize, y: usize, z: usize) -> bool {
        (1..=self.levels.len()).any(|j| {
            let (Some(a), Some(b), Some(c)) = (self.vertex(j, x), self.vertex(j, y), self.vertex(j, z)) else {
                return false;
            };
            a != b && a != c && b != c && self.levels[j - 1].path(b, c).contains(&a)
        })
    }

    pub fn atom_l_named(&self, x: &str, y: &str, z: &str) -> Result<bool> {
        Ok(self.atom_l(self.id(x)?, self.id(y)?, self.id(z)?))
    }

    /// Closes `subset` under medians of occupied vertices at every level,
    /// adopting the lowest-id point at each missing median.
    pub fn positive_type_complete(&self, subset: &[usize]) -> Result<Vec<usize>> {
        if let Some(&p) = subset.iter().find(|&&p| p >= self.points.len()) {
            return Err(Error::UnknownPoint(p.to_string()));
        }
        let mut set: BTreeSet<usize> = subset.iter().copied().collect();
        loop {
            let mut changed = false;
            for j in 1..=self.levels.len() {
                while let Some(p) = self.missing_median(j, &set)? {
                    set.insert(p);
                    changed = true;
                }
            }
            if !changed {
                return Ok(set.into_iter().collect());
            }
        }
    }

    fn missing_median(&self, j: usize, set: &BTreeSet<usize>) -> Result<Option<usize>> {
        let t = &self.levels[j - 1];
        let occ: BTreeSet<usize> = set.iter().filter_map(|&p| self.vertex(j, p)).collect();
        let occ: Vec<usize> = occ.into_iter().collect();
        for (i, &a) in occ.iter().enumerate() {
            for (k, &b) in occ.iter().enumerate().skip(i + 1) {
                for &c in &occ[k + 1..] {
                    let med = t.median(a, b, c);
                    if !occ.contains(&med) {
                        let p = t
                            .hosted(med)
                            .iter()
                            .copied()
                            .filter(|&p| self.exit[p] >= j)
                            .min()
                            .ok_or_else(|| Error::InvalidTower("ambient tower not median-closed".into()))?;
                        return Ok(Some(p));
                    }
                }
            }
        }
        Ok(None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const PATH: &str = r#"{"levels":[{"vertices":["a","b","c"],"edges":[["a","b"],["b","c"]],
        "hosts":{"a":["x"],"b":["y"],"c":["z"]}}]}"#;
    const Y: &str = r#"{"levels":[{"vertices":["m","a","b","c"],"edges":[["m","a"],["m","b"],["m","c"]],
        "hosts":{"m":["o"],"a":["x"],"b":["y"],"c":["z"]}}]}"#;

    #[test]
    fn betweenness_on_a_path() {
        let b = BTower::from_json(PATH).unwrap();
        assert!(b.validate().ok);
        assert!(b.atom_l_named("y", "x", "z").unwrap());
        assert!(!b.atom_l_named("x", "y", "z").unwrap());
        assert!(b.atom_l_named("q", "x", "z").is_err());
    }

    #[test]
    fn median_closure() {
        let b = BTower::from_json(Y).unwrap();
        assert!(b.validate().ok);
        let leaves: Vec<usize> = ["x", "y", "z"].iter().map(|n| b.id(n).unwrap()).collect();
        let c = b.positive_type_complete(&leaves).unwrap();
        assert_eq!(c.len(), 4);
        assert!(c.contains(&b.id("o").unwrap()));
        assert_eq!(b.positive_type_complete(&c).unwrap(), c);
        let open = Y.replace(r#""m":["o"],"#, "");
        let r = BTower::from_json(&open).unwrap().validate();
        assert!(r.violations.iter().any(|v| v.contains("median")));
    }
}

//! Extension of L²-isomorphisms between small sets to L¹-isomorphisms of completions.

use std::collections::HashMap;

use itertools::Itertools;
use serde::Serialize;

use super::nonhomog::extensions;
use super::{Profile, Tower};
use crate::error::Result;

/// A map `a1[i] ↦ a2[i]` preserving L² that admits no L¹ extension.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExtensionFailure {
    pub a1: Vec<String>,
    pub a2: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct HomogenizationReport {
    /// L²-isomorphisms examined.
    pub maps: usize,
    /// Subsets whose completion was checked for idempotence.
    pub completions: usize,
    pub idempotence_failures: usize,
    pub failures: Vec<ExtensionFailure>,
}

impl HomogenizationReport {
    pub fn holds(&self) -> bool {
        self.failures.is_empty() && self.idempotence_failures == 0
    }
}

fn subsets(n: usize, max: usize) -> impl Iterator<Item = Vec<usize>> {
    (1..=max.min(n)).flat_map(move |k| (0..n).combinations(k))
}

/// Every L²-isomorphism between subsets of size at most `max` of `t1` and
/// `t2`, tested for an extension to an L¹-isomorphism of the completions.
pub fn homogenization_check(t1: &Tower, t2: &Tower, max: usize) -> Result<HomogenizationReport> {
    let mut report = HomogenizationReport::default();
    let mut by_code: HashMap<Vec<u32>, Vec<(Vec<usize>, Profile)>> = HashMap::new();
    for a in subsets(t2.point_count(), max) {
        let p = Profile::new(t2, &a)?;
        let mut code = p.canonical_l2();
        code.push(a.len() as u32);
        by_code.entry(code).or_default().push((a, p));
    }
    for t in [t1, t2] {
        for a in subsets(t.point_count(), max) {
            let c = super::complete(t, &a)?;
            report.completions += 1;
            if super::complete(t, &c)? != c {
                report.idempotence_failures += 1;
            }
        }
    }
    for a1 in subsets(t1.point_count(), max) {
        let p1 = Profile::new(t1, &a1)?;
        let mut code = p1.canonical_l2();
        code.push(a1.len() as u32);
        let Some(targets) = by_code.get(&code) else { continue };
        for (a2, p2) in targets {
            for perm in p1.l2_isos_fixing(p2, 0) {
                // a1[i] ↦ a2[perm[i]]
                let image: Vec<usize> = perm.iter().map(|&j| a2[j]).collect();
                report.maps += 1;
                if extensions(t1, &a1, t2, &image)?.is_empty() {
                    report.failures.push(ExtensionFailure {
                        a1: a1.iter().map(|&p| t1.name(p).to_string()).collect(),
                        a2: image.iter().map(|&p| t2.name(p).to_string()).collect(),
                    });
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tower::{complete, random_tower};
    use rand::SeedableRng;

    const TWO_LEVELS: &str = r#"{
      "levels": [
        {"nodes": ["v", "la", "lb", "lc", "lq"],
         "edges": [["v", "la"], ["v", "lb"], ["v", "lc"], ["v", "lq"]],
         "leaves": {"la": ["a"], "lb": ["b"], "lc": ["c"], "lq": ["q"]},
         "special": {"v": "lq"}},
        {"nodes": ["w", "ma", "mb", "mc"],
         "edges": [["w", "ma"], ["w", "mb"], ["w", "mc"]],
         "leaves": {"ma": ["a"], "mb": ["b"], "mc": ["c"]},
         "special": {"w": "mc"}}
      ],
      "exit": {"q": 1}
    }"#;

    const ONE_LEVEL: &str = r#"{
      "levels": [
        {"nodes": ["v", "la", "lb", "lc"],
         "edges": [["v", "la"], ["v", "lb"], ["v", "lc"]],
         "leaves": {"la": ["a"], "lb": ["b"], "lc": ["c"]},
         "special": {"v": "lc"}}
      ],
      "exit": {}
    }"#;

    #[test]
    fn hidden_lower_node_blocks_extension() {
        let t1 = Tower::from_json(TWO_LEVELS).unwrap();
        let t2 = Tower::from_json(ONE_LEVEL).unwrap();
        assert!(t1.validate().ok && t2.validate().ok);
        let a1 = t1.ids(&["a", "b", "c"]).unwrap();
        let a2 = t2.ids(&["a", "b", "c"]).unwrap();
        let (p1, p2) = (Profile::new(&t1, &a1).unwrap(), Profile::new(&t2, &a2).unwrap());
        assert_eq!(p1.canonical_l2(), p2.canonical_l2());
        assert_eq!(complete(&t1, &a1).unwrap().len(), 4);
        assert_eq!(complete(&t2, &a2).unwrap().len(), 3);
        assert!(extensions(&t1, &a1, &t2, &a2).unwrap().is_empty());
        let r = homogenization_check(&t1, &t2, 3).unwrap();
        assert!(r.failures.iter().any(|f| f.a1.len() == 3));
    }

    #[test]
    fn identity_pairs_extend() {
        for seed in 0..5u64 {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let t = random_tower(&mut rng, 5, 1);
            let r = homogenization_check(&t, &t, 4).unwrap();
            assert_eq!(r.idempotence_failures, 0);
            assert!(r.maps > 0);
        }
    }
}

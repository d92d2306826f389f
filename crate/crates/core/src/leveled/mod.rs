//! Finite-support words over a dense order of positions, with the meet
//! level, the relations C and V, and their quantifier-free diagrams.

mod acl;
mod count;
mod extend;
mod tree;

use std::collections::BTreeMap;
use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Level;
use crate::structure::{FinStructure, Signature};

pub use acl::acl_witnesses;
pub use count::{count_iso_types, iso_type_codes};
pub use extend::extend_one_point;
pub use tree::{extract_level_tree, random_level_tree, realize, realize_random, LevelTree};

/// A word with finitely many non-zero letters. Absent positions hold 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct LeveledPoint<Q: Level> {
    word: BTreeMap<Q, u32>,
}

impl<Q: Level> LeveledPoint<Q> {
    /// The all-zero word.
    pub fn empty() -> Self {
        LeveledPoint { word: BTreeMap::new() }
    }

    /// Builds a point from `(position, letter)` pairs; zero letters are dropped
    /// and later pairs override earlier ones.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (Q, u32)>) -> Self {
        let mut word = BTreeMap::new();
        for (q, x) in pairs {
            if x == 0 {
                word.remove(&q);
            } else {
                word.insert(q, x);
            }
        }
        LeveledPoint { word }
    }

    pub fn from_int_pairs(pairs: &[(i64, u32)]) -> Self {
        Self::from_pairs(pairs.iter().map(|&(q, x)| (Q::from_int(q), x)))
    }

    pub fn get(&self, q: &Q) -> u32 {
        self.word.get(q).copied().unwrap_or(0)
    }

    pub fn set(&mut self, q: Q, x: u32) {
        if x == 0 {
            self.word.remove(&q);
        } else {
            self.word.insert(q, x);
        }
    }

    pub fn support(&self) -> impl Iterator<Item = (&Q, u32)> {
        self.word.iter().map(|(q, &x)| (q, x))
    }

    /// Copy of the word restricted to positions strictly below `q`.
    pub fn below(&self, q: &Q) -> Self {
        LeveledPoint { word: self.word.range(..q.clone()).map(|(k, &v)| (k.clone(), v)).collect() }
    }
}

/// Least position where `a` and `b` differ.
pub fn meet_level<Q: Level>(a: &LeveledPoint<Q>, b: &LeveledPoint<Q>) -> Result<Q> {
    let mut ia = a.word.iter().peekable();
    let mut ib = b.word.iter().peekable();
    loop {
        match (ia.peek(), ib.peek()) {
            (None, None) => return Err(Error::EqualPoints),
            (Some((q, _)), None) | (None, Some((q, _))) => return Ok((*q).clone()),
            (Some((qa, xa)), Some((qb, xb))) => match qa.cmp(qb) {
                Ordering::Less => return Ok((*qa).clone()),
                Ordering::Greater => return Ok((*qb).clone()),
                Ordering::Equal => {
                    if xa != xb {
                        return Ok((*qa).clone());
                    }
                    ia.next();
                    ib.next();
                }
            },
        }
    }
}

pub fn atom_c<Q: Level>(a: &LeveledPoint<Q>, b: &LeveledPoint<Q>, c: &LeveledPoint<Q>) -> bool {
    if b == c {
        return a != b;
    }
    if a == b || a == c {
        return false;
    }
    meet_level(a, b).unwrap() < meet_level(b, c).unwrap()
}

pub fn atom_v<Q: Level>(
    a: &LeveledPoint<Q>,
    b: &LeveledPoint<Q>,
    c: &LeveledPoint<Q>,
    d: &LeveledPoint<Q>,
) -> bool {
    if a == b || c == d {
        return false;
    }
    meet_level(a, b).unwrap() <= meet_level(c, d).unwrap()
}

fn check_distinct<Q: Level>(points: &[LeveledPoint<Q>]) -> Result<()> {
    let mut seen: BTreeMap<&LeveledPoint<Q>, usize> = BTreeMap::new();
    for (i, p) in points.iter().enumerate() {
        if let Some(&j) = seen.get(p) {
            return Err(Error::DuplicatePoint(j, i));
        }
        seen.insert(p, i);
    }
    Ok(())
}

/// Pairwise meet levels; the diagonal is `None`.
pub fn meet_matrix<Q: Level>(points: &[LeveledPoint<Q>]) -> Result<Vec<Vec<Option<Q>>>> {
    check_distinct(points)?;
    let n = points.len();
    let mut m = vec![vec![None; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let q = meet_level(&points[i], &points[j])?;
            m[i][j] = Some(q.clone());
            m[j][i] = Some(q);
        }
    }
    Ok(m)
}

pub fn cv_signature() -> Signature {
    Signature::new([("C", 3), ("V", 4)]).expect("static signature")
}

/// Diagram of C and V on `points`, universe named `0..n`.
pub fn qf_structure<Q: Level>(points: &[LeveledPoint<Q>]) -> Result<FinStructure> {
    let names = (0..points.len()).map(|i| i.to_string()).collect();
    qf_structure_named(points, names)
}

pub fn qf_structure_named<Q: Level>(
    points: &[LeveledPoint<Q>],
    names: Vec<String>,
) -> Result<FinStructure> {
    let m = meet_matrix(points)?;
    let n = points.len();
    let mut s = FinStructure::new(cv_signature(), names)?;
    if s.len() != n {
        return Err(Error::InvalidArgument("name count differs from point count".into()));
    }
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let holds = if b == c {
                    a != b
                } else if a == b || a == c {
                    false
                } else {
                    m[a][b] < m[b][c]
                };
                if holds {
                    s.insert(0, vec![a, b, c])?;
                }
            }
        }
    }
    let pairs: Vec<(usize, usize)> =
        (0..n).flat_map(|a| (0..n).filter(move |&b| b != a).map(move |b| (a, b))).collect();
    for &(a, b) in &pairs {
        for &(c, d) in &pairs {
            if m[a][b] <= m[c][d] {
                s.insert(1, vec![a, b, c, d])?;
            }
        }
    }
    Ok(s)
}

/// Whether `dom[i] -> img[i]` preserves C and V and their negations.
///
/// Both relations are determined by the comparison pattern of pairwise
/// meets, so that pattern is compared directly.
pub fn is_partial_isomorphism<Q: Level>(dom: &[LeveledPoint<Q>], img: &[LeveledPoint<Q>]) -> bool {
    if dom.len() != img.len() {
        return false;
    }
    let (Ok(md), Ok(mi)) = (meet_matrix(dom), meet_matrix(img)) else {
        return false;
    };
    let n = dom.len();
    let pairs: Vec<(usize, usize)> =
        (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    pairs.iter().all(|&(a, b)| {
        pairs.iter().all(|&(c, d)| md[a][b].cmp(&md[c][d]) == mi[a][b].cmp(&mi[c][d]))
    })
}

/// JSON form `{"name": "a", "word": [["-2/1", 1], ...]}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedPoint<Q: Level> {
    pub name: String,
    pub point: LeveledPoint<Q>,
}

#[derive(Serialize, Deserialize)]
struct NamedPointRepr {
    name: String,
    word: Vec<(String, u32)>,
}

impl<Q: Level> Serialize for NamedPoint<Q> {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        NamedPointRepr {
            name: self.name.clone(),
            word: self.point.support().map(|(q, x)| (q.to_fraction_string(), x)).collect(),
        }
        .serialize(ser)
    }
}

impl<'de, Q: Level> Deserialize<'de> for NamedPoint<Q> {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let r = NamedPointRepr::deserialize(de)?;
        let mut pairs = Vec::with_capacity(r.word.len());
        for (q, x) in r.word {
            let q = Q::parse_fraction(&q)
                .ok_or_else(|| serde::de::Error::custom(format!("bad rational {q:?}")))?;
            if x == 0 {
                return Err(serde::de::Error::custom("letter 0 is implicit and may not be stored"));
            }
            pairs.push((q, x));
        }
        Ok(NamedPoint { name: r.name, point: LeveledPoint::from_pairs(pairs) })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;
    use proptest::prelude::*;

    type P = LeveledPoint<Rational>;

    fn p(pairs: &[(i64, u32)]) -> P {
        P::from_int_pairs(pairs)
    }

    fn r(n: i64) -> Rational {
        Rational::from_integer(n)
    }

    #[test]
    fn meet_examples() {
        assert_eq!(meet_level(&p(&[(0, 1)]), &p(&[(0, 2)])).unwrap(), r(0));
        assert_eq!(meet_level(&p(&[(0, 1)]), &p(&[(0, 1), (1, 1)])).unwrap(), r(1));
        assert_eq!(meet_level(&p(&[(-2, 1)]), &p(&[(-1, 1)])).unwrap(), r(-2));
        assert_eq!(meet_level(&p(&[(0, 1)]), &p(&[(0, 1)])), Err(Error::EqualPoints));
        assert_eq!(meet_level(&P::empty(), &p(&[(3, 4)])).unwrap(), r(3));
    }

    #[test]
    fn atom_examples() {
        let a = p(&[(0, 1)]);
        let b = p(&[(0, 2)]);
        assert!(atom_c(&a, &b, &b));
        assert!(!atom_c(&a, &a, &a));
        assert!(atom_c(&a, &b, &p(&[(0, 2), (1, 1)])));
        assert!(!atom_c(&a, &p(&[(0, 1), (1, 1)]), &p(&[(0, 1), (1, 2)])));

        assert!(atom_v(&a, &b, &a, &b));
        let (a, b, c, d) = (p(&[(-2, 1)]), p(&[(-1, 1)]), p(&[(0, 1)]), p(&[(0, 2)]));
        assert!(atom_v(&a, &b, &c, &d));
        assert!(!atom_v(&c, &d, &a, &b));
        assert!(!atom_v(&a, &a, &c, &d));
    }

    #[test]
    fn qf_two_points() {
        let s = qf_structure(&[p(&[(0, 1)]), p(&[(0, 2)])]).unwrap();
        // only the degenerate C-atoms (a;b,b)
        let c: Vec<_> = s.tuples(0).iter().cloned().collect();
        assert_eq!(c, vec![vec![0, 1, 1], vec![1, 0, 0]]);
        assert_eq!(s.tuples(1).len(), 4);
        assert!(s.holds(1, &[0, 1, 0, 1]));
        assert!(s.holds(1, &[1, 0, 0, 1]));
    }

    #[test]
    fn qf_three_points() {
        let pts = [p(&[(0, 1)]), p(&[(0, 2)]), p(&[(0, 2), (1, 1)])];
        let s = qf_structure(&pts).unwrap();
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    assert_eq!(s.holds(0, &[a, b, c]), atom_c(&pts[a], &pts[b], &pts[c]));
                }
            }
        }
        assert!(s.holds(0, &[0, 1, 2]));
        assert!(s.holds(0, &[0, 2, 1]));
        assert!(!s.holds(0, &[1, 0, 2]));
    }

    #[test]
    fn qf_star() {
        let pts = [p(&[(0, 1)]), p(&[(0, 2)]), p(&[(0, 3)]), p(&[])];
        let s = qf_structure(&pts).unwrap();
        assert!(s.tuples(0).iter().all(|t| t[1] == t[2]));
        assert_eq!(s.tuples(1).len(), 12 * 12);
    }

    #[test]
    fn qf_rejects_duplicates() {
        assert_eq!(qf_structure(&[p(&[(0, 1)]), p(&[(0, 1)])]), Err(Error::DuplicatePoint(0, 1)));
    }

    #[test]
    fn partial_isomorphism_matches_qf_equality() {
        let dom = [p(&[(0, 1)]), p(&[(0, 2)]), p(&[(0, 2), (1, 1)])];
        let img = [p(&[(5, 3)]), p(&[(5, 1)]), p(&[(5, 1), (7, 2)])];
        assert!(is_partial_isomorphism(&dom, &img));
        let bad = [p(&[(5, 3)]), p(&[(5, 1)]), p(&[(5, 4)])];
        assert!(!is_partial_isomorphism(&dom, &bad));
    }

    #[test]
    fn json_round_trip() {
        let np = NamedPoint { name: "a".into(), point: p(&[(-2, 1), (2, 1)]) };
        let v = serde_json::to_value(&np).unwrap();
        assert_eq!(v, serde_json::json!({"name": "a", "word": [["-2/1", 1], ["2/1", 1]]}));
        let back: NamedPoint<Rational> = serde_json::from_value(v).unwrap();
        assert_eq!(back, np);
        let half: NamedPoint<Rational> =
            serde_json::from_value(serde_json::json!({"name": "h", "word": [["1/2", 3]]})).unwrap();
        assert_eq!(half.point.get(&Rational::new(1, 2)), 3);
        assert!(serde_json::from_value::<NamedPoint<Rational>>(
            serde_json::json!({"name": "z", "word": [["1/0", 3]]})
        )
        .is_err());
    }

    fn arb_point() -> impl Strategy<Value = P> {
        proptest::collection::vec((-3i64..=3, 0u32..=2), 0..4).prop_map(|v| P::from_int_pairs(&v))
    }

    fn meet_oracle(a: &P, b: &P) -> Option<Rational> {
        (-3..=3).map(r).find(|q| a.get(q) != b.get(q))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(2000))]

        #[test]
        fn meet_matches_scan(a in arb_point(), b in arb_point()) {
            prop_assert_eq!(meet_level(&a, &b).ok(), meet_oracle(&a, &b));
        }

        #[test]
        fn c_relation_axioms(a in arb_point(), b in arb_point(), c in arb_point(), d in arb_point()) {
            if atom_c(&a, &b, &c) {
                prop_assert!(atom_c(&a, &c, &b));
                prop_assert!(!atom_c(&b, &a, &c));
                prop_assert!(atom_c(&a, &d, &c) || atom_c(&d, &b, &c));
            }
            if a != b {
                prop_assert!(atom_c(&a, &b, &b));
            }
        }

        #[test]
        fn v_total_preorder(a in arb_point(), b in arb_point(), c in arb_point(), d in arb_point(), e in arb_point(), f in arb_point()) {
            if a != b && c != d {
                prop_assert!(atom_v(&a, &b, &c, &d) || atom_v(&c, &d, &a, &b));
            }
            if atom_v(&a, &b, &c, &d) && atom_v(&c, &d, &e, &f) {
                prop_assert!(atom_v(&a, &b, &e, &f));
            }
        }

        #[test]
        fn c_from_v(a in arb_point(), b in arb_point(), c in arb_point()) {
            if a != b && b != c && a != c {
                prop_assert_eq!(
                    atom_c(&a, &b, &c),
                    atom_v(&a, &b, &b, &c) && !atom_v(&b, &c, &a, &b)
                );
            }
        }
    }
}

use serde::{Deserialize, Serialize};

use super::Perm;
use crate::error::{Error, Result};
use crate::leveled::{qf_structure, LeveledPoint, NamedPoint};
use crate::scalar::Level;
use crate::structure::FinStructure;

/// Points `a1, a2, a3, b1..bn, c1..cn` coding a permutation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct SigmaStructure<Q: Level> {
    pub points: Vec<NamedPoint<Q>>,
}

impl<Q: Level> SigmaStructure<Q> {
    pub fn n(&self) -> usize {
        (self.points.len() - 3) / 2
    }

    pub fn raw_points(&self) -> Vec<LeveledPoint<Q>> {
        self.points.iter().map(|p| p.point.clone()).collect()
    }

    pub fn get(&self, name: &str) -> Option<&LeveledPoint<Q>> {
        self.points.iter().find(|p| p.name == name).map(|p| &p.point)
    }

    pub fn qf(&self) -> Result<FinStructure> {
        crate::leveled::qf_structure_named(
            &self.raw_points(),
            self.points.iter().map(|p| p.name.clone()).collect(),
        )
    }
}

/// `a^k = {0 -> k}`, `b_i = {t_i -> 1}`, `c_i = {t_i -> 1, s_i -> 1}` with
/// `t_i = i - (n + 1)` and `s_i = sigma(i)`.
pub fn encode_perm<Q: Level>(sigma: &Perm) -> Result<SigmaStructure<Q>> {
    let n = sigma.len();
    if n == 0 {
        return Err(Error::InvalidPerm("empty permutation".into()));
    }
    let mut points = Vec::with_capacity(2 * n + 3);
    for k in 1..=3u32 {
        points.push(NamedPoint { name: format!("a{k}"), point: LeveledPoint::from_pairs([(Q::zero(), k)]) });
    }
    let t = |i: usize| Q::from_int(i as i64 - (n as i64 + 1));
    for i in 1..=n {
        points.push(NamedPoint { name: format!("b{i}"), point: LeveledPoint::from_pairs([(t(i), 1)]) });
    }
    for i in 1..=n {
        let s = Q::from_int(sigma.at(i) as i64);
        points.push(NamedPoint { name: format!("c{i}"), point: LeveledPoint::from_pairs([(t(i), 1), (s, 1)]) });
    }
    let out = SigmaStructure { points };
    check_conditions(&out, sigma)?;
    Ok(out)
}

fn check_conditions<Q: Level>(s: &SigmaStructure<Q>, sigma: &Perm) -> Result<()> {
    use crate::leveled::{atom_c, meet_level};
    let n = sigma.len();
    let a: Vec<&LeveledPoint<Q>> = (1..=3).map(|k| s.get(&format!("a{k}")).unwrap()).collect();
    let b: Vec<&LeveledPoint<Q>> = (1..=n).map(|i| s.get(&format!("b{i}")).unwrap()).collect();
    let c: Vec<&LeveledPoint<Q>> = (1..=n).map(|i| s.get(&format!("c{i}")).unwrap()).collect();
    let fail = |m: &str| Err(Error::NotSigmaStructure(m.to_string()));
    if atom_c(a[0], a[1], a[2]) || atom_c(a[1], a[0], a[2]) || atom_c(a[2], a[0], a[1]) {
        return fail("C holds among the anchors");
    }
    for x in &a {
        for i in 0..n {
            if !atom_c(x, b[i], c[i]) {
                return fail("C(a; b_i, c_i) fails");
            }
            for j in 0..n {
                if i < j && meet_level(x, b[i])? >= meet_level(x, b[j])? {
                    return fail("first order not reflected by meets with anchors");
                }
                if sigma.at(i + 1) < sigma.at(j + 1) && meet_level(b[i], c[i])? >= meet_level(b[j], c[j])? {
                    return fail("second order not reflected by block meets");
                }
            }
        }
    }
    Ok(())
}

/// Decodes from the C/V diagram alone. Anchors are the points `x` with
/// `y, z` such that `x∧y = x∧z = y∧z`; blocks are the classes of equal meet
/// with an anchor; the first order puts smaller anchor meets first and the
/// second compares the meet inside each block.
pub fn decode_structure(s: &FinStructure) -> Result<Perm> {
    let sig = s.signature();
    let (c_sym, v_sym) = match (sig.index_of("C"), sig.index_of("V")) {
        (Some(c), Some(v)) if sig.arity(c) == 3 && sig.arity(v) == 4 => (c, v),
        _ => return Err(Error::NotSigmaStructure("signature must contain C:3 and V:4".into())),
    };
    let bad = |m: &str| Error::NotSigmaStructure(m.to_string());
    let n_pts = s.len();
    let v = |x: usize, y: usize, z: usize, w: usize| s.holds(v_sym, &[x, y, z, w]);
    let eq = |x, y, z, w| v(x, y, z, w) && v(z, w, x, y);
    let lt = |x, y, z, w| v(x, y, z, w) && !v(z, w, x, y);

    let anchors: Vec<usize> = (0..n_pts)
        .filter(|&x| {
            (0..n_pts).any(|y| {
                y != x && (0..n_pts).any(|z| z != x && z != y && eq(x, y, x, z) && eq(x, y, y, z))
            })
        })
        .collect();
    if anchors.len() != 3 {
        return Err(bad(&format!("{} anchor points instead of 3", anchors.len())));
    }
    let rest: Vec<usize> = (0..n_pts).filter(|x| !anchors.contains(x)).collect();
    if rest.is_empty() || rest.len() % 2 != 0 {
        return Err(bad("non-anchor points do not split into pairs"));
    }

    let classes_for = |a: usize| -> Vec<Vec<usize>> {
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for &x in &rest {
            match classes.iter_mut().find(|cl| eq(x, a, cl[0], a)) {
                Some(cl) => cl.push(x),
                None => classes.push(vec![x]),
            }
        }
        classes
    };
    let classes = classes_for(anchors[0]);
    if classes.iter().any(|cl| cl.len() != 2) {
        return Err(bad("E-classes are not all pairs"));
    }
    for &a in &anchors[1..] {
        let mut other = classes_for(a);
        let mut mine = classes.clone();
        other.iter_mut().for_each(|c| c.sort());
        mine.iter_mut().for_each(|c| c.sort());
        other.sort();
        mine.sort();
        if other != mine {
            return Err(bad("anchors define different E-classes"));
        }
    }
    for &a in &anchors {
        for cl in &classes {
            if !s.holds(c_sym, &[a, cl[0], cl[1]]) {
                return Err(bad("C(a; b, c) fails on a class"));
            }
        }
    }

    let a0 = anchors[0];
    let mut first: Vec<usize> = (0..classes.len()).collect();
    first.sort_by(|&i, &j| {
        let (x, y) = (classes[i][0], classes[j][0]);
        if lt(x, a0, y, a0) {
            std::cmp::Ordering::Less
        } else {
            std::cmp::Ordering::Greater
        }
    });
    let block = |i: usize| (classes[i][0], classes[i][1]);
    for (&i, &j) in first.iter().zip(first.iter().skip(1)) {
        let ((x, _), (y, _)) = (block(i), block(j));
        if !lt(x, a0, y, a0) {
            return Err(bad("first order is not linear"));
        }
    }
    let mut values = Vec::with_capacity(first.len());
    for &i in &first {
        let (x, y) = block(i);
        let mut rank = 1;
        for &j in &first {
            if j == i {
                continue;
            }
            let (z, w) = block(j);
            if eq(x, y, z, w) {
                return Err(bad("second order is not linear"));
            }
            if lt(z, w, x, y) {
                rank += 1;
            }
        }
        values.push(rank);
    }
    Perm::new(values)
}

/// Decodes a point set through its C/V diagram.
pub fn decode_perm<Q: Level>(points: &[LeveledPoint<Q>]) -> Result<Perm> {
    decode_structure(&qf_structure(points)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::leveled::meet_level;
    use crate::structure::{canonical_code, find_embedding, is_isomorphic};
    use crate::{Point, Rational};

    fn p(s: &str) -> Perm {
        s.parse().unwrap()
    }

    fn r(n: i64) -> Rational {
        Rational::from_integer(n)
    }

    fn enc(s: &str) -> SigmaStructure<Rational> {
        encode_perm(&p(s)).unwrap()
    }

    #[test]
    fn encode_single() {
        let s = enc("1");
        assert_eq!(s.points.len(), 5);
        let (a, b, c) = (s.get("a1").unwrap(), s.get("b1").unwrap(), s.get("c1").unwrap());
        assert_eq!(meet_level(a, b).unwrap(), r(-1));
        assert_eq!(meet_level(b, c).unwrap(), r(1));
    }

    #[test]
    fn encode_21() {
        let s = enc("2 1");
        assert_eq!(s.get("b1").unwrap(), &Point::from_int_pairs(&[(-2, 1)]));
        assert_eq!(s.get("c1").unwrap(), &Point::from_int_pairs(&[(-2, 1), (2, 1)]));
        assert_eq!(s.get("b2").unwrap(), &Point::from_int_pairs(&[(-1, 1)]));
        assert_eq!(s.get("c2").unwrap(), &Point::from_int_pairs(&[(-1, 1), (1, 1)]));
        let m = |x: &str, y: &str| meet_level(s.get(x).unwrap(), s.get(y).unwrap()).unwrap();
        assert_eq!(m("b2", "c2"), r(1));
        assert_eq!(m("b1", "c1"), r(2));
        for (x, y) in [("a1", "a2"), ("a1", "a3"), ("a2", "a3")] {
            assert_eq!(m(x, y), r(0));
        }
    }

    #[test]
    fn encode_rejects_empty() {
        assert!(encode_perm::<Rational>(&Perm::identity(0)).is_err());
    }

    #[test]
    fn round_trip_up_to_four() {
        let mut count = 0;
        for n in 1..=4 {
            for sigma in Perm::all(n) {
                let s: SigmaStructure<Rational> = encode_perm(&sigma).unwrap();
                assert_eq!(decode_perm(&s.raw_points()).unwrap(), sigma);
                count += 1;
            }
        }
        assert_eq!(count, 33);
    }

    #[test]
    fn phi_selects_the_anchors() {
        for n in 1..=4 {
            for sigma in Perm::all(n) {
                let s: SigmaStructure<Rational> = encode_perm(&sigma).unwrap();
                let pts = &s.points;
                let m = |i: usize, j: usize| meet_level(&pts[i].point, &pts[j].point).unwrap();
                let k = pts.len();
                let phi: Vec<&str> = (0..k)
                    .filter(|&x| {
                        (0..k).any(|y| {
                            (0..k).any(|z| x != y && x != z && y != z && m(x, y) == m(x, z) && m(x, z) == m(y, z))
                        })
                    })
                    .map(|x| pts[x].name.as_str())
                    .collect();
                assert_eq!(phi, ["a1", "a2", "a3"], "{sigma}");
            }
        }
    }

    #[test]
    fn decode_ignores_point_order() {
        let s = enc("3 1 4 2");
        let mut pts = s.raw_points();
        pts.reverse();
        pts.swap(1, 7);
        assert_eq!(decode_perm(&pts).unwrap(), p("3 1 4 2"));
    }

    #[test]
    fn decode_rejects_star() {
        let star: Vec<Point> = (1..=5).map(|k| Point::from_int_pairs(&[(0, k)])).collect();
        assert!(matches!(decode_perm(&star), Err(Error::NotSigmaStructure(_))));
    }

    #[test]
    fn distinct_perms_give_distinct_types() {
        let q12 = enc("1 2").qf().unwrap();
        let q21 = enc("2 1").qf().unwrap();
        assert_ne!(canonical_code(&q12), canonical_code(&q21));
        for n in 1..=3 {
            let all = Perm::all(n);
            for (i, x) in all.iter().enumerate() {
                for y in &all[i + 1..] {
                    let a = encode_perm::<Rational>(x).unwrap().qf().unwrap();
                    let b = encode_perm::<Rational>(y).unwrap().qf().unwrap();
                    assert!(!is_isomorphic(&a, &b).unwrap());
                }
            }
        }
    }

    #[test]
    fn embedding_tracks_containment() {
        let perms: Vec<Perm> = (1..=3).flat_map(Perm::all).collect();
        for sigma in &perms {
            for tau in &perms {
                let a = encode_perm::<Rational>(sigma).unwrap().qf().unwrap();
                let b = encode_perm::<Rational>(tau).unwrap().qf().unwrap();
                let emb = find_embedding(&a, &b).unwrap().is_some();
                assert_eq!(super::super::perm_contains(tau, sigma), emb, "{sigma} in {tau}");
            }
        }
    }
}

use super::{meet_level, LeveledPoint};
use crate::error::{Error, Result};
use crate::scalar::Level;

/// `k` distinct points with the same quantifier-free type over `base` as `a`.
///
/// With `Q` one above every meet among `base` and `a`, witness `i` agrees
/// with `a` below `Q` and has letter `i` at `Q`.
pub fn acl_witnesses<Q: Level>(
    base: &[LeveledPoint<Q>],
    a: &LeveledPoint<Q>,
    k: usize,
) -> Result<Vec<LeveledPoint<Q>>> {
    if base.contains(a) {
        return Err(Error::PointInDomain);
    }
    let mut all: Vec<&LeveledPoint<Q>> = base.iter().collect();
    all.push(a);
    let mut top: Option<Q> = None;
    for i in 0..all.len() {
        for j in i + 1..all.len() {
            let q = meet_level(all[i], all[j])?;
            if top.as_ref().map_or(true, |t| q > *t) {
                top = Some(q);
            }
        }
    }
    let cut = top.map_or_else(Q::zero, |t| t + Q::one());
    Ok((1..=k as u32)
        .map(|i| {
            let mut w = a.below(&cut);
            w.set(cut.clone(), i);
            w
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::leveled::qf_structure;
    use crate::Rational;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    type P = LeveledPoint<Rational>;

    fn p(pairs: &[(i64, u32)]) -> P {
        P::from_int_pairs(pairs)
    }

    fn check(base: &[P], a: &P, ws: &[P]) {
        let mut with_a = base.to_vec();
        with_a.push(a.clone());
        let want = qf_structure(&with_a).unwrap();
        for w in ws {
            let mut with_w = base.to_vec();
            with_w.push(w.clone());
            assert_eq!(qf_structure(&with_w).unwrap(), want);
        }
        let distinct: std::collections::BTreeSet<_> = ws.iter().collect();
        assert_eq!(distinct.len(), ws.len());
    }

    #[test]
    fn empty_base() {
        let ws = acl_witnesses(&[], &p(&[(4, 2)]), 3).unwrap();
        assert_eq!(ws.len(), 3);
        check(&[], &p(&[(4, 2)]), &ws);
    }

    #[test]
    fn one_point_base() {
        let base = [p(&[(0, 1)])];
        let a = p(&[(0, 2)]);
        let ws = acl_witnesses(&base, &a, 2).unwrap();
        assert_eq!(ws, vec![p(&[(0, 2), (1, 1)]), p(&[(0, 2), (1, 2)])]);
        check(&base, &a, &ws);
    }

    #[test]
    fn ten_over_four() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let mut base: Vec<P> = Vec::new();
            while base.len() < 4 {
                let q = p(&[(rng.gen_range(-2..=2), rng.gen_range(0..=2)), (rng.gen_range(-2..=2), rng.gen_range(0..=2))]);
                if !base.contains(&q) {
                    base.push(q);
                }
            }
            let a = loop {
                let q = p(&[(rng.gen_range(-2..=2), rng.gen_range(0..=3))]);
                if !base.contains(&q) {
                    break q;
                }
            };
            let ws = acl_witnesses(&base, &a, 10).unwrap();
            assert_eq!(ws.len(), 10);
            check(&base, &a, &ws);
        }
    }

    #[test]
    fn rejects_member() {
        let base = [p(&[(0, 1)])];
        assert_eq!(acl_witnesses(&base, &base[0], 2), Err(Error::PointInDomain));
    }
}

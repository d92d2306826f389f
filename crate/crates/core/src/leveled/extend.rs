use super::{is_partial_isomorphism, meet_level, LeveledPoint};
use crate::error::{Error, Result};
use crate::scalar::Level;

/// Finds `b` so that `dom + [a] -> img + [b]` is still a partial isomorphism.
///
/// `j0` is the first index maximizing `a ∧ dom[j0]`. If that meet already
/// occurs as `dom[j0] ∧ dom[k0]` (Case 1) the image level is
/// `img[j0] ∧ img[k0]`; if it occurs as some other `dom[k0] ∧ dom[l0]`
/// (Case 2) it is `img[k0] ∧ img[l0]`; otherwise (Case 3) a new level is
/// placed between the neighbouring image meets. `b` copies `img[j0]` below
/// that level, takes a letter there unused by every image point, and is 0
/// above.
pub fn extend_one_point<Q: Level>(
    dom: &[LeveledPoint<Q>],
    img: &[LeveledPoint<Q>],
    a: &LeveledPoint<Q>,
) -> Result<LeveledPoint<Q>> {
    if !is_partial_isomorphism(dom, img) {
        return Err(Error::NotPartialIsomorphism);
    }
    if dom.contains(a) {
        return Err(Error::PointInDomain);
    }
    let n = dom.len();
    if n == 0 {
        return Ok(a.clone());
    }
    let to_a: Vec<Q> = dom.iter().map(|d| meet_level(a, d).expect("a not in dom")).collect();
    let m = to_a.iter().max().unwrap().clone();
    let j0 = to_a.iter().position(|q| *q == m).unwrap();

    let pairs = (0..n).flat_map(|k| (k + 1..n).map(move |l| (k, l)));
    let dmeet = |k: usize, l: usize| meet_level(&dom[k], &dom[l]).unwrap();
    let imeet = |k: usize, l: usize| meet_level(&img[k], &img[l]).unwrap();

    let q = if let Some(k0) = (0..n).find(|&k| k != j0 && dmeet(j0, k) == m) {
        imeet(j0, k0)
    } else if let Some((k0, l0)) = pairs.clone().find(|&(k, l)| dmeet(k, l) == m) {
        imeet(k0, l0)
    } else {
        let below = pairs.clone().filter(|&(k, l)| dmeet(k, l) < m).max_by_key(|&(k, l)| dmeet(k, l));
        let above = pairs.clone().filter(|&(k, l)| dmeet(k, l) > m).min_by_key(|&(k, l)| dmeet(k, l));
        match (below, above) {
            (Some((k, l)), Some((u, v))) => imeet(k, l).midpoint(&imeet(u, v)),
            (Some((k, l)), None) => imeet(k, l) + Q::one(),
            (None, Some((u, v))) => imeet(u, v) - Q::one(),
            (None, None) => Q::zero(),
        }
    };

    let fresh = 1 + img.iter().map(|p| p.get(&q)).max().unwrap_or(0);
    let mut b = img[j0].below(&q);
    b.set(q, fresh);
    Ok(b)
}

//! Memoized witness tables and permutation-keyed atom profiles.

use std::collections::BTreeSet;

use itertools::Itertools;

use super::atoms::{tuples3, tuples4, Symbol};
use super::Tower;
use crate::error::{Error, Result};

/// L- and S-witness levels for all tuples over a list of points, indexed by
/// position in that list. Level 0 stands for no witness.
#[derive(Debug, Clone)]
pub struct Witnesses {
    n: usize,
    points: Vec<usize>,
    exit: Vec<usize>,
    wl: Vec<u8>,
    ws: Vec<u8>,
}

impl Witnesses {
    pub fn new(t: &Tower, points: &[usize]) -> Result<Self> {
        if let Some(&p) = points.iter().find(|&&p| p >= t.point_count()) {
            return Err(Error::UnknownPoint(p.to_string()));
        }
        let n = points.len();
        let mut wl = vec![0u8; n * n * n];
        let mut ws = vec![0u8; n * n * n * n];
        // L is symmetric in its last two places, S under the dihedral swaps
        for [a, b, c] in tuples3(n).filter(|&[_, b, c]| b < c) {
            let j = t.witness_l(points[a], points[b], points[c]).unwrap_or(0) as u8;
            wl[(a * n + b) * n + c] = j;
            wl[(a * n + c) * n + b] = j;
        }
        for [a, b, c, d] in tuples4(n).filter(|&[a, b, c, d]| a < b && c < d && a < c) {
            let j = t.witness_s(points[a], points[b], points[c], points[d]).unwrap_or(0) as u8;
            for [p, q, r, u] in [[a, b, c, d], [c, d, a, b]] {
                for [p, q] in [[p, q], [q, p]] {
                    for [r, u] in [[r, u], [u, r]] {
                        ws[((p * n + q) * n + r) * n + u] = j;
                    }
                }
            }
        }
        let exit = points.iter().map(|&p| t.exit(p)).collect();
        Ok(Witnesses { n, points: points.to_vec(), exit, wl, ws })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn points(&self) -> &[usize] {
        &self.points
    }

    fn raw_l(&self, a: usize, b: usize, c: usize) -> u8 {
        self.wl[(a * self.n + b) * self.n + c]
    }

    fn raw_s(&self, a: usize, b: usize, c: usize, d: usize) -> u8 {
        self.ws[((a * self.n + b) * self.n + c) * self.n + d]
    }

    pub fn l(&self, a: usize, b: usize, c: usize) -> Option<usize> {
        Some(self.raw_l(a, b, c) as usize).filter(|&j| j > 0)
    }

    pub fn s(&self, a: usize, b: usize, c: usize, d: usize) -> Option<usize> {
        Some(self.raw_s(a, b, c, d) as usize).filter(|&j| j > 0)
    }

    pub fn exit(&self, a: usize) -> usize {
        self.exit[a]
    }

    /// Atom on positions; positions must be in range.
    pub fn atom(&self, sym: Symbol, t: &[usize]) -> bool {
        sym.eval(t, |a, b, c| self.l(a, b, c), |a, b, c, d| self.s(a, b, c, d), |a| self.exit(a))
    }
}

/// Key under construction that gives up once it exceeds `bound`.
struct KeyBuf<'a> {
    out: Vec<u32>,
    bound: Option<&'a [u32]>,
    below: bool,
}

impl<'a> KeyBuf<'a> {
    fn new(bound: Option<&'a [u32]>, cap: usize) -> Self {
        KeyBuf { out: Vec::with_capacity(cap), bound, below: bound.is_none() }
    }

    fn push(&mut self, x: u32) -> Option<()> {
        if !self.below {
            let b = self.bound.unwrap();
            match b.get(self.out.len()) {
                Some(&y) if x < y => self.below = true,
                Some(&y) if x > y => return None,
                None => return None,
                _ => {}
            }
        }
        self.out.push(x);
        Some(())
    }
}

/// Relabelling-keyed summaries of the L¹ and L² structure on a point list.
/// Two lists with equal keys under a relabelling are isomorphic via it.
#[derive(Debug, Clone)]
pub struct Profile {
    w: Witnesses,
    /// Dense rank of each level among levels used by atoms, plus one.
    rank: Vec<u32>,
    levels: usize,
}

impl Profile {
    pub fn new(t: &Tower, points: &[usize]) -> Result<Self> {
        let w = Witnesses::new(t, points)?;
        let used: BTreeSet<u8> = w.wl.iter().chain(&w.ws).copied().filter(|&j| j > 0).collect();
        let levels = t.level_count();
        let mut rank = vec![0; levels + 1];
        for (i, &j) in used.iter().enumerate() {
            rank[j as usize] = i as u32 + 1;
        }
        Ok(Profile { w, rank, levels })
    }

    pub fn witnesses(&self) -> &Witnesses {
        &self.w
    }

    pub fn len(&self) -> usize {
        self.w.n
    }

    pub fn is_empty(&self) -> bool {
        self.w.n == 0
    }

    fn inverse(perm: &[usize]) -> Vec<usize> {
        let mut inv = vec![0; perm.len()];
        for (i, &p) in perm.iter().enumerate() {
            inv[p] = i;
        }
        inv
    }

    /// Relabelled absence masks per level.
    fn masks(&self, perm: &[usize]) -> Vec<u32> {
        (0..=self.levels)
            .map(|j| (0..self.w.n).filter(|&a| self.w.exit[a] < j).fold(0u32, |m, a| m | 1 << perm[a]))
            .collect()
    }

    /// L¹ key after relabelling position `i` to `perm[i]`: L and S sets,
    /// equality of L-levels, S-levels matched against L-levels, and absent
    /// points at each witness level.
    pub fn l1_key(&self, perm: &[usize]) -> Vec<u32> {
        self.l1_bounded(perm, None).unwrap()
    }

    fn l1_bounded(&self, perm: &[usize], bound: Option<&[u32]>) -> Option<Vec<u32>> {
        let n = self.w.n;
        let inv = Self::inverse(perm);
        let masks = self.masks(perm);
        let mut id = vec![u32::MAX; self.levels + 1];
        let mut next = 0;
        let mut key = KeyBuf::new(bound, n * n * n * n);
        for [a, b, c] in tuples3(n) {
            let j = self.w.raw_l(inv[a], inv[b], inv[c]) as usize;
            if j == 0 {
                key.push(0)?;
            } else {
                if id[j] == u32::MAX {
                    id[j] = next;
                    next += 1;
                }
                key.push(id[j] + 1)?;
                key.push(masks[j])?;
            }
        }
        for [a, b, c, d] in tuples4(n) {
            let j = self.w.raw_s(inv[a], inv[b], inv[c], inv[d]) as usize;
            if j == 0 {
                key.push(0)?;
            } else {
                key.push(if id[j] == u32::MAX { u32::MAX } else { id[j] + 1 })?;
                key.push(masks[j])?;
            }
        }
        Some(key.out)
    }

    /// L² key after relabelling: L and S sets with the preorder of their levels.
    pub fn l2_key(&self, perm: &[usize]) -> Vec<u32> {
        self.l2_bounded(perm, None).unwrap()
    }

    fn l2_bounded(&self, perm: &[usize], bound: Option<&[u32]>) -> Option<Vec<u32>> {
        let n = self.w.n;
        let inv = Self::inverse(perm);
        let mut key = KeyBuf::new(bound, n * n * n * n);
        for [a, b, c] in tuples3(n) {
            key.push(self.rank[self.w.raw_l(inv[a], inv[b], inv[c]) as usize])?;
        }
        for [a, b, c, d] in tuples4(n) {
            key.push(self.rank[self.w.raw_s(inv[a], inv[b], inv[c], inv[d]) as usize])?;
        }
        Some(key.out)
    }

    /// Partition of S-atoms by level, as a relabelled key.
    pub fn s_levels_key(&self, perm: &[usize]) -> Vec<u32> {
        let n = self.w.n;
        let inv = Self::inverse(perm);
        let mut id = vec![u32::MAX; self.levels + 1];
        let mut next = 0;
        tuples4(n)
            .map(|[a, b, c, d]| {
                let j = self.w.raw_s(inv[a], inv[b], inv[c], inv[d]) as usize;
                if j == 0 {
                    return 0;
                }
                if id[j] == u32::MAX {
                    id[j] = next;
                    next += 1;
                }
                id[j] + 1
            })
            .collect()
    }

    pub fn canonical_l1(&self) -> Vec<u32> {
        self.canonical(|p, b| self.l1_bounded(p, b))
    }

    pub fn canonical_l2(&self) -> Vec<u32> {
        self.canonical(|p, b| self.l2_bounded(p, b))
    }

    fn canonical(&self, key: impl Fn(&[usize], Option<&[u32]>) -> Option<Vec<u32>>) -> Vec<u32> {
        let mut best: Option<Vec<u32>> = None;
        for p in (0..self.w.n).permutations(self.w.n) {
            if let Some(k) = key(&p, best.as_deref()) {
                best = Some(k);
            }
        }
        best.unwrap_or_default()
    }

    /// Relabellings `perm` with `self.l1_key(perm) == other.l1_key(identity)`
    /// and `perm[i] = i` for `i < fixed`.
    pub fn l1_isos_fixing(&self, other: &Profile, fixed: usize) -> Vec<Vec<usize>> {
        self.isos_fixing(other, fixed, |p, q| p.l1_key(q))
    }

    pub fn l2_isos_fixing(&self, other: &Profile, fixed: usize) -> Vec<Vec<usize>> {
        self.isos_fixing(other, fixed, |p, q| p.l2_key(q))
    }

    fn isos_fixing(&self, other: &Profile, fixed: usize, key: impl Fn(&Profile, &[usize]) -> Vec<u32>) -> Vec<Vec<usize>> {
        let n = self.w.n;
        if other.w.n != n || fixed > n {
            return vec![];
        }
        let target = key(other, &(0..n).collect::<Vec<_>>());
        (fixed..n)
            .permutations(n - fixed)
            .map(|tail| (0..fixed).chain(tail).collect::<Vec<_>>())
            .filter(|p| key(self, p) == target)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::super::{random_tower, Language};
    use super::*;
    use crate::structure::{canonical_code, is_isomorphic};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn keys_agree_with_reduct_isomorphism() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let towers: Vec<Tower> = (0..16).map(|_| random_tower(&mut rng, 5, 2)).collect();
        let subsets: Vec<(usize, Vec<usize>)> = towers
            .iter()
            .enumerate()
            .filter(|(_, t)| t.point_count() >= 4)
            .map(|(i, _)| (i, (0..4).collect()))
            .collect();
        for (i, a) in &subsets {
            for (j, b) in &subsets {
                let (ta, tb) = (&towers[*i], &towers[*j]);
                let (pa, pb) = (Profile::new(ta, a).unwrap(), Profile::new(tb, b).unwrap());
                for (lang, same) in [
                    (Language::L1, pa.canonical_l1() == pb.canonical_l1()),
                    (Language::L2, pa.canonical_l2() == pb.canonical_l2()),
                ] {
                    let ra = ta.reduct(a, lang).unwrap();
                    let rb = tb.reduct(b, lang).unwrap();
                    assert_eq!(same, is_isomorphic(&ra, &rb).unwrap());
                    assert_eq!(same, canonical_code(&ra) == canonical_code(&rb));
                }
            }
        }
    }
}

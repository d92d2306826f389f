use std::collections::BTreeSet;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use super::{encode_perm, Perm};
use crate::error::{Error, Result};
use crate::leveled::{qf_structure, LeveledPoint};
use crate::structure::canonical_code;
use crate::Rational;

/// Number of pairwise non-isomorphic coded structures over `Sym(n)`.
pub fn growth_lower_bound(n: usize) -> Result<u64> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    if n > 5 {
        return Err(Error::ExceedsDeskScale(format!("n = {n}")));
    }
    let mut codes = BTreeSet::new();
    for sigma in Perm::all(n) {
        let s = encode_perm::<Rational>(&sigma)?;
        codes.insert(canonical_code(&qf_structure(&s.raw_points())?));
    }
    Ok(codes.len() as u64)
}

/// Outcome of the indiscernibility comparisons.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrivialityReport {
    pub n: usize,
    pub cut: String,
    /// All increasing block tuples share a type over `A ∪ {b}`.
    pub indiscernible_over_ab: bool,
    /// Same over `A ∪ {c}`.
    pub indiscernible_over_ac: bool,
    /// Two increasing block pairs (1-based) with different types over `A ∪ {b, c}`.
    pub differing_pair: Option<((usize, usize), (usize, usize))>,
}

impl TrivialityReport {
    pub fn holds(&self) -> bool {
        self.indiscernible_over_ab && self.indiscernible_over_ac && self.differing_pair.is_some()
    }
}

/// Blocks `b_i c_i` coded by the identity, plus `b, c` forming a block
/// below all others whose inner meet is `3/2`, between `s_1` and `s_2`.
pub fn triviality_failure_witness(n: usize) -> Result<TrivialityReport> {
    triviality_failure_witness_with_cut(n, Rational::new(3, 2))
}

/// As [`triviality_failure_witness`] with the inner meet of `b, c` at `cut`.
pub fn triviality_failure_witness_with_cut(n: usize, cut: Rational) -> Result<TrivialityReport> {
    if n < 3 {
        return Err(Error::InvalidArgument("n must be at least 3".into()));
    }
    let s = encode_perm::<Rational>(&Perm::identity(n))?;
    let anchors: Vec<LeveledPoint<Rational>> =
        (1..=3).map(|k| s.get(&format!("a{k}")).unwrap().clone()).collect();
    let blocks: Vec<[LeveledPoint<Rational>; 2]> = (1..=n)
        .map(|i| [s.get(&format!("b{i}")).unwrap().clone(), s.get(&format!("c{i}")).unwrap().clone()])
        .collect();
    let low = Rational::from_integer(-(n as i64 + 1));
    let b = LeveledPoint::from_pairs([(low, 1)]);
    let c = LeveledPoint::from_pairs([(low, 1), (cut, 1)]);
    if b == c {
        return Err(Error::InvalidArgument("cut coincides with the block level".into()));
    }

    let type_of = |params: &[LeveledPoint<Rational>], idx: &[usize]| -> Result<crate::FinStructure> {
        let mut pts = params.to_vec();
        for &i in idx {
            pts.extend(blocks[i].iter().cloned());
        }
        qf_structure(&pts)
    };
    let uniform = |params: &[LeveledPoint<Rational>]| -> Result<bool> {
        for len in 1..=2.min(n) {
            let mut seen = None;
            for idx in (0..n).combinations(len) {
                let t = type_of(params, &idx)?;
                match &seen {
                    None => seen = Some(t),
                    Some(prev) if *prev != t => return Ok(false),
                    _ => {}
                }
            }
        }
        Ok(true)
    };

    let with = |extra: &[&LeveledPoint<Rational>]| {
        let mut v = anchors.clone();
        v.extend(extra.iter().map(|p| (*p).clone()));
        v
    };
    let over_ab = uniform(&with(&[&b]))?;
    let over_ac = uniform(&with(&[&c]))?;
    let both = with(&[&b, &c]);
    let mut differing = None;
    let first = type_of(&both, &[0, 1])?;
    for (i, j) in (0..n).tuple_combinations() {
        if type_of(&both, &[i, j])? != first {
            differing = Some(((1, 2), (i + 1, j + 1)));
            break;
        }
    }
    Ok(TrivialityReport {
        n,
        cut: crate::scalar::Level::to_fraction_string(&cut),
        indiscernible_over_ab: over_ab,
        indiscernible_over_ac: over_ac,
        differing_pair: differing,
    })
}

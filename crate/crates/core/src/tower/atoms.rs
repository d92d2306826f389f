//! Relation symbols of the L¹ and L² languages and their evaluation.

use std::fmt;
use std::str::FromStr;

use super::{Tower, Witnesses};
use crate::error::{Error, Result};
use crate::structure::{FinStructure, Signature};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    L,
    S,
    LPrime,
    SPrime,
    R,
    Q,
    P,
    QLe,
    QGe,
    T,
}

impl Symbol {
    pub const ALL: [Symbol; 10] = [
        Symbol::L,
        Symbol::S,
        Symbol::LPrime,
        Symbol::SPrime,
        Symbol::R,
        Symbol::Q,
        Symbol::P,
        Symbol::QLe,
        Symbol::QGe,
        Symbol::T,
    ];

    pub fn arity(self) -> usize {
        match self {
            Symbol::L => 3,
            Symbol::S | Symbol::LPrime => 4,
            Symbol::SPrime => 5,
            Symbol::R | Symbol::P => 6,
            Symbol::Q | Symbol::QLe | Symbol::QGe => 7,
            Symbol::T => 8,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Symbol::L => "L",
            Symbol::S => "S",
            Symbol::LPrime => "L'",
            Symbol::SPrime => "S'",
            Symbol::R => "R",
            Symbol::Q => "Q",
            Symbol::P => "P",
            Symbol::QLe => "Q<=",
            Symbol::QGe => "Q>=",
            Symbol::T => "T",
        }
    }

    pub(crate) fn check_arity(self, got: usize) -> Result<()> {
        if got == self.arity() {
            Ok(())
        } else {
            Err(Error::ArityMismatch { symbol: self.name().into(), expected: self.arity(), got })
        }
    }

    /// Evaluates the symbol from L- and S-witness lookups and exit levels.
    pub(crate) fn eval(
        self,
        t: &[usize],
        wl: impl Fn(usize, usize, usize) -> Option<usize>,
        ws: impl Fn(usize, usize, usize, usize) -> Option<usize>,
        exit: impl Fn(usize) -> usize,
    ) -> bool {
        let both = |a: Option<usize>, b: Option<usize>, f: fn(usize, usize) -> bool| match (a, b) {
            (Some(i), Some(j)) => f(i, j),
            _ => false,
        };
        match self {
            Symbol::L => wl(t[0], t[1], t[2]).is_some(),
            Symbol::S => ws(t[0], t[1], t[2], t[3]).is_some(),
            Symbol::LPrime => wl(t[0], t[1], t[2]).is_some_and(|j| exit(t[3]) < j),
            Symbol::SPrime => ws(t[0], t[1], t[2], t[3]).is_some_and(|j| exit(t[4]) < j),
            Symbol::R => both(wl(t[0], t[1], t[2]), wl(t[3], t[4], t[5]), |i, j| i == j),
            Symbol::P => both(wl(t[0], t[1], t[2]), wl(t[3], t[4], t[5]), |i, j| i <= j),
            Symbol::Q => both(ws(t[0], t[1], t[2], t[3]), wl(t[4], t[5], t[6]), |i, j| i == j),
            Symbol::QLe => both(ws(t[0], t[1], t[2], t[3]), wl(t[4], t[5], t[6]), |i, j| i <= j),
            Symbol::QGe => both(ws(t[0], t[1], t[2], t[3]), wl(t[4], t[5], t[6]), |i, j| i >= j),
            Symbol::T => both(ws(t[0], t[1], t[2], t[3]), ws(t[4], t[5], t[6], t[7]), |i, j| i <= j),
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Symbol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim() {
            "L" => Symbol::L,
            "S" => Symbol::S,
            "L'" | "L′" => Symbol::LPrime,
            "S'" | "S′" => Symbol::SPrime,
            "R" => Symbol::R,
            "Q" => Symbol::Q,
            "P" => Symbol::P,
            "Q<=" | "Q≤" | "Qle" => Symbol::QLe,
            "Q>=" | "Q≥" | "Qge" => Symbol::QGe,
            "T" => Symbol::T,
            other => return Err(Error::UnknownSymbol(other.into())),
        })
    }
}

/// Reduct languages.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Language {
    L,
    LS,
    L1,
    L2,
}

impl Language {
    pub fn symbols(self) -> &'static [Symbol] {
        use Symbol::*;
        match self {
            Language::L => &[L],
            Language::LS => &[L, S],
            Language::L1 => &[L, S, LPrime, SPrime, R, Q],
            Language::L2 => &[L, S, P, QLe, QGe, T],
        }
    }

    pub fn signature(self) -> Signature {
        Signature::new(self.symbols().iter().map(|s| (s.name(), s.arity()))).expect("distinct names")
    }
}

impl FromStr for Language {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "L" => Ok(Language::L),
            "LS" | "L,S" => Ok(Language::LS),
            "L1" | "L¹" => Ok(Language::L1),
            "L2" | "L²" => Ok(Language::L2),
            other => Err(Error::InvalidArgument(format!("unknown language {other}"))),
        }
    }
}

impl Tower {
    /// Evaluates an atom on point ids.
    pub fn atom(&self, sym: Symbol, t: &[usize]) -> Result<bool> {
        sym.check_arity(t.len())?;
        if let Some(&p) = t.iter().find(|&&p| p >= self.point_count()) {
            return Err(Error::UnknownPoint(p.to_string()));
        }
        Ok(sym.eval(
            t,
            |x, y, z| self.witness_l(x, y, z),
            |x, y, z, w| self.witness_s(x, y, z, w),
            |p| self.exit(p),
        ))
    }

    /// Evaluates an atom on point names.
    pub fn atom_named(&self, sym: &str, t: &[&str]) -> Result<bool> {
        let sym: Symbol = sym.parse()?;
        sym.check_arity(t.len())?;
        self.atom(sym, &self.ids(t)?)
    }

    /// Induced structure on `subset` (in that order) over `lang`.
    pub fn reduct(&self, subset: &[usize], lang: Language) -> Result<FinStructure> {
        let w = Witnesses::new(self, subset)?;
        let names: Vec<String> = subset.iter().map(|&p| self.name(p).to_string()).collect();
        let mut out = FinStructure::new(lang.signature(), names)?;
        let n = subset.len();
        let ls: Vec<[usize; 3]> = tuples3(n).filter(|&[a, b, c]| w.l(a, b, c).is_some()).collect();
        let ss: Vec<[usize; 4]> = tuples4(n).filter(|&[a, b, c, d]| w.s(a, b, c, d).is_some()).collect();
        for (si, &sym) in lang.symbols().iter().enumerate() {
            let mut add = |t: Vec<usize>| {
                if w.atom(sym, &t) {
                    out.insert(si, t).expect("in range");
                }
            };
            match sym {
                Symbol::L => ls.iter().for_each(|t| add(t.to_vec())),
                Symbol::S => ss.iter().for_each(|t| add(t.to_vec())),
                Symbol::LPrime => {
                    for t in &ls {
                        (0..n).for_each(|u| add([&t[..], &[u]].concat()))
                    }
                }
                Symbol::SPrime => {
                    for t in &ss {
                        (0..n).for_each(|u| add([&t[..], &[u]].concat()))
                    }
                }
                Symbol::R | Symbol::P => {
                    for a in &ls {
                        ls.iter().for_each(|b| add([&a[..], &b[..]].concat()))
                    }
                }
                Symbol::Q | Symbol::QLe | Symbol::QGe => {
                    for a in &ss {
                        ls.iter().for_each(|b| add([&a[..], &b[..]].concat()))
                    }
                }
                Symbol::T => {
                    for a in &ss {
                        ss.iter().for_each(|b| add([&a[..], &b[..]].concat()))
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn reduct_named(&self, subset: &[&str], lang: Language) -> Result<FinStructure> {
        self.reduct(&self.ids(subset)?, lang)
    }
}

pub(crate) fn tuples3(n: usize) -> impl Iterator<Item = [usize; 3]> {
    (0..n).flat_map(move |a| {
        (0..n).flat_map(move |b| (0..n).map(move |c| [a, b, c])).filter(|&[a, b, c]| a != b && a != c && b != c)
    })
}

pub(crate) fn tuples4(n: usize) -> impl Iterator<Item = [usize; 4]> {
    tuples3(n).flat_map(move |[a, b, c]| (0..n).filter(move |&d| d != a && d != b && d != c).map(move |d| [a, b, c, d]))
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::{t_diamond, t_star};
    use super::super::random_tower;
    use super::*;
    use crate::structure::is_isomorphic;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn atom_examples() {
        let s = t_star();
        assert!(s.atom_named("P", &["x", "y", "z", "y", "x", "z"]).unwrap());
        assert!(!s.atom_named("P", &["y", "x", "z", "x", "y", "z"]).unwrap());
        assert!(s.atom_named("L'", &["y", "x", "z", "w"]).unwrap());
        assert!(!s.atom_named("L′", &["x", "y", "z", "w"]).unwrap());
        assert!(s.atom_named("R", &["x", "y", "z", "x", "y", "w"]).unwrap());
        assert_eq!(
            s.atom_named("R", &["x", "y", "z"]),
            Err(Error::ArityMismatch { symbol: "R".into(), expected: 6, got: 3 })
        );
        assert!(matches!(s.atom_named("Z", &["x"]), Err(Error::UnknownSymbol(_))));
        assert!(matches!(s.atom_named("L", &["x", "y", "q"]), Err(Error::UnknownPoint(_))));
    }

    #[test]
    fn reduct_examples() {
        let s = t_star();
        let all = s.ids(&["x", "y", "z", "w"]).unwrap();
        let r = s.reduct(&all, Language::L).unwrap();
        let mut expected = 0;
        for [a, b, c] in tuples3(4) {
            let holds = s.witness_l(all[a], all[b], all[c]).is_some();
            expected += holds as usize;
            assert_eq!(r.holds(0, &[a, b, c]), holds);
        }
        assert_eq!(r.tuples(0).len(), expected);

        let d = t_diamond();
        let ids = d.ids(&["x", "y", "z", "w"]).unwrap();
        let r = d.reduct(&ids, Language::LS).unwrap();
        for [a, b, c, e] in tuples4(4) {
            let side = |i: usize| i / 2;
            let expect = side(a) == side(b) && side(c) == side(e) && side(a) != side(c);
            assert_eq!(r.holds(1, &[a, b, c, e]), expect);
        }

        let one = s.reduct(&all[..1], Language::L2).unwrap();
        assert!((0..6).all(|i| one.tuples(i).is_empty()));
    }

    #[test]
    fn table_and_direct_atoms_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..30 {
            let t = random_tower(&mut rng, 6, 3);
            let n = t.point_count();
            let all: Vec<usize> = (0..n).collect();
            let w = Witnesses::new(&t, &all).unwrap();
            for _ in 0..300 {
                let sym = Symbol::ALL[rng.gen_range(0..10)];
                let tup: Vec<usize> = (0..sym.arity()).map(|_| rng.gen_range(0..n)).collect();
                assert_eq!(t.atom(sym, &tup).unwrap(), w.atom(sym, &tup));
            }
        }
    }

    #[test]
    fn reduct_is_relabelling_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let t = random_tower(&mut rng, 5, 2);
            let mut ids: Vec<usize> = (0..t.point_count().min(5)).collect();
            let a = t.reduct(&ids, Language::L1).unwrap();
            ids.reverse();
            let b = t.reduct(&ids, Language::L1).unwrap();
            assert!(is_isomorphic(&a, &b).unwrap());
        }
    }
}

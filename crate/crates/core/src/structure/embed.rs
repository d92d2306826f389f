use super::FinStructure;
use crate::error::{Error, Result};

/// Tuple lists indexed by the elements they mention.
struct Incidence {
    tuples: Vec<Vec<Vec<usize>>>,
    by_elem: Vec<Vec<Vec<usize>>>,
}

impl Incidence {
    fn new(s: &FinStructure) -> Self {
        let n = s.len();
        let mut tuples = Vec::with_capacity(s.signature.len());
        let mut by_elem = Vec::with_capacity(s.signature.len());
        for rel in &s.relations {
            let ts: Vec<Vec<usize>> = rel.iter().cloned().collect();
            let mut be = vec![Vec::new(); n];
            for (ti, t) in ts.iter().enumerate() {
                for (p, &e) in t.iter().enumerate() {
                    if !t[..p].contains(&e) {
                        be[e].push(ti);
                    }
                }
            }
            tuples.push(ts);
            by_elem.push(be);
        }
        Incidence { tuples, by_elem }
    }
}

struct Search<'a> {
    a: &'a FinStructure,
    b: &'a FinStructure,
    ia: Incidence,
    ib: Incidence,
    map: Vec<usize>,
    inv: Vec<usize>,
}

const NONE: usize = usize::MAX;

impl<'a> Search<'a> {
    fn new(a: &'a FinStructure, b: &'a FinStructure) -> Result<Self> {
        if a.signature != b.signature {
            return Err(Error::SignatureMismatch);
        }
        Ok(Search {
            a,
            b,
            ia: Incidence::new(a),
            ib: Incidence::new(b),
            map: vec![NONE; a.len()],
            inv: vec![NONE; b.len()],
        })
    }

    /// Whether mapping `e -> x` (with `e`, `x` already recorded) keeps the
    /// partial map a strong embedding.
    fn consistent(&self, e: usize, x: usize) -> bool {
        for sym in 0..self.ia.tuples.len() {
            let mut count_a = 0usize;
            for &ti in &self.ia.by_elem[sym][e] {
                let t = &self.ia.tuples[sym][ti];
                if t.iter().all(|&u| self.map[u] != NONE) {
                    let img: Vec<usize> = t.iter().map(|&u| self.map[u]).collect();
                    if !self.b.holds(sym, &img) {
                        return false;
                    }
                    count_a += 1;
                }
            }
            let count_b = self.ib.by_elem[sym][x]
                .iter()
                .filter(|&&ti| self.ib.tuples[sym][ti].iter().all(|&v| self.inv[v] != NONE))
                .count();
            if count_a != count_b {
                return false;
            }
        }
        true
    }

    fn assign(&mut self, e: usize, x: usize) -> bool {
        self.map[e] = x;
        self.inv[x] = e;
        if self.consistent(e, x) {
            true
        } else {
            self.unassign(e, x);
            false
        }
    }

    fn unassign(&mut self, e: usize, x: usize) {
        self.map[e] = NONE;
        self.inv[x] = NONE;
    }

    /// Depth-first search over `order`; `visit` returns `false` to stop.
    fn run(&mut self, order: &[usize], depth: usize, visit: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        if depth == order.len() {
            return visit(&self.map);
        }
        let e = order[depth];
        for x in 0..self.b.len() {
            if self.inv[x] != NONE {
                continue;
            }
            if self.assign(e, x) {
                let go_on = self.run(order, depth + 1, visit);
                self.unassign(e, x);
                if !go_on {
                    return false;
                }
            }
        }
        true
    }

    fn start(&mut self, fixed: &[(usize, usize)]) -> Result<Option<Vec<usize>>> {
        for &(e, x) in fixed {
            if e >= self.a.len() {
                return Err(Error::UnknownElement(e.to_string()));
            }
            if x >= self.b.len() {
                return Err(Error::UnknownElement(x.to_string()));
            }
            if self.map[e] != NONE || self.inv[x] != NONE {
                if self.map[e] == x {
                    continue;
                }
                return Err(Error::InvalidArgument("fixed pairs are not injective".into()));
            }
            if !self.assign(e, x) {
                return Ok(None);
            }
        }
        let order: Vec<usize> = (0..self.a.len()).filter(|&e| self.map[e] == NONE).collect();
        Ok(Some(order))
    }
}

/// A strong embedding of `a` into `b` as a map from `a`'s element indices
/// to `b`'s, or `None`. The first map in lexicographic order of images is
/// returned.
pub fn find_embedding(a: &FinStructure, b: &FinStructure) -> Result<Option<Vec<usize>>> {
    find_embedding_extending(a, b, &[])
}

/// Like [`find_embedding`] but every pair in `fixed` is forced.
pub fn find_embedding_extending(
    a: &FinStructure,
    b: &FinStructure,
    fixed: &[(usize, usize)],
) -> Result<Option<Vec<usize>>> {
    if a.len() > b.len() {
        if a.signature != b.signature {
            return Err(Error::SignatureMismatch);
        }
        return Ok(None);
    }
    let mut search = Search::new(a, b)?;
    let Some(order) = search.start(fixed)? else {
        return Ok(None);
    };
    let mut found = None;
    search.run(&order, 0, &mut |m| {
        found = Some(m.to_vec());
        false
    });
    Ok(found)
}

pub fn is_isomorphic(a: &FinStructure, b: &FinStructure) -> Result<bool> {
    if a.signature != b.signature {
        return Err(Error::SignatureMismatch);
    }
    if a.len() != b.len() || a.relations.iter().zip(&b.relations).any(|(x, y)| x.len() != y.len()) {
        return Ok(false);
    }
    Ok(find_embedding(a, b)?.is_some())
}

/// Every isomorphism `a -> b`, in lexicographic order.
pub fn all_isomorphisms(a: &FinStructure, b: &FinStructure) -> Result<Vec<Vec<usize>>> {
    let mut search = Search::new(a, b)?;
    if a.len() != b.len() {
        return Ok(Vec::new());
    }
    let order: Vec<usize> = (0..a.len()).collect();
    let mut out = Vec::new();
    search.run(&order, 0, &mut |m| {
        out.push(m.to_vec());
        true
    });
    Ok(out)
}

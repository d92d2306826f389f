//! Finite relational structures over a declared signature.
//!
//! Elements are stored by index; names are kept for display and
//! serialization. Embeddings are strong (induced): atoms and their
//! negations are both preserved.

mod canon;
mod embed;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use canon::canonical_code;
pub use embed::{all_isomorphisms, find_embedding, find_embedding_extending, is_isomorphic};

/// Relation symbols with their arities.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<(String, usize)>", into = "Vec<(String, usize)>")]
pub struct Signature {
    symbols: Vec<(String, usize)>,
}

impl Signature {
    pub fn new<S: Into<String>>(symbols: impl IntoIterator<Item = (S, usize)>) -> Result<Self> {
        let symbols: Vec<(String, usize)> =
            symbols.into_iter().map(|(s, a)| (s.into(), a)).collect();
        let mut seen = BTreeSet::new();
        for (name, arity) in &symbols {
            if *arity == 0 {
                return Err(Error::InvalidSignature(format!("symbol {name} has arity 0")));
            }
            if !seen.insert(name.as_str()) {
                return Err(Error::InvalidSignature(format!("duplicate symbol {name}")));
            }
        }
        Ok(Signature { symbols })
    }

    pub fn symbols(&self) -> &[(String, usize)] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.symbols.iter().position(|(n, _)| n == name)
    }

    pub fn arity(&self, symbol: usize) -> usize {
        self.symbols[symbol].1
    }
}

impl TryFrom<Vec<(String, usize)>> for Signature {
    type Error = Error;
    fn try_from(v: Vec<(String, usize)>) -> Result<Self> {
        Signature::new(v)
    }
}

impl From<Signature> for Vec<(String, usize)> {
    fn from(s: Signature) -> Self {
        s.symbols
    }
}

/// A finite structure: a named universe and one tuple set per symbol.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "StructureRepr", into = "StructureRepr")]
pub struct FinStructure {
    signature: Signature,
    universe: Vec<String>,
    relations: Vec<BTreeSet<Vec<usize>>>,
}

impl FinStructure {
    /// A structure with the given universe and no tuples.
    pub fn new(signature: Signature, universe: Vec<String>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for name in &universe {
            if !seen.insert(name.as_str()) {
                return Err(Error::InvalidStructure(format!("duplicate element {name}")));
            }
        }
        let relations = vec![BTreeSet::new(); signature.len()];
        Ok(FinStructure { signature, universe, relations })
    }

    /// Universe named `0..n`.
    pub fn with_size(signature: Signature, n: usize) -> Self {
        let universe = (0..n).map(|i| i.to_string()).collect();
        let relations = vec![BTreeSet::new(); signature.len()];
        FinStructure { signature, universe, relations }
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn universe(&self) -> &[String] {
        &self.universe
    }

    pub fn len(&self) -> usize {
        self.universe.len()
    }

    pub fn is_empty(&self) -> bool {
        self.universe.is_empty()
    }

    pub fn element_index(&self, name: &str) -> Option<usize> {
        self.universe.iter().position(|n| n == name)
    }

    pub fn tuples(&self, symbol: usize) -> &BTreeSet<Vec<usize>> {
        &self.relations[symbol]
    }

    pub fn holds(&self, symbol: usize, tuple: &[usize]) -> bool {
        self.relations[symbol].contains(tuple)
    }

    pub fn holds_named(&self, symbol: &str, tuple: &[&str]) -> Result<bool> {
        let s = self
            .signature
            .index_of(symbol)
            .ok_or_else(|| Error::UnknownSymbol(symbol.to_string()))?;
        let idx = tuple
            .iter()
            .map(|n| self.element_index(n).ok_or_else(|| Error::UnknownElement(n.to_string())))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.holds(s, &idx))
    }

    /// Adds a tuple of element indices.
    pub fn insert(&mut self, symbol: usize, tuple: Vec<usize>) -> Result<bool> {
        if symbol >= self.signature.len() {
            return Err(Error::UnknownSymbol(symbol.to_string()));
        }
        let arity = self.signature.arity(symbol);
        if tuple.len() != arity {
            return Err(Error::ArityMismatch {
                symbol: self.signature.symbols[symbol].0.clone(),
                expected: arity,
                got: tuple.len(),
            });
        }
        if let Some(&bad) = tuple.iter().find(|&&e| e >= self.universe.len()) {
            return Err(Error::UnknownElement(bad.to_string()));
        }
        Ok(self.relations[symbol].insert(tuple))
    }

    pub fn insert_named(&mut self, symbol: &str, tuple: &[&str]) -> Result<bool> {
        let s = self
            .signature
            .index_of(symbol)
            .ok_or_else(|| Error::UnknownSymbol(symbol.to_string()))?;
        let idx = tuple
            .iter()
            .map(|n| self.element_index(n).ok_or_else(|| Error::UnknownElement(n.to_string())))
            .collect::<Result<Vec<_>>>()?;
        self.insert(s, idx)
    }

    /// Induced substructure on the named elements, keeping the original element order.
    pub fn induced(&self, subset: &[&str]) -> Result<FinStructure> {
        let mut idx = Vec::with_capacity(subset.len());
        for name in subset {
            let i = self
                .element_index(name)
                .ok_or_else(|| Error::UnknownElement(name.to_string()))?;
            idx.push(i);
        }
        self.induced_indices(&idx)
    }

    /// Induced substructure on element indices, keeping the original element order.
    pub fn induced_indices(&self, subset: &[usize]) -> Result<FinStructure> {
        let mut keep: Vec<usize> = subset.to_vec();
        keep.sort_unstable();
        keep.dedup();
        if let Some(&bad) = keep.iter().find(|&&e| e >= self.len()) {
            return Err(Error::UnknownElement(bad.to_string()));
        }
        let mut relabel = vec![usize::MAX; self.len()];
        for (new, &old) in keep.iter().enumerate() {
            relabel[old] = new;
        }
        let relations = self
            .relations
            .iter()
            .map(|tuples| {
                tuples
                    .iter()
                    .filter(|t| t.iter().all(|&e| relabel[e] != usize::MAX))
                    .map(|t| t.iter().map(|&e| relabel[e]).collect())
                    .collect()
            })
            .collect();
        Ok(FinStructure {
            signature: self.signature.clone(),
            universe: keep.iter().map(|&i| self.universe[i].clone()).collect(),
            relations,
        })
    }

    /// Same structure with elements renamed positionally.
    pub fn renamed(&self, names: Vec<String>) -> Result<FinStructure> {
        if names.len() != self.len() {
            return Err(Error::InvalidStructure("rename length mismatch".into()));
        }
        let mut s = FinStructure::new(self.signature.clone(), names)?;
        s.relations = self.relations.clone();
        Ok(s)
    }

    /// Image of the structure under the element permutation `perm` (old index -> new index).
    pub fn permuted(&self, perm: &[usize]) -> FinStructure {
        let mut universe = vec![String::new(); self.len()];
        for (old, &new) in perm.iter().enumerate() {
            universe[new] = self.universe[old].clone();
        }
        let relations = self
            .relations
            .iter()
            .map(|ts| ts.iter().map(|t| t.iter().map(|&e| perm[e]).collect()).collect())
            .collect();
        FinStructure { signature: self.signature.clone(), universe, relations }
    }

    /// Same universe and identical tuple sets (names ignored).
    pub fn same_atoms(&self, other: &FinStructure) -> bool {
        self.signature == other.signature
            && self.len() == other.len()
            && self.relations == other.relations
    }
}

#[derive(Serialize, Deserialize)]
struct StructureRepr {
    signature: Signature,
    universe: Vec<String>,
    relations: BTreeMap<String, Vec<Vec<String>>>,
}

impl TryFrom<StructureRepr> for FinStructure {
    type Error = Error;
    fn try_from(r: StructureRepr) -> Result<Self> {
        let mut s = FinStructure::new(r.signature, r.universe)?;
        let index: HashMap<&str, usize> =
            s.universe.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
        let mut pending = Vec::new();
        for (sym, tuples) in &r.relations {
            let si = s
                .signature
                .index_of(sym)
                .ok_or_else(|| Error::UnknownSymbol(sym.clone()))?;
            for t in tuples {
                let idx = t
                    .iter()
                    .map(|n| {
                        index.get(n.as_str()).copied().ok_or_else(|| Error::UnknownElement(n.clone()))
                    })
                    .collect::<Result<Vec<_>>>()?;
                pending.push((si, idx));
            }
        }
        for (si, idx) in pending {
            s.insert(si, idx)?;
        }
        Ok(s)
    }
}

impl From<FinStructure> for StructureRepr {
    fn from(s: FinStructure) -> Self {
        let relations = s
            .signature
            .symbols()
            .iter()
            .zip(&s.relations)
            .map(|((name, _), tuples)| {
                let named = tuples
                    .iter()
                    .map(|t| t.iter().map(|&e| s.universe[e].clone()).collect())
                    .collect();
                (name.clone(), named)
            })
            .collect();
        StructureRepr { signature: s.signature, universe: s.universe, relations }
    }
}

//! Alternation counts of one-variable atoms along a sequence.

use std::fmt;
use std::str::FromStr;

use itertools::Itertools;

use super::{Symbol, Tower, Witnesses};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    Free,
    Param(usize),
}

/// An atom with one free variable `x` and parameters `b1, b2, …`, written
/// like `S(x, b1; b2, b3)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Formula {
    pub symbol: Symbol,
    pub slots: Vec<Slot>,
}

impl Formula {
    /// Distinct parameter indices in order of first use.
    pub fn params(&self) -> Vec<usize> {
        self.slots.iter().filter_map(|s| if let Slot::Param(k) = s { Some(*k) } else { None }).unique().collect()
    }

    /// Every formula of `symbol` with `x` in slot `free` and distinct parameters elsewhere.
    pub fn shape(symbol: Symbol, free: usize) -> Formula {
        let mut k = 0;
        let slots = (0..symbol.arity())
            .map(|i| {
                if i == free {
                    Slot::Free
                } else {
                    k += 1;
                    Slot::Param(k)
                }
            })
            .collect();
        Formula { symbol, slots }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let args = self.slots.iter().map(|s| match s {
            Slot::Free => "x".to_string(),
            Slot::Param(k) => format!("b{k}"),
        });
        write!(f, "{}({})", self.symbol, args.format(", "))
    }
}

impl FromStr for Formula {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |m: &str| Error::MalformedFormula(format!("{m}: {s}"));
        let open = s.find('(').ok_or_else(|| bad("missing '('"))?;
        let body = s[open + 1..].trim_end().strip_suffix(')').ok_or_else(|| bad("missing ')'"))?;
        let symbol: Symbol = s[..open].parse().map_err(|_| bad("unknown symbol"))?;
        let slots = body
            .split([',', ';', ':'])
            .map(str::trim)
            .map(|a| match a {
                "x" => Ok(Slot::Free),
                _ => a
                    .strip_prefix('b')
                    .and_then(|k| k.parse::<usize>().ok())
                    .map(Slot::Param)
                    .ok_or_else(|| bad("argument must be x or b<k>")),
            })
            .collect::<Result<Vec<_>>>()?;
        if slots.len() != symbol.arity() {
            return Err(bad("arity mismatch"));
        }
        if !slots.contains(&Slot::Free) {
            return Err(bad("no free slot"));
        }
        Ok(Formula { symbol, slots })
    }
}

/// Parameter positions `{0, 1, n/2, n-2, n-1}` of a sequence of length `n`.
pub fn parameter_pool(n: usize) -> Vec<usize> {
    [0, 1, n / 2, n.saturating_sub(2), n.saturating_sub(1)].into_iter().filter(|&i| i < n).unique().collect()
}

/// Largest number of truth-value changes of `formula` along `seq`, over all
/// parameter assignments from [`parameter_pool`]; the free variable ranges
/// over the remaining positions in order.
pub fn max_alternation(t: &Tower, seq: &[usize], formula: &Formula) -> Result<usize> {
    let w = Witnesses::new(t, seq)?;
    let pool = parameter_pool(seq.len());
    let params = formula.params();
    let mut best = 0;
    let mut tuple = vec![0; formula.slots.len()];
    for assign in std::iter::repeat(pool.iter().copied()).take(params.len()).multi_cartesian_product() {
        let value = |k: usize| assign[params.iter().position(|&p| p == k).unwrap()];
        let mut prev = None;
        let mut changes = 0;
        for i in (0..seq.len()).filter(|i| !assign.contains(i)) {
            for (s, slot) in tuple.iter_mut().zip(&formula.slots) {
                *s = match slot {
                    Slot::Free => i,
                    Slot::Param(k) => value(*k),
                };
            }
            let v = w.atom(formula.symbol, &tuple);
            if prev.is_some_and(|p| p != v) {
                changes += 1;
            }
            prev = Some(v);
        }
        best = best.max(changes);
    }
    Ok(best)
}

//! Subcommands of the `treelike` binary. Each run yields a [`CommandReport`]
//! whose checks decide the exit status.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use treelike::leveled::{
    acl_witnesses, count_iso_types, extend_one_point, is_partial_isomorphism, qf_structure, LeveledPoint, NamedPoint,
};
use treelike::perm::{
    antichain_member, decode_perm, encode_perm, perm_contains, triviality_failure_witness_with_cut, Perm,
};
use treelike::structure::{find_embedding, is_isomorphic};
use treelike::tower::{
    complete, induced_tower, indiscernible_prefix, max_alternation, nonhomogeneity_witness, Family, Formula, Language,
    SearchBounds, Symbol, Tower,
};
use treelike::{Level, Rational};

/// Largest `k` accepted by `orbits`.
pub const MAX_ORBIT_K: usize = 8;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Usage(#[from] clap::Error),
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("malformed JSON in {path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error(transparent)]
    Core(#[from] treelike::Error),
}

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CommandReport {
    pub command: String,
    pub inputs: Value,
    pub outputs: Value,
    pub checks: Vec<Check>,
}

impl CommandReport {
    fn new(command: &str, inputs: Value) -> Self {
        CommandReport { command: command.into(), inputs, outputs: json!({}), checks: vec![] }
    }

    fn check(&mut self, name: &str, pass: bool, detail: impl Into<String>) {
        let status = if pass { Status::Pass } else { Status::Fail };
        self.checks.push(Check { name: name.into(), status, detail: detail.into() });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status == Status::Pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Key/value rows for the outputs, an optional `rows` table, then the checks.
    pub fn to_tsv(&self) -> String {
        let cell = |v: &Value| match v {
            Value::String(s) => s.clone(),
            other => other.to_string(),
        };
        let mut out = String::from("key\tvalue\n");
        out.push_str(&format!("command\t{}\n", self.command));
        let mut rows = None;
        if let Value::Object(map) = &self.outputs {
            for (k, v) in map {
                if k == "rows" {
                    rows = v.as_array();
                } else {
                    out.push_str(&format!("{k}\t{}\n", cell(v)));
                }
            }
        }
        if let Some(Value::Object(first)) = rows.and_then(|r| r.first()) {
            let cols: Vec<&String> = first.keys().collect();
            out.push('\n');
            out.push_str(&cols.iter().map(|c| c.as_str()).collect::<Vec<_>>().join("\t"));
            out.push('\n');
            for r in rows.unwrap() {
                let line: Vec<String> = cols.iter().map(|c| r.get(c.as_str()).map_or_else(String::new, cell)).collect();
                out.push_str(&line.join("\t"));
                out.push('\n');
            }
        }
        out.push_str("\ncheck\tstatus\tdetail\n");
        for c in &self.checks {
            let status = if c.status == Status::Pass { "pass" } else { "fail" };
            out.push_str(&format!("{}\t{status}\t{}\n", c.name, c.detail));
        }
        out
    }
}

#[derive(Debug, Parser)]
#[command(name = "treelike", version, about = "Experiments on leveled C-structures, permutation codings and D-set towers")]
pub struct Cli {
    /// Emit tab-separated tables instead of JSON
    #[arg(long, global = true)]
    pub tsv: bool,

    /// Seed for randomized runs
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Count isomorphism types of k-point leveled structures
    Orbits {
        #[arg(long)]
        k: usize,
    },
    /// Encode a permutation such as "3 1 2" as leveled points
    Encode {
        #[arg(long)]
        perm: String,
    },
    /// Decode a permutation from a file of leveled points
    Decode {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Compare pattern containment with embedding of the encodings
    Embeds {
        #[arg(long, requires = "tau")]
        sigma: Option<String>,
        #[arg(long, requires = "sigma")]
        tau: Option<String>,
        /// Random pairs drawn when no explicit pair is given
        #[arg(long, default_value_t = 20)]
        pairs: usize,
        #[arg(long, default_value_t = 3)]
        sigma_len: usize,
        #[arg(long, default_value_t = 4)]
        tau_len: usize,
    },
    /// List antichain members under pattern containment
    Antichain {
        #[arg(long, default_value_t = 4)]
        count: usize,
        #[arg(long)]
        verify: bool,
    },
    /// Extend a partial isomorphism by one point
    Extend {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Realize the type of a point over a base k times
    Acl {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 10)]
        k: usize,
    },
    /// Operations on towers of D-sets
    Tower {
        #[command(subcommand)]
        op: TowerCommand,
    },
    /// Indiscernible sequence prefixes and alternation counts
    Indisc {
        /// dset, up_sfree, down_sfree or mixed
        #[arg(long)]
        family: String,
        #[arg(long)]
        n: usize,
        /// Compare alternation of every atom shape at n and 2n
        #[arg(long)]
        alternation: bool,
    },
    /// Indiscernibility over Ab and Ac that fails over Abc
    TrivialityWitness {
        #[arg(long, default_value_t = 8)]
        n: usize,
        /// Meet level of the extra block, as p/q
        #[arg(long, default_value = "3/2")]
        cut: String,
    },
}

#[derive(Debug, Subcommand)]
pub enum TowerCommand {
    /// Check the tower invariants
    Validate {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Evaluate one atom
    Atoms {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        symbol: String,
        /// Comma-separated point names
        #[arg(long)]
        tuple: String,
    },
    /// Induced structure in a reduct language (L, LS, L1, L2)
    Reduct {
        #[arg(long = "in")]
        input: PathBuf,
        /// Comma-separated point names; all points when omitted
        #[arg(long)]
        subset: Option<String>,
        #[arg(long, default_value = "L2")]
        language: String,
    },
    /// Close a subset under special-branch directions
    Complete {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        subset: String,
    },
    /// Search for L1-isomorphic five-point sets that L2 tells apart
    WitnessNonhomog {
        #[arg(long, default_value_t = 2)]
        max_levels: usize,
        #[arg(long, default_value_t = 8)]
        max_leaves: usize,
        #[arg(long, default_value_t = 8)]
        max_points: usize,
    },
}

type Pt = LeveledPoint<Rational>;
type Named = NamedPoint<Rational>;

#[derive(Deserialize)]
#[serde(untagged)]
enum PointsFile {
    Wrapped { points: Vec<Named> },
    Bare(Vec<Named>),
}

#[derive(Deserialize)]
struct ExtendFile {
    dom: Vec<Named>,
    img: Vec<Named>,
    a: Named,
}

#[derive(Deserialize)]
struct AclFile {
    base: Vec<Named>,
    a: Named,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    serde_json::from_str(&read(path)?).map_err(|source| CliError::Json { path: path.into(), source })
}

fn read_tower(path: &Path) -> Result<Tower> {
    Ok(Tower::from_json(&read(path)?)?)
}

fn names(list: &str) -> Vec<&str> {
    list.split(',').map(str::trim).filter(|s| !s.is_empty()).collect()
}

fn raw(points: &[Named]) -> Vec<Pt> {
    points.iter().map(|p| p.point.clone()).collect()
}

fn named(points: &[Pt], prefix: &str) -> Vec<Named> {
    points.iter().enumerate().map(|(i, p)| NamedPoint { name: format!("{prefix}{}", i + 1), point: p.clone() }).collect()
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

fn tower_value(t: &Tower) -> Value {
    serde_json::from_str(&t.to_json()).expect("tower JSON")
}

fn point_names(t: &Tower, ids: &[usize]) -> Vec<String> {
    ids.iter().map(|&p| t.name(p).to_string()).collect()
}

/// Parses `argv` (program name first) and runs the subcommand.
pub fn run<I, T>(argv: I) -> Result<CommandReport>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    execute(&Cli::try_parse_from(argv)?)
}

pub fn execute(cli: &Cli) -> Result<CommandReport> {
    let seed = cli.seed;
    match &cli.command {
        Command::Orbits { k } => orbits(*k),
        Command::Encode { perm } => encode(perm),
        Command::Decode { input } => decode(input),
        Command::Embeds { sigma: Some(s), tau: Some(t), .. } => embeds_pair(s, t),
        Command::Embeds { pairs, sigma_len, tau_len, .. } => embeds_random(*pairs, *sigma_len, *tau_len, seed),
        Command::Antichain { count, verify } => antichain(*count, *verify),
        Command::Extend { input } => extend(input),
        Command::Acl { input, k } => acl(input, *k),
        Command::Tower { op } => tower(op),
        Command::Indisc { family, n, alternation } => indisc(family, *n, *alternation),
        Command::TrivialityWitness { n, cut } => triviality(*n, cut),
    }
}

fn orbits(k: usize) -> Result<CommandReport> {
    let mut r = CommandReport::new("orbits", json!({ "k": k }));
    if k > MAX_ORBIT_K {
        return Err(treelike::Error::ExceedsDeskScale(format!("k = {k}")).into());
    }
    r.outputs = json!({ "k": k, "count": count_iso_types(k) });
    Ok(r)
}

fn encode(perm: &str) -> Result<CommandReport> {
    let mut r = CommandReport::new("encode", json!({ "perm": perm }));
    let sigma: Perm = perm.parse()?;
    let s = encode_perm::<Rational>(&sigma)?;
    r.check("conditions", true, "encoding conditions hold");
    let back = decode_perm(&s.raw_points())?;
    r.check("round_trip", back == sigma, format!("decoded {back}"));
    r.outputs = json!({ "perm": sigma.to_string(), "points": to_value(&s.points) });
    Ok(r)
}

fn decode(input: &Path) -> Result<CommandReport> {
    let mut r = CommandReport::new("decode", json!({ "in": input }));
    let points = match read_json::<PointsFile>(input)? {
        PointsFile::Wrapped { points } | PointsFile::Bare(points) => points,
    };
    let pts = raw(&points);
    let sigma = decode_perm(&pts)?;
    let again = encode_perm::<Rational>(&sigma)?;
    let same = is_isomorphic(&qf_structure(&pts)?, &qf_structure(&again.raw_points())?)?;
    r.check("reencodes_isomorphically", same, "input and encoding of the decoded permutation");
    r.outputs = json!({ "perm": sigma.to_string(), "n": sigma.len() });
    Ok(r)
}

fn embeds_one(sigma: &Perm, tau: &Perm) -> Result<(bool, bool)> {
    let a = qf_structure(&encode_perm::<Rational>(sigma)?.raw_points())?;
    let b = qf_structure(&encode_perm::<Rational>(tau)?.raw_points())?;
    Ok((perm_contains(tau, sigma), find_embedding(&a, &b)?.is_some()))
}

fn embeds_pair(sigma: &str, tau: &str) -> Result<CommandReport> {
    let mut r = CommandReport::new("embeds", json!({ "sigma": sigma, "tau": tau }));
    let (s, t): (Perm, Perm) = (sigma.parse()?, tau.parse()?);
    let (pattern, embedding) = embeds_one(&s, &t)?;
    r.check("agreement", pattern == embedding, format!("pattern {pattern}, embedding {embedding}"));
    r.outputs = json!({ "sigma": s.to_string(), "tau": t.to_string(), "pattern": pattern, "structure_embedding": embedding });
    Ok(r)
}

fn random_perm(n: usize, rng: &mut ChaCha8Rng) -> Perm {
    let mut v: Vec<usize> = (1..=n).collect();
    v.shuffle(rng);
    Perm::new(v).expect("shuffled identity")
}

fn embeds_random(pairs: usize, sigma_len: usize, tau_len: usize, seed: u64) -> Result<CommandReport> {
    let mut r = CommandReport::new(
        "embeds",
        json!({ "pairs": pairs, "sigma_len": sigma_len, "tau_len": tau_len, "seed": seed }),
    );
    if sigma_len == 0 || tau_len == 0 {
        return Err(treelike::Error::InvalidArgument("lengths must be positive".into()).into());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(pairs);
    let mut disagree = 0;
    for _ in 0..pairs {
        let s = random_perm(sigma_len, &mut rng);
        let t = random_perm(tau_len, &mut rng);
        let (pattern, embedding) = embeds_one(&s, &t)?;
        disagree += usize::from(pattern != embedding);
        rows.push(json!({ "sigma": s.to_string(), "tau": t.to_string(), "pattern": pattern, "structure_embedding": embedding }));
    }
    r.check("agreement", disagree == 0, format!("{disagree} of {pairs} pairs disagree"));
    r.outputs = json!({ "rows": rows });
    Ok(r)
}

fn antichain(count: usize, verify: bool) -> Result<CommandReport> {
    let mut r = CommandReport::new("antichain", json!({ "count": count, "verify": verify }));
    let members = (1..=count).map(antichain_member).collect::<treelike::Result<Vec<_>>>()?;
    if verify {
        let mut comparable = Vec::new();
        for (i, a) in members.iter().enumerate() {
            for (j, b) in members.iter().enumerate() {
                if i != j && perm_contains(b, a) {
                    comparable.push(format!("{} in {}", i + 1, j + 1));
                }
            }
        }
        let detail = if comparable.is_empty() {
            format!("{} ordered pairs checked", count * count.saturating_sub(1))
        } else {
            comparable.join("; ")
        };
        r.check("pairwise_incomparable", comparable.is_empty(), detail);
    }
    let rows: Vec<Value> = members
        .iter()
        .enumerate()
        .map(|(i, m)| json!({ "index": i + 1, "length": m.len(), "perm": m.to_string() }))
        .collect();
    r.outputs = json!({ "rows": rows });
    Ok(r)
}

fn extend(input: &Path) -> Result<CommandReport> {
    let mut r = CommandReport::new("extend", json!({ "in": input }));
    let f: ExtendFile = read_json(input)?;
    let (mut dom, mut img) = (raw(&f.dom), raw(&f.img));
    let b = extend_one_point(&dom, &img, &f.a.point)?;
    r.check("fresh", !img.contains(&b), "image point is new");
    dom.push(f.a.point.clone());
    img.push(b.clone());
    r.check("partial_isomorphism", is_partial_isomorphism(&dom, &img), "extended map preserves C and V");
    r.outputs = json!({ "b": to_value(&NamedPoint { name: format!("{}'", f.a.name), point: b }) });
    Ok(r)
}

fn acl(input: &Path, k: usize) -> Result<CommandReport> {
    let mut r = CommandReport::new("acl", json!({ "in": input, "k": k }));
    let f: AclFile = read_json(input)?;
    let base = raw(&f.base);
    let ws = acl_witnesses(&base, &f.a.point, k)?;
    let distinct = ws.iter().enumerate().all(|(i, w)| !ws[..i].contains(w) && !base.contains(w));
    r.check("distinct", distinct && ws.len() == k, format!("{} realizations outside the base", ws.len()));
    let with = |p: &Pt| base.iter().cloned().chain([p.clone()]).collect::<Vec<_>>();
    let same = ws.iter().all(|w| is_partial_isomorphism(&with(&f.a.point), &with(w)));
    r.check("same_type", same, "each realization has the type of a over the base");
    r.outputs = json!({ "witnesses": to_value(&named(&ws, &format!("{}_", f.a.name))) });
    Ok(r)
}

fn tower(op: &TowerCommand) -> Result<CommandReport> {
    match op {
        TowerCommand::Validate { input } => {
            let mut r = CommandReport::new("tower validate", json!({ "in": input }));
            let t = read_tower(input)?;
            let v = t.validate();
            r.check("valid", v.ok, format!("{} violations", v.violations.len()));
            r.outputs = json!({ "ok": v.ok, "violations": v.violations, "points": t.point_count(), "levels": t.level_count() });
            Ok(r)
        }
        TowerCommand::Atoms { input, symbol, tuple } => {
            let r = CommandReport::new("tower atoms", json!({ "in": input, "symbol": symbol, "tuple": tuple }));
            let t = read_tower(input)?;
            let sym: Symbol = symbol.parse()?;
            let value = t.atom_named(sym.name(), &names(tuple))?;
            Ok(CommandReport { outputs: json!({ "symbol": sym.name(), "value": value }), ..r })
        }
        TowerCommand::Reduct { input, subset, language } => {
            let r = CommandReport::new("tower reduct", json!({ "in": input, "subset": subset, "language": language }));
            let t = read_tower(input)?;
            let lang: Language = language.parse()?;
            let ids = match subset {
                Some(s) => t.ids(&names(s))?,
                None => (0..t.point_count()).collect(),
            };
            let s = t.reduct(&ids, lang)?;
            Ok(CommandReport { outputs: json!({ "structure": to_value(&s) }), ..r })
        }
        TowerCommand::Complete { input, subset } => {
            let mut r = CommandReport::new("tower complete", json!({ "in": input, "subset": subset }));
            let t = read_tower(input)?;
            let ids = t.ids(&names(subset))?;
            let c = complete(&t, &ids)?;
            r.check("superset", ids.iter().all(|p| c.contains(p)), "completion contains the subset");
            r.check("idempotent", complete(&t, &c)? == c, "completing again changes nothing");
            let v = induced_tower(&t, &c)?.validate();
            r.check("induced_valid", v.ok, v.violations.join("; "));
            r.outputs = json!({ "completion": point_names(&t, &c), "added": c.len() - ids.len() });
            Ok(r)
        }
        TowerCommand::WitnessNonhomog { max_levels, max_leaves, max_points } => {
            let bounds = SearchBounds { max_levels: *max_levels, max_leaves: *max_leaves, max_points: *max_points };
            let mut r = CommandReport::new("tower witness-nonhomog", to_value(&bounds));
            let w = nonhomogeneity_witness(bounds)?;
            r.check("l1_preserved", w.preserves_l1()?, "all L1 atoms agree");
            r.check("l2_distinguishes", !w.preserves_l2()?, format!("S witness levels {:?} vs {:?}", w.levels1, w.levels2));
            let ext = w.completion_extensions()?;
            r.check("no_extension", ext.is_empty(), format!("{} extensions to completions", ext.len()));
            let quad = |t: &Tower, c: &[usize], q: [usize; 4]| point_names(t, &q.map(|i| c[i]));
            r.outputs = json!({
                "t1": tower_value(&w.t1),
                "c1": point_names(&w.t1, &w.c1),
                "t2": tower_value(&w.t2),
                "c2": point_names(&w.t2, &w.c2),
                "s_atoms1": [quad(&w.t1, &w.c1, w.s1), quad(&w.t1, &w.c1, w.s2)],
                "s_atoms2": [quad(&w.t2, &w.c2, w.s1), quad(&w.t2, &w.c2, w.s2)],
                "levels1": w.levels1,
                "levels2": w.levels2,
                "examined": w.examined,
            });
            Ok(r)
        }
    }
}

fn indisc(family: &str, n: usize, alternation: bool) -> Result<CommandReport> {
    let mut r = CommandReport::new("indisc", json!({ "family": family, "n": n, "alternation": alternation }));
    let fam: Family = family.parse()?;
    let (t, seq) = indiscernible_prefix(fam, n)?;
    let v = t.validate();
    r.check("valid", v.ok, v.violations.join("; "));
    let mut outputs = json!({ "family": fam.name(), "sequence": point_names(&t, &seq), "tower": tower_value(&t) });
    if alternation {
        let (t2, seq2) = indiscernible_prefix(fam, 2 * n)?;
        let mut rows = Vec::new();
        let mut unstable = Vec::new();
        for sym in Symbol::ALL {
            for free in 0..sym.arity() {
                let f = Formula::shape(sym, free);
                let (a, b) = (max_alternation(&t, &seq, &f)?, max_alternation(&t2, &seq2, &f)?);
                if a != b {
                    unstable.push(f.to_string());
                }
                rows.push(json!({ "formula": f.to_string(), "alternation_n": a, "alternation_2n": b }));
            }
        }
        let detail = if unstable.is_empty() { format!("{} shapes", rows.len()) } else { unstable.join("; ") };
        r.check("alternation_stable", unstable.is_empty(), detail);
        outputs["rows"] = Value::Array(rows);
    }
    r.outputs = outputs;
    Ok(r)
}

fn triviality(n: usize, cut: &str) -> Result<CommandReport> {
    let mut r = CommandReport::new("triviality-witness", json!({ "n": n, "cut": cut }));
    let q = Rational::parse_fraction(cut).ok_or_else(|| treelike::Error::Parse(format!("bad rational {cut}")))?;
    let rep = triviality_failure_witness_with_cut(n, q)?;
    r.check("indiscernible_over_ab", rep.indiscernible_over_ab, "");
    r.check("indiscernible_over_ac", rep.indiscernible_over_ac, "");
    r.check("differing_pair", rep.differing_pair.is_some(), format!("{:?}", rep.differing_pair));
    r.outputs = to_value(&rep);
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn run_parses_and_reports() {
        let r = run(["treelike", "orbits", "--k", "2"]).unwrap();
        assert_eq!(r.outputs, json!({ "k": 2, "count": 1 }));
        assert!(r.passed());
    }

    #[test]
    fn bad_flags_are_usage_errors() {
        assert!(matches!(run(["treelike", "orbits", "--k", "two"]), Err(CliError::Usage(_))));
        assert!(matches!(run(["treelike", "embeds", "--sigma", "1 2"]), Err(CliError::Usage(_))));
    }

    #[test]
    fn failed_check_fails_report() {
        let mut r = CommandReport::new("x", json!({}));
        r.check("a", true, "");
        assert!(r.passed());
        r.check("b", false, "why");
        assert!(!r.passed());
        assert!(r.to_tsv().ends_with("a\tpass\t\nb\tfail\twhy\n"));
    }
}

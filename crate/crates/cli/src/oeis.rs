//! Reading OEIS-style b-files ("index value" lines) and comparing them with computed values.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Duration;

use num_bigint::BigInt;
use sqfree::admissible_max::{admissible_max_exact, Status};
use sqfree::properties::NamedSequence;
use sqfree::sieve::{kfree_window, PrimeTable};
use sqfree::{Error, Result};

/// Environment variable naming the directory searched for b-files and the manifest.
pub const CACHE_ENV: &str = "SQFREE_OEIS_CACHE";

/// Manifest shipped with the fixtures, used when no other manifest is given.
pub const DEFAULT_MANIFEST: &str = include_str!("../fixtures/oeis/manifest.txt");

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BFile {
    pub id: Option<String>,
    pub entries: BTreeMap<i64, BigInt>,
    pub source: Option<PathBuf>,
}

/// Parse "index value" lines; blank lines and lines starting with `#` are skipped.
pub fn parse_oeis_bfile(text: &str) -> Result<BFile> {
    let mut entries = BTreeMap::new();
    let mut last: Option<i64> = None;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        let (Some(idx), Some(val), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(Error::Parse { line: line_no, message: format!("expected '<index> <value>', got {line:?}") });
        };
        let idx: i64 = idx
            .parse()
            .map_err(|_| Error::Parse { line: line_no, message: format!("bad index {idx:?}") })?;
        let val = BigInt::from_str(val)
            .map_err(|_| Error::Parse { line: line_no, message: format!("bad value {val:?}") })?;
        if let Some(prev) = last {
            if idx == prev || entries.contains_key(&idx) {
                return Err(Error::Format { line: line_no, message: format!("duplicate index {idx}") });
            }
            if idx < prev {
                return Err(Error::Format {
                    line: line_no,
                    message: format!("index {idx} follows {prev}; indices must increase"),
                });
            }
        }
        last = Some(idx);
        entries.insert(idx, val);
    }
    Ok(BFile { id: None, entries, source: None })
}

pub fn emit_bfile(bfile: &BFile) -> String {
    let mut out = String::new();
    for (i, v) in &bfile.entries {
        writeln!(out, "{i} {v}").expect("writing to a String");
    }
    out
}

/// `A083544` from names such as `A083544.txt` or `b083544.txt`.
pub fn id_from_path(path: &Path) -> Option<String> {
    let stem = path.file_stem()?.to_str()?;
    let digits = stem.strip_prefix(['A', 'a', 'b', 'B'])?;
    (digits.len() == 6 && digits.bytes().all(|b| b.is_ascii_digit())).then(|| format!("A{digits}"))
}

pub fn read_bfile(path: &Path) -> Result<BFile> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut bfile = parse_oeis_bfile(&text)?;
    bfile.id = id_from_path(path);
    bfile.source = Some(path.to_path_buf());
    Ok(bfile)
}

/// Look for `<id>.txt` or `b<digits>.txt` in `dir`.
pub fn find_in_cache(dir: &Path, id: &str) -> Result<PathBuf> {
    let digits = id.trim_start_matches(['A', 'a']);
    [format!("A{digits}.txt"), format!("b{digits}.txt")]
        .iter()
        .map(|name| dir.join(name))
        .find(|p| p.is_file())
        .ok_or_else(|| Error::Config(format!("no b-file for {id} in {}", dir.display())))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quantity {
    /// Squarefree numbers in `[1, m]`.
    SfCount,
    /// The `m`-th squarefree number.
    SfNth,
    /// The largest survivor count in `[1, m]`.
    AOfX,
    /// The term with parameter `j = m`.
    Named(NamedSequence),
}

impl FromStr for Quantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sf-count" => Ok(Quantity::SfCount),
            "sf-nth" => Ok(Quantity::SfNth),
            "a-of-x" => Ok(Quantity::AOfX),
            _ => match s.strip_prefix("named:") {
                Some(tag) => Ok(Quantity::Named(tag.parse()?)),
                None => Err(Error::Config(format!("unknown quantity {s:?}"))),
            },
        }
    }
}

/// How b-file indices map onto a computed quantity: entry `i >= min_index` is `quantity(i + shift)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Rule {
    pub quantity: Quantity,
    pub min_index: i64,
    pub shift: i64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Manifest {
    pub rules: BTreeMap<String, Rule>,
}

impl Manifest {
    /// One `<id> <quantity> <min_index> <shift>` line per sequence; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Manifest> {
        let mut rules = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |m: String| Error::Parse { line: i + 1, message: m };
            let fields: Vec<&str> = line.split_whitespace().collect();
            let [id, quantity, min_index, shift] = fields[..] else {
                return Err(bad(format!("expected 4 fields, got {}", fields.len())));
            };
            let rule = Rule {
                quantity: quantity.parse().map_err(|e: Error| bad(e.to_string()))?,
                min_index: min_index.parse().map_err(|_| bad(format!("bad min_index {min_index:?}")))?,
                shift: shift.parse().map_err(|_| bad(format!("bad shift {shift:?}")))?,
            };
            if rules.insert(id.to_string(), rule).is_some() {
                return Err(bad(format!("second rule for {id}")));
            }
        }
        Ok(Manifest { rules })
    }

    pub fn rule(&self, id: &str) -> Result<Rule> {
        self.rules
            .get(id)
            .copied()
            .ok_or_else(|| Error::Config(format!("manifest has no rule for {id}")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Match,
    Mismatch { computed: BigInt },
    Skipped { reason: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Row {
    pub index: i64,
    pub expected: BigInt,
    pub outcome: Outcome,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrosscheckReport {
    pub id: String,
    pub rows: Vec<Row>,
}

impl CrosscheckReport {
    fn count(&self, f: impl Fn(&Outcome) -> bool) -> usize {
        self.rows.iter().filter(|r| f(&r.outcome)).count()
    }

    pub fn matches(&self) -> usize {
        self.count(|o| *o == Outcome::Match)
    }

    pub fn mismatches(&self) -> usize {
        self.count(|o| matches!(o, Outcome::Mismatch { .. }))
    }

    pub fn skipped(&self) -> usize {
        self.count(|o| matches!(o, Outcome::Skipped { .. }))
    }
}

#[derive(Clone, Copy, Debug)]
pub struct CrosscheckOptions {
    /// Only indices in this range are compared.
    pub range: Option<(i64, i64)>,
    /// Time allowed for each exact `A(x)` evaluation.
    pub a_budget: Duration,
}

impl Default for CrosscheckOptions {
    fn default() -> Self {
        CrosscheckOptions { range: None, a_budget: Duration::from_secs(10) }
    }
}

/// Compare every entry of `bfile` (within the range) with the quantity its manifest rule names.
pub fn crosscheck(bfile: &BFile, manifest: &Manifest, opts: &CrosscheckOptions) -> Result<CrosscheckReport> {
    let id = bfile
        .id
        .clone()
        .ok_or_else(|| Error::Config("b-file has no sequence id".into()))?;
    let rule = manifest.rule(&id)?;
    let range: RangeInclusive<i64> = match opts.range {
        Some((lo, hi)) => lo..=hi,
        None => i64::MIN..=i64::MAX,
    };
    let wanted: Vec<(i64, &BigInt)> =
        bfile.entries.iter().filter(|(i, _)| range.contains(i)).map(|(i, v)| (*i, v)).collect();
    let args: Vec<Option<u64>> = wanted
        .iter()
        .map(|(i, _)| (*i >= rule.min_index).then(|| i.checked_add(rule.shift)).flatten())
        .map(|a| a.and_then(|a| u64::try_from(a).ok()))
        .collect();
    let mut evaluator = Evaluator::new(rule.quantity, args.iter().flatten().copied().max().unwrap_or(0))?;
    let mut rows = Vec::with_capacity(wanted.len());
    for ((index, expected), arg) in wanted.into_iter().zip(args) {
        let outcome = match arg {
            None => Outcome::Skipped { reason: format!("index {index} outside the rule") },
            Some(m) => match evaluator.value(m, opts.a_budget)? {
                Computed::Value(v) if &v == expected => Outcome::Match,
                Computed::Value(v) => Outcome::Mismatch { computed: v },
                Computed::Unavailable(reason) => Outcome::Skipped { reason },
            },
        };
        rows.push(Row { index, expected: expected.clone(), outcome });
    }
    Ok(CrosscheckReport { id, rows })
}

enum Computed {
    Value(BigInt),
    Unavailable(String),
}

struct Evaluator {
    quantity: Quantity,
    /// squarefree flags for `[1, max]` when the quantity needs them
    squarefree: Vec<u64>,
}

impl Evaluator {
    fn new(quantity: Quantity, max_arg: u64) -> Result<Self> {
        let limit = match quantity {
            Quantity::SfCount => max_arg,
            // the m-th squarefree number is below 2m for m >= 1
            Quantity::SfNth => max_arg.saturating_mul(2).max(2),
            _ => 0,
        };
        let squarefree = if limit > 0 {
            let table = PrimeTable::covering(limit, 2)?;
            kfree_window(1, limit, 2, &table)?.members().collect()
        } else {
            Vec::new()
        };
        Ok(Evaluator { quantity, squarefree })
    }

    fn value(&mut self, m: u64, budget: Duration) -> Result<Computed> {
        let v = match self.quantity {
            Quantity::SfCount => BigInt::from(self.squarefree.partition_point(|&n| n <= m)),
            Quantity::SfNth => match m.checked_sub(1).and_then(|i| self.squarefree.get(i as usize)) {
                Some(&n) => BigInt::from(n),
                None => return Ok(Computed::Unavailable(format!("no squarefree number at position {m}"))),
            },
            Quantity::AOfX => {
                if m == 0 {
                    return Ok(Computed::Unavailable("A(0) is undefined".into()));
                }
                let r = admissible_max_exact(m, 2, budget)?;
                if r.status != Status::Exact {
                    return Ok(Computed::Unavailable(format!("A({m}) not exact within budget")));
                }
                BigInt::from(r.value)
            }
            Quantity::Named(tag) => match tag.term(m) {
                Ok(t) => BigInt::from(t),
                Err(_) => return Ok(Computed::Unavailable(format!("{tag} has no term at j = {m}"))),
            },
        };
        Ok(Computed::Value(v))
    }
}

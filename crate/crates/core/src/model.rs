//! Experiment classes, setting selections, detector-pattern encoding and
//! conditional probability tables.
//!
//! An experiment with `n` detectors on one side reports its output as the
//! integer `Σ_d f(d)·2^d`, where `f(d)` is 1 when detector `d` fired. Firing
//! lists are always written with detector 0 first.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Rational;

/// Largest detector count per subsystem we accept (outputs per side = 2^16).
pub const MAX_DETECTORS: u32 = 16;
/// Largest number of settings per subsystem we accept.
pub const MAX_SETTINGS: u32 = 64;

/// The triplet `(detectors on A, detectors on B, settings per subsystem)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ExperimentClass {
    n_det_a: u32,
    n_det_b: u32,
    n_settings: u32,
}

impl ExperimentClass {
    pub fn new(n_det_a: u32, n_det_b: u32, n_settings: u32) -> Result<Self> {
        if n_det_a == 0 || n_det_b == 0 || n_settings == 0 {
            return Err(Error::InvalidClass(format!(
                "({n_det_a},{n_det_b},{n_settings}): every entry must be at least 1"
            )));
        }
        if n_det_a > MAX_DETECTORS || n_det_b > MAX_DETECTORS {
            return Err(Error::InvalidClass(format!(
                "({n_det_a},{n_det_b},{n_settings}): at most {MAX_DETECTORS} detectors per subsystem"
            )));
        }
        if n_settings > MAX_SETTINGS {
            return Err(Error::InvalidClass(format!(
                "({n_det_a},{n_det_b},{n_settings}): at most {MAX_SETTINGS} settings"
            )));
        }
        Ok(Self {
            n_det_a,
            n_det_b,
            n_settings,
        })
    }

    pub fn n_det_a(&self) -> u32 {
        self.n_det_a
    }

    pub fn n_det_b(&self) -> u32 {
        self.n_det_b
    }

    pub fn n_settings(&self) -> usize {
        self.n_settings as usize
    }

    /// Number of distinct outputs of subsystem A, `2^n_det_a`.
    pub fn outputs_a(&self) -> usize {
        1usize << self.n_det_a
    }

    /// Number of distinct outputs of subsystem B, `2^n_det_b`.
    pub fn outputs_b(&self) -> usize {
        1usize << self.n_det_b
    }

    /// Number of joint outputs `(a, b)`, `2^(n_det_a + n_det_b)`.
    pub fn joint_outputs(&self) -> usize {
        self.outputs_a() * self.outputs_b()
    }

    /// Joint output label `N_b·a + b`.
    pub fn joint_index(&self, a: usize, b: usize) -> Result<usize> {
        if a >= self.outputs_a() {
            return Err(Error::OutOfRange {
                what: "output a",
                value: a,
                limit: self.outputs_a(),
            });
        }
        if b >= self.outputs_b() {
            return Err(Error::OutOfRange {
                what: "output b",
                value: b,
                limit: self.outputs_b(),
            });
        }
        Ok(self.outputs_b() * a + b)
    }

    /// Inverse of [`joint_index`](Self::joint_index).
    pub fn split_joint(&self, joint: usize) -> (usize, usize) {
        (joint / self.outputs_b(), joint % self.outputs_b())
    }
}

impl fmt::Display for ExperimentClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.n_det_a, self.n_det_b, self.n_settings)
    }
}

/// Setting pairs `(α, β)` actually run, in the order that fixes every
/// coordinate layout downstream.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SettingsSelection {
    class: ExperimentClass,
    pairs: Vec<(usize, usize)>,
}

impl SettingsSelection {
    pub fn new(class: ExperimentClass, pairs: Vec<(usize, usize)>) -> Result<Self> {
        let n = class.n_settings();
        if pairs.is_empty() {
            return Err(Error::InvalidSelection("at least one setting pair is required".into()));
        }
        for (k, &(alpha, beta)) in pairs.iter().enumerate() {
            if alpha >= n || beta >= n {
                return Err(Error::InvalidSelection(format!(
                    "pair ({alpha},{beta}) uses a setting outside 0..{n}"
                )));
            }
            if pairs[..k].contains(&(alpha, beta)) {
                return Err(Error::InvalidSelection(format!(
                    "pair ({alpha},{beta}) listed twice"
                )));
            }
        }
        Ok(Self { class, pairs })
    }

    /// Every pair `(α, β)` in row-major order.
    pub fn all_pairs(class: ExperimentClass) -> Self {
        let n = class.n_settings();
        let pairs = (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).collect();
        Self { class, pairs }
    }

    pub fn class(&self) -> ExperimentClass {
        self.class
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Coordinates per setting pair, `N_a·N_b`.
    pub fn block_size(&self) -> usize {
        self.class.joint_outputs()
    }

    /// Length of vertex and table vectors.
    pub fn ambient_dimension(&self) -> usize {
        self.pairs.len() * self.block_size()
    }

    /// Position of `p(a,b|α_k,β_k)` in the flat coordinate vector.
    pub fn coordinate(&self, k: usize, a: usize, b: usize) -> Result<usize> {
        if k >= self.pairs.len() {
            return Err(Error::OutOfRange {
                what: "pair index",
                value: k,
                limit: self.pairs.len(),
            });
        }
        Ok(k * self.block_size() + self.class.joint_index(a, b)?)
    }

    /// Inverse of [`coordinate`](Self::coordinate): `(k, a, b)`.
    pub fn locate(&self, coord: usize) -> (usize, usize, usize) {
        let k = coord / self.block_size();
        let (a, b) = self.class.split_joint(coord % self.block_size());
        (k, a, b)
    }

    pub fn position_of(&self, pair: (usize, usize)) -> Option<usize> {
        self.pairs.iter().position(|&p| p == pair)
    }
}

/// Firing record of one subsystem's detectors, detector 0 first.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OutcomePattern {
    firings: Vec<u8>,
}

impl OutcomePattern {
    pub fn new(firings: Vec<u8>) -> Result<Self> {
        if firings.is_empty() || firings.len() > MAX_DETECTORS as usize {
            return Err(Error::InvalidClass(format!(
                "a subsystem has between 1 and {MAX_DETECTORS} detectors, got {}",
                firings.len()
            )));
        }
        if let Some(bad) = firings.iter().find(|&&f| f > 1) {
            return Err(Error::InvalidClass(format!("detector digit {bad} is not 0 or 1")));
        }
        Ok(Self { firings })
    }

    pub fn firings(&self) -> &[u8] {
        &self.firings
    }

    pub fn detectors(&self) -> usize {
        self.firings.len()
    }
}

impl fmt::Display for OutcomePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (d, bit) in self.firings.iter().enumerate() {
            if d > 0 {
                f.write_str(",")?;
            }
            write!(f, "{bit}")?;
        }
        f.write_str("]")
    }
}

/// `Σ_d f(d)·2^d`.
pub fn encode_outcome(pattern: &OutcomePattern) -> usize {
    pattern
        .firings
        .iter()
        .enumerate()
        .map(|(d, &f)| (f as usize) << d)
        .sum()
}

pub fn decode_outcome(index: usize, n_det: u32) -> Result<OutcomePattern> {
    if n_det == 0 || n_det > MAX_DETECTORS {
        return Err(Error::InvalidClass(format!("{n_det} detectors")));
    }
    let limit = 1usize << n_det;
    if index >= limit {
        return Err(Error::OutOfRange {
            what: "outcome index",
            value: index,
            limit,
        });
    }
    let firings = (0..n_det).map(|d| ((index >> d) & 1) as u8).collect();
    Ok(OutcomePattern { firings })
}

/// Exact conditional probabilities `p(a,b|α,β)` for each selected pair,
/// stored flat in the selection's coordinate order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProbabilityTable {
    selection: SettingsSelection,
    entries: Vec<Rational>,
}

impl ProbabilityTable {
    /// Builds a table from flat entries; only the length is checked here,
    /// see [`validate_table`] for the probability constraints.
    pub fn from_entries(selection: SettingsSelection, entries: Vec<Rational>) -> Result<Self> {
        if entries.len() != selection.ambient_dimension() {
            return Err(Error::DimensionMismatch {
                expected: selection.ambient_dimension(),
                found: entries.len(),
            });
        }
        Ok(Self { selection, entries })
    }

    pub fn selection(&self) -> &SettingsSelection {
        &self.selection
    }

    pub fn class(&self) -> ExperimentClass {
        self.selection.class
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<Rational> {
        self.entries
    }

    pub fn get(&self, k: usize, a: usize, b: usize) -> Result<&Rational> {
        Ok(&self.entries[self.selection.coordinate(k, a, b)?])
    }

    /// Entries of pair `k` in joint-index order.
    pub fn block(&self, k: usize) -> &[Rational] {
        let n = self.selection.block_size();
        &self.entries[k * n..(k + 1) * n]
    }

    /// `(1-λ)·self + λ·other`.
    pub fn mix(&self, other: &Self, lambda: &Rational) -> Result<Self> {
        if self.selection != other.selection {
            return Err(Error::ClassMismatch {
                expected: format!("{} {:?}", self.class(), self.selection.pairs()),
                found: format!("{} {:?}", other.class(), other.selection.pairs()),
            });
        }
        let keep = Rational::one() - lambda;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(x, y)| &keep * x + lambda * y)
            .collect();
        Ok(Self {
            selection: self.selection.clone(),
            entries,
        })
    }

    /// Every entry `1/(N_a·N_b)`.
    pub fn uniform(selection: SettingsSelection) -> Self {
        let value = Rational::new(BigInt::one(), BigInt::from(selection.block_size()));
        let entries = vec![value; selection.ambient_dimension()];
        Self { selection, entries }
    }
}

/// Normalizes raw per-pair counts (`counts[k][a][b]`) into exact frequencies.
pub fn table_from_counts(
    selection: &SettingsSelection,
    counts: &[Vec<Vec<u64>>],
) -> Result<ProbabilityTable> {
    let class = selection.class();
    if counts.len() != selection.len() {
        return Err(Error::InvalidTable(format!(
            "{} count blocks for {} setting pairs",
            counts.len(),
            selection.len()
        )));
    }
    let mut entries = Vec::with_capacity(selection.ambient_dimension());
    for (k, block) in counts.iter().enumerate() {
        let (alpha, beta) = selection.pairs()[k];
        if block.len() != class.outputs_a() || block.iter().any(|row| row.len() != class.outputs_b()) {
            return Err(Error::InvalidTable(format!(
                "counts for pair ({alpha},{beta}) must be a {}x{} array",
                class.outputs_a(),
                class.outputs_b()
            )));
        }
        let total: BigInt = block.iter().flatten().map(|&c| BigInt::from(c)).sum();
        if total.is_zero() {
            return Err(Error::EmptyPair { alpha, beta });
        }
        entries.extend(
            block
                .iter()
                .flatten()
                .map(|&c| Rational::new(BigInt::from(c), total.clone())),
        );
    }
    ProbabilityTable::from_entries(selection.clone(), entries)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairReport {
    pub pair: (usize, usize),
    /// `(a, b)` outputs with a negative entry.
    pub negative: Vec<(usize, usize)>,
    /// `(a, b)` outputs with an entry above one.
    pub above_one: Vec<(usize, usize)>,
    /// `Σ_{a,b} p(a,b|α,β) − 1`.
    pub residual: Rational,
}

impl PairReport {
    pub fn is_valid(&self) -> bool {
        self.negative.is_empty() && self.above_one.is_empty() && self.residual.is_zero()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub pairs: Vec<PairReport>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.pairs.iter().all(PairReport::is_valid)
    }

    /// One line per defect, empty when valid.
    pub fn defects(&self) -> Vec<String> {
        let mut out = Vec::new();
        for r in &self.pairs {
            let (alpha, beta) = r.pair;
            for (a, b) in &r.negative {
                out.push(format!("p({a},{b}|{alpha},{beta}) is negative"));
            }
            for (a, b) in &r.above_one {
                out.push(format!("p({a},{b}|{alpha},{beta}) exceeds 1"));
            }
            if !r.residual.is_zero() {
                out.push(format!(
                    "pair ({alpha},{beta}) sums to 1{}{}",
                    if r.residual.is_negative() { "" } else { "+" },
                    r.residual
                ));
            }
        }
        out
    }
}

pub fn validate_table(table: &ProbabilityTable) -> ValidationReport {
    let selection = table.selection();
    let class = selection.class();
    let pairs = selection
        .pairs()
        .iter()
        .enumerate()
        .map(|(k, &pair)| {
            let mut negative = Vec::new();
            let mut above_one = Vec::new();
            let mut sum = Rational::zero();
            for (joint, p) in table.block(k).iter().enumerate() {
                let ab = class.split_joint(joint);
                if p.is_negative() {
                    negative.push(ab);
                } else if *p > Rational::one() {
                    above_one.push(ab);
                }
                sum += p;
            }
            PairReport {
                pair,
                negative,
                above_one,
                residual: sum - Rational::one(),
            }
        })
        .collect();
    ValidationReport { pairs }
}

/// Parses `"3"`, `"-1/8"`, `"0.25"` or `"2.5e-1"` without rounding.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let err = || Error::ParseRational(text.to_string());
    let s = text.trim();
    if s.is_empty() {
        return Err(err());
    }
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = parse_integer(num.trim()).ok_or_else(err)?;
        let den: BigInt = parse_integer(den.trim()).ok_or_else(err)?;
        if den.is_zero() {
            return Err(err());
        }
        return Ok(Rational::new(num, den));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => {
            let exp: i32 = s[i + 1..].parse().map_err(|_| err())?;
            (&s[..i], exp)
        }
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.as_bytes().first() {
        Some(b'-') => (true, &mantissa[1..]),
        Some(b'+') => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err());
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|c| c.is_ascii_digit()) {
        return Err(err());
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut value = Rational::from_integer(all_digits.parse::<BigInt>().map_err(|_| err())?);
    let scale = exponent - frac_part.len() as i32;
    let ten = Rational::from_integer(BigInt::from(10));
    if scale >= 0 {
        value *= num_traits::pow(ten, scale as usize);
    } else {
        value /= num_traits::pow(ten, (-scale) as usize);
    }
    Ok(if negative { -value } else { value })
}

fn parse_integer(s: &str) -> Option<BigInt> {
    let body = s.strip_prefix(['-', '+']).unwrap_or(s);
    if body.is_empty() || !body.bytes().all(|c| c.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

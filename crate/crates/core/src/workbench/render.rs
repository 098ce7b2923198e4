//! Artifact formatting. Numbers are always exact: integers that fit in
//! `i64` are JSON numbers, anything else is a string (`"n/d"` for
//! rationals).

use std::fmt::Write;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::geometry::LinearInequality;
use crate::model::SettingsSelection;
use crate::Rational;

/// Serializes a big integer as a number when it fits, else as a string.
pub struct Int<'a>(pub &'a BigInt);

impl Serialize for Int<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0.to_i64() {
            Some(v) => s.serialize_i64(v),
            None => s.serialize_str(&self.0.to_string()),
        }
    }
}

pub fn rational_text(x: &Rational) -> String {
    x.to_string()
}

/// `c·p(a,b|α,β)` terms, zero terms omitted.
pub fn terms_text(coeffs: &[BigInt], selection: &SettingsSelection) -> String {
    let mut out = String::new();
    for (i, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let (k, a, b) = selection.locate(i);
        let (alpha, beta) = selection.pairs()[k];
        if out.is_empty() {
            if c.is_negative() {
                out.push('−');
            }
        } else {
            out.push_str(if c.is_negative() { " − " } else { " + " });
        }
        let _ = write!(out, "{}·p({a},{b}|{alpha},{beta})", c.abs());
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

pub fn inequality_text(ineq: &LinearInequality, selection: &SettingsSelection) -> String {
    format!("{} ≤ {}", terms_text(ineq.coeffs(), selection), ineq.bound())
}

pub fn equality_text(eq: &LinearInequality, selection: &SettingsSelection) -> String {
    format!("{} = {}", terms_text(eq.coeffs(), selection), eq.bound())
}

#[derive(Serialize)]
pub struct InequalityJson<'a> {
    pub coeffs: Vec<Int<'a>>,
    pub bound: Int<'a>,
    pub text: String,
}

impl<'a> InequalityJson<'a> {
    pub fn new(ineq: &'a LinearInequality, selection: &SettingsSelection, equality: bool) -> Self {
        Self {
            coeffs: ineq.coeffs().iter().map(Int).collect(),
            bound: Int(ineq.bound()),
            text: if equality {
                equality_text(ineq, selection)
            } else {
                inequality_text(ineq, selection)
            },
        }
    }
}

pub fn pairs_json(selection: &SettingsSelection) -> Vec<[usize; 2]> {
    selection.pairs().iter().map(|&(a, b)| [a, b]).collect()
}

pub fn pairs_text(selection: &SettingsSelection) -> String {
    let parts: Vec<String> = selection
        .pairs()
        .iter()
        .map(|(a, b)| format!("({a},{b})"))
        .collect();
    parts.join(" ")
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("artifact serializes");
    s.push('\n');
    s
}

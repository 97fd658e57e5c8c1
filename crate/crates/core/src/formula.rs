//! Boolean formulas over variables `x1..xn`.
//!
//! The concrete syntax is deliberately small:
//!
//! ```text
//! formula := or
//! or      := and { "|" and }
//! and     := lit { "&" lit }
//! lit     := "!" lit | "(" formula ")" | var | "0" | "1"
//! var     := "x" nonzero-digit { digit }
//! ```
//!
//! Serialization is canonical: every binary node is printed as
//! `(left op right)`, negation as `!child`, and there is no whitespace.
//! `parse(serialize(f)) == f` for every formula, and distinct trees serialize
//! to distinct strings, so the canonical text can be used as an oracle query.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, ParseError, ParseErrorKind};

/// A Boolean formula.
///
/// `Var` indices start at 1. Use [`Formula::var`] to build variables so the
/// index invariant is checked.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    Const(bool),
    Var(u32),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
}

impl Formula {
    /// Variable `x{index}`. Panics on index 0.
    pub fn var(index: u32) -> Formula {
        assert!(index >= 1, "variable indices start at 1");
        Formula::Var(index)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(child: Formula) -> Formula {
        Formula::Not(Box::new(child))
    }

    pub fn and(left: Formula, right: Formula) -> Formula {
        Formula::And(Box::new(left), Box::new(right))
    }

    pub fn or(left: Formula, right: Formula) -> Formula {
        Formula::Or(Box::new(left), Box::new(right))
    }

    pub fn parse(text: &str) -> Result<Formula, ParseError> {
        Parser::new(text).parse()
    }

    /// Canonical, fully parenthesized, whitespace-free text.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        self.write_canonical(&mut out);
        out
    }

    fn write_canonical(&self, out: &mut String) {
        match self {
            Formula::Const(true) => out.push('1'),
            Formula::Const(false) => out.push('0'),
            Formula::Var(i) => {
                out.push('x');
                out.push_str(&i.to_string());
            }
            Formula::Not(child) => {
                out.push('!');
                child.write_canonical(out);
            }
            Formula::And(l, r) => {
                out.push('(');
                l.write_canonical(out);
                out.push('&');
                r.write_canonical(out);
                out.push(')');
            }
            Formula::Or(l, r) => {
                out.push('(');
                l.write_canonical(out);
                out.push('|');
                r.write_canonical(out);
                out.push(')');
            }
        }
    }

    /// Largest variable index occurring in the formula, 0 if there is none.
    ///
    /// Gaps are allowed: a formula mentioning only `x1` and `x3` has three
    /// variables, with `x2` unconstrained.
    pub fn num_vars(&self) -> u32 {
        match self {
            Formula::Const(_) => 0,
            Formula::Var(i) => *i,
            Formula::Not(c) => c.num_vars(),
            Formula::And(l, r) | Formula::Or(l, r) => l.num_vars().max(r.num_vars()),
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            Formula::Const(_) | Formula::Var(_) => 1,
            Formula::Not(c) => 1 + c.node_count(),
            Formula::And(l, r) | Formula::Or(l, r) => 1 + l.node_count() + r.node_count(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Formula::Const(_) | Formula::Var(_) => 1,
            Formula::Not(c) => 1 + c.depth(),
            Formula::And(l, r) | Formula::Or(l, r) => 1 + l.depth().max(r.depth()),
        }
    }

    /// Whether `x{index}` occurs in the formula.
    pub fn mentions(&self, index: u32) -> bool {
        match self {
            Formula::Const(_) => false,
            Formula::Var(i) => *i == index,
            Formula::Not(c) => c.mentions(index),
            Formula::And(l, r) | Formula::Or(l, r) => l.mentions(index) || r.mentions(index),
        }
    }

    /// Replaces every `x{index}` with the constant `value`.
    ///
    /// No simplification happens: `(x1&x2)[x1 := 1]` is `(1&x2)`, not `x2`.
    pub fn substitute(&self, index: u32, value: bool) -> Formula {
        match self {
            Formula::Var(i) if *i == index => Formula::Const(value),
            Formula::Const(_) | Formula::Var(_) => self.clone(),
            Formula::Not(c) => Formula::not(c.substitute(index, value)),
            Formula::And(l, r) => Formula::and(l.substitute(index, value), r.substitute(index, value)),
            Formula::Or(l, r) => Formula::or(l.substitute(index, value), r.substitute(index, value)),
        }
    }

    /// Evaluates under `assignment`, which must cover every variable.
    pub fn evaluate(&self, assignment: &Assignment) -> Result<bool, Error> {
        let needed = self.num_vars() as usize;
        if assignment.len() < needed {
            return Err(Error::AssignmentTooShort {
                needed,
                got: assignment.len(),
            });
        }
        Ok(self.eval_with(&|i| assignment.values[i as usize - 1]))
    }

    /// Evaluates with variable values supplied by `value_of(index)`.
    pub fn eval_with<F: Fn(u32) -> bool>(&self, value_of: &F) -> bool {
        match self {
            Formula::Const(b) => *b,
            Formula::Var(i) => value_of(*i),
            Formula::Not(c) => !c.eval_with(value_of),
            Formula::And(l, r) => l.eval_with(value_of) && r.eval_with(value_of),
            Formula::Or(l, r) => l.eval_with(value_of) || r.eval_with(value_of),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.serialize())
    }
}

impl FromStr for Formula {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Formula::parse(s)
    }
}

impl Serialize for Formula {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&Formula::serialize(self))
    }
}

impl<'de> Deserialize<'de> for Formula {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        Formula::parse(&text).map_err(serde::de::Error::custom)
    }
}

/// Truth values for `x1..xn`, ordered lexicographically with `x1` most
/// significant. Read as a binary numeral `x1 x2 ... xn`, so the all-true
/// assignment is the maximum and "odd" means `xn` is true.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Assignment {
    values: Vec<bool>,
}

impl Assignment {
    pub fn new(values: Vec<bool>) -> Assignment {
        Assignment { values }
    }

    /// The assignment whose binary numeral (x1 most significant) is `bits`.
    pub fn from_bits(bits: u64, len: u32) -> Assignment {
        let values = (1..=len).map(|i| bits >> (len - i) & 1 == 1).collect();
        Assignment { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Value of `x{index}` (1-based).
    pub fn get(&self, index: u32) -> Option<bool> {
        index
            .checked_sub(1)
            .and_then(|i| self.values.get(i as usize))
            .copied()
    }

    pub fn set(&mut self, index: u32, value: bool) {
        self.values[index as usize - 1] = value;
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }

    /// Whether `xn` is true. The empty assignment is not odd.
    pub fn is_odd(&self) -> bool {
        self.values.last().copied().unwrap_or(false)
    }

    pub fn to_bit_string(&self) -> String {
        self.values.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }
}

impl PartialOrd for Assignment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Assignment {
    fn cmp(&self, other: &Self) -> Ordering {
        // `false < true` elementwise, x1 first.
        self.values.cmp(&other.values)
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_bit_string())
    }
}

/// Seeded random formula with at most `size` nodes over `x1..x{num_vars}`.
///
/// The same `(seed, num_vars, size)` always yields the same formula.
pub fn random_formula(seed: u64, num_vars: u32, size: usize) -> Formula {
    assert!(num_vars >= 1 && size >= 1, "random_formula needs num_vars >= 1 and size >= 1");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let target = rng.gen_range(size.div_ceil(2)..=size);
    grow(&mut rng, num_vars, target)
}

// Builds a tree with exactly `budget` nodes.
fn grow(rng: &mut ChaCha8Rng, num_vars: u32, budget: usize) -> Formula {
    match budget {
        0 => unreachable!("node budget exhausted"),
        1 => {
            if rng.gen_bool(0.1) {
                Formula::Const(rng.gen())
            } else {
                Formula::Var(rng.gen_range(1..=num_vars))
            }
        }
        2 => Formula::not(grow(rng, num_vars, 1)),
        _ => {
            if rng.gen_bool(0.2) {
                return Formula::not(grow(rng, num_vars, budget - 1));
            }
            let left = rng.gen_range(1..budget - 1);
            let right = budget - 1 - left;
            let l = grow(rng, num_vars, left);
            let r = grow(rng, num_vars, right);
            if rng.gen() {
                Formula::and(l, r)
            } else {
                Formula::or(l, r)
            }
        }
    }
}

struct Parser<'a> {
    text: &'a str,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Parser {
            text,
            bytes: text.as_bytes(),
            pos: 0,
        }
    }

    fn parse(mut self) -> Result<Formula, ParseError> {
        self.skip_ws();
        let formula = self.or()?;
        self.skip_ws();
        if self.pos < self.bytes.len() {
            return Err(self.error(ParseErrorKind::TrailingInput));
        }
        Ok(formula)
    }

    fn error(&self, kind: ParseErrorKind) -> ParseError {
        ParseError {
            position: self.pos,
            kind,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn or(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.and()?;
        while self.peek() == Some(b'|') {
            self.pos += 1;
            let rhs = self.and()?;
            acc = Formula::or(acc, rhs);
        }
        Ok(acc)
    }

    fn and(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.lit()?;
        while self.peek() == Some(b'&') {
            self.pos += 1;
            let rhs = self.lit()?;
            acc = Formula::and(acc, rhs);
        }
        Ok(acc)
    }

    fn lit(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            None => Err(self.error(ParseErrorKind::UnexpectedEnd)),
            Some(b'!') => {
                self.pos += 1;
                Ok(Formula::not(self.lit()?))
            }
            Some(b'(') => {
                self.pos += 1;
                let inner = self.or()?;
                match self.peek() {
                    Some(b')') => {
                        self.pos += 1;
                        Ok(inner)
                    }
                    None => Err(self.error(ParseErrorKind::UnexpectedEnd)),
                    Some(_) => Err(self.unexpected()),
                }
            }
            Some(b'0') => {
                self.pos += 1;
                Ok(Formula::Const(false))
            }
            Some(b'1') => {
                self.pos += 1;
                Ok(Formula::Const(true))
            }
            Some(b'x') => self.variable(),
            Some(_) => Err(self.unexpected()),
        }
    }

    fn variable(&mut self) -> Result<Formula, ParseError> {
        let start = self.pos;
        self.pos += 1;
        let digits_start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let digits = &self.text[digits_start..self.pos];
        if digits.is_empty() {
            return Err(ParseError {
                position: digits_start,
                kind: ParseErrorKind::MissingVariableIndex,
            });
        }
        if digits.starts_with('0') {
            return Err(ParseError {
                position: start,
                kind: ParseErrorKind::InvalidVariableIndex(digits.to_string()),
            });
        }
        digits.parse::<u32>().map(Formula::Var).map_err(|_| ParseError {
            position: start,
            kind: ParseErrorKind::InvalidVariableIndex(digits.to_string()),
        })
    }

    fn unexpected(&self) -> ParseError {
        let c = self.text[self.pos..].chars().next().unwrap_or('\0');
        self.error(ParseErrorKind::UnexpectedChar(c))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::HashSet;

    fn p(s: &str) -> Formula {
        Formula::parse(s).unwrap()
    }

    #[test]
    fn parses_grammar_examples() {
        assert_eq!(p("x1"), Formula::Var(1));
        assert_eq!(p("(x1&!x2)"), Formula::and(Formula::var(1), Formula::not(Formula::var(2))));
        assert_eq!(p("x1|x2&x3"), Formula::or(Formula::var(1), Formula::and(Formula::var(2), Formula::var(3))));
        assert_eq!(p("x1&x2&x3").serialize(), "((x1&x2)&x3)");
        assert_eq!(p(" ( x12 | 0 ) "), Formula::or(Formula::var(12), Formula::Const(false)));
        assert_eq!(p("!!1"), Formula::not(Formula::not(Formula::Const(true))));
    }

    #[test]
    fn rejects_malformed_input() {
        let err = Formula::parse("x0").unwrap_err();
        assert_eq!(err.position, 0);
        assert!(matches!(err.kind, ParseErrorKind::InvalidVariableIndex(_)));
        assert!(Formula::parse("x01").is_err());
        assert!(Formula::parse("x").is_err());
        assert!(Formula::parse("").is_err());
        assert!(Formula::parse("(x1&x2").is_err());
        assert!(Formula::parse("x1)").is_err());
        assert!(Formula::parse("zzz").is_err());
        assert!(Formula::parse("x1&").is_err());
        assert!(Formula::parse("x99999999999").is_err());
        let err = Formula::parse("(x1 # x2)").unwrap_err();
        assert_eq!(err.position, 4);
        assert_eq!(err.kind, ParseErrorKind::UnexpectedChar('#'));
    }

    #[test]
    fn canonical_serialization() {
        assert_eq!(Formula::and(Formula::var(1), Formula::Const(true)).serialize(), "(x1&1)");
        assert_eq!(p("!(x1|x2)").serialize(), "!(x1|x2)");
        assert_eq!(p("((x3))").serialize(), "x3");
    }

    #[test]
    fn num_vars_is_max_index() {
        assert_eq!(p("1").num_vars(), 0);
        assert_eq!(p("(x1|x3)").num_vars(), 3);
        assert_eq!(p("!x7").num_vars(), 7);
    }

    #[test]
    fn substitution_examples() {
        assert_eq!(p("(x1&x2)").substitute(1, true).serialize(), "(1&x2)");
        assert_eq!(p("x1").substitute(2, false), p("x1"));
        assert_eq!(p("(x1|x1)").substitute(1, true).serialize(), "(1|1)");
    }

    #[test]
    fn evaluation_examples() {
        let tf = Assignment::new(vec![true, false]);
        assert!(p("(x1&!x2)").evaluate(&tf).unwrap());
        assert!(p("(1|x1)").evaluate(&Assignment::new(vec![false])).unwrap());
        assert!(matches!(
            p("x1").evaluate(&Assignment::default()),
            Err(Error::AssignmentTooShort { needed: 1, got: 0 })
        ));
        // Longer assignments are fine.
        assert!(p("x1").evaluate(&Assignment::new(vec![true, false, false])).unwrap());
    }

    #[test]
    fn assignment_order_and_parity() {
        let a = Assignment::from_bits(0b10, 2);
        assert_eq!(a.values(), &[true, false]);
        assert!(!a.is_odd());
        assert!(Assignment::from_bits(0b01, 2).is_odd());
        assert!(Assignment::from_bits(0b10, 2) > Assignment::from_bits(0b01, 2));
        assert_eq!(Assignment::from_bits(0b111, 3), Assignment::new(vec![true; 3]));
        for bits in 0..15u64 {
            assert!(Assignment::from_bits(bits, 4) < Assignment::from_bits(bits + 1, 4));
        }
        assert_eq!(Assignment::from_bits(0b011, 3).to_bit_string(), "011");
    }

    #[test]
    fn random_formula_is_deterministic_and_bounded() {
        assert_eq!(random_formula(1, 3, 9), random_formula(1, 3, 9));
        let f = random_formula(1, 3, 9);
        assert!(f.node_count() <= 9);
        assert!(f.num_vars() <= 3);
        for seed in 0..1000 {
            let f = random_formula(seed, 5, 25);
            assert!(f.node_count() <= 25);
            assert_eq!(Formula::parse(&f.serialize()).unwrap(), f);
        }
    }

    #[test]
    fn serialization_is_injective_on_random_corpus() {
        let asts: HashSet<Formula> = (0..20_000).map(|s| random_formula(s, 4, 12)).collect();
        assert!(asts.len() >= 10_000, "corpus too small: {}", asts.len());
        let texts: HashSet<String> = asts.iter().map(Formula::serialize).collect();
        assert_eq!(texts.len(), asts.len());
    }

    #[test]
    fn serde_uses_canonical_text() {
        let f = p("(x1&!x2)");
        let json = serde_json::to_string(&f).unwrap();
        assert_eq!(json, "\"(x1&!x2)\"");
        let back: Formula = serde_json::from_str(&json).unwrap();
        assert_eq!(back, f);
    }

    fn arb_formula() -> impl Strategy<Value = Formula> {
        let leaf = prop_oneof![
            any::<bool>().prop_map(Formula::Const),
            (1u32..=6).prop_map(Formula::Var),
        ];
        leaf.prop_recursive(6, 48, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(Formula::not),
                (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::and(l, r)),
                (inner.clone(), inner).prop_map(|(l, r)| Formula::or(l, r)),
            ]
        })
    }

    proptest! {
        #[test]
        fn parse_serialize_round_trip(f in arb_formula()) {
            prop_assert_eq!(Formula::parse(&f.serialize()).unwrap(), f);
        }

        #[test]
        fn substitution_matches_pointwise_update(
            f in arb_formula(),
            index in 1u32..=6,
            value: bool,
            bits in 0u64..64,
        ) {
            let base = Assignment::from_bits(bits, 6);
            let mut updated = base.clone();
            updated.set(index, value);
            let substituted = f.substitute(index, value);
            prop_assert_eq!(
                substituted.evaluate(&base).unwrap(),
                f.evaluate(&updated).unwrap()
            );
            prop_assert!(!substituted.mentions(index));
        }
    }
}

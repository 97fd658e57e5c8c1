//! Oracles, the `⊕` join, and finite oracles for positivity checking.
//!
//! A query on the wire is the canonical text of a formula immediately
//! followed by one tag character: `0` addresses the left component of a
//! join, `1` the right one. There is no delimiter; the tag is always the
//! last character.

use std::collections::HashMap;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, ParseError, Result};
use crate::formula::Formula;
use crate::sat::sat_dpll;

/// Default bound on `|U|` for exhaustive subset-pair enumeration.
pub const EXHAUSTIVE_PAIR_BOUND: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Tag {
    #[serde(rename = "0")]
    Left,
    #[serde(rename = "1")]
    Right,
}

impl Tag {
    pub fn as_char(self) -> char {
        match self {
            Tag::Left => '0',
            Tag::Right => '1',
        }
    }

    pub fn from_char(c: char) -> Option<Tag> {
        match c {
            '0' => Some(Tag::Left),
            '1' => Some(Tag::Right),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QueryString {
    body: String,
    tag: Tag,
}

impl QueryString {
    pub fn new(body: &Formula, tag: Tag) -> QueryString {
        QueryString {
            body: body.serialize(),
            tag,
        }
    }

    /// Builds a query from a raw body. The body is not validated.
    pub fn from_parts(body: impl Into<String>, tag: Tag) -> QueryString {
        QueryString { body: body.into(), tag }
    }

    /// Splits a wire string into body and tag.
    pub fn from_wire(raw: &str) -> Result<QueryString> {
        let mut chars = raw.chars();
        let tag = chars.next_back().and_then(Tag::from_char).ok_or(Error::MalformedQuery)?;
        Ok(QueryString {
            body: chars.as_str().to_string(),
            tag,
        })
    }

    pub fn body(&self) -> &str {
        &self.body
    }

    pub fn tag(&self) -> Tag {
        self.tag
    }

    pub fn body_formula(&self) -> Result<Formula, ParseError> {
        Formula::parse(&self.body)
    }

    pub fn to_wire(&self) -> String {
        let mut s = String::with_capacity(self.body.len() + 1);
        s.push_str(&self.body);
        s.push(self.tag.as_char());
        s
    }
}

impl fmt::Display for QueryString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.body, self.tag.as_char())
    }
}

impl Serialize for QueryString {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_wire())
    }
}

impl<'de> Deserialize<'de> for QueryString {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = String::deserialize(deserializer)?;
        QueryString::from_wire(&raw).map_err(serde::de::Error::custom)
    }
}

/// A deterministic membership predicate over query strings.
pub trait Oracle {
    fn contains(&self, query: &QueryString) -> bool;
}

impl<F: Fn(&QueryString) -> bool> Oracle for F {
    fn contains(&self, query: &QueryString) -> bool {
        self(query)
    }
}

/// Membership in `A ⊕ B = {x0 | x ∈ A} ∪ {x1 | x ∈ B}`.
pub fn join_membership(
    query: &QueryString,
    left: impl Fn(&str) -> bool,
    right: impl Fn(&str) -> bool,
) -> bool {
    match query.tag {
        Tag::Left => left(&query.body),
        Tag::Right => right(&query.body),
    }
}

/// Membership in `Sat ⊕ co-Sat`. Bodies that are not formulas are in
/// neither component.
pub fn sat_join_cosat(query: &QueryString) -> bool {
    join_membership(
        query,
        |body| Formula::parse(body).is_ok_and(|f| sat_dpll(&f)),
        |body| Formula::parse(body).is_ok_and(|f| !sat_dpll(&f)),
    )
}

#[derive(Clone, Copy, Debug, Default)]
pub struct SatJoinCoSat;

impl Oracle for SatJoinCoSat {
    fn contains(&self, query: &QueryString) -> bool {
        sat_join_cosat(query)
    }
}

/// A SAT decision procedure that counts how often it is asked.
#[derive(Debug, Default)]
pub struct MeteredSat {
    calls: AtomicU64,
}

impl MeteredSat {
    pub fn is_satisfiable(&self, formula: &Formula) -> bool {
        self.calls.fetch_add(1, Ordering::Relaxed);
        sat_dpll(formula)
    }

    pub fn calls(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }
}

/// The single SAT question asked while answering a query.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SatCall {
    pub formula: String,
    pub satisfiable: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OneQueryAnswer {
    pub answer: bool,
    /// `None` only for malformed bodies, which are answered without asking.
    pub sat_call: Option<SatCall>,
}

/// Decides `Sat ⊕ co-Sat` with one SAT call per query: ask whether the body
/// is satisfiable, then return the answer for tag `0` or its negation for
/// tag `1`.
#[derive(Debug, Default)]
pub struct OneQueryDecider {
    sat: MeteredSat,
}

impl OneQueryDecider {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn decide(&self, query: &QueryString) -> OneQueryAnswer {
        let Ok(body) = query.body_formula() else {
            return OneQueryAnswer {
                answer: false,
                sat_call: None,
            };
        };
        let satisfiable = self.sat.is_satisfiable(&body);
        let answer = match query.tag {
            Tag::Left => satisfiable,
            Tag::Right => !satisfiable,
        };
        OneQueryAnswer {
            answer,
            sat_call: Some(SatCall {
                formula: query.body.clone(),
                satisfiable,
            }),
        }
    }

    /// Total SAT calls made by this decider so far.
    pub fn sat_calls(&self) -> u64 {
        self.sat.calls()
    }
}

impl Oracle for OneQueryDecider {
    fn contains(&self, query: &QueryString) -> bool {
        self.decide(query).answer
    }
}

pub fn one_query_decider(query: &QueryString) -> OneQueryAnswer {
    OneQueryDecider::new().decide(query)
}

/// An ordered, duplicate-free set of queries.
#[derive(Clone, Debug, Default)]
pub struct QueryUniverse {
    queries: Vec<QueryString>,
    index: HashMap<QueryString, usize>,
}

impl QueryUniverse {
    pub fn len(&self) -> usize {
        self.queries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.queries.is_empty()
    }

    pub fn position(&self, query: &QueryString) -> Option<usize> {
        self.index.get(query).copied()
    }

    pub fn contains(&self, query: &QueryString) -> bool {
        self.index.contains_key(query)
    }

    pub fn get(&self, i: usize) -> Option<&QueryString> {
        self.queries.get(i)
    }

    pub fn iter(&self) -> std::slice::Iter<'_, QueryString> {
        self.queries.iter()
    }

    pub fn push(&mut self, query: QueryString) -> bool {
        if self.index.contains_key(&query) {
            return false;
        }
        self.index.insert(query.clone(), self.queries.len());
        self.queries.push(query);
        true
    }
}

impl FromIterator<QueryString> for QueryUniverse {
    fn from_iter<I: IntoIterator<Item = QueryString>>(iter: I) -> Self {
        let mut universe = QueryUniverse::default();
        for q in iter {
            universe.push(q);
        }
        universe
    }
}

impl<'a> IntoIterator for &'a QueryUniverse {
    type Item = &'a QueryString;
    type IntoIter = std::slice::Iter<'a, QueryString>;

    fn into_iter(self) -> Self::IntoIter {
        self.queries.iter()
    }
}

/// An explicit subset of a finite query universe. Queries outside the
/// universe are never members.
#[derive(Clone, Debug)]
pub struct FiniteOracle {
    universe: Arc<QueryUniverse>,
    members: Vec<bool>,
}

impl FiniteOracle {
    pub fn empty(universe: Arc<QueryUniverse>) -> Self {
        let members = vec![false; universe.len()];
        FiniteOracle { universe, members }
    }

    pub fn full(universe: Arc<QueryUniverse>) -> Self {
        let members = vec![true; universe.len()];
        FiniteOracle { universe, members }
    }

    pub fn from_members(universe: Arc<QueryUniverse>, members: Vec<bool>) -> Self {
        assert_eq!(members.len(), universe.len(), "membership vector must cover the universe");
        FiniteOracle { universe, members }
    }

    /// Bit `j` of `mask` is the membership of the `j`-th universe element.
    pub fn from_mask(universe: Arc<QueryUniverse>, mask: u64) -> Self {
        let members = (0..universe.len()).map(|j| mask >> j & 1 == 1).collect();
        FiniteOracle { universe, members }
    }

    /// Oracle containing exactly `queries`, which must all lie in the universe.
    pub fn from_queries<'q>(
        universe: Arc<QueryUniverse>,
        queries: impl IntoIterator<Item = &'q QueryString>,
    ) -> Option<Self> {
        let mut members = vec![false; universe.len()];
        for q in queries {
            members[universe.position(q)?] = true;
        }
        Some(FiniteOracle { universe, members })
    }

    pub fn universe(&self) -> &Arc<QueryUniverse> {
        &self.universe
    }

    pub fn members(&self) -> impl Iterator<Item = &QueryString> {
        self.universe
            .iter()
            .zip(&self.members)
            .filter_map(|(q, &m)| m.then_some(q))
    }

    pub fn member_count(&self) -> usize {
        self.members.iter().filter(|&&m| m).count()
    }

    pub fn is_subset_of(&self, other: &FiniteOracle) -> bool {
        self.members().all(|q| other.contains(q))
    }
}

impl Oracle for FiniteOracle {
    fn contains(&self, query: &QueryString) -> bool {
        self.universe.position(query).is_some_and(|i| self.members[i])
    }
}

/// Every pair `(S, T)` with `S ⊆ T ⊆ U`, exactly once each, `3^|U|` in total.
///
/// Pair `k` is read off the base-3 digits of `k`: digit `j` is 0 when the
/// `j`-th query is in neither set, 1 when it is only in `T`, and 2 when it
/// is in both.
#[derive(Clone, Debug)]
pub struct SubsetPairs {
    universe: Arc<QueryUniverse>,
    next: u64,
    total: u64,
}

impl SubsetPairs {
    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn pair_at(&self, k: u64) -> (FiniteOracle, FiniteOracle) {
        assert!(k < self.total, "pair index out of range");
        let (mut lower, mut upper) = (0u64, 0u64);
        let mut rest = k;
        for j in 0..self.universe.len() {
            match rest % 3 {
                1 => upper |= 1 << j,
                2 => {
                    upper |= 1 << j;
                    lower |= 1 << j;
                }
                _ => {}
            }
            rest /= 3;
        }
        (
            FiniteOracle::from_mask(self.universe.clone(), lower),
            FiniteOracle::from_mask(self.universe.clone(), upper),
        )
    }
}

impl Iterator for SubsetPairs {
    type Item = (FiniteOracle, FiniteOracle);

    fn next(&mut self) -> Option<Self::Item> {
        if self.next >= self.total {
            return None;
        }
        let pair = self.pair_at(self.next);
        self.next += 1;
        Some(pair)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.total - self.next) as usize;
        (left, Some(left))
    }
}

impl ExactSizeIterator for SubsetPairs {}

pub fn enumerate_subset_pairs(universe: &Arc<QueryUniverse>) -> Result<SubsetPairs> {
    enumerate_subset_pairs_bounded(universe, EXHAUSTIVE_PAIR_BOUND)
}

pub fn enumerate_subset_pairs_bounded(universe: &Arc<QueryUniverse>, bound: usize) -> Result<SubsetPairs> {
    // 3^40 is the largest power of three below 2^64.
    if universe.len() > bound || universe.len() > 40 {
        return Err(Error::BoundExceeded {
            what: "query universe size",
            size: universe.len(),
            bound,
        });
    }
    Ok(SubsetPairs {
        universe: universe.clone(),
        next: 0,
        total: 3u64.pow(universe.len() as u32),
    })
}

/// Draws `T` uniformly among subsets of `U`, then `S` uniformly among
/// subsets of `T`.
pub fn sample_subset_pair(universe: &Arc<QueryUniverse>, seed: u64) -> (FiniteOracle, FiniteOracle) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lower = vec![false; universe.len()];
    let mut upper = vec![false; universe.len()];
    for j in 0..universe.len() {
        upper[j] = rng.gen();
        lower[j] = upper[j] && rng.gen();
    }
    (
        FiniteOracle::from_members(universe.clone(), lower),
        FiniteOracle::from_members(universe.clone(), upper),
    )
}

//! Checks that a machine is positive on a given input: whenever oracle `S`
//! is a subset of oracle `T`, acceptance under `S` implies acceptance
//! under `T`.
//!
//! The machine only ever looks at its query universe (see
//! [`Machine::query_universe`]), so it is enough to range `S ⊆ T` over
//! subsets of that universe. Exhaustive mode walks all `3^|U|` pairs;
//! sampled mode draws pairs with [`sample_subset_pair`].

use std::sync::Arc;

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::oracle::{
    enumerate_subset_pairs_bounded, sample_subset_pair, FiniteOracle, QueryString, QueryUniverse,
    EXHAUSTIVE_PAIR_BOUND,
};
use crate::reduction::{classify_case, IterationCase, Machine};
use crate::Verdict;

pub const DEFAULT_SAMPLES: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckMode {
    Exhaustive,
    Sampled { samples: usize, seed: u64 },
}

/// Oracles `lower ⊆ upper` with the machine accepting under `lower` and
/// rejecting under `upper`.
#[derive(Clone, Debug)]
pub struct Counterexample {
    pub lower: FiniteOracle,
    pub upper: FiniteOracle,
    pub lower_verdict: Verdict,
    pub upper_verdict: Verdict,
}

impl Counterexample {
    pub fn lower_queries(&self) -> Vec<String> {
        self.lower.members().map(QueryString::to_wire).collect()
    }

    pub fn upper_queries(&self) -> Vec<String> {
        self.upper.members().map(QueryString::to_wire).collect()
    }
}

#[derive(Clone, Debug)]
pub enum Outcome {
    Ok,
    Counterexample(Counterexample),
}

#[derive(Clone, Debug)]
pub struct PositivityReport {
    pub formula: Formula,
    pub machine: Machine,
    pub mode: CheckMode,
    pub universe_size: usize,
    pub pairs_checked: u64,
    pub outcome: Outcome,
}

impl PositivityReport {
    pub fn is_ok(&self) -> bool {
        matches!(self.outcome, Outcome::Ok)
    }

    pub fn counterexample(&self) -> Option<&Counterexample> {
        match &self.outcome {
            Outcome::Counterexample(c) => Some(c),
            Outcome::Ok => None,
        }
    }

    /// Re-runs the machine on the reported pair from the serialized query
    /// lists. True iff the pair is nested and the machine accepts under the
    /// smaller oracle and rejects under the larger one.
    pub fn replay(&self) -> bool {
        let Some(c) = self.counterexample() else {
            return false;
        };
        let lower = c.lower_queries();
        let upper = c.upper_queries();
        replay_counterexample(self.machine, &self.formula, &lower, &upper)
    }

    pub fn to_json(&self) -> Value {
        let (mode, seed) = match self.mode {
            CheckMode::Exhaustive => ("exhaustive", Value::Null),
            CheckMode::Sampled { seed, .. } => ("sampled", json!(seed)),
        };
        let result = match &self.outcome {
            Outcome::Ok => json!("ok"),
            Outcome::Counterexample(c) => json!({ "S": c.lower_queries(), "T": c.upper_queries() }),
        };
        json!({
            "formula": self.formula.serialize(),
            "mode": mode,
            "universeSize": self.universe_size,
            "pairsChecked": self.pairs_checked,
            "seed": seed,
            "result": result,
        })
    }
}

/// Rebuilds both oracles from raw query strings and runs the machine twice.
pub fn replay_counterexample(machine: Machine, formula: &Formula, lower: &[String], upper: &[String]) -> bool {
    let parse = |raws: &[String]| -> Option<Vec<QueryString>> {
        raws.iter().map(|r| QueryString::from_wire(r).ok()).collect()
    };
    let (Some(lower), Some(upper)) = (parse(lower), parse(upper)) else {
        return false;
    };
    let universe: Arc<QueryUniverse> = Arc::new(upper.iter().chain(&lower).cloned().collect());
    let s = FiniteOracle::from_queries(universe.clone(), &lower).expect("built from these queries");
    let t = FiniteOracle::from_queries(universe, &upper).expect("built from these queries");
    s.is_subset_of(&t)
        && machine.run_formula(formula, &s).verdict == Verdict::Accept
        && machine.run_formula(formula, &t).verdict == Verdict::Reject
}

#[derive(Clone, Copy, Debug)]
pub struct PositivityChecker {
    machine: Machine,
    exhaustive_bound: usize,
}

impl Default for PositivityChecker {
    fn default() -> Self {
        PositivityChecker::new(Machine::Standard)
    }
}

impl PositivityChecker {
    pub fn new(machine: Machine) -> Self {
        PositivityChecker {
            machine,
            exhaustive_bound: EXHAUSTIVE_PAIR_BOUND,
        }
    }

    pub fn with_exhaustive_bound(mut self, bound: usize) -> Self {
        self.exhaustive_bound = bound;
        self
    }

    pub fn machine(&self) -> Machine {
        self.machine
    }

    /// Checks one pair; `Some` if it violates monotonicity.
    pub fn check_pair(&self, formula: &Formula, lower: &FiniteOracle, upper: &FiniteOracle) -> Option<Counterexample> {
        let lower_verdict = self.machine.verdict(formula, lower);
        if lower_verdict != Verdict::Accept {
            return None;
        }
        let upper_verdict = self.machine.verdict(formula, upper);
        (upper_verdict == Verdict::Reject).then(|| Counterexample {
            lower: lower.clone(),
            upper: upper.clone(),
            lower_verdict,
            upper_verdict,
        })
    }

    /// All pairs `S ⊆ T` of subsets of the query universe. Reports the
    /// violation with the smallest enumeration index, if any.
    pub fn exhaustive(&self, formula: &Formula) -> Result<PositivityReport> {
        let universe = Arc::new(self.machine.query_universe(formula)?);
        let pairs = enumerate_subset_pairs_bounded(&universe, self.exhaustive_bound)?;
        let total = pairs.total();
        let found = (0..total).into_par_iter().find_map_first(|k| {
            let (s, t) = pairs.pair_at(k);
            self.check_pair(formula, &s, &t).map(|c| (k, c))
        });
        let (pairs_checked, outcome) = match found {
            Some((k, c)) => (k + 1, Outcome::Counterexample(c)),
            None => (total, Outcome::Ok),
        };
        Ok(PositivityReport {
            formula: formula.clone(),
            machine: self.machine,
            mode: CheckMode::Exhaustive,
            universe_size: universe.len(),
            pairs_checked,
            outcome,
        })
    }

    /// `samples` random pairs; pair `j` is drawn with a seed derived from
    /// `seed` and `j`, so the report does not depend on thread scheduling.
    pub fn sampled(&self, formula: &Formula, samples: usize, seed: u64) -> Result<PositivityReport> {
        let universe = Arc::new(self.machine.query_universe(formula)?);
        let found = (0..samples as u64).into_par_iter().find_map_first(|j| {
            let (s, t) = sample_subset_pair(&universe, derive_seed(seed, j));
            self.check_pair(formula, &s, &t).map(|c| (j, c))
        });
        let (pairs_checked, outcome) = match found {
            Some((j, c)) => (j + 1, Outcome::Counterexample(c)),
            None => (samples as u64, Outcome::Ok),
        };
        Ok(PositivityReport {
            formula: formula.clone(),
            machine: self.machine,
            mode: CheckMode::Sampled { samples, seed },
            universe_size: universe.len(),
            pairs_checked,
            outcome,
        })
    }

    /// Exhaustive when the universe fits the bound, sampled otherwise.
    pub fn auto(&self, formula: &Formula, samples: usize, seed: u64) -> Result<PositivityReport> {
        match self.exhaustive(formula) {
            Err(Error::BoundExceeded {
                what: "query universe size",
                ..
            }) => self.sampled(formula, samples, seed),
            other => other,
        }
    }
}

// SplitMix64 finalizer over (master, index).
fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn check_positivity_exhaustive(formula: &Formula) -> Result<PositivityReport> {
    PositivityChecker::default().exhaustive(formula)
}

pub fn check_positivity_sampled(formula: &Formula, samples: usize, seed: u64) -> Result<PositivityReport> {
    PositivityChecker::default().sampled(formula, samples, seed)
}

/// The local law behind positivity of the standard machine: raising the
/// answers of one iteration pointwise can only move a run from
/// `REJECT_BOTH`, or into `ACCEPT_BOTH`.
pub fn verify_case_monotonicity() -> bool {
    let answers = [(false, false), (false, true), (true, false), (true, true)];
    answers.iter().all(|&(a0, a1)| {
        answers.iter().all(|&(b0, b1)| {
            let below = a0 <= b0 && a1 <= b1;
            let lower = classify_case(a0, a1);
            let upper = classify_case(b0, b1);
            !below
                || ((lower != IterationCase::AcceptBoth || upper == IterationCase::AcceptBoth)
                    && (upper != IterationCase::RejectBoth || lower == IterationCase::RejectBoth))
        })
    })
}

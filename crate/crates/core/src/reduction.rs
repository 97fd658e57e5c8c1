//! The oracle machine deciding OddMaxSat with `Sat ⊕ co-Sat` queries.
//!
//! On a formula over `x1..xn` the machine keeps a partially substituted
//! formula `φ_i` (initially the input) and, for `i = 1..n`, asks whether
//! `φ_i[x_i := 1]` is in the left and in the right join component:
//!
//! | answers (tag 0, tag 1) | case          | action                                        |
//! |------------------------|---------------|-----------------------------------------------|
//! | yes, no                | `FIX_TRUE`    | `φ_{i+1} := φ_i[x_i := 1]`; accept if `i = n` |
//! | no, yes                | `FIX_FALSE`   | `φ_{i+1} := φ_i[x_i := 0]`; reject if `i = n` |
//! | yes, yes               | `ACCEPT_BOTH` | accept                                        |
//! | no, no                 | `REJECT_BOTH` | reject                                        |
//!
//! Inputs that are not formulas, and formulas without variables, are
//! rejected without querying.

use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::oracle::{Oracle, QueryString, QueryUniverse, SatJoinCoSat, Tag};
use crate::sat::odd_max_sat_ref;
use crate::Verdict;

/// Default bound on `num_vars` for query-tree construction.
pub const TREE_BOUND: u32 = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum IterationCase {
    FixTrue,
    FixFalse,
    AcceptBoth,
    RejectBoth,
}

impl IterationCase {
    pub const ALL: [IterationCase; 4] = [
        IterationCase::FixTrue,
        IterationCase::FixFalse,
        IterationCase::AcceptBoth,
        IterationCase::RejectBoth,
    ];

    /// The answer pair (tag 0, tag 1) that produces this case.
    pub fn answers(self) -> (bool, bool) {
        match self {
            IterationCase::FixTrue => (true, false),
            IterationCase::FixFalse => (false, true),
            IterationCase::AcceptBoth => (true, true),
            IterationCase::RejectBoth => (false, false),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            IterationCase::FixTrue => "FIX_TRUE",
            IterationCase::FixFalse => "FIX_FALSE",
            IterationCase::AcceptBoth => "ACCEPT_BOTH",
            IterationCase::RejectBoth => "REJECT_BOTH",
        }
    }
}

impl fmt::Display for IterationCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub fn classify_case(tag0_answer: bool, tag1_answer: bool) -> IterationCase {
    match (tag0_answer, tag1_answer) {
        (true, false) => IterationCase::FixTrue,
        (false, true) => IterationCase::FixFalse,
        (true, true) => IterationCase::AcceptBoth,
        (false, false) => IterationCase::RejectBoth,
    }
}

/// The machine, or one of the broken variants used to show that the
/// positivity checker can fail.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Machine {
    Standard,
    /// `ACCEPT_BOTH` rejects and `REJECT_BOTH` accepts.
    SwapBothCases,
    /// `FIX_TRUE` continues with `x_i := 0` and `FIX_FALSE` with `x_i := 1`.
    SwapContinuation,
    /// Every verdict issued at iteration `n` is inverted.
    FlipFinalIteration,
}

impl Machine {
    pub const MUTANTS: [Machine; 3] = [
        Machine::SwapBothCases,
        Machine::SwapContinuation,
        Machine::FlipFinalIteration,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Machine::Standard => "standard",
            Machine::SwapBothCases => "swap-both-cases",
            Machine::SwapContinuation => "swap-continuation",
            Machine::FlipFinalIteration => "flip-final-iteration",
        }
    }

    fn step(self, case: IterationCase, i: u32, n: u32) -> Step {
        let last = i == n;
        let step = match case {
            IterationCase::AcceptBoth => Step::Halt(Verdict::Accept),
            IterationCase::RejectBoth => Step::Halt(Verdict::Reject),
            IterationCase::FixTrue if last => Step::Halt(Verdict::Accept),
            IterationCase::FixFalse if last => Step::Halt(Verdict::Reject),
            IterationCase::FixTrue => Step::Continue(true),
            IterationCase::FixFalse => Step::Continue(false),
        };
        match (self, step) {
            (Machine::SwapBothCases, Step::Halt(v))
                if matches!(case, IterationCase::AcceptBoth | IterationCase::RejectBoth) =>
            {
                Step::Halt(v.negate())
            }
            (Machine::SwapContinuation, Step::Continue(value)) => Step::Continue(!value),
            (Machine::FlipFinalIteration, Step::Halt(v)) if last => Step::Halt(v.negate()),
            _ => step,
        }
    }

    /// Runs on arbitrary input text; non-formulas are rejected unqueried.
    pub fn run<O: Oracle + ?Sized>(self, input: &str, oracle: &O) -> Transcript {
        match Formula::parse(input) {
            Ok(formula) => {
                let mut iterations = Vec::new();
                let verdict = self.execute(&formula, oracle, Some(&mut iterations));
                Transcript {
                    input: input.to_string(),
                    well_formed: true,
                    iterations,
                    verdict,
                }
            }
            Err(_) => Transcript {
                input: input.to_string(),
                well_formed: false,
                iterations: Vec::new(),
                verdict: Verdict::Reject,
            },
        }
    }

    pub fn run_formula<O: Oracle + ?Sized>(self, formula: &Formula, oracle: &O) -> Transcript {
        let mut iterations = Vec::new();
        let verdict = self.execute(formula, oracle, Some(&mut iterations));
        Transcript {
            input: formula.serialize(),
            well_formed: true,
            iterations,
            verdict,
        }
    }

    /// Verdict only, without recording a transcript.
    pub fn verdict<O: Oracle + ?Sized>(self, formula: &Formula, oracle: &O) -> Verdict {
        self.execute(formula, oracle, None)
    }

    fn execute<O: Oracle + ?Sized>(
        self,
        formula: &Formula,
        oracle: &O,
        mut record: Option<&mut Vec<Iteration>>,
    ) -> Verdict {
        let n = formula.num_vars();
        let mut current = formula.clone();
        for i in 1..=n {
            let fixed = current.substitute(i, true);
            let body = fixed.serialize();
            let left = QueryString::from_parts(body.clone(), Tag::Left);
            let right = QueryString::from_parts(body, Tag::Right);
            let left_answer = oracle.contains(&left);
            let right_answer = oracle.contains(&right);
            let case = classify_case(left_answer, right_answer);
            if let Some(log) = record.as_deref_mut() {
                log.push(Iteration {
                    i,
                    queries: vec![
                        QueryRecord::new(&left, left_answer),
                        QueryRecord::new(&right, right_answer),
                    ],
                    case,
                });
            }
            match self.step(case, i, n) {
                Step::Halt(verdict) => return verdict,
                Step::Continue(true) => current = fixed,
                Step::Continue(false) => current = current.substitute(i, false),
            }
        }
        // Only reachable for n = 0: every case halts at i = n.
        Verdict::Reject
    }

    /// Every computation of the machine on `formula`, branching over all
    /// four answer pairs at each iteration.
    pub fn query_tree(self, formula: &Formula) -> Result<QueryTree> {
        self.query_tree_bounded(formula, TREE_BOUND)
    }

    pub fn query_tree_bounded(self, formula: &Formula, bound: u32) -> Result<QueryTree> {
        let n = formula.num_vars();
        if n > bound {
            return Err(Error::BoundExceeded {
                what: "variable count",
                size: n as usize,
                bound: bound as usize,
            });
        }
        let root = if n == 0 {
            QueryNode::Leaf {
                verdict: Verdict::Reject,
            }
        } else {
            self.grow(formula.clone(), 1, n)
        };
        Ok(QueryTree {
            formula: formula.clone(),
            machine: self,
            num_vars: n,
            root,
        })
    }

    fn grow(self, current: Formula, i: u32, n: u32) -> QueryNode {
        let fixed = current.substitute(i, true);
        let queries = [QueryString::new(&fixed, Tag::Left), QueryString::new(&fixed, Tag::Right)];
        let edges = IterationCase::ALL
            .iter()
            .map(|&case| {
                let child = match self.step(case, i, n) {
                    Step::Halt(verdict) => QueryNode::Leaf { verdict },
                    Step::Continue(true) => self.grow(fixed.clone(), i + 1, n),
                    Step::Continue(false) => self.grow(current.substitute(i, false), i + 1, n),
                };
                let (tag0, tag1) = case.answers();
                Edge {
                    case,
                    answers: [tag0, tag1],
                    child,
                }
            })
            .collect();
        QueryNode::Branch {
            iteration: i,
            formula: current,
            queries,
            edges,
        }
    }

    /// Every query the machine can issue on `formula` under some oracle.
    pub fn query_universe(self, formula: &Formula) -> Result<QueryUniverse> {
        Ok(self.query_tree(formula)?.universe())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Step {
    Continue(bool),
    Halt(Verdict),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryRecord {
    /// The full wire string, body followed by the tag.
    pub string: String,
    pub tag: Tag,
    pub answer: bool,
}

impl QueryRecord {
    fn new(query: &QueryString, answer: bool) -> Self {
        QueryRecord {
            string: query.to_wire(),
            tag: query.tag(),
            answer,
        }
    }

    pub fn query(&self) -> QueryString {
        QueryString::from_wire(&self.string).expect("recorded queries carry a tag")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Iteration {
    pub i: u32,
    pub queries: Vec<QueryRecord>,
    pub case: IterationCase,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Transcript {
    pub input: String,
    pub well_formed: bool,
    pub iterations: Vec<Iteration>,
    pub verdict: Verdict,
}

impl Transcript {
    pub fn query_count(&self) -> usize {
        self.iterations.iter().map(|it| it.queries.len()).sum()
    }

    /// Bits chosen by the `FIX_TRUE`/`FIX_FALSE` iterations, in order.
    pub fn fixed_bits(&self) -> Vec<bool> {
        self.iterations
            .iter()
            .map_while(|it| match it.case {
                IterationCase::FixTrue => Some(true),
                IterationCase::FixFalse => Some(false),
                _ => None,
            })
            .collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("transcript serializes")
    }

    /// Human-readable trace, one line per query.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        if !self.well_formed {
            let _ = writeln!(out, "input is not a formula; no queries");
        }
        for it in &self.iterations {
            for q in &it.queries {
                let _ = writeln!(
                    out,
                    "i={} query {} -> {}",
                    it.i,
                    q.string,
                    if q.answer { "yes" } else { "no" }
                );
            }
            let _ = writeln!(out, "i={} case {}", it.i, it.case);
        }
        let _ = writeln!(out, "verdict {}", self.verdict);
        out
    }
}

pub fn run_machine<O: Oracle + ?Sized>(input: &str, oracle: &O) -> Transcript {
    Machine::Standard.run(input, oracle)
}

/// Runs the machine on `formula` with the `Sat ⊕ co-Sat` oracle.
pub fn decide_oddmaxsat(formula: &Formula) -> Verdict {
    run_machine(&formula.serialize(), &SatJoinCoSat).verdict
}

/// The verdict the machine is expected to reach: the reference OddMaxSat
/// decision, or reject for formulas without variables.
pub fn reference_verdict(formula: &Formula) -> Verdict {
    odd_max_sat_ref(formula).unwrap_or(Verdict::Reject)
}

pub fn build_query_tree(formula: &Formula) -> Result<QueryTree> {
    Machine::Standard.query_tree(formula)
}

pub fn query_universe(formula: &Formula) -> Result<QueryUniverse> {
    Machine::Standard.query_universe(formula)
}

#[derive(Clone, Debug, Serialize)]
pub struct Edge {
    pub case: IterationCase,
    pub answers: [bool; 2],
    pub child: QueryNode,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum QueryNode {
    Branch {
        iteration: u32,
        formula: Formula,
        queries: [QueryString; 2],
        edges: Vec<Edge>,
    },
    Leaf {
        verdict: Verdict,
    },
}

impl QueryNode {
    fn visit<'a>(&'a self, f: &mut impl FnMut(&'a QueryNode, usize), depth: usize) {
        f(self, depth);
        if let QueryNode::Branch { edges, .. } = self {
            for e in edges {
                e.child.visit(f, depth + 1);
            }
        }
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct QueryTree {
    pub formula: Formula,
    pub machine: Machine,
    pub num_vars: u32,
    pub root: QueryNode,
}

impl QueryTree {
    /// Distinct queries in depth-first order.
    pub fn universe(&self) -> QueryUniverse {
        let mut universe = QueryUniverse::default();
        self.root.visit(
            &mut |node, _| {
                if let QueryNode::Branch { queries, .. } = node {
                    for q in queries {
                        universe.push(q.clone());
                    }
                }
            },
            0,
        );
        universe
    }

    pub fn branch_count(&self) -> usize {
        let mut count = 0;
        self.root
            .visit(&mut |node, _| count += matches!(node, QueryNode::Branch { .. }) as usize, 0);
        count
    }

    pub fn leaf_count(&self) -> usize {
        let mut count = 0;
        self.root
            .visit(&mut |node, _| count += matches!(node, QueryNode::Leaf { .. }) as usize, 0);
        count
    }

    /// Number of iterations on the longest path.
    pub fn depth(&self) -> usize {
        let mut deepest = 0;
        self.root.visit(
            &mut |node, depth| {
                if matches!(node, QueryNode::Branch { .. }) {
                    deepest = deepest.max(depth + 1);
                }
            },
            0,
        );
        deepest
    }

    /// Whether `transcript` follows a root-to-leaf path of this tree and
    /// ends with the leaf's verdict.
    pub fn contains_path(&self, transcript: &Transcript) -> bool {
        if !transcript.well_formed {
            return false;
        }
        let mut node = &self.root;
        for it in &transcript.iterations {
            let QueryNode::Branch {
                iteration,
                queries,
                edges,
                ..
            } = node
            else {
                return false;
            };
            let asked: Vec<String> = it.queries.iter().map(|q| q.string.clone()).collect();
            let expected: Vec<String> = queries.iter().map(QueryString::to_wire).collect();
            if *iteration != it.i || asked != expected {
                return false;
            }
            match edges.iter().find(|e| e.case == it.case) {
                Some(edge) => node = &edge.child,
                None => return false,
            }
        }
        matches!(node, QueryNode::Leaf { verdict } if *verdict == transcript.verdict)
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "formula {} (n = {})", self.formula, self.num_vars);
        render_node(&self.root, 0, &mut out);
        out
    }
}

fn render_node(node: &QueryNode, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match node {
        QueryNode::Leaf { verdict } => {
            let _ = writeln!(out, "{pad}{verdict}");
        }
        QueryNode::Branch {
            iteration,
            formula,
            queries,
            edges,
        } => {
            let _ = writeln!(
                out,
                "{pad}i={iteration} phi={formula} queries {} {}",
                queries[0], queries[1]
            );
            for e in edges {
                let yn = |b: bool| if b { "yes" } else { "no" };
                match &e.child {
                    QueryNode::Leaf { verdict } => {
                        let _ = writeln!(
                            out,
                            "{pad}  {}/{} {} -> {verdict}",
                            yn(e.answers[0]),
                            yn(e.answers[1]),
                            e.case
                        );
                    }
                    child => {
                        let _ = writeln!(out, "{pad}  {}/{} {} ->", yn(e.answers[0]), yn(e.answers[1]), e.case);
                        render_node(child, indent + 2, out);
                    }
                }
            }
        }
    }
}

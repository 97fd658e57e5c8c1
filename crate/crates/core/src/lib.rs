//! A positive oracle machine deciding OddMaxSat with queries to
//! `Sat ⊕ co-Sat`, together with everything needed to check it at desk
//! scale: a formula language, SAT back-ends, oracles and the join, a
//! query-tree explorer, and an exhaustive/sampled positivity checker.
//!
//! ```
//! use posred_core::{decide_oddmaxsat, odd_max_sat_ref, Formula, Verdict};
//!
//! let phi = Formula::parse("(!x1|x2)").unwrap();
//! assert_eq!(decide_oddmaxsat(&phi), Verdict::Accept);
//! assert_eq!(odd_max_sat_ref(&phi).unwrap(), Verdict::Accept);
//! ```

#![forbid(unsafe_code)]

use std::fmt;

use serde::{Deserialize, Serialize};

pub mod corpus;
pub mod error;
pub mod formula;
pub mod oracle;
pub mod positivity;
pub mod reduction;
pub mod sat;

pub use error::{Error, ParseError, ParseErrorKind, Result};
pub use formula::{random_formula, Assignment, Formula};
pub use oracle::{
    enumerate_subset_pairs, join_membership, one_query_decider, sample_subset_pair, sat_join_cosat,
    FiniteOracle, OneQueryDecider, Oracle, QueryString, QueryUniverse, SatJoinCoSat, Tag,
};
pub use positivity::{
    check_positivity_exhaustive, check_positivity_sampled, verify_case_monotonicity, CheckMode,
    PositivityChecker, PositivityReport,
};
pub use reduction::{
    build_query_tree, classify_case, decide_oddmaxsat, query_universe, reference_verdict, run_machine,
    IterationCase, Machine, QueryTree, Transcript,
};
pub use sat::{lexmax, odd_max_sat_ref, sat_bruteforce, sat_dpll, SatResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Accept,
    Reject,
}

impl Verdict {
    pub fn is_accept(self) -> bool {
        self == Verdict::Accept
    }

    pub fn negate(self) -> Verdict {
        match self {
            Verdict::Accept => Verdict::Reject,
            Verdict::Reject => Verdict::Accept,
        }
    }
}

impl From<bool> for Verdict {
    fn from(accept: bool) -> Self {
        if accept {
            Verdict::Accept
        } else {
            Verdict::Reject
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Accept => "accept",
            Verdict::Reject => "reject",
        })
    }
}

//! Desk-scale satisfiability, lexicographically maximum models, and the
//! reference OddMaxSat decider.

use crate::error::{Error, Result};
use crate::formula::{Assignment, Formula};
use crate::Verdict;

/// Default variable bound for [`sat_bruteforce`].
pub const BRUTEFORCE_BOUND: u32 = 20;

/// Largest variable count for which [`lexmax`] enumerates instead of
/// running the greedy per-variable search.
pub const LEXMAX_ENUMERATION_BOUND: u32 = 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SatResult {
    Unsat,
    Sat(Assignment),
}

impl SatResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, SatResult::Sat(_))
    }

    pub fn witness(&self) -> Option<&Assignment> {
        match self {
            SatResult::Sat(w) => Some(w),
            SatResult::Unsat => None,
        }
    }
}

/// Satisfiability by trying all `2^n` assignments.
pub fn sat_bruteforce(formula: &Formula) -> Result<bool> {
    sat_bruteforce_bounded(formula, BRUTEFORCE_BOUND)
}

pub fn sat_bruteforce_bounded(formula: &Formula, bound: u32) -> Result<bool> {
    let n = formula.num_vars();
    if n > bound || n >= 64 {
        return Err(Error::BoundExceeded {
            what: "variable count",
            size: n as usize,
            bound: bound as usize,
        });
    }
    Ok((0..1u64 << n).any(|bits| formula.eval_with(&|i| bits >> (i - 1) & 1 == 1)))
}

/// Satisfiability by DPLL-style search on the formula tree.
///
/// Constants are propagated after every assignment; top-level conjuncts that
/// are literals are forced; otherwise the search splits on the lowest-index
/// remaining variable, trying `true` first.
pub fn sat_dpll(formula: &Formula) -> bool {
    let mut model = vec![None; formula.num_vars() as usize];
    search(fold(formula), &mut model)
}

/// Like [`sat_dpll`] but returns a witness. Variables the search never had
/// to fix are reported as true.
pub fn solve_dpll(formula: &Formula) -> SatResult {
    let mut model = vec![None; formula.num_vars() as usize];
    if search(fold(formula), &mut model) {
        SatResult::Sat(Assignment::new(model.into_iter().map(|v| v.unwrap_or(true)).collect()))
    } else {
        SatResult::Unsat
    }
}

fn search(formula: Formula, model: &mut [Option<bool>]) -> bool {
    let formula = match propagate_units(formula, model) {
        Some(f) => f,
        None => return false,
    };
    let index = match formula {
        Formula::Const(b) => return b,
        ref f => lowest_var(f).expect("non-constant folded formula mentions a variable"),
    };
    for value in [true, false] {
        model[index as usize - 1] = Some(value);
        if search(assign_fold(&formula, index, value), model) {
            return true;
        }
    }
    model[index as usize - 1] = None;
    false
}

// Repeatedly forces literals that appear as top-level conjuncts. Returns
// `None` on conflict.
fn propagate_units(mut formula: Formula, model: &mut [Option<bool>]) -> Option<Formula> {
    loop {
        if let Formula::Const(b) = formula {
            return b.then_some(formula);
        }
        let Some((index, value)) = top_level_unit(&formula) else {
            return Some(formula);
        };
        model[index as usize - 1] = Some(value);
        formula = assign_fold(&formula, index, value);
    }
}

fn top_level_unit(formula: &Formula) -> Option<(u32, bool)> {
    match formula {
        Formula::Var(i) => Some((*i, true)),
        Formula::Not(c) => match c.as_ref() {
            Formula::Var(i) => Some((*i, false)),
            _ => None,
        },
        Formula::And(l, r) => top_level_unit(l).or_else(|| top_level_unit(r)),
        _ => None,
    }
}

fn lowest_var(formula: &Formula) -> Option<u32> {
    match formula {
        Formula::Const(_) => None,
        Formula::Var(i) => Some(*i),
        Formula::Not(c) => lowest_var(c),
        Formula::And(l, r) | Formula::Or(l, r) => match (lowest_var(l), lowest_var(r)) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        },
    }
}

/// Constant-folds the whole formula.
pub(crate) fn fold(formula: &Formula) -> Formula {
    assign_fold(formula, 0, false)
}

// Substitutes `x{index} := value` and folds constants bottom-up. Index 0
// never matches, which makes this a plain fold.
fn assign_fold(formula: &Formula, index: u32, value: bool) -> Formula {
    match formula {
        Formula::Var(i) if *i == index => Formula::Const(value),
        Formula::Const(_) | Formula::Var(_) => formula.clone(),
        Formula::Not(c) => match assign_fold(c, index, value) {
            Formula::Const(b) => Formula::Const(!b),
            c => Formula::not(c),
        },
        Formula::And(l, r) => match assign_fold(l, index, value) {
            Formula::Const(false) => Formula::Const(false),
            Formula::Const(true) => assign_fold(r, index, value),
            l => match assign_fold(r, index, value) {
                Formula::Const(false) => Formula::Const(false),
                Formula::Const(true) => l,
                r => Formula::and(l, r),
            },
        },
        Formula::Or(l, r) => match assign_fold(l, index, value) {
            Formula::Const(true) => Formula::Const(true),
            Formula::Const(false) => assign_fold(r, index, value),
            l => match assign_fold(r, index, value) {
                Formula::Const(true) => Formula::Const(true),
                Formula::Const(false) => l,
                r => Formula::or(l, r),
            },
        },
    }
}

/// The lexicographically greatest satisfying assignment (x1 most
/// significant), over exactly `num_vars` variables.
pub fn lexmax(formula: &Formula) -> SatResult {
    if formula.num_vars() <= LEXMAX_ENUMERATION_BOUND {
        lexmax_enumerate(formula).expect("within enumeration bound")
    } else {
        lexmax_greedy(formula)
    }
}

/// Scans assignments downward from all-true and returns the first model.
pub fn lexmax_enumerate(formula: &Formula) -> Result<SatResult> {
    let n = formula.num_vars();
    if n > LEXMAX_ENUMERATION_BOUND {
        return Err(Error::BoundExceeded {
            what: "variable count",
            size: n as usize,
            bound: LEXMAX_ENUMERATION_BOUND as usize,
        });
    }
    // Bit (n - i) of `bits` holds x_i, so numeric order is lex order.
    let found = (0..1u64 << n)
        .rev()
        .find(|&bits| formula.eval_with(&|i| bits >> (n - i) & 1 == 1));
    Ok(match found {
        Some(bits) => SatResult::Sat(Assignment::from_bits(bits, n)),
        None => SatResult::Unsat,
    })
}

/// Fixes `x1, x2, ...` in turn, keeping `true` whenever the restricted
/// formula stays satisfiable.
pub fn lexmax_greedy(formula: &Formula) -> SatResult {
    let mut current = fold(formula);
    if !sat_dpll(&current) {
        return SatResult::Unsat;
    }
    let n = formula.num_vars();
    let mut values = Vec::with_capacity(n as usize);
    for i in 1..=n {
        let with_true = assign_fold(&current, i, true);
        if sat_dpll(&with_true) {
            current = with_true;
            values.push(true);
        } else {
            current = assign_fold(&current, i, false);
            values.push(false);
        }
    }
    SatResult::Sat(Assignment::new(values))
}

/// Reference decider: accept iff the formula is satisfiable and its
/// lex-max model sets `xn` true.
pub fn odd_max_sat_ref(formula: &Formula) -> Result<Verdict> {
    if formula.num_vars() == 0 {
        return Err(Error::ConstantFormula);
    }
    Ok(match lexmax(formula) {
        SatResult::Sat(w) if w.is_odd() => Verdict::Accept,
        _ => Verdict::Reject,
    })
}

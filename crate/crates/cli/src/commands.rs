use std::fs;
use std::path::Path;

use posred_core::corpus::{parse_corpus, CorpusEntry};
use posred_core::positivity::{PositivityChecker, DEFAULT_SAMPLES};
use posred_core::sat::lexmax as lexmax_of;
use posred_core::{
    decide_oddmaxsat, random_formula, reference_verdict, run_machine, sat_join_cosat, Error, Formula,
    OneQueryDecider, PositivityReport, QueryString, SatJoinCoSat, SatResult,
};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::{EquivalenceArgs, PositivityArgs, EXIT_INPUT, EXIT_NEGATIVE, EXIT_OK};

fn print_json(value: &Value) {
    println!("{}", serde_json::to_string_pretty(value).expect("json values serialize"));
}

fn parse_or_report(text: &str) -> Result<Formula, u8> {
    Formula::parse(text).map_err(|e| {
        eprintln!("error: not a formula: {e}");
        EXIT_INPUT
    })
}

fn load_corpus(path: &Path) -> Result<Vec<CorpusEntry>, u8> {
    let text = fs::read_to_string(path).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", path.display());
        EXIT_INPUT
    })?;
    parse_corpus(&text).map_err(|e| {
        eprintln!("error: {}: {e}", path.display());
        EXIT_INPUT
    })
}

pub fn decide(text: &str, trace: bool, json: bool) -> u8 {
    // The machine itself rejects non-formulas; the CLI also reports the
    // parse failure and exits with the input-error code.
    let transcript = run_machine(text, &SatJoinCoSat);
    if !transcript.well_formed {
        if json {
            print_json(&transcript.to_json());
        }
        if let Err(e) = Formula::parse(text) {
            eprintln!("error: not a formula: {e}");
        }
        return EXIT_INPUT;
    }
    if json {
        print_json(&transcript.to_json());
    } else {
        println!("{}", transcript.verdict);
        if trace {
            print!("{}", transcript.render_text());
        }
    }
    if transcript.verdict.is_accept() {
        EXIT_OK
    } else {
        EXIT_NEGATIVE
    }
}

fn lexmax_text(formula: &Formula) -> (String, bool) {
    match lexmax_of(formula) {
        SatResult::Sat(w) => (w.to_bit_string(), true),
        SatResult::Unsat => ("UNSAT".to_string(), false),
    }
}

pub fn lexmax(text: &str, json: bool) -> u8 {
    let formula = match parse_or_report(text) {
        Ok(f) => f,
        Err(code) => return code,
    };
    let (shown, sat) = lexmax_text(&formula);
    if json {
        print_json(&json!({ "formula": formula.serialize(), "lexmax": shown, "satisfiable": sat }));
    } else {
        println!("{shown}");
    }
    if sat {
        EXIT_OK
    } else {
        EXIT_NEGATIVE
    }
}

pub fn verify_equivalence(args: &EquivalenceArgs, seed: u64, json: bool) -> u8 {
    // (line number if from a corpus, formula)
    let (source, items): (&str, Vec<(Option<usize>, Formula)>) = match &args.corpus {
        Some(path) => match load_corpus(path) {
            Ok(entries) => ("corpus", entries.into_iter().map(|e| (Some(e.line), e.formula)).collect()),
            Err(code) => return code,
        },
        None => {
            if args.max_vars == 0 || args.size == 0 {
                eprintln!("error: --max-vars and --size must be at least 1");
                return EXIT_INPUT;
            }
            let count = args.random.unwrap_or(2000);
            let items = (0..count as u64)
                .map(|k| (None, random_formula(seed.wrapping_add(k), args.max_vars, args.size)))
                .collect();
            ("random", items)
        }
    };

    let results: Vec<_> = items
        .par_iter()
        .map(|(line, f)| (*line, f, decide_oddmaxsat(f), reference_verdict(f)))
        .collect();
    let mismatches: Vec<_> = results.iter().filter(|(_, _, m, r)| m != r).collect();
    let checked = results.len();

    if json {
        let list: Vec<Value> = mismatches
            .iter()
            .map(|(line, f, m, r)| json!({ "line": line, "formula": f.serialize(), "machine": m, "reference": r }))
            .collect();
        print_json(&json!({
            "source": source,
            "seed": if source == "random" { json!(seed) } else { Value::Null },
            "checked": checked,
            "passed": checked - mismatches.len(),
            "mismatches": list,
        }));
    } else {
        if source == "random" {
            println!("seed {seed}");
        }
        for (line, f, m, r) in &mismatches {
            let at = line.map(|l| format!("line {l}: ")).unwrap_or_default();
            println!("mismatch {at}{f}: machine {m}, reference {r}");
        }
        println!(
            "checked {checked} formulas: {} passed, {} mismatches",
            checked - mismatches.len(),
            mismatches.len()
        );
    }
    if mismatches.is_empty() {
        EXIT_OK
    } else {
        EXIT_NEGATIVE
    }
}

fn report_line(report: &PositivityReport) -> String {
    let mode = match report.mode {
        posred_core::CheckMode::Exhaustive => "exhaustive".to_string(),
        posred_core::CheckMode::Sampled { seed, .. } => format!("sampled seed={seed}"),
    };
    let head = format!(
        "{} |U|={} pairs={} {mode}",
        report.formula, report.universe_size, report.pairs_checked
    );
    match report.counterexample() {
        None => format!("ok {head}"),
        Some(c) => format!(
            "violation {head}: accepts with S={:?}, rejects with T={:?}",
            c.lower_queries(),
            c.upper_queries()
        ),
    }
}

pub fn verify_positivity(args: &PositivityArgs, seed: u64, json: bool) -> u8 {
    let formulas: Vec<Formula> = match (&args.formula, &args.corpus) {
        (Some(text), _) => match parse_or_report(text) {
            Ok(f) => vec![f],
            Err(code) => return code,
        },
        (None, Some(path)) => match load_corpus(path) {
            Ok(entries) => entries.into_iter().map(|e| e.formula).collect(),
            Err(code) => return code,
        },
        (None, None) => unreachable!("clap requires a formula or --corpus"),
    };

    let checker = PositivityChecker::new(args.machine.into());
    let mut reports = Vec::with_capacity(formulas.len());
    for f in &formulas {
        let result = if args.exhaustive {
            checker.exhaustive(f)
        } else if let Some(samples) = args.samples {
            checker.sampled(f, samples, seed)
        } else {
            checker.auto(f, DEFAULT_SAMPLES, seed)
        };
        match result {
            Ok(report) => reports.push(report),
            Err(Error::BoundExceeded { what, size, bound }) => {
                eprintln!("error: {f}: {what} is {size}, above the bound of {bound}");
                if args.exhaustive {
                    eprintln!("hint: use --samples K for large query universes");
                }
                return EXIT_INPUT;
            }
            Err(e) => {
                eprintln!("error: {f}: {e}");
                return EXIT_INPUT;
            }
        }
    }

    if json {
        let values: Vec<Value> = reports.iter().map(PositivityReport::to_json).collect();
        match (&args.formula, values.as_slice()) {
            (Some(_), [single]) => print_json(single),
            _ => print_json(&Value::Array(values)),
        }
    } else {
        for r in &reports {
            println!("{}", report_line(r));
        }
    }
    if reports.iter().all(PositivityReport::is_ok) {
        EXIT_OK
    } else {
        EXIT_NEGATIVE
    }
}

pub fn tree(text: &str, json: bool) -> u8 {
    let formula = match parse_or_report(text) {
        Ok(f) => f,
        Err(code) => return code,
    };
    let tree = match posred_core::build_query_tree(&formula) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INPUT;
        }
    };
    let universe = tree.universe();
    if json {
        let mut value = serde_json::to_value(&tree).expect("tree serializes");
        value["queries"] = json!(universe.iter().map(QueryString::to_wire).collect::<Vec<_>>());
        print_json(&value);
    } else {
        print!("{}", tree.render_text());
        println!("queries ({}):", universe.len());
        for q in &universe {
            println!("  {q}");
        }
    }
    EXIT_OK
}

pub fn oracle(raw: &str, one_query: bool, json: bool) -> u8 {
    let query = QueryString::from_wire(raw).ok();
    let (answer, sat_call, calls) = match (&query, one_query) {
        (None, _) => (false, None, 0),
        (Some(q), false) => (sat_join_cosat(q), None, 0),
        (Some(q), true) => {
            let decider = OneQueryDecider::new();
            let outcome = decider.decide(q);
            (outcome.answer, outcome.sat_call, decider.sat_calls())
        }
    };
    if json {
        let mut value = json!({
            "query": raw,
            "body": query.as_ref().map(|q| q.body()),
            "tag": query.as_ref().map(|q| q.tag()),
            "answer": answer,
        });
        if one_query {
            value["satCalls"] = json!(calls);
            value["satCall"] = json!(sat_call);
        }
        print_json(&value);
    } else {
        println!("{}", if answer { "yes" } else { "no" });
        if one_query {
            match &sat_call {
                Some(call) => println!(
                    "sat calls: {calls} (is {} satisfiable? {})",
                    call.formula,
                    if call.satisfiable { "yes" } else { "no" }
                ),
                None => println!("sat calls: {calls} (body is not a formula)"),
            }
        }
    }
    if answer {
        EXIT_OK
    } else {
        EXIT_NEGATIVE
    }
}

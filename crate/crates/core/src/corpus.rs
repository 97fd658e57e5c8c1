//! Corpus files: one formula per line, `#` starts a comment line, blank
//! lines are skipped.

use crate::error::{Error, Result};
use crate::formula::Formula;

/// The hand-written corpus shipped with the crate.
pub const CURATED: &str = include_str!("../corpus/curated.txt");

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorpusEntry {
    /// 1-based line number in the source file.
    pub line: usize,
    pub formula: Formula,
}

/// Parses a corpus, failing on the first line that is not a formula.
pub fn parse_corpus(text: &str) -> Result<Vec<CorpusEntry>> {
    text.lines()
        .enumerate()
        .map(|(k, raw)| (k + 1, raw.trim()))
        .filter(|(_, line)| !line.is_empty() && !line.starts_with('#'))
        .map(|(line, body)| {
            Formula::parse(body)
                .map(|formula| CorpusEntry { line, formula })
                .map_err(|source| Error::Corpus { line, source })
        })
        .collect()
}

pub fn curated() -> Vec<CorpusEntry> {
    parse_corpus(CURATED).expect("curated corpus parses")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn skips_comments_and_blanks() {
        let entries = parse_corpus("# header\n\nx1\n  \n(x1&x2)\n").unwrap();
        assert_eq!(entries.len(), 2);
        assert_eq!(entries[0].line, 3);
        assert_eq!(entries[1].line, 5);
        assert_eq!(entries[1].formula.serialize(), "(x1&x2)");
    }

    #[test]
    fn names_the_offending_line() {
        let err = parse_corpus("x1\n# ok\nx0\n").unwrap_err();
        assert!(matches!(err, Error::Corpus { line: 3, .. }));
        assert!(err.to_string().starts_with("corpus line 3:"));
    }

    #[test]
    fn curated_corpus_coverage() {
        let entries = curated();
        assert!(entries.len() >= 50);
        let n = |e: &CorpusEntry| e.formula.num_vars();
        assert!(entries.iter().filter(|e| (3..=6).contains(&n(e))).count() >= 20);
        assert!(entries.iter().any(|e| n(e) <= 2));
        assert!(entries.iter().any(|e| !crate::sat::sat_dpll(&e.formula)));
        assert!(entries.iter().any(|e| !crate::sat::sat_dpll(&Formula::not(e.formula.clone()))));
        assert!(entries.iter().any(|e| (1..n(e)).any(|i| !e.formula.mentions(i))));
        assert!(entries.iter().any(|e| e.formula.depth() >= 10));
    }
}

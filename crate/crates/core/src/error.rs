use std::fmt;

use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnexpectedChar(char),
    UnexpectedEnd,
    TrailingInput,
    MissingVariableIndex,
    InvalidVariableIndex(String),
}

/// Formula syntax error; `position` is a byte offset into the input.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub struct ParseError {
    pub position: usize,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ParseErrorKind::UnexpectedChar(c) => {
                write!(f, "unexpected character {c:?} at position {}", self.position)
            }
            ParseErrorKind::UnexpectedEnd => write!(f, "unexpected end of input at position {}", self.position),
            ParseErrorKind::TrailingInput => write!(f, "trailing input at position {}", self.position),
            ParseErrorKind::MissingVariableIndex => {
                write!(f, "missing variable index at position {}", self.position)
            }
            ParseErrorKind::InvalidVariableIndex(digits) => write!(
                f,
                "invalid variable index x{digits} at position {} (indices start at 1, no leading zeros)",
                self.position
            ),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("assignment has {got} values but the formula needs {needed}")]
    AssignmentTooShort { needed: usize, got: usize },

    #[error("{what} is {size}, above the bound of {bound}")]
    BoundExceeded {
        what: &'static str,
        size: usize,
        bound: usize,
    },

    #[error("formula has no variables, so it has no last variable to be odd")]
    ConstantFormula,

    #[error("query string is empty or does not end in a '0'/'1' tag")]
    MalformedQuery,

    #[error("corpus line {line}: {source}")]
    Corpus { line: usize, source: ParseError },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

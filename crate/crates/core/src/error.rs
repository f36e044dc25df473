use alloc::vec::Vec;
use core::fmt;

use crate::dsl::ParseError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// No example pairs were supplied.
    EmptyInput,
    /// The candidate pool cannot cover these rows.
    IncompletePool { uncovered: Vec<usize> },
    /// Automatic example generation found no confident pairing.
    NoExamples,
    Parse(ParseError),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::EmptyInput => f.write_str("no example pairs given"),
            Error::IncompletePool { uncovered } => {
                write!(f, "candidate pool leaves {} row(s) uncovered", uncovered.len())?;
                if let Some(first) = uncovered.first() {
                    write!(f, " (first: row {first})")?;
                }
                Ok(())
            }
            Error::NoExamples => f.write_str("no example pairs cleared the similarity threshold"),
            Error::Parse(e) => fmt::Display::fmt(e, f),
        }
    }
}

impl core::error::Error for Error {}

impl From<ParseError> for Error {
    fn from(e: ParseError) -> Self {
        Error::Parse(e)
    }
}

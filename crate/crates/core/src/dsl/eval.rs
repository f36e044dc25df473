use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use super::{IndexKind, IndexRef, Transformation, Unit};

/// Why a unit produced no output on some input.
///
/// These are not program errors: a failing unit only means the variant it
/// belongs to does not apply to that input.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EvalError {
    OutOfRange,
    EmptyOutput,
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EvalError::OutOfRange => "index out of range",
            EvalError::EmptyOutput => "empty output",
        })
    }
}

/// Output of a single unit, borrowed from the input or from a literal.
pub(crate) enum Piece<'a> {
    Chars(&'a [char]),
    Text(&'a str),
}

impl Piece<'_> {
    pub(crate) fn to_owned_text(&self) -> String {
        match self {
            Piece::Chars(cs) => cs.iter().collect(),
            Piece::Text(s) => String::from(*s),
        }
    }

    fn push_to(&self, out: &mut String) {
        match self {
            Piece::Chars(cs) => out.extend(cs.iter()),
            Piece::Text(s) => out.push_str(s),
        }
    }

    /// If `target[pos..]` starts with this piece, returns the position after it.
    fn match_at(&self, target: &[char], pos: usize) -> Option<usize> {
        let rest = target.get(pos..)?;
        match self {
            Piece::Chars(cs) => rest.starts_with(cs).then(|| pos + cs.len()),
            Piece::Text(s) => {
                let mut n = 0;
                let mut it = rest.iter();
                for c in s.chars() {
                    if it.next() != Some(&c) {
                        return None;
                    }
                    n += 1;
                }
                Some(pos + n)
            }
        }
    }
}

/// An input cell prepared for repeated evaluation.
///
/// Characters are Unicode scalar values. Token boundaries are computed once
/// for every character that occurs in the text; splitting on any other
/// character yields the whole text as the single token.
#[derive(Clone, Debug)]
pub struct CellText {
    chars: Vec<char>,
    tokens: BTreeMap<char, Vec<(usize, usize)>>,
}

impl CellText {
    pub fn new(text: &str) -> Self {
        let chars: Vec<char> = text.chars().collect();
        let mut tokens: BTreeMap<char, Vec<(usize, usize)>> = BTreeMap::new();
        for &c in &chars {
            tokens.entry(c).or_insert_with(|| split_spans(&chars, c));
        }
        CellText { chars, tokens }
    }

    pub fn chars(&self) -> &[char] {
        &self.chars
    }

    /// Token spans `[begin, end)` when splitting on `sep`; empty tokens kept.
    /// Empty when `sep` does not occur.
    pub fn token_spans(&self, sep: char) -> &[(usize, usize)] {
        self.tokens.get(&sep).map(Vec::as_slice).unwrap_or(&[])
    }

    fn token(&self, sep: char, index: IndexRef) -> Result<&[char], EvalError> {
        let spans = self.token_spans(sep);
        if spans.is_empty() {
            // separator absent: the whole text is the only token
            let t = index.resolve(1, IndexKind::Token)?;
            debug_assert_eq!(t, 0);
            return Ok(&self.chars);
        }
        let t = index.resolve(spans.len(), IndexKind::Token)?;
        let (a, b) = spans[t];
        Ok(&self.chars[a..b])
    }

    pub(crate) fn eval<'a>(&'a self, unit: &'a Unit) -> Result<Piece<'a>, EvalError> {
        let chars = match *unit {
            Unit::Literal(ref s) => return Ok(Piece::Text(s)),
            Unit::Substr { start, end } => substring(&self.chars, start, end)?,
            Unit::Split { sep, token } => self.token(sep, token)?,
            Unit::SplitSubstr { sep, token, start, end } => {
                substring(self.token(sep, token)?, start, end)?
            }
        };
        if chars.is_empty() {
            return Err(EvalError::EmptyOutput);
        }
        Ok(Piece::Chars(chars))
    }

    /// Concatenated output of a concrete unit sequence, or `None` if a unit fails.
    pub fn eval_sequence(&self, units: &[Unit]) -> Option<String> {
        let mut out = String::new();
        for u in units {
            self.eval(u).ok()?.push_to(&mut out);
        }
        Some(out)
    }

    /// Whether `units` evaluates to exactly `target`, stopping at the first mismatch.
    pub fn sequence_produces<'u>(&self, units: impl IntoIterator<Item = &'u Unit>, target: &[char]) -> bool {
        let mut pos = 0;
        for u in units {
            let Ok(piece) = self.eval(u) else { return false };
            match piece.match_at(target, pos) {
                Some(p) => pos = p,
                None => return false,
            }
        }
        pos == target.len()
    }

    /// Whether any variant of `variants` evaluates to exactly `target`.
    pub fn produces(&self, variants: &[Vec<Unit>], target: &[char]) -> bool {
        variants.iter().any(|v| self.sequence_produces(v, target))
    }

    /// Shorthand for checking a whole transformation against one target.
    pub fn transformation_produces(&self, t: &Transformation, target: &str) -> bool {
        let target: Vec<char> = target.chars().collect();
        self.produces(&t.expand_variants(), &target)
    }
}

fn split_spans(chars: &[char], sep: char) -> Vec<(usize, usize)> {
    let mut spans = Vec::new();
    let mut begin = 0;
    for (i, &c) in chars.iter().enumerate() {
        if c == sep {
            spans.push((begin, i));
            begin = i + 1;
        }
    }
    spans.push((begin, chars.len()));
    spans
}

/// Characters `[start, min(end, L))`; the start must fall inside the text.
fn substring(chars: &[char], start: IndexRef, end: IndexRef) -> Result<&[char], EvalError> {
    let len = chars.len();
    let a = start.resolve(len, IndexKind::CharPos)?;
    let b = end.resolve(len, IndexKind::CharPos)?.min(len);
    if a >= len {
        return Err(EvalError::OutOfRange);
    }
    if a >= b {
        return Err(EvalError::EmptyOutput);
    }
    Ok(&chars[a..b])
}

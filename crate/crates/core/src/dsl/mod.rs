//! Transformation language: units, elements, evaluation and the textual form.
//!
//! A [`Transformation`] is an ordered list of [`Element`]s. Each element wraps
//! a single [`Unit`] or a parenthesized group of units, and may carry a
//! repetition factor (`^r`) and a removal flag (`^?`). Evaluating a
//! transformation yields a *set* of strings, one per concrete variant.

mod eval;
mod text;

use alloc::sync::Arc;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

pub use eval::{CellText, EvalError};
pub use text::ParseError;
pub(crate) use text::push_unit;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Anchor {
    Start,
    End,
}

/// Which kind of sequence an [`IndexRef`] is resolved against.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IndexKind {
    /// Character positions of a text of length `L`; `END-k` means `L-k`.
    CharPos,
    /// Indices into a token list of length `m`; `END-k` means `m-1-k`.
    Token,
}

/// An index measured from the start (`s+k`) or the end (`e-k`) of its input.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndexRef {
    pub anchor: Anchor,
    pub offset: usize,
}

impl IndexRef {
    pub const fn start(offset: usize) -> Self {
        IndexRef { anchor: Anchor::Start, offset }
    }

    pub const fn end(offset: usize) -> Self {
        IndexRef { anchor: Anchor::End, offset }
    }

    /// Resolves to an absolute position.
    ///
    /// Character positions only fail when an `END` offset reaches before the
    /// start of the text; range checks against `L` belong to the caller, since
    /// substring ends are clamped while starts are not. Token indices must land
    /// in `[0, m-1]`.
    pub fn resolve(self, length: usize, kind: IndexKind) -> Result<usize, EvalError> {
        match kind {
            IndexKind::CharPos => match self.anchor {
                Anchor::Start => Ok(self.offset),
                Anchor::End => length.checked_sub(self.offset).ok_or(EvalError::OutOfRange),
            },
            IndexKind::Token => {
                let last = length.checked_sub(1).ok_or(EvalError::OutOfRange)?;
                match self.anchor {
                    Anchor::Start if self.offset <= last => Ok(self.offset),
                    Anchor::Start => Err(EvalError::OutOfRange),
                    Anchor::End => last.checked_sub(self.offset).ok_or(EvalError::OutOfRange),
                }
            }
        }
    }

    /// Moves the index `by` positions toward the interior of its sequence.
    fn shifted(self, by: usize) -> Self {
        IndexRef { anchor: self.anchor, offset: self.offset + by }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Unit {
    /// Constant, non-empty text.
    Literal(Arc<str>),
    /// Characters `[start, min(end, L))` of the input.
    Substr { start: IndexRef, end: IndexRef },
    /// Token `token` after splitting on `sep`.
    Split { sep: char, token: IndexRef },
    /// `Substr` applied to token `token` after splitting on `sep`.
    SplitSubstr { sep: char, token: IndexRef, start: IndexRef, end: IndexRef },
}

impl Unit {
    pub fn literal(text: impl Into<Arc<str>>) -> Self {
        Unit::Literal(text.into())
    }

    pub const fn substr(start: IndexRef, end: IndexRef) -> Self {
        Unit::Substr { start, end }
    }

    pub const fn split(sep: char, token: IndexRef) -> Self {
        Unit::Split { sep, token }
    }

    pub const fn split_substr(sep: char, token: IndexRef, start: IndexRef, end: IndexRef) -> Self {
        Unit::SplitSubstr { sep, token, start, end }
    }

    pub fn is_literal(&self) -> bool {
        matches!(self, Unit::Literal(_))
    }

    /// Whether repetition can move this unit (it selects a token).
    pub fn is_shiftable(&self) -> bool {
        matches!(self, Unit::Split { .. } | Unit::SplitSubstr { .. })
    }

    pub fn param_count(&self) -> usize {
        match self {
            Unit::Literal(_) => 1,
            Unit::Substr { .. } | Unit::Split { .. } => 2,
            Unit::SplitSubstr { .. } => 4,
        }
    }

    /// Same unit with its token index moved `by` tokens inward.
    pub fn shifted(&self, by: usize) -> Unit {
        match *self {
            Unit::Split { sep, token } => Unit::Split { sep, token: token.shifted(by) },
            Unit::SplitSubstr { sep, token, start, end } => {
                Unit::SplitSubstr { sep, token: token.shifted(by), start, end }
            }
            _ => self.clone(),
        }
    }

    /// Applies the unit to `input`.
    pub fn apply(&self, input: &str) -> Result<String, EvalError> {
        let cell = CellText::new(input);
        cell.eval(self).map(|piece| piece.to_owned_text())
    }

    /// True when every index is `START`-anchored.
    pub fn is_start_anchored(&self) -> bool {
        let start = |i: &IndexRef| i.anchor == Anchor::Start;
        match self {
            Unit::Literal(_) => true,
            Unit::Substr { start: i, end: j } => start(i) && start(j),
            Unit::Split { token, .. } => start(token),
            Unit::SplitSubstr { token, start: i, end: j, .. } => start(token) && start(i) && start(j),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Body {
    Unit(Unit),
    /// Parenthesized units that repeat or disappear together.
    Group(Vec<Unit>),
}

impl Body {
    pub fn units(&self) -> &[Unit] {
        match self {
            Body::Unit(u) => core::slice::from_ref(u),
            Body::Group(us) => us,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Element {
    pub body: Body,
    /// Maximum number of shifted copies; 1 means no repetition.
    pub repetition: u32,
    /// Removal flag: the element may also be left out.
    pub optional: bool,
}

impl Element {
    pub fn unit(u: Unit) -> Self {
        Element { body: Body::Unit(u), repetition: 1, optional: false }
    }

    pub fn group(units: Vec<Unit>) -> Self {
        Element { body: Body::Group(units), repetition: 1, optional: false }
    }

    pub fn repeated(mut self, r: u32) -> Self {
        self.repetition = r;
        self
    }

    pub fn optional(mut self) -> Self {
        self.optional = true;
        self
    }

    pub fn units(&self) -> &[Unit] {
        self.body.units()
    }

    /// A bare unit with no annotations.
    pub fn is_plain(&self) -> bool {
        matches!(self.body, Body::Unit(_)) && self.repetition == 1 && !self.optional
    }

    pub fn is_literal(&self) -> bool {
        matches!(&self.body, Body::Unit(u) if u.is_literal())
    }

    fn validate(&self) -> Result<(), Malformed> {
        let units = self.units();
        if units.is_empty() {
            return Err(Malformed::EmptyGroup);
        }
        if units.iter().any(|u| matches!(u, Unit::Literal(s) if s.is_empty())) {
            return Err(Malformed::EmptyLiteral);
        }
        if self.repetition == 0 {
            return Err(Malformed::ZeroRepetition);
        }
        if self.repetition > 1 && !units.iter().any(Unit::is_shiftable) {
            return Err(Malformed::UnshiftableRepetition);
        }
        Ok(())
    }
}

/// Reasons a list of elements is not a valid [`Transformation`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Malformed {
    NoElements,
    AllOptional,
    EmptyGroup,
    EmptyLiteral,
    ZeroRepetition,
    UnshiftableRepetition,
}

impl fmt::Display for Malformed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Malformed::NoElements => "transformation has no elements",
            Malformed::AllOptional => "every element is optional",
            Malformed::EmptyGroup => "empty group",
            Malformed::EmptyLiteral => "empty literal",
            Malformed::ZeroRepetition => "repetition factor must be at least 1",
            Malformed::UnshiftableRepetition => "repetition needs a split or splitSubstr unit",
        })
    }
}

/// A well-formed, immutable sequence of elements.
///
/// Equality, ordering and hashing follow the canonical rendering, which
/// determines the elements exactly.
#[derive(Clone, Debug)]
pub struct Transformation {
    elements: Vec<Element>,
    /// Canonical textual form, computed once.
    text: String,
}

impl Transformation {
    pub fn new(elements: Vec<Element>) -> Result<Self, Malformed> {
        if elements.is_empty() {
            return Err(Malformed::NoElements);
        }
        if elements.iter().all(|e| e.optional) {
            return Err(Malformed::AllOptional);
        }
        for e in &elements {
            e.validate()?;
        }
        Ok(Self::from_valid(elements))
    }

    fn from_valid(elements: Vec<Element>) -> Self {
        let text = text::render_elements(&elements);
        Transformation { elements, text }
    }

    /// Valid elements whose rendering the caller already built.
    pub(crate) fn from_rendered(elements: Vec<Element>, text: String) -> Self {
        debug_assert!(!elements.is_empty());
        Transformation { elements, text }
    }

    /// Whether every element is a single unit without flags.
    pub fn is_plain(&self) -> bool {
        self.elements.iter().all(Element::is_plain)
    }

    /// Builds a transformation of plain units.
    pub fn from_units(units: Vec<Unit>) -> Result<Self, Malformed> {
        Self::new(units.into_iter().map(Element::unit).collect())
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn into_elements(self) -> Vec<Element> {
        self.elements
    }

    pub fn units(&self) -> impl Iterator<Item = &Unit> {
        self.elements.iter().flat_map(Element::units)
    }

    /// Number of non-literal units, counting each group member once.
    pub fn non_literal_units(&self) -> usize {
        self.units().filter(|u| !u.is_literal()).count()
    }

    pub fn is_start_anchored(&self) -> bool {
        self.units().all(Unit::is_start_anchored)
    }

    /// Copy with every repetition factor capped at `max`.
    pub fn with_repetition_capped(&self, max: u32) -> Transformation {
        let max = max.max(1);
        let elements = self
            .elements
            .iter()
            .map(|e| Element { repetition: e.repetition.min(max), ..e.clone() })
            .collect();
        Self::from_valid(elements)
    }

    /// Every concrete unit sequence this transformation stands for.
    ///
    /// An element with factor `r` contributes its body `k` times for each
    /// `k` in `1..=r`, copy `j` shifting token indices by `j`; an optional
    /// element may also contribute nothing. Element order is kept and
    /// duplicate sequences are dropped.
    pub fn expand_variants(&self) -> Vec<Vec<Unit>> {
        let mut variants: Vec<Vec<Unit>> = alloc::vec![Vec::new()];
        for element in &self.elements {
            let mut choices: Vec<Vec<Unit>> = Vec::new();
            if element.optional {
                choices.push(Vec::new());
            }
            for k in 1..=element.repetition as usize {
                let mut seq = Vec::new();
                for j in 0..k {
                    seq.extend(element.units().iter().map(|u| u.shifted(j)));
                }
                choices.push(seq);
            }
            let mut next = Vec::with_capacity(variants.len() * choices.len());
            for prefix in &variants {
                for choice in &choices {
                    let mut v = prefix.clone();
                    v.extend(choice.iter().cloned());
                    next.push(v);
                }
            }
            variants = next;
        }
        let mut seen = alloc::collections::BTreeSet::new();
        variants.retain(|v| seen.insert(v.clone()));
        variants
    }

    /// Evaluates every variant on `input` and collects the successful outputs.
    pub fn apply(&self, input: &str) -> alloc::collections::BTreeSet<String> {
        let cell = CellText::new(input);
        self.expand_variants()
            .iter()
            .filter_map(|v| cell.eval_sequence(v))
            .collect()
    }

    /// Canonical textual form.
    pub fn as_str(&self) -> &str {
        &self.text
    }

    /// Rendering of each element, borrowed from the canonical form.
    pub fn element_texts(&self) -> Vec<&str> {
        let mut out = Vec::with_capacity(self.elements.len());
        text::element_texts(&self.text, &self.elements, &mut out);
        out
    }

    /// Like [`Transformation::element_texts`], reusing `out`.
    pub(crate) fn element_texts_into<'a>(&'a self, out: &mut Vec<&'a str>) {
        text::element_texts(&self.text, &self.elements, out);
    }

    pub fn render(&self) -> String {
        self.text.clone()
    }
}

impl PartialEq for Transformation {
    fn eq(&self, other: &Self) -> bool {
        self.text == other.text
    }
}

impl Eq for Transformation {}

impl PartialOrd for Transformation {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Transformation {
    fn cmp(&self, other: &Self) -> core::cmp::Ordering {
        self.text.cmp(&other.text)
    }
}

impl core::hash::Hash for Transformation {
    fn hash<H: core::hash::Hasher>(&self, state: &mut H) {
        self.text.hash(state);
    }
}

impl core::borrow::Borrow<str> for Transformation {
    fn borrow(&self) -> &str {
        &self.text
    }
}

impl core::str::FromStr for Transformation {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        text::parse(s)
    }
}

impl core::str::FromStr for Element {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        text::parse_element(s)
    }
}

//! Canonical textual form of transformations.
//!
//! ```text
//! T      := "<" ELEM (", " ELEM)* ">"
//! ELEM   := ITEM REP? OPT?
//! ITEM   := UNIT | "(" UNIT (", " UNIT)* ")"
//! REP    := "^" INT                        (INT >= 2)
//! OPT    := "^?"
//! UNIT   := "literal('" ESCTEXT "')" | "substr(" IDX ", " IDX ")"
//!         | "split(" SEP ", " IDX ")" | "splitSubstr(" SEP ", " IDX ", " IDX ", " IDX ")"
//! IDX    := "s" | "e" | "s+" INT | "e-" INT   (INT >= 1)
//! SEP    := "'" ESCCHAR "'"
//! ```
//!
//! Inside quotes `'` and `\` are escaped with a backslash; everything else is
//! written verbatim. Rendering then parsing gives back the same value.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use super::{Anchor, Body, Element, IndexRef, Malformed, Transformation, Unit};

/// Syntax or well-formedness error; `position` counts characters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at {}: {}", self.position, self.message)
    }
}

impl core::error::Error for ParseError {}

fn push_int(out: &mut String, mut n: usize) {
    let mut digits = [0u8; 20];
    let mut i = digits.len();
    loop {
        i -= 1;
        digits[i] = b'0' + (n % 10) as u8;
        n /= 10;
        if n == 0 {
            break;
        }
    }
    for &d in &digits[i..] {
        out.push(char::from(d));
    }
}

fn push_index(out: &mut String, r: IndexRef) {
    out.push(match r.anchor {
        Anchor::Start => 's',
        Anchor::End => 'e',
    });
    if r.offset > 0 {
        out.push(match r.anchor {
            Anchor::Start => '+',
            Anchor::End => '-',
        });
        push_int(out, r.offset);
    }
}

fn push_escaped(out: &mut String, c: char) {
    if c == '\'' || c == '\\' {
        out.push('\\');
    }
    out.push(c);
}

fn push_sep(out: &mut String, sep: char) {
    out.push('\'');
    push_escaped(out, sep);
    out.push_str("', ");
}

pub(crate) fn push_unit(out: &mut String, u: &Unit) {
    match u {
        Unit::Literal(s) => {
            out.push_str("literal('");
            for c in s.chars() {
                push_escaped(out, c);
            }
            out.push_str("')");
        }
        Unit::Substr { start, end } => {
            out.push_str("substr(");
            push_index(out, *start);
            out.push_str(", ");
            push_index(out, *end);
            out.push(')');
        }
        Unit::Split { sep, token } => {
            out.push_str("split(");
            push_sep(out, *sep);
            push_index(out, *token);
            out.push(')');
        }
        Unit::SplitSubstr { sep, token, start, end } => {
            out.push_str("splitSubstr(");
            push_sep(out, *sep);
            push_index(out, *token);
            out.push_str(", ");
            push_index(out, *start);
            out.push_str(", ");
            push_index(out, *end);
            out.push(')');
        }
    }
}

fn push_element(out: &mut String, e: &Element) {
    match &e.body {
        Body::Unit(u) => push_unit(out, u),
        Body::Group(units) => {
            out.push('(');
            for (i, u) in units.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                push_unit(out, u);
            }
            out.push(')');
        }
    }
    if e.repetition > 1 {
        out.push('^');
        push_int(out, e.repetition as usize);
    }
    if e.optional {
        out.push_str("^?");
    }
}

pub(super) fn render_elements(elements: &[Element]) -> String {
    let mut out = String::with_capacity(32 * elements.len());
    out.push('<');
    for (i, e) in elements.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        push_element(&mut out, e);
    }
    out.push('>');
    out
}

fn int_len(mut n: usize) -> usize {
    let mut len = 1;
    while n >= 10 {
        n /= 10;
        len += 1;
    }
    len
}

fn index_len(r: IndexRef) -> usize {
    if r.offset == 0 {
        1
    } else {
        2 + int_len(r.offset)
    }
}

fn escaped_len(c: char) -> usize {
    c.len_utf8() + usize::from(c == '\'' || c == '\\')
}

/// Length in bytes of `push_unit`'s output.
fn unit_len(u: &Unit) -> usize {
    match u {
        Unit::Literal(s) => "literal('')".len() + s.chars().map(escaped_len).sum::<usize>(),
        Unit::Substr { start, end } => "substr(, )".len() + index_len(*start) + index_len(*end),
        Unit::Split { sep, token } => "split('', )".len() + escaped_len(*sep) + index_len(*token),
        Unit::SplitSubstr { sep, token, start, end } => {
            "splitSubstr('', , , )".len() + escaped_len(*sep) + index_len(*token) + index_len(*start) + index_len(*end)
        }
    }
}

/// Length in bytes of `push_element`'s output.
fn element_len(e: &Element) -> usize {
    let body = match &e.body {
        Body::Unit(u) => unit_len(u),
        Body::Group(units) => 2 + units.iter().map(unit_len).sum::<usize>() + 2 * (units.len() - 1),
    };
    let rep = if e.repetition > 1 { 1 + int_len(e.repetition as usize) } else { 0 };
    body + rep + if e.optional { 2 } else { 0 }
}

/// Slices of a canonical rendering, one per element of `elements`.
pub(super) fn element_texts<'a>(rendering: &'a str, elements: &[Element], out: &mut Vec<&'a str>) {
    let mut pos = 1;
    out.clear();
    for e in elements {
        let end = pos + element_len(e);
        out.push(&rendering[pos..end]);
        pos = end + 2;
    }
    debug_assert_eq!(pos, rendering.len() + 1);
}

impl fmt::Display for IndexRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        push_index(&mut out, *self);
        f.write_str(&out)
    }
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        push_unit(&mut out, self);
        f.write_str(&out)
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        push_element(&mut out, self);
        f.write_str(&out)
    }
}

impl fmt::Display for Transformation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub(super) fn parse(text: &str) -> Result<Transformation, ParseError> {
    let mut p = Parser { chars: text.chars().collect(), pos: 0 };
    let t = p.transformation()?;
    if p.pos != p.chars.len() {
        return Err(p.error("trailing input after '>'"));
    }
    Ok(t)
}

/// Parses a single `ELEM`, e.g. `(split(' ', s))^2^?`.
pub(super) fn parse_element(text: &str) -> Result<Element, ParseError> {
    let mut p = Parser { chars: text.chars().collect(), pos: 0 };
    let e = p.element()?;
    e.validate().map_err(|m| p.malformed(0, m))?;
    if p.pos != p.chars.len() {
        return Err(p.error("trailing input after element"));
    }
    Ok(e)
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn error(&self, message: &str) -> ParseError {
        self.error_at(self.pos, message)
    }

    fn error_at(&self, position: usize, message: &str) -> ParseError {
        ParseError { position, message: message.into() }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn looking_at(&self, s: &str) -> bool {
        (self.pos..).zip(s.chars()).all(|(i, c)| self.chars.get(i) == Some(&c))
    }

    fn eat(&mut self, s: &str) -> bool {
        if self.looking_at(s) {
            self.pos += s.chars().count();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> Result<(), ParseError> {
        if self.eat(s) {
            Ok(())
        } else {
            Err(self.error(&alloc::format!("expected \"{s}\"")))
        }
    }

    fn transformation(&mut self) -> Result<Transformation, ParseError> {
        self.expect("<")?;
        let mut elements = Vec::new();
        loop {
            let at = self.pos;
            let e = self.element()?;
            e.validate().map_err(|m| self.malformed(at, m))?;
            elements.push(e);
            if !self.eat(", ") {
                break;
            }
        }
        self.expect(">")?;
        Transformation::new(elements).map_err(|m| self.malformed(0, m))
    }

    fn malformed(&self, at: usize, m: Malformed) -> ParseError {
        self.error_at(at, &alloc::format!("{m}"))
    }

    fn element(&mut self) -> Result<Element, ParseError> {
        let body = if self.eat("(") {
            let mut units = alloc::vec![self.unit()?];
            while self.eat(", ") {
                units.push(self.unit()?);
            }
            self.expect(")")?;
            Body::Group(units)
        } else {
            Body::Unit(self.unit()?)
        };
        let mut element = Element { body, repetition: 1, optional: false };
        if self.looking_at("^") && !self.looking_at("^?") {
            self.pos += 1;
            let at = self.pos;
            let r = self.int()?;
            if r < 2 {
                return Err(self.error_at(at, "repetition factor must be at least 2"));
            }
            element.repetition =
                u32::try_from(r).map_err(|_| self.error_at(at, "repetition factor too large"))?;
        }
        if self.eat("^?") {
            element.optional = true;
        }
        Ok(element)
    }

    fn unit(&mut self) -> Result<Unit, ParseError> {
        if self.eat("literal('") {
            let mut text = String::new();
            loop {
                match self.peek() {
                    None => return Err(self.error("unterminated literal")),
                    Some('\'') => break,
                    Some(_) => text.push(self.escaped_char()?),
                }
            }
            self.expect("')")?;
            if text.is_empty() {
                return Err(self.error("empty literal"));
            }
            Ok(Unit::literal(text))
        } else if self.eat("substr(") {
            let start = self.index()?;
            self.expect(", ")?;
            let end = self.index()?;
            self.expect(")")?;
            Ok(Unit::Substr { start, end })
        } else if self.eat("splitSubstr(") {
            let sep = self.sep()?;
            self.expect(", ")?;
            let token = self.index()?;
            self.expect(", ")?;
            let start = self.index()?;
            self.expect(", ")?;
            let end = self.index()?;
            self.expect(")")?;
            Ok(Unit::SplitSubstr { sep, token, start, end })
        } else if self.eat("split(") {
            let sep = self.sep()?;
            self.expect(", ")?;
            let token = self.index()?;
            self.expect(")")?;
            Ok(Unit::Split { sep, token })
        } else {
            Err(self.error("expected a unit"))
        }
    }

    fn escaped_char(&mut self) -> Result<char, ParseError> {
        match self.peek() {
            Some('\\') => {
                self.pos += 1;
                match self.peek() {
                    Some(c @ ('\'' | '\\')) => {
                        self.pos += 1;
                        Ok(c)
                    }
                    _ => Err(self.error("only \\' and \\\\ escapes are allowed")),
                }
            }
            Some(c) => {
                self.pos += 1;
                Ok(c)
            }
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn sep(&mut self) -> Result<char, ParseError> {
        self.expect("'")?;
        if self.peek() == Some('\'') {
            return Err(self.error("empty separator"));
        }
        let c = self.escaped_char()?;
        self.expect("'")?;
        Ok(c)
    }

    fn index(&mut self) -> Result<IndexRef, ParseError> {
        let anchor = match self.peek() {
            Some('s') => Anchor::Start,
            Some('e') => Anchor::End,
            _ => return Err(self.error("expected index 's' or 'e'")),
        };
        self.pos += 1;
        let sign = match anchor {
            Anchor::Start => "+",
            Anchor::End => "-",
        };
        let offset = if self.eat(sign) {
            let at = self.pos;
            let k = self.int()?;
            if k == 0 {
                return Err(self.error_at(at, "zero offset is written as a bare anchor"));
            }
            k
        } else {
            0
        };
        Ok(IndexRef { anchor, offset })
    }

    fn int(&mut self) -> Result<usize, ParseError> {
        let start = self.pos;
        let mut value: usize = 0;
        while let Some(d) = self.peek().and_then(|c| c.to_digit(10)) {
            if self.pos > start && value == 0 {
                return Err(self.error_at(start, "leading zero"));
            }
            value = value
                .checked_mul(10)
                .and_then(|v| v.checked_add(d as usize))
                .ok_or_else(|| self.error_at(start, "integer overflow"))?;
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.error("expected an integer"));
        }
        Ok(value)
    }
}

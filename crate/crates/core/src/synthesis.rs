//! Candidate generation from individual example pairs.
//!
//! The target of a pair is segmented into *skeletons*: placeholder slots,
//! each a stretch of target text that also occurs in the source, and literal
//! slots for the gaps. Every placeholder slot is then filled with each unit
//! that reproduces its text from the source, and the cross product of those
//! choices gives the candidate transformations for the pair.

use alloc::collections::{BTreeMap, BinaryHeap};
use alloc::rc::Rc;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use unicode_general_category::{get_general_category, GeneralCategory};

use crate::dsl::{push_unit, CellText, Element, IndexRef, Transformation, Unit};
use crate::{Error, Pool, Result};

/// One `(source, target)` example row.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExamplePair {
    pub row_id: usize,
    pub source: String,
    pub target: String,
}

impl ExamplePair {
    pub fn new(row_id: usize, source: impl Into<String>, target: impl Into<String>) -> Self {
        ExamplePair { row_id, source: source.into(), target: target.into() }
    }

    /// The same row with source and target swapped.
    pub fn reversed(&self) -> Self {
        ExamplePair { row_id: self.row_id, source: self.target.clone(), target: self.source.clone() }
    }
}

/// Half-open character range `[start, end)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub const fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub const fn len(self) -> usize {
        self.end - self.start
    }

    pub const fn is_empty(self) -> bool {
        self.end <= self.start
    }
}

/// Target text that also occurs in the source.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Placeholder {
    pub text: String,
    pub target_span: Span,
    /// Every occurrence of `text` in the source.
    pub source_positions: Vec<Span>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Slot {
    Placeholder(Placeholder),
    Literal(String),
}

impl Slot {
    pub fn text(&self) -> &str {
        match self {
            Slot::Placeholder(p) => &p.text,
            Slot::Literal(s) => s,
        }
    }
}

/// A segmentation of a target into placeholder and literal slots.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Skeleton {
    pub slots: Vec<Slot>,
}

impl Skeleton {
    pub fn placeholder_count(&self) -> usize {
        self.slots.iter().filter(|s| matches!(s, Slot::Placeholder(_))).count()
    }

    /// Total characters of the target covered by placeholders.
    pub fn placeholder_len(&self) -> usize {
        self.slots
            .iter()
            .map(|s| match s {
                Slot::Placeholder(p) => p.target_span.len(),
                Slot::Literal(_) => 0,
            })
            .sum()
    }

    /// Concatenated slot texts; always equals the target.
    pub fn text(&self) -> String {
        self.slots.iter().map(Slot::text).collect()
    }
}

/// Which index anchors unit enumeration may use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AnchorSet {
    /// Absolute indices only: every index is `s+k`.
    StartOnly,
    /// Both `s+k` and `e-k` forms.
    Both,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SynthConfig {
    /// Maximum non-literal units per transformation.
    pub max_units: usize,
    /// Shortest placeholder length in characters.
    pub min_len: usize,
    /// Skeletons kept per pair.
    pub skeleton_cap: usize,
    /// Candidates kept per dataset, not counting literal fallbacks.
    pub max_pool: usize,
    pub anchors: AnchorSet,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            max_units: 3,
            min_len: 1,
            skeleton_cap: 10_000,
            max_pool: 100_000,
            anchors: AnchorSet::Both,
        }
    }
}

/// Whether `c` may act as a split separator.
pub fn is_separator(c: char) -> bool {
    use GeneralCategory::*;
    c.is_whitespace()
        || matches!(
            get_general_category(c),
            ConnectorPunctuation
                | DashPunctuation
                | OpenPunctuation
                | ClosePunctuation
                | InitialPunctuation
                | FinalPunctuation
                | OtherPunctuation
        )
}

/// `runs[i][k]`: length of the longest common run starting at target `i`
/// and source `k`.
struct CommonRuns {
    source: Vec<char>,
    target: Vec<char>,
    runs: Vec<Vec<u32>>,
    longest: Vec<usize>,
}

impl CommonRuns {
    fn new(source: &str, target: &str) -> Self {
        let source: Vec<char> = source.chars().collect();
        let target: Vec<char> = target.chars().collect();
        let (n, m) = (target.len(), source.len());
        let mut runs = vec![vec![0u32; m + 1]; n + 1];
        for i in (0..n).rev() {
            for k in (0..m).rev() {
                if target[i] == source[k] {
                    runs[i][k] = runs[i + 1][k + 1] + 1;
                }
            }
        }
        let longest = (0..n)
            .map(|i| runs[i].iter().copied().max().unwrap_or(0) as usize)
            .collect();
        CommonRuns { source, target, runs, longest }
    }

    fn occurrences(&self, span: Span) -> Vec<Span> {
        let len = span.len();
        (0..self.source.len())
            .filter(|&k| self.runs[span.start][k] as usize >= len)
            .map(|k| Span::new(k, k + len))
            .collect()
    }

    fn placeholder(&self, span: Span) -> Placeholder {
        Placeholder {
            text: self.target[span.start..span.end].iter().collect(),
            target_span: span,
            source_positions: self.occurrences(span),
        }
    }
}

/// Maximal stretches of the target that occur in the source.
///
/// A stretch is maximal when it cannot be extended left or right and still
/// occur in the source. Results are ordered by target position, longest first.
pub fn find_placeholders(pair: &ExamplePair, min_len: usize) -> Vec<Placeholder> {
    let runs = CommonRuns::new(&pair.source, &pair.target);
    maximal_placeholders(&runs, min_len.max(1))
}

fn maximal_placeholders(runs: &CommonRuns, min_len: usize) -> Vec<Placeholder> {
    let mut out = Vec::new();
    for i in 0..runs.target.len() {
        let len = runs.longest[i];
        if len < min_len {
            continue;
        }
        let left_extends = i > 0 && runs.runs[i - 1].iter().any(|&r| r as usize > len);
        if !left_extends {
            out.push(runs.placeholder(Span::new(i, i + len)));
        }
    }
    out.sort_by(|a, b| {
        a.target_span
            .start
            .cmp(&b.target_span.start)
            .then(b.target_span.len().cmp(&a.target_span.len()))
    });
    out
}

/// Ranking of a segmentation; `Ord` puts better segmentations first.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Ranked {
    covered: usize,
    slots: usize,
    spans: Vec<Span>,
}

impl Ord for Ranked {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .covered
            .cmp(&self.covered)
            .then(self.slots.cmp(&other.slots))
            .then_with(|| self.spans.cmp(&other.spans))
    }
}

impl PartialOrd for Ranked {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn slot_count(spans: &[Span], target_len: usize) -> usize {
    let mut slots = spans.len();
    let mut pos = 0;
    for s in spans {
        if s.start > pos {
            slots += 1;
        }
        pos = s.end;
    }
    if pos < target_len {
        slots += 1;
    }
    slots
}

/// Branch-and-bound search for the best `cap` segmentations.
struct SkeletonSearch {
    /// Candidate placeholder spans starting at each target position, longest first.
    spans_from: Vec<Vec<Span>>,
    /// Number of target positions `>= i` that some placeholder can cover.
    coverable_after: Vec<usize>,
    target_len: usize,
    max_placeholders: usize,
    cap: usize,
    /// Max-heap: the worst kept segmentation is on top.
    kept: BinaryHeap<Ranked>,
}

impl SkeletonSearch {
    fn worst_covered(&self) -> Option<usize> {
        if self.kept.len() < self.cap {
            None
        } else {
            self.kept.peek().map(|r| r.covered)
        }
    }

    fn offer(&mut self, spans: &[Span], covered: usize) {
        let ranked = Ranked { covered, slots: slot_count(spans, self.target_len), spans: spans.to_vec() };
        if self.kept.len() < self.cap {
            self.kept.push(ranked);
        } else if self.kept.peek().is_some_and(|worst| ranked < *worst) {
            self.kept.pop();
            self.kept.push(ranked);
        }
    }

    fn search(&mut self, pos: usize, chosen: &mut Vec<Span>, covered: usize) {
        self.offer(chosen, covered);
        if chosen.len() == self.max_placeholders {
            return;
        }
        for start in pos..self.target_len {
            if self.worst_covered().is_some_and(|w| covered + self.coverable_after[start] < w) {
                break;
            }
            for idx in 0..self.spans_from[start].len() {
                let span = self.spans_from[start][idx];
                let next = covered + span.len();
                if self.worst_covered().is_some_and(|w| next + self.coverable_after[span.end] < w) {
                    continue;
                }
                chosen.push(span);
                self.search(span.end, chosen, next);
                chosen.pop();
            }
        }
    }
}

/// Segmentations of the target into at most `max_placeholders` placeholder
/// slots (any stretch inside a placeholder of at least `min_len` characters)
/// with literal slots for the gaps.
///
/// When more than `cap` exist, those covering the most target characters
/// with placeholders are kept; ties prefer fewer slots, then the
/// lexicographically smaller list of spans. Output is best first.
pub fn build_skeletons(
    pair: &ExamplePair,
    placeholders: &[Placeholder],
    max_placeholders: usize,
    cap: usize,
    min_len: usize,
) -> Vec<Skeleton> {
    let runs = CommonRuns::new(&pair.source, &pair.target);
    skeletons_with(&runs, placeholders, max_placeholders, cap, min_len.max(1))
}

fn skeletons_with(
    runs: &CommonRuns,
    placeholders: &[Placeholder],
    max_placeholders: usize,
    cap: usize,
    min_len: usize,
) -> Vec<Skeleton> {
    let n = runs.target.len();
    let mut spans_from: Vec<Vec<Span>> = vec![Vec::new(); n];
    let mut coverable = vec![false; n];
    for ph in placeholders {
        let Span { start, end } = ph.target_span;
        for a in start..end {
            coverable[a] = true;
            for b in (a + min_len)..=end {
                spans_from[a].push(Span::new(a, b));
            }
        }
    }
    for spans in &mut spans_from {
        spans.sort_by_key(|s| core::cmp::Reverse(s.end));
        spans.dedup();
    }
    let mut coverable_after = vec![0; n + 1];
    for i in (0..n).rev() {
        coverable_after[i] = coverable_after[i + 1] + usize::from(coverable[i]);
    }

    let mut search = SkeletonSearch {
        spans_from,
        coverable_after,
        target_len: n,
        max_placeholders,
        cap: cap.max(1),
        kept: BinaryHeap::new(),
    };
    search.search(0, &mut Vec::new(), 0);

    let ranked = search.kept.into_sorted_vec();
    ranked
        .into_iter()
        .map(|r| {
            let mut slots = Vec::with_capacity(r.slots);
            let mut pos = 0;
            for span in r.spans {
                if span.start > pos {
                    slots.push(Slot::Literal(runs.target[pos..span.start].iter().collect()));
                }
                slots.push(Slot::Placeholder(runs.placeholder(span)));
                pos = span.end;
            }
            if pos < n {
                slots.push(Slot::Literal(runs.target[pos..].iter().collect()));
            }
            Skeleton { slots }
        })
        .collect()
}

fn char_refs(pos: usize, len: usize, anchors: AnchorSet) -> impl Iterator<Item = IndexRef> {
    let end = match anchors {
        AnchorSet::Both => Some(IndexRef::end(len - pos)),
        AnchorSet::StartOnly => None,
    };
    core::iter::once(IndexRef::start(pos)).chain(end)
}

fn token_refs(k: usize, count: usize, anchors: AnchorSet) -> impl Iterator<Item = IndexRef> {
    let end = match anchors {
        AnchorSet::Both => Some(IndexRef::end(count - 1 - k)),
        AnchorSet::StartOnly => None,
    };
    core::iter::once(IndexRef::start(k)).chain(end)
}

/// Every unit that copies the placeholder text out of `source`.
///
/// For each occurrence `[a, b)`: `substr` over all anchor combinations;
/// for each separator present in the source, `split` when a token equals
/// the occurrence and `splitSubstr` when the occurrence lies inside a token.
/// Sorted by rendering, without duplicates.
pub fn enumerate_units(source: &str, ph: &Placeholder, anchors: AnchorSet) -> Vec<Unit> {
    let cell = CellText::new(source);
    let len = cell.chars().len();
    let mut seps: Vec<char> = cell.chars().iter().copied().filter(|&c| is_separator(c)).collect();
    seps.sort_unstable();
    seps.dedup();

    let mut out: BTreeMap<String, Unit> = BTreeMap::new();
    let mut add = |u: Unit| {
        out.entry(alloc::format!("{u}")).or_insert(u);
    };
    for occ in &ph.source_positions {
        for i in char_refs(occ.start, len, anchors) {
            for j in char_refs(occ.end, len, anchors) {
                add(Unit::substr(i, j));
            }
        }
        for &sep in &seps {
            let tokens = cell.token_spans(sep);
            let count = tokens.len();
            for (k, &(ta, tb)) in tokens.iter().enumerate() {
                if !(ta <= occ.start && occ.end <= tb) {
                    continue;
                }
                let token_len = tb - ta;
                for t in token_refs(k, count, anchors) {
                    if (ta, tb) == (occ.start, occ.end) {
                        add(Unit::split(sep, t));
                    }
                    for i in char_refs(occ.start - ta, token_len, anchors) {
                        for j in char_refs(occ.end - ta, token_len, anchors) {
                            add(Unit::split_substr(sep, t, i, j));
                        }
                    }
                }
            }
        }
    }
    out.into_values().collect()
}

/// Candidate key for the pool cap, smaller is better: slot count minus
/// placeholder length, then fewer slots; rendering breaks remaining ties.
///
/// A one-character placeholder thus gains nothing over literal text, and
/// keys compare fairly between pairs whose targets differ in length.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct CandidateKey {
    net_cost: isize,
    slots: usize,
}

impl CandidateKey {
    fn of(skeleton: &Skeleton) -> Self {
        let slots = skeleton.slots.len();
        CandidateKey { net_cost: slots as isize - skeleton.placeholder_len() as isize, slots }
    }
}

fn rendered(u: Unit) -> (Unit, String) {
    let mut text = String::new();
    push_unit(&mut text, &u);
    (u, text)
}

/// Rendered unit choices for each slot of one skeleton.
type SlotChoices = Vec<Rc<Vec<(Unit, String)>>>;

/// The skeletons of one pair with their keys and unit choices. Skeletons
/// with a placeholder that no unit reproduces are dropped.
fn pair_plan(pair: &ExamplePair, cfg: &SynthConfig) -> Vec<(CandidateKey, SlotChoices)> {
    let runs = CommonRuns::new(&pair.source, &pair.target);
    let min_len = cfg.min_len.max(1);
    let placeholders = maximal_placeholders(&runs, min_len);
    let skeletons = skeletons_with(&runs, &placeholders, cfg.max_units, cfg.skeleton_cap, min_len);

    let mut unit_cache: BTreeMap<String, Rc<Vec<(Unit, String)>>> = BTreeMap::new();
    let mut plan = Vec::with_capacity(skeletons.len());
    for skeleton in &skeletons {
        let choices: SlotChoices = skeleton
            .slots
            .iter()
            .map(|slot| match slot {
                Slot::Literal(s) => Rc::new(vec![rendered(Unit::literal(s.clone()))]),
                Slot::Placeholder(ph) => match unit_cache.get(ph.text.as_str()) {
                    Some(units) => units.clone(),
                    None => {
                        let units = enumerate_units(&pair.source, ph, cfg.anchors);
                        let units = Rc::new(units.into_iter().map(rendered).collect::<Vec<_>>());
                        unit_cache.insert(ph.text.clone(), units.clone());
                        units
                    }
                },
            })
            .collect();
        if choices.iter().all(|c| !c.is_empty()) {
            plan.push((CandidateKey::of(skeleton), choices));
        }
    }
    plan
}

/// Calls `emit` with the rendering and elements of every combination of choices.
fn for_each_combination(choices: &SlotChoices, mut emit: impl FnMut(&str, &dyn Fn() -> Vec<Element>)) {
    let mut pick = vec![0usize; choices.len()];
    let mut text = String::new();
    loop {
        let parts = || pick.iter().zip(choices).map(|(&i, c)| &c[i]);
        text.clear();
        text.push('<');
        for (n, (_, r)) in parts().enumerate() {
            if n > 0 {
                text.push_str(", ");
            }
            text.push_str(r);
        }
        text.push('>');
        emit(&text, &|| parts().map(|(u, _)| Element::unit(u.clone())).collect());
        let mut slot = pick.len();
        loop {
            if slot == 0 {
                return;
            }
            slot -= 1;
            pick[slot] += 1;
            if pick[slot] < choices[slot].len() {
                break;
            }
            pick[slot] = 0;
        }
    }
}

/// Literal-only transformation producing the target.
pub fn literal_fallback(pair: &ExamplePair) -> Transformation {
    Transformation::new(vec![Element::unit(Unit::literal(pair.target.clone()))])
        .expect("example targets are non-empty")
}

/// Candidate pool for a dataset of example pairs.
///
/// Skeletons of all pairs are expanded in order of their key, and expansion
/// stops once `max_pool` distinct renderings are held and the current key
/// is exhausted. Of the last key only the lexicographically smallest
/// renderings are kept. Each pair's literal fallback is always added so
/// every pair is covered.
pub fn synthesize(pairs: &[ExamplePair], cfg: &SynthConfig) -> Result<Pool> {
    if pairs.is_empty() {
        return Err(Error::EmptyInput);
    }
    let plans: Vec<Vec<(CandidateKey, SlotChoices)>> =
        pairs.iter().filter(|p| !p.target.is_empty()).map(|p| pair_plan(p, cfg)).collect();
    let mut order: Vec<(CandidateKey, usize, usize)> = plans
        .iter()
        .enumerate()
        .flat_map(|(p, plan)| plan.iter().enumerate().map(move |(s, (key, _))| (*key, p, s)))
        .collect();
    order.sort_unstable();

    let mut pool = Pool::with_capacity(cfg.max_pool.min(1 << 20));
    let mut next = 0;
    let mut last_key_from = 0;
    while next < order.len() && pool.len() < cfg.max_pool {
        let key = order[next].0;
        last_key_from = pool.len();
        while next < order.len() && order[next].0 == key {
            let (_, p, s) = order[next];
            for_each_combination(&plans[p][s].1, |text, elements| {
                pool.insert_with(text, || Transformation::from_rendered(elements(), String::from(text)));
            });
            next += 1;
        }
    }
    if pool.len() > cfg.max_pool {
        pool.sort_tail_and_truncate(last_key_from, cfg.max_pool);
    }
    for pair in pairs.iter().filter(|p| !p.target.is_empty()) {
        pool.insert(literal_fallback(pair));
    }
    Ok(pool)
}

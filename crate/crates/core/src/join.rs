//! Example acquisition, joining with selected transformations, and scoring.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;

use hashbrown::HashMap;

use crate::dsl::{CellText, Unit};
use crate::select::CoverageReport;
use crate::{Error, ExamplePair, Result};

/// One cell of a column, tagged with its row.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cell {
    pub row_id: usize,
    pub text: String,
}

impl Cell {
    pub fn new(row_id: usize, text: impl Into<String>) -> Self {
        Cell { row_id, text: text.into() }
    }
}

/// Cells numbered by position.
pub fn column<S: Into<String>>(texts: impl IntoIterator<Item = S>) -> Vec<Cell> {
    texts.into_iter().enumerate().map(|(i, t)| Cell::new(i, t)).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct JoinConfig {
    /// Selected transformations covering a smaller fraction of the examples are not used.
    pub min_support: f64,
    /// Repetition factors are capped at this value when joining.
    pub join_rep_degree: u32,
    pub max_units: usize,
    pub r_max: u32,
}

impl Default for JoinConfig {
    fn default() -> Self {
        JoinConfig { min_support: 0.05, join_rep_degree: 1, max_units: 3, r_max: 2 }
    }
}

/// Default minimum trigram containment for automatically paired cells.
pub const DEFAULT_AUTO_THRESHOLD: f64 = 0.5;

/// Distinct character trigrams; a text shorter than three characters is its own gram.
fn trigrams(text: &str) -> BTreeSet<String> {
    let chars: Vec<char> = text.chars().collect();
    if chars.len() < 3 {
        return if chars.is_empty() { BTreeSet::new() } else { BTreeSet::from([String::from(text)]) };
    }
    chars.windows(3).map(|w| w.iter().collect()).collect()
}

/// Shared trigrams divided by the trigram count of the cell with fewer.
pub fn trigram_containment(a: &str, b: &str) -> f64 {
    let (ta, tb) = (trigrams(a), trigrams(b));
    let smaller = ta.len().min(tb.len());
    if smaller == 0 {
        return 0.0;
    }
    ta.intersection(&tb).count() as f64 / smaller as f64
}

/// Pairs source cells with their most similar target cell.
///
/// Each source cell is paired with the target cell of highest trigram
/// containment, provided the score reaches `threshold` and no other target
/// cell reaches the same score. The `quota` best pairs are returned, higher
/// score first and lower source row on ties; `row_id` is the source row.
pub fn generate_examples_auto(
    source: &[Cell],
    target: &[Cell],
    quota: usize,
    threshold: f64,
) -> Result<Vec<ExamplePair>> {
    if source.is_empty() || target.is_empty() {
        return Err(Error::EmptyInput);
    }
    let target_grams: Vec<BTreeSet<String>> = target.iter().map(|c| trigrams(&c.text)).collect();
    let mut postings: HashMap<&str, Vec<usize>> = HashMap::new();
    for (j, grams) in target_grams.iter().enumerate() {
        for g in grams {
            postings.entry(g.as_str()).or_default().push(j);
        }
    }

    let mut found: Vec<(f64, &Cell, &Cell)> = Vec::new();
    for s in source {
        let grams = trigrams(&s.text);
        let mut shared: BTreeMap<usize, usize> = BTreeMap::new();
        for g in &grams {
            for &j in postings.get(g.as_str()).map(Vec::as_slice).unwrap_or(&[]) {
                *shared.entry(j).or_default() += 1;
            }
        }
        let mut best: Option<(f64, usize)> = None;
        let mut unique = false;
        for (&j, &n) in &shared {
            let score = n as f64 / grams.len().min(target_grams[j].len()) as f64;
            match best.map(|(b, _)| score.partial_cmp(&b)) {
                None | Some(Some(Ordering::Greater)) => {
                    best = Some((score, j));
                    unique = true;
                }
                Some(Some(Ordering::Equal)) => unique = false,
                _ => {}
            }
        }
        if let Some((score, j)) = best {
            if unique && score >= threshold {
                found.push((score, s, &target[j]));
            }
        }
    }
    if found.is_empty() {
        return Err(Error::NoExamples);
    }
    found.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.row_id.cmp(&b.1.row_id)));
    found.truncate(quota);
    Ok(found.into_iter().map(|(_, s, t)| ExamplePair::new(s.row_id, s.text.clone(), t.text.clone())).collect())
}

/// A source row joined to a target row by a transformation.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Match {
    pub source_row: usize,
    pub target_row: usize,
    /// Rendering of the transformation that produced the match.
    pub transformation: String,
}

/// Selected transformations prepared for joining against a target column.
///
/// Rows are independent, so [`JoinPlan::matches_for`] may be called from
/// several threads at once.
pub struct JoinPlan<'a> {
    transformations: Vec<(String, Vec<Vec<Unit>>)>,
    index: HashMap<&'a str, Vec<usize>>,
}

impl<'a> JoinPlan<'a> {
    /// Keeps transformations with coverage at least `min_support`, in
    /// selection order, with repetition capped at `join_rep_degree`.
    pub fn new(selected: &[CoverageReport], target: &'a [Cell], cfg: &JoinConfig) -> Self {
        let transformations = selected
            .iter()
            .filter(|r| r.coverage >= cfg.min_support)
            .map(|r| {
                let t = r.transformation.with_repetition_capped(cfg.join_rep_degree);
                (r.transformation.render(), t.expand_variants())
            })
            .collect();
        let mut index: HashMap<&str, Vec<usize>> = HashMap::new();
        for c in target {
            index.entry(c.text.as_str()).or_default().push(c.row_id);
        }
        JoinPlan { transformations, index }
    }

    /// Number of transformations that passed the support filter.
    pub fn len(&self) -> usize {
        self.transformations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transformations.is_empty()
    }

    /// Matches of one source cell; each target row appears once, credited to
    /// the earliest selected transformation reaching it.
    pub fn matches_for(&self, cell: &Cell) -> Vec<Match> {
        let text = CellText::new(&cell.text);
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for (rendering, variants) in &self.transformations {
            let outputs: BTreeSet<String> = variants.iter().filter_map(|v| text.eval_sequence(v)).collect();
            for output in &outputs {
                for &target_row in self.index.get(output.as_str()).map(Vec::as_slice).unwrap_or(&[]) {
                    if seen.insert(target_row) {
                        out.push(Match { source_row: cell.row_id, target_row, transformation: rendering.clone() });
                    }
                }
            }
        }
        out
    }
}

/// Joins every source cell to the target cells that a selected
/// transformation maps it onto exactly.
pub fn execute_join(selected: &[CoverageReport], source: &[Cell], target: &[Cell], cfg: &JoinConfig) -> Vec<Match> {
    let plan = JoinPlan::new(selected, target, cfg);
    source.iter().flat_map(|c| plan.matches_for(c)).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct JoinResult {
    pub matches: Vec<Match>,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Precision, recall and F1 of `matches` against `(source_row, target_row)` truth.
///
/// With no matches precision is 1; with empty truth recall is 1.
pub fn score_join(matches: Vec<Match>, truth: &BTreeSet<(usize, usize)>) -> JoinResult {
    let emitted: BTreeSet<(usize, usize)> = matches.iter().map(|m| (m.source_row, m.target_row)).collect();
    let correct = emitted.intersection(truth).count();
    let precision = if emitted.is_empty() { 1.0 } else { correct as f64 / emitted.len() as f64 };
    let recall = if truth.is_empty() { 1.0 } else { correct as f64 / truth.len() as f64 };
    let f1 = if precision + recall > 0.0 { 2.0 * precision * recall / (precision + recall) } else { 0.0 };
    JoinResult { matches, precision, recall, f1 }
}

//! Coverage, greedy covering-set selection and source/target direction.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::cell::OnceCell;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dsl::{CellText, Transformation};
use crate::generalize::{simplicity, SimplicityScore};
use crate::pipeline::{self, PipelineConfig};
use crate::rowset::RowSet;
use crate::{Error, ExamplePair, Pool, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct CoverageReport {
    pub transformation: Transformation,
    pub covered_rows: BTreeSet<usize>,
    /// `covered_rows.len() / pairs.len()`.
    pub coverage: f64,
}

/// One step of a greedy cover.
#[derive(Clone, Debug, PartialEq)]
pub struct Selection {
    pub report: CoverageReport,
    /// Rows first covered by this step.
    pub newly_covered: BTreeSet<usize>,
}

/// How greedy selection breaks ties between equally useful candidates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TieBreak {
    /// Prefer the simpler candidate.
    Simplicity,
    /// Pick uniformly at random with the given seed.
    Random(u64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    Forward,
    Reverse,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Direction {
    pub value: Orientation,
    pub forward_set_size: usize,
    pub reverse_set_size: usize,
}

/// Example pairs prepared once for evaluating many candidates.
pub struct PreparedPairs {
    cells: Vec<CellText>,
    targets: Vec<Vec<char>>,
    row_ids: Vec<usize>,
}

impl PreparedPairs {
    pub fn new(pairs: &[ExamplePair]) -> Self {
        PreparedPairs {
            cells: pairs.iter().map(|p| CellText::new(&p.source)).collect(),
            targets: pairs.iter().map(|p| p.target.chars().collect()).collect(),
            row_ids: pairs.iter().map(|p| p.row_id).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    fn covered(&self, t: &Transformation) -> RowSet {
        let mut set = RowSet::empty(self.len());
        let rows = self.cells.iter().zip(&self.targets).enumerate();
        if t.is_plain() {
            for (i, (cell, target)) in rows {
                if cell.sequence_produces(t.units(), target) {
                    set.insert(i);
                }
            }
        } else {
            let variants = t.expand_variants();
            for (i, (cell, target)) in rows {
                if cell.produces(&variants, target) {
                    set.insert(i);
                }
            }
        }
        set
    }

    fn report(&self, t: &Transformation, set: &RowSet) -> CoverageReport {
        CoverageReport {
            transformation: t.clone(),
            covered_rows: self.row_ids_of(set),
            coverage: fraction(set.count(), self.len()),
        }
    }

    fn row_ids_of(&self, set: &RowSet) -> BTreeSet<usize> {
        set.iter().map(|i| self.row_ids[i]).collect()
    }
}

fn fraction(n: usize, d: usize) -> f64 {
    if d == 0 {
        0.0
    } else {
        n as f64 / d as f64
    }
}

/// Rows whose target is among the outputs of `t` on their source.
pub fn coverage(t: &Transformation, pairs: &[ExamplePair]) -> CoverageReport {
    let prepared = PreparedPairs::new(pairs);
    let set = prepared.covered(t);
    prepared.report(t, &set)
}

/// Highest single-candidate coverage in the pool.
pub fn best_coverage(pool: &Pool, pairs: &[ExamplePair]) -> f64 {
    let prepared = PreparedPairs::new(pairs);
    let best = pool.iter().map(|t| prepared.covered(t).count()).max().unwrap_or(0);
    fraction(best, prepared.len())
}

/// Greedy set cover of `pairs` by candidates from `pool`.
///
/// Each step takes the candidate covering the most rows not yet covered,
/// with ties broken per `tie_break`. Stops once every row is covered.
pub fn greedy_cover(pool: &Pool, pairs: &[ExamplePair], tie_break: TieBreak) -> Result<Vec<Selection>> {
    if pairs.is_empty() {
        return Err(Error::EmptyInput);
    }
    let prepared = PreparedPairs::new(pairs);
    let candidates: Vec<(&Transformation, RowSet)> = pool
        .iter()
        .map(|t| (t, prepared.covered(t)))
        .filter(|(_, set)| !set.is_empty())
        .collect();
    let mut uncovered = RowSet::full(prepared.len());
    for (_, set) in &candidates {
        uncovered.remove_all(set);
    }
    if !uncovered.is_empty() {
        return Err(Error::IncompletePool { uncovered: prepared.row_ids_of(&uncovered).into_iter().collect() });
    }

    let simplicity_of: Vec<OnceCell<SimplicityScore>> = (0..candidates.len()).map(|_| OnceCell::new()).collect();
    let mut rng = match tie_break {
        TieBreak::Random(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        TieBreak::Simplicity => None,
    };
    let mut uncovered = RowSet::full(prepared.len());
    let mut selected = Vec::new();
    while !uncovered.is_empty() {
        let gains: Vec<usize> = candidates.iter().map(|(_, set)| set.intersection_count(&uncovered)).collect();
        let best = gains.iter().copied().max().unwrap_or(0);
        debug_assert!(best > 0);
        let mut tied: Vec<usize> = (0..gains.len()).filter(|&i| gains[i] == best).collect();
        let pick = match rng.as_mut() {
            None => tied
                .into_iter()
                .min_by(|&a, &b| {
                    let score = |i: usize| *simplicity_of[i].get_or_init(|| simplicity(candidates[i].0));
                    score(a).cmp(&score(b)).then_with(|| candidates[a].0.cmp(candidates[b].0))
                })
                .unwrap(),
            Some(rng) => {
                tied.sort_unstable_by(|&a, &b| candidates[a].0.cmp(candidates[b].0));
                tied[rng.random_range(0..tied.len())]
            }
        };
        let (t, set) = &candidates[pick];
        let gained = set.intersect(&uncovered);
        uncovered.remove_all(set);
        selected.push(Selection {
            report: prepared.report(t, set),
            newly_covered: prepared.row_ids_of(&gained),
        });
    }
    Ok(selected)
}

fn mean_chars<'a>(cells: impl Iterator<Item = &'a str>) -> f64 {
    let (total, count) = cells.fold((0usize, 0usize), |(t, c), s| (t + s.chars().count(), c + 1));
    fraction(total, count)
}

/// Picks the orientation that covers a sample with fewer transformations.
///
/// A seeded uniform sample of `min(sample_size, pairs.len())` rows is run
/// through the configured pipeline both ways. Equal sizes fall back to the
/// orientation whose source column has the longer mean length, then forward.
pub fn detect_direction(pairs: &[ExamplePair], sample_size: usize, cfg: &PipelineConfig) -> Result<Direction> {
    if pairs.is_empty() {
        return Err(Error::EmptyInput);
    }
    let sample: Vec<ExamplePair> = if sample_size >= pairs.len() {
        pairs.to_vec()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut idx = rand::seq::index::sample(&mut rng, pairs.len(), sample_size.max(1)).into_vec();
        idx.sort_unstable();
        idx.into_iter().map(|i| pairs[i].clone()).collect()
    };
    let reversed: Vec<ExamplePair> = sample.iter().map(ExamplePair::reversed).collect();
    let forward_set_size = pipeline::cover(&sample, cfg)?.len();
    let reverse_set_size = pipeline::cover(&reversed, cfg)?.len();

    let value = if forward_set_size != reverse_set_size {
        if forward_set_size < reverse_set_size {
            Orientation::Forward
        } else {
            Orientation::Reverse
        }
    } else {
        let source_len = mean_chars(pairs.iter().map(|p| p.source.as_str()));
        let target_len = mean_chars(pairs.iter().map(|p| p.target.as_str()));
        if target_len > source_len {
            Orientation::Reverse
        } else {
            Orientation::Forward
        }
    };
    Ok(Direction { value, forward_set_size, reverse_set_size })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generalize::{induce_removal, simplicity};
    use crate::pipeline::Mode;
    use alloc::string::String;
    use alloc::vec;

    fn t(s: &str) -> Transformation {
        s.parse().unwrap()
    }

    fn f1() -> Vec<ExamplePair> {
        vec![
            ExamplePair::new(0, "grace hopper", "ghopper@u.ca"),
            ExamplePair::new(1, "mary jane watson", "mwatson@u.ca"),
            ExamplePair::new(2, "alan turing", "turing@u.ca"),
        ]
    }

    fn cfg(mode: Mode) -> PipelineConfig {
        PipelineConfig { mode, ..PipelineConfig::default() }
    }

    #[test]
    fn coverage_examples() {
        let pairs = f1();
        let r = coverage(&t("<substr(s, s+1)^?, split(' ', e), literal('@u.ca')>"), &pairs);
        assert_eq!(r.coverage, 1.0);
        assert_eq!(r.covered_rows, BTreeSet::from([0, 1, 2]));
        let lit = coverage(&t("<literal('turing@u.ca')>"), &pairs);
        assert_eq!(lit.covered_rows, BTreeSet::from([2]));
        assert_eq!(lit.coverage, 1.0 / 3.0);
        assert_eq!(coverage(&t("<literal('turing@u.ca')>"), &pairs), lit);
    }

    #[test]
    fn literal_pool_needs_one_per_row() {
        let pairs = f1();
        let pool: Pool = pairs
            .iter()
            .map(|p| t(&alloc::format!("<literal('{}')>", p.target)))
            .collect();
        let sel = greedy_cover(&pool, &pairs, TieBreak::Simplicity).unwrap();
        assert_eq!(sel.len(), 3);
        assert_eq!(best_coverage(&pool, &pairs), 1.0 / 3.0);
        let all: BTreeSet<usize> = sel.iter().flat_map(|s| s.newly_covered.iter().copied()).collect();
        assert_eq!(all, BTreeSet::from([0, 1, 2]));
    }

    #[test]
    fn incomplete_pool() {
        let pairs = f1();
        let pool: Pool = [t("<literal('turing@u.ca')>")].into_iter().collect();
        assert_eq!(
            greedy_cover(&pool, &pairs, TieBreak::Simplicity),
            Err(Error::IncompletePool { uncovered: vec![0, 1] })
        );
    }

    #[test]
    fn f1_generalized_vs_baseline() {
        let pairs = f1();
        let sel = pipeline::cover(&pairs, &cfg(Mode::RelRem)).unwrap();
        assert_eq!(sel.len(), 1);
        assert_eq!(sel[0].report.coverage, 1.0);

        let base_pool = pipeline::build_pool(&pairs, &cfg(Mode::Baseline)).unwrap();
        assert!(base_pool.iter().all(Transformation::is_start_anchored));
        // every row needs a different absolute token index, so no candidate covers two rows
        assert_eq!(best_coverage(&base_pool, &pairs), 1.0 / 3.0);
        let base = greedy_cover(&base_pool, &pairs, TieBreak::Simplicity).unwrap();
        assert_eq!(base.len(), 3);

        let gen_pool = pipeline::build_pool(&pairs, &cfg(Mode::RelRem)).unwrap();
        assert_eq!(best_coverage(&gen_pool, &pairs), 1.0);
    }

    #[test]
    fn removal_candidate_from_f1_rows() {
        let pairs = f1();
        let pool = pipeline::build_pool(&pairs, &cfg(Mode::Rel)).unwrap();
        let generalized = induce_removal(&pool);
        assert!(generalized.contains_rendering("<substr(s, s+1)^?, split(' ', e), literal('@u.ca')>"));
    }

    #[test]
    fn simplicity_tie_break_prefers_substr() {
        let pairs = vec![ExamplePair::new(0, "ab-cd", "a"), ExamplePair::new(1, "xy-zw", "x")];
        let pool: Pool = [t("<splitSubstr('-', s, s, s+1)>"), t("<substr(s, s+1)>")].into_iter().collect();
        let sel = greedy_cover(&pool, &pairs, TieBreak::Simplicity).unwrap();
        assert_eq!(sel.len(), 1);
        assert_eq!(sel[0].report.transformation.render(), "<substr(s, s+1)>");
        let picks: BTreeSet<String> = (0..32)
            .map(|seed| greedy_cover(&pool, &pairs, TieBreak::Random(seed)).unwrap()[0].report.transformation.render())
            .collect();
        assert_eq!(picks.len(), 2);
        for seed in 0..8 {
            let a = greedy_cover(&pool, &pairs, TieBreak::Random(seed)).unwrap();
            let b = greedy_cover(&pool, &pairs, TieBreak::Random(seed)).unwrap();
            assert_eq!(a, b);
            assert!(simplicity(&sel[0].report.transformation) <= simplicity(&a[0].report.transformation));
        }
    }

    #[test]
    fn direction_examples() {
        let pairs = f1();
        let d = detect_direction(&pairs, 10, &cfg(Mode::RelRem)).unwrap();
        assert_eq!(d.value, Orientation::Forward);
        assert_eq!(d.forward_set_size, 1);
        assert!(d.reverse_set_size > 1);

        let sym = vec![ExamplePair::new(0, "ab", "ab")];
        let d = detect_direction(&sym, 10, &cfg(Mode::RelRem)).unwrap();
        assert_eq!((d.value, d.forward_set_size, d.reverse_set_size), (Orientation::Forward, 1, 1));

        // equal sizes, longer target column
        let longer = vec![ExamplePair::new(0, "ab", "abab")];
        let d = detect_direction(&longer, 10, &cfg(Mode::RelRem)).unwrap();
        assert_eq!(d.forward_set_size, d.reverse_set_size);
        assert_eq!(d.value, Orientation::Reverse);
    }

    #[test]
    fn direction_sample_is_seeded() {
        let mut pairs = f1();
        for i in 3..30 {
            pairs.push(ExamplePair::new(i, alloc::format!("first{i} last{i}"), alloc::format!("flast{i}@u.ca")));
        }
        let c = PipelineConfig { seed: 7, ..cfg(Mode::RelRem) };
        let a = detect_direction(&pairs, 4, &c).unwrap();
        let b = detect_direction(&pairs, 4, &c).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.value, Orientation::Forward);
    }
}

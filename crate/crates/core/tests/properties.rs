use std::collections::{BTreeSet, HashSet};

use celljoin_core::dsl::{IndexRef, Transformation, Unit};
use celljoin_core::generalize::{induce_removal, induce_repetition};
use celljoin_core::join::{score_join, trigram_containment, Match};
use celljoin_core::pipeline::build_pool;
use celljoin_core::select::{greedy_cover, TieBreak};
use celljoin_core::{ExamplePair, Mode, PipelineConfig, Pool};
use proptest::prelude::*;

fn cell() -> impl Strategy<Value = String> {
    "[ab .-]{1,8}"
}

fn index() -> impl Strategy<Value = IndexRef> {
    (any::<bool>(), 0usize..4).prop_map(|(from_start, k)| if from_start { IndexRef::start(k) } else { IndexRef::end(k) })
}

fn unit() -> impl Strategy<Value = Unit> {
    let sep = prop::sample::select(vec![' ', '.', '-', ',']);
    prop_oneof![
        "[a-z' \\\\]{1,4}".prop_map(Unit::literal),
        (index(), index()).prop_map(|(i, j)| Unit::substr(i, j)),
        (sep.clone(), index()).prop_map(|(c, t)| Unit::split(c, t)),
        (sep, index(), index(), index()).prop_map(|(c, t, i, j)| Unit::split_substr(c, t, i, j)),
    ]
}

fn small_config(mode: Mode) -> PipelineConfig {
    PipelineConfig { mode, max_pool: 2_000, skeleton_cap: 200, ..PipelineConfig::default() }
}

fn pairs() -> impl Strategy<Value = Vec<ExamplePair>> {
    prop::collection::vec((cell(), cell()), 1..4).prop_map(|rows| {
        rows.into_iter().enumerate().map(|(i, (s, t))| ExamplePair::new(i, s, t)).collect()
    })
}

fn trigrams(s: &str) -> HashSet<Vec<char>> {
    let chars: Vec<char> = s.chars().collect();
    if chars.len() < 3 {
        return HashSet::from([chars]);
    }
    chars.windows(3).map(<[char]>::to_vec).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rendering_parses_back(units in prop::collection::vec(unit(), 1..4)) {
        let t = Transformation::from_units(units).unwrap();
        let parsed: Transformation = t.as_str().parse().unwrap();
        prop_assert_eq!(parsed.elements(), t.elements());
        prop_assert_eq!(parsed.as_str(), t.as_str());
    }

    #[test]
    fn every_candidate_reproduces_its_example(pair in (cell(), cell())) {
        let rows = vec![ExamplePair::new(0, pair.0, pair.1)];
        let pool = build_pool(&rows, &small_config(Mode::RelRemRep)).unwrap();
        for t in &pool {
            prop_assert!(t.apply(&rows[0].source).contains(&rows[0].target), "{} on {:?}", t, rows[0]);
        }
    }

    #[test]
    fn greedy_cover_covers_every_row(rows in pairs()) {
        let cfg = small_config(Mode::RelRem);
        let pool = build_pool(&rows, &cfg).unwrap();
        let selected = greedy_cover(&pool, &rows, TieBreak::Simplicity).unwrap();
        let mut covered = BTreeSet::new();
        for s in &selected {
            prop_assert!(!s.newly_covered.is_empty());
            for &row in &s.newly_covered {
                prop_assert!(covered.insert(row));
                let pair = &rows[row];
                prop_assert!(s.report.transformation.apply(&pair.source).contains(&pair.target));
            }
        }
        prop_assert_eq!(covered.len(), rows.len());
    }

    #[test]
    fn simplicity_selection_ignores_pool_order(rows in pairs()) {
        let pool = build_pool(&rows, &small_config(Mode::Rel)).unwrap();
        let reversed: Pool = pool.iter().rev().cloned().collect();
        prop_assert_eq!(&reversed, &pool);
        let a = greedy_cover(&pool, &rows, TieBreak::Simplicity).unwrap();
        let b = greedy_cover(&reversed, &rows, TieBreak::Simplicity).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn generalization_only_adds(rows in pairs()) {
        let pool = build_pool(&rows, &small_config(Mode::Rel)).unwrap();
        prop_assert!(pool.is_subset(&induce_removal(&pool)));
        prop_assert!(pool.is_subset(&induce_repetition(&pool, 2)));
    }

    #[test]
    fn containment_matches_a_direct_count(a in "[ab ]{0,7}", b in "[ab ]{0,7}") {
        let score = trigram_containment(&a, &b);
        prop_assert_eq!(score, trigram_containment(&b, &a));
        let expected = if a.is_empty() || b.is_empty() {
            0.0
        } else {
            let (ta, tb) = (trigrams(&a), trigrams(&b));
            ta.intersection(&tb).count() as f64 / ta.len().min(tb.len()) as f64
        };
        prop_assert!((score - expected).abs() < 1e-12, "{score} vs {expected}");
        prop_assert!((0.0..=1.0).contains(&score));
    }

    #[test]
    fn join_scores_are_bounded(
        emitted in prop::collection::btree_set((0usize..5, 0usize..5), 0..10),
        truth in prop::collection::btree_set((0usize..5, 0usize..5), 0..10),
    ) {
        let matches: Vec<Match> = emitted
            .iter()
            .map(|&(s, t)| Match { source_row: s, target_row: t, transformation: String::from("<literal('x')>") })
            .collect();
        let r = score_join(matches, &truth);
        let correct = emitted.intersection(&truth).count();
        for v in [r.precision, r.recall, r.f1] {
            prop_assert!((0.0..=1.0).contains(&v));
        }
        if !emitted.is_empty() {
            prop_assert_eq!(r.precision, correct as f64 / emitted.len() as f64);
        }
        if !truth.is_empty() {
            prop_assert_eq!(r.recall, correct as f64 / truth.len() as f64);
        }
        prop_assert!(r.f1 <= r.precision.max(r.recall) + 1e-12);
    }
}

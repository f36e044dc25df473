//! Running the pipeline on benchmark cases.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use celljoin_core::join::{self, Cell, JoinConfig, JoinPlan, Match};
use celljoin_core::pipeline::build_pool;
use celljoin_core::select::{detect_direction, greedy_cover, Orientation};
use celljoin_core::{ExamplePair, Mode, PipelineConfig};
use rayon::prelude::*;

use crate::dataset::{BenchmarkCase, DatasetError};
use crate::report::{CaseReport, JoinReport, MatchReport, SelectedReport};

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error("{case}: {message}")]
    Input { case: String, message: String },
    #[error("{case}: {source}")]
    Core { case: String, source: celljoin_core::Error },
    #[error("invariant violated: {0}")]
    Invariant(String),
}

impl RunError {
    /// Process exit status for this error.
    pub fn exit_code(&self) -> u8 {
        match self {
            RunError::Dataset(_) | RunError::Input { .. } => 2,
            RunError::Core { source, .. } => match source {
                celljoin_core::Error::IncompletePool { .. } => 3,
                _ => 2,
            },
            RunError::Invariant(_) => 3,
        }
    }

    fn input(case: &BenchmarkCase, message: impl Into<String>) -> Self {
        RunError::Input { case: case.name.clone(), message: message.into() }
    }

    fn core(case: &BenchmarkCase) -> impl FnOnce(celljoin_core::Error) -> Self + '_ {
        move |source| RunError::Core { case: case.name.clone(), source }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DirectionChoice {
    Auto,
    Forward,
    Reverse,
}

impl FromStr for DirectionChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "auto" => Ok(DirectionChoice::Auto),
            "forward" => Ok(DirectionChoice::Forward),
            "reverse" => Ok(DirectionChoice::Reverse),
            _ => Err(format!("unknown direction `{s}` (expected auto, forward or reverse)")),
        }
    }
}

/// Where the examples for synthesis come from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExampleSource {
    /// Every row is an example; the join is scored on every row.
    All,
    /// Paired by trigram similarity, at most the given number (all confident pairs if absent).
    Auto(Option<usize>),
    /// The first K rows are examples; the join is scored on the rest.
    Manual(usize),
    /// The case's `examples.csv`; the join is scored on every row.
    File,
}

impl FromStr for ExampleSource {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let count = |n: &str| n.parse::<usize>().map_err(|_| format!("bad example count `{n}`"));
        match s.split_once(':') {
            None if s == "all" => Ok(ExampleSource::All),
            None if s == "auto" => Ok(ExampleSource::Auto(None)),
            None if s == "manual" => Ok(ExampleSource::Manual(5)),
            None if s == "file" => Ok(ExampleSource::File),
            Some(("auto", n)) => Ok(ExampleSource::Auto(Some(count(n)?))),
            Some(("manual", n)) => Ok(ExampleSource::Manual(count(n)?)),
            _ => Err(format!("unknown example source `{s}` (expected all, auto[:N], manual[:K] or file)")),
        }
    }
}

impl fmt::Display for ExampleSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExampleSource::All => f.write_str("all"),
            ExampleSource::Auto(None) => f.write_str("auto"),
            ExampleSource::Auto(Some(n)) => write!(f, "auto:{n}"),
            ExampleSource::Manual(k) => write!(f, "manual:{k}"),
            ExampleSource::File => f.write_str("file"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    /// Pipeline settings; the mode is overridden per run.
    pub pipeline: PipelineConfig,
    pub join: JoinConfig,
    pub direction: DirectionChoice,
    pub examples: ExampleSource,
    pub auto_threshold: f64,
    pub run_join: bool,
    /// Keep individual join matches in the report.
    pub keep_matches: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        let pipeline = PipelineConfig::default();
        let join = JoinConfig { max_units: pipeline.max_units, r_max: pipeline.rep_degree, ..JoinConfig::default() };
        RunConfig {
            pipeline,
            join,
            direction: DirectionChoice::Auto,
            examples: ExampleSource::All,
            auto_threshold: join::DEFAULT_AUTO_THRESHOLD,
            run_join: true,
            keep_matches: false,
        }
    }
}

/// Examples for synthesis and the rows the join is scored on.
struct Split {
    examples: Vec<ExamplePair>,
    held_out: Vec<ExamplePair>,
}

fn split_case(case: &BenchmarkCase, cfg: &RunConfig) -> Result<Split, RunError> {
    match cfg.examples {
        ExampleSource::All => Ok(Split { examples: case.rows.clone(), held_out: case.rows.clone() }),
        ExampleSource::Manual(k) => {
            if k == 0 || k >= case.rows.len() {
                return Err(RunError::input(
                    case,
                    format!("manual:{k} needs between 1 and {} examples", case.rows.len() - 1),
                ));
            }
            Ok(Split { examples: case.rows[..k].to_vec(), held_out: case.rows[k..].to_vec() })
        }
        ExampleSource::File => match &case.examples {
            Some(examples) if !examples.is_empty() => Ok(Split { examples: examples.clone(), held_out: case.rows.clone() }),
            _ => Err(RunError::input(case, "no examples.csv with rows")),
        },
        ExampleSource::Auto(quota) => {
            let source: Vec<Cell> = case.rows.iter().map(|p| Cell::new(p.row_id, p.source.clone())).collect();
            let target: Vec<Cell> = case.rows.iter().map(|p| Cell::new(p.row_id, p.target.clone())).collect();
            let examples =
                join::generate_examples_auto(&source, &target, quota.unwrap_or(usize::MAX), cfg.auto_threshold)
                    .map_err(RunError::core(case))?;
            Ok(Split { examples, held_out: case.rows.clone() })
        }
    }
}

fn oriented(pairs: &[ExamplePair], orientation: Orientation) -> Vec<ExamplePair> {
    match orientation {
        Orientation::Forward => pairs.to_vec(),
        Orientation::Reverse => pairs.iter().map(ExamplePair::reversed).collect(),
    }
}

pub fn orientation_name(o: Orientation) -> &'static str {
    match o {
        Orientation::Forward => "FORWARD",
        Orientation::Reverse => "REVERSE",
    }
}

/// The orientation used for a case and, when detected, both covering-set sizes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Oriented {
    pub orientation: Orientation,
    pub set_sizes: Option<(usize, usize)>,
}

fn choose_direction(case: &BenchmarkCase, examples: &[ExamplePair], pipeline: &PipelineConfig, cfg: &RunConfig) -> Result<Oriented, RunError> {
    match cfg.direction {
        DirectionChoice::Forward => Ok(Oriented { orientation: Orientation::Forward, set_sizes: None }),
        DirectionChoice::Reverse => Ok(Oriented { orientation: Orientation::Reverse, set_sizes: None }),
        DirectionChoice::Auto => {
            let d = detect_direction(examples, pipeline.sample_size, pipeline).map_err(RunError::core(case))?;
            Ok(Oriented { orientation: d.value, set_sizes: Some((d.forward_set_size, d.reverse_set_size)) })
        }
    }
}

/// Runs one case under one mode, detecting the direction under that mode.
pub fn run_case(case: &BenchmarkCase, mode: Mode, cfg: &RunConfig) -> Result<CaseReport, RunError> {
    let split = split_case(case, cfg)?;
    let pipeline = cfg.pipeline.with_mode(mode);
    let direction = choose_direction(case, &split.examples, &pipeline, cfg)?;
    run_split(case, &split, direction, &pipeline, cfg)
}

/// Runs one case under several modes sharing one direction decision.
///
/// The direction is detected once with `cfg.pipeline`, so the modes differ
/// only in the generalizations they enable.
pub fn run_modes(case: &BenchmarkCase, modes: &[Mode], cfg: &RunConfig) -> Result<Vec<CaseReport>, RunError> {
    let split = split_case(case, cfg)?;
    let direction = choose_direction(case, &split.examples, &cfg.pipeline, cfg)?;
    modes.iter().map(|&m| run_split(case, &split, direction, &cfg.pipeline.with_mode(m), cfg)).collect()
}

fn run_split(
    case: &BenchmarkCase,
    split: &Split,
    direction: Oriented,
    pipeline: &PipelineConfig,
    cfg: &RunConfig,
) -> Result<CaseReport, RunError> {
    let examples = oriented(&split.examples, direction.orientation);
    let pool = build_pool(&examples, pipeline).map_err(RunError::core(case))?;
    let selections = greedy_cover(&pool, &examples, pipeline.tie_break).map_err(RunError::core(case))?;
    let best = selections.first().map_or(0.0, |s| s.report.coverage);

    let join = if cfg.run_join {
        let reports: Vec<_> = selections.iter().map(|s| s.report.clone()).collect();
        let rows = oriented(&split.held_out, direction.orientation);
        let source: Vec<Cell> = rows.iter().map(|p| Cell::new(p.row_id, p.source.clone())).collect();
        let target: Vec<Cell> = rows.iter().map(|p| Cell::new(p.row_id, p.target.clone())).collect();
        let plan = JoinPlan::new(&reports, &target, &cfg.join);
        let matches: Vec<Match> = source.par_iter().flat_map_iter(|c| plan.matches_for(c)).collect();
        let truth: BTreeSet<(usize, usize)> = rows.iter().map(|p| (p.row_id, p.row_id)).collect();
        let scored = join::score_join(matches, &truth);
        Some(JoinReport {
            evaluated_rows: rows.len(),
            transformations_used: plan.len(),
            num_matches: scored.matches.len(),
            precision: scored.precision,
            recall: scored.recall,
            f1: scored.f1,
            matches: cfg.keep_matches.then(|| {
                scored
                    .matches
                    .iter()
                    .map(|m| MatchReport {
                        source_row: m.source_row,
                        target_row: m.target_row,
                        correct: m.source_row == m.target_row,
                        transformation: m.transformation.clone(),
                    })
                    .collect()
            }),
        })
    } else {
        None
    };

    Ok(CaseReport {
        name: case.name.clone(),
        mode: pipeline.mode.name().to_string(),
        direction: orientation_name(direction.orientation).to_string(),
        forward_set_size: direction.set_sizes.map(|s| s.0),
        reverse_set_size: direction.set_sizes.map(|s| s.1),
        examples: examples.len(),
        pool_size: pool.len(),
        best_transformation_coverage: best,
        num_transformations: selections.len(),
        selected: selections
            .iter()
            .map(|s| SelectedReport {
                transformation: s.report.transformation.render(),
                coverage: s.report.coverage,
                newly_covered: s.newly_covered.len(),
            })
            .collect(),
        join,
    })
}

/// Runs every case under every mode, cases in parallel, results in case order.
pub fn run_bench(cases: &[BenchmarkCase], modes: &[Mode], cfg: &RunConfig) -> Result<Vec<Vec<CaseReport>>, RunError> {
    cases.par_iter().map(|c| run_modes(c, modes, cfg)).collect()
}

/// Per-case mode monotonicity: along increasing modes best coverage must not
/// drop and the covering set must not grow.
pub fn monotonicity_violations(per_case: &[Vec<CaseReport>]) -> Vec<String> {
    let mut out = Vec::new();
    for reports in per_case {
        let mut ordered: Vec<&CaseReport> = reports.iter().collect();
        ordered.sort_by_key(|r| r.mode.parse::<Mode>().ok());
        for w in ordered.windows(2) {
            let (a, b) = (w[0], w[1]);
            if b.best_transformation_coverage < a.best_transformation_coverage {
                out.push(format!(
                    "{}: best coverage drops from {} ({}) to {} ({})",
                    a.name, a.best_transformation_coverage, a.mode, b.best_transformation_coverage, b.mode
                ));
            }
            if b.num_transformations > a.num_transformations {
                out.push(format!(
                    "{}: covering set grows from {} ({}) to {} ({})",
                    a.name, a.num_transformations, a.mode, b.num_transformations, b.mode
                ));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example_sources_parse() {
        assert_eq!("all".parse(), Ok(ExampleSource::All));
        assert_eq!("auto".parse(), Ok(ExampleSource::Auto(None)));
        assert_eq!("auto:7".parse(), Ok(ExampleSource::Auto(Some(7))));
        assert_eq!("manual".parse(), Ok(ExampleSource::Manual(5)));
        assert_eq!("manual:3".parse(), Ok(ExampleSource::Manual(3)));
        assert_eq!("file".parse(), Ok(ExampleSource::File));
        assert!("manual:x".parse::<ExampleSource>().is_err());
        assert!("some".parse::<ExampleSource>().is_err());
        for s in ["all", "auto", "auto:7", "manual:3", "file"] {
            assert_eq!(s.parse::<ExampleSource>().unwrap().to_string(), s);
        }
    }

    #[test]
    fn directions_parse() {
        assert_eq!("FORWARD".parse(), Ok(DirectionChoice::Forward));
        assert_eq!("reverse".parse(), Ok(DirectionChoice::Reverse));
        assert_eq!("auto".parse(), Ok(DirectionChoice::Auto));
        assert!("sideways".parse::<DirectionChoice>().is_err());
    }

    #[test]
    fn manual_split_holds_out_the_rest() {
        let case = BenchmarkCase {
            name: "c".into(),
            rows: (0..6).map(|i| ExamplePair::new(i, format!("s{i}"), format!("t{i}"))).collect(),
            examples: None,
        };
        let cfg = RunConfig { examples: ExampleSource::Manual(2), ..RunConfig::default() };
        let split = split_case(&case, &cfg).unwrap();
        let train: BTreeSet<usize> = split.examples.iter().map(|p| p.row_id).collect();
        let test: BTreeSet<usize> = split.held_out.iter().map(|p| p.row_id).collect();
        assert_eq!(train, BTreeSet::from([0, 1]));
        assert!(train.is_disjoint(&test));
        assert_eq!(train.len() + test.len(), 6);

        let too_many = RunConfig { examples: ExampleSource::Manual(6), ..RunConfig::default() };
        assert_eq!(split_case(&case, &too_many).err().map(|e| e.exit_code()), Some(2));
        let file = RunConfig { examples: ExampleSource::File, ..RunConfig::default() };
        assert!(split_case(&case, &file).is_err());
    }
}

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use celljoin::report::RunReport;
use celljoin::run::{self, DirectionChoice, ExampleSource, RunConfig, RunError};
use celljoin::{load_case, load_root, BenchmarkCase};
use celljoin_core::dsl::{CellText, Transformation};
use celljoin_core::join::{JoinConfig, DEFAULT_AUTO_THRESHOLD};
use celljoin_core::select::TieBreak;
use celljoin_core::synthesis::SynthConfig;
use celljoin_core::{Mode, PipelineConfig};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "celljoin", version, about = "Find explainable string transformations that join two columns")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every case under a benchmark root and report per-mode metrics.
    Bench {
        /// Directory with one case directory per case.
        root: PathBuf,
        /// Modes to run; all four when omitted.
        #[arg(long = "mode", value_parser = parse_mode)]
        modes: Vec<Mode>,
        /// Skip the per-case mode monotonicity check.
        #[arg(long)]
        no_invariant_check: bool,
        /// Write the report to this file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        opts: Options,
    },
    /// Synthesize a covering set of transformations for one case.
    Synth {
        /// Case directory, or a rows.csv file.
        case: PathBuf,
        #[arg(long, value_parser = parse_mode, default_value = "REL_REM_REP")]
        mode: Mode,
        #[command(flatten)]
        opts: Options,
    },
    /// Synthesize, then join the case's columns and score the matches.
    Join {
        /// Case directory, or a rows.csv file.
        case: PathBuf,
        #[arg(long, value_parser = parse_mode, default_value = "REL_REM_REP")]
        mode: Mode,
        #[command(flatten)]
        opts: Options,
    },
    /// Show how a transformation maps an input cell.
    Explain {
        /// Transformation in the rendering grammar, e.g. "<split(' ', e)>".
        transformation: String,
        input: String,
        /// Report whether this value is among the outputs.
        #[arg(long)]
        target: Option<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum TieBreakArg {
    Simplicity,
    Random,
}

#[derive(Args)]
struct Options {
    /// Maximum non-literal units per transformation.
    #[arg(long, default_value_t = 3)]
    max_units: usize,
    /// Repetition factor of induced repetitions.
    #[arg(long, default_value_t = 2)]
    rep_degree: u32,
    /// Coverage below which a transformation is not used for joining.
    #[arg(long, default_value_t = 0.05)]
    min_support: f64,
    /// Repetition cap applied when joining.
    #[arg(long, default_value_t = 1)]
    join_rep_degree: u32,
    /// auto, forward or reverse.
    #[arg(long, default_value = "auto")]
    direction: DirectionChoice,
    #[arg(long, value_enum, default_value = "simplicity")]
    tie_break: TieBreakArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// all, auto[:N], manual[:K] (first K rows, scored on the rest) or file.
    #[arg(long, default_value = "all")]
    examples: ExampleSource,
    /// Rows sampled per orientation when detecting the direction.
    #[arg(long, default_value_t = 10)]
    sample_size: usize,
    /// Candidate pool size before generalization.
    #[arg(long, default_value_t = SynthConfig::default().max_pool)]
    max_pool: usize,
    /// Minimum trigram containment for automatically paired examples.
    #[arg(long, default_value_t = DEFAULT_AUTO_THRESHOLD)]
    auto_threshold: f64,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse().map_err(|e: celljoin_core::pipeline::UnknownMode| e.to_string())
}

impl Options {
    fn config(&self, run_join: bool, keep_matches: bool) -> RunConfig {
        let pipeline = PipelineConfig {
            max_units: self.max_units,
            rep_degree: self.rep_degree,
            max_pool: self.max_pool,
            tie_break: match self.tie_break {
                TieBreakArg::Simplicity => TieBreak::Simplicity,
                TieBreakArg::Random => TieBreak::Random(self.seed),
            },
            sample_size: self.sample_size,
            seed: self.seed,
            ..PipelineConfig::default()
        };
        RunConfig {
            join: JoinConfig {
                min_support: self.min_support,
                join_rep_degree: self.join_rep_degree,
                max_units: self.max_units,
                r_max: self.rep_degree,
            },
            pipeline,
            direction: self.direction,
            examples: self.examples,
            auto_threshold: self.auto_threshold,
            run_join,
            keep_matches,
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse().command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn execute(command: Command) -> Result<ExitCode, RunError> {
    match command {
        Command::Bench { root, modes, no_invariant_check, out, opts } => {
            let modes = if modes.is_empty() { Mode::ALL.to_vec() } else { modes };
            let cfg = opts.config(true, false);
            let cases = load_root(&root)?;
            let per_case = run::run_bench(&cases, &modes, &cfg)?;
            let violations = if no_invariant_check { Vec::new() } else { run::monotonicity_violations(&per_case) };
            let report = RunReport::new(per_case, &cfg);
            let text = render(&report, opts.format);
            match out {
                Some(path) => fs::write(&path, text)
                    .map_err(|source| celljoin::DatasetError::Io { path: path.clone(), source })?,
                None => print!("{text}"),
            }
            if violations.is_empty() {
                Ok(ExitCode::SUCCESS)
            } else {
                Err(RunError::Invariant(violations.join("; ")))
            }
        }
        Command::Synth { case, mode, opts } => {
            let case = load_case(&case)?;
            let report = single(&case, mode, &opts.config(false, false))?;
            match opts.format {
                Format::Json => print!("{}", report.to_json()),
                Format::Text => print!("{}", describe_selection(&report)),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Join { case, mode, opts } => {
            let loaded = load_case(&case)?;
            let report = single(&loaded, mode, &opts.config(true, true))?;
            match opts.format {
                Format::Json => print!("{}", report.to_json()),
                Format::Text => {
                    print!("{}", describe_selection(&report));
                    print!("{}", describe_matches(&report, &loaded));
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Explain { transformation, input, target } => {
            let t: Transformation = transformation.parse().map_err(|e: celljoin_core::dsl::ParseError| {
                RunError::Input { case: String::from("explain"), message: e.to_string() }
            })?;
            print!("{}", explain(&t, &input, target.as_deref()));
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn single(case: &BenchmarkCase, mode: Mode, cfg: &RunConfig) -> Result<RunReport, RunError> {
    let entry = run::run_case(case, mode, cfg)?;
    Ok(RunReport::new(vec![vec![entry]], cfg))
}

fn render(report: &RunReport, format: Format) -> String {
    match format {
        Format::Json => report.to_json(),
        Format::Text => report.to_text(),
    }
}

fn describe_selection(report: &RunReport) -> String {
    let c = &report.modes[0].cases[0];
    let mut out = format!(
        "{} under {}: direction {}, {} examples, {} candidates\n",
        c.name, c.mode, c.direction, c.examples, c.pool_size
    );
    out += &format!(
        "{} transformation(s), best coverage {:.3}\n",
        c.num_transformations, c.best_transformation_coverage
    );
    for (i, s) in c.selected.iter().enumerate() {
        out += &format!("{:>4}. {:.3}  +{:<4} {}\n", i + 1, s.coverage, s.newly_covered, s.transformation);
    }
    out
}

fn describe_matches(report: &RunReport, case: &BenchmarkCase) -> String {
    let c = &report.modes[0].cases[0];
    let Some(join) = &c.join else { return String::new() };
    let reversed = c.direction == run::orientation_name(celljoin_core::select::Orientation::Reverse);
    let mut out = format!(
        "join over {} rows with {} transformation(s): {} matches, precision {:.3}, recall {:.3}, F1 {:.3}\n",
        join.evaluated_rows, join.transformations_used, join.num_matches, join.precision, join.recall, join.f1
    );
    for m in join.matches.iter().flatten() {
        let (s, t) = (&case.rows[m.source_row], &case.rows[m.target_row]);
        let (from, to) = if reversed { (&s.target, &t.source) } else { (&s.source, &t.target) };
        out += &format!(
            "{} {:>5} -> {:<5} {:?} -> {:?}  via {}\n",
            if m.correct { "ok   " } else { "WRONG" },
            m.source_row,
            m.target_row,
            from,
            to,
            m.transformation
        );
    }
    out
}

fn explain(t: &Transformation, input: &str, target: Option<&str>) -> String {
    let cell = CellText::new(input);
    let mut out = format!("transformation {t}\ninput {input:?}\n");
    for (i, variant) in t.expand_variants().iter().enumerate() {
        let parts: Vec<String> = variant
            .iter()
            .map(|u| match u.apply(input) {
                Ok(s) => format!("{u} = {s:?}"),
                Err(e) => format!("{u} fails ({e})"),
            })
            .collect();
        let result = match cell.eval_sequence(variant) {
            Some(s) => format!("{s:?}"),
            None => String::from("no output"),
        };
        out += &format!("variant {}: {} => {}\n", i + 1, parts.join(" + "), result);
    }
    let outputs = t.apply(input);
    out += &format!("outputs: {}\n", outputs.iter().map(|s| format!("{s:?}")).collect::<Vec<_>>().join(", "));
    if let Some(target) = target {
        let verdict = if outputs.contains(target) { "produced" } else { "not produced" };
        out += &format!("target {target:?}: {verdict}\n");
    }
    out
}

//! Run reports and their JSON and text renderings.

use std::fmt::Write as _;

use celljoin_core::select::TieBreak;
use serde::Serialize;

use crate::run::RunConfig;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SelectedReport {
    pub transformation: String,
    pub coverage: f64,
    pub newly_covered: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MatchReport {
    pub source_row: usize,
    pub target_row: usize,
    pub correct: bool,
    pub transformation: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JoinReport {
    pub evaluated_rows: usize,
    pub transformations_used: usize,
    pub num_matches: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matches: Option<Vec<MatchReport>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CaseReport {
    pub name: String,
    pub mode: String,
    pub direction: String,
    pub forward_set_size: Option<usize>,
    pub reverse_set_size: Option<usize>,
    pub examples: usize,
    pub pool_size: usize,
    pub best_transformation_coverage: f64,
    pub num_transformations: usize,
    pub selected: Vec<SelectedReport>,
    pub join: Option<JoinReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JoinSummary {
    pub mean_precision: f64,
    pub mean_recall: f64,
    pub mean_f1: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub cases: usize,
    pub mean_best_transformation_coverage: f64,
    pub mean_num_transformations: f64,
    pub total_num_transformations: usize,
    pub join: Option<JoinSummary>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModeReport {
    pub mode: String,
    pub summary: Summary,
    pub cases: Vec<CaseReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConfigReport {
    pub max_units: usize,
    pub rep_degree: u32,
    pub min_support: f64,
    pub join_rep_degree: u32,
    pub direction: String,
    pub examples: String,
    pub tie_break: String,
    pub seed: u64,
    pub sample_size: usize,
    pub max_pool: usize,
    pub auto_threshold: f64,
}

impl ConfigReport {
    pub fn of(cfg: &RunConfig) -> Self {
        ConfigReport {
            max_units: cfg.pipeline.max_units,
            rep_degree: cfg.pipeline.rep_degree,
            min_support: cfg.join.min_support,
            join_rep_degree: cfg.join.join_rep_degree,
            direction: format!("{:?}", cfg.direction).to_lowercase(),
            examples: cfg.examples.to_string(),
            tie_break: match cfg.pipeline.tie_break {
                TieBreak::Simplicity => String::from("simplicity"),
                TieBreak::Random(_) => String::from("random"),
            },
            seed: cfg.pipeline.seed,
            sample_size: cfg.pipeline.sample_size,
            max_pool: cfg.pipeline.max_pool,
            auto_threshold: cfg.auto_threshold,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub schema: u32,
    pub config: ConfigReport,
    pub modes: Vec<ModeReport>,
}

/// Title, summary row label, per-case cell and summary cell of a text table.
type Table = (&'static str, &'static str, Box<dyn Fn(&CaseReport) -> String>, Box<dyn Fn(&Summary) -> String>);

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

impl Summary {
    pub fn of(cases: &[CaseReport]) -> Self {
        let joins: Vec<&JoinReport> = cases.iter().filter_map(|c| c.join.as_ref()).collect();
        Summary {
            cases: cases.len(),
            mean_best_transformation_coverage: mean(cases.iter().map(|c| c.best_transformation_coverage)),
            mean_num_transformations: mean(cases.iter().map(|c| c.num_transformations as f64)),
            total_num_transformations: cases.iter().map(|c| c.num_transformations).sum(),
            join: (!joins.is_empty() && joins.len() == cases.len()).then(|| JoinSummary {
                mean_precision: mean(joins.iter().map(|j| j.precision)),
                mean_recall: mean(joins.iter().map(|j| j.recall)),
                mean_f1: mean(joins.iter().map(|j| j.f1)),
            }),
        }
    }
}

impl RunReport {
    /// Builds a report from per-case results, each holding one entry per mode
    /// in the same mode order.
    pub fn new(per_case: Vec<Vec<CaseReport>>, cfg: &RunConfig) -> Self {
        let mode_count = per_case.first().map_or(0, Vec::len);
        let mut by_mode: Vec<Vec<CaseReport>> = vec![Vec::new(); mode_count];
        for reports in per_case {
            for (i, r) in reports.into_iter().enumerate() {
                by_mode[i].push(r);
            }
        }
        let modes = by_mode
            .into_iter()
            .map(|cases| ModeReport {
                mode: cases.first().map(|c| c.mode.clone()).unwrap_or_default(),
                summary: Summary::of(&cases),
                cases,
            })
            .collect();
        RunReport { schema: SCHEMA_VERSION, config: ConfigReport::of(cfg), modes }
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("reports serialize");
        text.push('\n');
        text
    }

    /// Tables with one row per case plus a summary row and one column per mode.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let names: Vec<&str> = self.modes.first().map(|m| m.cases.iter().map(|c| c.name.as_str()).collect()).unwrap_or_default();

        let mut tables: Vec<Table> = vec![
            (
                "Best transformation coverage",
                "mean",
                Box::new(|c| format!("{:.3}", c.best_transformation_coverage)),
                Box::new(|s| format!("{:.3}", s.mean_best_transformation_coverage)),
            ),
            (
                "Required transformations",
                "total",
                Box::new(|c| c.num_transformations.to_string()),
                Box::new(|s| s.total_num_transformations.to_string()),
            ),
        ];
        if self.modes.iter().all(|m| m.summary.join.is_some()) && !self.modes.is_empty() {
            tables.push((
                "Join precision / recall / F1",
                "mean",
                Box::new(|c| {
                    let j = c.join.as_ref().expect("join ran");
                    format!("{:.3} / {:.3} / {:.3}", j.precision, j.recall, j.f1)
                }),
                Box::new(|s| {
                    let j = s.join.as_ref().expect("join ran");
                    format!("{:.3} / {:.3} / {:.3}", j.mean_precision, j.mean_recall, j.mean_f1)
                }),
            ));
        }

        for (i, (title, footer, cell, summary)) in tables.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            let mut rows: Vec<Vec<String>> = Vec::new();
            rows.push(std::iter::once(String::from("case")).chain(self.modes.iter().map(|m| m.mode.clone())).collect());
            for (k, name) in names.iter().enumerate() {
                rows.push(std::iter::once(name.to_string()).chain(self.modes.iter().map(|m| cell(&m.cases[k]))).collect());
            }
            rows.push(std::iter::once(footer.to_string()).chain(self.modes.iter().map(|m| summary(&m.summary))).collect());
            let widths: Vec<usize> = (0..rows[0].len())
                .map(|col| rows.iter().map(|r| r[col].chars().count()).max().unwrap_or(0))
                .collect();
            let _ = writeln!(out, "{title}");
            for (r, row) in rows.iter().enumerate() {
                if r == rows.len() - 1 {
                    let _ = writeln!(out, "{}", "-".repeat(widths.iter().sum::<usize>() + 2 * (widths.len() - 1)));
                }
                let line: Vec<String> = row
                    .iter()
                    .zip(&widths)
                    .enumerate()
                    .map(|(col, (v, &w))| if col == 0 { format!("{v:<w$}") } else { format!("{v:>w$}") })
                    .collect();
                let _ = writeln!(out, "{}", line.join("  ").trim_end());
            }
        }
        out
    }
}

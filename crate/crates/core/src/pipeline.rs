//! End-to-end candidate generation under a generalization mode.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::generalize::{removal_additions, repetition_additions};
use crate::select::{greedy_cover, Selection, TieBreak};
use crate::synthesis::{synthesize, AnchorSet, SynthConfig};
use crate::{ExamplePair, Pool, Result};

/// Which generalizations are enabled; each mode adds to the previous one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Mode {
    /// Start-anchored (absolute) indices, no induction.
    Baseline,
    /// Start- and end-anchored indices.
    Rel,
    /// `Rel` plus removal induction.
    RelRem,
    /// `RelRem` plus repetition induction.
    RelRemRep,
}

impl Mode {
    pub const ALL: [Mode; 4] = [Mode::Baseline, Mode::Rel, Mode::RelRem, Mode::RelRemRep];

    pub fn name(self) -> &'static str {
        match self {
            Mode::Baseline => "BASELINE",
            Mode::Rel => "REL",
            Mode::RelRem => "REL_REM",
            Mode::RelRemRep => "REL_REM_REP",
        }
    }

    pub fn anchors(self) -> AnchorSet {
        match self {
            Mode::Baseline => AnchorSet::StartOnly,
            _ => AnchorSet::Both,
        }
    }

    pub fn removal(self) -> bool {
        self >= Mode::RelRem
    }

    pub fn repetition(self) -> bool {
        self == Mode::RelRemRep
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = UnknownMode;

    fn from_str(s: &str) -> core::result::Result<Self, Self::Err> {
        Mode::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s) || m.name().replace('_', "-").eq_ignore_ascii_case(s))
            .ok_or(UnknownMode)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct UnknownMode;

impl fmt::Display for UnknownMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("unknown mode (expected BASELINE, REL, REL_REM or REL_REM_REP)")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PipelineConfig {
    pub mode: Mode,
    /// Maximum non-literal units per transformation.
    pub max_units: usize,
    /// Repetition factor given to induced repetitions.
    pub rep_degree: u32,
    pub min_len: usize,
    pub skeleton_cap: usize,
    pub max_pool: usize,
    pub tie_break: TieBreak,
    /// Rows sampled for direction detection.
    pub sample_size: usize,
    pub seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        let synth = SynthConfig::default();
        PipelineConfig {
            mode: Mode::RelRemRep,
            max_units: synth.max_units,
            rep_degree: 2,
            min_len: synth.min_len,
            skeleton_cap: synth.skeleton_cap,
            max_pool: synth.max_pool,
            tie_break: TieBreak::Simplicity,
            sample_size: 10,
            seed: 0,
        }
    }
}

impl PipelineConfig {
    pub fn with_mode(&self, mode: Mode) -> Self {
        PipelineConfig { mode, ..self.clone() }
    }

    pub fn synth_config(&self) -> SynthConfig {
        SynthConfig {
            max_units: self.max_units,
            min_len: self.min_len,
            skeleton_cap: self.skeleton_cap,
            max_pool: self.max_pool,
            anchors: self.mode.anchors(),
        }
    }
}

/// Synthesizes candidates and applies the inductions the mode enables,
/// repetition before removal.
pub fn build_pool(pairs: &[ExamplePair], cfg: &PipelineConfig) -> Result<Pool> {
    let mut pool = synthesize(pairs, &cfg.synth_config())?;
    if cfg.mode.repetition() {
        let added = repetition_additions(&pool, cfg.rep_degree);
        pool.extend(added);
    }
    if cfg.mode.removal() {
        let added = removal_additions(&pool);
        pool.extend(added);
    }
    Ok(pool)
}

/// Builds the pool and selects a covering set from it.
pub fn cover(pairs: &[ExamplePair], cfg: &PipelineConfig) -> Result<Vec<Selection>> {
    let pool = build_pool(pairs, cfg)?;
    greedy_cover(&pool, pairs, cfg.tie_break)
}

//! Playing hat games: specs, colorings, the look/guess protocol and verdicts.

mod color;
mod coloring;
mod run;
mod spec;

pub use color::{CodeSegment, Color, GuessSet, Seen};
pub use coloring::{all_colorings, block_geometric_pmf, game_seed, ColorLaw, Coloring, BLOCK_GEOMETRIC_MAX_INDEX};
pub use run::{
    check_verdict, next_action, run_game, run_logician, sampled_colorings, tournament, Action, Eyes, Halt, Look,
    LogicianRecord, Outcome, Profile, Stepwise, StepStrategy, TournamentSummary, Transcript, Verdict, Violation,
    LOSS_SAMPLE_LIMIT,
};
pub use spec::{truncate, GameSpec, GuessBound, LookRule, Palette, Population, Visibility};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("invalid game spec: {0}")]
    InvalidSpec(String),
    #[error("the ω-population must be truncated before play")]
    NotTruncated,
    #[error("coloring has no hat for logician {0}")]
    MissingHat(usize),
    #[error("logician {logician} wears {color}, which is not in the palette")]
    OffPalette { logician: usize, color: String },
    #[error("history entry {index} answers a look at {recorded}, but the strategy looked at {asked}")]
    HistoryMismatch { index: usize, recorded: usize, asked: usize },
    #[error("strategy halted with {0:?} outside any game")]
    Halted(Halt),
}

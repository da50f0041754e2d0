//! Adversaries: colorings on which every logician guesses wrong, with
//! certificates that can be replayed through the engine.

mod exhaustive;
mod refute;
mod sequential;

pub use exhaustive::{exhaustive_defeat, poset_defeat, strategy_space_defeat, SpaceReport, DEFAULT_ENUMERATION_CAP};
pub use refute::{constant_guess_win_probability, randomized_refute, union_bound, wilson_interval, RefuteReport};
pub use sequential::{sequential_defeat, PromiseLadder};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{run_game, Color, Coloring, EngineError, GameSpec, GuessSet, Profile, Transcript, Violation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AdversaryError {
    #[error("{what}: {needed} cases needed, cap is {cap}")]
    CapExceeded { what: &'static str, needed: u128, cap: u128 },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("logician {logician} can guess all {size} promised colours")]
    CapacityUnmet { logician: usize, size: u64 },
    #[error("internal check failed: {0}")]
    Internal(String),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateEntry {
    pub logician: usize,
    pub color: Color,
    pub guess: GuessSet,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub violation: Option<Violation>,
}

/// A losing coloring together with what every logician guessed on it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub spec: GameSpec,
    pub strategy: String,
    pub budget: usize,
    pub coloring: Coloring,
    pub entries: Vec<CertificateEntry>,
}

impl Certificate {
    pub(crate) fn from_transcript(spec: &GameSpec, profile: &dyn Profile, budget: usize, t: &Transcript) -> Self {
        Self {
            spec: spec.clone(),
            strategy: profile.name(),
            budget,
            coloring: Coloring::Table { hats: t.hats.clone() },
            entries: t
                .logicians
                .iter()
                .map(|r| CertificateEntry {
                    logician: r.id,
                    color: t.hats[r.id].clone(),
                    guess: r.guess.clone(),
                    violation: r.violation,
                })
                .collect(),
        }
    }

    /// Checks the entries on their own (nobody's guess holds their colour)
    /// and then replays the game against `profile`.
    pub fn verify(&self, profile: &dyn Profile) -> Result<bool, EngineError> {
        if self.entries.iter().any(|e| e.violation.is_none() && e.guess.contains(&e.color)) {
            return Ok(false);
        }
        let t = run_game(&self.spec, profile, &self.coloring, self.budget)?;
        if t.won() || t.logicians.len() != self.entries.len() {
            return Ok(false);
        }
        Ok(t.logicians.iter().zip(&self.entries).all(|(r, e)| {
            r.id == e.logician && r.guess == e.guess && r.violation == e.violation && t.hats[r.id] == e.color
        }))
    }
}

/// Replays a constructed coloring and packages it, refusing if it does not
/// actually defeat the profile.
pub(crate) fn certify(spec: &GameSpec, profile: &dyn Profile, budget: usize, hats: Vec<Color>) -> Result<Certificate, AdversaryError> {
    let t = run_game(spec, profile, &Coloring::Table { hats }, budget)?;
    if t.won() {
        return Err(AdversaryError::Internal(format!("constructed coloring is won by {:?}", t.verdict.winners)));
    }
    Ok(Certificate::from_transcript(spec, profile, budget, &t))
}

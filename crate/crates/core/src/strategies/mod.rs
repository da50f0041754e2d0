//! Strategy profiles: the constructive strategies, conversions between
//! profiles and function families, and combinators that build new profiles
//! out of old ones.

mod combine;
mod family;
mod sim;
mod zoo;

pub use combine::{
    combine_two_groups, combine_well_ordered, compose_cardinality, shrink_guess_lists, Composed, Shrunk, TwoGroups,
    WellOrdered, DEFAULT_SEARCH_LIMIT,
};
pub use family::{family_to_strategies, strategies_to_family, FamilyTau, Reach, StrategyFamily, TauStar};
pub use sim::Sight;
pub use zoo::{
    BlockCover, CodeSegmentPair, ConstantGuess, FnProfile, InitialSegmentPair, ModularSum, NeighborInitialSegment,
    max_holder, OrdinalRecursive, Sampled, TableProfile,
};

use std::sync::Arc;

use thiserror::Error;

use crate::engine::{EngineError, GameSpec, GuessSet, Palette, Profile, Violation};
use crate::freesubset::FreeError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StrategyError {
    #[error("unknown strategy {name:?}; known: {}", known.join(", "))]
    UnknownName { name: String, known: Vec<String> },
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("logician {logician} broke a rule: {violation:?}")]
    Violated { logician: usize, violation: Violation },
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Free(#[from] FreeError),
}

/// Names accepted by [`named`].
pub const STRATEGY_NAMES: &[&str] = &[
    "modular-sum",
    "block-cover",
    "initial-segment-pair",
    "code-segment-pair",
    "ordinal-recursive",
    "neighbor",
    "parity-chain",
    "constant-guess",
    "sampled",
];

/// Builds a zoo profile by name for a spec. Parameters follow a colon:
/// `constant-guess:1,4` guesses `{1, 4}` (default `{0}`); `sampled:7` uses
/// seed 7 (default `seed`). Population-dependent strategies read their sizes
/// from the spec.
pub fn named(name: &str, spec: &GameSpec, seed: u64) -> Result<Arc<dyn Profile>, StrategyError> {
    let (base, arg) = match name.split_once(':') {
        Some((b, a)) => (b, Some(a)),
        None => (name, None),
    };
    let size = || {
        spec.size()
            .ok_or_else(|| StrategyError::Unsupported(format!("{base} needs a finite population")))
    };
    let nums = |a: &str| -> Result<Vec<u64>, StrategyError> {
        a.split(',')
            .map(|x| x.trim().parse::<u64>().map_err(|e| StrategyError::BadParameter(format!("{x:?}: {e}"))))
            .collect()
    };
    Ok(match base {
        "modular-sum" => Arc::new(ModularSum { n: size()? }),
        "block-cover" => {
            let g = spec
                .guess_bound
                .limit()
                .ok_or_else(|| StrategyError::Unsupported("block-cover needs a bounded guess list".into()))?;
            Arc::new(BlockCover {
                lambda: size()?,
                gamma: g + 1,
            })
        }
        "initial-segment-pair" => Arc::new(InitialSegmentPair),
        "code-segment-pair" => Arc::new(CodeSegmentPair),
        "ordinal-recursive" => Arc::new(OrdinalRecursive { lambda: size()? }),
        "neighbor" => Arc::new(NeighborInitialSegment { parity: false }),
        "parity-chain" => Arc::new(NeighborInitialSegment { parity: true }),
        "constant-guess" => {
            let colors = arg.map_or(Ok(vec![0]), nums)?;
            let guess: GuessSet = match spec.palette {
                Palette::Ordinals => colors.into_iter().map(crate::ordinal::Ordinal::from_nat).collect(),
                _ => colors.into_iter().collect(),
            };
            Arc::new(ConstantGuess { guess })
        }
        "sampled" => {
            let s = match arg {
                Some(a) => a.trim().parse().map_err(|e| StrategyError::BadParameter(format!("{a:?}: {e}")))?,
                None => seed,
            };
            Arc::new(Sampled::new(spec, s))
        }
        _ => {
            return Err(StrategyError::UnknownName {
                name: name.to_string(),
                known: STRATEGY_NAMES.iter().map(|s| s.to_string()).collect(),
            })
        }
    })
}

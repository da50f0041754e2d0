use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::color::Color;
use super::EngineError;
use crate::poset::Poset;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Population {
    /// Logicians `0..n`.
    Finite(usize),
    /// Countably many logicians, one per natural number.
    Omega,
    /// The first `n` logicians of an ω-game; looks past the window are
    /// answered with [`Seen::OutOfWindow`](super::Seen::OutOfWindow).
    Window(usize),
}

impl Population {
    /// Number of logicians that actually play, if finite.
    pub fn size(&self) -> Option<usize> {
        match self {
            Population::Finite(n) | Population::Window(n) => Some(*n),
            Population::Omega => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Visibility {
    /// Everyone may look at everyone else.
    Full,
    /// Logician `p` may look only at `q > p`.
    Chain,
    /// Logician `p` may look only at `q > p` of the opposite parity.
    ParityChain,
    /// Logician `p` may look only at `q` with `p < q` in the order.
    Poset(Poset),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Palette {
    /// Colours `0..k`.
    Finite(u64),
    Naturals,
    /// Cantor-normal-form ordinals below ε₀.
    Ordinals,
}

impl Palette {
    pub fn contains(&self, c: &Color) -> bool {
        match (self, c) {
            (Palette::Finite(k), Color::Nat(n)) => n < k,
            (Palette::Naturals, Color::Nat(_)) => true,
            (Palette::Ordinals, Color::Ord(_)) => true,
            _ => false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GuessBound {
    /// Any finite list (γ = ω).
    FiniteList,
    /// At most `g` colours (γ = g + 1).
    AtMost(usize),
}

impl GuessBound {
    /// Maximum list length, `None` for unbounded finite lists.
    pub fn limit(&self) -> Option<usize> {
        match self {
            GuessBound::FiniteList => None,
            GuessBound::AtMost(g) => Some(*g),
        }
    }
}

/// Whether logician `me` may look at `target`, and what the look returns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LookRule {
    Allowed,
    OutOfWindow,
    SelfLook,
    Forbidden,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GameSpec {
    pub population: Population,
    pub visibility: Visibility,
    pub palette: Palette,
    pub guess_bound: GuessBound,
}

impl GameSpec {
    /// The `(λ, κ, γ)`-game with λ, κ finite and γ = `gamma` finite: full
    /// visibility and lists of fewer than `gamma` colours.
    pub fn finite(lambda: usize, kappa: u64, gamma: usize) -> Self {
        Self {
            population: Population::Finite(lambda),
            visibility: Visibility::Full,
            palette: Palette::Finite(kappa),
            guess_bound: GuessBound::AtMost(gamma.saturating_sub(1)),
        }
    }

    /// The ω-chain game over `palette` with any finite guess list.
    pub fn omega_chain(palette: Palette) -> Self {
        Self {
            population: Population::Omega,
            visibility: Visibility::Chain,
            palette,
            guess_bound: GuessBound::FiniteList,
        }
    }

    pub fn validate(&self) -> Result<(), EngineError> {
        if let Visibility::Poset(p) = &self.visibility {
            match self.population {
                Population::Finite(n) if n == p.size() => {}
                _ => return Err(EngineError::InvalidSpec("poset visibility needs a finite population of the poset's size".into())),
            }
        }
        if self.guess_bound == GuessBound::AtMost(0) {
            return Err(EngineError::InvalidSpec("guess bound AT_MOST(g) needs g >= 1".into()));
        }
        if self.palette == Palette::Finite(0) {
            return Err(EngineError::InvalidSpec("palette FINITE(k) needs k >= 1".into()));
        }
        Ok(())
    }

    pub fn size(&self) -> Option<usize> {
        self.population.size()
    }

    pub fn look_rule(&self, me: usize, target: usize) -> LookRule {
        if me == target {
            return LookRule::SelfLook;
        }
        let ordered = match &self.visibility {
            Visibility::Full => true,
            Visibility::Chain => target > me,
            Visibility::ParityChain => target > me && (target - me) % 2 == 1,
            Visibility::Poset(p) => p.less(me, target),
        };
        if !ordered {
            return LookRule::Forbidden;
        }
        match self.population {
            Population::Finite(n) if target >= n => LookRule::Forbidden,
            Population::Window(n) if target >= n => LookRule::OutOfWindow,
            _ => LookRule::Allowed,
        }
    }
}

/// Restricts an ω-game to its first `n` logicians.
pub fn truncate(spec: &GameSpec, n: usize) -> Result<GameSpec, EngineError> {
    if n == 0 {
        return Err(EngineError::InvalidSpec("truncation window must be at least 1".into()));
    }
    if spec.population != Population::Omega {
        return Err(EngineError::InvalidSpec("only ω-populations can be truncated".into()));
    }
    Ok(GameSpec {
        population: Population::Window(n),
        ..spec.clone()
    })
}

fn parse_infinite(s: &str) -> bool {
    matches!(s, "w" | "omega" | "ω")
}

/// Short text forms, used on the command line:
///
/// * `(λ,κ,γ)` with full visibility. `λ` is a count or `w` (the ω-game);
///   `κ` is a count, `w` for the naturals or `ord` for the CNF ordinals;
///   `γ` is a count (lists of fewer than `γ` colours) or `w` (any finite list).
/// * `chain(N)` and `parity(N)`: the well-ordered ω-game over the naturals
///   on a window of `N`, with any finite list.
/// * A JSON object in the serialized form.
impl FromStr for GameSpec {
    type Err = EngineError;

    fn from_str(text: &str) -> Result<Self, EngineError> {
        let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = |why: &str| EngineError::InvalidSpec(format!("{text:?}: {why}"));
        if t.starts_with('{') {
            return serde_json::from_str(text).map_err(|e| bad(&e.to_string()));
        }
        let num = |x: &str| x.parse::<u64>().map_err(|_| bad("expected a number"));
        if let Some(inner) = t.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
            let parts: Vec<&str> = inner.split(',').collect();
            let [l, k, g] = parts[..] else {
                return Err(bad("expected three entries"));
            };
            let population = if parse_infinite(l) { Population::Omega } else { Population::Finite(num(l)? as usize) };
            let palette = match k {
                "ord" | "ordinals" => Palette::Ordinals,
                k if parse_infinite(k) => Palette::Naturals,
                k => Palette::Finite(num(k)?),
            };
            let guess_bound = if parse_infinite(g) {
                GuessBound::FiniteList
            } else {
                GuessBound::AtMost((num(g)? as usize).checked_sub(1).ok_or_else(|| bad("γ must be at least 1"))?)
            };
            let spec = GameSpec {
                population,
                visibility: Visibility::Full,
                palette,
                guess_bound,
            };
            spec.validate()?;
            return Ok(spec);
        }
        for (prefix, visibility) in [("chain(", Visibility::Chain), ("parity(", Visibility::ParityChain)] {
            if let Some(n) = t.strip_prefix(prefix).and_then(|r| r.strip_suffix(')')) {
                let n = num(n)? as usize;
                return truncate(
                    &GameSpec {
                        visibility,
                        ..GameSpec::omega_chain(Palette::Naturals)
                    },
                    n,
                );
            }
        }
        Err(bad("unrecognised spec"))
    }
}

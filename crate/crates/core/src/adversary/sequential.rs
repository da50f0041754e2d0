use serde::{Deserialize, Serialize};

use super::{certify, AdversaryError, Certificate};
use crate::engine::{run_logician, Color, GameSpec, GuessSet, Outcome, Palette, Profile};
use crate::ordinal::Ordinal;

/// Promised palettes: logician `i` will wear one of the colours
/// `0..sizes[i]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromiseLadder {
    pub sizes: Vec<u64>,
}

impl PromiseLadder {
    pub fn keeps(&self, hats: &[Color]) -> bool {
        hats.len() == self.sizes.len() && hats.iter().zip(&self.sizes).all(|(c, &s)| c.as_nat().is_some_and(|v| v < s))
    }
}

fn color_for(palette: Palette, v: u64) -> Color {
    match palette {
        Palette::Ordinals => Color::Ord(Ordinal::from_nat(v)),
        _ => Color::Nat(v),
    }
}

/// Diagonalises against the logicians one at a time, the last (largest
/// promise) first. For logician `i`, every promise-keeping coloring of the
/// logicians below `i` is tried, with those above already fixed; the least
/// promised colour that `i` never guesses becomes its hat.
pub fn sequential_defeat(
    spec: &GameSpec,
    profile: &dyn Profile,
    ladder: &PromiseLadder,
    budget: usize,
    cap: u128,
) -> Result<Certificate, AdversaryError> {
    spec.validate()?;
    let n = spec
        .size()
        .ok_or_else(|| AdversaryError::Precondition("population must be finite".into()))?;
    let s = &ladder.sizes;
    if s.len() != n {
        return Err(AdversaryError::Precondition(format!("ladder has {} rungs for {n} logicians", s.len())));
    }
    if s.first() == Some(&0) || s.windows(2).any(|w| w[0] >= w[1]) {
        return Err(AdversaryError::Precondition("ladder sizes must be positive and strictly increasing".into()));
    }
    if let (Palette::Finite(k), Some(&top)) = (spec.palette, s.last()) {
        if top > k {
            return Err(AdversaryError::Precondition(format!("promise of {top} colours exceeds the palette")));
        }
    }
    let mut fixed: Vec<Option<Color>> = vec![None; n];
    for i in (0..n).rev() {
        let count: u128 = s[..i].iter().map(|&x| x as u128).product();
        if count > cap {
            return Err(AdversaryError::CapExceeded {
                what: "promise-keeping colorings",
                needed: count,
                cap,
            });
        }
        let mut guessed = GuessSet::empty();
        let mut below = vec![0u64; i];
        for _ in 0..count {
            let source = |t: usize| {
                if t < i {
                    Some(color_for(spec.palette, below[t]))
                } else {
                    fixed.get(t).cloned().flatten()
                }
            };
            match run_logician(spec, profile, i, &source, budget) {
                Outcome::Done(r) if r.violation.is_none() => guessed.union_with(&r.guess),
                Outcome::Done(_) => {}
                Outcome::NeedsHat(t) => return Err(AdversaryError::Internal(format!("logician {i} asked for hat {t}"))),
            }
            for (j, b) in below.iter_mut().enumerate().rev() {
                *b += 1;
                if *b < s[j] {
                    break;
                }
                *b = 0;
            }
        }
        let c = (0..s[i])
            .map(|v| color_for(spec.palette, v))
            .find(|c| !guessed.contains(c))
            .ok_or(AdversaryError::CapacityUnmet { logician: i, size: s[i] })?;
        fixed[i] = Some(c);
    }
    let hats: Vec<Color> = fixed.into_iter().map(|c| c.expect("all fixed")).collect();
    debug_assert!(ladder.keeps(&hats));
    certify(spec, profile, budget, hats)
}

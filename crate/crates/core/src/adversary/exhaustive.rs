use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{certify, AdversaryError, Certificate};
use crate::engine::{
    run_game, run_logician, Color, Coloring, GameSpec, GuessBound, GuessSet, Outcome, Palette, Population, Profile, Visibility,
};
use crate::poset::Poset;
use crate::strategies::TableProfile;

/// Default limit on colorings (or profiles) an exhaustive search may visit.
pub const DEFAULT_ENUMERATION_CAP: u128 = 1 << 24;

fn finite_shape(spec: &GameSpec) -> Result<(usize, u64), AdversaryError> {
    spec.validate()?;
    let n = spec
        .size()
        .ok_or_else(|| AdversaryError::Precondition("population must be finite".into()))?;
    match spec.palette {
        Palette::Finite(k) => Ok((n, k)),
        p => Err(AdversaryError::Precondition(format!("palette {p:?} is not finite"))),
    }
}

fn decode(mut idx: u64, n: usize, k: u64) -> Vec<Color> {
    let mut hats = vec![Color::Nat(0); n];
    for h in hats.iter_mut().rev() {
        *h = Color::Nat(idx % k);
        idx /= k;
    }
    hats
}

/// The lexicographically least coloring on which nobody wins, or `None` when
/// the profile wins everywhere.
pub fn exhaustive_defeat(spec: &GameSpec, profile: &dyn Profile, budget: usize, cap: u128) -> Result<Option<Certificate>, AdversaryError> {
    let (n, k) = finite_shape(spec)?;
    let total = (k as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if total > cap {
        return Err(AdversaryError::CapExceeded {
            what: "colorings",
            needed: total,
            cap,
        });
    }
    let hit = (0..total as u64).into_par_iter().find_map_first(|idx| {
        match run_game(spec, profile, &Coloring::Table { hats: decode(idx, n, k) }, budget) {
            Ok(t) if !t.won() => Some(Ok(t)),
            Ok(_) => None,
            Err(e) => Some(Err(e)),
        }
    });
    match hit {
        None => Ok(None),
        Some(t) => Ok(Some(Certificate::from_transcript(spec, profile, budget, &t?))),
    }
}

/// Defeats any profile on a finite poset when more colours than guesses are
/// available. Logicians are coloured from the top down, always taking the
/// lowest-id maximal one among those left: everything it may look at is
/// above it and already coloured, so its guess is fixed, and it gets the
/// least colour outside that guess.
pub fn poset_defeat(poset: &Poset, profile: &dyn Profile, k: u64, g: usize, budget: usize) -> Result<Certificate, AdversaryError> {
    if g == 0 || k < g as u64 + 1 {
        return Err(AdversaryError::Precondition(format!("need k ≥ g + 1 ≥ 2, got k = {k}, g = {g}")));
    }
    let n = poset.size();
    let spec = GameSpec {
        population: Population::Finite(n),
        visibility: Visibility::Poset(poset.clone()),
        palette: Palette::Finite(k),
        guess_bound: GuessBound::AtMost(g),
    };
    let mut hats: Vec<Option<Color>> = vec![None; n];
    let mut left: BTreeSet<usize> = (0..n).collect();
    while let Some(&p) = poset.maximal_in(&left).first() {
        let source = |t: usize| hats.get(t).cloned().flatten();
        let rec = match run_logician(&spec, profile, p, &source, budget) {
            Outcome::Done(r) => r,
            Outcome::NeedsHat(t) => {
                return Err(AdversaryError::Internal(format!("logician {p} read hat {t} before it was coloured")));
            }
        };
        let guess = if rec.violation.is_some() { GuessSet::empty() } else { rec.guess };
        let c = (0..k)
            .map(Color::Nat)
            .find(|c| !guess.contains(c))
            .ok_or_else(|| AdversaryError::Internal(format!("logician {p} guessed every colour")))?;
        hats[p] = Some(c);
        left.remove(&p);
    }
    certify(&spec, profile, budget, hats.into_iter().map(|c| c.expect("all coloured")).collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceReport {
    pub lambda: usize,
    pub kappa: u64,
    pub gamma: usize,
    pub profiles: u64,
    /// Profiles with a losing coloring.
    pub defeated: u64,
    /// Index of the first profile that wins everywhere, if any.
    pub first_winning: Option<u64>,
}

fn subsets_of_size(k: u64, size: usize) -> Vec<GuessSet> {
    fn rec(k: u64, size: usize, start: u64, cur: &mut Vec<u64>, out: &mut Vec<GuessSet>) {
        if cur.len() == size {
            out.push(cur.iter().copied().collect());
            return;
        }
        for c in start..k {
            cur.push(c);
            rec(k, size, c + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(k, size, 0, &mut Vec::new(), &mut out);
    out
}

/// Tries every strategy profile of the `(λ, κ, γ)`-game against every
/// coloring.
///
/// A profile is determined by what each logician guesses for each view of
/// the other hats, so it suffices to let everyone look at everything; lists
/// can be taken to have exactly `min(γ−1, κ)` colours, since adding colours
/// never loses a game. Profile `i` is read in mixed radix, logician 0 and
/// view 0 most significant.
pub fn strategy_space_defeat(lambda: usize, kappa: u64, gamma: usize, cap: u128) -> Result<SpaceReport, AdversaryError> {
    let spec = GameSpec::finite(lambda, kappa, gamma);
    finite_shape(&spec)?;
    let lists = subsets_of_size(kappa, (gamma - 1).min(kappa as usize));
    let views = (kappa as u128).checked_pow(lambda as u32 - 1).unwrap_or(u128::MAX);
    let per_logician = (lists.len() as u128).checked_pow(views.min(u32::MAX as u128) as u32).unwrap_or(u128::MAX);
    let total = per_logician.checked_pow(lambda as u32).unwrap_or(u128::MAX);
    let games = total.saturating_mul((kappa as u128).pow(lambda as u32));
    if games > cap {
        return Err(AdversaryError::CapExceeded {
            what: "profile-coloring pairs",
            needed: games,
            cap,
        });
    }
    let (views, base) = (views as usize, lists.len() as u64);
    let profile_of = |mut idx: u64| {
        let mut table = vec![vec![GuessSet::empty(); views]; lambda];
        for row in table.iter_mut().rev() {
            for cell in row.iter_mut().rev() {
                *cell = lists[(idx % base) as usize].clone();
                idx /= base;
            }
        }
        TableProfile { k: kappa, table }
    };
    let results: Vec<bool> = (0..total as u64)
        .into_par_iter()
        .map(|i| {
            let p = profile_of(i);
            crate::engine::all_colorings(lambda, kappa)
                .any(|hats| run_game(&spec, &p, &Coloring::Table { hats }, lambda).map_or(true, |t| !t.won()))
        })
        .collect();
    Ok(SpaceReport {
        lambda,
        kappa,
        gamma,
        profiles: total as u64,
        defeated: results.iter().filter(|&&d| d).count() as u64,
        first_winning: results.iter().position(|&d| !d).map(|i| i as u64),
    })
}

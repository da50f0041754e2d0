use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use super::AdversaryError;
use crate::engine::{
    block_geometric_pmf, sampled_colorings, tournament, ColorLaw, GameSpec, GuessBound, Palette, Population, Profile, Violation,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefuteReport {
    pub strategy: String,
    pub window: usize,
    pub trials: u64,
    pub wins: u64,
    pub seed: u64,
    pub confidence: f64,
    /// Empirical win rate; absent when no games were played.
    pub rate: Option<f64>,
    /// Two-sided Wilson score interval; absent when no games were played.
    pub interval: Option<(f64, f64)>,
    /// `Σ_{n<N} 2^{−n−2}`, a bound on the true win probability.
    pub union_bound: f64,
    pub violations: Vec<(Violation, u64)>,
}

/// `Σ_{n<N} 2^{−n−2} = 1/2 − 2^{−N−1}`.
pub fn union_bound(window: usize) -> f64 {
    (0..window).map(|n| (2f64).powi(-(n as i32) - 2)).sum()
}

/// Probability that some logician wins when everyone guesses colour `c`.
pub fn constant_guess_win_probability(window: usize, c: u64) -> f64 {
    1.0 - (0..window).map(|n| 1.0 - block_geometric_pmf(n, c)).product::<f64>()
}

/// Wilson score interval for `wins` out of `trials` at the given two-sided
/// confidence level.
pub fn wilson_interval(wins: u64, trials: u64, confidence: f64) -> Option<(f64, f64)> {
    if trials == 0 || !(0.0..1.0).contains(&confidence) {
        return None;
    }
    let z = Normal::new(0.0, 1.0).ok()?.inverse_cdf(1.0 - (1.0 - confidence) / 2.0);
    let n = trials as f64;
    let p = wins as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    Some(((center - half).max(0.0), (center + half).min(1.0)))
}

/// Plays the `(ω, ω, 2)`-game on a window of `N` logicians against colourings
/// in which logician `n` wears `m` with probability
/// `2^{−(n+2+⌊m/2^{n+1}⌋)}` (never above `2^{−n−2}`), independently.
/// Whatever the strategy, each logician is right with probability at most
/// `2^{−n−2}`, so the logicians win less than half the time.
pub fn randomized_refute(
    spec: &GameSpec,
    profile: &dyn Profile,
    trials: u64,
    seed: u64,
    budget: usize,
    confidence: f64,
) -> Result<RefuteReport, AdversaryError> {
    spec.validate()?;
    let window = match spec.population {
        Population::Window(n) | Population::Finite(n) => n,
        Population::Omega => return Err(AdversaryError::Precondition("truncate the ω-game first".into())),
    };
    if spec.palette != Palette::Naturals || spec.guess_bound != GuessBound::AtMost(1) {
        return Err(AdversaryError::Precondition("needs the naturals palette with single guesses".into()));
    }
    let s = tournament(spec, profile, sampled_colorings(window, ColorLaw::BlockGeometric, seed, trials), budget)?;
    Ok(RefuteReport {
        strategy: profile.name(),
        window,
        trials: s.games,
        wins: s.wins,
        seed,
        confidence,
        rate: (s.games > 0).then(|| s.wins as f64 / s.games as f64),
        interval: wilson_interval(s.wins, s.games, confidence),
        union_bound: union_bound(window),
        violations: s.violations.into_iter().collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{truncate, Visibility};
    use crate::strategies::ConstantGuess;

    fn window(n: usize) -> GameSpec {
        let omega = GameSpec {
            population: Population::Omega,
            visibility: Visibility::Full,
            palette: Palette::Naturals,
            guess_bound: GuessBound::AtMost(1),
        };
        truncate(&omega, n).unwrap()
    }

    #[test]
    fn wilson_known_values() {
        // 50/100 at 95%: centre 0.5, half-width ≈ 0.0962
        let (lo, hi) = wilson_interval(50, 100, 0.95).unwrap();
        assert!((lo - 0.4038).abs() < 1e-3 && (hi - 0.5962).abs() < 1e-3, "{lo} {hi}");
        let (lo, _) = wilson_interval(0, 10, 0.99).unwrap();
        assert_eq!(lo, 0.0);
        assert!(wilson_interval(0, 0, 0.99).is_none());
    }

    #[test]
    fn union_bound_closed_form() {
        for n in [1, 5, 20] {
            assert!((union_bound(n) - (0.5 - (2f64).powi(-(n as i32) - 1))).abs() < 1e-15);
        }
    }

    #[test]
    fn constant_guess_matches_analytic_rate() {
        let spec = window(20);
        let r = randomized_refute(&spec, &ConstantGuess::color(0), 20_000, 3, 4, 0.999).unwrap();
        let p = constant_guess_win_probability(20, 0);
        let (lo, hi) = r.interval.unwrap();
        assert!(lo <= p && p <= hi, "{p} not in [{lo}, {hi}]");
        assert!(p < r.union_bound);
    }

    #[test]
    fn no_trials_no_claim() {
        let r = randomized_refute(&window(5), &ConstantGuess::color(0), 0, 0, 4, 0.99).unwrap();
        assert_eq!((r.rate, r.interval), (None, None));
    }
}

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::color::{Color, GuessSet, Seen};
use super::coloring::{game_seed, ColorLaw, Coloring};
use super::spec::{GameSpec, LookRule};
use super::EngineError;

/// Ways a logician can break the rules. A violating logician never wins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Violation {
    SelfLook,
    Visibility,
    BudgetExceeded,
    GuessTooLong,
}

/// Why a strategy stopped before producing a guess.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Halt {
    /// The look broke a rule; the logician is out of this play.
    Violation(Violation),
    /// The hat asked for is not available yet. Only partial hat sources
    /// (adversaries, step-by-step replays) produce this.
    Unknown(usize),
}

impl From<Violation> for Halt {
    fn from(v: Violation) -> Self {
        Halt::Violation(v)
    }
}

/// A logician's view of the other hats, one look at a time.
pub trait Eyes {
    fn look(&mut self, target: usize) -> Result<Seen, Halt>;
}

/// A strategy profile: what every logician does.
///
/// `play` is written in direct style: call `eyes.look(j)?` for each hat you
/// want, then return the guess. Halts must be propagated unchanged.
/// Implementations must be deterministic functions of the answers they get.
pub trait Profile: Send + Sync {
    fn name(&self) -> String;
    fn play(&self, me: usize, eyes: &mut dyn Eyes) -> Result<GuessSet, Halt>;
}

impl<P: Profile + ?Sized> Profile for Box<P> {
    fn name(&self) -> String {
        (**self).name()
    }
    fn play(&self, me: usize, eyes: &mut dyn Eyes) -> Result<GuessSet, Halt> {
        (**self).play(me, eyes)
    }
}

impl<P: Profile + ?Sized> Profile for std::sync::Arc<P> {
    fn name(&self) -> String {
        (**self).name()
    }
    fn play(&self, me: usize, eyes: &mut dyn Eyes) -> Result<GuessSet, Halt> {
        (**self).play(me, eyes)
    }
}

/// One step of an interactive strategy.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Action {
    Look(usize),
    Guess(GuessSet),
}

/// A strategy given as a function from the look history to the next action.
pub trait StepStrategy: Send + Sync {
    fn name(&self) -> String;
    fn act(&self, me: usize, history: &[(usize, Seen)]) -> Action;
}

/// Adapts a [`StepStrategy`] to a [`Profile`].
pub struct Stepwise<S>(pub S);

impl<S: StepStrategy> Profile for Stepwise<S> {
    fn name(&self) -> String {
        self.0.name()
    }

    fn play(&self, me: usize, eyes: &mut dyn Eyes) -> Result<GuessSet, Halt> {
        let mut history = Vec::new();
        loop {
            match self.0.act(me, &history) {
                Action::Look(t) => {
                    let seen = eyes.look(t)?;
                    history.push((t, seen));
                }
                Action::Guess(g) => return Ok(g),
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Look {
    pub target: usize,
    pub seen: Seen,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogicianRecord {
    pub id: usize,
    /// Distinct hats looked at, in order of first look.
    pub looks: Vec<Look>,
    pub guess: GuessSet,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub violation: Option<Violation>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub winners: BTreeSet<usize>,
    pub violations: Vec<(usize, Violation)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    pub hats: Vec<Color>,
    pub logicians: Vec<LogicianRecord>,
    pub verdict: Verdict,
}

impl Transcript {
    pub fn won(&self) -> bool {
        !self.verdict.winners.is_empty()
    }
}

/// Calls to `look` allowed per unit of budget. Repeated looks at a hat
/// already seen are free, so this only stops strategies that spin.
const CALLS_PER_LOOK: u64 = 1 << 14;

struct GameEyes<'a> {
    spec: &'a GameSpec,
    me: usize,
    source: &'a dyn Fn(usize) -> Option<Color>,
    budget: usize,
    looks: Vec<Look>,
    cache: HashMap<usize, Seen>,
    calls: u64,
}

impl Eyes for GameEyes<'_> {
    fn look(&mut self, target: usize) -> Result<Seen, Halt> {
        self.calls += 1;
        if self.calls > (self.budget.max(1) as u64).saturating_mul(CALLS_PER_LOOK) {
            return Err(Violation::BudgetExceeded.into());
        }
        if let Some(s) = self.cache.get(&target) {
            return Ok(s.clone());
        }
        if self.looks.len() >= self.budget {
            return Err(Violation::BudgetExceeded.into());
        }
        let seen = match self.spec.look_rule(self.me, target) {
            LookRule::SelfLook => return Err(Violation::SelfLook.into()),
            LookRule::Forbidden => return Err(Violation::Visibility.into()),
            LookRule::OutOfWindow => Seen::OutOfWindow,
            LookRule::Allowed => Seen::Hat((self.source)(target).ok_or(Halt::Unknown(target))?),
        };
        self.looks.push(Look {
            target,
            seen: seen.clone(),
        });
        self.cache.insert(target, seen.clone());
        Ok(seen)
    }
}

/// Result of driving one logician against a possibly partial hat source.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Done(LogicianRecord),
    /// The logician wanted to look at this hat, which the source lacks.
    NeedsHat(usize),
}

/// Runs logician `me` to completion. `source` answers hats by id; the
/// logician's own hat is never requested.
pub fn run_logician(
    spec: &GameSpec,
    profile: &dyn Profile,
    me: usize,
    source: &dyn Fn(usize) -> Option<Color>,
    budget: usize,
) -> Outcome {
    let mut eyes = GameEyes {
        spec,
        me,
        source,
        budget,
        looks: Vec::new(),
        cache: HashMap::new(),
        calls: 0,
    };
    let (guess, violation) = match profile.play(me, &mut eyes) {
        Ok(g) => {
            let too_long = spec.guess_bound.limit().is_some_and(|g_max| g.len_capped(g_max) > g_max);
            (g, too_long.then_some(Violation::GuessTooLong))
        }
        Err(Halt::Violation(v)) => (GuessSet::empty(), Some(v)),
        Err(Halt::Unknown(t)) => return Outcome::NeedsHat(t),
    };
    Outcome::Done(LogicianRecord {
        id: me,
        looks: eyes.looks,
        guess,
        violation,
    })
}

/// Plays one game on a finite or truncated spec.
pub fn run_game(spec: &GameSpec, profile: &dyn Profile, coloring: &Coloring, budget: usize) -> Result<Transcript, EngineError> {
    spec.validate()?;
    let n = spec.size().ok_or(EngineError::NotTruncated)?;
    coloring.validate(spec)?;
    let hats = coloring.materialize(n)?;
    let source = |t: usize| hats.get(t).cloned();
    let mut logicians = Vec::with_capacity(n);
    for me in 0..n {
        match run_logician(spec, profile, me, &source, budget) {
            Outcome::Done(r) => logicians.push(r),
            Outcome::NeedsHat(t) => return Err(EngineError::MissingHat(t)),
        }
    }
    let verdict = judge(&hats, &logicians);
    Ok(Transcript { hats, logicians, verdict })
}

fn judge(hats: &[Color], logicians: &[LogicianRecord]) -> Verdict {
    let winners = logicians
        .iter()
        .filter(|r| r.violation.is_none() && r.guess.contains(&hats[r.id]))
        .map(|r| r.id)
        .collect();
    let violations = logicians.iter().filter_map(|r| r.violation.map(|v| (r.id, v))).collect();
    Verdict { winners, violations }
}

/// Recomputes the verdict from the raw records and compares.
pub fn check_verdict(t: &Transcript, spec: &GameSpec, budget: usize) -> bool {
    let mut winners = BTreeSet::new();
    let mut violations = Vec::new();
    for (i, r) in t.logicians.iter().enumerate() {
        if r.id != i || r.looks.len() > budget {
            return false;
        }
        if let Some(v) = r.violation {
            violations.push((i, v));
            continue;
        }
        if let Some(g) = spec.guess_bound.limit() {
            if r.guess.len_capped(g) > g {
                return false;
            }
        }
        if r.guess.contains(&t.hats[i]) {
            winners.insert(i);
        }
    }
    winners == t.verdict.winners && violations == t.verdict.violations
}

struct ReplayEyes<'a> {
    history: &'a [(usize, Seen)],
    pos: usize,
    mismatch: Option<EngineError>,
}

impl Eyes for ReplayEyes<'_> {
    fn look(&mut self, target: usize) -> Result<Seen, Halt> {
        if let Some((_, s)) = self.history[..self.pos].iter().find(|(t, _)| *t == target) {
            return Ok(s.clone());
        }
        match self.history.get(self.pos) {
            None => Err(Halt::Unknown(target)),
            Some((t, s)) if *t == target => {
                self.pos += 1;
                Ok(s.clone())
            }
            Some((t, _)) => {
                self.mismatch = Some(EngineError::HistoryMismatch {
                    index: self.pos,
                    recorded: *t,
                    asked: target,
                });
                Err(Halt::Unknown(target))
            }
        }
    }
}

/// The next action of logician `me` after `history` (distinct looks in
/// order, with what they showed).
pub fn next_action(profile: &dyn Profile, me: usize, history: &[(usize, Seen)]) -> Result<Action, EngineError> {
    let mut eyes = ReplayEyes {
        history,
        pos: 0,
        mismatch: None,
    };
    let r = profile.play(me, &mut eyes);
    if let Some(e) = eyes.mismatch {
        return Err(e);
    }
    match r {
        Ok(g) => Ok(Action::Guess(g)),
        Err(Halt::Unknown(t)) => Ok(Action::Look(t)),
        Err(h) => Err(EngineError::Halted(h)),
    }
}

/// How many losing colorings a [`TournamentSummary`] keeps verbatim.
pub const LOSS_SAMPLE_LIMIT: usize = 64;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TournamentSummary {
    pub games: u64,
    pub wins: u64,
    pub losses: u64,
    /// The first losing colorings, in iteration order.
    pub loss_colorings: Vec<Vec<Color>>,
    pub games_with_violations: u64,
    pub violations: BTreeMap<Violation, u64>,
}

const CHUNK: usize = 4096;

/// Plays every coloring and aggregates. Games run in parallel; the summary
/// does not depend on scheduling.
pub fn tournament<I>(spec: &GameSpec, profile: &dyn Profile, colorings: I, budget: usize) -> Result<TournamentSummary, EngineError>
where
    I: IntoIterator<Item = Vec<Color>>,
{
    let mut summary = TournamentSummary::default();
    let mut it = colorings.into_iter();
    loop {
        let chunk: Vec<Vec<Color>> = it.by_ref().take(CHUNK).collect();
        if chunk.is_empty() {
            break;
        }
        let results: Vec<Result<Transcript, EngineError>> = chunk
            .into_par_iter()
            .map(|hats| run_game(spec, profile, &Coloring::Table { hats }, budget))
            .collect();
        for r in results {
            let t = r?;
            summary.games += 1;
            if t.won() {
                summary.wins += 1;
            } else {
                summary.losses += 1;
                if summary.loss_colorings.len() < LOSS_SAMPLE_LIMIT {
                    summary.loss_colorings.push(t.hats.clone());
                }
            }
            if !t.verdict.violations.is_empty() {
                summary.games_with_violations += 1;
            }
            for (_, v) in &t.verdict.violations {
                *summary.violations.entry(*v).or_default() += 1;
            }
        }
    }
    Ok(summary)
}

/// `count` colorings of `n` logicians; game `i` is drawn from `law` with
/// seed `game_seed(master, i)`.
pub fn sampled_colorings(n: usize, law: ColorLaw, master: u64, count: u64) -> impl Iterator<Item = Vec<Color>> {
    (0..count).map(move |i| {
        let c = Coloring::Seeded {
            seed: game_seed(master, i),
            law,
        };
        (0..n).map(|j| c.color(j).expect("seeded colorings are total")).collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{Palette, Population, Visibility};

    /// Looks at everyone in `targets`, then guesses the sum of what it saw.
    struct LookAt(Vec<usize>);

    impl Profile for LookAt {
        fn name(&self) -> String {
            "look-at".into()
        }
        fn play(&self, _me: usize, eyes: &mut dyn Eyes) -> Result<GuessSet, Halt> {
            let mut s = 0;
            for &t in &self.0 {
                s += eyes.look(t)?.nat().unwrap_or(0);
            }
            Ok(GuessSet::single(s))
        }
    }

    struct Spin;

    impl Profile for Spin {
        fn name(&self) -> String {
            "spin".into()
        }
        fn play(&self, me: usize, eyes: &mut dyn Eyes) -> Result<GuessSet, Halt> {
            let other = if me == 0 { 1 } else { 0 };
            loop {
                eyes.look(other)?;
            }
        }
    }

    fn spec3() -> GameSpec {
        GameSpec::finite(3, 3, 2)
    }

    #[test]
    fn self_look_and_budget_are_violations() {
        let t = run_game(&spec3(), &LookAt(vec![0]), &Coloring::table([0u64, 0, 0]), 5).unwrap();
        assert_eq!(t.logicians[0].violation, Some(Violation::SelfLook));
        assert_eq!(t.verdict.winners, [1, 2].into_iter().collect());

        let t = run_game(&spec3(), &LookAt(vec![1, 2, 1]), &Coloring::table([2u64, 1, 1]), 1).unwrap();
        assert_eq!(t.logicians[0].violation, Some(Violation::BudgetExceeded));
        assert!(t.logicians.iter().all(|r| r.looks.len() <= 1));
        assert!(check_verdict(&t, &spec3(), 1));
    }

    #[test]
    fn repeated_looks_are_free_but_spinning_is_stopped() {
        let t = run_game(&spec3(), &LookAt(vec![1, 1, 1]), &Coloring::table([0u64, 1, 1]), 1).unwrap();
        assert_eq!(t.logicians[0].violation, None);
        assert_eq!(t.logicians[0].looks.len(), 1);
        let t = run_game(&spec3(), &Spin, &Coloring::table([0u64, 1, 1]), 3).unwrap();
        assert!(t.verdict.violations.iter().all(|(_, v)| *v == Violation::BudgetExceeded));
    }

    #[test]
    fn chain_visibility() {
        let spec = GameSpec {
            population: Population::Window(4),
            visibility: Visibility::Chain,
            palette: Palette::Naturals,
            guess_bound: crate::engine::GuessBound::FiniteList,
        };
        let t = run_game(&spec, &LookAt(vec![2]), &Coloring::table([5u64, 5, 5, 5]), 4).unwrap();
        assert_eq!(t.logicians[3].violation, Some(Violation::Visibility));
        assert_eq!(t.logicians[2].violation, Some(Violation::SelfLook));
        assert_eq!(t.logicians[0].violation, None);
    }

    #[test]
    fn guess_too_long() {
        struct Two;
        impl Profile for Two {
            fn name(&self) -> String {
                "two".into()
            }
            fn play(&self, _: usize, _: &mut dyn Eyes) -> Result<GuessSet, Halt> {
                Ok([0u64, 1].into_iter().collect())
            }
        }
        let t = run_game(&spec3(), &Two, &Coloring::table([0u64, 0, 0]), 0).unwrap();
        assert!(t.verdict.winners.is_empty());
        assert_eq!(t.verdict.violations.len(), 3);
    }

    #[test]
    fn omega_needs_truncation_and_palette_is_checked() {
        let spec = GameSpec::omega_chain(Palette::Naturals);
        assert_eq!(run_game(&spec, &LookAt(vec![]), &Coloring::table([0u64]), 1), Err(EngineError::NotTruncated));
        assert!(matches!(
            run_game(&spec3(), &LookAt(vec![]), &Coloring::table([0u64, 3, 0]), 1),
            Err(EngineError::OffPalette { logician: 1, .. })
        ));
    }

    #[test]
    fn step_replay() {
        let p = LookAt(vec![2, 1]);
        assert_eq!(next_action(&p, 0, &[]).unwrap(), Action::Look(2));
        let h = [(2, Seen::Hat(Color::Nat(4)))];
        assert_eq!(next_action(&p, 0, &h).unwrap(), Action::Look(1));
        let h = [(2, Seen::Hat(Color::Nat(4))), (1, Seen::Hat(Color::Nat(3)))];
        assert_eq!(next_action(&p, 0, &h).unwrap(), Action::Guess(GuessSet::single(7u64)));
        let bad = [(1, Seen::Hat(Color::Nat(4)))];
        assert!(matches!(next_action(&p, 0, &bad), Err(EngineError::HistoryMismatch { .. })));
    }

    #[test]
    fn stepwise_matches_direct() {
        struct Sum;
        impl StepStrategy for Sum {
            fn name(&self) -> String {
                "sum".into()
            }
            fn act(&self, me: usize, history: &[(usize, Seen)]) -> Action {
                let next = (0..3).filter(|&j| j != me).nth(history.len());
                match next {
                    Some(j) => Action::Look(j),
                    None => Action::Guess(GuessSet::single(history.iter().filter_map(|(_, s)| s.nat()).sum::<u64>())),
                }
            }
        }
        let spec = GameSpec::finite(3, 10, 2);
        for hats in crate::engine::all_colorings(3, 4) {
            let c = Coloring::Table { hats };
            let a = run_game(&spec, &Stepwise(Sum), &c, 3).unwrap();
            let guesses: Vec<_> = a.logicians.iter().map(|r| r.guess.clone()).collect();
            for (me, g) in guesses.iter().enumerate() {
                let others: Vec<usize> = (0..3).filter(|&j| j != me).collect();
                let b = run_game(&spec, &LookAt(others), &c, 3).unwrap();
                assert_eq!(&b.logicians[me].guess, g);
            }
        }
    }

    #[test]
    fn tournament_counts_and_empty_input() {
        let s = tournament(&spec3(), &LookAt(vec![]), std::iter::empty(), 1).unwrap();
        assert_eq!(s, TournamentSummary::default());
        let s = tournament(&spec3(), &LookAt(vec![]), crate::engine::all_colorings(3, 3), 1).unwrap();
        // everyone guesses 0: lose exactly when no hat is 0
        assert_eq!(s.games, 27);
        assert_eq!(s.losses, 8);
        assert_eq!(s.loss_colorings[0], vec![Color::Nat(1); 3]);
    }
}

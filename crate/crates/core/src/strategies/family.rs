use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::StrategyError;
use crate::engine::{run_logician, Color, Eyes, GameSpec, GuessSet, Halt, Outcome, Palette, Profile};
use crate::freesubset::{for_each_tuple, Compiled, FunctionFamily, Member, MAX_TABLE};

/// A countable family of profiles given by its first members, plus an
/// optional extra profile for colourings with few colours.
#[derive(Clone, Default)]
pub struct StrategyFamily {
    pub members: Vec<Arc<dyn Profile>>,
    pub star: Option<Arc<dyn Profile>>,
}

impl StrategyFamily {
    pub fn new(members: Vec<Arc<dyn Profile>>) -> Self {
        Self { members, star: None }
    }

    /// The order combinators try the profiles in: the extra one first.
    pub fn sequence(&self) -> Vec<Arc<dyn Profile>> {
        self.star.iter().cloned().chain(self.members.iter().cloned()).collect()
    }

    pub fn names(&self) -> Vec<String> {
        self.sequence().iter().map(|p| p.name()).collect()
    }
}

/// Which hats the `N`-th family strategy uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reach {
    /// Logicians `0..=N` other than oneself (unrestricted games).
    Prefix,
    /// Logicians `n+1..=n+N` (well-ordered games).
    Forward,
}

/// `τ^N`: logician `n` guesses `f_j(t)` for every member `j ≤ N` and every
/// tuple `t` of hats it sees.
pub struct FamilyTau {
    family: Arc<Compiled>,
    n: usize,
    reach: Reach,
}

impl Profile for FamilyTau {
    fn name(&self) -> String {
        format!("tau({},{})", self.n, if self.reach == Reach::Prefix { "prefix" } else { "forward" })
    }

    fn play(&self, me: usize, eyes: &mut dyn Eyes) -> Result<GuessSet, Halt> {
        let targets: Vec<usize> = match self.reach {
            Reach::Prefix => (0..=self.n).filter(|&t| t != me).collect(),
            Reach::Forward => (me + 1..=me + self.n).collect(),
        };
        let mut pos = BTreeSet::new();
        for t in targets {
            if let Some(p) = eyes.look(t)?.nat().and_then(|v| self.family.position(v)) {
                pos.insert(p);
            }
        }
        let pos: Vec<usize> = pos.into_iter().collect();
        let mut out = 0u64;
        for j in 0..self.family.member_count().min(self.n + 1) {
            for_each_tuple(&pos, self.family.arity(j), |t| {
                out |= self.family.out(j, t);
                true
            });
        }
        Ok(self.family.set_of(out).into_iter().collect())
    }
}

/// `τ_*`: logician `n` guesses the hats of logicians below `n`.
#[derive(Debug, Clone, Copy, Default)]
pub struct TauStar;

impl Profile for TauStar {
    fn name(&self) -> String {
        "tau-star".into()
    }

    fn play(&self, me: usize, eyes: &mut dyn Eyes) -> Result<GuessSet, Halt> {
        let mut g = GuessSet::empty();
        for t in 0..me {
            if let Some(c) = eyes.look(t)?.hat() {
                g.insert(c.clone());
            }
        }
        Ok(g)
    }
}

/// The strategies `τ^0, …, τ^{count−1}` built from a family, plus `τ_*` for
/// unrestricted games. Hats outside the ground set are ignored.
pub fn family_to_strategies(f: &FunctionFamily, palette: Palette, reach: Reach, count: usize) -> Result<StrategyFamily, StrategyError> {
    let fits = match palette {
        Palette::Finite(k) => f.ground().iter().all(|&v| v < k),
        Palette::Naturals => true,
        Palette::Ordinals => false,
    };
    if !fits {
        return Err(StrategyError::Unsupported(format!("ground set does not fit the palette {palette:?}")));
    }
    let c = Arc::new(Compiled::new(f)?);
    let members = (0..count)
        .map(|n| {
            Arc::new(FamilyTau {
                family: Arc::clone(&c),
                n,
                reach,
            }) as Arc<dyn Profile>
        })
        .collect();
    Ok(StrategyFamily {
        members,
        star: (reach == Reach::Prefix).then(|| Arc::new(TauStar) as Arc<dyn Profile>),
    })
}

/// Reads off each logician's guess as a function of everyone else's hats:
/// member `n` has arity `N−1` and maps the other hats, in id order, to
/// logician `n`'s guess. Needs a finite palette and population of at least
/// two; guesses outside the palette are dropped.
pub fn strategies_to_family(spec: &GameSpec, profile: &dyn Profile, budget: usize) -> Result<FunctionFamily, StrategyError> {
    spec.validate()?;
    let n = spec.size().ok_or_else(|| StrategyError::Unsupported("population must be finite".into()))?;
    let k = match spec.palette {
        Palette::Finite(k) => k,
        p => return Err(StrategyError::Unsupported(format!("palette {p:?} is not finite"))),
    };
    if n < 2 {
        return Err(StrategyError::Unsupported("need at least two logicians".into()));
    }
    let rows = (k as u128).checked_pow((n - 1) as u32).unwrap_or(u128::MAX);
    if rows > MAX_TABLE {
        return Err(StrategyError::Unsupported(format!("{rows} argument tuples per logician is too many")));
    }
    let mut members = Vec::with_capacity(n);
    for me in 0..n {
        let mut entries = BTreeMap::new();
        for r in 0..rows as u64 {
            let mut args = vec![0u64; n - 1];
            let mut x = r;
            for a in args.iter_mut().rev() {
                *a = x % k;
                x /= k;
            }
            let source = |t: usize| match t.cmp(&me) {
                std::cmp::Ordering::Less => args.get(t).map(|&v| Color::Nat(v)),
                std::cmp::Ordering::Greater => args.get(t - 1).map(|&v| Color::Nat(v)),
                std::cmp::Ordering::Equal => None,
            };
            let rec = match run_logician(spec, profile, me, &source, budget) {
                Outcome::Done(rec) => rec,
                Outcome::NeedsHat(t) => return Err(StrategyError::Unsupported(format!("logician {me} asked for hat {t}"))),
            };
            if let Some(v) = rec.violation {
                return Err(StrategyError::Violated { logician: me, violation: v });
            }
            let out: BTreeSet<u64> = rec
                .guess
                .sequence()
                .unwrap_or_default()
                .iter()
                .filter_map(Color::as_nat)
                .filter(|&c| c < k)
                .collect();
            entries.insert(args.clone(), out);
        }
        members.push(Member::table(n - 1, entries));
    }
    Ok(FunctionFamily::new((0..k).collect(), members)?)
}

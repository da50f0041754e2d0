use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use super::family::StrategyFamily;
use super::sim::{simulate, wins, Sight};
use super::StrategyError;
use crate::engine::{Color, Eyes, GuessSet, Halt, Profile, Seen, Violation};

/// How far the combinators search before giving up and guessing `∅`.
pub const DEFAULT_SEARCH_LIMIT: usize = 64;

fn union_of(
    seq: &[Arc<dyn Profile>],
    upto: usize,
    who: usize,
    sight: Sight,
    map: &dyn Fn(usize) -> usize,
    eyes: &mut dyn Eyes,
) -> Result<GuessSet, Halt> {
    let mut g = GuessSet::empty();
    for p in seq.iter().take(upto) {
        if let Some(x) = simulate(&**p, who, sight, map, eyes)? {
            g.union_with(&x);
        }
    }
    Ok(g)
}

/// Logicians split into two interleaved groups, `p ↦ (p / 2, p mod 2)`.
/// A logician in group `b` finds the least `N` such that some member `j < N`
/// of the family makes some logician `i < N` of the other group win, then
/// guesses the union of its own guesses under the members `j < N`, played
/// inside its own group.
pub struct TwoGroups {
    seq: Vec<Arc<dyn Profile>>,
    limit: usize,
}

pub fn combine_two_groups(fam: &StrategyFamily, search_limit: usize) -> TwoGroups {
    TwoGroups {
        seq: fam.sequence(),
        limit: search_limit,
    }
}

impl Profile for TwoGroups {
    fn name(&self) -> String {
        format!("two-groups[{}]", self.seq.len())
    }

    fn play(&self, me: usize, eyes: &mut dyn Eyes) -> Result<GuessSet, Halt> {
        let (t, b) = (me / 2, me % 2);
        let other = move |v: usize| 2 * v + (1 - b);
        let own = move |v: usize| 2 * v + b;
        let mut memo: HashMap<(usize, usize), bool> = HashMap::new();
        let mut edge = usize::MAX;
        let mut found = None;
        'search: for n in 1..=self.limit {
            let top = n - 1;
            if top >= edge && top >= self.seq.len() {
                break;
            }
            let pairs = (0..n).map(|j| (top, j)).chain((0..top).map(|i| (i, top)));
            for (i, j) in pairs {
                if j >= self.seq.len() || i >= edge {
                    continue;
                }
                let w = match memo.get(&(i, j)) {
                    Some(&w) => w,
                    None => {
                        let w = match wins(&*self.seq[j], i, Sight::Full, &other, eyes)? {
                            Some(w) => w,
                            None => {
                                edge = edge.min(i);
                                false
                            }
                        };
                        memo.insert((i, j), w);
                        w
                    }
                };
                if w {
                    found = Some(n);
                    break 'search;
                }
            }
        }
        match found {
            Some(n) => union_of(&self.seq, n, t, Sight::Full, &own, eyes),
            None => Ok(GuessSet::empty()),
        }
    }
}

/// For well-ordered games: logician `i` finds the least `N` such that some
/// logician in `i+1..=i+N` wins under some member `k ≤ N`, then guesses the
/// union of its own guesses under the members `k ≤ N`.
pub struct WellOrdered {
    seq: Vec<Arc<dyn Profile>>,
    limit: usize,
}

pub fn combine_well_ordered(fam: &StrategyFamily, search_limit: usize) -> WellOrdered {
    WellOrdered {
        seq: fam.sequence(),
        limit: search_limit,
    }
}

impl Profile for WellOrdered {
    fn name(&self) -> String {
        format!("well-ordered[{}]", self.seq.len())
    }

    fn play(&self, me: usize, eyes: &mut dyn Eyes) -> Result<GuessSet, Halt> {
        let id = |v: usize| v;
        let mut edge = usize::MAX;
        let mut found = None;
        'search: for n in 1..=self.limit {
            if me + n >= edge && n >= self.seq.len() {
                break;
            }
            let pairs = (0..=n).map(|k| (me + n, k)).chain((me + 1..me + n).map(|j| (j, n)));
            for (j, k) in pairs {
                if k >= self.seq.len() || j >= edge {
                    continue;
                }
                match wins(&*self.seq[k], j, Sight::Chain, &id, eyes)? {
                    Some(true) => {
                        found = Some(n);
                        break 'search;
                    }
                    Some(false) => {}
                    None => edge = edge.min(j),
                }
            }
        }
        match found {
            Some(n) => union_of(&self.seq, n + 1, me, Sight::Chain, &id, eyes),
            None => Ok(GuessSet::empty()),
        }
    }
}

/// Shorter lists for well-ordered games: logician `n` finds the least `m > n`
/// that wins under `τ`, reads the position `δ` of `h(m)` in `τ_m`'s list
/// (ascending order) and guesses the first `δ + 1` entries of its own list.
pub struct Shrunk {
    tau: Arc<dyn Profile>,
    limit: usize,
}

pub fn shrink_guess_lists(tau: Arc<dyn Profile>, search_limit: usize) -> Shrunk {
    Shrunk { tau, limit: search_limit }
}

impl Shrunk {
    /// Position of `h(m)` in `τ_m`'s list, when `m` wins under `τ`.
    fn delta(&self, m: usize, eyes: &mut dyn Eyes) -> Result<Option<Option<usize>>, Halt> {
        let id = |v: usize| v;
        let hat = match eyes.look(m)? {
            Seen::Hat(c) => c,
            Seen::OutOfWindow => return Ok(None),
        };
        Ok(Some(simulate(&*self.tau, m, Sight::Chain, &id, eyes)?.and_then(|g| g.position(&hat))))
    }
}

impl Profile for Shrunk {
    fn name(&self) -> String {
        format!("shrunk({})", self.tau.name())
    }

    fn play(&self, me: usize, eyes: &mut dyn Eyes) -> Result<GuessSet, Halt> {
        let id = |v: usize| v;
        for m in me + 1..=me + self.limit {
            match self.delta(m, eyes)? {
                None => break,
                Some(None) => continue,
                Some(Some(d)) => {
                    let own = simulate(&*self.tau, me, Sight::Chain, &id, eyes)?;
                    return Ok(own.and_then(|g| g.prefix(d + 1)).unwrap_or_default());
                }
            }
        }
        Ok(GuessSet::empty())
    }
}

/// Composes a well-ordered strategy `τ` whose lists have at most `δ` entries
/// with a well-ordered strategy `ρ` for the palette `δ`.
///
/// Logician `n` of the anchor set `E` (listed increasingly as `e`) plays `ρ`
/// as logician `e⁻¹(n)` on the derived colouring `h′(i)` = position of
/// `h(e(i))` in `τ_{e(i)}`'s list, then guesses the entries of its own `τ`
/// list at the positions `ρ` guesses. Positions are worked out only for the
/// logicians `ρ` actually looks at; if one of them is missing (hat not in the
/// list, or `e(i)` beyond `E`) the guess is `∅`. Logicians outside `E` guess
/// `∅`. Without an anchor set, `E` is everyone.
pub struct Composed {
    tau: Arc<dyn Profile>,
    rho: Arc<dyn Profile>,
    delta: u64,
    anchor: Option<Vec<usize>>,
}

pub fn compose_cardinality(
    tau: Arc<dyn Profile>,
    rho: Arc<dyn Profile>,
    delta: u64,
    anchor: Option<BTreeSet<usize>>,
) -> Result<Composed, StrategyError> {
    if delta == 0 {
        return Err(StrategyError::BadParameter("δ must be positive".into()));
    }
    Ok(Composed {
        tau,
        rho,
        delta,
        anchor: anchor.map(|e| e.into_iter().collect()),
    })
}

struct PositionEyes<'a> {
    outer: &'a mut dyn Eyes,
    c: &'a Composed,
    me_virtual: usize,
    undefined: bool,
    fault: bool,
}

impl PositionEyes<'_> {
    fn real(&self, i: usize) -> Option<usize> {
        match &self.c.anchor {
            Some(e) => e.get(i).copied(),
            None => Some(i),
        }
    }
}

impl Eyes for PositionEyes<'_> {
    fn look(&mut self, i: usize) -> Result<Seen, Halt> {
        if i <= self.me_virtual {
            self.fault = true;
            let v = if i == self.me_virtual { Violation::SelfLook } else { Violation::Visibility };
            return Err(v.into());
        }
        let Some(m) = self.real(i) else {
            self.undefined = true;
            return Err(Violation::Visibility.into());
        };
        let hat = match self.outer.look(m)? {
            Seen::Hat(c) => c,
            Seen::OutOfWindow => return Ok(Seen::OutOfWindow),
        };
        let id = |v: usize| v;
        let pos = simulate(&*self.c.tau, m, Sight::Chain, &id, self.outer)?.and_then(|g| g.position(&hat));
        match pos {
            Some(p) if (p as u64) < self.c.delta => Ok(Seen::Hat(Color::Nat(p as u64))),
            _ => {
                self.undefined = true;
                Err(Violation::Visibility.into())
            }
        }
    }
}

impl Profile for Composed {
    fn name(&self) -> String {
        format!("composed({},{},{})", self.tau.name(), self.rho.name(), self.delta)
    }

    fn play(&self, me: usize, eyes: &mut dyn Eyes) -> Result<GuessSet, Halt> {
        let me_virtual = match &self.anchor {
            Some(e) => match e.iter().position(|&x| x == me) {
                Some(i) => i,
                None => return Ok(GuessSet::empty()),
            },
            None => me,
        };
        let mut pe = PositionEyes {
            outer: eyes,
            c: self,
            me_virtual,
            undefined: false,
            fault: false,
        };
        let positions = self.rho.play(me_virtual, &mut pe);
        if pe.undefined || pe.fault {
            return Ok(GuessSet::empty());
        }
        let positions = positions?;
        let id = |v: usize| v;
        let own = simulate(&*self.tau, me, Sight::Chain, &id, eyes)?;
        Ok(own.and_then(|g| g.at_positions(&positions)).unwrap_or_default())
    }
}

use crate::engine::{Eyes, GuessSet, Halt, Profile, Seen, Violation};

/// Which looks a simulated logician may make in its own game.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sight {
    Full,
    Chain,
}

impl Sight {
    fn allows(self, who: usize, target: usize) -> bool {
        match self {
            Sight::Full => target != who,
            Sight::Chain => target > who,
        }
    }
}

struct SimEyes<'a> {
    outer: &'a mut dyn Eyes,
    who: usize,
    sight: Sight,
    map: &'a dyn Fn(usize) -> usize,
    fault: bool,
}

impl Eyes for SimEyes<'_> {
    fn look(&mut self, target: usize) -> Result<Seen, Halt> {
        if !self.sight.allows(self.who, target) {
            self.fault = true;
            let v = if target == self.who { Violation::SelfLook } else { Violation::Visibility };
            return Err(v.into());
        }
        self.outer.look((self.map)(target))
    }
}

/// Plays `profile` as logician `who` of a virtual game whose logician `t` is
/// the real logician `map(t)`, through the caller's eyes. `Ok(None)` means
/// the simulated logician broke the rules of its own game; halts of the
/// caller's eyes propagate.
pub(crate) fn simulate(
    profile: &dyn Profile,
    who: usize,
    sight: Sight,
    map: &dyn Fn(usize) -> usize,
    eyes: &mut dyn Eyes,
) -> Result<Option<GuessSet>, Halt> {
    let mut sim = SimEyes {
        outer: eyes,
        who,
        sight,
        map,
        fault: false,
    };
    let r = profile.play(who, &mut sim);
    if sim.fault {
        return Ok(None);
    }
    r.map(Some)
}

/// Does logician `who` of the virtual game win under `profile`?
pub(crate) fn wins(
    profile: &dyn Profile,
    who: usize,
    sight: Sight,
    map: &dyn Fn(usize) -> usize,
    eyes: &mut dyn Eyes,
) -> Result<Option<bool>, Halt> {
    let hat = match eyes.look(map(who))? {
        Seen::Hat(c) => c,
        Seen::OutOfWindow => return Ok(None),
    };
    Ok(Some(simulate(profile, who, sight, map, eyes)?.is_some_and(|g| g.contains(&hat))))
}

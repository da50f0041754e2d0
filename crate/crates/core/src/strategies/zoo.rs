use std::collections::BTreeMap;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::engine::{Color, Eyes, GameSpec, GuessSet, Halt, LookRule, Palette, Profile, Seen};
use crate::ordinal::{code, Ordinal};

fn nat_or_zero(s: &Seen) -> u64 {
    s.nat().unwrap_or(0)
}

/// The `(n, n, 2)` strategy: logician `i` guesses `i − s mod n`, where `s` is
/// the sum of the hats it sees. Exactly the logician `total mod n` wins.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModularSum {
    pub n: usize,
}

impl Profile for ModularSum {
    fn name(&self) -> String {
        format!("modular-sum({})", self.n)
    }

    fn play(&self, me: usize, eyes: &mut dyn Eyes) -> Result<GuessSet, Halt> {
        let n = self.n.max(1) as u64;
        let mut s = 0u64;
        for j in (0..self.n).filter(|&j| j != me) {
            s = (s + nat_or_zero(&eyes.look(j)?) % n) % n;
        }
        Ok(GuessSet::single((me as u64 % n + n - s) % n))
    }
}

/// The `(λ, λ(γ−1), γ)` strategy. Residues mod `M = λ(γ−1)` are cut into λ
/// blocks of `γ−1`; logician `i` guesses the hats that would put the total
/// into block `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockCover {
    pub lambda: usize,
    pub gamma: usize,
}

impl BlockCover {
    pub fn modulus(&self) -> u64 {
        (self.lambda * self.gamma.saturating_sub(1)) as u64
    }
}

impl Profile for BlockCover {
    fn name(&self) -> String {
        format!("block-cover({},{})", self.lambda, self.gamma)
    }

    fn play(&self, me: usize, eyes: &mut dyn Eyes) -> Result<GuessSet, Halt> {
        let m = self.modulus();
        if m == 0 {
            return Ok(GuessSet::empty());
        }
        let mut s = 0u64;
        for j in (0..self.lambda).filter(|&j| j != me) {
            s = (s + nat_or_zero(&eyes.look(j)?) % m) % m;
        }
        let w = (self.gamma - 1) as u64;
        let lo = me as u64 * w;
        Ok((lo..lo + w).map(|b| (b % m + m - s) % m).collect())
    }
}

/// Two logicians over the naturals: each guesses `{0, …, h}` where `h` is the
/// other's hat.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct InitialSegmentPair;

impl Profile for InitialSegmentPair {
    fn name(&self) -> String {
        "initial-segment-pair".into()
    }

    fn play(&self, me: usize, eyes: &mut dyn Eyes) -> Result<GuessSet, Halt> {
        Ok(match eyes.look(1 - me.min(1))?.nat() {
            Some(h) => GuessSet::nat_prefix(h),
            None => GuessSet::empty(),
        })
    }
}

/// Two logicians over the CNF ordinals: seeing `β`, guess every ordinal whose
/// code is at most `code(β)`. The logician with the smaller code wins.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CodeSegmentPair;

impl Profile for CodeSegmentPair {
    fn name(&self) -> String {
        "code-segment-pair".into()
    }

    fn play(&self, me: usize, eyes: &mut dyn Eyes) -> Result<GuessSet, Halt> {
        Ok(match eyes.look(1 - me.min(1))?.hat() {
            Some(c) => GuessSet::code_segment(code(&c.as_ordinal()), None),
            None => GuessSet::empty(),
        })
    }
}

/// λ logicians over the CNF ordinals, by recursion on λ: set aside the
/// holder of the largest visible hat `α` (lowest id among ties) and play the
/// (λ−1)-strategy on the rest with colours below `α+1`. Two logicians left:
/// the code-segment strategy inside the current bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrdinalRecursive {
    pub lambda: usize,
}

impl Profile for OrdinalRecursive {
    fn name(&self) -> String {
        format!("ordinal-recursive({})", self.lambda)
    }

    fn play(&self, me: usize, eyes: &mut dyn Eyes) -> Result<GuessSet, Halt> {
        let mut hats: BTreeMap<usize, Ordinal> = BTreeMap::new();
        for j in (0..self.lambda).filter(|&j| j != me) {
            if let Some(c) = eyes.look(j)?.hat() {
                hats.insert(j, c.as_ordinal());
            }
        }
        let mut bound: Option<Ordinal> = None;
        loop {
            match hats.len() {
                0 => return Ok(GuessSet::empty()),
                1 => {
                    let beta = hats.values().next().expect("one hat");
                    return Ok(GuessSet::code_segment(code(beta), bound));
                }
                _ => {
                    let j = max_holder(&hats).expect("nonempty");
                    bound = match hats[&j].succ() {
                        Ok(b) => Some(b),
                        Err(_) => return Ok(GuessSet::empty()),
                    };
                    hats.remove(&j);
                }
            }
        }
    }
}

/// The logician holding the largest hat, the lowest id among ties. Only the
/// order of the hats matters.
pub fn max_holder<T: Ord>(hats: &BTreeMap<usize, T>) -> Option<usize> {
    hats.iter().max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0))).map(|(&j, _)| j)
}

/// The well-ordered strategy over the naturals: logician `n` looks at `n+1`
/// only and guesses `{0, …, h(n+1)}`; at the window edge it guesses `∅`.
/// The same profile wins the parity-restricted game, since `n+1` always has
/// the other parity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NeighborInitialSegment {
    pub parity: bool,
}

impl Profile for NeighborInitialSegment {
    fn name(&self) -> String {
        if self.parity { "parity-chain" } else { "neighbor" }.into()
    }

    fn play(&self, me: usize, eyes: &mut dyn Eyes) -> Result<GuessSet, Halt> {
        Ok(match eyes.look(me + 1)?.nat() {
            Some(h) => GuessSet::nat_prefix(h),
            None => GuessSet::empty(),
        })
    }
}

/// Everyone guesses the same fixed list without looking.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstantGuess {
    pub guess: GuessSet,
}

impl ConstantGuess {
    pub fn color(c: u64) -> Self {
        Self { guess: GuessSet::single(c) }
    }
}

impl Profile for ConstantGuess {
    fn name(&self) -> String {
        match self.guess.sequence() {
            Some(seq) => format!("constant-guess({})", seq.iter().map(Color::to_string).collect::<Vec<_>>().join(",")),
            None => "constant-guess".into(),
        }
    }

    fn play(&self, _me: usize, _eyes: &mut dyn Eyes) -> Result<GuessSet, Halt> {
        Ok(self.guess.clone())
    }
}

/// A strategy for a finite full-visibility game given as a lookup table:
/// logician `i` looks at everyone else in id order and guesses
/// `table[i][t]`, where `t` reads the seen hats as a base-`k` numeral (lower
/// ids more significant). Unreadable hats give `∅`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableProfile {
    pub k: u64,
    pub table: Vec<Vec<GuessSet>>,
}

impl Profile for TableProfile {
    fn name(&self) -> String {
        format!("table({}x{})", self.table.len(), self.k)
    }

    fn play(&self, me: usize, eyes: &mut dyn Eyes) -> Result<GuessSet, Halt> {
        let mut idx = 0usize;
        for j in (0..self.table.len()).filter(|&j| j != me) {
            match eyes.look(j)?.nat() {
                Some(c) if c < self.k => idx = idx * self.k as usize + c as usize,
                _ => return Ok(GuessSet::empty()),
            }
        }
        Ok(self.table.get(me).and_then(|row| row.get(idx)).cloned().unwrap_or_default())
    }
}

fn mix(h: u64, v: u64) -> u64 {
    // splitmix64 finaliser over an accumulated state
    let mut z = h ^ v.wrapping_add(0x9e37_79b9_7f4a_7c15).wrapping_add(h << 6).wrapping_add(h >> 2);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn seen_key(s: &Seen) -> u64 {
    match s {
        Seen::OutOfWindow => u64::MAX,
        Seen::Hat(Color::Nat(n)) => *n,
        Seen::Hat(Color::Ord(o)) => o.to_string().bytes().fold(7, |h, b| mix(h, b as u64)),
    }
}

/// A seeded pseudo-random strategy that respects the spec: at each step a
/// logician either stops or looks at a random permitted hat, then guesses
/// random colours from the low end of the palette. Every choice depends
/// only on the seed, the logician and what it has seen so far.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sampled {
    spec: GameSpec,
    seed: u64,
    colors: u64,
    max_guess: usize,
}

impl Sampled {
    pub fn new(spec: &GameSpec, seed: u64) -> Self {
        let colors = match spec.palette {
            Palette::Finite(k) => k,
            Palette::Naturals | Palette::Ordinals => 4,
        };
        let max_guess = spec.guess_bound.limit().unwrap_or(2).min(colors as usize).max(1);
        Self {
            spec: spec.clone(),
            seed,
            colors,
            max_guess,
        }
    }

    fn color(&self, c: u64) -> Color {
        match self.spec.palette {
            Palette::Ordinals => Color::Ord(Ordinal::from_nat(c)),
            _ => Color::Nat(c),
        }
    }
}

impl Profile for Sampled {
    fn name(&self) -> String {
        format!("sampled({})", self.seed)
    }

    fn play(&self, me: usize, eyes: &mut dyn Eyes) -> Result<GuessSet, Halt> {
        let n = self.spec.size().unwrap_or(0);
        let mut state = mix(mix(self.seed, 0x5a17), me as u64);
        let mut seen: Vec<usize> = Vec::new();
        loop {
            let mut rng = ChaCha8Rng::seed_from_u64(state);
            let targets: Vec<usize> = (0..n)
                .filter(|&t| !seen.contains(&t) && self.spec.look_rule(me, t) == LookRule::Allowed)
                .collect();
            if targets.is_empty() || rng.gen_ratio(1, 3) {
                let size = rng.gen_range(1..=self.max_guess);
                return Ok(sample(&mut rng, self.colors as usize, size)
                    .into_iter()
                    .map(|c| self.color(c as u64))
                    .collect());
            }
            let t = targets[rng.gen_range(0..targets.len())];
            let s = eyes.look(t)?;
            seen.push(t);
            state = mix(mix(state, t as u64), seen_key(&s));
        }
    }
}

/// A profile from a closure.
pub struct FnProfile<F> {
    name: String,
    f: F,
}

impl<F> FnProfile<F>
where
    F: Fn(usize, &mut dyn Eyes) -> Result<GuessSet, Halt> + Send + Sync,
{
    pub fn new(name: impl Into<String>, f: F) -> Self {
        Self { name: name.into(), f }
    }
}

impl<F> Profile for FnProfile<F>
where
    F: Fn(usize, &mut dyn Eyes) -> Result<GuessSet, Halt> + Send + Sync,
{
    fn name(&self) -> String {
        self.name.clone()
    }

    fn play(&self, me: usize, eyes: &mut dyn Eyes) -> Result<GuessSet, Halt> {
        (self.f)(me, eyes)
    }
}

use std::collections::BTreeMap;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::color::Color;
use super::spec::{GameSpec, Palette};
use super::EngineError;
use crate::ordinal::{random_ordinal, OrdinalShape};

/// Largest logician index for which [`ColorLaw::BlockGeometric`] keeps its
/// per-colour bound; beyond it the block size stops growing.
pub const BLOCK_GEOMETRIC_MAX_INDEX: usize = 48;

/// Per-logician colour distributions for seeded colorings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum ColorLaw {
    /// Uniform on `0..k`.
    Uniform { k: u64 },
    /// Logician `n` gets colour `m` with probability
    /// `2^-(n + 2 + ⌊m / 2^(n+1)⌋)`: a block index `t ~ Geometric(1/2)`
    /// followed by a uniform position inside the block
    /// `[t·2^(n+1), (t+1)·2^(n+1))`. Every colour has positive probability
    /// and none exceeds `2^-(n+2)`.
    BlockGeometric,
    /// Random CNF ordinals of the given shape.
    Ordinals {
        depth: usize,
        max_coefficient: u64,
        max_terms: usize,
    },
}

impl ColorLaw {
    pub fn sample<R: Rng + ?Sized>(&self, index: usize, rng: &mut R) -> Color {
        match *self {
            ColorLaw::Uniform { k } => Color::Nat(rng.gen_range(0..k.max(1))),
            ColorLaw::BlockGeometric => {
                let shift = (index.min(BLOCK_GEOMETRIC_MAX_INDEX) + 1) as u32;
                let block = u64::from(rng.next_u64().trailing_ones());
                let offset = rng.gen_range(0..1u64 << shift);
                Color::Nat(block.saturating_mul(1u64 << shift).saturating_add(offset))
            }
            ColorLaw::Ordinals {
                depth,
                max_coefficient,
                max_terms,
            } => Color::Ord(random_ordinal(
                rng,
                &OrdinalShape {
                    depth,
                    max_coefficient,
                    max_terms,
                },
            )),
        }
    }

    fn fits(&self, palette: &Palette) -> bool {
        match (self, palette) {
            (ColorLaw::Uniform { k }, Palette::Finite(p)) => k <= p,
            (ColorLaw::Uniform { .. }, Palette::Naturals) => true,
            (ColorLaw::BlockGeometric, Palette::Naturals) => true,
            (ColorLaw::Ordinals { .. }, Palette::Ordinals) => true,
            _ => false,
        }
    }
}

/// Probability that [`ColorLaw::BlockGeometric`] gives logician `n` colour `m`.
pub fn block_geometric_pmf(n: usize, m: u64) -> f64 {
    let shift = n.min(BLOCK_GEOMETRIC_MAX_INDEX) as u32 + 1;
    let block = (m >> shift) as f64;
    (2f64).powf(-(n as f64 + 2.0 + block))
}

/// An assignment of hats to logicians.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Coloring {
    /// Explicit colours for logicians `0..hats.len()`.
    Table { hats: Vec<Color> },
    /// Finitely many explicit hats, everyone else wears `default`.
    Sparse {
        #[serde(with = "support_pairs")]
        support: BTreeMap<usize, Color>,
        default: Color,
    },
    /// Logician `i` draws from `law` using the ChaCha8 stream `i` of `seed`.
    Seeded { seed: u64, law: ColorLaw },
}

// Written as `[[id, colour], ...]`; integer map keys do not survive the
// buffering that internally tagged enums need.
mod support_pairs {
    use std::collections::BTreeMap;

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use super::Color;

    pub fn serialize<S: Serializer>(m: &BTreeMap<usize, Color>, s: S) -> Result<S::Ok, S::Error> {
        m.iter().collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<usize, Color>, D::Error> {
        Ok(Vec::<(usize, Color)>::deserialize(d)?.into_iter().collect())
    }
}

impl Coloring {
    pub fn table<C: Into<Color>>(hats: impl IntoIterator<Item = C>) -> Self {
        Coloring::Table {
            hats: hats.into_iter().map(Into::into).collect(),
        }
    }

    pub fn color(&self, i: usize) -> Option<Color> {
        match self {
            Coloring::Table { hats } => hats.get(i).cloned(),
            Coloring::Sparse { support, default } => Some(support.get(&i).unwrap_or(default).clone()),
            Coloring::Seeded { seed, law } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                rng.set_stream(i as u64);
                Some(law.sample(i, &mut rng))
            }
        }
    }

    /// Explicit hats of logicians `0..n`.
    pub fn materialize(&self, n: usize) -> Result<Vec<Color>, EngineError> {
        (0..n).map(|i| self.color(i).ok_or(EngineError::MissingHat(i))).collect()
    }

    pub fn validate(&self, spec: &GameSpec) -> Result<(), EngineError> {
        match self {
            Coloring::Table { hats } => {
                if let Some(n) = spec.size() {
                    if hats.len() < n {
                        return Err(EngineError::MissingHat(hats.len()));
                    }
                }
                for (i, c) in hats.iter().enumerate() {
                    if !spec.palette.contains(c) {
                        return Err(EngineError::OffPalette { logician: i, color: c.to_string() });
                    }
                }
            }
            Coloring::Sparse { support, default } => {
                for (i, c) in support.iter().chain(std::iter::once((&usize::MAX, default))) {
                    if !spec.palette.contains(c) {
                        return Err(EngineError::OffPalette { logician: *i, color: c.to_string() });
                    }
                }
            }
            Coloring::Seeded { law, .. } => {
                if !law.fits(&spec.palette) {
                    return Err(EngineError::InvalidSpec(format!("colour law {law:?} does not fit palette {:?}", spec.palette)));
                }
            }
        }
        Ok(())
    }
}

/// Every coloring of `n` logicians from `0..k`, in lexicographic order with
/// logician 0 most significant.
pub fn all_colorings(n: usize, k: u64) -> impl Iterator<Item = Vec<Color>> {
    let total = k.checked_pow(n as u32);
    let mut current: Option<Vec<u64>> = if total == Some(0) { None } else { Some(vec![0; n]) };
    std::iter::from_fn(move || {
        let out = current.clone()?;
        let mut next = out.clone();
        let mut i = n;
        loop {
            if i == 0 {
                current = None;
                break;
            }
            i -= 1;
            next[i] += 1;
            if next[i] < k {
                current = Some(next);
                break;
            }
            next[i] = 0;
        }
        Some(out.into_iter().map(Color::Nat).collect())
    })
}

/// Per-game seed for game `index` of a run with `master` seed, independent
/// of the order in which games are executed.
pub fn game_seed(master: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(index);
    rng.next_u64()
}

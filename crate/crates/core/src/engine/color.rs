use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::ordinal::{self, Ordinal};

/// A hat colour. Finite palettes and the naturals use [`Color::Nat`];
/// the CNF-ordinal palette uses [`Color::Ord`] for every colour, finite ones
/// included.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Color {
    Nat(u64),
    Ord(Ordinal),
}

impl Color {
    pub fn as_nat(&self) -> Option<u64> {
        match self {
            Color::Nat(n) => Some(*n),
            Color::Ord(o) => o.as_nat(),
        }
    }

    pub fn as_ordinal(&self) -> Ordinal {
        match self {
            Color::Nat(n) => Ordinal::from_nat(*n),
            Color::Ord(o) => o.clone(),
        }
    }
}

impl From<u64> for Color {
    fn from(n: u64) -> Self {
        Color::Nat(n)
    }
}

impl From<Ordinal> for Color {
    fn from(o: Ordinal) -> Self {
        Color::Ord(o)
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Color::Nat(n) => write!(f, "{n}"),
            Color::Ord(o) => write!(f, "{o}"),
        }
    }
}

/// What a look reveals. `OutOfWindow` is returned for logicians beyond the
/// window of a truncated ω-game; it differs from every real hat.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Seen {
    Hat(Color),
    OutOfWindow,
}

impl Seen {
    pub fn hat(&self) -> Option<&Color> {
        match self {
            Seen::Hat(c) => Some(c),
            Seen::OutOfWindow => None,
        }
    }

    pub fn nat(&self) -> Option<u64> {
        self.hat().and_then(Color::as_nat)
    }
}

impl Serialize for Seen {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.hat().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Seen {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Ok(match Option::<Color>::deserialize(d)? {
            Some(c) => Seen::Hat(c),
            None => Seen::OutOfWindow,
        })
    }
}

/// `{γ : code(γ) ≤ max_code}`, optionally cut down to `γ < below`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CodeSegment {
    #[serde(with = "biguint_string")]
    pub max_code: BigUint,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub below: Option<Ordinal>,
}

mod biguint_string {
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(n: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(n)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// A finite set of guessed colours.
///
/// Most strategies list colours explicitly. Two strategies guess sets that
/// are finite but can be astronomically large, so those are kept in closed
/// form: an initial segment `{0, …, n}` of the naturals and code segments of
/// the ordinal coding. Membership is always exact.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GuessSet {
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    colors: BTreeSet<Color>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    nat_prefix: Option<u64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    code_segments: Vec<CodeSegment>,
}

impl GuessSet {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn single(c: impl Into<Color>) -> Self {
        let mut g = Self::empty();
        g.insert(c.into());
        g
    }

    /// `{0, 1, …, n}` over the naturals.
    pub fn nat_prefix(n: u64) -> Self {
        Self {
            nat_prefix: Some(n),
            ..Self::default()
        }
    }

    pub fn code_segment(max_code: BigUint, below: Option<Ordinal>) -> Self {
        Self {
            code_segments: vec![CodeSegment { max_code, below }],
            ..Self::default()
        }
    }

    pub fn insert(&mut self, c: Color) {
        if let (Some(p), Color::Nat(n)) = (self.nat_prefix, &c) {
            if *n <= p {
                return;
            }
        }
        self.colors.insert(c);
    }

    pub fn union_with(&mut self, other: &GuessSet) {
        if let Some(q) = other.nat_prefix {
            let p = self.nat_prefix.map_or(q, |p| p.max(q));
            self.nat_prefix = Some(p);
            self.colors.retain(|c| !matches!(c, Color::Nat(n) if *n <= p));
        }
        for c in &other.colors {
            self.insert(c.clone());
        }
        for s in &other.code_segments {
            if !self.code_segments.contains(s) {
                self.code_segments.push(s.clone());
            }
        }
    }

    pub fn contains(&self, c: &Color) -> bool {
        if self.colors.contains(c) {
            return true;
        }
        if let (Some(p), Color::Nat(n)) = (self.nat_prefix, c) {
            if *n <= p {
                return true;
            }
        }
        if self.code_segments.is_empty() {
            return false;
        }
        let g = c.as_ordinal();
        self.code_segments
            .iter()
            .any(|s| ordinal::in_code_segment(&g, &s.max_code, s.below.as_ref()))
    }

    /// Exact size, or some value `> stop_after` when the set is larger.
    pub fn len_capped(&self, stop_after: usize) -> usize {
        let mut n = self.colors.len();
        if let Some(p) = self.nat_prefix {
            n = n.saturating_add(usize::try_from(p).unwrap_or(usize::MAX).saturating_add(1));
        }
        if n > stop_after || self.code_segments.is_empty() {
            return n;
        }
        if self.code_segments.len() == 1 && self.colors.is_empty() && self.nat_prefix.is_none() {
            let s = &self.code_segments[0];
            return ordinal::code_segment_len(&s.max_code, s.below.as_ref(), stop_after);
        }
        // Mixed forms: enumerate the union, deduplicating.
        let mut members: BTreeSet<Color> = BTreeSet::new();
        for s in &self.code_segments {
            let mut k = BigUint::from(0u32);
            while k <= s.max_code {
                if let Some(g) = ordinal::decode(&k) {
                    if s.below.as_ref().is_none_or(|b| g < *b) {
                        let c = Color::Ord(g);
                        if !self.colors.contains(&c) {
                            members.insert(c);
                        }
                        if n + members.len() > stop_after {
                            return n + members.len();
                        }
                    }
                }
                k += 1u32;
            }
        }
        n + members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len_capped(0) == 0
    }

    /// The set as a list in ascending order, when it has no code segments.
    pub fn sequence(&self) -> Option<Vec<Color>> {
        if !self.code_segments.is_empty() {
            return None;
        }
        let mut out: Vec<Color> = self.nat_prefix.map_or_else(Vec::new, |p| (0..=p).map(Color::Nat).collect());
        out.extend(self.colors.iter().cloned());
        out.sort();
        Some(out)
    }

    /// Index of `c` in [`GuessSet::sequence`].
    pub fn position(&self, c: &Color) -> Option<usize> {
        if !self.code_segments.is_empty() || !self.contains(c) {
            return None;
        }
        let below_explicit = self.colors.iter().take_while(|x| *x < c).count();
        let from_prefix = match (self.nat_prefix, c) {
            (Some(p), Color::Nat(n)) => (*n).min(p + 1),
            (Some(p), Color::Ord(_)) => p + 1,
            (None, _) => 0,
        };
        usize::try_from(from_prefix).ok().map(|x| x + below_explicit)
    }

    /// The first `len` elements of [`GuessSet::sequence`].
    pub fn prefix(&self, len: usize) -> Option<GuessSet> {
        if !self.code_segments.is_empty() {
            return None;
        }
        if len == 0 {
            return Some(GuessSet::empty());
        }
        let mut out = GuessSet::empty();
        let mut taken = 0usize;
        if let Some(p) = self.nat_prefix {
            let k = (p as u128 + 1).min(len as u128) as u64;
            out.nat_prefix = Some(k - 1);
            taken = k as usize;
        }
        for c in self.colors.iter() {
            if taken >= len {
                break;
            }
            out.insert(c.clone());
            taken += 1;
        }
        Some(out)
    }

    /// The elements at the given indices of [`GuessSet::sequence`].
    pub fn at_positions(&self, positions: &GuessSet) -> Option<GuessSet> {
        let seq = self.sequence()?;
        let mut out = GuessSet::empty();
        for (i, c) in seq.into_iter().enumerate() {
            if positions.contains(&Color::Nat(i as u64)) {
                out.insert(c);
            }
        }
        Some(out)
    }

    pub fn explicit(&self) -> &BTreeSet<Color> {
        &self.colors
    }
}

impl<C: Into<Color>> FromIterator<C> for GuessSet {
    fn from_iter<I: IntoIterator<Item = C>>(iter: I) -> Self {
        let mut g = GuessSet::empty();
        for c in iter {
            g.insert(c.into());
        }
        g
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prefix_and_explicit_union() {
        let mut g: GuessSet = [7u64, 2, 9].into_iter().collect();
        g.union_with(&GuessSet::nat_prefix(4));
        assert_eq!(g.sequence().unwrap(), [0, 1, 2, 3, 4, 7, 9].map(Color::Nat).to_vec());
        assert_eq!(g.len_capped(100), 7);
        assert_eq!(g.position(&Color::Nat(7)), Some(5));
        assert_eq!(g.position(&Color::Nat(3)), Some(3));
        assert_eq!(g.position(&Color::Nat(5)), None);
        assert_eq!(g.prefix(6).unwrap().sequence().unwrap(), [0, 1, 2, 3, 4, 7].map(Color::Nat).to_vec());
        assert_eq!(g.prefix(2).unwrap().sequence().unwrap(), [0, 1].map(Color::Nat).to_vec());
    }

    #[test]
    fn code_segment_membership() {
        let w = Ordinal::omega();
        let g = GuessSet::code_segment(ordinal::code(&w), None);
        assert!(g.contains(&Color::Ord(w.clone())));
        assert!(g.contains(&Color::Ord(Ordinal::zero())));
        assert!(g.contains(&Color::Nat(0)));
        let big: Ordinal = "w^w*5".parse().unwrap();
        assert!(!g.contains(&Color::Ord(big)));
        assert!(g.sequence().is_none());
        let bounded = GuessSet::code_segment(ordinal::code(&w), Some(Ordinal::one()));
        assert_eq!(bounded.len_capped(10), 1);
    }

    #[test]
    fn json_shapes() {
        let g: GuessSet = [3u64, 1].into_iter().collect();
        assert_eq!(serde_json::to_string(&g).unwrap(), r#"{"colors":[1,3]}"#);
        let s = Seen::OutOfWindow;
        assert_eq!(serde_json::to_string(&s).unwrap(), "null");
        let c: Color = serde_json::from_str(r#""w+1""#).unwrap();
        assert_eq!(c, Color::Ord("w+1".parse().unwrap()));
    }
}

//! Cantor-normal-form ordinals below ε₀.
//!
//! An [`Ordinal`] is a finite list of `(exponent, coefficient)` terms with
//! strictly decreasing exponents and positive coefficients; the empty list is
//! zero. Exponents are themselves ordinals, so the representation is a finite
//! tree and every value is below ε₀.
//!
//! Besides the usual arithmetic this module provides one global injective
//! coding `code: Ordinal -> ℕ` with a partial inverse [`decode`]. Strategies
//! that need an embedding of a countable ordinal into ω restrict this single
//! coding instead of choosing one embedding per ordinal.
//!
//! Text syntax (used by the CLI and the JSON formats):
//!
//! ```text
//! ordinal := "0" | term ("+" term)*
//! term    := nat | power ("*" nat)?
//! power   := ("w" | "ω") ("^" atom)?
//! atom    := nat | "w" | "ω" | "(" ordinal ")"
//! ```
//!
//! e.g. `w^(w^2)*3 + w*2 + 5`. Whitespace is ignored.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrdinalError {
    #[error("coefficient overflow in ordinal arithmetic")]
    Overflow,
    #[error("cannot parse ordinal {input:?}: {reason}")]
    Parse { input: String, reason: String },
}

/// One `ω^exponent · coefficient` summand.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Term {
    pub exponent: Ordinal,
    pub coefficient: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Ordinal {
    terms: Vec<Term>,
}

impl Ordinal {
    pub fn zero() -> Self {
        Self { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::from_nat(1)
    }

    pub fn from_nat(n: u64) -> Self {
        if n == 0 {
            Self::zero()
        } else {
            Self {
                terms: vec![Term {
                    exponent: Self::zero(),
                    coefficient: n,
                }],
            }
        }
    }

    pub fn omega() -> Self {
        Self::omega_pow(Self::one())
    }

    /// `ω^exponent`.
    pub fn omega_pow(exponent: Ordinal) -> Self {
        Self {
            terms: vec![Term {
                exponent,
                coefficient: 1,
            }],
        }
    }

    /// Builds an ordinal from terms, checking the normal-form invariants.
    pub fn from_terms(terms: Vec<Term>) -> Option<Self> {
        if terms.iter().any(|t| t.coefficient == 0) {
            return None;
        }
        if terms.windows(2).any(|w| w[0].exponent <= w[1].exponent) {
            return None;
        }
        Some(Self { terms })
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_nat(&self) -> Option<u64> {
        match self.terms.as_slice() {
            [] => Some(0),
            [t] if t.exponent.is_zero() => Some(t.coefficient),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.as_nat().is_some()
    }

    /// Exponent of the leading term; `None` for zero.
    pub fn leading_exponent(&self) -> Option<&Ordinal> {
        self.terms.first().map(|t| &t.exponent)
    }

    /// Nesting depth of exponents: 0 for finite ordinals, 1 below ω^ω, ...
    pub fn depth(&self) -> usize {
        self.terms
            .iter()
            .filter(|t| !t.exponent.is_zero())
            .map(|t| 1 + t.exponent.depth())
            .max()
            .unwrap_or(0)
    }

    pub fn add(&self, other: &Ordinal) -> Result<Ordinal, OrdinalError> {
        let Some(lead) = other.terms.first() else {
            return Ok(self.clone());
        };
        let mut terms: Vec<Term> = self
            .terms
            .iter()
            .take_while(|t| t.exponent >= lead.exponent)
            .cloned()
            .collect();
        let mut rest = other.terms.iter();
        if let Some(last) = terms.last_mut() {
            if last.exponent == lead.exponent {
                last.coefficient = last
                    .coefficient
                    .checked_add(lead.coefficient)
                    .ok_or(OrdinalError::Overflow)?;
                rest.next();
            }
        }
        terms.extend(rest.cloned());
        Ok(Ordinal { terms })
    }

    pub fn mul(&self, other: &Ordinal) -> Result<Ordinal, OrdinalError> {
        if self.is_zero() || other.is_zero() {
            return Ok(Ordinal::zero());
        }
        let lead = &self.terms[0];
        let mut terms = Vec::new();
        for t in &other.terms {
            if t.exponent.is_zero() {
                // a·c = ω^α₁·(a₁c) + tail(a)
                terms.push(Term {
                    exponent: lead.exponent.clone(),
                    coefficient: lead
                        .coefficient
                        .checked_mul(t.coefficient)
                        .ok_or(OrdinalError::Overflow)?,
                });
                terms.extend(self.terms[1..].iter().cloned());
            } else {
                terms.push(Term {
                    exponent: lead.exponent.add(&t.exponent)?,
                    coefficient: t.coefficient,
                });
            }
        }
        Ok(Ordinal { terms })
    }

    pub fn succ(&self) -> Result<Ordinal, OrdinalError> {
        self.add(&Ordinal::one())
    }
}

impl Ord for Ordinal {
    fn cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.terms.iter().zip(&other.terms) {
            match a.exponent.cmp(&b.exponent) {
                Ordering::Equal => {}
                ord => return ord,
            }
            match a.coefficient.cmp(&b.coefficient) {
                Ordering::Equal => {}
                ord => return ord,
            }
        }
        self.terms.len().cmp(&other.terms.len())
    }
}

impl PartialOrd for Ordinal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub fn compare(a: &Ordinal, b: &Ordinal) -> Ordering {
    a.cmp(b)
}

// ---------------------------------------------------------------------------
// Coding into the naturals

fn pair(x: &BigUint, y: &BigUint) -> BigUint {
    let s = x + y;
    (&s * (&s + 1u32)) / 2u32 + y
}

fn unpair(z: &BigUint) -> (BigUint, BigUint) {
    let w = ((z * 8u32 + 1u32).sqrt() - 1u32) / 2u32;
    let t = (&w * (&w + 1u32)) / 2u32;
    let y = z - t;
    let x = w - &y;
    (x, y)
}

/// Injective coding of ordinals into ℕ; `code(0) = 0`.
///
/// A nonzero ordinal with leading term `ω^e·c` and remainder `r` is coded as
/// `1 + ⟨⟨code(e), c − 1⟩, code(r)⟩` with the Cantor pairing `⟨·,·⟩`.
pub fn code(a: &Ordinal) -> BigUint {
    code_terms(&a.terms)
}

fn code_terms(terms: &[Term]) -> BigUint {
    match terms.split_first() {
        None => BigUint::zero(),
        Some((head, rest)) => {
            let term = pair(&code(&head.exponent), &BigUint::from(head.coefficient - 1));
            pair(&term, &code_terms(rest)) + 1u32
        }
    }
}

/// Partial inverse of [`code`]: `None` for naturals that code no ordinal.
pub fn decode(n: &BigUint) -> Option<Ordinal> {
    if n.is_zero() {
        return Some(Ordinal::zero());
    }
    let (term, rest) = unpair(&(n - 1u32));
    let (exp_code, coeff) = unpair(&term);
    let exponent = decode(&exp_code)?;
    let coefficient = coeff.to_u64()?.checked_add(1)?;
    let rest = decode(&rest)?;
    if let Some(next) = rest.leading_exponent() {
        if *next >= exponent {
            return None;
        }
    }
    let mut terms = Vec::with_capacity(rest.terms.len() + 1);
    terms.push(Term {
        exponent,
        coefficient,
    });
    terms.extend(rest.terms);
    Some(Ordinal { terms })
}

/// `{γ < a : code(γ) ≤ n}`, found by decoding `0..=n`.
pub fn below_with_code_at_most(a: &Ordinal, n: u64) -> Vec<Ordinal> {
    let mut out: Vec<Ordinal> = (0..=n)
        .filter_map(|k| decode(&BigUint::from(k)))
        .filter(|g| g < a)
        .collect();
    out.sort();
    out
}

/// Membership in `{γ : code(γ) ≤ max_code}` intersected with `γ < below`
/// (no upper bound when `below` is `None`). Always a finite set.
pub fn in_code_segment(g: &Ordinal, max_code: &BigUint, below: Option<&Ordinal>) -> bool {
    if let Some(bound) = below {
        if g >= bound {
            return false;
        }
    }
    code(g) <= *max_code
}

/// Counts `{γ : code(γ) ≤ max_code, γ < below}`, stopping early once the
/// count exceeds `stop_after`.
pub fn code_segment_len(max_code: &BigUint, below: Option<&Ordinal>, stop_after: usize) -> usize {
    let mut count = 0usize;
    let mut k = BigUint::zero();
    while k <= *max_code {
        if let Some(g) = decode(&k) {
            if below.is_none_or(|b| g < *b) {
                count += 1;
                if count > stop_after {
                    return count;
                }
            }
        }
        k += BigUint::one();
    }
    count
}

// ---------------------------------------------------------------------------
// Random generation

/// Shape parameters for random ordinals.
#[derive(Debug, Clone, Copy)]
pub struct OrdinalShape {
    /// Maximum exponent nesting depth.
    pub depth: usize,
    /// Coefficients are drawn from `1..=max_coefficient`.
    pub max_coefficient: u64,
    /// Maximum number of terms at each level.
    pub max_terms: usize,
}

impl Default for OrdinalShape {
    fn default() -> Self {
        Self {
            depth: 3,
            max_coefficient: 9,
            max_terms: 3,
        }
    }
}

pub fn random_ordinal<R: Rng + ?Sized>(rng: &mut R, shape: &OrdinalShape) -> Ordinal {
    if shape.depth == 0 {
        return Ordinal::from_nat(rng.gen_range(0..=shape.max_coefficient));
    }
    let n_terms = rng.gen_range(0..=shape.max_terms);
    let inner = OrdinalShape {
        depth: shape.depth - 1,
        ..*shape
    };
    let mut exponents: Vec<Ordinal> = (0..n_terms).map(|_| random_ordinal(rng, &inner)).collect();
    exponents.sort_by(|a, b| b.cmp(a));
    exponents.dedup();
    Ordinal {
        terms: exponents
            .into_iter()
            .map(|exponent| Term {
                exponent,
                coefficient: rng.gen_range(1..=shape.max_coefficient.max(1)),
            })
            .collect(),
    }
}

// ---------------------------------------------------------------------------
// Text form

impl fmt::Display for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if t.exponent.is_zero() {
                write!(f, "{}", t.coefficient)?;
                continue;
            }
            if t.exponent == Ordinal::one() {
                write!(f, "w")?;
            } else if t.exponent.is_finite() || t.exponent == Ordinal::omega() {
                write!(f, "w^{}", t.exponent)?;
            } else {
                write!(f, "w^({})", t.exponent)?;
            }
            if t.coefficient > 1 {
                write!(f, "*{}", t.coefficient)?;
            }
        }
        Ok(())
    }
}

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    input: &'a str,
}

impl<'a> Parser<'a> {
    fn new(input: &'a str) -> Self {
        Self {
            chars: input.chars().filter(|c| !c.is_whitespace()).collect(),
            pos: 0,
            input,
        }
    }

    fn err(&self, reason: impl Into<String>) -> OrdinalError {
        OrdinalError::Parse {
            input: self.input.to_string(),
            reason: reason.into(),
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn nat(&mut self) -> Result<u64, OrdinalError> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err(format!("expected a number at position {start}")));
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse().map_err(|_| OrdinalError::Overflow)
    }

    fn is_omega(&self) -> bool {
        matches!(self.peek(), Some('w' | 'ω'))
    }

    fn ordinal(&mut self) -> Result<Ordinal, OrdinalError> {
        let mut acc = self.term()?;
        while self.eat('+') {
            let t = self.term()?;
            acc = acc.add(&t)?;
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Ordinal, OrdinalError> {
        if self.is_omega() {
            self.pos += 1;
            let exponent = if self.eat('^') { self.atom()? } else { Ordinal::one() };
            let coefficient = if self.eat('*') { self.nat()? } else { 1 };
            Ordinal::omega_pow(exponent).mul(&Ordinal::from_nat(coefficient))
        } else {
            Ok(Ordinal::from_nat(self.nat()?))
        }
    }

    fn atom(&mut self) -> Result<Ordinal, OrdinalError> {
        if self.eat('(') {
            let inner = self.ordinal()?;
            if !self.eat(')') {
                return Err(self.err("unbalanced parenthesis"));
            }
            Ok(inner)
        } else if self.is_omega() {
            self.pos += 1;
            Ok(Ordinal::omega())
        } else {
            Ok(Ordinal::from_nat(self.nat()?))
        }
    }
}

impl FromStr for Ordinal {
    type Err = OrdinalError;

    /// Parses the text syntax. Sums are evaluated with ordinal addition, so
    /// non-normal inputs such as `1 + w` are accepted and normalised.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut p = Parser::new(s);
        let value = p.ordinal()?;
        if p.pos != p.chars.len() {
            return Err(p.err(format!("trailing input at position {}", p.pos)));
        }
        Ok(value)
    }
}

impl Serialize for Ordinal {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Ordinal {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn o(s: &str) -> Ordinal {
        s.parse().unwrap()
    }

    fn w() -> Ordinal {
        Ordinal::omega()
    }

    #[test]
    fn compare_examples() {
        assert_eq!(compare(&Ordinal::zero(), &Ordinal::zero()), Ordering::Equal);
        assert_eq!(compare(&w(), &Ordinal::from_nat(2)), Ordering::Greater);
        assert_eq!(compare(&o("w*2"), &o("w+5")), Ordering::Greater);
    }

    // Hand-made table of small comparisons, independent of the CNF comparison
    // code: each ordinal is listed in increasing order.
    #[test]
    fn compare_against_hand_ordered_table() {
        let ascending = [
            "0", "1", "5", "w", "w+1", "w+5", "w*2", "w*2+3", "w^2", "w^2+w", "w^2*3",
            "w^3", "w^w", "w^w+1", "w^(w+1)", "w^(w*2)", "w^(w^2)", "w^(w^w)",
        ];
        for (i, a) in ascending.iter().enumerate() {
            for (j, b) in ascending.iter().enumerate() {
                assert_eq!(compare(&o(a), &o(b)), i.cmp(&j), "{a} vs {b}");
            }
        }
    }

    #[test]
    fn add_examples() {
        assert_eq!(Ordinal::one().add(&w()).unwrap(), w());
        assert_eq!(w().add(&Ordinal::one()).unwrap(), o("w+1"));
        assert_eq!(o("w^2+w*3+4").add(&o("w*2+1")).unwrap(), o("w^2+w*5+1"));
        assert_eq!(w().succ().unwrap(), o("w+1"));
    }

    #[test]
    fn mul_examples() {
        let two = Ordinal::from_nat(2);
        assert_eq!(two.mul(&w()).unwrap(), w());
        assert_eq!(w().mul(&two).unwrap(), o("w*2"));
        assert_eq!(o("w+1").mul(&o("w+1")).unwrap(), o("w^2+w+1"));
        assert_eq!(o("w^2+3").mul(&Ordinal::from_nat(4)).unwrap(), o("w^2*4+3"));
        assert_eq!(w().mul(&w()).unwrap(), o("w^2"));
    }

    #[test]
    fn coefficient_overflow_is_an_error() {
        let big = Ordinal::from_nat(u64::MAX);
        assert_eq!(big.add(&Ordinal::one()), Err(OrdinalError::Overflow));
        let a = o("w*3");
        assert_eq!(a.mul(&Ordinal::from_nat(u64::MAX)), Err(OrdinalError::Overflow));
    }

    /// Concrete model of ordinals below ω²: a well-order written as a word
    /// over the blocks `ω` (a copy of ℕ) and `1` (a single point). Placing
    /// a point before a copy of ℕ does not change the order type, so the
    /// rewrite `1ω → ω` normalises every word to `ω^p 1^q`.
    fn word_order_type(word: &[bool]) -> (u64, u64) {
        // true = ω block, false = single point
        let mut reduced: Vec<bool> = Vec::new();
        for &b in word {
            if b {
                while reduced.last() == Some(&false) {
                    reduced.pop();
                }
            }
            reduced.push(b);
        }
        let p = reduced.iter().filter(|b| **b).count() as u64;
        (p, reduced.len() as u64 - p)
    }

    fn word_of(p: u64, q: u64) -> Vec<bool> {
        let mut w = vec![true; p as usize];
        w.extend(std::iter::repeat_n(false, q as usize));
        w
    }

    fn cnf(p: u64, q: u64) -> Ordinal {
        w().mul(&Ordinal::from_nat(p)).unwrap().add(&Ordinal::from_nat(q)).unwrap()
    }

    #[test]
    fn finite_products_match_concrete_well_orders() {
        for p in 0..4u64 {
            for q in 0..4u64 {
                for s in 0..5u64 {
                    // (ω·p + q)·s is s consecutive copies of the word for ω·p + q
                    let word: Vec<bool> = (0..s).flat_map(|_| word_of(p, q)).collect();
                    let (pp, qq) = word_order_type(&word);
                    assert_eq!(cnf(p, q).mul(&Ordinal::from_nat(s)).unwrap(), cnf(pp, qq));
                    // sums: (ω·p + q) + (ω·s + q)
                    let mut sum = word_of(p, q);
                    sum.extend(word_of(s, q));
                    let (sp, sq) = word_order_type(&sum);
                    assert_eq!(cnf(p, q).add(&cnf(s, q)).unwrap(), cnf(sp, sq));
                }
            }
        }
        // purely finite well-orders: the lexicographic product of m and n
        // points has m·n elements
        for m in 0..20u64 {
            for n in 0..20u64 {
                let elems = (0..n).flat_map(|y| (0..m).map(move |x| (y, x))).count() as u64;
                assert_eq!(Ordinal::from_nat(m).mul(&Ordinal::from_nat(n)).unwrap(), Ordinal::from_nat(elems));
            }
        }
        // s·ω: ω copies of s points, i.e. the word (1^s)^ω, which is ω.
        for s in 1..5u64 {
            assert_eq!(Ordinal::from_nat(s).mul(&w()).unwrap(), w());
        }
    }

    #[test]
    fn code_anchors() {
        assert_eq!(code(&Ordinal::zero()), BigUint::zero());
        let a = o("w^w + 3");
        assert_eq!(decode(&code(&a)), Some(a));
    }

    #[test]
    fn decode_of_first_hundred_defines_at_most_101() {
        let defined: Vec<Ordinal> = (0u32..=100).filter_map(|k| decode(&BigUint::from(k))).collect();
        assert!(defined.len() <= 101);
        let mut uniq = defined.clone();
        uniq.sort();
        uniq.dedup();
        assert_eq!(uniq.len(), defined.len());
        for g in &defined {
            assert_eq!(decode(&code(g)).as_ref(), Some(g));
        }
    }

    #[test]
    fn below_with_code_at_most_examples() {
        assert!(below_with_code_at_most(&Ordinal::zero(), 999).is_empty());
        let three = Ordinal::from_nat(3);
        let c3 = code(&three).to_u64().unwrap();
        let got = below_with_code_at_most(&Ordinal::from_nat(5), c3);
        assert!(got.contains(&three));
        assert!(got.iter().all(|g| *g < Ordinal::from_nat(5)));
        let a = o("w^2+1");
        for b in ["0", "1", "w", "w*3+2", "w^2"] {
            let b = o(b);
            let cb = code(&b).to_u64().unwrap();
            assert!(below_with_code_at_most(&a, cb).contains(&b));
        }
    }

    #[test]
    fn text_roundtrip_examples() {
        for s in ["0", "7", "w", "w*2 + 5", "w^(w^2)*3 + w*2 + 5", "w^w + 3", "w^(w+1)"] {
            let a = o(s);
            assert_eq!(o(&a.to_string()), a);
        }
        assert_eq!(o("w^(w^2)*3 + w*2 + 5").to_string(), "w^(w^2)*3 + w*2 + 5");
        assert_eq!(o("ω^ω"), o("w^w"));
        assert!("w^".parse::<Ordinal>().is_err());
        assert!("w^(2".parse::<Ordinal>().is_err());
        assert!("3 x".parse::<Ordinal>().is_err());
    }

    #[test]
    fn random_roundtrip_ten_thousand() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let shape = OrdinalShape::default();
        for _ in 0..10_000 {
            let a = random_ordinal(&mut rng, &shape);
            assert!(a.depth() <= 3);
            assert_eq!(decode(&code(&a)).as_ref(), Some(&a));
            assert_eq!(o(&a.to_string()), a);
        }
    }

    #[test]
    fn code_segment_length_matches_enumeration() {
        for n in [0u64, 1, 5, 40, 200] {
            let bound = o("w+3");
            let listed = below_with_code_at_most(&bound, n);
            assert_eq!(code_segment_len(&BigUint::from(n), Some(&bound), usize::MAX), listed.len());
        }
    }
}

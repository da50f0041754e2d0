use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::family::{for_each_tuple, Compiled, FunctionFamily, Member};
use super::FreeError;

/// What the `ν`-th single-valued slice of a set-valued member returns on a
/// tuple whose output has at most `ν` elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Padding {
    /// No value. Free sets of the slices are then exactly the mutually
    /// independent sets of the original family.
    Absent,
    /// A fixed element. This can only cover more, so free sets of the
    /// slices are still mutually independent for the original, but not
    /// conversely in general.
    Value(u64),
}

/// Splits each member `f` into single-valued members `f⁰, …, f^{γ−1}`, where
/// `f^ν(t)` is the `ν`-th smallest element of `f(t)`. Outputs must have fewer
/// than `gamma` elements.
pub fn family_from_sets(f: &FunctionFamily, gamma: usize, padding: Padding) -> Result<FunctionFamily, FreeError> {
    if let Padding::Value(v) = padding {
        if !f.ground().contains(&v) {
            return Err(FreeError::NotInGround(v));
        }
    }
    let c = Compiled::new(f)?;
    let all: Vec<usize> = (0..c.len()).collect();
    let mut members = Vec::new();
    for i in 0..c.member_count() {
        let arity = c.arity(i);
        let mut slices: Vec<BTreeMap<Vec<u64>, BTreeSet<u64>>> = vec![BTreeMap::new(); gamma];
        let mut too_large = None;
        for_each_tuple(&all, arity, |t| {
            let out = c.set_of(c.out(i, t));
            if out.len() >= gamma {
                too_large = Some(out.len());
                return false;
            }
            let args: Vec<u64> = t.iter().map(|&p| c.ground()[p]).collect();
            for (nu, slice) in slices.iter_mut().enumerate() {
                let v = match (out.get(nu), padding) {
                    (Some(&v), _) => Some(v),
                    (None, Padding::Value(v)) => Some(v),
                    (None, Padding::Absent) => None,
                };
                if let Some(v) = v {
                    slice.insert(args.clone(), [v].into_iter().collect());
                }
            }
            true
        });
        if let Some(size) = too_large {
            return Err(FreeError::OutputTooLarge { member: i, size, gamma });
        }
        members.extend(slices.into_iter().map(|e| Member::table(arity, e)));
    }
    FunctionFamily::new(f.ground().clone(), members)
}

/// Merges single-valued members of equal arity: `Fₙ(t) = {f(t) : nᶠ = n}`.
pub fn sets_from_family(f: &FunctionFamily) -> Result<FunctionFamily, FreeError> {
    let c = Compiled::new(f)?;
    let all: Vec<usize> = (0..c.len()).collect();
    let mut by_arity: BTreeMap<usize, BTreeMap<Vec<u64>, BTreeSet<u64>>> = BTreeMap::new();
    for i in 0..c.member_count() {
        let arity = c.arity(i);
        let table = by_arity.entry(arity).or_default();
        let mut plain = true;
        for_each_tuple(&all, arity, |t| {
            let out = c.out(i, t);
            if out.count_ones() > 1 {
                plain = false;
                return false;
            }
            if out != 0 {
                let args: Vec<u64> = t.iter().map(|&p| c.ground()[p]).collect();
                table.entry(args).or_default().extend(c.set_of(out));
            }
            true
        });
        if !plain {
            return Err(FreeError::NotPlain(i));
        }
    }
    let members = by_arity.into_iter().map(|(a, e)| Member::table(a, e)).collect();
    FunctionFamily::new(f.ground().clone(), members)
}

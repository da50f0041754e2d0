//! Independent subsets of finite function families.
//!
//! A family assigns to every tuple over a finite ground set `A` a subset of
//! `A`. A set `S ⊆ A` is *mutually independent* when no element of `S` is
//! produced from other elements of `S`, and *forwards independent* when no
//! element is produced from strictly larger elements of `S`.

mod closure;
mod convert;
mod extract;
mod family;
mod partition;
mod search;

pub use closure::{close_family, ClosedFamily, ClosureBounds, Derivation};
pub use convert::{family_from_sets, sets_from_family, Padding};
pub use extract::{extract_mutual_from_forwards, Extraction, ExtractionStep, DEFAULT_WITNESS_SIZE};
pub(crate) use family::for_each_tuple;
pub use family::{Affine, Compiled, FunctionFamily, Member, Rule, MAX_GROUND, MAX_TABLE};
pub use partition::{homogeneous_search, partition_of_family, FamilyPartition, Partition};
pub use search::{brute_force_max, max_free_subset, Mode, DEFAULT_SEARCH_CAP};

use std::collections::BTreeSet;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FreeError {
    #[error("{what} has size {size}, above the cap of {cap}")]
    CapExceeded { what: &'static str, size: u128, cap: u128 },
    #[error("invalid family: {0}")]
    InvalidFamily(String),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("{0} is not in the ground set")]
    NotInGround(u64),
    #[error("the given set is not forwards independent")]
    NotForwardsIndependent,
    #[error("member {member} outputs {size} elements, but lists must have fewer than {gamma}")]
    OutputTooLarge { member: usize, size: usize, gamma: usize },
    #[error("member {0} is not single-valued")]
    NotPlain(usize),
}

/// Whether no element of `s` is produced by `f` from other elements of `s`.
pub fn is_mutually_independent(s: &BTreeSet<u64>, f: &FunctionFamily) -> Result<bool, FreeError> {
    let c = Compiled::new(f)?;
    Ok(c.is_mutual(c.mask_of(s)?))
}

/// Whether no element of `s` is produced by `f` from strictly larger elements of `s`.
pub fn is_forwards_independent(s: &BTreeSet<u64>, f: &FunctionFamily) -> Result<bool, FreeError> {
    let c = Compiled::new(f)?;
    Ok(c.is_forwards(c.mask_of(s)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(xs: &[u64]) -> BTreeSet<u64> {
        xs.iter().copied().collect()
    }

    #[test]
    fn successor_mod_ten_separates_the_notions() {
        let f = FunctionFamily::affine(0..10, &[(vec![1], 1, Some(10))]);
        assert!(!is_mutually_independent(&set(&[0, 1]), &f).unwrap());
        assert!(is_forwards_independent(&set(&[0, 1]), &f).unwrap());
    }

    #[test]
    fn sum_mod_ten_pair() {
        let f = FunctionFamily::affine(0..10, &[(vec![1, 1], 0, Some(10))]);
        assert!(is_mutually_independent(&set(&[1, 3]), &f).unwrap());
        assert!(is_mutually_independent(&set(&[]), &f).unwrap());
    }

    #[test]
    fn empty_family_everything_independent() {
        let f = FunctionFamily::new((0..6).collect(), vec![]).unwrap();
        assert!(is_forwards_independent(&set(&[0, 1, 2, 3, 4, 5]), &f).unwrap());
        assert!(is_mutually_independent(&set(&[0, 1, 2, 3, 4, 5]), &f).unwrap());
    }

    #[test]
    fn identity_covers_nothing() {
        let f = FunctionFamily::affine(0..8, &[(vec![1], 0, None)]);
        assert!(is_mutually_independent(&(0..8).collect(), &f).unwrap());
    }

    #[test]
    fn outside_ground_is_an_error() {
        let f = FunctionFamily::affine(0..3, &[(vec![1], 0, None)]);
        assert_eq!(is_mutually_independent(&set(&[7]), &f), Err(FreeError::NotInGround(7)));
    }
}

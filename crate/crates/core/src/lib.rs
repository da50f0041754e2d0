//! Hat games with finitely many looks and bounded guess lists: an engine,
//! the known winning strategies, adversaries that build losing colorings,
//! and finite tools for independent subsets of function families.

pub mod adversary;
pub mod engine;
pub mod freesubset;
pub mod ordinal;
pub mod poset;
pub mod strategies;
pub mod sweep;

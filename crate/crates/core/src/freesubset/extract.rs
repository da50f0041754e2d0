use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::family::{bits, Compiled, FunctionFamily};
use super::FreeError;

/// Default bound on the size of the discarded sets `Bᵢ`.
pub const DEFAULT_WITNESS_SIZE: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractionStep {
    pub alpha: u64,
    /// Elements of the input dropped at this step.
    pub discarded: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Extraction {
    pub steps: Vec<ExtractionStep>,
    /// The chosen `α₀ < α₁ < …`.
    pub set: Vec<u64>,
}

// Subsets of `pool` of size at most `k`, by size and then lexicographically.
fn small_subsets(pool: &[usize], k: usize) -> Vec<u64> {
    fn rec(pool: &[usize], start: usize, left: usize, acc: u64, out: &mut Vec<u64>) {
        if left == 0 {
            out.push(acc);
            return;
        }
        for i in start..pool.len() {
            rec(pool, i + 1, left - 1, acc | 1 << pool[i], out);
        }
    }
    let mut out = Vec::new();
    for size in 0..=k.min(pool.len()) {
        rec(pool, 0, size, 0, &mut out);
    }
    out
}

fn at_most(p: usize) -> u64 {
    if p >= 63 {
        u64::MAX
    } else {
        (2u64 << p) - 1
    }
}

/// Builds a mutually independent set from a forwards independent one.
///
/// Step `i` picks the least `β ∈ S` above the previous choices for which some
/// `B ⊆ S` with `|B| ≤ witness_size` leaves the chosen elements, then `β`,
/// then what is left of `S`, in increasing order and forwards independent
/// together. At finite scale that alone does not force mutual independence
/// of the chosen elements, so a candidate is also required to keep them
/// mutually independent. The recursion stops when no candidate remains.
pub fn extract_mutual_from_forwards(s: &BTreeSet<u64>, f: &FunctionFamily, witness_size: usize) -> Result<Extraction, FreeError> {
    let c = Compiled::new(f)?;
    let s_mask = c.mask_of(s)?;
    if !c.is_forwards(s_mask) {
        return Err(FreeError::NotForwardsIndependent);
    }
    let n = c.len();
    let mut chosen: u64 = 0;
    let mut left = s_mask;
    let mut steps = Vec::new();
    let mut floor = 0usize;
    // each accepted β restarts the scan above it
    #[allow(clippy::mut_range_bound)]
    'step: loop {
        let pool = bits(left);
        let discards = small_subsets(&pool, witness_size);
        for beta in floor..n {
            if s_mask >> beta & 1 == 0 || !c.extends_mutual(chosen, beta) {
                continue;
            }
            for &b in &discards {
                let rest = left & !b;
                let above_beta = rest & !at_most(beta);
                if rest != above_beta {
                    continue;
                }
                let union = chosen | 1 << beta | rest;
                if c.is_forwards(union) {
                    chosen |= 1 << beta;
                    left = rest & !(1 << beta);
                    steps.push(ExtractionStep {
                        alpha: c.ground()[beta],
                        discarded: c.set_of(b),
                    });
                    floor = beta + 1;
                    continue 'step;
                }
            }
        }
        break;
    }
    Ok(Extraction {
        steps,
        set: c.set_of(chosen),
    })
}

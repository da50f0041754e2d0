use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::family::{bits, Compiled, FunctionFamily};
use super::FreeError;

/// Largest ground set [`max_free_subset`] accepts by default.
pub const DEFAULT_SEARCH_CAP: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Mode {
    Mutual,
    Forwards,
}

impl Compiled {
    pub fn is_independent(&self, mask: u64, mode: Mode) -> bool {
        match mode {
            Mode::Mutual => self.is_mutual(mask),
            Mode::Forwards => self.is_forwards(mask),
        }
    }

    fn extends(&self, mask: u64, x: usize, mode: Mode) -> bool {
        match mode {
            Mode::Mutual => self.extends_mutual(mask, x),
            Mode::Forwards => self.extends_forwards(mask, x),
        }
    }
}

struct Dfs<'a> {
    c: &'a Compiled,
    mode: Mode,
    global: &'a AtomicUsize,
    best: Option<u64>,
    best_len: usize,
}

impl Dfs<'_> {
    // Candidates are the elements above the current maximum that extend the
    // current set; independence is closed under subsets, so they only shrink.
    fn go(&mut self, mask: u64, len: usize, cands: &[usize]) {
        if self.best.is_none() || len > self.best_len {
            self.best = Some(mask);
            self.best_len = len;
            self.global.fetch_max(len, Ordering::Relaxed);
        }
        for (i, &x) in cands.iter().enumerate() {
            let bound = len + cands.len() - i;
            if bound <= self.best_len || bound < self.global.load(Ordering::Relaxed) {
                return;
            }
            let next = mask | 1 << x;
            let rest: Vec<usize> = cands[i + 1..].iter().copied().filter(|&y| self.c.extends(next, y, self.mode)).collect();
            self.go(next, len + 1, &rest);
        }
    }
}

/// A largest independent subset, lexicographically least among the largest.
///
/// Branch and bound over elements in increasing order, trying inclusion
/// first; the branches by least element run in parallel and are reduced
/// by size, then by least element.
pub fn max_free_subset(f: &FunctionFamily, mode: Mode, cap: usize) -> Result<Vec<u64>, FreeError> {
    let n = f.ground().len();
    if n > cap {
        return Err(FreeError::CapExceeded {
            what: "ground set",
            size: n as u128,
            cap: cap as u128,
        });
    }
    let c = Compiled::new(f)?;
    let global = AtomicUsize::new(0);
    let singles: Vec<usize> = (0..n).filter(|&x| c.extends(0, x, mode)).collect();
    let best = singles
        .par_iter()
        .enumerate()
        .map(|(i, &x)| {
            let mask = 1u64 << x;
            let rest: Vec<usize> = singles[i + 1..].iter().copied().filter(|&y| c.extends(mask, y, mode)).collect();
            let mut dfs = Dfs {
                c: &c,
                mode,
                global: &global,
                best: None,
                best_len: 0,
            };
            dfs.go(mask, 1, &rest);
            (dfs.best_len, x, dfs.best.unwrap_or(mask))
        })
        .reduce(|| (0, usize::MAX, 0), |a, b| if (b.0, std::cmp::Reverse(b.1)) > (a.0, std::cmp::Reverse(a.1)) { b } else { a });
    Ok(c.set_of(best.2))
}

/// Size of the largest independent subset by trying every subset.
pub fn brute_force_max(f: &FunctionFamily, mode: Mode) -> Result<usize, FreeError> {
    let c = Compiled::new(f)?;
    let n = c.len();
    if n > 24 {
        return Err(FreeError::CapExceeded {
            what: "ground set",
            size: n as u128,
            cap: 24,
        });
    }
    Ok((0u64..1 << n).filter(|&m| c.is_independent(m, mode)).map(|m| bits(m).len()).max().unwrap_or(0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_family_gives_everything() {
        let f = FunctionFamily::new((3..9).collect(), vec![]).unwrap();
        assert_eq!(max_free_subset(&f, Mode::Mutual, 20).unwrap(), (3..9).collect::<Vec<_>>());
    }

    #[test]
    fn bounded_sum_matches_oracle() {
        let f = FunctionFamily::affine(1..=6, &[(vec![1, 1], 0, None)]);
        for mode in [Mode::Mutual, Mode::Forwards] {
            let s = max_free_subset(&f, mode, 20).unwrap();
            let c = Compiled::new(&f).unwrap();
            assert!(c.is_independent(c.mask_of(&s.iter().copied().collect()).unwrap(), mode));
            assert_eq!(s.len(), brute_force_max(&f, mode).unwrap());
        }
        // sums of two distinct or equal elements: {4,5,6} is sum-free here
        assert_eq!(max_free_subset(&f, Mode::Mutual, 20).unwrap().len(), 3);
    }

    #[test]
    fn lexicographically_least_among_largest() {
        // x -> x+1: largest free sets alternate; {0,2,4} beats {1,3,5}
        let f = FunctionFamily::affine(0..6, &[(vec![1], 1, None)]);
        assert_eq!(max_free_subset(&f, Mode::Mutual, 20).unwrap(), vec![0, 2, 4]);
        assert_eq!(max_free_subset(&f, Mode::Forwards, 20).unwrap(), (0..6).collect::<Vec<_>>());
    }

    #[test]
    fn cap_is_enforced() {
        let f = FunctionFamily::new((0..21).collect(), vec![]).unwrap();
        assert!(matches!(max_free_subset(&f, Mode::Mutual, 20), Err(FreeError::CapExceeded { .. })));
    }
}

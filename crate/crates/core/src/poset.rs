//! Finite strict partial orders on logician ids `0..n`.

use std::collections::BTreeSet;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PosetError {
    #[error("relation ({0}, {1}) mentions an element outside 0..{2}")]
    OutOfRange(usize, usize, usize),
    #[error("relation is not irreflexive/antisymmetric: cycle through {0}")]
    Cycle(usize),
}

/// A strict partial order, stored as its transitive closure. `less(p, q)`
/// means logician `p` may look at logician `q`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Poset {
    size: usize,
    less: Vec<Vec<bool>>,
}

impl Poset {
    /// The order generated by `pairs` (each `(p, q)` meaning `p < q`).
    pub fn from_relations(size: usize, pairs: &[(usize, usize)]) -> Result<Self, PosetError> {
        let mut less = vec![vec![false; size]; size];
        for &(p, q) in pairs {
            if p >= size || q >= size {
                return Err(PosetError::OutOfRange(p, q, size));
            }
            less[p][q] = true;
        }
        // transitive closure; rows i and k alias when i == k
        #[allow(clippy::needless_range_loop)]
        for k in 0..size {
            for i in 0..size {
                if less[i][k] {
                    for j in 0..size {
                        if less[k][j] {
                            less[i][j] = true;
                        }
                    }
                }
            }
        }
        if let Some(p) = (0..size).find(|&p| less[p][p]) {
            return Err(PosetError::Cycle(p));
        }
        Ok(Self { size, less })
    }

    pub fn antichain(size: usize) -> Self {
        Self {
            size,
            less: vec![vec![false; size]; size],
        }
    }

    /// `0 < 1 < ... < size-1`.
    pub fn chain(size: usize) -> Self {
        let pairs: Vec<_> = (1..size).map(|i| (i - 1, i)).collect();
        Self::from_relations(size, &pairs).expect("a chain is a partial order")
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn less(&self, p: usize, q: usize) -> bool {
        p < self.size && q < self.size && self.less[p][q]
    }

    pub fn above(&self, p: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.size).filter(move |&q| self.less[p][q])
    }

    /// Elements of `among` with nothing above them inside `among`.
    pub fn maximal_in(&self, among: &BTreeSet<usize>) -> Vec<usize> {
        among
            .iter()
            .copied()
            .filter(|&p| !among.iter().any(|&q| self.less[p][q]))
            .collect()
    }

    /// All `(p, q)` with `p < q`.
    pub fn relations(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for p in 0..self.size {
            for q in 0..self.size {
                if self.less[p][q] {
                    out.push((p, q));
                }
            }
        }
        out
    }

    fn relabel(&self, perm: &[usize]) -> Vec<(usize, usize)> {
        let mut rel: Vec<_> = self.relations().into_iter().map(|(p, q)| (perm[p], perm[q])).collect();
        rel.sort_unstable();
        rel
    }

    /// Lexicographically least relation list over all relabelings; equal for
    /// isomorphic posets.
    fn canonical_form(&self) -> Vec<(usize, usize)> {
        let mut perm: Vec<usize> = (0..self.size).collect();
        let mut best = self.relabel(&perm);
        while next_permutation(&mut perm) {
            let cand = self.relabel(&perm);
            if cand < best {
                best = cand;
            }
        }
        best
    }
}

fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// One representative of every isomorphism class of posets on `n` elements.
///
/// Every poset has a natural labelling (a linear extension), so we grow
/// naturally labelled posets one element at a time, the new element being
/// placed above an arbitrary down-closed set, and deduplicate by canonical
/// form. Representatives are returned in canonical-form order.
pub fn unlabeled_posets(n: usize) -> Vec<Poset> {
    let mut labelled = vec![Poset::antichain(0)];
    for size in 1..=n {
        let mut next = Vec::new();
        for p in &labelled {
            let m = size - 1;
            for mask in 0u32..(1 << m) {
                let down: Vec<usize> = (0..m).filter(|i| mask >> i & 1 == 1).collect();
                let closed = down.iter().all(|&d| (0..m).all(|e| !p.less[e][d] || mask >> e & 1 == 1));
                if !closed {
                    continue;
                }
                let mut pairs = p.relations();
                pairs.extend(down.iter().map(|&d| (d, m)));
                next.push(Poset::from_relations(size, &pairs).expect("extension of a poset"));
            }
        }
        labelled = next;
    }
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for p in labelled {
        let form = p.canonical_form();
        if seen.insert(form.clone()) {
            out.push((form, p));
        }
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out.into_iter()
        .map(|(form, _)| Poset::from_relations(n, &form).expect("canonical form is a poset"))
        .collect()
}

#[derive(Serialize, Deserialize)]
struct PosetRepr {
    size: usize,
    relations: Vec<(usize, usize)>,
}

impl Serialize for Poset {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        PosetRepr {
            size: self.size,
            relations: self.relations(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Poset {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = PosetRepr::deserialize(d)?;
        Poset::from_relations(repr.size, &repr.relations).map_err(serde::de::Error::custom)
    }
}

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::family::{bits, for_each_tuple, Compiled, FunctionFamily};
use super::FreeError;

/// A colouring of the nonempty increasing tuples of size at most `max_size`
/// over a finite ground set, with colours `0..colors`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PartitionRepr", into = "PartitionRepr")]
pub struct Partition {
    ground: Vec<u64>,
    max_size: usize,
    colors: u32,
    table: HashMap<Vec<usize>, u32>,
}

#[derive(Serialize, Deserialize)]
struct PartitionRepr {
    ground: Vec<u64>,
    max_size: usize,
    colors: u32,
    /// `[tuple, colour]` pairs, tuples given by their elements.
    entries: Vec<(Vec<u64>, u32)>,
}

impl TryFrom<PartitionRepr> for Partition {
    type Error = FreeError;
    fn try_from(r: PartitionRepr) -> Result<Self, FreeError> {
        let map: BTreeMap<Vec<u64>, u32> = r.entries.into_iter().collect();
        Partition::from_fn(r.ground, r.max_size, r.colors, |t| map.get(t).copied().unwrap_or(u32::MAX))
    }
}

impl From<Partition> for PartitionRepr {
    fn from(p: Partition) -> Self {
        let mut entries: Vec<(Vec<u64>, u32)> = p
            .table
            .iter()
            .map(|(t, c)| (t.iter().map(|&i| p.ground[i]).collect(), *c))
            .collect();
        entries.sort();
        PartitionRepr {
            ground: p.ground,
            max_size: p.max_size,
            colors: p.colors,
            entries,
        }
    }
}

/// Increasing tuples of positions `0..n` with sizes `1..=k`.
fn increasing_tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if !cur.is_empty() {
            out.push(cur.clone());
        }
        if cur.len() == k {
            return;
        }
        for x in start..n {
            cur.push(x);
            rec(n, k, x + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, k, 0, &mut Vec::new(), &mut out);
    out
}

impl Partition {
    /// Tabulates `color` on every increasing tuple of elements.
    pub fn from_fn(ground: impl IntoIterator<Item = u64>, max_size: usize, colors: u32, color: impl Fn(&[u64]) -> u32) -> Result<Self, FreeError> {
        let mut ground: Vec<u64> = ground.into_iter().collect();
        ground.sort_unstable();
        ground.dedup();
        if max_size == 0 || colors == 0 {
            return Err(FreeError::InvalidPartition("tuple size and colour count must be positive".into()));
        }
        let mut table = HashMap::new();
        for t in increasing_tuples(ground.len(), max_size) {
            let values: Vec<u64> = t.iter().map(|&i| ground[i]).collect();
            let c = color(&values);
            if c >= colors {
                return Err(FreeError::InvalidPartition(format!("tuple {values:?} has no colour below {colors}")));
            }
            table.insert(t, c);
        }
        Ok(Self {
            ground,
            max_size,
            colors,
            table,
        })
    }

    pub fn ground(&self) -> &[u64] {
        &self.ground
    }

    pub fn max_size(&self) -> usize {
        self.max_size
    }

    pub fn colors(&self) -> u32 {
        self.colors
    }

    /// Colour of an increasing tuple of elements.
    pub fn color(&self, tuple: &[u64]) -> Option<u32> {
        let pos: Option<Vec<usize>> = tuple.iter().map(|v| self.ground.binary_search(v).ok()).collect();
        self.table.get(&pos?).copied()
    }

    /// For a set of elements, the common colour of its tuples of each size
    /// `1..=max_size` (`None` where it has no tuples of that size), or `None`
    /// if some size sees two colours.
    pub fn homogeneous_colors(&self, set: &[u64]) -> Option<Vec<Option<u32>>> {
        let mut pos: Vec<usize> = set.iter().map(|v| self.ground.binary_search(v).ok()).collect::<Option<_>>()?;
        pos.sort_unstable();
        pos.dedup();
        let mut state = vec![None; self.max_size];
        for t in increasing_tuples(pos.len(), self.max_size) {
            let tuple: Vec<usize> = t.iter().map(|&i| pos[i]).collect();
            let c = self.table[&tuple];
            match state[tuple.len() - 1] {
                None => state[tuple.len() - 1] = Some(c),
                Some(d) if d != c => return None,
                _ => {}
            }
        }
        Some(state)
    }
}

/// The least (lexicographically) `m`-element set whose increasing tuples
/// of each size share one colour.
pub fn homogeneous_search(p: &Partition, m: usize, cap: usize) -> Result<Option<Vec<u64>>, FreeError> {
    let n = p.ground.len();
    if n > cap {
        return Err(FreeError::CapExceeded {
            what: "ground set",
            size: n as u128,
            cap: cap as u128,
        });
    }
    fn rec(p: &Partition, m: usize, start: usize, cur: &mut Vec<usize>, state: &[Option<u32>]) -> bool {
        if cur.len() == m {
            return true;
        }
        for x in start..p.ground.len() {
            if cur.len() + (p.ground.len() - x) < m {
                return false;
            }
            let mut next = state.to_vec();
            let mut ok = true;
            // new tuples: x on top of every increasing sub-tuple of cur
            for sub in std::iter::once(Vec::new()).chain(increasing_tuples(cur.len(), p.max_size - 1)) {
                let mut t: Vec<usize> = sub.iter().map(|&i| cur[i]).collect();
                t.push(x);
                let c = p.table[&t];
                match next[t.len() - 1] {
                    None => next[t.len() - 1] = Some(c),
                    Some(d) if d != c => {
                        ok = false;
                        break;
                    }
                    _ => {}
                }
            }
            if ok {
                cur.push(x);
                if rec(p, m, x + 1, cur, &next) {
                    return true;
                }
                cur.pop();
            }
        }
        false
    }
    let mut cur = Vec::new();
    Ok(rec(p, m, 0, &mut cur, &vec![None; p.max_size]).then(|| cur.iter().map(|&i| p.ground[i]).collect()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyPartition {
    pub partition: Partition,
    /// Colours `0..gamma` give the position of the bottom element inside the
    /// generated set; colour `gamma` means it is not generated.
    pub gamma: u32,
}

/// The partition that colours `{α < β₁ < … < βₙ}` by the position of `α` in
/// `G(β₁, …, βₙ)`, or by `γ` when `α ∉ G(β₁, …, βₙ)`. Here `G(B)` is the union of
/// `f(t)` over all members `f` and all argument tuples `t` whose entries
/// form exactly the set `B`, so forwards independence only depends on the
/// increasing tuples. Tuples have size up to the largest arity plus one;
/// `γ` is the largest `|G(B)|` (so each `α ∈ G(B)` has a position below it).
pub fn partition_of_family(f: &FunctionFamily) -> Result<FamilyPartition, FreeError> {
    let c = Compiled::new(f)?;
    let n = c.len();
    let all: Vec<usize> = (0..n).collect();
    let mut generated: HashMap<u64, u64> = HashMap::new();
    let mut max_arity = 1;
    for i in 0..c.member_count() {
        max_arity = max_arity.max(c.arity(i));
        for_each_tuple(&all, c.arity(i), |t| {
            let key = t.iter().fold(0u64, |a, &p| a | 1 << p);
            *generated.entry(key).or_default() |= c.out(i, t);
            true
        });
    }
    let gamma = generated.values().map(|m| m.count_ones()).max().unwrap_or(0);
    let ground = c.ground().to_vec();
    let partition = Partition::from_fn(ground.iter().copied(), max_arity + 1, gamma + 1, |t| {
        let pos: Vec<usize> = t.iter().map(|v| ground.binary_search(v).expect("tuple from ground")).collect();
        let alpha = pos[0];
        let key = pos[1..].iter().fold(0u64, |a, &p| a | 1 << p);
        let g = generated.get(&key).copied().unwrap_or(0);
        if g >> alpha & 1 == 1 {
            bits(g).iter().position(|&p| p == alpha).expect("member of g") as u32
        } else {
            gamma
        }
    })?;
    Ok(FamilyPartition { partition, gamma })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_partition_any_subset() {
        let p = Partition::from_fn(0..10, 3, 2, |_| 1).unwrap();
        assert_eq!(homogeneous_search(&p, 5, 20).unwrap(), Some(vec![0, 1, 2, 3, 4]));
        assert_eq!(p.homogeneous_colors(&[2, 5, 7, 9]), Some(vec![Some(1); 3]));
    }

    #[test]
    fn parity_of_pair_sums() {
        let p = Partition::from_fn(0..13, 2, 2, |t| if t.len() == 1 { 0 } else { ((t[0] + t[1]) % 2) as u32 }).unwrap();
        let h = homogeneous_search(&p, 3, 20).unwrap().unwrap();
        assert_eq!(h, vec![0, 2, 4]);
        // oracle: check every triple directly
        let mut found = None;
        'outer: for a in 0..13u64 {
            for b in a + 1..13 {
                for c in b + 1..13 {
                    let s = [(a + b) % 2, (a + c) % 2, (b + c) % 2];
                    if s.iter().all(|&x| x == s[0]) {
                        found = Some(vec![a, b, c]);
                        break 'outer;
                    }
                }
            }
        }
        assert_eq!(found, Some(h));
        assert_eq!(homogeneous_search(&p, 8, 20).unwrap(), None);
    }

    #[test]
    fn family_partition_colors() {
        // f(x) = {x - 1}
        let f = FunctionFamily::affine(0..6, &[(vec![1], -1, None)]);
        let fp = partition_of_family(&f).unwrap();
        assert_eq!(fp.gamma, 1);
        assert_eq!(fp.partition.color(&[2, 3]), Some(0));
        assert_eq!(fp.partition.color(&[1, 3]), Some(1));
        assert_eq!(fp.partition.color(&[4]), Some(1));
        let json = serde_json::to_string(&fp.partition).unwrap();
        assert_eq!(serde_json::from_str::<Partition>(&json).unwrap(), fp.partition);
    }
}

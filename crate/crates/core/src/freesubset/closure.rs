use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::family::{for_each_tuple, table_len, Compiled, FunctionFamily, MAX_TABLE};
use super::FreeError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosureBounds {
    /// Largest arity of a derived member.
    pub max_arity: usize,
    /// Rounds of derivation; round `r` builds on everything from rounds `< r`.
    pub max_depth: usize,
    /// Refuse once the closed family would exceed this many members.
    pub max_members: usize,
    /// Also extract witnesses for all arguments of a member (`m = n_f`),
    /// not only for proper prefixes (`m < n_f`).
    #[serde(default)]
    pub full_witnesses: bool,
}

impl Default for ClosureBounds {
    fn default() -> Self {
        Self {
            max_arity: 3,
            max_depth: 2,
            max_members: 256,
            full_witnesses: false,
        }
    }
}

/// How a member of a closed family was obtained. Indices refer to earlier
/// members of the same closed family.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "via", rename_all = "snake_case")]
pub enum Derivation {
    /// Member `index` of the input, unchanged.
    Original { index: usize },
    /// `x ↦ {x}`. It never covers an element from other elements, so adding
    /// it changes no independence question, but compositions need it to
    /// pass an argument through unchanged.
    Identity,
    /// `(x¹…, …, xᵏ…) ↦ ⋃ { outer(δ₁, …, δₖ) : δᵢ ∈ inner[i](xⁱ…) }`.
    Compose { outer: usize, inner: Vec<usize> },
    /// `(x₀, …) ↦ of(x_{perm[0]}, …)`.
    Permute { of: usize, perm: Vec<usize> },
    /// `(α, x_{m+1}, …) ↦ {β₁, …, βₘ}` for the least `β₁ ≤ … ≤ βₘ`, ordered by
    /// `βₘ` first, with `α ∈ of(β₁, …, βₘ, x_{m+1}, …)`; empty if none.
    Witness { of: usize, m: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosedFamily {
    pub family: FunctionFamily,
    pub derivations: Vec<Derivation>,
    /// The last round added nothing, so the family is closed at these bounds.
    pub saturated: bool,
}

type Table = (usize, Vec<u64>);

fn identity(n: usize) -> Table {
    (1, (0..n).map(|p| 1u64 << p).collect())
}

fn index(n: usize, t: &[usize]) -> usize {
    t.iter().fold(0, |acc, &p| acc * n + p)
}

fn permute(n: usize, f: &Table, perm: &[usize]) -> Table {
    let all: Vec<usize> = (0..n).collect();
    let mut outs = Vec::with_capacity(f.1.len());
    let mut src = vec![0; f.0];
    for_each_tuple(&all, f.0, |t| {
        for (i, &p) in perm.iter().enumerate() {
            src[i] = t[p];
        }
        outs.push(f.1[index(n, &src)]);
        true
    });
    (f.0, outs)
}

fn witness(n: usize, f: &Table, m: usize) -> Table {
    let arity = 1 + f.0 - m;
    let all: Vec<usize> = (0..n).collect();
    let mut outs = Vec::with_capacity(table_len(n, arity) as usize);
    let mut args = vec![0; f.0];
    for_each_tuple(&all, arity, |t| {
        let alpha = t[0];
        args[m..].copy_from_slice(&t[1..]);
        outs.push(least_witness(n, f, alpha, &mut args, m).unwrap_or(0));
        true
    });
    (arity, outs)
}

// Fills args[0..m] with β₁ ≤ … ≤ βₘ, fixing βₘ first and counting each
// coordinate upwards, so the first hit minimises βₘ, then βₘ₋₁, and so on.
fn least_witness(n: usize, f: &Table, alpha: usize, args: &mut [usize], m: usize) -> Option<u64> {
    fn fill(n: usize, f: &Table, alpha: usize, args: &mut [usize], level: usize, limit: usize) -> bool {
        if level == 0 {
            return f.1[index(n, args)] >> alpha & 1 == 1;
        }
        for b in 0..=limit {
            args[level - 1] = b;
            if fill(n, f, alpha, args, level - 1, b) {
                return true;
            }
        }
        false
    }
    if n == 0 {
        return None;
    }
    fill(n, f, alpha, args, m, n - 1).then(|| args[..m].iter().fold(0u64, |a, &b| a | 1 << b))
}

fn compose(n: usize, outer: &Table, inner: &[&Table]) -> Table {
    let arity: usize = inner.iter().map(|t| t.0).sum();
    let all: Vec<usize> = (0..n).collect();
    let mut outs = Vec::with_capacity(table_len(n, arity) as usize);
    let mut delta = vec![0usize; outer.0];
    for_each_tuple(&all, arity, |t| {
        let mut sets = Vec::with_capacity(inner.len());
        let mut at = 0;
        for g in inner {
            sets.push(super::family::bits(g.1[index(n, &t[at..at + g.0])]));
            at += g.0;
        }
        let mut acc = 0u64;
        if sets.iter().all(|s| !s.is_empty()) {
            let mut idx = vec![0usize; sets.len()];
            'outer: loop {
                for (i, s) in sets.iter().enumerate() {
                    delta[i] = s[idx[i]];
                }
                acc |= outer.1[index(n, &delta)];
                let mut i = sets.len();
                loop {
                    if i == 0 {
                        break 'outer;
                    }
                    i -= 1;
                    idx[i] += 1;
                    if idx[i] < sets[i].len() {
                        break;
                    }
                    idx[i] = 0;
                }
            }
        }
        outs.push(acc);
        true
    });
    (arity, outs)
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, k - 1);
            out.push(q);
        }
    }
    out.sort();
    out
}

fn inner_choices(arities: &[usize], slots: usize, budget: usize) -> Vec<Vec<usize>> {
    if slots == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for (i, &a) in arities.iter().enumerate() {
        if a + (slots - 1) <= budget {
            for mut rest in inner_choices(arities, slots - 1, budget - a) {
                rest.insert(0, i);
                out.push(rest);
            }
        }
    }
    out
}

struct Builder {
    n: usize,
    members: Vec<Table>,
    derivations: Vec<Derivation>,
    seen: HashSet<Table>,
    cap: usize,
}

impl Builder {
    fn add(&mut self, t: Table, d: Derivation) -> Result<bool, FreeError> {
        if self.seen.contains(&t) {
            return Ok(false);
        }
        if self.members.len() >= self.cap {
            return Err(FreeError::CapExceeded {
                what: "closed family",
                size: self.members.len() as u128 + 1,
                cap: self.cap as u128,
            });
        }
        self.seen.insert(t.clone());
        self.members.push(t);
        self.derivations.push(d);
        Ok(true)
    }
}

/// Closes `f` under composition, argument permutation and least-witness
/// extraction, within `bounds`. Members are compared extensionally; a
/// candidate equal to an existing member is dropped.
pub fn close_family(f: &FunctionFamily, bounds: ClosureBounds) -> Result<ClosedFamily, FreeError> {
    if bounds.max_arity == 0 || bounds.max_depth == 0 || bounds.max_members == 0 {
        return Err(FreeError::InvalidFamily("closure bounds must be positive".into()));
    }
    let c = Compiled::new(f)?;
    let n = c.len();
    if table_len(n, bounds.max_arity) > MAX_TABLE {
        return Err(FreeError::CapExceeded {
            what: "member table",
            size: table_len(n, bounds.max_arity),
            cap: MAX_TABLE,
        });
    }
    let mut b = Builder {
        n,
        members: Vec::new(),
        derivations: Vec::new(),
        seen: HashSet::new(),
        cap: bounds.max_members.max(c.member_count() + 1),
    };
    for (i, t) in c.parts().iter().enumerate() {
        b.seen.insert(t.clone());
        b.members.push(t.clone());
        b.derivations.push(Derivation::Original { index: i });
    }
    b.add(identity(n), Derivation::Identity)?;

    let mut saturated = false;
    for _ in 0..bounds.max_depth {
        let l = b.members.len();
        let mut grew = false;
        for k in 0..l {
            let (a, _) = b.members[k];
            if a >= 2 && a <= bounds.max_arity {
                for perm in permutations(a).into_iter().skip(1) {
                    let t = permute(b.n, &b.members[k], &perm);
                    grew |= b.add(t, Derivation::Permute { of: k, perm })?;
                }
            }
            let top = if bounds.full_witnesses { a } else { a - 1 };
            for m in 1..=top {
                if 1 + a - m <= bounds.max_arity {
                    let t = witness(b.n, &b.members[k], m);
                    grew |= b.add(t, Derivation::Witness { of: k, m })?;
                }
            }
        }
        let arities: Vec<usize> = b.members[..l].iter().map(|t| t.0).collect();
        for k in 0..l {
            let a = arities[k];
            if a > bounds.max_arity {
                continue;
            }
            for inner in inner_choices(&arities, a, bounds.max_arity) {
                let refs: Vec<&Table> = inner.iter().map(|&i| &b.members[i]).collect();
                let t = compose(b.n, &b.members[k], &refs);
                grew |= b.add(t, Derivation::Compose { outer: k, inner })?;
            }
        }
        if !grew {
            saturated = true;
            break;
        }
    }
    let family = Compiled::from_parts(c.ground().to_vec(), b.members).to_family();
    Ok(ClosedFamily {
        family,
        derivations: b.derivations,
        saturated,
    })
}

impl ClosedFamily {
    /// Recomputes every derived member from its recorded derivation and
    /// compares with the stored table.
    pub fn rederive(&self, original: &FunctionFamily) -> Result<bool, FreeError> {
        let c = Compiled::new(&self.family)?;
        let o = Compiled::new(original)?;
        let n = c.len();
        let parts = c.parts();
        for (i, d) in self.derivations.iter().enumerate() {
            let expect = match d {
                Derivation::Original { index } => o.parts().get(*index).cloned(),
                Derivation::Identity => Some(identity(n)),
                Derivation::Permute { of, perm } => (*of < i).then(|| permute(n, &parts[*of], perm)),
                Derivation::Witness { of, m } => (*of < i).then(|| witness(n, &parts[*of], *m)),
                Derivation::Compose { outer, inner } => (*outer < i && inner.iter().all(|&j| j < i)).then(|| {
                    let refs: Vec<&Table> = inner.iter().map(|&j| &parts[j]).collect();
                    compose(n, &parts[*outer], &refs)
                }),
            };
            if expect.as_ref() != Some(&parts[i]) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

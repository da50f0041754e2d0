use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::FreeError;

/// Largest ground set a family can be compiled over (one bit per element).
pub const MAX_GROUND: usize = 64;
/// Largest number of tuples a single member may be tabulated on.
pub const MAX_TABLE: u128 = 1 << 22;

/// One output of an affine rule: `Σ coeffs[i]·x_i + constant`, reduced
/// modulo `modulus` when given. Values that are negative or outside the
/// ground set are dropped.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Affine {
    pub coeffs: Vec<i64>,
    #[serde(default)]
    pub constant: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<u64>,
}

impl Affine {
    fn apply(&self, args: &[u64]) -> Option<u64> {
        let mut v = i128::from(self.constant);
        for (c, x) in self.coeffs.iter().zip(args) {
            v += i128::from(*c) * i128::from(*x);
        }
        if let Some(m) = self.modulus {
            v = v.rem_euclid(i128::from(m.max(1)));
        }
        u64::try_from(v).ok()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum Rule {
    /// Explicit outputs; tuples not listed map to the empty set.
    Table {
        #[serde(with = "table_pairs")]
        entries: BTreeMap<Vec<u64>, BTreeSet<u64>>,
    },
    /// The set of values of a few affine maps.
    Affine { outputs: Vec<Affine> },
}

mod table_pairs {
    use std::collections::{BTreeMap, BTreeSet};

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    type Table = BTreeMap<Vec<u64>, BTreeSet<u64>>;

    pub fn serialize<S: Serializer>(m: &Table, s: S) -> Result<S::Ok, S::Error> {
        m.iter().filter(|(_, v)| !v.is_empty()).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Table, D::Error> {
        Ok(Vec::<(Vec<u64>, BTreeSet<u64>)>::deserialize(d)?.into_iter().collect())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Member {
    pub arity: usize,
    #[serde(flatten)]
    pub rule: Rule,
}

impl Member {
    pub fn affine(coeffs: Vec<i64>, constant: i64, modulus: Option<u64>) -> Self {
        Self {
            arity: coeffs.len(),
            rule: Rule::Affine {
                outputs: vec![Affine {
                    coeffs,
                    constant,
                    modulus,
                }],
            },
        }
    }

    pub fn table(arity: usize, entries: BTreeMap<Vec<u64>, BTreeSet<u64>>) -> Self {
        Self {
            arity,
            rule: Rule::Table { entries },
        }
    }

    /// Output on `args`, restricted to `ground`.
    pub fn eval(&self, args: &[u64], ground: &BTreeSet<u64>) -> BTreeSet<u64> {
        match &self.rule {
            Rule::Table { entries } => entries.get(args).cloned().unwrap_or_default(),
            Rule::Affine { outputs } => outputs
                .iter()
                .filter_map(|a| a.apply(args))
                .filter(|v| ground.contains(v))
                .collect(),
        }
    }
}

/// A finite family of set-valued functions on a finite ground set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "FamilyRepr", into = "FamilyRepr")]
pub struct FunctionFamily {
    ground: BTreeSet<u64>,
    members: Vec<Member>,
}

#[derive(Serialize, Deserialize)]
struct FamilyRepr {
    ground: BTreeSet<u64>,
    members: Vec<Member>,
}

impl TryFrom<FamilyRepr> for FunctionFamily {
    type Error = FreeError;
    fn try_from(r: FamilyRepr) -> Result<Self, FreeError> {
        FunctionFamily::new(r.ground, r.members)
    }
}

impl From<FunctionFamily> for FamilyRepr {
    fn from(f: FunctionFamily) -> Self {
        FamilyRepr {
            ground: f.ground,
            members: f.members,
        }
    }
}

impl FunctionFamily {
    pub fn new(ground: BTreeSet<u64>, members: Vec<Member>) -> Result<Self, FreeError> {
        for (i, m) in members.iter().enumerate() {
            if m.arity == 0 {
                return Err(FreeError::InvalidFamily(format!("member {i} has arity 0")));
            }
            match &m.rule {
                Rule::Table { entries } => {
                    for (args, out) in entries {
                        if args.len() != m.arity {
                            return Err(FreeError::InvalidFamily(format!("member {i}: tuple {args:?} has the wrong length")));
                        }
                        if let Some(x) = args.iter().chain(out).find(|x| !ground.contains(x)) {
                            return Err(FreeError::InvalidFamily(format!("member {i}: {x} is not in the ground set")));
                        }
                    }
                }
                Rule::Affine { outputs } => {
                    if outputs.iter().any(|a| a.coeffs.len() != m.arity) {
                        return Err(FreeError::InvalidFamily(format!("member {i}: coefficient count differs from arity")));
                    }
                }
            }
        }
        Ok(Self { ground, members })
    }

    /// Shorthand: one single-output affine member per `(coeffs, constant, modulus)`.
    pub fn affine(ground: impl IntoIterator<Item = u64>, members: &[(Vec<i64>, i64, Option<u64>)]) -> Self {
        let members = members.iter().map(|(c, b, m)| Member::affine(c.clone(), *b, *m)).collect();
        Self::new(ground.into_iter().collect(), members).expect("affine members are always valid")
    }

    pub fn ground(&self) -> &BTreeSet<u64> {
        &self.ground
    }

    pub fn members(&self) -> &[Member] {
        &self.members
    }

    pub fn eval(&self, member: usize, args: &[u64]) -> BTreeSet<u64> {
        self.members[member].eval(args, &self.ground)
    }
}

/// A family tabulated over positions of its ground set, with outputs as
/// bitmasks. Position order is the order of the elements.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Compiled {
    ground: Vec<u64>,
    members: Vec<(usize, Vec<u64>)>,
}

pub(crate) fn table_len(n: usize, arity: usize) -> u128 {
    (n as u128).checked_pow(arity as u32).unwrap_or(u128::MAX)
}

/// Calls `f` on every tuple of length `arity` over `elems`, odometer order
/// with the last coordinate fastest.
pub(crate) fn for_each_tuple(elems: &[usize], arity: usize, mut f: impl FnMut(&[usize]) -> bool) -> bool {
    if arity == 0 {
        return f(&[]);
    }
    if elems.is_empty() {
        return true;
    }
    let mut idx = vec![0usize; arity];
    let mut tuple: Vec<usize> = vec![elems[0]; arity];
    loop {
        if !f(&tuple) {
            return false;
        }
        let mut i = arity;
        loop {
            if i == 0 {
                return true;
            }
            i -= 1;
            idx[i] += 1;
            if idx[i] < elems.len() {
                tuple[i] = elems[idx[i]];
                break;
            }
            idx[i] = 0;
            tuple[i] = elems[0];
        }
    }
}

pub(crate) fn bits(mask: u64) -> Vec<usize> {
    (0..64).filter(|i| mask >> i & 1 == 1).collect()
}

impl Compiled {
    pub fn new(f: &FunctionFamily) -> Result<Self, FreeError> {
        let ground: Vec<u64> = f.ground.iter().copied().collect();
        let n = ground.len();
        if n > MAX_GROUND {
            return Err(FreeError::CapExceeded {
                what: "ground set",
                size: n as u128,
                cap: MAX_GROUND as u128,
            });
        }
        let mut members = Vec::with_capacity(f.members.len());
        for m in &f.members {
            let len = table_len(n, m.arity);
            if len > MAX_TABLE {
                return Err(FreeError::CapExceeded {
                    what: "member table",
                    size: len,
                    cap: MAX_TABLE,
                });
            }
            let mut outs = vec![0u64; len as usize];
            let all: Vec<usize> = (0..n).collect();
            let mut k = 0;
            for_each_tuple(&all, m.arity, |t| {
                let args: Vec<u64> = t.iter().map(|&p| ground[p]).collect();
                outs[k] = m
                    .eval(&args, &f.ground)
                    .iter()
                    .map(|v| 1u64 << ground.binary_search(v).expect("outputs lie in the ground set"))
                    .fold(0, |a, b| a | b);
                k += 1;
                true
            });
            members.push((m.arity, outs));
        }
        Ok(Self { ground, members })
    }

    pub(crate) fn from_parts(ground: Vec<u64>, members: Vec<(usize, Vec<u64>)>) -> Self {
        Self { ground, members }
    }

    pub(crate) fn parts(&self) -> &[(usize, Vec<u64>)] {
        &self.members
    }

    /// Back to a family of explicit tables.
    pub fn to_family(&self) -> FunctionFamily {
        let all: Vec<usize> = (0..self.ground.len()).collect();
        let members = self
            .members
            .iter()
            .map(|(arity, outs)| {
                let mut entries = BTreeMap::new();
                let mut k = 0;
                for_each_tuple(&all, *arity, |t| {
                    if outs[k] != 0 {
                        let args = t.iter().map(|&p| self.ground[p]).collect();
                        entries.insert(args, self.set_of(outs[k]).into_iter().collect());
                    }
                    k += 1;
                    true
                });
                Member::table(*arity, entries)
            })
            .collect();
        FunctionFamily::new(self.ground.iter().copied().collect(), members).expect("tables built from a valid family")
    }

    pub fn ground(&self) -> &[u64] {
        &self.ground
    }

    /// Position of a value in the ground set.
    pub fn position(&self, v: u64) -> Option<usize> {
        self.ground.binary_search(&v).ok()
    }

    pub fn len(&self) -> usize {
        self.ground.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ground.is_empty()
    }

    pub fn member_count(&self) -> usize {
        self.members.len()
    }

    pub fn arity(&self, member: usize) -> usize {
        self.members[member].0
    }

    pub(crate) fn index(&self, tuple: &[usize]) -> usize {
        tuple.iter().fold(0, |acc, &p| acc * self.ground.len() + p)
    }

    /// Output bitmask of `member` on a tuple of positions.
    pub fn out(&self, member: usize, tuple: &[usize]) -> u64 {
        self.members[member].1[self.index(tuple)]
    }

    /// Output on raw values; values outside the ground set give `∅`.
    pub fn eval_values(&self, member: usize, args: &[u64]) -> Vec<u64> {
        let pos: Option<Vec<usize>> = args.iter().map(|v| self.ground.binary_search(v).ok()).collect();
        match pos {
            Some(p) if p.len() == self.arity(member) => self.set_of(self.out(member, &p)),
            _ => Vec::new(),
        }
    }

    pub fn mask_of(&self, s: &BTreeSet<u64>) -> Result<u64, FreeError> {
        let mut m = 0;
        for v in s {
            m |= 1u64 << self.ground.binary_search(v).map_err(|_| FreeError::NotInGround(*v))?;
        }
        Ok(m)
    }

    pub fn set_of(&self, mask: u64) -> Vec<u64> {
        bits(mask).into_iter().map(|p| self.ground[p]).collect()
    }

    pub fn is_mutual(&self, mask: u64) -> bool {
        let elems = bits(mask);
        self.members.iter().all(|(arity, outs)| {
            for_each_tuple(&elems, *arity, |t| {
                let used = t.iter().fold(0u64, |a, &p| a | 1 << p);
                outs[self.index(t)] & mask & !used == 0
            })
        })
    }

    pub fn is_forwards(&self, mask: u64) -> bool {
        let elems = bits(mask);
        self.members.iter().all(|(arity, outs)| {
            for_each_tuple(&elems, *arity, |t| {
                let low = *t.iter().min().expect("arity >= 1");
                outs[self.index(t)] & mask & ((1u64 << low) - 1) == 0
            })
        })
    }

    /// Assuming `mask` is mutually independent, whether adding position `x` keeps it so.
    pub fn extends_mutual(&self, mask: u64, x: usize) -> bool {
        let new = mask | 1 << x;
        let elems = bits(new);
        self.members.iter().all(|(arity, outs)| {
            for_each_tuple(&elems, *arity, |t| {
                let used = t.iter().fold(0u64, |a, &p| a | 1 << p);
                let o = outs[self.index(t)];
                if used >> x & 1 == 1 {
                    o & new & !used == 0
                } else {
                    o >> x & 1 == 0
                }
            })
        })
    }

    /// Assuming `mask` is forwards independent, whether adding position `x` keeps it so.
    pub fn extends_forwards(&self, mask: u64, x: usize) -> bool {
        let new = mask | 1 << x;
        let elems = bits(new);
        self.members.iter().all(|(arity, outs)| {
            for_each_tuple(&elems, *arity, |t| {
                let low = *t.iter().min().expect("arity >= 1");
                let o = outs[self.index(t)];
                if t.contains(&x) {
                    o & new & ((1u64 << low) - 1) == 0
                } else {
                    x >= low || o >> x & 1 == 0
                }
            })
        })
    }
}

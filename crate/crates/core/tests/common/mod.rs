//! Independence oracles written straight from the definitions. They share
//! no code with the bitmask checkers in the library.
#![allow(dead_code)]

use std::collections::BTreeSet;

use hatlab::freesubset::FunctionFamily;

/// Calls `visit` on every tuple of length `arity` over `pool`.
pub fn each_args(pool: &[u64], arity: usize, args: &mut Vec<u64>, visit: &mut dyn FnMut(&[u64]) -> bool) -> bool {
    if args.len() == arity {
        return visit(args);
    }
    for &v in pool {
        args.push(v);
        let go_on = each_args(pool, arity, args, visit);
        args.pop();
        if !go_on {
            return false;
        }
    }
    true
}

/// Every argument tuple over the ground, as (entry mask, output mask).
pub fn tuples(f: &FunctionFamily) -> Vec<(u64, u64)> {
    let ground = f.ground();
    let pool: Vec<u64> = ground.iter().copied().collect();
    let bit = |v: u64| 1u64 << pool.iter().position(|&g| g == v).unwrap();
    let mut out = Vec::new();
    for m in f.members() {
        each_args(&pool, m.arity, &mut Vec::new(), &mut |args| {
            let entries = args.iter().fold(0, |acc, &v| acc | bit(v));
            let outputs = m.eval(args, ground).into_iter().fold(0, |acc, v| acc | bit(v));
            out.push((entries, outputs));
            true
        });
    }
    out
}

/// Mutual independence of every subset of the ground, indexed by mask.
pub fn mutual_lattice(f: &FunctionFamily) -> Vec<bool> {
    let ts = tuples(f);
    (0..1u64 << f.ground().len())
        .map(|s| ts.iter().all(|&(e, o)| e & !s != 0 || o & s & !e == 0))
        .collect()
}

pub fn oracle_mutual(f: &FunctionFamily, s: &BTreeSet<u64>) -> bool {
    s.iter().all(|&alpha| {
        let rest: Vec<u64> = s.iter().copied().filter(|&v| v != alpha).collect();
        f.members()
            .iter()
            .all(|m| each_args(&rest, m.arity, &mut Vec::new(), &mut |args| !m.eval(args, f.ground()).contains(&alpha)))
    })
}

pub fn oracle_forwards(f: &FunctionFamily, s: &BTreeSet<u64>) -> bool {
    s.iter().all(|&alpha| {
        let above: Vec<u64> = s.iter().copied().filter(|&v| v > alpha).collect();
        f.members()
            .iter()
            .all(|m| each_args(&above, m.arity, &mut Vec::new(), &mut |args| !m.eval(args, f.ground()).contains(&alpha)))
    })
}

/// Forwards independence of every subset of the ground, indexed by mask.
pub fn forwards_lattice(f: &FunctionFamily) -> Vec<bool> {
    let ts = tuples(f);
    (0..1u64 << f.ground().len())
        .map(|s| {
            ts.iter().all(|&(e, o)| {
                // outputs strictly below every entry
                let below = if e == 0 { 0 } else { (1u64 << e.trailing_zeros()) - 1 };
                e & !s != 0 || o & s & below == 0
            })
        })
        .collect()
}

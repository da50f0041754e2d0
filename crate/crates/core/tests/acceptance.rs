//! End-to-end acceptance criteria. Each criterion prints one PASS/FAIL line
//! with its measurement and wall time; the run exits non-zero if any line
//! is FAIL. Runs without the libtest harness so the lines always show.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use hatlab::adversary::poset_defeat;
use hatlab::engine::{
    all_colorings, run_game, truncate, Color, Coloring, GameSpec, GuessBound, Palette, Population, Visibility,
};
use hatlab::freesubset::{
    close_family, extract_mutual_from_forwards, family_from_sets, is_forwards_independent, is_mutually_independent,
    partition_of_family, sets_from_family, Affine, ClosureBounds, Compiled, FunctionFamily, Member, Padding, Rule,
    DEFAULT_WITNESS_SIZE,
};
use hatlab::ordinal::{code, random_ordinal, OrdinalShape};
use hatlab::poset::unlabeled_posets;
use hatlab::strategies::{named, CodeSegmentPair, ModularSum, NeighborInitialSegment, OrdinalRecursive, Sampled};
use hatlab::sweep::{sweep_cell, CellVerdict};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

mod common;
use common::{mutual_lattice, oracle_forwards, oracle_mutual};

struct Outcome {
    ok: bool,
    detail: String,
}

type Criterion = (&'static str, Duration, fn() -> Outcome);

fn pass(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome { ok, detail: detail.into() }
}

fn affine(coeffs: Vec<i64>, constant: i64, modulus: u64) -> Affine {
    Affine {
        coeffs,
        constant,
        modulus: Some(modulus),
    }
}

fn two_valued(a: Affine, b: Affine) -> Member {
    Member {
        arity: a.coeffs.len(),
        rule: Rule::Affine { outputs: vec![a, b] },
    }
}

// ---------------------------------------------------------------------------

fn criterion_1() -> Outcome {
    let mut bad = Vec::new();
    let mut cells = 0;
    for lambda in 1..=3usize {
        for gamma in 2..=3usize {
            let threshold = (lambda * (gamma - 1)) as u64;
            for kappa in 1..=threshold + 1 {
                cells += 1;
                let v = sweep_cell(lambda, gamma, kappa, 1 << 22, 1 << 20);
                let good = match (&v, kappa <= threshold) {
                    (
                        CellVerdict::Winning {
                            strategy,
                            colorings_checked,
                        },
                        true,
                    ) => strategy.starts_with("block-cover") && *colorings_checked == kappa.pow(lambda as u32),
                    (CellVerdict::Losing { certificate, .. }, false) => {
                        let hats = certificate.coloring.materialize(lambda).unwrap();
                        let spec = GameSpec::finite(lambda, kappa, gamma);
                        let p = named("block-cover", &spec, 0).unwrap();
                        !run_game(&spec, &*p, &Coloring::Table { hats }, lambda).unwrap().won()
                    }
                    _ => false,
                };
                if !good {
                    bad.push(format!("({lambda},{gamma},{kappa})={}", v.label()));
                }
            }
        }
    }
    let space = match sweep_cell(2, 2, 3, 1 << 22, 1 << 20) {
        CellVerdict::Losing { profiles_defeated, .. } => profiles_defeated,
        _ => None,
    };
    pass(
        bad.is_empty() && space == Some(729),
        format!("{cells} cells, mismatches {bad:?}, (2,2,3) profiles defeated {space:?}"),
    )
}

fn criterion_2() -> Outcome {
    let mut games = 0u64;
    let mut bad = 0u64;
    for n in 1..=6usize {
        let spec = GameSpec::finite(n, n as u64, 2);
        let p = ModularSum { n };
        let colorings: Vec<Vec<Color>> = all_colorings(n, n as u64).collect();
        games += colorings.len() as u64;
        bad += colorings
            .into_par_iter()
            .filter(|h| {
                let sum: u64 = h.iter().map(|c| c.as_nat().unwrap()).sum();
                let t = run_game(&spec, &p, &Coloring::Table { hats: h.clone() }, n).unwrap();
                t.verdict.winners.len() != 1
                    || !t.verdict.violations.is_empty()
                    || *t.verdict.winners.first().unwrap() as u64 != sum % n as u64
            })
            .count() as u64;
    }
    pass(bad == 0 && games == 50_069, format!("{games} colorings, {bad} without exactly the predicted winner"))
}

fn ordinal_spec(n: usize) -> GameSpec {
    GameSpec {
        population: Population::Finite(n),
        visibility: Visibility::Full,
        palette: Palette::Ordinals,
        guess_bound: GuessBound::FiniteList,
    }
}

fn criterion_3() -> Outcome {
    let shape = OrdinalShape::default();
    let mut failures = Vec::new();
    for lambda in 2..=4usize {
        let spec = ordinal_spec(lambda);
        let p = OrdinalRecursive { lambda };
        let lost = (0..10_000u64)
            .into_par_iter()
            .filter(|&i| {
                let mut rng = ChaCha8Rng::seed_from_u64(i);
                rng.set_stream(lambda as u64);
                let hats: Vec<Color> = (0..lambda).map(|_| Color::Ord(random_ordinal(&mut rng, &shape))).collect();
                let t = run_game(&spec, &p, &Coloring::Table { hats }, lambda).unwrap();
                !t.won() || !t.verdict.violations.is_empty()
            })
            .count();
        if lost > 0 {
            failures.push(format!("ordinal-recursive λ={lambda}: {lost} losses"));
        }
    }
    let spec = ordinal_spec(2);
    let wrong = (0..10_000u64)
        .into_par_iter()
        .filter(|&i| {
            let mut rng = ChaCha8Rng::seed_from_u64(i);
            rng.set_stream(99);
            let hats: Vec<Color> = (0..2).map(|_| Color::Ord(random_ordinal(&mut rng, &shape))).collect();
            let codes: Vec<_> = hats.iter().map(|c| code(&c.as_ordinal())).collect();
            let smaller = if codes[0] <= codes[1] { 0 } else { 1 };
            let t = run_game(&spec, &CodeSegmentPair, &Coloring::Table { hats }, 2).unwrap();
            !t.verdict.winners.contains(&smaller) || !t.verdict.violations.is_empty()
        })
        .count();
    if wrong > 0 {
        failures.push(format!("code-segment-pair: smaller code lost {wrong} times"));
    }
    pass(failures.is_empty(), format!("3 × 10⁴ recursive games + 10⁴ code games; {failures:?}"))
}

fn criterion_4() -> Outcome {
    let posets: Vec<_> = (1..=6).flat_map(unlabeled_posets).collect();
    let six = unlabeled_posets(6).len();
    let failures: usize = posets
        .par_iter()
        .map(|poset| {
            let spec = GameSpec {
                population: Population::Finite(poset.size()),
                visibility: Visibility::Poset(poset.clone()),
                palette: Palette::Finite(2),
                guess_bound: GuessBound::AtMost(1),
            };
            (0..20u64)
                .filter(|&seed| {
                    let p = Sampled::new(&spec, seed);
                    match poset_defeat(poset, &p, 2, 1, 8) {
                        Ok(cert) => {
                            let replay = run_game(&spec, &p, &cert.coloring, 8).unwrap();
                            replay.won() || !cert.verify(&p).unwrap()
                        }
                        Err(_) => true,
                    }
                })
                .count()
        })
        .sum();
    pass(
        failures == 0 && six == 318,
        format!("{} posets on 1..=6 points ({six} on 6) × 20 profiles, {failures} failures", posets.len()),
    )
}

fn criterion_5() -> Outcome {
    let omega = GameSpec {
        population: Population::Omega,
        visibility: Visibility::Full,
        palette: Palette::Naturals,
        guess_bound: GuessBound::AtMost(1),
    };
    let spec = truncate(&omega, 20).unwrap();
    let mut lines = Vec::new();
    let mut ok = true;
    for (i, name) in ["constant-guess:0", "constant-guess:1", "sampled:1", "sampled:2", "sampled:3"].iter().enumerate() {
        let p = named(name, &spec, 0).unwrap();
        let r = hatlab::adversary::randomized_refute(&spec, &*p, 100_000, 1000 + i as u64, 32, 0.99).unwrap();
        let hi = r.interval.map_or(1.0, |(_, h)| h);
        ok &= hi < 0.52 && r.violations.is_empty();
        lines.push(format!("{} upper {hi:.4}", r.strategy));
    }
    pass(ok, lines.join("; "))
}

fn criterion_6() -> Outcome {
    // Witness: {0, 1} against x ↦ x + 1 (mod 10).
    let succ = FunctionFamily::affine(0..10, &[(vec![1], 1, Some(10))]);
    let s: BTreeSet<u64> = [0, 1].into_iter().collect();
    let witness = is_forwards_independent(&s, &succ).unwrap()
        && !is_mutually_independent(&s, &succ).unwrap()
        && oracle_forwards(&succ, &s)
        && !oracle_mutual(&succ, &s);

    // Every family of at most two members drawn from: affine maps of arity 1
    // and 2, and two-valued affine maps of arity 1, all mod |A|.
    let mut families = Vec::new();
    for a in 1..=5u64 {
        let ai = a as i64;
        let mut pool = Vec::new();
        for c in 0..ai {
            for d in 0..ai {
                pool.push(Member::affine(vec![c], d, Some(a)));
            }
        }
        for c1 in 0..ai {
            for c2 in 0..ai {
                for d in 0..ai {
                    pool.push(Member::affine(vec![c1, c2], d, Some(a)));
                }
            }
        }
        let lines: Vec<(i64, i64)> = (0..ai).flat_map(|c| (0..ai).map(move |d| (c, d))).collect();
        for (i, &(c, d)) in lines.iter().enumerate() {
            for &(c2, d2) in &lines[i + 1..] {
                pool.push(two_valued(affine(vec![c], d, a), affine(vec![c2], d2, a)));
            }
        }
        let ground: BTreeSet<u64> = (0..a).collect();
        families.push(FunctionFamily::new(ground.clone(), vec![]).unwrap());
        for i in 0..pool.len() {
            families.push(FunctionFamily::new(ground.clone(), vec![pool[i].clone()]).unwrap());
            for j in i + 1..pool.len() {
                families.push(FunctionFamily::new(ground.clone(), vec![pool[i].clone(), pool[j].clone()]).unwrap());
            }
        }
    }
    let count = families.len();
    let mismatches: usize = families
        .par_iter()
        .filter(|f| {
            let want = mutual_lattice(f);
            let lattice = |g: &FunctionFamily| {
                let c = Compiled::new(g).unwrap();
                (0..1u64 << c.len()).map(|m| c.is_mutual(m)).collect::<Vec<_>>()
            };
            let widest = f.members().iter().map(|m| match &m.rule {
                Rule::Affine { outputs } => outputs.len(),
                Rule::Table { .. } => f.ground().len(),
            });
            let gamma = widest.max().unwrap_or(0) + 1;
            let plain = family_from_sets(f, gamma, Padding::Absent).unwrap();
            let back = sets_from_family(&plain).unwrap();
            // Padding with a real element can only cover more.
            let padded = family_from_sets(f, gamma, Padding::Value(0)).unwrap();
            let padded_ok = lattice(&padded).iter().zip(&want).all(|(&p, &w)| !p || w);
            lattice(f) != want || lattice(&plain) != want || lattice(&back) != want || !padded_ok
        })
        .count();
    pass(
        witness && mismatches == 0,
        format!("witness {witness}; {count} families, {mismatches} lattice mismatches"),
    )
}

fn random_family(rng: &mut ChaCha8Rng) -> FunctionFamily {
    let a = rng.gen_range(4..=10u64);
    let ground: BTreeSet<u64> = (0..a).collect();
    let members = (0..rng.gen_range(1..=2))
        .map(|_| {
            if rng.gen_bool(0.5) {
                let arity = rng.gen_range(1..=2);
                let coeffs = (0..arity).map(|_| rng.gen_range(0..a as i64)).collect();
                Member::affine(coeffs, rng.gen_range(0..a as i64), Some(a))
            } else {
                let entries = (0..a)
                    .map(|x| {
                        let out = (0..rng.gen_range(0..=2)).map(|_| rng.gen_range(0..a)).collect();
                        (vec![x], out)
                    })
                    .collect();
                Member::table(1, entries)
            }
        })
        .collect();
    FunctionFamily::new(ground, members).unwrap()
}

fn criterion_7() -> Outcome {
    let bounds = ClosureBounds {
        max_arity: 2,
        max_depth: 2,
        max_members: 512,
        ..ClosureBounds::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let instances: Vec<(FunctionFamily, u64)> = (0..500).map(|_| (random_family(&mut rng), rng.gen())).collect();
    let results: Vec<Option<(bool, usize)>> = instances
        .par_iter()
        .map(|(f, seed)| {
            let closed = close_family(f, bounds).ok()?.family;
            // greedy forwards independent set in a random order
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let mut order: Vec<u64> = closed.ground().iter().copied().collect();
            for i in (1..order.len()).rev() {
                order.swap(i, rng.gen_range(0..=i));
            }
            let mut s = BTreeSet::new();
            for v in order {
                s.insert(v);
                if !oracle_forwards(&closed, &s) {
                    s.remove(&v);
                }
            }
            let e = extract_mutual_from_forwards(&s, &closed, DEFAULT_WITNESS_SIZE).ok()?;
            let out: BTreeSet<u64> = e.set.iter().copied().collect();
            Some((out.is_subset(&s) && oracle_mutual(&closed, &out), out.len()))
        })
        .collect();
    let refused = results.iter().filter(|r| r.is_none()).count();
    let done: Vec<(bool, usize)> = results.into_iter().flatten().collect();
    let failures = done.iter().filter(|r| !r.0).count();
    let nonempty = done.iter().filter(|r| r.1 > 0).count();
    pass(
        done.len() == 500 && failures == 0,
        format!("{} instances ({refused} refused by closure bounds), {failures} failures, {nonempty} nonempty", done.len()),
    )
}

fn criterion_8() -> Outcome {
    let mut families = Vec::new();
    for a in 1..=8u64 {
        let ai = a as i64;
        let ground: BTreeSet<u64> = (0..a).collect();
        let mut add = |m: Member| families.push(FunctionFamily::new(ground.clone(), vec![m]).unwrap());
        for c in 0..ai {
            for d in 0..ai {
                add(Member::affine(vec![c], d, Some(a)));
                for c2 in 0..ai {
                    add(Member::affine(vec![c, c2], d, Some(a)));
                }
            }
        }
        for c in 0..ai {
            for d in 0..ai {
                for d2 in d + 1..ai {
                    add(two_valued(affine(vec![c], d, a), affine(vec![c], d2, a)));
                }
            }
        }
    }
    let count = families.len();
    let (checked, failures) = families
        .par_iter()
        .map(|f| {
            let fp = partition_of_family(f).unwrap();
            let ground: Vec<u64> = f.ground().iter().copied().collect();
            let (mut checked, mut failures) = (0u64, 0u64);
            for mask in 1u64..1 << ground.len() {
                let set: Vec<u64> = (0..ground.len()).filter(|i| mask >> i & 1 == 1).map(|i| ground[i]).collect();
                let Some(colors) = fp.partition.homogeneous_colors(&set) else {
                    continue;
                };
                if colors.iter().flatten().any(|&c| c != fp.gamma) {
                    continue;
                }
                checked += 1;
                let s: BTreeSet<u64> = set.into_iter().collect();
                if !(is_forwards_independent(&s, f).unwrap() && oracle_forwards(f, &s)) {
                    failures += 1;
                }
            }
            (checked, failures)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    pass(failures == 0, format!("{count} families, {checked} homogeneous sets of colour γ, {failures} not forwards independent"))
}

fn criterion_9() -> Outcome {
    let mut changed = Vec::new();
    for run in 0..1000u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(run);
        rng.set_stream(9);
        let lambda = rng.gen_range(2..=6usize);
        let kappa = rng.gen_range(2..=5u64);
        let (spec, profile): (GameSpec, Box<dyn hatlab::engine::Profile>) = match run % 4 {
            0 => {
                let s = GameSpec::finite(lambda, kappa, rng.gen_range(2..=3));
                let p = Sampled::new(&s, run);
                (s, Box::new(p))
            }
            1 => (GameSpec::finite(lambda, lambda as u64, 2), Box::new(ModularSum { n: lambda })),
            2 => {
                let s = truncate(&GameSpec::omega_chain(Palette::Naturals), lambda).unwrap();
                (s, Box::new(NeighborInitialSegment { parity: false }))
            }
            _ => {
                let s = GameSpec {
                    guess_bound: GuessBound::FiniteList,
                    ..GameSpec::finite(lambda, kappa, 2)
                };
                let p = Sampled::new(&s, run);
                (s, Box::new(p))
            }
        };
        let k = match spec.palette {
            Palette::Finite(k) => k,
            _ => kappa,
        };
        let hats: Vec<u64> = (0..lambda).map(|_| rng.gen_range(0..k)).collect();
        let me = rng.gen_range(0..lambda);
        let mut other = hats.clone();
        other[me] = (hats[me] + rng.gen_range(1..k)) % k;
        let a = run_game(&spec, &*profile, &Coloring::table(hats), 16).unwrap();
        let b = run_game(&spec, &*profile, &Coloring::table(other), 16).unwrap();
        let (ra, rb) = (&a.logicians[me], &b.logicians[me]);
        if ra.looks != rb.looks || ra.guess != rb.guess || ra.violation != rb.violation {
            changed.push(run);
        }
    }
    pass(changed.is_empty(), format!("1000 runs, own-hat changes visible in {:?}", changed))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("1 finite thresholds", Duration::from_secs(60), criterion_1),
        ("2 modular strategy", Duration::from_secs(10), criterion_2),
        ("3 ordinal strategies", Duration::from_secs(30), criterion_3),
        ("4 poset adversary", Duration::from_secs(60), criterion_4),
        ("5 randomized refutation", Duration::from_secs(60), criterion_5),
        ("6 independence witness and conversions", Duration::from_secs(120), criterion_6),
        ("7 extraction soundness", Duration::from_secs(60), criterion_7),
        ("8 partition bridge", Duration::from_secs(120), criterion_8),
        ("9 no self-information", Duration::from_secs(10), criterion_9),
    ];
    let mut failed = Vec::new();
    for (name, limit, check) in criteria {
        let start = Instant::now();
        let out = check();
        let took = start.elapsed();
        let ok = out.ok && took <= limit;
        println!(
            "{} criterion {name}: {} [{:.2}s of {}s]",
            if ok { "PASS" } else { "FAIL" },
            out.detail,
            took.as_secs_f64(),
            limit.as_secs()
        );
        if !ok {
            failed.push(name);
        }
    }
    if !failed.is_empty() {
        eprintln!("failed: {failed:?}");
        std::process::exit(1);
    }
}

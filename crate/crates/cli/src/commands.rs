use std::collections::BTreeSet;
use std::fs;
use std::path::Path;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use hatlab::adversary::{
    exhaustive_defeat, poset_defeat, randomized_refute, sequential_defeat, strategy_space_defeat, PromiseLadder,
};
use hatlab::engine::{
    all_colorings, run_game, tournament, truncate, Color, Coloring, GameSpec, GuessBound, Palette, Population, Visibility,
};
use hatlab::freesubset::{
    brute_force_max, close_family, extract_mutual_from_forwards, family_from_sets, homogeneous_search, is_forwards_independent,
    is_mutually_independent, max_free_subset, partition_of_family, sets_from_family, ClosureBounds, FunctionFamily, Mode,
    Padding, DEFAULT_WITNESS_SIZE,
};
use hatlab::ordinal::Ordinal;
use hatlab::poset::Poset;
use hatlab::strategies::{named, BlockCover, ModularSum};
use hatlab::sweep::{sweep as run_sweep, to_csv, SweepConfig};
use serde_json::{json, Value};

use crate::{
    BenchArgs, Common, ConvertArgs, ConvertTarget, DefeatArgs, DefeatMode, Format, FreeArgs, ModeArg, PlayArgs, RefuteArgs,
    SweepArgs,
};

/// Report text (already formatted) and exit code.
pub type Outcome = (String, u8);

pub fn emit(common: &Common, report: &str) -> Result<()> {
    match &common.out {
        Some(path) => fs::write(path, report).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{report}");
            Ok(())
        }
    }
}

fn pretty(v: &impl serde::Serialize) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn csv_line(fields: &[String]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(fields).expect("writing to memory");
    String::from_utf8(w.into_inner().expect("writing to memory")).expect("fields are UTF-8")
}

fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    s.split(',')
        .filter(|x| !x.trim().is_empty())
        .map(|x| x.trim().parse::<T>().map_err(|e| anyhow!("{x:?}: {e}")))
        .collect()
}

/// `a..b` (inclusive) or a comma list.
fn parse_range(s: &str) -> Result<Vec<u64>> {
    match s.split_once("..") {
        Some((a, b)) => {
            let (a, b): (u64, u64) = (a.trim().parse()?, b.trim().parse()?);
            Ok((a..=b).collect())
        }
        None => parse_list(s),
    }
}

fn load_spec(text: &str, window: Option<usize>) -> Result<GameSpec> {
    let spec: GameSpec = text.parse()?;
    match (spec.population, window) {
        (Population::Omega, Some(n)) => Ok(truncate(&spec, n)?),
        (Population::Omega, None) => bail!("the spec has ω logicians; pass --window"),
        _ => Ok(spec),
    }
}

fn parse_coloring(text: &str, spec: &GameSpec) -> Result<Coloring> {
    let t = text.trim();
    if t.starts_with('{') {
        return Ok(serde_json::from_str(t)?);
    }
    if t.ends_with(".json") {
        return read_json(Path::new(t));
    }
    let hats: Vec<Color> = t
        .split(',')
        .map(|x| {
            let x = x.trim();
            match spec.palette {
                Palette::Ordinals => x.parse::<Ordinal>().map(Color::Ord).map_err(|e| anyhow!("{x:?}: {e}")),
                _ => x.parse::<u64>().map(Color::Nat).map_err(|e| anyhow!("{x:?}: {e}")),
            }
        })
        .collect::<Result<_>>()?;
    Ok(Coloring::Table { hats })
}

pub fn play(common: &Common, a: &PlayArgs) -> Result<Outcome> {
    let spec = load_spec(&a.spec, a.window)?;
    let profile = named(&a.strategy, &spec, common.seed)?;
    let coloring = parse_coloring(&a.coloring, &spec)?;
    let t = run_game(&spec, &*profile, &coloring, common.budget)?;
    let code = if !t.verdict.violations.is_empty() {
        2
    } else if t.won() {
        0
    } else {
        1
    };
    let report = match common.format {
        Format::Json => pretty(&json!({ "strategy": profile.name(), "spec": spec, "transcript": t }))?,
        Format::Csv => {
            let join = |it: &mut dyn Iterator<Item = String>| it.collect::<Vec<_>>().join(" ");
            "strategy,hats,winners,violations,won\n".to_string()
                + &csv_line(&[
                    profile.name(),
                    join(&mut t.hats.iter().map(|c| c.to_string())),
                    join(&mut t.verdict.winners.iter().map(|w| w.to_string())),
                    join(&mut t.verdict.violations.iter().map(|(i, v)| format!("{i}:{v:?}"))),
                    t.won().to_string(),
                ])
        }
    };
    Ok((report, code))
}

pub fn sweep(common: &Common, a: &SweepArgs) -> Result<Outcome> {
    let cfg = SweepConfig {
        lambdas: parse_range(&a.lambda)?.into_iter().map(|x| x as usize).collect(),
        gammas: parse_range(&a.gamma)?.into_iter().map(|x| x as usize).collect(),
        kappas: parse_range(&a.kappa)?,
        coloring_cap: a.cap,
        space_cap: a.space_cap,
    };
    let cells = run_sweep(&cfg);
    let report = match common.format {
        Format::Json => pretty(&cells)?,
        Format::Csv => to_csv(&cells),
    };
    Ok((report, 0))
}

pub fn defeat(common: &Common, a: &DefeatArgs) -> Result<Outcome> {
    let mode = a.mode.unwrap_or(if a.poset.is_some() { DefeatMode::Poset } else { DefeatMode::Exhaustive });
    let (cert, profile) = match mode {
        DefeatMode::Poset => {
            let path = a.poset.as_ref().ok_or_else(|| anyhow!("--poset is required"))?;
            let poset: Poset = read_json(path)?;
            let k = a.k.ok_or_else(|| anyhow!("--k is required"))?;
            let g = a.g.ok_or_else(|| anyhow!("--g is required"))?;
            let spec = GameSpec {
                population: Population::Finite(poset.size()),
                visibility: Visibility::Poset(poset.clone()),
                palette: Palette::Finite(k),
                guess_bound: GuessBound::AtMost(g),
            };
            let profile = named(&a.strategy, &spec, common.seed)?;
            (Some(poset_defeat(&poset, &*profile, k, g, common.budget)?), profile)
        }
        DefeatMode::Exhaustive => {
            let spec = load_spec(a.spec.as_deref().ok_or_else(|| anyhow!("--spec is required"))?, None)?;
            let profile = named(&a.strategy, &spec, common.seed)?;
            (exhaustive_defeat(&spec, &*profile, common.budget, a.cap)?, profile)
        }
        DefeatMode::Sequential => {
            let spec = load_spec(a.spec.as_deref().ok_or_else(|| anyhow!("--spec is required"))?, None)?;
            let ladder = PromiseLadder {
                sizes: parse_list(a.ladder.as_deref().ok_or_else(|| anyhow!("--ladder is required"))?)?,
            };
            let profile = named(&a.strategy, &spec, common.seed)?;
            (Some(sequential_defeat(&spec, &*profile, &ladder, common.budget, a.cap)?), profile)
        }
    };
    let Some(cert) = cert else {
        let msg = json!({ "strategy": profile.name(), "losing_coloring": Value::Null });
        return Ok((pretty(&msg)?, 1));
    };
    if !cert.verify(&*profile)? {
        bail!("certificate failed to replay");
    }
    let report = match common.format {
        Format::Json => pretty(&cert)?,
        Format::Csv => {
            let mut s = "logician,color,guess,violation\n".to_string();
            for e in &cert.entries {
                s += &csv_line(&[
                    e.logician.to_string(),
                    e.color.to_string(),
                    serde_json::to_string(&e.guess)?,
                    e.violation.map(|v| format!("{v:?}")).unwrap_or_default(),
                ]);
            }
            s
        }
    };
    Ok((report, 0))
}

fn load_family(path: &Path, close: Option<&str>) -> Result<FunctionFamily> {
    let f: FunctionFamily = read_json(path)?;
    let Some(bounds) = close else {
        return Ok(f);
    };
    let parts: Vec<usize> = parse_list(bounds)?;
    let [max_arity, max_depth] = parts[..] else {
        bail!("--close takes `arity,depth`");
    };
    Ok(close_family(
        &f,
        ClosureBounds {
            max_arity,
            max_depth,
            ..ClosureBounds::default()
        },
    )?
    .family)
}

pub fn free(common: &Common, a: &FreeArgs) -> Result<Outcome> {
    let f = load_family(&a.family, a.close.as_deref())?;
    let mode = match a.mode {
        ModeArg::Mutual => Mode::Mutual,
        ModeArg::Forwards => Mode::Forwards,
    };
    let report: Value;
    let mut code = 0;
    if let Some(m) = a.homogeneous {
        let fp = partition_of_family(&f)?;
        let h = homogeneous_search(&fp.partition, m, a.cap)?;
        let colors = h.as_ref().and_then(|s| fp.partition.homogeneous_colors(s));
        let forwards = match &h {
            Some(s) => Some(is_forwards_independent(&s.iter().copied().collect(), &f)?),
            None => None,
        };
        if h.is_none() {
            code = 1;
        }
        report = json!({ "gamma": fp.gamma, "homogeneous": h, "colors": colors, "forwards_independent": forwards });
    } else if let Some(set) = &a.set {
        let s: BTreeSet<u64> = parse_list(set)?.into_iter().collect();
        if a.extract {
            let e = extract_mutual_from_forwards(&s, &f, DEFAULT_WITNESS_SIZE)?;
            let ok = is_mutually_independent(&e.set.iter().copied().collect(), &f)?;
            report = json!({ "extraction": e, "mutually_independent": ok });
        } else {
            let ok = match mode {
                Mode::Mutual => is_mutually_independent(&s, &f)?,
                Mode::Forwards => is_forwards_independent(&s, &f)?,
            };
            if !ok {
                code = 1;
            }
            report = json!({ "mode": mode, "set": s, "independent": ok });
        }
    } else {
        let best = max_free_subset(&f, mode, a.cap)?;
        let oracle = if f.ground().len() <= 20 { Some(brute_force_max(&f, mode)?) } else { None };
        if oracle.is_some_and(|o| o != best.len()) {
            bail!("search found {} but the exhaustive count is {:?}", best.len(), oracle);
        }
        report = json!({ "mode": mode, "size": best.len(), "set": best, "oracle_size": oracle });
    }
    let text = match common.format {
        Format::Json => pretty(&report)?,
        Format::Csv => {
            let obj = report.as_object().cloned().unwrap_or_default();
            let keys: Vec<String> = obj.keys().cloned().collect();
            csv_line(&keys) + &csv_line(&obj.values().map(|v| v.to_string()).collect::<Vec<_>>())
        }
    };
    Ok((text, code))
}

pub fn convert(_common: &Common, a: &ConvertArgs) -> Result<Outcome> {
    let f: FunctionFamily = read_json(&a.family)?;
    let out = match a.to {
        ConvertTarget::Plain => {
            let gamma = a.gamma.ok_or_else(|| anyhow!("--gamma is required"))?;
            let padding = match a.padding.as_str() {
                "absent" => Padding::Absent,
                v => Padding::Value(v.parse().context("--padding takes `absent` or a number")?),
            };
            serde_json::to_value(family_from_sets(&f, gamma, padding)?)?
        }
        ConvertTarget::Sets => serde_json::to_value(sets_from_family(&f)?)?,
        ConvertTarget::Partition => serde_json::to_value(partition_of_family(&f)?)?,
    };
    Ok((pretty(&out)?, 0))
}

pub fn refute(common: &Common, a: &RefuteArgs) -> Result<Outcome> {
    let spec = load_spec("(w,w,2)", Some(a.n))?;
    let profile = named(&a.strategy, &spec, common.seed)?;
    let r = randomized_refute(&spec, &*profile, a.trials, common.seed, common.budget, a.confidence)?;
    let code = match r.interval {
        Some((_, hi)) if hi < a.threshold => 0,
        _ => 1,
    };
    let report = match common.format {
        Format::Json => pretty(&r)?,
        Format::Csv => {
            let (lo, hi) = r.interval.map_or((String::new(), String::new()), |(l, h)| (l.to_string(), h.to_string()));
            "strategy,window,trials,wins,rate,lower,upper,union_bound\n".to_string()
                + &csv_line(&[
                    r.strategy.clone(),
                    r.window.to_string(),
                    r.trials.to_string(),
                    r.wins.to_string(),
                    r.rate.map(|x| x.to_string()).unwrap_or_default(),
                    lo,
                    hi,
                    r.union_bound.to_string(),
                ])
        }
    };
    Ok((report, code))
}

pub fn bench(common: &Common, a: &BenchArgs) -> Result<Outcome> {
    let scale = if a.quick { 1 } else { 10 };
    let mut rows: Vec<(String, u128, String)> = Vec::new();
    let mut time = |name: &str, f: &mut dyn FnMut() -> Result<String>| -> Result<()> {
        let start = Instant::now();
        let result = f()?;
        rows.push((name.to_string(), start.elapsed().as_millis(), result));
        Ok(())
    };
    time("tournament modular-sum n=6", &mut || {
        let s = tournament(&GameSpec::finite(6, 6, 2), &ModularSum { n: 6 }, all_colorings(6, 6), common.budget)?;
        Ok(format!("{} wins / {} games", s.wins, s.games))
    })?;
    time("exhaustive defeat block-cover (3,7,3)", &mut || {
        let c = exhaustive_defeat(&GameSpec::finite(3, 7, 3), &BlockCover { lambda: 3, gamma: 3 }, 4, 1 << 20)?;
        Ok(format!("losing coloring found: {}", c.is_some()))
    })?;
    time("strategy space (2,3,2)", &mut || {
        let r = strategy_space_defeat(2, 3, 2, 1 << 20)?;
        Ok(format!("{} of {} profiles defeated", r.defeated, r.profiles))
    })?;
    time("max free subset, sums on 1..20", &mut || {
        let f = FunctionFamily::affine(1..=20, &[(vec![1, 1], 0, None)]);
        Ok(format!("size {}", max_free_subset(&f, Mode::Mutual, 20)?.len()))
    })?;
    time("randomized refute constant-guess N=20", &mut || {
        let spec = load_spec("(w,w,2)", Some(20))?;
        let p = named("constant-guess", &spec, 0)?;
        let r = randomized_refute(&spec, &*p, 10_000 * scale, common.seed, 4, 0.99)?;
        Ok(format!("{} wins / {}", r.wins, r.trials))
    })?;
    let report = match common.format {
        Format::Json => pretty(&rows.iter().map(|(n, ms, r)| json!({ "workload": n, "millis": ms, "result": r })).collect::<Vec<_>>())?,
        Format::Csv => {
            let mut s = "workload,millis,result\n".to_string();
            for (n, ms, r) in &rows {
                s += &csv_line(&[n.clone(), ms.to_string(), r.clone()]);
            }
            s
        }
    };
    Ok((report, 0))
}

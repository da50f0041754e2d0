use hatlab::adversary::{exhaustive_defeat, poset_defeat, sequential_defeat, wilson_interval, PromiseLadder};
use hatlab::engine::{all_colorings, run_game, Coloring, GameSpec, GuessBound, Palette, Population, Visibility};
use hatlab::poset::unlabeled_posets;
use hatlab::strategies::Sampled;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn exhaustive_defeat_is_sound_and_least(n in 1usize..=3, k in 1u64..=4, g in 2usize..=3, seed in any::<u64>()) {
        let spec = GameSpec::finite(n, k, g);
        let p = Sampled::new(&spec, seed);
        let first_loss = all_colorings(n, k).find(|h| {
            !run_game(&spec, &p, &Coloring::Table { hats: h.clone() }, 8).unwrap().won()
        });
        match exhaustive_defeat(&spec, &p, 8, 1 << 16).unwrap() {
            Some(cert) => {
                let hats = cert.coloring.materialize(n).unwrap();
                let t = run_game(&spec, &p, &cert.coloring, 8).unwrap();
                prop_assert!(!t.won());
                prop_assert!(cert.verify(&p).unwrap());
                prop_assert_eq!(Some(hats), first_loss);
                for e in &cert.entries {
                    prop_assert!(!e.guess.contains(&e.color) || e.violation.is_some());
                }
            }
            None => prop_assert!(first_loss.is_none()),
        }
    }

    #[test]
    fn poset_defeat_replays_to_a_loss(n in 1usize..=5, pick in any::<prop::sample::Index>(), g in 1usize..=2, seed in any::<u64>()) {
        let all = unlabeled_posets(n);
        let poset = all[pick.index(all.len())].clone();
        let k = g as u64 + 1;
        let spec = GameSpec {
            population: Population::Finite(n),
            visibility: Visibility::Poset(poset.clone()),
            palette: Palette::Finite(k),
            guess_bound: GuessBound::AtMost(g),
        };
        let p = Sampled::new(&spec, seed);
        let cert = poset_defeat(&poset, &p, k, g, 8).unwrap();
        let t = run_game(&spec, &p, &cert.coloring, 8).unwrap();
        prop_assert!(!t.won());
        prop_assert!(cert.verify(&p).unwrap());
    }

    #[test]
    fn sequential_defeat_keeps_its_promises(n in 1usize..=3, base in 2u64..=3, seed in any::<u64>()) {
        let spec = GameSpec {
            population: Population::Finite(n),
            visibility: Visibility::Full,
            palette: Palette::Naturals,
            guess_bound: GuessBound::AtMost(1),
        };
        // logician i sees ∏_{j<i} s_j colorings below it, one guess each
        let mut sizes = vec![base];
        while sizes.len() < n {
            sizes.push(sizes.iter().product::<u64>() + 1);
        }
        let ladder = PromiseLadder { sizes };
        let p = Sampled::new(&spec, seed);
        match sequential_defeat(&spec, &p, &ladder, 8, 1 << 16) {
            Ok(cert) => {
                prop_assert!(ladder.keeps(&cert.coloring.materialize(n).unwrap()));
                prop_assert!(!run_game(&spec, &p, &cert.coloring, 8).unwrap().won());
                prop_assert!(cert.verify(&p).unwrap());
            }
            Err(e) => prop_assert!(false, "{e}"),
        }
    }

    #[test]
    fn wilson_interval_is_sane(trials in 1u64..100_000, frac in 0.0f64..=1.0, conf in 0.5f64..0.999) {
        let wins = ((trials as f64) * frac).floor() as u64;
        let (lo, hi) = wilson_interval(wins, trials, conf).unwrap();
        let p = wins as f64 / trials as f64;
        prop_assert!((0.0..=1.0).contains(&lo) && (0.0..=1.0).contains(&hi));
        prop_assert!(lo <= p + 1e-12 && p <= hi + 1e-12);
        let (lo2, hi2) = wilson_interval(wins, trials, (conf + 1.0) / 2.0).unwrap();
        prop_assert!(lo2 <= lo + 1e-12 && hi <= hi2 + 1e-12);
    }
}

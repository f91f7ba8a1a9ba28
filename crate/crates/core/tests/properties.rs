use proptest::prelude::*;

use shiftaut::automaton::index_word;
use shiftaut::corpus::{random_folding, random_hn_element, random_rule, random_sync_transducer, seeded};
use shiftaut::io::{self, MachineFile};
use shiftaut::{Automaton, LocalRule, Transducer};

/// Arbitrary complete automata with up to 6 states over up to 3 letters.
fn automata() -> impl Strategy<Value = Automaton> {
    (2usize..=3, 1usize..=6).prop_flat_map(|(n, m)| {
        proptest::collection::vec(0..m, n * m).prop_map(move |delta| Automaton::new(n, m, delta).unwrap())
    })
}

fn all_words(n: usize, len: usize) -> impl Iterator<Item = Vec<usize>> {
    (0..n.pow(len as u32)).map(move |r| index_word(n, len, r))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn sync_sequence_shrinks_and_stabilizes(a in automata()) {
        let seq = a.sync_sequence();
        let counts = seq.class_counts();
        prop_assert!(counts.windows(2).all(|w| w[0] >= w[1]));
        prop_assert!(seq.stabilization_index() <= a.state_count());
    }

    #[test]
    fn sync_terms_separate_exactly_the_distinguishable_states(a in automata()) {
        // p ~ q in term i iff every word of length i sends them to one state
        let n = a.alphabet_size();
        for (i, term) in a.sync_sequence().terms.iter().enumerate() {
            for p in 0..a.state_count() {
                for q in 0..a.state_count() {
                    let merged = all_words(n, i).all(|w| a.read(p, &w) == a.read(q, &w));
                    prop_assert_eq!(term.partition.same_class(p, q), merged, "term {} states {} {}", i, p, q);
                }
            }
        }
    }

    #[test]
    fn foldings_round_trip_through_de_bruijn(seed in any::<u64>(), n in 2usize..=3, m in 1usize..=2) {
        let a = random_folding(&mut seeded(seed), n, m).unwrap();
        let k = a.sync_level().unwrap();
        let p = a.folding_from_sync().unwrap();
        let g = Automaton::de_bruijn(n, k.max(1)).unwrap();
        prop_assert!(g.quotient(&p).unwrap().is_isomorphic(&a));
    }

    #[test]
    fn quotients_synchronize_no_later(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let a = random_folding(&mut rng, 2, 3).unwrap();
        let k = a.sync_level().unwrap();
        for p in shiftaut::counting::enumerate_foldings(&a, shiftaut::counting::EnumerationMethod::Lattice).unwrap() {
            let level = a.quotient(&p).unwrap().sync_level();
            prop_assert!(matches!(level, Some(l) if l <= k));
        }
    }

    #[test]
    fn product_is_associative_with_identity(seed in any::<u64>(), n in 2usize..=3) {
        let mut rng = seeded(seed);
        let a = random_sync_transducer(&mut rng, n, 2).unwrap();
        let b = random_sync_transducer(&mut rng, n, 2).unwrap();
        let c = random_sync_transducer(&mut rng, n, 1).unwrap();
        let left = a.product_min(&b).unwrap().product_min(&c).unwrap();
        let right = a.product_min(&b.product_min(&c).unwrap()).unwrap();
        prop_assert!(left.equal_omega(&right));
        let id = Transducer::identity(n).unwrap();
        prop_assert!(id.product_min(&a).unwrap().equal_omega(&a));
        prop_assert!(a.product_min(&id).unwrap().equal_omega(&a));
    }

    #[test]
    fn group_laws(seed in any::<u64>(), n in 2usize..=3) {
        let t = random_hn_element(&mut seeded(seed), n, 2, 3).unwrap();
        let inv = t.invert().unwrap();
        prop_assert!(t.product_min(&inv).unwrap().is_identity());
        prop_assert!(inv.product_min(&t).unwrap().is_identity());
        prop_assert!(inv.invert().unwrap().minimal().equal_omega(&t));
        prop_assert_eq!(inv.invert().unwrap().canonical_key(), t.canonical_key());
        for m in [&t, &inv.minimal()] {
            prop_assert!(m.base().is_core() && m.base().is_strongly_synchronizing());
        }
    }

    #[test]
    fn weak_minimization_preserves_outputs(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let t = random_rule(&mut rng, 2, 3).unwrap().to_transducer().unwrap();
        let w = t.weak_minimize();
        let classes = t.omega_partition();
        let depth = 2 * t.state_count();
        for len in 1..=depth.min(8) {
            for word in all_words(2, len) {
                for q in 0..t.state_count() {
                    prop_assert_eq!(t.run(q, &word).0, w.run(classes.class_of(q), &word).0);
                }
            }
        }
    }

    #[test]
    fn sync_levels_add_under_products(seed in any::<u64>(), n in 2usize..=3) {
        let mut rng = seeded(seed);
        let t = random_sync_transducer(&mut rng, n, 3).unwrap();
        let u = random_sync_transducer(&mut rng, n, 2).unwrap();
        let raw = t.product_raw(&u).unwrap().sync_level().unwrap();
        prop_assert!(raw <= t.sync_level().unwrap() + u.sync_level().unwrap());
    }

    #[test]
    fn products_match_rule_composition(seed in any::<u64>(), n in 2usize..=3, l in 1usize..=3, m in 1usize..=2) {
        let mut rng = seeded(seed);
        let f = random_rule(&mut rng, n, l).unwrap();
        let g = random_rule(&mut rng, n, m).unwrap();
        let product = f.to_transducer().unwrap().product_min(&g.to_transducer().unwrap()).unwrap();
        let via_machine = LocalRule::from_transducer(&product).unwrap();
        prop_assert!(via_machine.same_map(&f.compose(&g).unwrap()));
    }

    #[test]
    fn widening_keeps_window_outputs(seed in any::<u64>(), k in 0usize..=3) {
        let mut rng = seeded(seed);
        let f = random_rule(&mut rng, 2, 2).unwrap();
        let word: Vec<usize> = (0..12).map(|i| (seed >> i) as usize & 1).collect();
        let wide = f.extend(k).unwrap().apply_windows(&word).unwrap();
        prop_assert_eq!(&wide[..], &f.apply_windows(&word).unwrap()[k..]);
    }

    #[test]
    fn periodic_images_commute_with_rotation(seed in any::<u64>(), len in 1usize..=7) {
        let mut rng = seeded(seed);
        let t = random_hn_element(&mut rng, 3, 2, 2).unwrap();
        let word: Vec<usize> = (0..len).map(|i| ((seed >> (2 * i)) % 3) as usize).collect();
        let mut rotated = word.clone();
        rotated.rotate_left(1);
        let mut image = t.apply_periodic(&word).unwrap();
        image.rotate_left(1);
        prop_assert_eq!(image, t.apply_periodic(&rotated).unwrap());
    }

    #[test]
    fn text_formats_round_trip(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let a = random_folding(&mut rng, 3, 2).unwrap();
        let t = random_hn_element(&mut rng, 3, 2, 2).unwrap();
        let f = random_rule(&mut rng, 2, 3).unwrap();
        prop_assert_eq!(io::parse_automaton(&io::render_automaton(&a)).unwrap(), a.clone());
        prop_assert_eq!(io::parse_transducer(&io::render_transducer(&t)).unwrap(), t.clone());
        prop_assert_eq!(io::parse_rule(&io::render_rule(&f)).unwrap(), f.clone());
        let p = a.row_partition();
        prop_assert_eq!(io::parse_partition(&io::render_partition(&p)).unwrap(), p);
        let phi = shiftaut::corpus::random_automorphism(&mut rng, &a).unwrap();
        prop_assert_eq!(io::parse_automorphism(&io::render_automorphism(&phi), &a).unwrap(), phi);
        for m in [MachineFile::Automaton(a), MachineFile::Transducer(t), MachineFile::Rule(f)] {
            let text = m.render();
            prop_assert_eq!(MachineFile::parse(&text).unwrap().render(), text);
        }
    }
}

#[test]
fn non_right_permutive_rules_collide() {
    // every non-right-permutive rule on X_2 with window <= 2 identifies two
    // words of length 2m
    for window in 1..=2usize {
        let size = 2usize.pow(window as u32);
        for code in 0..(1usize << size) {
            let f = LocalRule::new(2, window, (0..size).map(|i| (code >> i) & 1).collect()).unwrap();
            if f.is_right_permutive() {
                continue;
            }
            let len = 2 * window;
            let images: Vec<_> = all_words(2, len).map(|w| f.apply_windows(&w).unwrap()).collect();
            let distinct: std::collections::HashSet<_> = images.iter().collect();
            assert!(distinct.len() < images.len(), "rule {:?} looks injective", f.table());
        }
    }
}

#[test]
fn right_permutivity_survives_composition() {
    let rules: Vec<LocalRule> = (1..=3usize)
        .flat_map(|window| {
            let size = 1usize << window;
            (0..(1u64 << size)).filter_map(move |code| {
                let f = LocalRule::new(2, window, (0..size).map(|i| (code >> i) as usize & 1).collect()).unwrap();
                f.is_right_permutive().then_some(f)
            })
        })
        .collect();
    for f in &rules {
        for g in rules.iter().filter(|g| g.window() + f.window() <= 4) {
            assert!(f.compose(g).unwrap().is_right_permutive());
        }
    }
}

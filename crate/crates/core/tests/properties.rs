//! Randomized properties across modules.

use proptest::prelude::*;
use rand::Rng;

use hoca_core::gen;
use hoca_core::hoca2::{replay, L2Config};
use hoca_core::regnotions::{two_store_membership, TwoStoreAutomaton, UnaryAfa};
use hoca_core::regreach::{bounded_post_star, bounded_pre_star, RegCaps, RegVerdict};
use hoca_core::storage::{
    build_storage, parse_automaton, print_automaton, reach_oracle, Alphabet, Caps, OracleResult, StorageConfig, Sym,
};
use hoca_core::trees::{
    control_state_ta, decode, diagonal_ta, encode, enumerate_configs, for_each_tree, singleton_ta, ta_intersect,
    ta_membership, ta_union, validity_ta, Label,
};
use hoca_core::transforms::{invpush_to_pop, pop_to_invpush, split_pushes};

fn config() -> impl Strategy<Value = L2Config> {
    prop::collection::vec((0u16..3, 0u32..4), 0..4).prop_map(|rest| {
        let mut v = vec![(Sym::BOTTOM, 0)];
        v.extend(rest.into_iter().map(|(s, m)| (Sym(s), m)));
        L2Config(v)
    })
}

#[test]
fn validity_agrees_with_decode() {
    let alphabet = Alphabet::bottom_only();
    let ta = validity_ta(&alphabet, 1);
    let labels = [Label::Sym(Sym::BOTTOM), Label::State(0)];
    let mut valid = 0;
    for_each_tree(&labels, 9, |t| {
        let ok = decode(t).is_ok();
        assert_eq!(ta_membership(&ta, t), ok, "{t:?}");
        valid += ok as usize;
    });
    assert!(valid > 0);
}

#[test]
fn diagonal_is_exactly_the_diagonal() {
    let ta = diagonal_ta(0);
    for a in 0..=8 {
        for b in 0..=8 {
            let c = L2Config(vec![(Sym::BOTTOM, a), (Sym::BOTTOM, b)]);
            assert_eq!(ta_membership(&ta, &encode(0, &c)), a == b);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn encode_decode_round_trip(q in 0usize..3, c in config()) {
        let t = encode(q, &c);
        prop_assert_eq!(decode(&t).unwrap(), (q, c));
        prop_assert!(ta_membership(&validity_ta(&gen::alphabet(3), 3), &t));
    }

    #[test]
    fn intersection_and_union_laws(seed in any::<u64>()) {
        let mut rng = gen::rng(seed);
        let labels = [Label::Sym(Sym(0)), Label::Sym(Sym(1)), Label::State(0)];
        let a = gen::random_ta(&mut rng, &labels, 3, 8);
        let b = gen::random_ta(&mut rng, &labels, 3, 8);
        let (i, u) = (ta_intersect(&a, &b), ta_union(&a, &b));
        for_each_tree(&labels, 5, |t| {
            let (x, y) = (ta_membership(&a, t), ta_membership(&b, t));
            assert_eq!(ta_membership(&i, t), x && y);
            assert_eq!(ta_membership(&u, t), x || y);
        });
    }

    #[test]
    fn singleton_accepts_only_its_tree(q in 0usize..2, c in config(), d in config()) {
        let ta = singleton_ta(&encode(q, &c));
        prop_assert!(ta_membership(&ta, &encode(q, &c)));
        prop_assert_eq!(ta_membership(&ta, &encode(q, &d)), c == d);
    }

    #[test]
    fn oracle_traces_replay_and_grow_with_caps(seed in any::<u64>()) {
        let mut rng = gen::rng(seed);
        let st = build_storage("P{_,0,1}(C)").unwrap();
        let ops = st.ops();
        let a = gen::random_storage_automaton(&mut rng, &st, &ops, 3, 6);
        let caps = Caps::new(vec![3], 3, 30);
        for q in 0..3 {
            match reach_oracle(&a, q, &caps) {
                OracleResult::Reachable(t) => {
                    prop_assert!(t.replays(&a));
                    prop_assert_eq!(t.configs()[0], (0, &StorageConfig::initial(&st)));
                    prop_assert_eq!(t.last().0, q);
                    prop_assert!(reach_oracle(&a, q, &caps.scaled(2)).is_reachable());
                }
                OracleResult::NotFoundWithinCaps { exhausted: true } => {
                    prop_assert!(!reach_oracle(&a, q, &caps.scaled(2)).is_reachable());
                }
                OracleResult::NotFoundWithinCaps { exhausted: false } => {}
            }
        }
    }

    #[test]
    fn bounded_reach_traces_are_runs(seed in any::<u64>()) {
        let mut rng = gen::rng(seed);
        let a = gen::random_hocs2_sized(&mut rng, 3, 2, 6);
        let caps = RegCaps::new(3, 3);
        let symbols: Vec<Sym> = a.alphabet().symbols().collect();
        let queries: Vec<_> = (0..3)
            .flat_map(|q| enumerate_configs(&symbols, 2, 2).into_iter().map(move |c| (q, c)))
            .collect();
        let target = control_state_ta(a.alphabet(), 2);
        let pre = bounded_pre_star(&a, &target, &caps, &queries);
        for (query, v) in queries.iter().zip(&pre.verdicts) {
            if let RegVerdict::In(t) = v {
                prop_assert!(replay(&a, t).is_ok());
                prop_assert_eq!(&t.start, query);
                prop_assert_eq!(t.last().0, 2);
            }
        }
        let source = singleton_ta(&encode(0, &L2Config::initial()));
        let post = bounded_post_star(&a, &source, &caps, &queries);
        for (query, v) in queries.iter().zip(&post.verdicts) {
            if let RegVerdict::In(t) = v {
                prop_assert!(replay(&a, t).is_ok());
                prop_assert_eq!(&t.start, &(0, L2Config::initial()));
                let (q, c) = t.last();
                prop_assert_eq!(&(q, c.clone()), query);
            }
        }
    }

    #[test]
    fn transform_output_text_is_stable(seed in any::<u64>()) {
        let mut rng = gen::rng(seed);
        let st = build_storage("P{_,0,1}(C)").unwrap();
        let a = gen::random_storage_automaton(&mut rng, &st, &gen::transform_ops(&st), 3, 5);
        let split = split_pushes(&a).unwrap();
        let inv = pop_to_invpush(&a).unwrap();
        let back = invpush_to_pop(&inv).unwrap();
        for out in [&split, &inv, &back] {
            let once = print_automaton(&parse_automaton(&print_automaton(out)).unwrap());
            prop_assert_eq!(print_automaton(&parse_automaton(&once).unwrap()), once);
        }
        prop_assert!(inv.num_states() >= a.num_states());
        prop_assert_eq!(print_automaton(&pop_to_invpush(&a).unwrap()), print_automaton(&inv));
    }

    #[test]
    fn existential_singleton_two_store_is_an_nfa(seed in any::<u64>(), c in config()) {
        let mut rng = gen::rng(seed);
        let mut tsa = TwoStoreAutomaton::new(gen::alphabet(3));
        for i in 0..3 {
            tsa.add_state(&format!("s{i}"));
        }
        tsa.set_accepting(rng.gen_range(0..3), true);
        let afas: Vec<usize> = (0..4).map(|n| tsa.add_afa(&format!("n{n}"), UnaryAfa::exactly(n))).collect();
        let mut edges = Vec::new();
        for _ in 0..6 {
            let (from, to) = (rng.gen_range(0..3), rng.gen_range(0..3));
            let (top, n) = (Sym(rng.gen_range(0..3)), rng.gen_range(0..4usize));
            tsa.add_transition(from, top, afas[n], to);
            edges.push((from, top, n as u32, to));
        }
        let finals: Vec<bool> = (0..3).map(|q| two_store_membership(&tsa, q, &L2Config(Vec::new())).unwrap()).collect();
        fn nfa(edges: &[(usize, Sym, u32, usize)], finals: &[bool], q: usize, rest: &[(Sym, u32)]) -> bool {
            match rest.split_last() {
                None => finals[q],
                Some((&(s, m), below)) => edges
                    .iter()
                    .any(|&(f, t, n, to)| f == q && t == s && n == m && nfa(edges, finals, to, below)),
            }
        }
        for q in 0..3 {
            prop_assert_eq!(two_store_membership(&tsa, q, &c).unwrap(), nfa(&edges, &finals, q, &c.0));
        }
    }
}

/// No small 2-store automaton over `⊥` with bounded AFAs accepts exactly the
/// diagonal on heights two and counters up to 8.
#[test]
fn small_two_store_corpus_misses_the_diagonal() {
    let mut rng = gen::rng(11);
    let pairs: Vec<(u32, u32)> = (0..=8).flat_map(|a| (0..=8).map(move |b| (a, b))).collect();
    for _ in 0..2_000 {
        let mut tsa = TwoStoreAutomaton::new(Alphabet::bottom_only());
        for i in 0..3 {
            tsa.add_state(&format!("s{i}"));
            tsa.set_accepting(i, rng.gen_bool(0.4));
        }
        for j in 0..3 {
            let mut afa = UnaryAfa::new("r0");
            for k in 1..3 {
                afa.add_state(&format!("r{k}"));
            }
            for k in 0..3 {
                afa.set_accepting(k, rng.gen_bool(0.5));
                if rng.gen_bool(0.3) {
                    afa.set_mode(k, hoca_core::storage::Mode::Universal);
                }
            }
            for _ in 0..rng.gen_range(1..=5) {
                afa.add_transition(rng.gen_range(0..3), rng.gen_range(0..3));
            }
            let idx = tsa.add_afa(&format!("a{j}"), afa);
            for _ in 0..2 {
                tsa.add_transition(rng.gen_range(0..3), Sym::BOTTOM, idx, rng.gen_range(0..3));
            }
        }
        let exact = pairs.iter().all(|&(a, b)| {
            let c = L2Config(vec![(Sym::BOTTOM, a), (Sym::BOTTOM, b)]);
            two_store_membership(&tsa, 0, &c).unwrap() == (a == b)
        });
        assert!(!exact, "{}", tsa.render());
    }
}

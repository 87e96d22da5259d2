//! Seeded random instances for property tests, acceptance runs and
//! benchmarks.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::hoca2::{Hocs2, L2Op};
use crate::pds::{PAutomaton, Pds};
use crate::storage::{
    apply_op, eval_test, satisfiable_vectors, Alphabet, OpId, StorageAutomaton, StorageConfig, StorageExpr, Sym,
    ValLetter,
};
use crate::trees::{Label, TreeAutomaton};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `_` followed by `0`, `1`, … up to `n` symbols in total.
pub fn alphabet(n: usize) -> Alphabet {
    assert!(n >= 1);
    let mut names = vec!["_".to_string()];
    names.extend((0..n - 1).map(|i| i.to_string()));
    Alphabet::new(names).expect("bottom is present")
}

/// Size bounds for random level-2 automata. Each size is drawn uniformly
/// from `1..=max` (states from `2..=max`).
#[derive(Copy, Clone, Debug)]
pub struct HocsShape {
    pub max_states: usize,
    pub max_symbols: usize,
    pub max_transitions: usize,
}

pub fn random_hocs2(rng: &mut impl Rng, shape: &HocsShape) -> Hocs2 {
    let n = rng.gen_range(2.min(shape.max_states)..=shape.max_states);
    let k = rng.gen_range(1..=shape.max_symbols);
    let m = rng.gen_range(1..=shape.max_transitions);
    random_hocs2_sized(rng, n, k, m)
}

pub fn random_hocs2_sized(rng: &mut impl Rng, states: usize, symbols: usize, transitions: usize) -> Hocs2 {
    let mut a = Hocs2::with_states(alphabet(symbols), states);
    for _ in 0..transitions {
        let from = rng.gen_range(0..states);
        let to = rng.gen_range(0..states);
        let top = Sym(rng.gen_range(0..symbols) as u16);
        let op = match rng.gen_range(0..5) {
            0 => L2Op::Push(Sym(rng.gen_range(0..symbols) as u16)),
            1 => L2Op::Pop,
            2 => L2Op::Inc,
            3 => L2Op::Dec,
            _ => L2Op::Nop,
        };
        a.add_transition(from, top, op, to);
    }
    a
}

pub fn random_pds(rng: &mut impl Rng, states: usize, symbols: usize, rules: usize) -> Pds {
    let mut p = Pds::new(states, symbols);
    for _ in 0..rules {
        let len = rng.gen_range(0..=2);
        let push: Vec<usize> = (0..len).map(|_| rng.gen_range(0..symbols)).collect();
        p.add_rule(
            rng.gen_range(0..states),
            rng.gen_range(0..symbols),
            rng.gen_range(0..states),
            &push,
        );
    }
    p
}

/// A P-automaton with up to `extra` non-control states and no transition
/// into a control state.
pub fn random_pautomaton(rng: &mut impl Rng, pds: &Pds, extra: usize, transitions: usize) -> PAutomaton {
    let nc = pds.num_states();
    let mut b = PAutomaton::new(nc);
    let extra = rng.gen_range(1..=extra.max(1));
    for _ in 0..extra {
        let s = b.add_state();
        b.set_accepting(s, rng.gen_bool(0.5));
    }
    for _ in 0..transitions {
        let from = rng.gen_range(0..b.num_states());
        let to = rng.gen_range(nc..b.num_states());
        b.add_transition(from, rng.gen_range(0..pds.num_symbols()), to);
    }
    if rng.gen_bool(0.2) {
        b.set_accepting(rng.gen_range(0..nc), true);
    }
    b
}

/// An existential automaton with random total test vectors and operations
/// drawn from `ops`.
pub fn random_storage_automaton(
    rng: &mut impl Rng,
    st: &StorageExpr,
    ops: &[OpId],
    states: usize,
    transitions: usize,
) -> StorageAutomaton {
    let mut a = StorageAutomaton::new(st.clone(), "q0").expect("valid storage");
    for i in 1..states {
        a.add_state(&format!("q{i}")).expect("fresh name");
    }
    let vectors = satisfiable_vectors(st);
    for _ in 0..transitions {
        let from = rng.gen_range(0..states);
        let to = rng.gen_range(0..states);
        let v = *vectors.choose(rng).expect("some vector");
        let op = ops.choose(rng).expect("some operation").clone();
        a.add_transition(from, v, to, op).expect("well-typed");
    }
    a
}

/// The level-2 operations the pop/inverse-push passes accept: pushes with
/// an optional counter step, counter steps, no-op and the removal operation
/// of the storage type.
pub fn transform_ops(st: &StorageExpr) -> Vec<OpId> {
    st.ops()
        .into_iter()
        .filter(|op| match op {
            OpId::PushWith(_, g) | OpId::Stay(g) => matches!(**g, OpId::PushSym(_) | OpId::Pop),
            _ => true,
        })
        .collect()
}

/// A random sequence of up to `max_len` letters. Most letters are chosen
/// among those defined on the current configuration so that valid and
/// invalid sequences both occur.
pub fn random_val_sequence(rng: &mut impl Rng, st: &StorageExpr, max_len: usize) -> Vec<ValLetter> {
    let mut letters: Vec<ValLetter> = st.ops().into_iter().map(ValLetter::Op).collect();
    for t in st.tests() {
        letters.push(ValLetter::Test(t.clone(), true));
        letters.push(ValLetter::Test(t, false));
    }
    let len = rng.gen_range(0..=max_len);
    let mut c = Some(StorageConfig::initial(st));
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        let defined: Vec<&ValLetter> = match &c {
            Some(cur) => letters
                .iter()
                .filter(|l| match l {
                    ValLetter::Op(f) => apply_op(st, f, cur).is_some(),
                    ValLetter::Test(t, r) => eval_test(st, t, cur) == *r,
                })
                .collect(),
            None => Vec::new(),
        };
        let letter = if !defined.is_empty() && rng.gen_bool(0.9) {
            (*defined.choose(rng).expect("nonempty")).clone()
        } else {
            letters.choose(rng).expect("nonempty").clone()
        };
        c = c.and_then(|cur| match &letter {
            ValLetter::Op(f) => apply_op(st, f, &cur),
            ValLetter::Test(t, r) => (eval_test(st, t, &cur) == *r).then_some(cur),
        });
        out.push(letter);
    }
    out
}

/// A tree automaton over `labels` with `states` states and `rules` rules.
pub fn random_ta(rng: &mut impl Rng, labels: &[Label], states: usize, rules: usize) -> TreeAutomaton {
    let mut ta = TreeAutomaton::new();
    for i in 0..states {
        let s = ta.add_state(format!("t{i}"));
        ta.set_accepting(s, rng.gen_bool(0.4));
    }
    fn slot(rng: &mut impl Rng, states: usize) -> Option<usize> {
        rng.gen_bool(0.6).then(|| rng.gen_range(0..states))
    }
    for _ in 0..rules {
        let label = *labels.choose(rng).expect("labels");
        let (l, r) = (slot(rng, states), slot(rng, states));
        ta.add_rule(label, l, r, rng.gen_range(0..states));
    }
    ta
}

//! Automata over an arbitrary storage type.

use std::collections::HashMap;

use super::config::{apply_op, test_bits, StorageConfig};
use super::error::StorageError;
use super::expr::{OpId, StorageExpr, TestId};

pub type StateId = usize;

/// Branching mode of a control state.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Default)]
pub enum Mode {
    #[default]
    Existential,
    Universal,
}

/// A transition `(q, R, p, f)`. `tests` is the total test vector `R` packed
/// as a bit set in the order of [`StorageExpr::tests`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Transition {
    pub from: StateId,
    pub tests: u64,
    pub to: StateId,
    pub op: OpId,
}

/// A finite control over a storage type.
#[derive(Clone, Debug)]
pub struct StorageAutomaton {
    storage: StorageExpr,
    states: Vec<String>,
    index: HashMap<String, StateId>,
    modes: Vec<Mode>,
    initial: StateId,
    final_state: StateId,
    transitions: Vec<Transition>,
    outgoing: Vec<Vec<usize>>,
}

impl StorageAutomaton {
    /// Creates an automaton with a single state that is both initial and final.
    pub fn new(storage: StorageExpr, initial: &str) -> Result<Self, StorageError> {
        let n = storage.test_count();
        if n > 64 {
            return Err(StorageError::TooManyTests(n));
        }
        let mut a = StorageAutomaton {
            storage,
            states: Vec::new(),
            index: HashMap::new(),
            modes: Vec::new(),
            initial: 0,
            final_state: 0,
            transitions: Vec::new(),
            outgoing: Vec::new(),
        };
        a.add_state(initial)?;
        Ok(a)
    }

    pub fn storage(&self) -> &StorageExpr {
        &self.storage
    }

    pub fn add_state(&mut self, name: &str) -> Result<StateId, StorageError> {
        if self.index.contains_key(name) {
            return Err(StorageError::DuplicateState(name.to_string()));
        }
        let id = self.states.len();
        self.states.push(name.to_string());
        self.index.insert(name.to_string(), id);
        self.modes.push(Mode::Existential);
        self.outgoing.push(Vec::new());
        Ok(id)
    }

    /// Returns the state with this name, creating it if needed.
    pub fn ensure_state(&mut self, name: &str) -> StateId {
        match self.index.get(name) {
            Some(&id) => id,
            None => self.add_state(name).expect("fresh name"),
        }
    }

    /// Adds a state whose name starts with `base` and does not clash with
    /// any existing state.
    pub fn fresh_state(&mut self, base: &str) -> StateId {
        if !self.index.contains_key(base) {
            return self.add_state(base).expect("fresh name");
        }
        let mut i = 1usize;
        loop {
            let name = format!("{base}~{i}");
            if !self.index.contains_key(&name) {
                return self.add_state(&name).expect("fresh name");
            }
            i += 1;
        }
    }

    pub fn state(&self, name: &str) -> Option<StateId> {
        self.index.get(name).copied()
    }

    pub fn state_name(&self, q: StateId) -> &str {
        &self.states[q]
    }

    pub fn state_names(&self) -> &[String] {
        &self.states
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn set_initial(&mut self, q: StateId) {
        self.initial = q;
    }

    pub fn final_state(&self) -> StateId {
        self.final_state
    }

    pub fn set_final(&mut self, q: StateId) {
        self.final_state = q;
    }

    pub fn mode(&self, q: StateId) -> Mode {
        self.modes[q]
    }

    pub fn set_mode(&mut self, q: StateId, mode: Mode) {
        self.modes[q] = mode;
    }

    pub fn is_existential(&self) -> bool {
        self.modes.iter().all(|m| *m == Mode::Existential)
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    /// Indices of the transitions leaving `q`, in declaration order.
    pub fn outgoing(&self, q: StateId) -> &[usize] {
        &self.outgoing[q]
    }

    /// Adds a transition after checking that the op is well-typed. Test bits
    /// outside the storage's test set are rejected.
    pub fn add_transition(
        &mut self,
        from: StateId,
        tests: u64,
        to: StateId,
        op: OpId,
    ) -> Result<usize, StorageError> {
        self.storage.check_op(&op)?;
        let n = self.storage.test_count();
        if n < 64 && tests >> n != 0 {
            return Err(StorageError::IllTypedTest(format!("{tests:#b}")));
        }
        for q in [from, to] {
            if q >= self.states.len() {
                return Err(StorageError::UnknownState(format!("#{q}")));
            }
        }
        let idx = self.transitions.len();
        self.transitions.push(Transition {
            from,
            tests,
            to,
            op,
        });
        self.outgoing[from].push(idx);
        Ok(idx)
    }

    /// Adds one transition per statically satisfiable test vector that is
    /// consistent with the partial assignment `tests`.
    pub fn add_transition_partial(
        &mut self,
        from: StateId,
        tests: &[(TestId, bool)],
        to: StateId,
        op: OpId,
    ) -> Result<Vec<usize>, StorageError> {
        let vectors = expand_tests(&self.storage, tests)?;
        let mut out = Vec::with_capacity(vectors.len());
        for v in vectors {
            out.push(self.add_transition(from, v, to, op.clone())?);
        }
        Ok(out)
    }

    /// Applicable transitions at `(q, c)` with their targets, in declaration order.
    pub fn successors(&self, q: StateId, c: &StorageConfig) -> Vec<(usize, StateId, StorageConfig)> {
        let bits = test_bits(&self.storage, c);
        let mut out = Vec::new();
        for &i in &self.outgoing[q] {
            let t = &self.transitions[i];
            if t.tests != bits {
                continue;
            }
            if let Some(next) = apply_op(&self.storage, &t.op, c) {
                out.push((i, t.to, next));
            }
        }
        out
    }
}

/// Every test vector that some configuration of `st` can produce: exactly
/// one `Top` per level, `Top(⊥)` on the base counter, `Empty` free on `Z`.
pub fn satisfiable_vectors(st: &StorageExpr) -> Vec<u64> {
    expand_tests(st, &[]).expect("no constraints")
}

/// Expands a partial test assignment into the statically satisfiable total
/// vectors consistent with it.
pub fn expand_tests(st: &StorageExpr, tests: &[(TestId, bool)]) -> Result<Vec<u64>, StorageError> {
    for (t, _) in tests {
        st.check_test(t)?;
    }
    for (i, (t, b)) in tests.iter().enumerate() {
        if tests[..i].iter().any(|(u, c)| u == t && c != b) {
            return Err(StorageError::ConflictingTest(t.display(st)));
        }
    }
    Ok(expand_level(st, tests))
}

fn expand_level(st: &StorageExpr, tests: &[(TestId, bool)]) -> Vec<u64> {
    match st {
        StorageExpr::Counter => {
            if tests.iter().any(|(t, b)| matches!(t, TestId::Top(_)) && !*b) {
                vec![]
            } else {
                vec![1]
            }
        }
        StorageExpr::ZCounter => {
            if tests.iter().any(|(t, b)| matches!(t, TestId::Top(_)) && !*b) {
                return vec![];
            }
            let empty = tests
                .iter()
                .find(|(t, _)| matches!(t, TestId::Empty))
                .map(|(_, b)| *b);
            match empty {
                Some(true) => vec![3],
                Some(false) => vec![1],
                None => vec![1, 3],
            }
        }
        StorageExpr::Pushdown { alphabet, inner } | StorageExpr::PushdownInv { alphabet, inner } => {
            let inner_tests: Vec<(TestId, bool)> = tests
                .iter()
                .filter_map(|(t, b)| match t {
                    TestId::Inner(u) => Some(((**u).clone(), *b)),
                    _ => None,
                })
                .collect();
            let inner_vecs = expand_level(inner, &inner_tests);
            let mut out = Vec::new();
            for s in alphabet.symbols() {
                let allowed = tests.iter().all(|(t, b)| match t {
                    TestId::Top(u) => (*u == s) == *b,
                    _ => true,
                });
                if !allowed {
                    continue;
                }
                for iv in &inner_vecs {
                    out.push((1u64 << s.index()) | (iv << alphabet.len()));
                }
            }
            out
        }
    }
}

/// Decodes a packed vector into its true literals, in canonical order.
pub fn true_tests(st: &StorageExpr, bits: u64) -> Vec<TestId> {
    st.tests()
        .into_iter()
        .enumerate()
        .filter(|(i, _)| bits >> i & 1 == 1)
        .map(|(_, t)| t)
        .collect()
}

/// Renders a satisfiable vector compactly: the true `top` at each level and
/// the explicit `empty` value on a zero-test counter.
pub fn display_tests(st: &StorageExpr, bits: u64) -> String {
    let mut parts = Vec::new();
    render_level(st, bits, &mut parts, 0);
    parts.join(" ")
}

fn render_level(st: &StorageExpr, bits: u64, parts: &mut Vec<String>, depth: usize) {
    let wrap = |s: String| -> String {
        let mut s = s;
        for _ in 0..depth {
            s = format!("inner({s})");
        }
        s
    };
    match st {
        StorageExpr::Counter => {}
        StorageExpr::ZCounter => {
            let v = if bits & 2 != 0 { "true" } else { "false" };
            parts.push(wrap(format!("empty={v}")));
        }
        StorageExpr::Pushdown { alphabet, inner } | StorageExpr::PushdownInv { alphabet, inner } => {
            let n = alphabet.len();
            let tops: Vec<_> = alphabet.symbols().filter(|s| bits >> s.index() & 1 == 1).collect();
            if tops.len() == 1 {
                parts.push(wrap(format!("top={}", alphabet.name(tops[0]))));
            } else {
                for s in alphabet.symbols() {
                    let op = if bits >> s.index() & 1 == 1 { "=" } else { "!=" };
                    parts.push(wrap(format!("top{op}{}", alphabet.name(s))));
                }
            }
            render_level(inner, bits >> n, parts, depth + 1);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::storage::expr::{Alphabet, Sym};

    fn pc() -> StorageExpr {
        StorageExpr::pushdown(Alphabet::binary(), StorageExpr::Counter)
    }

    #[test]
    fn empty_automaton_has_no_successors() {
        let a = StorageAutomaton::new(pc(), "q0").unwrap();
        let c = StorageConfig::initial(a.storage());
        assert!(a.successors(0, &c).is_empty());
    }

    #[test]
    fn pop_needs_two_entries() {
        let mut a = StorageAutomaton::new(pc(), "q0").unwrap();
        let q1 = a.add_state("q1").unwrap();
        a.add_transition_partial(0, &[(TestId::Top(Sym::BOTTOM), true)], q1, OpId::Pop)
            .unwrap();
        let c = StorageConfig::initial(a.storage());
        assert!(a.successors(0, &c).is_empty());
        let c2 = StorageConfig::Stack(vec![
            (Sym::BOTTOM, StorageConfig::Counter(0)),
            (Sym::BOTTOM, StorageConfig::Counter(2)),
        ]);
        let s = a.successors(0, &c2);
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].1, q1);
        assert_eq!(s[0].2, c);
    }

    #[test]
    fn dont_care_expansion_counts() {
        let pz = StorageExpr::pushdown(Alphabet::binary(), StorageExpr::ZCounter);
        assert_eq!(satisfiable_vectors(&pz).len(), 6);
        assert_eq!(satisfiable_vectors(&pc()).len(), 3);
        let v = expand_tests(&pz, &[(TestId::Top(Sym(1)), false)]).unwrap();
        assert_eq!(v.len(), 4);
        assert!(expand_tests(
            &pz,
            &[(TestId::Top(Sym(1)), false), (TestId::Top(Sym(1)), true)]
        )
        .is_err());
    }

    #[test]
    fn vectors_match_configs() {
        let pz = StorageExpr::pushdown(Alphabet::binary(), StorageExpr::ZCounter);
        let all = satisfiable_vectors(&pz);
        for s in 0..3u16 {
            for n in 0..3 {
                let c = StorageConfig::Stack(vec![
                    (Sym::BOTTOM, StorageConfig::Counter(1)),
                    (Sym(s), StorageConfig::Counter(n)),
                ]);
                assert!(all.contains(&test_bits(&pz, &c)));
            }
        }
    }

    #[test]
    fn display_round() {
        let pz = StorageExpr::pushdown(Alphabet::binary(), StorageExpr::ZCounter);
        let v = expand_tests(&pz, &[(TestId::Top(Sym(2)), true), (TestId::Inner(Box::new(TestId::Empty)), true)])
            .unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(display_tests(&pz, v[0]), "top=1 inner(empty=true)");
    }
}

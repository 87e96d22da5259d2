//! Level-2 counter automata over `P_Σ(C)` with the restricted operations
//! pop, push, increment, decrement and no-op.

mod normalize;
mod runs;

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::storage::{
    parse_automaton_file, Alphabet, Cursor, OpId, StateId, StorageAutomaton, StorageConfig,
    StorageError, StorageExpr, Sym, Trace,
};

pub use normalize::{normalize, op_to_l2};
pub use runs::{
    classify_run, loops_oracle, replay, ret_oracle, stabilize_set, stabilized_loops, stabilized_ret,
    L2Trace, RunClass, SetOracle,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Hocs2Error {
    #[error(transparent)]
    Storage(#[from] StorageError),
    #[error("unsupported operation `{op}` at line {line}; normalize the automaton first")]
    UnsupportedOp { op: String, line: usize },
    #[error("expected a pushdown of plain counters, found {0}")]
    WrongStorage(String),
    #[error("state `{0}` is universal; level-2 automata here are existential")]
    UniversalState(String),
    #[error("invalid trace at step {0}")]
    InvalidTrace(usize),
}

/// A restricted level-2 operation.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum L2Op {
    Pop,
    /// `push_{τ,id}`.
    Push(Sym),
    /// `stay(push ⊥)`.
    Inc,
    /// `stay(pop)`.
    Dec,
    /// `id`.
    Nop,
}

impl L2Op {
    pub fn to_op(self) -> OpId {
        match self {
            L2Op::Pop => OpId::Pop,
            L2Op::Push(s) => OpId::PushPair(s),
            L2Op::Inc => OpId::inc(),
            L2Op::Dec => OpId::dec(),
            L2Op::Nop => OpId::Id,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct L2Transition {
    pub from: StateId,
    pub top: Sym,
    pub op: L2Op,
    pub to: StateId,
}

/// A configuration of `P_Σ(C)`: a nonempty sequence of (symbol, counter),
/// bottom first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct L2Config(pub Vec<(Sym, u32)>);

impl L2Config {
    pub fn initial() -> Self {
        L2Config(vec![(Sym::BOTTOM, 0)])
    }

    pub fn height(&self) -> usize {
        self.0.len()
    }

    pub fn top(&self) -> (Sym, u32) {
        *self.0.last().expect("nonempty configuration")
    }

    pub fn max_counter(&self) -> u32 {
        self.0.iter().map(|e| e.1).max().unwrap_or(0)
    }

    pub fn to_storage(&self) -> StorageConfig {
        StorageConfig::Stack(
            self.0
                .iter()
                .map(|&(s, n)| (s, StorageConfig::Counter(n)))
                .collect(),
        )
    }

    pub fn from_storage(c: &StorageConfig) -> Option<Self> {
        let entries = c.entries()?;
        let mut v = Vec::with_capacity(entries.len());
        for (s, inner) in entries {
            match inner {
                StorageConfig::Counter(n) => v.push((*s, *n)),
                StorageConfig::Stack(_) => return None,
            }
        }
        if v.is_empty() {
            None
        } else {
            Some(L2Config(v))
        }
    }

    pub fn display(&self, alphabet: &Alphabet) -> String {
        self.0
            .iter()
            .map(|(s, n)| format!("({},{})", alphabet.name(*s), n))
            .collect()
    }

    pub fn parse(alphabet: &Alphabet, text: &str) -> Result<Self, StorageError> {
        let st = StorageExpr::pushdown(alphabet.clone(), StorageExpr::Counter);
        let c = crate::storage::parse_config(&st, text)?;
        Ok(L2Config::from_storage(&c).expect("typed by the parser"))
    }

    /// Applies a restricted operation; `None` if undefined.
    pub fn apply(&self, op: L2Op) -> Option<L2Config> {
        let mut v = self.0.clone();
        let (_, n) = *v.last()?;
        match op {
            L2Op::Pop => {
                if v.len() < 2 {
                    return None;
                }
                v.pop();
            }
            L2Op::Push(t) => v.push((t, n)),
            L2Op::Inc => v.last_mut()?.1 = n.checked_add(1)?,
            L2Op::Dec => v.last_mut()?.1 = n.checked_sub(1)?,
            L2Op::Nop => {}
        }
        Some(L2Config(v))
    }
}

/// A level-2 counter automaton in restricted form.
#[derive(Clone, Debug)]
pub struct Hocs2 {
    alphabet: Alphabet,
    states: Vec<String>,
    index: HashMap<String, StateId>,
    initial: StateId,
    final_state: StateId,
    transitions: Vec<L2Transition>,
    outgoing: Vec<Vec<usize>>,
}

impl Hocs2 {
    /// A single-state automaton; the state is initial and final.
    pub fn new(alphabet: Alphabet, initial: &str) -> Self {
        let mut a = Hocs2 {
            alphabet,
            states: Vec::new(),
            index: HashMap::new(),
            initial: 0,
            final_state: 0,
            transitions: Vec::new(),
            outgoing: Vec::new(),
        };
        a.add_state(initial);
        a
    }

    /// Builds an automaton with states named `q0..q{n-1}`.
    pub fn with_states(alphabet: Alphabet, n: usize) -> Self {
        let mut a = Hocs2::new(alphabet, "q0");
        for i in 1..n {
            a.add_state(&format!("q{i}"));
        }
        a
    }

    /// Adds a state, or returns the existing one with this name.
    pub fn add_state(&mut self, name: &str) -> StateId {
        if let Some(&q) = self.index.get(name) {
            return q;
        }
        let id = self.states.len();
        self.states.push(name.to_string());
        self.index.insert(name.to_string(), id);
        self.outgoing.push(Vec::new());
        id
    }

    /// Adds a state named after `base` that clashes with no existing state.
    pub fn fresh_state(&mut self, base: &str) -> StateId {
        if !self.index.contains_key(base) {
            return self.add_state(base);
        }
        let mut i = 1usize;
        loop {
            let name = format!("{base}~{i}");
            if !self.index.contains_key(&name) {
                return self.add_state(&name);
            }
            i += 1;
        }
    }

    pub fn add_transition(&mut self, from: StateId, top: Sym, op: L2Op, to: StateId) -> usize {
        assert!(top.index() < self.alphabet.len(), "symbol outside the alphabet");
        if let L2Op::Push(t) = op {
            assert!(t.index() < self.alphabet.len(), "symbol outside the alphabet");
        }
        let i = self.transitions.len();
        self.transitions.push(L2Transition { from, top, op, to });
        self.outgoing[from].push(i);
        i
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn storage(&self) -> StorageExpr {
        StorageExpr::pushdown(self.alphabet.clone(), StorageExpr::Counter)
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
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

    pub fn transitions(&self) -> &[L2Transition] {
        &self.transitions
    }

    pub fn outgoing(&self, q: StateId) -> &[usize] {
        &self.outgoing[q]
    }

    /// Applicable transitions at `(q, c)` in declaration order.
    pub fn successors(&self, q: StateId, c: &L2Config) -> Vec<(usize, StateId, L2Config)> {
        let (top, _) = c.top();
        let mut out = Vec::new();
        for &i in &self.outgoing[q] {
            let t = &self.transitions[i];
            if t.top != top {
                continue;
            }
            if let Some(next) = c.apply(t.op) {
                out.push((i, t.to, next));
            }
        }
        out
    }

    /// The same automaton as a generic storage automaton. State and
    /// transition indices are preserved.
    pub fn to_storage_automaton(&self) -> StorageAutomaton {
        let st = self.storage();
        let mut a = StorageAutomaton::new(st, &self.states[0]).expect("small storage type");
        for name in &self.states[1..] {
            a.add_state(name).expect("distinct names");
        }
        a.set_initial(self.initial);
        a.set_final(self.final_state);
        let inner_bit = 1u64 << self.alphabet.len();
        for t in &self.transitions {
            a.add_transition(t.from, (1u64 << t.top.index()) | inner_bit, t.to, t.op.to_op())
                .expect("restricted ops are well-typed");
        }
        a
    }

    /// Converts a generic trace over [`Hocs2::to_storage_automaton`].
    pub fn trace_from_storage(&self, t: &Trace) -> Option<L2Trace> {
        Some(L2Trace {
            start: (t.start.0, L2Config::from_storage(&t.start.1)?),
            steps: t
                .steps
                .iter()
                .map(|(i, q, c)| Some((*i, *q, L2Config::from_storage(c)?)))
                .collect::<Option<Vec<_>>>()?,
        })
    }
}

impl fmt::Display for Hocs2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::storage::print_automaton(&self.to_storage_automaton()))
    }
}

/// Parses an automaton file over `P{..}(C)` whose operations are all restricted.
pub fn parse_hocs2(text: &str) -> Result<Hocs2, Hocs2Error> {
    let file = parse_automaton_file(text)?;
    let alphabet = match &file.storage {
        StorageExpr::Pushdown { alphabet, inner } if **inner == StorageExpr::Counter => alphabet.clone(),
        other => return Err(Hocs2Error::WrongStorage(other.to_string())),
    };
    let st = file.storage.clone();
    let mut a = Hocs2::new(alphabet.clone(), &file.initial);
    for s in &file.states {
        a.add_state(s);
    }
    let lookup = |a: &Hocs2, name: &str| {
        a.state(name)
            .ok_or_else(|| Hocs2Error::Storage(StorageError::UnknownState(name.to_string())))
    };
    if !file.states.is_empty() && !file.states.contains(&file.initial) {
        return Err(StorageError::UnknownState(file.initial.clone()).into());
    }
    if let Some(f) = &file.final_state {
        let q = lookup(&a, f)?;
        a.set_final(q);
    }
    if let Some(u) = file.universal.first() {
        return Err(Hocs2Error::UniversalState(u.clone()));
    }
    for t in &file.transitions {
        let op = op_to_l2(&t.op).ok_or_else(|| Hocs2Error::UnsupportedOp {
            op: t.op.display(&st),
            line: t.line,
        })?;
        let from = lookup(&a, &t.from)?;
        let to = lookup(&a, &t.to)?;
        let vectors = crate::storage::expand_tests(&st, &t.tests)?;
        for v in vectors {
            let top = Sym(v.trailing_zeros() as u16);
            a.add_transition(from, top, op, to);
        }
    }
    Ok(a)
}

/// Parses `(q,CONFIG)` against the automaton's alphabet.
pub fn parse_l2_state_config(a: &Hocs2, text: &str) -> Result<(StateId, L2Config), StorageError> {
    let mut cur = Cursor::new(text);
    cur.expect('(')?;
    let q = cur.ident()?;
    let q = a
        .state(q)
        .ok_or_else(|| StorageError::UnknownState(q.to_string()))?;
    cur.expect(',')?;
    let c = crate::storage::config(&mut cur, &a.storage())?;
    cur.expect(')')?;
    cur.expect_end()?;
    Ok((q, L2Config::from_storage(&c).expect("typed by the parser")))
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = "storage: P{_,0,1}(C)\nstates: q0 q1 q2\ninitial: q0\nfinal: q2\n\
        trans: q0 [top=_] push(1) q1\ntrans: q1 [top=1] stay(pop) q1\ntrans: q1 [top=1] pop q2\n";

    #[test]
    fn parse_restricted() {
        let a = parse_hocs2(EXAMPLE).unwrap();
        assert_eq!(a.transitions().len(), 3);
        assert_eq!(a.transitions()[0].op, L2Op::Push(Sym(2)));
        assert_eq!(a.transitions()[1].op, L2Op::Dec);
        assert_eq!(a.final_state(), 2);
    }

    #[test]
    fn unsupported_op() {
        let text = "storage: P{_,0,1}(C)\nstates: q0 q1\ninitial: q0\ntrans: q0 [top=_] stay(stay(pop)) q1\n";
        assert!(matches!(
            parse_hocs2(text),
            Err(Hocs2Error::UnsupportedOp { line: 4, .. })
        ));
        let text = "storage: P{_,0,1}(C)\nstates: q0 q1\ninitial: q0\ntrans: q0 [top=_] push(1,stay(pop)) q1\n";
        assert!(matches!(parse_hocs2(text), Err(Hocs2Error::UnsupportedOp { .. })));
    }

    #[test]
    fn no_transitions() {
        let a = parse_hocs2("storage: P{_,0,1}(C)\nstates: q0\ninitial: q0\n").unwrap();
        assert!(a.transitions().is_empty());
    }

    #[test]
    fn dont_care_top_expands_per_symbol() {
        let a = parse_hocs2("storage: P{_,0,1}(C)\nstates: q0\ninitial: q0\ntrans: q0 [] stay(pushsym(_)) q0\n")
            .unwrap();
        assert_eq!(a.transitions().len(), 3);
    }

    #[test]
    fn heights() {
        let ab = Alphabet::new(["_", "a", "b"]).unwrap();
        assert_eq!(L2Config::initial().height(), 1);
        assert_eq!(L2Config::parse(&ab, "(_,0)(b,5)").unwrap().height(), 2);
        assert_eq!(L2Config::parse(&ab, "(a,2)(a,2)(a,0)(b,1)").unwrap().height(), 4);
    }

    #[test]
    fn storage_view_agrees() {
        let a = parse_hocs2(EXAMPLE).unwrap();
        let s = a.to_storage_automaton();
        let c = L2Config(vec![(Sym(0), 0), (Sym(2), 2)]);
        for q in 0..3 {
            let x: Vec<_> = a
                .successors(q, &c)
                .into_iter()
                .map(|(i, p, d)| (i, p, d.to_storage()))
                .collect();
            assert_eq!(x, s.successors(q, &c.to_storage()));
        }
    }
}

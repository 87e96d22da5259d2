//! Storage-simulation compilers between level-2 storage types.
//!
//! Every pass keeps the original control states at their indices and adds
//! auxiliary states named after the source state or transition they serve,
//! so outputs are deterministic.

mod elim;
mod inverse;

pub use elim::eliminate_level2_symbols;
pub use inverse::{annotated_alphabet_size, block_width, invpush_to_pop, pop_to_invpush};

use crate::storage::{Mode, OpId, StateId, StorageAutomaton, StorageError, StorageExpr, Sym, TestId};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TransformError {
    #[error("operation `{op}` on a transition from `{from}` is not supported by this pass")]
    UnsupportedOp { op: String, from: String },
    #[error("storage type `{0}` is not supported by this pass")]
    UnsupportedStorage(String),
    #[error("state `{0}` is universal; passes apply to existential automata")]
    UniversalState(String),
    #[error(transparent)]
    Storage(#[from] StorageError),
}

/// Level-1 operations as seen by the passes.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub(crate) enum Inner {
    Inc,
    Dec,
}

impl Inner {
    pub(crate) fn op(self) -> OpId {
        match self {
            Inner::Inc => OpId::PushSym(Sym::BOTTOM),
            Inner::Dec => OpId::Pop,
        }
    }

    pub(crate) fn inverse(self) -> Inner {
        match self {
            Inner::Inc => Inner::Dec,
            Inner::Dec => Inner::Inc,
        }
    }
}

/// A single level-2 step of a pass input.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub(crate) enum Step {
    Nop,
    Pop,
    InvPush(Sym),
    Push(Sym),
    Stay(Inner),
}

fn inner_of(g: &OpId) -> Option<Option<Inner>> {
    match g {
        OpId::PushSym(s) if s.is_bottom() => Some(Some(Inner::Inc)),
        OpId::Pop => Some(Some(Inner::Dec)),
        OpId::Id => Some(None),
        _ => None,
    }
}

pub(crate) fn classify(a: &StorageAutomaton, from: StateId, op: &OpId) -> Result<Step, TransformError> {
    let unsupported = || TransformError::UnsupportedOp {
        op: op.display(a.storage()),
        from: a.state_name(from).to_string(),
    };
    Ok(match op {
        OpId::Id => Step::Nop,
        OpId::Pop => Step::Pop,
        OpId::InvPush(s) => Step::InvPush(*s),
        OpId::PushPair(s) => Step::Push(*s),
        OpId::Stay(g) => match inner_of(g).ok_or_else(unsupported)? {
            Some(f) => Step::Stay(f),
            None => Step::Nop,
        },
        OpId::PushWith(..) | OpId::PushSym(_) => return Err(unsupported()),
    })
}

/// Checks the input shape and returns the level-2 alphabet size and the
/// inner storage type.
pub(crate) fn check_input(a: &StorageAutomaton, inverse: bool) -> Result<(usize, StorageExpr), TransformError> {
    let st = a.storage();
    let ok_shape = match st {
        StorageExpr::Pushdown { .. } => !inverse,
        StorageExpr::PushdownInv { .. } => inverse,
        _ => false,
    };
    let (alphabet, inner) = st
        .operator_parts()
        .filter(|_| ok_shape)
        .ok_or_else(|| TransformError::UnsupportedStorage(st.to_string()))?;
    if !inner.is_counter() {
        return Err(TransformError::UnsupportedStorage(st.to_string()));
    }
    for q in 0..a.num_states() {
        if a.mode(q) == Mode::Universal {
            return Err(TransformError::UniversalState(a.state_name(q).to_string()));
        }
    }
    Ok((alphabet.len(), inner.clone()))
}

/// Replaces `push(γ, f)` with `push(γ)` followed by `stay(f)` through a
/// fresh state.
pub fn split_pushes(a: &StorageAutomaton) -> Result<StorageAutomaton, TransformError> {
    let mut out = StorageAutomaton::new(a.storage().clone(), a.state_name(0))?;
    for name in &a.state_names()[1..] {
        out.add_state(name)?;
    }
    out.set_initial(a.initial());
    out.set_final(a.final_state());
    for (i, t) in a.transitions().iter().enumerate() {
        match &t.op {
            OpId::PushWith(s, g) => {
                if inner_of(g).is_none() {
                    return Err(TransformError::UnsupportedOp {
                        op: t.op.display(a.storage()),
                        from: a.state_name(t.from).to_string(),
                    });
                }
                let mid = out.fresh_state(&format!("{}.t{i}", a.state_name(t.from)));
                out.add_transition(t.from, t.tests, mid, OpId::PushPair(*s))?;
                out.add_transition_partial(mid, &[], t.to, OpId::stay((**g).clone()))?;
            }
            op => {
                out.add_transition(t.from, t.tests, t.to, op.clone())?;
            }
        }
    }
    Ok(out)
}

/// Output automaton under construction.
pub(crate) struct Out {
    pub a: StorageAutomaton,
}

impl Out {
    /// Copies the states of `src` over a new storage type.
    pub(crate) fn like(src: &StorageAutomaton, storage: StorageExpr) -> Result<Self, TransformError> {
        let mut a = StorageAutomaton::new(storage, src.state_name(0))?;
        for name in &src.state_names()[1..] {
            a.add_state(name)?;
        }
        a.set_initial(src.initial());
        a.set_final(src.final_state());
        Ok(Out { a })
    }

    pub(crate) fn fresh(&mut self, name: &str) -> StateId {
        self.a.fresh_state(name)
    }

    /// One transition guarded by a total vector, or by every satisfiable
    /// vector when `tests` is `None`.
    pub(crate) fn step(&mut self, from: StateId, tests: Guard<'_>, op: OpId, to: StateId) {
        match tests {
            Guard::Exact(v) => {
                self.a.add_transition(from, v, to, op).expect("well-typed output");
            }
            Guard::Partial(p) => {
                self.a
                    .add_transition_partial(from, p, to, op)
                    .expect("well-typed output");
            }
        }
    }

    /// A chain of operations through fresh states `base.1`, `base.2`, ….
    /// Only the first step carries the guard.
    pub(crate) fn chain(&mut self, from: StateId, first: Guard<'_>, ops: &[OpId], to: StateId, base: &str) {
        if ops.is_empty() {
            self.step(from, first, OpId::Id, to);
            return;
        }
        let mut cur = from;
        let mut guard = first;
        for (k, op) in ops.iter().enumerate() {
            let next = if k + 1 == ops.len() {
                to
            } else {
                self.fresh(&format!("{base}.{}", k + 1))
            };
            self.step(cur, guard, op.clone(), next);
            guard = Guard::Partial(&[]);
            cur = next;
        }
    }
}

#[derive(Copy, Clone, Debug)]
pub(crate) enum Guard<'a> {
    Exact(u64),
    Partial(&'a [(TestId, bool)]),
}

pub(crate) const ANY: Guard<'static> = Guard::Partial(&[]);

/// The top symbol and the inner test bits of a level-2 test vector.
pub(crate) fn split_bits(sigma: usize, bits: u64) -> (Sym, u64) {
    let top = (0..sigma).find(|&i| bits & (1 << i) != 0).unwrap_or(0);
    (Sym(top as u16), bits >> sigma)
}

#[cfg(test)]
pub(crate) mod testutil {
    use std::collections::BTreeSet;

    use crate::storage::{stabilized_reachable_states, Caps, StateId, StorageAutomaton};

    /// Reachable states of `a` restricted to the first `n` states.
    pub fn reach_set(a: &StorageAutomaton, n: usize, caps: &Caps) -> BTreeSet<StateId> {
        stabilized_reachable_states(a, caps)
            .into_iter()
            .filter(|&q| q < n)
            .collect()
    }
}

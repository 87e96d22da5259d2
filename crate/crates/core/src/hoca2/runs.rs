//! Runs of level-2 automata: replay, return/loop classification, and
//! bounded oracles for the return and loop sets.

use std::collections::BTreeSet;

use indexmap::IndexSet;

use crate::storage::{Caps, StateId, Sym};

use super::{Hocs2, Hocs2Error, L2Config};

/// A run of a [`Hocs2`]: start configuration and `(transition, state, config)` steps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct L2Trace {
    pub start: (StateId, L2Config),
    pub steps: Vec<(usize, StateId, L2Config)>,
}

impl L2Trace {
    pub fn empty(q: StateId, c: L2Config) -> Self {
        L2Trace {
            start: (q, c),
            steps: Vec::new(),
        }
    }

    pub fn configs(&self) -> impl Iterator<Item = (StateId, &L2Config)> {
        std::iter::once((self.start.0, &self.start.1)).chain(self.steps.iter().map(|(_, q, c)| (*q, c)))
    }

    pub fn last(&self) -> (StateId, &L2Config) {
        match self.steps.last() {
            Some((_, q, c)) => (*q, c),
            None => (self.start.0, &self.start.1),
        }
    }

    /// Builds a trace by firing transitions in order from `start`.
    pub fn fire(aut: &Hocs2, start: (StateId, L2Config), transitions: &[usize]) -> Option<Self> {
        let mut t = L2Trace {
            start,
            steps: Vec::new(),
        };
        for &i in transitions {
            let (q, c) = t.last();
            let (_, p, d) = aut.successors(q, c).into_iter().find(|(j, _, _)| *j == i)?;
            t.steps.push((i, p, d));
        }
        Some(t)
    }
}

/// Checks every step against the successor relation.
pub fn replay(aut: &Hocs2, trace: &L2Trace) -> Result<(), Hocs2Error> {
    let (mut q, mut c) = (trace.start.0, trace.start.1.clone());
    for (k, (i, p, d)) in trace.steps.iter().enumerate() {
        let ok = aut
            .successors(q, &c)
            .into_iter()
            .any(|(j, p2, d2)| j == *i && p2 == *p && d2 == *d);
        if !ok {
            return Err(Hocs2Error::InvalidTrace(k + 1));
        }
        q = *p;
        c = d.clone();
    }
    Ok(())
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum RunClass {
    Return,
    Loop,
    Neither,
}

/// Classifies a run starting at height `base_height` as a return (ends on
/// the prefix below the start entry, touching it only at the end), a loop
/// (ends on the start storage, never touching the prefix) or neither.
pub fn classify_run(aut: &Hocs2, trace: &L2Trace, base_height: usize) -> Result<RunClass, Hocs2Error> {
    replay(aut, trace)?;
    let start = &trace.start.1;
    if start.height() != base_height || base_height == 0 {
        return Ok(RunClass::Neither);
    }
    let prefix = &start.0[..base_height - 1];
    let touches = |c: &L2Config| c.0.as_slice() == prefix;
    let configs: Vec<_> = trace.configs().collect();
    let (_, end) = *configs.last().expect("nonempty");
    let n = configs.len();
    if end.height() + 1 == base_height
        && touches(end)
        && configs[..n - 1].iter().all(|(_, c)| !touches(c))
    {
        return Ok(RunClass::Return);
    }
    if end == start && configs.iter().all(|(_, c)| !touches(c)) {
        return Ok(RunClass::Loop);
    }
    Ok(RunClass::Neither)
}

/// A set of state pairs computed under caps. `truncated` is set when some
/// configuration was cut off by a cap, so the set may be incomplete.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SetOracle {
    pub pairs: BTreeSet<(StateId, StateId)>,
    pub truncated: bool,
}

struct Limits {
    /// Height bound that is part of the question (not a truncation).
    semantic_height: usize,
    cap_height: usize,
    max_counter: u32,
    max_steps: usize,
    max_configs: usize,
}

impl Limits {
    fn new(base: usize, k: Option<usize>, caps: &Caps) -> Self {
        Limits {
            semantic_height: k.map(|k| base + k).unwrap_or(usize::MAX),
            cap_height: caps.max_pd_height.first().copied().unwrap_or(usize::MAX),
            max_counter: caps.max_counter,
            max_steps: caps.max_steps,
            max_configs: caps.max_configs,
        }
    }
}

/// BFS from `(q, start)`. Height-1 configurations are recorded but not
/// expanded when `stop_at_one` is set. Returns the visited set and whether
/// anything was cut off by a cap.
fn explore(
    aut: &Hocs2,
    q: StateId,
    start: &L2Config,
    lim: &Limits,
    stop_at_one: bool,
) -> (IndexSet<(StateId, L2Config)>, bool) {
    let mut seen: IndexSet<(StateId, L2Config)> = IndexSet::new();
    let mut depth = vec![0usize];
    seen.insert((q, start.clone()));
    let mut truncated = false;
    let mut i = 0;
    while i < seen.len() {
        let (p, c) = seen.get_index(i).expect("in range").clone();
        let d = depth[i];
        i += 1;
        if stop_at_one && c.height() == 1 {
            continue;
        }
        for (_, r, next) in aut.successors(p, &c) {
            if next.height() > lim.semantic_height {
                continue;
            }
            if next.height() > lim.cap_height || next.top().1 > lim.max_counter || d + 1 > lim.max_steps {
                truncated = true;
                continue;
            }
            let key = (r, next);
            if seen.contains(&key) {
                continue;
            }
            if seen.len() >= lim.max_configs {
                truncated = true;
                continue;
            }
            seen.insert(key);
            depth.push(d + 1);
        }
    }
    (seen, truncated)
}

/// Pairs `(p, q)` with a return from `(p, (⊥,0)(σ,m))` to `(q, (⊥,0))`,
/// restricted to runs of height at most `2 + k` when `k` is given.
pub fn ret_oracle(aut: &Hocs2, sigma: Sym, m: u32, k: Option<usize>, caps: &Caps) -> SetOracle {
    let start = L2Config(vec![(Sym::BOTTOM, 0), (sigma, m)]);
    let lim = Limits::new(2, k, caps);
    let mut out = SetOracle::default();
    for p in 0..aut.num_states() {
        let (seen, truncated) = explore(aut, p, &start, &lim, true);
        out.truncated |= truncated;
        for (q, c) in &seen {
            if c.height() == 1 {
                out.pairs.insert((p, *q));
            }
        }
    }
    out
}

/// Pairs `(q, q')` with a loop from `(q, (σ,m))` to `(q', (σ,m))`,
/// restricted to runs of height at most `1 + k` when `k` is given.
pub fn loops_oracle(aut: &Hocs2, sigma: Sym, m: u32, k: Option<usize>, caps: &Caps) -> SetOracle {
    let start = L2Config(vec![(sigma, m)]);
    let lim = Limits::new(1, k, caps);
    let mut out = SetOracle::default();
    for q in 0..aut.num_states() {
        let (seen, truncated) = explore(aut, q, &start, &lim, false);
        out.truncated |= truncated;
        for (p, c) in &seen {
            if *c == start {
                out.pairs.insert((q, *p));
            }
        }
    }
    out
}

/// Runs a set oracle under `base`, `2·base` and `4·base`. An untruncated
/// run is exact; otherwise the three results must coincide. `None` means
/// no verdict.
pub fn stabilize_set<F>(base: &Caps, mut f: F) -> Option<BTreeSet<(StateId, StateId)>>
where
    F: FnMut(&Caps) -> SetOracle,
{
    let mut prev: Option<BTreeSet<(StateId, StateId)>> = None;
    for factor in [1, 2, 4] {
        let r = f(&base.scaled(factor));
        if !r.truncated {
            return Some(r.pairs);
        }
        if let Some(p) = &prev {
            if *p != r.pairs {
                return None;
            }
        }
        prev = Some(r.pairs);
    }
    prev
}

pub fn stabilized_ret(aut: &Hocs2, sigma: Sym, m: u32, k: Option<usize>, base: &Caps) -> Option<BTreeSet<(StateId, StateId)>> {
    stabilize_set(base, |caps| ret_oracle(aut, sigma, m, k, caps))
}

pub fn stabilized_loops(aut: &Hocs2, sigma: Sym, m: u32, k: Option<usize>, base: &Caps) -> Option<BTreeSet<(StateId, StateId)>> {
    stabilize_set(base, |caps| loops_oracle(aut, sigma, m, k, caps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hoca2::L2Op;
    use crate::storage::Alphabet;

    fn push_dec_pop() -> Hocs2 {
        let mut a = Hocs2::with_states(Alphabet::binary(), 3);
        a.add_transition(0, Sym(0), L2Op::Push(Sym(2)), 1);
        a.add_transition(1, Sym(2), L2Op::Dec, 1);
        a.add_transition(1, Sym(2), L2Op::Pop, 2);
        a
    }

    #[test]
    fn single_pop_is_return() {
        let a = push_dec_pop();
        let start = L2Config(vec![(Sym(0), 0), (Sym(2), 2)]);
        let t = L2Trace::fire(&a, (1, start), &[2]).unwrap();
        assert_eq!(classify_run(&a, &t, 2).unwrap(), RunClass::Return);
    }

    #[test]
    fn empty_trace_is_loop() {
        let a = push_dec_pop();
        let t = L2Trace::empty(0, L2Config::initial());
        assert_eq!(classify_run(&a, &t, 1).unwrap(), RunClass::Loop);
    }

    #[test]
    fn dipping_run_is_neither() {
        // Pop to the prefix, push back, and come back to the start storage.
        let mut a = Hocs2::with_states(Alphabet::binary(), 3);
        a.add_transition(0, Sym(2), L2Op::Pop, 1);
        a.add_transition(1, Sym(0), L2Op::Push(Sym(2)), 2);
        a.add_transition(2, Sym(2), L2Op::Nop, 0);
        let start = L2Config(vec![(Sym(0), 0), (Sym(2), 0)]);
        let t = L2Trace::fire(&a, (0, start), &[0, 1, 2]).unwrap();
        assert_eq!(t.last().1, &t.start.1);
        assert_eq!(classify_run(&a, &t, 2).unwrap(), RunClass::Neither);
    }

    #[test]
    fn invalid_trace_is_rejected() {
        let a = push_dec_pop();
        let t = L2Trace {
            start: (0, L2Config::initial()),
            steps: vec![(2, 2, L2Config::initial())],
        };
        assert_eq!(classify_run(&a, &t, 1), Err(Hocs2Error::InvalidTrace(1)));
    }

    #[test]
    fn return_oracle_on_push_dec_pop() {
        let a = push_dec_pop();
        let caps = Caps::new(vec![4], 8, 100);
        for m in 0..4 {
            let r = ret_oracle(&a, Sym(2), m, None, &caps);
            assert!(r.pairs.contains(&(1, 2)));
            assert!(!r.pairs.contains(&(0, 2)));
        }
        let l = loops_oracle(&a, Sym(0), 0, None, &caps);
        assert_eq!(l.pairs, [(0, 0), (0, 2), (1, 1), (2, 2)].into_iter().collect());
    }
}

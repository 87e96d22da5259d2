//! Bounded explicit-state oracles.
//!
//! The configuration graph of a storage automaton is infinite, so every
//! search here is cut off by [`Caps`]. A search that finds nothing within
//! caps says nothing about unreachability unless it also reports that no
//! configuration was ever pruned.

use std::collections::BTreeSet;

use indexmap::IndexSet;
use log::debug;

use super::automaton::{Mode, StateId, StorageAutomaton};
use super::config::StorageConfig;

/// Bounds for explicit exploration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Caps {
    /// Maximal stack height per nesting level, outermost first. Levels past
    /// the end use the last entry.
    pub max_pd_height: Vec<usize>,
    pub max_counter: u32,
    /// Maximal run length.
    pub max_steps: usize,
    /// Maximal number of distinct configurations materialized.
    pub max_configs: usize,
}

impl Caps {
    pub fn new(max_pd_height: Vec<usize>, max_counter: u32, max_steps: usize) -> Self {
        Caps {
            max_pd_height,
            max_counter,
            max_steps,
            max_configs: 1_000_000,
        }
    }

    pub fn with_max_configs(mut self, n: usize) -> Self {
        self.max_configs = n;
        self
    }

    /// Every cap multiplied by `factor`.
    pub fn scaled(&self, factor: usize) -> Self {
        Caps {
            max_pd_height: self.max_pd_height.iter().map(|h| h * factor).collect(),
            max_counter: self.max_counter.saturating_mul(factor as u32),
            max_steps: self.max_steps.saturating_mul(factor),
            max_configs: self.max_configs.saturating_mul(factor),
        }
    }

    fn height_cap(&self, level: usize) -> usize {
        self.max_pd_height
            .get(level)
            .or(self.max_pd_height.last())
            .copied()
            .unwrap_or(usize::MAX)
    }

    /// Whether `c` stays within the height and counter caps.
    pub fn admits(&self, c: &StorageConfig) -> bool {
        self.admits_at(c, 0)
    }

    fn admits_at(&self, c: &StorageConfig, level: usize) -> bool {
        match c {
            StorageConfig::Counter(n) => *n <= self.max_counter,
            StorageConfig::Stack(entries) => {
                entries.len() <= self.height_cap(level)
                    && entries.iter().all(|(_, inner)| self.admits_at(inner, level + 1))
            }
        }
    }
}

/// A run: the start configuration followed by `(transition, state, config)`
/// steps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    pub start: (StateId, StorageConfig),
    pub steps: Vec<(usize, StateId, StorageConfig)>,
}

impl Trace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn last(&self) -> (StateId, &StorageConfig) {
        match self.steps.last() {
            Some((_, q, c)) => (*q, c),
            None => (self.start.0, &self.start.1),
        }
    }

    /// All configurations of the run, start included.
    pub fn configs(&self) -> Vec<(StateId, &StorageConfig)> {
        let mut v = vec![(self.start.0, &self.start.1)];
        v.extend(self.steps.iter().map(|(_, q, c)| (*q, c)));
        v
    }

    /// Checks every step against the automaton's successor relation.
    pub fn replays(&self, aut: &StorageAutomaton) -> bool {
        let (mut q, mut c) = (self.start.0, self.start.1.clone());
        for (t, q2, c2) in &self.steps {
            let ok = aut
                .successors(q, &c)
                .into_iter()
                .any(|(i, p, d)| i == *t && p == *q2 && d == *c2);
            if !ok {
                return false;
            }
            q = *q2;
            c = c2.clone();
        }
        true
    }
}

/// Outcome of a bounded search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleResult {
    Reachable(Trace),
    /// Nothing found. `exhausted` is true when no successor was ever pruned
    /// by a cap, in which case the answer is exact.
    NotFoundWithinCaps { exhausted: bool },
}

impl OracleResult {
    pub fn is_reachable(&self) -> bool {
        matches!(self, OracleResult::Reachable(_))
    }

    pub fn trace(&self) -> Option<&Trace> {
        match self {
            OracleResult::Reachable(t) => Some(t),
            _ => None,
        }
    }
}

/// Answer of the stabilization protocol.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Reachable(Trace),
    Unreachable,
}

impl Verdict {
    pub fn is_reachable(&self) -> bool {
        matches!(self, Verdict::Reachable(_))
    }
}

/// Breadth-first search from `start`. `is_target` is checked on every
/// discovered configuration; `expand` decides whether a configuration's
/// successors are explored at all.
pub fn bfs<T, E>(
    aut: &StorageAutomaton,
    start: (StateId, StorageConfig),
    caps: &Caps,
    is_target: T,
    expand: E,
) -> OracleResult
where
    T: Fn(StateId, &StorageConfig) -> bool,
    E: Fn(StateId, &StorageConfig) -> bool,
{
    if is_target(start.0, &start.1) {
        return OracleResult::Reachable(Trace {
            start,
            steps: Vec::new(),
        });
    }
    let mut seen: IndexSet<(StateId, StorageConfig)> = IndexSet::new();
    let mut parent: Vec<(usize, usize)> = vec![(usize::MAX, usize::MAX)];
    let mut depth: Vec<usize> = vec![0];
    seen.insert(start);
    let mut pruned = false;
    let mut i = 0;
    while i < seen.len() {
        let d = depth[i];
        let (q, c) = seen.get_index(i).expect("index in range").clone();
        i += 1;
        if !expand(q, &c) {
            continue;
        }
        for (t, p, next) in aut.successors(q, &c) {
            if d + 1 > caps.max_steps || !caps.admits(&next) {
                pruned = true;
                continue;
            }
            let key = (p, next);
            if seen.contains(&key) {
                continue;
            }
            if seen.len() >= caps.max_configs {
                pruned = true;
                continue;
            }
            let hit = is_target(key.0, &key.1);
            let (idx, _) = seen.insert_full(key);
            parent.push((i - 1, t));
            depth.push(d + 1);
            if hit {
                return OracleResult::Reachable(rebuild(&seen, &parent, idx));
            }
        }
    }
    debug!("bfs explored {} configurations, pruned={pruned}", seen.len());
    OracleResult::NotFoundWithinCaps { exhausted: !pruned }
}

fn rebuild(
    seen: &IndexSet<(StateId, StorageConfig)>,
    parent: &[(usize, usize)],
    mut idx: usize,
) -> Trace {
    let mut steps = Vec::new();
    while idx != 0 {
        let (p, t) = parent[idx];
        let (q, c) = seen.get_index(idx).expect("index in range").clone();
        steps.push((t, q, c));
        idx = p;
    }
    steps.reverse();
    Trace {
        start: seen.get_index(0).expect("start").clone(),
        steps,
    }
}

/// Searches for a run from the initial configuration to control state `target`.
pub fn reach_oracle(aut: &StorageAutomaton, target: StateId, caps: &Caps) -> OracleResult {
    let start = (aut.initial(), StorageConfig::initial(aut.storage()));
    bfs(aut, start, caps, |q, _| q == target, |_, _| true)
}

/// Searches for a run from the initial configuration to exactly `(q, c)`.
pub fn reach_config_oracle(
    aut: &StorageAutomaton,
    q: StateId,
    c: &StorageConfig,
    caps: &Caps,
) -> OracleResult {
    let start = (aut.initial(), StorageConfig::initial(aut.storage()));
    bfs(aut, start, caps, |p, d| p == q && d == c, |_, _| true)
}

/// Runs `search` under `base`, then twice and four times the caps. A found
/// run is definitive; "unreachable" is accepted once all three runs agree,
/// or as soon as one run reports an exhausted search.
pub fn stabilize<F>(base: &Caps, mut search: F) -> Verdict
where
    F: FnMut(&Caps) -> OracleResult,
{
    for factor in [1, 2, 4] {
        match search(&base.scaled(factor)) {
            OracleResult::Reachable(t) => return Verdict::Reachable(t),
            OracleResult::NotFoundWithinCaps { exhausted: true } => return Verdict::Unreachable,
            OracleResult::NotFoundWithinCaps { exhausted: false } => {}
        }
    }
    Verdict::Unreachable
}

/// [`reach_oracle`] under the stabilization protocol.
pub fn stabilized_reach(aut: &StorageAutomaton, target: StateId, base: &Caps) -> Verdict {
    stabilize(base, |caps| reach_oracle(aut, target, caps))
}

/// Control states visited by the cap-bounded search from the initial
/// configuration, and whether the search was exhaustive.
pub fn reachable_states(aut: &StorageAutomaton, caps: &Caps) -> (BTreeSet<StateId>, bool) {
    let start = (aut.initial(), StorageConfig::initial(aut.storage()));
    let mut seen: IndexSet<(StateId, StorageConfig)> = IndexSet::new();
    let mut depth = vec![0usize];
    seen.insert(start);
    let mut pruned = false;
    let mut i = 0;
    while i < seen.len() {
        let d = depth[i];
        let (q, c) = seen.get_index(i).expect("index in range").clone();
        i += 1;
        for (_, p, next) in aut.successors(q, &c) {
            if d + 1 > caps.max_steps || !caps.admits(&next) {
                pruned = true;
                continue;
            }
            let key = (p, next);
            if seen.contains(&key) {
                continue;
            }
            if seen.len() >= caps.max_configs {
                pruned = true;
                continue;
            }
            seen.insert(key);
            depth.push(d + 1);
        }
    }
    (seen.iter().map(|(q, _)| *q).collect(), !pruned)
}

/// Reachable control states under the stabilization protocol: a state
/// found under any of the three cap levels is reachable, every other state
/// is reported unreachable.
pub fn stabilized_reachable_states(aut: &StorageAutomaton, base: &Caps) -> BTreeSet<StateId> {
    let mut all = BTreeSet::new();
    for factor in [1, 2, 4] {
        let (set, exhausted) = reachable_states(aut, &base.scaled(factor));
        all.extend(set);
        if exhausted {
            break;
        }
    }
    all
}

/// Alternating reachability of `target` on the cap-bounded graph.
///
/// A configuration wins if its state is `target`; otherwise an existential
/// one wins if some successor wins, a universal one if it has at least one
/// successor, none was pruned by a cap, and all of them win.
pub fn alt_reach_oracle(aut: &StorageAutomaton, target: StateId, caps: &Caps) -> OracleResult {
    let start = (aut.initial(), StorageConfig::initial(aut.storage()));
    let mut seen: IndexSet<(StateId, StorageConfig)> = IndexSet::new();
    let mut depth = vec![0usize];
    let mut succs: Vec<Vec<usize>> = Vec::new();
    let mut lossy: Vec<bool> = Vec::new();
    seen.insert(start);
    let mut pruned_any = false;
    let mut i = 0;
    while i < seen.len() {
        let (q, c) = seen.get_index(i).expect("index in range").clone();
        let d = depth[i];
        let mut out = Vec::new();
        let mut lost = false;
        if q != target {
            for (_, p, next) in aut.successors(q, &c) {
                if d + 1 > caps.max_steps || !caps.admits(&next) {
                    lost = true;
                    continue;
                }
                let key = (p, next);
                if let Some(j) = seen.get_index_of(&key) {
                    out.push(j);
                    continue;
                }
                if seen.len() >= caps.max_configs {
                    lost = true;
                    continue;
                }
                let (j, _) = seen.insert_full(key);
                depth.push(d + 1);
                out.push(j);
            }
        }
        pruned_any |= lost;
        succs.push(out);
        lossy.push(lost);
        i += 1;
    }
    let n = seen.len();
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (u, out) in succs.iter().enumerate() {
        for &v in out {
            preds[v].push(u);
        }
    }
    // Universal nodes count winning successors; duplicates in `out` are
    // counted per edge on both sides, so the comparison stays consistent.
    let mut remaining: Vec<usize> = succs.iter().map(Vec::len).collect();
    let mut win = vec![false; n];
    let mut queue = Vec::new();
    for (u, (q, _)) in seen.iter().enumerate() {
        if *q == target {
            win[u] = true;
            queue.push(u);
        }
    }
    while let Some(v) = queue.pop() {
        for &u in &preds[v] {
            if win[u] {
                continue;
            }
            let q = seen.get_index(u).expect("index in range").0;
            let wins = match aut.mode(q) {
                Mode::Existential => true,
                Mode::Universal => {
                    remaining[u] -= 1;
                    remaining[u] == 0 && !lossy[u]
                }
            };
            if wins {
                win[u] = true;
                queue.push(u);
            }
        }
    }
    if win[0] {
        // Alternating wins carry no linear witness; the start configuration
        // alone stands in for it.
        OracleResult::Reachable(Trace {
            start: seen.get_index(0).expect("start").clone(),
            steps: Vec::new(),
        })
    } else {
        OracleResult::NotFoundWithinCaps {
            exhausted: !pruned_any,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::storage::expr::{OpId, StorageExpr, Sym, TestId};

    fn counter_aut() -> StorageAutomaton {
        let mut a = StorageAutomaton::new(StorageExpr::Counter, "q0").unwrap();
        let q1 = a.add_state("q1").unwrap();
        a.add_transition(0, 1, q1, OpId::PushSym(Sym::BOTTOM)).unwrap();
        a
    }

    #[test]
    fn one_step_and_zero_step() {
        let a = counter_aut();
        let caps = Caps::new(vec![4], 4, 10);
        let r = reach_oracle(&a, 1, &caps);
        assert_eq!(r.trace().unwrap().len(), 1);
        assert!(r.trace().unwrap().replays(&a));
        let r0 = reach_oracle(&a, 0, &caps);
        assert_eq!(r0.trace().unwrap().len(), 0);
    }

    #[test]
    fn exhausted_search_is_reported() {
        let mut a = counter_aut();
        let q2 = a.add_state("q2").unwrap();
        let _ = q2;
        let r = reach_oracle(&a, 2, &Caps::new(vec![4], 4, 10));
        assert_eq!(r, OracleResult::NotFoundWithinCaps { exhausted: true });
    }

    #[test]
    fn universal_with_inapplicable_branch() {
        let mut a = StorageAutomaton::new(StorageExpr::ZCounter, "q0").unwrap();
        let q1 = a.add_state("q1").unwrap();
        a.set_mode(0, Mode::Universal);
        a.add_transition_partial(0, &[], q1, OpId::PushSym(Sym::BOTTOM)).unwrap();
        a.add_transition_partial(0, &[], q1, OpId::Pop).unwrap();
        let r = alt_reach_oracle(&a, q1, &Caps::new(vec![4], 4, 10));
        assert!(r.is_reachable());
    }

    #[test]
    fn universal_with_dead_branch() {
        let mut a = StorageAutomaton::new(StorageExpr::ZCounter, "q0").unwrap();
        let live = a.add_state("live").unwrap();
        let dead = a.add_state("dead").unwrap();
        let goal = a.add_state("goal").unwrap();
        a.set_mode(0, Mode::Universal);
        a.add_transition_partial(0, &[], live, OpId::Id).unwrap();
        a.add_transition_partial(0, &[], dead, OpId::PushSym(Sym::BOTTOM)).unwrap();
        a.add_transition_partial(live, &[(TestId::Empty, true)], goal, OpId::Id)
            .unwrap();
        let caps = Caps::new(vec![4], 4, 10);
        assert!(!alt_reach_oracle(&a, goal, &caps).is_reachable());
        assert!(reach_oracle(&a, goal, &caps).is_reachable());
    }

    #[test]
    fn caps_scale() {
        let c = Caps::new(vec![2, 3], 4, 5).with_max_configs(10);
        let d = c.scaled(2);
        assert_eq!(d.max_pd_height, vec![4, 6]);
        assert_eq!(d.max_counter, 8);
        assert_eq!(d.max_steps, 10);
        assert_eq!(d.max_configs, 20);
    }
}

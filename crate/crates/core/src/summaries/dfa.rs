//! Loop queries and the deterministic word automaton that tracks return
//! and loop sets along the counter value.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::hoca2::Hocs2;
use crate::pds::{pre_star, PAutomaton, Pds};
use crate::storage::{StateId, Sym};

use super::algo::compute_return_table;
use super::generate::{generate_pda, Layout};
use super::table::{bounds, ret_query, ReturnTable};

pub type PairSet = BTreeSet<(StateId, StateId)>;

/// `A_∞` together with its layout, reused across loop queries.
pub struct LoopSolver<'a> {
    a: &'a Hocs2,
    ainf: Pds,
    lay: Layout,
    n0: usize,
}

impl<'a> LoopSolver<'a> {
    pub fn new(a: &'a Hocs2, table: &ReturnTable) -> Self {
        LoopSolver {
            a,
            ainf: generate_pda(a, table).expect("entries never exceed h0"),
            lay: Layout::of(a, table.h0()),
            n0: bounds(a).n0,
        }
    }

    /// Pairs `(q, q')` with a loop from `(q, (σ,i))` to `(q', (σ,i))`.
    /// Counters above `n0` are answered at `n0`.
    pub fn loops(&self, s: Sym, i: usize) -> PairSet {
        let i = i.min(self.n0);
        let w = self.lay.counter_word(i);
        let n = self.a.num_states();
        let mut out = PairSet::new();
        for q2 in 0..n {
            let b = PAutomaton::singleton(self.ainf.num_states(), self.lay.control(q2, s), &w);
            let pre = pre_star(&self.ainf, &b);
            for q in 0..n {
                if pre.accepts(self.lay.control(q, s), &w) {
                    out.insert((q, q2));
                }
            }
        }
        out
    }
}

/// The loop set at `(σ, i)` computed on `A_∞` for the given table.
pub fn loops_query(a: &Hocs2, table: &ReturnTable, s: Sym, i: usize) -> PairSet {
    LoopSolver::new(a, table).loops(s, i)
}

/// The return set at `(σ, i)` read off the table.
pub fn ret_set(table: &ReturnTable, s: Sym, i: usize) -> PairSet {
    let n = table.num_states();
    let mut out = PairSet::new();
    for p in 0..n {
        for q in 0..n {
            if ret_query(table, s, p, q, i) {
                out.insert((p, q));
            }
        }
    }
    out
}

/// One DFA state: per symbol σ, the return and loop sets at `(σ, i)`.
pub type SummaryState = Vec<(PairSet, PairSet)>;

/// The chain `M_0 → M_1 → … → M_{n0} ↺` over the one-letter alphabet {⊥}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SummaryDfa {
    pub states: Vec<SummaryState>,
}

impl SummaryDfa {
    /// State reached after reading `⊥^n`.
    pub fn state_after(&self, n: usize) -> &SummaryState {
        &self.states[n.min(self.states.len() - 1)]
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Merges the constant tail: the result keeps `M_0..M_j` where `j` is
    /// the first index after which all states are equal.
    pub fn collapsed(&self) -> SummaryDfa {
        let last = self.states.last().expect("nonempty");
        let mut j = self.states.len() - 1;
        while j > 0 && self.states[j - 1] == *last {
            j -= 1;
        }
        SummaryDfa {
            states: self.states[..=j].to_vec(),
        }
    }

    /// Number of distinct state values.
    pub fn distinct(&self) -> usize {
        let set: BTreeSet<&SummaryState> = self.states.iter().collect();
        set.len()
    }

    pub fn render(&self, a: &Hocs2) -> String {
        let pairs = |set: &PairSet| -> String {
            let v: Vec<String> = set
                .iter()
                .map(|(p, q)| format!("({},{})", a.state_name(*p), a.state_name(*q)))
                .collect();
            format!("{{{}}}", v.join(","))
        };
        let mut out = String::new();
        for (i, m) in self.states.iter().enumerate() {
            let next = (i + 1).min(self.states.len() - 1);
            let _ = write!(out, "M{i} -> M{next}:");
            for (s, (ret, lp)) in m.iter().enumerate() {
                let _ = write!(
                    out,
                    " {} ret={} loops={}",
                    a.alphabet().name(Sym(s as u16)),
                    pairs(ret),
                    pairs(lp)
                );
            }
            out.push('\n');
        }
        out
    }
}

pub fn build_summary_dfa(a: &Hocs2) -> SummaryDfa {
    let table = compute_return_table(a);
    build_summary_dfa_with(a, &table)
}

pub fn build_summary_dfa_with(a: &Hocs2, table: &ReturnTable) -> SummaryDfa {
    let n0 = bounds(a).n0;
    let solver = LoopSolver::new(a, table);
    let mut states = Vec::with_capacity(n0 + 1);
    for i in 0..=n0 {
        let m: SummaryState = a
            .alphabet()
            .symbols()
            .map(|s| (ret_set(table, s, i), solver.loops(s, i)))
            .collect();
        states.push(m);
    }
    SummaryDfa { states }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hoca2::L2Op;
    use crate::storage::Alphabet;

    #[test]
    fn transition_free_collapses() {
        let a = Hocs2::new(Alphabet::binary(), "q");
        let d = build_summary_dfa(&a);
        assert_eq!(d.len(), bounds(&a).n0 + 1);
        assert_eq!(d.collapsed().len(), 1);
        for (ret, lp) in d.state_after(5) {
            assert!(ret.is_empty());
            assert_eq!(lp, &[(0, 0)].into_iter().collect::<PairSet>());
        }
    }

    #[test]
    fn inc_then_dec_is_loop() {
        let mut a = Hocs2::with_states(Alphabet::bottom_only(), 2);
        a.add_transition(0, Sym(0), L2Op::Inc, 0);
        a.add_transition(0, Sym(0), L2Op::Dec, 1);
        let t = compute_return_table(&a);
        for i in 0..4 {
            assert!(loops_query(&a, &t, Sym(0), i).contains(&(0, 1)));
        }
    }
}

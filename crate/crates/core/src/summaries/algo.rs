//! Return-table iteration and control-state reachability.

use std::collections::{BTreeSet, HashMap};

use log::debug;

use crate::hoca2::{normalize, Hocs2, Hocs2Error, L2Op};
use crate::pds::{pre_star, reach_pda, PAutomaton, Pds};
use crate::storage::{StateId, StorageAutomaton, Sym};

use super::generate::{generate_pda, Layout};
use super::table::{bounds, ReturnTable};

/// Options for [`compute_return_table_with`].
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct TableOptions {
    /// Upper bound on the number of sweeps; `None` means `k0`.
    pub max_sweeps: Option<usize>,
    /// Stop at the first sweep that changes nothing.
    pub early_stop: bool,
}

impl Default for TableOptions {
    fn default() -> Self {
        TableOptions {
            max_sweeps: None,
            early_stop: true,
        }
    }
}

/// The tables after each sweep, the last one being the result.
#[derive(Clone, Debug)]
pub struct TableRun {
    pub history: Vec<ReturnTable>,
}

impl TableRun {
    pub fn table(&self) -> &ReturnTable {
        self.history.last().expect("at least the initial table")
    }

    pub fn sweeps(&self) -> usize {
        self.history.len() - 1
    }
}

pub fn compute_return_table(a: &Hocs2) -> ReturnTable {
    compute_return_table_with(a, TableOptions::default())
        .table()
        .clone()
}

/// Runs the sweep loop. Each sweep builds `A_k` from the current table and,
/// for every level-2 pop `(r, τ, pop, q)` and every `(σ, p)`, finds the
/// least `i ≤ h0` such that `(r, τ)` is reachable in `A_k` from `(p, σ)`
/// with the stack encoding counter `i`. New entries are committed after
/// the sweep as the minimum with the old value.
pub fn compute_return_table_with(a: &Hocs2, opts: TableOptions) -> TableRun {
    let b = bounds(a);
    let lay = Layout::of(a, b.h0);
    let mut table = ReturnTable::infinite(a.alphabet().len(), a.num_states(), b.h0);
    let mut history = vec![table.clone()];
    let pops: Vec<(StateId, Sym, StateId)> = a
        .transitions()
        .iter()
        .filter(|t| t.op == L2Op::Pop)
        .map(|t| (t.from, t.top, t.to))
        .collect();
    if pops.is_empty() {
        return TableRun { history };
    }
    let limit = opts.max_sweeps.unwrap_or(b.k0).min(b.k0);
    for k in 1..=limit {
        let ak = generate_pda(a, &table).expect("entries never exceed h0");
        let targets: Vec<usize> = {
            let set: BTreeSet<usize> = pops.iter().map(|&(r, tau, _)| lay.control(r, tau)).collect();
            set.into_iter().collect()
        };
        let probe = TargetProbe::new(&ak, &targets, lay);
        let mut next = table.clone();
        for &(r, tau, q) in &pops {
            let target = lay.control(r, tau);
            for s in a.alphabet().symbols() {
                for p in 0..a.num_states() {
                    if let Some(i) = probe.least_counter(lay.control(p, s), target) {
                        next.lower(s, p, q, i);
                    }
                }
            }
        }
        let changed = next != table;
        table = next;
        history.push(table.clone());
        debug!("sweep {k}: changed={changed}");
        if !changed && opts.early_stop {
            break;
        }
    }
    TableRun { history }
}

/// Answers "least counter `i ≤ h0` from which a target control is reachable"
/// with one saturation for all targets.
struct TargetProbe {
    /// For each target, the set of automaton states accepting `⊥_j..⊥_0`,
    /// indexed by `j`.
    acc: HashMap<usize, Vec<Vec<bool>>>,
}

impl TargetProbe {
    fn new(pds: &Pds, targets: &[usize], lay: Layout) -> Self {
        let n = pds.num_states();
        let mut b = PAutomaton::new(n);
        let mut gadget = HashMap::new();
        for &t in targets {
            let f = b.add_state();
            for g in 0..pds.num_symbols() {
                b.add_transition(t, g, f);
                b.add_transition(f, g, f);
            }
            gadget.insert(t, f);
        }
        // Saturation does not look at accepting states, so one result
        // serves every target with its own accepting pair {t, f_t}.
        let sat = pre_star(pds, &b);
        let mut acc = HashMap::new();
        let mut by_sym: Vec<Vec<(usize, usize)>> = vec![Vec::new(); pds.num_symbols()];
        for (s, g, t) in sat.transitions() {
            by_sym[g].push((s, t));
        }
        for &t in targets {
            let mut cur = vec![false; sat.num_states()];
            cur[t] = true;
            cur[gadget[&t]] = true;
            let mut levels = Vec::with_capacity(lay.h0 + 1);
            for j in 0..=lay.h0 {
                let mut next = vec![false; sat.num_states()];
                for &(s, d) in &by_sym[j] {
                    if cur[d] {
                        next[s] = true;
                    }
                }
                levels.push(next.clone());
                cur = next;
            }
            acc.insert(t, levels);
        }
        TargetProbe { acc }
    }

    fn least_counter(&self, start: usize, target: usize) -> Option<usize> {
        if start == target {
            return Some(0);
        }
        self.acc[&target].iter().position(|level| level[start])
    }
}

/// Whether `q_f` is reachable in a normalized automaton, decided on the
/// pushdown system built from the converged return table.
pub fn reach_hoca(a: &Hocs2, q_f: StateId) -> bool {
    if q_f == a.initial() {
        return true;
    }
    let table = compute_return_table(a);
    let lay = Layout::of(a, table.h0());
    let ainf = generate_pda(a, &table).expect("entries never exceed h0");
    reach_pda(
        &ainf,
        lay.control(a.initial(), Sym::BOTTOM),
        &lay.counter_word(0),
        lay.control(q_f, Sym::BOTTOM),
    )
}

/// Normalizes a generic `P_Σ(C)` automaton for target `q` and decides
/// reachability of `q`.
pub fn reach_state(a: &StorageAutomaton, q: StateId) -> Result<bool, Hocs2Error> {
    if q == a.initial() {
        return Ok(true);
    }
    let (n, drain) = normalize(a, q)?;
    Ok(reach_hoca(&n, drain))
}

/// [`reach_state`] for an automaton that is already restricted.
pub fn reach_state_hocs2(a: &Hocs2, q: StateId) -> bool {
    let s = a.to_storage_automaton();
    reach_state(&s, q).expect("restricted automata normalize")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::storage::Alphabet;

    fn push_dec_pop() -> Hocs2 {
        let mut a = Hocs2::with_states(Alphabet::binary(), 3);
        a.add_transition(0, Sym(0), L2Op::Push(Sym(2)), 1);
        a.add_transition(1, Sym(2), L2Op::Dec, 1);
        a.add_transition(1, Sym(2), L2Op::Pop, 2);
        a
    }

    #[test]
    fn no_pops_means_infinite_table() {
        let mut a = Hocs2::with_states(Alphabet::binary(), 2);
        a.add_transition(0, Sym(0), L2Op::Push(Sym(1)), 1);
        let t = compute_return_table(&a);
        assert_eq!(t, ReturnTable::for_automaton(&a));
    }

    #[test]
    fn push_dec_pop_table() {
        let a = push_dec_pop();
        let t = compute_return_table(&a);
        assert_eq!(t.get(Sym(2), 1, 2), Some(0));
        assert_eq!(t.get(Sym(2), 0, 2), None);
        assert!(reach_hoca(&a, 2));
        assert!(reach_state_hocs2(&a, 2));
    }

    #[test]
    fn forced_decrements_need_counter_two() {
        // Return from q1 needs two decrements through distinct states.
        let mut a = Hocs2::with_states(Alphabet::binary(), 4);
        a.add_transition(1, Sym(1), L2Op::Dec, 2);
        a.add_transition(2, Sym(1), L2Op::Dec, 3);
        a.add_transition(3, Sym(1), L2Op::Pop, 0);
        let t = compute_return_table(&a);
        assert_eq!(t.get(Sym(1), 1, 0), Some(2));
        assert_eq!(t.get(Sym(1), 2, 0), Some(1));
        assert_eq!(t.get(Sym(1), 3, 0), Some(0));
    }

    #[test]
    fn trivial_targets() {
        let a = Hocs2::with_states(Alphabet::binary(), 2);
        assert!(reach_hoca(&a, 0));
        assert!(!reach_hoca(&a, 1));
    }
}

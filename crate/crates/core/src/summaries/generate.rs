//! Reduction of a level-2 automaton to a pushdown system that simulates it
//! within one level-2 entry, given a return table.

use crate::hoca2::{Hocs2, L2Op};
use crate::pds::Pds;
use crate::storage::{StateId, Sym};

use super::table::{IllFormedTable, ReturnTable};

/// Index layout of the generated system: control `(q, σ)` and stack symbols
/// `⊥_0..⊥_{h0}` followed by `⊥_∞`.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct Layout {
    pub sigma: usize,
    pub h0: usize,
}

impl Layout {
    pub fn of(a: &Hocs2, h0: usize) -> Self {
        Layout {
            sigma: a.alphabet().len(),
            h0,
        }
    }

    pub fn control(&self, q: StateId, s: Sym) -> usize {
        q * self.sigma + s.index()
    }

    pub fn split(&self, c: usize) -> (StateId, Sym) {
        (c / self.sigma, Sym((c % self.sigma) as u16))
    }

    pub fn level(&self, i: usize) -> usize {
        i.min(self.h0 + 1)
    }

    pub fn infinity(&self) -> usize {
        self.h0 + 1
    }

    pub fn num_symbols(&self) -> usize {
        self.h0 + 2
    }

    /// Stack word (top first) encoding counter `n`:
    /// `⊥_0 ⊥_1 … ⊥_{min(n,h0)} ⊥_∞^{n-h0}` read from the bottom.
    pub fn counter_word(&self, n: usize) -> Vec<usize> {
        let mut w: Vec<usize> = (0..=n).map(|j| self.level(j)).collect();
        w.reverse();
        w
    }

    /// Counter encoded by a well-formed stack word.
    pub fn decode_counter(&self, w: &[usize]) -> usize {
        w.len() - 1
    }
}

/// Builds the pushdown system `A_k` for the current table.
///
/// Decrements pop `⊥_i` for `i ≥ 1` and `⊥_∞`; increments push the next
/// level; a push of `τ` followed by a return to `r` becomes an internal
/// step on every top `⊥_i` with `i ≥ a_{τ,p,r}`; no-ops are internal steps
/// on every symbol; level-2 pops produce nothing.
pub fn generate_pda(a: &Hocs2, table: &ReturnTable) -> Result<Pds, IllFormedTable> {
    table.check()?;
    let lay = Layout::of(a, table.h0());
    let h0 = lay.h0;
    let inf = lay.infinity();
    let mut states = Vec::new();
    for q in 0..a.num_states() {
        for s in a.alphabet().symbols() {
            states.push(format!("{}.{}", a.state_name(q), a.alphabet().name(s)));
        }
    }
    let mut symbols: Vec<String> = (0..=h0).map(|i| format!("b{i}")).collect();
    symbols.push("binf".into());
    let mut pds = Pds::with_names(states, symbols);
    for t in a.transitions() {
        let from = lay.control(t.from, t.top);
        let to = lay.control(t.to, t.top);
        match t.op {
            L2Op::Dec => {
                for i in 1..=inf {
                    pds.add_rule(from, i, to, &[]);
                }
            }
            L2Op::Inc => {
                for i in 0..h0 {
                    pds.add_rule(from, i, to, &[i + 1, i]);
                }
                pds.add_rule(from, h0, to, &[inf, h0]);
                pds.add_rule(from, inf, to, &[inf, inf]);
            }
            L2Op::Push(tau) => {
                for r in 0..a.num_states() {
                    if let Some(min) = table.get(tau, t.to, r) {
                        let target = lay.control(r, t.top);
                        for i in (min..=h0).chain([inf]) {
                            pds.add_rule(from, i, target, &[i]);
                        }
                    }
                }
            }
            L2Op::Nop => {
                for i in 0..=inf {
                    pds.add_rule(from, i, to, &[i]);
                }
            }
            L2Op::Pop => {}
        }
    }
    Ok(pds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::storage::Alphabet;

    #[test]
    fn counter_words() {
        let lay = Layout { sigma: 1, h0: 2 };
        assert_eq!(lay.counter_word(0), vec![0]);
        assert_eq!(lay.counter_word(2), vec![2, 1, 0]);
        assert_eq!(lay.counter_word(4), vec![3, 3, 2, 1, 0]);
    }

    #[test]
    fn inc_loop_counts_up() {
        let mut a = Hocs2::new(Alphabet::bottom_only(), "q");
        a.add_transition(0, Sym(0), L2Op::Inc, 0);
        let t = ReturnTable::for_automaton(&a);
        let pds = generate_pda(&a, &t).unwrap();
        assert_eq!(t.h0(), 1);
        assert_eq!(pds.step(0, &[0]), vec![(0, vec![1, 0])]);
        assert_eq!(pds.step(0, &[1, 0]), vec![(0, vec![2, 1, 0])]);
        assert_eq!(pds.step(0, &[2, 1, 0]), vec![(0, vec![2, 2, 1, 0])]);
    }

    #[test]
    fn dec_skips_bottom_level() {
        let mut a = Hocs2::new(Alphabet::bottom_only(), "q");
        a.add_transition(0, Sym(0), L2Op::Dec, 0);
        let t = ReturnTable::for_automaton(&a);
        let pds = generate_pda(&a, &t).unwrap();
        let tops: Vec<usize> = pds.rules().iter().map(|r| r.sym).collect();
        assert_eq!(tops, vec![1, 2]);
    }

    #[test]
    fn infinite_table_gives_no_push_rules() {
        let mut a = Hocs2::with_states(Alphabet::binary(), 2);
        a.add_transition(0, Sym(0), L2Op::Push(Sym(1)), 1);
        let t = ReturnTable::for_automaton(&a);
        assert!(generate_pda(&a, &t).unwrap().rules().is_empty());
    }
}

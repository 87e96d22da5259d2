//! Finite automata denoting regular sets of pushdown configurations.

use std::collections::{BTreeSet, HashMap};

/// A P-automaton. States `0..num_control` stand for the control states of
/// the pushdown system; a configuration `(p, w)` is accepted when `w`, read
/// top symbol first, leads from state `p` to an accepting state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PAutomaton {
    num_control: usize,
    num_states: usize,
    transitions: BTreeSet<(usize, usize, usize)>,
    succ: HashMap<(usize, usize), Vec<usize>>,
    accepting: Vec<bool>,
}

impl PAutomaton {
    /// An automaton with only the control states and no transitions.
    pub fn new(num_control: usize) -> Self {
        PAutomaton {
            num_control,
            num_states: num_control,
            transitions: BTreeSet::new(),
            succ: HashMap::new(),
            accepting: vec![false; num_control],
        }
    }

    /// Accepts exactly `(p, w)`.
    pub fn singleton(num_control: usize, p: usize, w: &[usize]) -> Self {
        let mut a = PAutomaton::new(num_control);
        let mut s = p;
        for &g in w {
            let t = a.add_state();
            a.add_transition(s, g, t);
            s = t;
        }
        a.set_accepting(s, true);
        a
    }

    /// Accepts every `(p, w)` for the given control state.
    pub fn all_of_control(num_control: usize, num_symbols: usize, p: usize) -> Self {
        let mut a = PAutomaton::new(num_control);
        let f = a.add_state();
        for g in 0..num_symbols {
            a.add_transition(p, g, f);
            a.add_transition(f, g, f);
        }
        a.set_accepting(p, true);
        a.set_accepting(f, true);
        a
    }

    pub fn num_control(&self) -> usize {
        self.num_control
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn add_state(&mut self) -> usize {
        self.num_states += 1;
        self.accepting.push(false);
        self.num_states - 1
    }

    /// Adds a transition; returns false if it was already present.
    pub fn add_transition(&mut self, from: usize, sym: usize, to: usize) -> bool {
        assert!(from < self.num_states && to < self.num_states, "state out of range");
        if self.transitions.insert((from, sym, to)) {
            self.succ.entry((from, sym)).or_default().push(to);
            true
        } else {
            false
        }
    }

    pub fn has_transition(&self, from: usize, sym: usize, to: usize) -> bool {
        self.transitions.contains(&(from, sym, to))
    }

    pub fn set_accepting(&mut self, s: usize, yes: bool) {
        self.accepting[s] = yes;
    }

    pub fn is_accepting(&self, s: usize) -> bool {
        self.accepting[s]
    }

    pub fn transitions(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.transitions.iter().copied()
    }

    pub fn num_transitions(&self) -> usize {
        self.transitions.len()
    }

    pub fn targets(&self, from: usize, sym: usize) -> &[usize] {
        self.succ.get(&(from, sym)).map(Vec::as_slice).unwrap_or(&[])
    }

    /// States reachable from `from` by reading `w`.
    pub fn run(&self, from: usize, w: &[usize]) -> BTreeSet<usize> {
        let mut cur: BTreeSet<usize> = [from].into_iter().collect();
        for &g in w {
            let mut next = BTreeSet::new();
            for &s in &cur {
                next.extend(self.targets(s, g).iter().copied());
            }
            if next.is_empty() {
                return next;
            }
            cur = next;
        }
        cur
    }

    pub fn accepts(&self, p: usize, w: &[usize]) -> bool {
        self.run(p, w).into_iter().any(|s| self.accepting[s])
    }

    /// Whether some transition enters a control state.
    pub fn enters_control(&self) -> bool {
        self.transitions.iter().any(|&(_, _, t)| t < self.num_control)
    }

    /// An equivalent automaton without transitions into control states.
    /// Each control state with incoming transitions gets a copy that takes
    /// over those transitions.
    pub fn without_control_targets(&self) -> PAutomaton {
        if !self.enters_control() {
            return self.clone();
        }
        let mut copy_of = vec![usize::MAX; self.num_control];
        let mut out = PAutomaton {
            num_control: self.num_control,
            num_states: self.num_states,
            transitions: BTreeSet::new(),
            succ: HashMap::new(),
            accepting: self.accepting.clone(),
        };
        for &(_, _, t) in &self.transitions {
            if t < self.num_control && copy_of[t] == usize::MAX {
                copy_of[t] = out.add_state();
                out.accepting[copy_of[t]] = self.accepting[t];
            }
        }
        let redirect = |t: usize| if t < self.num_control { copy_of[t] } else { t };
        for &(s, g, t) in &self.transitions {
            out.add_transition(s, g, redirect(t));
            if s < self.num_control && copy_of[s] != usize::MAX {
                out.add_transition(copy_of[s], g, redirect(t));
            }
        }
        out
    }

    /// All accepted configurations with stack length at most `max_len`.
    pub fn enumerate(&self, num_symbols: usize, max_len: usize) -> Vec<(usize, Vec<usize>)> {
        let mut out = Vec::new();
        for p in 0..self.num_control {
            let mut stack: Vec<(Vec<usize>, BTreeSet<usize>)> = vec![(Vec::new(), [p].into_iter().collect())];
            while let Some((w, states)) = stack.pop() {
                if states.iter().any(|&s| self.accepting[s]) {
                    out.push((p, w.clone()));
                }
                if w.len() == max_len {
                    continue;
                }
                for g in 0..num_symbols {
                    let next: BTreeSet<usize> = states
                        .iter()
                        .flat_map(|&s| self.targets(s, g).iter().copied())
                        .collect();
                    if !next.is_empty() {
                        let mut w2 = w.clone();
                        w2.push(g);
                        stack.push((w2, next));
                    }
                }
            }
        }
        out.sort();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn singleton_language() {
        let a = PAutomaton::singleton(2, 1, &[0, 1]);
        assert!(a.accepts(1, &[0, 1]));
        assert!(!a.accepts(1, &[0]));
        assert!(!a.accepts(0, &[0, 1]));
        assert_eq!(a.enumerate(2, 4), vec![(1, vec![0, 1])]);
    }

    #[test]
    fn copy_preserves_language() {
        let mut a = PAutomaton::new(2);
        a.add_transition(0, 0, 1);
        a.add_transition(1, 1, 1);
        a.set_accepting(1, true);
        let b = a.without_control_targets();
        assert!(!b.enters_control());
        assert_eq!(a.enumerate(2, 4), b.enumerate(2, 4));
    }
}

use std::fmt;

use crate::hoca2::Hocs2;
use crate::storage::{StateId, Sym};

/// Stabilization bounds of an automaton.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct Bounds {
    /// Counter value from which return sets are constant: `|Σ|·|Q|²`.
    pub h0: usize,
    /// Height increase sufficient for every return: `|Σ|²·|Q|⁴`.
    pub k0: usize,
    /// Counter value from which loop sets are constant: `2·|Σ|·|Q|²`.
    pub n0: usize,
}

impl Bounds {
    pub fn from_sizes(sigma: usize, q: usize) -> Self {
        let h0 = sigma * q * q;
        Bounds {
            h0,
            k0: h0 * h0,
            n0: 2 * h0,
        }
    }
}

pub fn bounds(a: &Hocs2) -> Bounds {
    Bounds::from_sizes(a.alphabet().len(), a.num_states())
}

/// The matrix `a_{σ,p,q}`: least top counter from which a return from `p`
/// to `q` on symbol `σ` exists, `None` for ∞.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ReturnTable {
    sigma: usize,
    states: usize,
    h0: usize,
    entries: Vec<Option<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("table entry {value} exceeds h0 = {h0}")]
pub struct IllFormedTable {
    pub value: usize,
    pub h0: usize,
}

impl ReturnTable {
    pub fn infinite(sigma: usize, states: usize, h0: usize) -> Self {
        ReturnTable {
            sigma,
            states,
            h0,
            entries: vec![None; sigma * states * states],
        }
    }

    pub fn for_automaton(a: &Hocs2) -> Self {
        let b = bounds(a);
        ReturnTable::infinite(a.alphabet().len(), a.num_states(), b.h0)
    }

    fn idx(&self, s: Sym, p: StateId, q: StateId) -> usize {
        (s.index() * self.states + p) * self.states + q
    }

    pub fn get(&self, s: Sym, p: StateId, q: StateId) -> Option<usize> {
        self.entries[self.idx(s, p, q)]
    }

    pub fn set(&mut self, s: Sym, p: StateId, q: StateId, v: Option<usize>) {
        let i = self.idx(s, p, q);
        self.entries[i] = v;
    }

    /// Lowers an entry to `v` if that is smaller.
    pub fn lower(&mut self, s: Sym, p: StateId, q: StateId, v: usize) {
        let i = self.idx(s, p, q);
        self.entries[i] = Some(self.entries[i].map_or(v, |old| old.min(v)));
    }

    pub fn h0(&self) -> usize {
        self.h0
    }

    pub fn num_symbols(&self) -> usize {
        self.sigma
    }

    pub fn num_states(&self) -> usize {
        self.states
    }

    pub fn check(&self) -> Result<(), IllFormedTable> {
        for v in self.entries.iter().flatten() {
            if *v > self.h0 {
                return Err(IllFormedTable {
                    value: *v,
                    h0: self.h0,
                });
            }
        }
        Ok(())
    }

    /// Whether every entry is at most the corresponding entry of `other`.
    pub fn le(&self, other: &ReturnTable) -> bool {
        self.entries.iter().zip(&other.entries).all(|(a, b)| match (a, b) {
            (_, None) => true,
            (None, Some(_)) => false,
            (Some(x), Some(y)) => x <= y,
        })
    }

    /// `σ p q a` lines with `inf` for ∞.
    pub fn render(&self, a: &Hocs2) -> String {
        let mut out = String::new();
        for s in 0..self.sigma {
            for p in 0..self.states {
                for q in 0..self.states {
                    let v = match self.get(Sym(s as u16), p, q) {
                        Some(v) => v.to_string(),
                        None => "inf".to_string(),
                    };
                    out.push_str(&format!(
                        "{} {} {} {}\n",
                        a.alphabet().name(Sym(s as u16)),
                        a.state_name(p),
                        a.state_name(q),
                        v
                    ));
                }
            }
        }
        out
    }
}

impl fmt::Display for ReturnTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in 0..self.sigma {
            for p in 0..self.states {
                for q in 0..self.states {
                    match self.get(Sym(s as u16), p, q) {
                        Some(v) => writeln!(f, "{s} {p} {q} {v}")?,
                        None => writeln!(f, "{s} {p} {q} inf")?,
                    }
                }
            }
        }
        Ok(())
    }
}

/// `(p, q) ∈ ret_∞((σ, i))` according to the table.
pub fn ret_query(table: &ReturnTable, s: Sym, p: StateId, q: StateId, i: usize) -> bool {
    table.get(s, p, q).is_some_and(|a| i >= a)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bound_formulas() {
        assert_eq!(
            Bounds::from_sizes(3, 4),
            Bounds {
                h0: 48,
                k0: 2304,
                n0: 96
            }
        );
        assert_eq!(Bounds::from_sizes(1, 1), Bounds { h0: 1, k0: 1, n0: 2 });
        assert_eq!(Bounds::from_sizes(2, 2), Bounds { h0: 8, k0: 64, n0: 16 });
    }

    #[test]
    fn query_rule() {
        let mut t = ReturnTable::infinite(1, 1, 4);
        assert!(!ret_query(&t, Sym(0), 0, 0, 4));
        t.set(Sym(0), 0, 0, Some(0));
        assert!(ret_query(&t, Sym(0), 0, 0, 0));
        t.set(Sym(0), 0, 0, Some(3));
        assert!(!ret_query(&t, Sym(0), 0, 0, 2));
        assert!(ret_query(&t, Sym(0), 0, 0, 3));
        t.set(Sym(0), 0, 0, Some(5));
        assert!(t.check().is_err());
    }
}

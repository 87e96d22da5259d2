//! Level-1 pushdown systems with `pre*` and `post*` saturation.

mod pautomaton;
mod saturation;

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

pub use pautomaton::PAutomaton;
pub use saturation::{post_star, pre_star, reach_pda, reach_pda_config};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PdsError {
    #[error("syntax error at line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
}

/// A rule `(p, γ) ↪ (q, w)`; `w` is written top symbol first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rule {
    pub from: usize,
    pub sym: usize,
    pub to: usize,
    pub push: Vec<usize>,
}

/// A pushdown system over control states `0..num_states` and stack
/// symbols `0..num_symbols`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pds {
    num_states: usize,
    num_symbols: usize,
    rules: Vec<Rule>,
    state_names: Vec<String>,
    symbol_names: Vec<String>,
}

impl Pds {
    pub fn new(num_states: usize, num_symbols: usize) -> Self {
        Pds {
            num_states,
            num_symbols,
            rules: Vec::new(),
            state_names: (0..num_states).map(|i| format!("p{i}")).collect(),
            symbol_names: (0..num_symbols).map(|i| format!("g{i}")).collect(),
        }
    }

    pub fn with_names(states: Vec<String>, symbols: Vec<String>) -> Self {
        Pds {
            num_states: states.len(),
            num_symbols: symbols.len(),
            rules: Vec::new(),
            state_names: states,
            symbol_names: symbols,
        }
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn num_symbols(&self) -> usize {
        self.num_symbols
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn state_name(&self, p: usize) -> &str {
        &self.state_names[p]
    }

    pub fn symbol_name(&self, g: usize) -> &str {
        &self.symbol_names[g]
    }

    pub fn state(&self, name: &str) -> Option<usize> {
        self.state_names.iter().position(|n| n == name)
    }

    pub fn symbol(&self, name: &str) -> Option<usize> {
        self.symbol_names.iter().position(|n| n == name)
    }

    pub fn add_state(&mut self, name: &str) -> usize {
        self.state_names.push(name.to_string());
        self.num_states += 1;
        self.num_states - 1
    }

    /// Adds a rule; right-hand sides longer than two symbols are split
    /// through fresh control states.
    pub fn add_rule(&mut self, from: usize, sym: usize, to: usize, push: &[usize]) {
        assert!(from < self.num_states && to < self.num_states, "state out of range");
        assert!(
            sym < self.num_symbols && push.iter().all(|g| *g < self.num_symbols),
            "symbol out of range"
        );
        if push.len() <= 2 {
            self.rules.push(Rule {
                from,
                sym,
                to,
                push: push.to_vec(),
            });
            return;
        }
        // (p,γ) ↪ (q, a b c ...) becomes (p,γ) ↪ (m, x c...) where the
        // fresh state m then rewrites x to a b.
        let n = push.len();
        let mut cur_from = from;
        let mut cur_sym = sym;
        for k in (2..n).rev() {
            let mid = self.add_state(&format!("{}.split{}", self.state_names[from], self.rules.len()));
            self.rules.push(Rule {
                from: cur_from,
                sym: cur_sym,
                to: mid,
                push: vec![push[k - 1], push[k]],
            });
            cur_from = mid;
            cur_sym = push[k - 1];
        }
        self.rules.push(Rule {
            from: cur_from,
            sym: cur_sym,
            to,
            push: vec![push[0], push[1]],
        });
    }

    /// Successor configurations of `(p, w)`.
    pub fn step(&self, p: usize, w: &[usize]) -> Vec<(usize, Vec<usize>)> {
        let Some((&top, rest)) = w.split_first() else {
            return Vec::new();
        };
        self.rules
            .iter()
            .filter(|r| r.from == p && r.sym == top)
            .map(|r| {
                let mut v = r.push.clone();
                v.extend_from_slice(rest);
                (r.to, v)
            })
            .collect()
    }

    pub fn print(&self) -> String {
        let mut out = String::new();
        for r in &self.rules {
            let rhs = if r.push.is_empty() {
                "-".to_string()
            } else {
                r.push
                    .iter()
                    .map(|g| self.symbol_names[*g].as_str())
                    .collect::<Vec<_>>()
                    .join(" ")
            };
            let _ = writeln!(
                out,
                "rule: {} {} -> {} {}",
                self.state_names[r.from], self.symbol_names[r.sym], self.state_names[r.to], rhs
            );
        }
        out
    }
}

fn strip(line: &str) -> &str {
    line.split('#').next().unwrap_or("").trim()
}

/// Parses `rule: p a -> q b c` lines; states and symbols are declared by use.
pub fn parse_pds(text: &str) -> Result<Pds, PdsError> {
    let mut states: Vec<String> = Vec::new();
    let mut symbols: Vec<String> = Vec::new();
    let mut raw = Vec::new();
    let intern = |v: &mut Vec<String>, s: &str| -> usize {
        match v.iter().position(|x| x == s) {
            Some(i) => i,
            None => {
                v.push(s.to_string());
                v.len() - 1
            }
        }
    };
    for (i, line) in text.lines().enumerate() {
        let line = strip(line);
        if line.is_empty() {
            continue;
        }
        let err = |m: &str| PdsError::Syntax {
            line: i + 1,
            message: m.to_string(),
        };
        let body = line
            .strip_prefix("rule:")
            .ok_or_else(|| err("expected `rule:`"))?;
        let (lhs, rhs) = body.split_once("->").ok_or_else(|| err("expected `->`"))?;
        let lhs: Vec<&str> = lhs.split_whitespace().collect();
        let rhs: Vec<&str> = rhs.split_whitespace().collect();
        if lhs.len() != 2 || rhs.is_empty() {
            return Err(err("expected `p a -> q w`"));
        }
        let from = intern(&mut states, lhs[0]);
        let sym = intern(&mut symbols, lhs[1]);
        let to = intern(&mut states, rhs[0]);
        let mut push = Vec::new();
        for s in &rhs[1..] {
            if *s != "-" {
                push.push(intern(&mut symbols, s));
            }
        }
        raw.push((from, sym, to, push));
    }
    let mut pds = Pds::with_names(states, symbols);
    for (f, s, t, w) in raw {
        pds.add_rule(f, s, t, &w);
    }
    Ok(pds)
}

/// Parses a P-automaton against the names of `pds`. Lines: `pa-state s`,
/// `pa-accept s`, `pa-trans: s a -> t` (the colon after the key is optional).
/// Names of control states refer to the pushdown system's states.
pub fn parse_pautomaton(pds: &Pds, text: &str) -> Result<PAutomaton, PdsError> {
    let mut a = PAutomaton::new(pds.num_states());
    let mut extra: HashMap<String, usize> = HashMap::new();
    fn resolve(pds: &Pds, a: &mut PAutomaton, extra: &mut HashMap<String, usize>, name: &str, create: bool) -> Result<usize, PdsError> {
        if let Some(p) = pds.state(name) {
            return Ok(p);
        }
        if let Some(&s) = extra.get(name) {
            return Ok(s);
        }
        if create {
            let s = a.add_state();
            extra.insert(name.to_string(), s);
            Ok(s)
        } else {
            Err(PdsError::UnknownState(name.to_string()))
        }
    }
    for (i, line) in text.lines().enumerate() {
        let line = strip(line);
        if line.is_empty() {
            continue;
        }
        let err = |m: &str| PdsError::Syntax {
            line: i + 1,
            message: m.to_string(),
        };
        let (key, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let key = key.trim_end_matches(':');
        match key {
            "pa-state" => {
                for name in rest.split_whitespace() {
                    resolve(pds, &mut a, &mut extra, name, true)?;
                }
            }
            "pa-accept" => {
                for name in rest.split_whitespace() {
                    let s = resolve(pds, &mut a, &mut extra, name, false)?;
                    a.set_accepting(s, true);
                }
            }
            "pa-trans" => {
                let (lhs, rhs) = rest.split_once("->").ok_or_else(|| err("expected `->`"))?;
                let lhs: Vec<&str> = lhs.split_whitespace().collect();
                let rhs: Vec<&str> = rhs.split_whitespace().collect();
                if lhs.len() != 2 || rhs.len() != 1 {
                    return Err(err("expected `s a -> t`"));
                }
                let s = resolve(pds, &mut a, &mut extra, lhs[0], false)?;
                let g = pds
                    .symbol(lhs[1])
                    .ok_or_else(|| PdsError::UnknownSymbol(lhs[1].to_string()))?;
                let t = resolve(pds, &mut a, &mut extra, rhs[0], false)?;
                a.add_transition(s, g, t);
            }
            other => return Err(err(&format!("unknown key `{other}`"))),
        }
    }
    Ok(a)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn long_rules_are_split() {
        let mut p = Pds::new(2, 3);
        p.add_rule(0, 0, 1, &[0, 1, 2, 1]);
        assert!(p.rules().iter().all(|r| r.push.len() <= 2));
        // Run the split rules and check the final stack.
        let mut confs = vec![(0usize, vec![0usize])];
        let mut found = false;
        for _ in 0..5 {
            let mut next = Vec::new();
            for (q, w) in &confs {
                if *q == 1 && *w == vec![0, 1, 2, 1] {
                    found = true;
                }
                next.extend(p.step(*q, w));
            }
            confs = next;
        }
        assert!(found);
    }

    #[test]
    fn parse_formats() {
        let p = parse_pds("rule: p a -> q b c\nrule: q b -> r -\n").unwrap();
        assert_eq!(p.num_states(), 3);
        assert_eq!(p.rules()[1].push, Vec::<usize>::new());
        let a = parse_pautomaton(&p, "pa-state f\npa-accept f\npa-trans: r c -> f\n").unwrap();
        assert!(a.accepts(2, &[2]));
        assert_eq!(parse_pds(&p.print()).unwrap().rules(), p.rules());
    }
}

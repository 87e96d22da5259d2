//! Nondeterministic bottom-up tree automata with absent-child markers.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use crate::storage::{split_key, strip_comment, Alphabet, StateId, Sym};

use super::{BinTree, Label};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TaError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unknown automaton state `{name}`")]
    UnknownState { line: usize, name: String },
    #[error("line {line}: `{name}` is neither a symbol nor a control state")]
    UnknownLabel { line: usize, name: String },
    #[error("line {line}: `{name}` names both a symbol and a control state")]
    AmbiguousLabel { line: usize, name: String },
    #[error("line {line}: duplicate automaton state `{name}`")]
    DuplicateState { line: usize, name: String },
}

/// A rule `label(left, right) -> to`; leaves have both children absent.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TaRule {
    pub label: Label,
    pub left: Option<usize>,
    pub right: Option<usize>,
    pub to: usize,
}

#[derive(Clone, Debug, Default)]
pub struct TreeAutomaton {
    names: Vec<String>,
    accepting: Vec<bool>,
    rules: Vec<TaRule>,
    by_label: HashMap<Label, Vec<usize>>,
    seen: HashSet<TaRule>,
}

impl TreeAutomaton {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_state(&mut self, name: impl Into<String>) -> usize {
        self.names.push(name.into());
        self.accepting.push(false);
        self.names.len() - 1
    }

    pub fn num_states(&self) -> usize {
        self.names.len()
    }

    pub fn state_name(&self, s: usize) -> &str {
        &self.names[s]
    }

    pub fn state(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn set_accepting(&mut self, s: usize, yes: bool) {
        self.accepting[s] = yes;
    }

    pub fn is_accepting(&self, s: usize) -> bool {
        self.accepting[s]
    }

    pub fn rules(&self) -> &[TaRule] {
        &self.rules
    }

    pub fn add_rule(&mut self, label: Label, left: Option<usize>, right: Option<usize>, to: usize) {
        let r = TaRule {
            label,
            left,
            right,
            to,
        };
        if !self.seen.insert(r) {
            return;
        }
        self.by_label.entry(label).or_default().push(self.rules.len());
        self.rules.push(r);
    }

    pub fn add_leaf(&mut self, label: Label, to: usize) {
        self.add_rule(label, None, None, to);
    }

    /// States reachable at the root of `t`.
    pub fn run(&self, t: &BinTree) -> Vec<bool> {
        let mut out = vec![false; self.num_states()];
        let child = |c: &Option<Box<BinTree>>| c.as_deref().map(|t| self.run(t));
        let (l, r) = (child(&t.left), child(&t.right));
        let fits = |slot: Option<usize>, set: &Option<Vec<bool>>| match (slot, set) {
            (None, None) => true,
            (Some(s), Some(v)) => v[s],
            _ => false,
        };
        if let Some(ids) = self.by_label.get(&t.label) {
            for &i in ids {
                let rule = &self.rules[i];
                if fits(rule.left, &l) && fits(rule.right, &r) {
                    out[rule.to] = true;
                }
            }
        }
        out
    }

    /// Writes the automaton in the line format accepted by [`parse_ta`].
    pub fn render(&self, alphabet: &Alphabet, states: &[String]) -> String {
        let label = |l: Label| match l {
            Label::Sym(s) => alphabet.name(s).to_string(),
            Label::State(q) => states.get(q).cloned().unwrap_or_else(|| format!("q{q}")),
        };
        let slot = |s: Option<usize>| s.map_or("-".to_string(), |s| self.names[s].clone());
        let mut out = String::new();
        for n in &self.names {
            let _ = writeln!(out, "ta-state {n}");
        }
        for (s, n) in self.names.iter().enumerate() {
            if self.accepting[s] {
                let _ = writeln!(out, "ta-accept {n}");
            }
        }
        for r in &self.rules {
            if r.left.is_none() && r.right.is_none() {
                let _ = writeln!(out, "ta-leaf {} -> {}", label(r.label), self.names[r.to]);
            } else {
                let _ = writeln!(
                    out,
                    "ta-node {} ({}, {}) -> {}",
                    label(r.label),
                    slot(r.left),
                    slot(r.right),
                    self.names[r.to]
                );
            }
        }
        out
    }
}

pub fn ta_membership(ta: &TreeAutomaton, t: &BinTree) -> bool {
    ta.run(t)
        .iter()
        .enumerate()
        .any(|(s, &yes)| yes && ta.accepting[s])
}

pub fn ta_intersect(a: &TreeAutomaton, b: &TreeAutomaton) -> TreeAutomaton {
    let nb = b.num_states();
    let mut out = TreeAutomaton::new();
    for sa in 0..a.num_states() {
        for sb in 0..nb {
            let s = out.add_state(format!("{}&{}", a.names[sa], b.names[sb]));
            out.set_accepting(s, a.accepting[sa] && b.accepting[sb]);
        }
    }
    let pair = |x: Option<usize>, y: Option<usize>| -> Option<Option<usize>> {
        match (x, y) {
            (None, None) => Some(None),
            (Some(x), Some(y)) => Some(Some(x * nb + y)),
            _ => None,
        }
    };
    let mut labels: Vec<&Label> = a.by_label.keys().collect();
    labels.sort();
    for label in labels {
        let Some(ib) = b.by_label.get(label) else {
            continue;
        };
        for &i in &a.by_label[label] {
            let ra = a.rules[i];
            for &j in ib {
                let rb = b.rules[j];
                if let (Some(l), Some(r)) = (pair(ra.left, rb.left), pair(ra.right, rb.right)) {
                    out.add_rule(*label, l, r, ra.to * nb + rb.to);
                }
            }
        }
    }
    out
}

pub fn ta_union(a: &TreeAutomaton, b: &TreeAutomaton) -> TreeAutomaton {
    let mut out = TreeAutomaton::new();
    for (s, n) in a.names.iter().enumerate() {
        let id = out.add_state(format!("l.{n}"));
        out.set_accepting(id, a.accepting[s]);
    }
    let off = a.num_states();
    for (s, n) in b.names.iter().enumerate() {
        let id = out.add_state(format!("r.{n}"));
        out.set_accepting(id, b.accepting[s]);
    }
    for r in &a.rules {
        out.add_rule(r.label, r.left, r.right, r.to);
    }
    for r in &b.rules {
        out.add_rule(r.label, r.left.map(|s| s + off), r.right.map(|s| s + off), r.to + off);
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Emptiness {
    Empty,
    Witness(BinTree),
}

/// Reachable-state fixpoint; a witness is the smallest-round tree found
/// for some accepting state.
pub fn ta_emptiness(ta: &TreeAutomaton) -> Emptiness {
    let mut wit: Vec<Option<BinTree>> = vec![None; ta.num_states()];
    loop {
        let mut changed = false;
        for r in &ta.rules {
            if wit[r.to].is_some() {
                continue;
            }
            let get = |s: Option<usize>| -> Option<Option<BinTree>> {
                match s {
                    None => Some(None),
                    Some(s) => wit[s].clone().map(Some),
                }
            };
            if let (Some(l), Some(rt)) = (get(r.left), get(r.right)) {
                wit[r.to] = Some(BinTree::node(r.label, l, rt));
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    (0..ta.num_states())
        .filter(|&s| ta.accepting[s])
        .filter_map(|s| wit[s].clone())
        .min_by_key(|t| t.size())
        .map_or(Emptiness::Empty, Emptiness::Witness)
}

/// Accepts exactly the encodings `E((q, p))` with `q < num_states`.
///
/// States: `leaf` for any leaf symbol, `z` for `E(p)` whose first entry has
/// counter 0, `n` for `E(p)` whose first entry is positive, `acc` at the
/// root.
pub fn validity_ta(alphabet: &Alphabet, num_states: usize) -> TreeAutomaton {
    let mut ta = TreeAutomaton::new();
    let leaf = ta.add_state("leaf");
    let z = ta.add_state("z");
    let n = ta.add_state("n");
    let acc = ta.add_state("acc");
    ta.set_accepting(acc, true);
    let bot = Label::Sym(Sym::BOTTOM);
    for s in alphabet.symbols() {
        ta.add_leaf(Label::Sym(s), leaf);
    }
    for right in [None, Some(z), Some(n)] {
        ta.add_rule(bot, Some(leaf), right, z);
    }
    for left in [z, n] {
        for right in [None, Some(z)] {
            ta.add_rule(bot, Some(left), right, n);
        }
    }
    for q in 0..num_states {
        for left in [z, n] {
            ta.add_rule(Label::State(q), Some(left), None, acc);
        }
    }
    ta
}

/// Accepts the encodings of all configurations with control state `q`.
pub fn control_state_ta(alphabet: &Alphabet, q: StateId) -> TreeAutomaton {
    let mut ta = validity_ta(alphabet, 0);
    let acc = ta.state("acc").expect("validity automaton has acc");
    for left in ["z", "n"] {
        let l = ta.state(left).expect("validity automaton state");
        ta.add_rule(Label::State(q), Some(l), None, acc);
    }
    ta
}

/// Accepts exactly the tree `t`.
pub fn singleton_ta(t: &BinTree) -> TreeAutomaton {
    fn go(t: &BinTree, ta: &mut TreeAutomaton) -> usize {
        let l = t.left.as_deref().map(|c| go(c, ta));
        let r = t.right.as_deref().map(|c| go(c, ta));
        let s = ta.add_state(format!("n{}", ta.num_states()));
        ta.add_rule(t.label, l, r, s);
        s
    }
    let mut ta = TreeAutomaton::new();
    let root = go(t, &mut ta);
    ta.set_accepting(root, true);
    ta
}

/// Accepts `E((q, (⊥,m)(⊥,m)))` for every `m`.
pub fn diagonal_ta(q: StateId) -> TreeAutomaton {
    let mut ta = TreeAutomaton::new();
    let leaf = ta.add_state("leaf");
    let single = ta.add_state("single");
    let pair = ta.add_state("pair");
    let acc = ta.add_state("acc");
    ta.set_accepting(acc, true);
    let bot = Label::Sym(Sym::BOTTOM);
    ta.add_leaf(bot, leaf);
    ta.add_rule(bot, Some(leaf), None, single);
    ta.add_rule(bot, Some(leaf), Some(single), pair);
    ta.add_rule(bot, Some(pair), None, pair);
    ta.add_rule(Label::State(q), Some(pair), None, acc);
    ta
}

fn resolve_label(alphabet: &Alphabet, states: &[String], name: &str, line: usize) -> Result<Label, TaError> {
    let sym = alphabet.lookup(name);
    let st = states.iter().position(|s| s == name);
    match (sym, st) {
        (Some(s), None) => Ok(Label::Sym(s)),
        (None, Some(q)) => Ok(Label::State(q)),
        (Some(_), Some(_)) => Err(TaError::AmbiguousLabel {
            line,
            name: name.to_string(),
        }),
        (None, None) => Err(TaError::UnknownLabel {
            line,
            name: name.to_string(),
        }),
    }
}

/// Parses the `ta-state` / `ta-accept` / `ta-leaf` / `ta-node` line format.
/// Labels are resolved against the alphabet and the control-state names.
pub fn parse_ta(alphabet: &Alphabet, states: &[String], text: &str) -> Result<TreeAutomaton, TaError> {
    let mut ta = TreeAutomaton::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = strip_comment(raw).trim();
        if body.is_empty() {
            continue;
        }
        let syntax = |m: &str| TaError::Syntax {
            line,
            message: m.to_string(),
        };
        let (key, rest) = match split_key(body) {
            Some((k, r, _)) => (k, r.trim()),
            None => match body.split_once(char::is_whitespace) {
                Some((k, r)) => (k, r.trim()),
                None => (body, ""),
            },
        };
        let state = |ta: &TreeAutomaton, n: &str| {
            ta.state(n).ok_or_else(|| TaError::UnknownState {
                line,
                name: n.to_string(),
            })
        };
        match key {
            "ta-state" => {
                for n in rest.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()) {
                    if ta.state(n).is_some() {
                        return Err(TaError::DuplicateState {
                            line,
                            name: n.to_string(),
                        });
                    }
                    ta.add_state(n);
                }
            }
            "ta-accept" => {
                for n in rest.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()) {
                    let s = state(&ta, n)?;
                    ta.set_accepting(s, true);
                }
            }
            "ta-leaf" => {
                let (lhs, to) = rest.split_once("->").ok_or_else(|| syntax("expected `->`"))?;
                let label = resolve_label(alphabet, states, lhs.trim(), line)?;
                let to = state(&ta, to.trim())?;
                ta.add_leaf(label, to);
            }
            "ta-node" => {
                let (lhs, to) = rest.split_once("->").ok_or_else(|| syntax("expected `->`"))?;
                let (name, kids) = lhs.split_once('(').ok_or_else(|| syntax("expected `(`"))?;
                let kids = kids.trim().strip_suffix(')').ok_or_else(|| syntax("expected `)`"))?;
                let (l, r) = kids.split_once(',').ok_or_else(|| syntax("expected two children"))?;
                let slot = |ta: &TreeAutomaton, s: &str| -> Result<Option<usize>, TaError> {
                    let s = s.trim();
                    if s == "-" {
                        Ok(None)
                    } else {
                        state(ta, s).map(Some)
                    }
                };
                let label = resolve_label(alphabet, states, name.trim(), line)?;
                let (l, r) = (slot(&ta, l)?, slot(&ta, r)?);
                let to = state(&ta, to.trim())?;
                ta.add_rule(label, l, r, to);
            }
            other => return Err(syntax(&format!("unknown key `{other}`"))),
        }
    }
    Ok(ta)
}

//! Alternating unary automata and alternating 2-store automata over
//! `P(C)` configurations (membership only).
//!
//! A 2-store automaton reads a configuration entry by entry from the top:
//! on `x = x'(τ, m)` a transition `(q, (τ, B), q')` applies when the unary
//! automaton `B` accepts `⊥^m`, and the run continues from `q'` on `x'`.
//! Universal states with no matching transition accept.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::hoca2::L2Config;
use crate::storage::{split_key, strip_comment, Alphabet, Mode, StateId, Sym};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RegNotionError {
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unknown automaton `{name}`")]
    UnknownAfa { line: usize, name: String },
    #[error("line {line}: unknown symbol `{name}`")]
    UnknownSymbol { line: usize, name: String },
    #[error("line {line}: duplicate name `{name}`")]
    Duplicate { line: usize, name: String },
}

/// An alternating automaton over the one-letter alphabet `{⊥}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnaryAfa {
    names: Vec<String>,
    initial: usize,
    accepting: Vec<bool>,
    modes: Vec<Mode>,
    succ: Vec<Vec<usize>>,
}

impl UnaryAfa {
    /// An automaton with a single existential, non-accepting state.
    pub fn new(initial: &str) -> Self {
        UnaryAfa {
            names: vec![initial.to_string()],
            initial: 0,
            accepting: vec![false],
            modes: vec![Mode::Existential],
            succ: vec![Vec::new()],
        }
    }

    pub fn add_state(&mut self, name: &str) -> usize {
        self.names.push(name.to_string());
        self.accepting.push(false);
        self.modes.push(Mode::Existential);
        self.succ.push(Vec::new());
        self.names.len() - 1
    }

    pub fn state(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn num_states(&self) -> usize {
        self.names.len()
    }

    pub fn set_initial(&mut self, s: usize) {
        self.initial = s;
    }

    pub fn set_accepting(&mut self, s: usize, yes: bool) {
        self.accepting[s] = yes;
    }

    pub fn set_mode(&mut self, s: usize, mode: Mode) {
        self.modes[s] = mode;
    }

    /// A `⊥`-transition.
    pub fn add_transition(&mut self, from: usize, to: usize) {
        if !self.succ[from].contains(&to) {
            self.succ[from].push(to);
        }
    }

    /// Accepts `⊥^m` iff `p` divides `m`.
    pub fn divisible_by(p: usize) -> Self {
        assert!(p > 0);
        let mut afa = UnaryAfa::new("r0");
        for i in 1..p {
            afa.add_state(&format!("r{i}"));
        }
        for i in 0..p {
            afa.add_transition(i, (i + 1) % p);
        }
        afa.set_accepting(0, true);
        afa
    }

    /// Accepts every `⊥^m`.
    pub fn universal_language() -> Self {
        let mut afa = UnaryAfa::new("all");
        afa.set_accepting(0, true);
        afa.add_transition(0, 0);
        afa
    }

    /// Accepts exactly `⊥^n`.
    pub fn exactly(n: usize) -> Self {
        let mut afa = UnaryAfa::new("c0");
        for i in 1..=n {
            afa.add_state(&format!("c{i}"));
            afa.add_transition(i - 1, i);
        }
        afa.set_accepting(n, true);
        afa
    }

    fn render(&self, name: &str, out: &mut String) {
        let _ = writeln!(out, "afa {name} {{");
        let _ = writeln!(out, "  states: {}", self.names.join(" "));
        let _ = writeln!(out, "  initial: {}", self.names[self.initial]);
        let acc: Vec<&str> = (0..self.names.len())
            .filter(|&s| self.accepting[s])
            .map(|s| self.names[s].as_str())
            .collect();
        if !acc.is_empty() {
            let _ = writeln!(out, "  accept: {}", acc.join(" "));
        }
        for s in 0..self.names.len() {
            if self.modes[s] == Mode::Universal {
                let _ = writeln!(out, "  mode: {} universal", self.names[s]);
            }
        }
        for (s, ts) in self.succ.iter().enumerate() {
            for &t in ts {
                let _ = writeln!(out, "  trans: {} {}", self.names[s], self.names[t]);
            }
        }
        let _ = writeln!(out, "}}");
    }
}

/// Whether `afa` accepts `⊥^m`, by a table over the number of letters left.
pub fn afa_unary_membership(afa: &UnaryAfa, m: u64) -> bool {
    let mut acc = afa.accepting.clone();
    for _ in 0..m {
        let next: Vec<bool> = (0..afa.num_states())
            .map(|s| match afa.modes[s] {
                Mode::Existential => afa.succ[s].iter().any(|&t| acc[t]),
                Mode::Universal => afa.succ[s].iter().all(|&t| acc[t]),
            })
            .collect();
        if next == acc {
            break;
        }
        acc = next;
    }
    acc[afa.initial]
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct TsTransition {
    pub from: StateId,
    pub top: Sym,
    pub afa: usize,
    pub to: StateId,
}

/// An alternating 2-store automaton. The first states are meant to be the
/// control states of the automaton whose configurations are read.
#[derive(Clone, Debug)]
pub struct TwoStoreAutomaton {
    alphabet: Alphabet,
    names: Vec<String>,
    modes: Vec<Mode>,
    accepting: Vec<bool>,
    afas: Vec<(String, UnaryAfa)>,
    transitions: Vec<TsTransition>,
}

impl TwoStoreAutomaton {
    pub fn new(alphabet: Alphabet) -> Self {
        TwoStoreAutomaton {
            alphabet,
            names: Vec::new(),
            modes: Vec::new(),
            accepting: Vec::new(),
            afas: Vec::new(),
            transitions: Vec::new(),
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn add_state(&mut self, name: &str) -> StateId {
        self.names.push(name.to_string());
        self.modes.push(Mode::Existential);
        self.accepting.push(false);
        self.names.len() - 1
    }

    pub fn state(&self, name: &str) -> Option<StateId> {
        self.names.iter().position(|n| n == name)
    }

    pub fn state_name(&self, q: StateId) -> &str {
        &self.names[q]
    }

    pub fn num_states(&self) -> usize {
        self.names.len()
    }

    pub fn set_mode(&mut self, q: StateId, mode: Mode) {
        self.modes[q] = mode;
    }

    pub fn set_accepting(&mut self, q: StateId, yes: bool) {
        self.accepting[q] = yes;
    }

    /// Registers a unary automaton under `name` and returns its index.
    pub fn add_afa(&mut self, name: &str, afa: UnaryAfa) -> usize {
        self.afas.push((name.to_string(), afa));
        self.afas.len() - 1
    }

    pub fn afa(&self, name: &str) -> Option<usize> {
        self.afas.iter().position(|(n, _)| n == name)
    }

    pub fn add_transition(&mut self, from: StateId, top: Sym, afa: usize, to: StateId) {
        assert!(afa < self.afas.len(), "unregistered unary automaton");
        self.transitions.push(TsTransition { from, top, afa, to });
    }

    pub fn transitions(&self) -> &[TsTransition] {
        &self.transitions
    }

    /// Writes the automaton in the format read by [`parse_two_store`].
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "alphabet: {}",
            self.alphabet.symbols().map(|s| self.alphabet.name(s)).collect::<Vec<_>>().join(" ")
        );
        let _ = writeln!(out, "states: {}", self.names.join(" "));
        let fin: Vec<&str> = (0..self.names.len())
            .filter(|&q| self.accepting[q])
            .map(|q| self.names[q].as_str())
            .collect();
        if !fin.is_empty() {
            let _ = writeln!(out, "final: {}", fin.join(" "));
        }
        for q in 0..self.names.len() {
            if self.modes[q] == Mode::Universal {
                let _ = writeln!(out, "mode: {} universal", self.names[q]);
            }
        }
        for (name, afa) in &self.afas {
            afa.render(name, &mut out);
        }
        for t in &self.transitions {
            let _ = writeln!(
                out,
                "trans: {} ({}, {}) {}",
                self.names[t.from],
                self.alphabet.name(t.top),
                self.afas[t.afa].0,
                self.names[t.to]
            );
        }
        out
    }
}

/// Whether `tsa` accepts `(q, c)`.
///
/// The acceptance of `q` on the lowest `n` entries depends only on the
/// acceptance of successor states on the lowest `n − 1`, so the top-first
/// recursion is evaluated as a table over prefix lengths.
pub fn two_store_membership(tsa: &TwoStoreAutomaton, q: StateId, c: &L2Config) -> Result<bool, RegNotionError> {
    if q >= tsa.num_states() {
        return Err(RegNotionError::UnknownState(format!("#{q}")));
    }
    let mut acc = tsa.accepting.clone();
    let mut by_state: Vec<Vec<&TsTransition>> = vec![Vec::new(); tsa.num_states()];
    for t in &tsa.transitions {
        by_state[t.from].push(t);
    }
    let mut afa_memo: BTreeMap<(usize, u32), bool> = BTreeMap::new();
    for &(tau, m) in &c.0 {
        let mut afa_ok = |i: usize| *afa_memo.entry((i, m)).or_insert_with(|| afa_unary_membership(&tsa.afas[i].1, m as u64));
        let next: Vec<bool> = (0..tsa.num_states())
            .map(|p| {
                let mut matching = by_state[p].iter().filter(|t| t.top == tau);
                match tsa.modes[p] {
                    Mode::Existential => matching.any(|t| afa_ok(t.afa) && acc[t.to]),
                    Mode::Universal => matching.all(|t| afa_ok(t.afa) && acc[t.to]),
                }
            })
            .collect();
        acc = next;
    }
    Ok(acc[q])
}

/// Membership with the start state given by name.
pub fn two_store_membership_named(tsa: &TwoStoreAutomaton, q: &str, c: &L2Config) -> Result<bool, RegNotionError> {
    let id = tsa.state(q).ok_or_else(|| RegNotionError::UnknownState(q.to_string()))?;
    two_store_membership(tsa, id, c)
}

/// Accepts `(q0, (⊥,v1)…(⊥,vn))` with `p_i | v_i`, `v1` at the bottom.
pub fn prime_fixture(primes: &[usize]) -> TwoStoreAutomaton {
    let mut tsa = TwoStoreAutomaton::new(Alphabet::binary());
    let n = primes.len();
    // Reading top-first, state s_i still has the lowest n − i entries to check.
    let states: Vec<StateId> = (0..=n).map(|i| tsa.add_state(&format!("s{i}"))).collect();
    tsa.set_accepting(states[n], true);
    for (i, &p) in primes.iter().rev().enumerate() {
        let b = tsa.add_afa(&format!("div{p}.{i}"), UnaryAfa::divisible_by(p));
        tsa.add_transition(states[i], Sym::BOTTOM, b, states[i + 1]);
    }
    tsa
}

fn names(rest: &str) -> impl Iterator<Item = &str> {
    rest.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty())
}

/// Parses the 2-store format: `alphabet:`, `states:`, `final:`, `mode:`
/// lines, `afa <name> { … }` blocks with `states:`, `initial:`, `accept:`,
/// `mode:` and `trans: s t` lines, and `trans: q (τ, afa) q'` lines.
/// The alphabet defaults to `_ 0 1`.
pub fn parse_two_store(text: &str) -> Result<TwoStoreAutomaton, RegNotionError> {
    let mut tsa = TwoStoreAutomaton::new(Alphabet::binary());
    let mut block: Option<(String, UnaryAfa, bool)> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = strip_comment(raw).trim();
        if body.is_empty() {
            continue;
        }
        let syntax = |m: String| RegNotionError::Syntax { line, message: m };
        if let Some((name, afa, seen_states)) = block.as_mut() {
            if body == "}" {
                let (name, afa, _) = block.take().expect("open block");
                tsa.add_afa(&name, afa);
                continue;
            }
            let (key, rest, _) = split_key(body).ok_or_else(|| syntax("expected `key: value`".into()))?;
            let lookup = |afa: &UnaryAfa, n: &str| {
                afa.state(n).ok_or_else(|| RegNotionError::UnknownState(format!("{name}.{n}")))
            };
            match key {
                "states" => {
                    for n in names(rest) {
                        if !*seen_states {
                            *afa = UnaryAfa::new(n);
                            *seen_states = true;
                        } else if afa.state(n).is_some() {
                            return Err(RegNotionError::Duplicate { line, name: n.into() });
                        } else {
                            afa.add_state(n);
                        }
                    }
                }
                "initial" => {
                    let s = lookup(afa, rest.trim())?;
                    afa.set_initial(s);
                }
                "accept" => {
                    for n in names(rest) {
                        let s = lookup(afa, n)?;
                        afa.set_accepting(s, true);
                    }
                }
                "mode" => {
                    let (s, m) = parse_mode(rest).ok_or_else(|| syntax("expected `state universal|existential`".into()))?;
                    let s = lookup(afa, s)?;
                    afa.set_mode(s, m);
                }
                "trans" => {
                    let v: Vec<&str> = names(rest).collect();
                    let [a, b] = v[..] else {
                        return Err(syntax("expected `trans: from to`".into()));
                    };
                    let (a, b) = (lookup(afa, a)?, lookup(afa, b)?);
                    afa.add_transition(a, b);
                }
                other => return Err(syntax(format!("unknown key `{other}` in afa block"))),
            }
            continue;
        }
        if let Some(rest) = body.strip_prefix("afa ") {
            let name = rest
                .trim()
                .strip_suffix('{')
                .map(str::trim)
                .filter(|n| !n.is_empty() && !n.contains(char::is_whitespace))
                .ok_or_else(|| syntax("expected `afa <name> {`".into()))?;
            if tsa.afa(name).is_some() {
                return Err(RegNotionError::Duplicate { line, name: name.into() });
            }
            block = Some((name.to_string(), UnaryAfa::new("_"), false));
            continue;
        }
        let (key, rest, _) = split_key(body).ok_or_else(|| syntax("expected `key: value`".into()))?;
        let state = |tsa: &TwoStoreAutomaton, n: &str| {
            tsa.state(n).ok_or_else(|| RegNotionError::UnknownState(n.to_string()))
        };
        match key {
            "alphabet" => {
                let syms: Vec<&str> = names(rest).collect();
                let al = Alphabet::new(syms).map_err(|e| syntax(e.to_string()))?;
                tsa.alphabet = al;
            }
            "states" => {
                for n in names(rest) {
                    if tsa.state(n).is_some() {
                        return Err(RegNotionError::Duplicate { line, name: n.into() });
                    }
                    tsa.add_state(n);
                }
            }
            "final" => {
                for n in names(rest) {
                    let q = state(&tsa, n)?;
                    tsa.set_accepting(q, true);
                }
            }
            "mode" => {
                let (q, m) = parse_mode(rest).ok_or_else(|| syntax("expected `state universal|existential`".into()))?;
                let q = state(&tsa, q)?;
                tsa.set_mode(q, m);
            }
            "trans" => {
                let (from, rest) = rest.trim().split_once('(').ok_or_else(|| syntax("expected `(`".into()))?;
                let (label, to) = rest.split_once(')').ok_or_else(|| syntax("expected `)`".into()))?;
                let (sym, afa) = label.split_once(',').ok_or_else(|| syntax("expected `(symbol, afa)`".into()))?;
                let (sym, afa) = (sym.trim(), afa.trim());
                let top = tsa.alphabet.lookup(sym).ok_or_else(|| RegNotionError::UnknownSymbol {
                    line,
                    name: sym.to_string(),
                })?;
                let b = tsa.afa(afa).ok_or_else(|| RegNotionError::UnknownAfa {
                    line,
                    name: afa.to_string(),
                })?;
                let from = state(&tsa, from.trim())?;
                let to = state(&tsa, to.trim())?;
                tsa.add_transition(from, top, b, to);
            }
            other => return Err(syntax(format!("unknown key `{other}`"))),
        }
    }
    if block.is_some() {
        return Err(RegNotionError::Syntax {
            line: text.lines().count(),
            message: "unterminated afa block".into(),
        });
    }
    Ok(tsa)
}

fn parse_mode(rest: &str) -> Option<(&str, Mode)> {
    let v: Vec<&str> = names(rest).collect();
    match v[..] {
        [s, "universal"] => Some((s, Mode::Universal)),
        [s, "existential"] => Some((s, Mode::Existential)),
        _ => None,
    }
}

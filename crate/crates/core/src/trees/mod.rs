//! Binary-tree encoding of level-2 configurations and bottom-up tree
//! automata over such trees.

mod automaton;
mod enumerate;

pub use automaton::{
    control_state_ta, diagonal_ta, parse_ta, singleton_ta, ta_emptiness, ta_intersect, ta_membership, ta_union,
    validity_ta, Emptiness, TaError, TaRule, TreeAutomaton,
};
pub use enumerate::{for_each_tree, shapes, Shape};

use std::fmt;

use crate::hoca2::L2Config;
use crate::storage::{Alphabet, Cursor, StateId, StorageError, Sym};

/// A node label: a pushdown symbol, or a control state at the root.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Sym(Sym),
    State(StateId),
}

/// A finite binary tree whose children may be absent on either side.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinTree {
    pub label: Label,
    pub left: Option<Box<BinTree>>,
    pub right: Option<Box<BinTree>>,
}

impl BinTree {
    pub fn leaf(label: Label) -> Self {
        BinTree {
            label,
            left: None,
            right: None,
        }
    }

    pub fn node(label: Label, left: Option<BinTree>, right: Option<BinTree>) -> Self {
        BinTree {
            label,
            left: left.map(Box::new),
            right: right.map(Box::new),
        }
    }

    pub fn is_leaf(&self) -> bool {
        self.left.is_none() && self.right.is_none()
    }

    pub fn size(&self) -> usize {
        1 + self.left.as_ref().map_or(0, |t| t.size()) + self.right.as_ref().map_or(0, |t| t.size())
    }

    /// Leaves in inorder, each with its path as a string over `0` (left)
    /// and `1` (right).
    pub fn leaves(&self) -> Vec<(String, Label)> {
        fn go(t: &BinTree, path: &mut String, out: &mut Vec<(String, Label)>) {
            if t.is_leaf() {
                out.push((path.clone(), t.label));
                return;
            }
            if let Some(l) = &t.left {
                path.push('0');
                go(l, path, out);
                path.pop();
            }
            if let Some(r) = &t.right {
                path.push('1');
                go(r, path, out);
                path.pop();
            }
        }
        let mut out = Vec::new();
        go(self, &mut String::new(), &mut out);
        out
    }

    /// The subtree at a `0`/`1` path.
    pub fn at(&self, path: &str) -> Option<&BinTree> {
        let mut t = self;
        for c in path.chars() {
            t = match c {
                '0' => t.left.as_deref()?,
                '1' => t.right.as_deref()?,
                _ => return None,
            };
        }
        Some(t)
    }

    pub fn display<'a>(&'a self, alphabet: &'a Alphabet, states: &'a [String]) -> TreeDisplay<'a> {
        TreeDisplay {
            tree: self,
            alphabet,
            states,
        }
    }
}

pub struct TreeDisplay<'a> {
    tree: &'a BinTree,
    alphabet: &'a Alphabet,
    states: &'a [String],
}

impl fmt::Display for TreeDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(t: &BinTree, d: &TreeDisplay<'_>, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match t.label {
                Label::Sym(s) => f.write_str(d.alphabet.name(s))?,
                Label::State(q) => match d.states.get(q) {
                    Some(n) => f.write_str(n)?,
                    None => write!(f, "q{q}")?,
                },
            }
            if t.is_leaf() {
                return Ok(());
            }
            f.write_str("(")?;
            match &t.left {
                Some(l) => go(l, d, f)?,
                None => f.write_str("-")?,
            }
            f.write_str(",")?;
            match &t.right {
                Some(r) => go(r, d, f)?,
                None => f.write_str("-")?,
            }
            f.write_str(")")
        }
        go(self.tree, self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid encoding at node {}: {reason}", if .position.is_empty() { "ε" } else { .position.as_str() })]
pub struct InvalidEncoding {
    /// Path from the root as a string over `0` and `1`.
    pub position: String,
    pub reason: &'static str,
}

/// `E(p)` for a nonempty pushdown content, `None` for the empty one.
pub fn encode_pushdown(p: &[(Sym, u32)]) -> Option<BinTree> {
    let (&(s1, v1), rest) = p.split_first()?;
    let bot = Label::Sym(Sym::BOTTOM);
    if v1 == 0 {
        return Some(BinTree::node(
            bot,
            Some(BinTree::leaf(Label::Sym(s1))),
            encode_pushdown(rest),
        ));
    }
    let j = p.iter().take_while(|e| e.1 >= 1).count();
    let pl: Vec<(Sym, u32)> = p[..j].iter().map(|&(s, v)| (s, v - 1)).collect();
    Some(BinTree::node(bot, encode_pushdown(&pl), encode_pushdown(&p[j..])))
}

/// `E((q, p)) = q(E(p), ∅)`.
pub fn encode(q: StateId, c: &L2Config) -> BinTree {
    BinTree::node(Label::State(q), encode_pushdown(&c.0), None)
}

fn invalid(position: &str, reason: &'static str) -> InvalidEncoding {
    InvalidEncoding {
        position: position.to_string(),
        reason,
    }
}

fn decode_pushdown(t: &BinTree, path: &mut String) -> Result<Vec<(Sym, u32)>, InvalidEncoding> {
    if t.label != Label::Sym(Sym::BOTTOM) || t.is_leaf() {
        return Err(invalid(path, "expected an inner ⊥ node"));
    }
    let left = t
        .left
        .as_deref()
        .ok_or_else(|| invalid(path, "missing left child"))?;
    let mut out = if left.is_leaf() {
        match left.label {
            Label::Sym(s) => vec![(s, 0)],
            Label::State(_) => {
                path.push('0');
                return Err(invalid(path, "state label below the root"));
            }
        }
    } else {
        path.push('0');
        let inner = decode_pushdown(left, path)?;
        path.pop();
        inner.into_iter().map(|(s, v)| (s, v + 1)).collect()
    };
    let first_positive = out[0].1 >= 1;
    if let Some(r) = t.right.as_deref() {
        path.push('1');
        let rest = decode_pushdown(r, path)?;
        if first_positive && rest[0].1 >= 1 {
            return Err(invalid(path, "positive block is not maximal"));
        }
        path.pop();
        out.extend(rest);
    }
    Ok(out)
}

/// Left inverse of [`encode`].
pub fn decode(t: &BinTree) -> Result<(StateId, L2Config), InvalidEncoding> {
    let q = match t.label {
        Label::State(q) => q,
        Label::Sym(_) => return Err(invalid("", "root must carry a control state")),
    };
    if t.right.is_some() {
        return Err(invalid("", "root has a right child"));
    }
    let inner = t
        .left
        .as_deref()
        .ok_or_else(|| invalid("", "root has no left child"))?;
    let mut path = String::from("0");
    let p = decode_pushdown(inner, &mut path)?;
    Ok((q, L2Config(p)))
}

/// Parses `q(T,-)`, `⊥(T1,T2)`, leaves `a` and absent `-`. The root label
/// is read as a state, all other labels as symbols.
pub fn parse_tree(alphabet: &Alphabet, states: &[String], text: &str) -> Result<BinTree, StorageError> {
    let mut cur = Cursor::new(text);
    cur.skip_ws();
    let t = tree_term(&mut cur, alphabet, states, true)?
        .ok_or_else(|| cur.error("expected a tree, found `-`"))?;
    cur.skip_ws();
    cur.expect_end()?;
    Ok(t)
}

fn tree_term(
    cur: &mut Cursor<'_>,
    alphabet: &Alphabet,
    states: &[String],
    root: bool,
) -> Result<Option<BinTree>, StorageError> {
    cur.skip_ws();
    if cur.eat('-') {
        return Ok(None);
    }
    let name = cur.ident()?;
    let label = if root {
        let q = states
            .iter()
            .position(|s| *s == name)
            .ok_or_else(|| StorageError::UnknownState(name.to_string()))?;
        Label::State(q)
    } else {
        Label::Sym(
            alphabet
                .lookup(name)
                .ok_or_else(|| StorageError::UnknownSymbol(name.to_string()))?,
        )
    };
    cur.skip_ws();
    if !cur.eat('(') {
        return Ok(Some(BinTree::leaf(label)));
    }
    let l = tree_term(cur, alphabet, states, false)?;
    cur.skip_ws();
    cur.expect(',')?;
    let r = tree_term(cur, alphabet, states, false)?;
    cur.skip_ws();
    cur.expect(')')?;
    Ok(Some(BinTree::node(label, l, r)))
}

/// All configurations with `1..=max_height` entries over the given symbols
/// and counters `0..=max_counter`, bottom first.
pub fn enumerate_configs(symbols: &[Sym], max_height: usize, max_counter: u32) -> Vec<L2Config> {
    let mut out = Vec::new();
    let mut layer: Vec<Vec<(Sym, u32)>> = vec![Vec::new()];
    for _ in 0..max_height {
        let mut next = Vec::new();
        for p in &layer {
            for &s in symbols {
                for v in 0..=max_counter {
                    let mut q = p.clone();
                    q.push((s, v));
                    next.push(q);
                }
            }
        }
        out.extend(next.iter().cloned().map(L2Config));
        layer = next;
    }
    out
}

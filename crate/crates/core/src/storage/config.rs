//! Storage configurations and the exact step semantics of tests and
//! operations.

use std::fmt;

use super::error::StorageError;
use super::expr::{OpId, StorageExpr, Sym, TestId};

/// A value of some storage type.
///
/// Counters store `n` for the unary stack `⊥^{n+1}`, so the initial counter
/// is 0. Pushdown values are nonempty sequences of (symbol, inner value)
/// pairs, bottom first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StorageConfig {
    Counter(u32),
    Stack(Vec<(Sym, StorageConfig)>),
}

impl StorageConfig {
    /// The initial configuration `c0` of a storage type.
    pub fn initial(st: &StorageExpr) -> Self {
        match st.inner() {
            None => StorageConfig::Counter(0),
            Some(inner) => StorageConfig::Stack(vec![(Sym::BOTTOM, StorageConfig::initial(inner))]),
        }
    }

    pub fn is_well_typed(&self, st: &StorageExpr) -> bool {
        match (st, self) {
            (StorageExpr::Counter | StorageExpr::ZCounter, StorageConfig::Counter(_)) => true,
            (
                StorageExpr::Pushdown { alphabet, inner }
                | StorageExpr::PushdownInv { alphabet, inner },
                StorageConfig::Stack(entries),
            ) => {
                !entries.is_empty()
                    && entries
                        .iter()
                        .all(|(s, c)| s.index() < alphabet.len() && c.is_well_typed(inner))
            }
            _ => false,
        }
    }

    pub fn check(&self, st: &StorageExpr) -> Result<(), StorageError> {
        if self.is_well_typed(st) {
            Ok(())
        } else {
            Err(StorageError::IllTypedConfig)
        }
    }

    pub fn entries(&self) -> Option<&[(Sym, StorageConfig)]> {
        match self {
            StorageConfig::Stack(e) => Some(e),
            StorageConfig::Counter(_) => None,
        }
    }

    pub fn top(&self) -> Option<&(Sym, StorageConfig)> {
        self.entries().and_then(|e| e.last())
    }

    /// Total number of nodes, used for exhaustive small-size enumeration.
    pub fn size(&self) -> usize {
        match self {
            StorageConfig::Counter(n) => 1 + *n as usize,
            StorageConfig::Stack(e) => e.iter().map(|(_, c)| 1 + c.size()).sum(),
        }
    }

    /// Renders the value, e.g. `(_,0)(1,5)` for a `P(C)` configuration.
    pub fn display(&self, st: &StorageExpr) -> String {
        match (self, st.operator_parts()) {
            (StorageConfig::Counter(n), _) => n.to_string(),
            (StorageConfig::Stack(entries), Some((alphabet, inner))) => {
                let mut out = String::new();
                for (s, c) in entries {
                    let name = if s.index() < alphabet.len() {
                        alphabet.name(*s).to_string()
                    } else {
                        format!("#{}", s.0)
                    };
                    out.push('(');
                    out.push_str(&name);
                    out.push(',');
                    let nested = c.display(inner);
                    if matches!(c, StorageConfig::Stack(_)) {
                        out.push('[');
                        out.push_str(&nested);
                        out.push(']');
                    } else {
                        out.push_str(&nested);
                    }
                    out.push(')');
                }
                out
            }
            (StorageConfig::Stack(_), None) => "<ill-typed>".into(),
        }
    }
}

impl fmt::Display for StorageConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StorageConfig::Counter(n) => write!(f, "{n}"),
            StorageConfig::Stack(entries) => {
                for (s, c) in entries {
                    write!(f, "({}, {})", s.0, c)?;
                }
                Ok(())
            }
        }
    }
}

/// Applies `f` to `c`. `None` means the partial operation is undefined
/// (the transition is inapplicable), not that something went wrong.
pub fn apply_op(st: &StorageExpr, f: &OpId, c: &StorageConfig) -> Option<StorageConfig> {
    match (f, c) {
        (OpId::Id, _) => Some(c.clone()),
        (OpId::PushSym(_), StorageConfig::Counter(n)) => n.checked_add(1).map(StorageConfig::Counter),
        (OpId::Pop, StorageConfig::Counter(n)) => n.checked_sub(1).map(StorageConfig::Counter),
        (OpId::Pop, StorageConfig::Stack(entries)) => {
            if entries.len() > 1 {
                Some(StorageConfig::Stack(entries[..entries.len() - 1].to_vec()))
            } else {
                None
            }
        }
        (OpId::PushPair(s), StorageConfig::Stack(entries)) => {
            let (_, top) = entries.last()?;
            let mut next = entries.clone();
            next.push((*s, top.clone()));
            Some(StorageConfig::Stack(next))
        }
        (OpId::PushWith(s, g), StorageConfig::Stack(entries)) => {
            let inner = st.inner()?;
            let (_, top) = entries.last()?;
            let pushed = apply_op(inner, g, top)?;
            let mut next = entries.clone();
            next.push((*s, pushed));
            Some(StorageConfig::Stack(next))
        }
        (OpId::Stay(g), StorageConfig::Stack(entries)) => {
            let inner = st.inner()?;
            let (sym, top) = entries.last()?;
            let changed = apply_op(inner, g, top)?;
            let mut next = entries.clone();
            *next.last_mut().expect("nonempty") = (*sym, changed);
            Some(StorageConfig::Stack(next))
        }
        (OpId::InvPush(s), StorageConfig::Stack(entries)) => {
            let m = entries.len();
            if m >= 2 && entries[m - 1].0 == *s && entries[m - 1].1 == entries[m - 2].1 {
                Some(StorageConfig::Stack(entries[..m - 1].to_vec()))
            } else {
                None
            }
        }
        _ => None,
    }
}

/// Evaluates a test. Tests are total.
pub fn eval_test(st: &StorageExpr, t: &TestId, c: &StorageConfig) -> bool {
    match (t, c) {
        (TestId::Top(s), StorageConfig::Counter(_)) => s.is_bottom(),
        (TestId::Empty, StorageConfig::Counter(n)) => *n == 0,
        (TestId::Top(s), StorageConfig::Stack(entries)) => {
            entries.last().map(|(top, _)| top == s).unwrap_or(false)
        }
        (TestId::Inner(t), StorageConfig::Stack(entries)) => match (st.inner(), entries.last()) {
            (Some(inner), Some((_, top))) => eval_test(inner, t, top),
            _ => false,
        },
        _ => false,
    }
}

/// Outcome of every test of the storage type on `c`, as a bit vector in the
/// order of [`StorageExpr::tests`].
pub fn test_bits(st: &StorageExpr, c: &StorageConfig) -> u64 {
    match (st, c) {
        (StorageExpr::Counter, _) => 1,
        (StorageExpr::ZCounter, StorageConfig::Counter(n)) => 1 | if *n == 0 { 2 } else { 0 },
        (
            StorageExpr::Pushdown { alphabet, inner } | StorageExpr::PushdownInv { alphabet, inner },
            StorageConfig::Stack(entries),
        ) => match entries.last() {
            Some((s, top)) => (1u64 << s.index()) | (test_bits(inner, top) << alphabet.len()),
            None => 0,
        },
        _ => 0,
    }
}

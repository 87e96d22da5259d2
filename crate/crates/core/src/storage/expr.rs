//! Storage-type expressions and the typed test/operation identifiers.
//!
//! A storage expression is a tree of constructors: the plain counter `C`,
//! the counter with zero test `Z`, and the pushdown operator `P{..}(E)` or
//! its inverse-push variant `Pinv{..}(E)` over some inner expression.

use std::fmt;

use super::error::StorageError;

/// Index of a symbol inside an [`Alphabet`]. Index 0 is always ⊥.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sym(pub u16);

impl Sym {
    pub const BOTTOM: Sym = Sym(0);

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn is_bottom(self) -> bool {
        self.0 == 0
    }
}

/// Printed name of the distinguished bottom symbol.
pub const BOTTOM_NAME: &str = "_";

/// A finite pushdown alphabet. The first symbol is always ⊥ (written `_`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Alphabet {
    names: Vec<String>,
}

impl Alphabet {
    /// Builds an alphabet from symbol names. `_` must occur; it is moved to
    /// the front so that it becomes [`Sym::BOTTOM`].
    pub fn new<I, S>(names: I) -> Result<Self, StorageError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut out = vec![BOTTOM_NAME.to_string()];
        let mut saw_bottom = false;
        for name in names {
            let name = name.into();
            if name == BOTTOM_NAME {
                if saw_bottom {
                    return Err(StorageError::DuplicateSymbol(name));
                }
                saw_bottom = true;
                continue;
            }
            if !is_symbol_token(&name) {
                return Err(StorageError::UnknownSymbol(name));
            }
            if out.contains(&name) {
                return Err(StorageError::DuplicateSymbol(name));
            }
            out.push(name);
        }
        if !saw_bottom {
            return Err(StorageError::MissingBottom);
        }
        if out.len() > u16::MAX as usize {
            return Err(StorageError::AlphabetTooLarge(out.len()));
        }
        Ok(Alphabet { names: out })
    }

    /// The one-letter alphabet `{⊥}`.
    pub fn bottom_only() -> Self {
        Alphabet {
            names: vec![BOTTOM_NAME.to_string()],
        }
    }

    /// The standard alphabet `{⊥, 0, 1}`.
    pub fn binary() -> Self {
        Alphabet {
            names: vec![BOTTOM_NAME.to_string(), "0".into(), "1".into()],
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn name(&self, s: Sym) -> &str {
        &self.names[s.index()]
    }

    pub fn lookup(&self, name: &str) -> Option<Sym> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| Sym(i as u16))
    }

    pub fn symbols(&self) -> impl Iterator<Item = Sym> + '_ {
        (0..self.names.len()).map(|i| Sym(i as u16))
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }
}

/// Characters allowed in symbol and state names.
pub fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '.' | '\'' | '^' | '~')
}

pub fn is_symbol_token(s: &str) -> bool {
    !s.is_empty() && s.chars().all(is_name_char)
}

/// A storage type built from the counter types and the pushdown operators.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum StorageExpr {
    /// Counter without zero test (`C`, the pushdown over `{⊥}`).
    Counter,
    /// Counter with zero test (`Z`).
    ZCounter,
    /// `P_Σ(inner)`.
    Pushdown {
        alphabet: Alphabet,
        inner: Box<StorageExpr>,
    },
    /// `P_Σ(inner)` with inverse push instead of pop.
    PushdownInv {
        alphabet: Alphabet,
        inner: Box<StorageExpr>,
    },
}

impl StorageExpr {
    pub fn pushdown(alphabet: Alphabet, inner: StorageExpr) -> Self {
        StorageExpr::Pushdown {
            alphabet,
            inner: Box::new(inner),
        }
    }

    pub fn pushdown_inv(alphabet: Alphabet, inner: StorageExpr) -> Self {
        StorageExpr::PushdownInv {
            alphabet,
            inner: Box::new(inner),
        }
    }

    pub fn is_counter(&self) -> bool {
        matches!(self, StorageExpr::Counter | StorageExpr::ZCounter)
    }

    /// Alphabet and inner expression of an operator type.
    pub fn operator_parts(&self) -> Option<(&Alphabet, &StorageExpr)> {
        match self {
            StorageExpr::Pushdown { alphabet, inner }
            | StorageExpr::PushdownInv { alphabet, inner } => Some((alphabet, inner)),
            _ => None,
        }
    }

    pub fn alphabet(&self) -> Option<&Alphabet> {
        self.operator_parts().map(|(a, _)| a)
    }

    pub fn inner(&self) -> Option<&StorageExpr> {
        self.operator_parts().map(|(_, i)| i)
    }

    /// Number of nested pushdown operators above the base counter.
    pub fn depth(&self) -> usize {
        match self.inner() {
            Some(inner) => 1 + inner.depth(),
            None => 0,
        }
    }

    /// The test set of the storage type, in canonical order. Test vectors
    /// are indexed by positions in this list.
    pub fn tests(&self) -> Vec<TestId> {
        match self {
            StorageExpr::Counter => vec![TestId::Top(Sym::BOTTOM)],
            StorageExpr::ZCounter => vec![TestId::Top(Sym::BOTTOM), TestId::Empty],
            StorageExpr::Pushdown { alphabet, inner }
            | StorageExpr::PushdownInv { alphabet, inner } => {
                let mut v: Vec<TestId> = alphabet.symbols().map(TestId::Top).collect();
                v.extend(inner.tests().into_iter().map(|t| TestId::Inner(Box::new(t))));
                v
            }
        }
    }

    pub fn test_count(&self) -> usize {
        match self {
            StorageExpr::Counter => 1,
            StorageExpr::ZCounter => 2,
            StorageExpr::Pushdown { alphabet, inner }
            | StorageExpr::PushdownInv { alphabet, inner } => alphabet.len() + inner.test_count(),
        }
    }

    /// Position of a test in [`StorageExpr::tests`].
    pub fn test_index(&self, t: &TestId) -> Option<usize> {
        match (self, t) {
            (StorageExpr::Counter | StorageExpr::ZCounter, TestId::Top(s)) if s.is_bottom() => {
                Some(0)
            }
            (StorageExpr::ZCounter, TestId::Empty) => Some(1),
            (
                StorageExpr::Pushdown { alphabet, .. } | StorageExpr::PushdownInv { alphabet, .. },
                TestId::Top(s),
            ) if s.index() < alphabet.len() => Some(s.index()),
            (
                StorageExpr::Pushdown { alphabet, inner }
                | StorageExpr::PushdownInv { alphabet, inner },
                TestId::Inner(t),
            ) => inner.test_index(t).map(|i| alphabet.len() + i),
            _ => None,
        }
    }

    pub fn check_test(&self, t: &TestId) -> Result<(), StorageError> {
        self.test_index(t)
            .map(|_| ())
            .ok_or_else(|| StorageError::IllTypedTest(t.display(self)))
    }

    /// Checks that an operation is one of the operations of this storage type.
    pub fn check_op(&self, f: &OpId) -> Result<(), StorageError> {
        let ok = match (self, f) {
            (_, OpId::Id) => true,
            (StorageExpr::Counter | StorageExpr::ZCounter, OpId::PushSym(s)) => s.is_bottom(),
            (StorageExpr::Counter | StorageExpr::ZCounter, OpId::Pop) => true,
            (StorageExpr::Pushdown { .. }, OpId::Pop) => true,
            (StorageExpr::PushdownInv { alphabet, .. }, OpId::InvPush(s)) => {
                s.index() < alphabet.len()
            }
            (
                StorageExpr::Pushdown { alphabet, .. } | StorageExpr::PushdownInv { alphabet, .. },
                OpId::PushPair(s),
            ) => s.index() < alphabet.len(),
            (
                StorageExpr::Pushdown { alphabet, inner }
                | StorageExpr::PushdownInv { alphabet, inner },
                OpId::PushWith(s, g),
            ) => s.index() < alphabet.len() && inner.check_op(g).is_ok(),
            (
                StorageExpr::Pushdown { inner, .. } | StorageExpr::PushdownInv { inner, .. },
                OpId::Stay(g),
            ) => inner.check_op(g).is_ok(),
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(StorageError::IllTypedOp(f.display(self)))
        }
    }

    /// Every operation of the storage type (the finite set F).
    pub fn ops(&self) -> Vec<OpId> {
        match self {
            StorageExpr::Counter | StorageExpr::ZCounter => {
                vec![OpId::PushSym(Sym::BOTTOM), OpId::Pop, OpId::Id]
            }
            StorageExpr::Pushdown { alphabet, inner }
            | StorageExpr::PushdownInv { alphabet, inner } => {
                let inner_ops = inner.ops();
                let mut v = Vec::new();
                for s in alphabet.symbols() {
                    for g in &inner_ops {
                        if *g == OpId::Id {
                            v.push(OpId::PushPair(s));
                        } else {
                            v.push(OpId::PushWith(s, Box::new(g.clone())));
                        }
                    }
                }
                for g in inner_ops {
                    if g != OpId::Id {
                        v.push(OpId::Stay(Box::new(g)));
                    }
                }
                if matches!(self, StorageExpr::Pushdown { .. }) {
                    v.push(OpId::Pop);
                } else {
                    v.extend(alphabet.symbols().map(OpId::InvPush));
                }
                v.push(OpId::Id);
                v
            }
        }
    }
}

impl fmt::Display for StorageExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StorageExpr::Counter => write!(f, "C"),
            StorageExpr::ZCounter => write!(f, "Z"),
            StorageExpr::Pushdown { alphabet, inner } => {
                write!(f, "P{{{}}}({})", alphabet.names.join(","), inner)
            }
            StorageExpr::PushdownInv { alphabet, inner } => {
                write!(f, "Pinv{{{}}}({})", alphabet.names.join(","), inner)
            }
        }
    }
}

/// A storage test. `Top(σ)` on a counter is the constant `Top(⊥)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TestId {
    Top(Sym),
    Empty,
    Inner(Box<TestId>),
}

impl TestId {
    /// Renders the test in file syntax against the given storage type
    /// (without polarity, e.g. `top=1` or `inner(empty)`).
    pub fn display(&self, st: &StorageExpr) -> String {
        match self {
            TestId::Top(s) => {
                let name = st
                    .alphabet()
                    .filter(|a| s.index() < a.len())
                    .map(|a| a.name(*s).to_string())
                    .unwrap_or_else(|| {
                        if s.is_bottom() {
                            BOTTOM_NAME.to_string()
                        } else {
                            format!("#{}", s.0)
                        }
                    });
                format!("top={name}")
            }
            TestId::Empty => "empty".to_string(),
            TestId::Inner(t) => match st.inner() {
                Some(inner) => format!("inner({})", t.display(inner)),
                None => format!("inner({})", t.display(&StorageExpr::Counter)),
            },
        }
    }
}

/// A storage operation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OpId {
    /// Level-1 push of a symbol on a counter (only ⊥ exists there).
    PushSym(Sym),
    Pop,
    Id,
    /// `push_{γ,id}`: push γ paired with a copy of the topmost inner value.
    PushPair(Sym),
    /// `push_{γ,f}`: push γ paired with `f` applied to the topmost inner value.
    PushWith(Sym, Box<OpId>),
    /// Inverse push: removes the top entry iff it carries γ and its inner
    /// value equals the inner value below it.
    InvPush(Sym),
    /// `stay_f`: apply `f` to the topmost inner value.
    Stay(Box<OpId>),
}

impl OpId {
    pub fn stay(f: OpId) -> Self {
        OpId::Stay(Box::new(f))
    }

    /// Level-1 increment seen from one pushdown level up: `stay(pushsym(_))`.
    pub fn inc() -> Self {
        OpId::stay(OpId::PushSym(Sym::BOTTOM))
    }

    /// `stay(pop)`.
    pub fn dec() -> Self {
        OpId::stay(OpId::Pop)
    }

    /// Renders the operation in file syntax against the given storage type.
    pub fn display(&self, st: &StorageExpr) -> String {
        let sym = |s: &Sym| -> String {
            st.alphabet()
                .filter(|a| s.index() < a.len())
                .map(|a| a.name(*s).to_string())
                .unwrap_or_else(|| {
                    if s.is_bottom() {
                        BOTTOM_NAME.to_string()
                    } else {
                        format!("#{}", s.0)
                    }
                })
        };
        let inner = st.inner().cloned().unwrap_or(StorageExpr::Counter);
        match self {
            OpId::PushSym(s) => format!("pushsym({})", sym(s)),
            OpId::Pop => "pop".into(),
            OpId::Id => "id".into(),
            OpId::PushPair(s) => format!("push({})", sym(s)),
            OpId::PushWith(s, g) => format!("push({},{})", sym(s), g.display(&inner)),
            OpId::InvPush(s) => format!("invpush({})", sym(s)),
            OpId::Stay(g) => format!("stay({})", g.display(&inner)),
        }
    }
}

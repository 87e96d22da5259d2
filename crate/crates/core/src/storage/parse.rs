//! Text formats: storage expressions, operations, tests, configurations and
//! the line-oriented automaton file.

use std::fmt::Write as _;

use super::automaton::{display_tests, Mode, StorageAutomaton};
use super::config::StorageConfig;
use super::error::StorageError;
use super::expr::{is_name_char, Alphabet, OpId, StorageExpr, Sym, TestId};

/// A character cursor over one line of input that reports 1-based positions.
#[derive(Clone, Debug)]
pub struct Cursor<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
    col0: usize,
}

impl<'a> Cursor<'a> {
    pub fn new(src: &'a str) -> Self {
        Cursor::at(src, 1, 0)
    }

    /// A cursor whose reported positions are offset to `line` and `col0`.
    pub fn at(src: &'a str, line: usize, col0: usize) -> Self {
        Cursor {
            src,
            pos: 0,
            line,
            col0,
        }
    }

    pub fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    pub fn column(&self) -> usize {
        self.col0 + self.src[..self.pos].chars().count() + 1
    }

    pub fn error(&self, msg: impl Into<String>) -> StorageError {
        StorageError::syntax(self.line, self.column(), msg)
    }

    pub fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    pub fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.rest().chars().next()
    }

    pub fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    pub fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    pub fn eat_str(&mut self, s: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, c: char) -> Result<(), StorageError> {
        if self.eat(c) {
            Ok(())
        } else {
            let found = self
                .peek()
                .map(|f| format!("`{f}`"))
                .unwrap_or_else(|| "end of input".into());
            Err(self.error(format!("expected `{c}`, found {found}")))
        }
    }

    pub fn expect_end(&mut self) -> Result<(), StorageError> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.error(format!("unexpected trailing input `{}`", self.rest().trim())))
        }
    }

    /// A maximal run of name characters.
    pub fn ident(&mut self) -> Result<&'a str, StorageError> {
        self.skip_ws();
        let rest = self.rest();
        let len: usize = rest
            .chars()
            .take_while(|c| is_name_char(*c))
            .map(char::len_utf8)
            .sum();
        if len == 0 {
            return Err(self.error("expected a name"));
        }
        self.pos += len;
        Ok(&rest[..len])
    }

    pub fn number(&mut self) -> Result<u32, StorageError> {
        self.skip_ws();
        let rest = self.rest();
        let len = rest.chars().take_while(|c| c.is_ascii_digit()).count();
        if len == 0 {
            return Err(self.error("expected a number"));
        }
        let n = rest[..len]
            .parse::<u32>()
            .map_err(|_| self.error("number out of range"))?;
        self.pos += len;
        Ok(n)
    }
}

pub fn parse_storage_expr(text: &str) -> Result<StorageExpr, StorageError> {
    let mut cur = Cursor::new(text);
    let e = storage_expr(&mut cur)?;
    cur.expect_end()?;
    Ok(e)
}

pub fn storage_expr(cur: &mut Cursor<'_>) -> Result<StorageExpr, StorageError> {
    let head = cur.ident()?;
    match head {
        "C" => Ok(StorageExpr::Counter),
        "Z" => Ok(StorageExpr::ZCounter),
        "P" | "Pinv" => {
            cur.expect('{')?;
            let mut names = Vec::new();
            loop {
                names.push(cur.ident()?.to_string());
                if cur.eat('}') {
                    break;
                }
                cur.expect(',')?;
            }
            let alphabet = Alphabet::new(names)?;
            cur.expect('(')?;
            let inner = storage_expr(cur)?;
            cur.expect(')')?;
            Ok(if head == "P" {
                StorageExpr::pushdown(alphabet, inner)
            } else {
                StorageExpr::pushdown_inv(alphabet, inner)
            })
        }
        other => Err(cur.error(format!("unknown storage constructor `{other}`"))),
    }
}

fn symbol(cur: &mut Cursor<'_>, st: &StorageExpr) -> Result<Sym, StorageError> {
    let name = cur.ident()?;
    match st.alphabet() {
        Some(a) => a
            .lookup(name)
            .ok_or_else(|| StorageError::UnknownSymbol(name.to_string())),
        None if name == super::expr::BOTTOM_NAME => Ok(Sym::BOTTOM),
        None => Err(StorageError::UnknownSymbol(name.to_string())),
    }
}

pub fn parse_op(st: &StorageExpr, text: &str) -> Result<OpId, StorageError> {
    let mut cur = Cursor::new(text);
    let f = op(&mut cur, st)?;
    cur.expect_end()?;
    Ok(f)
}

/// Parses an operation term and checks it against `st`.
pub fn op(cur: &mut Cursor<'_>, st: &StorageExpr) -> Result<OpId, StorageError> {
    let start = cur.clone();
    let f = op_untyped(cur, st)?;
    st.check_op(&f).map_err(|e| match e {
        StorageError::IllTypedOp(s) => start.error(format!("operation `{s}` is not valid for {st}")),
        other => other,
    })?;
    Ok(f)
}

pub fn op_untyped(cur: &mut Cursor<'_>, st: &StorageExpr) -> Result<OpId, StorageError> {
    let name = cur.ident()?;
    let inner = || st.inner().cloned().unwrap_or(StorageExpr::Counter);
    let f = match name {
        "pop" => OpId::Pop,
        "id" => OpId::Id,
        "push" => {
            cur.expect('(')?;
            let s = symbol(cur, st)?;
            let f = if cur.eat(',') {
                let g = op_untyped(cur, &inner())?;
                if g == OpId::Id {
                    OpId::PushPair(s)
                } else {
                    OpId::PushWith(s, Box::new(g))
                }
            } else {
                OpId::PushPair(s)
            };
            cur.expect(')')?;
            f
        }
        "pushsym" => {
            cur.expect('(')?;
            let s = symbol(cur, st)?;
            cur.expect(')')?;
            OpId::PushSym(s)
        }
        "invpush" => {
            cur.expect('(')?;
            let s = symbol(cur, st)?;
            cur.expect(')')?;
            OpId::InvPush(s)
        }
        "stay" => {
            cur.expect('(')?;
            let g = op_untyped(cur, &inner())?;
            cur.expect(')')?;
            OpId::Stay(Box::new(g))
        }
        other => return Err(cur.error(format!("unknown operation `{other}`"))),
    };
    Ok(f)
}

/// Parses a test literal such as `top=1`, `top!=0`, `empty=false` or
/// `inner(empty=true)`.
pub fn test_literal(cur: &mut Cursor<'_>, st: &StorageExpr) -> Result<(TestId, bool), StorageError> {
    let name = cur.ident()?;
    match name {
        "top" => {
            let positive = if cur.eat_str("!=") {
                false
            } else {
                cur.expect('=')?;
                true
            };
            let s = symbol(cur, st)?;
            Ok((TestId::Top(s), positive))
        }
        "empty" => {
            if !matches!(st, StorageExpr::ZCounter) {
                return Err(cur.error(format!("`empty` is not a test of {st}")));
            }
            let value = if cur.eat('=') {
                match cur.ident()? {
                    "true" => true,
                    "false" => false,
                    other => return Err(cur.error(format!("expected true or false, found `{other}`"))),
                }
            } else {
                true
            };
            Ok((TestId::Empty, value))
        }
        "inner" => {
            let inner = st
                .inner()
                .ok_or_else(|| cur.error(format!("`inner` is not a test of {st}")))?;
            cur.expect('(')?;
            let (t, b) = test_literal(cur, inner)?;
            cur.expect(')')?;
            Ok((TestId::Inner(Box::new(t)), b))
        }
        other => Err(cur.error(format!("unknown test `{other}`"))),
    }
}

pub fn parse_tests(st: &StorageExpr, text: &str) -> Result<Vec<(TestId, bool)>, StorageError> {
    let mut cur = Cursor::new(text);
    let mut out = Vec::new();
    while !cur.at_end() {
        out.push(test_literal(&mut cur, st)?);
        cur.eat(',');
    }
    Ok(out)
}

pub fn parse_config(st: &StorageExpr, text: &str) -> Result<StorageConfig, StorageError> {
    let mut cur = Cursor::new(text);
    let c = config(&mut cur, st)?;
    cur.expect_end()?;
    Ok(c)
}

/// Parses a configuration of `st`: a number for counters, a sequence of
/// `(σ,inner)` pairs for pushdowns, with nested pushdowns in brackets.
pub fn config(cur: &mut Cursor<'_>, st: &StorageExpr) -> Result<StorageConfig, StorageError> {
    match st.operator_parts() {
        None => Ok(StorageConfig::Counter(cur.number()?)),
        Some((_, inner)) => {
            let mut entries = Vec::new();
            while cur.peek() == Some('(') {
                cur.expect('(')?;
                let s = symbol(cur, st)?;
                cur.expect(',')?;
                let c = if inner.is_counter() {
                    config(cur, inner)?
                } else {
                    cur.expect('[')?;
                    let c = config(cur, inner)?;
                    cur.expect(']')?;
                    c
                };
                cur.expect(')')?;
                entries.push((s, c));
            }
            if entries.is_empty() {
                return Err(cur.error("expected at least one `(symbol,value)` entry"));
            }
            Ok(StorageConfig::Stack(entries))
        }
    }
}

/// Parses `(q,CONFIG)` and returns the state name with the configuration.
pub fn parse_state_config(st: &StorageExpr, text: &str) -> Result<(String, StorageConfig), StorageError> {
    let mut cur = Cursor::new(text);
    cur.expect('(')?;
    let q = cur.ident()?.to_string();
    cur.expect(',')?;
    let c = config(&mut cur, st)?;
    cur.expect(')')?;
    cur.expect_end()?;
    Ok((q, c))
}

/// One `trans:` line before test expansion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawTransition {
    pub line: usize,
    /// Column where the operation starts.
    pub op_column: usize,
    pub from: String,
    pub tests: Vec<(TestId, bool)>,
    pub op: OpId,
    pub to: String,
}

/// The declarations of an automaton file, before states are resolved.
#[derive(Clone, Debug)]
pub struct AutomatonFile {
    pub storage: StorageExpr,
    pub states: Vec<String>,
    pub initial: String,
    pub final_state: Option<String>,
    pub universal: Vec<String>,
    pub transitions: Vec<RawTransition>,
}

/// Removes a `#` comment.
pub fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

/// Splits `key: rest` and returns the key, the rest and the column of the rest.
pub fn split_key(line: &str) -> Option<(&str, &str, usize)> {
    let i = line.find(':')?;
    let key = line[..i].trim();
    if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '-') {
        return None;
    }
    Some((key, &line[i + 1..], line[..i + 1].chars().count()))
}

pub fn parse_automaton_file(text: &str) -> Result<AutomatonFile, StorageError> {
    let mut storage: Option<StorageExpr> = None;
    let mut states = Vec::new();
    let mut initial = None;
    let mut final_state = None;
    let mut universal = Vec::new();
    let mut transitions = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line_no = ln + 1;
        let line = strip_comment(raw);
        if line.trim().is_empty() {
            continue;
        }
        let (key, rest, col) = split_key(line)
            .ok_or_else(|| StorageError::syntax(line_no, 1, "expected `key: value`"))?;
        let mut cur = Cursor::at(rest, line_no, col);
        match key {
            "storage" => {
                let e = storage_expr(&mut cur)?;
                cur.expect_end()?;
                if e.test_count() > 64 {
                    return Err(StorageError::TooManyTests(e.test_count()));
                }
                storage = Some(e);
            }
            "states" => {
                while !cur.at_end() {
                    let name = cur.ident()?.to_string();
                    if states.contains(&name) {
                        return Err(StorageError::DuplicateState(name));
                    }
                    states.push(name);
                    cur.eat(',');
                }
            }
            "initial" => {
                initial = Some(cur.ident()?.to_string());
                cur.expect_end()?;
            }
            "final" => {
                final_state = Some(cur.ident()?.to_string());
                cur.expect_end()?;
            }
            "mode" => {
                let q = cur.ident()?.to_string();
                match cur.ident()? {
                    "universal" => universal.push(q),
                    "existential" => universal.retain(|u| *u != q),
                    other => return Err(cur.error(format!("unknown mode `{other}`"))),
                }
                cur.expect_end()?;
            }
            "trans" => {
                let st = storage
                    .as_ref()
                    .ok_or_else(|| cur.error("`storage:` must precede transitions"))?;
                transitions.push(transition_line(&mut cur, st, line_no)?);
            }
            other => {
                return Err(StorageError::syntax(line_no, 1, format!("unknown key `{other}`")));
            }
        }
    }
    Ok(AutomatonFile {
        storage: storage.ok_or(StorageError::MissingDeclaration("storage"))?,
        states,
        initial: initial.ok_or(StorageError::MissingDeclaration("initial"))?,
        final_state,
        universal,
        transitions,
    })
}

fn transition_line(cur: &mut Cursor<'_>, st: &StorageExpr, line: usize) -> Result<RawTransition, StorageError> {
    let from = cur.ident()?.to_string();
    let mut tests = Vec::new();
    if cur.eat('[') {
        while !cur.eat(']') {
            if cur.at_end() {
                return Err(cur.error("unterminated test list"));
            }
            tests.push(test_literal(cur, st)?);
            cur.eat(',');
        }
    }
    cur.skip_ws();
    let op_column = cur.column();
    let f = op_untyped(cur, st)?;
    let to = cur.ident()?.to_string();
    cur.expect_end()?;
    Ok(RawTransition {
        line,
        op_column,
        from,
        tests,
        op: f,
        to,
    })
}

impl AutomatonFile {
    /// Resolves names and expands don't-care tests into total vectors.
    pub fn build(&self) -> Result<StorageAutomaton, StorageError> {
        let mut a = StorageAutomaton::new(self.storage.clone(), &self.initial)?;
        for s in &self.states {
            a.ensure_state(s);
        }
        if !self.states.is_empty() && !self.states.contains(&self.initial) {
            return Err(StorageError::UnknownState(self.initial.clone()));
        }
        let lookup = |a: &StorageAutomaton, name: &str| {
            a.state(name)
                .ok_or_else(|| StorageError::UnknownState(name.to_string()))
        };
        if let Some(f) = &self.final_state {
            let q = lookup(&a, f)?;
            a.set_final(q);
        }
        for u in &self.universal {
            let q = lookup(&a, u)?;
            a.set_mode(q, Mode::Universal);
        }
        for t in &self.transitions {
            self.storage.check_op(&t.op).map_err(|_| {
                StorageError::syntax(
                    t.line,
                    t.op_column,
                    format!("operation `{}` is not valid for {}", t.op.display(&self.storage), self.storage),
                )
            })?;
            let from = lookup(&a, &t.from)?;
            let to = lookup(&a, &t.to)?;
            a.add_transition_partial(from, &t.tests, to, t.op.clone())?;
        }
        Ok(a)
    }
}

pub fn parse_automaton(text: &str) -> Result<StorageAutomaton, StorageError> {
    parse_automaton_file(text)?.build()
}

/// Prints an automaton in the file format. Every transition is written with
/// its full test vector, so parsing the output gives back the same automaton.
pub fn print_automaton(a: &StorageAutomaton) -> String {
    let st = a.storage();
    let mut out = String::new();
    let _ = writeln!(out, "storage: {st}");
    let _ = writeln!(out, "states: {}", a.state_names().join(" "));
    let _ = writeln!(out, "initial: {}", a.state_name(a.initial()));
    let _ = writeln!(out, "final: {}", a.state_name(a.final_state()));
    for q in 0..a.num_states() {
        if a.mode(q) == Mode::Universal {
            let _ = writeln!(out, "mode: {} universal", a.state_name(q));
        }
    }
    for t in a.transitions() {
        let _ = writeln!(
            out,
            "trans: {} [{}] {} {}",
            a.state_name(t.from),
            display_tests(st, t.tests),
            t.op.display(st),
            a.state_name(t.to)
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn storage_grammar() {
        assert_eq!(parse_storage_expr("Z").unwrap(), StorageExpr::ZCounter);
        let e = parse_storage_expr("P{_,0,1}(C)").unwrap();
        assert_eq!(
            e,
            StorageExpr::pushdown(Alphabet::binary(), StorageExpr::Counter)
        );
        assert_eq!(e.to_string(), "P{_,0,1}(C)");
        let e = parse_storage_expr("Pinv{_,0,1}(Z)").unwrap();
        assert!(matches!(e, StorageExpr::PushdownInv { .. }));
        assert_eq!(parse_storage_expr(&e.to_string()).unwrap(), e);
    }

    #[test]
    fn storage_errors() {
        assert!(matches!(
            parse_storage_expr("Q"),
            Err(StorageError::Syntax { column: 2, .. })
        ));
        assert!(matches!(
            parse_storage_expr("P{0,1}(C)"),
            Err(StorageError::MissingBottom)
        ));
        assert!(matches!(
            parse_storage_expr("P{_,0}(C"),
            Err(StorageError::Syntax { .. })
        ));
    }

    #[test]
    fn ops_parse_and_print() {
        let st = parse_storage_expr("P{_,0,1}(P{_,a}(Z))").unwrap();
        for text in [
            "push(1)",
            "push(0,stay(pop))",
            "stay(push(a))",
            "stay(stay(pushsym(_)))",
            "pop",
            "id",
        ] {
            let f = parse_op(&st, text).unwrap();
            assert_eq!(f.display(&st), text);
        }
        assert!(parse_op(&st, "invpush(1)").is_err());
        assert!(parse_op(&st, "stay(stay(stay(pop)))").is_err());
    }

    #[test]
    fn configs_parse() {
        let st = parse_storage_expr("P{_,0,1}(C)").unwrap();
        let c = parse_config(&st, "(_,0)(1,5)").unwrap();
        assert_eq!(c.display(&st), "(_,0)(1,5)");
        let st2 = parse_storage_expr("P{_}(P{_,a}(C))").unwrap();
        let c2 = parse_config(&st2, "(_,[(_,0)])(_,[(_,0)(a,3)])").unwrap();
        assert_eq!(parse_config(&st2, &c2.display(&st2)).unwrap(), c2);
        let (q, _) = parse_state_config(&st, "(q,(_,0)(1,5))").unwrap();
        assert_eq!(q, "q");
    }

    #[test]
    fn automaton_round_trip() {
        let text = "storage: P{_,0,1}(C)\nstates: q0 q1 q2\ninitial: q0\nfinal: q2\n\
                    mode: q1 universal # comment\ntrans: q0 [top=_ ] push(1) q1\n\
                    trans: q1 [top=1] stay(pop) q1\ntrans: q1 [top=1] pop q2\n";
        let a = parse_automaton(text).unwrap();
        assert_eq!(a.transitions().len(), 3);
        assert_eq!(a.mode(1), Mode::Universal);
        let printed = print_automaton(&a);
        let b = parse_automaton(&printed).unwrap();
        assert_eq!(a.transitions(), b.transitions());
        assert_eq!(print_automaton(&b), printed);
    }

    #[test]
    fn unknown_state_is_reported() {
        let text = "storage: Z\nstates: q0\ninitial: q0\ntrans: q0 [] pop q9\n";
        assert!(matches!(
            parse_automaton(text),
            Err(StorageError::UnknownState(s)) if s == "q9"
        ));
    }
}

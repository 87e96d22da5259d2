//! Valid storage sequences: words of operations and test letters that can
//! be applied to the initial configuration without getting stuck.

use super::automaton::{satisfiable_vectors, StorageAutomaton};
use super::config::{apply_op, eval_test, StorageConfig};
use super::error::StorageError;
use super::expr::{OpId, StorageExpr, TestId};
use super::oracle::{reach_oracle, Caps};
use super::parse::{op, test_literal, Cursor};

/// One letter of a storage sequence. A test letter is the identity
/// restricted to configurations where the test has the given value.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ValLetter {
    Op(OpId),
    Test(TestId, bool),
}

/// Whether `seq` is defined on the initial configuration.
pub fn val_check(st: &StorageExpr, seq: &[ValLetter]) -> bool {
    let mut c = StorageConfig::initial(st);
    for letter in seq {
        match letter {
            ValLetter::Op(f) => match apply_op(st, f, &c) {
                Some(next) => c = next,
                None => return false,
            },
            ValLetter::Test(t, r) => {
                if eval_test(st, t, &c) != *r {
                    return false;
                }
            }
        }
    }
    true
}

/// Parses a whitespace-separated sequence of operations and bracketed
/// test letters, e.g. `pushsym(_) [empty=false] pop [empty]`.
pub fn parse_val_sequence(st: &StorageExpr, text: &str) -> Result<Vec<ValLetter>, StorageError> {
    let mut cur = Cursor::new(text);
    let mut out = Vec::new();
    while !cur.at_end() {
        if cur.eat('[') {
            while !cur.eat(']') {
                if cur.at_end() {
                    return Err(cur.error("unterminated test letter"));
                }
                let (t, r) = test_literal(&mut cur, st)?;
                out.push(ValLetter::Test(t, r));
                cur.eat(',');
            }
        } else {
            out.push(ValLetter::Op(op(&mut cur, st)?));
        }
        cur.eat(',');
    }
    Ok(out)
}

/// The one-state automaton recognising valid sequences, unrolled along `seq`:
/// state `v_i` has read the first `i` letters. Reaching `v_n` from the
/// initial configuration means the sequence is valid.
pub fn val_path_automaton(st: &StorageExpr, seq: &[ValLetter]) -> Result<StorageAutomaton, StorageError> {
    let mut a = StorageAutomaton::new(st.clone(), "v0")?;
    let vectors = satisfiable_vectors(st);
    let tests = st.tests();
    let mut prev = 0;
    for (i, letter) in seq.iter().enumerate() {
        let next = a.add_state(&format!("v{}", i + 1))?;
        match letter {
            ValLetter::Op(f) => {
                for &v in &vectors {
                    a.add_transition(prev, v, next, f.clone())?;
                }
            }
            ValLetter::Test(t, r) => {
                let idx = st
                    .test_index(t)
                    .ok_or_else(|| StorageError::IllTypedTest(t.display(st)))?;
                debug_assert_eq!(&tests[idx], t);
                for &v in &vectors {
                    if (v >> idx & 1 == 1) == *r {
                        a.add_transition(prev, v, next, OpId::Id)?;
                    }
                }
            }
        }
        prev = next;
    }
    a.set_final(prev);
    Ok(a)
}

/// Runs [`val_path_automaton`] through the reachability oracle. Caps are
/// derived from the sequence length, which bounds every height and counter.
pub fn val_check_via_oracle(st: &StorageExpr, seq: &[ValLetter]) -> Result<bool, StorageError> {
    let a = val_path_automaton(st, seq)?;
    let n = seq.len();
    let caps = Caps::new(vec![n + 1], n as u32 + 1, n + 1);
    Ok(reach_oracle(&a, a.final_state(), &caps).is_reachable())
}

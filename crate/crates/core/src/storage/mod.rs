//! Storage types, automata over them, and bounded explicit-state oracles.

mod automaton;
mod config;
mod error;
mod expr;
mod oracle;
mod parse;
mod val;

pub use automaton::{
    display_tests, expand_tests, satisfiable_vectors, true_tests, Mode, StateId, StorageAutomaton,
    Transition,
};
pub use config::{apply_op, eval_test, test_bits, StorageConfig};
pub use error::StorageError;
pub use expr::{is_name_char, is_symbol_token, Alphabet, OpId, StorageExpr, Sym, TestId, BOTTOM_NAME};
pub use oracle::{
    alt_reach_oracle, bfs, reach_config_oracle, reach_oracle, reachable_states, stabilize,
    stabilized_reach, stabilized_reachable_states, Caps,
    OracleResult, Trace, Verdict,
};
pub use parse::{
    config, op, op_untyped, parse_automaton, parse_automaton_file, parse_config, parse_op, parse_state_config,
    parse_storage_expr, parse_tests, print_automaton, split_key, storage_expr, strip_comment,
    test_literal, AutomatonFile, Cursor, RawTransition,
};
pub use val::{parse_val_sequence, val_check, val_check_via_oracle, val_path_automaton, ValLetter};

/// Parses a storage expression such as `P{_,0,1}(C)`.
pub fn build_storage(text: &str) -> Result<StorageExpr, StorageError> {
    parse_storage_expr(text)
}

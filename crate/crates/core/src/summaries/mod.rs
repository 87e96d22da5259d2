//! Return tables, the pushdown reduction, control-state reachability and
//! the summary word automaton.

mod algo;
mod dfa;
mod generate;
mod table;

pub use algo::{
    compute_return_table, compute_return_table_with, reach_hoca, reach_state, reach_state_hocs2,
    TableOptions, TableRun,
};
pub use dfa::{
    build_summary_dfa, build_summary_dfa_with, loops_query, ret_set, LoopSolver, PairSet,
    SummaryDfa, SummaryState,
};
pub use generate::{generate_pda, Layout};
pub use table::{bounds, ret_query, Bounds, IllFormedTable, ReturnTable};

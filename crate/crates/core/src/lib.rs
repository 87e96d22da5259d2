//! Reachability analysis for level-2 higher-order counter automata.

pub mod storage;
pub mod hoca2;
pub mod pds;
pub mod summaries;
pub mod trees;
pub mod regreach;
pub mod transforms;
pub mod regnotions;
pub mod gen;

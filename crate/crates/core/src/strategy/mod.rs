//! Finite-memory strategies: synthesis, verification and memory search.

mod machine;
mod search;
mod synth;
mod verify;

pub use machine::{parse_strategy, serialize_strategy, MooreStrategy};
pub use search::{
    for_each_machine, machine_count, min_memory_search, min_memory_search_with,
    DEFAULT_SEARCH_BUDGET,
};
pub use synth::{
    synth_bwmp, synth_bwmp_with, synth_direct_fwmp_1d, synth_fwmp_1d, synth_fwmp_k,
    synth_fwmp_k_with,
};
pub use verify::{verify_strategy, verify_strategy_from, verify_with_cap, Verdict};

//! Seeded game generation, brute-force oracles and the suites that check
//! every solver against an oracle or a second algorithm.

pub mod acceptance;
pub mod family;
pub mod gen;
pub mod oracle;
pub mod suites;

pub use family::TinyFamily;
pub use gen::{gen_random_game, gen_text, GenSpec};
pub use oracle::{
    bounded_memoryless, oracle_classical, oracle_classical_p2, oracle_window, oracle_window_p2,
    OracleBudget, WindowProduct,
};

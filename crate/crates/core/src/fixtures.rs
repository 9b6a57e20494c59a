//! Small reference games.

use crate::model::{parse_game, GameStructure};

pub const FIX1: &str = include_str!("../fixtures/fix1.wgame");
pub const FIX2: &str = include_str!("../fixtures/fix2.wgame");
pub const FIX3: &str = include_str!("../fixtures/fix3.wgame");
pub const FIX4: &str = include_str!("../fixtures/fix4.wgame");
pub const FIX5: &str = include_str!("../fixtures/fix5.wgame");
pub const FIX6: &str = include_str!("../fixtures/fix6.wgame");
/// P1 machine for FIX5 that answers each P2 move with the opposite one.
pub const FIX5_OPPOSITE: &str = include_str!("../fixtures/fix5_opposite.wstrat");

/// Single P1 state with a zero self-loop.
pub fn fix1() -> GameStructure {
    parse_game(FIX1).expect("fixture parses")
}

/// Single P1 state with a self-loop of weight −1.
pub fn fix2() -> GameStructure {
    parse_game(FIX2).expect("fixture parses")
}

/// P2 alternates between two zero cycles to keep windows open.
pub fn fix3() -> GameStructure {
    parse_game(FIX3).expect("fixture parses")
}

/// P1 must alternate three cycles to close all windows of size 4.
pub fn fix4() -> GameStructure {
    parse_game(FIX4).expect("fixture parses")
}

/// Two-dimensional gadget pair where P1 must answer P2's choice.
pub fn fix5() -> GameStructure {
    parse_game(FIX5).expect("fixture parses")
}

/// A losing first step followed by a zero loop.
pub fn fix6() -> GameStructure {
    parse_game(FIX6).expect("fixture parses")
}

/// `(name, game)` for every fixture.
pub fn all() -> Vec<(&'static str, GameStructure)> {
    vec![
        ("FIX1", fix1()),
        ("FIX2", fix2()),
        ("FIX3", fix3()),
        ("FIX4", fix4()),
        ("FIX5", fix5()),
        ("FIX6", fix6()),
    ]
}

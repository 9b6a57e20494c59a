mod common;

use common::arb_game;
use proptest::prelude::*;
use wmp_core::arena::{attractor_set, solve_cobuchi, solve_safety, Arena, StateSet};
use wmp_core::model::Player;

fn subset(n: usize, bits: u32) -> StateSet {
    StateSet::from_indices(n, (0..n).filter(|i| bits >> i & 1 == 1))
}

fn reachable(g: &wmp_core::GameStructure, from: usize) -> StateSet {
    let mut seen = StateSet::empty(g.num_states());
    let mut stack = vec![from];
    seen.insert(from);
    while let Some(s) = stack.pop() {
        for t in g.successors(s) {
            if seen.insert(t) {
                stack.push(t);
            }
        }
    }
    seen
}

proptest! {
    #[test]
    fn attractor_is_monotone_and_idempotent(g in arb_game(7, 1, 1), a in any::<u32>(), b in any::<u32>()) {
        let n = g.num_states();
        let all = g.all_states();
        let small = subset(n, a & b);
        let large = subset(n, a);
        for p in [Player::P1, Player::P2] {
            let x = attractor_set(&g, p, &small, &all);
            let y = attractor_set(&g, p, &large, &all);
            prop_assert!(small.is_subset(&x));
            prop_assert!(x.is_subset(&y));
            prop_assert_eq!(attractor_set(&g, p, &y, &all), y.clone());
        }
    }

    #[test]
    fn safety_is_dual_to_the_opponent_attractor(g in arb_game(7, 1, 1), a in any::<u32>()) {
        let n = g.num_states();
        let safe = subset(n, a);
        let lost = attractor_set(&g, Player::P2, &safe.complement(), &g.all_states());
        prop_assert_eq!(solve_safety(&g, &safe), lost.complement());
        let p1_attr = attractor_set(&g, Player::P1, &safe.complement(), &g.all_states());
        // the two players' attractor complements are traps for each other
        for s in p1_attr.complement().iter() {
            prop_assert!(safe.contains(s));
        }
    }

    #[test]
    fn cobuchi_contains_safety(g in arb_game(7, 1, 1), a in any::<u32>()) {
        let n = g.num_states();
        let bad = subset(n, a);
        let co = solve_cobuchi(&g, &bad);
        prop_assert!(solve_safety(&g, &bad.complement()).is_subset(&co));
        for s in 0..n {
            if reachable(&g, s).intersection(&bad).is_empty() {
                prop_assert!(co.contains(s));
            }
        }
    }
}

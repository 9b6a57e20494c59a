#![allow(dead_code)]

use proptest::prelude::*;
use wmp_core::model::{GameBuilder, GameStructure, Lasso, Player};

/// Valid games with `1..=max_states` states, out-degree 1 to 3 and weights
/// in `[-w, w]`.
pub fn arb_game(max_states: usize, dims: usize, w: i64) -> impl Strategy<Value = GameStructure> {
    (1..=max_states).prop_flat_map(move |n| {
        let state = (
            any::<bool>(),
            proptest::sample::subsequence((0..n).collect::<Vec<_>>(), 1..=n.min(3)),
            proptest::collection::vec(proptest::collection::vec(-w..=w, dims), 3),
        );
        proptest::collection::vec(state, n).prop_map(move |spec| {
            let mut b = GameBuilder::new(dims);
            for (i, (p2, _, _)) in spec.iter().enumerate() {
                let owner = if *p2 { Player::P2 } else { Player::P1 };
                b.state(&format!("s{i}"), owner).unwrap();
            }
            for (i, (_, targets, weights)) in spec.iter().enumerate() {
                for (t, wv) in targets.iter().zip(weights) {
                    b.edge(i, *t, wv.clone());
                }
            }
            b.init(0);
            b.build().unwrap()
        })
    })
}

/// A play of `g` from its initial state, steered by `choices` until a
/// state repeats.
pub fn walk(g: &GameStructure, choices: &[usize]) -> Lasso {
    let mut path = vec![g.init()];
    let mut k = 0;
    loop {
        let s = *path.last().unwrap();
        let out: Vec<_> = g.out_edges(s).map(|e| e.target).collect();
        let t = out[choices.get(k).copied().unwrap_or(0) % out.len()];
        k += 1;
        if let Some(i) = path.iter().position(|&x| x == t) {
            let cycle = path.split_off(i);
            return Lasso::new(path, cycle);
        }
        path.push(t);
    }
}

pub fn arb_game_and_lasso(
    max_states: usize,
    dims: usize,
    w: i64,
) -> impl Strategy<Value = (GameStructure, Lasso)> {
    (
        arb_game(max_states, dims, w),
        proptest::collection::vec(0usize..3, 12),
    )
        .prop_map(|(g, c)| {
            let l = walk(&g, &c);
            (g, l)
        })
}

//! Multi-dimensional fixed window objectives through the product with
//! per-dimension window counters.

use std::collections::HashMap;

use crate::arena::{solve_cobuchi, solve_safety, Arena, StateSet};
use crate::error::{Error, Result};
use crate::model::{GameBuilder, GameStructure, Player, SolveReport, StateId};

/// Default bound on the number of product states.
pub const DEFAULT_PRODUCT_CAP: usize = 5_000_000;

/// Open-window status of every dimension: the running sum `σ ≤ 0` and the
/// number of steps `τ` left before the window must close. A fresh window has
/// `σ = 0` and `τ = lmax`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WindowState {
    pub sums: Vec<i64>,
    pub remaining: Vec<usize>,
}

/// Outcome of extending the tracked windows by one edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WindowStep {
    /// Some window reached its last step with a negative sum.
    Violated,
    Next(WindowState),
}

impl WindowState {
    pub fn fresh(dims: usize, lmax: usize) -> Self {
        WindowState {
            sums: vec![0; dims],
            remaining: vec![lmax; dims],
        }
    }

    pub fn is_fresh(&self, lmax: usize) -> bool {
        self.remaining.iter().all(|&r| r == lmax)
    }

    /// Applies an edge of weight `w`: dimensions whose sum becomes
    /// nonnegative reset, the others consume one step.
    pub fn step(&self, w: &[i64], lmax: usize) -> WindowStep {
        let mut next = self.clone();
        for t in 0..w.len() {
            let s = self.sums[t] + w[t];
            if s >= 0 {
                next.sums[t] = 0;
                next.remaining[t] = lmax;
            } else if self.remaining[t] == 1 {
                return WindowStep::Violated;
            } else {
                next.sums[t] = s;
                next.remaining[t] -= 1;
            }
        }
        WindowStep::Next(next)
    }
}

/// A node of the window product.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ProductNode {
    Play {
        base: StateId,
        window: WindowState,
    },
    /// Entered when a window is violated on the way to `base`.
    Bad {
        base: StateId,
    },
}

impl ProductNode {
    pub fn base(&self) -> StateId {
        match self {
            ProductNode::Play { base, .. } | ProductNode::Bad { base } => *base,
        }
    }

    pub fn is_bad(&self) -> bool {
        matches!(self, ProductNode::Bad { .. })
    }
}

/// Reachable part of the product of a game with window counters.
#[derive(Clone, Debug)]
pub struct ProductGame {
    lmax: usize,
    nodes: Vec<ProductNode>,
    owners: Vec<Player>,
    succ: Vec<Vec<usize>>,
    pred: Vec<Vec<usize>>,
    index: HashMap<ProductNode, usize>,
}

impl ProductGame {
    pub fn lmax(&self) -> usize {
        self.lmax
    }

    pub fn node(&self, i: usize) -> &ProductNode {
        &self.nodes[i]
    }

    pub fn nodes(&self) -> &[ProductNode] {
        &self.nodes
    }

    pub fn find(&self, node: &ProductNode) -> Option<usize> {
        self.index.get(node).copied()
    }

    /// Index of `(s, fresh)`, if explored.
    pub fn fresh(&self, s: StateId, dims: usize) -> Option<usize> {
        self.find(&ProductNode::Play {
            base: s,
            window: WindowState::fresh(dims, self.lmax),
        })
    }

    pub fn bad_set(&self) -> StateSet {
        StateSet::from_indices(
            self.nodes.len(),
            (0..self.nodes.len()).filter(|&i| self.nodes[i].is_bad()),
        )
    }

    /// Textual node name used by the `reduce` output.
    pub fn node_label(&self, g: &GameStructure, i: usize) -> String {
        match &self.nodes[i] {
            ProductNode::Bad { base } => format!("z_{}", g.name(*base)),
            ProductNode::Play { .. } => format!("q{i}"),
        }
    }

    /// The product as a one-dimensional game with zero weights, owners kept,
    /// starting from the fresh node of the initial state if it was explored.
    pub fn to_game(&self, g: &GameStructure) -> GameStructure {
        let mut b = GameBuilder::new(1);
        for i in 0..self.nodes.len() {
            b.state(&self.node_label(g, i), self.owners[i])
                .expect("labels are distinct");
        }
        for (i, succ) in self.succ.iter().enumerate() {
            for &t in succ {
                b.edge(i, t, vec![0]);
            }
        }
        b.init(self.fresh(g.init(), g.dims()).unwrap_or(0));
        b.build_unchecked()
    }

    /// One `bad <node>` line per bad node.
    pub fn bad_sidecar(&self, g: &GameStructure) -> String {
        self.bad_set()
            .iter()
            .map(|i| format!("bad {}\n", self.node_label(g, i)))
            .collect()
    }
}

impl Arena for ProductGame {
    fn num_states(&self) -> usize {
        self.nodes.len()
    }

    fn owner(&self, s: usize) -> Player {
        self.owners[s]
    }

    fn successors(&self, s: usize) -> impl Iterator<Item = usize> + '_ {
        self.succ[s].iter().copied()
    }

    fn predecessors(&self, s: usize) -> impl Iterator<Item = usize> + '_ {
        self.pred[s].iter().copied()
    }
}

/// Successor of a play node along the base edge to `target` with weight `w`.
pub fn product_step(window: &WindowState, target: StateId, w: &[i64], lmax: usize) -> ProductNode {
    match window.step(w, lmax) {
        WindowStep::Violated => ProductNode::Bad { base: target },
        WindowStep::Next(next) => ProductNode::Play {
            base: target,
            window: next,
        },
    }
}

/// Explores the product breadth-first from `(s, fresh)` for `s ∈ start`.
pub fn build_window_product(
    g: &GameStructure,
    lmax: usize,
    start: &StateSet,
    cap: usize,
) -> Result<ProductGame> {
    if lmax == 0 {
        return Err(Error::ZeroWindow);
    }
    let k = g.dims();
    let w = g.max_abs_weight() as u128;
    let per_dim = lmax as u128 * (lmax as u128 * w + 1);
    let bound = (g.num_states() as u128)
        .saturating_mul(per_dim.saturating_pow(k as u32))
        .saturating_add(g.num_states() as u128);
    let mut p = ProductGame {
        lmax,
        nodes: Vec::new(),
        owners: Vec::new(),
        succ: Vec::new(),
        pred: Vec::new(),
        index: HashMap::new(),
    };
    let intern = |p: &mut ProductGame, node: ProductNode| -> Result<usize> {
        if let Some(&i) = p.index.get(&node) {
            return Ok(i);
        }
        if p.nodes.len() >= cap {
            return Err(Error::ProductCap { cap });
        }
        let i = p.nodes.len();
        let owner = match &node {
            ProductNode::Bad { .. } => Player::P1,
            ProductNode::Play { base, .. } => g.owner(*base),
        };
        p.owners.push(owner);
        p.index.insert(node.clone(), i);
        p.nodes.push(node);
        p.succ.push(Vec::new());
        p.pred.push(Vec::new());
        Ok(i)
    };
    for s in start.iter() {
        intern(
            &mut p,
            ProductNode::Play {
                base: s,
                window: WindowState::fresh(k, lmax),
            },
        )?;
    }
    let mut next = 0;
    while next < p.nodes.len() {
        let node = p.nodes[next].clone();
        let mut succ = Vec::new();
        match &node {
            ProductNode::Bad { base } => {
                succ.push(intern(
                    &mut p,
                    ProductNode::Play {
                        base: *base,
                        window: WindowState::fresh(k, lmax),
                    },
                )?);
            }
            ProductNode::Play { base, window } => {
                for e in g.out_edges(*base) {
                    let t = product_step(window, e.target, &e.weight, lmax);
                    let j = intern(&mut p, t)?;
                    if !succ.contains(&j) {
                        succ.push(j);
                    }
                }
            }
        }
        for &j in &succ {
            p.pred[j].push(next);
        }
        p.succ[next] = succ;
        next += 1;
    }
    if p.nodes.len() as u128 > bound {
        return Err(Error::Internal(format!(
            "product has {} states, above the bound {bound}",
            p.nodes.len()
        )));
    }
    Ok(p)
}

fn fresh_winners(g: &GameStructure, p: &ProductGame, won: &StateSet) -> StateSet {
    StateSet::from_indices(
        g.num_states(),
        (0..g.num_states()).filter(|&s| matches!(p.fresh(s, g.dims()), Some(i) if won.contains(i))),
    )
}

/// Winners of `FixWMP(0, lmax)` in any dimension count.
pub fn fwmp_k(g: &GameStructure, lmax: usize) -> Result<SolveReport> {
    fwmp_k_with(g, lmax, DEFAULT_PRODUCT_CAP)
}

pub fn fwmp_k_with(g: &GameStructure, lmax: usize, cap: usize) -> Result<SolveReport> {
    let p = build_window_product(g, lmax, &g.all_states(), cap)?;
    let won = solve_cobuchi(&p, &p.bad_set());
    let mut r = SolveReport::from_winning(fresh_winners(g, &p, &won));
    r.witness_lmax = Some(lmax);
    Ok(r)
}

/// Winners of `DirFixWMP(0, lmax)` in any dimension count.
pub fn direct_fwmp_k(g: &GameStructure, lmax: usize) -> Result<SolveReport> {
    direct_fwmp_k_with(g, lmax, DEFAULT_PRODUCT_CAP)
}

pub fn direct_fwmp_k_with(g: &GameStructure, lmax: usize, cap: usize) -> Result<SolveReport> {
    let p = build_window_product(g, lmax, &g.all_states(), cap)?;
    let won = solve_safety(&p, &p.bad_set().complement());
    let mut r = SolveReport::from_winning(fresh_winners(g, &p, &won));
    r.witness_lmax = Some(lmax);
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::window1d;

    #[test]
    fn product_of_a_losing_step() {
        let g = fixtures::fix6();
        let p = build_window_product(&g, 1, &g.all_states(), 100).unwrap();
        let a = g.id("a").unwrap();
        let b = g.id("b").unwrap();
        assert_eq!(p.num_states(), 3);
        let qa = p.fresh(a, 1).unwrap();
        let qb = p.fresh(b, 1).unwrap();
        let zb = p.find(&ProductNode::Bad { base: b }).unwrap();
        assert_eq!(p.successors(qa).collect::<Vec<_>>(), vec![zb]);
        assert_eq!(p.successors(zb).collect::<Vec<_>>(), vec![qb]);
        assert_eq!(p.successors(qb).collect::<Vec<_>>(), vec![qb]);
        assert_eq!(p.node_label(&g, zb), "z_b");
        let game = p.to_game(&g);
        assert!(game.validate().is_empty());
        assert_eq!(game.name(game.init()), p.node_label(&g, qa));
        assert_eq!(game.num_edges(), 3);
        assert_eq!(p.bad_sidecar(&g), "bad z_b\n");
        assert_eq!(p.owner(zb), Player::P1);
        assert!(solve_cobuchi(&p, &p.bad_set()).is_full());
    }

    #[test]
    fn nonnegative_weights_never_violate() {
        let g = crate::model::parse_game(
            "wgame 1\ndims 2\nstate a P2\nstate b P1\n\
             edge a b 0 3\nedge b a 1 0\nedge a a 2 2\ninit a\n",
        )
        .unwrap();
        for l in 1..=4 {
            let p = build_window_product(&g, l, &g.all_states(), 100).unwrap();
            assert!(p.bad_set().is_empty());
            assert_eq!(p.num_states(), 2);
        }
    }

    #[test]
    fn gadget_product_stays_small() {
        let g = fixtures::fix5();
        let p = build_window_product(&g, 3, &g.all_states(), 10_000).unwrap();
        for node in p.nodes() {
            if let ProductNode::Play { window, .. } = node {
                assert!(window.sums.iter().all(|&s| s == -1 || s == 0));
                assert!(window.remaining.iter().all(|&r| (1..=3).contains(&r)));
            }
        }
        assert!(!p.bad_set().is_empty());
        // regression baseline
        assert_eq!(p.num_states(), 18);
    }

    #[test]
    fn product_cap_is_reported() {
        let g = fixtures::fix5();
        assert!(matches!(
            build_window_product(&g, 3, &g.all_states(), 5),
            Err(Error::ProductCap { cap: 5 })
        ));
        assert!(matches!(
            fwmp_k_with(&g, 3, 5),
            Err(Error::ProductCap { .. })
        ));
    }

    #[test]
    fn gadget_pair_is_lost_by_p1() {
        // P2 can copy P1's last choice; the window opened by P1's own move
        // then never closes.
        let g = fixtures::fix5();
        for l in 1..=8 {
            assert!(fwmp_k(&g, l).unwrap().winning_p1.is_empty(), "lmax {l}");
            assert!(
                direct_fwmp_k(&g, l).unwrap().winning_p1.is_empty(),
                "lmax {l}"
            );
        }
    }

    #[test]
    fn one_dimensional_examples_agree() {
        let g6 = fixtures::fix6();
        assert!(fwmp_k(&g6, 1).unwrap().winning_p1.is_full());
        assert_eq!(
            g6.format_set(&direct_fwmp_k(&g6, 1).unwrap().winning_p1),
            "b"
        );
        let g3 = fixtures::fix3();
        assert!(fwmp_k(&g3, 3).unwrap().winning_p1.is_empty());
        for (name, g) in fixtures::all() {
            if g.dims() != 1 {
                continue;
            }
            for l in 1..=6 {
                assert_eq!(
                    fwmp_k(&g, l).unwrap().winning_p1,
                    window1d::fwmp(&g, l).unwrap(),
                    "{name} {l}"
                );
                assert_eq!(
                    direct_fwmp_k(&g, l).unwrap().winning_p1,
                    window1d::direct_fwmp(&g, l).unwrap(),
                    "{name} {l}"
                );
            }
        }
    }

    #[test]
    fn window_state_steps() {
        let w = WindowState::fresh(2, 2);
        assert!(w.is_fresh(2));
        let WindowStep::Next(n) = w.step(&[-1, 1], 2) else {
            panic!()
        };
        assert_eq!(n.sums, vec![-1, 0]);
        assert_eq!(n.remaining, vec![1, 2]);
        assert_eq!(n.step(&[0, 0], 2), WindowStep::Violated);
        let WindowStep::Next(m) = n.step(&[1, -2], 2) else {
            panic!()
        };
        assert!(m.sums == vec![0, -2] && m.remaining == vec![2, 1]);
    }
}

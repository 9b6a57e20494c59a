use std::collections::HashMap;

use super::machine::MooreStrategy;
use super::verify::{verify_strategy_from, verify_with_cap};
use crate::arena::{cobuchi_layers, solve_safety, subgame, Arena, StateSet};
use crate::classical::{require_one_dim, tp_sup_solve, TpConfig};
use crate::error::{Error, Result};
use crate::model::{GameStructure, ObjectiveSpec, Player, StateId};
use crate::window1d::{bounded_rounds, fwmp_layers, sufficient_window, FixLayer};
use crate::windowkd::{
    build_window_product, product_step, ProductNode, WindowState, DEFAULT_PRODUCT_CAP,
};

fn reject_unverified(
    g: &GameStructure,
    strat: MooreStrategy,
    spec: &ObjectiveSpec,
    won: &StateSet,
) -> Result<MooreStrategy> {
    let verdict = verify_strategy_from(g, &strat, spec, won)?;
    if verdict.pass {
        Ok(strat)
    } else {
        Err(Error::Internal(format!(
            "synthesized strategy fails {}: {}",
            spec.kind,
            verdict
                .counterexample
                .map(|l| l.display(g))
                .unwrap_or_default()
        )))
    }
}

/// Window bookkeeping of the one-dimensional strategy: which layer and
/// table each state belongs to.
struct LayerIndex<'a> {
    layers: &'a [FixLayer],
    layer_of: Vec<Option<usize>>,
}

impl<'a> LayerIndex<'a> {
    fn new(g: &GameStructure, layers: &'a [FixLayer]) -> Self {
        let mut layer_of = vec![None; g.num_states()];
        for (i, l) in layers.iter().enumerate() {
            for s in l.attractor.set.iter() {
                layer_of[s] = Some(i);
            }
        }
        LayerIndex { layers, layer_of }
    }

    /// The layer whose direct set contains `s`.
    fn direct_layer(&self, s: StateId) -> Option<usize> {
        self.layer_of[s].filter(|&i| self.layers[i].direct.contains(s))
    }
}

/// Budget left at `u` given the memory `(t, i)` recorded when leaving `t`.
///
/// The strategy tracks a lower bound on the sum of the current window: at `t`
/// with budget `i` that bound is `−C_i(t)`. The window closes on the edge
/// `t → u` if `w(t, u) ≥ C_i(t)`; otherwise `u` inherits budget `i − 1`.
fn budget_at(
    g: &GameStructure,
    idx: &LayerIndex<'_>,
    lmax: usize,
    prev: Option<(StateId, usize)>,
    u: StateId,
) -> usize {
    let Some(layer) = idx.direct_layer(u) else {
        return lmax;
    };
    match prev {
        Some((t, i)) if idx.direct_layer(t) == Some(layer) => match g.weight(t, u) {
            Some(w) => {
                let c = idx.layers[layer].table.value(i, t).unwrap_or(i64::MIN);
                // i == 1 without closing cannot happen under this strategy
                if w[0] >= c || i <= 1 {
                    lmax
                } else {
                    i - 1
                }
            }
            None => lmax,
        },
        _ => lmax,
    }
}

/// Move at `u` in window mode with budget `b`: maximize `w + max(0, C_{b−1}(x))`
/// over edges staying in the layer's direct set.
fn window_move(g: &GameStructure, layer: &FixLayer, u: StateId, b: usize) -> StateId {
    let mut best: Option<(i64, StateId)> = None;
    for e in g.out_edges(u) {
        if !layer.direct.contains(e.target) {
            continue;
        }
        let Some(c) = layer.table.value(b - 1, e.target) else {
            continue;
        };
        let v = e.weight[0] + c.max(0);
        if best.is_none_or(|(bv, _)| v > bv) {
            best = Some((v, e.target));
        }
    }
    best.map(|(_, t)| t)
        .unwrap_or_else(|| g.successors(u).next().expect("no dead ends"))
}

fn build_1d(g: &GameStructure, lmax: usize, layers: &[FixLayer]) -> MooreStrategy {
    let idx = LayerIndex::new(g, layers);
    let n = g.num_states();
    // memory 0 is "fresh"; memory (t, i) for t in a direct set, 1 <= i <= lmax
    let mut names = vec!["fresh".to_string()];
    let mut code: HashMap<(StateId, usize), usize> = HashMap::new();
    for t in 0..n {
        if idx.direct_layer(t).is_some() {
            for i in 1..=lmax {
                code.insert((t, i), names.len());
                names.push(format!("at_{}_{}", g.name(t), i));
            }
        }
    }
    let mut decode: Vec<Option<(StateId, usize)>> = vec![None; names.len()];
    for (&k, &v) in &code {
        decode[v] = Some(k);
    }
    let mut strat = MooreStrategy::new(Player::P1, names, 0, n);
    for m in 0..decode.len() {
        for u in 0..n {
            let b = budget_at(g, &idx, lmax, decode[m], u);
            let next = match idx.direct_layer(u) {
                Some(_) => code[&(u, b)],
                None => 0,
            };
            strat.set_update(m, u, next);
            if g.owner(u) != Player::P1 {
                continue;
            }
            let target = match (idx.layer_of[u], idx.direct_layer(u)) {
                (Some(_), Some(l)) => window_move(g, &layers[l], u, b),
                (Some(l), None) => layers[l]
                    .attractor
                    .descend(g, &layers[l].within, u)
                    .expect("attractor state has a descending move"),
                (None, _) => g.successors(u).next().expect("no dead ends"),
            };
            strat.set_action(m, u, target);
        }
    }
    strat
}

/// A P1 strategy winning `FixWMP(0, lmax)` from every state of `fwmp(g, lmax)`.
pub fn synth_fwmp_1d(g: &GameStructure, lmax: usize) -> Result<MooreStrategy> {
    let layers = fwmp_layers(g, lmax)?;
    let mut won = StateSet::empty(g.num_states());
    for l in &layers {
        won.union_with(&l.attractor.set);
    }
    if won.is_empty() {
        return Err(Error::EmptyWinningSet);
    }
    let strat = build_1d(g, lmax, &layers);
    reject_unverified(g, strat, &ObjectiveSpec::fix(lmax), &won)
}

/// A P1 strategy winning `DirFixWMP(0, lmax)` from every state of
/// `direct_fwmp(g, lmax)`.
pub fn synth_direct_fwmp_1d(g: &GameStructure, lmax: usize) -> Result<MooreStrategy> {
    let layers = fwmp_layers(g, lmax)?;
    let Some(first) = layers.into_iter().next() else {
        return Err(Error::EmptyWinningSet);
    };
    let won = first.direct.clone();
    let mut only = first;
    only.attractor.set = won.clone();
    for r in only.attractor.rank.iter_mut() {
        *r = None;
    }
    for s in won.iter() {
        only.attractor.rank[s] = Some(0);
    }
    let strat = build_1d(g, lmax, std::slice::from_ref(&only));
    reject_unverified(g, strat, &ObjectiveSpec::dir_fix(lmax), &won)
}

/// A memoryless P1 strategy winning `BndWMP(0)` from every winning state.
pub fn synth_bwmp(g: &GameStructure) -> Result<MooreStrategy> {
    synth_bwmp_with(g, &TpConfig::default())
}

pub fn synth_bwmp_with(g: &GameStructure, cfg: &TpConfig) -> Result<MooreStrategy> {
    require_one_dim(g)?;
    let rounds = bounded_rounds(g, cfg)?;
    let Some(last) = rounds.last() else {
        return Err(Error::EmptyWinningSet);
    };
    let won = last.attracted.set.clone();
    let n = g.num_states();
    let all = g.all_states();
    let mut choice: Vec<StateId> = (0..n)
        .map(|s| g.successors(s).next().expect("no dead ends"))
        .collect();
    let mut assigned = StateSet::empty(n);
    let mut previous = StateSet::empty(n);
    for r in &rounds {
        // States new in this round: those in S \ open play the total-payoff
        // strategy of that subgame, the rest follow the attractor.
        let core = r.open.complement().difference(&previous);
        if !core.is_empty() {
            let sub = subgame(g, &core);
            let tp = tp_sup_solve(&sub.game, cfg)?;
            for (i, &s) in sub.map.iter().enumerate() {
                if g.owner(s) == Player::P1 && !assigned.contains(s) {
                    choice[s] = sub.map[tp.strategy[i]];
                }
            }
        }
        for s in r.attracted.set.difference(&previous).iter() {
            if assigned.contains(s) || g.owner(s) != Player::P1 {
                continue;
            }
            if !core.contains(s) {
                choice[s] = r
                    .attracted
                    .descend(g, &all, s)
                    .expect("attractor state has a descending move");
            }
        }
        assigned.union_with(&r.attracted.set);
        previous = r.attracted.set.clone();
    }
    let strat = MooreStrategy::memoryless(g, Player::P1, &choice);
    let spec = ObjectiveSpec::fix(sufficient_window(g));
    reject_unverified(g, strat, &spec, &won)
}

/// A P1 strategy for `FixWMP(0, lmax)` (or `DirFixWMP` when `direct`) in any
/// dimension count, with the product state as memory.
pub fn synth_fwmp_k(g: &GameStructure, lmax: usize, direct: bool) -> Result<MooreStrategy> {
    synth_fwmp_k_with(g, lmax, direct, DEFAULT_PRODUCT_CAP)
}

pub fn synth_fwmp_k_with(
    g: &GameStructure,
    lmax: usize,
    direct: bool,
    cap: usize,
) -> Result<MooreStrategy> {
    if g.dims() == 1 {
        return if direct {
            synth_direct_fwmp_1d(g, lmax)
        } else {
            synth_fwmp_1d(g, lmax)
        };
    }
    let n = g.num_states();
    let k = g.dims();
    let p = build_window_product(g, lmax, &g.all_states(), cap)?;
    let bad = p.bad_set();
    let np = p.num_states();
    // positional product strategy
    let mut pick: Vec<Option<usize>> = vec![None; np];
    let mut won_nodes = StateSet::empty(np);
    if direct {
        let safe = solve_safety(&p, &bad.complement());
        for q in safe.iter() {
            if p.owner(q) == Player::P1 {
                pick[q] = p.successors(q).find(|&x| safe.contains(x));
            }
        }
        won_nodes = safe;
    } else {
        for layer in cobuchi_layers(&p, &bad) {
            for q in layer.attracted.set.iter() {
                if p.owner(q) != Player::P1 || pick[q].is_some() {
                    continue;
                }
                pick[q] = if layer.safe_core.contains(q) {
                    p.successors(q)
                        .find(|&x| layer.within.contains(x) && layer.safe_core.contains(x))
                } else {
                    layer.attracted.descend(&p, &layer.within, q)
                };
            }
            won_nodes.union_with(&layer.attracted.set);
        }
    }
    let won = StateSet::from_indices(
        n,
        (0..n).filter(|&s| matches!(p.fresh(s, k), Some(q) if won_nodes.contains(q))),
    );
    if won.is_empty() {
        return Err(Error::EmptyWinningSet);
    }
    // Memory: "start" or the product node occupied when leaving a state.
    let plays: Vec<usize> = (0..np).filter(|&q| !p.node(q).is_bad()).collect();
    let mut names = vec!["start".to_string()];
    let mut code = vec![usize::MAX; np];
    for &q in &plays {
        code[q] = names.len();
        names.push(format!("q{q}"));
    }
    let current = |prev: Option<usize>, u: StateId| -> Option<usize> {
        let node = match prev {
            None => ProductNode::Play {
                base: u,
                window: WindowState::fresh(k, lmax),
            },
            Some(q) => match p.node(q) {
                ProductNode::Play { base, window } => {
                    let w = g.weight(*base, u)?;
                    match product_step(window, u, w, lmax) {
                        ProductNode::Bad { base } => ProductNode::Play {
                            base,
                            window: WindowState::fresh(k, lmax),
                        },
                        play => play,
                    }
                }
                ProductNode::Bad { .. } => return None,
            },
        };
        p.find(&node)
    };
    let mut strat = MooreStrategy::new(Player::P1, names, 0, n);
    let mut memories: Vec<Option<usize>> = vec![None];
    memories.extend(plays.iter().map(|&q| Some(q)));
    for (m, prev) in memories.iter().enumerate() {
        for u in 0..n {
            let cur = current(*prev, u);
            strat.set_update(m, u, cur.map_or(0, |q| code[q]));
            if g.owner(u) != Player::P1 {
                continue;
            }
            let target = cur
                .and_then(|q| pick[q])
                .map(|x| p.node(x).base())
                .unwrap_or_else(|| g.successors(u).next().expect("no dead ends"));
            strat.set_action(m, u, target);
        }
    }
    let spec = if direct {
        ObjectiveSpec::dir_fix(lmax)
    } else {
        ObjectiveSpec::fix(lmax)
    };
    let verdict = verify_with_cap(g, &strat, &spec, &won, cap)?;
    if !verdict.pass {
        return Err(Error::Internal("synthesized product strategy fails".into()));
    }
    Ok(strat)
}

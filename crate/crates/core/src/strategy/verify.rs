use std::collections::{HashMap, VecDeque};

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use super::machine::MooreStrategy;
use crate::arena::{Arena, StateSet};
use crate::error::{Error, Result};
use crate::model::{
    eval_lasso, normalize_threshold, GameStructure, Lasso, ObjectiveKind, ObjectiveSpec, StateId,
    ThresholdMode,
};
use crate::window1d::sufficient_window;
use crate::windowkd::{WindowState, WindowStep, DEFAULT_PRODUCT_CAP};

/// Outcome of checking a strategy. A failing verdict carries a play
/// consistent with the strategy on which it loses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub pass: bool,
    pub counterexample: Option<Lasso>,
}

/// What the product tracks about the play's windows.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Track {
    /// Every window, for the fixed kinds.
    Windows(WindowState),
    /// Only the window opened at the first position; closed dimensions have
    /// `remaining == 0`.
    First(WindowState),
    Closed,
    Failed,
}

fn step(track: &Track, w: &[i64], lmax: usize) -> (Track, bool) {
    match track {
        Track::Windows(ws) => match ws.step(w, lmax) {
            WindowStep::Violated => (Track::Windows(WindowState::fresh(w.len(), lmax)), true),
            WindowStep::Next(n) => (Track::Windows(n), false),
        },
        Track::First(ws) => {
            let mut next = ws.clone();
            for t in 0..w.len() {
                if ws.remaining[t] == 0 {
                    continue;
                }
                let s = ws.sums[t] + w[t];
                if s >= 0 {
                    next.remaining[t] = 0;
                    next.sums[t] = 0;
                } else if ws.remaining[t] == 1 {
                    return (Track::Failed, true);
                } else {
                    next.sums[t] = s;
                    next.remaining[t] -= 1;
                }
            }
            if next.remaining.iter().all(|&r| r == 0) {
                (Track::Closed, false)
            } else {
                (Track::First(next), false)
            }
        }
        Track::Closed => (Track::Closed, false),
        Track::Failed => (Track::Failed, false),
    }
}

type Node = (StateId, usize, Track);

/// The game restricted by the strategy, with window tracking. Edges carry a
/// flag marking window violations.
struct Synchronized {
    nodes: Vec<Node>,
    succ: Vec<Vec<(usize, bool)>>,
}

fn explore(
    g: &GameStructure,
    strat: &MooreStrategy,
    start: StateId,
    init_track: Track,
    lmax: usize,
    cap: usize,
) -> Result<Synchronized> {
    let mut index: HashMap<Node, usize> = HashMap::new();
    let mut nodes: Vec<Node> = Vec::new();
    let mut succ = Vec::new();
    let first = (start, strat.initial(), init_track);
    index.insert(first.clone(), 0);
    nodes.push(first);
    let mut next = 0;
    while next < nodes.len() {
        let (s, m, track) = nodes[next].clone();
        let m2 = strat.update(m, s);
        let moves: Vec<StateId> = if g.owner(s) == strat.player {
            vec![strat.action(m, s).expect("checked strategy")]
        } else {
            g.successors(s).collect()
        };
        let mut out = Vec::with_capacity(moves.len());
        for t in moves {
            let w = g.weight(s, t).expect("edge");
            let (tr, bad) = step(&track, w, lmax);
            let node = (t, m2, tr);
            let j = match index.get(&node) {
                Some(&j) => j,
                None => {
                    if nodes.len() >= cap {
                        return Err(Error::ProductCap { cap });
                    }
                    index.insert(node.clone(), nodes.len());
                    nodes.push(node);
                    nodes.len() - 1
                }
            };
            out.push((j, bad));
        }
        succ.push(out);
        next += 1;
    }
    Ok(Synchronized { nodes, succ })
}

impl Synchronized {
    /// Shortest path from node 0 to a node satisfying `goal`, using edges
    /// accepted by `usable`. Returns node indices.
    fn path_to(
        &self,
        from: usize,
        goal: impl Fn(usize) -> bool,
        usable: impl Fn(usize, usize, bool) -> bool,
    ) -> Option<Vec<usize>> {
        let mut parent: Vec<Option<usize>> = vec![None; self.nodes.len()];
        let mut seen = vec![false; self.nodes.len()];
        let mut queue = VecDeque::from([from]);
        seen[from] = true;
        while let Some(u) = queue.pop_front() {
            if goal(u) {
                let mut path = vec![u];
                let mut cur = u;
                while let Some(p) = parent[cur] {
                    path.push(p);
                    cur = p;
                }
                path.reverse();
                return Some(path);
            }
            for &(v, bad) in &self.succ[u] {
                if !seen[v] && usable(u, v, bad) {
                    seen[v] = true;
                    parent[v] = Some(u);
                    queue.push_back(v);
                }
            }
        }
        None
    }

    /// Strongly connected component id of every node over the usable edges,
    /// and whether the component contains a cycle.
    fn components(&self, usable: impl Fn(bool) -> bool) -> (Vec<usize>, Vec<bool>) {
        let mut graph = DiGraph::<(), ()>::with_capacity(self.nodes.len(), 0);
        let idx: Vec<_> = (0..self.nodes.len()).map(|_| graph.add_node(())).collect();
        for (u, out) in self.succ.iter().enumerate() {
            for &(v, bad) in out {
                if usable(bad) {
                    graph.add_edge(idx[u], idx[v], ());
                }
            }
        }
        let sccs = tarjan_scc(&graph);
        let mut comp = vec![0; self.nodes.len()];
        let mut cyclic = vec![false; sccs.len()];
        for (c, members) in sccs.iter().enumerate() {
            for &m in members {
                comp[m.index()] = c;
            }
            cyclic[c] = members.len() > 1;
        }
        for (u, out) in self.succ.iter().enumerate() {
            for &(v, bad) in out {
                if u == v && usable(bad) {
                    cyclic[comp[u]] = true;
                }
            }
        }
        (comp, cyclic)
    }

    /// Turns a path of node indices into a lasso, extending it along first
    /// successors until a node repeats.
    fn close(&self, mut path: Vec<usize>) -> Lasso {
        let mut pos: HashMap<usize, usize> = HashMap::new();
        for (i, &u) in path.iter().enumerate() {
            pos.entry(u).or_insert(i);
        }
        loop {
            let last = *path.last().expect("nonempty path");
            let next = self.succ[last][0].0;
            if let Some(&i) = pos.get(&next) {
                return self.lasso(&path, i);
            }
            pos.insert(next, path.len());
            path.push(next);
        }
    }

    /// Lasso whose stem is `path[..i]` and cycle `path[i..]`.
    fn lasso(&self, path: &[usize], i: usize) -> Lasso {
        let base = |u: &usize| self.nodes[*u].0;
        Lasso::new(
            path[..i].iter().map(base).collect(),
            path[i..].iter().map(base).collect(),
        )
    }

    /// A play from node 0 through a cycle of usable edges that contains an
    /// edge accepted by `marked`.
    fn cycle_lasso(
        &self,
        usable: impl Fn(bool) -> bool + Copy,
        marked: impl Fn(bool) -> bool,
    ) -> Option<Lasso> {
        let (comp, cyclic) = self.components(usable);
        let mut target: Option<(usize, usize)> = None;
        let mut dist = vec![usize::MAX; self.nodes.len()];
        let mut queue = VecDeque::from([0usize]);
        dist[0] = 0;
        // closest source of a marked edge lying inside a cyclic component
        let mut order = Vec::new();
        while let Some(u) = queue.pop_front() {
            order.push(u);
            for &(v, _) in &self.succ[u] {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        'outer: for &u in &order {
            for &(v, bad) in &self.succ[u] {
                if usable(bad) && marked(bad) && comp[u] == comp[v] && cyclic[comp[u]] {
                    target = Some((u, v));
                    break 'outer;
                }
            }
        }
        let (u, v) = target?;
        let stem = self.path_to(0, |x| x == u, |_, _, _| true)?;
        let c = comp[u];
        let back = self.path_to(
            v,
            |x| x == u,
            |a, b, bad| usable(bad) && comp[a] == c && comp[b] == c,
        )?;
        let mut path = stem;
        let i = path.len() - 1;
        if v != u {
            path.extend(&back[..back.len() - 1]);
        }
        Some(self.lasso(&path, i))
    }
}

/// Resolves the window bound and threshold of `spec` into a zero-threshold
/// game and a kind among GW, DirFix and Fix.
fn prepare(
    g: &GameStructure,
    spec: &ObjectiveSpec,
) -> Result<(GameStructure, ObjectiveKind, usize)> {
    spec.check_dims(g.dims())?;
    let shifted = if spec.threshold.iter().all(|r| *r.numer() == 0) {
        g.clone()
    } else {
        normalize_threshold(g, &spec.threshold, ThresholdMode::Mean)?.game
    };
    let bounded = |kind| -> Result<(GameStructure, ObjectiveKind, usize)> {
        if g.dims() != 1 {
            return Err(Error::Unsupported(
                "bounded window verification needs a one-dimensional game".into(),
            ));
        }
        Ok((shifted.clone(), kind, sufficient_window(&shifted)))
    };
    match spec.kind {
        ObjectiveKind::GoodWindow | ObjectiveKind::DirFixWmp | ObjectiveKind::FixWmp => {
            let lmax = spec.lmax.ok_or(Error::ZeroWindow)?;
            Ok((shifted.clone(), spec.kind, lmax))
        }
        ObjectiveKind::BndWmp => bounded(ObjectiveKind::FixWmp),
        ObjectiveKind::DirBndWmp => bounded(ObjectiveKind::DirFixWmp),
        other => Err(Error::Unsupported(format!(
            "strategy verification for {other}"
        ))),
    }
}

/// Checks `strat` from the initial state of `g`.
pub fn verify_strategy(
    g: &GameStructure,
    strat: &MooreStrategy,
    spec: &ObjectiveSpec,
) -> Result<Verdict> {
    let start = StateSet::from_indices(g.num_states(), [g.init()]);
    verify_strategy_from(g, strat, spec, &start)
}

/// Checks `strat` from every state of `starts`. A P1 strategy passes if every
/// consistent play satisfies the objective; a P2 strategy passes if none does.
pub fn verify_strategy_from(
    g: &GameStructure,
    strat: &MooreStrategy,
    spec: &ObjectiveSpec,
    starts: &StateSet,
) -> Result<Verdict> {
    verify_with_cap(g, strat, spec, starts, DEFAULT_PRODUCT_CAP)
}

pub fn verify_with_cap(
    g: &GameStructure,
    strat: &MooreStrategy,
    spec: &ObjectiveSpec,
    starts: &StateSet,
    cap: usize,
) -> Result<Verdict> {
    strat.check(g)?;
    let (game, kind, lmax) = prepare(g, spec)?;
    let dims = g.dims();
    let p1 = strat.player == crate::model::Player::P1;
    for s in starts.iter() {
        let track = match kind {
            ObjectiveKind::GoodWindow => Track::First(WindowState::fresh(dims, lmax)),
            _ => Track::Windows(WindowState::fresh(dims, lmax)),
        };
        let prod = explore(&game, strat, s, track, lmax, cap)?;
        let lasso = match (kind, p1) {
            (ObjectiveKind::GoodWindow | ObjectiveKind::DirFixWmp, true) => {
                let before =
                    prod.path_to(0, |u| prod.succ[u].iter().any(|&(_, b)| b), |_, _, _| true);
                before.map(|mut path| {
                    let u = *path.last().expect("nonempty");
                    let v = prod.succ[u].iter().find(|&&(_, b)| b).expect("bad edge").0;
                    path.push(v);
                    prod.close(path)
                })
            }
            (ObjectiveKind::FixWmp, true) => prod.cycle_lasso(|_| true, |bad| bad),
            (ObjectiveKind::GoodWindow, false) => prod
                .path_to(0, |u| prod.nodes[u].2 == Track::Closed, |_, _, _| true)
                .map(|path| prod.close(path)),
            (ObjectiveKind::DirFixWmp, false) => {
                // a cycle of good edges reachable through good edges only
                let (comp, cyclic) = prod.components(|bad| !bad);
                prod.path_to(0, |u| cyclic[comp[u]], |_, _, bad| !bad)
                    .map(|stem| {
                        let u = *stem.last().expect("nonempty");
                        let c = comp[u];
                        let mut path = stem;
                        let i = path.len() - 1;
                        let (v, _) = *prod.succ[u]
                            .iter()
                            .find(|&&(v, b)| !b && comp[v] == c)
                            .expect("cyclic component");
                        if v != u {
                            let back = prod
                                .path_to(
                                    v,
                                    |x| x == u,
                                    |a, b, bad| !bad && comp[a] == c && comp[b] == c,
                                )
                                .expect("strongly connected");
                            path.extend(&back[..back.len() - 1]);
                        }
                        prod.lasso(&path, i)
                    })
            }
            (ObjectiveKind::FixWmp, false) => prod.cycle_lasso(|bad| !bad, |_| true),
            _ => unreachable!("prepare returns a fixed kind"),
        };
        if let Some(l) = lasso {
            let check = ObjectiveSpec::window(kind, lmax);
            let holds = eval_lasso(&game, &l, &check)?.verdict;
            if holds == p1 {
                return Err(Error::Internal(format!(
                    "verifier counterexample {} does not match its evaluation",
                    l.display(g)
                )));
            }
            return Ok(Verdict {
                pass: false,
                counterexample: Some(l),
            });
        }
    }
    Ok(Verdict {
        pass: true,
        counterexample: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::Player;
    use crate::strategy::{parse_strategy, MooreStrategy};

    fn choice(g: &GameStructure, picks: &[(&str, &str)]) -> Vec<StateId> {
        let mut c: Vec<StateId> = (0..g.num_states())
            .map(|s| g.successors(s).next().unwrap())
            .collect();
        for (s, t) in picks {
            c[g.id(s).unwrap()] = g.id(t).unwrap();
        }
        c
    }

    fn fails_with_checked_counterexample(
        g: &GameStructure,
        strat: &MooreStrategy,
        spec: &ObjectiveSpec,
    ) -> Lasso {
        let v = verify_strategy(g, strat, spec).unwrap();
        assert!(!v.pass);
        let l = v.counterexample.unwrap();
        let holds = eval_lasso(g, &l, spec).unwrap().verdict;
        assert_eq!(holds, strat.player != Player::P1);
        l
    }

    #[test]
    fn zero_loop_passes() {
        let g = fixtures::fix1();
        let s = MooreStrategy::memoryless(&g, Player::P1, &[0]);
        for spec in [
            ObjectiveSpec::dir_fix(1),
            ObjectiveSpec::fix(1),
            ObjectiveSpec::good_window(1),
        ] {
            assert!(verify_strategy(&g, &s, &spec).unwrap().pass);
        }
    }

    #[test]
    fn memoryless_gadget_play_fails() {
        let g = fixtures::fix5();
        let s = MooreStrategy::memoryless(&g, Player::P1, &choice(&g, &[("t1", "t1L")]));
        let l = fails_with_checked_counterexample(&g, &s, &ObjectiveSpec::fix(3));
        assert!(l.cycle.contains(&g.id("t1L").unwrap()));
    }

    #[test]
    fn opposite_choice_still_fails_the_gadget_pair() {
        let g = fixtures::fix5();
        let text = crate::strategy::serialize_strategy(&g, &{
            let mut m = MooreStrategy::new(Player::P1, vec!["L".into(), "R".into()], 0, 6);
            let id = |n: &str| g.id(n).unwrap();
            for mem in 0..2 {
                for s in 0..6 {
                    m.set_update(mem, s, mem);
                }
                m.set_update(mem, id("s1L"), 0);
                m.set_update(mem, id("s1R"), 1);
                m.set_action(mem, id("t1L"), id("s1"));
                m.set_action(mem, id("t1R"), id("s1"));
            }
            m.set_action(0, id("t1"), id("t1R"));
            m.set_action(1, id("t1"), id("t1L"));
            m
        });
        let s = parse_strategy(&g, &text).unwrap();
        // the window opened by P1's own answer stays open when P2 repeats it
        fails_with_checked_counterexample(&g, &s, &ObjectiveSpec::fix(3));
        fails_with_checked_counterexample(&g, &s, &ObjectiveSpec::fix(11));
        assert!(
            verify_strategy(&g, &s, &ObjectiveSpec::good_window(3))
                .unwrap()
                .pass
        );
    }

    #[test]
    fn losing_first_step() {
        let g = fixtures::fix6();
        let s = MooreStrategy::memoryless(&g, Player::P1, &choice(&g, &[]));
        assert!(
            verify_strategy(&g, &s, &ObjectiveSpec::fix(1))
                .unwrap()
                .pass
        );
        fails_with_checked_counterexample(&g, &s, &ObjectiveSpec::dir_fix(1));
        fails_with_checked_counterexample(&g, &s, &ObjectiveSpec::good_window(5));
        let spec = ObjectiveSpec::plain(ObjectiveKind::BndWmp);
        assert!(verify_strategy(&g, &s, &spec).unwrap().pass);
        let spec = ObjectiveSpec::plain(ObjectiveKind::DirBndWmp);
        assert!(!verify_strategy(&g, &s, &spec).unwrap().pass);
    }

    #[test]
    fn p2_strategies_on_zero_cycles() {
        let g = fixtures::fix3();
        for t in ["x", "y1"] {
            let s = MooreStrategy::memoryless(&g, Player::P2, &choice(&g, &[("c", t)]));
            fails_with_checked_counterexample(&g, &s, &ObjectiveSpec::fix(3));
        }
        // alternating between the two cycles keeps a window of length 5 open
        let mut alt = MooreStrategy::new(Player::P2, vec!["a".into(), "b".into()], 0, 4);
        let id = |n: &str| g.id(n).unwrap();
        for m in 0..2 {
            for s in 0..4 {
                alt.set_update(m, s, m);
                alt.set_action(m, s, g.successors(s).next().unwrap());
            }
        }
        alt.set_update(0, id("c"), 1);
        alt.set_update(1, id("c"), 0);
        alt.set_action(0, id("c"), id("x"));
        alt.set_action(1, id("c"), id("y1"));
        assert!(
            verify_strategy(&g, &alt, &ObjectiveSpec::fix(3))
                .unwrap()
                .pass
        );
        assert!(
            verify_strategy(&g, &alt, &ObjectiveSpec::fix(4))
                .unwrap()
                .pass
        );
        fails_with_checked_counterexample(&g, &alt, &ObjectiveSpec::fix(5));
    }

    #[test]
    fn thresholds_are_normalized() {
        let g = fixtures::fix2();
        let s = MooreStrategy::memoryless(&g, Player::P1, &[0]);
        let t = vec![crate::model::Rational::from_integer(-1)];
        assert!(
            verify_strategy(&g, &s, &ObjectiveSpec::fix(1).with_threshold(t))
                .unwrap()
                .pass
        );
        assert!(
            !verify_strategy(&g, &s, &ObjectiveSpec::fix(1))
                .unwrap()
                .pass
        );
    }

    #[test]
    fn unsupported_and_capped() {
        let g = fixtures::fix5();
        let s = MooreStrategy::memoryless(&g, Player::P1, &choice(&g, &[]));
        let spec = ObjectiveSpec::plain(ObjectiveKind::MeanInf);
        assert!(matches!(
            verify_strategy(&g, &s, &spec),
            Err(Error::Unsupported(_))
        ));
        let spec = ObjectiveSpec::plain(ObjectiveKind::BndWmp);
        assert!(matches!(
            verify_strategy(&g, &s, &spec),
            Err(Error::Unsupported(_))
        ));
        let start = StateSet::from_indices(6, [0]);
        assert!(matches!(
            verify_with_cap(&g, &s, &ObjectiveSpec::fix(3), &start, 2),
            Err(Error::ProductCap { cap: 2 })
        ));
    }
}

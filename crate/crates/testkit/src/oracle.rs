//! Brute-force oracles that share no winner computation with the solvers.
//!
//! Window objectives are decided on a separately built product that tracks,
//! per dimension, the sum and length of the oldest open window. Fixed window
//! objectives become co-Büchi and direct ones safety objectives on it, for
//! which memoryless strategies suffice, so the oracle enumerates positional
//! strategies of one player and inspects the graph that remains. Bounded
//! kinds use the window size `(|S| − 1)·(|S|·W + 1)`; in one dimension P1
//! needs no memory for them, so only P1's memoryless strategies on the game
//! itself are tried there. The good window
//! objective is decided by expanding the game tree. Classical objectives
//! enumerate memoryless strategies of both players and evaluate each lasso.

use std::collections::HashMap;

use wmp_core::arena::{Arena, StateSet};
use wmp_core::model::{
    eval_lasso, normalize_threshold, GameStructure, Lasso, ObjectiveKind, ObjectiveSpec, Player,
    Rational, StateId, ThresholdMode,
};
use wmp_core::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleBudget {
    pub product_states: usize,
    /// Strategies (or strategy pairs, or game-tree nodes) examined per call.
    pub strategies: usize,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget {
            product_states: 20_000,
            strategies: 1_000_000,
        }
    }
}

fn over(what: &str, budget: usize) -> Error {
    Error::Budget {
        what: what.into(),
        budget,
    }
}

/// Window size that makes fixed and bounded objectives agree.
fn bounded_size(g: &GameStructure) -> usize {
    let n = g.num_states();
    let w = g.max_abs_weight() as usize;
    ((n - 1) * (n * w + 1)).max(1)
}

/// Open windows per dimension as `(sum, length)`; `bad` marks nodes entered
/// by a step on which some window reached `lmax` edges without closing.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Node {
    state: StateId,
    open: Vec<Option<(i64, usize)>>,
    bad: bool,
}

struct Product {
    state: Vec<StateId>,
    owner: Vec<Player>,
    succ: Vec<Vec<usize>>,
    bad: Vec<bool>,
    /// `start[s]`: node of state `s` with no open window.
    start: Vec<usize>,
}

fn build_product(g: &GameStructure, lmax: usize, cap: usize) -> Result<Product> {
    let dims = g.dims();
    let mut index: HashMap<Node, usize> = HashMap::new();
    let mut nodes: Vec<Node> = Vec::new();
    let mut intern = |node: Node, nodes: &mut Vec<Node>| -> Result<usize> {
        if let Some(&i) = index.get(&node) {
            return Ok(i);
        }
        if nodes.len() == cap {
            return Err(over("oracle product", cap));
        }
        index.insert(node.clone(), nodes.len());
        nodes.push(node);
        Ok(nodes.len() - 1)
    };
    let mut start = Vec::new();
    for s in 0..g.num_states() {
        let node = Node {
            state: s,
            open: vec![None; dims],
            bad: false,
        };
        start.push(intern(node, &mut nodes)?);
    }
    let mut succ = Vec::new();
    let mut i = 0;
    while i < nodes.len() {
        let node = nodes[i].clone();
        let mut out = Vec::new();
        for e in g.out_edges(node.state) {
            let mut bad = false;
            let open = node
                .open
                .iter()
                .zip(&e.weight)
                .map(|(o, &w)| {
                    let (sum, len) = match *o {
                        None => (w, 1),
                        Some((sum, len)) => (sum + w, len + 1),
                    };
                    if sum >= 0 {
                        None
                    } else if len >= lmax {
                        bad = true;
                        None
                    } else {
                        Some((sum, len))
                    }
                })
                .collect();
            let next = Node {
                state: e.target,
                open,
                bad,
            };
            out.push(intern(next, &mut nodes)?);
        }
        succ.push(out);
        i += 1;
    }
    Ok(Product {
        state: nodes.iter().map(|n| n.state).collect(),
        owner: nodes.iter().map(|n| g.owner(n.state)).collect(),
        bad: nodes.iter().map(|n| n.bad).collect(),
        succ,
        start,
    })
}

/// The graph left once `fixer` commits to `choice` on the nodes it owns.
struct Restricted<'a> {
    p: &'a Product,
    fixer: Player,
    choice: &'a [Option<usize>],
}

impl Restricted<'_> {
    fn next(&self, v: usize) -> &[usize] {
        if self.p.owner[v] == self.fixer {
            let c = self.choice[v].expect("expanded node has a choice");
            std::slice::from_ref(&self.p.succ[v][c])
        } else {
            &self.p.succ[v]
        }
    }

    /// Some bad node among `within` lies on a cycle inside `within`.
    fn bad_cycle(&self, within: &[bool]) -> bool {
        (0..within.len())
            .filter(|&b| within[b] && self.p.bad[b])
            .any(|b| {
                let mut seen = vec![false; within.len()];
                let mut stack: Vec<usize> = self.next(b).to_vec();
                while let Some(v) = stack.pop() {
                    if v == b {
                        return true;
                    }
                    if within[v] && !seen[v] {
                        seen[v] = true;
                        stack.extend_from_slice(self.next(v));
                    }
                }
                false
            })
    }
}

/// Searches positional strategies of `fixer` over the nodes reachable from
/// `root`. P1 looks for a strategy under which every remaining play avoids
/// bad nodes (`direct`) or visits them finitely often. P2 looks for one
/// under which no remaining play does, that is, P1 has no escape.
struct Search<'a> {
    p: &'a Product,
    fixer: Player,
    direct: bool,
    root: usize,
    leaves: usize,
    budget: usize,
}

impl Search<'_> {
    fn restricted<'c>(&'c self, choice: &'c [Option<usize>]) -> Restricted<'c> {
        Restricted {
            p: self.p,
            fixer: self.fixer,
            choice,
        }
    }

    /// A cycle of good nodes inside `within`, reachable from the root inside
    /// `within` (through good nodes only for direct objectives).
    fn escape(&self, choice: &[Option<usize>], within: &[bool]) -> bool {
        let r = self.restricted(choice);
        let n = within.len();
        let mut seen = vec![false; n];
        let mut stack = vec![self.root];
        seen[self.root] = true;
        while let Some(v) = stack.pop() {
            if !within[v] || (self.direct && self.p.bad[v]) {
                continue;
            }
            for &t in r.next(v) {
                if !seen[t] {
                    seen[t] = true;
                    stack.push(t);
                }
            }
        }
        // peel nodes without a successor among the remaining good ones
        let mut alive: Vec<bool> = (0..n)
            .map(|v| seen[v] && within[v] && !self.p.bad[v])
            .collect();
        loop {
            let mut changed = false;
            for v in 0..n {
                if alive[v] && !r.next(v).iter().any(|&t| alive[t]) {
                    alive[v] = false;
                    changed = true;
                }
            }
            if !changed {
                return alive.iter().any(|&a| a);
            }
        }
    }

    /// Whether the fixer wins once every reached node is expanded.
    fn goal(&self, choice: &[Option<usize>], reached: &[bool]) -> bool {
        match self.fixer {
            Player::P1 if self.direct => !(0..reached.len()).any(|v| reached[v] && self.p.bad[v]),
            Player::P1 => !self.restricted(choice).bad_cycle(reached),
            Player::P2 => !self.escape(choice, reached),
        }
    }

    /// Decides a branch early from the expanded nodes, whose edges every
    /// completion of `choice` keeps.
    fn decided(&self, choice: &[Option<usize>], expanded: &[bool]) -> bool {
        match self.fixer {
            Player::P1 => !self.direct && self.restricted(choice).bad_cycle(expanded),
            Player::P2 => self.escape(choice, expanded),
        }
    }

    fn run(
        &mut self,
        choice: Vec<Option<usize>>,
        mut reached: Vec<bool>,
        mut expanded: Vec<bool>,
        mut frontier: Vec<usize>,
    ) -> Result<Option<Vec<bool>>> {
        while let Some(v) = frontier.pop() {
            if self.direct && self.p.bad[v] {
                if self.fixer == Player::P1 {
                    self.leaf()?;
                    return Ok(None);
                }
                // plays through a bad node are lost for P1 already
                expanded[v] = true;
                continue;
            }
            if self.p.owner[v] == self.fixer && choice[v].is_none() {
                if self.decided(&choice, &expanded) {
                    self.leaf()?;
                    return Ok(None);
                }
                expanded[v] = true;
                for c in 0..self.p.succ[v].len() {
                    let mut choice = choice.clone();
                    let mut reached = reached.clone();
                    let mut frontier = frontier.clone();
                    choice[v] = Some(c);
                    let t = self.p.succ[v][c];
                    if !reached[t] {
                        reached[t] = true;
                        frontier.push(t);
                    }
                    if let Some(won) = self.run(choice, reached, expanded.clone(), frontier)? {
                        return Ok(Some(won));
                    }
                }
                return Ok(None);
            }
            expanded[v] = true;
            if self.p.owner[v] != self.fixer {
                for &t in &self.p.succ[v] {
                    if !reached[t] {
                        reached[t] = true;
                        frontier.push(t);
                    }
                }
            }
        }
        self.leaf()?;
        Ok(self.goal(&choice, &reached).then_some(reached))
    }

    fn leaf(&mut self) -> Result<()> {
        self.leaves += 1;
        if self.leaves > self.budget {
            return Err(over("oracle strategies", self.budget));
        }
        Ok(())
    }
}

/// The window product of a game for one bound, shared by the fixed and
/// direct objectives.
pub struct WindowProduct {
    p: Product,
    states: usize,
}

impl WindowProduct {
    pub fn new(g: &GameStructure, lmax: usize, budget: &OracleBudget) -> Result<Self> {
        Ok(WindowProduct {
            p: build_product(g, lmax, budget.product_states)?,
            states: g.num_states(),
        })
    }

    pub fn num_nodes(&self) -> usize {
        self.p.owner.len()
    }

    /// States from which `player` wins its side of the fixed (or `direct`)
    /// window objective.
    pub fn winning(&self, direct: bool, player: Player, budget: &OracleBudget) -> Result<StateSet> {
        let p = &self.p;
        let n = p.owner.len();
        let mut search = Search {
            p,
            fixer: player,
            direct,
            root: 0,
            leaves: 0,
            budget: budget.strategies,
        };
        let mut won = StateSet::empty(self.states);
        for s in 0..self.states {
            if won.contains(s) {
                continue;
            }
            let root = p.start[s];
            search.root = root;
            let mut reached = vec![false; n];
            reached[root] = true;
            if let Some(reached) = search.run(vec![None; n], reached, vec![false; n], vec![root])? {
                won.insert(s);
                if player == Player::P1 {
                    // the same strategy wins from every start node it reaches
                    for t in 0..self.states {
                        if reached[p.start[t]] {
                            won.insert(t);
                        }
                    }
                }
            }
        }
        Ok(won)
    }

    /// States from which one of the memoryless P1 strategies `sigma` of the
    /// underlying game wins the fixed (or `direct`) objective against every
    /// P2 behaviour.
    fn winning_memoryless(&self, sigma: &[Vec<StateId>], direct: bool) -> StateSet {
        let p = &self.p;
        let n = p.owner.len();
        let mut won = StateSet::empty(self.states);
        for sigma in sigma {
            let choice: Vec<Option<usize>> = (0..n)
                .map(|v| {
                    p.succ[v]
                        .iter()
                        .position(|&t| p.state[t] == sigma[p.state[v]])
                })
                .collect();
            let r = Restricted {
                p,
                fixer: Player::P1,
                choice: &choice,
            };
            for s in 0..self.states {
                if won.contains(s) {
                    continue;
                }
                let mut reached = vec![false; n];
                reached[p.start[s]] = true;
                let mut stack = vec![p.start[s]];
                while let Some(v) = stack.pop() {
                    for &t in r.next(v) {
                        if !reached[t] {
                            reached[t] = true;
                            stack.push(t);
                        }
                    }
                }
                let lost = if direct {
                    (0..n).any(|v| reached[v] && p.bad[v])
                } else {
                    r.bad_cycle(&reached)
                };
                if !lost {
                    won.insert(s);
                }
            }
        }
        won
    }
}

fn product_view(
    g: &GameStructure,
    lmax: usize,
    direct: bool,
    player: Player,
    budget: &OracleBudget,
) -> Result<StateSet> {
    WindowProduct::new(g, lmax, budget)?.winning(direct, player, budget)
}

/// P1's winning sets for the direct and prefix-independent bounded kinds in
/// one dimension, where memoryless strategies suffice for P1.
pub fn bounded_memoryless(
    g: &GameStructure,
    budget: &OracleBudget,
) -> Result<(StateSet, StateSet)> {
    let strategies = memoryless(g, Player::P1);
    if strategies.len() > budget.strategies {
        return Err(over("oracle strategies", budget.strategies));
    }
    let w = WindowProduct::new(g, bounded_size(g), budget)?;
    Ok((
        w.winning_memoryless(&strategies, true),
        w.winning_memoryless(&strategies, false),
    ))
}

/// Game-tree evaluation of the good window objective from `s`.
fn good_window_from(
    g: &GameStructure,
    s: StateId,
    sums: &[Option<i64>],
    steps: usize,
    nodes: &mut usize,
    budget: usize,
) -> Result<bool> {
    *nodes += 1;
    if *nodes > budget {
        return Err(over("oracle game tree", budget));
    }
    if sums.iter().all(|x| x.is_none()) {
        return Ok(true);
    }
    if steps == 0 {
        return Ok(false);
    }
    let p1 = g.owner(s) == Player::P1;
    for e in g.out_edges(s) {
        let next: Vec<Option<i64>> = sums
            .iter()
            .zip(&e.weight)
            .map(|(x, &w)| x.map(|x| x + w).filter(|&y| y < 0))
            .collect();
        let won = good_window_from(g, e.target, &next, steps - 1, nodes, budget)?;
        if won == p1 {
            return Ok(won);
        }
    }
    Ok(!p1)
}

fn window_view(
    g: &GameStructure,
    spec: &ObjectiveSpec,
    player: Player,
    budget: &OracleBudget,
) -> Result<StateSet> {
    spec.check_dims(g.dims())?;
    let shifted;
    let g = if spec
        .threshold
        .iter()
        .all(|v| *v == Rational::from_integer(0))
    {
        g
    } else {
        shifted = normalize_threshold(g, &spec.threshold, ThresholdMode::Mean)?.game;
        &shifted
    };
    let bound = || spec.lmax.ok_or(Error::ZeroWindow);
    match spec.kind {
        ObjectiveKind::GoodWindow => {
            let lmax = bound()?;
            let mut nodes = 0;
            let mut won = StateSet::empty(g.num_states());
            for s in 0..g.num_states() {
                let open = vec![Some(0); g.dims()];
                let p1 = good_window_from(g, s, &open, lmax, &mut nodes, budget.strategies)?;
                if p1 == (player == Player::P1) {
                    won.insert(s);
                }
            }
            Ok(won)
        }
        ObjectiveKind::DirFixWmp => product_view(g, bound()?, true, player, budget),
        ObjectiveKind::FixWmp => product_view(g, bound()?, false, player, budget),
        ObjectiveKind::DirBndWmp | ObjectiveKind::BndWmp => {
            let direct = spec.kind == ObjectiveKind::DirBndWmp;
            if g.dims() == 1 && player == Player::P1 {
                let (d, f) = bounded_memoryless(g, budget)?;
                Ok(if direct { d } else { f })
            } else {
                product_view(g, bounded_size(g), direct, player, budget)
            }
        }
        other => Err(Error::Unsupported(format!(
            "{other} is not a window objective"
        ))),
    }
}

/// P1's winning set for a window objective.
pub fn oracle_window(
    g: &GameStructure,
    spec: &ObjectiveSpec,
    budget: &OracleBudget,
) -> Result<StateSet> {
    window_view(g, spec, Player::P1, budget)
}

/// P2's winning set for the complement of a window objective, found by
/// enumerating P2's strategies instead.
pub fn oracle_window_p2(
    g: &GameStructure,
    spec: &ObjectiveSpec,
    budget: &OracleBudget,
) -> Result<StateSet> {
    window_view(g, spec, Player::P2, budget)
}

/// Successor vectors for every memoryless strategy of `player`.
fn memoryless(g: &GameStructure, player: Player) -> Vec<Vec<StateId>> {
    let mut all = vec![vec![usize::MAX; g.num_states()]];
    for s in 0..g.num_states() {
        if g.owner(s) != player {
            continue;
        }
        all = all
            .into_iter()
            .flat_map(|c| {
                g.out_edges(s).map(move |e| {
                    let mut c = c.clone();
                    c[s] = e.target;
                    c
                })
            })
            .collect();
    }
    all
}

fn play(g: &GameStructure, s: StateId, sigma: &[StateId], tau: &[StateId]) -> Lasso {
    let mut path = vec![s];
    loop {
        let v = *path.last().expect("nonempty");
        let t = if g.owner(v) == Player::P1 {
            sigma[v]
        } else {
            tau[v]
        };
        if let Some(i) = path.iter().position(|&x| x == t) {
            let cycle = path.split_off(i);
            return Lasso::new(path, cycle);
        }
        path.push(t);
    }
}

fn classical_view(
    g: &GameStructure,
    kind: ObjectiveKind,
    threshold: Rational,
    player: Player,
    budget: &OracleBudget,
) -> Result<StateSet> {
    if g.dims() != 1 {
        return Err(Error::Dimension(g.dims()));
    }
    if kind.is_window() {
        return Err(Error::Unsupported(format!(
            "{kind} is not a classical objective"
        )));
    }
    let count = |p| -> usize {
        (0..g.num_states())
            .filter(|&s| g.owner(s) == p)
            .fold(1usize, |acc, s| acc.saturating_mul(g.out_degree(s)))
    };
    if count(Player::P1).saturating_mul(count(Player::P2)) > budget.strategies {
        return Err(over("oracle strategy pairs", budget.strategies));
    }
    let spec = ObjectiveSpec::plain(kind).with_threshold(vec![threshold]);
    let mine = memoryless(g, player);
    let theirs = memoryless(g, player.opponent());
    let mut won = StateSet::empty(g.num_states());
    for s in 0..g.num_states() {
        for a in &mine {
            let mut all = true;
            for b in &theirs {
                let (sigma, tau) = if player == Player::P1 { (a, b) } else { (b, a) };
                let v = eval_lasso(g, &play(g, s, sigma, tau), &spec)?.verdict;
                if v != (player == Player::P1) {
                    all = false;
                    break;
                }
            }
            if all {
                won.insert(s);
                break;
            }
        }
    }
    Ok(won)
}

/// P1's winning set for a mean- or total-payoff objective with threshold.
pub fn oracle_classical(
    g: &GameStructure,
    kind: ObjectiveKind,
    threshold: Rational,
    budget: &OracleBudget,
) -> Result<StateSet> {
    classical_view(g, kind, threshold, Player::P1, budget)
}

/// States from which some memoryless P2 strategy defeats every memoryless
/// P1 strategy.
pub fn oracle_classical_p2(
    g: &GameStructure,
    kind: ObjectiveKind,
    threshold: Rational,
    budget: &OracleBudget,
) -> Result<StateSet> {
    classical_view(g, kind, threshold, Player::P2, budget)
}

/// For each state `s` of `states`, a memoryless P2 strategy against which no
/// memoryless P1 strategy makes every window from `s` close, if one exists.
pub fn open_window_witnesses(
    g: &GameStructure,
    states: &StateSet,
    budget: &OracleBudget,
) -> Result<Vec<(StateId, Option<Vec<StateId>>)>> {
    let p1 = memoryless(g, Player::P1);
    let p2 = memoryless(g, Player::P2);
    if p1.len().saturating_mul(p2.len()) > budget.strategies {
        return Err(over("oracle strategy pairs", budget.strategies));
    }
    let spec = ObjectiveSpec::plain(ObjectiveKind::DirBndWmp);
    states
        .iter()
        .map(|s| {
            for tau in &p2 {
                let mut open = true;
                for sigma in &p1 {
                    if eval_lasso(g, &play(g, s, sigma, tau), &spec)?.verdict {
                        open = false;
                        break;
                    }
                }
                if open {
                    return Ok((s, Some(tau.clone())));
                }
            }
            Ok((s, None))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use wmp_core::fixtures;

    fn names(g: &GameStructure, set: &StateSet) -> String {
        g.format_set(set)
    }

    #[test]
    fn product_tracks_the_oldest_window() {
        let g = fixtures::fix3();
        let p = build_product(&g, 3, 1000).unwrap();
        assert_eq!(p.start.len(), 4);
        assert!(p.bad.iter().any(|&b| b));
        let p = build_product(&g, 3, 4);
        assert!(matches!(p, Err(Error::Budget { .. })));
    }

    #[test]
    fn good_window_tree() {
        let g = fixtures::fix3();
        let b = OracleBudget::default();
        let w = oracle_window(&g, &ObjectiveSpec::good_window(3), &b).unwrap();
        assert_eq!(names(&g, &w), "c y1 y2");
        let w = oracle_window(&g, &ObjectiveSpec::good_window(2), &b).unwrap();
        assert_eq!(names(&g, &w), "y1 y2");
    }

    #[test]
    fn budgets_are_enforced() {
        let g = fixtures::fix4();
        let tight = OracleBudget {
            product_states: 20_000,
            strategies: 3,
        };
        assert!(matches!(
            oracle_window(&g, &ObjectiveSpec::fix(4), &tight),
            Err(Error::Budget { .. })
        ));
        assert!(matches!(
            oracle_classical(
                &g,
                ObjectiveKind::MeanInf,
                Rational::from_integer(0),
                &OracleBudget {
                    strategies: 0,
                    ..tight
                }
            ),
            Err(Error::Budget { .. })
        ));
    }

    #[test]
    fn bounded_shortcut_matches_product_enumeration() {
        let b = OracleBudget::default();
        let mut compared = 0;
        for g in crate::family::TinyFamily::default()
            .games()
            .iter()
            .step_by(97)
        {
            let (d, f) = bounded_memoryless(g, &b).unwrap();
            for (direct, short) in [(true, d), (false, f)] {
                let Ok(full) = product_view(g, bounded_size(g), direct, Player::P1, &b) else {
                    continue;
                };
                assert_eq!(short, full);
                compared += 1;
            }
        }
        assert!(compared > 1000);
    }

    #[test]
    fn classical_requires_one_dimension() {
        let g = fixtures::fix5();
        let r = oracle_classical(
            &g,
            ObjectiveKind::MeanInf,
            Rational::from_integer(0),
            &OracleBudget::default(),
        );
        assert!(matches!(r, Err(Error::Dimension(2))));
    }
}

//! One-dimensional mean-payoff and supremum total-payoff games.

use num_rational::Ratio;

use crate::arena::{Arena, StateSet};
use crate::error::{Error, Result};
use crate::model::{GameStructure, Player, Rational, Value};

/// Default limit on `|S|` for the enumeration-based total-payoff backend.
pub const DEFAULT_ORACLE_BUDGET: usize = 14;

pub type ValueVector = Vec<Value>;

pub(crate) fn require_one_dim(g: &GameStructure) -> Result<()> {
    if g.dims() == 1 {
        Ok(())
    } else {
        Err(Error::Dimension(g.dims()))
    }
}

/// Optimal `n`-step sums `v_n(s)`, with P1 maximizing and P2 minimizing.
/// `v_0 = 0`.
pub fn horizon_values(g: &GameStructure, steps: usize) -> Vec<i64> {
    let n = g.num_states();
    let mut v = vec![0i64; n];
    let mut next = vec![0i64; n];
    for _ in 0..steps {
        for s in 0..n {
            let vals = g.out_edges(s).map(|e| e.weight[0] + v[e.target]);
            next[s] = match g.owner(s) {
                Player::P1 => vals.max(),
                Player::P2 => vals.min(),
            }
            .expect("no dead ends");
        }
        std::mem::swap(&mut v, &mut next);
    }
    v
}

/// The rational with denominator at most `max_den` closest to `num/den`.
fn nearest_small_fraction(num: i64, den: i64, max_den: i64) -> Rational {
    let mut best: Option<(i128, i128, Rational)> = None;
    for q in 1..=max_den {
        // p = round(num·q/den)
        let scaled = num as i128 * q as i128;
        let d = den as i128;
        let p = (2 * scaled + d).div_euclid(2 * d);
        // distance |num/den − p/q| = |num·q − p·den| / (den·q)
        let dist_num = (scaled - p * d).abs();
        let dist_den = d * q as i128;
        let better = match &best {
            None => true,
            Some((bn, bd, _)) => dist_num * bd < bn * dist_den,
        };
        if better {
            best = Some((dist_num, dist_den, Ratio::new(p as i64, q)));
        }
    }
    best.expect("max_den >= 1").2
}

/// Exact mean-payoff value of every state.
///
/// Runs `N = 4·|S|³·W` rounds of optimal-sum iteration and rounds `v_N/N` to
/// the closest fraction with denominator at most `|S|`.
pub fn mp_value(g: &GameStructure) -> Result<ValueVector> {
    require_one_dim(g)?;
    let n = g.num_states();
    let w = g.max_abs_weight();
    let steps = if w == 0 {
        1
    } else {
        (n as i64)
            .checked_pow(3)
            .and_then(|x| x.checked_mul(4 * w))
            .filter(|&x| x <= 1 << 34)
            .ok_or_else(|| Error::Budget {
                what: "mean-payoff iteration horizon".into(),
                budget: 1 << 34,
            })?
    };
    let v = horizon_values(g, steps as usize);
    Ok(v.into_iter()
        .map(|x| Value::Finite(nearest_small_fraction(x, steps, n as i64)))
        .collect())
}

/// States with mean-payoff value at least 0.
pub fn mp_threshold_win(g: &GameStructure) -> Result<StateSet> {
    let v = mp_value(g)?;
    Ok(StateSet::from_indices(
        g.num_states(),
        (0..v.len()).filter(|&s| v[s] >= Value::int(0)),
    ))
}

/// States with mean-payoff value strictly above 0.
pub fn mp_positive(g: &GameStructure) -> Result<StateSet> {
    let v = mp_value(g)?;
    Ok(StateSet::from_indices(
        g.num_states(),
        (0..v.len()).filter(|&s| v[s] > Value::int(0)),
    ))
}

/// Iterates over all memoryless strategies of `player` as successor vectors;
/// entries of the other player's states are left at their first successor.
pub struct MemorylessStrategies<'a> {
    g: &'a GameStructure,
    owned: Vec<usize>,
    digits: Vec<usize>,
    done: bool,
}

impl<'a> MemorylessStrategies<'a> {
    pub fn new(g: &'a GameStructure, player: Player) -> Self {
        let owned: Vec<usize> = (0..g.num_states())
            .filter(|&s| g.owner(s) == player)
            .collect();
        let digits = vec![0; owned.len()];
        MemorylessStrategies {
            g,
            owned,
            digits,
            done: false,
        }
    }

    /// Number of strategies, saturating.
    pub fn count(g: &GameStructure, player: Player) -> usize {
        (0..g.num_states())
            .filter(|&s| g.owner(s) == player)
            .fold(1usize, |acc, s| acc.saturating_mul(g.out_degree(s)))
    }
}

impl Iterator for MemorylessStrategies<'_> {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let g = self.g;
        let mut choice: Vec<usize> = (0..g.num_states())
            .map(|s| g.out_edges(s).next().expect("no dead ends").target)
            .collect();
        for (i, &s) in self.owned.iter().enumerate() {
            choice[s] = g
                .out_edges(s)
                .nth(self.digits[i])
                .expect("digit in range")
                .target;
        }
        // advance the mixed-radix counter
        self.done = true;
        for (i, &s) in self.owned.iter().enumerate() {
            if self.digits[i] + 1 < g.out_degree(s) {
                self.digits[i] += 1;
                self.done = false;
                break;
            }
            self.digits[i] = 0;
        }
        Some(choice)
    }
}

/// Configuration of the enumeration-based total-payoff backend.
#[derive(Clone, Copy, Debug)]
pub struct TpConfig {
    /// Largest `|S|` accepted.
    pub budget: usize,
}

impl Default for TpConfig {
    fn default() -> Self {
        TpConfig {
            budget: DEFAULT_ORACLE_BUDGET,
        }
    }
}

/// Outcome of the total-payoff analysis: P1's winning set for `TotalSup ≥ 0`
/// and a memoryless P1 strategy winning from all of it.
#[derive(Clone, Debug)]
pub struct TpSolution {
    pub winning: StateSet,
    pub strategy: Vec<usize>,
}

/// Edge lists of the graph where `player`'s states keep only `choice`.
fn restricted_edges(g: &GameStructure, player: Player, choice: &[usize]) -> Vec<Vec<(usize, i64)>> {
    (0..g.num_states())
        .map(|s| {
            if g.owner(s) == player {
                vec![(choice[s], g.weight(s, choice[s]).expect("edge")[0])]
            } else {
                g.out_edges(s).map(|e| (e.target, e.weight[0])).collect()
            }
        })
        .collect()
}

/// In a one-player graph, the states from which the controller can make the
/// supremum total payoff negative (`minimize`) or keep the infimum total
/// payoff nonnegative (`!minimize`, by negating weights).
///
/// With weights negated, "limsup < 0" becomes "liminf > 0", so both views
/// use the same test: the controller wins from `s` iff it can reach a
/// negative cycle, or reach with total `≤ −1` a state `c` that starts a
/// closed walk with all prefix sums `≤ 0`.
fn one_player_negative_sup(adj: &[Vec<(usize, i64)>], w_max: i64) -> StateSet {
    let n = adj.len();
    let mut result = StateSet::empty(n);
    // States that start a zero-or-less closed walk with nonpositive prefixes,
    // searched over (state, sum) pairs with sum in [-n·W, 0].
    let span = (n as i64 * w_max) as usize;
    let mut high_point = vec![false; n];
    for c in 0..n {
        let width = span + 1;
        let mut seen = vec![false; n * width];
        let mut stack = Vec::new();
        for &(t, w) in &adj[c] {
            if w <= 0 && (-w) as usize <= span {
                let k = t * width + (-w) as usize;
                if !seen[k] {
                    seen[k] = true;
                    stack.push((t, -w));
                }
            }
        }
        while let Some((u, depth)) = stack.pop() {
            if u == c && depth == 0 {
                high_point[c] = true;
                break;
            }
            for &(t, w) in &adj[u] {
                let d = depth - w;
                if d >= 0 && d as usize <= span {
                    let k = t * width + d as usize;
                    if !seen[k] {
                        seen[k] = true;
                        stack.push((t, d));
                    }
                }
            }
        }
    }
    for s in 0..n {
        // Bellman-Ford from s.
        let mut dist: Vec<Option<i64>> = vec![None; n];
        dist[s] = Some(0);
        let mut negative_cycle = false;
        for round in 0..=n {
            let mut changed = false;
            for u in 0..n {
                let Some(du) = dist[u] else { continue };
                for &(t, w) in &adj[u] {
                    let cand = du + w;
                    if dist[t].is_none_or(|dt| cand < dt) {
                        dist[t] = Some(cand);
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
            if round == n {
                negative_cycle = true;
            }
        }
        let wins = negative_cycle
            || (0..n).any(|c| high_point[c] && matches!(dist[c], Some(d) if d <= -1));
        if wins {
            result.insert(s);
        }
    }
    result
}

fn check_budget(g: &GameStructure, cfg: &TpConfig) -> Result<()> {
    require_one_dim(g)?;
    if g.num_states() > cfg.budget {
        return Err(Error::Budget {
            what: format!("total-payoff enumeration over {} states", g.num_states()),
            budget: cfg.budget,
        });
    }
    Ok(())
}

/// P1's winning set for `TotalSup ≥ 0` together with a uniform memoryless
/// winning strategy, by enumerating P1 memoryless strategies against P2
/// best responses.
pub fn tp_sup_solve(g: &GameStructure, cfg: &TpConfig) -> Result<TpSolution> {
    check_budget(g, cfg)?;
    let n = g.num_states();
    let w = g.max_abs_weight();
    let mut winning = StateSet::empty(n);
    let mut per_strategy = Vec::new();
    for choice in MemorylessStrategies::new(g, Player::P1) {
        let adj = restricted_edges(g, Player::P1, &choice);
        let lost = one_player_negative_sup(&adj, w);
        let won = lost.complement();
        winning.union_with(&won);
        per_strategy.push((won, choice));
    }
    let strategy = per_strategy
        .iter()
        .find(|(won, _)| winning.is_subset(won))
        .map(|(_, c)| c.clone())
        .ok_or_else(|| Error::Internal("no uniform total-payoff strategy".into()))?;
    Ok(TpSolution { winning, strategy })
}

/// States from which P1 wins `TotalSup ≥ 0`.
pub fn tp_sup_win(g: &GameStructure) -> Result<StateSet> {
    tp_sup_win_with(g, &TpConfig::default())
}

pub fn tp_sup_win_with(g: &GameStructure, cfg: &TpConfig) -> Result<StateSet> {
    Ok(tp_sup_solve(g, cfg)?.winning)
}

/// States from which P2 can force `TotalSup < 0`.
pub fn neg_sup_tp(g: &GameStructure) -> Result<StateSet> {
    neg_sup_tp_with(g, &TpConfig::default())
}

pub fn neg_sup_tp_with(g: &GameStructure, cfg: &TpConfig) -> Result<StateSet> {
    Ok(tp_sup_win_with(g, cfg)?.complement())
}

/// The dual enumeration: P2 memoryless strategies against P1 best responses.
/// Returns the states where some P2 strategy forces `TotalSup < 0`, with one
/// such strategy per state.
pub fn neg_sup_tp_p2_view(
    g: &GameStructure,
    cfg: &TpConfig,
) -> Result<(StateSet, Vec<Option<Vec<usize>>>)> {
    check_budget(g, cfg)?;
    let n = g.num_states();
    let mut won = StateSet::empty(n);
    let mut witness = vec![None; n];
    for choice in MemorylessStrategies::new(g, Player::P2) {
        // P1 wins TotalSup >= 0 in the one-player graph iff it can keep
        // limsup >= 0, the complement of the P2-controlled test. P1 fails iff
        // every path has limsup < 0, which we decide on negated weights by
        // checking that P1 cannot find a path with liminf of negated sums <= 0.
        let adj = restricted_edges(g, Player::P2, &choice);
        let p1_wins = one_player_sup_nonneg(&adj);
        for s in 0..n {
            if !p1_wins.contains(s) && won.insert(s) {
                witness[s] = Some(choice.clone());
            }
        }
    }
    Ok((won, witness))
}

/// In a one-player graph, states from which the controller can produce a
/// path with `limsup` of prefix sums `≥ 0`: reach a positive cycle, or reach
/// with total `≥ 0` a state on a zero cycle whose prefix sums stay `≥ 0`
/// from some point of the cycle.
fn one_player_sup_nonneg(adj: &[Vec<(usize, i64)>]) -> StateSet {
    let n = adj.len();
    // limsup >= 0 on a lasso: cycle sum > 0, or cycle sum = 0 and the maximum
    // prefix sum over one period of the cycle is >= 0. Longest simple-path
    // style search over (state, steps) is exact here because an optimal
    // lasso can be taken with stem and cycle simple.
    let mut result = StateSet::empty(n);
    for s in 0..n {
        // best[len][v]: max weight of a walk from s of exactly len edges ending at v
        let mut best: Vec<Vec<Option<i64>>> = vec![vec![None; n]; 2 * n + 1];
        best[0][s] = Some(0);
        for len in 0..2 * n {
            for u in 0..n {
                let Some(bu) = best[len][u] else { continue };
                for &(t, w) in &adj[u] {
                    let cand = bu + w;
                    if best[len + 1][t].is_none_or(|x| cand > x) {
                        best[len + 1][t] = Some(cand);
                    }
                }
            }
        }
        // A closed walk of length <= n at v with positive weight, reachable: check
        // via walks from s; otherwise a zero cycle through v reached with sum >= 0.
        let wins = (0..n).any(|v| {
            let reach = (0..=n).filter_map(|l| best[l][v]).max();
            let Some(r) = reach else { return false };
            let cyc = cycle_best(adj, v);
            match cyc {
                Some(c) if c > 0 => true,
                Some(0) => r >= 0,
                _ => false,
            }
        });
        if wins {
            result.insert(s);
        }
    }
    result
}

/// Maximum weight of a closed walk of length `1..=n` through `v`.
fn cycle_best(adj: &[Vec<(usize, i64)>], v: usize) -> Option<i64> {
    let n = adj.len();
    let mut cur: Vec<Option<i64>> = vec![None; n];
    cur[v] = Some(0);
    let mut best = None;
    for _ in 0..n {
        let mut next = vec![None; n];
        for u in 0..n {
            let Some(cu) = cur[u] else { continue };
            for &(t, w) in &adj[u] {
                let cand = cu + w;
                if next[t].is_none_or(|x: i64| cand > x) {
                    next[t] = Some(cand);
                }
            }
        }
        if let Some(c) = next[v] {
            best = Some(best.map_or(c, |b: i64| b.max(c)));
        }
        cur = next;
    }
    best
}

//! One-dimensional window objectives: fixed and bounded, direct and
//! prefix-independent.

use crate::arena::{attractor, subgame, Arena, Attractor, StateSet};
use crate::classical::{neg_sup_tp_with, require_one_dim, TpConfig};
use crate::error::{Error, Result};
use crate::model::{GameStructure, Player, SolveReport};

/// Best guaranteed window values.
///
/// `value(i, s)` is the optimal maximum prefix sum over the first `i` steps
/// from `s` when the play must stay in the live set, with P1 maximizing and
/// P2 minimizing. `None` stands for −∞ (the play is forced out of the live
/// set). A state wins the good window objective iff some `value(i, s) ≥ 0`.
#[derive(Clone, Debug)]
pub struct GoodWinTable {
    lmax: usize,
    values: Vec<Vec<Option<i64>>>,
    pub winning: StateSet,
    /// Number of edge evaluations performed.
    pub updates: u64,
}

impl GoodWinTable {
    pub fn lmax(&self) -> usize {
        self.lmax
    }

    /// `C_i(s)` for `0 ≤ i ≤ lmax`.
    pub fn value(&self, i: usize, s: usize) -> Option<i64> {
        self.values[i][s]
    }
}

fn check_window(g: &GameStructure, lmax: usize) -> Result<()> {
    require_one_dim(g)?;
    if lmax == 0 {
        return Err(Error::ZeroWindow);
    }
    let bound = (lmax as u128 + 1) * (g.max_abs_weight() as u128 + 1);
    if bound >= 1u128 << 62 {
        return Err(Error::Overflow(format!("window sums for lmax {lmax}")));
    }
    Ok(())
}

/// The window value of edge `w` into a state with continuation value `next`.
fn through(w: i64, next: Option<i64>) -> Option<i64> {
    next.map(|c| w + c.max(0))
}

/// Good window table on the subarena `within` with plays confined to `live`.
/// Edges leaving `within` are ignored; edges into `within \ live` are worth −∞.
pub(crate) fn good_win_in(
    g: &GameStructure,
    lmax: usize,
    within: &StateSet,
    live: &StateSet,
) -> GoodWinTable {
    let n = g.num_states();
    let mut values = Vec::with_capacity(lmax + 1);
    let zero: Vec<Option<i64>> = (0..n)
        .map(|s| if live.contains(s) { Some(0) } else { None })
        .collect();
    values.push(zero);
    let mut updates = 0u64;
    for i in 1..=lmax {
        let prev = &values[i - 1];
        let mut cur = vec![None; n];
        for s in live.iter() {
            let mut acc: Option<Option<i64>> = None;
            for e in g.out_edges(s) {
                if !within.contains(e.target) {
                    continue;
                }
                updates += 1;
                let v = through(e.weight[0], prev[e.target]);
                acc = Some(match acc {
                    None => v,
                    Some(a) => match g.owner(s) {
                        Player::P1 => a.max(v),
                        Player::P2 => a.min(v),
                    },
                });
            }
            cur[s] = acc.flatten();
        }
        values.push(cur);
    }
    let winning = StateSet::from_indices(
        n,
        live.iter()
            .filter(|&s| (1..=lmax).any(|i| matches!(values[i][s], Some(v) if v >= 0))),
    );
    GoodWinTable {
        lmax,
        values,
        winning,
        updates,
    }
}

/// States winning the good window objective `GW(0, lmax)` when plays must
/// stay inside `live`.
pub fn good_win(g: &GameStructure, lmax: usize, live: &StateSet) -> Result<GoodWinTable> {
    check_window(g, lmax)?;
    Ok(good_win_in(g, lmax, &g.all_states(), live))
}

/// Greatest set `X ⊆ within` whose states all win the good window objective
/// with plays confined to `X`, and its table.
fn direct_in(g: &GameStructure, lmax: usize, within: &StateSet) -> (StateSet, GoodWinTable) {
    let mut live = within.clone();
    loop {
        let table = good_win_in(g, lmax, within, &live);
        if table.winning == live {
            return (live, table);
        }
        live = table.winning.clone();
    }
}

/// States winning the direct fixed window objective `DirFixWMP(0, lmax)`.
pub fn direct_fwmp(g: &GameStructure, lmax: usize) -> Result<StateSet> {
    check_window(g, lmax)?;
    Ok(direct_in(g, lmax, &g.all_states()).0)
}

/// One iteration of the fixed window algorithm: inside the remaining
/// subarena `within`, the direct winning set and its P1 attractor.
#[derive(Clone, Debug)]
pub struct FixLayer {
    pub within: StateSet,
    pub direct: StateSet,
    pub attractor: Attractor,
    pub table: GoodWinTable,
}

/// Iterations of the fixed window algorithm, for strategy extraction.
pub fn fwmp_layers(g: &GameStructure, lmax: usize) -> Result<Vec<FixLayer>> {
    check_window(g, lmax)?;
    let mut within = g.all_states();
    let mut layers = Vec::new();
    while !within.is_empty() {
        let (direct, table) = direct_in(g, lmax, &within);
        if direct.is_empty() {
            break;
        }
        let attractor = attractor(g, Player::P1, &direct, &within);
        let next = within.difference(&attractor.set);
        layers.push(FixLayer {
            within,
            direct,
            attractor,
            table,
        });
        within = next;
    }
    Ok(layers)
}

/// States winning the fixed window objective `FixWMP(0, lmax)`.
pub fn fwmp(g: &GameStructure, lmax: usize) -> Result<StateSet> {
    let mut won = StateSet::empty(g.num_states());
    for l in fwmp_layers(g, lmax)? {
        won.union_with(&l.attractor.set);
    }
    Ok(won)
}

/// States from which P2 can force a position whose window never closes.
pub fn unb_open_window(g: &GameStructure) -> Result<StateSet> {
    unb_open_window_with(g, &TpConfig::default())
}

pub fn unb_open_window_with(g: &GameStructure, cfg: &TpConfig) -> Result<StateSet> {
    require_one_dim(g)?;
    let n = g.num_states();
    let mut lost = StateSet::empty(n);
    loop {
        let rest = lost.complement();
        if rest.is_empty() {
            return Ok(lost);
        }
        let sub = subgame(g, &rest);
        let neg = sub.lift(&neg_sup_tp_with(&sub.game, cfg)?, n);
        if neg.is_empty() {
            return Ok(lost);
        }
        let attr = attractor(g, Player::P2, &neg, &rest).set;
        lost.union_with(&attr);
    }
}

/// One round of the bounded window algorithm: `attracted` is P1's attractor
/// of `S \ open` in the full game, where `open` is the result of the previous
/// round's open-window computation.
#[derive(Clone, Debug)]
pub struct BoundedRound {
    pub open: StateSet,
    pub attracted: Attractor,
}

/// Rounds of the bounded window algorithm, for strategy extraction.
pub fn bounded_rounds(g: &GameStructure, cfg: &TpConfig) -> Result<Vec<BoundedRound>> {
    require_one_dim(g)?;
    let n = g.num_states();
    let all = g.all_states();
    let mut won = StateSet::empty(n);
    let mut open = unb_open_window_with(g, cfg)?;
    let mut rounds = Vec::new();
    while open != won.complement() {
        if rounds.len() > n {
            return Err(Error::Internal(
                "bounded window iteration did not stabilize".into(),
            ));
        }
        let attracted = attractor(g, Player::P1, &open.complement(), &all);
        won = attracted.set.clone();
        rounds.push(BoundedRound {
            open: open.clone(),
            attracted,
        });
        let rest = won.complement();
        open = if rest.is_empty() {
            rest
        } else {
            let sub = subgame(g, &rest);
            sub.lift(&unb_open_window_with(&sub.game, cfg)?, n)
        };
    }
    Ok(rounds)
}

/// Winning sets of the bounded window objective `BndWMP(0)`.
pub fn bounded_wmp(g: &GameStructure) -> Result<SolveReport> {
    bounded_wmp_with(g, &TpConfig::default())
}

pub fn bounded_wmp_with(g: &GameStructure, cfg: &TpConfig) -> Result<SolveReport> {
    let rounds = bounded_rounds(g, cfg)?;
    let won = rounds
        .last()
        .map(|r| r.attracted.set.clone())
        .unwrap_or_else(|| StateSet::empty(g.num_states()));
    let mut report = SolveReport::from_winning(won);
    if !report.winning_p1.is_empty() {
        report.witness_lmax = Some(sufficient_window(g));
    }
    Ok(report)
}

/// States winning the direct bounded window objective `DirBndWMP(0)`.
pub fn direct_bounded_wmp(g: &GameStructure) -> Result<StateSet> {
    direct_bounded_wmp_with(g, &TpConfig::default())
}

pub fn direct_bounded_wmp_with(g: &GameStructure, cfg: &TpConfig) -> Result<StateSet> {
    Ok(unb_open_window_with(g, cfg)?.complement())
}

/// A window size for which fixed and bounded window objectives coincide:
/// `(|S| − 1)·(|S|·W + 1)`, at least 1. Saturates on overflow.
pub fn sufficient_window(g: &GameStructure) -> usize {
    let n = g.num_states();
    let w = g.max_abs_weight() as usize;
    n.saturating_sub(1)
        .saturating_mul(n.saturating_mul(w).saturating_add(1))
        .max(1)
}

/// The game with every weight `w` replaced by `(|S|+1)·w + 1`, whose bounded
/// window winners are the mean-payoff winners of `g`.
pub fn shift_for_mp_reduction(g: &GameStructure) -> Result<GameStructure> {
    require_one_dim(g)?;
    let scale = g.num_states() as i64 + 1;
    g.map_weights(1, |e| {
        e.weight[0]
            .checked_mul(scale)
            .and_then(|x| x.checked_add(1))
            .map(|x| vec![x])
            .ok_or_else(|| Error::Overflow("mean-payoff shift".into()))
    })
}

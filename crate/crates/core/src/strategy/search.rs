use std::ops::ControlFlow;

use super::machine::MooreStrategy;
use super::verify::verify_strategy;
use crate::arena::Arena;
use crate::error::{Error, Result};
use crate::model::{GameStructure, ObjectiveSpec, Player, StateId};

/// Default limit on the number of candidate machines.
pub const DEFAULT_SEARCH_BUDGET: u64 = 1_000_000;

/// Upper bound on the number of machines with `size` memory states.
pub fn machine_count(g: &GameStructure, player: Player, size: usize) -> u64 {
    let n = g.num_states() as u32;
    let updates = (size as u64).saturating_pow(size as u32 * n);
    let actions = (0..g.num_states())
        .filter(|&s| g.owner(s) == player)
        .fold(1u64, |acc, s| {
            acc.saturating_mul((g.out_degree(s) as u64).saturating_pow(size as u32))
        });
    updates.saturating_mul(actions)
}

/// Calls `f` on every machine of `player` with exactly `size` memory states,
/// all reachable, up to renaming of non-initial memory states.
pub fn for_each_machine(
    g: &GameStructure,
    player: Player,
    size: usize,
    mut f: impl FnMut(&MooreStrategy) -> ControlFlow<()>,
) -> ControlFlow<()> {
    let n = g.num_states();
    let names: Vec<String> = (0..size).map(|i| format!("m{i}")).collect();
    let mut strat = MooreStrategy::new(player, names, 0, n);
    let cells = size * n;
    // update entries in row-major order form a restricted growth string
    let mut upd = vec![0usize; cells];
    let mut prefix_max = vec![0usize; cells + 1];
    let owned: Vec<(usize, StateId)> = (0..size)
        .flat_map(|m| (0..n).map(move |s| (m, s)))
        .filter(|&(_, s)| g.owner(s) == player)
        .collect();
    let succ: Vec<Vec<StateId>> = (0..n).map(|s| g.successors(s).collect()).collect();
    fn actions(
        strat: &mut MooreStrategy,
        owned: &[(usize, StateId)],
        succ: &[Vec<StateId>],
        i: usize,
        f: &mut dyn FnMut(&MooreStrategy) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        if i == owned.len() {
            return f(strat);
        }
        let (m, s) = owned[i];
        for &t in &succ[s] {
            strat.set_action(m, s, t);
            actions(strat, owned, succ, i + 1, f)?;
        }
        ControlFlow::Continue(())
    }
    /// Memory size, state count, owned (memory, state) slots, successors.
    type Ctx<'a> = (usize, usize, &'a [(usize, StateId)], &'a [Vec<StateId>]);
    fn updates(
        strat: &mut MooreStrategy,
        upd: &mut [usize],
        prefix_max: &mut [usize],
        i: usize,
        ctx: &Ctx<'_>,
        f: &mut dyn FnMut(&MooreStrategy) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        let (size, n, owned, succ) = *ctx;
        if i == upd.len() {
            if prefix_max[i] + 1 != size || !strat.reachable_memory().iter().all(|&r| r) {
                return ControlFlow::Continue(());
            }
            return actions(strat, owned, succ, 0, f);
        }
        let hi = (prefix_max[i] + 1).min(size - 1);
        for v in 0..=hi {
            upd[i] = v;
            prefix_max[i + 1] = prefix_max[i].max(v);
            strat.set_update(i / n, i % n, v);
            updates(strat, upd, prefix_max, i + 1, ctx, f)?;
        }
        ControlFlow::Continue(())
    }
    let ctx = (size, n, owned.as_slice(), succ.as_slice());
    updates(&mut strat, &mut upd, &mut prefix_max, 0, &ctx, &mut f)
}

/// A verified winning strategy with at most `bound` memory states, if any.
/// For P2 "winning" means that no consistent play satisfies `spec`.
pub fn min_memory_search(
    g: &GameStructure,
    spec: &ObjectiveSpec,
    player: Player,
    bound: usize,
) -> Result<Option<MooreStrategy>> {
    min_memory_search_with(g, spec, player, bound, DEFAULT_SEARCH_BUDGET)
}

pub fn min_memory_search_with(
    g: &GameStructure,
    spec: &ObjectiveSpec,
    player: Player,
    bound: usize,
    budget: u64,
) -> Result<Option<MooreStrategy>> {
    let total: u64 = (1..=bound)
        .map(|m| machine_count(g, player, m))
        .fold(0u64, |a, b| a.saturating_add(b));
    if total > budget {
        return Err(Error::Budget {
            what: format!("{total} candidate machines"),
            budget: budget as usize,
        });
    }
    for size in 1..=bound {
        let mut found = None;
        let mut failure = None;
        let _ = for_each_machine(g, player, size, |m| match verify_strategy(g, m, spec) {
            Ok(v) if v.pass => {
                found = Some(m.clone());
                ControlFlow::Break(())
            }
            Ok(_) => ControlFlow::Continue(()),
            Err(e) => {
                failure = Some(e);
                ControlFlow::Break(())
            }
        });
        if let Some(e) = failure {
            return Err(e);
        }
        if found.is_some() {
            return Ok(found);
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn p2_needs_two_memory_states_on_zero_cycles() {
        let g = fixtures::fix3();
        let spec = ObjectiveSpec::fix(3);
        assert!(min_memory_search(&g, &spec, Player::P2, 1)
            .unwrap()
            .is_none());
        let m = min_memory_search(&g, &spec, Player::P2, 2)
            .unwrap()
            .unwrap();
        assert_eq!(m.memory_size(), 2);
        assert!(verify_strategy(&g, &m, &spec).unwrap().pass);
    }

    #[test]
    fn gadget_pair_has_no_small_p1_strategy() {
        let g = fixtures::fix5();
        let spec = ObjectiveSpec::fix(3);
        assert!(min_memory_search(&g, &spec, Player::P1, 1)
            .unwrap()
            .is_none());
        assert!(min_memory_search(&g, &spec, Player::P1, 2)
            .unwrap()
            .is_none());
    }

    #[test]
    fn enumeration_is_canonical() {
        let g = fixtures::fix1();
        let mut count = 0;
        let _ = for_each_machine(&g, Player::P1, 2, |m| {
            assert!(m.reachable_memory().iter().all(|&r| r));
            count += 1;
            ControlFlow::Continue(())
        });
        // updates (m0,a) -> m1 forced; (m1,a) free
        assert_eq!(count, 2);
        assert_eq!(machine_count(&g, Player::P1, 2), 4);
    }

    #[test]
    fn budget_is_enforced() {
        let g = fixtures::fix4();
        let spec = ObjectiveSpec::fix(4);
        assert!(matches!(
            min_memory_search_with(&g, &spec, Player::P1, 3, 1000),
            Err(Error::Budget { budget: 1000, .. })
        ));
    }
}

//! Arena abstraction, state sets and attractor computation.

use std::collections::VecDeque;
use std::fmt;

use fixedbitset::FixedBitSet;

use crate::model::Player;

/// A set of state indices over a fixed universe `0..capacity`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct StateSet {
    bits: FixedBitSet,
}

impl StateSet {
    pub fn empty(capacity: usize) -> Self {
        StateSet {
            bits: FixedBitSet::with_capacity(capacity),
        }
    }

    pub fn full(capacity: usize) -> Self {
        let mut bits = FixedBitSet::with_capacity(capacity);
        bits.insert_range(..);
        StateSet { bits }
    }

    pub fn from_indices(capacity: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut set = StateSet::empty(capacity);
        for i in indices {
            set.insert(i);
        }
        set
    }

    pub fn capacity(&self) -> usize {
        self.bits.len()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.bits.contains(i)
    }

    /// Returns true if the element was absent.
    pub fn insert(&mut self, i: usize) -> bool {
        !self.bits.put(i)
    }

    pub fn remove(&mut self, i: usize) {
        self.bits.set(i, false);
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_clear()
    }

    pub fn is_full(&self) -> bool {
        self.len() == self.capacity()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.ones()
    }

    pub fn is_subset(&self, other: &StateSet) -> bool {
        self.bits.is_subset(&other.bits)
    }

    pub fn union(&self, other: &StateSet) -> StateSet {
        let mut bits = self.bits.clone();
        bits.union_with(&other.bits);
        StateSet { bits }
    }

    pub fn intersection(&self, other: &StateSet) -> StateSet {
        let mut bits = self.bits.clone();
        bits.intersect_with(&other.bits);
        StateSet { bits }
    }

    pub fn difference(&self, other: &StateSet) -> StateSet {
        let mut bits = self.bits.clone();
        bits.difference_with(&other.bits);
        StateSet { bits }
    }

    pub fn complement(&self) -> StateSet {
        let mut bits = self.bits.clone();
        bits.toggle_range(..);
        StateSet { bits }
    }

    pub fn union_with(&mut self, other: &StateSet) {
        self.bits.union_with(&other.bits);
    }

    pub fn difference_with(&mut self, other: &StateSet) {
        self.bits.difference_with(&other.bits);
    }

    pub fn intersect_with(&mut self, other: &StateSet) {
        self.bits.intersect_with(&other.bits);
    }
}

impl fmt::Debug for StateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// A finite two-player turn-based graph. Every state has at least one successor.
pub trait Arena {
    fn num_states(&self) -> usize;
    fn owner(&self, s: usize) -> Player;
    fn successors(&self, s: usize) -> impl Iterator<Item = usize> + '_;
    fn predecessors(&self, s: usize) -> impl Iterator<Item = usize> + '_;
}

/// Result of an attractor computation. `rank[s]` is the round in which `s` joined,
/// with targets at rank 0 and states outside the attractor at `None`.
#[derive(Clone, Debug)]
pub struct Attractor {
    pub set: StateSet,
    pub rank: Vec<Option<usize>>,
}

impl Attractor {
    /// A successor of `s` inside `within` with strictly smaller rank.
    /// For states of `player` in the attractor this always exists unless `s` is a target.
    pub fn descend<A: Arena>(&self, arena: &A, within: &StateSet, s: usize) -> Option<usize> {
        let r = self.rank[s]?;
        arena
            .successors(s)
            .filter(|&t| within.contains(t))
            .find(|&t| matches!(self.rank[t], Some(rt) if rt < r))
    }
}

/// Attractor of `target` for `player` in the subarena induced by `within`.
///
/// Edges leaving `within` are ignored, so `within` should be a trap for the
/// caller's purposes. `target` is intersected with `within`.
pub fn attractor<A: Arena>(
    arena: &A,
    player: Player,
    target: &StateSet,
    within: &StateSet,
) -> Attractor {
    let n = arena.num_states();
    let mut rank = vec![None; n];
    let mut set = StateSet::empty(n);
    let mut remaining: Vec<usize> = vec![0; n];
    for s in within.iter() {
        remaining[s] = arena.successors(s).filter(|&t| within.contains(t)).count();
    }
    let mut queue = VecDeque::new();
    for s in target.iter().filter(|&s| within.contains(s)) {
        set.insert(s);
        rank[s] = Some(0);
        queue.push_back(s);
    }
    while let Some(t) = queue.pop_front() {
        let rt = rank[t].unwrap_or(0);
        for s in arena.predecessors(t) {
            if !within.contains(s) || set.contains(s) {
                continue;
            }
            let join = if arena.owner(s) == player {
                true
            } else {
                remaining[s] -= 1;
                remaining[s] == 0
            };
            if join {
                set.insert(s);
                rank[s] = Some(rt + 1);
                queue.push_back(s);
            }
        }
    }
    Attractor { set, rank }
}

/// `attractor` restricted to the set result.
pub fn attractor_set<A: Arena>(
    arena: &A,
    player: Player,
    target: &StateSet,
    within: &StateSet,
) -> StateSet {
    attractor(arena, player, target, within).set
}

/// A restriction `G↓keep` with the states left without outgoing edges.
#[derive(Clone, Debug)]
pub struct Subgame {
    pub game: crate::model::GameStructure,
    /// `map[i]` is the original index of subgame state `i`.
    pub map: Vec<usize>,
    /// Dead ends, as original indices.
    pub dead_ends: StateSet,
}

impl Subgame {
    /// Lifts a set over subgame indices back to the original game.
    pub fn lift(&self, set: &StateSet, capacity: usize) -> StateSet {
        StateSet::from_indices(capacity, set.iter().map(|i| self.map[i]))
    }
}

/// Restriction of `g` to `keep`. Dead ends are reported, not removed.
pub fn subgame(g: &crate::model::GameStructure, keep: &StateSet) -> Subgame {
    let (game, map) = g.subgame(keep);
    let dead_ends = StateSet::from_indices(
        g.num_states(),
        (0..game.num_states())
            .filter(|&i| game.out_degree(i) == 0)
            .map(|i| map[i]),
    );
    Subgame {
        game,
        map,
        dead_ends,
    }
}

/// States from which P1 can keep the play inside `safe` forever.
pub fn solve_safety<A: Arena>(arena: &A, safe: &StateSet) -> StateSet {
    solve_safety_within(arena, safe, &StateSet::full(arena.num_states()))
}

fn solve_safety_within<A: Arena>(arena: &A, safe: &StateSet, within: &StateSet) -> StateSet {
    let unsafe_states = within.difference(safe);
    let lost = attractor_set(arena, Player::P2, &unsafe_states, within);
    within.difference(&lost)
}

/// Layers of the co-Büchi fixpoint: in round `j`, `safe_core` is where P1 can
/// avoid `bad` forever within the remaining subarena and `attracted` is its
/// P1 attractor there.
#[derive(Clone, Debug)]
pub struct CoBuchiLayer {
    pub within: StateSet,
    pub safe_core: StateSet,
    pub attracted: Attractor,
}

/// States from which P1 can ensure `bad` is visited only finitely often.
pub fn solve_cobuchi<A: Arena>(arena: &A, bad: &StateSet) -> StateSet {
    let layers = cobuchi_layers(arena, bad);
    let mut won = StateSet::empty(arena.num_states());
    for l in &layers {
        won.union_with(&l.attracted.set);
    }
    won
}

/// The iterations of [`solve_cobuchi`], for strategy extraction.
///
/// Each round removes a P1 attractor, so the remaining subarena is a P2 trap
/// and stays free of dead ends.
pub fn cobuchi_layers<A: Arena>(arena: &A, bad: &StateSet) -> Vec<CoBuchiLayer> {
    let n = arena.num_states();
    let mut within = StateSet::full(n);
    let mut layers = Vec::new();
    loop {
        let safe = within.difference(bad);
        let core = solve_safety_within(arena, &safe, &within);
        if core.is_empty() {
            break;
        }
        let attracted = attractor(arena, Player::P1, &core, &within);
        let next = within.difference(&attracted.set);
        layers.push(CoBuchiLayer {
            within: within.clone(),
            safe_core: core,
            attracted,
        });
        within = next;
        if within.is_empty() {
            break;
        }
    }
    layers
}

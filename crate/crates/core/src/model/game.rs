use std::collections::HashMap;

use crate::arena::{Arena, StateSet};
use crate::error::{Error, Result, Violation};

pub type StateId = usize;

/// Largest accepted absolute weight. Keeps window sums and value iteration
/// within `i64` for any game that fits in memory.
pub const MAX_ABS_WEIGHT: i64 = 1 << 40;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Player {
    P1,
    P2,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::P1 => Player::P2,
            Player::P2 => Player::P1,
        }
    }

    pub fn number(self) -> u8 {
        match self {
            Player::P1 => 1,
            Player::P2 => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub source: StateId,
    pub target: StateId,
    pub weight: Vec<i64>,
}

/// Mutable construction helper for [`GameStructure`].
#[derive(Clone, Debug, Default)]
pub struct GameBuilder {
    dims: usize,
    names: Vec<String>,
    owners: Vec<Player>,
    edges: Vec<Edge>,
    init: StateId,
    index: HashMap<String, StateId>,
}

impl GameBuilder {
    pub fn new(dims: usize) -> Self {
        GameBuilder {
            dims,
            ..Default::default()
        }
    }

    /// Adds a state, failing on a duplicate name.
    pub fn state(&mut self, name: &str, owner: Player) -> Result<StateId> {
        if self.index.contains_key(name) {
            return Err(Error::DuplicateState(name.to_string()));
        }
        let id = self.names.len();
        self.names.push(name.to_string());
        self.owners.push(owner);
        self.index.insert(name.to_string(), id);
        Ok(id)
    }

    pub fn id(&self, name: &str) -> Option<StateId> {
        self.index.get(name).copied()
    }

    pub fn edge(&mut self, source: StateId, target: StateId, weight: Vec<i64>) -> &mut Self {
        self.edges.push(Edge {
            source,
            target,
            weight,
        });
        self
    }

    /// Adds an edge between named states, failing if either is undeclared.
    pub fn edge_by_name(&mut self, source: &str, target: &str, weight: Vec<i64>) -> Result<()> {
        let s = self
            .id(source)
            .ok_or_else(|| Error::UnknownState(source.to_string()))?;
        let t = self
            .id(target)
            .ok_or_else(|| Error::UnknownState(target.to_string()))?;
        self.edge(s, t, weight);
        Ok(())
    }

    pub fn init(&mut self, init: StateId) -> &mut Self {
        self.init = init;
        self
    }

    /// Builds without checking structural invariants.
    pub fn build_unchecked(self) -> GameStructure {
        let n = self.names.len();
        let mut out = vec![Vec::new(); n];
        let mut inc = vec![Vec::new(); n];
        for (i, e) in self.edges.iter().enumerate() {
            if e.source < n && e.target < n {
                out[e.source].push(i);
                inc[e.target].push(i);
            }
        }
        GameStructure {
            dims: self.dims,
            names: self.names,
            owners: self.owners,
            edges: self.edges,
            init: self.init,
            index: self.index,
            out,
            inc,
        }
    }

    /// Builds and validates.
    pub fn build(self) -> Result<GameStructure> {
        let g = self.build_unchecked();
        let v = g.validate();
        if v.is_empty() {
            Ok(g)
        } else {
            Err(Error::InvalidGame(v))
        }
    }
}

/// A finite turn-based game graph with integer weight vectors on edges.
#[derive(Clone, Debug)]
pub struct GameStructure {
    dims: usize,
    names: Vec<String>,
    owners: Vec<Player>,
    edges: Vec<Edge>,
    init: StateId,
    index: HashMap<String, StateId>,
    out: Vec<Vec<usize>>,
    inc: Vec<Vec<usize>>,
}

impl PartialEq for GameStructure {
    fn eq(&self, other: &Self) -> bool {
        self.dims == other.dims
            && self.names == other.names
            && self.owners == other.owners
            && self.edges == other.edges
            && self.init == other.init
    }
}

impl Eq for GameStructure {}

impl GameStructure {
    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn init(&self) -> StateId {
        self.init
    }

    pub fn name(&self, s: StateId) -> &str {
        &self.names[s]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn owners(&self) -> &[Player] {
        &self.owners
    }

    pub fn id(&self, name: &str) -> Option<StateId> {
        self.index.get(name).copied()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, i: usize) -> &Edge {
        &self.edges[i]
    }

    /// Outgoing edges of `s` in declaration order.
    pub fn out_edges(&self, s: StateId) -> impl Iterator<Item = &Edge> + '_ {
        self.out[s].iter().map(move |&i| &self.edges[i])
    }

    pub fn in_edges(&self, s: StateId) -> impl Iterator<Item = &Edge> + '_ {
        self.inc[s].iter().map(move |&i| &self.edges[i])
    }

    pub fn out_degree(&self, s: StateId) -> usize {
        self.out[s].len()
    }

    /// Weight of the edge `s -> t`, if present.
    pub fn weight(&self, s: StateId, t: StateId) -> Option<&[i64]> {
        self.out_edges(s)
            .find(|e| e.target == t)
            .map(|e| e.weight.as_slice())
    }

    /// Largest absolute weight over all edges and dimensions.
    pub fn max_abs_weight(&self) -> i64 {
        self.edges
            .iter()
            .flat_map(|e| e.weight.iter())
            .map(|w| w.saturating_abs())
            .max()
            .unwrap_or(0)
    }

    /// Bits needed for `W`, at least 1.
    pub fn weight_bits(&self) -> u32 {
        (64 - (self.max_abs_weight() as u64).leading_zeros()).max(1)
    }

    pub fn with_init(&self, init: StateId) -> GameStructure {
        let mut g = self.clone();
        g.init = init;
        g
    }

    pub fn all_states(&self) -> StateSet {
        StateSet::full(self.names.len())
    }

    pub fn set_of(&self, names: &[&str]) -> StateSet {
        StateSet::from_indices(
            self.num_states(),
            names.iter().map(|n| {
                self.id(n)
                    .unwrap_or_else(|| panic!("no state named {n} in game"))
            }),
        )
    }

    /// Space-separated names of the states in `set`, in index order.
    pub fn format_set(&self, set: &StateSet) -> String {
        set.iter()
            .map(|s| self.names[s].as_str())
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Lists every structural problem. An empty result means the game is well formed.
    pub fn validate(&self) -> Vec<Violation> {
        let mut v = Vec::new();
        let n = self.names.len();
        if n == 0 {
            v.push(Violation::NoStates);
        }
        if self.dims == 0 {
            v.push(Violation::ZeroDimensions);
        }
        if n > 0 && self.init >= n {
            v.push(Violation::InitOutOfRange(self.init));
        }
        let mut seen = std::collections::HashSet::new();
        for e in &self.edges {
            if e.source >= n || e.target >= n {
                continue;
            }
            if e.weight.len() != self.dims {
                v.push(Violation::WeightArity {
                    source: self.names[e.source].clone(),
                    target: self.names[e.target].clone(),
                    expected: self.dims,
                    got: e.weight.len(),
                });
            }
            if e.weight
                .iter()
                .any(|w| w.unsigned_abs() > MAX_ABS_WEIGHT as u64)
            {
                v.push(Violation::WeightRange {
                    source: self.names[e.source].clone(),
                    target: self.names[e.target].clone(),
                });
            }
            if !seen.insert((e.source, e.target)) {
                v.push(Violation::DuplicateEdge {
                    source: self.names[e.source].clone(),
                    target: self.names[e.target].clone(),
                });
            }
        }
        for s in 0..n {
            if self.out[s].is_empty() {
                v.push(Violation::DeadEnd(self.names[s].clone()));
            }
        }
        v
    }

    /// Copy of the game without the edge at `index`. Used to build invalid inputs.
    pub fn without_edge(&self, index: usize) -> GameStructure {
        let mut b = self.to_builder();
        b.edges.remove(index);
        b.build_unchecked()
    }

    pub fn to_builder(&self) -> GameBuilder {
        GameBuilder {
            dims: self.dims,
            names: self.names.clone(),
            owners: self.owners.clone(),
            edges: self.edges.clone(),
            init: self.init,
            index: self.index.clone(),
        }
    }

    /// Same graph with every edge weight replaced by `f(edge)`.
    pub fn map_weights(
        &self,
        dims: usize,
        mut f: impl FnMut(&Edge) -> Result<Vec<i64>>,
    ) -> Result<GameStructure> {
        let mut b = self.to_builder();
        b.dims = dims;
        for e in b.edges.iter_mut() {
            e.weight = f(e)?;
        }
        Ok(b.build_unchecked())
    }

    /// Subgame induced by `keep`, plus the map from new indices to old ones.
    /// Edges leaving `keep` are dropped; the caller must ensure no dead ends arise.
    /// The initial state is kept if possible, else the first kept state.
    pub fn subgame(&self, keep: &StateSet) -> (GameStructure, Vec<StateId>) {
        let map: Vec<StateId> = keep.iter().collect();
        let mut back = vec![usize::MAX; self.num_states()];
        for (i, &s) in map.iter().enumerate() {
            back[s] = i;
        }
        let mut b = GameBuilder::new(self.dims);
        for &s in &map {
            b.state(&self.names[s], self.owners[s])
                .expect("names are unique");
        }
        for e in &self.edges {
            if keep.contains(e.source) && keep.contains(e.target) {
                b.edge(back[e.source], back[e.target], e.weight.clone());
            }
        }
        let init = if keep.contains(self.init) {
            back[self.init]
        } else {
            0
        };
        b.init(init);
        (b.build_unchecked(), map)
    }

    /// Sum of `dim` weights along `path` (consecutive states).
    pub fn path_weight(&self, path: &[StateId], dim: usize) -> Option<i64> {
        let mut total = 0i64;
        for w in path.windows(2) {
            total = total.checked_add(self.weight(w[0], w[1])?[dim])?;
        }
        Some(total)
    }
}

impl Arena for GameStructure {
    fn num_states(&self) -> usize {
        self.names.len()
    }

    fn owner(&self, s: usize) -> Player {
        self.owners[s]
    }

    fn successors(&self, s: usize) -> impl Iterator<Item = usize> + '_ {
        self.out[s].iter().map(move |&i| self.edges[i].target)
    }

    fn predecessors(&self, s: usize) -> impl Iterator<Item = usize> + '_ {
        self.inc[s].iter().map(move |&i| self.edges[i].source)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn fixtures_are_valid() {
        for (name, g) in fixtures::all() {
            assert!(g.validate().is_empty(), "{name}");
        }
    }

    #[test]
    fn removing_the_only_edge_leaves_a_dead_end() {
        let g = fixtures::fix1().without_edge(0);
        assert_eq!(g.validate(), vec![Violation::DeadEnd("a".into())]);
    }

    #[test]
    fn short_weight_vector_is_an_arity_violation() {
        let mut b = fixtures::fix5().to_builder();
        b.edges[0].weight.truncate(1);
        let v = b.build_unchecked().validate();
        assert_eq!(
            v,
            vec![Violation::WeightArity {
                source: "s1".into(),
                target: "s1L".into(),
                expected: 2,
                got: 1
            }]
        );
    }

    #[test]
    fn builder_rejects_bad_input() {
        let mut b = GameBuilder::new(1);
        let a = b.state("a", Player::P1).unwrap();
        assert!(matches!(
            b.state("a", Player::P2),
            Err(Error::DuplicateState(_))
        ));
        assert!(matches!(
            b.edge_by_name("a", "z", vec![0]),
            Err(Error::UnknownState(_))
        ));
        b.edge(a, a, vec![0]).edge(a, a, vec![1]);
        match b.build() {
            Err(Error::InvalidGame(v)) => {
                assert_eq!(
                    v,
                    vec![Violation::DuplicateEdge {
                        source: "a".into(),
                        target: "a".into()
                    }]
                )
            }
            other => panic!("unexpected {other:?}"),
        }
        let mut b = GameBuilder::new(1);
        let a = b.state("a", Player::P1).unwrap();
        b.edge(a, a, vec![MAX_ABS_WEIGHT + 1]);
        assert!(matches!(b.build(), Err(Error::InvalidGame(_))));
    }

    #[test]
    fn derived_quantities() {
        let g = fixtures::fix4();
        assert_eq!(g.max_abs_weight(), 11);
        assert_eq!(g.weight_bits(), 4);
        let s = g.id("s").unwrap();
        assert_eq!(g.out_degree(s), 3);
        let cycle: Vec<StateId> = ["s", "b1", "b2", "s"]
            .iter()
            .map(|n| g.id(n).unwrap())
            .collect();
        assert_eq!(g.path_weight(&cycle, 0), Some(-3));
        assert_eq!(g.format_set(&g.set_of(&["b2", "s"])), "s b2");
    }

    #[test]
    fn subgame_keeps_internal_edges() {
        let g = fixtures::fix3();
        let (sub, map) = g.subgame(&g.set_of(&["y1", "y2"]));
        assert_eq!(sub.num_states(), 2);
        assert_eq!(sub.num_edges(), 1);
        assert_eq!(map, vec![g.id("y1").unwrap(), g.id("y2").unwrap()]);
        assert_eq!(sub.validate(), vec![Violation::DeadEnd("y2".into())]);
    }
}

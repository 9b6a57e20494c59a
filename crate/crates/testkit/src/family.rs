//! Exhaustive enumeration of tiny one-dimensional games up to renaming.

use wmp_core::model::{GameBuilder, GameStructure, Player};

#[derive(Clone, Debug)]
pub struct TinyFamily {
    pub max_states: usize,
    pub max_degree: usize,
    pub weights: Vec<i64>,
}

impl Default for TinyFamily {
    fn default() -> Self {
        TinyFamily {
            max_states: 3,
            max_degree: 2,
            weights: vec![-1, 0, 1],
        }
    }
}

/// A state's owner and its sorted `(target, weight)` edges.
type Local = (Player, Vec<(usize, i64)>);

impl TinyFamily {
    /// Every choice of owner and out-edges for one state of an `n`-state game.
    fn locals(&self, n: usize) -> Vec<Local> {
        let mut edge_sets: Vec<Vec<(usize, i64)>> = Vec::new();
        for mask in 1u32..1 << n {
            let targets: Vec<usize> = (0..n).filter(|t| mask >> t & 1 == 1).collect();
            if targets.len() > self.max_degree {
                continue;
            }
            let mut sets = vec![Vec::new()];
            for &t in &targets {
                sets = sets
                    .into_iter()
                    .flat_map(|set: Vec<(usize, i64)>| {
                        self.weights.iter().map(move |&w| {
                            let mut set = set.clone();
                            set.push((t, w));
                            set
                        })
                    })
                    .collect();
            }
            edge_sets.extend(sets);
        }
        [Player::P1, Player::P2]
            .into_iter()
            .flat_map(|p| edge_sets.iter().map(move |e| (p, e.clone())))
            .collect()
    }

    /// Whether no renaming of the states gives a lexicographically smaller
    /// description.
    fn is_canonical(game: &[Local]) -> bool {
        let n = game.len();
        let mut perm: Vec<usize> = (0..n).collect();
        loop {
            let mut renamed = vec![(Player::P1, Vec::new()); n];
            for (s, (owner, edges)) in game.iter().enumerate() {
                let mut e: Vec<(usize, i64)> = edges.iter().map(|&(t, w)| (perm[t], w)).collect();
                e.sort_unstable();
                renamed[perm[s]] = (*owner, e);
            }
            if renamed.as_slice() < game {
                return false;
            }
            if !next_permutation(&mut perm) {
                return true;
            }
        }
    }

    /// All games of the family with at most `max_states` states, one per
    /// renaming class.
    pub fn games(&self) -> Vec<GameStructure> {
        let mut out = Vec::new();
        for n in 1..=self.max_states {
            let locals = self.locals(n);
            let total = locals.len().pow(n as u32);
            for code in 0..total {
                let mut c = code;
                let game: Vec<Local> = (0..n)
                    .map(|_| {
                        let l = locals[c % locals.len()].clone();
                        c /= locals.len();
                        l
                    })
                    .collect();
                if Self::is_canonical(&game) {
                    out.push(build(&game));
                }
            }
        }
        out
    }
}

fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len())
        .rev()
        .find(|&j| p[j] > p[i - 1])
        .expect("pivot");
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

fn build(game: &[Local]) -> GameStructure {
    let mut b = GameBuilder::new(1);
    for (s, (owner, _)) in game.iter().enumerate() {
        b.state(&format!("s{s}"), *owner).expect("fresh name");
    }
    for (s, (_, edges)) in game.iter().enumerate() {
        for &(t, w) in edges {
            b.edge(s, t, vec![w]);
        }
    }
    b.init(0);
    b.build().expect("family games are valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_state_games() {
        let f = TinyFamily {
            max_states: 1,
            ..TinyFamily::default()
        };
        // two owners, one self-loop with three weights
        assert_eq!(f.games().len(), 6);
    }

    #[test]
    fn two_state_games_up_to_swapping() {
        let f = TinyFamily {
            max_states: 2,
            ..TinyFamily::default()
        };
        // 30 local choices per state; 30 symmetric pairs stay single
        assert_eq!(f.games().len(), 6 + (30 * 30 + 30) / 2);
    }

    #[test]
    fn permutations_are_exhaustive() {
        let mut p = vec![0, 1, 2];
        let mut count = 1;
        while next_permutation(&mut p) {
            count += 1;
        }
        assert_eq!(count, 6);
        assert_eq!(p, vec![2, 1, 0]);
    }
}

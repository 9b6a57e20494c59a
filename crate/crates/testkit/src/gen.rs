//! Seeded random games.
//!
//! The generator is pinned: xoshiro256++ seeded through SplitMix64 (the
//! `seed_from_u64` of `rand_xoshiro`), and bounded draws use rejection
//! sampling on `next_u64`. For each state in order it draws the owner, then
//! for each state the out-degree, a partial Fisher-Yates shuffle of the
//! targets and the weights of each edge dimension by dimension. The initial
//! state is `s0`.

use num_rational::Ratio;
use rand_xoshiro::rand_core::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use wmp_core::model::{serialize_game, GameBuilder, GameStructure, Player};

/// Version of the generation procedure, written to every header.
pub const GENERATOR_VERSION: &str = "wmp-gen/1 xoshiro256++ splitmix64";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenSpec {
    pub states: usize,
    pub dims: usize,
    pub max_abs_weight: i64,
    /// Inclusive range of out-degrees, clamped to the number of states.
    pub out_degree: (usize, usize),
    pub p2_fraction: Ratio<u32>,
    pub seed: u64,
}

impl GenSpec {
    pub fn new(states: usize, dims: usize, max_abs_weight: i64, seed: u64) -> Self {
        GenSpec {
            states,
            dims,
            max_abs_weight,
            out_degree: (1, 3),
            p2_fraction: Ratio::new(1, 2),
            seed,
        }
    }

    pub fn with_out_degree(mut self, min: usize, max: usize) -> Self {
        self.out_degree = (min, max);
        self
    }

    pub fn with_p2_fraction(mut self, p: Ratio<u32>) -> Self {
        self.p2_fraction = p;
        self
    }

    /// Comment line recording the generator and every parameter.
    pub fn header(&self) -> String {
        format!(
            "# {} seed={} states={} dims={} W={} deg={}..{} p2={}",
            GENERATOR_VERSION,
            self.seed,
            self.states,
            self.dims,
            self.max_abs_weight,
            self.out_degree.0,
            self.out_degree.1,
            self.p2_fraction
        )
    }
}

/// Uniform draw from `0..n` by rejection.
fn below(rng: &mut Xoshiro256PlusPlus, n: u64) -> u64 {
    let zone = u64::MAX - (u64::MAX - n + 1) % n;
    loop {
        let x = rng.next_u64();
        if x <= zone {
            return x % n;
        }
    }
}

/// Deterministic in `spec`. Panics on an invalid spec.
pub fn gen_random_game(spec: &GenSpec) -> GameStructure {
    assert!(spec.states >= 1 && spec.dims >= 1, "empty game spec");
    assert!(spec.out_degree.0 >= 1 && spec.out_degree.0 <= spec.out_degree.1);
    assert!(spec.max_abs_weight >= 0);
    let n = spec.states;
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(spec.seed);
    let mut b = GameBuilder::new(spec.dims);
    let (num, den) = (
        *spec.p2_fraction.numer() as u64,
        *spec.p2_fraction.denom() as u64,
    );
    for s in 0..n {
        let owner = if below(&mut rng, den) < num {
            Player::P2
        } else {
            Player::P1
        };
        b.state(&format!("s{s}"), owner).expect("fresh name");
    }
    let w = spec.max_abs_weight;
    for s in 0..n {
        let (lo, hi) = spec.out_degree;
        let degree = (lo + below(&mut rng, (hi - lo + 1) as u64) as usize).min(n);
        let mut targets: Vec<usize> = (0..n).collect();
        for i in 0..degree {
            let j = i + below(&mut rng, (n - i) as u64) as usize;
            targets.swap(i, j);
        }
        for &t in &targets[..degree] {
            let weight = (0..spec.dims)
                .map(|_| below(&mut rng, (2 * w + 1) as u64) as i64 - w)
                .collect();
            b.edge(s, t, weight);
        }
    }
    b.init(0);
    b.build().expect("generated games are valid")
}

/// The game in wgame syntax, preceded by the spec header.
pub fn gen_text(spec: &GenSpec) -> String {
    format!(
        "{}\n{}",
        spec.header(),
        serialize_game(&gen_random_game(spec))
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use wmp_core::arena::Arena;
    use wmp_core::model::parse_game;

    #[test]
    fn single_state_is_a_zero_loop() {
        let g = gen_random_game(&GenSpec::new(1, 1, 0, 7));
        assert_eq!(g.num_states(), 1);
        assert_eq!(g.num_edges(), 1);
        assert_eq!(g.weight(0, 0), Some(&[0][..]));
    }

    #[test]
    fn generation_is_deterministic() {
        let spec = GenSpec::new(6, 2, 3, 42);
        assert_eq!(gen_random_game(&spec), gen_random_game(&spec));
        assert_ne!(
            gen_random_game(&spec),
            gen_random_game(&GenSpec { seed: 43, ..spec })
        );
    }

    #[test]
    fn generated_games_validate() {
        for seed in 0..200 {
            let spec = GenSpec::new(1 + seed as usize % 8, 1 + seed as usize % 3, 4, seed);
            let g = gen_random_game(&spec);
            assert!(g.validate().is_empty());
            assert!(g.max_abs_weight() <= 4);
            for s in 0..g.num_states() {
                assert!((1..=3).contains(&g.out_degree(s)));
            }
        }
        assert!(gen_random_game(&GenSpec::new(6, 1, 3, 42))
            .validate()
            .is_empty());
    }

    #[test]
    fn text_round_trips_with_header() {
        let spec = GenSpec::new(5, 1, 2, 9).with_p2_fraction(Ratio::new(1, 3));
        let text = gen_text(&spec);
        assert!(text.starts_with("# wmp-gen/1"));
        assert!(text.lines().next().unwrap().contains("seed=9"));
        assert_eq!(parse_game(&text).unwrap(), gen_random_game(&spec));
    }

    #[test]
    fn draws_cover_the_range() {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(1);
        let mut seen = [false; 7];
        for _ in 0..500 {
            seen[below(&mut rng, 7) as usize] = true;
        }
        assert!(seen.iter().all(|&x| x));
        assert_eq!(below(&mut rng, 1), 0);
    }
}

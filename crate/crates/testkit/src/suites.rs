//! Named cross-check suites over a corpus of games.

use std::fmt;

use rayon::prelude::*;
use wmp_core::arena::Arena;
use wmp_core::classical::{mp_positive, mp_threshold_win, neg_sup_tp, tp_sup_win};
use wmp_core::model::{
    normalize_threshold, serialize_game, GameStructure, ObjectiveKind, ObjectiveSpec, Player,
    Rational, ThresholdMode,
};
use wmp_core::strategy::{synth_bwmp, synth_fwmp_1d, verify_strategy_from};
use wmp_core::window1d::{
    bounded_wmp, direct_bounded_wmp, direct_fwmp, fwmp, good_win, shift_for_mp_reduction,
    sufficient_window,
};
use wmp_core::windowkd::{direct_fwmp_k, fwmp_k};
use wmp_core::{Error, Result, StateSet};

use crate::gen::{gen_random_game, GenSpec};
use crate::oracle::{
    bounded_memoryless, open_window_witnesses, oracle_classical, oracle_classical_p2,
    oracle_window, oracle_window_p2, OracleBudget, WindowProduct,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    /// Fixed window at the sufficient size equals bounded window.
    SufficientWindow,
    /// One-dimensional algorithms agree with the product construction.
    OneVsMultiDim,
    /// Solvers agree with the brute-force oracles.
    OracleSweep,
    /// Bounded window sits between positive and nonnegative mean payoff;
    /// direct bounded window implies supremum total payoff.
    ClassicalInclusions,
    /// Some game is won for mean payoff everywhere but bounded window nowhere.
    StrictnessWitness,
    /// Mean-payoff winners are the bounded window winners of the shifted game.
    MpReduction,
    /// Supremum total payoff implies the good window at the sufficient size.
    TpInGoodWindow,
    /// Synthesized machines respect their memory bounds and verify.
    MemoryBounds,
    /// Monotonicity in the window bound and containments between kinds.
    Containments,
    /// The good window recurrence does exactly `|E|·lmax` updates.
    UpdateCount,
    /// Oracle views of both players partition the states.
    Determinacy,
    /// Inf and sup mean payoff agree, and total payoff at the lowest
    /// reachable threshold agrees with mean payoff.
    TpEquivalences,
    /// Positive mean payoff is total payoff above every threshold.
    PositiveMean,
    /// States losing supremum total payoff admit a memoryless P2 strategy
    /// keeping some window open forever.
    OpenWindowWitness,
}

impl Suite {
    pub const ALL: [Suite; 14] = [
        Suite::SufficientWindow,
        Suite::OneVsMultiDim,
        Suite::OracleSweep,
        Suite::ClassicalInclusions,
        Suite::StrictnessWitness,
        Suite::MpReduction,
        Suite::TpInGoodWindow,
        Suite::MemoryBounds,
        Suite::Containments,
        Suite::UpdateCount,
        Suite::Determinacy,
        Suite::TpEquivalences,
        Suite::PositiveMean,
        Suite::OpenWindowWitness,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::SufficientWindow => "sufficient-window",
            Suite::OneVsMultiDim => "one-vs-multi-dim",
            Suite::OracleSweep => "oracle-sweep",
            Suite::ClassicalInclusions => "classical-inclusions",
            Suite::StrictnessWitness => "strictness-witness",
            Suite::MpReduction => "mp-reduction",
            Suite::TpInGoodWindow => "tp-in-good-window",
            Suite::MemoryBounds => "memory-bounds",
            Suite::Containments => "containments",
            Suite::UpdateCount => "update-count",
            Suite::Determinacy => "determinacy",
            Suite::TpEquivalences => "tp-equivalences",
            Suite::PositiveMean => "positive-mean",
            Suite::OpenWindowWitness => "open-window-witness",
        }
    }

    pub fn from_name(name: &str) -> Option<Suite> {
        Suite::ALL.into_iter().find(|s| s.name() == name)
    }

    /// Checks one game. `Ok(None)` means the suite holds on it (for the
    /// witness suite: the game is a witness); `Ok(Some(reason))` is a failure.
    pub fn check(self, g: &GameStructure, budget: &OracleBudget) -> Result<Option<String>> {
        if g.dims() != 1 && self != Suite::OneVsMultiDim {
            return Ok(None);
        }
        match self {
            Suite::SufficientWindow => sufficient(g),
            Suite::OneVsMultiDim => one_vs_multi(g),
            Suite::OracleSweep => oracle_sweep(g, budget, 1..=3),
            Suite::ClassicalInclusions => classical_inclusions(g),
            Suite::StrictnessWitness => {
                let witness =
                    mp_threshold_win(g)?.is_full() && bounded_wmp(g)?.winning_p1.is_empty();
                Ok((!witness).then(|| "not a witness".into()))
            }
            Suite::MpReduction => {
                let shifted = bounded_wmp(&shift_for_mp_reduction(g)?)?.winning_p1;
                Ok(differ(
                    "mp",
                    &mp_threshold_win(g)?,
                    "shifted bwmp",
                    &shifted,
                ))
            }
            Suite::TpInGoodWindow => {
                let gw = good_win(g, sufficient_window(g), &g.all_states())?.winning;
                Ok(not_within("tp_sup", &tp_sup_win(g)?, "gw", &gw))
            }
            Suite::MemoryBounds => memory_bounds(g),
            Suite::Containments => containments(g, 6),
            Suite::UpdateCount => {
                for l in [1, 2, 5, 9] {
                    let t = good_win(g, l, &g.all_states())?;
                    if t.updates != (g.num_edges() * l) as u64 {
                        return Ok(Some(format!("lmax {l}: {} updates", t.updates)));
                    }
                }
                Ok(None)
            }
            Suite::Determinacy => determinacy(g, budget),
            Suite::TpEquivalences => tp_equivalences(g, budget),
            Suite::PositiveMean => positive_mean(g),
            Suite::OpenWindowWitness => {
                for (s, w) in open_window_witnesses(g, &neg_sup_tp(g)?, budget)? {
                    if w.is_none() {
                        return Ok(Some(format!("no witness from {}", g.name(s))));
                    }
                }
                Ok(None)
            }
        }
    }

    fn is_witness_search(self) -> bool {
        self == Suite::StrictnessWitness
    }
}

fn differ(a: &str, x: &StateSet, b: &str, y: &StateSet) -> Option<String> {
    (x != y).then(|| format!("{a} {{{x:?}}} != {b} {{{y:?}}}"))
}

fn not_within(a: &str, x: &StateSet, b: &str, y: &StateSet) -> Option<String> {
    (!x.is_subset(y)).then(|| format!("{a} {{{x:?}}} not within {b} {{{y:?}}}"))
}

fn sufficient(g: &GameStructure) -> Result<Option<String>> {
    let l = sufficient_window(g);
    Ok(differ(
        "fwmp",
        &fwmp(g, l)?,
        "bwmp",
        &bounded_wmp(g)?.winning_p1,
    ))
}

fn one_vs_multi(g: &GameStructure) -> Result<Option<String>> {
    if g.dims() != 1 {
        return Ok(None);
    }
    for l in 1..=6 {
        let d = differ("fwmp", &fwmp(g, l)?, "fwmp_k", &fwmp_k(g, l)?.winning_p1).or(differ(
            "dfwmp",
            &direct_fwmp(g, l)?,
            "dfwmp_k",
            &direct_fwmp_k(g, l)?.winning_p1,
        ));
        if let Some(d) = d {
            return Ok(Some(format!("lmax {l}: {d}")));
        }
    }
    Ok(None)
}

/// Solver against oracle for all window kinds and for mean and supremum
/// total payoff.
pub fn oracle_sweep(
    g: &GameStructure,
    budget: &OracleBudget,
    bounds: std::ops::RangeInclusive<usize>,
) -> Result<Option<String>> {
    let all = g.all_states();
    for l in bounds {
        let o = oracle_window(g, &ObjectiveSpec::good_window(l), budget)?;
        let gw = good_win(g, l, &all)?.winning;
        let product = WindowProduct::new(g, l, budget)?;
        let found = differ("gw", &gw, "oracle", &o)
            .or(differ(
                "dfwmp",
                &direct_fwmp(g, l)?,
                "oracle",
                &product.winning(true, Player::P1, budget)?,
            ))
            .or(differ(
                "fwmp",
                &fwmp(g, l)?,
                "oracle",
                &product.winning(false, Player::P1, budget)?,
            ));
        if let Some(d) = found {
            return Ok(Some(format!("lmax {l}: {d}")));
        }
    }
    let (d, f) = bounded_memoryless(g, budget)?;
    let found = differ("dbwmp", &direct_bounded_wmp(g)?, "oracle", &d).or(differ(
        "bwmp",
        &bounded_wmp(g)?.winning_p1,
        "oracle",
        &f,
    ));
    if found.is_some() {
        return Ok(found);
    }
    let zero = Rational::from_integer(0);
    let pairs = [
        ("mp", mp_threshold_win(g)?, ObjectiveKind::MeanInf),
        ("tpsup", tp_sup_win(g)?, ObjectiveKind::TotalSup),
    ];
    for (name, solved, kind) in pairs {
        if let Some(d) = differ(
            name,
            &solved,
            "oracle",
            &oracle_classical(g, kind, zero, budget)?,
        ) {
            return Ok(Some(d));
        }
    }
    Ok(None)
}

fn classical_inclusions(g: &GameStructure) -> Result<Option<String>> {
    let bnd = bounded_wmp(g)?.winning_p1;
    Ok(not_within("bwmp", &bnd, "mp", &mp_threshold_win(g)?)
        .or(not_within("mp>0", &mp_positive(g)?, "bwmp", &bnd))
        .or(not_within(
            "dbwmp",
            &direct_bounded_wmp(g)?,
            "tp_sup",
            &tp_sup_win(g)?,
        )))
}

fn memory_bounds(g: &GameStructure) -> Result<Option<String>> {
    let n = g.num_states();
    for l in 1..=4 {
        let won = fwmp(g, l)?;
        match synth_fwmp_1d(g, l) {
            Ok(m) => {
                if m.memory_size() > n * l + n {
                    return Ok(Some(format!("lmax {l}: {} memory states", m.memory_size())));
                }
                if !verify_strategy_from(g, &m, &ObjectiveSpec::fix(l), &won)?.pass {
                    return Ok(Some(format!("lmax {l}: machine fails verification")));
                }
            }
            Err(Error::EmptyWinningSet) if won.is_empty() => {}
            Err(e) => return Err(e),
        }
    }
    match synth_bwmp(g) {
        Ok(m) if m.memory_size() != 1 => {
            Ok(Some(format!("bwmp machine has {} states", m.memory_size())))
        }
        Ok(_) | Err(Error::EmptyWinningSet) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Monotonicity in `lmax` and the containments between the window kinds,
/// for every bound up to `max`.
pub fn containments(g: &GameStructure, max: usize) -> Result<Option<String>> {
    let bnd = bounded_wmp(g)?.winning_p1;
    let dir_bnd = direct_bounded_wmp(g)?;
    if let Some(d) = not_within("dbwmp", &dir_bnd, "bwmp", &bnd) {
        return Ok(Some(d));
    }
    let mut prev: Option<(StateSet, StateSet)> = None;
    for l in 1..=max {
        let d = direct_fwmp(g, l)?;
        let f = fwmp(g, l)?;
        let gw = good_win(g, l, &g.all_states())?.winning;
        let found = not_within("dfwmp", &d, "fwmp", &f)
            .or(not_within("fwmp", &f, "bwmp", &bnd))
            .or(not_within("dfwmp", &d, "dbwmp", &dir_bnd))
            .or(not_within("dfwmp", &d, "gw", &gw))
            .or(prev.as_ref().and_then(|(pd, pf)| {
                not_within("dfwmp(l-1)", pd, "dfwmp", &d).or(not_within(
                    "fwmp(l-1)",
                    pf,
                    "fwmp",
                    &f,
                ))
            }));
        if let Some(x) = found {
            return Ok(Some(format!("lmax {l}: {x}")));
        }
        prev = Some((d, f));
    }
    Ok(None)
}

fn determinacy(g: &GameStructure, budget: &OracleBudget) -> Result<Option<String>> {
    let partition = |a: StateSet, b: StateSet, what: String| {
        (!a.intersection(&b).is_empty() || !a.union(&b).is_full())
            .then(|| format!("{what}: P1 {{{a:?}}} P2 {{{b:?}}}"))
    };
    for l in 1..=3 {
        for spec in [
            ObjectiveSpec::good_window(l),
            ObjectiveSpec::dir_fix(l),
            ObjectiveSpec::fix(l),
        ] {
            let found = partition(
                oracle_window(g, &spec, budget)?,
                oracle_window_p2(g, &spec, budget)?,
                format!("{} lmax {l}", spec.kind),
            );
            if found.is_some() {
                return Ok(found);
            }
        }
    }
    let zero = Rational::from_integer(0);
    for kind in [
        ObjectiveKind::MeanInf,
        ObjectiveKind::MeanSup,
        ObjectiveKind::TotalInf,
        ObjectiveKind::TotalSup,
    ] {
        let found = partition(
            oracle_classical(g, kind, zero, budget)?,
            oracle_classical_p2(g, kind, zero, budget)?,
            kind.to_string(),
        );
        if found.is_some() {
            return Ok(found);
        }
        if kind == ObjectiveKind::TotalSup {
            let comp = tp_sup_win(g)?.complement();
            if let Some(d) = differ(
                "P2 tp view",
                &oracle_classical_p2(g, kind, zero, budget)?,
                "not tp_sup",
                &comp,
            ) {
                return Ok(Some(d));
            }
        }
    }
    Ok(None)
}

fn tp_equivalences(g: &GameStructure, budget: &OracleBudget) -> Result<Option<String>> {
    let zero = Rational::from_integer(0);
    let mp = mp_threshold_win(g)?;
    let inf = oracle_classical(g, ObjectiveKind::MeanInf, zero, budget)?;
    let sup = oracle_classical(g, ObjectiveKind::MeanSup, zero, budget)?;
    if let Some(d) = differ("mp inf", &inf, "mp sup", &sup).or(differ("mp inf", &inf, "mp", &mp)) {
        return Ok(Some(d));
    }
    let low = -2 * (g.num_states() as i64 - 1) * g.max_abs_weight();
    for kind in [ObjectiveKind::TotalInf, ObjectiveKind::TotalSup] {
        let t = oracle_classical(g, kind, Rational::from_integer(low), budget)?;
        if let Some(d) = differ(&format!("{kind} >= {low}"), &t, "mp", &mp) {
            return Ok(Some(d));
        }
    }
    Ok(None)
}

fn positive_mean(g: &GameStructure) -> Result<Option<String>> {
    // a finite supremum total payoff never exceeds (|S| - 1)·W
    let high = (g.num_states() as i64 - 1) * g.max_abs_weight() + 1;
    let n = normalize_threshold(g, &[Rational::from_integer(high)], ThresholdMode::Total)?;
    let won = tp_sup_win(&n.game)?;
    let above = StateSet::from_indices(
        g.num_states(),
        (0..g.num_states()).filter(|&s| won.contains(n.entry[s])),
    );
    Ok(differ(
        "mp>0",
        &mp_positive(g)?,
        &format!("tp_sup >= {high}"),
        &above,
    ))
}

#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub suite: Suite,
    pub pass: bool,
    pub checked: usize,
    pub skipped: usize,
    /// The first failing game (or the witness found) and what went wrong.
    pub game: Option<(String, String)>,
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "SUITE {} {}",
            self.suite.name(),
            if self.pass { "PASS" } else { "FAIL" }
        )?;
        if let Some((game, why)) = &self.game {
            write!(f, " [{game}]")?;
            if !why.is_empty() {
                write!(f, " {why}")?;
            }
        }
        Ok(())
    }
}

/// A game in wgame syntax on one line.
pub fn inline(g: &GameStructure) -> String {
    serialize_game(g).lines().collect::<Vec<_>>().join("; ")
}

pub fn corpus_games(specs: &[GenSpec]) -> Vec<GameStructure> {
    specs.par_iter().map(gen_random_game).collect()
}

/// Runs `suite` over `games`. Games over an oracle budget count as skipped;
/// any other error is a failure. Results do not depend on scheduling.
pub fn run_suite(suite: Suite, games: &[GameStructure], budget: &OracleBudget) -> SuiteReport {
    let outcomes: Vec<Result<Option<String>>> =
        games.par_iter().map(|g| suite.check(g, budget)).collect();
    let mut report = SuiteReport {
        suite,
        pass: !suite.is_witness_search(),
        checked: 0,
        skipped: 0,
        game: None,
    };
    for (g, outcome) in games.iter().zip(outcomes) {
        let failure = match outcome {
            Ok(None) => None,
            Ok(Some(why)) => Some(why),
            Err(Error::Budget { .. }) => {
                report.skipped += 1;
                continue;
            }
            Err(e) => Some(format!("error: {e}")),
        };
        report.checked += 1;
        if suite.is_witness_search() {
            if failure.is_none() && report.game.is_none() {
                report.pass = true;
                report.game = Some((inline(g), String::new()));
            }
        } else if let Some(why) = failure {
            if report.game.is_none() {
                report.pass = false;
                report.game = Some((inline(g), why));
            }
        }
    }
    report
}

pub fn cross_check(
    games: &[GameStructure],
    suites: &[Suite],
    budget: &OracleBudget,
) -> Vec<SuiteReport> {
    suites
        .iter()
        .map(|&s| run_suite(s, games, budget))
        .collect()
}

/// `count` one-dimensional specs cycling through `2..=max_states` states and
/// weight bounds `1..=max_w`, with consecutive seeds from `seed`.
pub fn corpus(count: usize, max_states: usize, max_w: i64, seed: u64) -> Vec<GenSpec> {
    let sizes = max_states.max(2) - 1;
    (0..count)
        .map(|i| {
            let states = 2 + i % sizes;
            let w = 1 + (i / sizes) as i64 % max_w.max(1);
            GenSpec::new(states.min(max_states), 1, w.min(max_w), seed + i as u64)
        })
        .collect()
}

/// 300 games with at most 6 states and weights in `[-3, 3]`.
pub fn default_corpus() -> Vec<GenSpec> {
    corpus(300, 6, 3, 1)
}

/// 500 games with at most 8 states and weights in `[-4, 4]`.
pub fn large_corpus() -> Vec<GenSpec> {
    corpus(500, 8, 4, 10_001)
}

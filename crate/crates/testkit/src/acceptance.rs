//! The acceptance criteria, each a list of named checks.

use std::fmt;
use std::time::{Duration, Instant};

use wmp_core::fixtures;
use wmp_core::model::{GameStructure, ObjectiveSpec, Player};
use wmp_core::strategy::{min_memory_search, parse_strategy, synth_fwmp_1d, verify_strategy};
use wmp_core::window1d::{fwmp, good_win};
use wmp_core::windowkd::fwmp_k;
use wmp_core::{Result, StateSet};

use crate::family::TinyFamily;
use crate::gen::{gen_random_game, GenSpec};
use crate::oracle::OracleBudget;
use crate::suites::{corpus_games, default_corpus, large_corpus, oracle_sweep, run_suite, Suite};

/// Checks that cannot pass because FIX5 is lost by P1 for every window
/// bound: in dimension one the sum is a ±1 walk in which P2 moves every
/// other step, and the window opened by P1's own move may stay negative.
pub const KNOWN_UNATTAINABLE: [&str; 2] = ["fix5-fwmp-k-all", "fix5-opposite-machine"];

#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, pass: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            pass,
            detail: detail.into(),
        }
    }

    fn from_result(name: &str, r: Result<(bool, String)>) -> Self {
        match r {
            Ok((pass, detail)) => Check::new(name, pass, detail),
            Err(e) => Check::new(name, false, format!("error: {e}")),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Criterion {
    pub id: u32,
    pub title: &'static str,
    pub checks: Vec<Check>,
    pub elapsed: Duration,
}

impl Criterion {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.pass() { "PASS" } else { "FAIL" };
        write!(
            f,
            "CRITERION {} {verdict} {} ({:.2}s)",
            self.id,
            self.title,
            self.elapsed.as_secs_f64()
        )?;
        for c in &self.checks {
            let v = if c.pass { "PASS" } else { "FAIL" };
            write!(f, "\n  {v} {}", c.name)?;
            if !c.detail.is_empty() {
                write!(f, ": {}", c.detail)?;
            }
        }
        Ok(())
    }
}

pub const TITLES: [&str; 10] = [
    "fixture games",
    "sufficient window equals bounded window",
    "one- and multi-dimensional algorithms agree",
    "exhaustive oracle sweep",
    "bounded window between mean-payoff objectives",
    "mean payoff through the shifted bounded window",
    "supremum total payoff within the good window",
    "memory bounds",
    "monotonicity and containments",
    "good window update count is linear",
];

/// Runs criterion `id` in `1..=10`.
pub fn run_criterion(id: u32) -> Criterion {
    let start = Instant::now();
    let checks = match id {
        1 => fixtures_check(),
        2 => suite_checks(Suite::SufficientWindow, &corpus_games(&default_corpus())),
        3 => suite_checks(Suite::OneVsMultiDim, &corpus_games(&large_corpus())),
        4 => sweep_check(),
        5 => inclusion_checks(),
        6 => suite_checks(Suite::MpReduction, &corpus_games(&default_corpus())),
        7 => suite_checks(Suite::TpInGoodWindow, &corpus_games(&default_corpus())),
        8 => memory_checks(),
        9 => {
            let mut games = corpus_games(&default_corpus());
            games.extend(corpus_games(&large_corpus()));
            suite_checks(Suite::Containments, &games)
        }
        10 => vec![update_count_check()],
        _ => panic!("no criterion {id}"),
    };
    let elapsed = start.elapsed();
    let mut c = Criterion {
        id,
        title: TITLES[id as usize - 1],
        checks,
        elapsed,
    };
    let limit = match id {
        1 => Some(10),
        2 | 3 => Some(300),
        _ => None,
    };
    if let Some(limit) = limit {
        let ok = elapsed < Duration::from_secs(limit);
        c.checks
            .push(Check::new("runtime", ok, format!("under {limit}s")));
    }
    c
}

pub fn run_all() -> Vec<Criterion> {
    (1..=10).map(run_criterion).collect()
}

fn suite_checks(suite: Suite, games: &[GameStructure]) -> Vec<Check> {
    let r = run_suite(suite, games, &OracleBudget::default());
    let detail = format!("{} games checked, {} skipped", r.checked, r.skipped);
    vec![
        Check::new(
            suite.name(),
            r.pass,
            if r.pass { detail } else { r.to_string() },
        ),
        Check::new(
            "corpus-size",
            r.checked >= games.len().min(300),
            format!("{} games", r.checked),
        ),
    ]
}

fn names(g: &GameStructure, set: &StateSet) -> String {
    format!("{{{}}}", g.format_set(set))
}

fn fixtures_check() -> Vec<Check> {
    let mut checks = Vec::new();
    let fix3 = fixtures::fix3();
    checks.push(Check::from_result(
        "fix3-fwmp-empty",
        (|| {
            let w = fwmp(&fix3, 3)?;
            Ok((w.is_empty(), names(&fix3, &w)))
        })(),
    ));
    for target in ["x", "y1"] {
        let name = format!("fix3-only-cycle-avoiding-{target}");
        checks.push(Check::from_result(
            &name,
            (|| {
                let c = fix3.id("c").expect("c");
                let t = fix3.id(target).expect("target");
                let i = (0..fix3.num_edges())
                    .find(|&i| fix3.edge(i).source == c && fix3.edge(i).target == t)
                    .expect("edge");
                let g = fix3.without_edge(i);
                let w = fwmp(&g, 3)?;
                Ok((w.is_full(), names(&g, &w)))
            })(),
        ));
    }
    let fix4 = fixtures::fix4();
    checks.push(Check::from_result(
        "fix4-fwmp-all",
        (|| {
            let w = fwmp(&fix4, 4)?;
            Ok((w.is_full(), names(&fix4, &w)))
        })(),
    ));
    checks.push(Check::from_result(
        "fix4-alternation-verified",
        (|| {
            let m = synth_fwmp_1d(&fix4, 4)?;
            let v = verify_strategy(&fix4, &m, &ObjectiveSpec::fix(4))?;
            let memoryless = min_memory_search(&fix4, &ObjectiveSpec::fix(4), Player::P1, 1)?;
            Ok((
                v.pass && memoryless.is_none(),
                format!(
                    "{} memory states, no memoryless winner: {}",
                    m.memory_size(),
                    memoryless.is_none()
                ),
            ))
        })(),
    ));
    let fix5 = fixtures::fix5();
    checks.push(Check::from_result(
        "fix5-fwmp-k-all",
        (|| {
            let w = fwmp_k(&fix5, 3)?.winning_p1;
            Ok((w.is_full(), names(&fix5, &w)))
        })(),
    ));
    checks.push(Check::from_result(
        "fix5-opposite-machine",
        (|| {
            let m = parse_strategy(&fix5, fixtures::FIX5_OPPOSITE)?;
            let v = verify_strategy(&fix5, &m, &ObjectiveSpec::fix(3))?;
            let detail = match &v.counterexample {
                Some(l) => format!("counter-play {}", l.display(&fix5)),
                None => String::new(),
            };
            Ok((v.pass, detail))
        })(),
    ));
    checks.push(Check::from_result(
        "fix5-no-memoryless-winner",
        (|| {
            let found = min_memory_search(&fix5, &ObjectiveSpec::fix(3), Player::P1, 1)?;
            Ok((found.is_none(), String::new()))
        })(),
    ));
    checks
}

fn sweep_check() -> Vec<Check> {
    let games = TinyFamily::default().games();
    let budget = OracleBudget::default();
    let failures: Vec<String> = {
        use rayon::prelude::*;
        games
            .par_iter()
            .filter_map(|g| match oracle_sweep(g, &budget, 1..=3) {
                Ok(None) => None,
                Ok(Some(why)) => Some(format!("[{}] {why}", crate::suites::inline(g))),
                Err(e) => Some(format!("[{}] error: {e}", crate::suites::inline(g))),
            })
            .collect()
    };
    vec![Check::new(
        "tiny-family",
        failures.is_empty(),
        match failures.first() {
            None => format!("{} games, five window kinds, mp and tpsup", games.len()),
            Some(f) => format!("{} mismatches, first {f}", failures.len()),
        },
    )]
}

fn inclusion_checks() -> Vec<Check> {
    let mut games = corpus_games(&default_corpus());
    let mut checks = suite_checks(Suite::ClassicalInclusions, &games);
    // plant FIX3 first so that it is the witness reported
    games.insert(0, fixtures::fix3());
    let r = run_suite(Suite::StrictnessWitness, &games, &OracleBudget::default());
    let fix3 = crate::suites::inline(&fixtures::fix3());
    let reports_fix3 = r.game.as_ref().is_some_and(|(g, _)| *g == fix3);
    checks.push(Check::new(
        "strictness-witness",
        r.pass && reports_fix3,
        if reports_fix3 {
            "FIX3".to_string()
        } else {
            r.to_string()
        },
    ));
    checks
}

fn memory_checks() -> Vec<Check> {
    let mut checks = suite_checks(Suite::MemoryBounds, &corpus_games(&default_corpus()));
    let fix3 = fixtures::fix3();
    let spec = ObjectiveSpec::fix(3);
    checks.push(Check::from_result(
        "fix3-p2-memoryless-none",
        (|| {
            Ok((
                min_memory_search(&fix3, &spec, Player::P2, 1)?.is_none(),
                String::new(),
            ))
        })(),
    ));
    checks.push(Check::from_result(
        "fix3-p2-two-states",
        (|| {
            let m = min_memory_search(&fix3, &spec, Player::P2, 2)?;
            Ok((
                m.as_ref().is_some_and(|m| m.memory_size() == 2),
                String::new(),
            ))
        })(),
    ));
    checks
}

/// `good_win` updates across a series doubling `|E|·lmax`, against the
/// least-squares line through the origin.
fn update_count_check() -> Check {
    let r = (|| -> Result<(bool, String)> {
        let mut points = Vec::new();
        for (i, n) in [2usize, 4, 8, 16, 32, 64].into_iter().enumerate() {
            let g = gen_random_game(&GenSpec::new(n, 1, 3, 500 + i as u64).with_out_degree(2, 2));
            let l = 2 << i;
            let t = good_win(&g, l, &g.all_states())?;
            points.push(((g.num_edges() * l) as f64, t.updates as f64));
        }
        let slope = points.iter().map(|(x, y)| x * y).sum::<f64>()
            / points.iter().map(|(x, _)| x * x).sum::<f64>();
        let ok = points.iter().all(|(x, y)| {
            let r = y / (slope * x);
            (0.5..=2.0).contains(&r)
        });
        Ok((
            ok,
            format!(
                "slope {slope:.3} over |E|·lmax up to {}",
                points.last().expect("points").0
            ),
        ))
    })();
    Check::from_result("linear-fit", r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn criterion_lines() {
        let c = Criterion {
            id: 3,
            title: TITLES[2],
            checks: vec![Check::new("a", true, ""), Check::new("b", false, "why")],
            elapsed: Duration::from_millis(1500),
        };
        assert!(!c.pass());
        assert_eq!(
            c.to_string(),
            "CRITERION 3 FAIL one- and multi-dimensional algorithms agree (1.50s)\n  PASS a\n  FAIL b: why"
        );
    }

    #[test]
    fn update_count_is_linear() {
        assert!(update_count_check().pass);
    }
}

use wmp_core::fixtures;
use wmp_testkit::suites::{corpus_games, cross_check, default_corpus, run_suite, Suite};
use wmp_testkit::{gen_random_game, GenSpec, OracleBudget};

#[test]
fn every_suite_passes_on_the_default_corpus() {
    let mut games = corpus_games(&default_corpus());
    games.insert(0, fixtures::fix3());
    let budget = OracleBudget::default();
    for report in cross_check(&games, &Suite::ALL, &budget) {
        println!("{report}");
        assert!(report.pass, "{report}");
        assert!(report.checked > 0);
    }
}

#[test]
fn multi_dimensional_games_pass_the_product_suite() {
    let games: Vec<_> = (0..100)
        .map(|i| gen_random_game(&GenSpec::new(2 + i % 4, 2, 2, 900 + i as u64)))
        .collect();
    let r = run_suite(Suite::OneVsMultiDim, &games, &OracleBudget::default());
    assert!(r.pass, "{r}");
}

#[test]
fn budget_overruns_are_skipped_not_failed() {
    let games = corpus_games(&default_corpus()[..20]);
    let tight = OracleBudget {
        product_states: 3,
        strategies: 1,
    };
    let r = run_suite(Suite::OracleSweep, &games, &tight);
    assert!(r.pass);
    assert!(r.skipped > 0);
}

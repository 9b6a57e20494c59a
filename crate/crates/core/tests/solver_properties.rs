mod common;

use common::arb_game;
use proptest::prelude::*;
use wmp_core::arena::Arena;
use wmp_core::classical::{mp_positive, mp_threshold_win, tp_sup_win};
use wmp_core::model::ObjectiveSpec;
use wmp_core::strategy::{synth_bwmp, synth_fwmp_1d, synth_fwmp_k, verify_strategy_from};
use wmp_core::window1d::{
    bounded_wmp, direct_bounded_wmp, direct_fwmp, fwmp, good_win, sufficient_window,
};
use wmp_core::windowkd::{direct_fwmp_k, fwmp_k};
use wmp_core::Error;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn one_dimensional_containments(g in arb_game(6, 1, 3)) {
        let bnd = bounded_wmp(&g).unwrap().winning_p1;
        let dir_bnd = direct_bounded_wmp(&g).unwrap();
        prop_assert!(dir_bnd.is_subset(&bnd));
        prop_assert!(bnd.is_subset(&mp_threshold_win(&g).unwrap()));
        prop_assert!(mp_positive(&g).unwrap().is_subset(&bnd));
        prop_assert!(dir_bnd.is_subset(&tp_sup_win(&g).unwrap()));
        let mut prev = None;
        for l in 1..=6 {
            let d = direct_fwmp(&g, l).unwrap();
            let f = fwmp(&g, l).unwrap();
            prop_assert!(d.is_subset(&f));
            prop_assert!(f.is_subset(&bnd));
            prop_assert!(d.is_subset(&dir_bnd));
            prop_assert!(d.is_subset(&good_win(&g, l, &g.all_states()).unwrap().winning));
            if let Some((pd, pf)) = prev {
                prop_assert!(wmp_core::StateSet::is_subset(&pd, &d));
                prop_assert!(wmp_core::StateSet::is_subset(&pf, &f));
            }
            prop_assert_eq!(fwmp_k(&g, l).unwrap().winning_p1, f.clone());
            prop_assert_eq!(direct_fwmp_k(&g, l).unwrap().winning_p1, d.clone());
            prev = Some((d, f));
        }
        prop_assert_eq!(fwmp(&g, sufficient_window(&g)).unwrap(), bnd);
    }

    #[test]
    fn good_window_work_is_linear(g in arb_game(6, 1, 3), l in 1usize..20) {
        let t = good_win(&g, l, &g.all_states()).unwrap();
        prop_assert_eq!(t.updates, (g.num_edges() * l) as u64);
    }

    #[test]
    fn synthesized_strategies_verify(g in arb_game(5, 1, 2), l in 1usize..5) {
        let won = fwmp(&g, l).unwrap();
        match synth_fwmp_1d(&g, l) {
            Ok(s) => {
                prop_assert!(s.memory_size() <= g.num_states() * l + g.num_states());
                prop_assert!(verify_strategy_from(&g, &s, &ObjectiveSpec::fix(l), &won).unwrap().pass);
            }
            Err(Error::EmptyWinningSet) => prop_assert!(won.is_empty()),
            Err(e) => prop_assert!(false, "{}", e),
        }
        match synth_bwmp(&g) {
            Ok(s) => prop_assert_eq!(s.memory_size(), 1),
            Err(Error::EmptyWinningSet) => {}
            Err(e) => prop_assert!(false, "{}", e),
        }
    }

    #[test]
    fn product_strategies_verify(g in arb_game(4, 2, 1), l in 1usize..4, direct in any::<bool>()) {
        let won = if direct { direct_fwmp_k(&g, l) } else { fwmp_k(&g, l) }.unwrap().winning_p1;
        match synth_fwmp_k(&g, l, direct) {
            Ok(s) => {
                let spec = if direct { ObjectiveSpec::dir_fix(l) } else { ObjectiveSpec::fix(l) };
                prop_assert!(verify_strategy_from(&g, &s, &spec, &won).unwrap().pass);
            }
            Err(Error::EmptyWinningSet) => prop_assert!(won.is_empty()),
            Err(e) => prop_assert!(false, "{}", e),
        }
    }
}

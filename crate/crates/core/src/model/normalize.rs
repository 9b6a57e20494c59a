use super::game::{GameBuilder, GameStructure, StateId};
use super::objective::Rational;
use crate::arena::Arena;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ThresholdMode {
    Mean,
    Total,
}

/// A threshold-free game together with the state standing for each original state.
#[derive(Clone, Debug)]
pub struct Normalized {
    pub game: GameStructure,
    /// `entry[s]` is the state of `game` whose winning status equals that of `s`
    /// under the original threshold.
    pub entry: Vec<StateId>,
}

fn overflow() -> Error {
    Error::Overflow("threshold normalization".into())
}

/// Rewrites `g` so that threshold `v` becomes the zero threshold.
///
/// In mean mode each weight `w` of dimension `t` becomes `b·w − a` for
/// `v[t] = a/b`. In total mode weights are scaled by `b` and every state `s` gets
/// a fresh predecessor with a single edge of weight `−a` into `s`; that
/// predecessor is `entry[s]`.
pub fn normalize_threshold(
    g: &GameStructure,
    v: &[Rational],
    mode: ThresholdMode,
) -> Result<Normalized> {
    if v.len() != g.dims() {
        return Err(Error::DimensionMismatch {
            expected: g.dims(),
            got: v.len(),
        });
    }
    let n = g.num_states();
    match mode {
        ThresholdMode::Mean => {
            let game = g.map_weights(g.dims(), |e| {
                e.weight
                    .iter()
                    .zip(v)
                    .map(|(&w, r)| {
                        w.checked_mul(*r.denom())
                            .and_then(|x| x.checked_sub(*r.numer()))
                            .ok_or_else(overflow)
                    })
                    .collect()
            })?;
            Ok(Normalized {
                game,
                entry: (0..n).collect(),
            })
        }
        ThresholdMode::Total => {
            let scaled = g.map_weights(g.dims(), |e| {
                e.weight
                    .iter()
                    .zip(v)
                    .map(|(&w, r)| w.checked_mul(*r.denom()).ok_or_else(overflow))
                    .collect()
            })?;
            let mut b: GameBuilder = scaled.to_builder();
            let mut entry = Vec::with_capacity(n);
            let offset: Vec<i64> = v
                .iter()
                .map(|r| r.numer().checked_neg().ok_or_else(overflow))
                .collect::<Result<_>>()?;
            for s in 0..n {
                let mut name = format!("{}__thr", g.name(s));
                while b.id(&name).is_some() {
                    name.push('_');
                }
                let id = b.state(&name, crate::model::Player::P1)?;
                b.edge(id, s, offset.clone());
                entry.push(id);
            }
            b.init(entry[g.init()]);
            Ok(Normalized {
                game: b.build_unchecked(),
                entry,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::{eval_lasso, parse_game, Lasso, ObjectiveKind, ObjectiveSpec};

    fn r(a: i64, b: i64) -> Rational {
        Rational::new(a, b)
    }

    #[test]
    fn mean_mode_shifts_weights() {
        let g = parse_game("wgame 1\ndims 1\nstate a P1\nedge a a 1\ninit a\n").unwrap();
        let n = normalize_threshold(&g, &[r(1, 2)], ThresholdMode::Mean).unwrap();
        assert_eq!(n.game.weight(0, 0), Some(&[1][..]));
        let n = normalize_threshold(&g, &[r(3, 4)], ThresholdMode::Mean).unwrap();
        assert_eq!(n.game.weight(0, 0), Some(&[1][..]));
        let n = normalize_threshold(&g, &[r(3, 2)], ThresholdMode::Mean).unwrap();
        assert_eq!(n.game.weight(0, 0), Some(&[-1][..]));
    }

    #[test]
    fn zero_threshold_is_identity() {
        for (_, g) in fixtures::all() {
            let zero = vec![r(0, 1); g.dims()];
            let n = normalize_threshold(&g, &zero, ThresholdMode::Mean).unwrap();
            assert_eq!(n.game, g);
        }
    }

    #[test]
    fn lowering_the_threshold_makes_a_loop_winning() {
        let g = fixtures::fix2();
        let n = normalize_threshold(&g, &[r(-2, 1)], ThresholdMode::Mean).unwrap();
        assert_eq!(n.game.weight(0, 0), Some(&[1][..]));
        let l = Lasso::new(vec![], vec![0]);
        let v = eval_lasso(&n.game, &l, &ObjectiveSpec::plain(ObjectiveKind::MeanInf)).unwrap();
        assert!(v.verdict);
    }

    #[test]
    fn total_mode_prepends_an_offset_edge() {
        let g = fixtures::fix6();
        let n = normalize_threshold(&g, &[r(-1, 1)], ThresholdMode::Total).unwrap();
        assert_eq!(n.game.num_states(), 4);
        assert!(n.game.validate().is_empty());
        let ea = n.entry[g.id("a").unwrap()];
        assert_eq!(n.game.name(ea), "a__thr");
        assert_eq!(n.game.init(), ea);
        // threshold -1 on a -> b -> b ...: total payoff -1 >= -1
        let l = Lasso::new(vec![ea, 0], vec![1]);
        let spec = ObjectiveSpec::plain(ObjectiveKind::TotalSup);
        assert!(eval_lasso(&n.game, &l, &spec).unwrap().verdict);
        let n = normalize_threshold(&g, &[r(0, 1)], ThresholdMode::Total).unwrap();
        let l = Lasso::new(vec![n.entry[0], 0], vec![1]);
        assert!(!eval_lasso(&n.game, &l, &spec).unwrap().verdict);
    }

    #[test]
    fn total_mode_avoids_name_clashes() {
        let g = parse_game(
            "wgame 1\ndims 1\nstate a P1\nstate a__thr P1\nedge a a 0\nedge a__thr a 0\ninit a\n",
        )
        .unwrap();
        let n = normalize_threshold(&g, &[r(0, 1)], ThresholdMode::Total).unwrap();
        assert_eq!(n.game.name(n.entry[0]), "a__thr_");
        assert_eq!(n.game.name(n.entry[1]), "a__thr__thr");
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let g = fixtures::fix5();
        assert!(matches!(
            normalize_threshold(&g, &[r(0, 1)], ThresholdMode::Mean),
            Err(Error::DimensionMismatch {
                expected: 2,
                got: 1
            })
        ));
    }
}

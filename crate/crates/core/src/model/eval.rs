//! Exact evaluation of objectives on lassos.

use super::game::GameStructure;
use super::lasso::Lasso;
use super::objective::{ObjectiveKind, ObjectiveSpec, Rational, Value};
use crate::error::{Error, Result};

/// Per-edge weights of one dimension along a lasso, after threshold shifting.
#[derive(Clone, Debug)]
pub struct WeightSeq {
    pub stem: Vec<i64>,
    pub cycle: Vec<i64>,
}

impl WeightSeq {
    /// Weight of the edge leaving position `p`.
    pub fn at(&self, p: usize) -> i64 {
        if p < self.stem.len() {
            self.stem[p]
        } else {
            self.cycle[(p - self.stem.len()) % self.cycle.len()]
        }
    }

    pub fn cycle_sum(&self) -> i64 {
        self.cycle.iter().sum()
    }

    /// Number of steps after which the window opened at `j` first has a
    /// nonnegative sum, or `None` if it never closes.
    pub fn first_closing(&self, j: usize) -> Option<usize> {
        let s = self.stem.len();
        let len = self.cycle.len();
        let mut sum = 0i64;
        let mut p = j;
        while p < s {
            sum += self.at(p);
            p += 1;
            if sum >= 0 {
                return Some(p - j);
            }
        }
        let start = sum;
        let mut best = i64::MIN;
        let mut run = 0i64;
        for q in 0..len {
            run += self.at(p + q);
            if start + run >= 0 {
                return Some(p + q + 1 - j);
            }
            best = best.max(run);
        }
        let c = run;
        if c <= 0 {
            return None;
        }
        // Skip whole periods that cannot reach zero.
        let deficit = -(start + best);
        let k = ((deficit + c - 1) / c).max(1) as usize;
        let base = p + k * len;
        let mut sum = start + k as i64 * c;
        for q in 0..len {
            sum += self.at(base + q);
            if sum >= 0 {
                return Some(base + q + 1 - j);
            }
        }
        None
    }
}

/// Result of [`eval_lasso`]: a verdict, plus per-dimension values for the
/// mean-payoff and total-payoff kinds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LassoEval {
    pub verdict: bool,
    pub values: Option<Vec<Value>>,
}

/// Weight sequences of every dimension, shifted so that the threshold `a/b`
/// becomes 0 (each weight `w` becomes `b·w − a`).
pub fn weight_sequences(
    g: &GameStructure,
    l: &Lasso,
    threshold: &[Rational],
) -> Result<Vec<WeightSeq>> {
    l.check(g)?;
    let zero = Rational::from_integer(0);
    let mut out = Vec::with_capacity(g.dims());
    for t in 0..g.dims() {
        let v = threshold.get(t).copied().unwrap_or(zero);
        let shift = |w: i64| -> Result<i64> {
            w.checked_mul(*v.denom())
                .and_then(|x| x.checked_sub(*v.numer()))
                .ok_or_else(|| Error::Overflow("threshold shift".into()))
        };
        let edge = |i: usize| -> Result<i64> {
            let w = g.weight(l.at(i), l.at(i + 1)).expect("checked lasso")[t];
            shift(w)
        };
        let stem = (0..l.stem.len()).map(edge).collect::<Result<_>>()?;
        let cycle = (l.stem.len()..l.stem.len() + l.cycle.len())
            .map(edge)
            .collect::<Result<_>>()?;
        out.push(WeightSeq { stem, cycle });
    }
    Ok(out)
}

/// Positions whose windows determine the verdict of a window kind.
fn positions(kind: ObjectiveKind, l: &Lasso) -> std::ops::Range<usize> {
    let s = l.stem.len();
    match kind {
        ObjectiveKind::GoodWindow => 0..1,
        ObjectiveKind::DirFixWmp | ObjectiveKind::DirBndWmp => 0..s + l.cycle.len(),
        _ => s..s + l.cycle.len(),
    }
}

/// Evaluates `spec` on the play `l` exactly.
pub fn eval_lasso(g: &GameStructure, l: &Lasso, spec: &ObjectiveSpec) -> Result<LassoEval> {
    spec.check_dims(g.dims())?;
    let kind = spec.kind;
    if kind.is_window() {
        let seqs = weight_sequences(g, l, &spec.threshold)?;
        let bound = spec.lmax;
        let verdict = positions(kind, l).all(|j| {
            seqs.iter().all(|seq| match (seq.first_closing(j), bound) {
                (None, _) => false,
                (Some(d), Some(b)) => d <= b,
                (Some(_), None) => true,
            })
        });
        return Ok(LassoEval {
            verdict,
            values: None,
        });
    }
    let seqs = weight_sequences(g, l, &[])?;
    let mut values = Vec::with_capacity(g.dims());
    let mut verdict = true;
    for (t, seq) in seqs.iter().enumerate() {
        let c = seq.cycle_sum();
        let value = match kind {
            ObjectiveKind::MeanInf | ObjectiveKind::MeanSup => {
                Value::Finite(Rational::new(c, seq.cycle.len() as i64))
            }
            _ if c > 0 => Value::PosInf,
            _ if c < 0 => Value::NegInf,
            _ => {
                // Zero cycle: the prefix sums repeat with period |cycle|.
                let base: i64 = seq.stem.iter().sum();
                let mut sums = Vec::with_capacity(seq.cycle.len());
                let mut run = base;
                for w in &seq.cycle {
                    sums.push(run);
                    run += w;
                }
                let v = if kind == ObjectiveKind::TotalInf {
                    sums.into_iter().min()
                } else {
                    sums.into_iter().max()
                };
                Value::int(v.expect("nonempty cycle"))
            }
        };
        if value < Value::Finite(spec.threshold_at(t)) {
            verdict = false;
        }
        values.push(value);
    }
    Ok(LassoEval {
        verdict,
        values: Some(values),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn lasso(g: &GameStructure, text: &str) -> Lasso {
        Lasso::parse(g, text).unwrap()
    }

    fn holds(g: &GameStructure, l: &Lasso, spec: ObjectiveSpec) -> bool {
        eval_lasso(g, l, &spec).unwrap().verdict
    }

    #[test]
    fn short_zero_cycle_is_directly_fixed() {
        let g = fixtures::fix3();
        let l = lasso(&g, "| c y1 y2");
        let mean = eval_lasso(&g, &l, &ObjectiveSpec::plain(ObjectiveKind::MeanInf)).unwrap();
        assert_eq!(mean.values, Some(vec![Value::int(0)]));
        assert!(holds(&g, &l, ObjectiveSpec::dir_fix(3)));
        assert!(!holds(&g, &l, ObjectiveSpec::dir_fix(2)));
    }

    #[test]
    fn alternating_cycles_keep_a_window_open() {
        let g = fixtures::fix3();
        let l = lasso(&g, "| c x c y1 y2");
        assert!(!holds(&g, &l, ObjectiveSpec::fix(3)));
        assert!(holds(&g, &l, ObjectiveSpec::fix(5)));
        assert!(holds(&g, &l, ObjectiveSpec::plain(ObjectiveKind::BndWmp)));
    }

    #[test]
    fn zero_loop_satisfies_everything() {
        let g = fixtures::fix1();
        let l = lasso(&g, "a");
        for kind in ObjectiveKind::ALL {
            let spec = if kind.needs_lmax() {
                ObjectiveSpec::window(kind, 1)
            } else {
                ObjectiveSpec::plain(kind)
            };
            assert!(holds(&g, &l, spec), "{kind}");
        }
        let tp = eval_lasso(&g, &l, &ObjectiveSpec::plain(ObjectiveKind::TotalSup)).unwrap();
        assert_eq!(tp.values, Some(vec![Value::int(0)]));
    }

    #[test]
    fn negative_loop_values() {
        let g = fixtures::fix2();
        let l = lasso(&g, "a");
        let v = eval_lasso(&g, &l, &ObjectiveSpec::plain(ObjectiveKind::TotalInf)).unwrap();
        assert_eq!(v.values, Some(vec![Value::NegInf]));
        assert!(!v.verdict);
        let v = eval_lasso(&g, &l, &ObjectiveSpec::plain(ObjectiveKind::MeanSup)).unwrap();
        assert_eq!(v.values, Some(vec![Value::int(-1)]));
        assert!(!holds(&g, &l, ObjectiveSpec::plain(ObjectiveKind::BndWmp)));
    }

    #[test]
    fn total_payoff_on_zero_cycle_uses_the_periodic_part() {
        let g = fixtures::fix6();
        let l = lasso(&g, "a | b");
        let inf = eval_lasso(&g, &l, &ObjectiveSpec::plain(ObjectiveKind::TotalInf)).unwrap();
        let sup = eval_lasso(&g, &l, &ObjectiveSpec::plain(ObjectiveKind::TotalSup)).unwrap();
        assert_eq!(inf.values, Some(vec![Value::int(-1)]));
        assert_eq!(sup.values, Some(vec![Value::int(-1)]));
        let g = fixtures::fix3();
        let l = lasso(&g, "c x | c y1 y2");
        let inf = eval_lasso(&g, &l, &ObjectiveSpec::plain(ObjectiveKind::TotalInf)).unwrap();
        let sup = eval_lasso(&g, &l, &ObjectiveSpec::plain(ObjectiveKind::TotalSup)).unwrap();
        assert_eq!(inf.values, Some(vec![Value::int(-2)]));
        assert_eq!(sup.values, Some(vec![Value::int(0)]));
    }

    #[test]
    fn positive_cycle_closes_late_windows() {
        // stem of -5 then a +1 loop: the first window needs 5 loop steps
        let g = crate::model::parse_game(
            "wgame 1\ndims 1\nstate a P1\nstate b P1\nedge a b -5\nedge b b 1\ninit a\n",
        )
        .unwrap();
        let l = lasso(&g, "a | b");
        assert!(!holds(&g, &l, ObjectiveSpec::dir_fix(5)));
        assert!(holds(&g, &l, ObjectiveSpec::dir_fix(6)));
        assert!(holds(&g, &l, ObjectiveSpec::fix(1)));
        assert!(holds(&g, &l, ObjectiveSpec::good_window(6)));
        assert!(!holds(&g, &l, ObjectiveSpec::good_window(5)));
        assert!(holds(
            &g,
            &l,
            ObjectiveSpec::plain(ObjectiveKind::DirBndWmp)
        ));
        let seq = &weight_sequences(&g, &l, &[]).unwrap()[0];
        assert_eq!(seq.first_closing(0), Some(6));
        assert_eq!(seq.first_closing(1), Some(1));
    }

    #[test]
    fn direct_bounded_fails_on_a_losing_stem() {
        let g = fixtures::fix6();
        let l = lasso(&g, "a | b");
        assert!(!holds(
            &g,
            &l,
            ObjectiveSpec::plain(ObjectiveKind::DirBndWmp)
        ));
        assert!(holds(&g, &l, ObjectiveSpec::plain(ObjectiveKind::BndWmp)));
        assert!(holds(&g, &l, ObjectiveSpec::fix(1)));
        assert!(!holds(&g, &l, ObjectiveSpec::good_window(100)));
    }

    #[test]
    fn thresholds_shift_weights() {
        let g = fixtures::fix2();
        let l = lasso(&g, "a");
        let t = vec![Rational::from_integer(-1)];
        assert!(holds(
            &g,
            &l,
            ObjectiveSpec::fix(1).with_threshold(t.clone())
        ));
        let spec = ObjectiveSpec::plain(ObjectiveKind::MeanInf).with_threshold(t);
        assert!(holds(&g, &l, spec));
    }

    #[test]
    fn two_dimensions_need_both_closed() {
        let g = fixtures::fix5();
        let same = lasso(&g, "| s1 s1L t1 t1L");
        let opposite = lasso(&g, "| s1 s1L t1 t1R");
        assert!(!holds(&g, &same, ObjectiveSpec::fix(100)));
        assert!(holds(&g, &opposite, ObjectiveSpec::fix(3)));
        assert!(!holds(&g, &opposite, ObjectiveSpec::fix(2)));
    }

    #[test]
    fn inconsistent_lasso_is_rejected() {
        let g = fixtures::fix3();
        let l = Lasso::new(vec![], vec![g.id("c").unwrap(), g.id("y2").unwrap()]);
        assert!(matches!(
            eval_lasso(&g, &l, &ObjectiveSpec::fix(1)),
            Err(Error::InconsistentLasso(_))
        ));
    }
}

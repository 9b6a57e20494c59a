use super::game::GameStructure;
use super::lasso::Lasso;
use crate::arena::StateSet;
use crate::strategy::MooreStrategy;

/// Winning regions of both players plus optional witnesses.
#[derive(Clone, Debug)]
pub struct SolveReport {
    pub winning_p1: StateSet,
    pub winning_p2: StateSet,
    pub witness_lmax: Option<usize>,
    pub strategy: Option<MooreStrategy>,
    pub counterexample: Option<Lasso>,
}

impl SolveReport {
    /// Report whose P2 region is the complement of `winning_p1`.
    pub fn from_winning(winning_p1: StateSet) -> Self {
        let winning_p2 = winning_p1.complement();
        SolveReport {
            winning_p1,
            winning_p2,
            witness_lmax: None,
            strategy: None,
            counterexample: None,
        }
    }

    pub fn won_from_init(&self, g: &GameStructure) -> bool {
        self.winning_p1.contains(g.init())
    }
}

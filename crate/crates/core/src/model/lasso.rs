use super::game::{GameStructure, StateId};
use crate::arena::Arena;
use crate::error::{Error, Result};

/// The ultimately periodic play `stem · cycle^ω`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Lasso {
    pub stem: Vec<StateId>,
    pub cycle: Vec<StateId>,
}

impl Lasso {
    pub fn new(stem: Vec<StateId>, cycle: Vec<StateId>) -> Self {
        Lasso { stem, cycle }
    }

    pub fn first(&self) -> StateId {
        self.stem.first().copied().unwrap_or(self.cycle[0])
    }

    /// State at position `i` of the play.
    pub fn at(&self, i: usize) -> StateId {
        if i < self.stem.len() {
            self.stem[i]
        } else {
            self.cycle[(i - self.stem.len()) % self.cycle.len()]
        }
    }

    /// Every transition must be an edge of `g`.
    pub fn check(&self, g: &GameStructure) -> Result<()> {
        if self.cycle.is_empty() {
            return Err(Error::InconsistentLasso("empty cycle".into()));
        }
        let n = g.num_states();
        if let Some(&s) = self.stem.iter().chain(&self.cycle).find(|&&s| s >= n) {
            return Err(Error::InconsistentLasso(format!("unknown state index {s}")));
        }
        let total = self.stem.len() + self.cycle.len();
        for i in 0..total {
            let (a, b) = (self.at(i), self.at(i + 1));
            if g.weight(a, b).is_none() {
                return Err(Error::InconsistentLasso(format!(
                    "no edge {} -> {}",
                    g.name(a),
                    g.name(b)
                )));
            }
        }
        Ok(())
    }

    /// Parses `a b c | d e` with the cycle after the bar. Without a bar the whole
    /// sequence is the cycle.
    pub fn parse(g: &GameStructure, text: &str) -> Result<Lasso> {
        let ids = |part: &str| -> Result<Vec<StateId>> {
            part.split(|c: char| c.is_whitespace() || c == ',')
                .filter(|t| !t.is_empty())
                .map(|t| g.id(t).ok_or_else(|| Error::UnknownState(t.to_string())))
                .collect()
        };
        let (stem, cycle) = match text.split_once('|') {
            Some((s, c)) => (ids(s)?, ids(c)?),
            None => (Vec::new(), ids(text)?),
        };
        let l = Lasso { stem, cycle };
        l.check(g)?;
        Ok(l)
    }

    pub fn display(&self, g: &GameStructure) -> String {
        let names = |v: &[StateId]| v.iter().map(|&s| g.name(s)).collect::<Vec<_>>().join(" ");
        if self.stem.is_empty() {
            format!("| {}", names(&self.cycle))
        } else {
            format!("{} | {}", names(&self.stem), names(&self.cycle))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn parse_and_display() {
        let g = fixtures::fix3();
        let l = Lasso::parse(&g, "c x | c y1 y2").unwrap();
        assert_eq!(l.stem.len(), 2);
        assert_eq!(l.cycle.len(), 3);
        assert_eq!(l.display(&g), "c x | c y1 y2");
        assert_eq!(l.at(7), g.id("y2").unwrap());
        let whole = Lasso::parse(&g, "c,x").unwrap();
        assert!(whole.stem.is_empty());
        assert!(matches!(
            Lasso::parse(&g, "c q"),
            Err(Error::UnknownState(_))
        ));
        assert!(matches!(
            Lasso::parse(&g, "c |"),
            Err(Error::InconsistentLasso(_))
        ));
        assert!(matches!(
            Lasso::parse(&g, "c y1"),
            Err(Error::InconsistentLasso(_))
        ));
    }
}

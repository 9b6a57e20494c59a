use std::collections::HashMap;
use std::fmt::Write as _;

use crate::arena::Arena;
use crate::error::{Error, Result};
use crate::model::{expect_arity, tokenize, GameStructure, Player, StateId, Token};

/// A finite-memory strategy: memory is updated when leaving a state, and
/// the move at an owned state depends on the memory and that state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MooreStrategy {
    pub player: Player,
    memory: Vec<String>,
    initial: usize,
    num_states: usize,
    update: Vec<usize>,
    action: Vec<Option<StateId>>,
}

impl MooreStrategy {
    /// A machine over `num_states` game states with every update going to the
    /// initial memory and no actions set.
    pub fn new(player: Player, memory: Vec<String>, initial: usize, num_states: usize) -> Self {
        let m = memory.len();
        MooreStrategy {
            player,
            memory,
            initial,
            num_states,
            update: vec![initial; m * num_states],
            action: vec![None; m * num_states],
        }
    }

    /// One memory state; `choice[s]` is the move at every owned state `s`.
    pub fn memoryless(g: &GameStructure, player: Player, choice: &[StateId]) -> Self {
        let mut strat = MooreStrategy::new(player, vec!["m0".into()], 0, g.num_states());
        for s in 0..g.num_states() {
            if g.owner(s) == player {
                strat.set_action(0, s, choice[s]);
            }
        }
        strat
    }

    pub fn memory_size(&self) -> usize {
        self.memory.len()
    }

    pub fn memory_name(&self, m: usize) -> &str {
        &self.memory[m]
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn update(&self, m: usize, s: StateId) -> usize {
        self.update[m * self.num_states + s]
    }

    pub fn action(&self, m: usize, s: StateId) -> Option<StateId> {
        self.action[m * self.num_states + s]
    }

    pub fn set_update(&mut self, m: usize, s: StateId, next: usize) {
        self.update[m * self.num_states + s] = next;
    }

    pub fn set_action(&mut self, m: usize, s: StateId, target: StateId) {
        self.action[m * self.num_states + s] = Some(target);
    }

    /// Checks that the machine is total and only follows edges of `g`.
    pub fn check(&self, g: &GameStructure) -> Result<()> {
        let bad = |msg: String| Err(Error::MalformedStrategy(msg));
        if self.num_states != g.num_states() {
            return bad(format!(
                "strategy covers {} states, game has {}",
                self.num_states,
                g.num_states()
            ));
        }
        if self.memory.is_empty() || self.initial >= self.memory.len() {
            return bad("no initial memory state".into());
        }
        for m in 0..self.memory.len() {
            for s in 0..self.num_states {
                if self.update(m, s) >= self.memory.len() {
                    return bad(format!(
                        "update ({}, {}) out of range",
                        self.memory[m],
                        g.name(s)
                    ));
                }
                if g.owner(s) == self.player {
                    match self.action(m, s) {
                        None => {
                            return bad(format!(
                                "no action for ({}, {})",
                                self.memory[m],
                                g.name(s)
                            ))
                        }
                        Some(t) if g.weight(s, t).is_none() => {
                            return bad(format!(
                                "action ({}, {}) -> {} is not an edge",
                                self.memory[m],
                                g.name(s),
                                g.name(t)
                            ))
                        }
                        _ => {}
                    }
                }
            }
        }
        Ok(())
    }

    /// Memory states reachable from the initial one.
    pub fn reachable_memory(&self) -> Vec<bool> {
        let mut seen = vec![false; self.memory.len()];
        let mut stack = vec![self.initial];
        seen[self.initial] = true;
        while let Some(m) = stack.pop() {
            for s in 0..self.num_states {
                let n = self.update(m, s);
                if !seen[n] {
                    seen[n] = true;
                    stack.push(n);
                }
            }
        }
        seen
    }

    /// The lasso produced when both players follow memory machines from `start`.
    pub fn play_against(
        &self,
        other: &MooreStrategy,
        g: &GameStructure,
        start: StateId,
    ) -> crate::model::Lasso {
        let mut seen = HashMap::new();
        let mut path = Vec::new();
        let (mut s, mut m1, mut m2) = (start, self.initial, other.initial);
        loop {
            if let Some(&i) = seen.get(&(s, m1, m2)) {
                let cycle = path[i..].to_vec();
                path.truncate(i);
                return crate::model::Lasso::new(path, cycle);
            }
            seen.insert((s, m1, m2), path.len());
            path.push(s);
            let mover = if g.owner(s) == self.player {
                self
            } else {
                other
            };
            let mem = if g.owner(s) == self.player { m1 } else { m2 };
            let t = mover.action(mem, s).expect("checked strategy");
            m1 = self.update(m1, s);
            m2 = other.update(m2, s);
            s = t;
        }
    }
}

/// Parses a `wstrat` document against game `g`.
pub fn parse_strategy(g: &GameStructure, text: &str) -> Result<MooreStrategy> {
    let lines = tokenize(text);
    let mut it = lines.iter();
    let eof = || Error::Syntax {
        line: text.lines().count().max(1),
        column: 1,
        message: "unexpected end of input".into(),
    };
    let header = it.next().ok_or_else(eof)?;
    if header[0].text != "wstrat" {
        return Err(header[0].error("expected header `wstrat 1`"));
    }
    expect_arity(header, 2)?;
    if header[1].text != "1" {
        return Err(header[1].error("unsupported wstrat version"));
    }
    let line = it.next().ok_or_else(eof)?;
    if line[0].text != "player" {
        return Err(line[0].error("expected `player <1|2>`"));
    }
    expect_arity(line, 2)?;
    let player = match line[1].text {
        "1" => Player::P1,
        "2" => Player::P2,
        _ => return Err(line[1].error("player must be 1 or 2")),
    };
    let line = it.next().ok_or_else(eof)?;
    if line[0].text != "memory" || line.len() < 2 {
        return Err(line[0].error("expected `memory <ids>`"));
    }
    let mut memory = Vec::new();
    let mut mem_index = HashMap::new();
    for t in &line[1..] {
        let id = t.ident()?;
        if mem_index.insert(id.to_string(), memory.len()).is_some() {
            return Err(t.error(format!("duplicate memory state {id}")));
        }
        memory.push(id.to_string());
    }
    let line = it.next().ok_or_else(eof)?;
    if line[0].text != "init" {
        return Err(line[0].error("expected `init <m>`"));
    }
    expect_arity(line, 2)?;
    let mem = |t: Token<'_>| -> Result<usize> {
        mem_index
            .get(t.ident()?)
            .copied()
            .ok_or_else(|| t.error(format!("unknown memory state {}", t.text)))
    };
    let state = |t: Token<'_>| -> Result<StateId> {
        g.id(t.ident()?)
            .ok_or_else(|| t.error(format!("unknown state {}", t.text)))
    };
    let initial = mem(line[1])?;
    let n = g.num_states();
    let m = memory.len();
    let mut update: Vec<Option<usize>> = vec![None; m * n];
    let mut strat = MooreStrategy::new(player, memory, initial, n);
    for line in it {
        match line[0].text {
            "update" => {
                expect_arity(line, 4)?;
                let (a, s, b) = (mem(line[1])?, state(line[2])?, mem(line[3])?);
                if update[a * n + s].replace(b).is_some() {
                    return Err(line[0].error("duplicate update entry"));
                }
                strat.set_update(a, s, b);
            }
            "act" => {
                expect_arity(line, 4)?;
                let (a, s, t) = (mem(line[1])?, state(line[2])?, state(line[3])?);
                if g.owner(s) != player {
                    return Err(Error::MalformedStrategy(format!(
                        "action at {} which player {} does not own",
                        g.name(s),
                        player.number()
                    )));
                }
                if strat.action(a, s).is_some() {
                    return Err(line[0].error("duplicate act entry"));
                }
                strat.set_action(a, s, t);
            }
            other => return Err(line[0].error(format!("unexpected keyword `{other}`"))),
        }
    }
    if let Some(i) = update.iter().position(|u| u.is_none()) {
        return Err(Error::MalformedStrategy(format!(
            "update map is partial: missing ({}, {})",
            strat.memory_name(i / n),
            g.name(i % n)
        )));
    }
    strat.check(g)?;
    Ok(strat)
}

/// Canonical `wstrat` text.
pub fn serialize_strategy(g: &GameStructure, strat: &MooreStrategy) -> String {
    let mut out = String::new();
    out.push_str("wstrat 1\n");
    let _ = writeln!(out, "player {}", strat.player.number());
    let _ = writeln!(out, "memory {}", strat.memory.join(" "));
    let _ = writeln!(out, "init {}", strat.memory[strat.initial]);
    for m in 0..strat.memory_size() {
        for s in 0..g.num_states() {
            let _ = writeln!(
                out,
                "update {} {} {}",
                strat.memory[m],
                g.name(s),
                strat.memory[strat.update(m, s)]
            );
        }
    }
    for m in 0..strat.memory_size() {
        for s in 0..g.num_states() {
            if let Some(t) = strat.action(m, s) {
                let _ = writeln!(out, "act {} {} {}", strat.memory[m], g.name(s), g.name(t));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    const OPPOSITE: &str = fixtures::FIX5_OPPOSITE;

    #[test]
    fn parse_and_serialize_round_trip() {
        let g = fixtures::fix5();
        let s = parse_strategy(&g, OPPOSITE).unwrap();
        assert_eq!(s.memory_size(), 2);
        assert_eq!(s.player, Player::P1);
        let t1 = g.id("t1").unwrap();
        assert_eq!(s.action(1, t1), g.id("t1L"));
        let body = OPPOSITE.split_once('\n').unwrap().1;
        assert_eq!(serialize_strategy(&g, &s), body);
        assert_eq!(parse_strategy(&g, &serialize_strategy(&g, &s)).unwrap(), s);
        assert_eq!(s.reachable_memory(), vec![true, true]);
    }

    #[test]
    fn malformed_strategies_are_rejected() {
        let g = fixtures::fix5();
        let partial = OPPOSITE.replace("update R t1R R\n", "");
        assert!(matches!(
            parse_strategy(&g, &partial),
            Err(Error::MalformedStrategy(_))
        ));
        let non_edge = OPPOSITE.replace("act L t1 t1R", "act L t1 s1");
        assert!(matches!(
            parse_strategy(&g, &non_edge),
            Err(Error::MalformedStrategy(_))
        ));
        let missing = OPPOSITE.replace("act R t1 t1L\n", "");
        assert!(matches!(
            parse_strategy(&g, &missing),
            Err(Error::MalformedStrategy(_))
        ));
        let foreign = format!("{OPPOSITE}act L s1 s1L\n");
        assert!(matches!(
            parse_strategy(&g, &foreign),
            Err(Error::MalformedStrategy(_))
        ));
        let dup = format!("{OPPOSITE}update L s1 R\n");
        assert!(matches!(
            parse_strategy(&g, &dup),
            Err(Error::Syntax { .. })
        ));
        let unknown = OPPOSITE.replace("update L s1 L", "update L zz L");
        assert!(matches!(
            parse_strategy(&g, &unknown),
            Err(Error::Syntax { line: 6, .. })
        ));
        assert!(matches!(
            parse_strategy(&g, "wstrat 1\n"),
            Err(Error::Syntax { .. })
        ));
    }

    #[test]
    fn play_between_machines() {
        let g = fixtures::fix5();
        let p1 = parse_strategy(&g, OPPOSITE).unwrap();
        let n = g.num_states();
        let mut choice = vec![0; n];
        for s in 0..n {
            choice[s] = g.successors(s).next().unwrap();
        }
        let p2 = MooreStrategy::memoryless(&g, Player::P2, &choice);
        let l = p1.play_against(&p2, &g, g.init());
        assert_eq!(l.display(&g), "| s1 s1L t1 t1R");
    }
}

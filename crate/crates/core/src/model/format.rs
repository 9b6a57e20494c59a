//! The `wgame` text format.

use std::fmt::Write as _;

use super::game::{GameBuilder, GameStructure, Player};
use crate::error::{Error, Result};

pub(crate) fn is_ident(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_')
}

/// A whitespace-separated token with its 1-based line and column.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Token<'a> {
    pub text: &'a str,
    pub line: usize,
    pub column: usize,
}

impl<'a> Token<'a> {
    pub fn error(&self, message: impl Into<String>) -> Error {
        Error::Syntax {
            line: self.line,
            column: self.column,
            message: message.into(),
        }
    }

    pub fn ident(&self) -> Result<&'a str> {
        if is_ident(self.text) {
            Ok(self.text)
        } else {
            Err(self.error(format!("invalid identifier `{}`", self.text)))
        }
    }

    pub fn integer(&self) -> Result<i64> {
        let t = self.text;
        let digits = t.strip_prefix(['-', '+']).unwrap_or(t);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(self.error(format!("expected an integer, found `{t}`")));
        }
        t.parse()
            .map_err(|_| self.error(format!("integer `{t}` out of range")))
    }
}

/// Splits text into non-empty lines of tokens, dropping `#` comments.
pub(crate) fn tokenize(text: &str) -> Vec<Vec<Token<'_>>> {
    let mut lines = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let content = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        };
        let mut tokens = Vec::new();
        let mut start = None;
        for (p, ch) in content
            .char_indices()
            .chain(std::iter::once((content.len(), ' ')))
        {
            if ch.is_whitespace() {
                if let Some(s) = start.take() {
                    tokens.push(Token {
                        text: &content[s..p],
                        line: i + 1,
                        column: content[..s].chars().count() + 1,
                    });
                }
            } else if start.is_none() {
                start = Some(p);
            }
        }
        if !tokens.is_empty() {
            lines.push(tokens);
        }
    }
    lines
}

/// Last position of the input, used for "unexpected end of input" errors.
fn end_position(text: &str) -> (usize, usize) {
    let line = text.lines().count().max(1);
    let column = text.lines().last().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

pub(crate) fn expect_arity(tokens: &[Token<'_>], n: usize) -> Result<()> {
    if tokens.len() == n {
        Ok(())
    } else if tokens.len() < n {
        let last = tokens[tokens.len() - 1];
        Err(Error::Syntax {
            line: last.line,
            column: last.column + last.text.chars().count(),
            message: format!("`{}` expects {} fields", tokens[0].text, n - 1),
        })
    } else {
        Err(tokens[n].error(format!("unexpected token `{}`", tokens[n].text)))
    }
}

#[derive(PartialEq, Eq, PartialOrd, Ord)]
enum Section {
    Header,
    Dims,
    States,
    Edges,
    Done,
}

/// Parses and validates a `wgame` document.
pub fn parse_game(text: &str) -> Result<GameStructure> {
    let lines = tokenize(text);
    let mut section = Section::Header;
    let mut b = GameBuilder::new(0);
    let mut dims = 0usize;
    let mut saw_init = false;
    for tokens in &lines {
        let head = tokens[0];
        match (head.text, &section) {
            (_, Section::Header) => {
                if head.text != "wgame" {
                    return Err(head.error("expected header `wgame 1`"));
                }
                expect_arity(tokens, 2)?;
                if tokens[1].text != "1" {
                    return Err(tokens[1].error("unsupported wgame version"));
                }
                section = Section::Dims;
            }
            (_, Section::Dims) => {
                if head.text != "dims" {
                    return Err(head.error("expected `dims <k>`"));
                }
                expect_arity(tokens, 2)?;
                let k = tokens[1].integer()?;
                if k < 1 {
                    return Err(tokens[1].error("dimension count must be at least 1"));
                }
                dims = k as usize;
                b = GameBuilder::new(dims);
                section = Section::States;
            }
            ("state", Section::States) => {
                expect_arity(tokens, 3)?;
                let id = tokens[1].ident()?;
                let owner = match tokens[2].text {
                    "P1" => Player::P1,
                    "P2" => Player::P2,
                    other => return Err(tokens[2].error(format!("unknown owner `{other}`"))),
                };
                if b.id(id).is_some() {
                    return Err(Error::Semantic {
                        line: head.line,
                        message: format!("duplicate state {id}"),
                    });
                }
                b.state(id, owner)?;
            }
            ("edge", Section::States | Section::Edges) => {
                section = Section::Edges;
                if tokens.len() < 3 {
                    expect_arity(tokens, 3 + dims)?;
                }
                let src = lookup(&b, tokens[1])?;
                let dst = lookup(&b, tokens[2])?;
                let weight = tokens[3..]
                    .iter()
                    .map(|t| t.integer())
                    .collect::<Result<Vec<_>>>()?;
                if weight.len() != dims {
                    return Err(Error::Semantic {
                        line: head.line,
                        message: format!(
                            "edge {} -> {} has {} weights, expected {dims}",
                            tokens[1].text,
                            tokens[2].text,
                            weight.len()
                        ),
                    });
                }
                b.edge(src, dst, weight);
            }
            ("init", Section::States | Section::Edges) => {
                expect_arity(tokens, 2)?;
                let s = lookup(&b, tokens[1])?;
                b.init(s);
                saw_init = true;
                section = Section::Done;
            }
            (_, Section::Done) => {
                return Err(head.error("unexpected content after `init`"));
            }
            (other, _) => {
                return Err(head.error(format!("unexpected keyword `{other}`")));
            }
        }
    }
    if !saw_init {
        let (line, column) = end_position(text);
        return match section {
            Section::Header | Section::Dims => Err(Error::Syntax {
                line,
                column,
                message: "unexpected end of input".into(),
            }),
            _ => Err(Error::Semantic {
                line,
                message: "missing init".into(),
            }),
        };
    }
    b.build()
}

fn lookup(b: &GameBuilder, token: Token<'_>) -> Result<usize> {
    let id = token.ident()?;
    b.id(id).ok_or_else(|| Error::Semantic {
        line: token.line,
        message: format!("unknown state {id}"),
    })
}

/// Canonical text: declaration order, one edge per line.
pub fn serialize_game(g: &GameStructure) -> String {
    let mut out = String::new();
    out.push_str("wgame 1\n");
    let _ = writeln!(out, "dims {}", g.dims());
    for (name, owner) in g.names().iter().zip(g.owners()) {
        let _ = writeln!(out, "state {name} P{}", owner.number());
    }
    for e in g.edges() {
        let _ = write!(out, "edge {} {}", g.name(e.source), g.name(e.target));
        for w in &e.weight {
            let _ = write!(out, " {w}");
        }
        out.push('\n');
    }
    let _ = writeln!(out, "init {}", g.name(g.init()));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arena::Arena;
    use crate::error::Violation;
    use crate::fixtures;

    #[test]
    fn parses_single_loop() {
        let g = parse_game(fixtures::FIX1).unwrap();
        assert_eq!((g.num_states(), g.num_edges(), g.dims()), (1, 1, 1));
        assert_eq!(g.max_abs_weight(), 0);
        assert_eq!(g.weight_bits(), 1);
    }

    #[test]
    fn parses_two_dimensional_gadgets() {
        let g = parse_game(fixtures::FIX5).unwrap();
        assert_eq!((g.num_states(), g.num_edges(), g.dims()), (6, 8, 2));
        assert_eq!(g.max_abs_weight(), 1);
        let p2 = g.owners().iter().filter(|&&o| o == Player::P2).count();
        assert_eq!(p2, 3);
    }

    #[test]
    fn unknown_state_is_semantic() {
        let text = "wgame 1\ndims 1\nstate a P1\nedge a b 0\ninit a\n";
        match parse_game(text) {
            Err(Error::Semantic { line: 4, message }) => {
                assert!(message.contains("unknown state b"))
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn syntax_errors_carry_position() {
        let text = "wgame 1\ndims 1\nstate a P3\n";
        match parse_game(text) {
            Err(Error::Syntax {
                line: 3, column: 9, ..
            }) => {}
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse_game("wgame 2\n"),
            Err(Error::Syntax {
                line: 1,
                column: 7,
                ..
            })
        ));
        assert!(matches!(
            parse_game("wgame 1\ndims 1\nstate a P1\nedge a a x\ninit a\n"),
            Err(Error::Syntax { line: 4, .. })
        ));
    }

    #[test]
    fn semantic_rejections() {
        let dup = "wgame 1\ndims 1\nstate a P1\nstate a P2\nedge a a 0\ninit a\n";
        assert!(matches!(
            parse_game(dup),
            Err(Error::Semantic { line: 4, .. })
        ));
        let arity = "wgame 1\ndims 2\nstate a P1\nedge a a 0\ninit a\n";
        assert!(matches!(
            parse_game(arity),
            Err(Error::Semantic { line: 4, .. })
        ));
        let no_init = "wgame 1\ndims 1\nstate a P1\nedge a a 0\n";
        assert!(matches!(parse_game(no_init), Err(Error::Semantic { .. })));
        let dead = "wgame 1\ndims 1\nstate a P1\nstate b P1\nedge a b 0\ninit a\n";
        match parse_game(dead) {
            Err(Error::InvalidGame(v)) => assert_eq!(v, vec![Violation::DeadEnd("b".into())]),
            other => panic!("unexpected {other:?}"),
        }
        let late = "wgame 1\ndims 1\nstate a P1\nedge a a 0\ninit a\nstate b P1\n";
        assert!(matches!(
            parse_game(late),
            Err(Error::Syntax { line: 6, .. })
        ));
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let text = "# header\n\nwgame 1  # v1\ndims 1\nstate a P1\nedge a a -3 # loop\ninit a\n";
        let g = parse_game(text).unwrap();
        assert_eq!(g.weight(0, 0), Some(&[-3][..]));
    }

    #[test]
    fn fixtures_round_trip() {
        for (name, g) in fixtures::all() {
            let text = serialize_game(&g);
            let back = parse_game(&text).unwrap();
            assert_eq!(back, g, "{name}");
            assert_eq!(serialize_game(&back), text, "{name}");
        }
        let g3 = fixtures::fix3();
        assert_eq!(
            serialize_game(&g3)
                .lines()
                .filter(|l| l.starts_with("state"))
                .count(),
            4
        );
        assert!(serialize_game(&fixtures::fix5()).contains("edge s1 s1L 1 -1\n"));
    }
}

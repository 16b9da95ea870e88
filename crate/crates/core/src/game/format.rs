//! pgsolver-style text encoding.
//!
//! Single objective:
//!
//! ```text
//! parity <max-id>;
//! <id> <priority> <owner> <succ>[,<succ>...] ["name"];
//! ```
//!
//! Two objectives use the header `parity2` and carry two priority columns:
//!
//! ```text
//! parity2 <max-id>;
//! <id> <prio0> <prio1> <owner> <succ>[,<succ>...] ["name"];
//! ```
//!
//! Vertex ids may be sparse; they are compacted to dense indices in
//! declaration order. A `start <id>;` line is accepted and ignored.

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::game::{GameError, GameGraph, Player, PriorityFn, TwoObjectiveGame};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("vertex {0} has an empty successor list")]
    EmptySuccessors(u64),
    #[error("vertex {0} is declared twice")]
    DuplicateVertex(u64),
    #[error("successor {0} is never declared")]
    DanglingSuccessor(u64),
    #[error("{0}")]
    Invalid(GameError),
}

/// Result of [`parse_game`]: either header kind.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParsedGame {
    Single {
        graph: GameGraph,
        priorities: PriorityFn,
    },
    Two(TwoObjectiveGame),
}

impl ParsedGame {
    pub fn graph(&self) -> &GameGraph {
        match self {
            ParsedGame::Single { graph, .. } => graph,
            ParsedGame::Two(game) => &game.graph,
        }
    }
}

struct VertexLine {
    line: usize,
    id: u64,
    priorities: Vec<u32>,
    owner: Player,
    successors: Vec<(u64, usize)>,
    name: Option<String>,
}

fn syntax(line: usize, msg: impl Into<String>) -> ParseError {
    ParseError {
        line,
        kind: ParseErrorKind::Syntax(msg.into()),
    }
}

/// Splits off a trailing quoted name, handling `\"` and `\\` escapes.
fn split_name(body: &str, line: usize) -> Result<(&str, Option<String>), ParseError> {
    let Some(open) = body.find('"') else {
        return Ok((body, None));
    };
    let mut name = String::new();
    let mut chars = body[open + 1..].char_indices();
    let mut closed_at = None;
    while let Some((i, ch)) = chars.next() {
        match ch {
            '\\' => match chars.next() {
                Some((_, esc)) => name.push(esc),
                None => return Err(syntax(line, "dangling escape in name")),
            },
            '"' => {
                closed_at = Some(open + 1 + i);
                break;
            }
            c => name.push(c),
        }
    }
    let close = closed_at.ok_or_else(|| syntax(line, "unterminated name"))?;
    if !body[close + 1..].trim().is_empty() {
        return Err(syntax(line, "unexpected text after name"));
    }
    Ok((&body[..open], Some(name)))
}

fn parse_num<T: std::str::FromStr>(tok: &str, line: usize, what: &str) -> Result<T, ParseError> {
    tok.parse()
        .map_err(|_| syntax(line, format!("expected {what}, found `{tok}`")))
}

pub fn parse_game(text: &str) -> Result<ParsedGame, ParseError> {
    let mut columns = None;
    let mut vertices: Vec<VertexLine> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            continue;
        }
        let body = trimmed
            .strip_suffix(';')
            .ok_or_else(|| syntax(line, "statement must end with `;`"))?;
        let first = body.split_whitespace().next().unwrap_or("");
        match first {
            "parity" | "parity2" => {
                if columns.is_some() || !vertices.is_empty() {
                    return Err(syntax(line, "header must come first and only once"));
                }
                let toks: Vec<&str> = body.split_whitespace().collect();
                if toks.len() != 2 {
                    return Err(syntax(line, "header is `parity <max-id>;`"));
                }
                parse_num::<u64>(toks[1], line, "maximal vertex id")?;
                columns = Some(if first == "parity" { 1 } else { 2 });
                continue;
            }
            "start" => continue,
            _ => {}
        }
        let prio_cols = columns.ok_or_else(|| syntax(line, "missing `parity` header"))?;
        let (body, name) = split_name(body, line)?;
        let toks: Vec<&str> = body.split_whitespace().collect();
        let fixed = 2 + prio_cols;
        if toks.len() < fixed {
            return Err(syntax(line, "too few fields"));
        }
        let id = parse_num::<u64>(toks[0], line, "vertex id")?;
        let priorities = toks[1..1 + prio_cols]
            .iter()
            .map(|t| parse_num::<u32>(t, line, "priority"))
            .collect::<Result<Vec<_>, _>>()?;
        let owner = match toks[1 + prio_cols] {
            "0" => Player::Zero,
            "1" => Player::One,
            other => {
                return Err(syntax(
                    line,
                    format!("owner must be 0 or 1, found `{other}`"),
                ))
            }
        };
        let succ_text = toks[fixed..].concat();
        if succ_text.is_empty() {
            return Err(ParseError {
                line,
                kind: ParseErrorKind::EmptySuccessors(id),
            });
        }
        let successors = succ_text
            .split(',')
            .map(|t| parse_num::<u64>(t, line, "successor id").map(|s| (s, line)))
            .collect::<Result<Vec<_>, _>>()?;
        vertices.push(VertexLine {
            line,
            id,
            priorities,
            owner,
            successors,
            name,
        });
    }
    let prio_cols =
        columns.ok_or_else(|| syntax(text.lines().count().max(1), "missing `parity` header"))?;

    let mut index = HashMap::with_capacity(vertices.len());
    for (i, v) in vertices.iter().enumerate() {
        if index.insert(v.id, i).is_some() {
            return Err(ParseError {
                line: v.line,
                kind: ParseErrorKind::DuplicateVertex(v.id),
            });
        }
    }
    let mut owner = Vec::with_capacity(vertices.len());
    let mut successors = Vec::with_capacity(vertices.len());
    let mut names = Vec::with_capacity(vertices.len());
    let mut prios = vec![Vec::with_capacity(vertices.len()); prio_cols];
    for v in &vertices {
        let succ = v
            .successors
            .iter()
            .map(|&(s, line)| {
                index.get(&s).copied().ok_or(ParseError {
                    line,
                    kind: ParseErrorKind::DanglingSuccessor(s),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        owner.push(v.owner);
        successors.push(succ);
        names.push(v.name.clone());
        for (col, &p) in v.priorities.iter().enumerate() {
            prios[col].push(p);
        }
    }
    let graph = GameGraph::with_names(owner, successors, names).map_err(|e| {
        let line = match &e {
            GameError::DuplicateSuccessor { vertex, .. } | GameError::EmptySuccessors(vertex) => {
                vertices[*vertex].line
            }
            _ => 0,
        };
        ParseError {
            line,
            kind: ParseErrorKind::Invalid(e),
        }
    })?;
    let mut prios = prios.into_iter().map(PriorityFn::new);
    if prio_cols == 1 {
        Ok(ParsedGame::Single {
            graph,
            priorities: prios.next().unwrap(),
        })
    } else {
        let p0 = prios.next().unwrap();
        let p1 = prios.next().unwrap();
        let game = TwoObjectiveGame::new(graph, p0, p1).expect("one priority per declared vertex");
        Ok(ParsedGame::Two(game))
    }
}

fn write_vertex(out: &mut String, g: &GameGraph, v: usize, prios: &[u32]) {
    let _ = write!(out, "{v}");
    for p in prios {
        let _ = write!(out, " {p}");
    }
    let succ: Vec<String> = g.successors(v).iter().map(usize::to_string).collect();
    let _ = write!(out, " {} {}", g.owner(v).index(), succ.join(","));
    if let Some(name) = g.name(v) {
        let escaped = name.replace('\\', "\\\\").replace('"', "\\\"");
        let _ = write!(out, " \"{escaped}\"");
    }
    out.push_str(";\n");
}

fn max_id(g: &GameGraph) -> usize {
    g.vertex_count().saturating_sub(1)
}

pub fn serialize_single(g: &GameGraph, p: &PriorityFn) -> String {
    let mut out = format!("parity {};\n", max_id(g));
    for v in g.vertices() {
        write_vertex(&mut out, g, v, &[p.get(v)]);
    }
    out
}

pub fn serialize_game(game: &ParsedGame) -> String {
    match game {
        ParsedGame::Single { graph, priorities } => serialize_single(graph, priorities),
        ParsedGame::Two(game) => {
            let g = &game.graph;
            let mut out = format!("parity2 {};\n", max_id(g));
            for v in g.vertices() {
                write_vertex(&mut out, g, v, &[game.p0.get(v), game.p1.get(v)]);
            }
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::fixtures::*;
    use crate::game::{buchi_to_parity, cobuchi_to_parity};
    use proptest::prelude::*;

    #[test]
    fn minimal_game() {
        let parsed = parse_game("parity 1;\n0 2 0 0;\n").unwrap();
        let ParsedGame::Single { graph, priorities } = &parsed else {
            panic!("expected a single-objective game");
        };
        assert_eq!(graph.vertex_count(), 1);
        assert_eq!(graph.successors(0), &[0]);
        assert_eq!(graph.owner(0), Player::Zero);
        assert_eq!(priorities.get(0), 2);
        let text = serialize_game(&parsed);
        assert_eq!(
            text.split_whitespace().collect::<Vec<_>>(),
            ["parity", "0;", "0", "2", "0", "0;"]
        );
        assert_eq!(parse_game(&text).unwrap(), parsed);
    }

    #[test]
    fn empty_successor_list_is_rejected() {
        let err = parse_game("parity 0;\n0 1 0 ;\n").unwrap_err();
        assert_eq!(err.line, 2);
        assert_eq!(err.kind, ParseErrorKind::EmptySuccessors(0));
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = parse_game("parity 1;\n0 1 0 1;\n0 1 0 0;\n").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::DuplicateVertex(0));
        assert_eq!(err.line, 3);
        let err = parse_game("parity 1;\n0 1 0 7;\n").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::DanglingSuccessor(7));
        let err = parse_game("parity 1;\n0 x 0 0;\n").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::Syntax(_)));
        assert_eq!(err.line, 2);
        let err = parse_game("0 1 0 0;\n").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::Syntax(_)));
        let err = parse_game("parity 1;\n0 1 2 0;\n").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::Syntax(_)));
    }

    #[test]
    fn sparse_ids_are_compacted_in_declaration_order() {
        let parsed = parse_game("parity 20;\nstart 20;\n20 1 1 5;\n5 0 0 20,5;\n").unwrap();
        let g = parsed.graph();
        assert_eq!(g.successors(0), &[1]);
        assert_eq!(g.successors(1), &[0, 1]);
        assert_eq!(g.owner(0), Player::One);
    }

    #[test]
    fn running_example_two_objectives() {
        // Player 0: visit c infinitely often; player 1: eventually stay in {a,c,d}.
        let text = "parity2 3;\n\
                    0 1 0 0 0,1,2 \"a\";\n\
                    1 1 1 1 1,3 \"b\";\n\
                    2 2 0 1 2,0 \"c\";\n\
                    3 1 0 0 2 \"d\";\n";
        let ParsedGame::Two(game) = parse_game(text).unwrap() else {
            panic!("expected two objectives");
        };
        let g = example();
        assert_eq!(game.graph, g);
        assert_eq!(game.p0, buchi_to_parity(&g, &g.vertex_set([C])));
        assert_eq!(game.p1, cobuchi_to_parity(&g, &g.vertex_set([A, C, D])));
        let again = serialize_game(&ParsedGame::Two(game.clone()));
        assert_eq!(again, text);
    }

    #[test]
    fn names_with_quotes_survive() {
        let g = GameGraph::with_names(
            vec![Player::One],
            vec![vec![0]],
            vec![Some("say \"hi\" \\o/".into())],
        )
        .unwrap();
        let parsed = ParsedGame::Single {
            graph: g,
            priorities: PriorityFn::new(vec![3]),
        };
        assert_eq!(parse_game(&serialize_game(&parsed)).unwrap(), parsed);
    }

    fn arb_game() -> impl Strategy<Value = ParsedGame> {
        (1usize..9).prop_flat_map(|n| {
            (
                proptest::collection::vec(any::<bool>(), n),
                proptest::collection::vec(proptest::collection::btree_set(0..n, 1..=n.min(3)), n),
                proptest::collection::vec(0u32..6, n),
                proptest::collection::vec(0u32..6, n),
                any::<bool>(),
            )
                .prop_map(|(own, succ, p0, p1, two)| {
                    let owner = own
                        .into_iter()
                        .map(|b| if b { Player::One } else { Player::Zero })
                        .collect();
                    let succ = succ.into_iter().map(|s| s.into_iter().collect()).collect();
                    let graph = GameGraph::new(owner, succ).unwrap();
                    if two {
                        ParsedGame::Two(
                            TwoObjectiveGame::new(graph, PriorityFn::new(p0), PriorityFn::new(p1))
                                .unwrap(),
                        )
                    } else {
                        ParsedGame::Single {
                            graph,
                            priorities: PriorityFn::new(p0),
                        }
                    }
                })
        })
    }

    proptest! {
        #[test]
        fn parse_inverts_serialize(game in arb_game()) {
            prop_assert_eq!(parse_game(&serialize_game(&game)).unwrap(), game);
        }
    }
}

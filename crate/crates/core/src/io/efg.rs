//! Line-oriented text format for game trees.
//!
//! ```text
//! # efg format 1
//! game "<name>"
//! chance <id> parent=<id|-> action=<label|-> outcomes=<label:prob,...>
//! decision <id> parent=<id|-> action=<label|-> player=<1|2> infoset=<label> actions=<label,...>
//! terminal <id> parent=<id|-> action=<label|-> payoffs=<u1>,<u2>
//! ```
//!
//! Ids are non-negative integers, and a node's parent must appear on an
//! earlier line. `#` starts a comment. Labels contain no whitespace and no
//! `#`; action and outcome labels additionally exclude `,` and `:`, and
//! may not be `-`.

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::game::{GameError, GameTree, Node, NodeKind, Player};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum EfgError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error(transparent)]
    Semantic(#[from] GameError),
    #[error("label `{0}` cannot be written in the text format")]
    BadLabel(String),
}

/// Parses a document and validates the resulting game.
pub fn parse_efg(text: &str) -> Result<GameTree, EfgError> {
    let mut name: Option<String> = None;
    let mut nodes: Vec<Node> = Vec::new();
    let mut ids: HashMap<u64, usize> = HashMap::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line = Line {
            no: lineno + 1,
            text: raw,
        };
        let body = strip_comment(raw);
        let tokens = tokenize(body);
        let Some(&(col, head)) = tokens.first() else {
            continue;
        };
        if name.is_none() {
            if head != "game" {
                return Err(line.err(col, "expected `game \"<name>\"` header"));
            }
            name = Some(parse_name(&line, body)?);
            continue;
        }
        if head == "game" {
            return Err(line.err(col, "duplicate game header"));
        }

        let Some(&(id_col, id_text)) = tokens.get(1) else {
            return Err(line.err(col, "missing node id"));
        };
        let id: u64 = id_text
            .parse()
            .map_err(|_| line.err(id_col, format!("invalid node id `{id_text}`")))?;
        if ids.contains_key(&id) {
            return Err(line.err(id_col, format!("duplicate node id {id}")));
        }

        let mut fields: HashMap<&str, (usize, &str)> = HashMap::new();
        for &(c, tok) in &tokens[2..] {
            let Some((key, value)) = tok.split_once('=') else {
                return Err(line.err(c, format!("expected key=value, found `{tok}`")));
            };
            if fields.insert(key, (c + key.len() + 1, value)).is_some() {
                return Err(line.err(c, format!("duplicate field `{key}`")));
            }
        }
        let allowed: &[&str] = match head {
            "chance" => &["parent", "action", "outcomes"],
            "decision" => &["parent", "action", "player", "infoset", "actions"],
            "terminal" => &["parent", "action", "payoffs"],
            other => return Err(line.err(col, format!("unknown record `{other}`"))),
        };
        for (key, (c, _)) in &fields {
            if !allowed.contains(key) {
                return Err(line.err(c - key.len() - 1, format!("unknown field `{key}`")));
            }
        }
        let field = |key: &str| -> Result<(usize, &str), EfgError> {
            fields
                .get(key)
                .copied()
                .ok_or_else(|| line.err(col, format!("missing field `{key}`")))
        };

        let (pc, parent_text) = field("parent")?;
        let parent = if parent_text == "-" {
            None
        } else {
            let p: u64 = parent_text
                .parse()
                .map_err(|_| line.err(pc, format!("invalid parent id `{parent_text}`")))?;
            Some(
                *ids.get(&p)
                    .ok_or_else(|| line.err(pc, format!("parent {p} not defined earlier")))?,
            )
        };
        let action = match fields.get("action") {
            None | Some((_, "-")) => None,
            Some((_, a)) => Some(a.to_string()),
        };

        let kind = match head {
            "chance" => {
                let (oc, text) = field("outcomes")?;
                let mut outcomes = Vec::new();
                let mut offset = oc;
                for item in text.split(',') {
                    let Some((label, prob)) = item.rsplit_once(':') else {
                        return Err(line.err(offset, format!("expected label:prob, found `{item}`")));
                    };
                    let p: f64 = prob.parse().map_err(|_| {
                        line.err(offset + label.len() + 1, format!("invalid probability `{prob}`"))
                    })?;
                    outcomes.push((label.to_string(), p));
                    offset += item.len() + 1;
                }
                NodeKind::Chance { outcomes }
            }
            "decision" => {
                let (plc, player_text) = field("player")?;
                let player = player_text
                    .parse::<u8>()
                    .ok()
                    .and_then(Player::from_number)
                    .ok_or_else(|| line.err(plc, format!("player must be 1 or 2, found `{player_text}`")))?;
                let (_, infoset) = field("infoset")?;
                let (_, actions) = field("actions")?;
                NodeKind::Decision {
                    player,
                    infoset: infoset.to_string(),
                    actions: actions.split(',').map(str::to_string).collect(),
                }
            }
            _ => {
                let (uc, text) = field("payoffs")?;
                let parts: Vec<&str> = text.split(',').collect();
                if parts.len() != 2 {
                    return Err(line.err(uc, "payoffs need exactly two values"));
                }
                let mut payoffs = [0.0; 2];
                let mut offset = uc;
                for (slot, part) in payoffs.iter_mut().zip(&parts) {
                    *slot = part
                        .parse()
                        .map_err(|_| line.err(offset, format!("invalid payoff `{part}`")))?;
                    offset += part.len() + 1;
                }
                NodeKind::Terminal { payoffs }
            }
        };
        ids.insert(id, nodes.len());
        nodes.push(Node {
            parent,
            action,
            kind,
        });
    }

    let name = name.ok_or(EfgError::Syntax {
        line: text.lines().count().max(1),
        column: 1,
        message: "missing game header".into(),
    })?;
    Ok(GameTree::new(name, nodes)?)
}

/// Writes a game in pre-order with node ids equal to pre-order positions.
pub fn serialize_efg(tree: &GameTree) -> Result<String, EfgError> {
    let name = tree.name();
    if name.contains(['"', '\n', '\r']) {
        return Err(EfgError::BadLabel(name.to_string()));
    }
    let mut out = String::new();
    let _ = writeln!(out, "# efg format {FORMAT_VERSION}");
    let _ = writeln!(out, "game \"{name}\"");
    for (id, node) in tree.nodes().iter().enumerate() {
        let parent = node.parent.map_or("-".to_string(), |p| p.to_string());
        let action = match &node.action {
            None => "-",
            Some(a) => {
                check_item(a)?;
                a.as_str()
            }
        };
        match &node.kind {
            NodeKind::Chance { outcomes } => {
                let mut items = Vec::with_capacity(outcomes.len());
                for (label, p) in outcomes {
                    check_item(label)?;
                    items.push(format!("{label}:{p:?}"));
                }
                let _ = writeln!(
                    out,
                    "chance {id} parent={parent} action={action} outcomes={}",
                    items.join(",")
                );
            }
            NodeKind::Decision {
                player,
                infoset,
                actions,
            } => {
                check_label(infoset)?;
                for a in actions {
                    check_item(a)?;
                }
                let _ = writeln!(
                    out,
                    "decision {id} parent={parent} action={action} player={player} infoset={infoset} actions={}",
                    actions.join(",")
                );
            }
            NodeKind::Terminal { payoffs } => {
                let _ = writeln!(
                    out,
                    "terminal {id} parent={parent} action={action} payoffs={:?},{:?}",
                    payoffs[0], payoffs[1]
                );
            }
        }
    }
    Ok(out)
}

fn check_label(label: &str) -> Result<(), EfgError> {
    if label.is_empty() || label.contains(|c: char| c.is_whitespace() || c == '#') {
        return Err(EfgError::BadLabel(label.to_string()));
    }
    Ok(())
}

fn check_item(label: &str) -> Result<(), EfgError> {
    check_label(label)?;
    if label == "-" || label.contains([',', ':', '=']) {
        return Err(EfgError::BadLabel(label.to_string()));
    }
    Ok(())
}

struct Line<'a> {
    no: usize,
    text: &'a str,
}

impl Line<'_> {
    /// `col` is a byte offset into the line; reported columns count characters from 1.
    fn err(&self, col: usize, message: impl Into<String>) -> EfgError {
        EfgError::Syntax {
            line: self.no,
            column: self.text[..col.min(self.text.len())].chars().count() + 1,
            message: message.into(),
        }
    }
}

/// Cuts the line at the first `#` outside a double-quoted string.
fn strip_comment(line: &str) -> &str {
    let mut quoted = false;
    for (i, c) in line.char_indices() {
        match c {
            '"' => quoted = !quoted,
            '#' if !quoted => return &line[..i],
            _ => {}
        }
    }
    line
}

/// Whitespace-separated tokens with their byte offsets.
fn tokenize(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in line.char_indices() {
        match (c.is_whitespace(), start) {
            (true, Some(s)) => {
                out.push((s, &line[s..i]));
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s, &line[s..]));
    }
    out
}

fn parse_name(line: &Line<'_>, body: &str) -> Result<String, EfgError> {
    let rest_at = body.find("game").unwrap() + 4;
    let rest = &body[rest_at..];
    let open = rest
        .find('"')
        .ok_or_else(|| line.err(rest_at, "game name must be double-quoted"))?;
    if !rest[..open].trim().is_empty() {
        return Err(line.err(rest_at, "game name must be double-quoted"));
    }
    let inner = &rest[open + 1..];
    let close = inner
        .find('"')
        .ok_or_else(|| line.err(rest_at + open, "unterminated game name"))?;
    let tail_at = rest_at + open + 1 + close + 1;
    if !body[tail_at..].trim().is_empty() {
        return Err(line.err(tail_at, "unexpected text after game name"));
    }
    Ok(inner[..close].to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::{builtin, goofspiel, single_terminal, GoofspielParams};

    #[test]
    fn ex1_round_trip_has_expected_shape() {
        let text = serialize_efg(&builtin("EX1").unwrap()).unwrap();
        let tree = parse_efg(&text).unwrap();
        let mut counts = [0usize; 3];
        for n in tree.nodes() {
            match n.kind {
                NodeKind::Chance { .. } => counts[0] += 1,
                NodeKind::Decision { .. } => counts[1] += 1,
                NodeKind::Terminal { .. } => counts[2] += 1,
            }
        }
        assert_eq!(counts, [1, 6, 8]);
        assert_eq!(tree, builtin("EX1").unwrap());
    }

    #[test]
    fn goofspiel3_round_trips() {
        let g = goofspiel(GoofspielParams::new(3).unwrap());
        let back = parse_efg(&serialize_efg(&g).unwrap()).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn single_terminal_round_trips() {
        let g = single_terminal();
        assert_eq!(parse_efg(&serialize_efg(&g).unwrap()).unwrap(), g);
    }

    #[test]
    fn bad_probability_sum_is_reported() {
        let doc = "game \"x\"\nchance 0 parent=- action=- outcomes=a:0.5,b:0.6\n\
                   terminal 1 parent=0 action=a payoffs=0,0\nterminal 2 parent=0 action=b payoffs=0,0\n";
        let err = parse_efg(doc).unwrap_err();
        assert!(err.to_string().contains("probabilities sum 1.1"), "{err}");
    }

    #[test]
    fn syntax_errors_carry_position() {
        let doc = "game \"x\"\nterminal 0 parent=- action=- payoffs=1,oops\n";
        match parse_efg(doc).unwrap_err() {
            EfgError::Syntax { line, column, .. } => {
                assert_eq!(line, 2);
                assert_eq!(column, 40);
            }
            other => panic!("unexpected {other:?}"),
        }
        let doc = "game \"x\"\nleaf 0 parent=-\n";
        assert!(matches!(
            parse_efg(doc).unwrap_err(),
            EfgError::Syntax { line: 2, column: 1, .. }
        ));
    }

    #[test]
    fn parent_must_come_first() {
        let doc = "game \"x\"\nterminal 1 parent=0 action=a payoffs=0,0\n";
        assert!(matches!(parse_efg(doc).unwrap_err(), EfgError::Syntax { .. }));
    }

    #[test]
    fn missing_header_is_an_error() {
        assert!(matches!(parse_efg("# nothing\n").unwrap_err(), EfgError::Syntax { .. }));
    }

    #[test]
    fn comments_are_ignored() {
        let doc = "# leading\ngame \"x # not a comment\"  # trailing\n\
                   terminal 0 parent=- action=- payoffs=1.5,-2 # leaf\n";
        let tree = parse_efg(doc).unwrap();
        assert_eq!(tree.name(), "x # not a comment");
        assert_eq!(
            tree.node(0).kind,
            NodeKind::Terminal {
                payoffs: [1.5, -2.0]
            }
        );
    }

    #[test]
    fn unwritable_labels_are_rejected() {
        let nodes = vec![
            Node::root(NodeKind::Chance {
                outcomes: vec![("a b".into(), 1.0)],
            }),
            Node::child(0, "a b", NodeKind::Terminal { payoffs: [0.0, 0.0] }),
        ];
        let tree = GameTree::new("x", nodes).unwrap();
        assert!(matches!(serialize_efg(&tree), Err(EfgError::BadLabel(_))));
    }
}

use crate::game::{GameTree, Node, NodeKind, Player};

use super::SourceError;

pub const BUILTIN_NAMES: [&str; 3] = ["EX1", "EX2", "EX3"];

/// The three small example games.
///
/// All start with a fair coin observed by Player 1, who then picks one of two
/// actions (`1`,`2` after heads at `A`; `3`,`4` after tails at `B`). Player 2
/// then acts once. What Player 2 observes differs:
///
/// - `EX1`: nothing; a single information set `C` with actions `1`,`2`.
/// - `EX2`: the coin; `C` (`1`,`2`) after heads and `D` (`3`,`4`) after tails.
/// - `EX3`: Player 1's action index but not the coin; `C` (`1`,`2`) after the
///   first action and `D` (`3`,`4`) after the second.
///
/// Payoffs are all zero.
pub fn builtin(name: &str) -> Result<GameTree, SourceError> {
    let p2_set: fn(usize, usize) -> &'static str = match name.to_ascii_uppercase().as_str() {
        "EX1" => |_coin: usize, _act: usize| "C",
        "EX2" => |coin: usize, _act: usize| if coin == 0 { "C" } else { "D" },
        "EX3" => |_coin: usize, act: usize| if act == 0 { "C" } else { "D" },
        _ => return Err(SourceError::UnknownBuiltin(name.to_string())),
    };
    let mut nodes = vec![Node::root(NodeKind::Chance {
        outcomes: vec![("heads".into(), 0.5), ("tails".into(), 0.5)],
    })];
    let p1 = [("A", ["1", "2"]), ("B", ["3", "4"])];
    for (coin, (label, actions)) in p1.iter().enumerate() {
        let outcome = if coin == 0 { "heads" } else { "tails" };
        nodes.push(Node::child(
            0,
            outcome,
            NodeKind::Decision {
                player: Player::One,
                infoset: label.to_string(),
                actions: actions.iter().map(|a| a.to_string()).collect(),
            },
        ));
        let p1_node = nodes.len() - 1;
        for (act, a) in actions.iter().enumerate() {
            let set = p2_set(coin, act);
            let p2_actions = if set == "C" { ["1", "2"] } else { ["3", "4"] };
            nodes.push(Node::child(
                p1_node,
                *a,
                NodeKind::Decision {
                    player: Player::Two,
                    infoset: set.to_string(),
                    actions: p2_actions.iter().map(|a| a.to_string()).collect(),
                },
            ));
            let p2_node = nodes.len() - 1;
            for b in p2_actions {
                nodes.push(Node::child(
                    p2_node,
                    b,
                    NodeKind::Terminal {
                        payoffs: [0.0, 0.0],
                    },
                ));
            }
        }
    }
    Ok(GameTree::new(name.to_ascii_uppercase(), nodes).expect("built-in games are valid"))
}

/// A game consisting of one terminal node with zero payoffs.
pub fn single_terminal() -> GameTree {
    GameTree::new(
        "single",
        vec![Node::root(NodeKind::Terminal {
            payoffs: [0.0, 0.0],
        })],
    )
    .expect("single terminal is valid")
}

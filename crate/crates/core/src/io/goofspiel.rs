use crate::game::{GameTree, Node, NodeId, NodeKind, Player};

use super::SourceError;

/// Limited-information Goofspiel with `ranks` cards per deck.
///
/// Tied bids discard the prize and players only learn who won each round.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GoofspielParams {
    pub ranks: usize,
}

impl GoofspielParams {
    pub const MIN_RANKS: usize = 2;
    pub const MAX_RANKS: usize = 6;

    pub fn new(ranks: usize) -> Result<Self, SourceError> {
        if !(Self::MIN_RANKS..=Self::MAX_RANKS).contains(&ranks) {
            return Err(SourceError::RanksOutOfRange(ranks));
        }
        Ok(GoofspielParams { ranks })
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Outcome {
    Win,
    Lose,
    Tie,
}

impl Outcome {
    fn code(self) -> char {
        match self {
            Outcome::Win => 'W',
            Outcome::Lose => 'L',
            Outcome::Tie => 'T',
        }
    }

    fn flipped(self) -> Outcome {
        match self {
            Outcome::Win => Outcome::Lose,
            Outcome::Lose => Outcome::Win,
            Outcome::Tie => Outcome::Tie,
        }
    }
}

struct Builder {
    nodes: Vec<Node>,
}

struct RoundState {
    prizes: Vec<usize>,
    hands: [Vec<usize>; 2],
    /// Each player's view: `p<prize>b<own bid><W|L|T>` per finished round.
    views: [Vec<String>; 2],
    scores: [f64; 2],
}

/// Builds limited-information Goofspiel.
///
/// Each round a chance node publicly reveals one of the remaining prize
/// cards (uniformly). Player 1 bids, then Player 2 bids without seeing
/// Player 1's card. Both then learn only the round's winner; ties discard
/// the prize. The last round is still played out with one card per hand.
/// Payoffs are the summed values of the prizes each player won.
pub fn goofspiel(params: GoofspielParams) -> GameTree {
    let k = params.ranks;
    let mut b = Builder { nodes: Vec::new() };
    let cards: Vec<usize> = (1..=k).collect();
    let state = RoundState {
        prizes: cards.clone(),
        hands: [cards.clone(), cards],
        views: [Vec::new(), Vec::new()],
        scores: [0.0, 0.0],
    };
    b.round(None, state);
    GameTree::new(format!("goofspiel-{k}"), b.nodes).expect("generated goofspiel is valid")
}

impl Builder {
    fn push(&mut self, parent: Option<(NodeId, String)>, kind: NodeKind) -> NodeId {
        let node = match parent {
            None => Node::root(kind),
            Some((p, a)) => Node::child(p, a, kind),
        };
        self.nodes.push(node);
        self.nodes.len() - 1
    }

    fn round(&mut self, parent: Option<(NodeId, String)>, st: RoundState) {
        if st.prizes.is_empty() {
            self.push(parent, NodeKind::Terminal { payoffs: st.scores });
            return;
        }
        let prob = 1.0 / st.prizes.len() as f64;
        let chance = self.push(
            parent,
            NodeKind::Chance {
                outcomes: st.prizes.iter().map(|p| (format!("p{p}"), prob)).collect(),
            },
        );
        for &prize in &st.prizes {
            let p1 = self.push(
                Some((chance, format!("p{prize}"))),
                decision(Player::One, &st.views[0], prize, &st.hands[0]),
            );
            for &bid1 in &st.hands[0] {
                let p2 = self.push(
                    Some((p1, format!("b{bid1}"))),
                    decision(Player::Two, &st.views[1], prize, &st.hands[1]),
                );
                for &bid2 in &st.hands[1] {
                    let outcome = match bid1.cmp(&bid2) {
                        std::cmp::Ordering::Greater => Outcome::Win,
                        std::cmp::Ordering::Less => Outcome::Lose,
                        std::cmp::Ordering::Equal => Outcome::Tie,
                    };
                    let mut scores = st.scores;
                    match outcome {
                        Outcome::Win => scores[0] += prize as f64,
                        Outcome::Lose => scores[1] += prize as f64,
                        Outcome::Tie => {}
                    }
                    let mut views = st.views.clone();
                    views[0].push(format!("p{prize}b{bid1}{}", outcome.code()));
                    views[1].push(format!("p{prize}b{bid2}{}", outcome.flipped().code()));
                    let next = RoundState {
                        prizes: st.prizes.iter().copied().filter(|&c| c != prize).collect(),
                        hands: [without(&st.hands[0], bid1), without(&st.hands[1], bid2)],
                        views,
                        scores,
                    };
                    self.round(Some((p2, format!("b{bid2}"))), next);
                }
            }
        }
    }
}

fn without(hand: &[usize], card: usize) -> Vec<usize> {
    hand.iter().copied().filter(|&c| c != card).collect()
}

fn decision(player: Player, view: &[String], prize: usize, hand: &[usize]) -> NodeKind {
    NodeKind::Decision {
        player,
        infoset: format!("{}|{}|p{prize}", player.number(), view.join(",")),
        actions: hand.iter().map(|c| format!("b{c}")).collect(),
    }
}

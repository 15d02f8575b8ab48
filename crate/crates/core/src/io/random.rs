use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::game::{GameTree, Node, NodeId, NodeKind, Player};

/// Shape of the random public-chance games.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RandomGameParams {
    /// Maximum number of moves on any root-to-leaf path.
    pub max_depth: usize,
    /// Maximum number of actions at a decision node (at least 1).
    pub max_actions: usize,
    /// Maximum number of chance outcomes (at least 2).
    pub max_outcomes: usize,
    /// Probability that a move is hidden from the opponent.
    pub hide_prob: f64,
}

impl Default for RandomGameParams {
    fn default() -> Self {
        RandomGameParams {
            max_depth: 4,
            max_actions: 3,
            max_outcomes: 2,
            hide_prob: 0.6,
        }
    }
}

/// A random two-player game in which every chance outcome is observed by
/// both players.
///
/// Information-set labels are each player's full observation history, so
/// perfect recall holds by construction; opponent moves are observed or
/// hidden at random, which produces non-trivial information sets. The action
/// count of a set is a hash of its label so all nodes of a set agree.
pub fn random_public_chance(seed: u64, params: RandomGameParams) -> GameTree {
    let mut g = Gen {
        rng: ChaCha8Rng::seed_from_u64(seed),
        seed,
        params,
        nodes: Vec::new(),
    };
    g.build(None, 0, [String::new(), String::new()]);
    GameTree::new(format!("random-{seed}"), g.nodes).expect("random games are valid")
}

struct Gen {
    rng: ChaCha8Rng,
    seed: u64,
    params: RandomGameParams,
    nodes: Vec<Node>,
}

impl Gen {
    fn push(&mut self, parent: Option<(NodeId, String)>, kind: NodeKind) -> NodeId {
        self.nodes.push(match parent {
            None => Node::root(kind),
            Some((p, a)) => Node::child(p, a, kind),
        });
        self.nodes.len() - 1
    }

    fn build(&mut self, parent: Option<(NodeId, String)>, depth: usize, views: [String; 2]) {
        let roll: f64 = self.rng.random();
        if depth >= self.params.max_depth || (depth > 0 && roll < 0.15) {
            let payoffs = [
                self.rng.random_range(-3..=3) as f64,
                self.rng.random_range(-3..=3) as f64,
            ];
            self.push(parent, NodeKind::Terminal { payoffs });
            return;
        }
        if roll < 0.35 {
            let n = self.rng.random_range(2..=self.params.max_outcomes.max(2));
            let prob = 1.0 / n as f64;
            let outcomes: Vec<(String, f64)> = (0..n).map(|i| (format!("c{i}"), prob)).collect();
            let id = self.push(parent, NodeKind::Chance { outcomes: outcomes.clone() });
            for (label, _) in outcomes {
                let next = views.clone().map(|v| format!("{v}{label};"));
                self.build(Some((id, label)), depth + 1, next);
            }
            return;
        }
        let player = if roll < 0.675 { Player::One } else { Player::Two };
        let p = player.index();
        let infoset = format!("{}|{}", player.number(), views[p]);
        let n = 1 + (fnv(self.seed, &infoset) % self.params.max_actions.max(1) as u64) as usize;
        let actions: Vec<String> = (0..n).map(|a| format!("a{a}")).collect();
        let id = self.push(
            parent,
            NodeKind::Decision {
                player,
                infoset,
                actions: actions.clone(),
            },
        );
        for action in actions {
            let mut next = views.clone();
            next[p].push_str(&format!("m{action};"));
            if self.rng.random::<f64>() >= self.params.hide_prob {
                next[1 - p].push_str(&format!("o{action};"));
            }
            self.build(Some((id, action)), depth + 1, next);
        }
    }
}

fn fnv(seed: u64, s: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325 ^ seed;
    for b in s.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

//! Two-player perfect-recall extensive-form games.
//!
//! A [`GameTree`] is immutable once built. Construction validates the tree
//! shape, chance probabilities, information-set consistency and perfect
//! recall, and then derives every structural relation the rest of the crate
//! consumes: information sets, sequences, parent sequences, connectedness
//! between opposing information sets and ranks.
//!
//! Nodes, information sets and sequences are numbered in depth-first
//! pre-order (children visited in action order), so all derived indices are
//! reproducible.

mod plans;

pub use plans::{expected_payoffs, plan_count, reduced_plans, ReducedPlan, DEFAULT_PLAN_CAP};

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

/// Tolerance on the sum of chance probabilities at a chance node.
pub const CHANCE_SUM_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Player {
    One,
    Two,
}

impl Player {
    pub const BOTH: [Player; 2] = [Player::One, Player::Two];

    /// 0 for Player 1, 1 for Player 2.
    pub fn index(self) -> usize {
        match self {
            Player::One => 0,
            Player::Two => 1,
        }
    }

    pub fn number(self) -> u8 {
        self.index() as u8 + 1
    }

    pub fn from_number(n: u8) -> Option<Player> {
        match n {
            1 => Some(Player::One),
            2 => Some(Player::Two),
            _ => None,
        }
    }

    pub fn opponent(self) -> Player {
        match self {
            Player::One => Player::Two,
            Player::Two => Player::One,
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

pub type NodeId = usize;

#[derive(Clone, Debug, PartialEq)]
pub enum NodeKind {
    Decision {
        player: Player,
        infoset: String,
        actions: Vec<String>,
    },
    /// Outcome labels with their probabilities, in child order.
    Chance { outcomes: Vec<(String, f64)> },
    Terminal { payoffs: [f64; 2] },
}

/// A node record: its parent, the label of the edge leading into it, and
/// what happens at the node.
#[derive(Clone, Debug, PartialEq)]
pub struct Node {
    pub parent: Option<NodeId>,
    pub action: Option<String>,
    pub kind: NodeKind,
}

impl Node {
    pub fn root(kind: NodeKind) -> Self {
        Node {
            parent: None,
            action: None,
            kind,
        }
    }

    pub fn child(parent: NodeId, action: impl Into<String>, kind: NodeKind) -> Self {
        Node {
            parent: Some(parent),
            action: Some(action.into()),
            kind,
        }
    }

    /// Outgoing edge labels in child order.
    pub fn edge_labels(&self) -> Vec<&str> {
        match &self.kind {
            NodeKind::Decision { actions, .. } => actions.iter().map(String::as_str).collect(),
            NodeKind::Chance { outcomes } => outcomes.iter().map(|(l, _)| l.as_str()).collect(),
            NodeKind::Terminal { .. } => Vec::new(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct InfosetId {
    pub player: Player,
    pub index: usize,
}

/// A sequence of one player. Index 0 is the empty sequence; index `k > 0`
/// is the `k`-th (information set, action) pair in information-set order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SequenceId {
    pub player: Player,
    pub index: usize,
}

impl SequenceId {
    pub fn empty(player: Player) -> Self {
        SequenceId { player, index: 0 }
    }

    pub fn is_empty(&self) -> bool {
        self.index == 0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Infoset {
    pub label: String,
    pub player: Player,
    pub actions: Vec<String>,
    /// Parent sequence index (into the same player's sequences).
    pub parent_sequence: usize,
    /// Member nodes in pre-order.
    pub nodes: Vec<NodeId>,
}

/// Own-player history entry: information-set label and action label.
pub type HistoryEntry = (String, String);

#[derive(Clone, Debug, PartialEq, Error)]
#[error("perfect recall violated at information set `{infoset}`: {first:?} vs {second:?}")]
pub struct PerfectRecallViolation {
    pub infoset: String,
    pub first: Vec<HistoryEntry>,
    pub second: Vec<HistoryEntry>,
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum GameError {
    #[error("game has no nodes")]
    Empty,
    #[error("node {0} is the root but the root must be unique")]
    MultipleRoots(NodeId),
    #[error("node {node} references unknown parent {parent}")]
    UnknownParent { node: NodeId, parent: NodeId },
    #[error("node {node} has no incoming action label")]
    MissingEdgeLabel { node: NodeId },
    #[error("node {node}: parent {parent} has no action `{action}`")]
    UnknownAction {
        node: NodeId,
        parent: NodeId,
        action: String,
    },
    #[error("node {parent}: action `{action}` has more than one child")]
    DuplicateChild { parent: NodeId, action: String },
    #[error("node {parent}: action `{action}` has no child")]
    MissingChild { parent: NodeId, action: String },
    #[error("node {node}: duplicate action label `{action}`")]
    DuplicateActionLabel { node: NodeId, action: String },
    #[error("node {node} has no actions")]
    NoActions { node: NodeId },
    #[error("node {node}: negative or non-finite probability {prob}")]
    BadProbability { node: NodeId, prob: f64 },
    #[error("node {node}: probabilities sum {sum}")]
    ProbabilitySum { node: NodeId, sum: f64 },
    #[error("node {node}: non-finite payoff")]
    BadPayoff { node: NodeId },
    #[error("node {node} is not reachable from the root")]
    Unreachable { node: NodeId },
    #[error("information set `{label}` is shared by both players")]
    InfosetPlayerMismatch { label: String },
    #[error("information set `{label}` has inconsistent action lists")]
    InfosetActionMismatch { label: String },
    #[error(transparent)]
    PerfectRecall(#[from] PerfectRecallViolation),
    #[error("connectedness is only defined between information sets of different players")]
    SamePlayer,
    #[error("plan count {count} exceeds cap {cap}")]
    PlanCapExceeded { count: u128, cap: u128 },
}

/// Validated two-player perfect-recall game tree with its derived structure.
#[derive(Clone, Debug)]
pub struct GameTree {
    name: String,
    nodes: Vec<Node>,
    children: Vec<Vec<NodeId>>,
    node_infoset: Vec<Option<usize>>,
    infosets: [Vec<Infoset>; 2],
    /// First sequence index of each information set.
    seq_offset: [Vec<usize>; 2],
    /// For sequence index k > 0: (infoset, action) at position k - 1.
    seq_parts: [Vec<(usize, usize)>; 2],
    /// Information sets whose parent sequence is the given sequence.
    seq_children: [Vec<Vec<usize>>; 2],
    /// Connected opponent information sets, sorted by (parent sequence, index).
    connections: [Vec<Vec<usize>>; 2],
}

impl PartialEq for GameTree {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.nodes == other.nodes
    }
}

impl GameTree {
    /// Builds and validates a game from node records.
    ///
    /// Records may be in any order as long as parents are resolvable; the
    /// stored tree is re-indexed in depth-first pre-order.
    pub fn new(name: impl Into<String>, nodes: Vec<Node>) -> Result<Self, GameError> {
        let (nodes, children) = canonicalize(nodes)?;
        validate_nodes(&nodes)?;
        validate_perfect_recall(&nodes)?;
        Ok(Self::analyze(name.into(), nodes, children))
    }

    fn analyze(name: String, nodes: Vec<Node>, children: Vec<Vec<NodeId>>) -> Self {
        let mut infosets: [Vec<Infoset>; 2] = [Vec::new(), Vec::new()];
        let mut by_label: HashMap<&str, usize> = HashMap::new();
        let mut node_infoset = vec![None; nodes.len()];
        for (id, node) in nodes.iter().enumerate() {
            if let NodeKind::Decision {
                player,
                infoset,
                actions,
            } = &node.kind
            {
                let list = &mut infosets[player.index()];
                let idx = *by_label.entry(infoset.as_str()).or_insert_with(|| {
                    list.push(Infoset {
                        label: infoset.clone(),
                        player: *player,
                        actions: actions.clone(),
                        parent_sequence: 0,
                        nodes: Vec::new(),
                    });
                    list.len() - 1
                });
                list[idx].nodes.push(id);
                node_infoset[id] = Some(idx);
            }
        }

        let mut seq_offset: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
        let mut seq_parts: [Vec<(usize, usize)>; 2] = [Vec::new(), Vec::new()];
        for p in 0..2 {
            let mut next = 1;
            for (i, info) in infosets[p].iter().enumerate() {
                seq_offset[p].push(next);
                for a in 0..info.actions.len() {
                    seq_parts[p].push((i, a));
                }
                next += info.actions.len();
            }
        }

        // One pass computes parent sequences and connections.
        let mut edges: Vec<(u32, u32)> = Vec::new();
        let mut stack: Vec<(NodeId, [usize; 2], usize)> = vec![(0, [0, 0], 0)];
        // Decision ancestors on the current path: (player, infoset).
        let mut path: Vec<(usize, usize)> = Vec::new();
        while let Some((id, last, depth)) = stack.pop() {
            path.truncate(depth);
            let mut next_last = last;
            let mut pushed = false;
            if let NodeKind::Decision { player, .. } = &nodes[id].kind {
                let p = player.index();
                let i = node_infoset[id].unwrap();
                infosets[p][i].parent_sequence = last[p];
                for &(q, j) in &path {
                    if q != p {
                        let pair = if p == 0 { (i, j) } else { (j, i) };
                        edges.push((pair.0 as u32, pair.1 as u32));
                    }
                }
                path.push((p, i));
                pushed = true;
                for (a, &c) in children[id].iter().enumerate().rev() {
                    next_last[p] = seq_offset[p][i] + a;
                    stack.push((c, next_last, depth + 1));
                }
            }
            if !pushed {
                for &c in children[id].iter().rev() {
                    stack.push((c, last, depth));
                }
            }
        }
        edges.sort_unstable();
        edges.dedup();

        let seq_counts = [seq_parts[0].len() + 1, seq_parts[1].len() + 1];
        let mut seq_children: [Vec<Vec<usize>>; 2] =
            [vec![Vec::new(); seq_counts[0]], vec![Vec::new(); seq_counts[1]]];
        for p in 0..2 {
            for (i, info) in infosets[p].iter().enumerate() {
                seq_children[p][info.parent_sequence].push(i);
            }
        }

        let mut connections: [Vec<Vec<usize>>; 2] = [
            vec![Vec::new(); infosets[0].len()],
            vec![Vec::new(); infosets[1].len()],
        ];
        for &(i, j) in &edges {
            connections[0][i as usize].push(j as usize);
            connections[1][j as usize].push(i as usize);
        }
        for p in 0..2 {
            let opp = &infosets[1 - p];
            for list in connections[p].iter_mut() {
                list.sort_unstable_by_key(|&j| (opp[j].parent_sequence, j));
            }
        }

        GameTree {
            name,
            nodes,
            children,
            node_infoset,
            infosets,
            seq_offset,
            seq_parts,
            seq_children,
            connections,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id]
    }

    pub fn root(&self) -> NodeId {
        0
    }

    pub fn children(&self, id: NodeId) -> &[NodeId] {
        &self.children[id]
    }

    /// Information-set index of a decision node.
    pub fn node_infoset(&self, id: NodeId) -> Option<InfosetId> {
        match &self.nodes[id].kind {
            NodeKind::Decision { player, .. } => self.node_infoset[id].map(|index| InfosetId {
                player: *player,
                index,
            }),
            _ => None,
        }
    }

    pub fn infosets(&self, player: Player) -> &[Infoset] {
        &self.infosets[player.index()]
    }

    pub fn infoset(&self, id: InfosetId) -> &Infoset {
        &self.infosets[id.player.index()][id.index]
    }

    pub fn infoset_ids(&self, player: Player) -> impl Iterator<Item = InfosetId> + '_ {
        (0..self.infosets[player.index()].len()).map(move |index| InfosetId { player, index })
    }

    pub fn find_infoset(&self, label: &str) -> Option<InfosetId> {
        Player::BOTH.into_iter().find_map(|player| {
            self.infosets[player.index()]
                .iter()
                .position(|i| i.label == label)
                .map(|index| InfosetId { player, index })
        })
    }

    pub fn num_infosets(&self, player: Player) -> usize {
        self.infosets[player.index()].len()
    }

    pub fn num_sequences(&self, player: Player) -> usize {
        self.seq_parts[player.index()].len() + 1
    }

    /// All sequences of a player: the empty sequence first, then every
    /// (information set, action) pair in information-set order.
    pub fn sequences(&self, player: Player) -> impl Iterator<Item = SequenceId> {
        (0..self.num_sequences(player)).map(move |index| SequenceId { player, index })
    }

    pub fn sequence(&self, infoset: InfosetId, action: usize) -> SequenceId {
        debug_assert!(action < self.infoset(infoset).actions.len());
        SequenceId {
            player: infoset.player,
            index: self.seq_offset[infoset.player.index()][infoset.index] + action,
        }
    }

    /// First sequence index of an information set; its actions occupy the
    /// following `action count` indices.
    pub fn sequence_offset(&self, infoset: InfosetId) -> usize {
        self.seq_offset[infoset.player.index()][infoset.index]
    }

    /// The (information set, action) pair of a non-empty sequence.
    pub fn sequence_parts(&self, seq: SequenceId) -> Option<(InfosetId, usize)> {
        if seq.is_empty() {
            return None;
        }
        let (index, action) = self.seq_parts[seq.player.index()][seq.index - 1];
        Some((
            InfosetId {
                player: seq.player,
                index,
            },
            action,
        ))
    }

    pub fn parent_sequence(&self, infoset: InfosetId) -> SequenceId {
        SequenceId {
            player: infoset.player,
            index: self.infoset(infoset).parent_sequence,
        }
    }

    /// Information sets whose parent sequence is `seq`, ascending.
    pub fn child_infosets(&self, seq: SequenceId) -> &[usize] {
        &self.seq_children[seq.player.index()][seq.index]
    }

    /// Opponent information sets connected to `infoset`, sorted by their
    /// parent sequence and then by index.
    pub fn connections(&self, infoset: InfosetId) -> &[usize] {
        &self.connections[infoset.player.index()][infoset.index]
    }

    /// Opponent information sets connected to `infoset` whose parent
    /// sequence is `opp_seq`.
    pub fn connections_under(&self, infoset: InfosetId, opp_seq: SequenceId) -> &[usize] {
        debug_assert_ne!(infoset.player, opp_seq.player);
        let list = self.connections(infoset);
        let opp = &self.infosets[opp_seq.player.index()];
        let lo = list.partition_point(|&j| opp[j].parent_sequence < opp_seq.index);
        let hi = list.partition_point(|&j| opp[j].parent_sequence <= opp_seq.index);
        &list[lo..hi]
    }

    fn is_connected_raw(&self, infoset: InfosetId, other: usize) -> bool {
        let opp = &self.infosets[infoset.player.opponent().index()];
        let key = (opp[other].parent_sequence, other);
        self.connections(infoset)
            .binary_search_by_key(&key, |&j| (opp[j].parent_sequence, j))
            .is_ok()
    }

    /// `a ⇌ b`: some node of one set lies on the root path of a node of the other.
    pub fn connected(&self, a: InfosetId, b: InfosetId) -> Result<bool, GameError> {
        if a.player == b.player {
            return Err(GameError::SamePlayer);
        }
        Ok(self.is_connected_raw(a, b.index))
    }

    /// Relevance of a sequence pair. Either argument order is accepted.
    pub fn relevant(&self, s1: SequenceId, s2: SequenceId) -> bool {
        debug_assert_ne!(s1.player, s2.player);
        match (self.sequence_parts(s1), self.sequence_parts(s2)) {
            (Some((i1, _)), Some((i2, _))) => self.is_connected_raw(i1, i2.index),
            _ => true,
        }
    }

    /// Relevance of a sequence for an opponent information set.
    pub fn relevant_to_infoset(&self, seq: SequenceId, infoset: InfosetId) -> bool {
        debug_assert_ne!(seq.player, infoset.player);
        match self.sequence_parts(seq) {
            None => true,
            Some((i, _)) => self.is_connected_raw(infoset, i.index),
        }
    }

    /// The `seq`-rank of `infoset`: number of connected opponent information
    /// sets whose parent sequence is `seq`.
    pub fn rank(&self, infoset: InfosetId, seq: SequenceId) -> usize {
        self.connections_under(infoset, seq).len()
    }

    /// `seq ⪰ ancestor` for two sequences of the same player.
    pub fn descends(&self, seq: SequenceId, ancestor: SequenceId) -> Result<bool, GameError> {
        if seq.player != ancestor.player {
            return Err(GameError::SamePlayer);
        }
        let mut cur = seq;
        loop {
            if cur == ancestor {
                return Ok(true);
            }
            match self.sequence_parts(cur) {
                None => return Ok(false),
                Some((i, _)) => cur = self.parent_sequence(i),
            }
        }
    }

    /// Number of unordered cross-player pairs of connected information sets.
    pub fn connected_pair_count(&self) -> usize {
        self.connections[0].iter().map(Vec::len).sum()
    }

    pub fn terminal_count(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n.kind, NodeKind::Terminal { .. }))
            .count()
    }

    /// Human-readable label of a sequence, `empty` or `<infoset>:<action>`.
    pub fn sequence_label(&self, seq: SequenceId) -> String {
        match self.sequence_parts(seq) {
            None => "empty".to_string(),
            Some((i, a)) => {
                let info = self.infoset(i);
                format!("{}:{}", info.label, info.actions[a])
            }
        }
    }

    /// Own-player (information set, action) history on the root path of `node`.
    pub fn own_history(&self, node: NodeId, player: Player) -> Vec<HistoryEntry> {
        own_history(&self.nodes, node, player)
    }
}

/// Re-indexes records into depth-first pre-order and resolves children.
fn canonicalize(nodes: Vec<Node>) -> Result<(Vec<Node>, Vec<Vec<NodeId>>), GameError> {
    if nodes.is_empty() {
        return Err(GameError::Empty);
    }
    let n = nodes.len();
    let mut root = None;
    for (id, node) in nodes.iter().enumerate() {
        match node.parent {
            None => {
                if root.is_some() {
                    return Err(GameError::MultipleRoots(id));
                }
                root = Some(id);
            }
            Some(p) if p >= n => return Err(GameError::UnknownParent { node: id, parent: p }),
            Some(_) => {}
        }
    }
    let root = root.ok_or(GameError::Empty)?;

    let mut slots: Vec<Vec<Option<NodeId>>> = Vec::with_capacity(n);
    for (id, node) in nodes.iter().enumerate() {
        let labels = node.edge_labels();
        for (k, l) in labels.iter().enumerate() {
            if labels[..k].contains(l) {
                return Err(GameError::DuplicateActionLabel {
                    node: id,
                    action: l.to_string(),
                });
            }
        }
        if labels.is_empty() && !matches!(node.kind, NodeKind::Terminal { .. }) {
            return Err(GameError::NoActions { node: id });
        }
        slots.push(vec![None; labels.len()]);
    }
    for (id, node) in nodes.iter().enumerate() {
        let Some(p) = node.parent else { continue };
        let action = node
            .action
            .as_deref()
            .ok_or(GameError::MissingEdgeLabel { node: id })?;
        let k = nodes[p]
            .edge_labels()
            .iter()
            .position(|l| *l == action)
            .ok_or_else(|| GameError::UnknownAction {
                node: id,
                parent: p,
                action: action.to_string(),
            })?;
        if slots[p][k].replace(id).is_some() {
            return Err(GameError::DuplicateChild {
                parent: p,
                action: action.to_string(),
            });
        }
    }
    for (id, node) in nodes.iter().enumerate() {
        if let Some(k) = slots[id].iter().position(Option::is_none) {
            return Err(GameError::MissingChild {
                parent: id,
                action: node.edge_labels()[k].to_string(),
            });
        }
    }

    let mut order = Vec::with_capacity(n);
    let mut new_id = vec![usize::MAX; n];
    let mut stack = vec![root];
    while let Some(id) = stack.pop() {
        if new_id[id] != usize::MAX {
            // Only reachable through a parent cycle.
            return Err(GameError::Unreachable { node: id });
        }
        new_id[id] = order.len();
        order.push(id);
        for c in slots[id].iter().rev() {
            stack.push(c.unwrap());
        }
    }
    if order.len() != n {
        let node = (0..n).find(|&i| new_id[i] == usize::MAX).unwrap();
        return Err(GameError::Unreachable { node });
    }

    let mut out_nodes = Vec::with_capacity(n);
    let mut children = Vec::with_capacity(n);
    let mut nodes: Vec<Option<Node>> = nodes.into_iter().map(Some).collect();
    for &old in &order {
        let mut node = nodes[old].take().unwrap();
        node.parent = node.parent.map(|p| new_id[p]);
        if node.parent.is_none() {
            node.action = None;
        }
        children.push(slots[old].iter().map(|c| new_id[c.unwrap()]).collect());
        out_nodes.push(node);
    }
    Ok((out_nodes, children))
}

fn validate_nodes(nodes: &[Node]) -> Result<(), GameError> {
    let mut labels: HashMap<&str, (Player, &[String])> = HashMap::new();
    for (id, node) in nodes.iter().enumerate() {
        match &node.kind {
            NodeKind::Chance { outcomes } => {
                let mut sum = 0.0;
                for (_, p) in outcomes {
                    if !p.is_finite() || *p < 0.0 {
                        return Err(GameError::BadProbability { node: id, prob: *p });
                    }
                    sum += p;
                }
                if (sum - 1.0).abs() > CHANCE_SUM_TOLERANCE {
                    return Err(GameError::ProbabilitySum { node: id, sum });
                }
            }
            NodeKind::Terminal { payoffs } => {
                if !payoffs.iter().all(|u| u.is_finite()) {
                    return Err(GameError::BadPayoff { node: id });
                }
            }
            NodeKind::Decision {
                player,
                infoset,
                actions,
            } => match labels.get(infoset.as_str()) {
                None => {
                    labels.insert(infoset, (*player, actions));
                }
                Some((p, a)) => {
                    if p != player {
                        return Err(GameError::InfosetPlayerMismatch {
                            label: infoset.clone(),
                        });
                    }
                    if *a != actions.as_slice() {
                        return Err(GameError::InfosetActionMismatch {
                            label: infoset.clone(),
                        });
                    }
                }
            },
        }
    }
    Ok(())
}

fn own_history(nodes: &[Node], node: NodeId, player: Player) -> Vec<HistoryEntry> {
    let mut out = Vec::new();
    let mut cur = node;
    while let Some(p) = nodes[cur].parent {
        if let NodeKind::Decision {
            player: q, infoset, ..
        } = &nodes[p].kind
        {
            if *q == player {
                out.push((infoset.clone(), nodes[cur].action.clone().unwrap_or_default()));
            }
        }
        cur = p;
    }
    out.reverse();
    out
}

/// Checks that every information set's nodes share the same own-player
/// history of (information set, action) pairs.
///
/// Expects records that already pass structural validation (unique root,
/// resolvable parents, consistent information-set labels).
pub fn validate_perfect_recall(nodes: &[Node]) -> Result<(), PerfectRecallViolation> {
    type LastMove<'a> = Option<(&'a str, &'a str)>;
    // Last own (infoset label, action label) above each node, per player.
    // Equality of the last pair across an information set, checked for every
    // set, implies equality of the full history by induction.
    let mut first_seen: HashMap<&str, (NodeId, LastMove)> = HashMap::new();
    for (id, node) in nodes.iter().enumerate() {
        let NodeKind::Decision {
            player, infoset, ..
        } = &node.kind
        else {
            continue;
        };
        let last = last_own_pair(nodes, id, *player);
        match first_seen.get(infoset.as_str()) {
            None => {
                first_seen.insert(infoset, (id, last));
            }
            Some(&(other, prev)) => {
                if prev != last {
                    return Err(PerfectRecallViolation {
                        infoset: infoset.clone(),
                        first: own_history(nodes, other, *player),
                        second: own_history(nodes, id, *player),
                    });
                }
            }
        }
    }
    Ok(())
}

fn last_own_pair(nodes: &[Node], node: NodeId, player: Player) -> Option<(&str, &str)> {
    let mut cur = node;
    let mut guard = 0;
    while let Some(p) = nodes[cur].parent {
        if let NodeKind::Decision {
            player: q, infoset, ..
        } = &nodes[p].kind
        {
            if *q == player {
                return Some((infoset.as_str(), nodes[cur].action.as_deref().unwrap_or("")));
            }
        }
        cur = p;
        guard += 1;
        if guard > nodes.len() {
            break;
        }
    }
    None
}

//! The von Stengel-Forges polytope over relevant sequence pairs.

mod lp;

pub use lp::{export_lp, parse_lp, LpDocument, LpError, LpRow};

use serde::Serialize;
use thiserror::Error;

use crate::game::{GameTree, InfosetId, NodeKind, Player, SequenceId};

/// Default absolute tolerance for membership checks.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum PolytopeError {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
}

/// Dense numbering of the relevant sequence pairs.
///
/// Pairs are ordered by Player 1 sequence, then Player 2 sequence, so
/// coordinate 0 is always (∅, ∅).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelevanceIndex {
    row_start: Vec<usize>,
    cols: Vec<u32>,
    rows: Vec<u32>,
    num_seq2: usize,
}

impl RelevanceIndex {
    pub fn new(tree: &GameTree) -> Self {
        let n1 = tree.num_sequences(Player::One);
        let n2 = tree.num_sequences(Player::Two);
        let mut row_start = Vec::with_capacity(n1 + 1);
        let mut cols: Vec<u32> = Vec::new();
        let mut rows: Vec<u32> = Vec::new();
        row_start.push(0);
        for s1 in tree.sequences(Player::One) {
            let begin = cols.len();
            match tree.sequence_parts(s1) {
                None => cols.extend(0..n2 as u32),
                Some((i1, _)) => {
                    cols.push(0);
                    for &j in tree.connections(i1) {
                        let info = InfosetId {
                            player: Player::Two,
                            index: j,
                        };
                        let off = tree.sequence_offset(info);
                        let k = tree.infoset(info).actions.len();
                        cols.extend((off..off + k).map(|c| c as u32));
                    }
                    cols[begin..].sort_unstable();
                }
            }
            rows.extend(std::iter::repeat_n(s1.index as u32, cols.len() - begin));
            row_start.push(cols.len());
        }
        RelevanceIndex {
            row_start,
            cols,
            rows,
            num_seq2: n2,
        }
    }

    pub fn len(&self) -> usize {
        self.cols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cols.is_empty()
    }

    pub fn num_seq1(&self) -> usize {
        self.row_start.len() - 1
    }

    pub fn num_seq2(&self) -> usize {
        self.num_seq2
    }

    /// Coordinate of the pair of sequence indices `(s1, s2)`, if relevant.
    pub fn coord(&self, s1: usize, s2: usize) -> Option<usize> {
        if s1 >= self.num_seq1() {
            return None;
        }
        let (lo, hi) = (self.row_start[s1], self.row_start[s1 + 1]);
        self.cols[lo..hi]
            .binary_search(&(s2 as u32))
            .ok()
            .map(|k| lo + k)
    }

    pub fn coord_of(&self, s1: SequenceId, s2: SequenceId) -> Option<usize> {
        debug_assert!(s1.player == Player::One && s2.player == Player::Two);
        self.coord(s1.index, s2.index)
    }

    /// Sequence indices `(s1, s2)` at a coordinate.
    pub fn pair(&self, coord: usize) -> (usize, usize) {
        (self.rows[coord] as usize, self.cols[coord] as usize)
    }

    /// Coordinates of the row of Player 1 sequence `s1`, with their Player 2
    /// sequence indices.
    pub fn row(&self, s1: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        (self.row_start[s1]..self.row_start[s1 + 1]).map(|c| (c, self.cols[c] as usize))
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.len()).map(|c| self.pair(c))
    }

    /// Variable name `vsf_<s1>_<s2>` of a coordinate.
    pub fn var_name(&self, coord: usize) -> String {
        let (a, b) = self.pair(coord);
        format!("vsf_{a}_{b}")
    }
}

/// A vector over the relevance index.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorrelationPlan {
    pub values: Vec<f64>,
}

impl CorrelationPlan {
    pub fn new(values: Vec<f64>) -> Self {
        CorrelationPlan { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Exact bit pattern, for set comparisons.
    pub fn key(&self) -> Vec<u64> {
        self.values.iter().map(|v| v.to_bits()).collect()
    }

    pub fn is_integral(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0 || v == 1.0)
    }

    /// The plan as a string of `0`/`1` characters, or `None` if some entry
    /// is not exactly 0 or 1.
    pub fn bit_string(&self) -> Option<String> {
        self.values
            .iter()
            .map(|&v| {
                if v == 0.0 {
                    Some('0')
                } else if v == 1.0 {
                    Some('1')
                } else {
                    None
                }
            })
            .collect()
    }
}

/// Which mass-conservation equation a constraint row encodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum RowLabel {
    /// `v[∅, ∅] = 1`.
    Normalization,
    /// `Σ_a v[(I1, a), σ2] = v[σ(I1), σ2]` for Player 1 set `infoset`.
    PlayerOne { infoset: usize, seq2: usize },
    /// `Σ_b v[σ1, (I2, b)] = v[σ1, σ(I2)]` for Player 2 set `infoset`.
    PlayerTwo { infoset: usize, seq1: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConstraintRow {
    pub label: RowLabel,
    /// Sparse `(coordinate, coefficient)` terms.
    pub terms: Vec<(usize, f64)>,
    pub rhs: f64,
}

/// The equality rows of the polytope; every variable is also nonnegative.
#[derive(Clone, Debug, PartialEq)]
pub struct VsfConstraintSystem {
    pub rows: Vec<ConstraintRow>,
    pub var_names: Vec<String>,
}

impl VsfConstraintSystem {
    /// Normalization first, then the Player 1 family ordered by (infoset,
    /// Player 2 sequence), then the Player 2 family ordered likewise.
    pub fn new(tree: &GameTree, index: &RelevanceIndex) -> Self {
        let mut rows = vec![ConstraintRow {
            label: RowLabel::Normalization,
            terms: vec![(0, 1.0)],
            rhs: 1.0,
        }];
        for player in Player::BOTH {
            let opp = player.opponent();
            for info in tree.infoset_ids(player) {
                let parent = tree.parent_sequence(info).index;
                let off = tree.sequence_offset(info);
                let k = tree.infoset(info).actions.len();
                let mut relevant = vec![0usize];
                for &j in tree.connections(info) {
                    let other = InfosetId { player: opp, index: j };
                    let o = tree.sequence_offset(other);
                    relevant.extend(o..o + tree.infoset(other).actions.len());
                }
                relevant.sort_unstable();
                for s in relevant.into_iter().map(|index| SequenceId { player: opp, index }) {
                    let at = |own: usize| match player {
                        Player::One => index.coord(own, s.index),
                        Player::Two => index.coord(s.index, own),
                    }
                    .expect("constraint reads a relevant pair");
                    let mut terms: Vec<(usize, f64)> = (off..off + k).map(|a| (at(a), 1.0)).collect();
                    terms.push((at(parent), -1.0));
                    let label = match player {
                        Player::One => RowLabel::PlayerOne {
                            infoset: info.index,
                            seq2: s.index,
                        },
                        Player::Two => RowLabel::PlayerTwo {
                            infoset: info.index,
                            seq1: s.index,
                        },
                    };
                    rows.push(ConstraintRow {
                        label,
                        terms,
                        rhs: 0.0,
                    });
                }
            }
        }
        VsfConstraintSystem {
            rows,
            var_names: (0..index.len()).map(|c| index.var_name(c)).collect(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.var_names.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MembershipReport {
    pub member: bool,
    /// Largest row residual or negative-entry magnitude.
    pub max_violation: f64,
    /// Row with the largest residual, when some residual is nonzero.
    pub worst_row: Option<usize>,
    /// Most negative entry, when some entry is negative.
    pub worst_entry: Option<usize>,
}

/// Membership in the polytope: every entry `>= -tol` and every row residual
/// at most `tol` in absolute value.
pub fn check_membership(
    plan: &CorrelationPlan,
    system: &VsfConstraintSystem,
    tol: f64,
) -> Result<MembershipReport, PolytopeError> {
    if plan.len() != system.num_vars() {
        return Err(PolytopeError::DimensionMismatch {
            expected: system.num_vars(),
            actual: plan.len(),
        });
    }
    let mut max_violation = 0.0f64;
    let mut worst_row = None;
    let mut worst_entry = None;
    let mut worst_residual = 0.0;
    for (r, row) in system.rows.iter().enumerate() {
        let lhs: f64 = row.terms.iter().map(|&(c, a)| a * plan.values[c]).sum();
        let residual = (lhs - row.rhs).abs();
        // NaN compares false, so route it through the violation explicitly.
        if residual > worst_residual || residual.is_nan() {
            worst_residual = if residual.is_nan() { f64::INFINITY } else { residual };
            worst_row = Some(r);
        }
    }
    max_violation = max_violation.max(worst_residual);
    let mut most_negative = 0.0;
    for (c, &v) in plan.values.iter().enumerate() {
        if v < most_negative || v.is_nan() {
            most_negative = if v.is_nan() { f64::NEG_INFINITY } else { v };
            worst_entry = Some(c);
        }
    }
    max_violation = max_violation.max(-most_negative);
    Ok(MembershipReport {
        member: max_violation <= tol,
        max_violation,
        worst_row,
        worst_entry,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LinearObjective {
    pub coefficients: Vec<f64>,
    pub sense: Sense,
}

impl LinearObjective {
    pub fn zero(dim: usize, sense: Sense) -> Self {
        LinearObjective {
            coefficients: vec![0.0; dim],
            sense,
        }
    }

    /// Inner product with a plan.
    pub fn value(&self, plan: &CorrelationPlan) -> Result<f64, PolytopeError> {
        if plan.len() != self.coefficients.len() {
            return Err(PolytopeError::DimensionMismatch {
                expected: self.coefficients.len(),
                actual: plan.len(),
            });
        }
        Ok(self
            .coefficients
            .iter()
            .zip(&plan.values)
            .map(|(a, b)| a * b)
            .sum())
    }
}

/// Expected `w1·u1 + w2·u2` as a maximization objective.
///
/// Each terminal contributes its chance-reach probability times its weighted
/// payoff to the coordinate of the last sequences of both players above it.
pub fn payoff_objective(tree: &GameTree, index: &RelevanceIndex, w1: f64, w2: f64) -> LinearObjective {
    let mut coefficients = vec![0.0; index.len()];
    let mut stack = vec![(tree.root(), 1.0f64, [0usize; 2])];
    while let Some((id, prob, last)) = stack.pop() {
        match &tree.node(id).kind {
            NodeKind::Terminal { payoffs } => {
                let c = index
                    .coord(last[0], last[1])
                    .expect("sequences on one path are relevant");
                coefficients[c] += prob * (w1 * payoffs[0] + w2 * payoffs[1]);
            }
            NodeKind::Chance { outcomes } => {
                for (&child, (_, p)) in tree.children(id).iter().zip(outcomes) {
                    stack.push((child, prob * p, last));
                }
            }
            NodeKind::Decision { .. } => {
                let info = tree.node_infoset(id).unwrap();
                for (a, &child) in tree.children(id).iter().enumerate() {
                    let mut next = last;
                    next[info.player.index()] = tree.sequence(info, a).index;
                    stack.push((child, prob, next));
                }
            }
        }
    }
    LinearObjective {
        coefficients,
        sense: Sense::Maximize,
    }
}

#[cfg(test)]
mod tests;

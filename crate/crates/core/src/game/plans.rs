//! Reduced-normal-form plans.

use super::{GameError, GameTree, NodeKind, Player, SequenceId};

/// Default cap on the number of plans (or plan pairs) enumerated at once.
pub const DEFAULT_PLAN_CAP: u128 = 1_000_000;

/// An action for every own information set reachable under the plan's
/// earlier choices; unreachable sets carry `None`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ReducedPlan {
    pub player: Player,
    pub choices: Vec<Option<usize>>,
}

impl ReducedPlan {
    /// Membership in `Π(σ)`: the plan prescribes every own action on the
    /// path down to `seq`.
    pub fn prescribes(&self, tree: &GameTree, seq: SequenceId) -> bool {
        debug_assert_eq!(seq.player, self.player);
        match tree.sequence_parts(seq) {
            None => true,
            // A `Some` choice implies the set is reachable, which in turn
            // implies every ancestor action is prescribed.
            Some((i, a)) => self.choices[i.index] == Some(a),
        }
    }
}

/// Exact number of reduced plans of `player`, saturating at `u128::MAX`.
pub fn plan_count(tree: &GameTree, player: Player) -> u128 {
    // count(σ) = Π_{I: σ(I)=σ} Σ_a count((I, a)), evaluated bottom-up; child
    // sequences always have larger indices than their parents.
    let n = tree.num_sequences(player);
    let mut count = vec![1u128; n];
    for s in (0..n).rev() {
        let seq = SequenceId { player, index: s };
        let mut prod: u128 = 1;
        for &i in tree.child_infosets(seq) {
            let off = tree.sequence_offset(super::InfosetId { player, index: i });
            let k = tree.infosets(player)[i].actions.len();
            let sum = (off..off + k).fold(0u128, |acc, t| acc.saturating_add(count[t]));
            prod = prod.saturating_mul(sum);
        }
        count[s] = prod;
    }
    count[0]
}

/// Enumerates every reduced plan of `player` in lexicographic order of the
/// choices at information sets taken in index order.
pub fn reduced_plans(
    tree: &GameTree,
    player: Player,
    cap: u128,
) -> Result<Vec<ReducedPlan>, GameError> {
    let count = plan_count(tree, player);
    if count > cap {
        return Err(GameError::PlanCapExceeded { count, cap });
    }
    let infosets = tree.infosets(player);
    let mut out = Vec::with_capacity(count as usize);
    let mut choices: Vec<Option<usize>> = vec![None; infosets.len()];

    // Information sets are indexed top-down, so a parent's choice is always
    // decided before its children are visited.
    fn rec(
        tree: &GameTree,
        player: Player,
        pos: usize,
        choices: &mut Vec<Option<usize>>,
        out: &mut Vec<ReducedPlan>,
    ) {
        let infosets = tree.infosets(player);
        if pos == infosets.len() {
            out.push(ReducedPlan {
                player,
                choices: choices.clone(),
            });
            return;
        }
        let parent = SequenceId {
            player,
            index: infosets[pos].parent_sequence,
        };
        let reachable = match tree.sequence_parts(parent) {
            None => true,
            Some((i, a)) => choices[i.index] == Some(a),
        };
        if reachable {
            for a in 0..infosets[pos].actions.len() {
                choices[pos] = Some(a);
                rec(tree, player, pos + 1, choices, out);
            }
            choices[pos] = None;
        } else {
            rec(tree, player, pos + 1, choices, out);
        }
    }
    rec(tree, player, 0, &mut choices, &mut out);
    debug_assert_eq!(out.len() as u128, count);
    Ok(out)
}

/// Expected payoffs of a plan pair by walking the tree.
pub fn expected_payoffs(tree: &GameTree, plans: [&ReducedPlan; 2]) -> [f64; 2] {
    let mut total = [0.0; 2];
    let mut stack = vec![(tree.root(), 1.0f64)];
    while let Some((id, prob)) = stack.pop() {
        match &tree.node(id).kind {
            NodeKind::Terminal { payoffs } => {
                total[0] += prob * payoffs[0];
                total[1] += prob * payoffs[1];
            }
            NodeKind::Chance { outcomes } => {
                for (&c, (_, p)) in tree.children(id).iter().zip(outcomes) {
                    stack.push((c, prob * p));
                }
            }
            NodeKind::Decision { player, .. } => {
                let info = tree.node_infoset(id).unwrap();
                let a = plans[player.index()].choices[info.index]
                    .expect("plan leaves a reached information set unassigned");
                stack.push((tree.children(id)[a], prob));
            }
        }
    }
    total
}

use std::fmt;

use serde::Serialize;

use crate::game::{GameTree, InfosetId, Player};

/// Two Player 1 sets `i1`, `i2` sharing a parent sequence and two Player 2
/// sets `j1`, `j2` sharing a parent sequence, with `i1 ⇌ j1`, `i2 ⇌ j2` and
/// `i1 ⇌ j2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TriangleWitness {
    pub i1: InfosetId,
    pub i2: InfosetId,
    pub j1: InfosetId,
    pub j2: InfosetId,
}

impl TriangleWitness {
    /// Information-set labels in the order `i1, i2, j1, j2`.
    pub fn labels(&self, tree: &GameTree) -> [String; 4] {
        [self.i1, self.i2, self.j1, self.j2].map(|i| tree.infoset(i).label.clone())
    }

    /// Re-checks every relation the witness claims.
    pub fn holds(&self, tree: &GameTree) -> bool {
        let c = |a, b| tree.connected(a, b).unwrap_or(false);
        self.i1 != self.i2
            && self.j1 != self.j2
            && tree.parent_sequence(self.i1) == tree.parent_sequence(self.i2)
            && tree.parent_sequence(self.j1) == tree.parent_sequence(self.j2)
            && c(self.i1, self.j1)
            && c(self.i2, self.j2)
            && c(self.i1, self.j2)
    }
}

impl fmt::Display for TriangleWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "I1=#{} I2=#{} J1=#{} J2=#{}",
            self.i1.index, self.i2.index, self.j1.index, self.j2.index
        )
    }
}

/// The first triangle in deterministic order, if any.
///
/// A triangle through `i1` and `j2` exists exactly when `i1` has rank at
/// least 2 for `σ(j2)` and `j2` has rank at least 2 for `σ(i1)`, so one pass
/// over the connected pairs finds the smallest such `i1`. The rest of the
/// quadruple is then the lexicographically smallest `(i2, j1, j2)`.
pub fn find_triangle(tree: &GameTree) -> Option<TriangleWitness> {
    let p2 = |index| InfosetId {
        player: Player::Two,
        index,
    };
    for i1 in tree.infoset_ids(Player::One) {
        let s1 = tree.parent_sequence(i1);
        let hit = tree.connections(i1).iter().any(|&j| {
            tree.rank(i1, tree.parent_sequence(p2(j))) >= 2 && tree.rank(p2(j), s1) >= 2
        });
        if !hit {
            continue;
        }
        let mut best: Option<(usize, usize, usize)> = None;
        for &i2 in tree.child_infosets(s1) {
            if i2 == i1.index {
                continue;
            }
            let i2_id = InfosetId {
                player: Player::One,
                index: i2,
            };
            for &j1 in tree.connections(i1) {
                let under = tree.parent_sequence(p2(j1));
                for &j2 in tree.connections_under(i2_id, under) {
                    if j2 != j1 && tree.connected(i1, p2(j2)).unwrap_or(false) {
                        let cand = (i2, j1, j2);
                        if best.is_none_or(|b| cand < b) {
                            best = Some(cand);
                        }
                    }
                }
            }
            if best.is_some() {
                break;
            }
        }
        let (i2, j1, j2) = best.expect("rank condition guarantees a quadruple");
        return Some(TriangleWitness {
            i1,
            i2: InfosetId {
                player: Player::One,
                index: i2,
            },
            j1: p2(j1),
            j2: p2(j2),
        });
    }
    None
}

/// `Ok(())` when the game is triangle-free, otherwise the first witness.
pub fn is_triangle_free(tree: &GameTree) -> Result<(), TriangleWitness> {
    match find_triangle(tree) {
        None => Ok(()),
        Some(w) => Err(w),
    }
}

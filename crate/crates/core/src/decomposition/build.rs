//! Construction of the scaled-extension program.
//!
//! `branch_at` handles a filled entry `v[s1, s2]`: it picks the branch set,
//! splits the entry across the actions of each branched information set,
//! recurses, and then fills the entries that pair `s1` (or `s2`) with the
//! opponent sequences under the branched set by summation. `fill_line`
//! completes the remaining entries along one row or column.

use crate::game::{GameTree, InfosetId, Player, SequenceId};
use crate::polytope::RelevanceIndex;

use super::{DecomposeError, ScaledExtensionProgram, StepKind};

pub(super) struct Builder<'a> {
    tree: &'a GameTree,
    index: RelevanceIndex,
    filled: Vec<bool>,
    kinds: Vec<StepKind>,
    heads: Vec<u32>,
    spans: Vec<u32>,
    pool: Vec<u32>,
}

fn seq(player: Player, index: usize) -> SequenceId {
    SequenceId { player, index }
}

fn infoset(player: Player, index: usize) -> InfosetId {
    InfosetId { player, index }
}

impl<'a> Builder<'a> {
    pub(super) fn new(tree: &'a GameTree) -> Self {
        let index = RelevanceIndex::new(tree);
        let mut filled = vec![false; index.len()];
        filled[0] = true;
        Builder {
            tree,
            index,
            filled,
            kinds: Vec::new(),
            heads: Vec::new(),
            spans: vec![0],
            pool: Vec::new(),
        }
    }

    pub(super) fn finish(mut self) -> Result<ScaledExtensionProgram, DecomposeError> {
        self.branch_at(0, 0)?;
        if let Some(c) = self.filled.iter().position(|f| !f) {
            let (a, b) = self.index.pair(c);
            return Err(DecomposeError::Internal(format!(
                "pair ({a}, {b}) was never filled"
            )));
        }
        Ok(ScaledExtensionProgram::from_parts(
            self.index, self.kinds, self.heads, self.spans, self.pool,
        ))
    }

    /// Coordinate of the pair where `own` is a sequence of `player`.
    fn at(&self, player: Player, own: usize, other: usize) -> Result<u32, DecomposeError> {
        let (s1, s2) = match player {
            Player::One => (own, other),
            Player::Two => (other, own),
        };
        self.index
            .coord(s1, s2)
            .map(|c| c as u32)
            .ok_or_else(|| DecomposeError::Internal(format!("pair ({s1}, {s2}) is not relevant")))
    }

    fn read(&self, c: u32) -> Result<u32, DecomposeError> {
        if self.filled[c as usize] {
            Ok(c)
        } else {
            let (a, b) = self.index.pair(c as usize);
            Err(DecomposeError::Internal(format!(
                "pair ({a}, {b}) read before it was filled"
            )))
        }
    }

    fn write(&mut self, c: u32) -> Result<(), DecomposeError> {
        if std::mem::replace(&mut self.filled[c as usize], true) {
            let (a, b) = self.index.pair(c as usize);
            return Err(DecomposeError::Internal(format!(
                "pair ({a}, {b}) filled twice"
            )));
        }
        Ok(())
    }

    fn split(&mut self, source: u32, targets: &[u32]) -> Result<(), DecomposeError> {
        self.read(source)?;
        for &t in targets {
            self.write(t)?;
        }
        self.kinds.push(StepKind::Split);
        self.heads.push(source);
        self.pool.extend_from_slice(targets);
        self.spans.push(self.pool.len() as u32);
        Ok(())
    }

    fn sum(&mut self, terms: &[u32], target: u32) -> Result<(), DecomposeError> {
        for &t in terms {
            self.read(t)?;
        }
        self.write(target)?;
        self.kinds.push(StepKind::Sum);
        self.heads.push(target);
        self.pool.extend_from_slice(terms);
        self.spans.push(self.pool.len() as u32);
        Ok(())
    }

    /// Opponent information sets under `opp_seq` relevant to `own_seq`.
    fn relevant_children(&self, opp_seq: SequenceId, own_seq: SequenceId) -> Vec<InfosetId> {
        self.tree
            .child_infosets(opp_seq)
            .iter()
            .map(|&i| infoset(opp_seq.player, i))
            .filter(|&i| self.tree.relevant_to_infoset(own_seq, i))
            .collect()
    }

    fn actions(&self, i: InfosetId) -> std::ops::Range<usize> {
        let off = self.tree.sequence_offset(i);
        off..off + self.tree.infoset(i).actions.len()
    }

    /// Decomposes everything below the filled entry `v[s1, s2]`.
    fn branch_at(&mut self, s1: usize, s2: usize) -> Result<(), DecomposeError> {
        let tree = self.tree;
        let seq1 = seq(Player::One, s1);
        let seq2 = seq(Player::Two, s2);
        let kids1 = self.relevant_children(seq1, seq2);
        let kids2 = self.relevant_children(seq2, seq1);

        let mut branch: Vec<InfosetId> = Vec::new();
        branch.extend(kids1.iter().copied().filter(|&i| tree.rank(i, seq2) == 0));
        branch.extend(kids2.iter().copied().filter(|&i| tree.rank(i, seq1) == 0));
        for &i1 in &kids1 {
            let r1 = tree.rank(i1, seq2);
            for &i2 in &kids2 {
                if !tree.connected(i1, i2).unwrap() {
                    continue;
                }
                let r2 = tree.rank(i2, seq1);
                if r1 > 1 && r2 > 1 {
                    return Err(DecomposeError::Internal(format!(
                        "rank dichotomy violated at sets {} and {} (ranks {r1}, {r2})",
                        tree.infoset(i1).label,
                        tree.infoset(i2).label
                    )));
                }
                branch.push(if r1 >= r2 { i1 } else { i2 });
            }
        }
        branch.sort_unstable();
        branch.dedup();

        for i in branch {
            let p = i.player;
            let (own, other, opp_kids) = match p {
                Player::One => (s1, s2, &kids2),
                Player::Two => (s2, s1, &kids1),
            };
            let source = self.at(p, own, other)?;
            let targets = self
                .actions(i)
                .map(|a| self.at(p, a, other))
                .collect::<Result<Vec<_>, _>>()?;
            self.split(source, &targets)?;
            for a in self.actions(i) {
                match p {
                    Player::One => self.branch_at(a, s2)?,
                    Player::Two => self.branch_at(s1, a)?,
                }
            }
            for &j in opp_kids {
                if !tree.connected(i, j).unwrap() {
                    continue;
                }
                for b in self.actions(j) {
                    self.sum_line(p, own, b, i)?;
                    self.fill_line(p, own, b, i)?;
                }
            }
        }
        Ok(())
    }

    /// `v[own, other] = Σ_a v[(i, a), other]` for the branched set `i`.
    fn sum_line(&mut self, p: Player, own: usize, other: usize, i: InfosetId) -> Result<(), DecomposeError> {
        let target = self.at(p, own, other)?;
        let terms = self
            .actions(i)
            .map(|a| self.at(p, a, other))
            .collect::<Result<Vec<_>, _>>()?;
        self.sum(&terms, target)
    }

    /// Fills `v[own, σ]` for every opponent sequence `σ` strictly below
    /// `other` relevant to `own`. Sets connected to the branched set `i` are
    /// summed from the entries below `i`; the others are split.
    fn fill_line(&mut self, p: Player, own: usize, other: usize, i: InfosetId) -> Result<(), DecomposeError> {
        let tree = self.tree;
        let kids = self.relevant_children(seq(p.opponent(), other), seq(p, own));
        for j in kids {
            if tree.connected(i, j).unwrap() {
                for b in self.actions(j) {
                    self.sum_line(p, own, b, i)?;
                }
            } else {
                let source = self.at(p, own, other)?;
                let targets = self
                    .actions(j)
                    .map(|b| self.at(p, own, b))
                    .collect::<Result<Vec<_>, _>>()?;
                self.split(source, &targets)?;
            }
            for b in self.actions(j) {
                self.fill_line(p, own, b, i)?;
            }
        }
        Ok(())
    }
}

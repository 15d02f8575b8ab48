//! Triangle-freeness and the scaled-extension decomposition of the
//! polytope of correlation plans.
//!
//! A [`ScaledExtensionProgram`] starts from `v[∅, ∅] = 1` and fills every
//! other relevant pair exactly once, either by splitting an already filled
//! entry across a simplex or by summing already filled entries.

mod build;
mod triangle;

pub use triangle::{find_triangle, is_triangle_free, TriangleWitness};

use std::collections::BTreeSet;
use std::io;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use thiserror::Error;

use crate::game::{GameTree, Player, SequenceId};
use crate::polytope::{CorrelationPlan, RelevanceIndex};

/// Tolerance on simplex inputs to [`ScaledExtensionProgram::evaluate`].
pub const SIMPLEX_TOLERANCE: f64 = 1e-12;

/// Default cap on the number of vertex combinations explored.
pub const DEFAULT_POINT_CAP: u64 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum DecomposeError {
    #[error("game is not triangle-free: {0}")]
    NotTriangleFree(TriangleWitness),
    #[error("internal decomposition error: {0}")]
    Internal(String),
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum EvaluateError {
    #[error("expected {expected} inputs, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("input of split step {step} is off the simplex (sum {sum}, min {min})")]
    OffSimplex { step: usize, sum: f64, min: f64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("more than {cap} vertex combinations")]
pub struct PointCapExceeded {
    pub cap: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum StepKind {
    Split,
    Sum,
}

/// One step of a program. Coordinates index the relevance index.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Step<'a> {
    /// `targets[j] = v[source] · x_j` for a point `x` of the simplex.
    Split { source: usize, targets: &'a [u32] },
    /// `v[target] = Σ v[terms]`.
    Sum { terms: &'a [u32], target: usize },
}

/// Ordered scaled-extension steps over a relevance index.
#[derive(Clone, Debug, PartialEq)]
pub struct ScaledExtensionProgram {
    index: RelevanceIndex,
    kinds: Vec<StepKind>,
    /// Split source or sum target.
    heads: Vec<u32>,
    /// Step `k` owns `pool[spans[k]..spans[k + 1]]`.
    spans: Vec<u32>,
    pool: Vec<u32>,
    split_steps: usize,
    input_len: usize,
}

/// Builds the program for a triangle-free game.
pub fn decompose(tree: &GameTree) -> Result<ScaledExtensionProgram, DecomposeError> {
    is_triangle_free(tree).map_err(DecomposeError::NotTriangleFree)?;
    build::Builder::new(tree).finish()
}

impl ScaledExtensionProgram {
    fn from_parts(
        index: RelevanceIndex,
        kinds: Vec<StepKind>,
        heads: Vec<u32>,
        spans: Vec<u32>,
        pool: Vec<u32>,
    ) -> Self {
        let mut split_steps = 0;
        let mut input_len = 0;
        for (k, kind) in kinds.iter().enumerate() {
            if *kind == StepKind::Split {
                split_steps += 1;
                input_len += (spans[k + 1] - spans[k]) as usize;
            }
        }
        ScaledExtensionProgram {
            index,
            kinds,
            heads,
            spans,
            pool,
            split_steps,
            input_len,
        }
    }

    pub fn index(&self) -> &RelevanceIndex {
        &self.index
    }

    /// Number of coordinates, including the pre-filled `(∅, ∅)`.
    pub fn dimension(&self) -> usize {
        self.index.len()
    }

    pub fn len(&self) -> usize {
        self.kinds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kinds.is_empty()
    }

    pub fn split_count(&self) -> usize {
        self.split_steps
    }

    pub fn sum_count(&self) -> usize {
        self.len() - self.split_steps
    }

    /// Total length of the concatenated split inputs.
    pub fn input_len(&self) -> usize {
        self.input_len
    }

    pub fn step(&self, k: usize) -> Step<'_> {
        let list = &self.pool[self.spans[k] as usize..self.spans[k + 1] as usize];
        let head = self.heads[k] as usize;
        match self.kinds[k] {
            StepKind::Split => Step::Split {
                source: head,
                targets: list,
            },
            StepKind::Sum => Step::Sum {
                terms: list,
                target: head,
            },
        }
    }

    pub fn steps(&self) -> impl Iterator<Item = Step<'_>> + '_ {
        (0..self.len()).map(|k| self.step(k))
    }

    /// Simplex dimension of each split step, in order.
    pub fn split_dims(&self) -> impl Iterator<Item = usize> + '_ {
        self.steps().filter_map(|s| match s {
            Step::Split { targets, .. } => Some(targets.len()),
            Step::Sum { .. } => None,
        })
    }

    /// Coordinates in the order they are written, starting with `(∅, ∅)`.
    pub fn fill_order(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.dimension());
        out.push(0);
        for s in self.steps() {
            match s {
                Step::Split { targets, .. } => out.extend(targets.iter().map(|&t| t as usize)),
                Step::Sum { target, .. } => out.push(target),
            }
        }
        out
    }

    /// Runs the program on concatenated simplex points, one per split step.
    pub fn evaluate(&self, inputs: &[f64]) -> Result<CorrelationPlan, EvaluateError> {
        if inputs.len() != self.input_len {
            return Err(EvaluateError::DimensionMismatch {
                expected: self.input_len,
                actual: inputs.len(),
            });
        }
        let mut pos = 0;
        for (step, d) in self.split_dims().enumerate() {
            let x = &inputs[pos..pos + d];
            let sum: f64 = x.iter().sum();
            let min = x.iter().copied().fold(f64::INFINITY, f64::min);
            if !((sum - 1.0).abs() <= SIMPLEX_TOLERANCE && min >= -SIMPLEX_TOLERANCE) {
                return Err(EvaluateError::OffSimplex { step, sum, min });
            }
            pos += d;
        }
        Ok(CorrelationPlan::new(self.run(inputs)))
    }

    /// Evaluation without input validation.
    pub(crate) fn run(&self, inputs: &[f64]) -> Vec<f64> {
        let mut v = vec![0.0; self.dimension()];
        v[0] = 1.0;
        let mut pos = 0;
        for s in self.steps() {
            match s {
                Step::Split { source, targets } => {
                    let scale = v[source];
                    for (&t, &x) in targets.iter().zip(&inputs[pos..]) {
                        v[t as usize] = scale * x;
                    }
                    pos += targets.len();
                }
                Step::Sum { terms, target } => {
                    v[target] = terms.iter().map(|&t| v[t as usize]).sum();
                }
            }
        }
        v
    }

    /// Uniformly random simplex points (normalized exponential draws).
    pub fn sample_inputs<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.input_len);
        for d in self.split_dims() {
            let start = out.len();
            out.extend((0..d).map(|_| rng.sample::<f64, _>(Exp1)));
            let total: f64 = out[start..].iter().sum();
            if total > 0.0 {
                out[start..].iter_mut().for_each(|x| *x /= total);
            } else {
                out[start..].iter_mut().for_each(|x| *x = 1.0 / d as f64);
            }
        }
        out
    }

    /// The plan at uniformly random split inputs; deterministic in `seed`.
    pub fn sample(&self, seed: u64) -> CorrelationPlan {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        CorrelationPlan::new(self.run(&self.sample_inputs(&mut rng)))
    }

    /// Uniform split inputs.
    pub fn uniform_inputs(&self) -> Vec<f64> {
        self.split_dims()
            .flat_map(|d| std::iter::repeat_n(1.0 / d as f64, d))
            .collect()
    }

    /// A random simplex vertex per split; deterministic in `seed`.
    pub fn sample_vertex(&self, seed: u64) -> CorrelationPlan {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut inputs = vec![0.0; self.input_len];
        let mut pos = 0;
        for d in self.split_dims() {
            inputs[pos + rng.random_range(0..d)] = 1.0;
            pos += d;
        }
        CorrelationPlan::new(self.run(&inputs))
    }

    /// Calls `visit` on the plan of every vertex combination that matters.
    ///
    /// A split whose source is zero writes zeros whatever vertex it picks, so
    /// only splits with a nonzero source branch. Fails before the visit that
    /// would exceed `cap`; returns the number of combinations visited.
    pub fn for_each_deterministic_point(
        &self,
        cap: u64,
        mut visit: impl FnMut(&[f64]),
    ) -> Result<u64, PointCapExceeded> {
        let n = self.len();
        let mut v = vec![0.0f64; self.dimension()];
        v[0] = 1.0;
        // Branching splits on the current path: (step, chosen vertex).
        let mut stack: Vec<(usize, usize)> = Vec::new();
        let mut leaves: u64 = 0;
        let mut pos = 0;
        loop {
            while pos < n {
                match self.step(pos) {
                    Step::Split { source, targets } => {
                        let scale = v[source];
                        if scale != 0.0 && targets.len() > 1 {
                            stack.push((pos, 0));
                        }
                        for (j, &t) in targets.iter().enumerate() {
                            v[t as usize] = if j == 0 { scale } else { 0.0 };
                        }
                    }
                    Step::Sum { terms, target } => {
                        v[target] = terms.iter().map(|&t| v[t as usize]).sum();
                    }
                }
                pos += 1;
            }
            leaves += 1;
            if leaves > cap {
                return Err(PointCapExceeded { cap });
            }
            visit(&v);

            // Advance the deepest branching split that has vertices left.
            loop {
                let Some((step, choice)) = stack.pop() else {
                    return Ok(leaves);
                };
                let Step::Split { source, targets } = self.step(step) else {
                    unreachable!()
                };
                if choice + 1 < targets.len() {
                    let scale = v[source];
                    for (j, &t) in targets.iter().enumerate() {
                        v[t as usize] = if j == choice + 1 { scale } else { 0.0 };
                    }
                    stack.push((step, choice + 1));
                    pos = step + 1;
                    break;
                }
            }
        }
    }

    /// Distinct plans reached when every split picks a simplex vertex,
    /// sorted by bit pattern.
    ///
    /// Counts first so that an oversized enumeration fails without
    /// holding any plans in memory.
    pub fn deterministic_points(&self, cap: u64) -> Result<Vec<CorrelationPlan>, PointCapExceeded> {
        self.for_each_deterministic_point(cap, |_| {})?;
        let mut seen: BTreeSet<Vec<u64>> = BTreeSet::new();
        self.for_each_deterministic_point(cap, |v| {
            seen.insert(v.iter().map(|x| x.to_bits()).collect());
        })?;
        Ok(seen
            .into_iter()
            .map(|bits| CorrelationPlan::new(bits.into_iter().map(f64::from_bits).collect()))
            .collect())
    }

    /// Writes one line per step, coordinates shown as sequence-label pairs.
    pub fn dump(&self, tree: &GameTree, sink: &mut impl io::Write) -> io::Result<()> {
        let label = |c: usize| {
            let (a, b) = self.index.pair(c);
            format!(
                "({},{})",
                tree.sequence_label(SequenceId {
                    player: Player::One,
                    index: a
                }),
                tree.sequence_label(SequenceId {
                    player: Player::Two,
                    index: b
                })
            )
        };
        let list = |cs: &[u32]| cs.iter().map(|&c| label(c as usize)).collect::<Vec<_>>().join(" ");
        for s in self.steps() {
            match s {
                Step::Split { source, targets } => {
                    writeln!(sink, "split {} -> {}", label(source), list(targets))?
                }
                Step::Sum { terms, target } => {
                    writeln!(sink, "sum {} -> {}", list(terms), label(target))?
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests;

//! Linear optimization over the polytope by regret minimization along a
//! scaled-extension program.
//!
//! Every split step runs its own regret-matching learner. Each iteration
//! evaluates the program at the learners' current points, then a reverse
//! sweep propagates the objective gradient back through the steps: a sum
//! step passes its target's gradient to every term, and a split step sees
//! the gradients of its targets as the utilities of its simplex vertices.
//! The returned plan is the uniform average of the iterates, which is in
//! the polytope because every iterate is.
//!
//! The optimum is computed exactly by the same sweep with each split taking
//! its best vertex, so the reported gap is certified.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::decomposition::{ScaledExtensionProgram, Step};
use crate::polytope::{CorrelationPlan, LinearObjective, PolytopeError, Sense};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OptimizeConfig {
    pub max_iters: u64,
    /// Stop once the certified gap of the average is at most this.
    pub target_gap: f64,
    /// Seeds the random first iterate.
    pub seed: u64,
}

impl Default for OptimizeConfig {
    fn default() -> Self {
        OptimizeConfig {
            max_iters: 100_000,
            target_gap: 1e-4,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OptimizeResult {
    /// Average of the iterates.
    pub plan: CorrelationPlan,
    /// Objective value of `plan`, in the objective's own sense.
    pub value: f64,
    /// Exact optimum over the polytope.
    pub optimum: f64,
    /// Distance from `value` to `optimum`, never negative.
    pub gap: f64,
    pub iterations: u64,
    /// Whether `gap <= target_gap` was reached within the budget.
    pub converged: bool,
}

/// State passed to the observer after each iteration.
#[derive(Debug)]
pub struct IterationInfo<'a> {
    pub iteration: u64,
    pub iterate: &'a CorrelationPlan,
    /// Objective value of the running average, in the objective's sense.
    pub value: f64,
    pub gap: f64,
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum OptimizeError {
    #[error("objective has a non-finite coefficient at coordinate {0}")]
    NonFiniteObjective(usize),
    #[error(transparent)]
    Dimension(#[from] PolytopeError),
}

/// Inner product of an objective and a plan.
pub fn evaluate_objective(objective: &LinearObjective, plan: &CorrelationPlan) -> Result<f64, PolytopeError> {
    objective.value(plan)
}

/// Largest value of `c · v` over the program's image.
pub fn max_over_program(program: &ScaledExtensionProgram, c: &[f64]) -> f64 {
    let mut g = c.to_vec();
    for k in (0..program.len()).rev() {
        match program.step(k) {
            Step::Sum { terms, target } => {
                let up = g[target];
                for &t in terms {
                    g[t as usize] += up;
                }
            }
            Step::Split { source, targets } => {
                let best = targets
                    .iter()
                    .map(|&t| g[t as usize])
                    .fold(f64::NEG_INFINITY, f64::max);
                g[source] += best;
            }
        }
    }
    g[0]
}

/// Exact optimum of the objective over the program's image, in its sense.
pub fn optimum(program: &ScaledExtensionProgram, objective: &LinearObjective) -> f64 {
    match objective.sense {
        Sense::Maximize => max_over_program(program, &objective.coefficients),
        Sense::Minimize => {
            let neg: Vec<f64> = objective.coefficients.iter().map(|a| -a).collect();
            -max_over_program(program, &neg)
        }
    }
}

pub fn optimize(
    program: &ScaledExtensionProgram,
    objective: &LinearObjective,
    config: OptimizeConfig,
) -> Result<OptimizeResult, OptimizeError> {
    optimize_with(program, objective, config, |_| {})
}

/// [`optimize`] with a callback after every iteration.
pub fn optimize_with(
    program: &ScaledExtensionProgram,
    objective: &LinearObjective,
    config: OptimizeConfig,
    mut observer: impl FnMut(&IterationInfo<'_>),
) -> Result<OptimizeResult, OptimizeError> {
    let n = program.dimension();
    if objective.coefficients.len() != n {
        return Err(PolytopeError::DimensionMismatch {
            expected: n,
            actual: objective.coefficients.len(),
        }
        .into());
    }
    if let Some(c) = objective.coefficients.iter().position(|a| !a.is_finite()) {
        return Err(OptimizeError::NonFiniteObjective(c));
    }
    // Work in maximization form.
    let sign = match objective.sense {
        Sense::Maximize => 1.0,
        Sense::Minimize => -1.0,
    };
    let c: Vec<f64> = objective.coefficients.iter().map(|a| sign * a).collect();
    let best = max_over_program(program, &c);

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut x = program.sample_inputs(&mut rng);
    let mut regrets = vec![0.0; x.len()];
    let mut sum = vec![0.0; n];
    let mut g = vec![0.0; n];
    let mut iterations = 0;
    let mut value = 0.0;
    let mut converged = false;

    while iterations < config.max_iters {
        iterations += 1;
        let iterate = CorrelationPlan::new(program.run(&x));
        for (s, v) in sum.iter_mut().zip(&iterate.values) {
            *s += v;
        }
        value = dot(&c, &sum) / iterations as f64;
        let gap = (best - value).max(0.0);
        observer(&IterationInfo {
            iteration: iterations,
            iterate: &iterate,
            value: sign * value,
            gap,
        });
        if gap <= config.target_gap {
            converged = true;
            break;
        }

        g.copy_from_slice(&c);
        let mut pos = x.len();
        for k in (0..program.len()).rev() {
            match program.step(k) {
                Step::Sum { terms, target } => {
                    let up = g[target];
                    for &t in terms {
                        g[t as usize] += up;
                    }
                }
                Step::Split { source, targets } => {
                    pos -= targets.len();
                    let xs = &x[pos..pos + targets.len()];
                    let expected: f64 = targets.iter().zip(xs).map(|(&t, &p)| g[t as usize] * p).sum();
                    for (r, &t) in regrets[pos..].iter_mut().zip(targets) {
                        *r += g[t as usize] - expected;
                    }
                    g[source] += expected;
                }
            }
        }
        regret_matching(program, &regrets, &mut x);
    }

    let plan = CorrelationPlan::new(sum.iter().map(|s| s / iterations.max(1) as f64).collect());
    if iterations > 0 {
        value = dot(&c, &plan.values);
    }
    Ok(OptimizeResult {
        plan,
        value: sign * value,
        optimum: sign * best,
        gap: (best - value).max(0.0),
        iterations,
        converged,
    })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Positive parts of the regrets, normalized per split; uniform where all
/// regrets are nonpositive.
fn regret_matching(program: &ScaledExtensionProgram, regrets: &[f64], x: &mut [f64]) {
    let mut pos = 0;
    for d in program.split_dims() {
        let r = &regrets[pos..pos + d];
        let total: f64 = r.iter().map(|v| v.max(0.0)).sum();
        for (xi, ri) in x[pos..pos + d].iter_mut().zip(r) {
            *xi = if total > 0.0 {
                ri.max(0.0) / total
            } else {
                1.0 / d as f64
            };
        }
        pos += d;
    }
}

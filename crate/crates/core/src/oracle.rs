//! Brute-force correlation plans of deterministic plan pairs.
//!
//! Everything here works with exact 0/1 values, so set comparisons are
//! comparisons of bit patterns.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::decomposition::{decompose, DecomposeError, PointCapExceeded, ScaledExtensionProgram};
use crate::game::{plan_count, reduced_plans, GameTree, Player, ReducedPlan};
use crate::polytope::{check_membership, CorrelationPlan, RelevanceIndex, VsfConstraintSystem};

#[derive(Clone, Debug, PartialEq, Error)]
pub enum OracleError {
    #[error("{count} plan pairs exceed the cap of {cap}")]
    CapExceeded { count: u128, cap: u128 },
    #[error(transparent)]
    Decompose(#[from] DecomposeError),
    #[error(transparent)]
    PointCap(#[from] PointCapExceeded),
    #[error("plan has an entry that is not exactly 0 or 1")]
    NotIntegral,
    #[error("plan violates the polytope constraints by {max_violation}")]
    NotMember { max_violation: f64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PlanPair {
    pub p1: ReducedPlan,
    pub p2: ReducedPlan,
}

/// Whether `plan` prescribes each sequence of its player.
fn prescribed(tree: &GameTree, plan: &ReducedPlan) -> Vec<bool> {
    tree.sequences(plan.player)
        .map(|s| plan.prescribes(tree, s))
        .collect()
}

/// The correlation plan of the distribution putting all mass on one pair:
/// entry `(σ1, σ2)` is 1 exactly when both plans prescribe their sequence.
pub fn indicator_image(tree: &GameTree, index: &RelevanceIndex, pair: &PlanPair) -> CorrelationPlan {
    image(index, &prescribed(tree, &pair.p1), &prescribed(tree, &pair.p2))
}

fn image(index: &RelevanceIndex, a: &[bool], b: &[bool]) -> CorrelationPlan {
    CorrelationPlan::new(
        index
            .pairs()
            .map(|(s1, s2)| if a[s1] && b[s2] { 1.0 } else { 0.0 })
            .collect(),
    )
}

#[derive(Clone, Debug, PartialEq)]
pub struct XiVertex {
    pub plan: CorrelationPlan,
    /// The first plan pair in enumeration order with this image.
    pub pair: PlanPair,
}

/// Distinct indicator images of all plan pairs, sorted by bit pattern.
#[derive(Clone, Debug, PartialEq)]
pub struct XiVertexSet {
    pub vertices: Vec<XiVertex>,
    pub pairs_enumerated: u128,
}

impl XiVertexSet {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn plans(&self) -> impl Iterator<Item = &CorrelationPlan> {
        self.vertices.iter().map(|v| &v.plan)
    }
}

/// Number of plan pairs, saturating.
pub fn plan_pair_count(tree: &GameTree) -> u128 {
    plan_count(tree, Player::One).saturating_mul(plan_count(tree, Player::Two))
}

pub fn xi_vertex_set(tree: &GameTree, index: &RelevanceIndex, cap: u128) -> Result<XiVertexSet, OracleError> {
    let count = plan_pair_count(tree);
    if count > cap {
        return Err(OracleError::CapExceeded { count, cap });
    }
    let too_many = |_| OracleError::CapExceeded { count, cap };
    let plans1 = reduced_plans(tree, Player::One, cap).map_err(too_many)?;
    let plans2 = reduced_plans(tree, Player::Two, cap).map_err(too_many)?;
    let pres1: Vec<Vec<bool>> = plans1.iter().map(|p| prescribed(tree, p)).collect();
    let pres2: Vec<Vec<bool>> = plans2.iter().map(|p| prescribed(tree, p)).collect();
    let mut seen: BTreeMap<Vec<u64>, XiVertex> = BTreeMap::new();
    for (a, p1) in pres1.iter().zip(&plans1) {
        for (b, p2) in pres2.iter().zip(&plans2) {
            let plan = image(index, a, b);
            seen.entry(plan.key()).or_insert_with(|| XiVertex {
                plan,
                pair: PlanPair {
                    p1: p1.clone(),
                    p2: p2.clone(),
                },
            });
        }
    }
    Ok(XiVertexSet {
        vertices: seen.into_values().collect(),
        pairs_enumerated: count,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquivalenceReport {
    pub equal: bool,
    pub decomposition_points: usize,
    pub xi_vertices: usize,
    /// Vertices of Ξ the decomposition never reaches, as 0/1 strings.
    pub missing_from_decomposition: Vec<String>,
    /// Deterministic decomposition points outside Ξ.
    pub missing_from_xi: Vec<String>,
}

fn describe(plan: &CorrelationPlan) -> String {
    plan.bit_string().unwrap_or_else(|| format!("{:?}", plan.values))
}

/// Compares two point sets by exact bit pattern.
pub fn compare_point_sets<'a>(
    points: impl IntoIterator<Item = &'a CorrelationPlan>,
    xi: &XiVertexSet,
) -> EquivalenceReport {
    let ours: BTreeMap<Vec<u64>, &CorrelationPlan> = points.into_iter().map(|p| (p.key(), p)).collect();
    let theirs: BTreeMap<Vec<u64>, &CorrelationPlan> = xi.plans().map(|p| (p.key(), p)).collect();
    let missing_from_decomposition: Vec<String> = theirs
        .iter()
        .filter(|(k, _)| !ours.contains_key(*k))
        .map(|(_, p)| describe(p))
        .collect();
    let missing_from_xi: Vec<String> = ours
        .iter()
        .filter(|(k, _)| !theirs.contains_key(*k))
        .map(|(_, p)| describe(p))
        .collect();
    EquivalenceReport {
        equal: missing_from_decomposition.is_empty() && missing_from_xi.is_empty(),
        decomposition_points: ours.len(),
        xi_vertices: theirs.len(),
        missing_from_decomposition,
        missing_from_xi,
    }
}

/// Deterministic decomposition points against the vertices of Ξ.
pub fn check_xi_equals_vsf(tree: &GameTree, cap: u128) -> Result<EquivalenceReport, OracleError> {
    let program = decompose(tree)?;
    check_program_against_xi(tree, &program, cap)
}

/// As [`check_xi_equals_vsf`] with an already built program.
pub fn check_program_against_xi(
    tree: &GameTree,
    program: &ScaledExtensionProgram,
    cap: u128,
) -> Result<EquivalenceReport, OracleError> {
    let xi = xi_vertex_set(tree, program.index(), cap)?;
    let points = program.deterministic_points(u64::try_from(cap).unwrap_or(u64::MAX))?;
    Ok(compare_point_sets(&points, &xi))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Lemma {
    /// A zero marginal forces the whole row or column to zero.
    ZeroPropagation,
    /// `v[σ1, σ2] = v[σ1, ∅] · v[∅, σ2]`.
    Product,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct LemmaViolation {
    pub lemma: Lemma,
    pub seq1: usize,
    pub seq2: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LemmaReport {
    pub passed: bool,
    pub pairs_checked: usize,
    pub first_violation: Option<LemmaViolation>,
}

/// Checks zero propagation and the product identity on an integral member.
pub fn check_integral_lemmas(
    plan: &CorrelationPlan,
    index: &RelevanceIndex,
    system: &VsfConstraintSystem,
) -> Result<LemmaReport, OracleError> {
    if plan.len() != index.len() || !plan.is_integral() {
        return Err(OracleError::NotIntegral);
    }
    let report = check_membership(plan, system, 0.0).map_err(|_| OracleError::NotIntegral)?;
    if !report.member {
        return Err(OracleError::NotMember {
            max_violation: report.max_violation,
        });
    }
    let v = &plan.values;
    let col0: Vec<f64> = index.row(0).map(|(c, _)| v[c]).collect();
    for (c, (s1, s2)) in index.pairs().enumerate() {
        let r = v[index.coord(s1, 0).expect("(σ1, ∅) is relevant")];
        let k = col0[s2];
        let lemma = if (r == 0.0 || k == 0.0) && v[c] != 0.0 {
            Some(Lemma::ZeroPropagation)
        } else if v[c] != r * k {
            Some(Lemma::Product)
        } else {
            None
        };
        if let Some(lemma) = lemma {
            return Ok(LemmaReport {
                passed: false,
                pairs_checked: c + 1,
                first_violation: Some(LemmaViolation {
                    lemma,
                    seq1: s1,
                    seq2: s2,
                }),
            });
        }
    }
    Ok(LemmaReport {
        passed: true,
        pairs_checked: index.len(),
        first_violation: None,
    })
}

/// Sorted 0/1 strings, one per line; `None` if some plan is not integral.
pub fn fixture_text<'a>(plans: impl IntoIterator<Item = &'a CorrelationPlan>) -> Option<String> {
    let lines: BTreeSet<String> = plans
        .into_iter()
        .map(CorrelationPlan::bit_string)
        .collect::<Option<_>>()?;
    Some(lines.into_iter().map(|l| l + "\n").collect())
}

/// Reads fixture lines back as plans.
pub fn parse_fixture(text: &str) -> Option<Vec<CorrelationPlan>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            l.trim()
                .chars()
                .map(|c| match c {
                    '0' => Some(0.0),
                    '1' => Some(1.0),
                    _ => None,
                })
                .collect::<Option<Vec<f64>>>()
                .map(CorrelationPlan::new)
        })
        .collect()
}

/// The sequence-form strategy `v[σ1, ∅]` (or `v[∅, σ2]`) embedded in a plan.
pub fn marginal(plan: &CorrelationPlan, index: &RelevanceIndex, player: Player) -> Vec<f64> {
    match player {
        Player::One => (0..index.num_seq1())
            .map(|s| plan.values[index.coord(s, 0).unwrap()])
            .collect(),
        Player::Two => index.row(0).map(|(c, _)| plan.values[c]).collect(),
    }
}

/// Whether a 0/1 sequence-form vector is consistent along the tree: the
/// empty sequence has 1, and at each reached information set exactly one
/// action has 1 while unreached sets have 0 everywhere.
pub fn is_pure_sequence_form(tree: &GameTree, player: Player, x: &[f64]) -> bool {
    if x.first() != Some(&1.0) {
        return false;
    }
    tree.infoset_ids(player).all(|i| {
        let parent = x[tree.parent_sequence(i).index];
        let total: f64 = (0..tree.infoset(i).actions.len())
            .map(|a| x[tree.sequence(i, a).index])
            .sum();
        let binary = (0..tree.infoset(i).actions.len())
            .all(|a| matches!(x[tree.sequence(i, a).index], v if v == 0.0 || v == 1.0));
        binary && total == parent
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::{builtin, goofspiel, single_terminal, GoofspielParams};
    use crate::game::DEFAULT_PLAN_CAP;

    fn setup(tree: &GameTree) -> (RelevanceIndex, VsfConstraintSystem) {
        let index = RelevanceIndex::new(tree);
        let system = VsfConstraintSystem::new(tree, &index);
        (index, system)
    }

    #[test]
    fn ex1_indicator_image_by_hand() {
        let tree = builtin("EX1").unwrap();
        let (index, _) = setup(&tree);
        let p1 = ReducedPlan {
            player: Player::One,
            choices: vec![Some(0), Some(0)],
        };
        let p2 = ReducedPlan {
            player: Player::Two,
            choices: vec![Some(0)],
        };
        let plan = indicator_image(&tree, &index, &PlanPair { p1, p2 });
        // Player 1 sequences: ∅, A:1, A:2, B:3, B:4; Player 2: ∅, C:1, C:2.
        let ones: BTreeSet<(usize, usize)> = [(0, 0), (0, 1), (1, 0), (3, 0), (1, 1), (3, 1)].into();
        for (c, pair) in index.pairs().enumerate() {
            assert_eq!(plan.values[c], if ones.contains(&pair) { 1.0 } else { 0.0 }, "{pair:?}");
        }
    }

    #[test]
    fn images_are_exact_members() {
        for tree in [builtin("EX2").unwrap(), goofspiel(GoofspielParams::new(2).unwrap())] {
            let (index, system) = setup(&tree);
            let xi = xi_vertex_set(&tree, &index, DEFAULT_PLAN_CAP).unwrap();
            for v in &xi.vertices {
                assert_eq!(v.plan.values[0], 1.0);
                assert!(check_membership(&v.plan, &system, 0.0).unwrap().member);
                assert!(check_integral_lemmas(&v.plan, &index, &system).unwrap().passed);
                assert_eq!(indicator_image(&tree, &index, &v.pair), v.plan);
                for p in Player::BOTH {
                    assert!(is_pure_sequence_form(&tree, p, &marginal(&v.plan, &index, p)));
                }
            }
        }
    }

    #[test]
    fn vertex_set_sizes() {
        let ex1 = builtin("EX1").unwrap();
        assert_eq!(xi_vertex_set(&ex1, &RelevanceIndex::new(&ex1), DEFAULT_PLAN_CAP).unwrap().len(), 8);
        let single = single_terminal();
        let xi = xi_vertex_set(&single, &RelevanceIndex::new(&single), DEFAULT_PLAN_CAP).unwrap();
        assert_eq!(xi.plans().cloned().collect::<Vec<_>>(), vec![CorrelationPlan::new(vec![1.0])]);
    }

    #[test]
    fn cap_is_enforced() {
        let tree = goofspiel(GoofspielParams::new(3).unwrap());
        let err = xi_vertex_set(&tree, &RelevanceIndex::new(&tree), DEFAULT_PLAN_CAP).unwrap_err();
        assert_eq!(
            err,
            OracleError::CapExceeded {
                count: 884_736u128 * 884_736,
                cap: DEFAULT_PLAN_CAP
            }
        );
    }

    #[test]
    fn decomposition_matches_oracle_on_examples() {
        for name in ["EX1", "EX2"] {
            let report = check_xi_equals_vsf(&builtin(name).unwrap(), DEFAULT_PLAN_CAP).unwrap();
            assert!(report.equal, "{name}: {report:?}");
        }
        assert!(matches!(
            check_xi_equals_vsf(&builtin("EX3").unwrap(), DEFAULT_PLAN_CAP),
            Err(OracleError::Decompose(DecomposeError::NotTriangleFree(_)))
        ));
    }

    #[test]
    fn lemma_preconditions() {
        let tree = builtin("EX1").unwrap();
        let (index, system) = setup(&tree);
        let mut lonely = vec![0.0; index.len()];
        lonely[0] = 1.0;
        assert!(matches!(
            check_integral_lemmas(&CorrelationPlan::new(lonely), &index, &system),
            Err(OracleError::NotMember { .. })
        ));
        let mut half = vec![0.5; index.len()];
        half[0] = 1.0;
        assert_eq!(
            check_integral_lemmas(&CorrelationPlan::new(half), &index, &system),
            Err(OracleError::NotIntegral)
        );
    }

    #[test]
    fn fixture_round_trip() {
        let tree = builtin("EX2").unwrap();
        let xi = xi_vertex_set(&tree, &RelevanceIndex::new(&tree), DEFAULT_PLAN_CAP).unwrap();
        let text = fixture_text(xi.plans()).unwrap();
        assert_eq!(text.lines().count(), xi.len());
        let back = parse_fixture(&text).unwrap();
        assert_eq!(fixture_text(&back).unwrap(), text);
        assert!(fixture_text(&[CorrelationPlan::new(vec![0.5])]).is_none());
    }
}

use super::*;
use crate::game::{Node, NodeKind};
use crate::io::{builtin, goofspiel, single_terminal, GoofspielParams};

fn ex(name: &str) -> (GameTree, RelevanceIndex, VsfConstraintSystem) {
    let tree = builtin(name).unwrap();
    let index = RelevanceIndex::new(&tree);
    let system = VsfConstraintSystem::new(&tree, &index);
    (tree, index, system)
}

fn uniform_ex1(index: &RelevanceIndex) -> CorrelationPlan {
    CorrelationPlan::new(
        index
            .pairs()
            .map(|(a, b)| match (a, b) {
                (0, 0) => 1.0,
                (0, _) | (_, 0) => 0.5,
                _ => 0.25,
            })
            .collect(),
    )
}

#[test]
fn relevance_index_sizes() {
    assert_eq!(ex("EX1").1.len(), 15);
    assert_eq!(ex("EX2").1.len(), 17);
    let single = single_terminal();
    let index = RelevanceIndex::new(&single);
    assert_eq!(index.len(), 1);
    assert_eq!(index.pair(0), (0, 0));
}

#[test]
fn relevance_index_is_a_bijection() {
    let tree = goofspiel(GoofspielParams::new(2).unwrap());
    let index = RelevanceIndex::new(&tree);
    let mut expected = 0;
    for s1 in tree.sequences(Player::One) {
        for s2 in tree.sequences(Player::Two) {
            if tree.relevant(s1, s2) {
                let c = index.coord_of(s1, s2).expect("relevant pair indexed");
                assert_eq!(index.pair(c), (s1.index, s2.index));
                expected += 1;
            } else {
                assert_eq!(index.coord_of(s1, s2), None);
            }
        }
    }
    assert_eq!(index.len(), expected);
    assert_eq!(index.len(), 73);
    assert_eq!(index.coord(0, 0), Some(0));
}

#[test]
fn constraint_row_counts() {
    assert_eq!(ex("EX1").2.num_rows(), 12);
    let single = single_terminal();
    let system = VsfConstraintSystem::new(&single, &RelevanceIndex::new(&single));
    assert_eq!(system.num_rows(), 1);
    assert_eq!(system.rows[0].label, RowLabel::Normalization);
}

#[test]
fn goofspiel2_row_count_matches_independent_enumeration() {
    let tree = goofspiel(GoofspielParams::new(2).unwrap());
    let index = RelevanceIndex::new(&tree);
    let system = VsfConstraintSystem::new(&tree, &index);
    let mut count = 1;
    for p in Player::BOTH {
        for info in tree.infoset_ids(p) {
            for s in tree.sequences(p.opponent()) {
                let relevant = match tree.sequence_parts(s) {
                    None => true,
                    Some((j, _)) => tree.connected(info, j).unwrap(),
                };
                count += usize::from(relevant);
            }
        }
    }
    assert_eq!(system.num_rows(), count);
    // Normalization first, then the Player 1 family, then Player 2.
    let first_two = system
        .rows
        .iter()
        .position(|r| matches!(r.label, RowLabel::PlayerTwo { .. }))
        .unwrap();
    assert!(system.rows[1..first_two]
        .iter()
        .all(|r| matches!(r.label, RowLabel::PlayerOne { .. })));
}

#[test]
fn uniform_plan_is_member() {
    let (_, index, system) = ex("EX1");
    let report = check_membership(&uniform_ex1(&index), &system, DEFAULT_TOLERANCE).unwrap();
    assert!(report.member);
    assert_eq!(report.max_violation, 0.0);
}

#[test]
fn scaled_plan_breaks_normalization() {
    let (_, index, system) = ex("EX1");
    let mut plan = uniform_ex1(&index);
    plan.values.iter_mut().for_each(|v| *v *= 0.9);
    let report = check_membership(&plan, &system, DEFAULT_TOLERANCE).unwrap();
    assert!(!report.member);
    assert!((report.max_violation - 0.1).abs() < 1e-12);
    assert_eq!(report.worst_row, Some(0));
}

#[test]
fn negative_entries_are_violations() {
    let (_, index, system) = ex("EX1");
    let mut plan = uniform_ex1(&index);
    let c = index.coord(1, 1).unwrap();
    plan.values[c] = -0.5;
    let report = check_membership(&plan, &system, DEFAULT_TOLERANCE).unwrap();
    assert!(!report.member);
    assert_eq!(report.worst_entry, Some(c));
}

#[test]
fn membership_dimension_mismatch() {
    let (_, _, system) = ex("EX1");
    let err = check_membership(&CorrelationPlan::new(vec![1.0]), &system, 1e-9).unwrap_err();
    assert_eq!(err, PolytopeError::DimensionMismatch { expected: 15, actual: 1 });
}

#[test]
fn payoff_objective_on_chance_only_game() {
    let nodes = vec![
        Node::root(NodeKind::Chance {
            outcomes: vec![("l".into(), 0.3), ("r".into(), 0.7)],
        }),
        Node::child(0, "l", NodeKind::Terminal { payoffs: [1.0, 0.0] }),
        Node::child(0, "r", NodeKind::Terminal { payoffs: [0.0, 2.0] }),
    ];
    let tree = GameTree::new("chance", nodes).unwrap();
    let index = RelevanceIndex::new(&tree);
    let obj = payoff_objective(&tree, &index, 1.0, 1.0);
    assert_eq!(obj.coefficients.len(), 1);
    assert!((obj.coefficients[0] - 1.7).abs() < 1e-15);
    let zero = payoff_objective(&tree, &index, 0.0, 0.0);
    assert!(zero.coefficients.iter().all(|&c| c == 0.0));
}

#[test]
fn lp_export_counts_and_round_trip() {
    let (_, index, system) = ex("EX1");
    let obj = LinearObjective::zero(index.len(), Sense::Maximize);
    let mut buf = Vec::new();
    let doc = export_lp(&system, &obj, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(doc.vars.len(), 15);
    assert_eq!(doc.rows.len(), 12);
    assert_eq!(text.lines().filter(|l| l.starts_with("eq ")).count(), 12);
    assert!(text.contains("var vsf_0_0 >= 0"));
    let back = parse_lp(&text).unwrap();
    assert_eq!(back, doc);
    assert_eq!(back.to_string(), text);
}

#[test]
fn lp_round_trip_with_awkward_coefficients() {
    let tree = goofspiel(GoofspielParams::new(2).unwrap());
    let index = RelevanceIndex::new(&tree);
    let system = VsfConstraintSystem::new(&tree, &index);
    let mut obj = payoff_objective(&tree, &index, 1.0 / 3.0, -0.7);
    obj.sense = Sense::Minimize;
    let mut buf = Vec::new();
    export_lp(&system, &obj, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.lines().nth(1).unwrap().starts_with("min"));
    assert_eq!(parse_lp(&text).unwrap().to_string(), text);
}

#[test]
fn lp_single_terminal() {
    let tree = single_terminal();
    let index = RelevanceIndex::new(&tree);
    let system = VsfConstraintSystem::new(&tree, &index);
    let mut obj = LinearObjective::zero(1, Sense::Maximize);
    obj.coefficients[0] = 2.5;
    let doc = LpDocument::new(&system, &obj).unwrap();
    assert_eq!((doc.vars.len(), doc.rows.len()), (1, 1));
    assert_eq!(doc.objective, vec![(2.5, "vsf_0_0".to_string())]);
}

#[test]
fn lp_parse_errors() {
    assert!(matches!(parse_lp("eq 1*x = 1\n"), Err(LpError::Parse { .. })));
    assert!(matches!(parse_lp("max\neq 1*x 1\n"), Err(LpError::Parse { line: 2, .. })));
    assert!(matches!(parse_lp("max\nvar x >= 1\n"), Err(LpError::Parse { line: 2, .. })));
}

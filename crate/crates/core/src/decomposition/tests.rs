use super::*;
use crate::io::{builtin, goofspiel, single_terminal, GoofspielParams};
use crate::polytope::{check_membership, VsfConstraintSystem, DEFAULT_TOLERANCE};

fn goof(k: usize) -> GameTree {
    goofspiel(GoofspielParams::new(k).unwrap())
}

/// Every coordinate is written once, and only read after being written.
fn assert_well_formed(program: &ScaledExtensionProgram) {
    let mut filled = vec![false; program.dimension()];
    filled[0] = true;
    let write = |c: usize, filled: &mut Vec<bool>| {
        assert!(!filled[c], "coordinate {c} written twice");
        filled[c] = true;
    };
    for s in program.steps() {
        match s {
            Step::Split { source, targets } => {
                assert!(filled[source]);
                assert!(!targets.is_empty());
                for &t in targets {
                    write(t as usize, &mut filled);
                }
            }
            Step::Sum { terms, target } => {
                assert!(terms.iter().all(|&t| filled[t as usize]));
                write(target, &mut filled);
            }
        }
    }
    assert!(filled.iter().all(|&f| f));
    let mut order = program.fill_order();
    order.sort_unstable();
    assert_eq!(order, (0..program.dimension()).collect::<Vec<_>>());
}

#[test]
fn ex3_has_the_expected_witness() {
    let tree = builtin("EX3").unwrap();
    let w = find_triangle(&tree).unwrap();
    assert_eq!(w.labels(&tree), ["A", "B", "C", "D"].map(String::from));
    assert!(w.holds(&tree));
    assert!(matches!(decompose(&tree), Err(DecomposeError::NotTriangleFree(x)) if x == w));
}

#[test]
fn triangle_free_examples() {
    for name in ["EX1", "EX2"] {
        assert!(is_triangle_free(&builtin(name).unwrap()).is_ok(), "{name}");
    }
    for k in 2..=3 {
        assert!(is_triangle_free(&goof(k)).is_ok());
    }
    assert!(is_triangle_free(&single_terminal()).is_ok());
}

#[test]
fn goofspiel_step_counts() {
    let p2 = decompose(&goof(2)).unwrap();
    assert_eq!((p2.split_count(), p2.sum_count()), (38, 28));
    assert_eq!(p2.dimension(), 73);
    assert_well_formed(&p2);
    let p3 = decompose(&goof(3)).unwrap();
    assert_eq!(p3.len(), 2931);
    assert_eq!((p3.split_count(), p3.sum_count()), (1686, 1245));
    assert_eq!(p3.dimension(), 3262);
    assert_well_formed(&p3);
}

#[test]
fn ex1_fill_order_starts_with_the_player_two_split() {
    let tree = builtin("EX1").unwrap();
    let program = decompose(&tree).unwrap();
    assert_well_formed(&program);
    let index = program.index();
    let Step::Split { source, targets } = program.step(0) else {
        panic!("first step should split");
    };
    assert_eq!(index.pair(source), (0, 0));
    let pairs: Vec<_> = targets.iter().map(|&t| index.pair(t as usize)).collect();
    assert_eq!(pairs, vec![(0, 1), (0, 2)]);
    // Rows v[σ1, ∅] come last, as sums.
    let tail: Vec<_> = program.steps().skip(program.len() - 4).collect();
    for s in tail {
        let Step::Sum { target, .. } = s else {
            panic!("expected trailing sums");
        };
        assert_eq!(index.pair(target).1, 0);
    }
}

#[test]
fn ex1_uniform_inputs_give_the_uniform_plan() {
    let program = decompose(&builtin("EX1").unwrap()).unwrap();
    let plan = program.evaluate(&program.uniform_inputs()).unwrap();
    for (c, (a, b)) in program.index().pairs().enumerate() {
        let expected = match (a, b) {
            (0, 0) => 1.0,
            (0, _) | (_, 0) => 0.5,
            _ => 0.25,
        };
        assert_eq!(plan.values[c], expected, "pair ({a}, {b})");
    }
}

#[test]
fn single_terminal_program_is_trivial() {
    let program = decompose(&single_terminal()).unwrap();
    assert!(program.is_empty());
    assert_eq!(program.evaluate(&[]).unwrap().values, vec![1.0]);
    let points = program.deterministic_points(DEFAULT_POINT_CAP).unwrap();
    assert_eq!(points, vec![CorrelationPlan::new(vec![1.0])]);
}

#[test]
fn evaluate_rejects_bad_inputs() {
    let program = decompose(&builtin("EX1").unwrap()).unwrap();
    assert!(matches!(
        program.evaluate(&[1.0]),
        Err(EvaluateError::DimensionMismatch { .. })
    ));
    let mut inputs = program.uniform_inputs();
    inputs[0] += 1e-9;
    assert!(matches!(
        program.evaluate(&inputs),
        Err(EvaluateError::OffSimplex { step: 0, .. })
    ));
    let mut inputs = program.uniform_inputs();
    inputs[0] = -0.5;
    inputs[1] = 1.5;
    assert!(matches!(
        program.evaluate(&inputs),
        Err(EvaluateError::OffSimplex { step: 0, .. })
    ));
}

#[test]
fn ex1_deterministic_points() {
    let program = decompose(&builtin("EX1").unwrap()).unwrap();
    let points = program.deterministic_points(DEFAULT_POINT_CAP).unwrap();
    assert_eq!(points.len(), 8);
    assert!(points.iter().all(CorrelationPlan::is_integral));
}

#[test]
fn point_cap_is_enforced() {
    let program = decompose(&builtin("EX1").unwrap()).unwrap();
    assert_eq!(
        program.deterministic_points(3).unwrap_err(),
        PointCapExceeded { cap: 3 }
    );
}

#[test]
fn sampling_is_deterministic_and_feasible() {
    for tree in [builtin("EX2").unwrap(), goof(3)] {
        let program = decompose(&tree).unwrap();
        let system = VsfConstraintSystem::new(&tree, program.index());
        let a = program.sample(7);
        assert_eq!(a, program.sample(7));
        assert_ne!(a, program.sample(8));
        let report = check_membership(&a, &system, DEFAULT_TOLERANCE).unwrap();
        assert!(report.member, "{}: {}", tree.name(), report.max_violation);
    }
}

#[test]
fn dump_has_one_line_per_step() {
    let tree = builtin("EX1").unwrap();
    let program = decompose(&tree).unwrap();
    let mut buf = Vec::new();
    program.dump(&tree, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(text.lines().count(), program.len());
    assert_eq!(text.lines().next().unwrap(), "split (empty,empty) -> (empty,C:1) (empty,C:2)");
    assert!(text.lines().all(|l| l.starts_with("split ") || l.starts_with("sum ")));
}

#[test]
fn vertex_samples_are_deterministic_points() {
    let program = decompose(&builtin("EX2").unwrap()).unwrap();
    let points = program.deterministic_points(DEFAULT_POINT_CAP).unwrap();
    for seed in 0..20 {
        let v = program.sample_vertex(seed);
        assert!(v.is_integral());
        assert!(points.contains(&v));
    }
}

#[test]
fn oversized_enumeration_fails_fast() {
    let program = decompose(&goof(3)).unwrap();
    let mut visited = 0u64;
    let err = program.for_each_deterministic_point(1000, |_| visited += 1);
    assert_eq!(err, Err(PointCapExceeded { cap: 1000 }));
    assert_eq!(visited, 1000);
}

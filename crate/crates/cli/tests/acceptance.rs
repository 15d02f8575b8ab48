//! Acceptance gate. Prints one PASS/FAIL line per criterion on stdout
//! (bypassing the test harness capture) and fails if any criterion fails.

use std::fs;
use std::io::Write;
use std::process::Command;
use std::time::{Duration, Instant};

use efcorr::decomposition::{DecomposeError, DEFAULT_POINT_CAP};
use efcorr::game::DEFAULT_PLAN_CAP;
use efcorr::io::{builtin, goofspiel, random_public_chance, single_terminal, GoofspielParams, RandomGameParams};
use efcorr::optimizer::{optimize_with, OptimizeConfig};
use efcorr::oracle::{check_integral_lemmas, check_program_against_xi, plan_pair_count, xi_vertex_set};
use efcorr::polytope::{check_membership, payoff_objective, LinearObjective, Sense};
use efcorr::{decompose, is_triangle_free, GameTree, Player, RelevanceIndex, VsfConstraintSystem};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-9;

struct Gate {
    failed: Vec<u8>,
}

impl Gate {
    fn record(&mut self, n: u8, name: &str, result: Result<String, String>) {
        let line = match &result {
            Ok(d) => format!("criterion {n} {name}: PASS ({d})"),
            Err(d) => format!("criterion {n} {name}: FAIL ({d})"),
        };
        let mut out = std::io::stdout().lock();
        let _ = writeln!(out, "{line}");
        let _ = out.flush();
        if result.is_err() {
            self.failed.push(n);
        }
    }
}

fn goof(k: usize) -> GameTree {
    goofspiel(GoofspielParams::new(k).unwrap())
}

fn random(seed: u64) -> GameTree {
    random_public_chance(seed, RandomGameParams::default())
}

fn counts(tree: &GameTree) -> [usize; 4] {
    let both = |f: &dyn Fn(Player) -> usize| f(Player::One) + f(Player::Two);
    [
        both(&|p| tree.num_infosets(p)),
        tree.connected_pair_count(),
        both(&|p| tree.num_sequences(p)),
        RelevanceIndex::new(tree).len(),
    ]
}

fn within(elapsed: Duration, budget: Duration) -> Result<(), String> {
    if elapsed <= budget {
        Ok(())
    } else {
        Err(format!("took {elapsed:.2?}, budget {budget:?}"))
    }
}

fn criterion_1() -> Result<String, String> {
    let start = Instant::now();
    let got = counts(&goof(3));
    let elapsed = start.elapsed();
    if got != [426, 1077, 524, 3262] {
        return Err(format!("counts {got:?}"));
    }
    within(elapsed, Duration::from_secs(1))?;
    Ok(format!("426/1077/524/3262 in {elapsed:.2?}"))
}

fn criterion_2() -> Result<String, String> {
    let steps3 = decompose(&goof(3)).map_err(|e| e.to_string())?.len();
    if steps3 != 2931 {
        return Err(format!("goofspiel(3) has {steps3} steps"));
    }
    let start = Instant::now();
    let tree = goof(4);
    let got = counts(&tree);
    let program = decompose(&tree).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    if got != [17432, 80884, 21298, 265393] {
        return Err(format!("goofspiel(4) counts {got:?}"));
    }
    if program.len() != 235956 {
        return Err(format!("goofspiel(4) has {} steps", program.len()));
    }
    within(elapsed, Duration::from_secs(60))?;
    Ok(format!("2931 and 235956 steps, goofspiel(4) end to end in {elapsed:.2?}"))
}

fn membership_corpus() -> Vec<GameTree> {
    let mut games = vec![builtin("EX1").unwrap(), builtin("EX2").unwrap(), goof(2), goof(3)];
    games.extend((0..50).map(random));
    games
}

fn criterion_3() -> Result<String, String> {
    let games = membership_corpus();
    let mut worst = 0.0f64;
    for tree in &games {
        let program = decompose(tree).map_err(|e| format!("{}: {e}", tree.name()))?;
        let system = VsfConstraintSystem::new(tree, program.index());
        for seed in 0..100 {
            let rep = check_membership(&program.sample(seed), &system, TOL).unwrap();
            worst = worst.max(rep.max_violation);
            if !rep.member {
                return Err(format!("{} sample {seed}: violation {}", tree.name(), rep.max_violation));
            }
        }
    }
    Ok(format!("{} games x 100 samples, max violation {worst:e}", games.len()))
}

fn criterion_4() -> Result<String, String> {
    let mut games = vec![
        builtin("EX1").unwrap(),
        builtin("EX2").unwrap(),
        single_terminal(),
        goof(2),
    ];
    games.extend((0..50).map(random));
    let mut total = 0;
    for tree in &games {
        let program = decompose(tree).map_err(|e| format!("{}: {e}", tree.name()))?;
        let system = VsfConstraintSystem::new(tree, program.index());
        let points = program
            .deterministic_points(DEFAULT_POINT_CAP)
            .map_err(|e| format!("{}: {e}", tree.name()))?;
        for p in &points {
            if !p.is_integral() {
                return Err(format!("{}: non-integral point", tree.name()));
            }
            let rep = check_integral_lemmas(p, program.index(), &system).unwrap();
            if !rep.passed {
                return Err(format!("{}: {:?}", tree.name(), rep.first_violation));
            }
        }
        total += points.len();
    }

    // Exhaustive enumeration of goofspiel(3) is far past the cap; sample it.
    let tree = goof(3);
    let program = decompose(&tree).unwrap();
    let system = VsfConstraintSystem::new(&tree, program.index());
    let capped = program.for_each_deterministic_point(DEFAULT_POINT_CAP, |_| {}).is_err();
    for seed in 0..1000 {
        let p = program.sample_vertex(seed);
        if !p.is_integral() || !check_integral_lemmas(&p, program.index(), &system).unwrap().passed {
            return Err(format!("goofspiel-3 vertex sample {seed} fails"));
        }
    }
    Ok(format!(
        "{total} points over {} games exhaustively; goofspiel(3) {} the point cap, 1000 sampled vertices checked",
        games.len(),
        if capped { "exceeds" } else { "within" }
    ))
}

fn criterion_5() -> Result<String, String> {
    let start = Instant::now();
    let mut games = vec![builtin("EX1").unwrap(), builtin("EX2").unwrap(), goof(2)];
    let mut picked = Vec::new();
    for seed in 0..10_000 {
        if picked.len() == 25 {
            break;
        }
        let tree = random(seed);
        let nontrivial = Player::BOTH.iter().all(|&p| tree.num_infosets(p) > 0);
        if nontrivial && plan_pair_count(&tree) <= 10_000 {
            picked.push(seed);
            games.push(tree);
        }
    }
    if picked.len() < 25 {
        return Err(format!("only {} qualifying random games", picked.len()));
    }
    let mut vertices = 0;
    for tree in &games {
        let program = decompose(tree).map_err(|e| format!("{}: {e}", tree.name()))?;
        let rep = check_program_against_xi(tree, &program, DEFAULT_PLAN_CAP).map_err(|e| format!("{}: {e}", tree.name()))?;
        if !rep.equal {
            return Err(format!(
                "{}: {} missing from decomposition, {} missing from oracle",
                tree.name(),
                rep.missing_from_decomposition.len(),
                rep.missing_from_xi.len()
            ));
        }
        vertices += rep.xi_vertices;
    }
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(120))?;
    Ok(format!(
        "{} games, {vertices} vertices equal, random seeds {}..={}, {elapsed:.2?}",
        games.len(),
        picked[0],
        picked[picked.len() - 1]
    ))
}

fn criterion_6() -> Result<String, String> {
    let start = Instant::now();
    let ex3 = builtin("EX3").unwrap();
    let w = is_triangle_free(&ex3).err().ok_or("EX3 reported triangle-free")?;
    let labels = w.labels(&ex3);
    if labels != ["A", "B", "C", "D"].map(String::from) || !w.holds(&ex3) {
        return Err(format!("EX3 witness {labels:?}"));
    }
    if !matches!(decompose(&ex3), Err(DecomposeError::NotTriangleFree(_))) {
        return Err("decompose accepted EX3".into());
    }
    let mut games = vec![builtin("EX1").unwrap(), builtin("EX2").unwrap()];
    games.extend((2..=4).map(goof));
    games.extend((0..200).map(random));
    for tree in &games {
        if let Err(w) = is_triangle_free(tree) {
            return Err(format!("{}: triangle {}", tree.name(), w));
        }
    }
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(30))?;
    Ok(format!(
        "EX3 witness A,B,C,D refused; {} games triangle-free (goofspiel 2..=4) in {elapsed:.2?}",
        games.len()
    ))
}

/// Optimizes and compares with the best oracle vertex. Returns the error
/// against the oracle.
fn optimize_case(tree: &GameTree, objective: &LinearObjective) -> Result<f64, String> {
    let program = decompose(tree).unwrap();
    let system = VsfConstraintSystem::new(tree, program.index());
    let values = xi_vertex_set(tree, program.index(), DEFAULT_PLAN_CAP)
        .unwrap()
        .plans()
        .map(|p| objective.value(p).unwrap())
        .collect::<Vec<_>>();
    let best = match objective.sense {
        Sense::Maximize => values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        Sense::Minimize => values.iter().copied().fold(f64::INFINITY, f64::min),
    };
    let config = OptimizeConfig {
        max_iters: 100_000,
        target_gap: 1e-4,
        seed: 0,
    };
    let mut infeasible = 0u64;
    let result = optimize_with(&program, objective, config, |info| {
        if !check_membership(info.iterate, &system, TOL).unwrap().member {
            infeasible += 1;
        }
    })
    .map_err(|e| e.to_string())?;
    if infeasible > 0 {
        return Err(format!("{}: {infeasible} infeasible iterates", tree.name()));
    }
    if !check_membership(&result.plan, &system, TOL).unwrap().member {
        return Err(format!("{}: averaged plan infeasible", tree.name()));
    }
    let err = (result.value - best).abs();
    if err > 1e-3 {
        return Err(format!("{}: value {} vs oracle {best}", tree.name(), result.value));
    }
    Ok(err)
}

fn criterion_7() -> Result<String, String> {
    let g2 = goof(2);
    let index = RelevanceIndex::new(&g2);
    let mut worst = optimize_case(&g2, &payoff_objective(&g2, &index, 1.0, 1.0))?;
    let ex2 = builtin("EX2").unwrap();
    let dim = RelevanceIndex::new(&ex2).len();
    for seed in 0..20 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sense = if seed % 2 == 0 {
            Sense::Maximize
        } else {
            Sense::Minimize
        };
        let objective = LinearObjective {
            coefficients: (0..dim).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect(),
            sense,
        };
        worst = worst.max(optimize_case(&ex2, &objective)?);
    }
    Ok(format!("21 objectives, worst error vs oracle {worst:e}, all iterates feasible"))
}

fn run_cli(args: &[&str]) -> (Vec<u8>, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_efcorr"))
        .args(args)
        .output()
        .expect("binary runs");
    (out.stdout, out.status.code().unwrap_or(-1))
}

fn criterion_8() -> Result<String, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let dump = dir.path().join("program.dump");
    let dump = dump.to_str().unwrap();
    let runs: [&[&str]; 6] = [
        &["stats", "--goofspiel", "3"],
        &["stats", "--goofspiel", "3", "--format", "json"],
        &["decompose", "--goofspiel", "3", "--dump"],
        &["optimize", "--goofspiel", "2", "--seed", "7", "--plan"],
        &["optimize", "--builtin", "EX2", "--seed", "3", "--max-iters", "500", "--format", "json"],
        &["export-lp", "--goofspiel", "2"],
    ];
    for args in runs {
        let a = run_cli(args);
        let b = run_cli(args);
        if a != b {
            return Err(format!("{args:?} differs between runs"));
        }
        if a.0.is_empty() {
            return Err(format!("{args:?} printed nothing"));
        }
    }
    let mut files = Vec::new();
    for _ in 0..2 {
        let (_, code) = run_cli(&["decompose", "--goofspiel", "3", "--dump", "--output", dump]);
        if code != 0 {
            return Err(format!("decompose exited {code}"));
        }
        files.push(fs::read(dump).map_err(|e| e.to_string())?);
    }
    if files[0] != files[1] {
        return Err("dump files differ".into());
    }
    Ok(format!("{} commands byte-identical across two runs, dump file identical", runs.len() + 1))
}

#[test]
fn acceptance_criteria() {
    let mut gate = Gate { failed: Vec::new() };
    gate.record(1, "goofspiel(3) counts", criterion_1());
    gate.record(2, "decomposition step counts", criterion_2());
    gate.record(3, "sampled plans satisfy the constraints", criterion_3());
    gate.record(4, "deterministic points are integral", criterion_4());
    gate.record(5, "decomposition points equal oracle vertices", criterion_5());
    gate.record(6, "triangle-freeness", criterion_6());
    gate.record(7, "optimizer reaches the oracle optimum", criterion_7());
    gate.record(8, "determinism", criterion_8());
    assert!(gate.failed.is_empty(), "failed criteria: {:?}", gate.failed);
}

#[test]
#[ignore = "long running: goofspiel(5) has about 36 million coordinates"]
fn five_ranks() {
    let mut gate = Gate { failed: Vec::new() };
    let result = (|| {
        let start = Instant::now();
        let tree = goof(5);
        if let Err(w) = is_triangle_free(&tree) {
            return Err(format!("triangle {w}"));
        }
        let got = counts(&tree);
        if got != [1175330, 10505585, 1428452, 36102736] {
            return Err(format!("counts {got:?}"));
        }
        let steps = decompose(&tree).map_err(|e| e.to_string())?.len();
        if steps != 31901355 {
            return Err(format!("{steps} steps"));
        }
        let elapsed = start.elapsed();
        within(elapsed, Duration::from_secs(30 * 60))?;
        Ok(format!("triangle-free, 31901355 steps in {elapsed:.2?}"))
    })();
    gate.record(2, "goofspiel(5) optional", result);
    assert!(gate.failed.is_empty());
}

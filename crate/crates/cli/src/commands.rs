use std::collections::HashMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use efcorr::decomposition::{DecomposeError, TriangleWitness};
use efcorr::game::NodeKind;
use efcorr::io::{builtin, goofspiel, parse_efg, GoofspielParams};
use efcorr::optimizer::{optimize_with, OptimizeConfig, OptimizeError};
use efcorr::oracle::{check_integral_lemmas, check_program_against_xi, plan_pair_count};
use efcorr::polytope::export_lp;
use efcorr::polytope::{check_membership, payoff_objective, LinearObjective, Sense};
use efcorr::{decompose, is_triangle_free, CorrelationPlan, GameTree, Player, RelevanceIndex};
use efcorr::{ScaledExtensionProgram, VsfConstraintSystem};
use serde_json::{json, Map, Value};

use crate::report::{exit, CliError, Report};

pub enum Source {
    File(PathBuf),
    Builtin(String),
    Goofspiel(usize),
}

pub fn load(source: &Source) -> Result<GameTree, CliError> {
    match source {
        Source::Builtin(name) => builtin(name).map_err(|e| CliError::new(exit::USAGE, e.to_string())),
        Source::Goofspiel(k) => GoofspielParams::new(*k)
            .map(goofspiel)
            .map_err(|e| CliError::new(exit::USAGE, e.to_string())),
        Source::File(path) => {
            let text = fs::read_to_string(path).map_err(|e| {
                let code = if e.kind() == io::ErrorKind::NotFound {
                    exit::NO_INPUT
                } else {
                    exit::IO
                };
                CliError::new(code, format!("{}: {e}", path.display()))
            })?;
            parse_efg(&text).map_err(|e| CliError::new(exit::DATA, format!("{}: {e}", path.display())))
        }
    }
}

/// What a command produced: a report, an exit code, and optionally a
/// separate artifact that takes precedence for stdout or `--output`.
pub struct Outcome {
    pub report: Report,
    pub code: i32,
    pub artifact: Option<Vec<u8>>,
}

impl Outcome {
    fn done(report: Report) -> Self {
        Outcome {
            report,
            code: exit::SUCCESS,
            artifact: None,
        }
    }
}

fn witness_value(tree: &GameTree, w: &TriangleWitness) -> Value {
    let [i1, i2, j1, j2] = w.labels(tree);
    json!({ "i1": i1, "i2": i2, "j1": j1, "j2": j2 })
}

fn witness_line(tree: &GameTree, w: &TriangleWitness) -> String {
    let [i1, i2, j1, j2] = w.labels(tree);
    format!("I1={i1} I2={i2} J1={j1} J2={j2}")
}

/// Decomposes or fails with the precondition exit code.
fn program_for(tree: &GameTree) -> Result<ScaledExtensionProgram, CliError> {
    decompose(tree).map_err(|e| match e {
        DecomposeError::NotTriangleFree(w) => CliError::new(
            exit::PRECONDITION,
            format!("game is not triangle-free: {}", witness_line(tree, &w)),
        ),
        DecomposeError::Internal(m) => CliError::new(exit::PRECONDITION, m),
    })
}

pub fn stats(tree: &GameTree) -> Outcome {
    let (mut decision, mut chance, mut terminal) = (0, 0, 0);
    for n in tree.nodes() {
        match n.kind {
            NodeKind::Decision { .. } => decision += 1,
            NodeKind::Chance { .. } => chance += 1,
            NodeKind::Terminal { .. } => terminal += 1,
        }
    }
    let [i1, i2] = Player::BOTH.map(|p| tree.num_infosets(p));
    let [s1, s2] = Player::BOTH.map(|p| tree.num_sequences(p));
    let pairs = tree.connected_pair_count();
    let relevant = RelevanceIndex::new(tree).len();

    let mut r = Report::new("stats", tree.name());
    r.headline(format!(
        "{} infosets, {pairs} connected pairs, {} sequences, {relevant} relevant pairs",
        i1 + i2,
        s1 + s2
    ));
    r.set("infosets", i1 + i2)
        .set("infosets_by_player", json!([i1, i2]))
        .set("connected_pairs", pairs)
        .set("sequences", s1 + s2)
        .set("sequences_by_player", json!([s1, s2]))
        .set("relevant_pairs", relevant)
        .set("nodes", tree.nodes().len())
        .set("decision_nodes", decision)
        .set("chance_nodes", chance)
        .set("terminal_nodes", terminal);
    Outcome::done(r)
}

pub fn check(tree: &GameTree) -> Outcome {
    let mut r = Report::new("check", tree.name());
    match is_triangle_free(tree) {
        Ok(()) => {
            r.headline("triangle-free: yes").set("triangle_free", true);
            Outcome::done(r)
        }
        Err(w) => {
            r.headline(format!("triangle-free: no ({})", witness_line(tree, &w)))
                .set("triangle_free", false)
                .set("witness", witness_value(tree, &w));
            Outcome {
                report: r,
                code: exit::FALSE,
                artifact: None,
            }
        }
    }
}

fn millis(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

pub fn decompose_cmd(tree: &GameTree, dump: bool, bench: Option<u32>) -> Result<Outcome, CliError> {
    let start = Instant::now();
    let program = program_for(tree)?;
    let elapsed = millis(start);

    let mut r = Report::new("decompose", tree.name());
    r.headline(format!(
        "{} steps ({} splits, {} sums)",
        program.len(),
        program.split_count(),
        program.sum_count()
    ));
    r.set("steps", program.len())
        .set("splits", program.split_count())
        .set("sums", program.sum_count())
        .set("coordinates", program.dimension())
        .set("inputs", program.input_len())
        .set("time_ms", elapsed);
    if let Some(n) = bench {
        let n = n.max(1);
        let mut total = 0.0;
        let mut best = f64::INFINITY;
        for _ in 0..n {
            let start = Instant::now();
            let p = decompose(tree).expect("decomposed once already");
            let t = millis(start);
            drop(p);
            total += t;
            best = best.min(t);
        }
        r.set("bench_runs", n)
            .set("bench_mean_ms", total / n as f64)
            .set("bench_min_ms", best);
    }
    let artifact = if dump {
        let mut buf = Vec::new();
        program
            .dump(tree, &mut buf)
            .map_err(|e| CliError::new(exit::IO, e.to_string()))?;
        Some(buf)
    } else {
        None
    };
    Ok(Outcome {
        report: r,
        code: exit::SUCCESS,
        artifact,
    })
}

struct Check {
    name: &'static str,
    status: &'static str,
    details: Map<String, Value>,
}

impl Check {
    fn new(name: &'static str, passed: bool) -> Self {
        Check {
            name,
            status: if passed { "pass" } else { "fail" },
            details: Map::new(),
        }
    }

    fn skipped(name: &'static str, reason: String) -> Self {
        let mut c = Check {
            name,
            status: "skipped",
            details: Map::new(),
        };
        c.detail("reason", reason);
        c
    }

    fn detail(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.details.insert(key.to_string(), value.into());
        self
    }
}

pub struct VerifyOptions {
    pub samples: u32,
    pub seed: u64,
    pub tol: f64,
    pub cap: u64,
}

pub fn verify(tree: &GameTree, opts: &VerifyOptions) -> Result<Outcome, CliError> {
    let program = program_for(tree)?;
    let system = VsfConstraintSystem::new(tree, program.index());
    let mut checks = Vec::new();

    let mut worst = 0.0f64;
    let mut failures = 0;
    for i in 0..opts.samples {
        let plan = program.sample(opts.seed.wrapping_add(u64::from(i)));
        let rep = check_membership(&plan, &system, opts.tol).expect("dimensions agree");
        worst = worst.max(rep.max_violation);
        failures += usize::from(!rep.member);
    }
    let mut c = Check::new("membership", failures == 0);
    c.detail("samples", opts.samples)
        .detail("failures", failures)
        .detail("max_violation", worst)
        .detail("tolerance", opts.tol);
    checks.push(c);

    // Exhaustive deterministic points if the cap allows, else random vertices.
    let (points, mode) = match program.deterministic_points(opts.cap) {
        Ok(p) => (p, "exhaustive"),
        Err(_) => (
            (0..opts.samples)
                .map(|i| program.sample_vertex(opts.seed.wrapping_add(u64::from(i))))
                .collect(),
            "sampled",
        ),
    };
    let non_integral = points.iter().filter(|p| !p.is_integral()).count();
    let mut c = Check::new("integrality", non_integral == 0);
    c.detail("mode", mode)
        .detail("points", points.len())
        .detail("non_integral", non_integral);
    checks.push(c);

    let mut lemma_failures = 0;
    let mut pairs_checked = 0;
    for p in points.iter().filter(|p| p.is_integral()) {
        let rep = check_integral_lemmas(p, program.index(), &system).expect("integral plan");
        pairs_checked += rep.pairs_checked;
        lemma_failures += usize::from(!rep.passed);
    }
    let mut c = Check::new("lemmas", lemma_failures == 0);
    c.detail("mode", mode)
        .detail("points", points.len() - non_integral)
        .detail("pairs_checked", pairs_checked)
        .detail("failures", lemma_failures);
    checks.push(c);

    let pairs = plan_pair_count(tree);
    let cap = u128::from(opts.cap);
    let c = if pairs > cap {
        Check::skipped("oracle", format!("{pairs} plan pairs exceed the cap of {cap}"))
    } else if mode != "exhaustive" {
        Check::skipped(
            "oracle",
            format!("deterministic points exceed the cap of {}", opts.cap),
        )
    } else {
        match check_program_against_xi(tree, &program, cap) {
            Ok(rep) => {
                let mut c = Check::new("oracle", rep.equal);
                c.detail("plan_pairs", pairs.to_string())
                    .detail("xi_vertices", rep.xi_vertices)
                    .detail("decomposition_points", rep.decomposition_points)
                    .detail("missing_from_decomposition", rep.missing_from_decomposition.len())
                    .detail("missing_from_xi", rep.missing_from_xi.len());
                c
            }
            Err(e) => Check::skipped("oracle", e.to_string()),
        }
    };
    checks.push(c);

    let failed = checks.iter().filter(|c| c.status == "fail").count();
    let skipped = checks.iter().filter(|c| c.status == "skipped").count();
    let mut r = Report::new("verify", tree.name());
    let summary: Vec<String> = checks.iter().map(|c| format!("{} {}", c.name, c.status)).collect();
    r.headline(summary.join(", "));
    let mut by_name = Map::new();
    for c in checks {
        let mut entry = Map::new();
        entry.insert("status".into(), c.status.into());
        entry.extend(c.details);
        by_name.insert(c.name.into(), Value::Object(entry));
    }
    r.set("checks", Value::Object(by_name))
        .set("failed", failed)
        .set("skipped", skipped)
        .set("seed", opts.seed);
    Ok(Outcome {
        report: r,
        code: if failed == 0 { exit::SUCCESS } else { exit::FALSE },
        artifact: None,
    })
}

pub struct ObjectiveSpec {
    pub w1: f64,
    pub w2: f64,
    pub file: Option<PathBuf>,
    pub minimize: bool,
}

/// Reads `name coefficient` lines; names are LP variable names, `#` starts a
/// comment and unlisted coordinates get 0.
fn read_objective(path: &Path, index: &RelevanceIndex, sense: Sense) -> Result<LinearObjective, CliError> {
    let text = fs::read_to_string(path).map_err(|e| {
        let code = if e.kind() == io::ErrorKind::NotFound {
            exit::NO_INPUT
        } else {
            exit::IO
        };
        CliError::new(code, format!("{}: {e}", path.display()))
    })?;
    let names: HashMap<String, usize> = (0..index.len()).map(|c| (index.var_name(c), c)).collect();
    let mut obj = LinearObjective::zero(index.len(), sense);
    let mut seen = vec![false; index.len()];
    for (n, line) in text.lines().enumerate() {
        let bad = |m: String| CliError::new(exit::DATA, format!("{}:{}: {m}", path.display(), n + 1));
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let (Some(name), Some(coef), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(bad("expected `variable coefficient`".into()));
        };
        let &c = names
            .get(name)
            .ok_or_else(|| bad(format!("unknown variable `{name}`")))?;
        let a: f64 = coef
            .parse()
            .map_err(|_| bad(format!("bad coefficient `{coef}`")))?;
        if !a.is_finite() {
            return Err(bad(format!("coefficient `{coef}` is not finite")));
        }
        if std::mem::replace(&mut seen[c], true) {
            return Err(bad(format!("variable `{name}` listed twice")));
        }
        obj.coefficients[c] = a;
    }
    Ok(obj)
}

fn objective_for(tree: &GameTree, index: &RelevanceIndex, spec: &ObjectiveSpec) -> Result<LinearObjective, CliError> {
    let sense = if spec.minimize {
        Sense::Minimize
    } else {
        Sense::Maximize
    };
    match &spec.file {
        Some(path) => read_objective(path, index, sense),
        None => {
            if !(spec.w1.is_finite() && spec.w2.is_finite()) {
                return Err(CliError::new(exit::USAGE, "payoff weights must be finite"));
            }
            let mut obj = payoff_objective(tree, index, spec.w1, spec.w2);
            obj.sense = sense;
            Ok(obj)
        }
    }
}

fn objective_fields(r: &mut Report, spec: &ObjectiveSpec) {
    r.set("sense", if spec.minimize { "min" } else { "max" });
    match &spec.file {
        Some(p) => r.set("objective", p.display().to_string()),
        None => r.set("objective", "payoff").set("w1", spec.w1).set("w2", spec.w2),
    };
}

pub struct OptimizeOptions {
    pub max_iters: u64,
    pub target_gap: f64,
    pub seed: u64,
    pub progress: Option<u64>,
    pub plan: bool,
}

pub fn optimize_cmd(tree: &GameTree, spec: &ObjectiveSpec, opts: &OptimizeOptions) -> Result<Outcome, CliError> {
    let program = program_for(tree)?;
    let index = program.index();
    let objective = objective_for(tree, index, spec)?;
    let config = OptimizeConfig {
        max_iters: opts.max_iters,
        target_gap: opts.target_gap,
        seed: opts.seed,
    };
    let mut stderr = io::stderr().lock();
    let result = optimize_with(&program, &objective, config, |info| {
        if let Some(every) = opts.progress {
            if every > 0 && info.iteration % every == 0 {
                let _ = writeln!(stderr, "iter {} value {} gap {}", info.iteration, info.value, info.gap);
            }
        }
    })
    .map_err(|e| match e {
        OptimizeError::NonFiniteObjective(_) => CliError::new(exit::DATA, e.to_string()),
        OptimizeError::Dimension(_) => CliError::new(exit::DATA, e.to_string()),
    })?;

    let mut r = Report::new("optimize", tree.name());
    r.headline(format!(
        "value {} gap {} after {} iterations",
        result.value, result.gap, result.iterations
    ));
    objective_fields(&mut r, spec);
    r.set("value", result.value)
        .set("optimum", result.optimum)
        .set("gap", result.gap)
        .set("iterations", result.iterations)
        .set("converged", result.converged)
        .set("target_gap", opts.target_gap)
        .set("max_iters", opts.max_iters)
        .set("seed", opts.seed);
    if opts.plan {
        r.set("plan", plan_value(index, &result.plan));
    }
    Ok(Outcome {
        report: r,
        code: if result.converged {
            exit::SUCCESS
        } else {
            exit::BUDGET
        },
        artifact: None,
    })
}

fn plan_value(index: &RelevanceIndex, plan: &CorrelationPlan) -> Value {
    let map: Map<String, Value> = plan
        .values
        .iter()
        .enumerate()
        .map(|(c, &v)| (index.var_name(c), v.into()))
        .collect();
    Value::Object(map)
}

pub fn export_lp_cmd(tree: &GameTree, spec: &ObjectiveSpec) -> Result<Outcome, CliError> {
    let index = RelevanceIndex::new(tree);
    let system = VsfConstraintSystem::new(tree, &index);
    let objective = objective_for(tree, &index, spec)?;
    let mut buf = Vec::new();
    let doc = export_lp(&system, &objective, &mut buf).map_err(|e| CliError::new(exit::IO, e.to_string()))?;
    let mut r = Report::new("export-lp", tree.name());
    r.headline(format!("{} vars, {} eq rows", doc.vars.len(), doc.rows.len()));
    objective_fields(&mut r, spec);
    r.set("vars", doc.vars.len())
        .set("rows", doc.rows.len())
        .set("objective_terms", doc.objective.len());
    Ok(Outcome {
        report: r,
        code: exit::SUCCESS,
        artifact: Some(buf),
    })
}

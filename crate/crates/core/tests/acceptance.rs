//! One line per acceptance criterion. Exits nonzero if any criterion fails
//! or exceeds its time limit.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use compmatch::balance::{
    acceptable_set_matrix, check_hypergraph_balanced, firm_worker_hypergraph, primitive_set_matrix,
    CycleCertificate,
};
use compmatch::gen::{
    random_complementary_balanced, random_dense_market, random_market, random_neighbour_tree, MarketShape,
};
use compmatch::oracle::{
    all_stable_matchings, cyclic_market, exists_for_all_worker_prefs, SweepOptions, SweepSolver,
};
use compmatch::prefs::{is_additive, is_complementary, primitive_acceptable_sets};
use compmatch::scalar::determinant;
use compmatch::solver::{
    build_constraint_system, extract_integral_solution, run_pipeline, stable_transformation_chain,
    verify_fractional_stability, verify_pseudo_stability, TransformationKind,
};
use compmatch::techtree::{check_neighbour_condition, search_child_orders, Reordering};
use compmatch::{
    corpus, is_balanced, is_totally_balanced, is_totally_unimodular, solve, BigInt, Certificate, FirmId,
    Fractional, Market, Matching, SolveOptions, WorkerSet, ZeroOneMatrix, DEFAULT_CAP,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Check = fn() -> Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn ok<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn stable_count(m: &Market) -> Result<usize, String> {
    ok(all_stable_matchings(m)).map(|v| v.len())
}

fn full_sweep(m: &Market, solver: SweepSolver) -> Result<u128, String> {
    let r = ok(exists_for_all_worker_prefs(m, &SweepOptions { solver, ..SweepOptions::default() }))?;
    ensure!(r.exhaustive, "sweep was not exhaustive");
    ensure!(r.passed(), "no stable matching for worker preferences {:?}", r.counterexample);
    Ok(r.total_profiles)
}

fn sets(m: &Market, lists: &[&[&str]]) -> Vec<WorkerSet> {
    lists.iter().map(|l| m.set_of(l).unwrap()).collect()
}

fn nonexistence() -> Result<String, String> {
    let m = corpus::triangle();
    ensure!(stable_count(&m)? == 0, "oracle found stable matchings in the triangle market");
    let r = ok(solve(&m, &SolveOptions::default()))?;
    ensure!(r.matching.is_none(), "solve returned a matching for the triangle market");
    let a = acceptable_set_matrix(&m);
    let Certificate::Violated(w) = is_balanced(&a, DEFAULT_CAP) else {
        return Err("acceptable sets of the triangle market certified balanced".into());
    };
    ensure!(w.rows.len() == 3 && w.cols.len() == 3, "witness is {}x{}", w.rows.len(), w.cols.len());
    ensure!(a.is_cycle_submatrix(&w.rows, &w.cols), "witness is not a cycle submatrix");
    Ok("0 stable matchings, solve NONE, 3x3 odd-cycle witness".into())
}

fn cyclic_parity() -> Result<String, String> {
    let four = stable_count(&ok(cyclic_market(4))?)?;
    let five = stable_count(&ok(cyclic_market(5))?)?;
    ensure!(four >= 1, "cyclic_market(4) has no stable matching");
    ensure!(five == 0, "cyclic_market(5) has {five} stable matchings");
    Ok(format!("n=4: {four} stable matchings, n=5: {five}"))
}

fn theorem_one() -> Result<String, String> {
    let m = corpus::covered_odd_cycle();
    let h = ok(compmatch::solver::Hypotheses::of(&m, DEFAULT_CAP))?;
    ensure!(h.complementary_balanced(), "the covered-odd-cycle market does not meet the hypotheses");
    let mut profiles = full_sweep(&m, SweepSolver::Direct)?;
    let mut rng = ChaCha8Rng::seed_from_u64(0x7431);
    let shape = MarketShape::default();
    for i in 0..100 {
        let p = random_complementary_balanced(&mut rng, shape, 20_000);
        ensure!(p.num_firms() <= 4 && p.num_workers() <= 5, "profile {i} is too large");
        profiles +=
            full_sweep(&p, SweepSolver::Direct).map_err(|e| format!("random profile {i}: {e}\n{p:?}"))?;
    }
    Ok(format!(
        "covered odd cycle and 100 random profiles, {profiles} worker-preference profiles, 0 failures"
    ))
}

fn theorem_two() -> Result<String, String> {
    let m = corpus::relaxed_triangle();
    let h = ok(compmatch::solver::Hypotheses::of(&m, DEFAULT_CAP))?;
    ensure!(h.primitive_balanced(), "primitive sets of the relaxed triangle not certified balanced");
    ensure!(!h.acceptable_balanced.holds(), "acceptable sets of the relaxed triangle unexpectedly balanced");
    let profiles = full_sweep(&m, SweepSolver::Components)?;
    let primitive = corpus::primitive_sets();
    ensure!(
        ok(primitive_acceptable_sets(&primitive, FirmId(0)))? == sets(&primitive, &[&["w1", "w2"], &["w3"]]),
        "primitive sets of f1 in the primitive-sets market"
    );
    ensure!(
        ok(primitive_acceptable_sets(&primitive, FirmId(1)))?
            == sets(&primitive, &[&["w1", "w2", "w3"], &["w1", "w2"], &["w1"], &["w2"]]),
        "primitive sets of f2 in the primitive-sets market"
    );
    let tree_profile = corpus::tree_profile();
    ensure!(
        ok(primitive_acceptable_sets(&tree_profile, FirmId(0)))?
            == sets(&tree_profile, &[&["w1", "w2"], &["w3", "w4"]]),
        "primitive sets of f1 in the tree profile"
    );
    ensure!(
        ok(primitive_acceptable_sets(&tree_profile, FirmId(1)))?
            == sets(&tree_profile, &[&["w3", "w4", "w5"], &["w3", "w4"]]),
        "primitive sets of f2 in the tree profile"
    );
    ensure!(
        is_balanced(&ok(primitive_set_matrix(&tree_profile))?, DEFAULT_CAP).holds(),
        "primitive sets of the tree profile"
    );
    Ok(format!(
        "relaxed triangle by components over {profiles} profiles; primitive sets of two markets exact"
    ))
}

fn theorem_three() -> Result<String, String> {
    let m = corpus::additive_overlap();
    for f in m.firm_ids() {
        ensure!(ok(is_additive(&m, f))?, "{} not additive", m.firm_name(f));
        ensure!(!ok(is_complementary(&m, f))?, "{} complementary", m.firm_name(f));
    }
    ensure!(
        is_balanced(&acceptable_set_matrix(&m), DEFAULT_CAP).holds(),
        "acceptable sets of the additive-overlap market not balanced"
    );
    let profiles = full_sweep(&m, SweepSolver::Direct)?;
    Ok(format!("both firms additive, not complementary; balanced; {profiles} profiles"))
}

const PRINTED_B: [[u8; 7]; 7] = [
    [1, 1, 0, 0, 0, 0, 0],
    [0, 0, 1, 1, 0, 0, 0],
    [0, 0, 0, 0, 1, 1, 0],
    [1, 0, 1, 0, 0, 0, 0],
    [1, 0, 0, 0, 1, 0, 0],
    [1, 0, 0, 0, 1, 0, 0],
    [0, 0, 0, 0, 1, 0, 1],
];

const PRINTED_CHAIN: [&str; 4] = [
    "w1 w2 w3 w4\nf1#1 1 1 1 0\nf1#2 0.5 0 0 0\nf2 0 0.5 0.5 0.5\nnull 0 0 0 0.5",
    "w1 w2 w3 w4\nf1#1 1 1 1 0\nf2 0 0.5 0.5 0.5\nnull 0 0 0 0.5",
    "w1 w2 w3 w4\nf1#1 1 1 1 0\nnull 0 0 0 0.5",
    "w1 w2 w3 w4\nf1#1 1 1 1 0\nnull 0 0 0 1",
];

fn pipeline_replay() -> Result<String, String> {
    let m = corpus::three_set_firm_split();
    let fm = corpus::half_integral();
    ensure!(ok(verify_fractional_stability(&fm, &m))?.is_stable(), "M is not stable");
    let cs = ok(build_constraint_system(&fm, &m))?;
    let printed: Vec<Vec<u8>> = PRINTED_B.iter().map(|r| r.to_vec()).collect();
    ensure!(cs.matrix.to_rows() == printed, "B differs:\n{}", cs.render(&m));
    ensure!(cs.rhs == vec![1; 7], "right-hand side {:?}", cs.rhs);
    let legend = [
        "z1: {w1,w2,w3} in f1#1's list",
        "z2: ∅ in f1#1's list",
        "z3: {w1} in f1#2's list",
        "z4: ∅ in f1#2's list",
        "z5: {w2,w3,w4} in f2's list",
        "z6: ∅ in f2's list",
        "z7: type w4 matched with ø",
    ];
    ensure!(cs.column_legend(&m) == legend, "legend {:?}", cs.column_legend(&m));
    ensure!(cs.is_satisfied_by(&cs.point_of(&fm)), "z = 1/2 does not solve the system");
    let z = ok(extract_integral_solution(&cs))?;
    ensure!(z[0] + z[1] == 1 && z[2] + z[3] == 1 && z[4] + z[5] == 1, "pair rows violated by {z:?}");
    ensure!(z == [1, 0, 0, 1, 0, 1, 1], "z = {z:?}");
    let steps = ok(stable_transformation_chain(&fm, &z, &cs, &m))?;
    let kinds: Vec<TransformationKind> = steps.iter().map(|s| s.kind).collect();
    ensure!(
        kinds
            == [
                TransformationKind::ToOne,
                TransformationKind::ToZero,
                TransformationKind::ToZero,
                TransformationKind::Null
            ],
        "step kinds {kinds:?}"
    );
    for (i, (step, text)) in steps.iter().zip(PRINTED_CHAIN).enumerate() {
        let printed = ok(Fractional::parse(text, &m))?;
        ensure!(step.result == printed, "step ({}) differs:\n{}", i + 1, step.result.render(&m));
        ensure!(ok(verify_pseudo_stability(&step.result, &m))?.is_stable(), "step ({}) unstable", i + 1);
    }
    let p = ok(run_pipeline(&m, &fm, DEFAULT_CAP))?;
    ensure!(p.integral == steps[3].result, "M' differs from the end of the chain");
    ensure!(ok(verify_fractional_stability(&p.integral, &m))?.is_stable(), "M' unstable");
    ensure!(
        p.original == corpus::three_set_firm(),
        "market the split market not recognised as the decomposition of the three-set-firm market"
    );
    let expected = ok(Matching::from_names(&p.original, &[("f1", &["w1", "w2", "w3"][..])]))?;
    ensure!(p.lifted == expected && p.lifted_stable, "lifted matching {:?}", p.lifted);
    Ok("B and legends exact, z'=(1,0,0,1,0,1,1), four-step chain stable, lift f1-{w1,w2,w3}, w4-ø".into())
}

fn matrix_certificates() -> Result<String, String> {
    let unimodular_sets = acceptable_set_matrix(&corpus::unimodular_sets());
    ensure!(
        is_totally_unimodular(&unimodular_sets, DEFAULT_CAP).holds(),
        "the unimodular-sets market not TU"
    );
    let tri = ok(ZeroOneMatrix::from_rows(vec![vec![1, 1, 0], vec![0, 1, 1], vec![1, 0, 1]]))?;
    ensure!(is_totally_unimodular(&tri, DEFAULT_CAP).is_violated(), "triangle matrix TU");
    let balanced_not_unimodular = acceptable_set_matrix(&corpus::balanced_not_unimodular());
    ensure!(
        is_balanced(&balanced_not_unimodular, DEFAULT_CAP).holds(),
        "the balanced, non-unimodular market not balanced"
    );
    let Certificate::Violated(w) = is_totally_unimodular(&balanced_not_unimodular, DEFAULT_CAP) else {
        return Err("the balanced, non-unimodular market certified TU".into());
    };
    ensure!(w.determinant == Some(2), "witness determinant {:?}", w.determinant);
    let sub: Vec<Vec<BigInt>> = balanced_not_unimodular
        .submatrix(&w.rows, &w.cols)
        .to_rows()
        .into_iter()
        .map(|r| r.into_iter().map(BigInt::from).collect())
        .collect();
    let det = determinant(&sub);
    ensure!(det == BigInt::from(2), "witness re-evaluates to {det}");
    Ok(format!(
        "unimodular sets TU; triangle not TU; balanced market not TU, {}x{} witness det 2",
        w.rows.len(),
        w.cols.len()
    ))
}

fn technology_trees() -> Result<String, String> {
    let t = corpus::nested_tree();
    ensure!(check_neighbour_condition(&t).is_none(), "nested tree fails the neighbour condition");
    ensure!(is_totally_balanced(&t.worker_set_matrix(), DEFAULT_CAP).holds(), "nested tree matrix");
    let tri = corpus::triangle_tree();
    let Some(v) = check_neighbour_condition(&tri) else {
        return Err("second tree passes".into());
    };
    ensure!(tri.workers()[v.worker()] == "w1", "second tree fails on {}", tri.workers()[v.worker()]);
    ensure!(matches!(search_child_orders(&tri), Reordering::Impossible(_)), "some ordering passes");
    let mut rng = ChaCha8Rng::seed_from_u64(0x7ee5);
    for i in 0..200 {
        let t = random_neighbour_tree(&mut rng, 10, 8);
        ensure!(check_neighbour_condition(&t).is_none(), "random tree {i} invalid");
        let c = is_totally_balanced(&t.worker_set_matrix(), DEFAULT_CAP);
        ensure!(c.holds(), "random tree {i}: {c:?}\n{}", t.to_outline());
    }
    Ok("nested tree passes, totally balanced; second tree fails on w1, no ordering passes; 200 random trees"
        .into())
}

fn theorem_five() -> Result<String, String> {
    let m = corpus::firm_worker_cycle();
    let h = ok(firm_worker_hypergraph(&m))?;
    let CycleCertificate::Violated(c) = check_hypergraph_balanced(&h) else {
        return Err("firm-worker hypergraph of the firm-worker-cycle market certified balanced".into());
    };
    ensure!(c.len() % 2 == 1 && c.len() >= 3 && c.is_tight_cycle_of(&h), "bad witness {c:?}");
    ensure!(stable_count(&m)? == 0, "oracle found stable matchings in the firm-worker-cycle market");
    Ok(format!("odd cycle {}; 0 stable matchings", c.render(&h)))
}

fn oracle_equivalence() -> Result<String, String> {
    let agree = |name: &str, m: &Market| -> Result<bool, String> {
        let all = ok(all_stable_matchings(m))?;
        let found = ok(solve(m, &SolveOptions::default()))?.matching;
        match &found {
            Some(mu) => ensure!(all.contains(mu), "{name}: solver matching not in the oracle list"),
            None => ensure!(all.is_empty(), "{name}: solver NONE, oracle has {}", all.len()),
        }
        Ok(found.is_some())
    };
    let mut exist = 0;
    for (name, m) in corpus::markets() {
        exist += usize::from(agree(name, &m)?);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x0a11);
    let (mut sparse, mut dense) = (0, 0);
    for i in 0..500 {
        let m = ok(random_market(&mut rng, MarketShape::default()))?;
        sparse += usize::from(agree(&format!("random market {i}"), &m)?);
        let m = ok(random_dense_market(&mut rng, MarketShape::default()))?;
        dense += usize::from(agree(&format!("dense random market {i}"), &m)?);
    }
    Ok(format!(
        "{} corpus markets ({exist} with stable matchings), 500 random ({sparse} with), 500 dense random ({dense} with)",
        corpus::markets().len()
    ))
}

fn main() -> ExitCode {
    let criteria: [(u32, &str, u64, Check); 10] = [
        (1, "nonexistence in the triangle market", 10, nonexistence),
        (2, "cyclic parity", 60, cyclic_parity),
        (3, "complementary and balanced", 10, theorem_one),
        (4, "primitive sets and components", 10, theorem_two),
        (5, "additive and balanced", 10, theorem_three),
        (6, "fractional pipeline replay", 10, pipeline_replay),
        (7, "matrix certificates", 10, matrix_certificates),
        (8, "technology trees", 10, technology_trees),
        (9, "firm-worker hypergraph", 10, theorem_five),
        (10, "oracle and solver agree", 10, oracle_equivalence),
    ];
    let mut failed = 0;
    for (n, name, limit, check) in criteria {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let result = match result {
            Ok(_) if elapsed > Duration::from_secs(limit) => {
                Err(format!("took {elapsed:.1?}, limit {limit}s"))
            }
            r => r,
        };
        match result {
            Ok(detail) => println!("criterion {n} {name}: PASS ({detail}; {:.2}s)", elapsed.as_secs_f64()),
            Err(e) => {
                failed += 1;
                println!("criterion {n} {name}: FAIL ({e})");
            }
        }
    }
    if failed == 0 {
        println!("acceptance: 10/10 criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} of 10 criteria fail");
        ExitCode::FAILURE
    }
}

use std::path::Path;

use compmatch::balance::{
    acceptable_set_hypergraph, acceptable_set_matrix, check_hypergraph_balanced, check_odd_cycle_condition,
    firm_worker_hypergraph, primitive_set_matrix,
};
use compmatch::io::{market_to_json, parse_market};
use compmatch::oracle::{all_stable_matchings, exists_for_all_worker_prefs, SweepOptions, SweepSolver};
use compmatch::prefs::{decompose_by_components, decompose_by_sets, is_additive, is_complementary};
use compmatch::solver::{leontief_view, run_pipeline, Decompose, Strategy, TransformationKind};
use compmatch::techtree::{check_neighbour_condition, search_child_orders, Reordering};
use compmatch::{
    is_balanced, is_totally_balanced, is_totally_unimodular, solve as solve_market, BigFractional, Error,
    FirmId, Market, SolveOptions, TechnologyTree,
};
use serde_json::{json, Value};

use crate::report::{self, Report, Sections, Status};
use crate::{
    CheckArgs, DecomposeArg, DecomposeArgs, Failure, SolveArgs, StrategyArg, SweepArgs, SweepSolverArg,
    TreeArgs,
};

type Outcome = std::result::Result<Report, Failure>;

fn read(path: &Path) -> std::result::Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Read(path.to_path_buf(), e))
}

fn data<T>(path: &Path, r: compmatch::Result<T>) -> std::result::Result<T, Failure> {
    r.map_err(|e| Failure::Data(path.to_path_buf(), e))
}

fn load_market(path: &Path) -> std::result::Result<Market, Failure> {
    let text = read(path)?;
    data(path, parse_market(&text))
}

fn class_check(
    m: &Market,
    path: &Path,
    name: &str,
    test: fn(&Market, FirmId) -> compmatch::Result<bool>,
) -> std::result::Result<(Status, String, Value), Failure> {
    let mut failing = Vec::new();
    for f in m.firm_ids() {
        if !data(path, test(m, f))? {
            failing.push(m.firm_name(f).to_string());
        }
    }
    Ok(if failing.is_empty() {
        (Status::Pass, format!("{name}: PASS"), json!({"verdict": "PASS"}))
    } else {
        (
            Status::Fail,
            format!("{name}: FAIL, firms {}", failing.join(", ")),
            json!({"verdict": "FAIL", "firms": failing}),
        )
    })
}

pub fn check(a: &CheckArgs) -> Outcome {
    let path = a.path.as_path();
    let m = load_market(path)?;
    let none = !(a.balanced
        || a.primitive
        || a.tu
        || a.totally_balanced
        || a.odd_cycles
        || a.firm_worker
        || a.complementary
        || a.additive);
    let mut out = Sections::default();
    if a.complementary {
        let (s, t, j) = class_check(&m, path, "complementary", is_complementary)?;
        out.push("complementary", s, t, j);
    }
    if a.additive {
        let (s, t, j) = class_check(&m, path, "additive", is_additive)?;
        out.push("additive", s, t, j);
    }
    let sets = acceptable_set_matrix(&m);
    if a.balanced || none {
        let (s, t, j) = report::certificate("balanced", &sets, &is_balanced(&sets, a.cap));
        out.push("balanced", s, t, j);
    }
    if a.primitive {
        let pm = data(path, primitive_set_matrix(&m))?;
        let (s, t, j) = report::certificate("primitive balanced", &pm, &is_balanced(&pm, a.cap));
        out.push("primitive_balanced", s, t, j);
    }
    if a.tu {
        let (s, t, j) =
            report::certificate("totally unimodular", &sets, &is_totally_unimodular(&sets, a.cap));
        out.push("totally_unimodular", s, t, j);
    }
    if a.totally_balanced {
        let (s, t, j) = report::certificate("totally balanced", &sets, &is_totally_balanced(&sets, a.cap));
        out.push("totally_balanced", s, t, j);
    }
    if a.odd_cycles {
        let h = acceptable_set_hypergraph(&m);
        let (s, t, j) = report::cycle_certificate("odd cycles", &h, &check_odd_cycle_condition(&h));
        out.push("odd_cycles", s, t, j);
    }
    if a.firm_worker {
        let h = data(path, firm_worker_hypergraph(&m))?;
        let (s, t, j) =
            report::cycle_certificate("firm-worker hypergraph balanced", &h, &check_hypergraph_balanced(&h));
        out.push("firm_worker", s, t, j);
    }
    Ok(out.finish())
}

pub fn solve(a: &SolveArgs) -> Outcome {
    let path = a.path.as_path();
    let m = load_market(path)?;
    match a.strategy {
        StrategyArg::Direct => {
            let opts = SolveOptions {
                strategy: Strategy::Direct,
                decompose: match a.decompose {
                    DecomposeArg::Sets => Decompose::Sets,
                    DecomposeArg::Components => Decompose::Components,
                },
                fractional: None,
                cap: a.cap,
            };
            let r = data(path, solve_market(&m, &opts))?;
            let mut out = Sections::default();
            if let Some(d) = &r.decomposed {
                let note = if r.fell_back {
                    "decomposed market has no stable matching; searched the original"
                } else {
                    "found in the component decomposition and lifted"
                };
                out.note(
                    "decomposition",
                    format!("{} firms after decomposition; {note}", d.market.num_firms()),
                    json!({"firms": d.market.firms(), "fell_back": r.fell_back}),
                );
            }
            match &r.matching {
                Some(mu) => {
                    out.push("matching", Status::Pass, m.render_matching(mu), report::matching(&m, mu))
                }
                None => out.push("matching", Status::Fail, "NONE".into(), Value::Null),
            }
            out.note(
                "hypotheses",
                format!("existence guaranteed by hypotheses: {}", r.hypotheses.guarantees_existence()),
                json!({
                    "complementary": r.hypotheses.complementary,
                    "additive": r.hypotheses.additive,
                    "acceptable_balanced": r.hypotheses.acceptable_balanced,
                    "primitive_balanced": r.hypotheses.primitive_balanced,
                }),
            );
            Ok(out.finish())
        }
        StrategyArg::Pipeline => pipeline(path, &m, a),
    }
}

fn pipeline(path: &Path, m: &Market, a: &SolveArgs) -> Outcome {
    let Some(frac_path) = &a.fractional else {
        return Err(Failure::Data(
            path.to_path_buf(),
            Error::InvalidArgument("the pipeline strategy needs --fractional".into()),
        ));
    };
    let (_, d) = data(path, leontief_view(m))?;
    let lm = &d.market;
    let text = read(frac_path)?;
    let fm = data(frac_path, BigFractional::parse(&text, lm))?;
    let p = data(path, run_pipeline(m, &fm, a.cap))?;
    let mut out = Sections::default();
    out.note("input", format!("M:\n{}", fm.render(lm)), json!(fm.render(lm)));
    let (bs, bt, bj) = report::certificate("B balanced", &p.system.matrix, &p.balanced);
    out.note(
        "system",
        format!("B z = 1:\n{}{bt}", p.system.render(lm)),
        json!({
            "matrix": p.system.matrix.to_rows(),
            "rows": p.system.matrix.row_labels(),
            "legend": p.system.column_legend(lm),
            "rhs": p.system.rhs,
            "balanced": bj,
        }),
    );
    if bs != Status::Pass {
        out.note("warning", "B is not certified balanced".into(), json!(bs.label()));
    }
    let z: Vec<String> = p.z.iter().map(u8::to_string).collect();
    out.note("z", format!("z' = ({})", z.join(",")), json!(p.z));
    let mut steps = Vec::new();
    let mut step_text = String::new();
    for (i, s) in p.steps.iter().enumerate() {
        let kind = match s.kind {
            TransformationKind::ToZero => "to zero",
            TransformationKind::ToOne => "to one",
            TransformationKind::Null => "null",
        };
        let legend = &p.system.column_legend(lm)[column_index(&p.system, s.column)];
        step_text.push_str(&format!("({}) {kind}, {legend}\n{}\n", i + 1, s.result.render(lm)));
        steps.push(json!({"kind": kind, "column": legend, "result": s.result.render(lm)}));
    }
    out.note("steps", step_text, json!(steps));
    out.note("integral", format!("M':\n{}", p.integral.render(lm)), json!(p.integral.render(lm)));
    out.note(
        "decomposed_matching",
        lm.render_matching(&p.decomposed_matching),
        report::matching(lm, &p.decomposed_matching),
    );
    let status = if p.lifted_stable { Status::Pass } else { Status::Fail };
    out.push(
        "matching",
        status,
        format!("lifted:\n{}", p.original.render_matching(&p.lifted)),
        report::matching(&p.original, &p.lifted),
    );
    Ok(out.finish())
}

fn column_index(cs: &compmatch::solver::ConstraintSystem, c: compmatch::solver::Column) -> usize {
    cs.columns.iter().position(|x| *x == c).expect("step column is in the system")
}

pub fn tree(a: &TreeArgs) -> Outcome {
    let path = a.path.as_path();
    let text = read(path)?;
    let t = data(path, TechnologyTree::parse(&text))?;
    let mut out = Sections::default();
    if a.validate || !(a.matrix || a.permute) {
        validate(&t, &mut out);
    }
    if a.matrix {
        let wm = t.worker_set_matrix();
        let (s, text, j) = report::certificate("totally balanced", &wm, &is_totally_balanced(&wm, a.cap));
        out.push("matrix", s, format!("{}\n{text}", wm.render()), j);
    }
    if a.permute {
        let (s, text, j) = match search_child_orders(&t) {
            Reordering::Unchanged => (
                Status::Pass,
                "permute: PASS, the given order passes".to_string(),
                json!({"verdict": "PASS", "reordered": false}),
            ),
            Reordering::Found(r) => (
                Status::Pass,
                format!("permute: PASS, reordered tree:\n{}", r.to_outline()),
                json!({"verdict": "PASS", "reordered": true, "tree": r.to_outline()}),
            ),
            Reordering::Impossible(v) => (
                Status::Fail,
                format!("permute: FAIL, no ordering passes: {}", v.describe(&t)),
                json!({"verdict": "FAIL", "reason": "no ordering passes", "violation": v.describe(&t)}),
            ),
            Reordering::TooManyChildren { vertex, children } => {
                let name = &t.vertices()[vertex].name;
                (
                    Status::Inconclusive,
                    format!("permute: INCONCLUSIVE, {name} has {children} children"),
                    json!({"verdict": "INCONCLUSIVE", "vertex": name, "children": children}),
                )
            }
        };
        out.push("permute", s, text, j);
    }
    Ok(out.finish())
}

fn validate(t: &TechnologyTree, out: &mut Sections) {
    let engagement: Vec<Value> = t
        .workers()
        .iter()
        .map(|w| json!({"worker": w, "upgrades": t.engagement(w).into_iter().map(|e| t.edge_name(e)).collect::<Vec<_>>()}))
        .collect();
    let table = t.engagement_table();
    match check_neighbour_condition(t) {
        None => out.push(
            "neighbour",
            Status::Pass,
            format!("neighbour condition: PASS\n{table}"),
            json!({"verdict": "PASS", "engagement": engagement}),
        ),
        Some(v) => out.push(
            "neighbour",
            Status::Fail,
            format!("neighbour condition: FAIL on {}: {}\n{table}", t.workers()[v.worker()], v.describe(t)),
            json!({
                "verdict": "FAIL",
                "worker": t.workers()[v.worker()],
                "violation": v.describe(t),
                "engagement": engagement,
            }),
        ),
    }
}

pub fn stable(path: &Path) -> Outcome {
    let m = load_market(path)?;
    let all = data(path, all_stable_matchings(&m))?;
    let mut text = format!("{} stable matching(s)", all.len());
    for mu in &all {
        text.push_str("\n\n");
        text.push_str(&m.render_matching(mu));
    }
    let status = if all.is_empty() { Status::Fail } else { Status::Pass };
    let list: Vec<Value> = all.iter().map(|mu| report::matching(&m, mu)).collect();
    Ok(Report::new(status, text, json!({"status": status.label(), "count": all.len(), "matchings": list})))
}

pub fn sweep(a: &SweepArgs) -> Outcome {
    let path = a.path.as_path();
    let m = load_market(path)?;
    let opts = SweepOptions {
        truncations: !a.no_truncations,
        solver: match a.solver {
            SweepSolverArg::Direct => SweepSolver::Direct,
            SweepSolverArg::Components => SweepSolver::Components,
            SweepSolverArg::Oracle => SweepSolver::Oracle,
        },
        sample: a.sample.map(|n| (n, a.seed)),
        ..SweepOptions::default()
    };
    let r = data(path, exists_for_all_worker_prefs(&m, &opts))?;
    // a sampled pass is evidence, not a proof
    let status = match (r.passed(), r.exhaustive) {
        (false, _) => Status::Fail,
        (true, true) => Status::Pass,
        (true, false) => Status::Inconclusive,
    };
    let mut text = format!(
        "sweep: {}, {} of {} profiles checked{}",
        status.label(),
        r.checked,
        r.total_profiles,
        if r.exhaustive { "" } else { " (sampled)" }
    );
    if let Some(cx) = &r.counterexample {
        text.push_str("\nno stable matching for:");
        for (w, list) in cx {
            text.push_str(&format!(
                "\n  {w}: {}",
                if list.is_empty() { "ø".into() } else { list.join(" > ") }
            ));
        }
    }
    let mut j = serde_json::to_value(&r).expect("sweep report serializes");
    j["total_profiles"] = json!(r.total_profiles.to_string());
    j["status"] = json!(status.label());
    Ok(Report::new(status, text, j))
}

pub fn decompose(a: &DecomposeArgs) -> Outcome {
    let path = a.path.as_path();
    let m = load_market(path)?;
    let d = data(
        path,
        match a.by {
            DecomposeArg::Sets => decompose_by_sets(&m),
            DecomposeArg::Components => decompose_by_components(&m),
        },
    )?;
    let text = market_to_json(&d.market);
    let j: Value = serde_json::from_str(&text).expect("serialized market is JSON");
    Ok(Report::new(Status::Pass, text, j))
}

use compmatch::balance::is_balanced;
use compmatch::gen::{random_dense_market, random_market, random_neighbour_tree, MarketShape};
use compmatch::oracle::{all_stable_matchings, MAX_ORACLE_FIRMS};
use compmatch::prefs::{
    decompose_by_components, decompose_by_sets, is_additive, is_complementary, lift_matching,
    primitive_acceptable_sets,
};
use compmatch::solver::{build_constraint_system, extract_integral_solution, find_stable_matching};
use compmatch::techtree::{check_neighbour_condition, Vertex};
use compmatch::{
    corpus, is_totally_balanced, Employer, FirmId, Fractional, Market, Matching, Rational64, TechnologyTree,
    WorkerId, WorkerSet, DEFAULT_CAP,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn market(seed: u64) -> Market {
    random_market(&mut ChaCha8Rng::seed_from_u64(seed), MarketShape::default()).unwrap()
}

fn random_matching(m: &Market, rng: &mut ChaCha8Rng) -> Matching {
    let assignment = m
        .worker_ids()
        .map(|_| match rng.gen_range(0..=m.num_firms()) {
            0 => Employer::Null,
            k => Employer::Firm(FirmId(k - 1)),
        })
        .collect();
    Matching::from_assignment(assignment)
}

fn all_firms(m: &Market, test: fn(&Market, FirmId) -> compmatch::Result<bool>) -> bool {
    m.firm_ids().all(|f| test(m, f).unwrap())
}

/// A tree with random nesting, not necessarily satisfying the neighbour
/// condition.
fn random_tree(rng: &mut ChaCha8Rng, max_vertices: usize, nw: usize) -> TechnologyTree {
    let mut vertices =
        vec![Vertex { name: "v0".into(), workers: WorkerSet::EMPTY, parent: None, children: Vec::new() }];
    for _ in 1..rng.gen_range(2..=max_vertices) {
        let p = rng.gen_range(0..vertices.len());
        let base = vertices[p].workers;
        let free: Vec<usize> = (0..nw).filter(|w| !base.contains(*w)).collect();
        if free.is_empty() {
            continue;
        }
        let mut s = base;
        s.insert(free[rng.gen_range(0..free.len())]);
        for &w in &free {
            if rng.gen_bool(0.3) {
                s.insert(w);
            }
        }
        let id = vertices.len();
        vertices.push(Vertex { name: format!("v{id}"), workers: s, parent: Some(p), children: Vec::new() });
        vertices[p].children.push(id);
    }
    let workers = (1..=nw).map(|i| format!("w{i}")).collect();
    TechnologyTree::new(workers, vertices).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { max_global_rejects: 1_000_000, ..ProptestConfig::with_cases(200) })]

    #[test]
    fn matching_views_agree(seed in any::<u64>(), edits in prop::collection::vec((0usize..5, 0usize..5), 0..6)) {
        let m = market(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
        let mut mu = random_matching(&m, &mut rng);
        for (w, e) in edits {
            let w = WorkerId(w % m.num_workers());
            let e = if e % (m.num_firms() + 1) == 0 { Employer::Null } else { Employer::Firm(FirmId(e % (m.num_firms() + 1) - 1)) };
            mu.assign(w, e);
        }
        for w in m.worker_ids() {
            for f in m.firm_ids() {
                prop_assert_eq!(mu.employer(w) == Employer::Firm(f), mu.employees(f).contains(w.0));
            }
            prop_assert_eq!(mu.employer(w) == Employer::Null, mu.unmatched().contains(w.0));
        }
    }

    #[test]
    fn choice_is_the_best_subset(seed in any::<u64>()) {
        let m = market(seed);
        for f in m.firm_ids() {
            let pref = m.firm_pref(f);
            for s in m.all_workers().subsets() {
                let best = s.subsets().min_by_key(|t| pref.rank(*t)).unwrap();
                prop_assert_eq!(pref.choose(s), best);
            }
        }
    }

    #[test]
    fn block_search_matches_the_definition(seed in any::<u64>()) {
        let m = market(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 2);
        for _ in 0..8 {
            let mu = random_matching(&m, &mut rng);
            let report = m.find_block(&mu).unwrap();
            if !m.is_individually_rational(&mu) {
                prop_assert!(!report.ir_violations.is_empty());
                continue;
            }
            let brute = m.firm_ids().any(|f| m.all_workers().subsets().any(|s| m.blocks(&mu, f, s)));
            prop_assert_eq!(report.blocking.is_some(), brute);
            if let Some((f, s)) = report.blocking {
                prop_assert!(m.is_acceptable_set(f, s).unwrap());
                prop_assert!(m.blocks(&mu, f, s));
            }
            if m.is_stable(&mu).unwrap() {
                prop_assert!(m.is_individually_rational(&mu));
            }
        }
    }

    #[test]
    fn complementary_implies_additive(seed in any::<u64>()) {
        let m = market(seed);
        for f in m.firm_ids() {
            if is_complementary(&m, f).unwrap() {
                prop_assert!(is_additive(&m, f).unwrap());
            }
        }
    }

    #[test]
    fn solver_agrees_with_oracle(seed in any::<u64>(), dense in any::<bool>()) {
        let m = if dense {
            random_dense_market(&mut ChaCha8Rng::seed_from_u64(seed), MarketShape::default()).unwrap()
        } else {
            market(seed)
        };
        let all = all_stable_matchings(&m).unwrap();
        match find_stable_matching(&m).unwrap() {
            Some(mu) => prop_assert!(all.contains(&mu)),
            None => prop_assert!(all.is_empty()),
        }
    }

    #[test]
    fn sibling_exclusivity_and_lifting_by_sets(seed in any::<u64>()) {
        let m = market(seed);
        prop_assume!(all_firms(&m, is_additive));
        prop_assume!(m.firm_ids().all(|f| !m.firm_pref(f).is_empty()));
        let d = decompose_by_sets(&m).unwrap();
        prop_assume!(d.market.num_firms() <= MAX_ORACLE_FIRMS);
        for mu in all_stable_matchings(&d.market).unwrap() {
            for f in m.firm_ids() {
                let active = d.siblings(f).into_iter().filter(|g| !mu.employees(*g).is_empty()).count();
                prop_assert!(active <= 1);
            }
            prop_assert!(m.is_stable(&lift_matching(&mu, &d).unwrap()).unwrap());
        }
    }

    #[test]
    fn component_parts_restrict_choice(seed in any::<u64>()) {
        let m = market(seed);
        prop_assume!(all_firms(&m, is_complementary));
        let d = decompose_by_components(&m).unwrap();
        prop_assume!(d.market.num_firms() <= MAX_ORACLE_FIRMS);
        for (i, &(f, _)) in d.origin.iter().enumerate() {
            let part = d.market.firm_pref(FirmId(i));
            let support = part.potential_employees();
            let primitive = primitive_acceptable_sets(&m, f).unwrap();
            for a in part.acceptable_sets() {
                prop_assert!(primitive.contains(&a));
            }
            for s in m.all_workers().subsets() {
                prop_assert_eq!(part.choose(s), m.firm_pref(f).choose(s) & support);
            }
        }
        for mu in all_stable_matchings(&d.market).unwrap() {
            prop_assert!(m.is_stable(&lift_matching(&mu, &d).unwrap()).unwrap());
        }
    }

    #[test]
    fn extracted_vectors_satisfy_the_system(seed in any::<u64>()) {
        // half of one integral matching plus half of another is a valid
        // fractional matching whose system always has a 0/1 solution
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = market(seed);
        prop_assume!(m.firm_ids().all(|f| !m.firm_pref(f).is_empty()));
        let lm = decompose_by_sets(&m).unwrap().market;
        let pick = |rng: &mut ChaCha8Rng| {
            let mut used = WorkerSet::EMPTY;
            let mut sets = Vec::new();
            for f in lm.firm_ids() {
                let a = lm.firm_pref(f).chain()[0];
                if a.is_disjoint(used) && rng.gen_bool(0.5) {
                    used = used | a;
                    sets.push((f, a));
                }
            }
            Fractional::from_matching(&lm, &Matching::from_firm_sets(lm.num_workers(), &sets).unwrap()).unwrap()
        };
        let (a, b) = (pick(&mut rng), pick(&mut rng));
        let half = Rational64::new(1, 2);
        let fm = Fractional::new(
            a.levels().iter().zip(b.levels()).map(|(x, y)| (x + y) * half).collect(),
            a.nulls().iter().zip(b.nulls()).map(|(x, y)| (x + y) * half).collect(),
        );
        fm.validate(&lm).unwrap();
        let cs = build_constraint_system(&fm, &lm).unwrap();
        let point = cs.point_of(&fm);
        prop_assert!(cs.is_satisfied_by(&point));
        let z = extract_integral_solution(&cs).unwrap();
        let zq: Vec<Rational64> = z.iter().map(|&b| Rational64::from_integer(i64::from(b))).collect();
        prop_assert!(cs.is_satisfied_by(&zq));
    }

    #[test]
    fn neighbour_valid_trees_are_totally_balanced(seed in any::<u64>()) {
        let t = random_neighbour_tree(&mut ChaCha8Rng::seed_from_u64(seed), 10, 8);
        prop_assert!(check_neighbour_condition(&t).is_none());
        let wm = t.worker_set_matrix();
        prop_assert!(is_totally_balanced(&wm, DEFAULT_CAP).holds());
        prop_assert!(is_balanced(&wm, DEFAULT_CAP).holds());
    }

    #[test]
    fn precedence_nests_worker_sets(seed in any::<u64>()) {
        let t = random_tree(&mut ChaCha8Rng::seed_from_u64(seed), 10, 6);
        let vs = t.vertices();
        for v in 0..vs.len() {
            for u in 0..vs.len() {
                if t.precedes(v, u) {
                    prop_assert!(vs[v].workers.is_subset(vs[u].workers));
                }
            }
        }
    }
}

#[test]
fn trees_failing_the_neighbour_condition_are_only_recorded() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut failing, mut still_balanced) = (0, 0);
    for _ in 0..300 {
        let t = random_tree(&mut rng, 8, 5);
        if check_neighbour_condition(&t).is_some() {
            failing += 1;
            if is_totally_balanced(&t.worker_set_matrix(), DEFAULT_CAP).holds() {
                still_balanced += 1;
            }
        }
    }
    println!(
        "{failing} trees fail the neighbour condition; {still_balanced} of them are totally balanced anyway"
    );
    assert!(failing > 0);
}

#[test]
fn corpus_invariants() {
    for (name, m) in corpus::markets() {
        let all = all_stable_matchings(&m).unwrap();
        match find_stable_matching(&m).unwrap() {
            Some(mu) => assert!(all.contains(&mu), "{name}"),
            None => assert!(all.is_empty(), "{name}"),
        }
        for mu in &all {
            assert!(m.is_individually_rational(mu), "{name}");
        }
        if all_firms(&m, is_complementary) {
            let d = decompose_by_components(&m).unwrap();
            for mu in all_stable_matchings(&d.market).unwrap() {
                assert!(m.is_stable(&lift_matching(&mu, &d).unwrap()).unwrap(), "{name}");
            }
        }
        if all_firms(&m, is_additive) && m.firm_ids().all(|f| !m.firm_pref(f).is_empty()) {
            let d = decompose_by_sets(&m).unwrap();
            for mu in all_stable_matchings(&d.market).unwrap() {
                assert!(m.is_stable(&lift_matching(&mu, &d).unwrap()).unwrap(), "{name}");
            }
        }
    }
    for (name, t) in corpus::trees() {
        let vs = t.vertices();
        for v in 0..vs.len() {
            for u in 0..vs.len() {
                if t.precedes(v, u) {
                    assert!(vs[v].workers.is_subset(vs[u].workers), "{name}");
                }
            }
        }
    }
}

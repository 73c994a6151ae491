//! Random markets and technology trees for property tests.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::balance::{acceptable_set_matrix, is_balanced, DEFAULT_CAP};
use crate::bitset::WorkerSet;
use crate::error::Result;
use crate::model::{FirmId, FirmPreference, Market};
use crate::oracle::{profile_space, random_worker_prefs, relevant_firms};
use crate::prefs::is_complementary;
use crate::techtree::{check_neighbour_condition, TechnologyTree, Vertex};

#[derive(Clone, Copy, Debug)]
pub struct MarketShape {
    pub max_firms: usize,
    pub max_workers: usize,
    pub max_chain: usize,
    pub max_set: usize,
}

impl Default for MarketShape {
    fn default() -> Self {
        MarketShape { max_firms: 4, max_workers: 5, max_chain: 3, max_set: 3 }
    }
}

fn names(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

/// A chain of distinct nonempty sets over `n` workers.
pub fn random_chain<R: Rng>(rng: &mut R, n: usize, max_chain: usize, max_set: usize) -> Vec<WorkerSet> {
    let len = rng.gen_range(0..=max_chain);
    let mut chain: Vec<WorkerSet> = Vec::with_capacity(len);
    let mut workers: Vec<usize> = (0..n).collect();
    for _ in 0..len {
        workers.shuffle(rng);
        let size = rng.gen_range(1..=max_set.min(n).max(1));
        let s: WorkerSet = workers.iter().copied().take(size).collect();
        if !s.is_empty() && !chain.contains(&s) {
            chain.push(s);
        }
    }
    chain
}

/// Random firm chains (any preference class) and random worker lists.
pub fn random_market<R: Rng>(rng: &mut R, shape: MarketShape) -> Result<Market> {
    let nw = rng.gen_range(1..=shape.max_workers);
    let nf = rng.gen_range(1..=shape.max_firms);
    let chains = (0..nf)
        .map(|_| {
            FirmPreference::new(random_chain(rng, nw, shape.max_chain, shape.max_set)).expect("valid chain")
        })
        .collect();
    let m = Market::new(names("w", nw), names("f", nf), vec![Vec::new(); nw], chains)?;
    random_worker_prefs(&m, rng)
}

/// Markets dense in complementarities, where nonexistence is common: every
/// firm lists sets of two or more workers only, and every worker ranks
/// every firm with an acceptable set containing it, in random order.
pub fn random_dense_market<R: Rng>(rng: &mut R, shape: MarketShape) -> Result<Market> {
    let nw = rng.gen_range(2..=shape.max_workers.max(2));
    let nf = rng.gen_range(2..=shape.max_firms.max(2));
    let max_set = shape.max_set.clamp(2, nw);
    let mut workers: Vec<usize> = (0..nw).collect();
    let chains = (0..nf)
        .map(|_| {
            let mut chain: Vec<WorkerSet> = Vec::new();
            for _ in 0..rng.gen_range(1..=shape.max_chain.max(1)) {
                workers.shuffle(rng);
                let s: WorkerSet = workers.iter().copied().take(rng.gen_range(2..=max_set)).collect();
                if !chain.contains(&s) {
                    chain.push(s);
                }
            }
            FirmPreference::new(chain).expect("valid chain")
        })
        .collect();
    let mut m = Market::new(names("w", nw), names("f", nf), vec![Vec::new(); nw], chains)?;
    let prefs = m
        .worker_ids()
        .map(|w| {
            let mut firms = relevant_firms(&m, w);
            firms.shuffle(rng);
            firms
        })
        .collect();
    m = Market::new(m.workers().to_vec(), m.firms().to_vec(), prefs, m.firm_prefs().to_vec())?;
    Ok(m)
}

/// A firm profile in which every firm is complementary, the acceptable
/// sets form a balanced matrix, some set has two or more workers, and the
/// worker-preference space has at most `max_space` profiles. Worker lists
/// are empty.
pub fn random_complementary_balanced<R: Rng>(rng: &mut R, shape: MarketShape, max_space: u128) -> Market {
    loop {
        let nw = rng.gen_range(2..=shape.max_workers.max(2));
        let nf = rng.gen_range(1..=shape.max_firms);
        let chains: Vec<FirmPreference> = (0..nf)
            .map(|_| {
                FirmPreference::new(random_chain(rng, nw, shape.max_chain, shape.max_set))
                    .expect("valid chain")
            })
            .collect();
        if !chains.iter().flat_map(|c| c.acceptable_sets()).any(|s| s.len() >= 2) {
            continue;
        }
        let Ok(m) = Market::new(names("w", nw), names("f", nf), vec![Vec::new(); nw], chains) else {
            continue;
        };
        let complementary = (0..nf).all(|f| is_complementary(&m, FirmId(f)).unwrap_or(false));
        if !complementary || profile_space(&m, true) > max_space {
            continue;
        }
        if is_balanced(&acceptable_set_matrix(&m), DEFAULT_CAP).holds() {
            return m;
        }
    }
}

/// A random tree satisfying the neighbour condition by construction: each
/// worker joins upgrades out of a single vertex only, along a contiguous
/// run of its children.
pub fn random_neighbour_tree<R: Rng>(rng: &mut R, max_vertices: usize, max_workers: usize) -> TechnologyTree {
    let nw = rng.gen_range(1..=max_workers.max(1));
    let target = rng.gen_range(2..=max_vertices.max(2));
    let mut vertices =
        vec![Vertex { name: "v0".into(), workers: WorkerSet::EMPTY, parent: None, children: Vec::new() }];
    let mut engaged = vec![false; nw];
    let mut queue = std::collections::VecDeque::from([0usize]);
    while let Some(v) = queue.pop_front() {
        let room = target - vertices.len();
        let free: Vec<usize> = (0..nw).filter(|&w| !engaged[w]).collect();
        if room == 0 || free.is_empty() {
            continue;
        }
        let k = rng.gen_range(usize::from(v == 0)..=room.min(4));
        if k == 0 {
            continue;
        }
        let mut upgrades = vec![WorkerSet::EMPTY; k];
        for &w in &free {
            if rng.gen_bool(0.5) {
                let a = rng.gen_range(0..k);
                let b = rng.gen_range(a..k);
                for u in &mut upgrades[a..=b] {
                    u.insert(w);
                }
                engaged[w] = true;
            }
        }
        // children nobody joined get a fresh worker, or are dropped
        for u in upgrades.iter_mut().filter(|u| u.is_empty()) {
            if let Some(w) = (0..nw).find(|&w| !engaged[w]) {
                u.insert(w);
                engaged[w] = true;
            }
        }
        let base = vertices[v].workers;
        for u in upgrades.into_iter().filter(|u| !u.is_empty()) {
            let id = vertices.len();
            vertices.push(Vertex {
                name: format!("v{id}"),
                workers: base | u,
                parent: Some(v),
                children: Vec::new(),
            });
            vertices[v].children.push(id);
            queue.push_back(id);
        }
    }
    let t = TechnologyTree::new(names("w", nw), vertices).expect("constructed tree is valid");
    debug_assert!(check_neighbour_condition(&t).is_none());
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_trees_pass_the_neighbour_condition() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let t = random_neighbour_tree(&mut rng, 10, 8);
            assert!(t.vertices().len() <= 10);
            assert!(check_neighbour_condition(&t).is_none());
        }
    }

    #[test]
    fn generated_profiles_meet_their_contract() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let m = random_complementary_balanced(&mut rng, MarketShape::default(), 20_000);
            assert!(m.firm_ids().all(|f| is_complementary(&m, f).unwrap()));
            assert!(is_balanced(&acceptable_set_matrix(&m), DEFAULT_CAP).holds());
            assert!(profile_space(&m, true) <= 20_000);
        }
    }

    #[test]
    fn dense_markets_often_lack_stable_matchings() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut without = 0;
        for _ in 0..200 {
            let m = random_dense_market(&mut rng, MarketShape::default()).unwrap();
            assert!(m.firm_ids().all(|f| m.firm_pref(f).chain().iter().all(|s| s.len() >= 2)));
            without += usize::from(crate::oracle::all_stable_matchings(&m).unwrap().is_empty());
        }
        assert!(without > 0);
    }

    #[test]
    fn random_markets_are_within_shape() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let m = random_market(&mut rng, MarketShape::default()).unwrap();
            assert!(m.num_firms() <= 4 && m.num_workers() <= 5);
        }
    }
}

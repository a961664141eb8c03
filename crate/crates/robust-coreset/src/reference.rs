//! Exact and baseline solvers used as test oracles: brute force over
//! independent sets, offline greedy, and the unbuffered streaming baseline.

use crate::error::{Error, Result};
use crate::exchange;
use crate::instance::{ItemId, ItemSet};
use crate::matroid::PMatroid;
use crate::submodular::UtilityOracle;

/// Ground-set limit for [`brute_force_opt`].
pub const BRUTE_FORCE_GUARD: usize = 25;

/// Exact optimum over feasible subsets of `ground`, by depth-first
/// enumeration of independent sets in ascending-id order (so permutations are
/// never revisited and ties resolve to the lexicographically smallest set).
pub fn brute_force_opt(
    oracle: &UtilityOracle,
    pm: &PMatroid,
    ground: &ItemSet,
) -> Result<(ItemSet, f64)> {
    if ground.len() > BRUTE_FORCE_GUARD {
        return Err(Error::GuardExceeded {
            n: ground.len(),
            limit: BRUTE_FORCE_GUARD,
        });
    }
    let ids: Vec<ItemId> = ground.iter().copied().collect();
    let mut best = (ItemSet::new(), 0.0);
    let mut current = ItemSet::new();
    search(oracle, pm, &ids, 0, &mut current, &mut best)?;
    Ok(best)
}

fn search(
    oracle: &UtilityOracle,
    pm: &PMatroid,
    ids: &[ItemId],
    start: usize,
    current: &mut ItemSet,
    best: &mut (ItemSet, f64),
) -> Result<()> {
    for index in start..ids.len() {
        let id = ids[index];
        current.insert(id);
        if pm.feasible(current)? {
            let value = oracle.eval(current)?;
            // Strict improvement keeps the first (lexicographically smallest)
            // maximizer found by the ascending depth-first order.
            if value > best.1 {
                *best = (current.clone(), value);
            }
            search(oracle, pm, ids, index + 1, current, best)?;
        }
        current.remove(&id);
    }
    Ok(())
}

/// Offline greedy: repeatedly add the feasible item with the largest strictly
/// positive marginal gain (ties to the smallest id).
pub fn greedy(oracle: &UtilityOracle, pm: &PMatroid, ground: &ItemSet) -> Result<ItemSet> {
    let mut chosen = ItemSet::new();
    loop {
        let mut best: Option<(f64, ItemId)> = None;
        for &v in ground {
            if chosen.contains(&v) {
                continue;
            }
            let mut extended = chosen.clone();
            extended.insert(v);
            if !pm.feasible(&extended)? {
                continue;
            }
            let gain = oracle.marginal(v, &chosen)?;
            if gain > 0.0 && best.is_none_or(|(best_gain, _)| gain > best_gain) {
                best = Some((gain, v));
            }
        }
        match best {
            Some((_, v)) => {
                chosen.insert(v);
            }
            None => return Ok(chosen),
        }
    }
}

/// What the plain exchange stream is worth after deletions hit its solution:
/// `f(I \ D)`. The fragility comparator for the buffered variant.
pub fn nonrobust_baseline(
    oracle: &UtilityOracle,
    pm: &PMatroid,
    stream: &[ItemId],
    alpha: f64,
    deletions: &ItemSet,
) -> Result<f64> {
    let state = exchange::run(oracle, pm, stream, alpha)?;
    let survivors: ItemSet = state.solution().difference(deletions).copied().collect();
    oracle.eval(&survivors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{generate_synthetic, item_set, load_instance_str, GenConfig, GenKind};

    fn modular_fixture() -> (UtilityOracle, PMatroid, ItemSet) {
        let inst = load_instance_str(
            r#"{
                "items": [{"id": 0}, {"id": 1}, {"id": 2}, {"id": 3}],
                "function": {"kind": "modular", "values": {"0": 1, "1": 1, "2": 3, "3": 5}},
                "matroids": [{"kind": "uniform", "k": 2}]
            }"#,
        )
        .unwrap();
        let oracle = UtilityOracle::from_instance(&inst).unwrap();
        let pm = PMatroid::from_instance(&inst).unwrap();
        let ground = inst.ground_set();
        (oracle, pm, ground)
    }

    #[test]
    fn brute_force_finds_the_top_pair() {
        let (oracle, pm, ground) = modular_fixture();
        let (set, value) = brute_force_opt(&oracle, &pm, &ground).unwrap();
        assert_eq!(set, item_set([2, 3]));
        assert_eq!(value, 8.0);
    }

    #[test]
    fn brute_force_after_deletion() {
        let (oracle, pm, ground) = modular_fixture();
        let survivors: ItemSet = ground.difference(&item_set([2])).copied().collect();
        let (set, value) = brute_force_opt(&oracle, &pm, &survivors).unwrap();
        assert_eq!(value, 6.0);
        // Ties resolve to the lexicographically smallest maximizer.
        assert_eq!(set, item_set([0, 3]));
    }

    #[test]
    fn brute_force_on_empty_ground() {
        let (oracle, pm, _) = modular_fixture();
        let (set, value) = brute_force_opt(&oracle, &pm, &ItemSet::new()).unwrap();
        assert!(set.is_empty());
        assert_eq!(value, 0.0);
    }

    #[test]
    fn brute_force_matches_full_subset_enumeration() {
        // Independent route: score all 2^n subsets and keep the feasible max.
        let cfg = GenConfig::new(GenKind::CoverageRandomBipartite, 9, 3);
        for seed in 0..5 {
            let inst = generate_synthetic(&cfg, seed).unwrap();
            let oracle = UtilityOracle::from_instance(&inst).unwrap();
            let pm = PMatroid::from_instance(&inst).unwrap();
            let ids: Vec<ItemId> = inst.ground_set().into_iter().collect();

            let mut expected = 0.0_f64;
            for mask in 0u32..1 << ids.len() {
                let subset: ItemSet = (0..ids.len())
                    .filter(|bit| mask >> bit & 1 == 1)
                    .map(|bit| ids[bit])
                    .collect();
                if pm.feasible(&subset).unwrap() {
                    expected = expected.max(oracle.eval(&subset).unwrap());
                }
            }
            let (_, value) = brute_force_opt(&oracle, &pm, &inst.ground_set()).unwrap();
            assert_eq!(value, expected, "seed {seed}");
        }
    }

    #[test]
    fn brute_force_guard_trips() {
        let cfg = GenConfig::new(GenKind::ModularUniform, 26, 2);
        let inst = generate_synthetic(&cfg, 0).unwrap();
        let oracle = UtilityOracle::from_instance(&inst).unwrap();
        let pm = PMatroid::from_instance(&inst).unwrap();
        assert!(matches!(
            brute_force_opt(&oracle, &pm, &inst.ground_set()),
            Err(Error::GuardExceeded { n: 26, .. })
        ));
    }

    #[test]
    fn greedy_picks_by_descending_gain() {
        let (oracle, pm, ground) = modular_fixture();
        let chosen = greedy(&oracle, &pm, &ground).unwrap();
        assert_eq!(chosen, item_set([2, 3]));
        assert_eq!(oracle.eval(&chosen).unwrap(), 8.0);
    }

    #[test]
    fn greedy_skips_zero_gain_items() {
        // a covers {0,1}, b covers {1,2}, x covers {0}; k = 2.
        let inst = load_instance_str(
            r#"{
                "items": [{"id": 0}, {"id": 1}, {"id": 2}],
                "function": {
                    "kind": "coverage",
                    "universe_weights": [1, 1, 1],
                    "covers": {"0": [0, 1], "1": [1, 2], "2": [0]}
                },
                "matroids": [{"kind": "uniform", "k": 2}]
            }"#,
        )
        .unwrap();
        let oracle = UtilityOracle::from_instance(&inst).unwrap();
        let pm = PMatroid::from_instance(&inst).unwrap();
        let chosen = greedy(&oracle, &pm, &inst.ground_set()).unwrap();
        assert_eq!(chosen, item_set([0, 1]));
        assert_eq!(oracle.eval(&chosen).unwrap(), 3.0);
    }

    #[test]
    fn greedy_on_empty_ground() {
        let (oracle, pm, _) = modular_fixture();
        assert!(greedy(&oracle, &pm, &ItemSet::new()).unwrap().is_empty());
    }

    #[test]
    fn greedy_meets_the_p_plus_one_bound() {
        for (seed, partition) in [(1, None), (2, None), (3, Some((4, 1))), (4, Some((5, 2)))] {
            let mut cfg = GenConfig::new(GenKind::CoverageRandomBipartite, 12, 3);
            cfg.universe = 16;
            cfg.partition = partition;
            let inst = generate_synthetic(&cfg, seed).unwrap();
            let oracle = UtilityOracle::from_instance(&inst).unwrap();
            let pm = PMatroid::from_instance(&inst).unwrap();
            let ground = inst.ground_set();

            let (_, optimum) = brute_force_opt(&oracle, &pm, &ground).unwrap();
            let greedy_value = oracle
                .eval(&greedy(&oracle, &pm, &ground).unwrap())
                .unwrap();
            let p = pm.p() as f64;
            assert!(
                greedy_value >= optimum / (p + 1.0),
                "seed {seed}: greedy {greedy_value} < {optimum}/(p+1)"
            );
        }
    }

    #[test]
    fn optimum_is_monotone_under_deletions() {
        let cfg = GenConfig::new(GenKind::FacilityRandom, 10, 3);
        let inst = generate_synthetic(&cfg, 9).unwrap();
        let oracle = UtilityOracle::from_instance(&inst).unwrap();
        let pm = PMatroid::from_instance(&inst).unwrap();
        let ground = inst.ground_set();
        let (_, full) = brute_force_opt(&oracle, &pm, &ground).unwrap();
        let survivors: ItemSet = ground.iter().copied().skip(2).collect();
        let (_, reduced) = brute_force_opt(&oracle, &pm, &survivors).unwrap();
        assert!(reduced <= full);
    }

    #[test]
    fn baseline_collapses_when_its_solution_is_deleted() {
        let (oracle, pm, ground) = modular_fixture();
        let stream: Vec<ItemId> = ground.iter().copied().collect();
        // The exchange run ends at {c, e}; deleting exactly those leaves nothing.
        let value = nonrobust_baseline(&oracle, &pm, &stream, 1.0, &item_set([2, 3])).unwrap();
        assert_eq!(value, 0.0);
        let untouched = nonrobust_baseline(&oracle, &pm, &stream, 1.0, &ItemSet::new()).unwrap();
        assert_eq!(untouched, 8.0);
        let disjoint = nonrobust_baseline(&oracle, &pm, &stream, 1.0, &item_set([0, 1])).unwrap();
        assert_eq!(disjoint, 8.0);
    }
}

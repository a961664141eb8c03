//! Streaming solution maintenance via weight-threshold exchanges.
//!
//! One feasible solution `I` is kept at all times. Each arriving item gets a
//! frozen weight equal to its marginal gain against the current solution; it
//! enters `I` when that weight covers `(1 + alpha)` times the total weight of
//! the cheapest removals that restore feasibility. Items swapped out of `I`
//! accumulate in `K` and keep their frozen weights.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::instance::{ItemId, ItemSet};
use crate::matroid::PMatroid;
use crate::submodular::UtilityOracle;

/// Approximation constant for the exchange run: any feasible set's utility is
/// at most `c_alpha(alpha, p)` times the final solution weight.
pub fn c_alpha(alpha: f64, p: usize) -> f64 {
    assert!(alpha > 0.0, "alpha must be positive");
    assert!(p >= 1, "p must be at least 1");
    let p = p as f64;
    (p * (alpha + 1.0) - 1.0) * (alpha + 1.0) / alpha + 1.0 + 1.0 / alpha
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepDecision {
    Accepted { swapped_out: ItemSet },
    Rejected,
}

/// Mutable run state: current solution, frozen weights, and swap history.
#[derive(Debug, Clone)]
pub struct ExchangeState {
    alpha: f64,
    solution: ItemSet,
    weights: BTreeMap<ItemId, f64>,
    swapped: ItemSet,
    accept_log: Vec<(ItemId, f64)>,
}

impl ExchangeState {
    pub fn new(alpha: f64) -> Result<ExchangeState> {
        if !alpha.is_finite() || alpha <= 0.0 {
            return Err(Error::Parameter(format!(
                "alpha must be positive, got {alpha}"
            )));
        }
        Ok(ExchangeState {
            alpha,
            solution: ItemSet::new(),
            weights: BTreeMap::new(),
            swapped: ItemSet::new(),
            accept_log: Vec::new(),
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Current feasible solution `I`.
    pub fn solution(&self) -> &ItemSet {
        &self.solution
    }

    /// Items that were accepted at some point and later swapped out (`K`).
    pub fn swapped(&self) -> &ItemSet {
        &self.swapped
    }

    /// `(item, frozen weight)` pairs in acceptance order.
    pub fn accept_log(&self) -> &[(ItemId, f64)] {
        &self.accept_log
    }

    /// Frozen weight of an ever-accepted item.
    pub fn weight_of(&self, id: ItemId) -> Option<f64> {
        self.weights.get(&id).copied()
    }

    fn weight_sum(&self, set: &ItemSet) -> f64 {
        set.iter().map(|id| self.weights[id]).sum()
    }

    /// w(I): total frozen weight of the current solution.
    pub fn solution_weight(&self) -> f64 {
        self.weight_sum(&self.solution)
    }

    /// w(K): total frozen weight of everything swapped out.
    pub fn swapped_weight(&self) -> f64 {
        self.weight_sum(&self.swapped)
    }

    /// The run invariant `alpha * w(K) <= w(I)`.
    pub fn swap_bound_holds(&self) -> bool {
        self.alpha * self.swapped_weight() <= self.solution_weight()
    }

    /// For each member matroid that rejects `I + v`, pick the minimum-weight
    /// single removal that restores independence (ties to the smallest id).
    /// The union of those picks is returned; `I + v - Sw` is always feasible.
    pub fn exchange_candidates(&self, pm: &PMatroid, v: ItemId) -> Result<ItemSet> {
        if self.solution.contains(&v) {
            return Err(Error::DuplicateStreamItem(v));
        }
        let mut extended = self.solution.clone();
        extended.insert(v);

        let mut removals = ItemSet::new();
        for (index, matroid) in pm.members().iter().enumerate() {
            if matroid.is_independent(&extended)? {
                continue;
            }
            let mut best: Option<(f64, ItemId)> = None;
            for &u in &self.solution {
                let mut candidate = extended.clone();
                candidate.remove(&u);
                if matroid.is_independent(&candidate)? {
                    let weight = self.weights[&u];
                    // Strict `<` plus ascending iteration keeps the smallest id
                    // among minimum-weight candidates.
                    if best.is_none_or(|(best_weight, _)| weight < best_weight) {
                        best = Some((weight, u));
                    }
                }
            }
            match best {
                Some((_, u)) => {
                    removals.insert(u);
                }
                None => {
                    return Err(Error::ExchangeStructure {
                        item: v,
                        matroid_index: index,
                    })
                }
            }
        }
        Ok(removals)
    }

    /// Process one arrival: freeze its weight, compute the removal set, and
    /// swap it in when the weight threshold is met.
    pub fn step(
        &mut self,
        pm: &PMatroid,
        oracle: &UtilityOracle,
        v: ItemId,
    ) -> Result<StepDecision> {
        if self.solution.contains(&v) || self.swapped.contains(&v) {
            return Err(Error::DuplicateStreamItem(v));
        }
        let value = oracle.marginal(v, &self.solution)?;
        let removals = self.exchange_candidates(pm, v)?;
        if value >= (1.0 + self.alpha) * self.weight_sum(&removals) {
            self.accept(v, value, removals.clone());
            debug_assert!(self.swap_bound_holds());
            Ok(StepDecision::Accepted {
                swapped_out: removals,
            })
        } else {
            Ok(StepDecision::Rejected)
        }
    }

    /// Apply an accept decision whose threshold was already established
    /// (the buffered variant verifies it at filter time).
    pub(crate) fn accept(&mut self, v: ItemId, weight: f64, removals: ItemSet) {
        debug_assert!(weight >= (1.0 + self.alpha) * self.weight_sum(&removals));
        for u in removals {
            self.solution.remove(&u);
            self.swapped.insert(u);
        }
        self.solution.insert(v);
        self.weights.insert(v, weight);
        self.accept_log.push((v, weight));
    }
}

/// Fold the exchange step over a stream of distinct items. Deterministic.
pub fn run(
    oracle: &UtilityOracle,
    pm: &PMatroid,
    stream: &[ItemId],
    alpha: f64,
) -> Result<ExchangeState> {
    check_stream(pm, stream)?;
    let mut state = ExchangeState::new(alpha)?;
    for &v in stream {
        state.step(pm, oracle, v)?;
        debug_assert!(pm.feasible(state.solution())?);
    }
    Ok(state)
}

pub(crate) fn check_stream(pm: &PMatroid, stream: &[ItemId]) -> Result<()> {
    let mut seen = ItemSet::new();
    for &v in stream {
        if !pm.contains(v) {
            return Err(Error::UnknownItem(v));
        }
        if !seen.insert(v) {
            return Err(Error::DuplicateStreamItem(v));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{item_set, load_instance_str, Instance};
    use crate::matroid::Matroid;

    /// Modular values a:1, b:1, c:3, e:5 on ids 0,1,2,3 with a uniform k=2
    /// constraint; stream order a, b, c, e.
    fn fixture() -> (Instance, UtilityOracle, PMatroid) {
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
        (inst, oracle, pm)
    }

    #[test]
    fn c_alpha_matches_closed_form() {
        assert_eq!(c_alpha(1.0, 1), 4.0);
        assert_eq!(c_alpha(1.0, 2), 8.0);
        assert_eq!(c_alpha(2.0, 1), 4.5);
    }

    #[test]
    fn candidates_tie_break_to_smallest_id() {
        let (_, oracle, pm) = fixture();
        let mut state = ExchangeState::new(1.0).unwrap();
        state.step(&pm, &oracle, ItemId(0)).unwrap();
        state.step(&pm, &oracle, ItemId(1)).unwrap();
        // I = {a, b}, both weight 1; adding c must evict exactly one, the tie
        // resolving to the smaller id.
        let removals = state.exchange_candidates(&pm, ItemId(2)).unwrap();
        assert_eq!(removals, item_set([0]));
    }

    #[test]
    fn no_violation_means_no_removals() {
        let (_, oracle, pm) = fixture();
        let mut state = ExchangeState::new(1.0).unwrap();
        state.step(&pm, &oracle, ItemId(0)).unwrap();
        assert_eq!(
            state.exchange_candidates(&pm, ItemId(1)).unwrap(),
            ItemSet::new()
        );
    }

    #[test]
    fn candidates_cover_every_violated_member() {
        // Uniform k=2 intersected with partition caps 1,1. I = {a1, b1} with
        // weights 5 and 1; the arrival a2 shares a1's group. Both matroids are
        // violated: the uniform member evicts the cheap b1, the partition
        // member can only be fixed by a1.
        let ground = item_set([0, 1, 2]); // a1=0, b1=1, a2=2
        let pm = PMatroid::new(
            vec![
                Matroid::uniform(2),
                Matroid::partition(
                    vec![vec![ItemId(0), ItemId(2)], vec![ItemId(1)]],
                    vec![1, 1],
                )
                .unwrap(),
            ],
            ground,
        )
        .unwrap();
        let mut state = ExchangeState::new(1.0).unwrap();
        state.accept(ItemId(0), 5.0, ItemSet::new());
        state.accept(ItemId(1), 1.0, ItemSet::new());

        let removals = state.exchange_candidates(&pm, ItemId(2)).unwrap();
        assert_eq!(removals, item_set([0, 1]));
    }

    #[test]
    fn hand_traced_stream() {
        let (inst, oracle, pm) = fixture();
        let mut state = ExchangeState::new(1.0).unwrap();
        let stream = inst.stream();

        assert_eq!(
            state.step(&pm, &oracle, stream[0]).unwrap(),
            StepDecision::Accepted {
                swapped_out: ItemSet::new()
            }
        );
        assert_eq!(state.solution(), &item_set([0]));

        state.step(&pm, &oracle, stream[1]).unwrap();
        assert_eq!(state.solution(), &item_set([0, 1]));

        // c evicts a (3 >= 2 * 1).
        assert_eq!(
            state.step(&pm, &oracle, stream[2]).unwrap(),
            StepDecision::Accepted {
                swapped_out: item_set([0])
            }
        );
        assert_eq!(state.solution(), &item_set([1, 2]));
        assert_eq!(state.swapped(), &item_set([0]));

        // e evicts b (5 >= 2 * 1).
        state.step(&pm, &oracle, stream[3]).unwrap();
        assert_eq!(state.solution(), &item_set([2, 3]));
        assert_eq!(state.swapped(), &item_set([0, 1]));
        assert_eq!(state.solution_weight(), 8.0);
    }

    #[test]
    fn full_run_matches_the_trace() {
        let (inst, oracle, pm) = fixture();
        let state = run(&oracle, &pm, &inst.stream(), 1.0).unwrap();
        assert_eq!(state.solution(), &item_set([2, 3]));
        assert_eq!(state.weight_of(ItemId(2)), Some(3.0));
        assert_eq!(state.weight_of(ItemId(3)), Some(5.0));
        assert_eq!(
            state.accept_log(),
            &[
                (ItemId(0), 1.0),
                (ItemId(1), 1.0),
                (ItemId(2), 3.0),
                (ItemId(3), 5.0)
            ]
        );
        assert!(state.swap_bound_holds());
    }

    #[test]
    fn empty_stream_yields_empty_solution() {
        let (_, oracle, pm) = fixture();
        let state = run(&oracle, &pm, &[], 1.0).unwrap();
        assert!(state.solution().is_empty());
        assert!(state.accept_log().is_empty());
    }

    #[test]
    fn zero_gain_item_is_accepted_on_the_boundary() {
        // A single item of value 0: the comparison is 0 >= 0, so it enters.
        let inst = load_instance_str(
            r#"{
                "items": [{"id": 0}],
                "function": {"kind": "modular", "values": {"0": 0}},
                "matroids": [{"kind": "uniform", "k": 2}]
            }"#,
        )
        .unwrap();
        let oracle = UtilityOracle::from_instance(&inst).unwrap();
        let pm = PMatroid::from_instance(&inst).unwrap();
        let state = run(&oracle, &pm, &inst.stream(), 1.0).unwrap();
        assert_eq!(state.solution(), &item_set([0]));
        assert_eq!(state.weight_of(ItemId(0)), Some(0.0));
    }

    #[test]
    fn duplicate_stream_items_are_rejected() {
        let (_, oracle, pm) = fixture();
        let err = run(&oracle, &pm, &[ItemId(0), ItemId(0)], 1.0).unwrap_err();
        assert!(matches!(err, Error::DuplicateStreamItem(ItemId(0))));
    }

    #[test]
    fn step_consumes_two_oracle_queries() {
        let (_, oracle, pm) = fixture();
        let mut state = ExchangeState::new(1.0).unwrap();
        state.step(&pm, &oracle, ItemId(2)).unwrap();
        assert_eq!(oracle.query_count(), 2);
    }
}

//! Monotone, normalized submodular utility oracles with query accounting.
//!
//! Query convention: one `eval` costs 1 query, one `marginal` costs 2 (its
//! definitional cost), regardless of any internal shortcut. This keeps
//! measured query counts comparable across implementations.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::instance::{FunctionSpec, Instance, ItemId, ItemSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleKind {
    Modular,
    Coverage,
    Facility,
}

#[derive(Debug)]
enum Payload {
    Modular {
        values: Vec<f64>,
    },
    Coverage {
        universe_weights: Vec<f64>,
        covers: Vec<Vec<usize>>,
    },
    Facility {
        clients: usize,
        weights: Vec<Vec<f64>>,
    },
}

/// Set-function evaluator over an instance's ground set.
///
/// The payload is immutable and shared; the query counter is per-handle.
/// Cloning yields a handle with a fresh counter, which is how concurrent
/// trials keep their counts exact.
#[derive(Debug)]
pub struct UtilityOracle {
    index: Arc<HashMap<ItemId, usize>>,
    payload: Arc<Payload>,
    queries: AtomicU64,
}

impl Clone for UtilityOracle {
    fn clone(&self) -> Self {
        UtilityOracle {
            index: Arc::clone(&self.index),
            payload: Arc::clone(&self.payload),
            queries: AtomicU64::new(0),
        }
    }
}

impl UtilityOracle {
    /// Build the evaluator for a validated instance.
    pub fn from_instance(inst: &Instance) -> Result<UtilityOracle> {
        let mut index = HashMap::with_capacity(inst.items.len());
        for item in &inst.items {
            if index.insert(item.id, item.payload_index).is_some() {
                return Err(Error::DuplicateStreamItem(item.id));
            }
        }
        let lookup = |id: ItemId| index.get(&id).copied().ok_or(Error::UnknownItem(id));

        let payload = match &inst.function {
            FunctionSpec::Modular { values } => {
                let mut table = vec![0.0; inst.items.len()];
                for (&id, &value) in values {
                    table[lookup(id)?] = value as f64;
                }
                for item in &inst.items {
                    if !values.contains_key(&item.id) {
                        return Err(Error::MissingPayload(item.id));
                    }
                }
                Payload::Modular { values: table }
            }
            FunctionSpec::Coverage {
                universe_weights,
                covers,
            } => {
                let mut table = vec![Vec::new(); inst.items.len()];
                for (&id, indices) in covers {
                    let slot = lookup(id)?;
                    if indices.iter().any(|&i| i >= universe_weights.len()) {
                        return Err(Error::Invariant(format!(
                            "cover list for item {id} exceeds the universe"
                        )));
                    }
                    table[slot] = indices.clone();
                }
                Payload::Coverage {
                    universe_weights: universe_weights.iter().map(|&w| w as f64).collect(),
                    covers: table,
                }
            }
            FunctionSpec::Facility { clients, weights } => {
                let mut table = vec![Vec::new(); inst.items.len()];
                for (&id, row) in weights {
                    table[lookup(id)?] = row.iter().map(|&w| w as f64).collect();
                }
                for item in &inst.items {
                    if table[item.payload_index].len() != *clients {
                        return Err(Error::MissingPayload(item.id));
                    }
                }
                Payload::Facility {
                    clients: *clients,
                    weights: table,
                }
            }
        };

        Ok(UtilityOracle {
            index: Arc::new(index),
            payload: Arc::new(payload),
            queries: AtomicU64::new(0),
        })
    }

    pub fn kind(&self) -> OracleKind {
        match *self.payload {
            Payload::Modular { .. } => OracleKind::Modular,
            Payload::Coverage { .. } => OracleKind::Coverage,
            Payload::Facility { .. } => OracleKind::Facility,
        }
    }

    /// f(S). Counts one query.
    pub fn eval(&self, set: &ItemSet) -> Result<f64> {
        self.queries.fetch_add(1, Ordering::Relaxed);
        self.eval_raw(set)
    }

    /// f(S + v) - f(S). Counts two queries; exact zero when `v` is in `S`.
    pub fn marginal(&self, v: ItemId, set: &ItemSet) -> Result<f64> {
        self.queries.fetch_add(2, Ordering::Relaxed);
        if set.contains(&v) {
            self.slot(v)?;
            return Ok(0.0);
        }
        let mut extended = set.clone();
        extended.insert(v);
        Ok(self.eval_raw(&extended)? - self.eval_raw(set)?)
    }

    /// Number of queries issued through this handle.
    pub fn query_count(&self) -> u64 {
        self.queries.load(Ordering::Relaxed)
    }

    fn slot(&self, id: ItemId) -> Result<usize> {
        self.index.get(&id).copied().ok_or(Error::UnknownItem(id))
    }

    fn eval_raw(&self, set: &ItemSet) -> Result<f64> {
        match &*self.payload {
            Payload::Modular { values } => {
                let mut total = 0.0;
                for &id in set {
                    total += values[self.slot(id)?];
                }
                Ok(total)
            }
            Payload::Coverage {
                universe_weights,
                covers,
            } => {
                let mut covered = vec![false; universe_weights.len()];
                for &id in set {
                    for &element in &covers[self.slot(id)?] {
                        covered[element] = true;
                    }
                }
                Ok(covered
                    .iter()
                    .zip(universe_weights)
                    .filter(|(&hit, _)| hit)
                    .map(|(_, &w)| w)
                    .sum())
            }
            Payload::Facility { clients, weights } => {
                let mut best = vec![0.0_f64; *clients];
                for &id in set {
                    for (slot_best, &w) in best.iter_mut().zip(&weights[self.slot(id)?]) {
                        if w > *slot_best {
                            *slot_best = w;
                        }
                    }
                }
                Ok(best.iter().sum())
            }
        }
    }
}

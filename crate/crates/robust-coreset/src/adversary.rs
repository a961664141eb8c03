//! Static deletion-set constructors. Every model is a pure function of
//! (instance, d, adversary seed) — never of the algorithm's random bits, so
//! deletions are effectively fixed before any run starts.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::instance::{Instance, ItemId, ItemSet};
use crate::matroid::PMatroid;
use crate::reference;
use crate::robust::DeletionSet;
use crate::submodular::UtilityOracle;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AdversaryModel {
    /// Delete exactly these ids.
    Fixed(Vec<ItemId>),
    /// Delete `d` items chosen uniformly by a dedicated adversary seed.
    Random { seed: u64 },
    /// Delete the `d` items with the highest singleton utility
    /// (ties to the smallest id).
    TopSingletons,
    /// Delete the offline greedy solution, padded with top singletons when
    /// greedy picks fewer than `d` items.
    GreedyAttack,
}

impl AdversaryModel {
    /// Parse the CLI syntax `fixed:<ids>|random|top|greedy`.
    pub fn parse(text: &str, seed: u64) -> Result<AdversaryModel> {
        if let Some(list) = text.strip_prefix("fixed:") {
            let ids = list
                .split(',')
                .filter(|part| !part.is_empty())
                .map(|part| {
                    part.trim()
                        .parse::<u32>()
                        .map(ItemId)
                        .map_err(|_| Error::Parameter(format!("bad item id `{part}`")))
                })
                .collect::<Result<Vec<_>>>()?;
            return Ok(AdversaryModel::Fixed(ids));
        }
        match text {
            "random" => Ok(AdversaryModel::Random { seed }),
            "top" | "top-singletons" => Ok(AdversaryModel::TopSingletons),
            "greedy" | "greedy-attack" => Ok(AdversaryModel::GreedyAttack),
            other => Err(Error::Parameter(format!("unknown adversary `{other}`"))),
        }
    }
}

impl fmt::Display for AdversaryModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AdversaryModel::Fixed(ids) => {
                write!(f, "fixed:")?;
                for (index, id) in ids.iter().enumerate() {
                    if index > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{id}")?;
                }
                Ok(())
            }
            AdversaryModel::Random { seed } => write!(f, "random:{seed}"),
            AdversaryModel::TopSingletons => write!(f, "top"),
            AdversaryModel::GreedyAttack => write!(f, "greedy"),
        }
    }
}

/// Build the deletion set for a model. Deterministic given
/// `(model, instance, d)`; at most `d` items.
pub fn make_deletion_set(
    model: &AdversaryModel,
    inst: &Instance,
    oracle: &UtilityOracle,
    pm: &PMatroid,
    d: usize,
) -> Result<DeletionSet> {
    let ground = inst.ground_set();
    let ids = match model {
        AdversaryModel::Fixed(ids) => {
            for id in ids {
                if !ground.contains(id) {
                    return Err(Error::UnknownItem(*id));
                }
            }
            ids.iter().copied().collect::<ItemSet>()
        }
        AdversaryModel::Random { seed } => {
            if d > ground.len() {
                return Err(Error::Parameter(format!(
                    "cannot delete {d} items out of {}",
                    ground.len()
                )));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let pool: Vec<ItemId> = ground.iter().copied().collect();
            rand::seq::index::sample(&mut rng, pool.len(), d)
                .into_iter()
                .map(|index| pool[index])
                .collect()
        }
        AdversaryModel::TopSingletons => {
            if d > ground.len() {
                return Err(Error::Parameter(format!(
                    "cannot delete {d} items out of {}",
                    ground.len()
                )));
            }
            top_singletons(oracle, &ground, d)?.into_iter().collect()
        }
        AdversaryModel::GreedyAttack => {
            if d > ground.len() {
                return Err(Error::Parameter(format!(
                    "cannot delete {d} items out of {}",
                    ground.len()
                )));
            }
            let mut picked: Vec<ItemId> = reference::greedy(oracle, pm, &ground)?
                .into_iter()
                .collect();
            picked.truncate(d);
            if picked.len() < d {
                let already: ItemSet = picked.iter().copied().collect();
                for id in top_singletons(oracle, &ground, ground.len())? {
                    if picked.len() == d {
                        break;
                    }
                    if !already.contains(&id) {
                        picked.push(id);
                    }
                }
            }
            picked.into_iter().collect()
        }
    };
    DeletionSet::new(ids, d)
}

/// Ids ranked by singleton utility, descending, ties to the smallest id.
fn top_singletons(oracle: &UtilityOracle, ground: &ItemSet, take: usize) -> Result<Vec<ItemId>> {
    let mut scored = Vec::with_capacity(ground.len());
    for &id in ground {
        let mut singleton = ItemSet::new();
        singleton.insert(id);
        scored.push((oracle.eval(&singleton)?, id));
    }
    // Descending by value; BTreeSet iteration already gave ascending ids, and
    // the stable sort preserves that order among equal values.
    scored.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    Ok(scored.into_iter().take(take).map(|(_, id)| id).collect())
}

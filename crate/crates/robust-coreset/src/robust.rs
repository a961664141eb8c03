//! Deletion-robust extension of the exchange stream: a randomized buffer sits
//! between the stream and the exchange step, and a rebuild pass recovers a
//! solution after deletions.
//!
//! Each arrival is appended to a buffer which is then re-filtered: an entry
//! survives only while its current marginal gain both stays strictly positive
//! and still meets the exchange acceptance threshold. Once the buffer is at
//! capacity `B = ceil(d / eps)`, one entry is drawn with probability
//! proportional to the inverse of its marginal gain and swapped into the
//! solution unconditionally (the filter already established the threshold).
//! The coreset kept against up to `d` deletions is `I ∪ C`, never larger than
//! `rank + B`.

use std::collections::VecDeque;
use std::io::{BufRead, Write};

use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exchange::{check_stream, ExchangeState};
use crate::instance::{ItemId, ItemSet};
use crate::matroid::PMatroid;
use crate::submodular::UtilityOracle;

/// Parameters of a buffered run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobustParams {
    pub alpha: f64,
    pub eps: f64,
    /// Deletion budget `d` the coreset must survive.
    pub deletions: usize,
}

impl RobustParams {
    pub fn new(alpha: f64, eps: f64, deletions: usize) -> Result<RobustParams> {
        if !alpha.is_finite() || alpha <= 0.0 {
            return Err(Error::Parameter(format!(
                "alpha must be positive, got {alpha}"
            )));
        }
        if !eps.is_finite() || eps <= 0.0 || eps >= 1.0 {
            return Err(Error::Parameter(format!(
                "eps must lie in (0, 1), got {eps}"
            )));
        }
        Ok(RobustParams {
            alpha,
            eps,
            deletions,
        })
    }

    /// Buffer capacity `B = ceil(d / eps)`.
    pub fn buffer_capacity(&self) -> usize {
        (self.deletions as f64 / self.eps).ceil() as usize
    }
}

/// Insertion-ordered candidate set with cached marginal gains.
#[derive(Debug, Clone, Default)]
pub struct Buffer {
    entries: Vec<(ItemId, f64)>,
    capacity: usize,
}

impl Buffer {
    pub fn new(capacity: usize) -> Buffer {
        Buffer {
            entries: Vec::new(),
            capacity,
        }
    }

    /// Test-and-audit constructor with explicit cached marginals.
    pub fn with_entries(capacity: usize, entries: Vec<(ItemId, f64)>) -> Buffer {
        Buffer { entries, capacity }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entry ids in insertion order.
    pub fn items(&self) -> impl Iterator<Item = ItemId> + '_ {
        self.entries.iter().map(|&(id, _)| id)
    }

    /// `(id, cached marginal)` pairs in insertion order.
    pub fn entries(&self) -> &[(ItemId, f64)] {
        &self.entries
    }

    pub fn cached_marginal(&self, id: ItemId) -> Option<f64> {
        self.entries
            .iter()
            .find(|&&(entry, _)| entry == id)
            .map(|&(_, m)| m)
    }

    fn push(&mut self, id: ItemId) {
        self.entries.push((id, f64::NAN));
    }

    fn remove(&mut self, id: ItemId) {
        self.entries.retain(|&(entry, _)| entry != id);
    }
}

/// Where sampling randomness comes from: a seeded generator for real runs, or
/// an injected id sequence for trace tests and audit replay.
#[derive(Debug, Clone)]
pub enum DrawSource {
    Seeded(Box<ChaCha8Rng>),
    Forced(VecDeque<ItemId>),
}

impl DrawSource {
    pub fn seeded(seed: u64) -> DrawSource {
        DrawSource::Seeded(Box::new(ChaCha8Rng::seed_from_u64(seed)))
    }

    pub fn forced<I: IntoIterator<Item = ItemId>>(ids: I) -> DrawSource {
        DrawSource::Forced(ids.into_iter().collect())
    }

    /// Replay the chosen ids of a recorded draw log.
    pub fn replay(log: &[DrawRecord]) -> DrawSource {
        DrawSource::forced(log.iter().map(|record| record.chosen))
    }
}

/// One audited draw: the candidate snapshot (ids with cached marginals, in
/// buffer order), the chosen id, and its selection probability.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DrawRecord {
    pub candidates: Vec<(ItemId, f64)>,
    pub chosen: ItemId,
    pub probability: f64,
}

/// Serialize a draw log as JSON lines for audit and replay.
pub fn write_draw_trace<W: Write>(mut writer: W, log: &[DrawRecord]) -> Result<()> {
    for record in log {
        serde_json::to_writer(&mut writer, record)?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_draw_trace<R: BufRead>(reader: R) -> Result<Vec<DrawRecord>> {
    let mut log = Vec::new();
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        log.push(serde_json::from_str(&line)?);
    }
    Ok(log)
}

/// Result of one buffered streaming pass: exchange state, surviving buffer,
/// and the audited draw log. The coreset is `solution ∪ buffer`.
#[derive(Debug, Clone)]
pub struct RobustOutcome {
    state: ExchangeState,
    buffer: Buffer,
    draw_log: Vec<DrawRecord>,
    params: RobustParams,
}

/// Coreset contents with the size bound they were checked against.
#[derive(Debug, Clone, PartialEq)]
pub struct CoresetReport {
    pub items: ItemSet,
    pub size: usize,
    pub bound: usize,
}

impl RobustOutcome {
    pub fn new(params: RobustParams) -> Result<RobustOutcome> {
        Ok(RobustOutcome {
            state: ExchangeState::new(params.alpha)?,
            buffer: Buffer::new(params.buffer_capacity()),
            draw_log: Vec::new(),
            params,
        })
    }

    pub fn state(&self) -> &ExchangeState {
        &self.state
    }

    pub fn buffer(&self) -> &Buffer {
        &self.buffer
    }

    pub fn draw_log(&self) -> &[DrawRecord] {
        &self.draw_log
    }

    pub fn params(&self) -> RobustParams {
        self.params
    }

    /// `I ∪ C` without the size check.
    pub fn coreset_items(&self) -> ItemSet {
        let mut items = self.state.solution().clone();
        items.extend(self.buffer.items());
        items
    }

    /// `I ∪ C`, asserting the size bound `rank + B`.
    pub fn coreset(&self, pm: &PMatroid) -> Result<CoresetReport> {
        self.coreset_with_rank(pm.rank_bound()?)
    }

    /// Same as [`coreset`](Self::coreset) with a precomputed rank bound.
    pub fn coreset_with_rank(&self, rank: usize) -> Result<CoresetReport> {
        let items = self.coreset_items();
        let size = items.len();
        let bound = rank + self.buffer.capacity();
        if size > bound {
            return Err(Error::CoresetSize { size, bound });
        }
        Ok(CoresetReport { items, size, bound })
    }

    /// Process one arrival: append, re-filter the buffer, and when the buffer
    /// has reached capacity draw one entry into the solution. At most one
    /// draw happens per arrival.
    pub fn ingest(
        &mut self,
        pm: &PMatroid,
        oracle: &UtilityOracle,
        v: ItemId,
        source: &mut DrawSource,
    ) -> Result<()> {
        self.buffer.push(v);
        filter_buffer(&self.state, pm, oracle, &mut self.buffer)?;
        if self.buffer.len() >= self.buffer.capacity() && !self.buffer.is_empty() {
            let candidates = self.buffer.entries().to_vec();
            let draw = sample_buffer(&self.buffer, source)?;
            self.draw_log.push(DrawRecord {
                candidates,
                chosen: draw.chosen,
                probability: draw.probability,
            });
            // The filter already verified the acceptance threshold against
            // the current solution, so the swap is unconditional.
            let weight = self
                .buffer
                .cached_marginal(draw.chosen)
                .ok_or(Error::ForcedDrawMismatch(draw.chosen))?;
            let removals = self.state.exchange_candidates(pm, draw.chosen)?;
            self.state.accept(draw.chosen, weight, removals);
            self.buffer.remove(draw.chosen);
        }
        debug_assert!(self.buffer.len() <= self.buffer.capacity());
        Ok(())
    }
}

/// Re-filter the buffer against the current solution: keep exactly the
/// entries whose marginal gain is strictly positive and still meets the
/// exchange acceptance threshold; refresh cached marginals for survivors.
/// Costs two oracle queries per scanned entry.
pub fn filter_buffer(
    state: &ExchangeState,
    pm: &PMatroid,
    oracle: &UtilityOracle,
    buffer: &mut Buffer,
) -> Result<()> {
    let mut kept = Vec::with_capacity(buffer.entries.len());
    for &(id, _) in &buffer.entries {
        let gain = oracle.marginal(id, state.solution())?;
        if gain <= 0.0 {
            continue; // zero-gain entries cannot carry a sampling weight
        }
        let removals = state.exchange_candidates(pm, id)?;
        let threshold: f64 = (1.0 + state.alpha())
            * removals
                .iter()
                .map(|u| state.weight_of(*u).unwrap())
                .sum::<f64>();
        if gain >= threshold {
            kept.push((id, gain));
        }
    }
    buffer.entries = kept;
    Ok(())
}

/// A sampled buffer entry and the probability it was drawn with.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Draw {
    pub chosen: ItemId,
    pub probability: f64,
}

/// Draw one entry with probability proportional to the inverse of its cached
/// marginal: `P(v) = (1 / m_v) / z` with `z = sum_u 1 / m_u`.
pub fn sample_buffer(buffer: &Buffer, source: &mut DrawSource) -> Result<Draw> {
    if buffer.is_empty() {
        return Err(Error::EmptyBuffer);
    }
    let mut weights = Vec::with_capacity(buffer.len());
    for &(id, marginal) in buffer.entries() {
        if marginal.is_nan() || marginal <= 0.0 {
            return Err(Error::NonPositiveMarginal(id));
        }
        weights.push(1.0 / marginal);
    }
    let z: f64 = weights.iter().sum();

    let index = match source {
        DrawSource::Seeded(rng) => {
            let dist = rand::distr::weighted::WeightedIndex::new(&weights)
                .map_err(|e| Error::Invariant(format!("weighted sampling setup failed: {e}")))?;
            dist.sample(rng)
        }
        DrawSource::Forced(queue) => {
            let wanted = queue.pop_front().ok_or(Error::ForcedDrawsExhausted)?;
            buffer
                .entries()
                .iter()
                .position(|&(id, _)| id == wanted)
                .ok_or(Error::ForcedDrawMismatch(wanted))?
        }
    };
    Ok(Draw {
        chosen: buffer.entries()[index].0,
        probability: weights[index] / z,
    })
}

/// Buffered streaming pass with a seeded draw source.
pub fn run(
    oracle: &UtilityOracle,
    pm: &PMatroid,
    stream: &[ItemId],
    params: RobustParams,
    seed: u64,
) -> Result<RobustOutcome> {
    run_with_source(oracle, pm, stream, params, &mut DrawSource::seeded(seed))
}

/// Buffered streaming pass with an explicit draw source (seeded, forced, or
/// replayed from an audit trace).
pub fn run_with_source(
    oracle: &UtilityOracle,
    pm: &PMatroid,
    stream: &[ItemId],
    params: RobustParams,
    source: &mut DrawSource,
) -> Result<RobustOutcome> {
    check_stream(pm, stream)?;
    let mut outcome = RobustOutcome::new(params)?;
    for &v in stream {
        outcome.ingest(pm, oracle, v, source)?;
    }
    Ok(outcome)
}

/// Deletions the coreset must absorb; at most the budget it was built for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeletionSet {
    ids: ItemSet,
}

impl DeletionSet {
    pub fn new(ids: ItemSet, budget: usize) -> Result<DeletionSet> {
        if ids.len() > budget {
            return Err(Error::DeletionBudgetExceeded {
                got: ids.len(),
                budget,
            });
        }
        Ok(DeletionSet { ids })
    }

    pub fn ids(&self) -> &ItemSet {
        &self.ids
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn contains(&self, id: ItemId) -> bool {
        self.ids.contains(&id)
    }
}

/// Post-rebuild result. `state.solution()` is the rebuilt solution before the
/// deleted items are dropped; `final_solution` is what actually survives.
#[derive(Debug, Clone)]
pub struct RebuildOutcome {
    pub state: ExchangeState,
    pub final_solution: ItemSet,
    pub value: f64,
}

/// Continue the exchange over the surviving buffer entries (insertion order),
/// then drop the deleted items from the resulting solution.
pub fn rebuild_after_deletion(
    outcome: &RobustOutcome,
    pm: &PMatroid,
    oracle: &UtilityOracle,
    deletions: &DeletionSet,
) -> Result<RebuildOutcome> {
    if deletions.len() > outcome.params.deletions {
        return Err(Error::DeletionBudgetExceeded {
            got: deletions.len(),
            budget: outcome.params.deletions,
        });
    }
    let mut state = outcome.state.clone();
    let survivors: Vec<ItemId> = outcome
        .buffer
        .items()
        .filter(|&id| !deletions.contains(id))
        .collect();
    for v in survivors {
        state.step(pm, oracle, v)?;
    }
    let final_solution: ItemSet = state
        .solution()
        .difference(deletions.ids())
        .copied()
        .collect();
    let value = oracle.eval(&final_solution)?;
    debug_assert!(pm.feasible(&final_solution)?);
    Ok(RebuildOutcome {
        state,
        final_solution,
        value,
    })
}

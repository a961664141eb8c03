//! Ground-set data model: instance files, validation, and seeded synthetic generators.
//!
//! An instance is a single JSON document with three top-level keys:
//!
//! ```text
//! {
//!   "name": "tiny",                              // optional
//!   "items": [{"id": 0}, {"id": 1}, {"id": 2}],  // order = default stream order
//!   "function": {"kind": "modular", "values": {"0": 1, "1": 1, "2": 3}},
//!   "matroids": [{"kind": "uniform", "k": 2}]
//! }
//! ```
//!
//! Function kinds:
//! - `modular`: `values` maps every item id to a non-negative integer.
//! - `coverage`: `universe_weights` is a list of non-negative integers;
//!   `covers` maps item ids to lists of universe indices (items may be absent
//!   and then cover nothing).
//! - `facility`: `clients` is a count; `weights` maps every item id to a row
//!   of `clients` non-negative integers.
//!
//! Matroid kinds:
//! - `uniform`: `{"kind":"uniform","k":2}`
//! - `partition`: `{"kind":"partition","groups":[[0,1],[2]],"capacities":[1,1]}`;
//!   groups must be disjoint, items outside every group are unconstrained.
//! - `graphic`: `{"kind":"graphic","vertices":3,"edges":{"0":[0,1],"1":[1,2]}}`;
//!   every item must be an edge, self-loops are rejected.
//!
//! All ids appearing in `function` and `matroids` must be declared in `items`.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Identifier of a streamed element. Unique within an instance, stable across runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Default)]
#[serde(transparent)]
pub struct ItemId(pub u32);

// Hand-rolled so ids also parse out of JSON object keys, which always arrive
// as strings ("values": {"0": 1}).
impl<'de> Deserialize<'de> for ItemId {
    fn deserialize<D>(deserializer: D) -> std::result::Result<Self, D::Error>
    where
        D: serde::Deserializer<'de>,
    {
        struct IdVisitor;

        impl serde::de::Visitor<'_> for IdVisitor {
            type Value = ItemId;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a non-negative item id")
            }

            fn visit_u64<E: serde::de::Error>(self, raw: u64) -> std::result::Result<ItemId, E> {
                u32::try_from(raw).map(ItemId).map_err(E::custom)
            }

            fn visit_i64<E: serde::de::Error>(self, raw: i64) -> std::result::Result<ItemId, E> {
                u32::try_from(raw).map(ItemId).map_err(E::custom)
            }

            fn visit_str<E: serde::de::Error>(self, raw: &str) -> std::result::Result<ItemId, E> {
                raw.parse::<u32>().map(ItemId).map_err(E::custom)
            }
        }

        deserializer.deserialize_any(IdVisitor)
    }
}

impl fmt::Display for ItemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u32> for ItemId {
    fn from(raw: u32) -> Self {
        ItemId(raw)
    }
}

/// Ordered set of item ids. Ordering gives deterministic iteration everywhere.
pub type ItemSet = BTreeSet<ItemId>;

/// Build an [`ItemSet`] from raw ids; handy in tests and examples.
pub fn item_set<I: IntoIterator<Item = u32>>(ids: I) -> ItemSet {
    ids.into_iter().map(ItemId).collect()
}

/// One streamed element: its id plus the index of its payload rows.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Item {
    pub id: ItemId,
    /// Position of this item's rows in the instance payload tables; equals the
    /// item's position in `Instance::items`.
    #[serde(skip)]
    pub payload_index: usize,
}

/// Tagged description of the utility function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FunctionSpec {
    Modular {
        values: BTreeMap<ItemId, i64>,
    },
    Coverage {
        universe_weights: Vec<i64>,
        covers: BTreeMap<ItemId, Vec<usize>>,
    },
    Facility {
        clients: usize,
        weights: BTreeMap<ItemId, Vec<i64>>,
    },
}

impl FunctionSpec {
    pub fn kind_name(&self) -> &'static str {
        match self {
            FunctionSpec::Modular { .. } => "modular",
            FunctionSpec::Coverage { .. } => "coverage",
            FunctionSpec::Facility { .. } => "facility",
        }
    }
}

/// Tagged description of one matroid constraint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum MatroidSpec {
    Uniform {
        k: i64,
    },
    Partition {
        groups: Vec<Vec<ItemId>>,
        capacities: Vec<i64>,
    },
    Graphic {
        vertices: usize,
        edges: BTreeMap<ItemId, (u32, u32)>,
    },
}

/// A validated-or-not problem instance. `items` order is the default stream order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Instance {
    #[serde(default)]
    pub name: String,
    pub items: Vec<Item>,
    pub function: FunctionSpec,
    pub matroids: Vec<MatroidSpec>,
}

/// One named invariant violation, carrying the offending id where there is one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ValidationIssue {
    DuplicateItemId(ItemId),
    DanglingReference {
        context: String,
        id: ItemId,
    },
    MissingPayload {
        context: String,
        id: ItemId,
    },
    NegativeValue {
        context: String,
        id: Option<ItemId>,
    },
    NonPositiveCapacity {
        matroid_index: usize,
        value: i64,
    },
    CapacityCountMismatch {
        matroid_index: usize,
        groups: usize,
        capacities: usize,
    },
    DuplicateGroupMembership {
        id: ItemId,
    },
    SelfLoopEdge {
        id: ItemId,
    },
    EdgeOutOfRange {
        id: ItemId,
        vertex: u32,
        vertices: usize,
    },
    WrongRowLength {
        id: ItemId,
        expected: usize,
        got: usize,
    },
    CoverIndexOutOfRange {
        id: ItemId,
        index: usize,
        universe: usize,
    },
    NoMatroids,
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use ValidationIssue::*;
        match self {
            DuplicateItemId(id) => write!(f, "duplicate item id {id}"),
            DanglingReference { context, id } => {
                write!(f, "{context} references undeclared item id {id}")
            }
            MissingPayload { context, id } => write!(f, "{context} has no entry for item {id}"),
            NegativeValue {
                context,
                id: Some(id),
            } => {
                write!(f, "negative value in {context} for item {id}")
            }
            NegativeValue { context, id: None } => write!(f, "negative value in {context}"),
            NonPositiveCapacity {
                matroid_index,
                value,
            } => {
                write!(f, "matroid {matroid_index}: non-positive capacity {value}")
            }
            CapacityCountMismatch {
                matroid_index,
                groups,
                capacities,
            } => write!(
                f,
                "matroid {matroid_index}: {groups} groups but {capacities} capacities"
            ),
            DuplicateGroupMembership { id } => {
                write!(f, "item {id} appears in more than one partition group")
            }
            SelfLoopEdge { id } => write!(f, "self-loop edge for item {id}"),
            EdgeOutOfRange {
                id,
                vertex,
                vertices,
            } => write!(
                f,
                "edge for item {id} touches vertex {vertex}, but there are only {vertices} vertices"
            ),
            WrongRowLength { id, expected, got } => {
                write!(
                    f,
                    "weight row for item {id} has {got} entries, expected {expected}"
                )
            }
            CoverIndexOutOfRange {
                id,
                index,
                universe,
            } => write!(
                f,
                "cover list for item {id} names universe index {index}, universe size is {universe}"
            ),
            NoMatroids => write!(f, "instance declares no matroid constraints"),
        }
    }
}

/// Outcome of [`validate_instance`]: empty iff every instance invariant holds.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    issues: Vec<ValidationIssue>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.issues.is_empty()
    }

    pub fn issues(&self) -> &[ValidationIssue] {
        &self.issues
    }

    fn push(&mut self, issue: ValidationIssue) {
        self.issues.push(issue);
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for issue in &self.issues {
            writeln!(f, "- {issue}")?;
        }
        Ok(())
    }
}

impl Instance {
    /// Number of ground-set elements.
    pub fn n(&self) -> usize {
        self.items.len()
    }

    /// Number of matroid constraints.
    pub fn p(&self) -> usize {
        self.matroids.len()
    }

    /// All declared ids as a set.
    pub fn ground_set(&self) -> ItemSet {
        self.items.iter().map(|item| item.id).collect()
    }

    /// Default stream order: the declared item order.
    pub fn stream(&self) -> Vec<ItemId> {
        self.items.iter().map(|item| item.id).collect()
    }

    /// Clone with the item order reshuffled by a seeded generator.
    pub fn shuffled_stream(&self, seed: u64) -> Instance {
        let mut out = self.clone();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        out.items.shuffle(&mut rng);
        out.assign_payload_indices();
        out
    }

    fn assign_payload_indices(&mut self) {
        for (index, item) in self.items.iter_mut().enumerate() {
            item.payload_index = index;
        }
    }

    /// Serialize to the documented JSON format.
    pub fn to_json(&self) -> String {
        // BTreeMap keys keep the emission deterministic.
        serde_json::to_string_pretty(self).expect("instance serialization cannot fail")
    }

    pub fn write_to(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    /// Parse without validating. `load_instance` is the checked entry point.
    pub fn from_json(text: &str) -> Result<Instance> {
        let mut inst: Instance = serde_json::from_str(text)?;
        inst.assign_payload_indices();
        Ok(inst)
    }
}

/// Parse and validate an instance file, rejecting malformed input.
pub fn load_instance(path: &Path) -> Result<Instance> {
    let text = std::fs::read_to_string(path)?;
    load_instance_str(&text)
}

/// Same as [`load_instance`] but from an in-memory document.
pub fn load_instance_str(text: &str) -> Result<Instance> {
    let inst = Instance::from_json(text)?;
    let report = validate_instance(&inst);
    if report.is_empty() {
        Ok(inst)
    } else {
        Err(Error::Validation(report))
    }
}

/// Check every instance invariant; violations become report entries, not failures.
pub fn validate_instance(inst: &Instance) -> ValidationReport {
    let mut report = ValidationReport::default();

    let mut seen = HashSet::new();
    for item in &inst.items {
        if !seen.insert(item.id) {
            report.push(ValidationIssue::DuplicateItemId(item.id));
        }
    }
    let declared: ItemSet = inst.items.iter().map(|item| item.id).collect();

    validate_function(&inst.function, &declared, &mut report);

    if inst.matroids.is_empty() {
        report.push(ValidationIssue::NoMatroids);
    }
    for (index, spec) in inst.matroids.iter().enumerate() {
        validate_matroid(index, spec, &declared, &mut report);
    }

    report
}

fn validate_function(spec: &FunctionSpec, declared: &ItemSet, report: &mut ValidationReport) {
    match spec {
        FunctionSpec::Modular { values } => {
            for (&id, &value) in values {
                if !declared.contains(&id) {
                    report.push(ValidationIssue::DanglingReference {
                        context: "modular values".into(),
                        id,
                    });
                }
                if value < 0 {
                    report.push(ValidationIssue::NegativeValue {
                        context: "modular values".into(),
                        id: Some(id),
                    });
                }
            }
            for &id in declared {
                if !values.contains_key(&id) {
                    report.push(ValidationIssue::MissingPayload {
                        context: "modular values".into(),
                        id,
                    });
                }
            }
        }
        FunctionSpec::Coverage {
            universe_weights,
            covers,
        } => {
            if universe_weights.iter().any(|&w| w < 0) {
                report.push(ValidationIssue::NegativeValue {
                    context: "universe weights".into(),
                    id: None,
                });
            }
            for (&id, indices) in covers {
                if !declared.contains(&id) {
                    report.push(ValidationIssue::DanglingReference {
                        context: "cover lists".into(),
                        id,
                    });
                }
                for &index in indices {
                    if index >= universe_weights.len() {
                        report.push(ValidationIssue::CoverIndexOutOfRange {
                            id,
                            index,
                            universe: universe_weights.len(),
                        });
                    }
                }
            }
        }
        FunctionSpec::Facility { clients, weights } => {
            for (&id, row) in weights {
                if !declared.contains(&id) {
                    report.push(ValidationIssue::DanglingReference {
                        context: "facility weights".into(),
                        id,
                    });
                }
                if row.len() != *clients {
                    report.push(ValidationIssue::WrongRowLength {
                        id,
                        expected: *clients,
                        got: row.len(),
                    });
                }
                if row.iter().any(|&w| w < 0) {
                    report.push(ValidationIssue::NegativeValue {
                        context: "facility weights".into(),
                        id: Some(id),
                    });
                }
            }
            for &id in declared {
                if !weights.contains_key(&id) {
                    report.push(ValidationIssue::MissingPayload {
                        context: "facility weights".into(),
                        id,
                    });
                }
            }
        }
    }
}

fn validate_matroid(
    index: usize,
    spec: &MatroidSpec,
    declared: &ItemSet,
    report: &mut ValidationReport,
) {
    match spec {
        MatroidSpec::Uniform { k } => {
            if *k <= 0 {
                report.push(ValidationIssue::NonPositiveCapacity {
                    matroid_index: index,
                    value: *k,
                });
            }
        }
        MatroidSpec::Partition { groups, capacities } => {
            if groups.len() != capacities.len() {
                report.push(ValidationIssue::CapacityCountMismatch {
                    matroid_index: index,
                    groups: groups.len(),
                    capacities: capacities.len(),
                });
            }
            for &cap in capacities {
                if cap <= 0 {
                    report.push(ValidationIssue::NonPositiveCapacity {
                        matroid_index: index,
                        value: cap,
                    });
                }
            }
            let mut grouped = HashSet::new();
            for group in groups {
                for &id in group {
                    if !declared.contains(&id) {
                        report.push(ValidationIssue::DanglingReference {
                            context: format!("matroid {index} partition groups"),
                            id,
                        });
                    }
                    if !grouped.insert(id) {
                        report.push(ValidationIssue::DuplicateGroupMembership { id });
                    }
                }
            }
        }
        MatroidSpec::Graphic { vertices, edges } => {
            for (&id, &(u, v)) in edges {
                if !declared.contains(&id) {
                    report.push(ValidationIssue::DanglingReference {
                        context: format!("matroid {index} edges"),
                        id,
                    });
                }
                if u == v {
                    report.push(ValidationIssue::SelfLoopEdge { id });
                }
                for vertex in [u, v] {
                    if vertex as usize >= *vertices {
                        report.push(ValidationIssue::EdgeOutOfRange {
                            id,
                            vertex,
                            vertices: *vertices,
                        });
                    }
                }
            }
            // Every item must be an edge, otherwise independence is undefined for it.
            for &id in declared {
                if !edges.contains_key(&id) {
                    report.push(ValidationIssue::MissingPayload {
                        context: format!("matroid {index} edges"),
                        id,
                    });
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Synthetic instance generation
// ---------------------------------------------------------------------------

/// Hard cap on generated ground-set sizes; everything here is desk scale.
pub const MAX_GENERATED_N: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenKind {
    ModularUniform,
    CoverageRandomBipartite,
    FacilityRandom,
}

impl GenKind {
    pub fn parse(name: &str) -> Result<GenKind> {
        match name {
            "modular" | "modular-uniform" => Ok(GenKind::ModularUniform),
            "coverage" | "coverage-random-bipartite" => Ok(GenKind::CoverageRandomBipartite),
            "facility" | "facility-random" => Ok(GenKind::FacilityRandom),
            other => Err(Error::UnsupportedGenerator(other.to_string())),
        }
    }
}

/// Parameters for [`generate_synthetic`]. All utility weights come out as
/// positive integers so downstream comparisons are exact in doubles.
#[derive(Debug, Clone, PartialEq)]
pub struct GenConfig {
    pub kind: GenKind,
    pub n: usize,
    /// Rank of the uniform matroid every generated instance carries.
    pub k: usize,
    /// Weights are drawn uniformly from `1..=value_max`.
    pub value_max: i64,
    /// Coverage only: universe size (0 means `2 * n`).
    pub universe: usize,
    /// Coverage only: max universe elements covered per item.
    pub max_cover: usize,
    /// Facility only: client count.
    pub clients: usize,
    /// Adds a second, partition matroid: (group count, per-group capacity).
    pub partition: Option<(usize, usize)>,
}

impl GenConfig {
    pub fn new(kind: GenKind, n: usize, k: usize) -> GenConfig {
        GenConfig {
            kind,
            n,
            k,
            value_max: 100,
            universe: 0,
            max_cover: 4,
            clients: 8,
            partition: None,
        }
    }

    /// Parse a comma-separated `key=value` description, e.g.
    /// `kind=coverage,n=24,k=4,universe=30` or
    /// `kind=modular,n=24,k=4,groups=6,cap=1`.
    pub fn parse(text: &str) -> Result<GenConfig> {
        let mut kind = None;
        let mut n = None;
        let mut k = None;
        let mut cfg_fields: BTreeMap<&str, &str> = BTreeMap::new();
        for part in text.split(',').filter(|p| !p.is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| Error::Parameter(format!("expected key=value, got `{part}`")))?;
            match key {
                "kind" => kind = Some(GenKind::parse(value)?),
                "n" => n = Some(parse_num(key, value)?),
                "k" => k = Some(parse_num(key, value)?),
                _ => {
                    cfg_fields.insert(key, value);
                }
            }
        }
        let kind = kind.ok_or_else(|| Error::Parameter("generator spec needs kind=".into()))?;
        let n = n.ok_or_else(|| Error::Parameter("generator spec needs n=".into()))?;
        let k = k.ok_or_else(|| Error::Parameter("generator spec needs k=".into()))?;
        let mut cfg = GenConfig::new(kind, n, k);
        let mut groups = None;
        let mut cap = None;
        for (key, value) in cfg_fields {
            match key {
                "vmax" => cfg.value_max = parse_num(key, value)? as i64,
                "universe" => cfg.universe = parse_num(key, value)?,
                "max-cover" => cfg.max_cover = parse_num(key, value)?,
                "clients" => cfg.clients = parse_num(key, value)?,
                "groups" => groups = Some(parse_num(key, value)?),
                "cap" => cap = Some(parse_num(key, value)?),
                other => return Err(Error::Parameter(format!("unknown generator key `{other}`"))),
            }
        }
        match (groups, cap) {
            (Some(g), Some(c)) => cfg.partition = Some((g, c)),
            (None, None) => {}
            _ => {
                return Err(Error::Parameter(
                    "partition generation needs both groups= and cap=".into(),
                ))
            }
        }
        Ok(cfg)
    }
}

fn parse_num(key: &str, value: &str) -> Result<usize> {
    value.parse().map_err(|_| {
        Error::Parameter(format!(
            "`{key}` expects a non-negative integer, got `{value}`"
        ))
    })
}

/// Deterministically generate an instance from `(config, seed)`.
/// The emitted item order is a seeded shuffle of `0..n`.
pub fn generate_synthetic(cfg: &GenConfig, seed: u64) -> Result<Instance> {
    if cfg.n > MAX_GENERATED_N {
        return Err(Error::GeneratorSize {
            n: cfg.n,
            max: MAX_GENERATED_N,
        });
    }
    if cfg.k == 0 || cfg.value_max <= 0 {
        return Err(Error::Parameter(
            "generator needs k >= 1 and vmax >= 1".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ids: Vec<ItemId> = (0..cfg.n as u32).map(ItemId).collect();

    let function = match cfg.kind {
        GenKind::ModularUniform => FunctionSpec::Modular {
            values: ids
                .iter()
                .map(|&id| (id, rng.random_range(1..=cfg.value_max)))
                .collect(),
        },
        GenKind::CoverageRandomBipartite => {
            let universe = if cfg.universe == 0 {
                2 * cfg.n.max(1)
            } else {
                cfg.universe
            };
            if universe == 0 {
                return Err(Error::Parameter(
                    "coverage universe must be non-empty".into(),
                ));
            }
            let weights = (0..universe)
                .map(|_| rng.random_range(1..=cfg.value_max))
                .collect();
            let max_cover = cfg.max_cover.clamp(1, universe);
            let covers = ids
                .iter()
                .map(|&id| {
                    let count = rng.random_range(1..=max_cover);
                    let mut chosen = BTreeSet::new();
                    while chosen.len() < count {
                        chosen.insert(rng.random_range(0..universe));
                    }
                    (id, chosen.into_iter().collect::<Vec<_>>())
                })
                .collect();
            FunctionSpec::Coverage {
                universe_weights: weights,
                covers,
            }
        }
        GenKind::FacilityRandom => {
            if cfg.clients == 0 {
                return Err(Error::Parameter(
                    "facility generation needs clients >= 1".into(),
                ));
            }
            FunctionSpec::Facility {
                clients: cfg.clients,
                weights: ids
                    .iter()
                    .map(|&id| {
                        let row = (0..cfg.clients)
                            .map(|_| rng.random_range(1..=cfg.value_max))
                            .collect();
                        (id, row)
                    })
                    .collect(),
            }
        }
    };

    let mut matroids = vec![MatroidSpec::Uniform { k: cfg.k as i64 }];
    if let Some((group_count, capacity)) = cfg.partition {
        if group_count == 0 || capacity == 0 {
            return Err(Error::Parameter(
                "partition generation needs groups >= 1 and cap >= 1".into(),
            ));
        }
        let mut pool: Vec<ItemId> = ids.clone();
        pool.shuffle(&mut rng);
        let mut groups: Vec<Vec<ItemId>> = vec![Vec::new(); group_count];
        for (position, id) in pool.into_iter().enumerate() {
            groups[position % group_count].push(id);
        }
        for group in &mut groups {
            group.sort();
        }
        matroids.push(MatroidSpec::Partition {
            groups,
            capacities: vec![capacity as i64; group_count],
        });
    }

    let mut items: Vec<Item> = ids
        .into_iter()
        .map(|id| Item {
            id,
            payload_index: 0,
        })
        .collect();
    items.shuffle(&mut rng);

    let mut inst = Instance {
        name: format!("gen-{}-n{}-s{}", function.kind_name(), cfg.n, seed),
        items,
        function,
        matroids,
    };
    inst.assign_payload_indices();

    debug_assert!(validate_instance(&inst).is_empty());
    Ok(inst)
}

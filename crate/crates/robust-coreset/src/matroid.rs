//! Individual matroids and their intersection into a p-matroid.
//!
//! Three kinds are supported: uniform (cardinality cap), partition (per-group
//! caps; items outside every group are unconstrained), and graphic (items are
//! edges, independent sets are forests). Independence tests recompute from
//! scratch; at desk scale that is both cheap and obviously correct.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::instance::{Instance, ItemId, ItemSet, MatroidSpec};

/// Ground-set limit for exhaustive computations (rank of an intersection,
/// axiom verification).
pub const EXHAUSTIVE_GUARD: usize = 25;

#[derive(Debug, Clone)]
pub enum Matroid {
    Uniform {
        k: usize,
    },
    Partition {
        group_of: HashMap<ItemId, usize>,
        capacities: Vec<usize>,
    },
    Graphic {
        vertices: usize,
        endpoints: HashMap<ItemId, (u32, u32)>,
    },
}

impl Matroid {
    pub fn uniform(k: usize) -> Matroid {
        Matroid::Uniform { k }
    }

    pub fn partition(groups: Vec<Vec<ItemId>>, capacities: Vec<usize>) -> Result<Matroid> {
        if groups.len() != capacities.len() {
            return Err(Error::Parameter(format!(
                "{} groups but {} capacities",
                groups.len(),
                capacities.len()
            )));
        }
        let mut group_of = HashMap::new();
        for (index, group) in groups.iter().enumerate() {
            for &id in group {
                if group_of.insert(id, index).is_some() {
                    return Err(Error::Parameter(format!(
                        "item {id} appears in more than one partition group"
                    )));
                }
            }
        }
        Ok(Matroid::Partition {
            group_of,
            capacities,
        })
    }

    pub fn graphic(
        vertices: usize,
        edges: impl IntoIterator<Item = (ItemId, (u32, u32))>,
    ) -> Result<Matroid> {
        let mut endpoints = HashMap::new();
        for (id, (u, v)) in edges {
            if u == v {
                return Err(Error::Parameter(format!("self-loop edge for item {id}")));
            }
            if u as usize >= vertices || v as usize >= vertices {
                return Err(Error::Parameter(format!(
                    "edge for item {id} is out of range"
                )));
            }
            endpoints.insert(id, (u, v));
        }
        Ok(Matroid::Graphic {
            vertices,
            endpoints,
        })
    }

    fn from_spec(spec: &MatroidSpec) -> Result<Matroid> {
        match spec {
            MatroidSpec::Uniform { k } => {
                if *k <= 0 {
                    return Err(Error::Parameter(format!("non-positive uniform rank {k}")));
                }
                Ok(Matroid::uniform(*k as usize))
            }
            MatroidSpec::Partition { groups, capacities } => {
                if capacities.iter().any(|&c| c <= 0) {
                    return Err(Error::Parameter("non-positive partition capacity".into()));
                }
                Matroid::partition(
                    groups.clone(),
                    capacities.iter().map(|&c| c as usize).collect(),
                )
            }
            MatroidSpec::Graphic { vertices, edges } => {
                Matroid::graphic(*vertices, edges.iter().map(|(&id, &e)| (id, e)))
            }
        }
    }

    /// Is `set` independent in this matroid?
    pub fn is_independent(&self, set: &ItemSet) -> Result<bool> {
        match self {
            Matroid::Uniform { k } => Ok(set.len() <= *k),
            Matroid::Partition {
                group_of,
                capacities,
            } => {
                let mut counts = vec![0usize; capacities.len()];
                for id in set {
                    if let Some(&group) = group_of.get(id) {
                        counts[group] += 1;
                        if counts[group] > capacities[group] {
                            return Ok(false);
                        }
                    }
                }
                Ok(true)
            }
            Matroid::Graphic {
                vertices,
                endpoints,
            } => {
                let mut forest = UnionFind::new(*vertices);
                for id in set {
                    let &(u, v) = endpoints.get(id).ok_or(Error::UnknownItem(*id))?;
                    if !forest.union(u as usize, v as usize) {
                        return Ok(false); // closes a cycle
                    }
                }
                Ok(true)
            }
        }
    }

    /// Can independent `set` absorb `v`? Errors if `set` is not independent.
    pub fn can_extend(&self, set: &ItemSet, v: ItemId) -> Result<bool> {
        if !self.is_independent(set)? {
            return Err(Error::NotIndependent);
        }
        let mut extended = set.clone();
        extended.insert(v);
        self.is_independent(&extended)
    }

    /// Analytic rank over a ground set (maximum independent subset size).
    pub fn rank(&self, ground: &ItemSet) -> Result<usize> {
        match self {
            Matroid::Uniform { k } => Ok((*k).min(ground.len())),
            Matroid::Partition {
                group_of,
                capacities,
            } => {
                let mut counts = vec![0usize; capacities.len()];
                let mut ungrouped = 0usize;
                for id in ground {
                    match group_of.get(id) {
                        Some(&group) => counts[group] += 1,
                        None => ungrouped += 1,
                    }
                }
                Ok(ungrouped
                    + counts
                        .iter()
                        .zip(capacities)
                        .map(|(&size, &cap)| size.min(cap))
                        .sum::<usize>())
            }
            Matroid::Graphic {
                vertices,
                endpoints,
            } => {
                // Rank of a graphic matroid = #vertices - #components, counted
                // here as the number of cycle-free edge insertions.
                let mut forest = UnionFind::new(*vertices);
                let mut rank = 0usize;
                for id in ground {
                    let &(u, v) = endpoints.get(id).ok_or(Error::UnknownItem(*id))?;
                    if forest.union(u as usize, v as usize) {
                        rank += 1;
                    }
                }
                Ok(rank)
            }
        }
    }
}

/// Intersection of p >= 1 matroids over a shared ground set.
#[derive(Debug, Clone)]
pub struct PMatroid {
    matroids: Vec<Matroid>,
    ground: ItemSet,
}

impl PMatroid {
    pub fn new(matroids: Vec<Matroid>, ground: ItemSet) -> Result<PMatroid> {
        if matroids.is_empty() {
            return Err(Error::Parameter("a p-matroid needs p >= 1 members".into()));
        }
        Ok(PMatroid { matroids, ground })
    }

    pub fn from_instance(inst: &Instance) -> Result<PMatroid> {
        let matroids = inst
            .matroids
            .iter()
            .map(Matroid::from_spec)
            .collect::<Result<Vec<_>>>()?;
        PMatroid::new(matroids, inst.ground_set())
    }

    pub fn p(&self) -> usize {
        self.matroids.len()
    }

    pub fn members(&self) -> &[Matroid] {
        &self.matroids
    }

    pub fn ground(&self) -> &ItemSet {
        &self.ground
    }

    pub fn contains(&self, id: ItemId) -> bool {
        self.ground.contains(&id)
    }

    /// Independent in every member matroid?
    pub fn feasible(&self, set: &ItemSet) -> Result<bool> {
        if let Some(&id) = set.iter().find(|id| !self.ground.contains(id)) {
            return Err(Error::UnknownItem(id));
        }
        for matroid in &self.matroids {
            if !matroid.is_independent(set)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Can feasible `set` absorb `v`? Errors if `set` is not feasible.
    pub fn can_extend(&self, set: &ItemSet, v: ItemId) -> Result<bool> {
        if !self.contains(v) {
            return Err(Error::UnknownItem(v));
        }
        if !self.feasible(set)? {
            return Err(Error::NotIndependent);
        }
        let mut extended = set.clone();
        extended.insert(v);
        for matroid in &self.matroids {
            if !matroid.is_independent(&extended)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Exact maximum feasible-set size. Analytic for p = 1; exhaustive
    /// (guarded) search over independent sets for intersections.
    pub fn rank_bound(&self) -> Result<usize> {
        if self.matroids.len() == 1 {
            return self.matroids[0].rank(&self.ground);
        }
        let n = self.ground.len();
        if n > EXHAUSTIVE_GUARD {
            return Err(Error::GuardExceeded {
                n,
                limit: EXHAUSTIVE_GUARD,
            });
        }
        let ids: Vec<ItemId> = self.ground.iter().copied().collect();
        let mut best = 0usize;
        let mut current = ItemSet::new();
        self.rank_search(&ids, 0, &mut current, &mut best)?;
        Ok(best)
    }

    fn rank_search(
        &self,
        ids: &[ItemId],
        start: usize,
        current: &mut ItemSet,
        best: &mut usize,
    ) -> Result<()> {
        *best = (*best).max(current.len());
        // Even if every remaining id fit, we could not beat `best`.
        if current.len() + (ids.len() - start) <= *best {
            return Ok(());
        }
        for index in start..ids.len() {
            let id = ids[index];
            current.insert(id);
            let ok = self.matroids.iter().try_fold(true, |acc, m| {
                Ok::<bool, Error>(acc && m.is_independent(current)?)
            })?;
            if ok {
                self.rank_search(ids, index + 1, current, best)?;
            }
            current.remove(&id);
        }
        Ok(())
    }
}

/// Exhaustively check downward closeness and augmentation on a small ground
/// set. Diagnostic helper for custom constraints; used heavily in tests.
pub fn verify_axioms(matroid: &Matroid, ground: &ItemSet) -> Result<()> {
    let n = ground.len();
    if n > 16 {
        return Err(Error::GuardExceeded { n, limit: 16 });
    }
    let ids: Vec<ItemId> = ground.iter().copied().collect();
    let subsets: Vec<ItemSet> = (0u32..1 << n)
        .map(|mask| {
            (0..n)
                .filter(|bit| mask >> bit & 1 == 1)
                .map(|bit| ids[bit])
                .collect()
        })
        .collect();
    let independent: Vec<bool> = subsets
        .iter()
        .map(|s| matroid.is_independent(s))
        .collect::<Result<_>>()?;

    if !independent[0] {
        return Err(Error::Invariant("empty set must be independent".into()));
    }
    for (subset, &ok) in subsets.iter().zip(&independent) {
        if !ok {
            continue;
        }
        // Downward closeness: removing any element keeps independence.
        for &id in subset {
            let mut smaller = subset.clone();
            smaller.remove(&id);
            if !matroid.is_independent(&smaller)? {
                return Err(Error::Invariant(format!(
                    "downward closeness fails at {subset:?} minus {id}"
                )));
            }
        }
    }
    for (x, &x_ok) in subsets.iter().zip(&independent) {
        if !x_ok {
            continue;
        }
        for (y, &y_ok) in subsets.iter().zip(&independent) {
            if !y_ok || x.len() >= y.len() {
                continue;
            }
            let can_augment = y.difference(x).any(|&v| {
                let mut grown = x.clone();
                grown.insert(v);
                matroid.is_independent(&grown).unwrap_or(false)
            });
            if !can_augment {
                return Err(Error::Invariant(format!(
                    "augmentation fails for X={x:?}, Y={y:?}"
                )));
            }
        }
    }
    Ok(())
}

#[derive(Debug)]
struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> UnionFind {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false when both endpoints already share a component.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::item_set;

    fn triangle() -> Matroid {
        // Items 0,1,2 are the edges of a triangle on vertices 0,1,2.
        Matroid::graphic(
            3,
            [
                (ItemId(0), (0, 1)),
                (ItemId(1), (1, 2)),
                (ItemId(2), (0, 2)),
            ],
        )
        .unwrap()
    }

    #[test]
    fn uniform_independence_is_cardinality() {
        let m = Matroid::uniform(2);
        assert!(m.is_independent(&item_set([0, 1])).unwrap());
        assert!(!m.is_independent(&item_set([0, 1, 2])).unwrap());
    }

    #[test]
    fn partition_counts_per_group() {
        let m = Matroid::partition(
            vec![vec![ItemId(0), ItemId(1)], vec![ItemId(2)]],
            vec![1, 1],
        )
        .unwrap();
        assert!(m.is_independent(&item_set([0, 2])).unwrap());
        assert!(!m.is_independent(&item_set([0, 1])).unwrap());
    }

    #[test]
    fn graphic_rejects_cycles() {
        let m = triangle();
        assert!(m.is_independent(&item_set([0, 1])).unwrap());
        assert!(!m.is_independent(&item_set([0, 1, 2])).unwrap());
    }

    #[test]
    fn can_extend_matches_direct_test() {
        let uniform = Matroid::uniform(2);
        assert!(uniform.can_extend(&item_set([0]), ItemId(1)).unwrap());

        let partition = Matroid::partition(vec![vec![ItemId(0), ItemId(1)]], vec![1]).unwrap();
        assert!(!partition.can_extend(&item_set([0]), ItemId(1)).unwrap());

        // Path 0-1-2 with a chord candidate 0-2 closing the cycle.
        let graphic = triangle();
        assert!(!graphic.can_extend(&item_set([0, 1]), ItemId(2)).unwrap());
    }

    #[test]
    fn can_extend_requires_an_independent_base() {
        let m = Matroid::uniform(1);
        assert!(matches!(
            m.can_extend(&item_set([0, 1]), ItemId(2)),
            Err(Error::NotIndependent)
        ));
    }

    #[test]
    fn feasibility_is_the_conjunction() {
        let ground = item_set([0, 1, 2]);
        let pm = PMatroid::new(vec![Matroid::uniform(2)], ground.clone()).unwrap();
        assert!(pm.feasible(&item_set([0, 1])).unwrap());
        assert!(pm.feasible(&ItemSet::new()).unwrap());

        let both = PMatroid::new(
            vec![
                Matroid::uniform(3),
                Matroid::partition(vec![vec![ItemId(0), ItemId(1)]], vec![1]).unwrap(),
            ],
            ground,
        )
        .unwrap();
        assert!(!both.feasible(&item_set([0, 1])).unwrap());
        assert!(both.feasible(&item_set([0, 2])).unwrap());
    }

    #[test]
    fn unknown_ids_error_at_the_intersection() {
        let pm = PMatroid::new(vec![Matroid::uniform(2)], item_set([0, 1])).unwrap();
        assert!(matches!(
            pm.feasible(&item_set([5])),
            Err(Error::UnknownItem(ItemId(5)))
        ));
    }

    #[test]
    fn analytic_ranks() {
        let ground = item_set([0, 1, 2, 3]);
        let pm = PMatroid::new(vec![Matroid::uniform(3)], ground.clone()).unwrap();
        assert_eq!(pm.rank_bound().unwrap(), 3);

        let partition = Matroid::partition(
            vec![vec![ItemId(0), ItemId(1)], vec![ItemId(2), ItemId(3)]],
            vec![1, 1],
        )
        .unwrap();
        let pm = PMatroid::new(vec![partition], ground).unwrap();
        assert_eq!(pm.rank_bound().unwrap(), 2);
    }

    #[test]
    fn rank_caps_at_ground_size() {
        let pm = PMatroid::new(vec![Matroid::uniform(9)], item_set([0, 1])).unwrap();
        assert_eq!(pm.rank_bound().unwrap(), 2);
    }

    #[test]
    fn intersection_rank_by_exhaustive_search() {
        let pm = PMatroid::new(vec![Matroid::uniform(2), triangle()], item_set([0, 1, 2])).unwrap();
        assert_eq!(pm.rank_bound().unwrap(), 2);
    }

    #[test]
    fn graphic_rank_counts_forest_edges() {
        // Two components: a triangle (rank 2) and one extra edge (rank 1).
        let m = Matroid::graphic(
            5,
            [
                (ItemId(0), (0, 1)),
                (ItemId(1), (1, 2)),
                (ItemId(2), (0, 2)),
                (ItemId(3), (3, 4)),
            ],
        )
        .unwrap();
        assert_eq!(m.rank(&item_set([0, 1, 2, 3])).unwrap(), 3);
    }

    #[test]
    fn axioms_hold_for_all_kinds() {
        verify_axioms(&Matroid::uniform(2), &item_set([0, 1, 2, 3])).unwrap();
        verify_axioms(
            &Matroid::partition(
                vec![vec![ItemId(0), ItemId(1), ItemId(2)], vec![ItemId(3)]],
                vec![2, 1],
            )
            .unwrap(),
            // Item 4 is ungrouped on purpose.
            &item_set([0, 1, 2, 3, 4]),
        )
        .unwrap();
        verify_axioms(&triangle(), &item_set([0, 1, 2])).unwrap();
    }

    #[test]
    fn can_extend_equals_direct_independence_exhaustively() {
        let matroids = vec![
            Matroid::uniform(2),
            Matroid::partition(
                vec![
                    vec![ItemId(0), ItemId(1), ItemId(2)],
                    vec![ItemId(3), ItemId(4)],
                ],
                vec![2, 1],
            )
            .unwrap(),
            Matroid::graphic(
                4,
                [
                    (ItemId(0), (0, 1)),
                    (ItemId(1), (1, 2)),
                    (ItemId(2), (2, 3)),
                    (ItemId(3), (3, 0)),
                    (ItemId(4), (0, 2)),
                    (ItemId(5), (1, 3)),
                ],
            )
            .unwrap(),
        ];
        for matroid in &matroids {
            let n = 6u32;
            let ids: Vec<ItemId> = (0..n).map(ItemId).collect();
            // Graphic payloads only know items 0..=5; skip foreign ids there.
            let usable = match matroid {
                Matroid::Partition { .. } | Matroid::Uniform { .. } => ids.clone(),
                Matroid::Graphic { endpoints, .. } => ids
                    .iter()
                    .copied()
                    .filter(|id| endpoints.contains_key(id))
                    .collect(),
            };
            for mask in 0u32..1 << usable.len() {
                let set: ItemSet = usable
                    .iter()
                    .enumerate()
                    .filter(|(bit, _)| mask >> bit & 1 == 1)
                    .map(|(_, &id)| id)
                    .collect();
                if !matroid.is_independent(&set).unwrap() {
                    continue;
                }
                for &v in &usable {
                    if set.contains(&v) {
                        continue;
                    }
                    let mut grown = set.clone();
                    grown.insert(v);
                    assert_eq!(
                        matroid.can_extend(&set, v).unwrap(),
                        matroid.is_independent(&grown).unwrap(),
                        "set {set:?} + {v}"
                    );
                }
            }
        }
    }

    #[test]
    fn graphic_independence_agrees_with_dfs_acyclicity() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for _ in 0..50 {
            let vertices = rng.random_range(3..8usize);
            let edge_count = rng.random_range(1..=8usize);
            let mut edges = Vec::new();
            for id in 0..edge_count as u32 {
                let u = rng.random_range(0..vertices as u32);
                let mut v = rng.random_range(0..vertices as u32);
                while v == u {
                    v = rng.random_range(0..vertices as u32);
                }
                edges.push((ItemId(id), (u, v)));
            }
            let m = Matroid::graphic(vertices, edges.clone()).unwrap();
            // Random subset of the edges.
            let subset: ItemSet = edges
                .iter()
                .filter(|_| rng.random_range(0..2) == 1)
                .map(|&(id, _)| id)
                .collect();
            let expected = dfs_acyclic(
                vertices,
                &edges
                    .iter()
                    .filter(|(id, _)| subset.contains(id))
                    .map(|&(_, e)| e)
                    .collect::<Vec<_>>(),
            );
            assert_eq!(
                m.is_independent(&subset).unwrap(),
                expected,
                "subset {subset:?}"
            );
        }
    }

    /// Independent acyclicity oracle: DFS over the multigraph, counting edges.
    fn dfs_acyclic(vertices: usize, edges: &[(u32, u32)]) -> bool {
        let mut adjacency = vec![Vec::new(); vertices];
        for (index, &(u, v)) in edges.iter().enumerate() {
            adjacency[u as usize].push((v as usize, index));
            adjacency[v as usize].push((u as usize, index));
        }
        let mut seen = vec![false; vertices];
        for start in 0..vertices {
            if seen[start] {
                continue;
            }
            let mut stack = vec![(start, usize::MAX)];
            seen[start] = true;
            while let Some((node, via_edge)) = stack.pop() {
                for &(next, edge) in &adjacency[node] {
                    if edge == via_edge {
                        continue;
                    }
                    if seen[next] {
                        return false;
                    }
                    seen[next] = true;
                    stack.push((next, edge));
                }
            }
        }
        true
    }
}

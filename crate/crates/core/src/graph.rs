//! Undirected attention topologies and their shortest-path structure.

use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{NipError, Result};
use crate::par::Exec;

/// Graph family, with family-specific parameters inline.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Family {
    Complete,
    /// Hub is always node 0.
    Star,
    /// Balanced binary tree filled in level order: node `i` has children
    /// `2i+1` and `2i+2`.
    Tree,
    /// Circulant graph; `w` counts total neighbors, `w/2` on each side.
    RingLattice { w: usize },
    /// G(n, p). `force` admits `p` below `log2(n)/n`.
    ErRandom { p: f64, force: bool },
    Hypercube,
    /// Edge union of the members, all on the same node set.
    Union { members: Vec<Family> },
}

impl Family {
    pub fn has_hub(&self) -> bool {
        match self {
            Family::Star => true,
            Family::Union { members } => members.iter().any(Family::has_hub),
            _ => false,
        }
    }

    pub fn is_random(&self) -> bool {
        match self {
            Family::ErRandom { .. } => true,
            Family::Union { members } => members.iter().any(Family::is_random),
            _ => false,
        }
    }

    /// Short human-readable name, e.g. `ring(w=4)+star`.
    pub fn label(&self) -> String {
        match self {
            Family::Complete => "complete".into(),
            Family::Star => "star".into(),
            Family::Tree => "tree".into(),
            Family::RingLattice { w } => format!("ring(w={w})"),
            Family::ErRandom { p, .. } => format!("er(p={p:.4})"),
            Family::Hypercube => "hypercube".into(),
            Family::Union { members } => members
                .iter()
                .map(Family::label)
                .collect::<Vec<_>>()
                .join("+"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphSpec {
    pub family: Family,
    pub n: usize,
    pub seed: u64,
    pub self_loops: bool,
}

impl GraphSpec {
    pub fn new(family: Family, n: usize) -> Self {
        GraphSpec {
            family,
            n,
            seed: 0,
            self_loops: false,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_self_loops(mut self, self_loops: bool) -> Self {
        self.self_loops = self_loops;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(NipError::TooSmall { n: self.n, min: 2 });
        }
        validate_family(&self.family, self.n)
    }
}

fn validate_family(family: &Family, n: usize) -> Result<()> {
    match family {
        Family::Complete | Family::Star | Family::Tree => Ok(()),
        Family::Hypercube => {
            if n.is_power_of_two() {
                Ok(())
            } else {
                Err(NipError::NonPowerOfTwo { n })
            }
        }
        Family::RingLattice { w } => {
            if w % 2 != 0 {
                Err(NipError::OddWindow { w: *w })
            } else if *w < 2 || *w >= n {
                Err(NipError::WindowOutOfRange { w: *w, n })
            } else {
                Ok(())
            }
        }
        Family::ErRandom { p, force } => {
            if !(*p > 0.0 && *p <= 1.0) {
                return Err(NipError::InvalidProbability { p: *p });
            }
            let threshold = connectivity_threshold(n);
            // Tolerate rounding when the caller passes log2(n)/n itself.
            if !force && *p < threshold * (1.0 - 1e-12) {
                return Err(NipError::BelowConnectivityThreshold { p: *p, threshold });
            }
            Ok(())
        }
        Family::Union { members } => {
            if members.len() < 2 {
                return Err(NipError::EmptyUnion);
            }
            members.iter().try_for_each(|m| validate_family(m, n))
        }
    }
}

/// `log2(n)/n`, the edge probability at which G(n, p) is connected with high
/// probability (up to the `1 + eps` factor).
pub fn connectivity_threshold(n: usize) -> f64 {
    (n as f64).log2() / n as f64
}

/// Sentinel for "unreachable" in a [`DistanceMatrix`].
const UNREACHABLE: u16 = u16::MAX;

/// All-pairs hop distances, row-major `n x n`.
#[derive(Clone, Debug)]
pub struct DistanceMatrix {
    n: usize,
    dist: Vec<u16>,
}

impl DistanceMatrix {
    pub fn get(&self, a: usize, b: usize) -> Option<u32> {
        match self.dist[a * self.n + b] {
            UNREACHABLE => None,
            d => Some(d as u32),
        }
    }

    pub fn row(&self, a: usize) -> &[u16] {
        &self.dist[a * self.n..(a + 1) * self.n]
    }

    pub fn is_connected(&self) -> bool {
        !self.dist.contains(&UNREACHABLE)
    }

    pub fn max(&self) -> Option<u32> {
        if self.is_connected() {
            self.dist.iter().copied().max().map(u32::from)
        } else {
            None
        }
    }
}

#[derive(Clone, Debug)]
pub struct Graph {
    n: usize,
    neighbors: Vec<Vec<u32>>,
    self_loops: bool,
    spec: Option<GraphSpec>,
    distances: OnceLock<DistanceMatrix>,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.self_loops == other.self_loops && self.neighbors == other.neighbors
    }
}

/// Construct the graph described by `spec`.
///
/// Fails with [`NipError::Disconnected`] when a sampled random graph is not
/// connected; [`build_resampled`] retries with fresh seeds.
pub fn build(spec: &GraphSpec) -> Result<Graph> {
    spec.validate()?;
    let n = spec.n;
    let mut lists: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    add_family_edges(&spec.family, n, &mut rng, &mut lists);
    for list in &mut lists {
        list.sort_unstable();
        list.dedup();
    }
    let g = Graph {
        n,
        neighbors: lists,
        self_loops: spec.self_loops,
        spec: Some(spec.clone()),
        distances: OnceLock::new(),
    };
    if !g.is_connected() {
        return Err(NipError::Disconnected);
    }
    Ok(g)
}

/// Like [`build`], but when a random family comes out disconnected, retry up
/// to `attempts` times with seeds derived deterministically from
/// `spec.seed`. The returned graph's spec records the seed actually used.
pub fn build_resampled(spec: &GraphSpec, attempts: usize) -> Result<Graph> {
    let mut seeder = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut candidate = spec.clone();
    for attempt in 0..attempts.max(1) {
        if attempt > 0 {
            candidate.seed = seeder.random();
        }
        match build(&candidate) {
            Err(NipError::Disconnected) if spec.family.is_random() => continue,
            other => return other,
        }
    }
    Err(NipError::Disconnected)
}

fn link(lists: &mut [Vec<u32>], u: usize, v: usize) {
    if u != v {
        lists[u].push(v as u32);
        lists[v].push(u as u32);
    }
}

fn add_family_edges(family: &Family, n: usize, rng: &mut ChaCha8Rng, lists: &mut [Vec<u32>]) {
    match family {
        Family::Complete => {
            for u in 0..n {
                for v in u + 1..n {
                    link(lists, u, v);
                }
            }
        }
        Family::Star => {
            for v in 1..n {
                link(lists, 0, v);
            }
        }
        Family::Tree => {
            for v in 1..n {
                link(lists, (v - 1) / 2, v);
            }
        }
        Family::RingLattice { w } => {
            for u in 0..n {
                for d in 1..=w / 2 {
                    link(lists, u, (u + d) % n);
                }
            }
        }
        Family::ErRandom { p, .. } => {
            for u in 0..n {
                for v in u + 1..n {
                    if rng.random::<f64>() < *p {
                        link(lists, u, v);
                    }
                }
            }
        }
        Family::Hypercube => {
            let k = n.trailing_zeros();
            for u in 0..n {
                for bit in 0..k {
                    let v = u ^ (1 << bit);
                    if u < v {
                        link(lists, u, v);
                    }
                }
            }
        }
        Family::Union { members } => {
            for m in members {
                add_family_edges(m, n, rng, lists);
            }
        }
    }
}

impl Graph {
    pub fn build(spec: &GraphSpec) -> Result<Graph> {
        build(spec)
    }

    /// Graph from an explicit edge set. Self-pairs in `edges` are ignored;
    /// `self_loops` puts a loop on every node. No connectivity requirement.
    pub fn from_edges<I>(n: usize, edges: I, self_loops: bool) -> Result<Graph>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        if n < 2 {
            return Err(NipError::TooSmall { n, min: 2 });
        }
        let mut lists: Vec<Vec<u32>> = vec![Vec::new(); n];
        for (u, v) in edges {
            let bad = if u >= n { u } else { v };
            if u >= n || v >= n {
                return Err(NipError::IndexOutOfRange { index: bad, len: n });
            }
            link(&mut lists, u, v);
        }
        for list in &mut lists {
            list.sort_unstable();
            list.dedup();
        }
        Ok(Graph {
            n,
            neighbors: lists,
            self_loops,
            spec: None,
            distances: OnceLock::new(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Provenance; `None` for graphs loaded from an edge list.
    pub fn spec(&self) -> Option<&GraphSpec> {
        self.spec.as_ref()
    }

    pub fn has_self_loops(&self) -> bool {
        self.self_loops
    }

    pub fn has_hub(&self) -> bool {
        self.spec.as_ref().is_some_and(|s| s.family.has_hub())
    }

    /// Neighbors of `v`, sorted, self excluded.
    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.neighbors[v]
    }

    /// Degree excluding the self-loop.
    pub fn degree(&self, v: usize) -> usize {
        self.neighbors[v].len()
    }

    /// Out-degree seen by a uniform random walk: includes the self-loop when
    /// the graph carries them.
    pub fn walk_degree(&self, v: usize) -> usize {
        self.neighbors[v].len() + usize::from(self.self_loops)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        if u == v {
            return self.self_loops;
        }
        self.neighbors[u].binary_search(&(v as u32)).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Edges `(u, v)` with `u < v` in lexicographic order; self-loops omitted.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.neighbors.iter().enumerate().flat_map(|(u, list)| {
            list.iter()
                .map(|&v| v as usize)
                .filter(move |&v| u < v)
                .map(move |v| (u, v))
        })
    }

    /// `2|E|/n`, self-loops excluded.
    pub fn mean_degree(&self) -> f64 {
        2.0 * self.edge_count() as f64 / self.n as f64
    }

    /// Hop distances from `source`; `u32::MAX` marks unreachable nodes.
    pub fn bfs(&self, source: usize) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.n];
        let mut frontier = vec![source];
        dist[source] = 0;
        let mut level = 0;
        while !frontier.is_empty() {
            level += 1;
            let mut next = Vec::new();
            for &u in &frontier {
                for &v in &self.neighbors[u] {
                    let v = v as usize;
                    if dist[v] == u32::MAX {
                        dist[v] = level;
                        next.push(v);
                    }
                }
            }
            frontier = next;
        }
        dist
    }

    pub fn is_connected(&self) -> bool {
        self.bfs(0).iter().all(|&d| d != u32::MAX)
    }

    /// All-pairs distances, computed once and cached.
    pub fn distances(&self) -> &DistanceMatrix {
        self.distances_with(Exec::default())
    }

    pub fn distances_with(&self, exec: Exec) -> &DistanceMatrix {
        self.distances.get_or_init(|| all_pairs_bitset(self, exec))
    }

    /// Diameter, self-loops ignored.
    pub fn diameter(&self) -> Result<u32> {
        self.distances().max().ok_or(NipError::Disconnected)
    }

    /// Unordered pairs `(a, b)`, `a < b`, at distance equal to the diameter,
    /// in lexicographic order.
    pub fn diameter_pairs(&self) -> Result<Vec<(u32, u32)>> {
        let kappa = self.diameter()?;
        let d = self.distances();
        let mut pairs = Vec::new();
        for a in 0..self.n {
            let row = d.row(a);
            for (b, &dist) in row.iter().enumerate().skip(a + 1) {
                if u32::from(dist) == kappa {
                    pairs.push((a as u32, b as u32));
                }
            }
        }
        Ok(pairs)
    }
}

/// Breadth-first search over adjacency bitsets, one source per task. Each
/// level ORs the rows of the frontier, so a full sweep costs `n^3/64` word
/// operations regardless of density.
fn all_pairs_bitset(g: &Graph, exec: Exec) -> DistanceMatrix {
    let n = g.n;
    let words = n.div_ceil(64);
    let mut rows = vec![0u64; n * words];
    for (u, list) in g.neighbors.iter().enumerate() {
        let row = &mut rows[u * words..(u + 1) * words];
        for &v in list {
            row[v as usize / 64] |= 1 << (v % 64);
        }
    }
    let per_source = exec.map_range(0..n, |s| {
        let mut out = vec![UNREACHABLE; n];
        let mut visited = vec![0u64; words];
        let mut next = vec![0u64; words];
        let mut frontier = vec![s];
        visited[s / 64] |= 1 << (s % 64);
        out[s] = 0;
        let mut level: u16 = 0;
        while !frontier.is_empty() {
            level += 1;
            next.iter_mut().for_each(|w| *w = 0);
            for &u in &frontier {
                let row = &rows[u * words..(u + 1) * words];
                for (acc, r) in next.iter_mut().zip(row) {
                    *acc |= r;
                }
            }
            frontier.clear();
            for (i, (acc, seen)) in next.iter_mut().zip(visited.iter_mut()).enumerate() {
                let mut fresh = *acc & !*seen;
                *seen |= fresh;
                while fresh != 0 {
                    let bit = fresh.trailing_zeros() as usize;
                    fresh &= fresh - 1;
                    let v = i * 64 + bit;
                    out[v] = level;
                    frontier.push(v);
                }
            }
        }
        out
    });
    DistanceMatrix {
        n,
        dist: per_source.concat(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(family: Family, n: usize) -> Graph {
        build(&GraphSpec::new(family, n)).unwrap()
    }

    #[test]
    fn complete_four() {
        let c = g(Family::Complete, 4);
        assert_eq!(c.edge_count(), 6);
        assert_eq!(c.diameter().unwrap(), 1);
        assert_eq!(c.diameter_pairs().unwrap().len(), 6);
    }

    #[test]
    fn hypercube_eight() {
        let h = g(Family::Hypercube, 8);
        assert_eq!(h.edge_count(), 12);
        assert!((0..8).all(|v| h.degree(v) == 3));
        let pairs = h.diameter_pairs().unwrap();
        let antipodes: Vec<(u32, u32)> = (0..4).map(|i| (i, i ^ 7)).collect();
        assert_eq!(pairs, antipodes);
    }

    #[test]
    fn star_eight() {
        let s = g(Family::Star, 8);
        assert_eq!(s.edge_count(), 7);
        assert_eq!(s.degree(0), 7);
        assert!((1..8).all(|v| s.degree(v) == 1));
        assert!((s.mean_degree() - 1.75).abs() < 1e-15);
    }

    #[test]
    fn diameters() {
        assert_eq!(g(Family::Hypercube, 16).diameter().unwrap(), 4);
        assert_eq!(g(Family::Star, 64).diameter().unwrap(), 2);
        assert_eq!(g(Family::Tree, 15).diameter().unwrap(), 6);
    }

    #[test]
    fn mean_degrees() {
        assert_eq!(g(Family::Complete, 16).mean_degree(), 15.0);
        assert_eq!(g(Family::Hypercube, 32).mean_degree(), 5.0);
    }

    #[test]
    fn star_five_leaf_pairs() {
        let pairs = g(Family::Star, 5).diameter_pairs().unwrap();
        let leaves: Vec<(u32, u32)> = (1..5)
            .flat_map(|a| (a + 1..5).map(move |b| (a, b)))
            .collect();
        assert_eq!(pairs, leaves);
    }

    #[test]
    fn ring_lattice_is_circulant() {
        let r = g(Family::RingLattice { w: 4 }, 10);
        assert!((0..10).all(|v| r.degree(v) == 4));
        assert!(r.has_edge(0, 9) && r.has_edge(0, 8) && !r.has_edge(0, 7));
    }

    #[test]
    fn rejects_bad_specs() {
        let err = |f: Family, n| build(&GraphSpec::new(f, n)).unwrap_err().kind();
        assert_eq!(err(Family::Hypercube, 12), "NonPowerOfTwo");
        assert_eq!(err(Family::RingLattice { w: 3 }, 12), "OddWindow");
        assert_eq!(err(Family::RingLattice { w: 12 }, 12), "WindowOutOfRange");
        assert_eq!(err(Family::Complete, 1), "TooSmall");
        assert_eq!(err(Family::ErRandom { p: 0.0, force: false }, 16), "InvalidProbability");
        assert_eq!(err(Family::ErRandom { p: 0.05, force: false }, 16), "BelowConnectivityThreshold");
        assert_eq!(err(Family::Union { members: vec![Family::Star] }, 8), "EmptyUnion");
    }

    #[test]
    fn sparse_er_is_disconnected_or_forced() {
        // Far below threshold: almost surely disconnected.
        let spec = GraphSpec::new(Family::ErRandom { p: 0.01, force: true }, 64);
        assert!(matches!(build(&spec), Err(NipError::Disconnected)));
    }

    #[test]
    fn resampling_records_the_seed_used() {
        let spec = GraphSpec::new(Family::ErRandom { p: 3.0 / 8.0, force: false }, 8).with_seed(1);
        let graph = build_resampled(&spec, 64).unwrap();
        let used = graph.spec().unwrap().clone();
        assert_eq!(build(&used).unwrap(), graph);
    }

    #[test]
    fn union_deduplicates() {
        let u = g(
            Family::Union {
                members: vec![Family::Star, Family::Star, Family::RingLattice { w: 2 }],
            },
            8,
        );
        // 7 hub edges + 8 ring edges - 2 shared (0-1, 0-7).
        assert_eq!(u.edge_count(), 13);
    }

    #[test]
    fn bitset_and_plain_bfs_agree() {
        let spec = GraphSpec::new(
            Family::Union {
                members: vec![Family::RingLattice { w: 2 }, Family::ErRandom { p: 0.1, force: false }],
            },
            100,
        )
        .with_seed(3);
        let graph = build_resampled(&spec, 16).unwrap();
        for s in [0, 17, 99] {
            let plain = graph.bfs(s);
            let row = graph.distances().row(s);
            assert!(plain.iter().zip(row).all(|(&a, &b)| a == u32::from(b)));
        }
    }

    #[test]
    fn self_loops_do_not_change_degree_or_diameter() {
        let spec = GraphSpec::new(Family::Hypercube, 8).with_self_loops(true);
        let h = build(&spec).unwrap();
        assert_eq!(h.mean_degree(), 3.0);
        assert_eq!(h.walk_degree(0), 4);
        assert_eq!(h.diameter().unwrap(), 3);
        assert!(h.has_edge(2, 2));
    }
}

//! Information payload via the uniform random walk `M = D A`, where
//! `D = diag(1/deg)`. The walk that starts at `b` sits at `a` after
//! `dist(a, b)` steps with probability exactly `I_ab`.

use crate::error::{NipError, Result};
use crate::graph::Graph;
use crate::logp::{Prob, UNDERFLOW_FLOOR};
use crate::nip::paths::ln_shortest_path_payload;
use crate::par::Exec;

/// Row-stochastic transition matrix of the uniform walk on `g`, kept implicit
/// over the adjacency lists. Self-loops take part iff the graph carries them.
#[derive(Clone, Copy, Debug)]
pub struct TransitionMatrix<'g> {
    graph: &'g Graph,
}

impl<'g> TransitionMatrix<'g> {
    pub fn new(graph: &'g Graph) -> Self {
        TransitionMatrix { graph }
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    /// `v M`: one step of the distribution `v`.
    pub fn step(&self, v: &[f64]) -> Vec<f64> {
        let g = self.graph;
        let mut out = vec![0.0; g.n()];
        for (i, &mass) in v.iter().enumerate() {
            if mass == 0.0 {
                continue;
            }
            let share = mass / g.walk_degree(i) as f64;
            for &j in g.neighbors(i) {
                out[j as usize] += share;
            }
            if g.has_self_loops() {
                out[i] += share;
            }
        }
        out
    }

    /// Dense `n x n` matrix, row `i` holding the step distribution from `i`.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        (0..self.n())
            .map(|i| {
                let mut e = vec![0.0; self.n()];
                e[i] = 1.0;
                self.step(&e)
            })
            .collect()
    }

    /// `M^k` by repeated dense multiplication. Intended for small graphs.
    pub fn dense_power(&self, k: u32) -> Vec<Vec<f64>> {
        let n = self.n();
        let m = self.to_dense();
        let mut acc: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        for _ in 0..k {
            acc = acc
                .iter()
                .map(|row| {
                    let mut out = vec![0.0; n];
                    for (l, &x) in row.iter().enumerate() {
                        if x != 0.0 {
                            for (o, &y) in out.iter_mut().zip(&m[l]) {
                                *o += x * y;
                            }
                        }
                    }
                    out
                })
                .collect();
        }
        acc
    }
}

/// Distributions `e_source M^t` for `t = 0..=steps`.
pub fn walk_distributions(g: &Graph, source: usize, steps: u32) -> Vec<Vec<f64>> {
    let m = TransitionMatrix::new(g);
    let mut v = vec![0.0; g.n()];
    v[source] = 1.0;
    let mut out = Vec::with_capacity(steps as usize + 1);
    out.push(v);
    for _ in 0..steps {
        let next = m.step(out.last().unwrap());
        out.push(next);
    }
    out
}

/// `I_ab` read off the walk from `b` after `dist(a, b)` steps. Entries below
/// the underflow floor are recomputed in log domain over the shortest-path
/// DAG.
pub fn walk_payload(g: &Graph, a: usize, b: usize) -> Result<Prob> {
    let dist = g.bfs(b);
    let steps = dist[a];
    if steps == u32::MAX {
        return Err(NipError::Disconnected);
    }
    let last = walk_distributions(g, b, steps).pop().unwrap();
    finish(g, a, b, last[a])
}

fn finish(g: &Graph, a: usize, b: usize, linear: f64) -> Result<Prob> {
    if linear >= UNDERFLOW_FLOOR {
        return Ok(Prob::from_linear(linear));
    }
    let ln = ln_shortest_path_payload(g, a, b)?;
    if ln.is_finite() {
        Ok(Prob::from_ln(ln))
    } else {
        Err(NipError::Underflow)
    }
}

/// Minimum payload over the diameter pairs, with the pair attaining it.
#[derive(Clone, Debug, PartialEq)]
pub struct WalkIp {
    pub ip: Prob,
    pub argmin_pair: (u32, u32),
    pub kappa: u32,
    pub pairs: usize,
    /// Set when reading each pair the other way round (`I_ba`) would give a
    /// smaller minimum.
    pub asymmetric: bool,
}

/// `IP(G) = min_{(a,b) in Delta} [(M^kappa)^T]_ab` over unordered diameter
/// pairs `a < b`. Ties (within 1e-12 relative) go to the lexicographically
/// smallest pair.
pub fn ip_random_walk(g: &Graph) -> Result<WalkIp> {
    ip_random_walk_with(g, Exec::default())
}

pub fn ip_random_walk_with(g: &Graph, exec: Exec) -> Result<WalkIp> {
    let kappa = g.distances_with(exec).max().ok_or(NipError::Disconnected)?;
    let dist = g.distances();
    let n = g.n();
    let sources: Vec<usize> = (1..n)
        .filter(|&b| dist.row(b)[..b].iter().any(|&d| u32::from(d) == kappa))
        .collect();
    let m = TransitionMatrix::new(g);
    let per_source: Vec<Result<Vec<(u32, u32, f64)>>> = exec.map_slice(&sources, |&b| {
        let mut v = vec![0.0; n];
        v[b] = 1.0;
        for _ in 0..kappa {
            v = m.step(&v);
        }
        dist.row(b)[..b]
            .iter()
            .enumerate()
            .filter(|(_, &d)| u32::from(d) == kappa)
            .map(|(a, _)| finish(g, a, b, v[a]).map(|p| (a as u32, b as u32, p.ln)))
            .collect()
    });
    let mut values = Vec::new();
    for chunk in per_source {
        values.extend(chunk?);
    }
    values.sort_by_key(|&(a, b, _)| (a, b));

    let min_ln = values.iter().map(|v| v.2).fold(f64::INFINITY, f64::min);
    let &(a, b, _) = values
        .iter()
        .find(|v| v.2 - min_ln <= 1e-12)
        .expect("connected graph on >= 2 nodes has a diameter pair");
    let reverse_min = values
        .iter()
        .map(|&(a, b, ln)| {
            ln + (g.walk_degree(b as usize) as f64).ln() - (g.walk_degree(a as usize) as f64).ln()
        })
        .fold(f64::INFINITY, f64::min);
    let asymmetric = reverse_min < min_ln - 1e-12;
    if asymmetric {
        log::warn!(
            "payload minimum depends on pair orientation: ln I_ab = {min_ln}, ln I_ba = {reverse_min}"
        );
    }
    Ok(WalkIp {
        ip: Prob::from_ln(min_ln),
        argmin_pair: (a, b),
        kappa,
        pairs: values.len(),
        asymmetric,
    })
}

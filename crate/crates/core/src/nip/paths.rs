//! Explicit shortest-path enumeration: the oracle for the walk formulation.
//!
//! The payload of a path `a = v0, v1, ..., vL = b` is `prod_{i>=1} 1/deg(v_i)`,
//! the source's own degree left out.

use serde::Serialize;

use crate::error::{NipError, Result};
use crate::graph::Graph;
use crate::logp::{log_sum_exp, Prob};

pub const DEFAULT_PATH_CAP: u64 = 10_000_000;

/// Every shortest path from `source` to `target` with its log payload.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PathSet {
    pub source: u32,
    pub target: u32,
    pub length: u32,
    pub paths: Vec<Vec<u32>>,
    pub ln_payloads: Vec<f64>,
}

impl PathSet {
    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    pub fn ln_total(&self) -> f64 {
        log_sum_exp(self.ln_payloads.iter().copied())
    }

    pub fn total(&self) -> Prob {
        Prob::from_ln(self.ln_total())
    }
}

fn distances_to(g: &Graph, target: usize, source: usize) -> Result<Vec<u32>> {
    let d = g.bfs(target);
    if d[source] == u32::MAX {
        return Err(NipError::Disconnected);
    }
    Ok(d)
}

fn next_hops<'a>(g: &'a Graph, d: &'a [u32], v: usize) -> impl Iterator<Item = usize> + 'a {
    g.neighbors(v)
        .iter()
        .map(|&u| u as usize)
        .filter(move |&u| d[v].checked_sub(1) == Some(d[u]))
}

/// Number of shortest paths from `a` to `b`, as `f64` so it cannot overflow.
pub fn count_shortest_paths(g: &Graph, a: usize, b: usize) -> Result<f64> {
    let d = distances_to(g, b, a)?;
    let mut order: Vec<usize> = (0..g.n()).filter(|&v| d[v] <= d[a]).collect();
    order.sort_by_key(|&v| d[v]);
    let mut count = vec![0.0f64; g.n()];
    count[b] = 1.0;
    for &v in order.iter().skip(1) {
        count[v] = next_hops(g, &d, v).map(|u| count[u]).sum();
    }
    Ok(count[a])
}

/// `ln I_ab` by dynamic programming over the shortest-path DAG toward `b`,
/// entirely in log domain. Never underflows.
pub fn ln_shortest_path_payload(g: &Graph, a: usize, b: usize) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let d = distances_to(g, b, a)?;
    let mut order: Vec<usize> = (0..g.n()).filter(|&v| d[v] < d[a]).collect();
    order.sort_by_key(|&v| d[v]);
    // q[v]: log payload of all shortest paths v -> b, v's own degree included.
    let mut q = vec![f64::NEG_INFINITY; g.n()];
    for &v in &order {
        let ln_deg = (g.walk_degree(v) as f64).ln();
        q[v] = if v == b {
            -ln_deg
        } else {
            log_sum_exp(next_hops(g, &d, v).map(|u| q[u])) - ln_deg
        };
    }
    Ok(log_sum_exp(next_hops(g, &d, a).map(|u| q[u])))
}

/// Enumerates all shortest paths from `a` to `b`, failing with
/// [`NipError::PathExplosion`] beyond [`DEFAULT_PATH_CAP`] paths.
pub fn ip_path_enum(g: &Graph, a: usize, b: usize) -> Result<PathSet> {
    ip_path_enum_capped(g, a, b, DEFAULT_PATH_CAP)
}

pub fn ip_path_enum_capped(g: &Graph, a: usize, b: usize, cap: u64) -> Result<PathSet> {
    let count = count_shortest_paths(g, a, b)?;
    if count > cap as f64 {
        return Err(NipError::PathExplosion { count, cap });
    }
    let d = distances_to(g, b, a)?;
    let ln_inv_deg: Vec<f64> = (0..g.n())
        .map(|v| -(g.walk_degree(v) as f64).ln())
        .collect();

    let mut paths = Vec::with_capacity(count as usize);
    let mut ln_payloads = Vec::with_capacity(count as usize);
    let mut path = vec![a];
    let mut ln = vec![0.0];
    // Explicit DFS; each frame holds the candidate next hops still to try.
    let mut stack: Vec<Vec<usize>> = vec![next_hops(g, &d, a).collect()];
    if a == b {
        paths.push(path.iter().map(|&v| v as u32).collect());
        ln_payloads.push(0.0);
        stack.clear();
    }
    while let Some(frame) = stack.last_mut() {
        let Some(u) = frame.pop() else {
            stack.pop();
            path.pop();
            ln.pop();
            continue;
        };
        let acc = ln.last().unwrap() + ln_inv_deg[u];
        if u == b {
            let mut p: Vec<u32> = path.iter().map(|&v| v as u32).collect();
            p.push(u as u32);
            paths.push(p);
            ln_payloads.push(acc);
            continue;
        }
        path.push(u);
        ln.push(acc);
        stack.push(next_hops(g, &d, u).collect());
    }
    let mut order: Vec<usize> = (0..paths.len()).collect();
    order.sort_by(|&i, &j| paths[i].cmp(&paths[j]));
    let paths: Vec<Vec<u32>> = order.iter().map(|&i| paths[i].clone()).collect();
    let ln_payloads = order.iter().map(|&i| ln_payloads[i]).collect();

    Ok(PathSet {
        source: a as u32,
        target: b as u32,
        length: d[a],
        paths,
        ln_payloads,
    })
}

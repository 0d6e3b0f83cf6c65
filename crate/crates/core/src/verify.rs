//! Self-checks that the CLI's `verify` command and the acceptance tests share:
//! walk/path/simulation agreement on every pair, and monotone block scaling.

use serde::Serialize;

use crate::error::Result;
use crate::graph::{build_resampled, Graph};
use crate::logp::{rel_diff_ln, Prob};
use crate::nip::{block_scaled_nip, ip_path_enum, walk_distributions, BlockScaled};
use crate::par::Exec;
use crate::sim::first_reach;
use crate::topology::{Topology, TopologyParams};

pub const DUALITY_TOLERANCE: f64 = 1e-10;
pub const DUALITY_SIZES: [usize; 4] = [8, 16, 32, 64];
pub const SCALING_N0: [usize; 4] = [128, 256, 512, 1024];

/// One ordered pair `(a, b)`: `b`'s walk read at `a`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairCheck {
    pub a: u32,
    pub b: u32,
    pub step: u32,
    pub walk: Prob,
    pub paths: Prob,
    pub first_reach: Prob,
    pub rel_err: f64,
    /// Walk mass at `a` was exactly zero before `step`.
    pub zero_before: bool,
}

impl PairCheck {
    pub fn passes(&self) -> bool {
        self.rel_err <= DUALITY_TOLERANCE && self.zero_before
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DualityRow {
    pub family: String,
    pub n: usize,
    pub pairs: usize,
    pub failures: usize,
    pub max_rel_err: f64,
    /// The pair with the largest disagreement.
    pub worst: Option<PairCheck>,
}

impl DualityRow {
    pub fn passes(&self) -> bool {
        self.failures == 0
    }
}

/// Checks every ordered pair of `g` (self-pairs included).
pub fn duality_pairs(g: &Graph) -> Result<Vec<PairCheck>> {
    let n = g.n();
    let mut out = Vec::with_capacity(n * n);
    for b in 0..n {
        let dist = g.bfs(b);
        let horizon = dist.iter().copied().max().unwrap_or(0);
        if horizon == u32::MAX {
            return Err(crate::error::NipError::Disconnected);
        }
        let walk = walk_distributions(g, b, horizon);
        for a in 0..n {
            let step = dist[a];
            let w = Prob::from_linear(walk[step as usize][a]);
            let paths = ip_path_enum(g, a, b)?.total();
            let (_, reach) = first_reach(g, a, b)?;
            let rel_err = rel_diff_ln(w.ln, paths.ln).max(rel_diff_ln(reach.ln, paths.ln));
            let zero_before = walk[..step as usize].iter().all(|v| v[a] == 0.0);
            out.push(PairCheck {
                a: a as u32,
                b: b as u32,
                step,
                walk: w,
                paths,
                first_reach: reach,
                rel_err,
                zero_before,
            });
        }
    }
    Ok(out)
}

pub fn duality_row(label: &str, g: &Graph) -> Result<DualityRow> {
    let checks = duality_pairs(g)?;
    let failures = checks.iter().filter(|c| !c.passes()).count();
    let worst = checks
        .iter()
        .max_by(|x, y| x.rel_err.total_cmp(&y.rel_err))
        .cloned();
    Ok(DualityRow {
        family: label.to_string(),
        n: g.n(),
        pairs: checks.len(),
        failures,
        max_rel_err: worst.as_ref().map_or(0.0, |w| w.rel_err),
        worst,
    })
}

/// Every topology at every size in [`DUALITY_SIZES`] up to `max_n`. Random
/// families are resampled until connected, starting from `seed`.
pub fn duality_suite(max_n: usize, seed: u64, exec: Exec) -> Result<Vec<DualityRow>> {
    let cells: Vec<(Topology, usize)> = Topology::ALL
        .iter()
        .flat_map(|&t| {
            DUALITY_SIZES
                .iter()
                .filter(move |&&n| n <= max_n)
                .map(move |&n| (t, n))
        })
        .collect();
    let params = TopologyParams {
        seed,
        ..TopologyParams::default()
    };
    exec.map_slice(&cells, |&(t, n)| {
        let g = build_resampled(&t.spec(n, &params), 64)?;
        duality_row(t.name(), &g)
    })
    .into_iter()
    .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingTable {
    pub family: Topology,
    pub n0: usize,
    pub rows: Vec<BlockScaled>,
    pub strictly_decreasing: bool,
}

/// `block_scaled_nip` over `b = 2, 4, ..., n0/2`.
pub fn scaling_table(t: Topology, n0: usize, refined_star: bool) -> Result<ScalingTable> {
    let rows = std::iter::successors(Some(2usize), |&b| Some(b * 2))
        .take_while(|&b| b <= n0 / 2)
        .map(|b| block_scaled_nip(t, n0, b, None, refined_star))
        .collect::<Result<Vec<_>>>()?;
    let strictly_decreasing = rows.windows(2).all(|w| w[1].ln_nip < w[0].ln_nip);
    Ok(ScalingTable {
        family: t,
        n0,
        rows,
        strictly_decreasing,
    })
}

/// Star and Hypercube at each of [`SCALING_N0`].
pub fn scaling_suite(refined_star: bool) -> Result<Vec<ScalingTable>> {
    [Topology::Star, Topology::Hypercube]
        .iter()
        .flat_map(|&t| SCALING_N0.iter().map(move |&n0| scaling_table(t, n0, refined_star)))
        .collect()
}

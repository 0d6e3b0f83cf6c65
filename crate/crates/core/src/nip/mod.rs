//! Normalized information payload: `NIP = IP / CC` with `CC = rho * kappa`.

pub mod asymptotic;
pub mod paths;
pub mod walk;

use serde::{Deserialize, Serialize};

use crate::error::{NipError, Result};
use crate::graph::{build_resampled, Graph, GraphSpec};
use crate::logp::{log_sum_exp, Prob};
use crate::par::Exec;

pub use asymptotic::{
    asymptotic_nip, asymptotic_terms, block_scaled_nip, nip_ratio_table, scaling_depth,
    AsymptoticTerms, BlockScaled, RatioRow,
};
pub use paths::{
    count_shortest_paths, ip_path_enum, ip_path_enum_capped, ln_shortest_path_payload, PathSet,
    DEFAULT_PATH_CAP,
};
pub use walk::{
    ip_random_walk, ip_random_walk_with, walk_distributions, walk_payload, TransitionMatrix,
    WalkIp,
};

/// Seeds averaged by [`expected_nip`] unless told otherwise.
pub const DEFAULT_SAMPLES: u32 = 32;

/// Resampling attempts per seed when a random instance comes out disconnected.
const RESAMPLE_ATTEMPTS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    RandomWalk,
    PathEnum,
    Asymptotic,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NipReport {
    pub family: String,
    pub n: usize,
    pub method: Method,
    pub rho: f64,
    pub kappa: f64,
    pub cc: f64,
    pub ip: f64,
    pub ln_ip: f64,
    pub nip: f64,
    pub ln_nip: f64,
    /// IP was divided by `n - 1` for the hub.
    pub refined: bool,
    pub argmin_pair: Option<(u32, u32)>,
    /// Instances averaged; 0 for closed forms, 1 for a single graph.
    pub samples: u32,
    pub asymmetric: bool,
}

impl NipReport {
    pub fn ln_cc(&self) -> f64 {
        self.cc.ln()
    }

    /// One JSON object on a single line, no trailing newline.
    pub fn to_json_line(&self) -> String {
        let mut v = serde_json::to_value(self).expect("report serializes");
        v["ln_cc"] = serde_json::json!(self.ln_cc());
        serde_json::to_string(&v).expect("report serializes")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Complexity {
    pub rho: f64,
    pub kappa: u32,
    pub cc: f64,
}

/// `rho = 2|E|/n` (self-loops excluded), `kappa` = diameter, `cc = rho * kappa`.
pub fn cc(g: &Graph) -> Result<Complexity> {
    let kappa = g.diameter()?;
    let rho = g.mean_degree();
    Ok(Complexity {
        rho,
        kappa,
        cc: rho * kappa as f64,
    })
}

fn label(g: &Graph) -> String {
    g.spec()
        .map(|s| s.family.label())
        .unwrap_or_else(|| "imported".to_string())
}

fn assemble(
    g: &Graph,
    method: Method,
    c: Complexity,
    ln_ip: f64,
    refined_star: bool,
    argmin_pair: Option<(u32, u32)>,
    asymmetric: bool,
) -> NipReport {
    let refined = refined_star && g.has_hub();
    let ln_ip = if refined {
        ln_ip - ((g.n() - 1) as f64).ln()
    } else {
        ln_ip
    };
    let ip = Prob::from_ln(ln_ip);
    let nip = Prob::from_ln(ln_ip - c.cc.ln());
    NipReport {
        family: label(g),
        n: g.n(),
        method,
        rho: c.rho,
        kappa: c.kappa as f64,
        cc: c.cc,
        ip: ip.linear,
        ln_ip,
        nip: nip.linear,
        ln_nip: nip.ln,
        refined,
        argmin_pair,
        samples: 1,
        asymmetric,
    }
}

/// Exact NIP through the random walk. With `refined_star`, graphs whose spec
/// contains a hub have IP divided by `n - 1`.
pub fn nip(g: &Graph, refined_star: bool) -> Result<NipReport> {
    nip_with(g, refined_star, Exec::default())
}

pub fn nip_with(g: &Graph, refined_star: bool, exec: Exec) -> Result<NipReport> {
    let w = ip_random_walk_with(g, exec)?;
    let c = cc(g)?;
    Ok(assemble(
        g,
        Method::RandomWalk,
        c,
        w.ip.ln,
        refined_star,
        Some(w.argmin_pair),
        w.asymmetric,
    ))
}

/// Exact NIP by enumerating every shortest path of every diameter pair.
/// Only practical on small graphs; fails with `PathExplosion` past `cap`
/// paths for any single pair.
pub fn nip_by_paths(g: &Graph, refined_star: bool, cap: u64) -> Result<NipReport> {
    let c = cc(g)?;
    let mut best: Option<(f64, (u32, u32))> = None;
    for (a, b) in g.diameter_pairs()? {
        let ln = ip_path_enum_capped(g, a as usize, b as usize, cap)?.ln_total();
        if best.is_none_or(|(m, _)| ln < m - 1e-12) {
            best = Some((ln, (a, b)));
        }
    }
    let (ln_ip, pair) = best.ok_or(NipError::Disconnected)?;
    Ok(assemble(
        g,
        Method::PathEnum,
        c,
        ln_ip,
        refined_star,
        Some(pair),
        false,
    ))
}

/// Average over `samples` instances of a random spec, seeds `seed..seed+samples`.
/// IP is averaged in linear space via log-sum-exp, CC arithmetically, and the
/// reduction runs in seed order regardless of `exec`.
pub fn expected_nip(
    spec: &GraphSpec,
    samples: u32,
    refined_star: bool,
    exec: Exec,
) -> Result<NipReport> {
    if samples == 0 {
        return Err(NipError::TooSmall { n: 0, min: 1 });
    }
    let seeds: Vec<u64> = (0..samples as u64)
        .map(|i| spec.seed.wrapping_add(i))
        .collect();
    let runs: Vec<Result<NipReport>> = exec.map_slice(&seeds, |&seed| {
        let g = build_resampled(&spec.clone().with_seed(seed), RESAMPLE_ATTEMPTS)?;
        nip_with(&g, refined_star, Exec::Sequential)
    });
    let runs = runs.into_iter().collect::<Result<Vec<_>>>()?;
    let k = runs.len() as f64;
    let ln_ip = log_sum_exp(runs.iter().map(|r| r.ln_ip)) - k.ln();
    let rho = runs.iter().map(|r| r.rho).sum::<f64>() / k;
    let kappa = runs.iter().map(|r| r.kappa).sum::<f64>() / k;
    let cc = runs.iter().map(|r| r.cc).sum::<f64>() / k;
    let ip = Prob::from_ln(ln_ip);
    let nip = Prob::from_ln(ln_ip - cc.ln());
    Ok(NipReport {
        family: spec.family.label(),
        n: spec.n,
        method: Method::RandomWalk,
        rho,
        kappa,
        cc,
        ip: ip.linear,
        ln_ip,
        nip: nip.linear,
        ln_nip: nip.ln,
        refined: runs[0].refined,
        argmin_pair: None,
        samples,
        asymmetric: runs.iter().any(|r| r.asymmetric),
    })
}

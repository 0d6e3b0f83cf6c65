//! Uniform attention stacked layer by layer, simulated at the distribution
//! level: the mass that token `b` contributes to token `a` after `t` layers is
//! the `t`-step walk probability from `b` to `a`.

use serde::Serialize;

use crate::error::{NipError, Result};
use crate::graph::{Graph, GraphSpec};
use crate::logp::Prob;
use crate::nip::{walk_distributions, walk_payload};

/// Distributions `v_0 = e_source, v_{t+1} = v_t M` for `t < steps`.
pub fn propagate(g: &Graph, source: usize, steps: u32) -> Result<Vec<Vec<f64>>> {
    if source >= g.n() {
        return Err(NipError::IndexOutOfRange {
            index: source,
            len: g.n(),
        });
    }
    if steps == 0 {
        return Err(NipError::TooSmall { n: 0, min: 1 });
    }
    if !g.is_connected() {
        return Err(NipError::Disconnected);
    }
    Ok(walk_distributions(g, source, steps))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PropagationTrace {
    pub spec: Option<GraphSpec>,
    /// Receiving token.
    pub a: u32,
    /// Walk source.
    pub b: u32,
    /// `payloads[t]`: mass of `b`'s walk at `a` after `t` steps.
    pub payloads: Vec<f64>,
    pub first_reach_step: u32,
    pub first_reach_payload: Prob,
}

/// Traces `b`'s walk as seen from `a` for `steps` steps.
pub fn trace(g: &Graph, a: usize, b: usize, steps: u32) -> Result<PropagationTrace> {
    if a >= g.n() {
        return Err(NipError::IndexOutOfRange { index: a, len: g.n() });
    }
    let payloads = propagate(g, b, steps)?.iter().map(|v| v[a]).collect();
    let (first_reach_step, first_reach_payload) = first_reach(g, a, b)?;
    Ok(PropagationTrace {
        spec: g.spec().cloned(),
        a: a as u32,
        b: b as u32,
        payloads,
        first_reach_step,
        first_reach_payload,
    })
}

/// `(dist(a, b), I_ab)`: the first step at which `b`'s walk can be at `a`,
/// and the mass it has there.
pub fn first_reach(g: &Graph, a: usize, b: usize) -> Result<(u32, Prob)> {
    for v in [a, b] {
        if v >= g.n() {
            return Err(NipError::IndexOutOfRange { index: v, len: g.n() });
        }
    }
    let step = g.bfs(b)[a];
    if step == u32::MAX {
        return Err(NipError::Disconnected);
    }
    Ok((step, walk_payload(g, a, b)?))
}

/// Smallest `L` with `(A + I)^L` all true, by boolean closure over bitsets.
pub fn receptive_field_layers(g: &Graph) -> Result<u32> {
    let n = g.n();
    let words = n.div_ceil(64);
    let mut reach = vec![0u64; n * words];
    for i in 0..n {
        reach[i * words + i / 64] |= 1 << (i % 64);
    }
    let full = |r: &[u64]| {
        (0..n).all(|i| {
            let row = &r[i * words..(i + 1) * words];
            let ones: u32 = row.iter().map(|w| w.count_ones()).sum();
            ones as usize == n
        })
    };
    let mut layers = 0;
    while !full(&reach) {
        let mut next = reach.clone();
        for i in 0..n {
            for &j in g.neighbors(i) {
                let j = j as usize;
                for w in 0..words {
                    next[i * words + w] |= reach[j * words + w];
                }
            }
        }
        if next == reach {
            return Err(NipError::Disconnected);
        }
        reach = next;
        layers += 1;
    }
    Ok(layers)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build, Family};
    use crate::topology::{Topology, TopologyParams};

    fn g(family: Family, n: usize) -> Graph {
        build(&GraphSpec::new(family, n)).unwrap()
    }

    #[test]
    fn propagation_examples() {
        let path = Graph::from_edges(3, [(0, 1), (1, 2)], false).unwrap();
        assert_eq!(propagate(&path, 2, 2).unwrap()[2][0], 0.5);
        let h = propagate(&g(Family::Hypercube, 8), 7, 3).unwrap();
        assert!((h[3][0] - 2.0 / 9.0).abs() < 1e-15);
        let c = propagate(&g(Family::Complete, 4), 1, 1).unwrap();
        for j in [0, 2, 3] {
            assert!((c[1][j] - 1.0 / 3.0).abs() < 1e-15);
        }
        assert_eq!(c[1][1], 0.0);
    }

    #[test]
    fn first_reach_examples() {
        let (s, p) = first_reach(&g(Family::Star, 8), 1, 2).unwrap();
        assert_eq!(s, 2);
        assert!((p.linear - 1.0 / 7.0).abs() < 1e-15);
        let (s, p) = first_reach(&g(Family::Complete, 4), 0, 1).unwrap();
        assert_eq!(s, 1);
        assert!((p.linear - 1.0 / 3.0).abs() < 1e-15);
        let (s, p) = first_reach(&g(Family::Hypercube, 16), 0, 15).unwrap();
        assert_eq!(s, 4);
        assert!((p.linear - 24.0 / 256.0).abs() < 1e-15);
    }

    #[test]
    fn trace_zero_before_reach() {
        let t = trace(&g(Family::Tree, 15), 7, 14, 8).unwrap();
        assert_eq!(t.first_reach_step, 6);
        assert!(t.payloads[..6].iter().all(|&x| x == 0.0));
        assert_eq!(t.payloads[6], t.first_reach_payload.linear);
    }

    #[test]
    fn receptive_fields() {
        assert_eq!(receptive_field_layers(&g(Family::Complete, 9)).unwrap(), 1);
        assert_eq!(receptive_field_layers(&g(Family::Hypercube, 1024)).unwrap(), 10);
        let params = TopologyParams {
            w: Some(8),
            ..TopologyParams::default()
        };
        let lf = build(&Topology::Longformer.spec(64, &params)).unwrap();
        assert_eq!(receptive_field_layers(&lf).unwrap(), 2);
    }

    #[test]
    fn errors() {
        let split = Graph::from_edges(4, [(0, 1), (2, 3)], false).unwrap();
        assert!(matches!(receptive_field_layers(&split), Err(NipError::Disconnected)));
        assert!(matches!(propagate(&split, 0, 2), Err(NipError::Disconnected)));
        assert!(matches!(first_reach(&split, 0, 3), Err(NipError::Disconnected)));
    }
}

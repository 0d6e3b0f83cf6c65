//! Named attention topologies: the graph families scored side by side, with
//! the parameter conventions used throughout (window `n/16`, edge
//! probability `log2(n)/n`).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{NipError, Result};
use crate::graph::{connectivity_threshold, Family, GraphSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Topology {
    Complete,
    #[serde(rename = "er")]
    ErRandom,
    Tree,
    Star,
    #[serde(rename = "ring")]
    RingLattice,
    RingEr,
    Longformer,
    #[serde(rename = "bigbird")]
    BigBird,
    Hypercube,
}

impl Topology {
    pub const ALL: [Topology; 9] = [
        Topology::Complete,
        Topology::ErRandom,
        Topology::Tree,
        Topology::Star,
        Topology::RingLattice,
        Topology::RingEr,
        Topology::Longformer,
        Topology::BigBird,
        Topology::Hypercube,
    ];

    /// The families with a closed-form estimate (everything but the bare ring).
    pub const SCORED: [Topology; 8] = [
        Topology::Complete,
        Topology::ErRandom,
        Topology::Tree,
        Topology::Star,
        Topology::RingEr,
        Topology::Longformer,
        Topology::BigBird,
        Topology::Hypercube,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Topology::Complete => "complete",
            Topology::ErRandom => "er",
            Topology::Tree => "tree",
            Topology::Star => "star",
            Topology::RingLattice => "ring",
            Topology::RingEr => "ring-er",
            Topology::Longformer => "longformer",
            Topology::BigBird => "bigbird",
            Topology::Hypercube => "hypercube",
        }
    }

    pub fn is_random(self) -> bool {
        matches!(self, Topology::ErRandom | Topology::RingEr | Topology::BigBird)
    }

    pub fn has_hub(self) -> bool {
        matches!(self, Topology::Star | Topology::Longformer | Topology::BigBird)
    }

    pub fn uses_window(self) -> bool {
        matches!(
            self,
            Topology::RingLattice | Topology::RingEr | Topology::Longformer | Topology::BigBird
        )
    }

    pub fn family(self, n: usize, params: &TopologyParams) -> Family {
        let ring = || Family::RingLattice {
            w: params.w.unwrap_or_else(|| default_window(n)),
        };
        let er = || Family::ErRandom {
            p: params.p.unwrap_or_else(|| default_edge_probability(n, params.p_multiplier)),
            force: params.force,
        };
        match self {
            Topology::Complete => Family::Complete,
            Topology::ErRandom => er(),
            Topology::Tree => Family::Tree,
            Topology::Star => Family::Star,
            Topology::RingLattice => ring(),
            Topology::RingEr => Family::Union {
                members: vec![ring(), er()],
            },
            Topology::Longformer => Family::Union {
                members: vec![ring(), Family::Star],
            },
            Topology::BigBird => Family::Union {
                members: vec![ring(), Family::Star, er()],
            },
            Topology::Hypercube => Family::Hypercube,
        }
    }

    pub fn spec(self, n: usize, params: &TopologyParams) -> GraphSpec {
        GraphSpec {
            family: self.family(n, params),
            n,
            seed: params.seed,
            self_loops: params.self_loops,
        }
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Topology {
    type Err = NipError;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        let t = match lower.as_str() {
            "complete" => Topology::Complete,
            "er" | "er-random" | "erdos-renyi" => Topology::ErRandom,
            "tree" => Topology::Tree,
            "star" | "global" => Topology::Star,
            "ring" | "ring-lattice" | "window" => Topology::RingLattice,
            "ring-er" | "ring+er" => Topology::RingEr,
            "longformer" => Topology::Longformer,
            "bigbird" => Topology::BigBird,
            "hypercube" | "cube" => Topology::Hypercube,
            _ => return Err(NipError::UnsupportedFamily(s.to_string())),
        };
        Ok(t)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TopologyParams {
    /// Ring-lattice window; `None` means [`default_window`].
    pub w: Option<usize>,
    /// E-R edge probability; `None` means `p_multiplier * log2(n)/n`.
    pub p: Option<f64>,
    pub p_multiplier: f64,
    pub force: bool,
    pub seed: u64,
    pub self_loops: bool,
}

impl Default for TopologyParams {
    fn default() -> Self {
        TopologyParams {
            w: None,
            p: None,
            p_multiplier: 1.0,
            force: false,
            seed: 0,
            self_loops: false,
        }
    }
}

/// Window `n/16` (Longformer's ratio at length 4096), rounded down to even
/// and at least 2 so that small graphs still form a ring.
pub fn default_window(n: usize) -> usize {
    ((n / 16) & !1).max(2)
}

/// `multiplier * log2(n)/n`, capped at 1.
pub fn default_edge_probability(n: usize, multiplier: f64) -> f64 {
    (multiplier * connectivity_threshold(n)).min(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for t in Topology::ALL {
            assert_eq!(t.name().parse::<Topology>().unwrap(), t);
        }
        assert!("butterfly".parse::<Topology>().is_err());
    }

    #[test]
    fn window_convention() {
        assert_eq!(default_window(2048), 128);
        assert_eq!(default_window(4096), 256);
        assert_eq!(default_window(16), 2);
        assert_eq!(default_window(8), 2);
    }

    #[test]
    fn longformer_is_ring_plus_star() {
        let spec = Topology::Longformer.spec(64, &TopologyParams::default());
        assert!(spec.family.has_hub());
        assert!(!spec.family.is_random());
        assert_eq!(
            spec.family,
            Family::Union {
                members: vec![Family::RingLattice { w: 4 }, Family::Star]
            }
        );
    }
}

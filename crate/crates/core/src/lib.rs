//! Attention topologies as graphs, scored by normalized information payload.

pub mod cube;
pub mod edgelist;
pub mod error;
pub mod graph;
pub mod logp;
pub mod mask;
pub mod nip;
pub mod par;
pub mod sim;
pub mod topology;
pub mod verify;

pub use error::{NipError, Result};
pub use graph::{build, build_resampled, Family, Graph, GraphSpec};
pub use nip::{nip, NipReport};
pub use par::Exec;
pub use topology::{Topology, TopologyParams};

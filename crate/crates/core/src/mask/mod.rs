//! Block-sparse attention masks: which `b x b` tiles of the `n x n` score
//! matrix are computed.

mod format;

use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cube::build_mapping;
use crate::error::{NipError, Result};

pub use format::{deserialize, serialize, sidecar_json, Sidecar, FORMAT_VERSION, HEADER_LEN, MAGIC};

pub const DEFAULT_BLOCK: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pattern {
    Complete,
    Global,
    Window3,
    RingRandom,
    Longformer,
    #[serde(rename = "bigbird")]
    BigBird,
    Hypercube,
}

impl Pattern {
    pub const ALL: [Pattern; 7] = [
        Pattern::Complete,
        Pattern::Global,
        Pattern::Window3,
        Pattern::RingRandom,
        Pattern::Longformer,
        Pattern::BigBird,
        Pattern::Hypercube,
    ];

    pub fn id(self) -> u8 {
        match self {
            Pattern::Complete => 0,
            Pattern::Global => 1,
            Pattern::Window3 => 2,
            Pattern::RingRandom => 3,
            Pattern::Longformer => 4,
            Pattern::BigBird => 5,
            Pattern::Hypercube => 6,
        }
    }

    pub fn from_id(id: u8) -> Option<Pattern> {
        Pattern::ALL.get(id as usize).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            Pattern::Complete => "complete",
            Pattern::Global => "global",
            Pattern::Window3 => "window3",
            Pattern::RingRandom => "ring-random",
            Pattern::Longformer => "longformer",
            Pattern::BigBird => "bigbird",
            Pattern::Hypercube => "hypercube",
        }
    }

    /// Random blocks per block-row, 0 for deterministic patterns.
    pub fn random_per_row(self) -> usize {
        match self {
            Pattern::BigBird => 4,
            Pattern::RingRandom => 5,
            _ => 0,
        }
    }

    pub fn is_random(self) -> bool {
        self.random_per_row() > 0
    }

    /// The deterministic part of a randomized pattern.
    pub fn base(self) -> Pattern {
        match self {
            Pattern::BigBird => Pattern::Longformer,
            Pattern::RingRandom => Pattern::Window3,
            p => p,
        }
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Pattern {
    type Err = NipError;

    fn from_str(s: &str) -> Result<Self> {
        let p = match s.to_ascii_lowercase().as_str() {
            "complete" | "dense" => Pattern::Complete,
            "global" | "star" => Pattern::Global,
            "window3" | "window" => Pattern::Window3,
            "ring-random" | "ringrandom" | "ring-er" => Pattern::RingRandom,
            "longformer" => Pattern::Longformer,
            "bigbird" => Pattern::BigBird,
            "hypercube" | "cube" => Pattern::Hypercube,
            _ => return Err(NipError::UnsupportedFamily(s.to_string())),
        };
        Ok(p)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlockMask {
    pattern: Pattern,
    n: u32,
    b: u32,
    seed: u64,
    /// Row-major, unique.
    blocks: Vec<(u32, u32)>,
}

fn check_grid(n: usize, b: usize) -> Result<usize> {
    if b == 0 || !n.is_multiple_of(b) || n / b < 2 || n > u32::MAX as usize {
        return Err(NipError::IndivisibleBlock { n, b });
    }
    Ok(n / b)
}

/// `(i, j)` with `i < j` for position `t` in the row-major upper triangle of
/// a `grid x grid` matrix.
fn upper_pair(mut t: usize, grid: usize) -> (u32, u32) {
    for i in 0..grid {
        let len = grid - 1 - i;
        if t < len {
            return (i as u32, (i + 1 + t) as u32);
        }
        t -= len;
    }
    unreachable!("triangle index out of range")
}

fn base_blocks(pattern: Pattern, grid: usize) -> Result<Vec<(u32, u32)>> {
    let g = grid as u32;
    let diag = (0..g).map(|i| (i, i));
    let global = (1..g).flat_map(|i| [(0, i), (i, 0)]);
    let band = (1..g).flat_map(|i| [(i - 1, i), (i, i - 1)]);
    let blocks: Vec<(u32, u32)> = match pattern {
        Pattern::Complete => (0..g).flat_map(|i| (0..g).map(move |j| (i, j))).collect(),
        Pattern::Global => diag.chain(global).collect(),
        Pattern::Window3 | Pattern::RingRandom => diag.chain(band).collect(),
        Pattern::Longformer | Pattern::BigBird => diag.chain(global).chain(band).collect(),
        Pattern::Hypercube => {
            if !grid.is_power_of_two() {
                return Err(NipError::NonPowerOfTwoGrid { grid });
            }
            let tm = build_mapping(grid)?.token_mask();
            (0..grid)
                .flat_map(|i| tm.row(i).iter().map(move |&j| (i as u32, j)))
                .collect()
        }
    };
    Ok(blocks)
}

/// Compiles `pattern` on `n` tokens with block size `b`.
///
/// Randomized patterns add `floor(B * r / 2)` distinct off-diagonal block
/// pairs, drawn uniformly from the upper triangle and mirrored, where `r` is
/// [`Pattern::random_per_row`].
pub fn compile(pattern: Pattern, n: usize, b: usize, seed: u64) -> Result<BlockMask> {
    let grid = check_grid(n, b)?;
    let mut blocks = base_blocks(pattern, grid)?;
    let r = pattern.random_per_row();
    if r > 0 {
        let triangle = grid * (grid - 1) / 2;
        let amount = (grid * r / 2).min(triangle);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for t in sample(&mut rng, triangle, amount) {
            let (i, j) = upper_pair(t, grid);
            blocks.push((i, j));
            blocks.push((j, i));
        }
    }
    blocks.sort_unstable();
    blocks.dedup();
    Ok(BlockMask {
        pattern,
        n: n as u32,
        b: b as u32,
        seed,
        blocks,
    })
}

impl BlockMask {
    /// Checks the structural invariants on already-decoded parts.
    pub fn from_parts(
        pattern: Pattern,
        n: u32,
        b: u32,
        seed: u64,
        blocks: Vec<(u32, u32)>,
    ) -> Result<BlockMask> {
        let grid = check_grid(n as usize, b as usize)
            .map_err(|_| NipError::CorruptPayload(format!("block size {b} does not tile {n}")))?
            as u32;
        if let Some(&(r, c)) = blocks.iter().find(|&&(r, c)| r >= grid || c >= grid) {
            return Err(NipError::CorruptPayload(format!(
                "block ({r}, {c}) outside {grid}x{grid} grid"
            )));
        }
        if blocks.windows(2).any(|w| w[0] >= w[1]) {
            return Err(NipError::CorruptPayload("blocks not sorted and unique".into()));
        }
        let mask = BlockMask {
            pattern,
            n,
            b,
            seed,
            blocks,
        };
        if let Some(i) = (0..grid).find(|&i| !mask.contains(i, i)) {
            return Err(NipError::CorruptPayload(format!("diagonal block {i} missing")));
        }
        if let Some(&(row, col)) = mask.blocks.iter().find(|&&(r, c)| !mask.contains(c, r)) {
            return Err(NipError::AsymmetryDetected { row, col });
        }
        Ok(mask)
    }

    pub fn pattern(&self) -> Pattern {
        self.pattern
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn b(&self) -> usize {
        self.b as usize
    }

    pub fn grid(&self) -> usize {
        (self.n / self.b) as usize
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn blocks(&self) -> &[(u32, u32)] {
        &self.blocks
    }

    pub fn count_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn contains(&self, row: u32, col: u32) -> bool {
        self.blocks.binary_search(&(row, col)).is_ok()
    }

    /// Whether token `i` may attend to token `j` under this mask.
    pub fn token_allowed(&self, i: usize, j: usize) -> bool {
        i < self.n() && j < self.n() && self.contains((i / self.b()) as u32, (j / self.b()) as u32)
    }

    /// `B^2 / |blocks|`.
    pub fn density_speedup(&self) -> f64 {
        let g = self.grid() as f64;
        g * g / self.blocks.len() as f64
    }
}

/// Closed-form block count of a deterministic pattern on a `grid x grid`
/// layout; `None` for randomized patterns.
pub fn expected_count(pattern: Pattern, grid: usize) -> Option<usize> {
    match pattern {
        Pattern::Complete => Some(grid * grid),
        Pattern::Global | Pattern::Window3 => Some(3 * grid - 2),
        Pattern::Longformer => Some(5 * grid - 6),
        Pattern::Hypercube => grid
            .is_power_of_two()
            .then(|| (grid.trailing_zeros() as usize + 1) * grid),
        Pattern::BigBird | Pattern::RingRandom => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_counts() {
        let c = |p, n, b| compile(p, n, b, 0).unwrap().count_blocks();
        assert_eq!(c(Pattern::Hypercube, 1024, 16), 448);
        assert_eq!(c(Pattern::Longformer, 4096, 16), 1274);
        assert_eq!(c(Pattern::Complete, 1024, 16), 4096);
        assert_eq!(c(Pattern::Global, 1024, 16), 190);
        assert_eq!(c(Pattern::Global, 4096, 16), 766);
        assert_eq!(c(Pattern::Hypercube, 2048, 16), 1024);
        for p in Pattern::ALL.iter().filter(|p| !p.is_random()) {
            for grid in [2usize, 4, 64] {
                let m = compile(*p, grid * 4, 4, 0).unwrap();
                assert_eq!(Some(m.count_blocks()), expected_count(*p, grid), "{p} {grid}");
            }
        }
    }

    #[test]
    fn speedups() {
        let m = compile(Pattern::Hypercube, 4096, 16, 0).unwrap();
        assert!((m.density_speedup() - 65536.0 / 2304.0).abs() < 1e-12);
        assert_eq!(compile(Pattern::Complete, 256, 16, 0).unwrap().density_speedup(), 1.0);
        let m = compile(Pattern::Longformer, 1024, 16, 0).unwrap();
        assert!((m.density_speedup() - 4096.0 / 314.0).abs() < 1e-12);
    }

    #[test]
    fn random_patterns_cover_base() {
        for p in [Pattern::BigBird, Pattern::RingRandom] {
            let base = compile(p.base(), 1024, 16, 0).unwrap();
            let m = compile(p, 1024, 16, 9).unwrap();
            assert!(base.blocks().iter().all(|&(r, c)| m.contains(r, c)));
            assert_eq!(m, compile(p, 1024, 16, 9).unwrap());
            assert_ne!(m, compile(p, 1024, 16, 10).unwrap());
        }
    }

    #[test]
    fn triangle_indexing() {
        let pairs: Vec<_> = (0..6).map(|t| upper_pair(t, 4)).collect();
        assert_eq!(pairs, vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
    }

    #[test]
    fn bad_grids() {
        assert!(matches!(
            compile(Pattern::Global, 100, 16, 0),
            Err(NipError::IndivisibleBlock { .. })
        ));
        assert!(matches!(
            compile(Pattern::Global, 16, 16, 0),
            Err(NipError::IndivisibleBlock { .. })
        ));
        assert!(matches!(
            compile(Pattern::Hypercube, 96, 16, 0),
            Err(NipError::NonPowerOfTwoGrid { grid: 6 })
        ));
    }

    #[test]
    fn pattern_ids_round_trip() {
        for p in Pattern::ALL {
            assert_eq!(Pattern::from_id(p.id()), Some(p));
            assert_eq!(p.name().parse::<Pattern>().unwrap(), p);
        }
        assert_eq!(Pattern::from_id(7), None);
    }
}

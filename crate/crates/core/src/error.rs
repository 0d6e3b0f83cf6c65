use thiserror::Error;

pub type Result<T, E = NipError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum NipError {
    #[error("hypercube needs a power-of-two node count, got {n}")]
    NonPowerOfTwo { n: usize },

    #[error("ring-lattice window must be even, got {w}")]
    OddWindow { w: usize },

    #[error("ring-lattice window {w} must satisfy 2 <= w < n = {n}")]
    WindowOutOfRange { w: usize, n: usize },

    #[error("node count {n} is below the minimum of {min}")]
    TooSmall { n: usize, min: usize },

    #[error("edge probability {p} must lie in (0, 1]")]
    InvalidProbability { p: f64 },

    #[error("edge probability {p} is below log2(n)/n = {threshold}; pass force to sample anyway")]
    BelowConnectivityThreshold { p: f64, threshold: f64 },

    #[error("union needs at least two member families")]
    EmptyUnion,

    #[error("graph is disconnected")]
    Disconnected,

    #[error("shortest-path count {count} exceeds the enumeration cap {cap}")]
    PathExplosion { count: f64, cap: u64 },

    #[error("payload underflowed in both linear and log domain")]
    Underflow,

    #[error("unsupported family: {0}")]
    UnsupportedFamily(String),

    #[error("block size {b} does not divide sequence length {n}")]
    IndivisibleBlock { n: usize, b: usize },

    #[error("hypercube mask needs a power-of-two block grid, got {grid}")]
    NonPowerOfTwoGrid { grid: usize },

    #[error("index {index} out of range for size {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("bad magic bytes")]
    BadMagic,

    #[error("unsupported format version {0}")]
    VersionMismatch(u16),

    #[error("corrupt payload: {0}")]
    CorruptPayload(String),

    #[error("mask relation is not symmetric at block ({row}, {col})")]
    AsymmetryDetected { row: u32, col: u32 },

    #[error("edge list parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl NipError {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            NipError::NonPowerOfTwo { .. } => "NonPowerOfTwo",
            NipError::OddWindow { .. } => "OddWindow",
            NipError::WindowOutOfRange { .. } => "WindowOutOfRange",
            NipError::TooSmall { .. } => "TooSmall",
            NipError::InvalidProbability { .. } => "InvalidProbability",
            NipError::BelowConnectivityThreshold { .. } => "BelowConnectivityThreshold",
            NipError::EmptyUnion => "EmptyUnion",
            NipError::Disconnected => "Disconnected",
            NipError::PathExplosion { .. } => "PathExplosion",
            NipError::Underflow => "Underflow",
            NipError::UnsupportedFamily(_) => "UnsupportedFamily",
            NipError::IndivisibleBlock { .. } => "IndivisibleBlock",
            NipError::NonPowerOfTwoGrid { .. } => "NonPowerOfTwoGrid",
            NipError::IndexOutOfRange { .. } => "IndexOutOfRange",
            NipError::BadMagic => "BadMagic",
            NipError::VersionMismatch(_) => "VersionMismatch",
            NipError::CorruptPayload(_) => "CorruptPayload",
            NipError::AsymmetryDetected { .. } => "AsymmetryDetected",
            NipError::Parse { .. } => "Parse",
            NipError::Io(_) => "Io",
        }
    }

    /// True when the error stems from invalid input parameters rather than
    /// from a failed computation on valid input.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            NipError::NonPowerOfTwo { .. }
                | NipError::OddWindow { .. }
                | NipError::WindowOutOfRange { .. }
                | NipError::TooSmall { .. }
                | NipError::InvalidProbability { .. }
                | NipError::BelowConnectivityThreshold { .. }
                | NipError::EmptyUnion
                | NipError::UnsupportedFamily(_)
                | NipError::IndivisibleBlock { .. }
                | NipError::NonPowerOfTwoGrid { .. }
                | NipError::IndexOutOfRange { .. }
        )
    }
}

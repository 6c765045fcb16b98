use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dimension {dim} exceeds the cap of {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("dimension {dim} is not a power of {levels} with {neurons} neurons")]
    NotNetworkDimension { dim: usize, levels: usize, neurons: usize },

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("state is not normalized: squared norm {norm_sqr}")]
    NotNormalized { norm_sqr: f64 },

    #[error("operator is not unitary: max |U^dag U - I| = {deviation:e}")]
    NotUnitary { deviation: f64 },

    #[error("operator is not hermitian: max |A - A^dag| = {deviation:e}")]
    NotHermitian { deviation: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("neuron index {index} out of range for {neurons} neurons")]
    InvalidSite { index: usize, neurons: usize },

    #[error("invalid topology: {0}")]
    InvalidTopology(String),

    #[error("invalid gate table for neuron {target}: {reason}")]
    InvalidGateTable { target: usize, reason: String },

    #[error("invalid activation order: {0}")]
    InvalidOrder(String),

    #[error("parameter {name} = {value} outside {domain}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("invalid field specification: {0}")]
    InvalidField(String),

    #[error("quantum average has imaginary residue {residue:e}")]
    ImaginaryResidue { residue: f64 },

    #[error("mean-field paths disagree at neuron {site}: operator {operator}, amplitudes {amplitudes}")]
    PathMismatch {
        site: usize,
        operator: f64,
        amplitudes: f64,
    },

    #[error("Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal mass {off:e})")]
    NotConverged { sweeps: usize, off: f64 },

    #[error("input too short: need at least {min}, got {len}")]
    TooShort { min: usize, len: usize },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("degenerate frequency band: {0}")]
    DegenerateBand(String),

    #[error("observer {observer} failed: {reason}")]
    Observer { observer: &'static str, reason: String },
}

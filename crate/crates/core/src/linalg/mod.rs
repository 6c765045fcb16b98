//! Dense complex linear algebra at network dimensions `l^n`.

pub(crate) mod basis;
mod density;
mod eigen;
mod operator;
mod state;

pub use basis::BasisIndex;
pub use density::{partial_trace_keep_site, DensityMatrix, TraceSource};
pub use eigen::hermitian_eigenvalues;
pub use operator::{
    check_unitary, tensor_product, tensor_product_capped, DenseOperator, DEFAULT_DIMENSION_CAP,
};
pub use state::StateVector;

/// Tolerance for invariants checked when a value is constructed.
pub const CONSTRUCTION_TOL: f64 = 1e-12;

/// Tolerance for invariants that may drift during long iteration.
pub const DRIFT_TOL: f64 = 1e-10;

/// Returns `levels^neurons`, or `None` on overflow.
pub fn network_dim(neurons: usize, levels: usize) -> Option<usize> {
    let mut dim = 1usize;
    for _ in 0..neurons {
        dim = dim.checked_mul(levels)?;
    }
    Some(dim)
}

//! Quantum artificial neural networks as discrete-time quantum dynamical systems.
//!
//! A network is a digraph of neurons, each carrying a family of single-neuron
//! unitaries selected by the firing pattern of its input neurons. The product of
//! those conditional gates under an activation order is a unitary neural map `F`,
//! and iterating `F` on a state vector gives the network dynamics. The analysis
//! side of the crate extracts per-neuron quantum averages and reduced-density
//! entropies along a trajectory and characterises them with recurrence statistics
//! and power spectra.
//!
//! Basis ordering is global: neuron 0 is the most significant tensor factor, so
//! the basis state `|s0, s1, ..., s(n-1)>` sits at flat index
//! `sum_k s_k * l^(n-1-k)`.

pub mod entropy;
pub mod error;
pub mod field;
pub mod linalg;
pub mod model;
pub mod rqa;
pub mod spectral;
pub mod trajectory;

pub use error::{Error, Result};
pub use linalg::{BasisIndex, DenseOperator, DensityMatrix, StateVector};
pub use num_complex::Complex64;

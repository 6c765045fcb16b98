//! Per-neuron von Neumann entropies of reduced densities.

use crate::error::{Error, Result};
use crate::linalg::{partial_trace_keep_site, DensityMatrix, StateVector, DRIFT_TOL};
use crate::trajectory::{EntropyTrajectory, Observer, Trajectory};

/// Von Neumann entropy in bits, `-sum_i lambda_i log2 lambda_i`.
///
/// Eigenvalues within `1e-10` outside `[0, 1]` are clipped onto the interval;
/// anything further out is reported as an invalid density.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    let mut s = 0.0;
    for lambda in rho.eigenvalues()? {
        if !(-DRIFT_TOL..=1.0 + DRIFT_TOL).contains(&lambda) {
            return Err(Error::InvalidDensity(format!("eigenvalue {lambda:e} outside [0, 1]")));
        }
        let lambda = lambda.clamp(0.0, 1.0);
        if lambda > 0.0 {
            s -= lambda * lambda.log2();
        }
    }
    Ok(s.max(0.0))
}

/// Entropy of each neuron's reduced density for a pure network state.
pub fn site_entropies(state: &StateVector, neurons: usize, levels: usize) -> Result<Vec<f64>> {
    (0..neurons)
        .map(|k| von_neumann_entropy(&partial_trace_keep_site(state, k, neurons, levels)?))
        .collect()
}

/// Records `(S_0(t), ..., S_(n-1)(t))` at each sampled state.
#[derive(Debug, Clone)]
pub struct EntropyObserver {
    neurons: usize,
    levels: usize,
    trajectory: EntropyTrajectory,
}

impl EntropyObserver {
    pub fn new(neurons: usize, levels: usize) -> Self {
        Self {
            neurons,
            levels,
            trajectory: Trajectory::new(neurons),
        }
    }

    pub fn with_capacity(neurons: usize, levels: usize, samples: usize) -> Self {
        Self {
            neurons,
            levels,
            trajectory: Trajectory::with_capacity(neurons, samples),
        }
    }

    pub fn trajectory(&self) -> &EntropyTrajectory {
        &self.trajectory
    }

    pub fn into_trajectory(self) -> EntropyTrajectory {
        self.trajectory
    }
}

impl Observer for EntropyObserver {
    fn name(&self) -> &'static str {
        "entropy"
    }

    fn observe(&mut self, state: &StateVector) -> Result<()> {
        let row = site_entropies(state, self.neurons, self.levels)?;
        self.trajectory.push(&row)
    }
}

/// Minimum, maximum and mean entropy of one neuron over a window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeuronEntropyStats {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntropyStats {
    pub neurons: Vec<NeuronEntropyStats>,
}

pub fn entropy_stats(traj: &EntropyTrajectory) -> Result<EntropyStats> {
    if traj.is_empty() {
        return Err(Error::Empty("entropy series"));
    }
    let neurons = (0..traj.dim())
        .map(|k| {
            let mut min = f64::INFINITY;
            let mut max = f64::NEG_INFINITY;
            let mut sum = 0.0;
            for p in traj.points() {
                min = min.min(p[k]);
                max = max.max(p[k]);
                sum += p[k];
            }
            NeuronEntropyStats {
                min,
                max,
                mean: sum / traj.len() as f64,
            }
        })
        .collect();
    Ok(EntropyStats { neurons })
}

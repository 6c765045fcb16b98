//! Iterating a neural map and feeding the visited states to observers.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{StateVector, DRIFT_TOL};
use crate::model::UnitaryNeuralMap;

/// Time-ordered points in `dim`-dimensional real space, stored row-major.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trajectory {
    dim: usize,
    data: Vec<f64>,
}

/// Per-neuron quantum averages of a field along a run.
pub type MeanFieldTrajectory = Trajectory;
/// Per-neuron reduced-density entropies along a run.
pub type EntropyTrajectory = Trajectory;

impl Trajectory {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            data: Vec::new(),
        }
    }

    pub fn with_capacity(dim: usize, points: usize) -> Self {
        Self {
            dim,
            data: Vec::with_capacity(dim * points),
        }
    }

    pub fn from_points<P: AsRef<[f64]>>(dim: usize, points: &[P]) -> Result<Self> {
        let mut traj = Self::with_capacity(dim, points.len());
        for p in points {
            traj.push(p.as_ref())?;
        }
        Ok(traj)
    }

    /// One-dimensional trajectory from a scalar series.
    pub fn from_scalars(values: &[f64]) -> Self {
        Self {
            dim: 1,
            data: values.to_vec(),
        }
    }

    pub fn push(&mut self, point: &[f64]) -> Result<()> {
        if point.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: point.len(),
            });
        }
        self.data.extend_from_slice(point);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.data.len().checked_div(self.dim).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn point(&self, t: usize) -> &[f64] {
        &self.data[t * self.dim..(t + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim.max(1))
    }

    /// Coordinate `k` of every point.
    pub fn column(&self, k: usize) -> Vec<f64> {
        self.points().map(|p| p[k]).collect()
    }

    /// Points `start..end` as a new trajectory.
    pub fn window(&self, start: usize, end: usize) -> Trajectory {
        Trajectory {
            dim: self.dim,
            data: self.data[start * self.dim..end * self.dim].to_vec(),
        }
    }
}

/// Receives each recorded state of a run, in iteration order.
pub trait Observer {
    fn name(&self) -> &'static str;

    fn observe(&mut self, state: &StateVector) -> Result<()>;
}

/// Keeps every recorded state.
#[derive(Debug, Default)]
pub struct StateTap {
    states: Vec<StateVector>,
}

impl StateTap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn states(&self) -> &[StateVector] {
        &self.states
    }

    pub fn into_states(self) -> Vec<StateVector> {
        self.states
    }
}

impl Observer for StateTap {
    fn name(&self) -> &'static str {
        "raw-state"
    }

    fn observe(&mut self, state: &StateVector) -> Result<()> {
        self.states.push(state.clone());
        Ok(())
    }
}

/// Double buffer for repeated `F v` without per-step allocation.
struct Stepper<'a> {
    map: &'a UnitaryNeuralMap,
    current: StateVector,
    scratch: Vec<Complex64>,
}

impl<'a> Stepper<'a> {
    fn new(map: &'a UnitaryNeuralMap, v0: &StateVector) -> Result<Self> {
        if v0.dim() != map.dim() {
            return Err(Error::DimensionMismatch {
                expected: map.dim(),
                found: v0.dim(),
            });
        }
        Ok(Self {
            map,
            current: v0.clone(),
            scratch: vec![Complex64::new(0.0, 0.0); v0.dim()],
        })
    }

    fn step(&mut self) {
        self.map
            .operator()
            .apply_into(self.current.amplitudes(), &mut self.scratch);
        self.current.swap_amplitudes(&mut self.scratch);
    }

    fn check_norm(&self) -> Result<()> {
        let norm_sqr = self.current.norm_sqr();
        if (norm_sqr - 1.0).abs() > DRIFT_TOL {
            Err(Error::NotNormalized { norm_sqr })
        } else {
            Ok(())
        }
    }
}

/// `F^steps v`, computed by repeated application.
pub fn iterate(map: &UnitaryNeuralMap, v: &StateVector, steps: usize) -> Result<StateVector> {
    let mut stepper = Stepper::new(map, v)?;
    for _ in 0..steps {
        stepper.step();
    }
    stepper.check_norm()?;
    Ok(stepper.current)
}

/// Iterates `map` from `v0`, skipping `transient` applications, then hands the next
/// `samples` states to every observer. Sample 0 is `F^transient v0`.
///
/// States are never renormalized; a norm drift beyond `1e-10` aborts the run.
pub fn run_trajectory(
    map: &UnitaryNeuralMap,
    v0: &StateVector,
    transient: usize,
    samples: usize,
    observers: &mut [&mut dyn Observer],
) -> Result<()> {
    let mut stepper = Stepper::new(map, v0)?;
    for _ in 0..transient {
        stepper.step();
    }
    for i in 0..samples {
        if i > 0 {
            stepper.step();
        }
        stepper.check_norm()?;
        for obs in observers.iter_mut() {
            let name = obs.name();
            obs.observe(&stepper.current).map_err(|e| match e {
                Error::Observer { .. } => e,
                other => Error::Observer {
                    observer: name,
                    reason: other.to_string(),
                },
            })?;
        }
    }
    Ok(())
}

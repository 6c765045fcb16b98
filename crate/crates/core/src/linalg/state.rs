use num_complex::Complex64;

use super::{BasisIndex, DRIFT_TOL};
use crate::error::{Error, Result};

/// Normalized amplitude vector over the firing-pattern basis.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: Vec<Complex64>,
}

impl StateVector {
    /// Accepts amplitudes whose squared norm is 1 within `1e-10`.
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        check_finite(&amps)?;
        if amps.is_empty() {
            return Err(Error::Empty("state amplitudes"));
        }
        let norm_sqr = norm_sqr(&amps);
        if (norm_sqr - 1.0).abs() > DRIFT_TOL {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(Self { amps })
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(amps: Vec<Complex64>) -> Result<Self> {
        check_finite(&amps)?;
        let norm_sqr = norm_sqr(&amps);
        if amps.is_empty() || norm_sqr == 0.0 {
            return Err(Error::NotNormalized { norm_sqr });
        }
        let inv = 1.0 / norm_sqr.sqrt();
        Self::new(amps.into_iter().map(|z| z * inv).collect())
    }

    pub fn from_real(amps: &[f64]) -> Result<Self> {
        Self::new(amps.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn basis(index: &BasisIndex) -> Self {
        let dim = index.levels().pow(index.neurons() as u32);
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index.flat()] = Complex64::new(1.0, 0.0);
        Self { amps }
    }

    /// `|+> (x) ... (x) |+>` over `neurons` two-level sites.
    pub fn plus_state(neurons: usize) -> Self {
        let dim = 1usize << neurons;
        let a = 1.0 / (dim as f64).sqrt();
        Self {
            amps: vec![Complex64::new(a, 0.0); dim],
        }
    }

    /// Tensor product of per-neuron states, neuron 0 first.
    pub fn product(sites: &[StateVector]) -> Result<Self> {
        let mut amps = vec![Complex64::new(1.0, 0.0)];
        for site in sites {
            amps = amps
                .iter()
                .flat_map(|&a| site.amps.iter().map(move |&b| a * b))
                .collect();
        }
        Self::normalized(amps)
    }

    pub(crate) fn from_amplitudes_unchecked(amps: Vec<Complex64>) -> Self {
        Self { amps }
    }

    pub(crate) fn swap_amplitudes(&mut self, other: &mut Vec<Complex64>) {
        debug_assert_eq!(self.amps.len(), other.len());
        std::mem::swap(&mut self.amps, other);
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, flat: usize) -> Complex64 {
        self.amps[flat]
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.amps)
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Largest amplitude-wise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &StateVector) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Euclidean norm of `self - other`.
    pub fn distance(&self, other: &StateVector) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }
}

fn norm_sqr(amps: &[Complex64]) -> f64 {
    amps.iter().map(|z| z.norm_sqr()).sum()
}

fn check_finite(amps: &[Complex64]) -> Result<()> {
    match amps.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
        Some(index) => Err(Error::NonFinite { index }),
        None => Ok(()),
    }
}

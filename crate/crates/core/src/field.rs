//! Quantum neural field operators and their averages.
//!
//! A field assigns a real coefficient to each projector of an orthonormal
//! single-neuron basis and places that observable at one neuron. The neural
//! activity field `N(k)` is the special case with coefficients `(0, 1)` on the
//! computational basis, i.e. the number operator `a^dag a` at neuron `k`, so its
//! average is the firing probability of that neuron.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{
    basis::digit_at, network_dim, tensor_product, DenseOperator, StateVector, CONSTRUCTION_TOL,
    DRIFT_TOL,
};
use crate::model::UnitaryNeuralMap;
use crate::trajectory::{Observer, Trajectory};

/// Residual imaginary part above which an average is rejected.
const IMAGINARY_RESIDUE_TOL: f64 = 1e-8;
/// Agreement required between the operator and amplitude routes to `<N(k)>`.
const DUAL_PATH_TOL: f64 = 1e-12;

/// Real coefficients over an orthonormal single-neuron basis.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSpec {
    coeffs: Vec<f64>,
    basis: Vec<Vec<Complex64>>,
}

impl FieldSpec {
    pub fn new(coeffs: Vec<f64>, basis: Vec<Vec<Complex64>>) -> Result<Self> {
        let l = coeffs.len();
        if l < 2 {
            return Err(Error::InvalidField(format!("need at least 2 levels, got {l}")));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidField("coefficients must be finite".into()));
        }
        if basis.len() != l || basis.iter().any(|b| b.len() != l) {
            return Err(Error::InvalidField(format!("basis must be {l} vectors of length {l}")));
        }
        for (i, u) in basis.iter().enumerate() {
            for (j, v) in basis.iter().enumerate() {
                let ip: Complex64 = u.iter().zip(v).map(|(a, b)| a.conj() * b).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                if (ip - target).norm() > CONSTRUCTION_TOL {
                    return Err(Error::InvalidField(format!(
                        "basis vectors {i} and {j} are not orthonormal (inner product {ip})"
                    )));
                }
            }
        }
        Ok(Self { coeffs, basis })
    }

    /// Coefficients on the computational basis `|0>, ..., |l-1>`.
    pub fn computational(coeffs: Vec<f64>) -> Result<Self> {
        let l = coeffs.len();
        let basis = (0..l)
            .map(|i| {
                (0..l)
                    .map(|j| Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0))
                    .collect()
            })
            .collect();
        Self::new(coeffs, basis)
    }

    pub fn levels(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn basis(&self) -> &[Vec<Complex64>] {
        &self.basis
    }

    /// `sum_s alpha_s |alpha_s><alpha_s|` on a single neuron.
    pub fn local_operator(&self) -> DenseOperator {
        let l = self.levels();
        let mut op = DenseOperator::zeros(l);
        for (&c, v) in self.coeffs.iter().zip(&self.basis) {
            let proj = DenseOperator::outer(v, v).expect("basis vectors have length l");
            op = op.checked_add(&proj.scale_real(c)).expect("same dimension");
        }
        op
    }
}

/// `I^(x)site (x) local (x) I^(x)(neurons-site-1)`, identities of the local dimension.
pub fn place_at_site(local: &DenseOperator, site: usize, neurons: usize) -> Result<DenseOperator> {
    if site >= neurons {
        return Err(Error::InvalidSite {
            index: site,
            neurons,
        });
    }
    let l = local.dim();
    network_dim(neurons, l).ok_or(Error::DimensionCap {
        dim: usize::MAX,
        cap: crate::linalg::DEFAULT_DIMENSION_CAP,
    })?;
    let id = DenseOperator::identity(l);
    let mut out = DenseOperator::identity(1);
    for k in 0..neurons {
        out = tensor_product(&out, if k == site { local } else { &id })?;
    }
    Ok(out)
}

/// Field operator `alpha(site)` on an `neurons`-neuron network.
pub fn build_field_operator(spec: &FieldSpec, site: usize, neurons: usize) -> Result<DenseOperator> {
    place_at_site(&spec.local_operator(), site, neurons)
}

/// Fermionic lowering operator `a = |0><1|`.
pub fn lowering() -> DenseOperator {
    DenseOperator::outer_basis(2, 0, 1)
}

/// Fermionic raising operator `a^dag = |1><0|`.
pub fn raising() -> DenseOperator {
    DenseOperator::outer_basis(2, 1, 0)
}

/// `N(site) = I (x) .. (x) a^dag a (x) .. (x) I` for two-level neurons.
pub fn neural_activity_operator(site: usize, neurons: usize) -> Result<DenseOperator> {
    let number = raising().matmul(&lowering())?;
    place_at_site(&number, site, neurons)
}

/// Per-neuron `N(k)` matrices built once for a network size.
#[derive(Debug, Clone)]
pub struct ActivityField {
    operators: Vec<DenseOperator>,
}

impl ActivityField {
    pub fn new(neurons: usize) -> Result<Self> {
        let operators = (0..neurons)
            .map(|k| neural_activity_operator(k, neurons))
            .collect::<Result<_>>()?;
        Ok(Self { operators })
    }

    pub fn neurons(&self) -> usize {
        self.operators.len()
    }

    pub fn operator(&self, site: usize) -> &DenseOperator {
        &self.operators[site]
    }

    pub fn operators(&self) -> &[DenseOperator] {
        &self.operators
    }

    /// Mean-field point computed both through the operators and the amplitudes.
    pub fn checked_point(&self, v: &StateVector) -> Result<Vec<f64>> {
        let by_operator = mean_field_point(v, &self.operators)?;
        let by_amplitude = firing_probabilities(v, self.neurons())?;
        for (site, (&op, &amp)) in by_operator.iter().zip(&by_amplitude).enumerate() {
            if (op - amp).abs() > DUAL_PATH_TOL {
                return Err(Error::PathMismatch {
                    site,
                    operator: op,
                    amplitudes: amp,
                });
            }
        }
        Ok(by_amplitude)
    }
}

/// `<v|obs|v>`; the observable must be hermitian.
pub fn quantum_average(obs: &DenseOperator, v: &StateVector) -> Result<f64> {
    obs.require_hermitian(DRIFT_TOL)?;
    let w = obs.apply(v)?;
    let raw = v.inner(&w)?;
    if raw.im.abs() > IMAGINARY_RESIDUE_TOL {
        return Err(Error::ImaginaryResidue {
            residue: raw.im.abs(),
        });
    }
    Ok(raw.re)
}

/// One average per neuron, `field[k]` being the observable at neuron `k`.
pub fn mean_field_point(v: &StateVector, field: &[DenseOperator]) -> Result<Vec<f64>> {
    field.iter().map(|obs| quantum_average(obs, v)).collect()
}

/// `<N(k)>` as the summed squared moduli of amplitudes with `s_k = 1`.
pub fn firing_probabilities(v: &StateVector, neurons: usize) -> Result<Vec<f64>> {
    if network_dim(neurons, 2) != Some(v.dim()) {
        return Err(Error::NotNetworkDimension {
            dim: v.dim(),
            levels: 2,
            neurons,
        });
    }
    let mut out = vec![0.0; neurons];
    for (flat, amp) in v.amplitudes().iter().enumerate() {
        let p = amp.norm_sqr();
        for (k, slot) in out.iter_mut().enumerate() {
            if digit_at(flat, k, neurons, 2) == 1 {
                *slot += p;
            }
        }
    }
    Ok(out)
}

/// Heisenberg-picture observable `(F^dag)^t obs F^t`.
pub fn heisenberg_evolve(
    obs: &DenseOperator,
    map: &UnitaryNeuralMap,
    t: usize,
) -> Result<DenseOperator> {
    let f = map.operator();
    if obs.dim() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            found: obs.dim(),
        });
    }
    let f_dag = f.adjoint();
    let mut out = obs.clone();
    for _ in 0..t {
        out = f_dag.matmul(&out)?.matmul(f)?;
    }
    Ok(out)
}

/// Angular frequency and action constant of the firing-energy Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyParams {
    frequency: f64,
    hbar: f64,
}

impl EnergyParams {
    /// `frequency` in Hertz; `omega = 2 pi frequency`.
    pub fn new(frequency: f64, hbar: f64) -> Result<Self> {
        if !frequency.is_finite() || frequency < 0.0 {
            return Err(Error::OutOfRange {
                name: "frequency",
                value: frequency,
                domain: "finite, >= 0",
            });
        }
        if !hbar.is_finite() || hbar <= 0.0 {
            return Err(Error::OutOfRange {
                name: "hbar",
                value: hbar,
                domain: "finite, > 0",
            });
        }
        Ok(Self { frequency, hbar })
    }

    /// `omega * hbar = 1`, so energies count firing neurons.
    pub fn natural() -> Self {
        Self {
            frequency: 1.0 / TAU,
            hbar: 1.0,
        }
    }

    pub fn frequency(&self) -> f64 {
        self.frequency
    }

    pub fn omega(&self) -> f64 {
        TAU * self.frequency
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn quantum(&self) -> f64 {
        self.omega() * self.hbar
    }
}

impl Default for EnergyParams {
    fn default() -> Self {
        Self::natural()
    }
}

/// `H_k = omega hbar N(k)`.
pub fn firing_hamiltonian(site: usize, neurons: usize, params: EnergyParams) -> Result<DenseOperator> {
    Ok(neural_activity_operator(site, neurons)?.scale_real(params.quantum()))
}

/// `H = sum_k H_k`.
pub fn total_hamiltonian(neurons: usize, params: EnergyParams) -> Result<DenseOperator> {
    let mut h = DenseOperator::zeros(1usize << neurons);
    for k in 0..neurons {
        h = h.checked_add(&firing_hamiltonian(k, neurons, params)?)?;
    }
    Ok(h)
}

/// Records `<N(k)>` for every neuron at each sampled state.
#[derive(Debug, Clone)]
pub struct MeanFieldObserver {
    neurons: usize,
    trajectory: Trajectory,
}

impl MeanFieldObserver {
    pub fn new(neurons: usize) -> Self {
        Self {
            neurons,
            trajectory: Trajectory::new(neurons),
        }
    }

    pub fn with_capacity(neurons: usize, samples: usize) -> Self {
        Self {
            neurons,
            trajectory: Trajectory::with_capacity(neurons, samples),
        }
    }

    pub fn trajectory(&self) -> &Trajectory {
        &self.trajectory
    }

    pub fn into_trajectory(self) -> Trajectory {
        self.trajectory
    }
}

impl Observer for MeanFieldObserver {
    fn name(&self) -> &'static str {
        "mean-field"
    }

    fn observe(&mut self, state: &StateVector) -> Result<()> {
        let point = firing_probabilities(state, self.neurons)?;
        if let Some(&bad) = point.iter().find(|&&p| !(-DRIFT_TOL..=1.0 + DRIFT_TOL).contains(&p)) {
            return Err(Error::OutOfRange {
                name: "firing probability",
                value: bad,
                domain: "[0, 1]",
            });
        }
        self.trajectory.push(&point)
    }
}

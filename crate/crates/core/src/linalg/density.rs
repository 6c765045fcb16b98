use num_complex::Complex64;

use super::{hermitian_eigenvalues, network_dim, DenseOperator, StateVector, CONSTRUCTION_TOL, DRIFT_TOL};
use crate::error::{Error, Result};

/// Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    op: DenseOperator,
}

impl DensityMatrix {
    pub fn new(op: DenseOperator) -> Result<Self> {
        let dev = op.hermitian_deviation();
        if dev > CONSTRUCTION_TOL {
            return Err(Error::InvalidDensity(format!("not hermitian (deviation {dev:e})")));
        }
        let trace = op.trace();
        if (trace.re - 1.0).abs() > DRIFT_TOL || trace.im.abs() > DRIFT_TOL {
            return Err(Error::InvalidDensity(format!("trace {trace} != 1")));
        }
        let min = hermitian_eigenvalues(&op)?[0];
        if min < -DRIFT_TOL {
            return Err(Error::InvalidDensity(format!("negative eigenvalue {min:e}")));
        }
        Ok(Self { op })
    }

    /// `|psi><psi|`.
    pub fn from_pure(state: &StateVector) -> Result<Self> {
        let amps = state.amplitudes();
        Self::new(DenseOperator::outer(amps, amps)?)
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn operator(&self) -> &DenseOperator {
        &self.op
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        hermitian_eigenvalues(&self.op)
    }

    pub fn keep_site(&self, site: usize, neurons: usize, levels: usize) -> Result<DensityMatrix> {
        partial_trace_keep_site(self, site, neurons, levels)
    }
}

/// Input accepted by [`partial_trace_keep_site`].
#[derive(Debug, Clone, Copy)]
pub enum TraceSource<'a> {
    State(&'a StateVector),
    Density(&'a DensityMatrix),
}

impl<'a> From<&'a StateVector> for TraceSource<'a> {
    fn from(s: &'a StateVector) -> Self {
        TraceSource::State(s)
    }
}

impl<'a> From<&'a DensityMatrix> for TraceSource<'a> {
    fn from(d: &'a DensityMatrix) -> Self {
        TraceSource::Density(d)
    }
}

/// Reduced density of neuron `site`, tracing out every other neuron.
///
/// Entry `(a, b)` sums `psi(.., s_site = a, ..) * conj(psi(.., s_site = b, ..))` over
/// all patterns that agree away from `site`.
pub fn partial_trace_keep_site<'a>(
    source: impl Into<TraceSource<'a>>,
    site: usize,
    neurons: usize,
    levels: usize,
) -> Result<DensityMatrix> {
    let source = source.into();
    if site >= neurons {
        return Err(Error::InvalidSite {
            index: site,
            neurons,
        });
    }
    let dim = match source {
        TraceSource::State(s) => s.dim(),
        TraceSource::Density(d) => d.dim(),
    };
    if levels < 2 || network_dim(neurons, levels) != Some(dim) {
        return Err(Error::NotNetworkDimension {
            dim,
            levels,
            neurons,
        });
    }

    let stride = levels.pow((neurons - 1 - site) as u32);
    let block = stride * levels;
    let outer = dim / block;
    let mut out = DenseOperator::zeros(levels);
    for a in 0..levels {
        for b in a..levels {
            let mut acc = Complex64::new(0.0, 0.0);
            for hi in 0..outer {
                for lo in 0..stride {
                    let ia = hi * block + a * stride + lo;
                    let ib = hi * block + b * stride + lo;
                    acc += match source {
                        TraceSource::State(s) => s.amplitude(ia) * s.amplitude(ib).conj(),
                        TraceSource::Density(d) => d.operator()[(ia, ib)],
                    };
                }
            }
            if a == b {
                acc.im = 0.0;
            }
            out[(a, b)] = acc;
            out[(b, a)] = acc.conj();
        }
    }
    DensityMatrix::new(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn bell() -> StateVector {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        StateVector::from_real(&[h, 0.0, 0.0, h]).unwrap()
    }

    #[test]
    fn product_state_reduces_to_factor() {
        let rho = partial_trace_keep_site(&StateVector::plus_state(2), 0, 2, 2).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert_abs_diff_eq!(rho.operator()[(i, j)].re, 0.5, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn bell_state_reduces_to_maximally_mixed() {
        let rho = partial_trace_keep_site(&bell(), 0, 2, 2).unwrap();
        let half = DenseOperator::real_diagonal(&[0.5, 0.5]);
        assert!(rho.operator().max_abs_diff(&half).unwrap() < 1e-15);
    }

    #[test]
    fn basis_state_second_site() {
        let s = StateVector::from_real(&[0.0, 0.0, 1.0, 0.0]).unwrap(); // |1,0>
        let rho = partial_trace_keep_site(&s, 1, 2, 2).unwrap();
        assert_eq!(rho.operator(), &DenseOperator::real_diagonal(&[1.0, 0.0]));
        let rho0 = partial_trace_keep_site(&s, 0, 2, 2).unwrap();
        assert_eq!(rho0.operator(), &DenseOperator::real_diagonal(&[0.0, 1.0]));
    }

    #[test]
    fn density_and_state_routes_agree() {
        let amps = [0.1, 0.3, -0.2, 0.5, 0.4, 0.1, 0.6, 0.25];
        let s = StateVector::normalized(amps.iter().map(|&x| Complex64::new(x, 0.3 * x)).collect())
            .unwrap();
        let full = DensityMatrix::from_pure(&s).unwrap();
        for site in 0..3 {
            let a = partial_trace_keep_site(&s, site, 3, 2).unwrap();
            let b = full.keep_site(site, 3, 2).unwrap();
            assert!(a.operator().max_abs_diff(b.operator()).unwrap() < 1e-15);
        }
    }

    #[test]
    fn errors() {
        let s = StateVector::plus_state(2);
        assert!(matches!(
            partial_trace_keep_site(&s, 2, 2, 2),
            Err(Error::InvalidSite { .. })
        ));
        assert!(matches!(
            partial_trace_keep_site(&s, 0, 2, 3),
            Err(Error::NotNetworkDimension { .. })
        ));
        let bad = DenseOperator::real_diagonal(&[1.5, -0.5]);
        assert!(DensityMatrix::new(bad).is_err());
    }
}

//! Neuron digraphs, conditional gates and unitary neural maps.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{
    basis::digit_at, network_dim, DenseOperator, StateVector, CONSTRUCTION_TOL,
    DEFAULT_DIMENSION_CAP, DRIFT_TOL,
};

/// Directed graph of `neurons` sites with `levels` firing levels each.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetworkTopology {
    neurons: usize,
    levels: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl NetworkTopology {
    pub fn new(
        neurons: usize,
        levels: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        if neurons == 0 {
            return Err(Error::InvalidTopology("at least one neuron required".into()));
        }
        if levels < 2 {
            return Err(Error::InvalidTopology(format!("levels must be >= 2, got {levels}")));
        }
        match network_dim(neurons, levels) {
            Some(dim) if dim <= DEFAULT_DIMENSION_CAP => {}
            _ => {
                return Err(Error::DimensionCap {
                    dim: network_dim(neurons, levels).unwrap_or(usize::MAX),
                    cap: DEFAULT_DIMENSION_CAP,
                })
            }
        }
        let mut set = BTreeSet::new();
        for (src, dst) in edges {
            if src >= neurons || dst >= neurons {
                return Err(Error::InvalidTopology(format!(
                    "edge ({src}, {dst}) references a neuron outside [0, {neurons})"
                )));
            }
            if src == dst {
                return Err(Error::InvalidTopology(format!("self-loop on neuron {src}")));
            }
            if !set.insert((src, dst)) {
                return Err(Error::InvalidTopology(format!("duplicate edge ({src}, {dst})")));
            }
        }
        Ok(Self {
            neurons,
            levels,
            edges: set,
        })
    }

    /// Two neurons connected in both directions.
    pub fn recurrent_pair() -> Self {
        Self::new(2, 2, [(0, 1), (1, 0)]).expect("valid topology")
    }

    pub fn neurons(&self) -> usize {
        self.neurons
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn dim(&self) -> usize {
        self.levels.pow(self.neurons as u32)
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    /// Source neurons feeding `target`, ascending.
    pub fn in_neighbors(&self, target: usize) -> Vec<usize> {
        self.edges
            .iter()
            .filter(|&&(_, dst)| dst == target)
            .map(|&(src, _)| src)
            .collect()
    }
}

/// The unitary applied at `target` for each firing pattern of its inputs.
///
/// Patterns are tuples over `inputs` in the same (ascending) order.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalGateSpec {
    pub target: usize,
    pub inputs: Vec<usize>,
    pub table: BTreeMap<Vec<usize>, DenseOperator>,
}

impl ConditionalGateSpec {
    pub fn new(
        target: usize,
        inputs: Vec<usize>,
        table: impl IntoIterator<Item = (Vec<usize>, DenseOperator)>,
    ) -> Self {
        Self {
            target,
            inputs,
            table: table.into_iter().collect(),
        }
    }

    /// Same gate for every input pattern.
    pub fn uniform(target: usize, inputs: Vec<usize>, levels: usize, gate: DenseOperator) -> Self {
        let table = patterns(inputs.len(), levels).map(|p| (p, gate.clone()));
        Self::new(target, inputs, table)
    }
}

/// All digit tuples of length `len` over `levels`, in place-value order.
pub fn patterns(len: usize, levels: usize) -> impl Iterator<Item = Vec<usize>> {
    let count = levels.pow(len as u32);
    (0..count).map(move |mut flat| {
        let mut digits = vec![0; len];
        for slot in digits.iter_mut().rev() {
            *slot = flat % levels;
            flat /= levels;
        }
        digits
    })
}

/// Network-wide unitary for one neuron:
/// `sum_s |s><s|_inputs (x) table[s]_target (x) I_rest`.
pub fn build_conditional_gate(
    spec: &ConditionalGateSpec,
    topo: &NetworkTopology,
) -> Result<DenseOperator> {
    let n = topo.neurons();
    let l = topo.levels();
    let target = spec.target;
    if target >= n {
        return Err(Error::InvalidSite {
            index: target,
            neurons: n,
        });
    }
    let gate_err = |reason: String| Error::InvalidGateTable { target, reason };

    let expected_inputs = topo.in_neighbors(target);
    if spec.inputs != expected_inputs {
        return Err(gate_err(format!(
            "inputs {:?} do not match in-neighbors {:?}",
            spec.inputs, expected_inputs
        )));
    }
    let expected = l.pow(spec.inputs.len() as u32);
    if spec.table.len() != expected {
        return Err(gate_err(format!(
            "table has {} patterns, expected {expected}",
            spec.table.len()
        )));
    }
    // dense lookup by pattern flat index
    let mut lookup: Vec<&DenseOperator> = Vec::with_capacity(expected);
    for pattern in patterns(spec.inputs.len(), l) {
        let gate = spec
            .table
            .get(&pattern)
            .ok_or_else(|| gate_err(format!("missing pattern {pattern:?}")))?;
        if gate.dim() != l {
            return Err(gate_err(format!(
                "pattern {pattern:?} gate has dimension {}, expected {l}",
                gate.dim()
            )));
        }
        gate.require_unitary(CONSTRUCTION_TOL)
            .map_err(|e| gate_err(format!("pattern {pattern:?}: {e}")))?;
        lookup.push(gate);
    }

    let dim = topo.dim();
    let stride = l.pow((n - 1 - target) as u32);
    let mut u = DenseOperator::zeros(dim);
    for col in 0..dim {
        let pattern_index = spec
            .inputs
            .iter()
            .fold(0, |acc, &src| acc * l + digit_at(col, src, n, l));
        let gate = lookup[pattern_index];
        let jt = digit_at(col, target, n, l);
        let base = col - jt * stride;
        for a in 0..l {
            u[(base + a * stride, col)] = gate[(a, jt)];
        }
    }
    Ok(u)
}

/// Permutation of neuron indices; `perm[0]` is activated first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActivationOrder(Vec<usize>);

impl ActivationOrder {
    pub fn new(perm: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; perm.len()];
        for &p in &perm {
            if p >= perm.len() || std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidOrder(format!("{perm:?} is not a permutation")));
            }
        }
        Ok(Self(perm))
    }

    pub fn identity(n: usize) -> Self {
        Self((0..n).collect())
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }
}

/// One time step of the network: `F = U_p(n-1) ... U_p(1) U_p(0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryNeuralMap {
    op: DenseOperator,
    order: ActivationOrder,
}

impl UnitaryNeuralMap {
    pub fn operator(&self) -> &DenseOperator {
        &self.op
    }

    pub fn order(&self) -> &ActivationOrder {
        &self.order
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn apply(&self, v: &StateVector) -> Result<StateVector> {
        self.op.apply(v)
    }
}

/// Multiplies the per-neuron gates in activation order; `gates[k]` belongs to neuron `k`.
pub fn compose_neural_map(
    gates: &[DenseOperator],
    order: &ActivationOrder,
) -> Result<UnitaryNeuralMap> {
    if order.as_slice().len() != gates.len() {
        return Err(Error::DimensionMismatch {
            expected: gates.len(),
            found: order.as_slice().len(),
        });
    }
    let first = gates.first().ok_or(Error::Empty("gate list"))?;
    let dim = first.dim();
    let mut f = DenseOperator::identity(dim);
    for &k in order.as_slice() {
        let gate = &gates[k];
        if gate.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: gate.dim(),
            });
        }
        f = gate.matmul(&f)?;
    }
    f.require_unitary(DRIFT_TOL)?;
    Ok(UnitaryNeuralMap {
        op: f,
        order: order.clone(),
    })
}

/// Builds every neuron's gate from its spec and composes them.
pub fn build_network_map(
    topo: &NetworkTopology,
    specs: &[ConditionalGateSpec],
    order: &ActivationOrder,
) -> Result<UnitaryNeuralMap> {
    if specs.len() != topo.neurons() {
        return Err(Error::DimensionMismatch {
            expected: topo.neurons(),
            found: specs.len(),
        });
    }
    let mut gates: Vec<Option<DenseOperator>> = vec![None; topo.neurons()];
    for spec in specs {
        let slot = gates.get_mut(spec.target).ok_or(Error::InvalidSite {
            index: spec.target,
            neurons: topo.neurons(),
        })?;
        if slot.is_some() {
            return Err(Error::InvalidGateTable {
                target: spec.target,
                reason: "neuron has more than one gate spec".into(),
            });
        }
        *slot = Some(build_conditional_gate(spec, topo)?);
    }
    let gates: Vec<DenseOperator> = gates.into_iter().map(|g| g.expect("all filled")).collect();
    compose_neural_map(&gates, order)
}

/// Parameter of the two-neuron recurrent network; rotation angle is `r * pi / 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QrnnParams {
    r: f64,
}

impl QrnnParams {
    pub fn new(r: f64) -> Result<Self> {
        if r.is_finite() && (0.0..=1.0).contains(&r) {
            Ok(Self { r })
        } else {
            Err(Error::OutOfRange {
                name: "r",
                value: r,
                domain: "[0, 1]",
            })
        }
    }

    pub fn r(&self) -> f64 {
        self.r
    }
}

/// `cos(r pi/2)(|0><0| + |1><1|) + sin(r pi/2)(|1><0| - |0><1|)`.
pub fn qrnn_rotation(params: QrnnParams) -> DenseOperator {
    let angle = params.r * FRAC_PI_2;
    let (s, c) = angle.sin_cos();
    DenseOperator::from_fn(2, |i, j| {
        Complex64::new(
            match (i, j) {
                (0, 0) | (1, 1) => c,
                (0, 1) => -s,
                _ => s,
            },
            0.0,
        )
    })
}

/// Gate specs of the two-neuron network: each neuron rotates when the other fires.
pub fn qrnn_gate_specs(params: QrnnParams) -> [ConditionalGateSpec; 2] {
    let id = DenseOperator::identity(2);
    let rot = qrnn_rotation(params);
    [
        ConditionalGateSpec::new(0, vec![1], [(vec![0], id.clone()), (vec![1], rot.clone())]),
        ConditionalGateSpec::new(1, vec![0], [(vec![0], id), (vec![1], rot)]),
    ]
}

/// The reference two-neuron map `F = U0 U1` (neuron 1 activated first).
pub fn build_qrnn_map(params: QrnnParams) -> Result<UnitaryNeuralMap> {
    build_qrnn_map_with_order(params, &ActivationOrder::new(vec![1, 0])?)
}

pub fn build_qrnn_map_with_order(
    params: QrnnParams,
    order: &ActivationOrder,
) -> Result<UnitaryNeuralMap> {
    build_network_map(&NetworkTopology::recurrent_pair(), &qrnn_gate_specs(params), order)
}

#![allow(dead_code)]

use num_complex::Complex64;
use proptest::prelude::*;
use quann_core::{DenseOperator, StateVector};
use rand::Rng;

pub fn random_state<R: Rng>(rng: &mut R, dim: usize) -> StateVector {
    let amps = (0..dim)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    StateVector::normalized(amps).unwrap()
}

pub fn random_hermitian<R: Rng>(rng: &mut R, dim: usize) -> DenseOperator {
    let mut m = DenseOperator::zeros(dim);
    for i in 0..dim {
        m[(i, i)] = Complex64::new(rng.gen_range(-1.0..1.0), 0.0);
        for j in i + 1..dim {
            let z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    m
}

pub fn state_strategy(dim: usize) -> impl Strategy<Value = StateVector> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), dim)
        .prop_filter("nonzero", |v| v.iter().any(|(a, b)| a.abs() + b.abs() > 1e-3))
        .prop_map(|v| {
            StateVector::normalized(v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect())
                .unwrap()
        })
}

pub fn operator_strategy(dim: usize) -> impl Strategy<Value = DenseOperator> {
    prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), dim * dim).prop_map(move |v| {
        DenseOperator::from_row_major(dim, v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect())
            .unwrap()
    })
}

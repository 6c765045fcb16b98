use num_complex::Complex64;

use super::{DenseOperator, CONSTRUCTION_TOL};
use crate::error::{Error, Result};

const OFF_DIAGONAL_TOL: f64 = 1e-14;
const MAX_SWEEPS: usize = 64;

/// Eigenvalues of a hermitian matrix, ascending, by cyclic complex Jacobi rotations.
///
/// Each rotation first removes the phase of `a[p][q]` and then applies a real
/// Jacobi rotation in the `(p, q)` plane. Sweeps continue until the off-diagonal
/// Frobenius mass drops below `1e-14` (relative to the matrix norm when that
/// exceeds one).
pub fn hermitian_eigenvalues(m: &DenseOperator) -> Result<Vec<f64>> {
    m.require_hermitian(CONSTRUCTION_TOL)?;
    let n = m.dim();
    let mut a: Vec<Complex64> = m.as_slice().to_vec();
    // symmetrize away sub-tolerance asymmetry so rotations act on an exactly hermitian matrix
    for i in 0..n {
        a[i * n + i].im = 0.0;
        for j in i + 1..n {
            let avg = (a[i * n + j] + a[j * n + i].conj()) * 0.5;
            a[i * n + j] = avg;
            a[j * n + i] = avg.conj();
        }
    }

    let scale = frobenius(&a).max(1.0);
    let mut sweeps = 0;
    loop {
        let off = off_diagonal_mass(&a, n);
        if off < OFF_DIAGONAL_TOL * scale {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(Error::NotConverged { sweeps, off });
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, n, p, q);
            }
        }
        sweeps += 1;
    }

    let mut eig: Vec<f64> = (0..n).map(|i| a[i * n + i].re).collect();
    eig.sort_by(f64::total_cmp);
    Ok(eig)
}

fn rotate(a: &mut [Complex64], n: usize, p: usize, q: usize) {
    let apq = a[p * n + q];
    let b = apq.norm();
    if b == 0.0 {
        return;
    }
    let phase = apq / b; // e^{i phi}
    let app = a[p * n + p].re;
    let aqq = a[q * n + q].re;
    let theta = (aqq - app) / (2.0 * b);
    let t = theta.signum() / (theta.abs() + theta.hypot(1.0));
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / t.hypot(1.0);
    let s = t * c;

    // G = diag(.., 1, .., e^{-i phi}, ..) * R(c, s); A <- G^dag A G
    let phase_conj = phase.conj();
    for k in 0..n {
        let akp = a[k * n + p];
        let akq = a[k * n + q];
        a[k * n + p] = akp * c - akq * phase_conj * s;
        a[k * n + q] = akp * s + akq * phase_conj * c;
    }
    for k in 0..n {
        let apk = a[p * n + k];
        let aqk = a[q * n + k];
        a[p * n + k] = apk * c - aqk * phase * s;
        a[q * n + k] = apk * s + aqk * phase * c;
    }
    a[p * n + q] = Complex64::new(0.0, 0.0);
    a[q * n + p] = Complex64::new(0.0, 0.0);
    a[p * n + p].im = 0.0;
    a[q * n + q].im = 0.0;
}

fn off_diagonal_mass(a: &[Complex64], n: usize) -> f64 {
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum += a[i * n + j].norm_sqr();
            }
        }
    }
    sum.sqrt()
}

fn frobenius(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

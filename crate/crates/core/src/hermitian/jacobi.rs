//! Cyclic Jacobi eigensolver for complex Hermitian matrices.
//!
//! Each rotation is the unitary
//!
//! ```text
//! J = [  c          s e^{iφ} ]
//!     [ -s e^{-iφ}  c        ]
//! ```
//!
//! acting on the (p, q) plane, where φ is the phase of a_pq. It reduces the
//! 2x2 block to a real symmetric one, then applies the classical real
//! rotation. An off-diagonal entry is considered negligible once it is below
//! machine precision relative to the geometric mean of its two diagonal
//! entries, which keeps small eigenvalues of positive definite matrices
//! relatively accurate.

use num_complex::Complex64;

use super::matrix::CMatrix;
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 64;
const REL_EPS: f64 = f64::EPSILON;
const ABS_EPS: f64 = 1e-2 * f64::EPSILON;

/// Eigenvalues (descending) and optionally the unitary whose columns are the
/// matching eigenvectors. The input must be Hermitian; only its upper
/// triangle and real diagonal are trusted.
pub(crate) fn hermitian_eigen(input: &CMatrix, want_vectors: bool) -> Result<(Vec<f64>, Option<CMatrix>)> {
    let n = input.dim();
    let mut a = CMatrix::from_fn(n, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Less => input[(i, j)],
        std::cmp::Ordering::Equal => Complex64::new(input[(i, i)].re, 0.0),
        std::cmp::Ordering::Greater => input[(j, i)].conj(),
    });
    let mut v = want_vectors.then(|| CMatrix::identity(n));
    let scale = a.frobenius_norm();

    let mut converged = n <= 1 || scale == 0.0;
    let mut sweeps = 0;
    while !converged && sweeps < MAX_SWEEPS {
        sweeps += 1;
        let mut rotated = false;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let modulus = apq.norm();
                if modulus == 0.0 {
                    continue;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                if modulus <= REL_EPS * (app.abs() * aqq.abs()).sqrt() || modulus <= ABS_EPS * scale {
                    a[(p, q)] = Complex64::new(0.0, 0.0);
                    a[(q, p)] = Complex64::new(0.0, 0.0);
                    continue;
                }
                rotated = true;
                rotate(&mut a, v.as_mut(), p, q, modulus, apq / modulus);
            }
        }
        converged = !rotated;
    }

    if !converged {
        let off_norm = off_diagonal_norm(&a);
        return Err(Error::NoConvergence { dim: n, sweeps, off_norm });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let eigenvalues = order.iter().map(|&k| a[(k, k)].re).collect();
    let eigenvectors = v.map(|v| CMatrix::from_fn(n, |i, j| v[(i, order[j])]));
    Ok((eigenvalues, eigenvectors))
}

fn rotate(a: &mut CMatrix, v: Option<&mut CMatrix>, p: usize, q: usize, modulus: f64, phase: Complex64) {
    let n = a.dim();
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = (aqq - app) / (2.0 * modulus);
    let t =
        if theta.abs() > 1e150 { 0.5 / theta } else { theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt()) };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let sp = phase * s; // J_pq
    let sq = phase.conj() * s; // -J_qp

    // A <- A J
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c - akq * sq;
        a[(k, q)] = akp * sp + akq * c;
    }
    // A <- J^H A
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c - aqk * sp;
        a[(q, k)] = apk * sq + aqk * c;
    }
    a[(p, p)] = Complex64::new(app - t * modulus, 0.0);
    a[(q, q)] = Complex64::new(aqq + t * modulus, 0.0);
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);

    if let Some(v) = v {
        for k in 0..n {
            let vkp = v[(k, p)];
            let vkq = v[(k, q)];
            v[(k, p)] = vkp * c - vkq * sq;
            v[(k, q)] = vkp * sp + vkq * c;
        }
    }
}

fn off_diagonal_norm(a: &CMatrix) -> f64 {
    let n = a.dim();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

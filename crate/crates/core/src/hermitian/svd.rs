//! Singular values of graded products `diag(d) · W · diag(e)`.
//!
//! Forming `B B†` explicitly loses every eigenvalue below `ε · λ_max`. Here
//! the entries of `B` are built one product at a time, rows are sorted by
//! size, Householder QR with column pivoting is applied and the triangular
//! factor is finished by one-sided Jacobi. Each singular value then carries
//! a relative error of a few ulps times the conditioning of `W`.

use num_complex::Complex64;

use super::CMatrix;
use crate::error::{Error, Result};

const EPS: f64 = f64::EPSILON;
const MAX_SWEEPS: usize = 64;

/// Dense column-major complex matrix, local to this routine.
struct Cols {
    rows: usize,
    data: Vec<Vec<Complex64>>,
}

impl Cols {
    fn norm_sqr_from(&self, col: usize, start: usize) -> f64 {
        self.data[col][start..].iter().map(|x| x.norm_sqr()).sum()
    }
}

/// Singular values, in descending order, of `diag(d) W diag(e)` restricted
/// to the rows with `d_i ≠ 0` and columns with `e_k ≠ 0`.
pub(crate) fn graded_singular_values(d: &[f64], w: &CMatrix, e: &[f64]) -> Result<Vec<f64>> {
    let rows: Vec<usize> = (0..d.len()).filter(|&i| d[i] != 0.0).collect();
    let cols: Vec<usize> = (0..e.len()).filter(|&k| e[k] != 0.0).collect();
    if rows.is_empty() || cols.is_empty() {
        return Ok(Vec::new());
    }
    let mut b = Cols {
        rows: rows.len(),
        data: cols.iter().map(|&k| rows.iter().map(|&i| w[(i, k)] * (d[i] * e[k])).collect()).collect(),
    };
    sort_rows(&mut b);
    let r = pivoted_qr(&mut b);
    let mut sv = one_sided_jacobi(r)?;
    sv.sort_by(|x, y| y.total_cmp(x));
    Ok(sv)
}

/// Reorders rows by decreasing max-abs entry.
fn sort_rows(b: &mut Cols) {
    let size = |i: usize| b.data.iter().map(|c| c[i].norm()).fold(0.0, f64::max);
    let mut order: Vec<usize> = (0..b.rows).collect();
    order.sort_by(|&x, &y| size(y).total_cmp(&size(x)));
    for c in &mut b.data {
        let old = c.clone();
        for (new_i, &old_i) in order.iter().enumerate() {
            c[new_i] = old[old_i];
        }
    }
}

/// Householder QR with column pivoting; returns the rows of the
/// upper-trapezoidal factor `R`.
fn pivoted_qr(b: &mut Cols) -> Vec<Vec<Complex64>> {
    let (m, n) = (b.rows, b.data.len());
    let steps = m.min(n);
    for j in 0..steps {
        let p =
            (j..n).max_by(|&x, &y| b.norm_sqr_from(x, j).total_cmp(&b.norm_sqr_from(y, j))).expect("non-empty range");
        b.data.swap(j, p);
        let norm = b.norm_sqr_from(j, j).sqrt();
        if norm == 0.0 {
            continue;
        }
        let x0 = b.data[j][j];
        let phase = if x0.norm() == 0.0 { Complex64::new(1.0, 0.0) } else { x0 / x0.norm() };
        let alpha = -phase * norm;
        // v = x − alpha e₁, H = I − 2 v v† / (v† v)
        let mut v: Vec<Complex64> = b.data[j][j..].to_vec();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x.norm_sqr()).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        for col in b.data.iter_mut().skip(j + 1) {
            let dot: Complex64 = v.iter().zip(&col[j..]).map(|(vi, ci)| vi.conj() * ci).sum();
            let f = dot * (2.0 / vnorm2);
            for (ci, vi) in col[j..].iter_mut().zip(&v) {
                *ci -= vi * f;
            }
        }
        b.data[j][j] = alpha;
        for x in &mut b.data[j][j + 1..] {
            *x = Complex64::new(0.0, 0.0);
        }
    }
    (0..steps).map(|i| (0..n).map(|k| if k >= i { b.data[k][i] } else { Complex64::new(0.0, 0.0) }).collect()).collect()
}

/// One-sided Jacobi on the columns of `R†`, i.e. on the conjugated rows of
/// `R`; returns the final column norms.
fn one_sided_jacobi(mut g: Vec<Vec<Complex64>>) -> Result<Vec<f64>> {
    for row in &mut g {
        for x in row.iter_mut() {
            *x = x.conj();
        }
    }
    let n = g.len();
    let mut worst = 0.0f64;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        worst = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                let a: f64 = g[p].iter().map(|x| x.norm_sqr()).sum();
                let b: f64 = g[q].iter().map(|x| x.norm_sqr()).sum();
                let gamma: Complex64 = g[p].iter().zip(&g[q]).map(|(x, y)| x.conj() * y).sum();
                let mag = gamma.norm();
                if mag == 0.0 || mag <= EPS * (a * b).sqrt() {
                    continue;
                }
                rotated = true;
                worst = worst.max(mag / (a * b).sqrt());
                let phase = gamma / mag;
                let zeta = (b - a) / (2.0 * mag);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (lo, hi) = g.split_at_mut(q);
                let (gp, gq) = (&mut lo[p], &mut hi[0]);
                for (xp, xq) in gp.iter_mut().zip(gq.iter_mut()) {
                    let yq = *xq * phase.conj();
                    let np = *xp * c - yq * s;
                    let nq = *xp * s + yq * c;
                    *xp = np;
                    *xq = nq;
                }
            }
        }
        if !rotated {
            return Ok(g.iter().map(|row| row.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()).collect());
        }
    }
    Err(Error::NoConvergence { dim: n, sweeps: MAX_SWEEPS, off_norm: worst })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rotation(theta: f64, phi: f64) -> CMatrix {
        let (c, s) = (theta.cos(), theta.sin());
        let e = Complex64::from_polar(1.0, phi);
        CMatrix::from_rows(vec![vec![Complex64::new(c, 0.0), e * s], vec![-e.conj() * s, Complex64::new(c, 0.0)]])
            .unwrap()
    }

    #[test]
    fn identity_factor_gives_products() {
        let sv = graded_singular_values(&[2.0, 3.0], &CMatrix::identity(2), &[5.0, 0.5]).unwrap();
        assert_eq!(sv, vec![10.0, 1.5]);
    }

    #[test]
    fn tiny_singular_value_is_relatively_accurate() {
        // det(B) = d₁d₂e₁e₂ exactly, and the large value is close to the Frobenius norm
        let w = rotation(0.3, 0.7);
        let d = [1e6, 1.0];
        let e = [1.0, 1e-12];
        let sv = graded_singular_values(&d, &w, &e).unwrap();
        let fro: f64 = (0..2)
            .flat_map(|i| (0..2).map(move |k| (i, k)))
            .map(|(i, k)| (w[(i, k)] * d[i] * e[k]).norm_sqr())
            .sum::<f64>()
            .sqrt();
        let det = d[0] * d[1] * e[0] * e[1];
        let small = det / sv[0];
        assert!((sv[1] - small).abs() <= 1e-13 * small, "{} vs {small}", sv[1]);
        assert!((sv[0] - fro).abs() <= 1e-12 * fro);
    }

    #[test]
    fn drops_zero_rows_and_columns() {
        let w = rotation(0.4, 0.0);
        let sv = graded_singular_values(&[1.0, 0.0], &w, &[1.0, 1.0]).unwrap();
        assert_eq!(sv.len(), 1);
        assert!((sv[0] - 1.0).abs() < 1e-15);
        assert!(graded_singular_values(&[0.0, 0.0], &w, &[1.0, 1.0]).unwrap().is_empty());
    }
}

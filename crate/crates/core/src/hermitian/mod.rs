//! Complex Hermitian linear algebra: eigendecomposition, support and kernel
//! logic, and spectral functional calculus on positive semi-definite
//! operators.
//!
//! Every support decision goes through one relative cutoff: an eigenvalue
//! `λ` counts as zero iff `λ <= cutoff * λ_max`. Powers and logarithms are
//! evaluated on the support only, so `A^0` is the support projector and
//! negative powers are generalized inverses.

mod jacobi;
mod matrix;
mod svd;

use num_complex::Complex64;

pub use matrix::CMatrix;
pub(crate) use svd::graded_singular_values;

use crate::error::{Error, Result};

/// Default relative zero-eigenvalue cutoff.
pub const ZERO_CUTOFF: f64 = 1e-12;

/// Largest Hermiticity defect repaired silently on construction.
pub const HERMITIAN_TOL: f64 = 1e-9;

/// Tolerance for the dominance and orthogonality tests.
pub const SUPPORT_TOL: f64 = 1e-10;

/// Eigenvalues closer than this (relative to the spectral radius) are
/// grouped into one pinching block.
pub const BLOCK_TOL: f64 = 1e-10;

/// Dense Hermitian matrix. The stored entries satisfy `a_ij = conj(a_ji)`
/// exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator {
    m: CMatrix,
}

impl HermitianOperator {
    /// Accepts a matrix whose Hermiticity defect is at most
    /// `HERMITIAN_TOL * max(1, ‖m‖_max)` and symmetrizes it.
    pub fn new(m: CMatrix) -> Result<Self> {
        if m.dim() == 0 {
            return Err(Error::Empty);
        }
        if let Some((i, j)) = m.first_non_finite() {
            return Err(Error::NonFiniteEntry(i, j));
        }
        let defect = m.hermiticity_defect();
        if defect > HERMITIAN_TOL * m.max_abs().max(1.0) {
            return Err(Error::NotHermitian(defect));
        }
        Ok(Self::symmetrize(&m))
    }

    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        Self::new(CMatrix::from_rows(rows)?)
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect()).collect())
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        Self { m: CMatrix::from_real_diagonal(diag) }
    }

    pub fn identity(dim: usize) -> Self {
        Self { m: CMatrix::identity(dim) }
    }

    pub fn zeros(dim: usize) -> Self {
        Self { m: CMatrix::zeros(dim) }
    }

    /// `(M + M†) / 2`, with the diagonal forced real.
    pub fn symmetrize(m: &CMatrix) -> Self {
        let n = m.dim();
        Self {
            m: CMatrix::from_fn(n, |i, j| {
                if i == j {
                    Complex64::new(m[(i, i)].re, 0.0)
                } else {
                    (m[(i, j)] + m[(j, i)].conj()) * 0.5
                }
            }),
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.m.dim()
    }

    #[inline]
    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> CMatrix {
        self.m
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.m[(i, j)]
    }

    pub fn trace(&self) -> f64 {
        self.m.trace().re
    }

    pub fn scale(&self, c: f64) -> Self {
        Self { m: self.m.scale(c) }
    }

    pub fn max_abs(&self) -> f64 {
        self.m.max_abs()
    }

    pub fn max_abs_diff(&self, other: &HermitianOperator) -> f64 {
        self.m.max_abs_diff(&other.m)
    }

    pub fn eigensystem(&self) -> Result<EigenSystem> {
        eigensystem(self)
    }

    /// Eigenvalues only, sorted descending.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(jacobi::hermitian_eigen(&self.m, false)?.0)
    }

    /// `U A U†`
    pub fn conjugate_by(&self, u: &CMatrix) -> Result<Self> {
        check_dims(self.dim(), u.dim())?;
        Ok(Self::symmetrize(&u.matmul(&self.m).matmul(&u.adjoint())))
    }
}

/// Real eigenvalues sorted descending, with a unitary whose columns are the
/// matching orthonormal eigenvectors.
#[derive(Clone, Debug)]
pub struct EigenSystem {
    eigenvalues: Vec<f64>,
    eigenvectors: CMatrix,
}

impl EigenSystem {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &CMatrix {
        &self.eigenvectors
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Largest eigenvalue modulus.
    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues.iter().map(|x| x.abs()).fold(0.0, f64::max)
    }

    /// Absolute threshold at or below which an eigenvalue counts as zero.
    pub fn zero_threshold(&self, cutoff: f64) -> f64 {
        cutoff * self.spectral_radius()
    }

    /// Per-eigenvalue support membership under `cutoff`.
    pub fn support_mask(&self, cutoff: f64) -> Vec<bool> {
        let thr = self.zero_threshold(cutoff);
        self.eigenvalues.iter().map(|&l| l > thr).collect()
    }

    pub fn rank(&self, cutoff: f64) -> usize {
        self.support_mask(cutoff).into_iter().filter(|&b| b).count()
    }

    /// Fails if some eigenvalue lies below `-cutoff * λ_max`.
    pub fn check_psd(&self, cutoff: f64) -> Result<()> {
        let thr = self.zero_threshold(cutoff);
        match self.eigenvalues.last() {
            Some(&min) if min < -thr => Err(Error::NotPsd(min)),
            _ => Ok(()),
        }
    }

    /// `U diag(f(λ)) U†`
    pub fn map(&self, f: impl Fn(f64) -> f64) -> HermitianOperator {
        let vals: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        self.from_values(&vals)
    }

    /// `U diag(values) U†` for an arbitrary real vector of matching length.
    pub fn from_values(&self, values: &[f64]) -> HermitianOperator {
        let u = &self.eigenvectors;
        let n = self.dim();
        let mut m = CMatrix::zeros(n);
        for (k, &w) in values.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let uik = u[(i, k)] * w;
                for j in 0..n {
                    m[(i, j)] += uik * u[(j, k)].conj();
                }
            }
        }
        HermitianOperator::symmetrize(&m)
    }

    pub fn reconstruct(&self) -> HermitianOperator {
        self.from_values(&self.eigenvalues)
    }

    /// Spectral values of `λ ↦ λ^p` restricted to the support; kernel
    /// eigenvalues (including clipped round-off negatives) map to zero.
    pub fn power_values(&self, p: f64, cutoff: f64) -> Vec<f64> {
        let thr = self.zero_threshold(cutoff);
        self.eigenvalues.iter().map(|&l| if l > thr { l.powf(p) } else { 0.0 }).collect()
    }

    pub fn power(&self, p: f64, cutoff: f64) -> HermitianOperator {
        self.from_values(&self.power_values(p, cutoff))
    }

    pub fn log_values(&self, cutoff: f64) -> Vec<f64> {
        let thr = self.zero_threshold(cutoff);
        self.eigenvalues.iter().map(|&l| if l > thr { l.ln() } else { 0.0 }).collect()
    }

    pub fn log_on_support(&self, cutoff: f64) -> HermitianOperator {
        self.from_values(&self.log_values(cutoff))
    }

    pub fn support(&self, cutoff: f64) -> Result<SupportInfo> {
        self.check_psd(cutoff)?;
        let mask = self.support_mask(cutoff);
        let rank = mask.iter().filter(|&&b| b).count();
        let ones: Vec<f64> = mask.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect();
        Ok(SupportInfo { rank, projector: self.from_values(&ones), zero_threshold: self.zero_threshold(cutoff) })
    }
}

/// Rank, support projector and the absolute zero threshold used to find them.
#[derive(Clone, Debug)]
pub struct SupportInfo {
    pub rank: usize,
    pub projector: HermitianOperator,
    pub zero_threshold: f64,
}

impl SupportInfo {
    /// `I - Π`
    pub fn kernel_projector(&self) -> HermitianOperator {
        let n = self.projector.dim();
        HermitianOperator::symmetrize(&CMatrix::identity(n).sub(self.projector.matrix()))
    }
}

fn check_dims(a: usize, b: usize) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::DimensionMismatch(a, b))
    }
}

pub fn eigensystem(a: &HermitianOperator) -> Result<EigenSystem> {
    let (eigenvalues, vecs) = jacobi::hermitian_eigen(a.matrix(), true)?;
    Ok(EigenSystem { eigenvalues, eigenvectors: vecs.expect("eigenvectors requested") })
}

/// Support of a positive semi-definite operator. The zero operator has rank 0
/// and a zero projector.
pub fn support(a: &HermitianOperator, rel_threshold: f64) -> Result<SupportInfo> {
    eigensystem(a)?.support(rel_threshold)
}

/// `σ ≫ ρ`, i.e. `ker σ ⊆ ker ρ`, tested as `‖(I − Π_σ) ρ (I − Π_σ)‖_max <= tol`.
pub fn dominates(sigma: &HermitianOperator, rho: &HermitianOperator) -> Result<bool> {
    check_dims(sigma.dim(), rho.dim())?;
    let s = support(sigma, ZERO_CUTOFF)?;
    support(rho, ZERO_CUTOFF)?;
    Ok(dominates_given(&s, rho))
}

pub(crate) fn dominates_given(sigma_support: &SupportInfo, rho: &HermitianOperator) -> bool {
    if sigma_support.rank == rho.dim() {
        return true;
    }
    let q = sigma_support.kernel_projector();
    let leak = q.matrix().matmul(rho.matrix()).matmul(q.matrix());
    leak.max_abs() <= SUPPORT_TOL * rho.max_abs().max(f64::MIN_POSITIVE)
}

/// `ρ ⊥ σ`, tested as `Tr(Π_ρ Π_σ) <= tol`.
pub fn orthogonal(rho: &HermitianOperator, sigma: &HermitianOperator) -> Result<bool> {
    check_dims(rho.dim(), sigma.dim())?;
    let pr = support(rho, ZERO_CUTOFF)?;
    let ps = support(sigma, ZERO_CUTOFF)?;
    Ok(orthogonal_given(&pr, &ps))
}

pub(crate) fn orthogonal_given(rho_support: &SupportInfo, sigma_support: &SupportInfo) -> bool {
    let overlap = rho_support.projector.matrix().matmul(sigma_support.projector.matrix()).trace().re;
    overlap <= SUPPORT_TOL
}

/// Spectral power on the support, using the default cutoff.
pub fn matrix_power(a: &HermitianOperator, p: f64) -> Result<HermitianOperator> {
    let es = eigensystem(a)?;
    es.check_psd(ZERO_CUTOFF)?;
    Ok(es.power(p, ZERO_CUTOFF))
}

/// Natural logarithm on the support; the zero operator maps to zero.
pub fn log_on_support(a: &HermitianOperator) -> Result<HermitianOperator> {
    let es = eigensystem(a)?;
    es.check_psd(ZERO_CUTOFF)?;
    Ok(es.log_on_support(ZERO_CUTOFF))
}

/// Spectral exponential.
pub fn matrix_exp(a: &HermitianOperator) -> Result<HermitianOperator> {
    Ok(eigensystem(a)?.map(f64::exp))
}

/// Pinching `A ↦ Σ_i P_i A P_i` over the spectral projectors of `basis_of`.
pub fn pinch(a: &HermitianOperator, basis_of: &HermitianOperator) -> Result<HermitianOperator> {
    check_dims(a.dim(), basis_of.dim())?;
    let es = eigensystem(basis_of)?;
    let blocks = spectral_blocks(es.eigenvalues(), BLOCK_TOL * es.spectral_radius());
    let u = es.eigenvectors();
    let mut rotated = u.adjoint().matmul(a.matrix()).matmul(u);
    let n = a.dim();
    for i in 0..n {
        for j in 0..n {
            if blocks[i] != blocks[j] {
                rotated[(i, j)] = Complex64::new(0.0, 0.0);
            }
        }
    }
    Ok(HermitianOperator::symmetrize(&u.matmul(&rotated).matmul(&u.adjoint())))
}

/// Block label per (descending) eigenvalue; neighbours within `tol` share a block.
fn spectral_blocks(values: &[f64], tol: f64) -> Vec<usize> {
    let mut labels = Vec::with_capacity(values.len());
    let mut block = 0;
    for (k, &v) in values.iter().enumerate() {
        if k > 0 && values[k - 1] - v > tol {
            block += 1;
        }
        labels.push(block);
    }
    labels
}

pub fn trace(a: &HermitianOperator) -> f64 {
    a.trace()
}

pub fn mult(a: &HermitianOperator, b: &HermitianOperator) -> Result<CMatrix> {
    check_dims(a.dim(), b.dim())?;
    Ok(a.matrix().matmul(b.matrix()))
}

/// `A B A`, symmetrized to remove round-off asymmetry.
pub fn adjoint_sandwich(a: &HermitianOperator, b: &HermitianOperator) -> Result<HermitianOperator> {
    check_dims(a.dim(), b.dim())?;
    Ok(HermitianOperator::symmetrize(&a.matrix().matmul(b.matrix()).matmul(a.matrix())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plus_state() -> HermitianOperator {
        HermitianOperator::from_real_rows(&[&[0.5, 0.5], &[0.5, 0.5]]).unwrap()
    }

    #[test]
    fn rejects_non_hermitian_and_repairs_small_defects() {
        let bad = CMatrix::from_rows(vec![
            vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)],
            vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
        ])
        .unwrap();
        assert!(matches!(HermitianOperator::new(bad), Err(Error::NotHermitian(_))));

        let nearly = CMatrix::from_rows(vec![
            vec![Complex64::new(1.0, 1e-13), Complex64::new(0.5, 1e-12)],
            vec![Complex64::new(0.5, 0.0), Complex64::new(1.0, 0.0)],
        ])
        .unwrap();
        let h = HermitianOperator::new(nearly).unwrap();
        assert_eq!(h.matrix().hermiticity_defect(), 0.0);
        assert_eq!(h.get(0, 0).im, 0.0);
    }

    #[test]
    fn eigensystem_of_identity_and_diagonal() {
        let es = eigensystem(&HermitianOperator::identity(2)).unwrap();
        assert_eq!(es.eigenvalues(), &[1.0, 1.0]);
        let es = eigensystem(&HermitianOperator::diagonal(&[3.0, -1.0])).unwrap();
        assert_eq!(es.eigenvalues(), &[3.0, -1.0]);
        assert_eq!(es.eigenvectors(), &CMatrix::identity(2));
    }

    #[test]
    fn eigensystem_of_plus_projector() {
        let es = eigensystem(&plus_state()).unwrap();
        assert!((es.eigenvalues()[0] - 1.0).abs() < 1e-15);
        assert!(es.eigenvalues()[1].abs() < 1e-15);
        let u = es.eigenvectors();
        // leading eigenvector is |+> up to phase
        let overlap = (u[(0, 0)] + u[(1, 0)]) * std::f64::consts::FRAC_1_SQRT_2;
        assert!((overlap.norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn support_examples() {
        let s = support(&HermitianOperator::diagonal(&[1.0, 0.0]), ZERO_CUTOFF).unwrap();
        assert_eq!(s.rank, 1);
        assert_eq!(s.projector, HermitianOperator::diagonal(&[1.0, 0.0]));

        let s = support(&HermitianOperator::diagonal(&[2.0, 1e-18]), 1e-12).unwrap();
        assert_eq!(s.rank, 1);

        let s = support(&plus_state(), ZERO_CUTOFF).unwrap();
        assert_eq!(s.rank, 1);
        assert!(s.projector.max_abs_diff(&plus_state()) < 1e-15);

        let s = support(&HermitianOperator::zeros(3), ZERO_CUTOFF).unwrap();
        assert_eq!(s.rank, 0);
        assert_eq!(s.projector.max_abs(), 0.0);
    }

    #[test]
    fn support_rejects_negative_spectrum() {
        let err = support(&HermitianOperator::diagonal(&[1.0, -0.1]), ZERO_CUTOFF).unwrap_err();
        assert_eq!(err, Error::NotPsd(-0.1));
    }

    #[test]
    fn dominance_and_orthogonality() {
        let rho = plus_state();
        let p = 0.3;
        let sigma = HermitianOperator::diagonal(&[p, 1.0 - p]);
        assert!(dominates(&HermitianOperator::identity(2), &rho).unwrap());
        assert!(dominates(&sigma, &rho).unwrap());
        assert!(!orthogonal(&rho, &sigma).unwrap());

        let e0 = HermitianOperator::diagonal(&[1.0, 0.0]);
        let e1 = HermitianOperator::diagonal(&[0.0, 1.0]);
        assert!(!dominates(&e0, &e1).unwrap());
        assert!(orthogonal(&e0, &e1).unwrap());
        assert!(!orthogonal(&rho, &rho).unwrap());
        assert!(!dominates(&e0, &rho).unwrap());
    }

    #[test]
    fn power_examples() {
        let r = matrix_power(&HermitianOperator::diagonal(&[4.0, 9.0]), 0.5).unwrap();
        assert!(r.max_abs_diff(&HermitianOperator::diagonal(&[2.0, 3.0])) < 1e-15);
        let r = matrix_power(&HermitianOperator::diagonal(&[2.0, 0.0]), -1.0).unwrap();
        assert_eq!(r, HermitianOperator::diagonal(&[0.5, 0.0]));
        let r = matrix_power(&plus_state(), 0.0).unwrap();
        assert!(r.max_abs_diff(&plus_state()) < 1e-15);
    }

    #[test]
    fn tiny_negative_round_off_is_clipped() {
        let a = HermitianOperator::diagonal(&[1.0, -1e-14]);
        let r = matrix_power(&a, 0.5).unwrap();
        assert_eq!(r, HermitianOperator::diagonal(&[1.0, 0.0]));
    }

    #[test]
    fn log_examples() {
        assert_eq!(log_on_support(&HermitianOperator::identity(3)).unwrap().max_abs(), 0.0);
        let e = std::f64::consts::E;
        let l = log_on_support(&HermitianOperator::diagonal(&[e, 1.0, 0.0])).unwrap();
        assert!(l.max_abs_diff(&HermitianOperator::diagonal(&[1.0, 0.0, 0.0])) < 1e-15);
        assert!(log_on_support(&plus_state()).unwrap().max_abs() < 1e-15);
        assert_eq!(log_on_support(&HermitianOperator::zeros(2)).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn pinch_examples() {
        let a = plus_state();
        assert!(pinch(&a, &HermitianOperator::identity(2)).unwrap().max_abs_diff(&a) < 1e-15);
        let p = pinch(&a, &HermitianOperator::diagonal(&[0.2, 0.8])).unwrap();
        assert!(p.max_abs_diff(&HermitianOperator::diagonal(&[0.5, 0.5])) < 1e-15);
    }

    #[test]
    fn trace_and_sandwich() {
        assert_eq!(trace(&HermitianOperator::identity(3)), 3.0);
        let s = adjoint_sandwich(&HermitianOperator::diagonal(&[1.0, 2.0]), &HermitianOperator::diagonal(&[3.0, 4.0]))
            .unwrap();
        assert_eq!(s, HermitianOperator::diagonal(&[3.0, 16.0]));
        let err = mult(&HermitianOperator::identity(2), &HermitianOperator::identity(3)).unwrap_err();
        assert_eq!(err, Error::DimensionMismatch(2, 3));
    }

    #[test]
    fn spectral_blocks_group_degenerate_values() {
        assert_eq!(spectral_blocks(&[3.0, 3.0, 1.0, 0.0, 0.0], 1e-10), vec![0, 0, 1, 2, 2]);
    }
}

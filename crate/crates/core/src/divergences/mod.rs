//! Classical and quantum Rényi-type divergences, all in nats.
//!
//! The central object is the α-z family
//!
//! ```text
//! D_{α,z}(ρ‖σ) = ln Tr[(σ^{(1-α)/2z} ρ^{α/z} σ^{(1-α)/2z})^z] / (α - 1)
//! ```
//!
//! with the Petz (`z = 1`) and sandwiched (`z = α`) members and the
//! piecewise Mosonyi-Ogawa combination of the two. At `α = 1` every member
//! returns the Umegaki relative entropy.
//!
//! Infinity semantics: the value is finite when `σ ≫ ρ`; for `α < 1` it is
//! also finite whenever the supports overlap, using on-support powers;
//! otherwise it is `+∞` tagged with the reason.

mod classical;

use serde::Serialize;

pub use classical::{classical_kl, classical_renyi, classical_variance, ProbVector};

use crate::error::{Error, Result};
use crate::hermitian::{self, CMatrix, EigenSystem, HermitianOperator, SupportInfo, ZERO_CUTOFF};

/// Trace tolerance for density operators.
pub const DENSITY_TRACE_TOL: f64 = 1e-10;

/// Orders this close to one are evaluated as `α = 1`; there `ln T / (α − 1)`
/// is dominated by round-off while the limit is within `1e-12` of exact.
pub const ALPHA_ONE_TOL: f64 = 1e-12;

pub(crate) fn at_one(alpha: f64) -> bool {
    (alpha - 1.0).abs() <= ALPHA_ONE_TOL
}

/// Relative agreement required between the α-z route and the direct
/// definitional route for the Petz and sandwiched traces. Where the direct
/// route's own round-off bound is larger, that bound is used instead.
pub const DUAL_PATH_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InfinityReason {
    SupportViolation,
    OrthogonalStates,
}

impl InfinityReason {
    pub fn as_str(self) -> &'static str {
        match self {
            InfinityReason::SupportViolation => "support_violation",
            InfinityReason::OrthogonalStates => "orthogonal_states",
        }
    }
}

impl std::fmt::Display for InfinityReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Extended real divergence value: finite (nats) or `+∞` with a reason.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DivergenceValue {
    Finite(f64),
    Infinite(InfinityReason),
}

impl DivergenceValue {
    /// The value as an `f64`, with `+∞` for infinite values.
    pub fn value(&self) -> f64 {
        match *self {
            DivergenceValue::Finite(v) => v,
            DivergenceValue::Infinite(_) => f64::INFINITY,
        }
    }

    pub fn finite(&self) -> Option<f64> {
        match *self {
            DivergenceValue::Finite(v) => Some(v),
            DivergenceValue::Infinite(_) => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, DivergenceValue::Finite(_))
    }

    pub fn infinity_reason(&self) -> Option<InfinityReason> {
        match *self {
            DivergenceValue::Finite(_) => None,
            DivergenceValue::Infinite(r) => Some(r),
        }
    }

    /// Converts nats to bits; infinite values are unchanged.
    pub fn to_bits(self) -> Self {
        match self {
            DivergenceValue::Finite(v) => DivergenceValue::Finite(v / std::f64::consts::LN_2),
            inf => inf,
        }
    }
}

/// Evaluation point `(α, z)` with `z ≠ 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ParamPoint {
    pub alpha: f64,
    pub z: f64,
}

impl ParamPoint {
    pub fn new(alpha: f64, z: f64) -> Result<Self> {
        if !alpha.is_finite() || !z.is_finite() {
            return Err(Error::InvalidParameter(format!("(alpha, z) = ({alpha}, {z}) must be finite")));
        }
        if z == 0.0 {
            return Err(Error::InvalidParameter("z must be non-zero".into()));
        }
        Ok(Self { alpha, z })
    }
}

/// A positive semi-definite operator together with its cached spectrum.
#[derive(Clone, Debug)]
struct Spectral {
    op: HermitianOperator,
    spectrum: EigenSystem,
    support: SupportInfo,
    cutoff: f64,
}

impl Spectral {
    fn new(op: HermitianOperator, cutoff: f64) -> Result<Self> {
        if !(cutoff > 0.0 && cutoff < 1.0) {
            return Err(Error::InvalidParameter(format!("zero cutoff {cutoff} must lie in (0, 1)")));
        }
        let spectrum = op.eigensystem()?;
        let support = spectrum.support(cutoff)?;
        Ok(Self { op, spectrum, support, cutoff })
    }

    fn is_full_rank(&self) -> bool {
        self.support.rank == self.op.dim()
    }
}

macro_rules! spectral_accessors {
    () => {
        pub fn op(&self) -> &HermitianOperator {
            &self.0.op
        }

        pub fn spectrum(&self) -> &EigenSystem {
            &self.0.spectrum
        }

        pub fn support(&self) -> &SupportInfo {
            &self.0.support
        }

        pub fn rank(&self) -> usize {
            self.0.support.rank
        }

        pub fn dim(&self) -> usize {
            self.0.op.dim()
        }

        pub fn cutoff(&self) -> f64 {
            self.0.cutoff
        }

        pub fn is_full_rank(&self) -> bool {
            self.0.is_full_rank()
        }
    };
}

/// Positive semi-definite operator with unit trace.
#[derive(Clone, Debug)]
pub struct DensityOperator(Spectral);

impl DensityOperator {
    pub fn new(op: HermitianOperator) -> Result<Self> {
        Self::with_cutoff(op, ZERO_CUTOFF)
    }

    pub fn with_cutoff(op: HermitianOperator, cutoff: f64) -> Result<Self> {
        let tr = op.trace();
        if (tr - 1.0).abs() > DENSITY_TRACE_TOL {
            return Err(Error::InvalidTrace(tr));
        }
        Ok(Self(Spectral::new(op, cutoff)?))
    }

    spectral_accessors!();

    /// `U ρ U†`
    pub fn conjugated(&self, u: &CMatrix) -> Result<Self> {
        Self::with_cutoff(self.op().conjugate_by(u)?, self.cutoff())
    }
}

/// Non-zero positive semi-definite reference operator.
#[derive(Clone, Debug)]
pub struct ReferenceOperator(Spectral);

impl ReferenceOperator {
    pub fn new(op: HermitianOperator) -> Result<Self> {
        Self::with_cutoff(op, ZERO_CUTOFF)
    }

    pub fn with_cutoff(op: HermitianOperator, cutoff: f64) -> Result<Self> {
        let s = Spectral::new(op, cutoff)?;
        if s.support.rank == 0 {
            return Err(Error::ZeroOperator);
        }
        Ok(Self(s))
    }

    spectral_accessors!();

    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidParameter(format!("scale factor {c} must be positive")));
        }
        Self::with_cutoff(self.op().scale(c), self.cutoff())
    }

    pub fn conjugated(&self, u: &CMatrix) -> Result<Self> {
        Self::with_cutoff(self.op().conjugate_by(u)?, self.cutoff())
    }
}

impl From<DensityOperator> for ReferenceOperator {
    fn from(d: DensityOperator) -> Self {
        ReferenceOperator(d.0)
    }
}

impl TryFrom<ReferenceOperator> for DensityOperator {
    type Error = Error;

    fn try_from(r: ReferenceOperator) -> Result<Self> {
        DensityOperator::with_cutoff(r.0.op, r.0.cutoff)
    }
}

/// Support relation between a state and a reference operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SupportRelation {
    pub dominated: bool,
    pub orthogonal: bool,
}

pub fn support_relation(rho: &DensityOperator, sigma: &ReferenceOperator) -> Result<SupportRelation> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(rho.dim(), sigma.dim()));
    }
    Ok(SupportRelation {
        dominated: hermitian::dominates_given(sigma.support(), rho.op()),
        orthogonal: hermitian::orthogonal_given(rho.support(), sigma.support()),
    })
}

/// Outcome of evaluating the trace functional `Tr(F^z)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TraceValue {
    Finite(f64),
    Infinite(InfinityReason),
}

fn pair_cutoff(rho: &DensityOperator, sigma: &ReferenceOperator) -> f64 {
    rho.cutoff().max(sigma.cutoff())
}

/// Decides the support branch. `Ok(Err(reason))` means the divergence is infinite.
fn admissible(
    rho: &DensityOperator,
    sigma: &ReferenceOperator,
    alpha: f64,
    z: f64,
) -> Result<std::result::Result<SupportRelation, InfinityReason>> {
    let rel = support_relation(rho, sigma)?;
    if !rel.dominated {
        if alpha >= 1.0 {
            return Ok(Err(InfinityReason::SupportViolation));
        }
        if rel.orthogonal {
            return Ok(Err(InfinityReason::OrthogonalStates));
        }
    }
    if (z < 0.0 || alpha < 0.0) && !(rho.is_full_rank() && sigma.is_full_rank()) {
        return Err(Error::FormulaUndefined {
            alpha,
            z,
            detail: "negative exponents need full-rank state and reference",
        });
    }
    Ok(Ok(rel))
}

/// `Σ λ^z` over the retained eigenvalues of a PSD operator `F`. When the
/// reference dominates the state, `F` has exactly `rank(ρ)` non-zero
/// eigenvalues; otherwise the relative cutoff decides.
fn trace_power(eigenvalues: &[f64], z: f64, keep: Option<usize>, cutoff: f64) -> f64 {
    let lmax = eigenvalues.first().copied().unwrap_or(0.0).max(0.0);
    let thr = cutoff * lmax;
    eigenvalues
        .iter()
        .enumerate()
        .filter(|&(k, &l)| match keep {
            Some(r) => k < r,
            None => l > thr,
        })
        .map(|(_, &l)| {
            if l > 0.0 {
                l.powf(z)
            } else if z > 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        })
        .sum()
}

/// `W = U_σ† U_ρ`, the overlap between the two eigenbases.
fn basis_overlap(rho: &DensityOperator, sigma: &ReferenceOperator) -> CMatrix {
    sigma.spectrum().eigenvectors().adjoint().matmul(rho.spectrum().eigenvectors())
}

/// The trace functional `T(α, z) = Tr(F(α, z)^z)` with
/// `F(α, z) = σ^{(1-α)/2z} ρ^{α/z} σ^{(1-α)/2z}`.
///
/// `F = B B†` with `B = D W R` in the eigenbasis of `σ`, where `D` and `R`
/// are the diagonal power spectra `s^{(1-α)/2z}` and `r^{α/2z}`. The
/// eigenvalues of `F` are taken as squared singular values of `B`, which
/// keeps the small ones accurate when the exponents are large.
pub fn trace_functional(rho: &DensityOperator, sigma: &ReferenceOperator, pt: ParamPoint) -> Result<TraceValue> {
    let ParamPoint { alpha, z } = ParamPoint::new(pt.alpha, pt.z)?;
    let rel = match admissible(rho, sigma, alpha, z)? {
        Ok(rel) => rel,
        Err(reason) => return Ok(TraceValue::Infinite(reason)),
    };
    let w = basis_overlap(rho, sigma);
    let ds = sigma.spectrum().power_values((1.0 - alpha) / (2.0 * z), sigma.cutoff());
    let dr = rho.spectrum().power_values(alpha / (2.0 * z), rho.cutoff());
    let eig: Vec<f64> = hermitian::graded_singular_values(&ds, &w, &dr)?.into_iter().map(|s| s * s).collect();
    let keep = rel.dominated.then_some(rho.rank());
    finish_trace(trace_power(&eig, z, keep, pair_cutoff(rho, sigma)), alpha, z)
}

fn finish_trace(t: f64, alpha: f64, z: f64) -> Result<TraceValue> {
    if !t.is_finite() {
        return Err(Error::FormulaUndefined { alpha, z, detail: "trace functional is numerically singular" });
    }
    if t <= 0.0 {
        return Ok(TraceValue::Infinite(InfinityReason::OrthogonalStates));
    }
    Ok(TraceValue::Finite(t))
}

fn divergence_from_trace(t: TraceValue, alpha: f64) -> DivergenceValue {
    match t {
        TraceValue::Finite(t) => DivergenceValue::Finite(t.ln() / (alpha - 1.0)),
        TraceValue::Infinite(r) => DivergenceValue::Infinite(r),
    }
}

fn identical(rho: &DensityOperator, sigma: &ReferenceOperator) -> bool {
    rho.op() == sigma.op()
}

/// The α-z relative Rényi entropy.
///
/// `α = 1` returns the relative entropy, the common limit of every member.
pub fn alpha_z_divergence(rho: &DensityOperator, sigma: &ReferenceOperator, pt: ParamPoint) -> Result<DivergenceValue> {
    let pt = ParamPoint::new(pt.alpha, pt.z)?;
    if at_one(pt.alpha) {
        return relative_entropy(rho, sigma);
    }
    if identical(rho, sigma) {
        // T(α, z) = Tr ρ = 1 for every admissible point.
        if let Err(reason) = admissible(rho, sigma, pt.alpha, pt.z)? {
            return Ok(DivergenceValue::Infinite(reason));
        }
        return Ok(DivergenceValue::Finite(0.0));
    }
    Ok(divergence_from_trace(trace_functional(rho, sigma, pt)?, pt.alpha))
}

/// Umegaki relative entropy `Tr ρ (ln ρ − ln σ)`; `+∞` unless `σ ≫ ρ`.
pub fn relative_entropy(rho: &DensityOperator, sigma: &ReferenceOperator) -> Result<DivergenceValue> {
    let rel = support_relation(rho, sigma)?;
    if !rel.dominated {
        return Ok(DivergenceValue::Infinite(InfinityReason::SupportViolation));
    }
    if identical(rho, sigma) {
        return Ok(DivergenceValue::Finite(0.0));
    }
    let r = rho.spectrum().eigenvalues();
    let lr = rho.spectrum().log_values(rho.cutoff());
    let ls = sigma.spectrum().log_values(sigma.cutoff());
    let w = basis_overlap(rho, sigma);
    let thr = rho.spectrum().zero_threshold(rho.cutoff());
    let mut d = 0.0;
    for (i, (&ri, &lri)) in r.iter().zip(&lr).enumerate() {
        if ri <= thr {
            continue;
        }
        let log_sigma_ii: f64 = (0..ls.len()).map(|j| w[(j, i)].norm_sqr() * ls[j]).sum();
        d += ri * (lri - log_sigma_ii);
    }
    Ok(DivergenceValue::Finite(d))
}

/// Relative entropy variance `Tr ρ (ln ρ − ln σ)² − (Tr ρ (ln ρ − ln σ))²`,
/// clamped at zero.
pub fn relative_entropy_variance(rho: &DensityOperator, sigma: &ReferenceOperator) -> Result<f64> {
    let rel = support_relation(rho, sigma)?;
    if !rel.dominated {
        return Err(Error::SupportViolation);
    }
    let n = rho.dim();
    let r = rho.spectrum().power_values(1.0, rho.cutoff());
    let lr = rho.spectrum().log_values(rho.cutoff());
    let ls = sigma.spectrum().log_values(sigma.cutoff());
    let w = basis_overlap(rho, sigma);
    // L in the eigenbasis of ρ: diag(ln r) − W† diag(ln s) W
    let l = CMatrix::from_fn(n, |i, k| {
        let cross: num_complex::Complex64 = (0..n).map(|j| w[(j, i)].conj() * ls[j] * w[(j, k)]).sum();
        let diag = if i == k { lr[i] } else { 0.0 };
        num_complex::Complex64::new(diag, 0.0) - cross
    });
    let mut first = 0.0;
    let mut second = 0.0;
    for i in 0..n {
        if r[i] == 0.0 {
            continue;
        }
        first += r[i] * l[(i, i)].re;
        second += r[i] * (0..n).map(|k| l[(i, k)].norm_sqr()).sum::<f64>();
    }
    Ok((second - first * first).max(0.0))
}

/// Round-off multiplier in the forward error bounds of the direct paths.
const DIRECT_BOUND_FACTOR: f64 = 8.0;

/// A direct-path trace with an absolute bound on its round-off error.
struct DirectTrace {
    value: TraceValue,
    bound: f64,
}

/// Direct `Tr(ρ^α σ^{1-α})`, a trace of a product of two spectral powers.
fn petz_direct_trace(rho: &DensityOperator, sigma: &ReferenceOperator, alpha: f64) -> Result<DirectTrace> {
    if let Err(reason) = admissible(rho, sigma, alpha, 1.0)? {
        return Ok(DirectTrace { value: TraceValue::Infinite(reason), bound: 0.0 });
    }
    let a = rho.spectrum().power(alpha, rho.cutoff());
    let b = sigma.spectrum().power(1.0 - alpha, sigma.cutoff());
    let norms = a.eigenvalues()?.iter().fold(0.0f64, |m, x| m.max(x.abs()))
        * b.eigenvalues()?.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let bound = DIRECT_BOUND_FACTOR * rho.dim() as f64 * f64::EPSILON * norms;
    Ok(DirectTrace { value: finish_trace(hermitian::mult(&a, &b)?.trace().re, alpha, 1.0)?, bound })
}

/// Direct `Tr((σ^{(1-α)/2α} ρ σ^{(1-α)/2α})^α)` from the explicit product.
///
/// Eigenvalues of the explicit product carry absolute errors of order
/// `ε λ_max`; the bound propagates that through `λ ↦ λ^α`.
fn sandwiched_direct_trace(rho: &DensityOperator, sigma: &ReferenceOperator, alpha: f64) -> Result<DirectTrace> {
    let rel = match admissible(rho, sigma, alpha, alpha)? {
        Ok(rel) => rel,
        Err(reason) => return Ok(DirectTrace { value: TraceValue::Infinite(reason), bound: 0.0 }),
    };
    let s = sigma.spectrum().power((1.0 - alpha) / (2.0 * alpha), sigma.cutoff());
    let f = hermitian::adjoint_sandwich(&s, rho.op())?;
    let eig = f.eigenvalues()?;
    let keep = rel.dominated.then_some(rho.rank());
    let delta = DIRECT_BOUND_FACTOR * rho.dim() as f64 * f64::EPSILON * eig.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let kept = match keep {
        Some(r) => r.min(eig.len()),
        None => eig.len(),
    };
    let bound = eig[..kept]
        .iter()
        .map(|&l| {
            let (hi, lo) = ((l + delta).max(0.0), (l - delta).max(0.0));
            if alpha > 0.0 {
                hi.powf(alpha) - lo.powf(alpha)
            } else if lo > 0.0 {
                lo.powf(alpha) - hi.powf(alpha)
            } else {
                f64::INFINITY
            }
        })
        .sum();
    let value = finish_trace(trace_power(&eig, alpha, keep, pair_cutoff(rho, sigma)), alpha, alpha)?;
    Ok(DirectTrace { value, bound })
}

fn cross_check(family: &'static str, alpha: f64, direct: DirectTrace, alpha_z: TraceValue) -> Result<TraceValue> {
    match (direct.value, alpha_z) {
        (TraceValue::Finite(a), TraceValue::Finite(b)) => {
            let tol = (DUAL_PATH_TOL * a.abs().max(b.abs())).max(direct.bound);
            if (a - b).abs() > tol {
                Err(Error::DualPathMismatch { family, alpha, direct: a, alpha_z: b })
            } else {
                Ok(TraceValue::Finite(b))
            }
        }
        (TraceValue::Infinite(a), TraceValue::Infinite(b)) if a == b => Ok(alpha_z),
        (d, az) => Err(Error::DualPathMismatch { family, alpha, direct: trace_as_f64(d), alpha_z: trace_as_f64(az) }),
    }
}

fn trace_as_f64(t: TraceValue) -> f64 {
    match t {
        TraceValue::Finite(v) => v,
        TraceValue::Infinite(_) => f64::INFINITY,
    }
}

/// Petz divergence `D_{α,1}`, evaluated through the α-z route and checked
/// against the direct formula `ln Tr(ρ^α σ^{1-α}) / (α − 1)`.
pub fn petz_divergence(rho: &DensityOperator, sigma: &ReferenceOperator, alpha: f64) -> Result<DivergenceValue> {
    let pt = ParamPoint::new(alpha, 1.0)?;
    if at_one(alpha) {
        return relative_entropy(rho, sigma);
    }
    if identical(rho, sigma) {
        return alpha_z_divergence(rho, sigma, pt);
    }
    let t = cross_check("petz", alpha, petz_direct_trace(rho, sigma, alpha)?, trace_functional(rho, sigma, pt)?)?;
    Ok(divergence_from_trace(t, alpha))
}

/// Sandwiched divergence `D_{α,α}`, checked against its direct formula.
pub fn sandwiched_divergence(rho: &DensityOperator, sigma: &ReferenceOperator, alpha: f64) -> Result<DivergenceValue> {
    let pt = ParamPoint::new(alpha, alpha)?;
    if at_one(alpha) {
        return relative_entropy(rho, sigma);
    }
    if identical(rho, sigma) {
        return alpha_z_divergence(rho, sigma, pt);
    }
    let t = cross_check(
        "sandwiched",
        alpha,
        sandwiched_direct_trace(rho, sigma, alpha)?,
        trace_functional(rho, sigma, pt)?,
    )?;
    Ok(divergence_from_trace(t, alpha))
}

/// Mosonyi-Ogawa divergence: Petz below one, sandwiched above, relative
/// entropy at one.
pub fn mosonyi_ogawa_divergence(
    rho: &DensityOperator,
    sigma: &ReferenceOperator,
    alpha: f64,
) -> Result<DivergenceValue> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidParameter(format!("Mosonyi-Ogawa divergence needs alpha > 0, got {alpha}")));
    }
    if at_one(alpha) {
        relative_entropy(rho, sigma)
    } else if alpha < 1.0 {
        petz_divergence(rho, sigma, alpha)
    } else {
        sandwiched_divergence(rho, sigma, alpha)
    }
}

/// Named member of the divergence family, as selected on the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Petz,
    Sandwiched,
    MosonyiOgawa,
    AlphaZ,
}

impl Family {
    /// Evaluates the family at `α`; `z` is only read by [`Family::AlphaZ`].
    pub fn evaluate(
        self,
        rho: &DensityOperator,
        sigma: &ReferenceOperator,
        alpha: f64,
        z: f64,
    ) -> Result<DivergenceValue> {
        match self {
            Family::Petz => petz_divergence(rho, sigma, alpha),
            Family::Sandwiched => sandwiched_divergence(rho, sigma, alpha),
            Family::MosonyiOgawa => mosonyi_ogawa_divergence(rho, sigma, alpha),
            Family::AlphaZ => alpha_z_divergence(rho, sigma, ParamPoint::new(alpha, z)?),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example1(p: f64) -> (DensityOperator, ReferenceOperator) {
        let rho = HermitianOperator::from_real_rows(&[&[0.5, 0.5], &[0.5, 0.5]]).unwrap();
        let sigma = HermitianOperator::diagonal(&[p, 1.0 - p]);
        (DensityOperator::new(rho).unwrap(), ReferenceOperator::new(sigma).unwrap())
    }

    fn diag_pair(p: &[f64], q: &[f64]) -> (DensityOperator, ReferenceOperator) {
        (
            DensityOperator::new(HermitianOperator::diagonal(p)).unwrap(),
            ReferenceOperator::new(HermitianOperator::diagonal(q)).unwrap(),
        )
    }

    #[test]
    fn example1_values() {
        let (rho, sigma) = example1(0.25);
        // closed form, alpha = 2, z = 1: ln((4 + 4/3)/2) = ln(8/3)
        let d = alpha_z_divergence(&rho, &sigma, ParamPoint::new(2.0, 1.0).unwrap()).unwrap().value();
        assert!((d - (8.0f64 / 3.0).ln()).abs() < 1e-14, "{d}");
        // z = alpha = 2: 2 ln((2 + 2/sqrt 3)/2)
        let d = sandwiched_divergence(&rho, &sigma, 2.0).unwrap().value();
        let expected = 2.0 * ((2.0 + 2.0 / 3f64.sqrt()) / 2.0).ln();
        assert!((d - expected).abs() < 1e-14, "{d} vs {expected}");
        // relative entropy: -(ln p + ln(1-p))/2
        let d = relative_entropy(&rho, &sigma).unwrap().value();
        assert!((d + 0.5 * (0.25f64.ln() + 0.75f64.ln())).abs() < 1e-15);
        // variance: (ln p - ln(1-p))^2 / 4
        let v = relative_entropy_variance(&rho, &sigma).unwrap();
        assert!((v - 0.25 * 3f64.ln().powi(2)).abs() < 1e-15, "{v}");
    }

    #[test]
    fn self_divergence_is_zero() {
        let (rho, _) = example1(0.25);
        let sigma = ReferenceOperator::from(rho.clone());
        for (a, z) in [(0.5, 1.0), (2.0, 2.0), (3.0, 0.7)] {
            let d = alpha_z_divergence(&rho, &sigma, ParamPoint::new(a, z).unwrap()).unwrap();
            assert_eq!(d, DivergenceValue::Finite(0.0));
        }
        assert_eq!(relative_entropy(&rho, &sigma).unwrap(), DivergenceValue::Finite(0.0));
    }

    #[test]
    fn diagonal_pairs_reduce_to_classical() {
        let p = [0.6, 0.3, 0.1];
        let q = [0.2, 0.5, 0.3];
        let (rho, sigma) = diag_pair(&p, &q);
        let pv = ProbVector::new(p.to_vec()).unwrap();
        let qv = ProbVector::new(q.to_vec()).unwrap();
        for alpha in [0.3, 0.7, 1.5, 2.0] {
            let classical = classical_renyi(&pv, &qv, alpha).unwrap().value();
            for z in [-2.0, 0.5, 1.0, alpha, 10.0] {
                let d = alpha_z_divergence(&rho, &sigma, ParamPoint::new(alpha, z).unwrap()).unwrap().value();
                assert!((d - classical).abs() < 1e-12, "alpha {alpha} z {z}: {d} vs {classical}");
            }
        }
        let kl = classical_kl(&pv, &qv).unwrap().value();
        assert!((relative_entropy(&rho, &sigma).unwrap().value() - kl).abs() < 1e-15);
        let var = classical_variance(&pv, &qv).unwrap();
        assert!((relative_entropy_variance(&rho, &sigma).unwrap() - var).abs() < 1e-14);
    }

    #[test]
    fn infinity_semantics() {
        let (rho, sigma) = diag_pair(&[1.0, 0.0], &[0.0, 1.0]);
        for alpha in [1.5, 2.0] {
            assert_eq!(
                petz_divergence(&rho, &sigma, alpha).unwrap(),
                DivergenceValue::Infinite(InfinityReason::SupportViolation)
            );
        }
        assert_eq!(
            petz_divergence(&rho, &sigma, 0.5).unwrap(),
            DivergenceValue::Infinite(InfinityReason::OrthogonalStates)
        );
        assert_eq!(
            sandwiched_divergence(&rho, &sigma, 0.5).unwrap(),
            DivergenceValue::Infinite(InfinityReason::OrthogonalStates)
        );
        assert_eq!(
            relative_entropy(&rho, &sigma).unwrap(),
            DivergenceValue::Infinite(InfinityReason::SupportViolation)
        );
    }

    #[test]
    fn restricted_support_for_alpha_below_one() {
        // ρ = diag(1/2, 1/2), σ = diag(1, 0): overlapping, not dominated.
        let (rho, sigma) = diag_pair(&[0.5, 0.5], &[1.0, 0.0]);
        let d = alpha_z_divergence(&rho, &sigma, ParamPoint::new(0.5, 0.8).unwrap()).unwrap().value();
        let expected = (0.5f64.sqrt()).ln() / (0.5 - 1.0);
        assert!((d - expected).abs() < 1e-14);
        assert_eq!(
            alpha_z_divergence(&rho, &sigma, ParamPoint::new(2.0, 1.0).unwrap()).unwrap(),
            DivergenceValue::Infinite(InfinityReason::SupportViolation)
        );
    }

    #[test]
    fn negative_exponents_need_full_rank() {
        let (rho, sigma) = example1(0.25);
        let err = alpha_z_divergence(&rho, &sigma, ParamPoint::new(2.0, -1.0).unwrap()).unwrap_err();
        assert!(matches!(err, Error::FormulaUndefined { .. }));
        let err = alpha_z_divergence(&rho, &sigma, ParamPoint::new(-0.5, 1.0).unwrap()).unwrap_err();
        assert!(matches!(err, Error::FormulaUndefined { .. }));
    }

    #[test]
    fn parameter_validation() {
        assert!(ParamPoint::new(2.0, 0.0).is_err());
        assert!(ParamPoint::new(f64::NAN, 1.0).is_err());
        let (rho, sigma) = example1(0.25);
        assert!(sandwiched_divergence(&rho, &sigma, 0.0).is_err());
        assert!(mosonyi_ogawa_divergence(&rho, &sigma, -1.0).is_err());
        assert!(DensityOperator::new(HermitianOperator::diagonal(&[0.5, 0.4])).is_err());
        assert_eq!(ReferenceOperator::new(HermitianOperator::zeros(2)).unwrap_err(), Error::ZeroOperator);
    }

    #[test]
    fn alpha_one_is_relative_entropy() {
        let (rho, sigma) = example1(0.1);
        let re = relative_entropy(&rho, &sigma).unwrap();
        for fam in [Family::Petz, Family::Sandwiched, Family::MosonyiOgawa, Family::AlphaZ] {
            assert_eq!(fam.evaluate(&rho, &sigma, 1.0, 3.0).unwrap(), re);
        }
    }

    #[test]
    fn bits_conversion() {
        let v = DivergenceValue::Finite(std::f64::consts::LN_2).to_bits();
        assert!((v.value() - 1.0).abs() < 1e-15);
        let inf = DivergenceValue::Infinite(InfinityReason::OrthogonalStates);
        assert_eq!(inf.to_bits(), inf);
    }
}

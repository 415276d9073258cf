use rayon::prelude::*;
use serde::Serialize;

use super::fd::{try_fd_derivative, try_fd_second_derivative, FdScheme};
use super::tolerances as tol;
use super::{Check, CurveSpec, Example1Pair, Report, TraceFunctional};
use crate::divergences::ParamPoint;
use crate::error::{Error, Result};

/// `1 ± 0.1·2^{-k}` for `k = 0..=10`, then `1 ± 1e-5`.
pub fn dyadic_alphas() -> Vec<f64> {
    let mut v = Vec::with_capacity(24);
    for k in 0..=10 {
        let d = 0.1 / f64::powi(2.0, k);
        v.push(1.0 - d);
        v.push(1.0 + d);
    }
    v.push(1.0 - 1e-5);
    v.push(1.0 + 1e-5);
    v
}

/// `1 ± 10^{-k}` for `k = 1..=max_k`.
pub fn power_alphas(max_k: i32) -> Vec<f64> {
    (1..=max_k).flat_map(|k| [1.0 - 10f64.powi(-k), 1.0 + 10f64.powi(-k)]).collect()
}

fn check_approach(alphas: &[f64]) -> Result<()> {
    if alphas.is_empty() {
        return Err(Error::InvalidParameter("need at least one alpha".into()));
    }
    if let Some(a) = alphas.iter().find(|a| !a.is_finite() || **a == 1.0) {
        return Err(Error::InvalidParameter(format!("approach point {a} must be finite and differ from 1")));
    }
    Ok(())
}

/// Largest rise of `value` between consecutive refinements, looking at the
/// last `steps` refinements on each side of one. Values at or below `floor`
/// count as converged.
fn decay_violation<T>(
    points: &[T],
    alpha: impl Fn(&T) -> f64,
    value: impl Fn(&T) -> f64,
    steps: usize,
    floor: f64,
) -> f64 {
    let mut worst = 0.0f64;
    for below in [true, false] {
        let mut side: Vec<&T> = points.iter().filter(|p| (alpha(p) < 1.0) == below).collect();
        side.sort_by(|a, b| (alpha(b) - 1.0).abs().total_cmp(&(alpha(a) - 1.0).abs()));
        let tail = &side[side.len().saturating_sub(steps + 1)..];
        for w in tail.windows(2) {
            let (prev, next) = (value(w[0]), value(w[1]));
            if next > floor {
                worst = worst.max(next - prev);
            }
        }
    }
    worst
}

/// Value at the smallest `|α − 1|`, the larger of the two if both sides tie.
fn at_tightest<T>(points: &[T], alpha: impl Fn(&T) -> f64, value: impl Fn(&T) -> f64) -> f64 {
    let d = points.iter().map(|p| (alpha(p) - 1.0).abs()).fold(f64::INFINITY, f64::min);
    points.iter().filter(|p| (alpha(p) - 1.0).abs() == d).map(value).fold(0.0, f64::max)
}

#[derive(Clone, Debug, Serialize)]
pub struct LimitPoint {
    pub alpha: f64,
    pub z: f64,
    pub divergence: f64,
    pub error: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CurveLimitReport {
    pub curve: CurveSpec,
    pub relative_entropy: f64,
    pub points: Vec<LimitPoint>,
    pub checks: Vec<Check>,
}

impl Report for CurveLimitReport {
    fn checks(&self) -> &[Check] {
        &self.checks
    }
}

/// Error `|D_{α,g(α)} − D(ρ‖σ)|` along `alphas`. Passes iff the error at the
/// tightest α is within tolerance and decays over the last three
/// refinements on each side.
pub fn verify_curve_limit(tf: &TraceFunctional, curve: CurveSpec, alphas: &[f64]) -> Result<CurveLimitReport> {
    check_approach(alphas)?;
    let target = tf.relative_entropy()?;
    let points = alphas
        .par_iter()
        .map(|&alpha| {
            let z = curve.g(alpha);
            let divergence = tf.divergence(alpha, z)?;
            Ok(LimitPoint { alpha, z, divergence, error: (divergence - target).abs() })
        })
        .collect::<Result<Vec<_>>>()?;
    let tight = at_tightest(&points, |p| p.alpha, |p| p.error);
    let rise = decay_violation(&points, |p| p.alpha, |p| p.error, 3, tol::LIMIT_NOISE_FLOOR);
    let checks = vec![Check::new("limit_error", tight, tol::LIMIT), Check::new("limit_decay", rise, 0.0)];
    Ok(CurveLimitReport { curve, relative_entropy: target, points, checks })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivativeFamily {
    /// `z = 1`, the Petz curve.
    ZEqualsOne,
    /// `z = α`, the sandwiched curve.
    ZEqualsAlpha,
}

impl DerivativeFamily {
    pub fn z(self, alpha: f64) -> f64 {
        match self {
            DerivativeFamily::ZEqualsOne => 1.0,
            DerivativeFamily::ZEqualsAlpha => alpha,
        }
    }

    pub fn other(self) -> Self {
        match self {
            DerivativeFamily::ZEqualsOne => DerivativeFamily::ZEqualsAlpha,
            DerivativeFamily::ZEqualsAlpha => DerivativeFamily::ZEqualsOne,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DerivativeReport {
    pub family: DerivativeFamily,
    pub scheme: FdScheme,
    pub estimate: f64,
    pub other_family_estimate: f64,
    pub half_variance: f64,
    pub checks: Vec<Check>,
}

impl Report for DerivativeReport {
    fn checks(&self) -> &[Check] {
        &self.checks
    }
}

fn slope_at_one(tf: &TraceFunctional, family: DerivativeFamily, scheme: FdScheme) -> Result<f64> {
    try_fd_derivative(|a| tf.divergence(a, family.z(a)), 1.0, scheme)
}

/// Finite-difference slope of `α ↦ D_{α,z(α)}` at one against `V/2`, plus
/// agreement with the other family and non-negativity of the slope.
pub fn verify_derivative_at_one(
    tf: &TraceFunctional,
    family: DerivativeFamily,
    scheme: FdScheme,
) -> Result<DerivativeReport> {
    let estimate = slope_at_one(tf, family, scheme)?;
    let other = slope_at_one(tf, family.other(), scheme)?;
    let half_variance = 0.5 * tf.variance()?;
    let relative = (estimate - half_variance).abs() / half_variance.abs().max(tol::DERIVATIVE_FLOOR);
    let checks = vec![
        Check::new("slope_vs_half_variance", relative, tol::DERIVATIVE_RELATIVE),
        Check::new("family_agreement", (estimate - other).abs(), tol::FAMILY_AGREEMENT),
        Check::new("slope_non_negative", (-estimate).max(0.0), tol::SLOPE_LOWER_SLACK),
    ];
    Ok(DerivativeReport { family, scheme, estimate, other_family_estimate: other, half_variance, checks })
}

#[derive(Clone, Debug, Serialize)]
pub struct SecondDerivativeReport {
    pub p: f64,
    pub scheme: FdScheme,
    /// `D_{α,1}''` at one via closed form and via matrices.
    pub petz: [f64; 2],
    /// `D_{α,α}''` at one via closed form and via matrices.
    pub sandwiched: [f64; 2],
    pub sandwiched_target: f64,
    pub max_stencil_gap: f64,
    pub checks: Vec<Check>,
}

impl Report for SecondDerivativeReport {
    fn checks(&self) -> &[Check] {
        &self.checks
    }
}

/// Second derivatives at one of the Petz and sandwiched curves for the
/// two-level example: `0` and `−¼(ln p − ln(1−p))²`.
pub fn verify_second_derivative_example1(p: f64, scheme: FdScheme) -> Result<SecondDerivativeReport> {
    let pair = Example1Pair::new(p)?;
    let tf = pair.trace_functional()?;
    let closed = |family: DerivativeFamily, a: f64| pair.closed_form(ParamPoint::new(a, family.z(a))?);
    let matrix = |family: DerivativeFamily, a: f64| tf.divergence(a, family.z(a));

    let mut values = [[0.0; 2]; 2];
    let mut gap = 0.0f64;
    for (slot, family) in [DerivativeFamily::ZEqualsOne, DerivativeFamily::ZEqualsAlpha].into_iter().enumerate() {
        values[slot][0] = try_fd_second_derivative(|a| closed(family, a), 1.0, scheme)?;
        values[slot][1] = try_fd_second_derivative(|a| matrix(family, a), 1.0, scheme)?;
        for a in scheme.stencil(1.0) {
            gap = gap.max((closed(family, a)? - matrix(family, a)?).abs());
        }
    }
    let [petz, sandwiched] = values;
    let target = -pair.variance();
    let rel = |v: f64| (v - target).abs() / target.abs();
    let checks = vec![
        Check::new("petz_second_derivative_closed_form", petz[0].abs(), tol::SECOND_DERIVATIVE),
        Check::new("petz_second_derivative_matrix", petz[1].abs(), tol::SECOND_DERIVATIVE),
        Check::new("sandwiched_second_derivative_closed_form", rel(sandwiched[0]), tol::SECOND_DERIVATIVE),
        Check::new("sandwiched_second_derivative_matrix", rel(sandwiched[1]), tol::SECOND_DERIVATIVE),
        Check::new("stencil_path_agreement", gap, tol::STENCIL_AGREEMENT),
    ];
    Ok(SecondDerivativeReport { p, scheme, petz, sandwiched, sandwiched_target: target, max_stencil_gap: gap, checks })
}

#[derive(Clone, Debug, Serialize)]
pub struct ZMonotonicityReport {
    pub alpha: f64,
    pub zs: Vec<f64>,
    pub values: Vec<f64>,
    /// Largest step against the expected direction.
    pub max_violation: f64,
    pub checks: Vec<Check>,
}

impl Report for ZMonotonicityReport {
    fn checks(&self) -> &[Check] {
        &self.checks
    }
}

/// `z ↦ D_{α,z}` should not increase for `α > 1` and not decrease for `α < 1`.
pub fn verify_z_monotonicity(tf: &TraceFunctional, alpha: f64, zs: &[f64]) -> Result<ZMonotonicityReport> {
    if !alpha.is_finite() || alpha == 1.0 {
        return Err(Error::InvalidParameter(format!("alpha = {alpha} must be finite and differ from 1")));
    }
    if zs.is_empty() || zs.iter().any(|z| !(*z > 0.0 && z.is_finite())) || zs.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("zs must be positive and strictly ascending".into()));
    }
    let values = zs.par_iter().map(|&z| tf.divergence(alpha, z)).collect::<Result<Vec<_>>>()?;
    let sign = if alpha > 1.0 { 1.0 } else { -1.0 };
    let max_violation = values.windows(2).map(|w| sign * (w[1] - w[0])).fold(0.0, f64::max);
    let checks = vec![Check::new("z_monotone", max_violation, tol::MONOTONE_SLACK)];
    Ok(ZMonotonicityReport { alpha, zs: zs.to_vec(), values, max_violation, checks })
}

#[derive(Clone, Debug, Serialize)]
pub struct DzPoint {
    pub alpha: f64,
    pub derivative: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DzTraceReport {
    pub z0: f64,
    pub scheme: FdScheme,
    pub points: Vec<DzPoint>,
    pub checks: Vec<Check>,
}

impl Report for DzTraceReport {
    fn checks(&self) -> &[Check] {
        &self.checks
    }
}

/// `∂T/∂z` at `(α, z0)` along `alphas`. Passes iff it is small at the
/// tightest α and shrinks along the refinement.
pub fn verify_dz_trace_vanishes(
    tf: &TraceFunctional,
    z0: f64,
    alphas: &[f64],
    scheme: FdScheme,
) -> Result<DzTraceReport> {
    if !(z0.is_finite() && z0 != 0.0) {
        return Err(Error::InvalidParameter(format!("z0 = {z0} must be finite and non-zero")));
    }
    if alphas.is_empty() || alphas.iter().any(|a| !a.is_finite()) {
        return Err(Error::InvalidParameter("alphas must be finite and non-empty".into()));
    }
    if z0.abs() <= scheme.step() {
        return Err(Error::InvalidStep(scheme.step()));
    }
    let points = alphas
        .par_iter()
        .map(|&alpha| {
            let derivative = try_fd_derivative(|z| tf.trace(ParamPoint::new(alpha, z)?), z0, scheme)?;
            Ok(DzPoint { alpha, derivative })
        })
        .collect::<Result<Vec<_>>>()?;
    let tight = at_tightest(&points, |p| p.alpha, |p| p.derivative.abs());
    let steps = points.len();
    let rise = decay_violation(&points, |p| p.alpha, |p| p.derivative.abs(), steps, tol::DZ_NOISE_FLOOR);
    let checks = vec![Check::new("dz_trace_tightest", tight, tol::DZ_TRACE), Check::new("dz_trace_decay", rise, 0.0)];
    Ok(DzTraceReport { z0, scheme, points, checks })
}

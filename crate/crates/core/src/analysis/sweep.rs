use rayon::prelude::*;
use serde::Serialize;

use super::CurveSpec;
use crate::divergences::{
    alpha_z_divergence, trace_functional, DensityOperator, DivergenceValue, InfinityReason, ParamPoint,
    ReferenceOperator, TraceValue,
};
use crate::error::{Error, Result};

/// `n` evenly spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if n == 0 || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidParameter(format!("grid {lo}:{hi}:{n} must be finite and non-empty")));
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    if lo == hi {
        return Err(Error::InvalidParameter(format!("grid {lo}:{hi}:{n} repeats a single point")));
    }
    let last = (n - 1) as f64;
    Ok((0..n).map(|i| if i == n - 1 { hi } else { lo + (hi - lo) * i as f64 / last }).collect())
}

/// How `z` is chosen for each α.
#[derive(Clone, Debug, PartialEq)]
pub enum ZAxis {
    Values(Vec<f64>),
    Curve(CurveSpec),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub alphas: Vec<f64>,
    pub z: ZAxis,
}

impl SweepSpec {
    pub fn new(alphas: Vec<f64>, z: ZAxis) -> Result<Self> {
        let zs: &[f64] = match &z {
            ZAxis::Values(v) => v,
            ZAxis::Curve(_) => &[],
        };
        if alphas.is_empty() || matches!(&z, ZAxis::Values(v) if v.is_empty()) {
            return Err(Error::InvalidParameter("sweep grid is empty".into()));
        }
        if alphas.iter().chain(zs).any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("sweep grid must be finite".into()));
        }
        Ok(Self { alphas, z })
    }

    /// Grid points in α-major order.
    pub fn points(&self) -> Vec<(f64, f64)> {
        match &self.z {
            ZAxis::Values(zs) => self.alphas.iter().flat_map(|&a| zs.iter().map(move |&z| (a, z))).collect(),
            ZAxis::Curve(c) => self.alphas.iter().map(|&a| (a, c.g(a))).collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub alpha: f64,
    pub z: f64,
    pub divergence: DivergenceValue,
    /// `None` when the trace functional is unbounded.
    pub trace: Option<f64>,
}

impl SweepRow {
    pub fn is_finite(&self) -> bool {
        self.divergence.is_finite()
    }
}

fn row(rho: &DensityOperator, sigma: &ReferenceOperator, alpha: f64, z: f64) -> Result<SweepRow> {
    let pt = ParamPoint::new(alpha, z)?;
    let divergence = alpha_z_divergence(rho, sigma, pt)?;
    let trace = match trace_functional(rho, sigma, pt)? {
        TraceValue::Finite(t) => Some(t),
        TraceValue::Infinite(InfinityReason::OrthogonalStates) => Some(0.0),
        TraceValue::Infinite(InfinityReason::SupportViolation) => None,
    };
    Ok(SweepRow { alpha, z, divergence, trace })
}

/// Evaluates every grid point, in parallel, returning rows in α-major order.
pub fn sweep(rho: &DensityOperator, sigma: &ReferenceOperator, spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.points().into_par_iter().map(|(a, z)| row(rho, sigma, a, z)).collect()
}

/// Number of steps, along each fixed `z`, where the divergence decreases as
/// α grows by more than `1e-10`.
pub fn alpha_monotonicity_violations(rows: &[SweepRow]) -> usize {
    let mut by_z: Vec<&SweepRow> = rows.iter().collect();
    by_z.sort_by(|a, b| a.z.total_cmp(&b.z).then(a.alpha.total_cmp(&b.alpha)));
    by_z.windows(2)
        .filter(|w| w[0].z == w[1].z)
        .filter(|w| match (w[0].divergence, w[1].divergence) {
            (DivergenceValue::Finite(a), DivergenceValue::Finite(b)) => b < a - 1e-10,
            (DivergenceValue::Infinite(_), DivergenceValue::Finite(_)) => true,
            _ => false,
        })
        .count()
}

//! The two-level pair `ρ = ½[[1,1],[1,1]]`, `σ = diag(p, 1−p)`, whose α-z
//! divergence has a closed form.

use serde::Serialize;

use super::{CurveSpec, TraceFunctional};
use crate::divergences::{ParamPoint, ALPHA_ONE_TOL};
use crate::error::{Error, Result};
use crate::testkit::example1_pair;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Example1Pair {
    p: f64,
}

impl Example1Pair {
    pub fn new(p: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) || p == 0.5 {
            return Err(Error::InvalidParameter(format!("p = {p} must lie in (0, 1) and differ from 1/2")));
        }
        Ok(Self { p })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn closed_form(&self, pt: ParamPoint) -> Result<f64> {
        example1_closed_form(self.p, pt)
    }

    pub fn trace_functional(&self) -> Result<TraceFunctional> {
        let (rho, sigma) = example1_pair(self.p)?;
        TraceFunctional::new(rho, sigma)
    }

    /// `¼(ln p − ln(1−p))²`, the relative entropy variance of the pair.
    pub fn variance(&self) -> f64 {
        let l = self.p.ln() - (1.0 - self.p).ln();
        0.25 * l * l
    }

    /// Largest `|closed form − matrix pipeline|` over `alphas × curves`.
    pub fn max_pipeline_gap(&self, alphas: &[f64], curves: &[CurveSpec]) -> Result<f64> {
        let tf = self.trace_functional()?;
        let mut gap = 0.0f64;
        for &alpha in alphas {
            for c in curves {
                let pt = ParamPoint::new(alpha, c.g(alpha))?;
                let closed = self.closed_form(pt)?;
                let matrix = tf.divergence(pt.alpha, pt.z)?;
                gap = gap.max((closed - matrix).abs());
            }
        }
        Ok(gap)
    }
}

/// The `(α, z)` grid of the closed-form agreement check: `α = 0.2, 0.3, …, 3`
/// and `z ∈ {0.5, 1, α, 2, 5}`.
pub fn example1_grid() -> (Vec<f64>, Vec<CurveSpec>) {
    let alphas = (2..=30).map(|k| k as f64 / 10.0).collect();
    let curves = [0.5, 1.0, 2.0, 5.0]
        .into_iter()
        .map(|z| CurveSpec::constant(z).expect("non-zero constant"))
        .chain(std::iter::once(CurveSpec::identity()))
        .collect();
    (alphas, curves)
}

/// `z/(α−1) · ln((p^{(1−α)/z} + (1−p)^{(1−α)/z}) / 2)`, and its limit
/// `−½ ln(p(1−p))` at `α = 1`.
pub fn example1_closed_form(p: f64, pt: ParamPoint) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidParameter(format!("p = {p} must lie in (0, 1)")));
    }
    let ParamPoint { alpha, z } = ParamPoint::new(pt.alpha, pt.z)?;
    let q = 1.0 - p;
    if (alpha - 1.0).abs() <= ALPHA_ONE_TOL {
        return Ok(-0.5 * (p.ln() + q.ln()));
    }
    let e = (1.0 - alpha) / z;
    let mean = 0.5 * (p.powf(e) + q.powf(e));
    Ok(z / (alpha - 1.0) * mean.ln())
}

//! Numerical certification of limits, derivatives and monotonicity of the
//! α-z family.
//!
//! Every `verify_*` function returns a report carrying a list of [`Check`]s.
//! A check passes iff its residual is at most its tolerance.

mod curve;
mod example1;
pub mod fd;
pub mod suite;
mod sweep;
mod verify;

use serde::Serialize;

pub use curve::{CurveKind, CurveSpec};
pub use example1::{example1_closed_form, example1_grid, Example1Pair};
pub use fd::{fd_derivative, fd_second_derivative, try_fd_derivative, try_fd_second_derivative, FdOrder, FdScheme};
pub use sweep::{alpha_monotonicity_violations, linspace, sweep, SweepRow, SweepSpec, ZAxis};
pub use verify::{
    dyadic_alphas, power_alphas, verify_curve_limit, verify_derivative_at_one, verify_dz_trace_vanishes,
    verify_second_derivative_example1, verify_z_monotonicity, CurveLimitReport, DerivativeFamily, DerivativeReport,
    DzPoint, DzTraceReport, LimitPoint, SecondDerivativeReport, ZMonotonicityReport,
};

use crate::divergences::{
    alpha_z_divergence, relative_entropy, relative_entropy_variance, support_relation, trace_functional,
    DensityOperator, ParamPoint, ReferenceOperator, TraceValue,
};
use crate::error::{Error, Result};

/// Pinned tolerances of the certification protocols.
pub mod tolerances {
    /// Limit error allowed at the tightest approach `|α − 1| = 1e-5`.
    pub const LIMIT: f64 = 1e-3;
    /// Errors below this are treated as converged by the decay checks.
    pub const LIMIT_NOISE_FLOOR: f64 = 1e-9;
    /// Relative error of the first derivative at `α = 1` against `V/2`.
    pub const DERIVATIVE_RELATIVE: f64 = 1e-3;
    /// Denominator floor for that relative error. Near `V = 0` the check is
    /// absolute at `1e-6`, above the `~1e-7` round-off of a step-`1e-4` slope.
    pub const DERIVATIVE_FLOOR: f64 = 1e-3;
    /// Agreement of the `z = 1` and `z = α` slope estimates.
    pub const FAMILY_AGREEMENT: f64 = 1e-5;
    /// Lowest admissible slope at `α = 1`.
    pub const SLOPE_LOWER_SLACK: f64 = 1e-6;
    /// Second-derivative checks of the two-level example.
    pub const SECOND_DERIVATIVE: f64 = 1e-3;
    /// Closed form against matrix pipeline, on stencil points.
    pub const STENCIL_AGREEMENT: f64 = 1e-9;
    /// Closed form against matrix pipeline, on the (α, z) grid.
    pub const CLOSED_FORM: f64 = 1e-10;
    /// Per-step slack of the z-monotonicity check.
    pub const MONOTONE_SLACK: f64 = 1e-10;
    /// `|∂T/∂z|` allowed at the tightest α.
    pub const DZ_TRACE: f64 = 1e-4;
    /// Derivatives below this are treated as converged by the decay check.
    pub const DZ_NOISE_FLOOR: f64 = 1e-10;
    /// Classical reduction of the α-z divergence.
    pub const CLASSICAL: f64 = 1e-10;
    /// Relative entropy against Kullback-Leibler.
    pub const KULLBACK_LEIBLER: f64 = 1e-12;
    pub const UNITARY: f64 = 1e-9;
    pub const SCALING: f64 = 1e-10;
    pub const SELF_DIVERGENCE: f64 = 1e-10;
    /// Allowed increase of the divergence under pinching.
    pub const DPI: f64 = 1e-9;
}

/// One pass/fail assertion with its measured residual.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Self { name: name.into(), residual, tolerance, passed: residual <= tolerance }
    }

    /// Same check with the residual moved by `delta`.
    pub fn shifted(&self, delta: f64) -> Self {
        Self::new(self.name.clone(), self.residual + delta, self.tolerance)
    }
}

/// Common view of every verification report.
pub trait Report {
    fn checks(&self) -> &[Check];

    fn passed(&self) -> bool {
        self.checks().iter().all(|c| c.passed)
    }

    fn first_failure(&self) -> Option<&Check> {
        self.checks().iter().find(|c| !c.passed)
    }
}

/// A state and a dominating reference, the setting in which the trace
/// functional `T(α, z)` is smooth.
#[derive(Clone, Debug)]
pub struct TraceFunctional {
    rho: DensityOperator,
    sigma: ReferenceOperator,
}

impl TraceFunctional {
    pub fn new(rho: DensityOperator, sigma: ReferenceOperator) -> Result<Self> {
        if !support_relation(&rho, &sigma)?.dominated {
            return Err(Error::SupportViolation);
        }
        Ok(Self { rho, sigma })
    }

    pub fn rho(&self) -> &DensityOperator {
        &self.rho
    }

    pub fn sigma(&self) -> &ReferenceOperator {
        &self.sigma
    }

    /// `T(α, z) = Tr(F(α, z)^z)`.
    pub fn trace(&self, pt: ParamPoint) -> Result<f64> {
        match trace_functional(&self.rho, &self.sigma, pt)? {
            TraceValue::Finite(t) => Ok(t),
            TraceValue::Infinite(_) => Err(Error::SupportViolation),
        }
    }

    /// `D_{α,z}`, with the relative entropy at `α = 1`.
    pub fn divergence(&self, alpha: f64, z: f64) -> Result<f64> {
        alpha_z_divergence(&self.rho, &self.sigma, ParamPoint::new(alpha, z)?)?.finite().ok_or(Error::SupportViolation)
    }

    pub fn relative_entropy(&self) -> Result<f64> {
        relative_entropy(&self.rho, &self.sigma)?.finite().ok_or(Error::SupportViolation)
    }

    pub fn variance(&self) -> Result<f64> {
        relative_entropy_variance(&self.rho, &self.sigma)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::divergences::{classical_renyi, ProbVector};
    use crate::hermitian::HermitianOperator;
    use crate::testkit::{support_pair, GeneratorSeed, SupportBranch};

    fn diag_tf(p: &[f64], q: &[f64]) -> TraceFunctional {
        TraceFunctional::new(
            DensityOperator::new(HermitianOperator::diagonal(p)).unwrap(),
            ReferenceOperator::new(HermitianOperator::diagonal(q)).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn trace_at_one_is_one() {
        let tf = diag_tf(&[0.2, 0.3, 0.5], &[0.6, 0.3, 0.1]);
        for z in [0.5, 1.0, 3.0, -1.0] {
            assert!((tf.trace(ParamPoint::new(1.0, z).unwrap()).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn diagonal_trace_is_classical_sum() {
        let (p, q) = ([0.2, 0.3, 0.5], [0.6, 0.3, 0.1]);
        let tf = diag_tf(&p, &q);
        for alpha in [0.3, 0.8, 1.5, 3.0] {
            let expected: f64 = p.iter().zip(&q).map(|(a, b)| a.powf(alpha) * b.powf(1.0 - alpha)).sum();
            for z in [0.5, 1.0, alpha, 4.0] {
                let t = tf.trace(ParamPoint::new(alpha, z).unwrap()).unwrap();
                assert!((t - expected).abs() < 1e-12, "alpha {alpha} z {z}");
                let d = tf.divergence(alpha, z).unwrap();
                assert!((d - t.ln() / (alpha - 1.0)).abs() < 1e-12);
                let c = classical_renyi(
                    &ProbVector::new(p.to_vec()).unwrap(),
                    &ProbVector::new(q.to_vec()).unwrap(),
                    alpha,
                )
                .unwrap()
                .value();
                assert!((d - c).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn requires_dominance() {
        let gs = GeneratorSeed::new(3, 3).unwrap();
        let (rho, sigma) = support_pair(gs, 2, SupportBranch::Violating).unwrap();
        assert_eq!(TraceFunctional::new(rho, sigma).unwrap_err(), Error::SupportViolation);
        let (rho, sigma) = support_pair(gs, 2, SupportBranch::Dominating).unwrap();
        assert!(TraceFunctional::new(rho, sigma).is_ok());
    }

    #[test]
    fn check_semantics() {
        assert!(Check::new("a", 1e-4, 1e-3).passed);
        assert!(!Check::new("a", f64::NAN, 1e-3).passed);
        assert!(!Check::new("a", 0.0, 0.0).shifted(1e-2).passed);
    }
}

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

/// Shape of a curve `z = g(α)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum CurveKind {
    ConstantZ {
        z0: f64,
    },
    /// `g(α) = α`.
    Identity,
    /// `g(α) = aα + b`.
    Affine {
        a: f64,
        b: f64,
    },
    /// `g(α) = e^{α − 1}`.
    Exponential,
}

/// A curve `z = g(α)` through the parameter plane with `g(1) ≠ 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct CurveSpec(CurveKind);

impl CurveSpec {
    pub fn new(kind: CurveKind) -> Result<Self> {
        let params_finite = match kind {
            CurveKind::ConstantZ { z0 } => z0.is_finite(),
            CurveKind::Affine { a, b } => a.is_finite() && b.is_finite(),
            CurveKind::Identity | CurveKind::Exponential => true,
        };
        if !params_finite {
            return Err(Error::InvalidCurve(format!("{kind:?} has non-finite parameters")));
        }
        let c = Self(kind);
        if c.g(1.0) == 0.0 {
            return Err(Error::InvalidCurve(format!("{c} vanishes at alpha = 1")));
        }
        Ok(c)
    }

    pub fn constant(z0: f64) -> Result<Self> {
        Self::new(CurveKind::ConstantZ { z0 })
    }

    pub fn identity() -> Self {
        Self(CurveKind::Identity)
    }

    pub fn affine(a: f64, b: f64) -> Result<Self> {
        Self::new(CurveKind::Affine { a, b })
    }

    pub fn exponential() -> Self {
        Self(CurveKind::Exponential)
    }

    pub fn kind(&self) -> CurveKind {
        self.0
    }

    pub fn g(&self, alpha: f64) -> f64 {
        match self.0 {
            CurveKind::ConstantZ { z0 } => z0,
            CurveKind::Identity => alpha,
            CurveKind::Affine { a, b } => a * alpha + b,
            CurveKind::Exponential => (alpha - 1.0).exp(),
        }
    }

    pub fn dg(&self, alpha: f64) -> f64 {
        match self.0 {
            CurveKind::ConstantZ { .. } => 0.0,
            CurveKind::Identity => 1.0,
            CurveKind::Affine { a, .. } => a,
            CurveKind::Exponential => (alpha - 1.0).exp(),
        }
    }

    /// The five curves of the limit certification.
    pub fn standard_set() -> Vec<Self> {
        vec![
            Self(CurveKind::ConstantZ { z0: 1.0 }),
            Self(CurveKind::ConstantZ { z0: 2.0 }),
            Self(CurveKind::Identity),
            Self(CurveKind::Affine { a: 2.0, b: -1.0 }),
            Self(CurveKind::Exponential),
        ]
    }
}

impl fmt::Display for CurveSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            CurveKind::ConstantZ { z0 } => write!(f, "const:{z0}"),
            CurveKind::Identity => write!(f, "sandwiched"),
            CurveKind::Affine { a, b } => write!(f, "affine:{a}:{b}"),
            CurveKind::Exponential => write!(f, "exp"),
        }
    }
}

/// Accepts `petz`, `sandwiched` (or `identity`), `exp`, `const:Z` and
/// `affine:A:B`.
impl FromStr for CurveSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let num = |t: &str| {
            t.trim().parse::<f64>().map_err(|_| Error::InvalidCurve(format!("bad number {t:?} in curve {s:?}")))
        };
        let parts: Vec<&str> = s.trim().split(':').collect();
        match parts.as_slice() {
            ["petz"] => Self::constant(1.0),
            ["sandwiched"] | ["identity"] => Ok(Self::identity()),
            ["exp"] | ["exponential"] => Ok(Self::exponential()),
            ["const", z] => Self::constant(num(z)?),
            ["affine", a, b] => Self::affine(num(a)?, num(b)?),
            _ => Err(Error::InvalidCurve(format!("unknown curve {s:?}"))),
        }
    }
}

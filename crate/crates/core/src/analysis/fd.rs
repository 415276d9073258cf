//! Central finite differences and Richardson extrapolation.

use serde::Serialize;

use crate::error::{Error, Result};

pub const MIN_STEP: f64 = 1e-7;
pub const MAX_STEP: f64 = 1e-1;

/// Default step for first derivatives.
pub const FIRST_DERIVATIVE_STEP: f64 = 1e-4;
/// Default step for second derivatives.
pub const SECOND_DERIVATIVE_STEP: f64 = 1e-3;

/// Number of step halvings in the Richardson tableau.
const RICHARDSON_LEVELS: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FdOrder {
    Central2,
    Central4,
    Richardson,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FdScheme {
    step: f64,
    order: FdOrder,
}

impl FdScheme {
    pub fn new(step: f64, order: FdOrder) -> Result<Self> {
        if !(MIN_STEP..=MAX_STEP).contains(&step) {
            return Err(Error::InvalidStep(step));
        }
        Ok(Self { step, order })
    }

    pub fn central2(step: f64) -> Result<Self> {
        Self::new(step, FdOrder::Central2)
    }

    pub fn first_derivative_default() -> Self {
        Self { step: FIRST_DERIVATIVE_STEP, order: FdOrder::Central2 }
    }

    pub fn second_derivative_default() -> Self {
        Self { step: SECOND_DERIVATIVE_STEP, order: FdOrder::Central2 }
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn order(&self) -> FdOrder {
        self.order
    }

    /// Every abscissa the scheme samples around `x0`, in ascending order.
    pub fn stencil(&self, x0: f64) -> Vec<f64> {
        let h = self.step;
        let mut offsets: Vec<f64> = match self.order {
            FdOrder::Central2 => vec![-h, 0.0, h],
            FdOrder::Central4 => vec![-2.0 * h, -h, 0.0, h, 2.0 * h],
            FdOrder::Richardson => {
                let mut v = vec![0.0];
                for k in 0..RICHARDSON_LEVELS {
                    let hk = h / f64::powi(2.0, k as i32);
                    v.push(-hk);
                    v.push(hk);
                }
                v
            }
        };
        offsets.sort_by(f64::total_cmp);
        offsets.into_iter().map(|d| x0 + d).collect()
    }
}

fn sample<F: Fn(f64) -> Result<f64>>(f: &F, x: f64) -> Result<f64> {
    let v = f(x)?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFiniteSample(x))
    }
}

fn central_first<F: Fn(f64) -> Result<f64>>(f: &F, x0: f64, h: f64) -> Result<f64> {
    Ok((sample(f, x0 + h)? - sample(f, x0 - h)?) / (2.0 * h))
}

fn central_second<F: Fn(f64) -> Result<f64>>(f: &F, x0: f64, h: f64, center: f64) -> Result<f64> {
    Ok((sample(f, x0 + h)? - 2.0 * center + sample(f, x0 - h)?) / (h * h))
}

/// Richardson tableau over halved steps for a base rule whose error
/// expands in even powers of `h`.
fn richardson(mut base: impl FnMut(f64) -> Result<f64>, h: f64) -> Result<f64> {
    let mut prev: Vec<f64> = Vec::with_capacity(RICHARDSON_LEVELS);
    for k in 0..RICHARDSON_LEVELS {
        let mut row = vec![base(h / f64::powi(2.0, k as i32))?];
        for j in 1..=k {
            let factor = f64::powi(4.0, j as i32) - 1.0;
            let r = row[j - 1] + (row[j - 1] - prev[j - 1]) / factor;
            row.push(r);
        }
        prev = row;
    }
    Ok(*prev.last().expect("at least one level"))
}

/// First derivative of a fallible function.
pub fn try_fd_derivative<F: Fn(f64) -> Result<f64>>(f: F, x0: f64, scheme: FdScheme) -> Result<f64> {
    let h = scheme.step;
    match scheme.order {
        FdOrder::Central2 => central_first(&f, x0, h),
        FdOrder::Central4 => {
            let (p2, p1) = (sample(&f, x0 + 2.0 * h)?, sample(&f, x0 + h)?);
            let (m1, m2) = (sample(&f, x0 - h)?, sample(&f, x0 - 2.0 * h)?);
            Ok((-p2 + 8.0 * p1 - 8.0 * m1 + m2) / (12.0 * h))
        }
        FdOrder::Richardson => richardson(|hk| central_first(&f, x0, hk), h),
    }
}

/// Second derivative of a fallible function.
pub fn try_fd_second_derivative<F: Fn(f64) -> Result<f64>>(f: F, x0: f64, scheme: FdScheme) -> Result<f64> {
    let h = scheme.step;
    let center = sample(&f, x0)?;
    match scheme.order {
        FdOrder::Central2 => central_second(&f, x0, h, center),
        FdOrder::Central4 => {
            let (p2, p1) = (sample(&f, x0 + 2.0 * h)?, sample(&f, x0 + h)?);
            let (m1, m2) = (sample(&f, x0 - h)?, sample(&f, x0 - 2.0 * h)?);
            Ok((-p2 + 16.0 * p1 - 30.0 * center + 16.0 * m1 - m2) / (12.0 * h * h))
        }
        FdOrder::Richardson => richardson(|hk| central_second(&f, x0, hk, center), h),
    }
}

pub fn fd_derivative(f: impl Fn(f64) -> f64, x0: f64, scheme: FdScheme) -> Result<f64> {
    try_fd_derivative(|x| Ok(f(x)), x0, scheme)
}

pub fn fd_second_derivative(f: impl Fn(f64) -> f64, x0: f64, scheme: FdScheme) -> Result<f64> {
    try_fd_second_derivative(|x| Ok(f(x)), x0, scheme)
}

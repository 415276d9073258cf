use super::{DivergenceValue, InfinityReason};
use crate::error::{Error, Result};

/// Probability vector with non-negative entries summing to one.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbVector(Vec<f64>);

impl ProbVector {
    pub const SUM_TOL: f64 = 1e-12;

    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidProbabilities("empty vector".into()));
        }
        if let Some(bad) = probs.iter().find(|&&x| !x.is_finite() || x < 0.0) {
            return Err(Error::InvalidProbabilities(format!("entry {bad} is not a finite non-negative number")));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > Self::SUM_TOL {
            return Err(Error::InvalidProbabilities(format!("entries sum to {sum}")));
        }
        Ok(Self(probs))
    }

    /// Rescales non-negative weights to sum to one.
    pub fn normalized(weights: &[f64]) -> Result<Self> {
        let sum: f64 = weights.iter().sum();
        if sum.is_nan() || sum <= 0.0 {
            return Err(Error::InvalidProbabilities("weights do not have a positive sum".into()));
        }
        Self::new(weights.iter().map(|w| w / sum).collect())
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

fn check_lengths(p: &ProbVector, q: &ProbVector) -> Result<()> {
    if p.len() == q.len() {
        Ok(())
    } else {
        Err(Error::DimensionMismatch(p.len(), q.len()))
    }
}

/// Kullback-Leibler divergence `Σ p_i ln(p_i / q_i)` in nats.
pub fn classical_kl(p: &ProbVector, q: &ProbVector) -> Result<DivergenceValue> {
    check_lengths(p, q)?;
    let mut sum = 0.0;
    for (&pi, &qi) in p.probs().iter().zip(q.probs()) {
        if pi == 0.0 {
            continue;
        }
        if qi == 0.0 {
            return Ok(DivergenceValue::Infinite(InfinityReason::SupportViolation));
        }
        sum += pi * (pi / qi).ln();
    }
    Ok(DivergenceValue::Finite(sum))
}

/// Rényi divergence `ln(Σ p_i^α q_i^{1-α}) / (α - 1)`.
///
/// Terms with `p_i = 0` vanish, as do terms with `q_i = 0` when `α < 1`.
pub fn classical_renyi(p: &ProbVector, q: &ProbVector, alpha: f64) -> Result<DivergenceValue> {
    check_lengths(p, q)?;
    if !alpha.is_finite() {
        return Err(Error::InvalidParameter(format!("alpha must be finite, got {alpha}")));
    }
    if alpha == 1.0 {
        return Err(Error::UseKullbackLeibler);
    }
    let mut sum = 0.0;
    for (&pi, &qi) in p.probs().iter().zip(q.probs()) {
        if pi == 0.0 {
            continue;
        }
        if qi == 0.0 {
            if alpha > 1.0 {
                return Ok(DivergenceValue::Infinite(InfinityReason::SupportViolation));
            }
            continue;
        }
        sum += pi.powf(alpha) * qi.powf(1.0 - alpha);
    }
    if sum == 0.0 {
        return Ok(DivergenceValue::Infinite(InfinityReason::OrthogonalStates));
    }
    Ok(DivergenceValue::Finite(sum.ln() / (alpha - 1.0)))
}

/// Classical relative entropy variance `Σ p_i ln²(p_i/q_i) − KL²`.
pub fn classical_variance(p: &ProbVector, q: &ProbVector) -> Result<f64> {
    check_lengths(p, q)?;
    let mut first = 0.0;
    let mut second = 0.0;
    for (&pi, &qi) in p.probs().iter().zip(q.probs()) {
        if pi == 0.0 {
            continue;
        }
        if qi == 0.0 {
            return Err(Error::SupportViolation);
        }
        let l = (pi / qi).ln();
        first += pi * l;
        second += pi * l * l;
    }
    Ok((second - first * first).max(0.0))
}

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Probability distribution of one uncertain input.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Distribution {
    /// Second parameter is the standard deviation.
    Normal { mean: f64, stddev: f64 },
    Uniform { lower: f64, upper: f64 },
}

/// Orthogonal polynomial family associated with a distribution.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PolyFamily {
    /// Probabilists' Hermite polynomials `He_n`.
    Hermite,
    /// Legendre polynomials `P_n` on `[-1, 1]`.
    Legendre,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DistributionError {
    #[error("normal distribution needs stddev > 0 (got {0})")]
    NonPositiveStddev(f64),
    #[error("uniform distribution needs lower < upper (got [{0}, {1}])")]
    EmptyInterval(f64, f64),
    #[error("distribution parameters must be finite")]
    NonFinite,
}

impl Distribution {
    pub fn normal(mean: f64, stddev: f64) -> Result<Self, DistributionError> {
        let d = Self::Normal { mean, stddev };
        d.check()?;
        Ok(d)
    }

    pub fn uniform(lower: f64, upper: f64) -> Result<Self, DistributionError> {
        let d = Self::Uniform { lower, upper };
        d.check()?;
        Ok(d)
    }

    pub fn check(&self) -> Result<(), DistributionError> {
        match *self {
            Self::Normal { mean, stddev } => {
                if !mean.is_finite() || !stddev.is_finite() {
                    Err(DistributionError::NonFinite)
                } else if stddev <= 0.0 {
                    Err(DistributionError::NonPositiveStddev(stddev))
                } else {
                    Ok(())
                }
            }
            Self::Uniform { lower, upper } => {
                if !lower.is_finite() || !upper.is_finite() {
                    Err(DistributionError::NonFinite)
                } else if lower >= upper {
                    Err(DistributionError::EmptyInterval(lower, upper))
                } else {
                    Ok(())
                }
            }
        }
    }

    pub fn family(&self) -> PolyFamily {
        match self {
            Self::Normal { .. } => PolyFamily::Hermite,
            Self::Uniform { .. } => PolyFamily::Legendre,
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            Self::Normal { mean, .. } => mean,
            Self::Uniform { lower, upper } => 0.5 * (lower + upper),
        }
    }

    /// Affine map from the standardized coordinate to the physical one.
    pub fn from_standard(&self, x: f64) -> f64 {
        match *self {
            Self::Normal { mean, stddev } => mean + stddev * x,
            Self::Uniform { lower, upper } => 0.5 * (lower + upper) + 0.5 * (upper - lower) * x,
        }
    }

    /// Inverse of [`Distribution::from_standard`].
    pub fn to_standard(&self, u: f64) -> f64 {
        match *self {
            Self::Normal { mean, stddev } => (u - mean) / stddev,
            Self::Uniform { lower, upper } => (2.0 * u - (lower + upper)) / (upper - lower),
        }
    }
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Normal { mean, stddev } => write!(f, "Normal({mean:?}, {stddev:?})"),
            Self::Uniform { lower, upper } => write!(f, "Uniform({lower:?}, {upper:?})"),
        }
    }
}

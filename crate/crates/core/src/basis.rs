//! Orthogonal polynomial bases for polynomial chaos expansions.
//!
//! Polynomials are the classical, non-normalized families (probabilists'
//! Hermite, Legendre) with their norms stored alongside.

use serde::Serialize;
use thiserror::Error;

use crate::distribution::{Distribution, PolyFamily};

pub const MAX_DEGREE: usize = 32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BasisError {
    #[error("polynomial degree {0} exceeds the maximum of {MAX_DEGREE}")]
    DegreeTooHigh(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("basis dimension must be at least 1")]
    ZeroDimension,
}

/// Classical polynomial of `family` and `degree` at the standardized coordinate `x`.
pub fn eval_univariate(family: PolyFamily, degree: usize, x: f64) -> Result<f64, BasisError> {
    if degree > MAX_DEGREE {
        return Err(BasisError::DegreeTooHigh(degree));
    }
    Ok(univariate_unchecked(family, degree, x))
}

fn univariate_unchecked(family: PolyFamily, degree: usize, x: f64) -> f64 {
    let (mut prev, mut cur) = (0.0, 1.0);
    for n in 0..degree {
        let nf = n as f64;
        let next = match family {
            PolyFamily::Hermite => x * cur - nf * prev,
            PolyFamily::Legendre => ((2.0 * nf + 1.0) * x * cur - nf * prev) / (nf + 1.0),
        };
        prev = cur;
        cur = next;
    }
    cur
}

/// `<P_n^2>` under the probability measure of the family.
pub fn univariate_norm(family: PolyFamily, degree: usize) -> f64 {
    match family {
        PolyFamily::Hermite => (1..=degree).map(|n| n as f64).product(),
        PolyFamily::Legendre => 1.0 / (2 * degree + 1) as f64,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct MultiIndex(pub Vec<usize>);

impl MultiIndex {
    pub fn total_degree(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PceBasis {
    pub dim: usize,
    pub order: usize,
    pub indices: Vec<MultiIndex>,
    pub norms: Vec<f64>,
    pub distributions: Vec<Distribution>,
}

/// `(d + p)! / (d! p!)`
pub fn basis_size(d: usize, p: usize) -> usize {
    // Exact in integers: each partial product is itself a binomial coefficient.
    (1..=p).fold(1usize, |acc, i| acc * (d + i) / i)
}

/// All multi-indices of total degree `total` in `d` slots, first slot descending.
fn indices_of_degree(d: usize, total: usize, out: &mut Vec<MultiIndex>) {
    fn rec(slot: usize, remaining: usize, cur: &mut Vec<usize>, out: &mut Vec<MultiIndex>) {
        if slot + 1 == cur.len() {
            cur[slot] = remaining;
            out.push(MultiIndex(cur.clone()));
            return;
        }
        for i in (0..=remaining).rev() {
            cur[slot] = i;
            rec(slot + 1, remaining - i, cur, out);
        }
    }
    let mut cur = vec![0; d];
    rec(0, total, &mut cur, out);
}

/// Total-degree basis of order `p` in graded order: by total degree, then
/// with earlier axes carrying higher degree first, e.g. for `d = 2, p = 2`:
/// `(0,0) (1,0) (0,1) (2,0) (1,1) (0,2)`.
pub fn enumerate_basis(p: usize, dists: &[Distribution]) -> Result<PceBasis, BasisError> {
    let d = dists.len();
    if d == 0 {
        return Err(BasisError::ZeroDimension);
    }
    if p > MAX_DEGREE {
        return Err(BasisError::DegreeTooHigh(p));
    }
    let mut indices = Vec::with_capacity(basis_size(d, p));
    for total in 0..=p {
        indices_of_degree(d, total, &mut indices);
    }
    let norms = indices
        .iter()
        .map(|idx| {
            idx.0
                .iter()
                .zip(dists)
                .map(|(&n, dist)| univariate_norm(dist.family(), n))
                .product()
        })
        .collect();
    Ok(PceBasis {
        dim: d,
        order: p,
        indices,
        norms,
        distributions: dists.to_vec(),
    })
}

impl PceBasis {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// `Phi(u)` for the polynomial with multi-index `index` at physical point `u`.
    pub fn eval_multivariate(&self, index: &MultiIndex, u: &[f64]) -> Result<f64, BasisError> {
        if index.dim() != self.dim {
            return Err(BasisError::DimensionMismatch {
                expected: self.dim,
                got: index.dim(),
            });
        }
        if u.len() != self.dim {
            return Err(BasisError::DimensionMismatch {
                expected: self.dim,
                got: u.len(),
            });
        }
        let mut value = 1.0;
        for ((&n, &x), dist) in index.0.iter().zip(u).zip(&self.distributions) {
            value *= eval_univariate(dist.family(), n, dist.to_standard(x))?;
        }
        Ok(value)
    }

    /// Every basis polynomial at physical point `u`, in basis order.
    pub fn eval_all(&self, u: &[f64]) -> Result<Vec<f64>, BasisError> {
        if u.len() != self.dim {
            return Err(BasisError::DimensionMismatch {
                expected: self.dim,
                got: u.len(),
            });
        }
        // Univariate tables per axis, then products.
        let tables: Vec<Vec<f64>> = u
            .iter()
            .zip(&self.distributions)
            .map(|(&x, dist)| {
                let s = dist.to_standard(x);
                (0..=self.order)
                    .map(|n| univariate_unchecked(dist.family(), n, s))
                    .collect()
            })
            .collect();
        Ok(self
            .indices
            .iter()
            .map(|idx| idx.0.iter().zip(&tables).map(|(&n, t)| t[n]).product())
            .collect())
    }
}

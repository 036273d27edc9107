use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::UqError;
use crate::basis::PceBasis;
use crate::engine::ValueTensor;
use crate::quadrature::TensorGrid;
use crate::signature::DependencySignature;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PceCoefficients {
    pub basis: PceBasis,
    pub alpha: Vec<f64>,
}

impl PceCoefficients {
    /// Surrogate value at physical point `u`.
    pub fn eval(&self, u: &[f64]) -> Result<f64, UqError> {
        let phi = self.basis.eval_all(u)?;
        Ok(phi.iter().zip(&self.alpha).map(|(p, a)| p * a).sum())
    }
}

fn check_basis(basis: &PceBasis, grid: &TensorGrid) -> Result<(), UqError> {
    if basis.dim != grid.dims() {
        return Err(UqError::DimensionMismatch(format!(
            "basis has dimension {}, grid has {} axes",
            basis.dim,
            grid.dims()
        )));
    }
    if basis.distributions != grid.distributions() {
        return Err(UqError::DimensionMismatch(
            "basis and grid use different input distributions".into(),
        ));
    }
    Ok(())
}

/// Projection of full-grid output values onto each basis polynomial:
/// `alpha_i = sum_p w_p f_p Phi_i(u_p) / <Phi_i^2>`, summed in flat-index order.
pub fn nipc_integration(
    outputs: &ValueTensor,
    grid: &TensorGrid,
    basis: &PceBasis,
) -> Result<PceCoefficients, UqError> {
    check_basis(basis, grid)?;
    if outputs.signature != DependencySignature::full(grid.dims()) || outputs.len() != grid.total_points {
        return Err(UqError::DimensionMismatch(format!(
            "expected {} full-grid values, got {} over {}",
            grid.total_points,
            outputs.len(),
            outputs.signature
        )));
    }
    let mut acc = vec![0.0; basis.len()];
    for (p, &f) in outputs.data.iter().enumerate() {
        let wf = grid.weight(p) * f;
        let phi = basis.eval_all(&grid.point(p))?;
        for (a, ph) in acc.iter_mut().zip(phi) {
            *a += wf * ph;
        }
    }
    let alpha = acc.iter().zip(&basis.norms).map(|(a, n)| a / n).collect();
    Ok(PceCoefficients {
        basis: basis.clone(),
        alpha,
    })
}

/// `(alpha_0, sqrt(sum_{i>=1} alpha_i^2 <Phi_i^2>))`
pub fn moments_from_pce(c: &PceCoefficients) -> (f64, f64) {
    let mean = c.alpha.first().copied().unwrap_or(0.0);
    let var: f64 = c
        .alpha
        .iter()
        .zip(&c.basis.norms)
        .skip(1)
        .map(|(a, n)| a * a * n)
        .sum();
    (mean, var.sqrt())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegressionFit {
    pub coefficients: PceCoefficients,
    pub residual_norm: f64,
    pub rank: usize,
}

/// Relative threshold on the diagonal of `R` below which a column counts as dependent.
const RANK_TOL: f64 = 1e-10;

/// Least-squares fit of the basis to `values` at `points` through a thin QR
/// factorization of the design matrix. All columns, including the constant
/// one, are fitted.
pub fn nipc_regression(
    points: &[Vec<f64>],
    values: &[f64],
    basis: &PceBasis,
) -> Result<RegressionFit, UqError> {
    let m = basis.len();
    let n = points.len();
    if values.len() != n {
        return Err(UqError::DimensionMismatch(format!(
            "{n} points but {} values",
            values.len()
        )));
    }
    if n < m {
        return Err(UqError::Underdetermined { needed: m, got: n });
    }
    let mut design = DMatrix::<f64>::zeros(n, m);
    for (r, u) in points.iter().enumerate() {
        for (c, phi) in basis.eval_all(u)?.into_iter().enumerate() {
            design[(r, c)] = phi;
        }
    }
    let b = DVector::from_column_slice(values);
    let qr = design.clone().qr();
    let rmat = qr.r();
    let diag_max = (0..m).map(|i| rmat[(i, i)].abs()).fold(0.0, f64::max);
    let rank = (0..m)
        .filter(|&i| rmat[(i, i)].abs() > RANK_TOL * diag_max)
        .count();
    if rank < m {
        return Err(UqError::RankDeficient { rank, needed: m });
    }
    let rhs = qr.q().transpose() * &b;
    let alpha = rmat
        .solve_upper_triangular(&rhs)
        .ok_or(UqError::RankDeficient { rank, needed: m })?;
    let residual_norm = (&design * &alpha - &b).norm();
    Ok(RegressionFit {
        coefficients: PceCoefficients {
            basis: basis.clone(),
            alpha: alpha.iter().copied().collect(),
        },
        residual_norm,
        rank,
    })
}

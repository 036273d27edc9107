//! Gauss quadrature rules matched to input distributions and their
//! tensor-product grids.
//!
//! Rules use the probability measure of the distribution, so weights sum to
//! one. Nodes start from the eigenvalues of the Jacobi matrix of the
//! orthonormal three-term recurrence and are then polished by Newton steps on
//! the degree-`k` polynomial; weights come from the Christoffel formula
//! `w_j = 1 / sum_n p_n(x_j)^2`, which keeps far-tail weights positive and
//! relatively accurate.

use nalgebra::DMatrix;
use serde::Serialize;
use thiserror::Error;

use crate::distribution::{Distribution, PolyFamily};

pub const MAX_ORDER: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QuadratureError {
    #[error("quadrature order must be in 1..={MAX_ORDER} (got {0})")]
    InvalidOrder(usize),
    #[error("a tensor grid needs at least one axis")]
    EmptyAxes,
    #[error("axis {axis} out of range for a {dims}-dimensional grid")]
    AxisOutOfRange { axis: usize, dims: usize },
    #[error("tensor grid has more points than fit in memory")]
    TooManyPoints,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuadratureRule1D {
    /// Ascending physical-coordinate nodes.
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub distribution: Distribution,
}

impl QuadratureRule1D {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Sum of `w_j * f(u_j)`.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Off-diagonal coefficient `b_n` (n >= 1) of the orthonormal recurrence
/// `x p_n = b_{n+1} p_{n+1} + b_n p_{n-1}`; all diagonal terms vanish for
/// the supported families.
fn recurrence_b(family: PolyFamily, n: usize) -> f64 {
    let n = n as f64;
    match family {
        PolyFamily::Hermite => n.sqrt(),
        PolyFamily::Legendre => n / (4.0 * n * n - 1.0).sqrt(),
    }
}

/// Orthonormal polynomials `p_0..p_k` and the derivative of `p_k` at `x`.
fn orthonormal_values(family: PolyFamily, k: usize, x: f64, out: &mut Vec<f64>) -> f64 {
    out.clear();
    out.push(1.0);
    let (mut p_prev, mut p) = (0.0, 1.0);
    let (mut d_prev, mut d) = (0.0, 0.0);
    for n in 0..k {
        let b_next = recurrence_b(family, n + 1);
        let b_n = if n == 0 { 0.0 } else { recurrence_b(family, n) };
        let p_next = (x * p - b_n * p_prev) / b_next;
        let d_next = (p + x * d - b_n * d_prev) / b_next;
        p_prev = p;
        p = p_next;
        d_prev = d;
        d = d_next;
        out.push(p);
    }
    d
}

/// Gauss rule on the standardized coordinate (standard normal or uniform on [-1, 1]).
fn standard_rule(family: PolyFamily, k: usize) -> (Vec<f64>, Vec<f64>) {
    let mut jacobi = DMatrix::<f64>::zeros(k, k);
    for i in 1..k {
        let b = recurrence_b(family, i);
        jacobi[(i - 1, i)] = b;
        jacobi[(i, i - 1)] = b;
    }
    let mut nodes: Vec<f64> = jacobi.symmetric_eigenvalues().iter().copied().collect();
    nodes.sort_by(f64::total_cmp);

    let mut scratch = Vec::with_capacity(k + 1);
    for x in nodes.iter_mut() {
        for _ in 0..4 {
            let d = orthonormal_values(family, k, *x, &mut scratch);
            let p_k = scratch[k];
            if d == 0.0 {
                break;
            }
            let step = p_k / d;
            *x -= step;
            if step.abs() <= 1e-16 * x.abs().max(1.0) {
                break;
            }
        }
    }

    // Both families are symmetric about zero.
    for j in 0..k / 2 {
        let m = 0.5 * (nodes[k - 1 - j] - nodes[j]);
        nodes[j] = -m;
        nodes[k - 1 - j] = m;
    }
    if k % 2 == 1 {
        nodes[k / 2] = 0.0;
    }

    let mut weights: Vec<f64> = nodes
        .iter()
        .map(|&x| {
            orthonormal_values(family, k - 1, x, &mut scratch);
            1.0 / scratch.iter().map(|p| p * p).sum::<f64>()
        })
        .collect();
    for j in 0..k / 2 {
        let w = 0.5 * (weights[j] + weights[k - 1 - j]);
        weights[j] = w;
        weights[k - 1 - j] = w;
    }
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    (nodes, weights)
}

/// `k`-point Gauss rule for `dist`, exact for polynomials up to degree `2k - 1`.
pub fn gauss_rule(dist: Distribution, k: usize) -> Result<QuadratureRule1D, QuadratureError> {
    if !(1..=MAX_ORDER).contains(&k) {
        return Err(QuadratureError::InvalidOrder(k));
    }
    let (x, weights) = standard_rule(dist.family(), k);
    let nodes = x.iter().map(|&x| dist.from_standard(x)).collect();
    Ok(QuadratureRule1D {
        nodes,
        weights,
        distribution: dist,
    })
}

/// Full tensor-product grid. Points are flattened row-major over the axes
/// with the last axis varying fastest.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TensorGrid {
    pub axes: Vec<QuadratureRule1D>,
    pub total_points: usize,
}

pub fn tensor_grid(rules: Vec<QuadratureRule1D>) -> Result<TensorGrid, QuadratureError> {
    if rules.is_empty() {
        return Err(QuadratureError::EmptyAxes);
    }
    let total_points = rules
        .iter()
        .try_fold(1usize, |acc, r| acc.checked_mul(r.len()))
        .ok_or(QuadratureError::TooManyPoints)?;
    Ok(TensorGrid {
        axes: rules,
        total_points,
    })
}

/// Grid with the same order `k` on every axis.
pub fn uniform_order_grid(dists: &[Distribution], k: usize) -> Result<TensorGrid, QuadratureError> {
    let rules = dists
        .iter()
        .map(|&d| gauss_rule(d, k))
        .collect::<Result<Vec<_>, _>>()?;
    tensor_grid(rules)
}

impl TensorGrid {
    pub fn dims(&self) -> usize {
        self.axes.len()
    }

    /// Nodes per axis.
    pub fn sizes(&self) -> Vec<usize> {
        self.axes.iter().map(|r| r.len()).collect()
    }

    /// Per-axis node indices of flat point `p`.
    pub fn digits(&self, mut p: usize) -> Vec<usize> {
        let mut digits = vec![0; self.axes.len()];
        for (j, rule) in self.axes.iter().enumerate().rev() {
            digits[j] = p % rule.len();
            p /= rule.len();
        }
        digits
    }

    pub fn point(&self, p: usize) -> Vec<f64> {
        self.digits(p)
            .iter()
            .zip(&self.axes)
            .map(|(&i, r)| r.nodes[i])
            .collect()
    }

    pub fn weight(&self, p: usize) -> f64 {
        self.digits(p)
            .iter()
            .zip(&self.axes)
            .map(|(&i, r)| r.weights[i])
            .product()
    }

    /// Joint weights of every point in flat order.
    pub fn weights(&self) -> Vec<f64> {
        (0..self.total_points).map(|p| self.weight(p)).collect()
    }

    pub fn distributions(&self) -> Vec<Distribution> {
        self.axes.iter().map(|r| r.distribution).collect()
    }
}

/// Coordinate of `axis` at every flattened grid point: the input vector a
/// point-by-point evaluation feeds for that uncertain input.
pub fn grid_input_vector(grid: &TensorGrid, axis: usize) -> Result<Vec<f64>, QuadratureError> {
    if axis >= grid.dims() {
        return Err(QuadratureError::AxisOutOfRange {
            axis,
            dims: grid.dims(),
        });
    }
    let inner: usize = grid.axes[axis + 1..].iter().map(|r| r.len()).product();
    let nodes = &grid.axes[axis].nodes;
    Ok((0..grid.total_points)
        .map(|p| nodes[(p / inner) % nodes.len()])
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn std_normal() -> Distribution {
        Distribution::normal(0.0, 1.0).unwrap()
    }

    fn rule(nodes: &[f64]) -> QuadratureRule1D {
        QuadratureRule1D {
            nodes: nodes.to_vec(),
            weights: vec![1.0 / nodes.len() as f64; nodes.len()],
            distribution: std_normal(),
        }
    }

    #[test]
    fn normal_one_point() {
        let r = gauss_rule(std_normal(), 1).unwrap();
        assert_eq!(r.nodes, vec![0.0]);
        assert_eq!(r.weights, vec![1.0]);
    }

    #[test]
    fn normal_two_points() {
        // Moment matching: w1 + w2 = 1, w1 x1 + w2 x2 = 0, w1 x1^2 + w2 x2^2 = 1, third moment 0.
        let r = gauss_rule(std_normal(), 2).unwrap();
        assert_abs_diff_eq!(r.nodes[0], -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(r.nodes[1], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(r.weights[0], 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(r.weights[1], 0.5, epsilon = 1e-14);
    }

    #[test]
    fn uniform_two_points() {
        let r = gauss_rule(Distribution::uniform(-1.0, 1.0).unwrap(), 2).unwrap();
        let x = 1.0 / 3f64.sqrt();
        assert_abs_diff_eq!(r.nodes[0], -x, epsilon = 1e-14);
        assert_abs_diff_eq!(r.nodes[1], x, epsilon = 1e-14);
        assert_abs_diff_eq!(r.weights[0], 0.5, epsilon = 1e-14);
    }

    #[test]
    fn five_point_hermite_matches_closed_form() {
        // He_5 = x^5 - 10x^3 + 15x has roots 0, ±sqrt(5 ± sqrt(10));
        // weights are n! / (n^2 He_4(x)^2) under the standard normal measure.
        let r = gauss_rule(std_normal(), 5).unwrap();
        let s10 = 10f64.sqrt();
        let expected = [-(5.0 + s10).sqrt(), -(5.0 - s10).sqrt(), 0.0, (5.0 - s10).sqrt(), (5.0 + s10).sqrt()];
        let he4 = |x: f64| x.powi(4) - 6.0 * x * x + 3.0;
        for (j, &x) in expected.iter().enumerate() {
            assert_abs_diff_eq!(r.nodes[j], x, epsilon = 1e-13);
            let w = 120.0 / (25.0 * he4(x).powi(2));
            assert_abs_diff_eq!(r.weights[j], w, epsilon = 1e-13);
        }
    }

    #[test]
    fn five_point_legendre_matches_reference() {
        // Reference values from numpy.polynomial.legendre.leggauss(5), weights halved.
        let r = gauss_rule(Distribution::uniform(-1.0, 1.0).unwrap(), 5).unwrap();
        let nodes = [-0.906179845938664, -0.5384693101056831, 0.0, 0.5384693101056831, 0.906179845938664];
        let weights = [0.11846344252809471, 0.2393143352496831, 0.2844444444444445, 0.2393143352496831, 0.11846344252809471];
        for j in 0..5 {
            assert_abs_diff_eq!(r.nodes[j], nodes[j], epsilon = 1e-13);
            assert_abs_diff_eq!(r.weights[j], weights[j], epsilon = 1e-13);
        }
    }

    #[test]
    fn affine_mapping() {
        let r = gauss_rule(Distribution::normal(50.0, 10.0).unwrap(), 2).unwrap();
        assert_abs_diff_eq!(r.nodes[0], 40.0, epsilon = 1e-12);
        let r = gauss_rule(Distribution::uniform(2.0, 6.0).unwrap(), 1).unwrap();
        assert_eq!(r.nodes, vec![4.0]);
    }

    #[test]
    fn order_limits() {
        assert_eq!(gauss_rule(std_normal(), 0), Err(QuadratureError::InvalidOrder(0)));
        assert_eq!(gauss_rule(std_normal(), 65), Err(QuadratureError::InvalidOrder(65)));
        let r = gauss_rule(std_normal(), 64).unwrap();
        assert!(r.weights.iter().all(|&w| w > 0.0));
        assert!(r.nodes.windows(2).all(|p| p[0] < p[1]));
        assert_abs_diff_eq!(r.weights.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
        // E[x^2] = 1 even at the cap.
        assert_abs_diff_eq!(r.integrate(|x| x * x), 1.0, epsilon = 1e-11);
    }

    #[test]
    fn two_by_two_grid_order() {
        let g = tensor_grid(vec![rule(&[1.0, 2.0]), rule(&[10.0, 20.0])]).unwrap();
        let pts: Vec<Vec<f64>> = (0..g.total_points).map(|p| g.point(p)).collect();
        assert_eq!(pts, vec![vec![1.0, 10.0], vec![1.0, 20.0], vec![2.0, 10.0], vec![2.0, 20.0]]);
        assert_eq!(grid_input_vector(&g, 0).unwrap(), vec![1.0, 1.0, 2.0, 2.0]);
        assert_eq!(grid_input_vector(&g, 1).unwrap(), vec![10.0, 20.0, 10.0, 20.0]);
        assert_eq!(
            grid_input_vector(&g, 2),
            Err(QuadratureError::AxisOutOfRange { axis: 2, dims: 2 })
        );
    }

    #[test]
    fn single_axis_grid_is_identity() {
        let r = rule(&[1.0, 2.0, 3.0]);
        let g = tensor_grid(vec![r.clone()]).unwrap();
        assert_eq!(grid_input_vector(&g, 0).unwrap(), r.nodes);
        assert_eq!(g.weights(), r.weights);
    }

    #[test]
    fn three_axis_weights_sum_to_one() {
        let n = std_normal();
        let u = Distribution::uniform(0.0, 3.0).unwrap();
        let g = uniform_order_grid(&[n, u, n], 2).unwrap();
        assert_eq!(g.total_points, 8);
        let mut total = 0.0;
        for p in 0..8 {
            total += g.weight(p);
        }
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
        assert!(tensor_grid(vec![]).is_err());
    }

    #[test]
    fn distinct_values_per_axis() {
        let g = uniform_order_grid(&[std_normal(), std_normal(), std_normal()], 3).unwrap();
        for axis in 0..3 {
            let mut v = grid_input_vector(&g, axis).unwrap();
            v.sort_by(f64::total_cmp);
            v.dedup();
            assert_eq!(v.len(), 3);
        }
        assert_eq!(g.digits(14), vec![1, 1, 2]);
    }
}

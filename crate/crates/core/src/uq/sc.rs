use super::UqError;
use crate::engine::ValueTensor;
use crate::quadrature::TensorGrid;
use crate::signature::DependencySignature;

/// Tensor-product Lagrange interpolant through full-grid output values.
#[derive(Clone, Debug, PartialEq)]
pub struct SurrogateSC {
    pub grid: TensorGrid,
    pub values: ValueTensor,
    /// Barycentric weights per axis.
    bary: Vec<Vec<f64>>,
}

pub fn sc_build(outputs: &ValueTensor, grid: &TensorGrid) -> Result<SurrogateSC, UqError> {
    if outputs.signature != DependencySignature::full(grid.dims()) || outputs.len() != grid.total_points {
        return Err(UqError::DimensionMismatch(format!(
            "expected {} full-grid values, got {} over {}",
            grid.total_points,
            outputs.len(),
            outputs.signature
        )));
    }
    let bary = grid
        .axes
        .iter()
        .map(|r| {
            let x = &r.nodes;
            (0..x.len())
                .map(|j| {
                    let prod: f64 = (0..x.len()).filter(|&i| i != j).map(|i| x[j] - x[i]).product();
                    1.0 / prod
                })
                .collect()
        })
        .collect();
    Ok(SurrogateSC {
        grid: grid.clone(),
        values: outputs.clone(),
        bary,
    })
}

impl SurrogateSC {
    /// Lagrange basis values of one axis at `x`.
    fn axis_basis(&self, axis: usize, x: f64) -> Vec<f64> {
        let nodes = &self.grid.axes[axis].nodes;
        let w = &self.bary[axis];
        if let Some(j) = nodes.iter().position(|&n| n == x) {
            let mut l = vec![0.0; nodes.len()];
            l[j] = 1.0;
            return l;
        }
        let terms: Vec<f64> = nodes.iter().zip(w).map(|(&n, &w)| w / (x - n)).collect();
        let denom: f64 = terms.iter().sum();
        terms.iter().map(|t| t / denom).collect()
    }

    /// Interpolated value at `u` and whether `u` lies outside the node hull
    /// on some axis.
    pub fn eval(&self, u: &[f64]) -> Result<(f64, bool), UqError> {
        if u.len() != self.grid.dims() {
            return Err(UqError::DimensionMismatch(format!(
                "point has {} coordinates, surrogate {}",
                u.len(),
                self.grid.dims()
            )));
        }
        let extrapolated = u.iter().zip(&self.grid.axes).any(|(&x, r)| {
            x < r.nodes[0] || x > r.nodes[r.nodes.len() - 1]
        });
        let basis: Vec<Vec<f64>> = u
            .iter()
            .enumerate()
            .map(|(a, &x)| self.axis_basis(a, x))
            .collect();
        let mut sum = 0.0;
        for (p, &v) in self.values.data.iter().enumerate() {
            let l: f64 = self
                .grid
                .digits(p)
                .iter()
                .zip(&basis)
                .map(|(&i, b)| b[i])
                .product();
            sum += l * v;
        }
        Ok((sum, extrapolated))
    }

    /// Mean and standard deviation of the interpolant under the input
    /// measure, by the grid's quadrature.
    pub fn moments(&self) -> (f64, f64) {
        let w = self.grid.weights();
        let mean: f64 = w.iter().zip(&self.values.data).map(|(w, v)| w * v).sum();
        let var: f64 = w
            .iter()
            .zip(&self.values.data)
            .map(|(w, v)| w * (v - mean) * (v - mean))
            .sum();
        (mean, var.sqrt())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::enumerate_basis;
    use crate::distribution::Distribution;
    use crate::quadrature::uniform_order_grid;
    use crate::uq::nipc_integration;

    fn values(grid: &TensorGrid, f: impl Fn(&[f64]) -> f64) -> ValueTensor {
        ValueTensor {
            signature: DependencySignature::full(grid.dims()),
            data: (0..grid.total_points).map(|p| f(&grid.point(p))).collect(),
        }
    }

    fn dists() -> Vec<Distribution> {
        vec![
            Distribution::normal(0.0, 1.0).unwrap(),
            Distribution::uniform(1.0, 2.0).unwrap(),
        ]
    }

    #[test]
    fn reproduces_grid_values() {
        let grid = uniform_order_grid(&dists(), 4).unwrap();
        let v = values(&grid, |u| (u[0] * u[1]).sin() + u[1].exp());
        let s = sc_build(&v, &grid).unwrap();
        for p in 0..grid.total_points {
            let (got, extra) = s.eval(&grid.point(p)).unwrap();
            assert!((got - v.data[p]).abs() < 1e-12);
            assert!(!extra);
        }
    }

    #[test]
    fn linear_is_exact() {
        let grid = uniform_order_grid(&dists(), 2).unwrap();
        let f = |u: &[f64]| 3.0 * u[0] - 2.0 * u[1] + 0.5;
        let s = sc_build(&values(&grid, f), &grid).unwrap();
        for u in [[0.3, 1.2], [-2.0, 1.9], [4.0, 5.0]] {
            let (got, _) = s.eval(&u).unwrap();
            assert!((got - f(&u)).abs() < 1e-12);
        }
        assert!(s.eval(&[4.0, 5.0]).unwrap().1);
    }

    #[test]
    fn mean_matches_projection() {
        let grid = uniform_order_grid(&dists(), 5).unwrap();
        let v = values(&grid, |u| (u[0] + u[1]).cos() * u[1]);
        let s = sc_build(&v, &grid).unwrap();
        let basis = enumerate_basis(3, &dists()).unwrap();
        let c = nipc_integration(&v, &grid, &basis).unwrap();
        assert!((s.moments().0 - c.alpha[0]).abs() < 1e-12);
    }
}

use nalgebra::{DMatrix, DVector};
use rand_distr::{Distribution, StandardNormal};

use super::grid::ProfileGrid;
use super::kernel::{kernel_matrix, KernelSpec};
use super::linalg::cholesky_jittered;
use crate::error::Result;
use crate::games::UtilityTable;
use crate::rng::{rng_from_seed, SimRng};

fn normals(rng: &mut SimRng, len: usize) -> Vec<f64> {
    (0..len).map(|_| StandardNormal.sample(rng)).collect()
}

/// Draws a utility table from GP(0, k) over the grid. Deterministic in `seed`.
///
/// Separable kernels (squared exponential) are factorized per axis, so the cost is
/// O(n³ + m³) instead of O((nm)³); other kernels use [`sample_utility_dense`].
pub fn sample_utility(grid: &ProfileGrid, spec: &KernelSpec, seed: u64) -> Result<UtilityTable> {
    if spec.axis_factor(0.0, 0.0).is_none() {
        return sample_utility_dense(grid, spec, seed);
    }
    let axis = |v: &[f64]| {
        DMatrix::from_fn(v.len(), v.len(), |a, b| {
            spec.axis_factor(v[a], v[b]).expect("separable kernel")
        })
    };
    let (lx, _) = cholesky_jittered(&axis(grid.xs()), false)?;
    let (ly, _) = cholesky_jittered(&axis(grid.ys()), false)?;
    let (n, m) = (grid.n(), grid.m());
    let mut rng = rng_from_seed(seed);
    // row-major draws, so z[(i, j)] is the i-th row
    let z = DMatrix::from_row_slice(n, m, &normals(&mut rng, n * m));
    let u = lx.l() * z * ly.l().transpose() * spec.prior_variance().sqrt();
    let values = (0..n)
        .flat_map(|i| (0..m).map(move |j| (i, j)))
        .map(|(i, j)| u[(i, j)]);
    UtilityTable::new(n, m, values.collect())
}

/// Draws a utility table by factorizing the full |Π|×|Π| prior covariance.
pub fn sample_utility_dense(
    grid: &ProfileGrid,
    spec: &KernelSpec,
    seed: u64,
) -> Result<UtilityTable> {
    let cov = kernel_matrix(grid, spec);
    let (chol, _) = cholesky_jittered(&cov, false)?;
    let mut rng = rng_from_seed(seed);
    let z = DVector::from_vec(normals(&mut rng, grid.len()));
    let u = chol.l() * z;
    UtilityTable::new(grid.n(), grid.m(), u.as_slice().to_vec())
}

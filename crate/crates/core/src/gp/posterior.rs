use nalgebra::{DMatrix, DVector};

use super::grid::{Profile, ProfileGrid};
use super::kernel::{kernel_matrix, KernelSpec};
use super::linalg::cholesky_jittered;
use crate::error::{Error, Result};

/// GP posterior over every profile of a finite grid.
///
/// Holds the full covariance, so a recursive update costs O(|Π|²). Single-writer.
#[derive(Debug, Clone)]
pub struct GpPosterior {
    grid: ProfileGrid,
    kernel: KernelSpec,
    noise: f64,
    mean: DVector<f64>,
    cov: DMatrix<f64>,
    counts: Vec<u64>,
    obs_sum: Vec<f64>,
    rounds: u64,
}

fn check_noise(noise: f64) -> Result<()> {
    if noise >= 0.0 && noise.is_finite() {
        Ok(())
    } else {
        Err(Error::param(format!(
            "noise variance must be nonnegative, got {noise}"
        )))
    }
}

impl GpPosterior {
    /// The prior: μ ≡ 0, k₀ = k.
    pub fn prior(grid: &ProfileGrid, kernel: &KernelSpec, noise: f64) -> Result<Self> {
        check_noise(noise)?;
        let p = grid.len();
        Ok(Self {
            grid: grid.clone(),
            kernel: *kernel,
            noise,
            mean: DVector::zeros(p),
            cov: kernel_matrix(grid, kernel),
            counts: vec![0; p],
            obs_sum: vec![0.0; p],
            rounds: 0,
        })
    }

    pub fn grid(&self) -> &ProfileGrid {
        &self.grid
    }

    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }

    pub fn noise(&self) -> f64 {
        self.noise
    }

    /// Number of observations absorbed so far.
    pub fn rounds(&self) -> u64 {
        self.rounds
    }

    pub fn mean(&self, idx: usize) -> f64 {
        self.mean[idx]
    }

    pub fn means(&self) -> &[f64] {
        self.mean.as_slice()
    }

    /// Posterior variance σ_t²(π), clipped at zero against round-off.
    pub fn variance(&self, idx: usize) -> f64 {
        self.cov[(idx, idx)].max(0.0)
    }

    pub fn covariance(&self, a: usize, b: usize) -> f64 {
        self.cov[(a, b)]
    }

    pub fn covariance_matrix(&self) -> &DMatrix<f64> {
        &self.cov
    }

    pub fn count(&self, idx: usize) -> u64 {
        self.counts[idx]
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn obs_sum(&self, idx: usize) -> f64 {
        self.obs_sum[idx]
    }

    /// Absorbs one observation at flat index `idx` using the rank-one recursive form.
    ///
    /// The covariance on the right-hand side is the previous round's k_{t−1}.
    pub fn update(&mut self, idx: usize, value: f64) {
        let denom = self.noise + self.cov[(idx, idx)];
        if denom > f64::MIN_POSITIVE {
            let col = self.cov.column(idx).clone_owned();
            let gain = (value - self.mean[idx]) / denom;
            self.mean.axpy(gain, &col, 1.0);
            self.cov.ger(-1.0 / denom, &col, &col, 1.0);
        }
        self.counts[idx] += 1;
        self.obs_sum[idx] += value;
        self.rounds += 1;
    }

    pub fn update_at(&mut self, i: usize, j: usize, value: f64) {
        let idx = self.grid.index(i, j);
        self.update(idx, value);
    }
}

/// Conditions the prior on observations at `support` with per-observation noise
/// variances `noise_diag` and targets `targets`. Returns (mean, covariance) over the
/// whole grid.
fn condition(
    pts: &[Profile],
    kernel: &KernelSpec,
    support: &[usize],
    noise_diag: &[f64],
    targets: &[f64],
) -> Result<(DVector<f64>, DMatrix<f64>)> {
    let p = pts.len();
    let prior = DMatrix::from_fn(p, p, |a, b| kernel.eval(pts[a], pts[b]));
    if support.is_empty() {
        return Ok((DVector::zeros(p), prior));
    }
    let q = support.len();
    let mut system = DMatrix::from_fn(q, q, |a, b| prior[(support[a], support[b])]);
    for (a, &nd) in noise_diag.iter().enumerate() {
        system[(a, a)] += nd;
    }
    let (chol, _) = cholesky_jittered(&system, true)?;
    // cross: q×P block k(π_s, π)
    let cross = DMatrix::from_fn(q, p, |a, b| prior[(support[a], b)]);
    let alpha = chol.solve(&DVector::from_column_slice(targets));
    let mean = cross.transpose() * alpha;
    let mut v = cross;
    if !chol.l().solve_lower_triangular_mut(&mut v) {
        return Err(Error::numeric("singular triangular factor"));
    }
    let cov = prior - v.transpose() * v;
    Ok((mean, cov))
}

/// Reference posterior from the raw observation history (batch form).
///
/// `history` holds (flat profile index, observed value) pairs in query order.
pub fn posterior_batch(
    grid: &ProfileGrid,
    kernel: &KernelSpec,
    noise: f64,
    history: &[(usize, f64)],
) -> Result<GpPosterior> {
    check_noise(noise)?;
    let p = grid.len();
    if let Some(&(bad, _)) = history.iter().find(|(idx, _)| *idx >= p) {
        return Err(Error::param(format!(
            "profile index {bad} outside grid of {p}"
        )));
    }
    let pts: Vec<Profile> = grid.profiles().collect();
    let support: Vec<usize> = history.iter().map(|&(i, _)| i).collect();
    let targets: Vec<f64> = history.iter().map(|&(_, v)| v).collect();
    let noise_diag = vec![noise; history.len()];
    let (mean, cov) = condition(&pts, kernel, &support, &noise_diag, &targets)?;
    let mut counts = vec![0; p];
    let mut obs_sum = vec![0.0; p];
    for &(i, v) in history {
        counts[i] += 1;
        obs_sum[i] += v;
    }
    Ok(GpPosterior {
        grid: grid.clone(),
        kernel: *kernel,
        noise,
        mean,
        cov,
        counts,
        obs_sum,
        rounds: history.len() as u64,
    })
}

/// Posterior from per-profile counts and sample means.
///
/// Repeated observations at one profile are equivalent to a single observation of
/// their average with noise λ/N, so the linear system only spans the distinct
/// queried profiles.
pub fn posterior_aggregated(
    grid: &ProfileGrid,
    kernel: &KernelSpec,
    noise: f64,
    counts: &[u64],
    means: &[f64],
) -> Result<GpPosterior> {
    check_noise(noise)?;
    let p = grid.len();
    if counts.len() != p || means.len() != p {
        return Err(Error::param(format!(
            "expected {p} counts and means, got {} and {}",
            counts.len(),
            means.len()
        )));
    }
    let pts: Vec<Profile> = grid.profiles().collect();
    let support: Vec<usize> = (0..p).filter(|&i| counts[i] > 0).collect();
    let noise_diag: Vec<f64> = support.iter().map(|&i| noise / counts[i] as f64).collect();
    let targets: Vec<f64> = support.iter().map(|&i| means[i]).collect();
    let (mean, cov) = condition(&pts, kernel, &support, &noise_diag, &targets)?;
    let obs_sum = (0..p).map(|i| means[i] * counts[i] as f64).collect();
    Ok(GpPosterior {
        grid: grid.clone(),
        kernel: *kernel,
        noise,
        mean,
        cov,
        counts: counts.to_vec(),
        obs_sum,
        rounds: counts.iter().sum(),
    })
}

/// Posterior means (and optionally variances) from per-profile counts and sample
/// means without forming the full posterior covariance.
pub(crate) fn aggregated_marginals(
    grid: &ProfileGrid,
    kernel: &KernelSpec,
    noise: f64,
    counts: &[u64],
    means: &[f64],
    with_variance: bool,
) -> Result<(Vec<f64>, Option<Vec<f64>>)> {
    let p = grid.len();
    let pts: Vec<Profile> = grid.profiles().collect();
    let support: Vec<usize> = (0..p).filter(|&i| counts[i] > 0).collect();
    let prior_var = kernel.prior_variance();
    if support.is_empty() {
        return Ok((vec![0.0; p], with_variance.then(|| vec![prior_var; p])));
    }
    let q = support.len();
    let mut system = DMatrix::from_fn(q, q, |a, b| kernel.eval(pts[support[a]], pts[support[b]]));
    for (a, &i) in support.iter().enumerate() {
        system[(a, a)] += noise / counts[i] as f64;
    }
    let (chol, _) = cholesky_jittered(&system, true)?;
    let cross = DMatrix::from_fn(q, p, |a, b| kernel.eval(pts[support[a]], pts[b]));
    let targets = DVector::from_iterator(q, support.iter().map(|&i| means[i]));
    let alpha = chol.solve(&targets);
    let mean = (cross.transpose() * alpha).as_slice().to_vec();
    if !with_variance {
        return Ok((mean, None));
    }
    let mut v = cross;
    if !chol.l().solve_lower_triangular_mut(&mut v) {
        return Err(Error::numeric("singular triangular factor"));
    }
    let var = (0..p)
        .map(|b| (prior_var - v.column(b).norm_squared()).max(0.0))
        .collect();
    Ok((mean, Some(var)))
}

/// Upper bound λ / (λ/σ² + N) on the posterior variance of a profile observed N times.
pub fn variance_bound(count: u64, noise: f64, prior_variance: f64) -> f64 {
    noise / (noise / prior_variance + count as f64)
}

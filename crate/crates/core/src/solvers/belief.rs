use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::gp::{aggregated_marginals, GpPosterior, KernelSpec, ProfileGrid};

/// Exploration term b_t multiplying the posterior standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Exploration {
    /// b_t = 2 log(nmπ²t² / (6δ)), for games with finite strategy sets.
    Finite,
    /// b_t = 2 log(nmπ²t² / (3δ)), for discretized continuous games.
    Discretized,
    Constant(f64),
}

impl Exploration {
    /// b_t for an n×m game. Rounds below 1 are evaluated at t = 1.
    pub fn value(&self, t: u64, n: usize, m: usize, delta: f64) -> f64 {
        let t = t.max(1) as f64;
        let nm = (n * m) as f64;
        match *self {
            Exploration::Finite => 2.0 * (nm * PI * PI * t * t / (6.0 * delta)).ln(),
            Exploration::Discretized => 2.0 * (nm * PI * PI * t * t / (3.0 * delta)).ln(),
            Exploration::Constant(b) => b,
        }
    }
}

/// Per-profile estimate and confidence half-width maintained by a LUCB-style solver.
pub trait Belief {
    fn observe(&mut self, idx: usize, value: f64);

    /// Brings lazily maintained statistics up to date before they are read.
    fn sync(&mut self) -> Result<()> {
        Ok(())
    }

    fn mean(&self, idx: usize) -> f64;

    /// Half-width of the confidence interval at round `t`.
    fn half_width(&self, idx: usize, t: u64) -> f64;
}

/// How a GP belief tracks its posterior.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PosteriorForm {
    /// Rank-one updates of the full covariance, O(|Π|²) per query.
    #[default]
    Recursive,
    /// Re-solve over the distinct queried profiles whenever statistics are read.
    Aggregated,
}

enum GpState {
    Recursive(GpPosterior),
    Aggregated {
        grid: ProfileGrid,
        kernel: KernelSpec,
        noise: f64,
        counts: Vec<u64>,
        sums: Vec<f64>,
        mean: Vec<f64>,
        var: Vec<f64>,
        dirty: bool,
    },
}

/// GP posterior with confidence bounds μ ± √b_t·σ.
pub struct GpBelief {
    state: GpState,
    exploration: Exploration,
    delta: f64,
    n: usize,
    m: usize,
}

impl GpBelief {
    pub fn new(
        grid: &ProfileGrid,
        kernel: &KernelSpec,
        noise: f64,
        form: PosteriorForm,
        exploration: Exploration,
        delta: f64,
    ) -> Result<Self> {
        let state = match form {
            PosteriorForm::Recursive => {
                GpState::Recursive(GpPosterior::prior(grid, kernel, noise)?)
            }
            PosteriorForm::Aggregated => {
                let p = grid.len();
                GpPosterior::prior(grid, kernel, noise)?; // validates noise
                GpState::Aggregated {
                    grid: grid.clone(),
                    kernel: *kernel,
                    noise,
                    counts: vec![0; p],
                    sums: vec![0.0; p],
                    mean: vec![0.0; p],
                    var: vec![kernel.prior_variance(); p],
                    dirty: false,
                }
            }
        };
        Ok(Self {
            state,
            exploration,
            delta,
            n: grid.n(),
            m: grid.m(),
        })
    }

    pub fn variance(&self, idx: usize) -> f64 {
        match &self.state {
            GpState::Recursive(p) => p.variance(idx),
            GpState::Aggregated { var, .. } => var[idx],
        }
    }

    pub fn exploration(&self, t: u64) -> f64 {
        self.exploration.value(t, self.n, self.m, self.delta)
    }
}

impl Belief for GpBelief {
    fn observe(&mut self, idx: usize, value: f64) {
        match &mut self.state {
            GpState::Recursive(p) => p.update(idx, value),
            GpState::Aggregated {
                counts,
                sums,
                dirty,
                ..
            } => {
                counts[idx] += 1;
                sums[idx] += value;
                *dirty = true;
            }
        }
    }

    fn sync(&mut self) -> Result<()> {
        if let GpState::Aggregated {
            grid,
            kernel,
            noise,
            counts,
            sums,
            mean,
            var,
            dirty,
        } = &mut self.state
        {
            if *dirty {
                let avg: Vec<f64> = counts
                    .iter()
                    .zip(sums.iter())
                    .map(|(&c, &s)| if c > 0 { s / c as f64 } else { 0.0 })
                    .collect();
                let (mu, v) = aggregated_marginals(grid, kernel, *noise, counts, &avg, true)?;
                *mean = mu;
                *var = v.expect("variances requested");
                *dirty = false;
            }
        }
        Ok(())
    }

    fn mean(&self, idx: usize) -> f64 {
        match &self.state {
            GpState::Recursive(p) => p.mean(idx),
            GpState::Aggregated { mean, .. } => mean[idx],
        }
    }

    fn half_width(&self, idx: usize, t: u64) -> f64 {
        (self.exploration(t).max(0.0) * self.variance(idx)).sqrt()
    }
}

/// Independent Gaussian beliefs per profile (no cross-profile correlation).
///
/// Mean Σũ / (N + λ/σ²), variance λ / (λ/σ² + N).
pub struct IndependentBelief {
    counts: Vec<u64>,
    sums: Vec<f64>,
    noise: f64,
    prior_variance: f64,
    exploration: Exploration,
    delta: f64,
    n: usize,
    m: usize,
}

impl IndependentBelief {
    pub fn new(
        grid: &ProfileGrid,
        prior_variance: f64,
        noise: f64,
        exploration: Exploration,
        delta: f64,
    ) -> Self {
        let p = grid.len();
        Self {
            counts: vec![0; p],
            sums: vec![0.0; p],
            noise,
            prior_variance,
            exploration,
            delta,
            n: grid.n(),
            m: grid.m(),
        }
    }

    pub fn variance(&self, idx: usize) -> f64 {
        let c = self.counts[idx] as f64;
        if c == 0.0 {
            self.prior_variance
        } else {
            self.noise / (self.noise / self.prior_variance + c)
        }
    }
}

impl Belief for IndependentBelief {
    fn observe(&mut self, idx: usize, value: f64) {
        self.counts[idx] += 1;
        self.sums[idx] += value;
    }

    fn mean(&self, idx: usize) -> f64 {
        let c = self.counts[idx] as f64;
        if c == 0.0 {
            0.0
        } else {
            self.sums[idx] / (c + self.noise / self.prior_variance)
        }
    }

    fn half_width(&self, idx: usize, t: u64) -> f64 {
        let b = self
            .exploration
            .value(t, self.n, self.m, self.delta)
            .max(0.0);
        (b * self.variance(idx)).sqrt()
    }
}

/// Sample means with range-scaled Hoeffding intervals R·√(β(t,δ) / 2N),
/// β(t,δ) = log(4|Π|t²/δ). Unvisited profiles have infinite width.
pub struct EmpiricalBelief {
    counts: Vec<u64>,
    sums: Vec<f64>,
    utility_range: f64,
    delta: f64,
}

impl EmpiricalBelief {
    pub fn new(grid: &ProfileGrid, utility_range: f64, delta: f64) -> Self {
        let p = grid.len();
        Self {
            counts: vec![0; p],
            sums: vec![0.0; p],
            utility_range,
            delta,
        }
    }

    pub fn beta(&self, t: u64) -> f64 {
        let t = t.max(1) as f64;
        (4.0 * self.counts.len() as f64 * t * t / self.delta).ln()
    }
}

impl Belief for EmpiricalBelief {
    fn observe(&mut self, idx: usize, value: f64) {
        self.counts[idx] += 1;
        self.sums[idx] += value;
    }

    fn mean(&self, idx: usize) -> f64 {
        match self.counts[idx] {
            0 => 0.0,
            c => self.sums[idx] / c as f64,
        }
    }

    fn half_width(&self, idx: usize, t: u64) -> f64 {
        match self.counts[idx] {
            0 => f64::INFINITY,
            c => self.utility_range * (self.beta(t) / (2.0 * c as f64)).sqrt(),
        }
    }
}

/// Confidence intervals [L_t, U_t] = μ_t ∓ half-width for every profile at round t.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfidenceState {
    pub t: u64,
    pub mean: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl ConfidenceState {
    pub fn from_belief<B: Belief + ?Sized>(belief: &B, len: usize, t: u64) -> Self {
        let mut mean = Vec::with_capacity(len);
        let mut lower = Vec::with_capacity(len);
        let mut upper = Vec::with_capacity(len);
        for idx in 0..len {
            let mu = belief.mean(idx);
            let w = belief.half_width(idx, t);
            mean.push(mu);
            lower.push(mu - w);
            upper.push(mu + w);
        }
        Self {
            t,
            mean,
            lower,
            upper,
        }
    }
}

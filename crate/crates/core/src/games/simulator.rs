use rand_distr::{Distribution, Normal};

use super::table::UtilityTable;
use crate::error::{Error, Result};
use crate::rng::{rng_from_seed, SimRng};

/// Source of (possibly random) utilities for grid profiles.
pub trait Evaluator: Send {
    /// Grid shape `(n, m)` this evaluator answers for.
    fn shape(&self) -> (usize, usize);

    /// One draw of the utility at profile `(i, j)`.
    fn sample(&mut self, i: usize, j: usize, rng: &mut SimRng) -> f64;
}

/// Deterministic evaluator backed by a utility table.
#[derive(Debug, Clone)]
pub struct TableEvaluator(pub UtilityTable);

impl Evaluator for TableEvaluator {
    fn shape(&self) -> (usize, usize) {
        (self.0.n(), self.0.m())
    }

    fn sample(&mut self, i: usize, j: usize, _rng: &mut SimRng) -> f64 {
        self.0.get(i, j)
    }
}

/// Black-box simulator: each query returns the evaluator's draw plus N(0, λ) noise.
///
/// Owns its RNG, so a handle serves one caller; parallel runs use separate handles.
pub struct SimulatorHandle {
    evaluator: Box<dyn Evaluator>,
    noise: Option<Normal<f64>>,
    variance: f64,
    rng: SimRng,
    queries: u64,
}

impl std::fmt::Debug for SimulatorHandle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SimulatorHandle")
            .field("shape", &self.evaluator.shape())
            .field("noise", &self.variance)
            .field("queries", &self.queries)
            .finish()
    }
}

impl SimulatorHandle {
    /// `noise` is the variance λ of the additive Gaussian noise; 0 gives exact answers.
    pub fn new(evaluator: Box<dyn Evaluator>, noise: f64, seed: u64) -> Result<Self> {
        if !(noise >= 0.0 && noise.is_finite()) {
            return Err(Error::param(format!(
                "noise variance must be >= 0, got {noise}"
            )));
        }
        let dist = if noise > 0.0 {
            Some(Normal::new(0.0, noise.sqrt()).map_err(|e| Error::param(e.to_string()))?)
        } else {
            None
        };
        Ok(Self {
            evaluator,
            noise: dist,
            variance: noise,
            rng: rng_from_seed(seed),
            queries: 0,
        })
    }

    pub fn from_table(table: UtilityTable, noise: f64, seed: u64) -> Result<Self> {
        Self::new(Box::new(TableEvaluator(table)), noise, seed)
    }

    pub fn shape(&self) -> (usize, usize) {
        self.evaluator.shape()
    }

    pub fn noise(&self) -> f64 {
        self.variance
    }

    pub fn queries(&self) -> u64 {
        self.queries
    }

    pub fn query(&mut self, i: usize, j: usize) -> f64 {
        let (n, m) = self.shape();
        assert!(i < n && j < m, "query ({i}, {j}) outside {n}x{m} grid");
        self.queries += 1;
        let base = self.evaluator.sample(i, j, &mut self.rng);
        match &self.noise {
            Some(d) => base + d.sample(&mut self.rng),
            None => base,
        }
    }
}

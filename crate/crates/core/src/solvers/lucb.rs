use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::belief::{
    Belief, ConfidenceState, EmpiricalBelief, Exploration, GpBelief, IndependentBelief,
    PosteriorForm,
};
use super::check_shapes;
use super::result::{QueryRecord, SolverResult};
use crate::error::{Error, Result};
use crate::games::SimulatorHandle;
use crate::gp::{KernelSpec, ProfileGrid};

/// GP belief configuration: kernel, model noise λ and posterior representation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GpModel {
    pub kernel: KernelSpec,
    pub noise: f64,
    #[serde(default)]
    pub form: PosteriorForm,
}

impl GpModel {
    pub fn new(kernel: KernelSpec, noise: f64) -> Self {
        Self {
            kernel,
            noise,
            form: PosteriorForm::default(),
        }
    }

    pub fn with_form(mut self, form: PosteriorForm) -> Self {
        self.form = form;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LucbConfig {
    pub epsilon: f64,
    pub delta: f64,
    /// Maximum number of queries; rounded up to an even number.
    pub round_cap: u64,
    pub exploration: Exploration,
}

impl LucbConfig {
    pub fn new(epsilon: f64, delta: f64, round_cap: u64) -> Self {
        Self {
            epsilon,
            delta,
            round_cap,
            exploration: Exploration::Finite,
        }
    }

    pub fn with_exploration(mut self, exploration: Exploration) -> Self {
        self.exploration = exploration;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(Error::param(format!(
                "epsilon must be >= 0, got {}",
                self.epsilon
            )));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::param(format!(
                "delta must be in (0, 1), got {}",
                self.delta
            )));
        }
        if self.round_cap == 0 {
            return Err(Error::param("round cap must be positive"));
        }
        if let Exploration::Constant(b) = self.exploration {
            if !(b >= 0.0 && b.is_finite()) {
                return Err(Error::param(format!("constant b_t must be >= 0, got {b}")));
            }
        }
        Ok(())
    }

    fn even_cap(&self) -> u64 {
        self.round_cap + self.round_cap % 2
    }
}

/// The two profiles chosen from one confidence state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Selection {
    /// x̄_t = argmax_x min_y μ_t(x, y).
    pub x_bar: usize,
    /// γ_t(x) = argmin_y L_t(x, y) for every row x.
    pub gamma: Vec<usize>,
    /// Flat index of π_{t+1} = (x̄_t, γ_t(x̄_t)).
    pub first: usize,
    /// Flat index of π_{t+2} = argmax_{x ≠ x̄_t} U_t(x, γ_t(x)).
    pub second: usize,
}

/// Candidate selection. Ties go to the lowest index.
pub fn select(state: &ConfidenceState, grid: &ProfileGrid) -> Selection {
    let (n, m) = (grid.n(), grid.m());
    let mut gamma = Vec::with_capacity(n);
    let mut x_bar = 0;
    let mut best_row = f64::NEG_INFINITY;
    for i in 0..n {
        let base = i * m;
        let mut g = 0;
        let mut row_min = f64::INFINITY;
        for j in 0..m {
            if state.lower[base + j] < state.lower[base + g] {
                g = j;
            }
            row_min = row_min.min(state.mean[base + j]);
        }
        gamma.push(g);
        if row_min > best_row {
            best_row = row_min;
            x_bar = i;
        }
    }
    let first = grid.index(x_bar, gamma[x_bar]);
    let mut second = usize::MAX;
    let mut best_upper = f64::NEG_INFINITY;
    for (i, &g) in gamma.iter().enumerate() {
        if i == x_bar {
            continue;
        }
        let idx = grid.index(i, g);
        if second == usize::MAX || state.upper[idx] > best_upper {
            second = idx;
            best_upper = state.upper[idx];
        }
    }
    Selection {
        x_bar,
        gamma,
        first,
        second,
    }
}

fn query(
    sim: &mut SimulatorHandle,
    grid: &ProfileGrid,
    belief: &mut dyn Belief,
    log: &mut Vec<QueryRecord>,
    idx: usize,
) {
    let (i, j) = grid.coords(idx);
    let value = sim.query(i, j);
    belief.observe(idx, value);
    log.push(QueryRecord {
        t: log.len() as u64 + 1,
        x_index: i,
        y_index: j,
        u_tilde: value,
    });
}

/// LUCB skeleton shared by all fixed-confidence solvers.
///
/// `warmup` profiles are queried once each, in order, before selection starts.
/// The stopping rule L_t(π_{t+1}) > U_t(π_{t+2}) − ε is checked after each pair of queries.
pub fn run_lucb(
    sim: &mut SimulatorHandle,
    grid: &ProfileGrid,
    belief: &mut dyn Belief,
    config: &LucbConfig,
    warmup: &[usize],
) -> Result<SolverResult> {
    config.validate()?;
    check_shapes(sim, grid)?;
    let start = Instant::now();
    let cap = config.even_cap();
    let p = grid.len();
    let mut log = Vec::new();
    for &idx in warmup.iter().take(cap as usize) {
        query(sim, grid, belief, &mut log, idx);
    }
    loop {
        let t = log.len() as u64;
        belief.sync()?;
        let state = ConfidenceState::from_belief(&*belief, p, t);
        if state.mean.iter().any(|m| !m.is_finite()) {
            return Err(Error::numeric(format!(
                "non-finite posterior mean after {t} queries"
            )));
        }
        let sel = select(&state, grid);
        let stop = t > 0 && state.lower[sel.first] > state.upper[sel.second] - config.epsilon;
        if stop || t + 2 > cap {
            return Ok(SolverResult {
                profile: grid.coords(sel.first),
                rounds_used: t,
                terminated: stop,
                query_log: log,
                wall_time: start.elapsed().as_secs_f64(),
            });
        }
        query(sim, grid, belief, &mut log, sel.first);
        query(sim, grid, belief, &mut log, sel.second);
    }
}

/// M-GP-LUCB: LUCB selection on GP posterior confidence bounds.
pub fn m_gp_lucb(
    sim: &mut SimulatorHandle,
    grid: &ProfileGrid,
    model: &GpModel,
    config: &LucbConfig,
) -> Result<SolverResult> {
    config.validate()?;
    let mut belief = GpBelief::new(
        grid,
        &model.kernel,
        model.noise,
        model.form,
        config.exploration,
        config.delta,
    )?;
    run_lucb(sim, grid, &mut belief, config, &[])
}

/// M-G-LUCB: M-GP-LUCB with independent per-profile Gaussian beliefs (prior variance 1).
pub fn m_g_lucb(
    sim: &mut SimulatorHandle,
    grid: &ProfileGrid,
    noise: f64,
    config: &LucbConfig,
) -> Result<SolverResult> {
    config.validate()?;
    if !(noise > 0.0 && noise.is_finite()) {
        return Err(Error::param(format!("noise must be > 0, got {noise}")));
    }
    let mut belief = IndependentBelief::new(grid, 1.0, noise, config.exploration, config.delta);
    run_lucb(sim, grid, &mut belief, config, &[])
}

/// M-LUCB: sample means with Hoeffding-style intervals scaled by the utility range.
///
/// Every profile is queried once before the LUCB loop; `config.exploration` is unused.
pub fn m_lucb_baseline(
    sim: &mut SimulatorHandle,
    grid: &ProfileGrid,
    config: &LucbConfig,
    utility_range: f64,
) -> Result<SolverResult> {
    config.validate()?;
    if !(utility_range > 0.0 && utility_range.is_finite()) {
        return Err(Error::param(format!(
            "utility range must be > 0, got {utility_range}"
        )));
    }
    let mut belief = EmpiricalBelief::new(grid, utility_range, config.delta);
    let warmup: Vec<usize> = (0..grid.len()).collect();
    run_lucb(sim, grid, &mut belief, config, &warmup)
}

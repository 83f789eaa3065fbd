use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{Algorithm, Budget, ExperimentConfig, GameSource};
use crate::complexity::h_two;
use crate::error::{Error, Result};
use crate::games::{arbitrary_discretization_bound, FiniteGame, SimulatorHandle, UtilityTable};
use crate::gp::{equally_spaced_axis, sample_utility, ProfileGrid};
use crate::rng::derive_seed;
use crate::solvers::{
    gp_se, m_g_lucb, m_gp_lucb, m_lucb_baseline, GpModel, LucbConfig, SolverResult,
};
use crate::spitfire::SpitfireParams;

const INSTANCE_STREAM: u64 = 1;
const RUN_STREAM: u64 = 2;
const EPS_STREAM: u64 = 3;
const MAX_REDRAWS: u32 = 1000;
/// Largest profile count sampled with a dense (non-separable) kernel factorization.
const DENSE_SAMPLING_LIMIT: usize = 10_000;
const VALUE_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
enum Dynamics {
    Table,
    Spitfire(SpitfireParams),
}

/// One game of an experiment with its true (expected) utility table.
#[derive(Debug, Clone)]
pub struct Instance {
    pub id: usize,
    /// Seed of the accepted draw (0 for deterministic sources).
    pub seed: u64,
    /// Random draws rejected for a near-tie between the best two maximin rows.
    pub redraws: u32,
    pub game: FiniteGame,
    dynamics: Dynamics,
}

impl Instance {
    pub fn from_game(id: usize, game: FiniteGame) -> Self {
        Self {
            id,
            seed: 0,
            redraws: 0,
            game,
            dynamics: Dynamics::Table,
        }
    }

    /// Simulator answering queries on the instance grid. Additive noise applies to
    /// table games only; Spitfire draws are intrinsically random.
    pub fn simulator(&self, noise: f64, seed: u64) -> Result<SimulatorHandle> {
        match &self.dynamics {
            Dynamics::Table => {
                SimulatorHandle::from_table(self.game.utilities().clone(), noise, seed)
            }
            Dynamics::Spitfire(p) => p.as_simulator(self.game.grid(), 1.0, seed),
        }
    }

    /// Whether the returned first-player strategy is a maximin strategy, i.e. its
    /// security value u(x̄, y*(x̄)) equals the maximin value.
    pub fn is_correct(&self, profile: (usize, usize)) -> bool {
        let sec = self.game.utilities().security_values();
        let best = sec.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        sec[profile.0] >= best - VALUE_TOL
    }

    /// Range of observable utilities, used to scale the M-LUCB confidence term.
    pub fn utility_range(&self) -> f64 {
        match self.dynamics {
            Dynamics::Table => self.game.utilities().range(),
            Dynamics::Spitfire(_) => 1.0,
        }
    }
}

fn axis_grid(n: usize, m: usize) -> Result<ProfileGrid> {
    ProfileGrid::new(equally_spaced_axis(n)?, equally_spaced_axis(m)?)
}

/// Draws instance `id` of a random-GP source, redrawing near-degenerate tables.
fn draw_gp_instance(cfg: &ExperimentConfig, id: usize, grid: &ProfileGrid) -> Result<Instance> {
    let GameSource::RandomGp { kernel, .. } = &cfg.source else {
        unreachable!("called for random GP sources only")
    };
    for attempt in 0..MAX_REDRAWS {
        let seed = derive_seed(cfg.seed, &[INSTANCE_STREAM, id as u64, attempt as u64]);
        let table = sample_utility(grid, kernel, seed)?;
        let separated = table
            .maximin_separation()
            .is_some_and(|s| s > cfg.min_separation);
        if separated {
            return Ok(Instance {
                id,
                seed,
                redraws: attempt,
                game: FiniteGame::new(grid.clone(), table)?,
                dynamics: Dynamics::Table,
            });
        }
    }
    Err(Error::Degenerate(format!(
        "instance {id}: {MAX_REDRAWS} draws without separated maximin rows"
    )))
}

/// Builds the experiment's instances, deterministically from the config.
pub fn build_instances(cfg: &ExperimentConfig) -> Result<Vec<Instance>> {
    cfg.validate()?;
    match &cfg.source {
        GameSource::RandomGp { n, m, .. } => {
            let grid = axis_grid(*n, *m)?;
            (0..cfg.instances)
                .map(|id| draw_gp_instance(cfg, id, &grid))
                .collect()
        }
        GameSource::Spitfire { params, k } => {
            let grid = axis_grid(*k, *k)?;
            let game = FiniteGame::new(grid.clone(), params.expected_table(&grid, 1.0)?)?;
            Ok((0..cfg.instances)
                .map(|id| Instance {
                    id,
                    seed: 0,
                    redraws: 0,
                    game: game.clone(),
                    dynamics: Dynamics::Spitfire(*params),
                })
                .collect())
        }
        GameSource::File { path } => {
            let game = FiniteGame::load(path)?;
            Ok((0..cfg.instances)
                .map(|id| Instance::from_game(id, game.clone()))
                .collect())
        }
    }
}

/// Outcome of one solver run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub instance: usize,
    pub run: usize,
    pub algorithm: Algorithm,
    pub rounds_used: u64,
    pub terminated: bool,
    pub x_index: usize,
    pub y_index: usize,
    /// Whether the returned first-player strategy is a maximin strategy.
    pub correct: Option<bool>,
    pub eps_hat: Option<f64>,
    /// Failure message; the other outcome fields are zero when set.
    pub error: Option<String>,
    #[serde(default)]
    pub wall_time: f64,
}

impl RunRecord {
    pub fn failed(&self) -> bool {
        self.error.is_some()
    }
}

/// Per-instance GP-SE budget.
pub fn budget_for(cfg: &ExperimentConfig, game: &FiniteGame) -> Result<u64> {
    match cfg.budget {
        Some(Budget::Fixed(t)) => Ok(t),
        Some(Budget::Hardness { factor, cap }) => {
            let p = game.grid().len() as u64;
            let h2 = h_two(game.utilities())?;
            if !h2.is_finite() {
                return Ok(cap);
            }
            Ok((factor.saturating_mul(p) as f64 * h2.ceil()).min(cap as f64) as u64)
        }
        None => Err(Error::param("gp_se needs a budget")),
    }
}

/// Runs the configured solver once on `instance` with simulator seed `seed`.
pub fn solve_instance(
    cfg: &ExperimentConfig,
    instance: &Instance,
    seed: u64,
) -> Result<SolverResult> {
    let grid = instance.game.grid();
    let mut sim = instance.simulator(cfg.noise, seed)?;
    let model = GpModel::new(cfg.model_kernel(), cfg.model_noise()).with_form(cfg.model.form);
    let lucb =
        LucbConfig::new(cfg.epsilon, cfg.delta, cfg.round_cap).with_exploration(cfg.exploration());
    match cfg.algorithm {
        Algorithm::MGpLucb => m_gp_lucb(&mut sim, grid, &model, &lucb),
        Algorithm::MGLucb => m_g_lucb(&mut sim, grid, model.noise, &lucb),
        Algorithm::MLucb => m_lucb_baseline(&mut sim, grid, &lucb, instance.utility_range()),
        Algorithm::GpSe => {
            let budget = budget_for(cfg, &instance.game)?;
            gp_se(&mut sim, grid, &model, budget, cfg.model.se_belief)
        }
    }
}

pub fn run_seed(base: u64, instance: usize, run: usize) -> u64 {
    derive_seed(base, &[RUN_STREAM, instance as u64, run as u64])
}

fn run_one(cfg: &ExperimentConfig, instance: &Instance, run: usize) -> RunRecord {
    let seed = run_seed(cfg.seed, instance.id, run);
    let mut rec = RunRecord {
        instance: instance.id,
        run,
        algorithm: cfg.algorithm,
        rounds_used: 0,
        terminated: false,
        x_index: 0,
        y_index: 0,
        correct: None,
        eps_hat: None,
        error: None,
        wall_time: 0.0,
    };
    match solve_instance(cfg, instance, seed) {
        Ok(res) => {
            rec.rounds_used = res.rounds_used;
            rec.terminated = res.terminated;
            (rec.x_index, rec.y_index) = res.profile;
            rec.correct = Some(instance.is_correct(res.profile));
            rec.wall_time = res.wall_time;
        }
        Err(e) => rec.error = Some(e.to_string()),
    }
    rec
}

/// Aggregate metrics over runs; failed runs are excluded and counted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    /// Mean rounds over runs that met the stopping rule.
    pub t_delta_mean: Option<f64>,
    /// Percentage of successful runs that met the stopping rule.
    pub pct_end: Option<f64>,
    /// Percentage of successful runs returning a maximin profile.
    pub pct_opt: Option<f64>,
    pub eps_hat_mean: Option<f64>,
    pub n_runs: usize,
    pub n_failed: usize,
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, count) = values.fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    (count > 0).then(|| sum / count as f64)
}

impl Summary {
    pub fn from_records(records: &[RunRecord]) -> Self {
        let ok: Vec<&RunRecord> = records.iter().filter(|r| !r.failed()).collect();
        let pct =
            |hits: usize, total: usize| (total > 0).then(|| 100.0 * hits as f64 / total as f64);
        let judged: Vec<bool> = ok.iter().filter_map(|r| r.correct).collect();
        Self {
            t_delta_mean: mean(
                ok.iter()
                    .filter(|r| r.terminated)
                    .map(|r| r.rounds_used as f64),
            ),
            pct_end: pct(ok.iter().filter(|r| r.terminated).count(), ok.len()),
            pct_opt: pct(judged.iter().filter(|&&c| c).count(), judged.len()),
            eps_hat_mean: mean(ok.iter().filter_map(|r| r.eps_hat)),
            n_runs: records.len(),
            n_failed: records.len() - ok.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceInfo {
    pub instance: usize,
    pub seed: u64,
    pub redraws: u32,
    pub maximin_x: usize,
    pub maximin_y: usize,
    pub maximin_value: f64,
}

#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub instances: Vec<InstanceInfo>,
    /// Sorted by (instance, run).
    pub records: Vec<RunRecord>,
    pub summary: Summary,
}

fn in_pool<T: Send>(threads: usize, job: impl FnOnce() -> T + Send) -> Result<T> {
    if threads == 0 {
        return Ok(job());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::param(format!("cannot build thread pool: {e}")))?;
    Ok(pool.install(job))
}

/// Runs every (instance, run) pair in parallel with derived seeds.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let instances = build_instances(cfg)?;
    let jobs: Vec<(usize, usize)> = (0..instances.len())
        .flat_map(|i| (0..cfg.runs).map(move |r| (i, r)))
        .collect();
    let mut records: Vec<RunRecord> = in_pool(cfg.threads, || {
        jobs.par_iter()
            .map(|&(i, r)| run_one(cfg, &instances[i], r))
            .collect()
    })?;
    records.sort_by_key(|r| (r.instance, r.run));
    let info = instances
        .iter()
        .map(|inst| {
            let mm = inst.game.utilities().maximin();
            InstanceInfo {
                instance: inst.id,
                seed: inst.seed,
                redraws: inst.redraws,
                maximin_x: mm.x,
                maximin_y: mm.y,
                maximin_value: mm.value,
            }
        })
        .collect();
    let summary = Summary::from_records(&records);
    Ok(ExperimentOutput {
        instances: info,
        records,
        summary,
    })
}

/// One run of the ε̂ protocol on a K×K discretization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsRunRecord {
    pub k_eps: usize,
    pub instance: usize,
    pub run: usize,
    pub eps_theoretical: f64,
    pub eps_hat: f64,
    pub rounds: u64,
    pub terminated: bool,
    pub correct: bool,
}

/// One point of an ε-vs-ε̂ series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsPoint {
    pub k_eps: usize,
    pub eps: f64,
    pub eps_hat: f64,
}

/// Discretization error bound for an equally spaced K grid (covering radius 1/(2(K−1))).
pub fn eps_theoretical(cfg: &ExperimentConfig, k: usize) -> Result<f64> {
    let r = 0.5 / (k as f64 - 1.0);
    arbitrary_discretization_bound(cfg.delta, cfg.smoothness.a, cfg.smoothness.b, r, r)
}

/// Sorted union of axes, merging points closer than 1e-12.
fn union_axis(axes: &[Vec<f64>]) -> Vec<f64> {
    let mut all: Vec<f64> = axes.iter().flatten().copied().collect();
    all.sort_by(f64::total_cmp);
    all.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    all
}

fn positions(union: &[f64], points: &[f64]) -> Vec<usize> {
    points
        .iter()
        .map(|p| {
            union
                .iter()
                .position(|u| (u - p).abs() < 1e-12)
                .expect("point is in the union")
        })
        .collect()
}

/// A continuous game known on a fine reference grid.
enum Reference {
    /// Utility table over the union of the reference and solver axes.
    Table {
        union: Vec<f64>,
        table: UtilityTable,
        ref_idx: Vec<usize>,
    },
    Spitfire(SpitfireParams, Vec<f64>),
}

impl Reference {
    /// u(x_row, y) for every reference y, where `x` is a solver-grid coordinate.
    fn row_on_reference(&self, x: f64) -> Vec<f64> {
        match self {
            Reference::Table {
                union,
                table,
                ref_idx,
            } => {
                let row = positions(union, &[x])[0];
                ref_idx.iter().map(|&j| table.get(row, j)).collect()
            }
            Reference::Spitfire(p, axis) => axis.iter().map(|&y| p.expected_damage(x, y)).collect(),
        }
    }

    fn reference_axis(&self) -> Vec<f64> {
        match self {
            Reference::Table { union, ref_idx, .. } => ref_idx.iter().map(|&i| union[i]).collect(),
            Reference::Spitfire(_, axis) => axis.clone(),
        }
    }

    /// Maximin value over the reference grid.
    fn maximin_value(&self) -> f64 {
        self.reference_axis()
            .iter()
            .map(|&x| {
                self.row_on_reference(x)
                    .into_iter()
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Restriction to the K×K solver grid.
    fn solver_instance(&self, id: usize, k: usize) -> Result<Instance> {
        let axis = equally_spaced_axis(k)?;
        let grid = ProfileGrid::new(axis.clone(), axis.clone())?;
        match self {
            Reference::Table { union, table, .. } => {
                let idx = positions(union, &axis);
                let values = idx
                    .iter()
                    .flat_map(|&i| idx.iter().map(move |&j| (i, j)))
                    .map(|(i, j)| table.get(i, j))
                    .collect();
                let game = FiniteGame::new(grid, UtilityTable::new(k, k, values)?)?;
                Ok(Instance::from_game(id, game))
            }
            Reference::Spitfire(p, _) => Ok(Instance {
                id,
                seed: 0,
                redraws: 0,
                game: FiniteGame::new(grid.clone(), p.expected_table(&grid, 1.0)?)?,
                dynamics: Dynamics::Spitfire(*p),
            }),
        }
    }
}

fn build_reference(cfg: &ExperimentConfig, id: usize, ks: &[usize]) -> Result<Reference> {
    let ref_axis = equally_spaced_axis(cfg.reference_points)?;
    match &cfg.source {
        GameSource::RandomGp { kernel, .. } => {
            let mut axes = vec![ref_axis.clone()];
            for &k in ks {
                axes.push(equally_spaced_axis(k)?);
            }
            let union = union_axis(&axes);
            let grid = ProfileGrid::new(union.clone(), union.clone())?;
            if kernel.axis_factor(0.0, 0.0).is_none() && grid.len() > DENSE_SAMPLING_LIMIT {
                return Err(Error::param(format!(
                    "{} reference profiles need a dense factorization; lower reference_points",
                    grid.len()
                )));
            }
            let seed = derive_seed(cfg.seed, &[EPS_STREAM, id as u64]);
            let table = sample_utility(&grid, kernel, seed)?;
            let ref_idx = positions(&union, &ref_axis);
            Ok(Reference::Table {
                union,
                table,
                ref_idx,
            })
        }
        GameSource::Spitfire { params, .. } => Ok(Reference::Spitfire(*params, ref_axis)),
        GameSource::File { .. } => Err(Error::param(
            "the epsilon protocol needs a continuous source (random_gp or spitfire)",
        )),
    }
}

/// ε̂ protocol: for each K, solve the K×K discretization and measure
/// ε̂ = |u*_ref − u_ref(x̄, y*_ref(x̄))| against the reference grid.
pub fn eps_runs(cfg: &ExperimentConfig, ks: &[usize]) -> Result<Vec<EpsRunRecord>> {
    cfg.validate()?;
    if ks.iter().any(|&k| k < 2) {
        return Err(Error::param("every K must be at least 2"));
    }
    let references: Vec<Reference> = (0..cfg.instances)
        .map(|id| build_reference(cfg, id, ks))
        .collect::<Result<_>>()?;
    let mut jobs = Vec::new();
    for (ki, &k) in ks.iter().enumerate() {
        for (id, reference) in references.iter().enumerate() {
            jobs.push((
                ki,
                k,
                id,
                reference.solver_instance(id, k)?,
                reference.maximin_value(),
            ));
        }
    }
    let eps: Vec<f64> = ks
        .iter()
        .map(|&k| eps_theoretical(cfg, k))
        .collect::<Result<_>>()?;
    let (references, eps) = (&references, &eps);
    let mut out: Vec<EpsRunRecord> = in_pool(cfg.threads, || {
        jobs.par_iter()
            .flat_map_iter(|(ki, k, id, inst, u_star)| {
                (0..cfg.runs).map(move |run| {
                    let seed =
                        derive_seed(cfg.seed, &[EPS_STREAM, *k as u64, *id as u64, run as u64]);
                    let res = solve_instance(cfg, inst, seed)?;
                    let x_bar = inst.game.grid().xs()[res.profile.0];
                    let row = references[*id].row_on_reference(x_bar);
                    let value = row.into_iter().fold(f64::INFINITY, f64::min);
                    Ok(EpsRunRecord {
                        k_eps: *k,
                        instance: *id,
                        run,
                        eps_theoretical: eps[*ki],
                        eps_hat: (u_star - value).abs(),
                        rounds: res.rounds_used,
                        terminated: res.terminated,
                        correct: inst.is_correct(res.profile),
                    })
                })
            })
            .collect::<Result<Vec<_>>>()
    })??;
    let order: Vec<usize> = ks.to_vec();
    out.sort_by_key(|r| {
        let ki = order
            .iter()
            .position(|&k| k == r.k_eps)
            .unwrap_or(usize::MAX);
        (ki, r.instance, r.run)
    });
    Ok(out)
}

/// Averages ε̂ per K, keeping the first-seen order of K.
pub fn eps_series(records: &[EpsRunRecord]) -> Vec<EpsPoint> {
    let mut ks: Vec<usize> = Vec::new();
    for r in records {
        if !ks.contains(&r.k_eps) {
            ks.push(r.k_eps);
        }
    }
    ks.into_iter()
        .map(|k| {
            let rows: Vec<&EpsRunRecord> = records.iter().filter(|r| r.k_eps == k).collect();
            EpsPoint {
                k_eps: k,
                eps: rows[0].eps_theoretical,
                eps_hat: rows.iter().map(|r| r.eps_hat).sum::<f64>() / rows.len() as f64,
            }
        })
        .collect()
}

pub fn eps_table(cfg: &ExperimentConfig, ks: &[usize]) -> Result<Vec<EpsPoint>> {
    Ok(eps_series(&eps_runs(cfg, ks)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gp::KernelSpec;

    fn example_file(dir: &tempfile::TempDir) -> std::path::PathBuf {
        let game = FiniteGame::from_table(
            UtilityTable::from_rows(vec![vec![1.0, 0.5], vec![0.2, 0.8]]).unwrap(),
        )
        .unwrap();
        let path = dir.path().join("game.json");
        game.save(&path).unwrap();
        path
    }

    #[test]
    fn noiseless_single_run() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = ExperimentConfig::new(
            GameSource::File {
                path: example_file(&dir),
            },
            Algorithm::MGpLucb,
        );
        cfg.noise = 1e-8;
        let out = run_experiment(&cfg).unwrap();
        assert_eq!(out.records.len(), 1);
        assert!(out.records[0].terminated);
        assert_eq!(out.summary.pct_opt, Some(100.0));
        assert_eq!(out.summary.pct_end, Some(100.0));
    }

    #[test]
    fn gp_se_rounds() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = ExperimentConfig::new(
            GameSource::File {
                path: example_file(&dir),
            },
            Algorithm::GpSe,
        );
        cfg.budget = Some(Budget::Fixed(100));
        cfg.noise = 0.1;
        cfg.runs = 8;
        let out = run_experiment(&cfg).unwrap();
        assert!(out.records.iter().all(|r| r.rounds_used == 99));
    }

    #[test]
    fn deterministic_and_ordered() {
        let mut cfg = ExperimentConfig::new(
            GameSource::RandomGp {
                kernel: KernelSpec::squared_exponential(0.3).unwrap(),
                n: 3,
                m: 3,
            },
            Algorithm::MGLucb,
        );
        cfg.noise = 0.05;
        cfg.instances = 3;
        cfg.runs = 4;
        cfg.round_cap = 2000;
        cfg.seed = 9;
        let a = run_experiment(&cfg).unwrap();
        cfg.threads = 2;
        let b = run_experiment(&cfg).unwrap();
        let strip = |o: &ExperimentOutput| {
            o.records
                .iter()
                .map(|r| RunRecord {
                    wall_time: 0.0,
                    ..r.clone()
                })
                .collect::<Vec<_>>()
        };
        assert_eq!(strip(&a), strip(&b));
        let keys: Vec<_> = a.records.iter().map(|r| (r.instance, r.run)).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
        assert_eq!(a.instances, b.instances);
    }

    #[test]
    fn redraws_near_ties() {
        let mut cfg = ExperimentConfig::new(
            GameSource::RandomGp {
                kernel: KernelSpec::squared_exponential(0.3).unwrap(),
                n: 2,
                m: 2,
            },
            Algorithm::MGpLucb,
        );
        cfg.instances = 20;
        cfg.min_separation = 0.3;
        let inst = build_instances(&cfg).unwrap();
        assert!(inst.iter().any(|i| i.redraws > 0));
        for i in &inst {
            assert!(i.game.utilities().maximin_separation().unwrap() > 0.3);
        }
    }

    #[test]
    fn summary_metrics() {
        let base = RunRecord {
            instance: 0,
            run: 0,
            algorithm: Algorithm::MGpLucb,
            rounds_used: 10,
            terminated: true,
            x_index: 0,
            y_index: 0,
            correct: Some(true),
            eps_hat: None,
            error: None,
            wall_time: 0.0,
        };
        let recs = vec![
            base.clone(),
            RunRecord {
                rounds_used: 30,
                ..base.clone()
            },
            RunRecord {
                rounds_used: 1000,
                terminated: false,
                correct: Some(false),
                ..base.clone()
            },
            RunRecord {
                error: Some("boom".into()),
                ..base.clone()
            },
        ];
        let s = Summary::from_records(&recs);
        assert_eq!(s.t_delta_mean, Some(20.0));
        assert_eq!(s.n_runs, 4);
        assert_eq!(s.n_failed, 1);
        assert!((s.pct_end.unwrap() - 200.0 / 3.0).abs() < 1e-12);
        assert!((s.pct_opt.unwrap() - 200.0 / 3.0).abs() < 1e-12);
        assert_eq!(s.eps_hat_mean, None);
        let empty = Summary::from_records(&[]);
        assert_eq!(empty.pct_end, None);
    }

    #[test]
    fn exhaustive_discretization_has_zero_eps_hat() {
        let mut cfg = ExperimentConfig::new(
            GameSource::RandomGp {
                kernel: KernelSpec::squared_exponential(0.3).unwrap(),
                n: 2,
                m: 2,
            },
            Algorithm::MGpLucb,
        );
        cfg.reference_points = 5;
        cfg.noise = 1e-6;
        cfg.instances = 2;
        cfg.runs = 3;
        let runs = eps_runs(&cfg, &[5, 3]).unwrap();
        assert_eq!(runs.len(), 12);
        for r in runs.iter().filter(|r| r.k_eps == 5 && r.correct) {
            assert!(r.eps_hat < 1e-12);
        }
        let series = eps_series(&runs);
        assert_eq!(
            series.iter().map(|p| p.k_eps).collect::<Vec<_>>(),
            vec![5, 3]
        );
        assert!(series[0].eps < series[1].eps);
    }
}

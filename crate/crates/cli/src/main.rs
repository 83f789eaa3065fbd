use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use sbg_core::complexity::{self, HardnessProfile};
use sbg_core::games::k_epsilon;
use sbg_core::harness::{
    build_instances, emit, eps_runs, eps_series, run_experiment, run_seed, solve_instance,
    write_eps_plot_csv, write_eps_runs_csv, Algorithm, Budget, ExperimentConfig, GameSource,
    Smoothness,
};
use sbg_core::solvers::write_query_log_csv;
use sbg_core::spitfire::SpitfireParams;
use sbg_core::{Error, FiniteGame, KernelSpec, Result};

#[derive(Parser)]
#[command(
    name = "sbg",
    version,
    about = "Maximin learning in simulation-based games"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Base random seed
    #[arg(long)]
    seed: Option<u64>,
    /// Output file (directory for `experiment`)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Experiment config (TOML); flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a game and write it as JSON {xs, ys, u}
    GenGame(GenGame),
    /// Run one solver on a game; prints the result, writes the query log CSV to --out
    Solve(Solve),
    /// Hardness constants and sample-complexity bounds of a game
    Bounds(Bounds),
    /// Epsilon protocol on Hit-the-Spitfire discretizations
    Spitfire(Spitfire),
    /// Batch experiment from a config file
    Experiment(Experiment),
}

#[derive(Clone, Copy, ValueEnum)]
enum KernelArg {
    Se,
    Matern,
}

#[derive(Args)]
struct GenGame {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_enum, default_value = "se")]
    kernel: KernelArg,
    #[arg(long, default_value_t = 0.1)]
    length_scale: f64,
    #[arg(long, default_value_t = 2.5)]
    nu: f64,
    #[arg(long, default_value_t = 3)]
    n: usize,
    #[arg(long, default_value_t = 3)]
    m: usize,
    /// Write the K×K expected-damage table of Hit-the-Spitfire instead of a GP draw
    #[arg(long, value_name = "K")]
    spitfire: Option<usize>,
    /// Instance index within the config's instance sequence
    #[arg(long, default_value_t = 0)]
    instance: usize,
}

#[derive(Args)]
struct SolverFlags {
    #[arg(long)]
    algorithm: Option<Algorithm>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    round_cap: Option<u64>,
    /// GP-SE query budget T
    #[arg(long)]
    budget: Option<u64>,
    /// Simulator noise variance
    #[arg(long)]
    noise: Option<f64>,
    /// Belief noise variance λ
    #[arg(long)]
    model_noise: Option<f64>,
}

impl SolverFlags {
    fn apply(&self, cfg: &mut ExperimentConfig) {
        if let Some(a) = self.algorithm {
            cfg.algorithm = a;
        }
        if let Some(d) = self.delta {
            cfg.delta = d;
        }
        if let Some(e) = self.epsilon {
            cfg.epsilon = e;
        }
        if let Some(c) = self.round_cap {
            cfg.round_cap = c;
        }
        if let Some(t) = self.budget {
            cfg.budget = Some(Budget::Fixed(t));
        }
        if let Some(n) = self.noise {
            cfg.noise = n;
        }
        if let Some(n) = self.model_noise {
            cfg.model.noise = Some(n);
        }
    }
}

#[derive(Args)]
struct Solve {
    #[command(flatten)]
    common: Common,
    /// Game JSON; overrides the config's source
    #[arg(long)]
    game: Option<PathBuf>,
    #[command(flatten)]
    solver: SolverFlags,
}

#[derive(Args)]
struct Bounds {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    game: PathBuf,
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    /// Noise variance λ
    #[arg(long, default_value_t = 0.1)]
    lambda: f64,
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    /// Query budget T for the fixed-budget bounds
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long, default_value_t = 1.0)]
    a: f64,
    #[arg(long, default_value_t = 1.0)]
    b: f64,
}

#[derive(Args)]
struct Spitfire {
    #[command(flatten)]
    common: Common,
    /// Grid sizes K (comma separated)
    #[arg(long, value_delimiter = ',', default_values_t = [4usize, 8, 16])]
    k_eps: Vec<usize>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long)]
    round_cap: Option<u64>,
    /// Worker threads (0: all cores)
    #[arg(long)]
    threads: Option<usize>,
    /// Also write the per-K plot CSV (k_eps,eps,eps_hat)
    #[arg(long)]
    plot: Option<PathBuf>,
}

#[derive(Args)]
struct Experiment {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long)]
    threads: Option<usize>,
    /// Run the epsilon protocol over these grid sizes instead of single-grid runs
    #[arg(long, value_delimiter = ',')]
    k_eps: Vec<usize>,
}

fn load_config(path: &Option<PathBuf>) -> Result<Option<ExperimentConfig>> {
    path.as_deref().map(ExperimentConfig::load).transpose()
}

fn write_output(out: &Option<PathBuf>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, bytes).map_err(|e| Error::io(path, e)),
        None => std::io::stdout()
            .write_all(bytes)
            .map_err(|e| Error::io("<stdout>", e)),
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::format("<json>", e))?;
    text.push('\n');
    Ok(text.into_bytes())
}

fn gen_game(args: GenGame) -> Result<()> {
    let mut cfg = match load_config(&args.common.config)? {
        Some(cfg) => cfg,
        None => {
            let source = match args.spitfire {
                Some(k) => GameSource::Spitfire {
                    params: SpitfireParams::default(),
                    k,
                },
                None => {
                    let kernel = match args.kernel {
                        KernelArg::Se => KernelSpec::squared_exponential(args.length_scale)?,
                        KernelArg::Matern => KernelSpec::matern(args.nu, args.length_scale)?,
                    };
                    GameSource::RandomGp {
                        kernel,
                        n: args.n,
                        m: args.m,
                    }
                }
            };
            ExperimentConfig::new(source, Algorithm::MGpLucb)
        }
    };
    if let Some(seed) = args.common.seed {
        cfg.seed = seed;
    }
    cfg.instances = cfg.instances.max(args.instance + 1);
    let instances = build_instances(&cfg)?;
    write_output(
        &args.common.out,
        instances[args.instance].game.to_json().as_bytes(),
    )?;
    if args.common.out.is_none() {
        println!();
    }
    Ok(())
}

fn solve(args: Solve) -> Result<()> {
    let mut cfg = match (load_config(&args.common.config)?, &args.game) {
        (Some(mut cfg), Some(game)) => {
            cfg.source = GameSource::File { path: game.clone() };
            cfg
        }
        (Some(cfg), None) => cfg,
        (None, Some(game)) => {
            ExperimentConfig::new(GameSource::File { path: game.clone() }, Algorithm::MGpLucb)
        }
        (None, None) => return Err(Error::param("solve needs --game or --config")),
    };
    args.solver.apply(&mut cfg);
    if let Some(seed) = args.common.seed {
        cfg.seed = seed;
    }
    cfg.instances = 1;
    cfg.validate()?;
    let instance = &build_instances(&cfg)?[0];
    let res = solve_instance(&cfg, instance, run_seed(cfg.seed, 0, 0))?;
    if let Some(path) = &args.common.out {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        write_query_log_csv(&res.query_log, std::io::BufWriter::new(file)).map_err(
            |e| match e {
                Error::Format { message, .. } => Error::format(path, message),
                Error::Io { source, .. } => Error::io(path, source),
                other => other,
            },
        )?;
    }
    let (x, y) = res.profile;
    let grid = instance.game.grid();
    let report = json!({
        "algorithm": cfg.algorithm.name(),
        "x_index": x,
        "y_index": y,
        "x": grid.xs()[x],
        "y": grid.ys()[y],
        "rounds_used": res.rounds_used,
        "terminated": res.terminated,
        "correct": instance.is_correct(res.profile),
    });
    write_output(&None, &to_json(&report)?)
}

/// A bound that does not apply to the inputs is reported as null.
fn optional<T>(name: &str, r: Result<T>) -> Result<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(e @ Error::Numeric(_)) => Err(e),
        Err(e) => {
            eprintln!("{name}: {e}");
            Ok(None)
        }
    }
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

fn bounds(args: Bounds) -> Result<()> {
    let game = FiniteGame::load(&args.game)?;
    let u = game.utilities();
    let (n, m) = (u.n(), u.m());
    let hard = optional("hardness", HardnessProfile::new(u))?;
    let h_star = hard.as_ref().map(|h| h.h_star).and_then(finite);
    let h_two = hard.as_ref().map(|h| h.h_two).and_then(finite);
    let t_delta = match h_star {
        Some(h) => optional(
            "t_delta",
            complexity::t_delta_bound(h, args.lambda, n, m, args.delta),
        )?,
        None => None,
    };
    let delta_t = match (args.budget, h_two) {
        (Some(t), Some(h)) => optional("delta_T", complexity::delta_t(t, n, m, args.lambda, h))?,
        _ => None,
    };
    let k_eps = optional("k_eps", k_epsilon(args.epsilon, args.delta, args.a, args.b))?;
    let (delta_t_eps, delta_opt) = match (args.budget, h_two) {
        (Some(t), Some(h)) => (
            optional(
                "delta_T_eps",
                complexity::delta_t_eps(
                    t,
                    args.epsilon,
                    args.delta,
                    args.a,
                    args.b,
                    args.lambda,
                    h,
                ),
            )?,
            optional(
                "delta_opt",
                complexity::delta_opt(t, args.epsilon, args.a, args.b, args.lambda, |_| h),
            )?
            .map(|d| d.delta),
        ),
        _ => (None, None),
    };
    let report = json!({
        "h_star": h_star,
        "h_one": hard.as_ref().map(|h| h.h_one).and_then(finite),
        "h_two": h_two,
        "t_delta": t_delta,
        "delta_T": delta_t,
        "k_eps": k_eps,
        "delta_T_eps": delta_t_eps,
        "delta_opt": delta_opt,
    });
    write_output(&args.common.out, &to_json(&report)?)
}

fn spitfire(args: Spitfire) -> Result<()> {
    let mut cfg = match load_config(&args.common.config)? {
        Some(cfg) => cfg,
        None => {
            let mut cfg = ExperimentConfig::new(
                GameSource::Spitfire {
                    params: SpitfireParams::default(),
                    k: 4,
                },
                Algorithm::MGpLucb,
            );
            cfg.smoothness = Smoothness { a: 1.0, b: 1.1 };
            cfg
        }
    };
    if !matches!(cfg.source, GameSource::Spitfire { .. }) {
        return Err(Error::param("spitfire needs a spitfire game source"));
    }
    if let Some(seed) = args.common.seed {
        cfg.seed = seed;
    }
    if let Some(d) = args.delta {
        cfg.delta = d;
    }
    if let Some(r) = args.runs {
        cfg.runs = r;
    }
    if let Some(c) = args.round_cap {
        cfg.round_cap = c;
    }
    if let Some(t) = args.threads {
        cfg.threads = t;
    }
    let records = eps_runs(&cfg, &args.k_eps)?;
    let mut buf = Vec::new();
    write_eps_runs_csv(&records, &mut buf)?;
    write_output(&args.common.out, &buf)?;
    if let Some(path) = &args.plot {
        let mut plot = Vec::new();
        write_eps_plot_csv(&eps_series(&records), &mut plot)?;
        write_output(&Some(path.clone()), &plot)?;
    }
    Ok(())
}

fn experiment(args: Experiment) -> Result<()> {
    let Some(mut cfg) = load_config(&args.common.config)? else {
        return Err(Error::param("experiment needs --config"));
    };
    if let Some(seed) = args.common.seed {
        cfg.seed = seed;
    }
    if let Some(r) = args.runs {
        cfg.runs = r;
    }
    if let Some(t) = args.threads {
        cfg.threads = t;
    }
    cfg.validate()?;
    let dir = args
        .common
        .out
        .clone()
        .or_else(|| cfg.output.clone())
        .unwrap_or_else(|| PathBuf::from("results"));
    if args.k_eps.is_empty() {
        let output = run_experiment(&cfg)?;
        emit(&output, &dir, cfg.record_wall_time)?;
        write_output(&None, &to_json(&output.summary)?)
    } else {
        let records = eps_runs(&cfg, &args.k_eps)?;
        std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        let runs_path = dir.join("eps_runs.csv");
        let plot_path = dir.join("plot.csv");
        let mut runs = Vec::new();
        write_eps_runs_csv(&records, &mut runs)?;
        write_output(&Some(runs_path), &runs)?;
        let series = eps_series(&records);
        let mut plot = Vec::new();
        write_eps_plot_csv(&series, &mut plot)?;
        write_output(&Some(plot_path.clone()), &plot)?;
        write_output(&None, &plot)
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::GenGame(a) => gen_game(a),
        Command::Solve(a) => solve(a),
        Command::Bounds(a) => bounds(a),
        Command::Spitfire(a) => spitfire(a),
        Command::Experiment(a) => experiment(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

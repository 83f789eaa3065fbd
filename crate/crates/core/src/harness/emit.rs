use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use super::runner::{EpsPoint, EpsRunRecord, ExperimentOutput, RunRecord, Summary};
use crate::error::{Error, Result};

const RUNS_HEADER: [&str; 10] = [
    "instance",
    "run",
    "algorithm",
    "rounds_used",
    "terminated",
    "x_index",
    "y_index",
    "correct",
    "eps_hat",
    "error",
];
const EPS_RUNS_HEADER: [&str; 6] = [
    "run",
    "k_eps",
    "eps_theoretical",
    "eps_hat",
    "rounds",
    "terminated",
];
const PLOT_HEADER: [&str; 3] = ["k_eps", "eps", "eps_hat"];

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(ToString::to_string).unwrap_or_default()
}

fn csv_err(label: &str) -> impl Fn(csv::Error) -> Error + '_ {
    move |e| Error::format(label, e)
}

/// Per-run CSV; `wall_time` is appended only when requested so reruns are byte-identical.
pub fn write_runs_csv<W: Write>(records: &[RunRecord], with_wall_time: bool, out: W) -> Result<()> {
    let label = "<runs csv>";
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<&str> = RUNS_HEADER.to_vec();
    if with_wall_time {
        header.push("wall_time");
    }
    w.write_record(&header).map_err(csv_err(label))?;
    for r in records {
        let mut row = vec![
            r.instance.to_string(),
            r.run.to_string(),
            r.algorithm.name().to_string(),
            r.rounds_used.to_string(),
            r.terminated.to_string(),
            r.x_index.to_string(),
            r.y_index.to_string(),
            opt(&r.correct),
            opt(&r.eps_hat),
            opt(&r.error),
        ];
        if with_wall_time {
            row.push(r.wall_time.to_string());
        }
        w.write_record(&row).map_err(csv_err(label))?;
    }
    w.flush().map_err(|e| Error::io(label, e))
}

pub fn read_runs_csv<R: Read>(input: R) -> Result<Vec<RunRecord>> {
    csv::Reader::from_reader(input)
        .deserialize()
        .collect::<std::result::Result<_, _>>()
        .map_err(csv_err("<runs csv>"))
}

pub fn write_summary_json<W: Write>(summary: &Summary, mut out: W) -> Result<()> {
    let text = serde_json::to_string_pretty(summary).map_err(|e| Error::format("<summary>", e))?;
    writeln!(out, "{text}").map_err(|e| Error::io("<summary>", e))
}

/// CSV with columns `run,k_eps,eps_theoretical,eps_hat,rounds,terminated`.
pub fn write_eps_runs_csv<W: Write>(records: &[EpsRunRecord], out: W) -> Result<()> {
    let label = "<epsilon runs csv>";
    let mut w = csv::Writer::from_writer(out);
    w.write_record(EPS_RUNS_HEADER).map_err(csv_err(label))?;
    for r in records {
        w.write_record([
            r.run.to_string(),
            r.k_eps.to_string(),
            r.eps_theoretical.to_string(),
            r.eps_hat.to_string(),
            r.rounds.to_string(),
            r.terminated.to_string(),
        ])
        .map_err(csv_err(label))?;
    }
    w.flush().map_err(|e| Error::io(label, e))
}

/// CSV with columns `k_eps,eps,eps_hat`.
pub fn write_eps_plot_csv<W: Write>(points: &[EpsPoint], out: W) -> Result<()> {
    let label = "<plot csv>";
    let mut w = csv::Writer::from_writer(out);
    w.write_record(PLOT_HEADER).map_err(csv_err(label))?;
    for p in points {
        w.write_record([
            p.k_eps.to_string(),
            p.eps.to_string(),
            p.eps_hat.to_string(),
        ])
        .map_err(csv_err(label))?;
    }
    w.flush().map_err(|e| Error::io(label, e))
}

pub fn read_eps_plot_csv<R: Read>(input: R) -> Result<Vec<EpsPoint>> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(input);
    r.deserialize()
        .collect::<std::result::Result<_, _>>()
        .map_err(csv_err("<plot csv>"))
}

/// Files written by [`emit`].
#[derive(Debug, Clone, PartialEq)]
pub struct OutputPaths {
    pub runs: PathBuf,
    pub summary: PathBuf,
    pub instances: PathBuf,
}

fn create(path: &Path) -> Result<std::io::BufWriter<std::fs::File>> {
    std::fs::File::create(path)
        .map(std::io::BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

fn relabel(path: &Path, e: Error) -> Error {
    match e {
        Error::Io { source, .. } => Error::io(path, source),
        Error::Format { message, .. } => Error::format(path, message),
        other => other,
    }
}

/// Writes `runs.csv`, `summary.json` and `instances.json` into `dir`.
pub fn emit(output: &ExperimentOutput, dir: &Path, with_wall_time: bool) -> Result<OutputPaths> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let paths = OutputPaths {
        runs: dir.join("runs.csv"),
        summary: dir.join("summary.json"),
        instances: dir.join("instances.json"),
    };
    write_runs_csv(&output.records, with_wall_time, create(&paths.runs)?)
        .map_err(|e| relabel(&paths.runs, e))?;
    write_summary_json(&output.summary, create(&paths.summary)?)
        .map_err(|e| relabel(&paths.summary, e))?;
    let text = serde_json::to_string_pretty(&output.instances)
        .map_err(|e| Error::format(&paths.instances, e))?;
    std::fs::write(&paths.instances, text + "\n").map_err(|e| Error::io(&paths.instances, e))?;
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::Algorithm;
    use proptest::prelude::*;

    fn record(run: usize) -> RunRecord {
        RunRecord {
            instance: 1,
            run,
            algorithm: Algorithm::GpSe,
            rounds_used: 42,
            terminated: true,
            x_index: 2,
            y_index: 0,
            correct: Some(run.is_multiple_of(2)),
            eps_hat: (run == 1).then_some(0.1 + 0.2),
            error: (run == 2).then(|| "numeric failure: x, y".to_string()),
            wall_time: 0.25,
        }
    }

    #[test]
    fn runs_round_trip_without_wall_time() {
        let recs: Vec<_> = (0..3).map(record).collect();
        let mut buf = Vec::new();
        write_runs_csv(&recs, false, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with(
            "instance,run,algorithm,rounds_used,terminated,x_index,y_index,correct,eps_hat,error\n"
        ));
        let back = read_runs_csv(buf.as_slice()).unwrap();
        let expected: Vec<_> = recs
            .into_iter()
            .map(|r| RunRecord {
                wall_time: 0.0,
                ..r
            })
            .collect();
        assert_eq!(back, expected);
    }

    #[test]
    fn runs_round_trip_with_wall_time() {
        let recs: Vec<_> = (0..3).map(record).collect();
        let mut buf = Vec::new();
        write_runs_csv(&recs, true, &mut buf).unwrap();
        assert_eq!(read_runs_csv(buf.as_slice()).unwrap(), recs);
    }

    #[test]
    fn empty_outputs_keep_headers() {
        let mut buf = Vec::new();
        write_runs_csv(&[], false, &mut buf).unwrap();
        assert_eq!(buf.iter().filter(|&&b| b == b'\n').count(), 1);
        let mut plot = Vec::new();
        write_eps_plot_csv(&[], &mut plot).unwrap();
        assert_eq!(String::from_utf8(plot).unwrap(), "k_eps,eps,eps_hat\n");
        let mut eps = Vec::new();
        write_eps_runs_csv(&[], &mut eps).unwrap();
        assert_eq!(
            String::from_utf8(eps).unwrap(),
            "run,k_eps,eps_theoretical,eps_hat,rounds,terminated\n"
        );
    }

    #[test]
    fn summary_keys() {
        let s = Summary::from_records(&[record(0), record(2)]);
        let mut buf = Vec::new();
        write_summary_json(&s, &mut buf).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        let mut keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
        keys.sort();
        assert_eq!(
            keys,
            [
                "eps_hat_mean",
                "n_failed",
                "n_runs",
                "pct_end",
                "pct_opt",
                "t_delta_mean"
            ]
        );
        assert_eq!(v["n_failed"], 1);
        assert!(v["eps_hat_mean"].is_null());
    }

    #[test]
    fn plot_round_trip() {
        let pts = vec![
            EpsPoint {
                k_eps: 4,
                eps: 1.0 / 3.0,
                eps_hat: 0.1,
            },
            EpsPoint {
                k_eps: 8,
                eps: 1e-300,
                eps_hat: 0.0,
            },
        ];
        let mut buf = Vec::new();
        write_eps_plot_csv(&pts, &mut buf).unwrap();
        assert_eq!(read_eps_plot_csv(buf.as_slice()).unwrap(), pts);
    }

    fn arb_record() -> impl Strategy<Value = RunRecord> {
        (
            (
                0usize..50,
                0usize..200,
                0usize..4,
                any::<u64>(),
                any::<bool>(),
            ),
            (0usize..20, 0usize..20, proptest::option::of(any::<bool>())),
            (
                proptest::option::of(-1e6f64..1e6),
                proptest::option::of("[a-z ,:\"]{0,12}"),
            ),
        )
            .prop_map(
                |(
                    (instance, run, alg, rounds_used, terminated),
                    (x, y, correct),
                    (eps_hat, error),
                )| {
                    RunRecord {
                        instance,
                        run,
                        algorithm: [
                            Algorithm::MGpLucb,
                            Algorithm::GpSe,
                            Algorithm::MGLucb,
                            Algorithm::MLucb,
                        ][alg],
                        rounds_used,
                        terminated,
                        x_index: x,
                        y_index: y,
                        correct,
                        eps_hat,
                        // an empty message cannot be told apart from a missing one
                        error: error.filter(|e| !e.is_empty()),
                        wall_time: 0.0,
                    }
                },
            )
    }

    proptest! {
        #[test]
        fn runs_round_trip_random(records in proptest::collection::vec(arb_record(), 0..100)) {
            let mut buf = Vec::new();
            write_runs_csv(&records, false, &mut buf).unwrap();
            prop_assert_eq!(read_runs_csv(buf.as_slice()).unwrap(), records);
        }
    }

    #[test]
    fn io_errors_name_the_path() {
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("file");
        std::fs::write(&blocker, "x").unwrap();
        let out = ExperimentOutput {
            instances: vec![],
            records: vec![],
            summary: Summary::from_records(&[]),
        };
        let err = emit(&out, &blocker.join("sub"), false).unwrap_err();
        assert!(err.to_string().contains("file"));
    }
}

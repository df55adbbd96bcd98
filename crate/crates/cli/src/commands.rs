use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use ensel_core::exec::{with_jobs, Execution};
use ensel_core::harness::{generate_pool, run_experiment, CurveReport, Report, SyntheticPoolSpec};
use ensel_core::PredictionMatrix;

use crate::config::{Input, RunConfigFile};
use crate::error::CliError;
use crate::matrix_csv::{read_matrix, write_matrix};

pub const QUERIES: &[&str] = &[
    "summary",
    "parsimony",
    "curve:<algorithm>",
    "path",
    "baselines",
];

fn load_spec(path: &Path) -> Result<SyntheticPoolSpec, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    toml::from_str(&text)
        .map_err(|e| CliError::Usage(format!("invalid spec {}: {e}", path.display())))
}

/// Writes a synthetic prediction matrix and returns a one-line summary.
pub fn cmd_generate(spec_path: &Path, out: &Path, seed: Option<u64>) -> Result<String, CliError> {
    let mut spec = load_spec(spec_path)?;
    if let Some(s) = seed {
        spec.seed = s;
    }
    let matrix = generate_pool(&spec)?;
    let file =
        File::create(out).map_err(|e| CliError::Runtime(format!("{}: {e}", out.display())))?;
    write_matrix(BufWriter::new(file), &matrix)?;
    Ok(format!(
        "wrote {}: N={} predictors, M={} examples, {} positives ({:.1}%)\n",
        out.display(),
        matrix.n_predictors(),
        matrix.n_examples(),
        matrix.n_positives(),
        100.0 * matrix.n_positives() as f64 / matrix.n_examples() as f64
    ))
}

pub fn load_matrix(path: &Path) -> Result<PredictionMatrix, CliError> {
    let file =
        File::open(path).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?;
    read_matrix(std::io::BufReader::new(file))
        .map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))
}

/// Canonical JSON text of a report.
pub fn report_json(report: &Report) -> Result<String, CliError> {
    let mut text =
        serde_json::to_string_pretty(report).map_err(|e| CliError::Runtime(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

pub struct SelectOutcome {
    pub report: Report,
    pub report_path: PathBuf,
    pub curve_paths: Vec<PathBuf>,
}

/// Runs the configured experiment and writes `report.json` plus one curve
/// CSV per algorithm (at its best ε) and per baseline under `curves/`.
pub fn cmd_select(
    config_path: &Path,
    seed: Option<u64>,
    jobs: Option<usize>,
    out: Option<&Path>,
) -> Result<SelectOutcome, CliError> {
    let cfg = RunConfigFile::load(config_path)?;
    let base_dir = config_path.parent().unwrap_or(Path::new("."));
    let experiment = cfg.experiment(seed)?;
    let matrix = match cfg.input(base_dir)? {
        Input::Csv(path) => load_matrix(&path)?,
        Input::Synthetic(spec) => generate_pool(&spec)?,
    };
    experiment.validate(matrix.n_predictors())?;
    let out_dir = match (out, &cfg.output_dir) {
        (Some(o), _) => o.to_path_buf(),
        (None, Some(d)) => base_dir.join(d),
        (None, None) => PathBuf::from("results"),
    };

    let report = with_jobs(jobs, || {
        run_experiment(&experiment, &matrix, Execution::Parallel)
    })?;

    let curves_dir = out_dir.join("curves");
    fs::create_dir_all(&curves_dir)?;
    let report_path = out_dir.join("report.json");
    fs::write(&report_path, report_json(&report)?)?;

    let mut curve_paths = Vec::new();
    let mut emit = |name: &str, curve: &CurveReport| -> Result<(), CliError> {
        let path = curves_dir.join(format!("{name}.csv"));
        let mut w = BufWriter::new(File::create(&path)?);
        writeln!(w, "pool_size,mean,stderr,mean_size")?;
        for p in &curve.points {
            writeln!(w, "{},{},{},{}", p.pool_size, p.mean, p.stderr, p.mean_size)?;
        }
        w.flush()?;
        curve_paths.push(path);
        Ok(())
    };
    for best in &report.best_epsilon {
        let cell = report
            .best_cell(&best.algorithm)
            .expect("best epsilon refers to an existing cell");
        emit(&best.algorithm, &cell.curve)?;
    }
    emit("full_ensemble", &report.baselines.full_ensemble)?;
    emit("best_base", &report.baselines.best_base)?;

    Ok(SelectOutcome {
        report,
        report_path,
        curve_paths,
    })
}

pub fn load_report(path: &Path) -> Result<Report, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("invalid report {}: {e}", path.display())))
}

/// Renders one slice of a report as text.
pub fn cmd_inspect(report: &Report, query: &str) -> Result<String, CliError> {
    match query {
        "summary" => Ok(summary(report)),
        "parsimony" => Ok(parsimony(report)),
        "path" => Ok(paths(report)),
        "baselines" => Ok(format!(
            "full_ensemble\n{}best_base\n{}",
            curve_rows(&report.baselines.full_ensemble),
            curve_rows(&report.baselines.best_base)
        )),
        q => match q.strip_prefix("curve:") {
            Some(name) => report
                .best_cell(name)
                .map(|c| curve_rows(&c.curve))
                .or_else(|| match name {
                    "full_ensemble" => Some(curve_rows(&report.baselines.full_ensemble)),
                    "best_base" => Some(curve_rows(&report.baselines.best_base)),
                    _ => None,
                })
                .ok_or_else(|| {
                    let known: Vec<&str> = report
                        .best_epsilon
                        .iter()
                        .map(|b| b.algorithm.as_str())
                        .collect();
                    CliError::Usage(format!(
                        "unknown algorithm `{name}`; known: {}, full_ensemble, best_base",
                        known.join(", ")
                    ))
                }),
            None => Err(CliError::Usage(format!(
                "unknown query `{q}`; valid queries: {}",
                QUERIES.join(", ")
            ))),
        },
    }
}

pub fn summary(report: &Report) -> String {
    let mut s = String::new();
    let d = &report.data;
    let _ = writeln!(
        s,
        "data: N={} predictors, M={} examples, {} positives; pools {:?}",
        d.n_predictors, d.n_examples, d.n_positives, report.pool_sizes
    );
    let _ = writeln!(
        s,
        "{:<36} {:>8} {:>8} {:>14}",
        "algorithm", "epsilon", "auESC", "non-converged"
    );
    for b in &report.best_epsilon {
        let cell = report.best_cell(&b.algorithm).expect("cell exists");
        let _ = writeln!(
            s,
            "{:<36} {:>8} {:>8.4} {:>8}/{}",
            b.algorithm, b.epsilon, b.auesc, cell.non_converged, cell.runs
        );
    }
    let _ = writeln!(
        s,
        "{:<36} {:>8} {:>8.4}",
        "full_ensemble", "-", report.baselines.full_ensemble.auesc
    );
    let _ = writeln!(
        s,
        "{:<36} {:>8} {:>8.4}",
        "best_base", "-", report.baselines.best_base.auesc
    );
    s
}

fn curve_rows(curve: &CurveReport) -> String {
    let mut s = String::from("pool_size,mean,stderr,mean_size\n");
    for p in &curve.points {
        let _ = writeln!(
            s,
            "{},{:.6},{:.6},{:.3}",
            p.pool_size, p.mean, p.stderr, p.mean_size
        );
    }
    s
}

fn parsimony(report: &Report) -> String {
    let checkpoints = &report.config.checkpoints;
    let mut s = format!("{:<36} {:>8}", "algorithm", "auESC");
    for k in checkpoints {
        let _ = write!(s, " {:>15}", format!("size_ratio@{k}"));
    }
    for k in checkpoints {
        let _ = write!(s, " {:>15}", format!("perf_ratio@{k}"));
    }
    s.push('\n');
    for b in &report.best_epsilon {
        let cell = report.best_cell(&b.algorithm).expect("cell exists");
        let _ = write!(s, "{:<36} {:>8.3}", b.algorithm, cell.curve.auesc);
        for p in &cell.parsimony {
            let _ = write!(s, " {:>15.3}", p.size_ratio);
        }
        for p in &cell.parsimony {
            let _ = write!(s, " {:>15.3}", p.perf_ratio);
        }
        s.push('\n');
    }
    s
}

fn paths(report: &Report) -> String {
    let mut s = String::new();
    for b in &report.best_epsilon {
        let cell = report.best_cell(&b.algorithm).expect("cell exists");
        let run = &cell.sample_run;
        let _ = writeln!(
            s,
            "{} (epsilon {}, repetition {}, fold {}, pool {}, {} episodes{})",
            b.algorithm,
            cell.epsilon,
            run.repetition,
            run.fold,
            run.pool_size,
            run.episodes,
            if run.converged { "" } else { ", not converged" }
        );
        let _ = writeln!(s, "  START");
        for k in 1..=run.final_size {
            let _ = write!(s, "  {{{}}}", run.policy_order[..k].join(","));
            if k == run.final_size {
                let _ = write!(
                    s,
                    "  <- final (validation F-max {:.4}, test F-max {:.4})",
                    run.validation_fmax, run.test_fmax
                );
            }
            s.push('\n');
        }
    }
    s
}

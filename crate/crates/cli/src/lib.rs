//! Config-driven experiment runner: expands a configuration into runs,
//! writes one trace CSV per run, a theory report and a summary.

pub mod config;
pub mod output;

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use tvopt::analysis::theory_report;
use tvopt::{run, RunResult};

use crate::config::{ConfigError, ExperimentConfig, RunSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Runs every configured run one after another.
    Run,
    /// Writes the theory report only.
    Bounds,
    /// Runs every configured run on a thread pool.
    Sweep,
}

#[derive(Debug, Clone)]
pub struct Options {
    pub config: PathBuf,
    pub out: PathBuf,
    pub seed: Option<u64>,
    pub quiet: bool,
    /// Thread count for `sweep`; `None` uses all cores.
    pub jobs: Option<usize>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config {path}: {source}")]
    Config { path: PathBuf, source: ConfigError },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("run {label}: {source}")]
    Run { label: String, source: tvopt::Error },
    #[error("thread pool: {0}")]
    Pool(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config { .. } | CliError::Io { .. } | CliError::Pool(_) => 1,
            CliError::Run { .. } => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Outcome {
    pub runs: usize,
    pub aborted: Vec<String>,
    pub files: Vec<PathBuf>,
}

impl Outcome {
    pub fn exit_code(&self) -> u8 {
        if self.aborted.is_empty() {
            0
        } else {
            2
        }
    }
}

fn write(path: PathBuf, contents: &str) -> Result<PathBuf, CliError> {
    fs::write(&path, contents).map_err(|source| CliError::Io {
        path: path.clone(),
        source,
    })?;
    Ok(path)
}

pub fn load_config(path: &Path, seed: Option<u64>) -> Result<ExperimentConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut cfg = ExperimentConfig::parse(&text).map_err(|source| CliError::Config {
        path: path.to_path_buf(),
        source,
    })?;
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

/// Theory report for every run that maps onto a prediction-correction
/// configuration, as one text table and one CSV with a leading `run` column.
pub fn bounds(cfg: &ExperimentConfig) -> Result<(String, String), CliError> {
    let spec = cfg
        .problem
        .as_ref()
        .expect("validated config has a problem");
    let mut text = String::new();
    let mut csv = String::from("run,quantity,value,source,inputs,note\n");
    for run_spec in cfg.runs() {
        let fail = |source| CliError::Run {
            label: run_spec.label.clone(),
            source,
        };
        let Some(solver) = run_spec.choice().solver_config().map_err(fail)? else {
            continue;
        };
        let problem = spec.build(run_spec.h, cfg.seed).map_err(fail)?;
        let report = theory_report(problem.as_ref(), &solver);
        if !text.is_empty() {
            text.push('\n');
        }
        text.push_str(&format!("## run {}\n", run_spec.label));
        text.push_str(&report.to_table());
        for line in report.to_csv().lines().skip(1) {
            csv.push_str(&run_spec.label);
            csv.push(',');
            csv.push_str(line);
            csv.push('\n');
        }
    }
    Ok((text, csv))
}

fn execute_run(cfg: &ExperimentConfig, spec: &RunSpec) -> Result<RunResult, CliError> {
    let fail = |source| CliError::Run {
        label: spec.label.clone(),
        source,
    };
    let problem = cfg
        .problem
        .as_ref()
        .expect("validated config has a problem")
        .build(spec.h, cfg.seed)
        .map_err(fail)?;
    run(problem.as_ref(), &spec.choice(), &cfg.x0(), spec.rounds).map_err(fail)
}

pub fn execute(command: Command, opts: &Options) -> Result<Outcome, CliError> {
    let cfg = load_config(&opts.config, opts.seed)?;
    fs::create_dir_all(&opts.out).map_err(|source| CliError::Io {
        path: opts.out.clone(),
        source,
    })?;
    let mut outcome = Outcome::default();

    let (table, csv) = bounds(&cfg)?;
    outcome.files.push(write(
        opts.out.join(format!("bounds_{}.txt", cfg.name)),
        &table,
    )?);
    outcome.files.push(write(
        opts.out.join(format!("bounds_{}.csv", cfg.name)),
        &csv,
    )?);
    if command == Command::Bounds {
        return Ok(outcome);
    }

    let specs = cfg.runs();
    let dim = cfg.x0().dim();
    let problem_name = cfg.problem.as_ref().map(|p| p.name()).unwrap_or_default();
    let one = |spec: &RunSpec| -> Result<(String, bool, PathBuf), CliError> {
        let result = execute_run(&cfg, spec)?;
        let path = write(
            opts.out.join(format!("trace_{}.csv", spec.label)),
            &output::write_trace(&result.trace, dim),
        )?;
        if !opts.quiet {
            eprintln!(
                "{}: {} rounds{}",
                spec.label,
                result.trace.len(),
                if result.is_completed() {
                    ""
                } else {
                    " (aborted)"
                }
            );
        }
        Ok((
            output::summary_row(spec, problem_name, &result),
            result.is_completed(),
            path,
        ))
    };
    let results: Vec<Result<_, CliError>> = match command {
        Command::Sweep => {
            let mut builder = rayon::ThreadPoolBuilder::new();
            if let Some(jobs) = opts.jobs {
                builder = builder.num_threads(jobs);
            }
            let pool = builder.build().map_err(|e| CliError::Pool(e.to_string()))?;
            pool.install(|| specs.par_iter().map(one).collect())
        }
        _ => specs.iter().map(one).collect(),
    };

    let mut summary = String::from(output::SUMMARY_HEADER);
    summary.push('\n');
    for (spec, result) in specs.iter().zip(results) {
        let (row, completed, path) = result?;
        summary.push_str(&row);
        summary.push('\n');
        outcome.files.push(path);
        outcome.runs += 1;
        if !completed {
            outcome.aborted.push(spec.label.clone());
        }
    }
    outcome
        .files
        .push(write(opts.out.join("summary.csv"), &summary)?);
    Ok(outcome)
}

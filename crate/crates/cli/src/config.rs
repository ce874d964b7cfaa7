//! Flat `key = value` experiment configuration.
//!
//! List-valued parameters (`h`, `P`, `v`, `alpha`, `C`) expand to the
//! cartesian product of their values. A `preset` line loads one of the
//! built-in experiments first; every other line overrides it, wherever it
//! appears in the file.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::fmt;

use tvopt::{
    AlgorithmChoice, BaselineConfig, RobustRegression, SolverConfig, TargetTracking,
    TimeVaryingProblem, ToyProblem, Vector, Velocity,
};

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub field: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "line {line}: {}: {}", self.field, self.message),
            None => write!(f, "{}: {}", self.field, self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

fn err(line: Option<usize>, field: &str, message: impl Into<String>) -> ConfigError {
    ConfigError {
        line,
        field: field.to_string(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Algorithm {
    Sharp,
    Tvgd,
    Spc,
    Gtt,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Sharp => "sharp",
            Algorithm::Tvgd => "tvgd",
            Algorithm::Spc => "spc",
            Algorithm::Gtt => "gtt",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "sharp" => Some(Algorithm::Sharp),
            "tvgd" => Some(Algorithm::Tvgd),
            "spc" => Some(Algorithm::Spc),
            "gtt" => Some(Algorithm::Gtt),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProblemSpec {
    Toy,
    TargetTracking {
        amplitudes: Vec<f64>,
        frequencies: Vec<f64>,
        phases: Vec<f64>,
    },
    RobustRegression {
        n: usize,
        m: usize,
    },
}

impl ProblemSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ProblemSpec::Toy => "toy",
            ProblemSpec::TargetTracking { .. } => "target_tracking",
            ProblemSpec::RobustRegression { .. } => "robust_regression",
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            ProblemSpec::Toy => 1,
            ProblemSpec::TargetTracking { amplitudes, .. } => amplitudes.len(),
            ProblemSpec::RobustRegression { n, .. } => *n,
        }
    }

    /// Instantiates the problem; `h` sets the regression's data period.
    pub fn build(&self, h: f64, seed: u64) -> tvopt::Result<Box<dyn TimeVaryingProblem>> {
        Ok(match self {
            ProblemSpec::Toy => Box::new(ToyProblem::new()),
            ProblemSpec::TargetTracking {
                amplitudes,
                frequencies,
                phases,
            } => Box::new(TargetTracking::new(
                amplitudes.clone(),
                frequencies.clone(),
                phases.clone(),
            )?),
            ProblemSpec::RobustRegression { n, m } => {
                Box::new(RobustRegression::new(*n, *m, seed)?.with_period(h)?)
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Horizon {
    Time(f64),
    Rounds(usize),
}

impl Horizon {
    pub fn rounds(self, h: f64) -> usize {
        match self {
            Horizon::Time(t) => (t / h).round().max(1.0) as usize,
            Horizon::Rounds(k) => k,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub name: String,
    pub problem: Option<ProblemSpec>,
    pub algorithms: Vec<Algorithm>,
    pub h: Vec<f64>,
    pub max_order: Vec<usize>,
    pub velocity: Vec<Velocity>,
    pub alpha: Vec<f64>,
    pub corrections: Vec<usize>,
    pub horizon: Option<Horizon>,
    pub x0: Vec<f64>,
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            name: "experiment".to_string(),
            problem: None,
            algorithms: vec![Algorithm::Sharp],
            h: Vec::new(),
            max_order: Vec::new(),
            velocity: Vec::new(),
            alpha: Vec::new(),
            corrections: Vec::new(),
            horizon: None,
            x0: vec![0.0],
            seed: 0,
        }
    }
}

pub const PRESETS: [&str; 4] = ["experiment1", "experiment1b", "experiment2", "experiment3"];

pub fn preset(name: &str) -> Option<ExperimentConfig> {
    let toy =
        |name: &str, h: Vec<f64>, p: Vec<usize>, c: Vec<usize>, v: Vec<f64>| ExperimentConfig {
            name: name.to_string(),
            problem: Some(ProblemSpec::Toy),
            algorithms: vec![Algorithm::Sharp],
            h,
            max_order: p,
            velocity: v.into_iter().map(Velocity::Finite).collect(),
            alpha: vec![1.0 / 1.2],
            corrections: c,
            horizon: Some(Horizon::Time(16.0)),
            x0: vec![0.0],
            seed: 0,
        };
    match name {
        "experiment1" => Some(toy(
            name,
            vec![1.0, 0.1, 0.01],
            vec![1, 2, 4, 7],
            vec![30],
            vec![20.0],
        )),
        "experiment1b" => Some(toy(
            name,
            vec![0.1],
            vec![7],
            vec![1, 5, 30],
            vec![0.1, 1.0, 20.0],
        )),
        "experiment2" => Some(ExperimentConfig {
            name: name.to_string(),
            problem: Some(ProblemSpec::TargetTracking {
                amplitudes: vec![10.0, 23.0],
                frequencies: vec![0.5, 0.3],
                phases: vec![0.0, PI / 2.0],
            }),
            algorithms: vec![
                Algorithm::Sharp,
                Algorithm::Tvgd,
                Algorithm::Spc,
                Algorithm::Gtt,
            ],
            h: vec![0.1],
            max_order: vec![7],
            velocity: vec![Velocity::Finite(10.0)],
            alpha: vec![0.5],
            corrections: vec![1],
            horizon: Some(Horizon::Rounds(400)),
            x0: vec![0.0],
            seed: 0,
        }),
        "experiment3" => Some(ExperimentConfig {
            name: name.to_string(),
            problem: Some(ProblemSpec::RobustRegression { n: 10, m: 100 }),
            algorithms: vec![Algorithm::Sharp, Algorithm::Tvgd],
            h: vec![0.1],
            max_order: vec![7],
            velocity: vec![Velocity::Finite(10.0)],
            alpha: vec![0.5],
            corrections: vec![30],
            horizon: Some(Horizon::Rounds(300)),
            x0: vec![0.0],
            seed: 1,
        }),
        _ => None,
    }
}

/// Parses a number, `inf`, `pi`, or a quotient `a/b` of those.
fn parse_scalar(s: &str) -> Option<f64> {
    let atom = |a: &str| -> Option<f64> {
        let a = a.trim();
        let (sign, body) = match a.strip_prefix('-') {
            Some(rest) => (-1.0, rest.trim()),
            None => (1.0, a),
        };
        let value = match body {
            "inf" => f64::INFINITY,
            "pi" => PI,
            _ => body.parse::<f64>().ok().filter(|v| v.is_finite())?,
        };
        Some(sign * value)
    };
    match s.split_once('/') {
        Some((a, b)) => {
            let q = atom(a)? / atom(b)?;
            q.is_finite().then_some(q)
        }
        None => atom(s),
    }
}

fn list<T>(
    line: usize,
    key: &str,
    value: &str,
    parse: impl Fn(&str) -> Option<T>,
) -> Result<Vec<T>, ConfigError> {
    let items: Vec<&str> = value.split(',').map(str::trim).collect();
    if items.iter().any(|s| s.is_empty()) {
        return Err(err(Some(line), key, "empty list entry"));
    }
    items
        .into_iter()
        .map(|s| parse(s).ok_or_else(|| err(Some(line), key, format!("cannot parse `{s}`"))))
        .collect()
}

fn finite(s: &str) -> Option<f64> {
    parse_scalar(s).filter(|v| v.is_finite())
}

fn positive_int(s: &str) -> Option<usize> {
    s.parse::<usize>().ok().filter(|&v| v >= 1)
}

fn velocity(s: &str) -> Option<Velocity> {
    match parse_scalar(s)? {
        v if v == f64::INFINITY => Some(Velocity::Unbounded),
        v if v >= 0.0 => Some(Velocity::Finite(v)),
        _ => None,
    }
}

#[derive(Default)]
struct ProblemKeys {
    kind: Option<(usize, String)>,
    amplitudes: Option<Vec<f64>>,
    frequencies: Option<Vec<f64>>,
    phases: Option<Vec<f64>>,
    n: Option<usize>,
    m: Option<usize>,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut entries = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(err(Some(line), content, "expected `key = value`"));
            };
            let (key, value) = (key.trim(), value.trim());
            if value.is_empty() {
                return Err(err(Some(line), key, "missing value"));
            }
            if entries
                .iter()
                .any(|(_, k, _): &(usize, &str, &str)| *k == key)
            {
                return Err(err(Some(line), key, "duplicate key"));
            }
            entries.push((line, key, value));
        }

        let mut cfg = match entries.iter().find(|(_, k, _)| *k == "preset") {
            Some(&(line, _, value)) => preset(value).ok_or_else(|| {
                err(
                    Some(line),
                    "preset",
                    format!(
                        "unknown preset `{value}`; expected one of {}",
                        PRESETS.join(", ")
                    ),
                )
            })?,
            None => ExperimentConfig::default(),
        };
        let mut pk = ProblemKeys::default();
        let mut dimension: Option<usize> = None;
        let mut x0_line = None;
        for &(line, key, value) in &entries {
            match key {
                "preset" => {}
                "name" => {
                    if !value
                        .chars()
                        .all(|c| c.is_ascii_alphanumeric() || "-_.".contains(c))
                    {
                        return Err(err(Some(line), key, "use letters, digits, `-`, `_` or `.`"));
                    }
                    cfg.name = value.to_string();
                }
                "problem" => pk.kind = Some((line, value.to_string())),
                "problem.amplitudes" => pk.amplitudes = Some(list(line, key, value, finite)?),
                "problem.frequencies" => pk.frequencies = Some(list(line, key, value, finite)?),
                "problem.phases" => pk.phases = Some(list(line, key, value, finite)?),
                "problem.n" => {
                    pk.n = Some(
                        positive_int(value)
                            .ok_or_else(|| err(Some(line), key, "expected an integer >= 1"))?,
                    )
                }
                "problem.m" => {
                    pk.m = Some(
                        positive_int(value)
                            .ok_or_else(|| err(Some(line), key, "expected an integer >= 1"))?,
                    )
                }
                "dimension" => {
                    dimension = Some(
                        positive_int(value)
                            .ok_or_else(|| err(Some(line), key, "expected an integer >= 1"))?,
                    )
                }
                "seed" => {
                    cfg.seed = value
                        .parse()
                        .map_err(|_| err(Some(line), key, "expected a non-negative integer"))?
                }
                "algorithms" => {
                    let algos = list(line, key, value, Algorithm::parse)?;
                    let unique: BTreeSet<_> = algos.iter().collect();
                    if unique.len() != algos.len() {
                        return Err(err(Some(line), key, "algorithm listed twice"));
                    }
                    cfg.algorithms = algos;
                }
                "h" => cfg.h = list(line, key, value, |s| finite(s).filter(|&v| v > 0.0))?,
                "P" => {
                    cfg.max_order =
                        list(line, key, value, |s| positive_int(s).filter(|&v| v <= 30))?
                }
                "v" => cfg.velocity = list(line, key, value, velocity)?,
                "alpha" => cfg.alpha = list(line, key, value, |s| finite(s).filter(|&v| v > 0.0))?,
                "C" => cfg.corrections = list(line, key, value, positive_int)?,
                "horizon" => {
                    let t = finite(value)
                        .filter(|&v| v > 0.0)
                        .ok_or_else(|| err(Some(line), key, "expected a time > 0"))?;
                    cfg.horizon = Some(Horizon::Time(t));
                }
                "K" => {
                    let k = positive_int(value)
                        .ok_or_else(|| err(Some(line), key, "expected an integer >= 1"))?;
                    cfg.horizon = Some(Horizon::Rounds(k));
                }
                "x0" => {
                    cfg.x0 = list(line, key, value, finite)?;
                    x0_line = Some(line);
                }
                _ => return Err(err(Some(line), key, "unknown key")),
            }
        }
        if entries.iter().any(|(_, k, _)| *k == "horizon")
            && entries.iter().any(|(_, k, _)| *k == "K")
        {
            return Err(err(
                None,
                "horizon",
                "give either `horizon` or `K`, not both",
            ));
        }

        cfg.problem = Some(resolve_problem(cfg.problem.take(), pk, dimension)?);
        let dim = cfg.problem.as_ref().map(ProblemSpec::dim).unwrap_or(1);
        if cfg.x0.len() != 1 && cfg.x0.len() != dim {
            return Err(err(
                x0_line,
                "x0",
                format!("has {} entries; expected 1 or {dim}", cfg.x0.len()),
            ));
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), ConfigError> {
        let required = |field: &str, empty: bool| {
            if empty {
                Err(err(None, field, "required"))
            } else {
                Ok(())
            }
        };
        required("h", self.h.is_empty())?;
        required("alpha", self.alpha.is_empty())?;
        required("C", self.corrections.is_empty())?;
        required("horizon", self.horizon.is_none())?;
        if self.algorithms.contains(&Algorithm::Sharp) {
            required("P", self.max_order.is_empty())?;
            required("v", self.velocity.is_empty())?;
        }
        for run in self.runs() {
            if let Some(sc) = run.sharp_parameters {
                SolverConfig::new(sc.h, sc.max_order, sc.velocity, sc.alpha, sc.corrections)
                    .map_err(|e| err(None, "parameters", e.to_string()))?;
            }
        }
        Ok(())
    }

    pub fn x0(&self) -> Vector {
        let dim = self.problem.as_ref().map(ProblemSpec::dim).unwrap_or(1);
        if self.x0.len() == 1 {
            Vector::from_fn(dim, |_| self.x0[0])
        } else {
            Vector::new(self.x0.clone()).expect("validated at parse time")
        }
    }

    /// Every run the configuration expands to, in a fixed order and with
    /// unique labels. Baselines ignore `P` and `v`, so their duplicates
    /// collapse.
    pub fn runs(&self) -> Vec<RunSpec> {
        let varies = |n: usize| n > 1;
        let (vh, vp, vv, va, vc) = (
            varies(self.h.len()),
            varies(self.max_order.len()),
            varies(self.velocity.len()),
            varies(self.alpha.len()),
            varies(self.corrections.len()),
        );
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        let orders: Vec<Option<usize>> = if self.max_order.is_empty() {
            vec![None]
        } else {
            self.max_order.iter().copied().map(Some).collect()
        };
        let velocities: Vec<Option<Velocity>> = if self.velocity.is_empty() {
            vec![None]
        } else {
            self.velocity.iter().copied().map(Some).collect()
        };
        for &algorithm in &self.algorithms {
            for &h in &self.h {
                for &p in &orders {
                    for &v in &velocities {
                        for &alpha in &self.alpha {
                            for &c in &self.corrections {
                                let sharp = algorithm == Algorithm::Sharp;
                                let mut label = algorithm.name().to_string();
                                if vh {
                                    label += &format!("-h{h}");
                                }
                                if sharp && vp {
                                    label += &format!("-P{}", p.unwrap_or(0));
                                }
                                if vc {
                                    label += &format!("-C{c}");
                                }
                                if sharp && vv {
                                    label += &format!(
                                        "-v{}",
                                        v.map(|v| v.to_string()).unwrap_or_default()
                                    );
                                }
                                if va {
                                    label += &format!("-a{alpha}");
                                }
                                if !seen.insert(label.clone()) {
                                    continue;
                                }
                                let sharp_parameters = match (sharp, p, v) {
                                    (true, Some(max_order), Some(velocity)) => {
                                        Some(SharpParameters {
                                            h,
                                            max_order,
                                            velocity,
                                            alpha,
                                            corrections: c,
                                        })
                                    }
                                    _ => None,
                                };
                                out.push(RunSpec {
                                    label,
                                    algorithm,
                                    h,
                                    alpha,
                                    corrections: c,
                                    sharp_parameters,
                                    rounds: self.horizon.map(|hz| hz.rounds(h)).unwrap_or(0),
                                });
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

fn resolve_problem(
    base: Option<ProblemSpec>,
    pk: ProblemKeys,
    dimension: Option<usize>,
) -> Result<ProblemSpec, ConfigError> {
    let kind = match &pk.kind {
        Some((line, k)) => match k.as_str() {
            "toy" | "target_tracking" | "robust_regression" => k.clone(),
            other => return Err(err(
                Some(*line),
                "problem",
                format!(
                    "unknown problem `{other}`; expected toy, target_tracking or robust_regression"
                ),
            )),
        },
        None => match &base {
            Some(b) => b.name().to_string(),
            None => return Err(err(None, "problem", "required")),
        },
    };
    let inherited = base.filter(|b| b.name() == kind);
    let spec = match kind.as_str() {
        "toy" => ProblemSpec::Toy,
        "target_tracking" => {
            let (a0, f0, p0) = match inherited {
                Some(ProblemSpec::TargetTracking {
                    amplitudes,
                    frequencies,
                    phases,
                }) => (amplitudes, frequencies, phases),
                _ => (vec![10.0, 23.0], vec![0.5, 0.3], vec![0.0, PI / 2.0]),
            };
            let amplitudes = pk.amplitudes.unwrap_or(a0);
            let frequencies = pk.frequencies.unwrap_or(f0);
            let phases = pk.phases.unwrap_or_else(|| {
                if p0.len() == amplitudes.len() {
                    p0
                } else {
                    vec![0.0; amplitudes.len()]
                }
            });
            if frequencies.len() != amplitudes.len() || phases.len() != amplitudes.len() {
                return Err(err(
                    None,
                    "problem.amplitudes",
                    "amplitudes, frequencies and phases need equal lengths",
                ));
            }
            ProblemSpec::TargetTracking {
                amplitudes,
                frequencies,
                phases,
            }
        }
        _ => {
            let (n0, m0) = match inherited {
                Some(ProblemSpec::RobustRegression { n, m }) => (n, m),
                _ => (10, 100),
            };
            ProblemSpec::RobustRegression {
                n: pk.n.unwrap_or(n0),
                m: pk.m.unwrap_or(m0),
            }
        }
    };
    if let Some(d) = dimension {
        if d != spec.dim() {
            return Err(err(
                None,
                "dimension",
                format!("problem `{kind}` has dimension {}", spec.dim()),
            ));
        }
    }
    Ok(spec)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SharpParameters {
    pub h: f64,
    pub max_order: usize,
    pub velocity: Velocity,
    pub alpha: f64,
    pub corrections: usize,
}

impl SharpParameters {
    pub fn solver_config(&self) -> SolverConfig {
        SolverConfig::new(
            self.h,
            self.max_order,
            self.velocity,
            self.alpha,
            self.corrections,
        )
        .expect("validated at parse time")
    }
}

/// One fully specified run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub label: String,
    pub algorithm: Algorithm,
    pub h: f64,
    pub alpha: f64,
    pub corrections: usize,
    pub sharp_parameters: Option<SharpParameters>,
    pub rounds: usize,
}

impl RunSpec {
    pub fn choice(&self) -> AlgorithmChoice {
        let base = BaselineConfig {
            h: self.h,
            alpha: self.alpha,
            corrections: self.corrections,
        };
        match self.algorithm {
            Algorithm::Sharp => AlgorithmChoice::Sharp(
                self.sharp_parameters
                    .expect("sharp run has parameters")
                    .solver_config(),
            ),
            Algorithm::Tvgd => AlgorithmChoice::Tvgd(base),
            Algorithm::Spc => AlgorithmChoice::Spc(base),
            Algorithm::Gtt => AlgorithmChoice::Gtt(base),
        }
    }
}

//! The prediction-correction loop and its baselines.

use std::time::{Duration, Instant};

use nalgebra::DVector;

use crate::config::{SolverConfig, Velocity};
use crate::corrector::{Corrector, GradientDescent};
use crate::error::{Error, Result};
use crate::history::History;
use crate::predictor::select_order;
use crate::problems::{distance_to_set, TimeVaryingProblem};
use crate::trace::TraceRecord;
use crate::vector::Vector;

/// Parameters shared by the baselines: sampling period, gradient step and
/// number of gradient steps per round.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaselineConfig {
    pub h: f64,
    pub alpha: f64,
    pub corrections: usize,
}

/// Algorithm to run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlgorithmChoice {
    /// Gated Lagrange extrapolation followed by gradient correction.
    Sharp(SolverConfig),
    /// Time-varying gradient descent: no prediction (`P = 1`).
    Tvgd(BaselineConfig),
    /// Linear extrapolation without a gate (`P = 2`, `v = ∞`).
    Spc(BaselineConfig),
    /// Hessian-based trajectory tracking with a finite-difference estimate
    /// of the mixed derivative.
    Gtt(BaselineConfig),
}

impl AlgorithmChoice {
    pub fn name(&self) -> &'static str {
        match self {
            AlgorithmChoice::Sharp(_) => "sharp",
            AlgorithmChoice::Tvgd(_) => "tvgd",
            AlgorithmChoice::Spc(_) => "spc",
            AlgorithmChoice::Gtt(_) => "gtt",
        }
    }

    pub fn h(&self) -> f64 {
        match self {
            AlgorithmChoice::Sharp(c) => c.h(),
            AlgorithmChoice::Tvgd(b) | AlgorithmChoice::Spc(b) | AlgorithmChoice::Gtt(b) => b.h,
        }
    }

    /// The extrapolating configuration this choice runs with, if any.
    /// TVGD and SPC are the special cases `P = 1` and `(P, v) = (2, ∞)`.
    pub fn solver_config(&self) -> Result<Option<SolverConfig>> {
        match *self {
            AlgorithmChoice::Sharp(c) => Ok(Some(c)),
            AlgorithmChoice::Tvgd(b) => {
                SolverConfig::new(b.h, 1, Velocity::Finite(0.0), b.alpha, b.corrections).map(Some)
            }
            AlgorithmChoice::Spc(b) => {
                SolverConfig::new(b.h, 2, Velocity::Unbounded, b.alpha, b.corrections).map(Some)
            }
            AlgorithmChoice::Gtt(_) => Ok(None),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RunStatus {
    Completed,
    Aborted { round: usize, reason: Error },
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub algorithm: AlgorithmChoice,
    pub trace: Vec<TraceRecord>,
    pub status: RunStatus,
    pub wall_time: Duration,
}

impl RunResult {
    pub fn is_completed(&self) -> bool {
        self.status == RunStatus::Completed
    }

    /// Tracking errors in round order; `None` if any round lacks one.
    pub fn tracking_errors(&self) -> Option<Vec<f64>> {
        self.trace.iter().map(|r| r.tracking_error).collect()
    }
}

/// Runs `rounds` rounds of `algorithm` on `problem` from `x0` at `t_0 = 0`.
///
/// Round `k` predicts for `t_k = k h`, records the prediction metrics,
/// corrects with gradient descent on `f(·; t_k)` and stores the corrected
/// point. Oracle failures end the run early; the trace collected so far is
/// kept and the status says where and why it stopped.
pub fn run(
    problem: &dyn TimeVaryingProblem,
    algorithm: &AlgorithmChoice,
    x0: &Vector,
    rounds: usize,
) -> Result<RunResult> {
    if rounds == 0 {
        return Err(Error::invalid("K", "must be at least 1"));
    }
    x0.check_dim(problem.dim())?;
    let start = Instant::now();
    let (trace, status) = match algorithm {
        AlgorithmChoice::Gtt(b) => gtt_loop(problem, b, x0, rounds)?,
        other => {
            let config = other.solver_config()?.expect("extrapolating algorithm");
            extrapolation_loop(problem, &config, x0, rounds)
        }
    };
    Ok(RunResult {
        algorithm: *algorithm,
        trace,
        status,
        wall_time: start.elapsed(),
    })
}

/// Shorthand for [`run`] with the GTT baseline.
pub fn run_gtt(
    problem: &dyn TimeVaryingProblem,
    alpha: f64,
    corrections: usize,
    h: f64,
    x0: &Vector,
    rounds: usize,
) -> Result<RunResult> {
    let b = BaselineConfig {
        h,
        alpha,
        corrections,
    };
    run(problem, &AlgorithmChoice::Gtt(b), x0, rounds)
}

fn sample_time(k: usize, h: f64) -> f64 {
    k as f64 * h
}

fn record(
    problem: &dyn TimeVaryingProblem,
    k: usize,
    t: f64,
    p_accepted: Option<usize>,
    x_hat: Vector,
    x_corrected: Vector,
    step_norm: f64,
) -> TraceRecord {
    let grad = problem.gradient(x_hat.as_slice(), t);
    let grad_norm_at_prediction = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
    let tracking_error = problem
        .optimal_set(t)
        .filter(|set| !set.is_empty())
        .map(|set| distance_to_set(&x_hat, &set));
    let f_gap = problem
        .optimal_value(t)
        .map(|f_star| problem.value(x_hat.as_slice(), t) - f_star);
    TraceRecord {
        k,
        t,
        p_accepted,
        x_hat,
        x_corrected,
        step_norm,
        grad_norm_at_prediction,
        tracking_error,
        f_gap,
    }
}

fn extrapolation_loop(
    problem: &dyn TimeVaryingProblem,
    config: &SolverConfig,
    x0: &Vector,
    rounds: usize,
) -> (Vec<TraceRecord>, RunStatus) {
    let corrector = GradientDescent {
        alpha: config.alpha(),
        iterations: config.corrections(),
    };
    let mut history = History::new(x0.clone(), config.max_order());
    let mut trace = Vec::with_capacity(rounds);
    for k in 1..=rounds {
        let t = sample_time(k, config.h());
        let selection = select_order(&history, config);
        if !selection.prediction.is_finite() {
            let reason = Error::NonFinite {
                context: format!("prediction at round {k}"),
            };
            return (trace, RunStatus::Aborted { round: k, reason });
        }
        let corrected = match corrector.correct(problem, t, &selection.prediction, k) {
            Ok(x) => x,
            Err(reason) => return (trace, RunStatus::Aborted { round: k, reason }),
        };
        history.push(corrected.clone());
        trace.push(record(
            problem,
            k,
            t,
            Some(selection.order),
            selection.prediction,
            corrected,
            selection.step_norm,
        ));
    }
    (trace, RunStatus::Completed)
}

/// GTT prediction `x − h H⁻¹ g_t` with `H = ∇ₓₓf(x; t)` and
/// `g_t = (∇ₓf(x; t + h) − ∇ₓf(x; t)) / h`.
pub fn gtt_prediction(
    problem: &dyn TimeVaryingProblem,
    x: &Vector,
    t: f64,
    h: f64,
) -> Result<Vector> {
    let hess = problem
        .hessian(x.as_slice(), t)
        .ok_or_else(|| Error::Unavailable {
            what: "Hessian oracle",
            problem: problem.name().to_string(),
        })?;
    if hess.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            context: format!("Hessian at t = {t}"),
        });
    }
    let g_now = DVector::from_vec(problem.gradient(x.as_slice(), t));
    let g_next = DVector::from_vec(problem.gradient(x.as_slice(), t + h));
    let mixed = (g_next - g_now) / h;
    if mixed.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            context: format!("mixed derivative estimate at t = {t}"),
        });
    }
    let lu = hess.lu();
    let direction = lu.solve(&mixed).ok_or(Error::SingularHessian { t })?;
    if direction.iter().any(|v| !v.is_finite()) {
        return Err(Error::SingularHessian { t });
    }
    let step = Vector::new(direction.iter().map(|d| -h * d).collect())?;
    Ok(x + &step)
}

fn gtt_loop(
    problem: &dyn TimeVaryingProblem,
    config: &BaselineConfig,
    x0: &Vector,
    rounds: usize,
) -> Result<(Vec<TraceRecord>, RunStatus)> {
    let corrector = GradientDescent::new(config.alpha, config.corrections)?;
    if !(config.h.is_finite() && config.h > 0.0) {
        return Err(Error::invalid(
            "h",
            format!("must be finite and > 0, got {}", config.h),
        ));
    }
    let mut previous = x0.clone();
    let mut trace = Vec::with_capacity(rounds);
    for k in 1..=rounds {
        let t_prev = sample_time(k - 1, config.h);
        let t = sample_time(k, config.h);
        let x_hat = match gtt_prediction(problem, &previous, t_prev, config.h) {
            Ok(x) => x,
            Err(reason) => return Ok((trace, RunStatus::Aborted { round: k, reason })),
        };
        let corrected = match corrector.correct(problem, t, &x_hat, k) {
            Ok(x) => x,
            Err(reason) => return Ok((trace, RunStatus::Aborted { round: k, reason })),
        };
        let step_norm = x_hat.distance(&previous);
        previous = corrected.clone();
        trace.push(record(problem, k, t, None, x_hat, corrected, step_norm));
    }
    Ok((trace, RunStatus::Completed))
}

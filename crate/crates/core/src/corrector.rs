//! Correction step: approximately minimize the revealed `f(·; t_k)`
//! starting from the prediction.

use crate::error::{Error, Result};
use crate::problems::TimeVaryingProblem;
use crate::vector::Vector;

/// A deterministic map from a starting point to a corrected point for the
/// objective at time `t`.
pub trait Corrector: Send + Sync {
    /// `round` is only used for diagnostics.
    fn correct(
        &self,
        problem: &dyn TimeVaryingProblem,
        t: f64,
        start: &Vector,
        round: usize,
    ) -> Result<Vector>;
}

/// `C` iterations of `x ← x − α∇ₓf(x; t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradientDescent {
    pub alpha: f64,
    pub iterations: usize,
}

impl GradientDescent {
    pub fn new(alpha: f64, iterations: usize) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::invalid(
                "alpha",
                format!("must be finite and > 0, got {alpha}"),
            ));
        }
        if iterations == 0 {
            return Err(Error::invalid("C", "must be at least 1"));
        }
        Ok(GradientDescent { alpha, iterations })
    }
}

impl Corrector for GradientDescent {
    fn correct(
        &self,
        problem: &dyn TimeVaryingProblem,
        t: f64,
        start: &Vector,
        round: usize,
    ) -> Result<Vector> {
        gd_correct_at_round(problem, t, start, self.alpha, self.iterations, round)
    }
}

/// Runs `iterations` gradient steps of size `alpha` on `f(·; t)` from `x0`.
pub fn gd_correct(
    problem: &dyn TimeVaryingProblem,
    t: f64,
    x0: &Vector,
    alpha: f64,
    iterations: usize,
) -> Result<Vector> {
    GradientDescent::new(alpha, iterations)?;
    gd_correct_at_round(problem, t, x0, alpha, iterations, 0)
}

fn gd_correct_at_round(
    problem: &dyn TimeVaryingProblem,
    t: f64,
    x0: &Vector,
    alpha: f64,
    iterations: usize,
    round: usize,
) -> Result<Vector> {
    x0.check_dim(problem.dim())?;
    let mut x = x0.clone().into_inner();
    for c in 0..iterations {
        let g = problem.gradient(&x, t);
        if g.len() != x.len() {
            return Err(Error::DimensionMismatch {
                expected: x.len(),
                actual: g.len(),
            });
        }
        let bad: Vec<usize> = g
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_finite())
            .map(|(i, _)| i)
            .collect();
        if !bad.is_empty() {
            return Err(Error::NonFiniteGradient {
                round,
                iteration: c,
                components: bad,
            });
        }
        for (xi, gi) in x.iter_mut().zip(&g) {
            *xi -= alpha * gi;
        }
    }
    Vector::new(x).map_err(|_| Error::NonFinite {
        context: format!("corrected iterate at round {round}"),
    })
}

//! Extrapolation of past corrected solutions and the velocity gate that
//! picks the extrapolation order.

use crate::binomial::binomial_unchecked;
use crate::config::SolverConfig;
use crate::error::{Error, Result};
use crate::history::History;
use crate::vector::Vector;

/// Order-`p` extrapolation `Σ_{i=1}^{p} (−1)^{i−1} C(p,i) x_{k−i}`.
///
/// Exact for trajectories that are polynomials of degree below `p` on the
/// uniform sampling grid. `p = 1` returns `x_{k−1}`.
pub fn predict(history: &History, p: usize) -> Result<Vector> {
    if p == 0 || p > history.capacity() {
        return Err(Error::OrderOutOfRange {
            order: p,
            max: history.capacity(),
        });
    }
    let mut acc = Vector::zeros(history.dim());
    for i in 1..=p {
        let weight = binomial_unchecked(p, i) as f64;
        let signed = if i % 2 == 1 { weight } else { -weight };
        acc.axpy(signed, history.back(i));
    }
    Ok(acc)
}

/// Outcome of the order selection for one round.
#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    pub order: usize,
    pub prediction: Vector,
    /// `‖prediction − x_{k−1}‖`
    pub step_norm: f64,
}

/// Picks the largest order `p ≤ P` whose extrapolation moves at most `v·h`
/// away from `x_{k−1}`; with an unbounded `v` the order `P` is used as is.
///
/// Order 1 always passes since it does not move. When the accepted step is
/// exactly zero the prediction is returned as a copy of `x_{k−1}`, so
/// gate-limited runs reproduce the non-extrapolating iterates bit for bit.
pub fn select_order(history: &History, config: &SolverConfig) -> Selection {
    let max_order = config.max_order().min(history.capacity());
    let last = history.latest();
    let finish = |order: usize, prediction: Vector, step_norm: f64| {
        let prediction = if step_norm == 0.0 {
            last.clone()
        } else {
            prediction
        };
        Selection {
            order,
            prediction,
            step_norm,
        }
    };

    let Some(max_step) = config.velocity().max_step(config.h()) else {
        let prediction = predict(history, max_order).expect("order within capacity");
        let step_norm = prediction.distance(last);
        return finish(max_order, prediction, step_norm);
    };

    for p in (2..=max_order).rev() {
        let prediction = predict(history, p).expect("order within capacity");
        let step_norm = prediction.distance(last);
        if step_norm <= max_step {
            return finish(p, prediction, step_norm);
        }
    }
    finish(1, last.clone(), 0.0)
}

/// Extrapolation residual bound `σ_p h^p` for a trajectory whose `p`-th
/// derivative is bounded by `sigma_p`.
pub fn lagrange_residual_bound(p: usize, h: f64, sigma_p: f64) -> f64 {
    sigma_p * h.powi(p as i32)
}

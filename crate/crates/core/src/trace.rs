use crate::vector::Vector;

/// Per-round log of a run.
///
/// Metrics that need the problem's optimal trajectory or optimal value are
/// `None` when the problem does not declare them.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub k: usize,
    pub t: f64,
    /// Accepted extrapolation order; `None` for predictors that do not
    /// extrapolate (the GTT baseline).
    pub p_accepted: Option<usize>,
    pub x_hat: Vector,
    pub x_corrected: Vector,
    /// `‖x̂_k − x_{k−1}‖`
    pub step_norm: f64,
    /// `‖∇ₓf(x̂_k; t_k)‖`
    pub grad_norm_at_prediction: f64,
    /// Distance from `x̂_k` to the optimal set at `t_k`.
    pub tracking_error: Option<f64>,
    /// `f(x̂_k; t_k) − f*(t_k)`
    pub f_gap: Option<f64>,
}

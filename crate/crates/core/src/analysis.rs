//! Closed-form tracking-error bounds, parameter prescriptions and the
//! empirical estimators used to hold traces against them.
//!
//! Notation: `P` is the maximum extrapolation order, `p ≤ P` the order a
//! bound is stated for, `γ` the per-round contraction of the correction
//! step, `σ_p` a bound on the `p`-th derivative of the optimal trajectory
//! and `h` the sampling period.

use std::fmt::Write as _;

use crate::binomial::binomial_unchecked;
use crate::config::{SolverConfig, Velocity};
use crate::error::{Error, Result};
use crate::problems::{distance_to_set, TimeVaryingProblem};
use crate::vector::Vector;

fn pow2_minus_one(p: usize) -> f64 {
    2f64.powi(p as i32) - 1.0
}

fn check_order(max_order: usize, p: usize) -> Result<()> {
    if max_order == 0 || max_order > 30 {
        return Err(Error::invalid(
            "P",
            format!("must be in 1..=30, got {max_order}"),
        ));
    }
    if p == 0 || p > max_order {
        return Err(Error::OrderOutOfRange {
            order: p,
            max: max_order,
        });
    }
    Ok(())
}

fn check_gamma(max_order: usize, gamma: f64) -> Result<()> {
    let limit = 1.0 / pow2_minus_one(max_order);
    if !(gamma >= 0.0 && gamma < limit) {
        return Err(Error::invalid(
            "gamma",
            format!("need 0 <= gamma < 1/(2^{max_order} - 1) = {limit:.6e}, got {gamma}"),
        ));
    }
    Ok(())
}

fn check_step(alpha: f64, l20: f64) -> Result<()> {
    if !(l20 > 0.0 && alpha > 0.0 && alpha < 2.0 / l20) {
        return Err(Error::invalid(
            "alpha",
            format!("need 0 < alpha < 2/L = {}, got {alpha}", 2.0 / l20),
        ));
    }
    Ok(())
}

fn check_nonneg(name: &'static str, value: f64) -> Result<()> {
    if !(value.is_finite() && value >= 0.0) {
        return Err(Error::invalid(
            name,
            format!("must be finite and >= 0, got {value}"),
        ));
    }
    Ok(())
}

/// `limsup e_k ≤ 2^{P−p} σ_p / (1 − (2^P − 1)γ) · h^p`.
pub fn asymptotic_bound(
    max_order: usize,
    p: usize,
    gamma: f64,
    sigma_p: f64,
    h: f64,
) -> Result<f64> {
    check_order(max_order, p)?;
    check_gamma(max_order, gamma)?;
    check_nonneg("sigma_p", sigma_p)?;
    let spread = 2f64.powi((max_order - p) as i32);
    Ok(spread * sigma_p / (1.0 - pow2_minus_one(max_order) * gamma) * h.powi(p as i32))
}

/// Largest root `((1 + 1/γ)^{1/P} − 1)^{−1}` of the error recursion's
/// characteristic polynomial `(1 + γ) z^P − γ (z + 1)^P`.
pub fn dominant_root(max_order: usize, gamma: f64) -> Result<f64> {
    check_order(max_order, 1)?;
    check_gamma(max_order, gamma)?;
    if gamma == 0.0 {
        return Err(Error::invalid("gamma", "must be > 0"));
    }
    Ok(1.0 / ((1.0 + 1.0 / gamma).powf(1.0 / max_order as f64) - 1.0))
}

/// Iterates `e_k = γ Σ_{i=1}^{P} C(P,i) e_{k−i} + 2^{P−p} σ_p h^p`.
///
/// `initial` holds the `P` starting errors in chronological order; the
/// returned sequence starts with them and has `P + steps` entries.
pub fn iterate_error_recursion(
    max_order: usize,
    p: usize,
    gamma: f64,
    sigma_p: f64,
    h: f64,
    initial: &[f64],
    steps: usize,
) -> Result<Vec<f64>> {
    check_order(max_order, p)?;
    check_nonneg("gamma", gamma)?;
    check_nonneg("sigma_p", sigma_p)?;
    if initial.len() != max_order {
        return Err(Error::DimensionMismatch {
            expected: max_order,
            actual: initial.len(),
        });
    }
    let forcing = 2f64.powi((max_order - p) as i32) * sigma_p * h.powi(p as i32);
    let mut seq = initial.to_vec();
    seq.reserve(steps);
    for _ in 0..steps {
        let n = seq.len();
        let memory: f64 = (1..=max_order)
            .map(|i| binomial_unchecked(max_order, i) as f64 * seq[n - i])
            .sum();
        seq.push(gamma * memory + forcing);
    }
    Ok(seq)
}

/// `θ₁ = max{|1 − αμ|, |1 − αL|}`, the per-step contraction of gradient
/// descent on a `μ`-strongly convex, `L`-smooth function.
pub fn theta1(mu: f64, l20: f64, alpha: f64) -> f64 {
    f64::max((1.0 - alpha * mu).abs(), (1.0 - alpha * l20).abs())
}

/// `θ₂ = 1 − αμ(2 − αL)`, the per-step decrease of the optimality gap of
/// gradient descent under a `μ`-PL condition.
pub fn theta2(mu: f64, l20: f64, alpha: f64) -> f64 {
    1.0 - alpha * mu * (2.0 - alpha * l20)
}

fn check_curvature(mu: f64, l20: f64) -> Result<()> {
    if !(mu > 0.0 && mu <= l20 && l20.is_finite()) {
        return Err(Error::invalid(
            "mu",
            format!("need 0 < mu <= L, got mu = {mu}, L = {l20}"),
        ));
    }
    Ok(())
}

/// Smallest `C` with `C > log(2^P − 1) / log(1/θ₁)`, so that `γ = θ₁^C`
/// satisfies `γ < 1/(2^P − 1)`. Returns 1 when `θ₁ = 0` or `P = 1`.
pub fn prescribe_c_strongly_convex(
    max_order: usize,
    mu: f64,
    l20: f64,
    alpha: f64,
) -> Result<usize> {
    check_order(max_order, 1)?;
    check_curvature(mu, l20)?;
    check_step(alpha, l20)?;
    let th = theta1(mu, l20, alpha);
    if th == 0.0 || max_order == 1 {
        return Ok(1);
    }
    let ratio = pow2_minus_one(max_order).ln() / (1.0 / th).ln();
    Ok((ratio.floor() as usize + 1).max(1))
}

/// Correction-step constants under a local PL condition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlPrescription {
    pub theta2: f64,
    pub rho: f64,
    /// Smallest `C` with `ρ θ₂^{C/2} < 1/(2^P − 1)`.
    pub corrections: usize,
    /// `ρ θ₂^{C/2}` at `corrections`.
    pub gamma: f64,
    /// `⌈2κ log(2κ(2^P − 1))⌉`, the simpler sufficient count valid for
    /// `α = 1/L`; `None` for other step sizes.
    pub coarse_corrections: Option<usize>,
}

/// `ρ θ₂^{C/2}` with `ρ = √(αL/(2 − αL)) / (1 − √θ₂)`.
pub fn pl_contraction(mu: f64, l20: f64, alpha: f64, corrections: usize) -> f64 {
    let th = theta2(mu, l20, alpha).max(0.0);
    let rho = (alpha * l20 / (2.0 - alpha * l20)).sqrt() / (1.0 - th.sqrt());
    rho * th.powf(corrections as f64 / 2.0)
}

pub fn prescribe_c_pl(max_order: usize, mu: f64, l20: f64, alpha: f64) -> Result<PlPrescription> {
    check_order(max_order, 1)?;
    check_curvature(mu, l20)?;
    check_step(alpha, l20)?;
    let th = theta2(mu, l20, alpha).max(0.0);
    let rho = (alpha * l20 / (2.0 - alpha * l20)).sqrt() / (1.0 - th.sqrt());
    let limit = 1.0 / pow2_minus_one(max_order);
    let corrections = if th == 0.0 {
        1
    } else {
        // ρ θ₂^{C/2} < limit  ⇔  C > 2 ln(ρ / limit) / ln(1/θ₂)
        let ratio = 2.0 * (rho / limit).ln() / (1.0 / th).ln();
        let mut c = (ratio.floor().max(0.0) as usize + 1).max(1);
        // guard against rounding at the boundary
        while rho * th.powf(c as f64 / 2.0) >= limit {
            c += 1;
        }
        c
    };
    let kappa = l20 / mu;
    let coarse_corrections = ((alpha * l20 - 1.0).abs() <= 1e-12)
        .then(|| (2.0 * kappa * (2.0 * kappa * pow2_minus_one(max_order)).ln()).ceil() as usize);
    Ok(PlPrescription {
        theta2: th,
        rho,
        corrections,
        gamma: rho * th.powf(corrections as f64 / 2.0),
        coarse_corrections,
    })
}

/// Lower bound on the velocity threshold `v` under which the order-`p`
/// prediction is accepted `rounds_since_k0` rounds after a reference round
/// with error `e_k0`.
///
/// Pass `e_k0 = 0` or `sigma_p = 0` to neglect the transient or the
/// extrapolation residual.
pub fn prescribe_v(
    p: usize,
    gamma: f64,
    sigma_1: f64,
    sigma_p: f64,
    h: f64,
    e_k0: f64,
    rounds_since_k0: usize,
) -> Result<f64> {
    if !(2..=30).contains(&p) {
        return Err(Error::invalid("p", format!("must be in 2..=30, got {p}")));
    }
    check_gamma(p, gamma)?;
    check_nonneg("sigma_1", sigma_1)?;
    check_nonneg("sigma_p", sigma_p)?;
    check_nonneg("e_k0", e_k0)?;
    if h.is_nan() || h <= 0.0 {
        return Err(Error::invalid("h", "must be > 0"));
    }
    if rounds_since_k0 < p {
        return Err(Error::invalid(
            "k - k0",
            format!("must be at least p = {p}, got {rounds_since_k0}"),
        ));
    }
    let pow = 2f64.powi(p as i32);
    let denom = 1.0 - (pow - 1.0) * gamma;
    let exponent = (rounds_since_k0 + 1 - p) as i32;
    let transient = (pow - 2.0) * e_k0 * gamma.powi(exponent);
    let velocity_term = (1.0 + (pow - 3.0) * gamma) / denom * sigma_1;
    let residual_term = (1.0 - gamma) * (transient + sigma_p * h.powi(p as i32)) / (h * denom);
    Ok(velocity_term + residual_term)
}

/// Left side minus right side of the acceptance sufficiency condition
/// `(2^p−2)γ((v+σ₁)h/(1−γ) + e_{k₀}γ^{k−k₀−p}) + σ₁h + σ_p h^p ≤ vh`.
/// Non-positive values mean the order-`p` prediction is guaranteed to pass.
#[allow(clippy::too_many_arguments)]
pub fn acceptance_margin(
    p: usize,
    gamma: f64,
    v: f64,
    sigma_1: f64,
    sigma_p: f64,
    h: f64,
    e_k0: f64,
    rounds_since_k0: usize,
) -> f64 {
    let pow = 2f64.powi(p as i32);
    let decay = gamma.powi(rounds_since_k0 as i32 - p as i32);
    let lhs = (pow - 2.0) * gamma * ((v + sigma_1) * h / (1.0 - gamma) + e_k0 * decay)
        + sigma_1 * h
        + sigma_p * h.powi(p as i32);
    lhs - v * h
}

/// First round `k ≥ k₀ + p` at which the acceptance sufficiency condition
/// holds, scanning at most `max_rounds` rounds. The margin is
/// non-increasing in `k`, so the first hit stays valid afterwards.
#[allow(clippy::too_many_arguments)]
pub fn first_acceptance_round(
    p: usize,
    gamma: f64,
    v: f64,
    sigma_1: f64,
    sigma_p: f64,
    h: f64,
    e_k0: f64,
    k0: usize,
    max_rounds: usize,
) -> Option<usize> {
    if p == 1 {
        return Some(k0 + 1);
    }
    (k0 + p..k0 + p + max_rounds)
        .find(|&k| acceptance_margin(p, gamma, v, sigma_1, sigma_p, h, e_k0, k - k0) <= 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlTrackingBound {
    /// Asymptotic bound on the distance of `x̂_k` to the optimal set.
    pub distance: f64,
    /// Asymptotic bound on `f(x̂_k; t_k) − f*(t_k)`.
    pub gap: f64,
}

/// Asymptotic bounds for globally PL problems:
/// distance `≤ (v + L₁₁/μ) h / (1 − √(κ θ₂^C))`, gap `≤ (L/2) distance²`.
pub fn pl_tracking_bound(
    v: Velocity,
    l11: f64,
    mu: f64,
    l20: f64,
    theta2: f64,
    corrections: usize,
    h: f64,
) -> Result<PlTrackingBound> {
    let Velocity::Finite(v) = v else {
        return Err(Error::invalid(
            "v",
            "the PL tracking bound needs a finite v",
        ));
    };
    check_nonneg("v", v)?;
    check_nonneg("L11", l11)?;
    check_curvature(mu, l20)?;
    check_nonneg("theta2", theta2)?;
    let kappa = l20 / mu;
    let q = kappa * theta2.powi(corrections as i32);
    if q >= 1.0 {
        return Err(Error::invalid(
            "C",
            format!("need kappa * theta2^C < 1, got {q} with C = {corrections}"),
        ));
    }
    let distance = (v + l11 / mu) / (1.0 - q.sqrt()) * h;
    Ok(PlTrackingBound {
        distance,
        gap: l20 / 2.0 * distance * distance,
    })
}

/// `√((L₁₀ v + L₀₁) h / (α − L α²/2))`, the asymptotic bound on the average
/// gradient norm at the predictions.
pub fn nonconvex_bound(l10: f64, l01: f64, v: f64, alpha: f64, l20: f64, h: f64) -> Result<f64> {
    check_nonneg("L10", l10)?;
    check_nonneg("L01", l01)?;
    check_nonneg("v", v)?;
    check_step(alpha, l20)?;
    Ok(((l10 * v + l01) * h / (alpha - l20 * alpha * alpha / 2.0)).sqrt())
}

/// Bound on `σ₂` from third-order smoothness constants.
pub fn sigma2_bound(mu: f64, l30: f64, l21: f64, l12: f64, l11: f64) -> Result<f64> {
    if mu.is_nan() || mu <= 0.0 {
        return Err(Error::invalid("mu", format!("must be > 0, got {mu}")));
    }
    for (name, v) in [("L30", l30), ("L21", l21), ("L12", l12), ("L11", l11)] {
        check_nonneg(name, v)?;
    }
    Ok(l30 * l11 * l11 / mu.powi(3) + 2.0 * l21 * l11 / (mu * mu) + l12 / mu)
}

/// Hausdorff distance between two non-empty finite point sets.
pub fn hausdorff_distance(a: &[Vector], b: &[Vector]) -> f64 {
    let directed = |from: &[Vector], to: &[Vector]| {
        from.iter()
            .map(|x| distance_to_set(x, to))
            .fold(0.0, f64::max)
    };
    f64::max(directed(a, b), directed(b, a))
}

/// Largest `dist_H(X*(s), X*(t)) / |s − t|` over consecutive `times`.
pub fn max_hausdorff_rate(problem: &dyn TimeVaryingProblem, times: &[f64]) -> Result<f64> {
    let unavailable = || Error::Unavailable {
        what: "optimal set",
        problem: problem.name().to_string(),
    };
    let mut sets = Vec::with_capacity(times.len());
    for &t in times {
        let set = problem.optimal_set(t).ok_or_else(unavailable)?;
        if set.is_empty() {
            return Err(unavailable());
        }
        sets.push(set);
    }
    let mut worst: f64 = 0.0;
    for (w, s) in times.windows(2).zip(sets.windows(2)) {
        let dt = (w[1] - w[0]).abs();
        if dt > 0.0 {
            worst = worst.max(hausdorff_distance(&s[0], &s[1]) / dt);
        }
    }
    Ok(worst)
}

/// Least-squares slope of `log(error)` against `log(h)`.
pub fn estimate_convergence_order(errors_by_h: &[(f64, f64)]) -> Result<f64> {
    let mut hs: Vec<f64> = errors_by_h.iter().map(|&(h, _)| h).collect();
    hs.sort_by(f64::total_cmp);
    hs.dedup();
    if hs.len() < 3 {
        return Err(Error::invalid(
            "errors_by_h",
            "need at least 3 distinct h values",
        ));
    }
    if errors_by_h
        .iter()
        .any(|&(h, e)| !(h > 0.0 && e > 0.0 && e.is_finite()))
    {
        return Err(Error::invalid(
            "errors_by_h",
            "h and errors must be positive and finite",
        ));
    }
    let n = errors_by_h.len() as f64;
    let xs: Vec<f64> = errors_by_h.iter().map(|&(h, _)| h.ln()).collect();
    let ys: Vec<f64> = errors_by_h.iter().map(|&(_, e)| e.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(sxy / sxx)
}

/// Estimates `sup ‖(x*)^{(p)}‖` on `[t0, t1]` from `p`-th backward
/// differences with spacing `h_fine`.
pub fn estimate_sigma(
    trajectory: impl Fn(f64) -> Vector,
    p: usize,
    t0: f64,
    t1: f64,
    h_fine: f64,
) -> Result<f64> {
    if p == 0 || p > 30 {
        return Err(Error::OrderOutOfRange { order: p, max: 30 });
    }
    if !(h_fine > 0.0 && t1 > t0 + p as f64 * h_fine) {
        return Err(Error::invalid(
            "h_fine",
            "grid must hold at least p + 1 points",
        ));
    }
    let count = ((t1 - t0) / h_fine).floor() as usize;
    let samples: Vec<Vector> = (0..=count)
        .map(|i| trajectory(t0 + i as f64 * h_fine))
        .collect();
    let mut sup: f64 = 0.0;
    for end in p..samples.len() {
        let window: Vec<Vector> = (0..=p).map(|i| samples[end - i].clone()).collect();
        let diff = crate::binomial::alternating_binomial_sum(p, &window)?;
        sup = sup.max(diff.norm() / h_fine.powi(p as i32));
    }
    Ok(sup)
}

/// One line of a [`TheoryReport`].
#[derive(Debug, Clone, PartialEq)]
pub struct ReportEntry {
    pub quantity: String,
    /// `Err` holds why the value could not be computed.
    pub value: std::result::Result<f64, String>,
    /// Which bound or rule produced the value.
    pub source: &'static str,
    /// Inputs, as `name=value` pairs separated by `;`.
    pub inputs: String,
}

/// Constants, prescriptions and bounds for one problem and configuration.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TheoryReport {
    pub title: String,
    pub entries: Vec<ReportEntry>,
}

impl TheoryReport {
    pub fn get(&self, quantity: &str) -> Option<f64> {
        self.entries
            .iter()
            .find(|e| e.quantity == quantity)
            .and_then(|e| e.value.as_ref().ok().copied())
    }

    pub fn entry(&self, quantity: &str) -> Option<&ReportEntry> {
        self.entries.iter().find(|e| e.quantity == quantity)
    }

    fn push(
        &mut self,
        quantity: &str,
        value: std::result::Result<f64, String>,
        source: &'static str,
        inputs: String,
    ) {
        self.entries.push(ReportEntry {
            quantity: quantity.to_string(),
            value,
            source,
            inputs,
        });
    }

    /// Fixed-width text table.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# {}", self.title);
        let _ = writeln!(
            out,
            "{:<28} {:>24}  {:<40} inputs",
            "quantity", "value", "source"
        );
        for e in &self.entries {
            let value = match &e.value {
                Ok(v) => format!("{v:.16e}"),
                Err(_) => "unavailable".to_string(),
            };
            let _ = write!(
                out,
                "{:<28} {:>24}  {:<40} {}",
                e.quantity, value, e.source, e.inputs
            );
            if let Err(reason) = &e.value {
                let _ = write!(out, "  ({reason})");
            }
            out.push('\n');
        }
        out
    }

    /// CSV with header `quantity,value,source,inputs,note`; unavailable
    /// values are empty and carry the reason in `note`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("quantity,value,source,inputs,note\n");
        for e in &self.entries {
            let (value, note) = match &e.value {
                Ok(v) => (format!("{v:.16e}"), String::new()),
                Err(reason) => (String::new(), reason.replace(',', ";")),
            };
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                e.quantity, value, e.source, e.inputs, note
            );
        }
        out
    }
}

fn fmt_inputs(pairs: &[(&str, f64)]) -> String {
    pairs
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(";")
}

/// Evaluates every bound and prescription that the problem's declared
/// constants support for `config`; the rest are listed as unavailable.
///
/// `σ₁` comes from the problem's closed form when it has one, otherwise
/// from `L₁₁/μ`. Transients are neglected in the velocity prescription.
pub fn theory_report(problem: &dyn TimeVaryingProblem, config: &SolverConfig) -> TheoryReport {
    let c = problem.constants();
    let (h, big_p, alpha, corr) = (
        config.h(),
        config.max_order(),
        config.alpha(),
        config.corrections(),
    );
    let mut r = TheoryReport {
        title: format!(
            "problem={} h={} P={} v={} alpha={} C={}",
            problem.name(),
            h,
            big_p,
            config.velocity(),
            alpha,
            corr
        ),
        entries: Vec::new(),
    };
    let need = |what: &str| Err(format!("{what} not declared"));

    r.push("L20", Ok(c.l20), "declared constant", String::new());
    match c.mu {
        Some(mu) => r.push("mu", Ok(mu), "declared constant", String::new()),
        None => r.push("mu", need("mu"), "declared constant", String::new()),
    }
    r.push(
        "kappa",
        c.kappa().ok_or_else(|| "mu not declared".to_string()),
        "condition number L20/mu",
        String::new(),
    );

    // trajectory derivative bounds
    let (sigma1, sigma1_source) = match (problem.sigma(1), c.l11, c.mu) {
        (Some(s), _, _) => (Some(s), "closed-form trajectory bound"),
        (None, Some(l11), Some(mu)) => (Some(l11 / mu), "optimal-set Lipschitz bound L11/mu"),
        _ => (None, "trajectory velocity bound"),
    };
    r.push(
        "sigma_1",
        sigma1.ok_or_else(|| "needs a closed form or L11 and mu".to_string()),
        sigma1_source,
        String::new(),
    );
    let sigma_p = if big_p == 1 {
        sigma1
    } else {
        problem.sigma(big_p)
    };
    if big_p > 1 {
        r.push(
            &format!("sigma_{big_p}"),
            sigma_p.ok_or_else(|| "no closed-form derivative bound".to_string()),
            "closed-form trajectory bound",
            String::new(),
        );
    }

    // strongly convex correction
    let sc_gamma = c.mu.map(|mu| theta1(mu, c.l20, alpha).powi(corr as i32));
    match c.mu {
        Some(mu) => {
            let inputs = fmt_inputs(&[("mu", mu), ("L20", c.l20), ("alpha", alpha)]);
            r.push(
                "theta1",
                Ok(theta1(mu, c.l20, alpha)),
                "gradient descent contraction",
                inputs.clone(),
            );
            r.push(
                "C_strongly_convex",
                prescribe_c_strongly_convex(big_p, mu, c.l20, alpha)
                    .map(|v| v as f64)
                    .map_err(|e| e.to_string()),
                "strongly convex step-count rule",
                format!("P={big_p};{inputs}"),
            );
            r.push(
                "gamma_strongly_convex",
                Ok(sc_gamma.expect("mu known")),
                "theta1^C",
                format!("C={corr}"),
            );
        }
        None => {
            for q in ["theta1", "C_strongly_convex", "gamma_strongly_convex"] {
                r.push(
                    q,
                    need("mu"),
                    "strongly convex step-count rule",
                    String::new(),
                );
            }
        }
    }

    // velocity threshold and asymptotic error
    let gamma_inputs = |g: f64| fmt_inputs(&[("gamma", g), ("h", h)]);
    match (sc_gamma, sigma1) {
        (Some(gamma), Some(s1)) if big_p >= 2 => {
            let residual = sigma_p.unwrap_or(0.0);
            let note = if sigma_p.is_some() {
                ""
            } else {
                ";sigma_p neglected"
            };
            r.push(
                "v_min",
                prescribe_v(big_p, gamma, s1, residual, h, 0.0, big_p).map_err(|e| e.to_string()),
                "velocity threshold lower bound",
                format!(
                    "p={big_p};{};sigma_1={s1};transient neglected{note}",
                    gamma_inputs(gamma)
                ),
            );
        }
        (Some(_), Some(_)) => r.push(
            "v_min",
            Err("any v works for P = 1".into()),
            "velocity threshold lower bound",
            String::new(),
        ),
        _ => r.push(
            "v_min",
            need("mu or sigma_1"),
            "velocity threshold lower bound",
            String::new(),
        ),
    }
    match (sc_gamma, sigma_p) {
        (Some(gamma), Some(sp)) => {
            r.push(
                "asymptotic_error_bound",
                asymptotic_bound(big_p, big_p, gamma, sp, h).map_err(|e| e.to_string()),
                "general asymptotic tracking bound",
                format!("P={big_p};p={big_p};{};sigma_p={sp}", gamma_inputs(gamma)),
            );
            r.push(
                "dominant_root",
                dominant_root(big_p, gamma).map_err(|e| e.to_string()),
                "error recursion dominant root",
                gamma_inputs(gamma),
            );
        }
        _ => {
            r.push(
                "asymptotic_error_bound",
                need("mu or sigma_p"),
                "general asymptotic tracking bound",
                String::new(),
            );
            r.push(
                "dominant_root",
                need("mu"),
                "error recursion dominant root",
                String::new(),
            );
        }
    }

    // PL correction
    match c.mu {
        Some(mu) => {
            let inputs = fmt_inputs(&[("mu", mu), ("L20", c.l20), ("alpha", alpha)]);
            match prescribe_c_pl(big_p, mu, c.l20, alpha) {
                Ok(pl) => {
                    r.push(
                        "theta2",
                        Ok(pl.theta2),
                        "PL gradient descent contraction",
                        inputs.clone(),
                    );
                    r.push("rho", Ok(pl.rho), "PL iterate drift factor", inputs.clone());
                    r.push(
                        "C_pl",
                        Ok(pl.corrections as f64),
                        "local PL step-count rule",
                        format!("P={big_p};{inputs}"),
                    );
                    r.push(
                        "C_pl_coarse",
                        pl.coarse_corrections
                            .map(|c| c as f64)
                            .ok_or_else(|| "only defined for alpha = 1/L20".to_string()),
                        "local PL step-count rule (alpha = 1/L)",
                        format!("P={big_p};{inputs}"),
                    );
                    r.push(
                        "gamma_pl",
                        Ok(pl_contraction(mu, c.l20, alpha, corr)),
                        "rho*theta2^(C/2)",
                        format!("C={corr}"),
                    );
                    match c.l11 {
                        Some(l11) => match pl_tracking_bound(
                            config.velocity(),
                            l11,
                            mu,
                            c.l20,
                            pl.theta2,
                            corr,
                            h,
                        ) {
                            Ok(b) => {
                                r.push(
                                    "pl_distance_bound",
                                    Ok(b.distance),
                                    "global PL tracking bound",
                                    format!("L11={l11};C={corr}"),
                                );
                                r.push(
                                    "pl_gap_bound",
                                    Ok(b.gap),
                                    "global PL tracking bound",
                                    format!("L11={l11};C={corr}"),
                                );
                            }
                            Err(e) => {
                                r.push(
                                    "pl_distance_bound",
                                    Err(e.to_string()),
                                    "global PL tracking bound",
                                    String::new(),
                                );
                                r.push(
                                    "pl_gap_bound",
                                    Err(e.to_string()),
                                    "global PL tracking bound",
                                    String::new(),
                                );
                            }
                        },
                        None => {
                            r.push(
                                "pl_distance_bound",
                                need("L11"),
                                "global PL tracking bound",
                                String::new(),
                            );
                            r.push(
                                "pl_gap_bound",
                                need("L11"),
                                "global PL tracking bound",
                                String::new(),
                            );
                        }
                    }
                }
                Err(e) => {
                    for q in [
                        "theta2",
                        "rho",
                        "C_pl",
                        "C_pl_coarse",
                        "gamma_pl",
                        "pl_distance_bound",
                        "pl_gap_bound",
                    ] {
                        r.push(
                            q,
                            Err(e.to_string()),
                            "local PL step-count rule",
                            String::new(),
                        );
                    }
                }
            }
        }
        None => {
            for q in [
                "theta2",
                "rho",
                "C_pl",
                "C_pl_coarse",
                "gamma_pl",
                "pl_distance_bound",
                "pl_gap_bound",
            ] {
                r.push(q, need("mu"), "local PL step-count rule", String::new());
            }
        }
    }

    // non-convex
    let nc = match (c.l10, c.l01, config.velocity()) {
        (Some(l10), Some(l01), Velocity::Finite(v)) => {
            nonconvex_bound(l10, l01, v, alpha, c.l20, h).map_err(|e| e.to_string())
        }
        (_, _, Velocity::Unbounded) => Err("needs a finite v".to_string()),
        (None, _, _) => need("L10"),
        (_, None, _) => need("L01"),
    };
    r.push(
        "nonconvex_grad_bound",
        nc,
        "non-convex average gradient bound",
        fmt_inputs(&[("alpha", alpha), ("L20", c.l20), ("h", h)]),
    );
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{TargetTracking, ToyProblem};
    use crate::rng::SplitMix64;
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn asymptotic_bound_values() {
        let v = asymptotic_bound(3, 3, 0.0, 2.5, 0.2).unwrap();
        assert!(close(v, 2.5 * 0.008, 1e-15));
        let s7 = TargetTracking::standard().sigma(7).unwrap();
        let v = asymptotic_bound(7, 7, 0.0, s7, 0.1).unwrap();
        assert!(close(v, 7.83e-9, 5e-3), "{v}");
        let v = asymptotic_bound(2, 2, 0.2, 1.0, 0.1).unwrap();
        assert!(close(v, 0.025, 1e-14), "{v}");
        // 2^{P-p} spread
        let v = asymptotic_bound(4, 2, 0.0, 1.0, 0.1).unwrap();
        assert!(close(v, 4.0 * 0.01, 1e-14));
        assert!(asymptotic_bound(2, 2, 1.0 / 3.0, 1.0, 0.1).is_err());
        assert!(asymptotic_bound(2, 3, 0.0, 1.0, 0.1).is_err());
    }

    // Durand–Kerner on the monic form of (1+γ) z^P − γ (z+1)^P.
    fn characteristic_roots(p: usize, gamma: f64) -> Vec<Complex64> {
        let mut coeffs = vec![0.0; p + 1]; // coeffs[j] multiplies z^j
        coeffs[p] += 1.0 + gamma;
        for (j, c) in coeffs.iter_mut().enumerate() {
            *c -= gamma * binomial_unchecked(p, j) as f64;
        }
        let lead = coeffs[p];
        let monic: Vec<f64> = coeffs.iter().map(|c| c / lead).collect();
        let eval = |z: Complex64| {
            monic
                .iter()
                .rev()
                .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
        };
        let seed = Complex64::new(0.4, 0.9);
        let mut roots: Vec<Complex64> = (0..p).map(|i| seed.powu(i as u32)).collect();
        for _ in 0..500 {
            for i in 0..p {
                let mut denom = Complex64::new(1.0, 0.0);
                for j in 0..p {
                    if i != j {
                        denom *= roots[i] - roots[j];
                    }
                }
                let step = eval(roots[i]) / denom;
                roots[i] -= step;
            }
        }
        roots
    }

    #[test]
    fn dominant_root_values() {
        assert!(close(dominant_root(1, 0.3).unwrap(), 0.3, 1e-14));
        let r = dominant_root(2, 0.2).unwrap();
        // (1.2) z² − 0.2 (z+1)² = z² − 0.4 z − 0.2 = 0
        let quadratic = (0.4 + (0.16f64 + 0.8).sqrt()) / 2.0;
        assert!(close(r, quadratic, 1e-14), "{r} vs {quadratic}");
        assert!(close(r, 0.6899, 1e-4));
        assert!(dominant_root(2, 0.0).is_err());
        assert!(dominant_root(2, 0.34).is_err());
    }

    #[test]
    fn dominant_root_matches_polynomial_roots() {
        let mut rng = SplitMix64::new(3);
        for p in 1..=4usize {
            for _ in 0..20 {
                let limit = 1.0 / pow2_minus_one(p);
                let gamma = limit * (0.5 * rng.next_symmetric() + 0.5).max(1e-3) * 0.999;
                let roots = characteristic_roots(p, gamma);
                let largest = roots.iter().map(|z| z.norm()).fold(0.0, f64::max);
                let r = dominant_root(p, gamma).unwrap();
                assert!(close(r, largest, 1e-8), "p={p} γ={gamma}: {r} vs {largest}");
                assert!(r < 1.0);
            }
            // just above the limit the largest root leaves the unit disc
            let gamma = 1.0 / pow2_minus_one(p) * 1.05;
            if gamma < 1.0 {
                let largest = characteristic_roots(p, gamma)
                    .iter()
                    .map(|z| z.norm())
                    .fold(0.0, f64::max);
                assert!(largest >= 1.0, "p={p}: {largest}");
            }
        }
    }

    #[test]
    fn recursion_with_zero_gamma_is_memoryless() {
        let seq = iterate_error_recursion(3, 2, 0.0, 4.0, 0.5, &[9.0, 8.0, 7.0], 10).unwrap();
        assert_eq!(&seq[..3], &[9.0, 8.0, 7.0]);
        assert!(seq[3..].iter().all(|&e| e == 2.0 * 4.0 * 0.25));
    }

    #[test]
    fn first_order_recursion_closed_form() {
        let (gamma, sigma, h, e0) = (0.3, 2.0, 0.1, 5.0);
        let seq = iterate_error_recursion(1, 1, gamma, sigma, h, &[e0], 50).unwrap();
        for (k, e) in seq.iter().enumerate() {
            let g = gamma.powi(k as i32);
            let closed = g * e0 + (1.0 - g) / (1.0 - gamma) * sigma * h;
            assert!((e - closed).abs() <= 1e-12, "k={k}");
        }
    }

    #[test]
    fn recursion_rejects_bad_initial_length() {
        assert!(iterate_error_recursion(3, 1, 0.01, 1.0, 0.1, &[1.0], 5).is_err());
    }

    #[test]
    fn strongly_convex_prescriptions() {
        assert_eq!(
            prescribe_c_strongly_convex(7, 0.2, 1.2, 1.0 / 1.2).unwrap(),
            27
        );
        assert_eq!(prescribe_c_strongly_convex(7, 2.0, 2.0, 0.5).unwrap(), 1);
        assert_eq!(prescribe_c_strongly_convex(1, 0.1, 1.0, 0.5).unwrap(), 1);
        assert!(prescribe_c_strongly_convex(7, 0.2, 1.2, 2.0 / 1.2).is_err());
        assert!(prescribe_c_strongly_convex(7, 2.0, 1.0, 0.5).is_err());
    }

    #[test]
    fn pl_prescriptions() {
        let pl = prescribe_c_pl(1, 3.0, 3.0, 1.0 / 3.0).unwrap();
        assert_eq!(pl.theta2, 0.0);
        assert_eq!(pl.corrections, 1);
        // κ = 6, α = 1/L
        let pl = prescribe_c_pl(7, 1.0, 6.0, 1.0 / 6.0).unwrap();
        // 2κ ln(2κ(2^P − 1)) = 12 ln 1524 ≈ 87.95
        let coarse = 12.0 * 1524f64.ln();
        assert!((coarse - 87.949).abs() < 1e-3);
        assert_eq!(pl.coarse_corrections, Some(88));
        assert!(pl.corrections <= 89);
        // brute-force smallest C from the defining inequality
        let limit = 1.0 / 127.0;
        let brute = (1..1000)
            .find(|&c| pl_contraction(1.0, 6.0, 1.0 / 6.0, c) < limit)
            .unwrap();
        assert_eq!(pl.corrections, brute);
        assert!(close(
            pl.gamma,
            pl.rho * pl.theta2.powf(brute as f64 / 2.0),
            1e-15
        ));
        assert!(prescribe_c_pl(7, 1.0, 6.0, 0.5).is_err());
        assert_eq!(
            prescribe_c_pl(7, 1.0, 6.0, 0.1).unwrap().coarse_corrections,
            None
        );
    }

    // Independent route: smallest v satisfying the acceptance sufficiency
    // condition, by bisection.
    fn v_by_bisection(p: usize, gamma: f64, s1: f64, sp: f64, h: f64, e0: f64, dk: usize) -> f64 {
        let (mut lo, mut hi) = (0.0, 1e9);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if acceptance_margin(p, gamma, mid, s1, sp, h, e0, dk) <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }

    #[test]
    fn velocity_prescription_values() {
        // (p, σ_p) = (6, 1e6), γ = 0.01, h = 0.01, k − k0 = 100, e_k0 = 1
        let coeff = prescribe_v(6, 0.01, 1.0, 1e6, 0.01, 1.0, 100).unwrap();
        let without_velocity = prescribe_v(6, 0.01, 0.0, 1e6, 0.01, 1.0, 100).unwrap();
        assert!((coeff - without_velocity - 1.61 / 0.37).abs() < 1e-12);
        assert!((coeff - 4.4).abs() <= 0.05, "{coeff}");
        // experiment-1 setting: p = 7, γ = (5/6)^30, σ₁ = 5, transients neglected
        let gamma = (5.0f64 / 6.0).powi(30);
        let v = prescribe_v(7, gamma, 5.0, 0.0, 0.1, 0.0, 7).unwrap();
        assert!((v - 16.4).abs() <= 0.5, "{v}");
        assert!(prescribe_v(1, 0.0, 1.0, 0.0, 0.1, 0.0, 5).is_err());
        assert!(prescribe_v(3, 0.2, 1.0, 0.0, 0.1, 0.0, 5).is_err());
    }

    #[test]
    fn velocity_transient_decays() {
        let far = prescribe_v(4, 0.05, 2.0, 0.0, 0.1, 10.0, 400).unwrap();
        let floor = (1.0 + 13.0 * 0.05) / (1.0 - 15.0 * 0.05) * 2.0;
        assert!((far - floor).abs() < 1e-12);
        let near = prescribe_v(4, 0.05, 2.0, 0.0, 0.1, 10.0, 4).unwrap();
        assert!(near > far);
    }

    #[test]
    fn first_acceptance_round_scan() {
        // γ = 0: the condition does not depend on k
        assert_eq!(
            first_acceptance_round(7, 0.0, 10.0, 8.52, 0.08, 0.1, 23.0, 1, 100),
            Some(8)
        );
        assert_eq!(
            first_acceptance_round(7, 0.0, 5.0, 8.52, 0.08, 0.1, 23.0, 1, 100),
            None
        );
        let k1 = first_acceptance_round(3, 0.05, 10.0, 2.0, 1.0, 0.1, 50.0, 0, 1000).unwrap();
        assert!(acceptance_margin(3, 0.05, 10.0, 2.0, 1.0, 0.1, 50.0, k1) <= 0.0);
        assert!(acceptance_margin(3, 0.05, 10.0, 2.0, 1.0, 0.1, 50.0, k1 - 1) > 0.0);
    }

    #[test]
    fn pl_tracking_bounds() {
        let b = pl_tracking_bound(Velocity::Finite(3.0), 2.0, 1.0, 1.0, 0.0, 1, 0.1).unwrap();
        assert!(close(b.distance, 0.5, 1e-15));
        assert!(close(b.gap, 0.5 * 0.25, 1e-15));
        let b1 = pl_tracking_bound(Velocity::Finite(3.0), 2.0, 1.0, 4.0, 0.5, 5, 0.1).unwrap();
        let b2 = pl_tracking_bound(Velocity::Finite(3.0), 2.0, 1.0, 4.0, 0.5, 5, 0.2).unwrap();
        assert!(close(b2.distance, 2.0 * b1.distance, 1e-14));
        assert!(close(b2.gap, 4.0 * b1.gap, 1e-14));
        assert!(close(b1.gap, 2.0 * b1.distance * b1.distance, 1e-14));
        assert!(pl_tracking_bound(Velocity::Finite(3.0), 2.0, 1.0, 4.0, 0.5, 2, 0.1).is_err());
        assert!(pl_tracking_bound(Velocity::Unbounded, 2.0, 1.0, 4.0, 0.5, 5, 0.1).is_err());
    }

    #[test]
    fn nonconvex_bounds() {
        let tvgd = nonconvex_bound(1.0, 0.7, 0.0, 0.5, 2.0, 0.1).unwrap();
        assert!(close(tvgd, (0.07f64 / 0.25).sqrt(), 1e-15));
        let mut prev = tvgd;
        for v in [0.5, 1.0, 10.0, 100.0] {
            let b = nonconvex_bound(1.0, 0.7, v, 0.5, 2.0, 0.1).unwrap();
            assert!(b > prev);
            prev = b;
        }
        let b1 = nonconvex_bound(1.0, 0.7, 3.0, 0.5, 2.0, 0.1).unwrap();
        let b4 = nonconvex_bound(1.0, 0.7, 3.0, 0.5, 2.0, 0.4).unwrap();
        assert!(close(b4, 2.0 * b1, 1e-14));
        assert!(nonconvex_bound(1.0, 0.7, 3.0, 1.0, 2.0, 0.1).is_err());
    }

    #[test]
    fn sigma2_bounds() {
        assert_eq!(sigma2_bound(1.0, 0.0, 0.0, 0.0, 0.0).unwrap(), 0.0);
        assert_eq!(sigma2_bound(1.0, 1.0, 1.0, 1.0, 1.0).unwrap(), 4.0);
        assert!(sigma2_bound(0.0, 1.0, 1.0, 1.0, 1.0).is_err());
        // target tracking: ∇ₓₓₓf = 0, ∇ₓₓₜf = 0, ∇ₓₜₜf = −2ÿ so L12 = 2 sup‖ÿ‖
        let p = TargetTracking::standard();
        let s2 = p.sigma(2).unwrap();
        assert!((s2 - 3.24).abs() < 0.01, "{s2}");
        let bound = sigma2_bound(2.0, 0.0, 0.0, 2.0 * s2, p.constants().l11.unwrap()).unwrap();
        assert!(close(bound, s2, 1e-15));
        let grid = (0..100_000)
            .map(|i| p.target_derivative(2, i as f64 * 2e-3).norm())
            .fold(0.0, f64::max);
        assert!(grid <= bound + 1e-12);
    }

    #[test]
    fn hausdorff_rates() {
        let p = TargetTracking::standard();
        let times: Vec<f64> = (0..20_000).map(|i| i as f64 * 5e-3).collect();
        let rate = max_hausdorff_rate(&p, &times).unwrap();
        let c = p.constants();
        assert!(rate <= c.l11.unwrap() / c.mu.unwrap() + 1e-9, "{rate}");
        assert!(rate >= 0.97 * p.sigma(1).unwrap());

        struct Fixed;
        impl TimeVaryingProblem for Fixed {
            fn name(&self) -> &str {
                "fixed"
            }
            fn dim(&self) -> usize {
                1
            }
            fn value(&self, x: &[f64], _t: f64) -> f64 {
                x[0] * x[0]
            }
            fn gradient(&self, x: &[f64], _t: f64) -> Vec<f64> {
                vec![2.0 * x[0]]
            }
            fn optimal_set(&self, _t: f64) -> Option<Vec<Vector>> {
                Some(vec![Vector::from(0.0)])
            }
            fn constants(&self) -> crate::problems::ProblemConstants {
                Default::default()
            }
        }
        assert_eq!(max_hausdorff_rate(&Fixed, &times[..10]).unwrap(), 0.0);

        struct Unknown;
        impl TimeVaryingProblem for Unknown {
            fn name(&self) -> &str {
                "unknown"
            }
            fn dim(&self) -> usize {
                1
            }
            fn value(&self, _x: &[f64], _t: f64) -> f64 {
                0.0
            }
            fn gradient(&self, _x: &[f64], _t: f64) -> Vec<f64> {
                vec![0.0]
            }
            fn constants(&self) -> crate::problems::ProblemConstants {
                Default::default()
            }
        }
        assert!(matches!(
            max_hausdorff_rate(&Unknown, &[0.0, 1.0]),
            Err(Error::Unavailable { .. })
        ));
    }

    #[test]
    fn singleton_hausdorff_is_point_distance() {
        let a = Vector::new(vec![1.0, 2.0]).unwrap();
        let b = Vector::new(vec![4.0, 6.0]).unwrap();
        assert_eq!(
            hausdorff_distance(std::slice::from_ref(&a), std::slice::from_ref(&b)),
            5.0
        );
    }

    #[test]
    fn convergence_order_of_synthetic_data() {
        let sq: Vec<_> = [0.2, 0.1, 0.05].iter().map(|&h| (h, 3.0 * h * h)).collect();
        assert!((estimate_convergence_order(&sq).unwrap() - 2.0).abs() <= 1e-9);
        let lin: Vec<_> = [0.2, 0.1, 0.05, 0.025]
            .iter()
            .map(|&h| (h, 0.7 * h))
            .collect();
        assert!((estimate_convergence_order(&lin).unwrap() - 1.0).abs() <= 1e-9);
        assert!(estimate_convergence_order(&sq[..2]).is_err());
        assert!(estimate_convergence_order(&[(0.1, 1.0), (0.2, 0.0), (0.3, 1.0)]).is_err());
    }

    #[test]
    fn sigma_estimate_from_differences() {
        let p = TargetTracking::standard();
        for order in 1..=3 {
            let est = estimate_sigma(|t| p.target(t), order, 0.0, 60.0, 1e-2).unwrap();
            let exact = p.sigma(order).unwrap();
            assert!(
                est <= exact * 1.01 && est >= 0.9 * exact,
                "p={order}: {est} vs {exact}"
            );
        }
    }

    #[test]
    fn report_for_toy_problem() {
        let cfg = SolverConfig::new(0.1, 7, Velocity::Finite(20.0), 1.0 / 1.2, 30).unwrap();
        let r = theory_report(&ToyProblem::new(), &cfg);
        assert_eq!(r.get("C_strongly_convex"), Some(27.0));
        assert!((r.get("theta1").unwrap() - 5.0 / 6.0).abs() < 1e-15);
        assert_eq!(r.get("sigma_1"), Some(5.0));
        assert!((r.get("v_min").unwrap() - 16.4).abs() <= 0.5);
        assert!(r.get("sigma_7").is_none());
        assert!(r.get("nonconvex_grad_bound").is_none());
        assert!(r.entries.iter().all(|e| !e.source.is_empty()));
        let table = r.to_table();
        assert!(table.contains("C_strongly_convex"));
        assert!(table.contains("unavailable"));
    }

    #[test]
    fn report_for_tracking_problem() {
        let cfg = SolverConfig::new(0.1, 7, Velocity::Finite(10.0), 0.5, 1).unwrap();
        let p = TargetTracking::standard();
        let r = theory_report(&p, &cfg);
        assert_eq!(r.get("theta1"), Some(0.0));
        assert_eq!(r.get("C_strongly_convex"), Some(1.0));
        let v = r.get("v_min").unwrap();
        let s1 = p.sigma(1).unwrap();
        assert!(v >= s1 && v - s1 < 1e-6, "{v} vs {s1}");
        assert!(close(
            r.get("asymptotic_error_bound").unwrap(),
            7.83e-9,
            5e-3
        ));
        assert!(r.get("dominant_root").is_none());
        assert!(r.get("pl_distance_bound").is_some());
    }

    #[test]
    fn report_without_mu_marks_sections_unavailable() {
        let cfg = SolverConfig::new(0.1, 7, Velocity::Finite(10.0), 0.5, 30).unwrap();
        let p = crate::problems::RobustRegression::new(10, 100, 1).unwrap();
        let r = theory_report(&p, &cfg);
        for q in ["theta1", "C_strongly_convex", "C_pl", "v_min"] {
            let e = r.entry(q).unwrap();
            assert!(e.value.is_err(), "{q}");
        }
        let csv = r.to_csv();
        assert!(csv.starts_with("quantity,value,source,inputs,note\n"));
        for line in csv.lines() {
            assert_eq!(line.split(',').count(), 5, "{line}");
        }
    }

    proptest! {
        #[test]
        fn recursion_limit_is_asymptotic_bound(
            big_p in 1usize..=5,
            p_frac in 0.0f64..=1.0,
            gamma_frac in 0.0f64..0.9,
            sigma in 0.0f64..10.0,
            h in 0.01f64..0.5,
            init in proptest::collection::vec(0.0f64..10.0, 5),
        ) {
            let p = 1 + ((big_p - 1) as f64 * p_frac).round() as usize;
            let gamma = gamma_frac / pow2_minus_one(big_p);
            let limit = asymptotic_bound(big_p, p, gamma, sigma, h).unwrap();
            let seq = iterate_error_recursion(big_p, p, gamma, sigma, h, &init[..big_p], 4000).unwrap();
            let last = *seq.last().unwrap();
            prop_assert!((last - limit).abs() <= 1e-9 * limit.max(1.0), "{} vs {}", last, limit);
        }

        #[test]
        fn strongly_convex_prescription_meets_gamma_condition(
            big_p in 1usize..=12,
            mu in 0.01f64..1.0,
            ratio in 1.0f64..50.0,
            alpha_frac in 0.01f64..0.99,
        ) {
            let l = mu * ratio;
            let alpha = alpha_frac * 2.0 / l;
            let c = prescribe_c_strongly_convex(big_p, mu, l, alpha).unwrap();
            let th = theta1(mu, l, alpha);
            prop_assert!(th.powi(c as i32) < 1.0 / pow2_minus_one(big_p));
            if c > 1 {
                prop_assert!(th.powi(c as i32 - 1) >= 1.0 / pow2_minus_one(big_p) * (1.0 - 1e-9));
            }
        }

        #[test]
        fn velocity_prescription_matches_bisection(
            p in 2usize..=7,
            gamma_frac in 0.0f64..0.95,
            s1 in 0.0f64..10.0,
            sp in 0.0f64..10.0,
            h in 0.01f64..0.5,
            e0 in 0.0f64..10.0,
            extra in 0usize..50,
        ) {
            let gamma = gamma_frac / pow2_minus_one(p);
            let dk = p + extra;
            let v = prescribe_v(p, gamma, s1, sp, h, e0, dk).unwrap();
            let oracle = v_by_bisection(p, gamma, s1, sp, h, e0, dk);
            prop_assert!((v - oracle).abs() <= 1e-7 * v.max(1.0), "{} vs {}", v, oracle);
        }

        #[test]
        fn triangle_inequalities_for_sets(seed in any::<u64>()) {
            let mut rng = SplitMix64::new(seed);
            let mut pt = || Vector::from_fn(2, |_| 5.0 * rng.next_symmetric());
            let x = pt();
            let y = pt();
            let a: Vec<Vector> = (0..3).map(|_| pt()).collect();
            let b: Vec<Vector> = (0..4).map(|_| pt()).collect();
            let eps = 1e-12;
            prop_assert!(distance_to_set(&x, &b) <= x.distance(&y) + distance_to_set(&y, &b) + eps);
            prop_assert!(distance_to_set(&x, &b) <= distance_to_set(&x, &a) + hausdorff_distance(&a, &b) + eps);
        }
    }
}

use std::fmt;

use crate::binomial::MAX_BINOMIAL_N;
use crate::error::{Error, Result};

/// Upper limit on the step length a prediction may take per unit time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Velocity {
    Finite(f64),
    /// Gate disabled; the highest order is always used.
    Unbounded,
}

impl Velocity {
    pub fn is_finite(self) -> bool {
        matches!(self, Velocity::Finite(_))
    }

    /// Largest admissible step `v * h`, or `None` when unbounded.
    pub fn max_step(self, h: f64) -> Option<f64> {
        match self {
            Velocity::Finite(v) => Some(v * h),
            Velocity::Unbounded => None,
        }
    }
}

impl fmt::Display for Velocity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Velocity::Finite(v) => write!(f, "{v}"),
            Velocity::Unbounded => f.write_str("inf"),
        }
    }
}

/// Parameters of one prediction-correction run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    h: f64,
    max_order: usize,
    velocity: Velocity,
    alpha: f64,
    corrections: usize,
}

impl SolverConfig {
    /// Validates and builds a configuration.
    ///
    /// `h` is the sampling period, `max_order` the highest extrapolation
    /// order (at most 30), `alpha` the gradient step and `corrections` the
    /// number of gradient steps per round.
    pub fn new(
        h: f64,
        max_order: usize,
        velocity: Velocity,
        alpha: f64,
        corrections: usize,
    ) -> Result<Self> {
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::invalid(
                "h",
                format!("must be finite and > 0, got {h}"),
            ));
        }
        if max_order == 0 || max_order > MAX_BINOMIAL_N as usize {
            return Err(Error::invalid(
                "P",
                format!("must be in 1..={MAX_BINOMIAL_N}, got {max_order}"),
            ));
        }
        if let Velocity::Finite(v) = velocity {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::invalid(
                    "v",
                    format!("must be >= 0 or unbounded, got {v}"),
                ));
            }
        }
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::invalid(
                "alpha",
                format!("must be finite and > 0, got {alpha}"),
            ));
        }
        if corrections == 0 {
            return Err(Error::invalid("C", "must be at least 1"));
        }
        Ok(SolverConfig {
            h,
            max_order,
            velocity,
            alpha,
            corrections,
        })
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn velocity(&self) -> Velocity {
        self.velocity
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn corrections(&self) -> usize {
        self.corrections
    }

    pub fn with_max_order(self, max_order: usize) -> Result<Self> {
        SolverConfig::new(
            self.h,
            max_order,
            self.velocity,
            self.alpha,
            self.corrections,
        )
    }

    pub fn with_velocity(self, velocity: Velocity) -> Result<Self> {
        SolverConfig::new(
            self.h,
            self.max_order,
            velocity,
            self.alpha,
            self.corrections,
        )
    }
}

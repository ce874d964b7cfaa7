//! Prediction-correction solvers for time-varying optimization.
//!
//! A run samples `f(x; t)` at `t_k = k h`. Each round extrapolates the
//! past corrected iterates with the largest order that keeps the step
//! within `v h` of the last iterate, then runs a fixed number of gradient
//! steps on the newly sampled function.
//!
//! ```
//! use tvopt::{run, AlgorithmChoice, SolverConfig, TargetTracking, Vector, Velocity};
//!
//! let problem = TargetTracking::standard();
//! let config = SolverConfig::new(0.1, 7, Velocity::Finite(10.0), 0.5, 1).unwrap();
//! let x0 = Vector::zeros(2);
//! let result = run(&problem, &AlgorithmChoice::Sharp(config), &x0, 400).unwrap();
//! let last = result.trace.last().unwrap();
//! assert!(last.tracking_error.unwrap() < 1e-6);
//! ```

pub mod analysis;
pub mod binomial;
pub mod config;
pub mod corrector;
pub mod error;
pub mod history;
pub mod predictor;
pub mod problems;
pub mod rng;
pub mod solver;
pub mod trace;
pub mod vector;

pub use config::{SolverConfig, Velocity};
pub use corrector::{gd_correct, Corrector, GradientDescent};
pub use error::{Error, Result};
pub use history::History;
pub use predictor::{predict, select_order, Selection};
pub use problems::{
    ProblemConstants, RobustRegression, TargetTracking, TimeVaryingProblem, ToyProblem,
};
pub use solver::{run, AlgorithmChoice, BaselineConfig, RunResult, RunStatus};
pub use trace::TraceRecord;
pub use vector::Vector;

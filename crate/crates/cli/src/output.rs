//! Trace and summary CSV files.
//!
//! Trace columns: `k,t,p_accepted,step_norm,grad_norm_pred,tracking_error,
//! f_gap,x_hat_0..x_hat_{n-1},x_corr_0..x_corr_{n-1}`. Floats use 17
//! significant digits so every value reads back bit for bit; metrics the
//! problem cannot provide are empty fields.

use std::fmt::Write as _;

use tvopt::{RunResult, RunStatus, TraceRecord, Vector};

use crate::config::RunSpec;

const FIXED_COLUMNS: [&str; 7] = [
    "k",
    "t",
    "p_accepted",
    "step_norm",
    "grad_norm_pred",
    "tracking_error",
    "f_gap",
];

pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_float).unwrap_or_default()
}

pub fn trace_header(dim: usize) -> String {
    let mut cols: Vec<String> = FIXED_COLUMNS.iter().map(|s| s.to_string()).collect();
    cols.extend((0..dim).map(|i| format!("x_hat_{i}")));
    cols.extend((0..dim).map(|i| format!("x_corr_{i}")));
    cols.join(",")
}

pub fn write_trace(trace: &[TraceRecord], dim: usize) -> String {
    let mut out = trace_header(dim);
    out.push('\n');
    for r in trace {
        let mut fields = vec![
            r.k.to_string(),
            fmt_float(r.t),
            r.p_accepted.map(|p| p.to_string()).unwrap_or_default(),
            fmt_float(r.step_norm),
            fmt_float(r.grad_norm_at_prediction),
            fmt_opt(r.tracking_error),
            fmt_opt(r.f_gap),
        ];
        fields.extend(r.x_hat.iter().map(|&x| fmt_float(x)));
        fields.extend(r.x_corrected.iter().map(|&x| fmt_float(x)));
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("trace line {line}: {message}")]
pub struct TraceParseError {
    pub line: usize,
    pub message: String,
}

/// Reads a trace written by [`write_trace`].
pub fn read_trace(text: &str) -> Result<Vec<TraceRecord>, TraceParseError> {
    let fail = |line: usize, message: String| TraceParseError { line, message };
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| fail(1, "empty file".into()))?;
    let cols: Vec<&str> = header.split(',').collect();
    let extra = cols.len().checked_sub(FIXED_COLUMNS.len()).unwrap_or(1);
    if cols[..FIXED_COLUMNS.len().min(cols.len())] != FIXED_COLUMNS[..]
        || extra == 0
        || !extra.is_multiple_of(2)
    {
        return Err(fail(1, format!("unexpected header `{header}`")));
    }
    let dim = extra / 2;
    if header != trace_header(dim) {
        return Err(fail(1, format!("unexpected header `{header}`")));
    }
    let mut records = Vec::new();
    for (idx, row) in lines.enumerate() {
        let line = idx + 2;
        let fields: Vec<&str> = row.split(',').collect();
        if fields.len() != cols.len() {
            return Err(fail(
                line,
                format!("expected {} fields, found {}", cols.len(), fields.len()),
            ));
        }
        let num = |i: usize| -> Result<f64, TraceParseError> {
            fields[i].parse::<f64>().map_err(|_| {
                fail(
                    line,
                    format!("column {}: cannot parse `{}`", cols[i], fields[i]),
                )
            })
        };
        let opt = |i: usize| -> Result<Option<f64>, TraceParseError> {
            if fields[i].is_empty() {
                Ok(None)
            } else {
                num(i).map(Some)
            }
        };
        let vector = |start: usize| -> Result<Vector, TraceParseError> {
            let xs = (start..start + dim)
                .map(num)
                .collect::<Result<Vec<_>, _>>()?;
            Vector::new(xs).map_err(|e| fail(line, e.to_string()))
        };
        records.push(TraceRecord {
            k: fields[0]
                .parse()
                .map_err(|_| fail(line, format!("column k: cannot parse `{}`", fields[0])))?,
            t: num(1)?,
            p_accepted: if fields[2].is_empty() {
                None
            } else {
                Some(fields[2].parse().map_err(|_| {
                    fail(
                        line,
                        format!("column p_accepted: cannot parse `{}`", fields[2]),
                    )
                })?)
            },
            step_norm: num(3)?,
            grad_norm_at_prediction: num(4)?,
            tracking_error: opt(5)?,
            f_gap: opt(6)?,
            x_hat: vector(7)?,
            x_corrected: vector(7 + dim)?,
        });
    }
    Ok(records)
}

pub const SUMMARY_HEADER: &str = "run,algorithm,problem,h,P,v,alpha,C,rounds,status,recorded_rounds,final_tracking_error,mean_tracking_error_last_quarter,mean_grad_norm_pred";

fn mean(xs: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    (n > 0).then(|| sum / n as f64)
}

/// One summary row. Wall time is left out so the file is reproducible.
pub fn summary_row(spec: &RunSpec, problem: &str, result: &RunResult) -> String {
    let status = match &result.status {
        RunStatus::Completed => "completed".to_string(),
        RunStatus::Aborted { round, reason } => {
            format!(
                "aborted at round {round}: {}",
                reason.to_string().replace([',', '\n'], ";")
            )
        }
    };
    let (p, v) = match &spec.sharp_parameters {
        Some(sp) => (sp.max_order.to_string(), sp.velocity.to_string()),
        None => (String::new(), String::new()),
    };
    let trace = &result.trace;
    let errors: Vec<f64> = trace.iter().filter_map(|r| r.tracking_error).collect();
    let final_error = if errors.len() == trace.len() {
        errors.last().copied()
    } else {
        None
    };
    let quarter = if errors.len() == trace.len() && !errors.is_empty() {
        mean(errors[3 * errors.len() / 4..].iter().copied())
    } else {
        None
    };
    let mut row = String::new();
    let _ = write!(
        row,
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
        spec.label,
        spec.algorithm.name(),
        problem,
        spec.h,
        p,
        v,
        spec.alpha,
        spec.corrections,
        spec.rounds,
        status,
        trace.len(),
        fmt_opt(final_error),
        fmt_opt(quarter),
        fmt_opt(mean(trace.iter().map(|r| r.grad_norm_at_prediction))),
    );
    row
}

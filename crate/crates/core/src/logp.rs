//! Probabilities carried in both linear and natural-log form.
//!
//! Payloads such as `(N-2)!/(N-log N)!` or `1/3^40` leave the range of `f64`
//! long before the log value does, so the log value is authoritative and the
//! linear value is reported as 0 once it drops below [`UNDERFLOW_FLOOR`].

use serde::{Deserialize, Serialize};

pub const UNDERFLOW_FLOOR: f64 = 1e-300;

/// `ln(sum(exp(x)))` without overflow. Empty input yields `-inf`.
pub fn log_sum_exp<I>(values: I) -> f64
where
    I: IntoIterator<Item = f64>,
{
    let values: Vec<f64> = values.into_iter().collect();
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if max == f64::INFINITY {
        return f64::INFINITY;
    }
    let sum: f64 = values.iter().map(|v| (v - max).exp()).sum();
    max + sum.ln()
}

/// Linear value for `ln`, flushed to 0 below the underflow floor.
pub fn linear_or_zero(ln: f64) -> f64 {
    let x = ln.exp();
    if x < UNDERFLOW_FLOOR {
        0.0
    } else {
        x
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Prob {
    pub linear: f64,
    pub ln: f64,
}

impl Prob {
    pub fn from_ln(ln: f64) -> Self {
        Prob {
            linear: linear_or_zero(ln),
            ln,
        }
    }

    pub fn from_linear(x: f64) -> Self {
        Prob {
            linear: if x < UNDERFLOW_FLOOR { 0.0 } else { x },
            ln: x.ln(),
        }
    }

    pub fn underflows(&self) -> bool {
        self.linear == 0.0 && self.ln.is_finite()
    }
}

/// Relative difference `|a - b| / max(|a|, |b|)`, 0 when both are 0.
pub fn rel_diff(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// Relative difference of two positive quantities given in log form.
pub fn rel_diff_ln(ln_a: f64, ln_b: f64) -> f64 {
    if ln_a == f64::NEG_INFINITY && ln_b == f64::NEG_INFINITY {
        return 0.0;
    }
    // |a-b|/max(a,b) = 1 - exp(-|ln a - ln b|)
    -(-(ln_a - ln_b).abs()).exp_m1()
}

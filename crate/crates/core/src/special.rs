//! Entropy-type scalar functions. The unchecked forms return NaN outside their
//! domain; the `checked_*` forms report a domain error instead.

use crate::error::{Error, Result};

/// `g(x) = (x+1) ln(x+1) - x ln x` for `x >= 0`, the entropy of a one-mode
/// thermal state with mean occupation `x`.
pub fn g(x: f64) -> f64 {
    if x < 0.0 {
        return f64::NAN;
    }
    if x == 0.0 {
        return 0.0;
    }
    x * (1.0 / x).ln_1p() + x.ln_1p()
}

/// Binary entropy in nats, `h2(p) = eta(p) + eta(1-p)` on `[0, 1]`.
pub fn h2(p: f64) -> f64 {
    if !(0.0..=1.0).contains(&p) {
        return f64::NAN;
    }
    eta(p) + eta(1.0 - p)
}

/// `eta(x) = -x ln x`, with `eta(0) = 0`.
pub fn eta(x: f64) -> f64 {
    if x < 0.0 {
        f64::NAN
    } else if x == 0.0 {
        0.0
    } else {
        -x * x.ln()
    }
}

fn checked(name: &str, x: f64, v: f64) -> Result<f64> {
    if v.is_nan() {
        Err(Error::domain(format!("{name}({x}) is outside the domain")))
    } else {
        Ok(v)
    }
}

pub fn checked_g(x: f64) -> Result<f64> {
    checked("g", x, g(x))
}

pub fn checked_h2(p: f64) -> Result<f64> {
    checked("h2", p, h2(p))
}

pub fn checked_eta(x: f64) -> Result<f64> {
    checked("eta", x, eta(x))
}

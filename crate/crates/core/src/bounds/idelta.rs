use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Grid size of the sign-change scan.
pub const SCAN_POINTS: usize = 10_000;
pub const DEFAULT_TOL: f64 = 1e-12;

fn xlnx(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        t * t.ln()
    }
}

/// Log of the product in the definition of `I_δ(x)`; positive exactly when
/// the product exceeds one.
pub fn i_delta_log_product(delta: f64, x: f64, y: f64) -> f64 {
    (1.0 - 1.0 / delta) * (xlnx(x) + xlnx(1.0 - x))
        - 0.5 * xlnx(1.0 - x - y)
        - 0.5 * xlnx(x - y)
        - xlnx(y)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IDelta {
    pub value: f64,
    /// No sign change on `(0, x]`; `value` is then `x`.
    pub saturated: bool,
}

/// `I_δ(x) = inf{0 < y <= x : product > 1}`: first upward sign change of
/// the log product on a uniform scan, refined by bisection.
pub fn i_delta(delta: f64, x: f64, tol: f64) -> Result<IDelta> {
    if !(delta > 1.0) {
        return Err(Error::InvalidParameter(format!(
            "I_delta needs delta > 1, got {delta}"
        )));
    }
    if !(x > 0.0 && x <= 0.5) {
        return Err(Error::InvalidParameter(format!(
            "I_delta needs x in (0, 1/2], got {x}"
        )));
    }
    let f = |y: f64| i_delta_log_product(delta, x, y);
    if f(0.0) > 0.0 {
        return Ok(IDelta {
            value: 0.0,
            saturated: false,
        });
    }
    let mut prev = 0.0;
    for k in 1..=SCAN_POINTS {
        let y = x * k as f64 / SCAN_POINTS as f64;
        if f(y) > 0.0 {
            let (mut lo, mut hi) = (prev, y);
            while hi - lo > tol {
                let mid = 0.5 * (lo + hi);
                if f(mid) > 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return Ok(IDelta {
                value: hi,
                saturated: false,
            });
        }
        prev = y;
    }
    Ok(IDelta {
        value: x,
        saturated: true,
    })
}

/// `I_δ(x)` at the default tolerance; saturation is an error.
pub fn i_delta_value(delta: f64, x: f64) -> Result<f64> {
    let r = i_delta(delta, x, DEFAULT_TOL)?;
    if r.saturated {
        return Err(Error::Numeric(format!(
            "I_delta({delta}, {x}) found no sign change"
        )));
    }
    Ok(r.value)
}

/// `(1 − x) − (1 − x)^{2(1 − 1/δ)}`, an upper bound for `I_δ(x)`.
pub fn i_delta_upper(delta: f64, x: f64) -> f64 {
    (1.0 - x) - (1.0 - x).powf(2.0 * (1.0 - 1.0 / delta))
}

//! Real branches of the Lambert W function, used for the `a = 0` limit.

use crate::error::{Error, Result};
use crate::param::BranchId;

// 1/e split into a leading double and the rounding remainder, so that
// x + 1/e is accurate next to the branch point.
const INV_E_HI: f64 = 0.367_879_441_171_442_33;
const INV_E_LO: f64 = -1.242_875_367_278_836_3e-17;

const MAX_ITER: usize = 64;

/// `W_0(x)` for `x >= -1/e` or `W_{-1}(x)` for `-1/e <= x < 0`.
///
/// Halley iteration on `w e^w - x` from a piecewise initial guess; the
/// square-root series about `(-1/e, -1)` seeds both branches near the
/// branch point.
pub fn lambert_w(branch: BranchId, x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::Domain("x is NaN".into()));
    }
    let shifted = (x + INV_E_HI) + INV_E_LO;
    if shifted < 0.0 {
        if shifted > -4.0 * f64::EPSILON * INV_E_HI {
            return Ok(-1.0);
        }
        return Err(Error::Domain(format!("x = {x} < -1/e")));
    }
    match branch {
        BranchId::Principal => {
            if x == 0.0 {
                return Ok(0.0);
            }
            if x == f64::INFINITY {
                return Ok(f64::INFINITY);
            }
        }
        BranchId::Lower => {
            if x >= 0.0 {
                return Err(Error::Domain(format!(
                    "x = {x} outside [-1/e, 0) for the lower branch"
                )));
            }
        }
    }

    let p = (2.0 * std::f64::consts::E * shifted).sqrt();
    let sign = match branch {
        BranchId::Principal => 1.0,
        BranchId::Lower => -1.0,
    };
    if p < 1e-6 {
        let p = sign * p;
        return Ok(-1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p);
    }
    let mut w = if p < 0.5 {
        let p = sign * p;
        -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0 + p * (-43.0 / 540.0))))
    } else {
        match branch {
            BranchId::Principal => {
                // Winitzki's approximation
                let l = x.ln_1p();
                l * (1.0 - l.ln_1p() / (2.0 + l))
            }
            BranchId::Lower => {
                let l1 = (-x).ln();
                let l2 = (-l1).ln();
                l1 - l2 + l2 / l1
            }
        }
    };

    for _ in 0..MAX_ITER {
        let ew = w.exp();
        let r = w * ew - x;
        let wp1 = w + 1.0;
        let denom = ew * wp1 - (w + 2.0) * r / (2.0 * wp1);
        let step = r / denom;
        if !step.is_finite() {
            break;
        }
        let next = w - step;
        if (next - w).abs() <= 4.0 * f64::EPSILON * next.abs().max(1e-300) {
            return Ok(next);
        }
        w = next;
    }
    // Halley stalls only in the last ulp; accept if the residual is tight.
    let r = w * w.exp() - x;
    if r.abs() <= 1e-13 * x.abs().max(f64::MIN_POSITIVE) {
        Ok(w)
    } else {
        Err(Error::NoConvergence {
            iterations: MAX_ITER,
            context: format!("lambert_w({branch:?}, {x})"),
        })
    }
}

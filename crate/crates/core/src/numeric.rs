//! Small floating-point kernels shared by the evaluators.

use crate::error::{Error, Result};

/// `log(1 - exp(-t))` for `t > 0`, accurate for both small and large `t`.
pub(crate) fn log1mexp(t: f64) -> f64 {
    if t <= std::f64::consts::LN_2 {
        (-(-t).exp_m1()).ln()
    } else {
        (-(-t).exp()).ln_1p()
    }
}

/// `log(exp(t) - 1)` for `t > 0` without overflow for large `t`.
pub(crate) fn ln_expm1(t: f64) -> f64 {
    if t > 30.0 {
        t + (-(-t).exp()).ln_1p()
    } else {
        t.exp_m1().ln()
    }
}

/// Round to the nearest integer, ties to even.
pub(crate) fn round_half_even(v: f64) -> f64 {
    let r = v.round();
    if (v - v.trunc()).abs() == 0.5 && r % 2.0 != 0.0 {
        r - v.signum()
    } else {
        r
    }
}

/// Compensated (Neumaier) running sum.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub(crate) fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Direction of a monotone function on a bracket.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Monotone {
    Increasing,
    Decreasing,
}

/// Newton iteration kept inside a sign-change bracket; any step that leaves
/// the bracket (or a non-finite step) is replaced by bisection.
///
/// `g` returns `(value, derivative)`. The bracket must satisfy
/// `g(lo) <= 0 <= g(hi)` for an increasing `g` (reversed for decreasing).
pub(crate) fn newton_bisect<F>(
    mut g: F,
    mut lo: f64,
    mut hi: f64,
    start: f64,
    shape: Monotone,
    max_iter: usize,
    context: &str,
) -> Result<f64>
where
    F: FnMut(f64) -> (f64, f64),
{
    debug_assert!(lo <= hi);
    let mut x = if start > lo && start < hi {
        start
    } else {
        0.5 * (lo + hi)
    };
    for _ in 0..max_iter {
        let (gx, dg) = g(x);
        if gx == 0.0 {
            return Ok(x);
        }
        if gx.is_nan() {
            return Err(Error::NoConvergence {
                iterations: 0,
                context: format!("{context}: residual is NaN at {x}"),
            });
        }
        let above = gx > 0.0;
        match (above, shape) {
            (true, Monotone::Increasing) | (false, Monotone::Decreasing) => hi = x,
            _ => lo = x,
        }
        let mut next = x - gx / dg;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        let scale = x.abs().max(next.abs());
        if (next - x).abs() <= 2.0 * f64::EPSILON * scale || (next - x).abs() < f64::MIN_POSITIVE {
            return Ok(next);
        }
        if hi - lo <= 2.0 * f64::EPSILON * lo.abs().max(hi.abs()) {
            return Ok(next);
        }
        x = next;
    }
    Err(Error::NoConvergence {
        iterations: max_iter,
        context: context.to_string(),
    })
}

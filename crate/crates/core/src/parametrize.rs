//! Exact parametrizations of the branches.
//!
//! * β-form: for `β > 1`, `x = (β^{1+a} - β^{1-a})/2` has `ψ₀(a,x) = log β`.
//! * α-form: for `α > 1` both branches share the argument
//!   `x = ½((α^{1+a}-α^{2a})/(α^{1+a}-1))^{(1-a)/2a}·(1-α^{2a})/(α^{1+a}-1)`,
//!   with `ψ₋₁ = log((α^{1-a}-1)/(α^{1+a}-1))/(2a)` and `ψ₀ = log α + ψ₋₁`.
//!
//! Internally everything is written in `u = log α`, which keeps the
//! `α → 1` limit (the branch point) free of 0/0 forms.

use crate::error::{Error, Result};
use crate::numeric::{ln_expm1, log1mexp};
use crate::param::{sinh_exp, AsymmetryParam, ParamKind};

/// A point where both branches are known simultaneously.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaPoint {
    pub alpha: f64,
    pub x: f64,
    pub psi0: f64,
    pub psi1: f64,
}

// D(t) = log(1 - e^{-t}); derivatives in terms of q = e^{-t}, s = 1 - q.
fn qs(t: f64) -> (f64, f64) {
    ((-t).exp(), -(-t).exp_m1())
}

fn d1(t: f64) -> f64 {
    let (q, s) = qs(t);
    q / s
}

fn d2(t: f64) -> f64 {
    let (q, s) = qs(t);
    -q / (s * s)
}

fn d3(t: f64) -> f64 {
    let (q, s) = qs(t);
    q * (1.0 + q) / (s * s * s)
}

fn d4(t: f64) -> f64 {
    let (q, s) = qs(t);
    -q * (1.0 + q * (4.0 + q)) / (s * s * s * s)
}

fn d5(t: f64) -> f64 {
    let (q, s) = qs(t);
    q * (1.0 + q * (11.0 + q * (11.0 + q))) / (s * s * s * s * s)
}

// log((1 - e^{-t})/t), smooth at t = 0
fn d_regular(t: f64) -> f64 {
    (-(-t).exp_m1() / t).ln()
}

fn use_series(a: f64, u: f64) -> bool {
    a < 1e-3 && a * u < 5e-3
}

/// ψ₀ as a function of `u = log α > 0`.
///
/// For small `a` the difference quotient in `a` is replaced by its central
/// Taylor expansion, which tends to the Lambert parametrization `-u/(e^u-1)`.
/// For small `u` the logarithmic singularity of both terms is split off.
pub(crate) fn upper_of_log_alpha(a: f64, u: f64) -> f64 {
    if use_series(a, u) {
        let a2u2 = a * a * u * u;
        -u * (d1(u) + a2u2 / 6.0 * d3(u) + a2u2 * a2u2 / 120.0 * d5(u))
    } else if u < 1.0 {
        (minimizer_log(a) + d_regular((1.0 - a) * u) - d_regular((1.0 + a) * u)) / (2.0 * a)
    } else {
        (log1mexp((1.0 - a) * u) - log1mexp((1.0 + a) * u)) / (2.0 * a)
    }
}

fn minimizer_log(a: f64) -> f64 {
    (-2.0 * a / (1.0 + a)).ln_1p()
}

/// `d ψ₀ / du`.
pub(crate) fn upper_of_log_alpha_prime(a: f64, u: f64) -> f64 {
    if use_series(a, u) {
        let u2 = u * u;
        -d1(u) - u * d2(u) - a * a / 6.0 * (3.0 * u2 * d3(u) + u2 * u * d4(u))
    } else {
        ((1.0 - a) * d1((1.0 - a) * u) - (1.0 + a) * d1((1.0 + a) * u)) / (2.0 * a)
    }
}

/// The shared argument `x(α)` evaluated from the parametrization formula in
/// log form.
pub(crate) fn argument_of_log_alpha(a: f64, u: f64) -> f64 {
    let ln_den = ln_expm1((1.0 + a) * u);
    let ln_ratio1 = 2.0 * a * u + ln_expm1((1.0 - a) * u) - ln_den;
    let ln_ratio2 = ln_expm1(2.0 * a * u) - ln_den;
    -0.5 * ((1.0 - a) / (2.0 * a) * ln_ratio1 + ln_ratio2).exp()
}

/// β-parametrization of the principal branch for `x > 0`.
pub fn param_beta(a: AsymmetryParam, beta: f64) -> Result<(f64, f64)> {
    if a.kind() == ParamKind::ZeroLimit {
        return Err(Error::Unsupported("ψ is not defined at a = 0".into()));
    }
    if !(beta > 1.0) || !beta.is_finite() {
        return Err(Error::Domain(format!("beta must be > 1, got {beta}")));
    }
    let w = beta.ln();
    let x = sinh_exp(a.value(), w);
    if !x.is_finite() {
        return Err(Error::Range(format!("x overflows for beta = {beta}")));
    }
    Ok((x, w))
}

/// Simultaneous parametrization of both branches on `[L_a, 0)`.
pub fn param_alpha(a: AsymmetryParam, alpha: f64) -> Result<AlphaPoint> {
    if !(alpha > 1.0) || alpha.is_nan() {
        return Err(Error::Domain(format!("alpha must be > 1, got {alpha}")));
    }
    let u = if alpha < 2.0 {
        (alpha - 1.0).ln_1p()
    } else {
        alpha.ln()
    };
    let mut p = param_log_alpha(a, u)?;
    p.alpha = alpha;
    Ok(p)
}

/// Same as [`param_alpha`] with the parameter given as `u = log α > 0`,
/// which reaches values of `α` beyond the double range.
pub fn param_log_alpha(a: AsymmetryParam, u: f64) -> Result<AlphaPoint> {
    a.require_interior("param_alpha")?;
    if !(u > 0.0) || !u.is_finite() {
        return Err(Error::Domain(format!("log alpha must be > 0, got {u}")));
    }
    let av = a.value();
    let psi0 = upper_of_log_alpha(av, u);
    Ok(AlphaPoint {
        alpha: u.exp(),
        x: argument_of_log_alpha(av, u),
        psi0,
        psi1: psi0 - u,
    })
}

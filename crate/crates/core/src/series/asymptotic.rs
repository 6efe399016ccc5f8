//! Expansions of ψ₀ as `x → ∞` and of ψ₋₁ as `x → 0⁻`, and the two-sided
//! bounds around their logarithmic leading terms.
//!
//! Writing `ψ₀ = log(2x)/(1+a) + φ` turns `f(a,ψ₀) = x` into
//! `e^{2aφ} - e^{(a-1)φ} = Y` with `Y = (2x)^{-2a/(1+a)}`, so `φ(Y)` is the
//! inverse of an entire function with derivatives `(2a)^k - (a-1)^k` at 0.
//! The lower branch near 0 gives the same equation with `a → -a` in
//! `Z = (-2x)^{2a/(1-a)}`.

use super::{lagrange_inversion, SeriesExpansion, SeriesKind, Transform};
use crate::error::{Error, Result};
use crate::param::{AsymmetryParam, BranchId};

pub const MAX_PSI0_TERMS: usize = 4;
pub const MAX_PSI1_TERMS: usize = 3;

fn coefficients(signed_a: f64, terms: usize) -> Vec<f64> {
    if terms == 0 {
        return Vec::new();
    }
    let beta: Vec<f64> = (1..=terms as i32)
        .map(|k| (2.0 * signed_a).powi(k) - (signed_a - 1.0).powi(k))
        .collect();
    let g = lagrange_inversion(&beta, terms);
    let mut fact = 1.0;
    g.iter()
        .enumerate()
        .map(|(i, gi)| {
            fact *= (i + 1) as f64;
            gi / fact
        })
        .collect()
}

/// The truncated expansion as a [`SeriesExpansion`]: `Principal` in
/// `Y = (2x)^{-2a/(1+a)}`, `Lower` in `Z = (-2x)^{2a/(1-a)}`.
pub fn asymptotic_series(a: AsymmetryParam, branch: BranchId, terms: usize) -> Result<SeriesExpansion> {
    a.require_interior("asymptotic expansion")?;
    let av = a.value();
    let (cap, kind, signed, transform, validity) = match branch {
        BranchId::Principal => (
            MAX_PSI0_TERMS,
            SeriesKind::AsymptoticPsi0,
            av,
            Transform::LargeArgument { a: av },
            (10.0, f64::INFINITY),
        ),
        BranchId::Lower => {
            let l = crate::param::constants_raw(av).l;
            (
                MAX_PSI1_TERMS,
                SeriesKind::AsymptoticPsi1,
                -av,
                Transform::SmallNegativeArgument { a: av },
                (0.01 * l, 0.0),
            )
        }
    };
    if terms > cap {
        return Err(Error::InvalidParameter(format!(
            "at most {cap} terms are available, got {terms}"
        )));
    }
    Ok(SeriesExpansion {
        kind,
        a,
        coeffs: coefficients(signed, terms),
        transform,
        validity,
    })
}

/// `log(2x)/(1+a) + Σ_{k<=terms} (g_k/k!) Y^k`, intended for large `x`.
pub fn asymptotic_psi0(a: AsymmetryParam, x: f64, terms: usize) -> Result<f64> {
    asymptotic_series(a, BranchId::Principal, terms)?.evaluate(x)
}

/// `log(-2x)/(1-a) + Σ_{k<=terms} (g_k/k!) Z^k`, intended for `x → 0⁻`.
pub fn asymptotic_psi1(a: AsymmetryParam, x: f64, terms: usize) -> Result<f64> {
    asymptotic_series(a, BranchId::Lower, terms)?.evaluate(x)
}

/// Smallest `x` from which [`psi0_bounds`] is guaranteed.
pub fn psi0_bounds_threshold(a: f64) -> f64 {
    let d = (1.0 / 3.0 - a).abs();
    0.5 * (1.0 + 1.0 / d.exp_m1()).powf((1.0 + a) / (2.0 * a))
}

/// Lower and upper bounds on ψ₀ for large `x`.
pub fn psi0_bounds(a: AsymmetryParam, x: f64) -> Result<(f64, f64)> {
    a.require_interior("psi0_bounds")?;
    if a.ratio() == Some((1, 3)) || a.value() == 1.0 / 3.0 {
        return Err(Error::Unsupported("the bounds exclude a = 1/3".into()));
    }
    let av = a.value();
    let threshold = psi0_bounds_threshold(av);
    if !(x >= threshold) {
        return Err(Error::Precondition(format!(
            "x = {x} is below the threshold {threshold}"
        )));
    }
    let lead = (2.0 * x).ln() / (1.0 + av);
    let y = (-2.0 * av * lead).exp();
    let (lo, hi) = if av < 1.0 / 3.0 {
        (1.0 / (1.0 + av), 2.0 / (1.0 + av))
    } else {
        (1.0 / (3.0 * (1.0 + av)), 1.0 / (1.0 + av))
    };
    Ok((lead + lo * y, lead + hi * y))
}

/// Left end of the interval on which [`psi1_bounds`] holds.
pub fn psi1_bounds_range_start(a: f64) -> f64 {
    -0.5 * ((1.0 - a) / (6.0 * a + 2.0)).powf((1.0 - a) / (2.0 * a))
}

/// Lower and upper bounds on ψ₋₁ near `0⁻`, plus the logarithmic lower
/// bound `log(-2x)/(1-a) - log(1 - Z)`.
pub fn psi1_bounds(a: AsymmetryParam, x: f64) -> Result<(f64, f64, f64)> {
    a.require_interior("psi1_bounds")?;
    let av = a.value();
    let start = psi1_bounds_range_start(av);
    if !(x >= start && x < 0.0) {
        return Err(Error::Precondition(format!(
            "x = {x} is outside [{start}, 0)"
        )));
    }
    let lead = (-2.0 * x).ln() / (1.0 - av);
    let z = (2.0 * av * lead).exp();
    Ok((
        lead + z / (1.0 - av),
        lead + 2.0 * z / (1.0 - av),
        lead - (-z).ln_1p(),
    ))
}

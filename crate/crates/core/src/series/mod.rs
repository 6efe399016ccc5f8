//! Series expansions of the branches: Taylor series at the origin,
//! square-root series at the branch point, and the large/small argument
//! expansions with their two-sided bounds.

mod asymptotic;
mod bell;
mod branch_point;

pub use asymptotic::{
    asymptotic_psi0, asymptotic_psi1, asymptotic_series, psi0_bounds, psi0_bounds_threshold,
    psi1_bounds, psi1_bounds_range_start, MAX_PSI0_TERMS, MAX_PSI1_TERMS,
};
pub use bell::{bell, BellTriangle};
pub use branch_point::{branch_point_series, BranchPointKind};

pub(crate) use bell::lagrange_inversion;

use crate::error::{Error, Result};
use crate::param::{constants_raw, AsymmetryParam};

pub const MAX_TAYLOR_ORDER: usize = 40;
pub const MAX_BRANCH_POINT_ORDER: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SeriesKind {
    TaylorAtZero,
    BranchPointPsi0,
    BranchPointPsi1,
    BranchPointOmega,
    AsymptoticPsi0,
    AsymptoticPsi1,
}

/// How the argument enters the series and what is added to the sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Transform {
    /// `Σ c_n x^n`, `n >= 1`.
    Identity,
    /// `M + Σ c_m t^{m/2}` with `t = (x - L)/K`.
    SqrtScaled { l: f64, k: f64, m: f64 },
    /// `M + Σ c_n t^n` with `t = z - M`.
    Shift { m: f64 },
    /// `log(2x)/(1+a) + Σ c_n Y^n` with `Y = (2x)^{-2a/(1+a)}`.
    LargeArgument { a: f64 },
    /// `log(-2x)/(1-a) + Σ c_n Z^n` with `Z = (-2x)^{2a/(1-a)}`.
    SmallNegativeArgument { a: f64 },
}

/// Coefficients of an expansion together with its argument map.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesExpansion {
    pub kind: SeriesKind,
    pub a: AsymmetryParam,
    /// `coeffs[i]` multiplies the `(i+1)`-th power of the transformed variable.
    pub coeffs: Vec<f64>,
    pub transform: Transform,
    /// Interval of the original argument where the expansion is meant to be used.
    pub validity: (f64, f64),
}

fn horner_from_first(coeffs: &[f64], t: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| (acc + c) * t)
}

impl SeriesExpansion {
    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    /// Evaluates the truncated series at the original argument.
    pub fn evaluate(&self, x: f64) -> Result<f64> {
        match self.transform {
            Transform::Identity => Ok(horner_from_first(&self.coeffs, x)),
            Transform::SqrtScaled { l, k, m } => {
                let t = (x - l) / k;
                if t < 0.0 {
                    return Err(Error::Domain(format!("x = {x} < L_a = {l}")));
                }
                Ok(m + horner_from_first(&self.coeffs, t.sqrt()))
            }
            Transform::Shift { m } => Ok(m + horner_from_first(&self.coeffs, x - m)),
            Transform::LargeArgument { a } => {
                if !(x > 0.0) {
                    return Err(Error::Domain(format!("x = {x} must be positive")));
                }
                let lead = (2.0 * x).ln() / (1.0 + a);
                let y = (-2.0 * a * lead).exp();
                Ok(lead + horner_from_first(&self.coeffs, y))
            }
            Transform::SmallNegativeArgument { a } => {
                if !(x < 0.0) {
                    return Err(Error::Domain(format!("x = {x} must be negative")));
                }
                let lead = (-2.0 * x).ln() / (1.0 - a);
                let z = (2.0 * a * lead).exp();
                Ok(lead + horner_from_first(&self.coeffs, z))
            }
        }
    }
}

/// Derivatives at 0 of `f(a,·)`: `f_n = ((1+a)^n - (1-a)^n)/2`, written as
/// the odd part of the binomial expansion to stay accurate for small `a`.
fn forward_derivatives(a: f64, count: usize) -> Vec<f64> {
    (1..=count)
        .map(|n| {
            let mut s = 0.0;
            let mut binom = 1.0;
            for i in 0..=n {
                if i > 0 {
                    binom = binom * (n - i + 1) as f64 / i as f64;
                }
                if i % 2 == 1 {
                    s += binom * a.powi(i as i32);
                }
            }
            s
        })
        .collect()
}

/// Taylor series of ψ₀ about `x = 0` by Lagrange inversion.
pub fn taylor_at_zero(a: AsymmetryParam, order: usize) -> Result<SeriesExpansion> {
    a.require_interior("taylor_at_zero")?;
    if order == 0 || order > MAX_TAYLOR_ORDER {
        return Err(Error::InvalidParameter(format!(
            "order must be in 1..={MAX_TAYLOR_ORDER}, got {order}"
        )));
    }
    let av = a.value();
    let g = lagrange_inversion(&forward_derivatives(av, order), order);
    let mut fact = 1.0;
    let coeffs = g
        .iter()
        .enumerate()
        .map(|(i, gi)| {
            fact *= (i + 1) as f64;
            gi / fact
        })
        .collect();
    let l = constants_raw(av).l;
    Ok(SeriesExpansion {
        kind: SeriesKind::TaylorAtZero,
        a,
        coeffs,
        transform: Transform::Identity,
        validity: (l, -l),
    })
}

/// `[ψ₀(0), ψ₀'(0), ψ₀''(0), ψ₀'''(0)]` from the Lagrange inversion.
pub fn derivative_series_check(a: AsymmetryParam) -> Result<Vec<f64>> {
    a.require_interior("derivative_series_check")?;
    let g = lagrange_inversion(&forward_derivatives(a.value(), 3), 3);
    Ok(vec![0.0, g[0], g[1], g[2]])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::branches::{psi, PsiQuery};
    use crate::param::BranchId;

    fn a_of(v: f64) -> AsymmetryParam {
        AsymmetryParam::new(v).unwrap()
    }

    #[test]
    fn first_terms() {
        for &a in &[0.1, 0.5, 0.9] {
            let s = taylor_at_zero(a_of(a), 3).unwrap();
            assert!((s.coeffs[0] - 1.0 / a).abs() < 1e-14 / a);
            assert!((s.coeffs[1] + 1.0 / (a * a)).abs() < 1e-13 / (a * a));
            let c3 = -(a * a - 9.0) / (6.0 * a * a * a);
            assert!((s.coeffs[2] - c3).abs() < 1e-13 * c3.abs());
        }
        assert!(taylor_at_zero(a_of(0.5), 0).is_err());
        assert!(taylor_at_zero(a_of(0.5), 41).is_err());
        assert!(taylor_at_zero(a_of(0.0), 3).is_err());
    }

    #[test]
    fn derivative_check_values() {
        let d = derivative_series_check(a_of(0.5)).unwrap();
        assert_eq!(d[0], 0.0);
        assert!((d[1] - 2.0).abs() < 1e-15);
        assert!((d[2] + 8.0).abs() < 1e-13);
        let d = derivative_series_check(AsymmetryParam::from_ratio(1, 3).unwrap()).unwrap();
        // (9a^2 - a^4)/a^5 at a = 1/3
        assert!((d[3] - 240.0).abs() < 1e-10, "{}", d[3]);
    }

    #[test]
    fn taylor_agrees_with_solver_inside_radius() {
        for &a in &[0.2, 0.5, 0.8] {
            let ap = a_of(a);
            let s = taylor_at_zero(ap, 40).unwrap();
            let l = constants_raw(a).l;
            for i in -10..=10 {
                let x = 0.5 * l.abs() * i as f64 / 10.0;
                let exact = psi(PsiQuery::new(ap, BranchId::Principal, x)).unwrap();
                let approx = s.evaluate(x).unwrap();
                let last = (s.coeffs[39] * x.powi(40)).abs();
                assert!(
                    (approx - exact).abs() <= 10.0 * last + 1e-14,
                    "a={a} x={x}: {approx} vs {exact}"
                );
            }
        }
    }
}

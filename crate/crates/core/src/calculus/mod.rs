//! Derivatives of ψ through the polynomials `P_n`, the primitive Ψ, the
//! closed-form integrals of ψ and ω, and quadrature checks of the latter.

pub mod quadrature;

use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::branches::{at_branch_point, check_domain, psi, PsiQuery};
use crate::error::{Error, Result};
use crate::param::{constants_raw, AsymmetryParam, BranchId, ParamKind};
use crate::parametrize::upper_of_log_alpha;
use quadrature::integrate;

pub const MAX_DERIVATIVE_ORDER: usize = 8;

const MAX_PANELS: usize = 4000;

/// `P_n(X, Y)` with `X = cosh(aψ)`, `Y = sinh(aψ)`, stored as a sparse map
/// from exponent pairs `(i, j)` of `X^i Y^j` to coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct PnPolynomial {
    pub n: usize,
    pub a: AsymmetryParam,
    pub terms: BTreeMap<(u32, u32), f64>,
}

impl PnPolynomial {
    /// `P_1 = 1`.
    pub fn first(a: AsymmetryParam) -> Self {
        Self {
            n: 1,
            a,
            terms: BTreeMap::from([((0, 0), 1.0)]),
        }
    }

    /// `P_n` by repeated application of [`pn_next`].
    pub fn of_order(a: AsymmetryParam, n: usize) -> Result<Self> {
        if n == 0 || n > MAX_DERIVATIVE_ORDER {
            return Err(Error::InvalidParameter(format!(
                "order must be in 1..={MAX_DERIVATIVE_ORDER}, got {n}"
            )));
        }
        let mut p = Self::first(a);
        while p.n < n {
            p = pn_next(&p);
        }
        Ok(p)
    }

    /// Largest `i + j` over the stored terms.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|&(i, j)| i + j).max().unwrap_or(0)
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.terms
            .iter()
            .map(|(&(i, j), &c)| c * x.powi(i as i32) * y.powi(j as i32))
            .sum()
    }
}

/// `P_{n+1} = P_n·((a-3na)X + (a²-n-2na²)Y) + ∂_X P_n·(a²XY + aY²)
/// + ∂_Y P_n·(aXY + a²X²)`.
pub fn pn_next(p: &PnPolynomial) -> PnPolynomial {
    let a = p.a.value();
    let n = p.n as f64;
    let mut out: BTreeMap<(u32, u32), f64> = BTreeMap::new();
    let mut add = |key: (u32, u32), v: f64| *out.entry(key).or_insert(0.0) += v;
    for (&(i, j), &c) in &p.terms {
        add((i + 1, j), c * (a - 3.0 * n * a));
        add((i, j + 1), c * (a * a - n - 2.0 * n * a * a));
        if i > 0 {
            let d = i as f64 * c;
            add((i, j + 1), d * a * a);
            add((i - 1, j + 2), d * a);
        }
        if j > 0 {
            let d = j as f64 * c;
            add((i + 1, j), d * a);
            add((i + 2, j - 1), d * a * a);
        }
    }
    out.retain(|_, c| *c != 0.0);
    PnPolynomial {
        n: p.n + 1,
        a: p.a,
        terms: out,
    }
}

/// Coefficients of `P_n` in `U = X + Y`, `V = X - Y`, entry `i` holding
/// `U^i V^{n-1-i}`. Built by the same recurrence rewritten in these
/// variables; evaluating there avoids the cancellation the `(X, Y)` form
/// suffers as `|tanh(aψ)| -> 1`.
fn exponential_basis(a: f64, n: usize) -> Vec<f64> {
    let mut c = vec![1.0];
    for k in 1..n {
        let kf = k as f64;
        let alpha = a - 3.0 * kf * a;
        let beta = a * a - kf - 2.0 * kf * a * a;
        let m = c.len() - 1;
        let mut next = vec![0.0; c.len() + 1];
        for (i, &ci) in c.iter().enumerate() {
            let d = i as f64 - (m - i) as f64;
            next[i + 1] += ci * (0.5 * (alpha + beta) + 0.5 * a * (a + 1.0) * d);
            next[i] += ci * (0.5 * (alpha - beta) - 0.5 * a * (1.0 - a) * d);
        }
        c = next;
    }
    c
}

fn ln_cosh(t: f64) -> f64 {
    let t = t.abs();
    t + (-2.0 * t).exp().ln_1p() - std::f64::consts::LN_2
}

/// The `n`-th derivative of ψ on `branch` at `x`, `1 <= n <= 8`.
pub fn psi_derivative(a: AsymmetryParam, branch: BranchId, x: f64, n: usize) -> Result<f64> {
    a.require_interior("psi_derivative")?;
    let p = PnPolynomial::of_order(a, n)?;
    let q = PsiQuery::new(a, branch, x);
    let c = check_domain(&q)?;
    if at_branch_point(x, &c) {
        return Err(Error::Singular(format!(
            "derivatives of psi are unbounded at L_a = {}",
            c.l
        )));
    }
    let av = a.value();
    if x == 0.0 {
        return Ok(p.eval(1.0, 0.0) / av.powi(2 * n as i32 - 1));
    }
    let w = psi(q)?;
    // P_n is homogeneous of degree n-1, so X and Y are divided by cosh(aψ)
    // to keep the evaluation in range when |ψ| is large.
    // U = e^{aψ}/cosh(aψ) and V = e^{-aψ}/cosh(aψ), each without cancellation.
    let u = 2.0 / (1.0 + (-2.0 * av * w).exp());
    let v = 2.0 / (1.0 + (2.0 * av * w).exp());
    let poly: f64 = exponential_basis(av, n)
        .iter()
        .enumerate()
        .map(|(i, &c)| c * u.powi(i as i32) * v.powi((n - 1 - i) as i32))
        .sum();
    let denom = 0.5 * ((1.0 + av) * u - (1.0 - av) * v);
    let scale = (n as f64 * (-w - ln_cosh(av * w))).exp();
    let v = poly / denom.powi(2 * n as i32 - 1) * scale;
    if !v.is_finite() {
        return Err(Error::Range(format!(
            "derivative of order {n} at x = {x} is not representable"
        )));
    }
    Ok(v)
}

/// The primitive `Ψ(x) = xψ + (a e^ψ cosh(aψ) - x)/(1-a²)` of ψ.
pub fn psi_primitive(a: AsymmetryParam, branch: BranchId, x: f64) -> Result<f64> {
    a.require_interior("psi_primitive")?;
    let av = a.value();
    let w = psi(PsiQuery::new(a, branch, x))?;
    let v = x * w + (av * w.exp() * (av * w).cosh() - x) / (1.0 - av * av);
    if !v.is_finite() {
        return Err(Error::Range(format!("primitive at x = {x} overflows")));
    }
    Ok(v)
}

/// `∫_{L_a}^0 ψ(a,x) dx` on the given branch.
pub fn integral_psi(a: AsymmetryParam, branch: BranchId) -> Result<f64> {
    a.require_interior("integral_psi")?;
    let av = a.value();
    let c = constants_raw(av);
    let s = 1.0 - av * av;
    Ok(match branch {
        BranchId::Principal => (av + 2.0 * c.l) / s - c.l * c.m,
        BranchId::Lower => 2.0 * c.l / s - c.l * c.m,
    })
}

/// The lower-branch integral written with the prefactor
/// `((1-a)/(1+a))^{1/(2a)} / (2√(1-a²))`.
pub fn integral_psi_lower_explicit(a: AsymmetryParam) -> Result<f64> {
    a.require_interior("integral_psi_lower_explicit")?;
    let av = a.value();
    let s = 1.0 - av * av;
    let ln_r = (-2.0 * av / (1.0 + av)).ln_1p();
    let pre = (ln_r / (2.0 * av)).exp() / (2.0 * s.sqrt());
    Ok(pre * (-4.0 * av / s + ln_r))
}

/// `∫_{-∞}^0 ω(a,z) dz = π²/(3(a²-1))`.
pub fn integral_omega(a: AsymmetryParam) -> Result<f64> {
    if a.kind() == ParamKind::OneLimit {
        return Err(Error::Divergent(
            "the integral of omega diverges at a = 1".into(),
        ));
    }
    let av = a.value();
    Ok(PI * PI / (3.0 * (av * av - 1.0)))
}

fn check_rel_tol(rel_tol: f64) -> Result<()> {
    if !(1e-10..=1e-3).contains(&rel_tol) {
        return Err(Error::InvalidParameter(format!(
            "rel_tol must be in [1e-10, 1e-3], got {rel_tol}"
        )));
    }
    Ok(())
}

/// `∫_{-∞}^0 ω(a,z) dz` by quadrature.
///
/// The pairs `(z, ω(z))` are `(ψ₀(u), ψ₀(u) - u)` and their mirror images
/// for `u = log α > 0`, which turns the integral into `2∫_0^∞ ψ₀(u) du`
/// with a smooth integrand and no logarithmic endpoint.
///
/// Tail model: for large `u`, `ψ₀(u) = -(e^{-(1-a)u} - e^{-(1+a)u})/(2a)`
/// up to a relative `O(e^{-(1-a)u})`. The integral is cut at `U` with
/// `e^{-(1-a)U} <= rel_tol/1000` and the model tail is added in closed
/// form, so the neglected part is far below the tolerance.
pub fn integral_omega_quadrature(a: AsymmetryParam, rel_tol: f64) -> Result<f64> {
    check_rel_tol(rel_tol)?;
    if a.kind() == ParamKind::OneLimit {
        return Err(Error::Divergent(
            "the integral of omega diverges at a = 1".into(),
        ));
    }
    let av = a.value();
    let cut = (1e3 / rel_tol).ln() / (1.0 - av);
    let sinhc = if av == 0.0 { cut } else { (av * cut).sinh() / av };
    let tail = -(-cut).exp() * (sinhc + (av * cut).cosh()) / (1.0 - av * av);
    let body = integrate(|u| upper_of_log_alpha(av, u), 0.0, cut, 0.0, 0.1 * rel_tol, MAX_PANELS);
    let value = 2.0 * (body.value + tail);
    let achieved = 2.0 * body.error / value.abs();
    if !value.is_finite() || achieved > rel_tol {
        return Err(Error::Accuracy {
            requested: rel_tol,
            estimate: value,
            achieved,
        });
    }
    Ok(value)
}

/// `∫_{L_a}^0 ψ(a,x) dx` by quadrature: `x = L_a + t²` on `[L_a, L_a/2]`
/// removes the square-root singularity, and `x = (L_a/2)e^{-s}` on the
/// rest handles the logarithm of the lower branch at 0.
pub fn integral_psi_quadrature(a: AsymmetryParam, branch: BranchId, rel_tol: f64) -> Result<f64> {
    check_rel_tol(rel_tol)?;
    a.require_interior("integral_psi_quadrature")?;
    let av = a.value();
    let l = constants_raw(av).l;
    let split = 0.5 * l;
    let eval = |x: f64| psi(PsiQuery::new(a, branch, x)).unwrap_or(f64::NAN);
    let near = integrate(
        |t| 2.0 * t * eval(l + t * t),
        0.0,
        (split - l).sqrt(),
        0.0,
        0.1 * rel_tol,
        MAX_PANELS,
    );
    let s_max = 60.0;
    let far = integrate(
        |s: f64| {
            let x = split * (-s).exp();
            -x * eval(x)
        },
        0.0,
        s_max,
        0.0,
        0.1 * rel_tol,
        MAX_PANELS,
    );
    let y = -split * (-s_max).exp();
    let tail = match branch {
        BranchId::Principal => -y * y / (2.0 * av),
        BranchId::Lower => y * ((2.0 * y).ln() - 1.0) / (1.0 - av),
    };
    let value = near.value + far.value + tail;
    let achieved = (near.error + far.error) / value.abs();
    if !value.is_finite() || achieved > rel_tol {
        return Err(Error::Accuracy {
            requested: rel_tol,
            estimate: value,
            achieved,
        });
    }
    Ok(value)
}

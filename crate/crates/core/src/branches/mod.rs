//! Inverse branches ψ₀ and ψ₋₁ of `f(a,·)`, the transition function ω
//! and its finite-n counterpart ω̄.

mod closed_form;

pub use closed_form::{omega_closed_form, psi_closed_form, ClosedFormTag};

use crate::error::{Error, Result};
use crate::lambert::lambert_w;
use crate::numeric::{ln_expm1, log1mexp, newton_bisect, round_half_even, Monotone};
use crate::param::{constants_raw, AsymmetryParam, BranchConstants, BranchId, ParamKind};
use crate::parametrize::{upper_of_log_alpha, upper_of_log_alpha_prime};

const MAX_ITER: usize = 100;
const LN_2: f64 = std::f64::consts::LN_2;

/// An argument of ψ together with the branch it is taken on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsiQuery {
    pub a: AsymmetryParam,
    pub branch: BranchId,
    pub x: f64,
}

impl PsiQuery {
    pub fn new(a: AsymmetryParam, branch: BranchId, x: f64) -> Self {
        Self { a, branch, x }
    }
}

/// `x` equal to `L_a` up to rounding; the square-root conditioning at the
/// branch point makes the solver useless there, so such arguments map to `M_a`.
pub(crate) fn at_branch_point(x: f64, c: &BranchConstants) -> bool {
    (x - c.l).abs() <= 4.0 * f64::EPSILON * c.l.abs()
}

/// Checks `x` against the domain of the branch and returns the constants.
pub(crate) fn check_domain(q: &PsiQuery) -> Result<BranchConstants> {
    let x = q.x;
    if x.is_nan() {
        return Err(Error::Domain("x is NaN".into()));
    }
    let c = constants_raw(q.a.value());
    if x < c.l && !at_branch_point(x, &c) {
        return Err(Error::Domain(format!("x = {x} < L_a = {}", c.l)));
    }
    match q.branch {
        BranchId::Principal => {
            if x == f64::INFINITY {
                return Err(Error::Domain("x must be finite".into()));
            }
        }
        BranchId::Lower => {
            if x >= 0.0 {
                return Err(Error::Domain(format!(
                    "x = {x} >= 0 is outside [L_a, 0) for the lower branch"
                )));
            }
        }
    }
    Ok(c)
}

// log|f(a,w)| and its derivative in w; for w > 0 and w < 0 respectively.
fn log_f_pos(a: f64, w: f64) -> (f64, f64) {
    let t = 2.0 * a * w;
    ((1.0 - a) * w + ln_expm1(t) - LN_2, (1.0 - a) + 2.0 * a / -(-t).exp_m1())
}

fn log_f_neg(a: f64, w: f64) -> (f64, f64) {
    let t = -2.0 * a * w;
    ((1.0 - a) * w + log1mexp(t) - LN_2, (1.0 - a) - 2.0 * a / t.exp_m1())
}

fn seed(a: f64, branch: BranchId, x: f64, c: &BranchConstants) -> f64 {
    if (x - c.l).abs() <= 0.05 * c.l.abs() {
        let s = ((x - c.l) / c.k).max(0.0).sqrt();
        let s = match branch {
            BranchId::Principal => s,
            BranchId::Lower => -s,
        };
        let r2 = std::f64::consts::SQRT_2;
        return c.m + s * (r2 + s * (-2.0 / 3.0 + s * (11.0 - 3.0 * a * a) / (18.0 * r2)));
    }
    match branch {
        BranchId::Principal => {
            if x >= 10.0 {
                let lead = (2.0 * x).ln() / (1.0 + a);
                let y = (-2.0 * a * lead).exp();
                lead + y / (1.0 + a) + (1.0 - 3.0 * a) * y * y / (2.0 * (1.0 + a) * (1.0 + a))
            } else if x.abs() <= 0.1 * c.l.abs() {
                let t = x / a;
                t - t * t + (9.0 - a * a) * t * t * t / 6.0
            } else if a < 0.05 && x / a > -0.36 {
                lambert_w(BranchId::Principal, x / a).unwrap_or(f64::NAN)
            } else {
                f64::NAN
            }
        }
        BranchId::Lower => {
            if x.abs() <= 0.01 * c.l.abs() {
                let lead = (-2.0 * x).ln() / (1.0 - a);
                let z = (2.0 * a * lead).exp();
                lead + z / (1.0 - a) + (1.0 + 3.0 * a) * z * z / (2.0 * (1.0 - a) * (1.0 - a))
            } else if a < 0.05 && x / a > -0.36 {
                lambert_w(BranchId::Lower, x / a).unwrap_or(f64::NAN)
            } else {
                f64::NAN
            }
        }
    }
}

fn psi_interior(a: f64, branch: BranchId, x: f64, c: &BranchConstants) -> Result<f64> {
    if at_branch_point(x, c) {
        return Ok(c.m);
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let start = seed(a, branch, x, c);
    let ctx = || format!("psi(a={a}, {branch:?}, x={x})");
    match branch {
        BranchId::Principal if x > 0.0 => {
            let target = x.ln();
            let lo = ((2.0 * x).ln() / (1.0 + a)).max(0.0);
            let mut width = 1.0;
            while log_f_pos(a, lo + width).0 < target {
                width *= 2.0;
            }
            newton_bisect(
                |w| {
                    let (v, d) = log_f_pos(a, w);
                    (v - target, d)
                },
                lo,
                lo + width,
                start,
                Monotone::Increasing,
                MAX_ITER,
                &ctx(),
            )
        }
        BranchId::Principal => {
            let target = (-x).ln();
            newton_bisect(
                |w| {
                    let (v, d) = log_f_neg(a, w);
                    (v - target, d)
                },
                c.m,
                0.0,
                start,
                Monotone::Decreasing,
                MAX_ITER,
                &ctx(),
            )
        }
        BranchId::Lower => {
            let target = (-x).ln();
            let mut lo = (-2.0 * x).ln() / (1.0 - a);
            if lo >= c.m {
                lo = c.m - 1.0;
            }
            while log_f_neg(a, lo).0 > target {
                lo = c.m - 2.0 * (c.m - lo);
            }
            newton_bisect(
                |w| {
                    let (v, d) = log_f_neg(a, w);
                    (v - target, d)
                },
                lo,
                c.m,
                start,
                Monotone::Increasing,
                MAX_ITER,
                &ctx(),
            )
        }
    }
}

/// Evaluates ψ₀ or ψ₋₁ by a safeguarded Newton iteration on `log|f| - log|x|`.
pub fn psi(q: PsiQuery) -> Result<f64> {
    match q.a.kind() {
        ParamKind::ZeroLimit => Err(Error::Unsupported(
            "ψ is not defined at a = 0 (f vanishes identically)".into(),
        )),
        ParamKind::OneLimit => match q.branch {
            BranchId::Principal if q.x > -0.5 && q.x.is_finite() => Ok(0.5 * (2.0 * q.x).ln_1p()),
            BranchId::Principal => Err(Error::Domain(format!(
                "x = {} must exceed -1/2 at a = 1",
                q.x
            ))),
            BranchId::Lower => Err(Error::Domain(
                "the lower branch does not exist at a = 1".into(),
            )),
        },
        ParamKind::Interior => {
            let c = check_domain(&q)?;
            psi_interior(q.a.value(), q.branch, q.x, &c)
        }
    }
}

/// Transition function: the point on the other branch with the same value of `f`.
///
/// Solved in `u = log α` of the simultaneous parametrization, where both
/// branch values are explicit, so no cancellation occurs next to `M_a`.
pub fn omega(a: AsymmetryParam, z: f64) -> Result<f64> {
    if !(z < 0.0) {
        return Err(Error::Domain(format!("z = {z} must be negative")));
    }
    match a.kind() {
        ParamKind::OneLimit => Err(Error::Unsupported(
            "ω is not defined at a = 1 (f is monotone)".into(),
        )),
        ParamKind::ZeroLimit => {
            if z == -1.0 {
                return Ok(-1.0);
            }
            let x = z * z.exp();
            if z < -1.0 {
                lambert_w(BranchId::Principal, x)
            } else {
                lambert_w(BranchId::Lower, x)
            }
        }
        ParamKind::Interior => omega_interior(a.value(), z),
    }
}

pub(crate) fn omega_interior(a: f64, z: f64) -> Result<f64> {
    let m = crate::param::minimizer(a);
    if (z - m).abs() <= 2.0 * f64::EPSILON * m.abs() {
        return Ok(m);
    }
    let ctx = format!("omega(a={a}, z={z})");
    if z < m {
        // ψ₋₁(u) = z with ψ₋₁ = ψ₀ - u decreasing; u ∈ [M - z, -z]
        let lo = (m - z).max(f64::MIN_POSITIVE);
        let hi = -z;
        let start = (2.0 * (m - z)).min(0.5 * (lo + hi));
        let u = newton_bisect(
            |u| {
                (
                    upper_of_log_alpha(a, u) - u - z,
                    upper_of_log_alpha_prime(a, u) - 1.0,
                )
            },
            lo,
            hi,
            start,
            Monotone::Decreasing,
            MAX_ITER,
            &ctx,
        )?;
        Ok(upper_of_log_alpha(a, u))
    } else {
        // ψ₀(u) = z, solved on log(-ψ₀), which decreases in u
        let target = (-z).ln();
        let g = |u: f64| {
            let p = upper_of_log_alpha(a, u);
            ((-p).ln() - target, upper_of_log_alpha_prime(a, u) / p)
        };
        let mut hi = 1.0;
        while g(hi).0 > 0.0 {
            hi *= 2.0;
            if hi > 1e6 {
                return Err(Error::Range(format!("{ctx}: ω below representable range")));
            }
        }
        let start = if z - m < 0.05 * m.abs() {
            2.0 * (z - m)
        } else {
            ((-2.0 * a * z).ln() / -(1.0 - a)).max(0.0)
        };
        let u = newton_bisect(g, 0.0, hi, start, Monotone::Decreasing, MAX_ITER, &ctx)?;
        Ok(z - u)
    }
}

/// Finite-n transition value ω̄(n,a,z): the `y` for which the p,q-binomial
/// coefficients with `p = 1 + 2y/n`, `q = 1 + 2z/n` are equal at `k-1` and
/// `k = round(n(1-a)/2)`.
pub fn omega_finite_n(n: u64, a: AsymmetryParam, z: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("n = {n} must be >= 2")));
    }
    if !(z < 0.0) {
        return Err(Error::Domain(format!("z = {z} must be negative")));
    }
    let nf = n as f64;
    let k = round_half_even(nf * (1.0 - a.value()) / 2.0);
    if k < 1.0 || k > (n / 2) as f64 {
        return Err(Error::InvalidParameter(format!(
            "k = {k} is outside [1, floor(n/2)] for n = {n}, a = {}",
            a.value()
        )));
    }
    let q = 1.0 + 2.0 * z / nf;
    if !(q > 0.0) {
        return Err(Error::Domain(format!(
            "q = 1 + 2z/n = {q} must be positive (z = {z}, n = {n})"
        )));
    }
    let d = nf - 2.0 * k + 1.0;
    let sq = (2.0 * z / nf).ln_1p();
    // φ(s) = log(p^k (1 - p^d)) with s = log p < 0, maximal at s*
    let phi = |s: f64| (k * s + log1mexp(-d * s), k - d / (-d * s).exp_m1());
    let s_star = -(d / k).ln_1p() / d;
    let target = phi(sq).0;
    let ctx = format!("omega_finite_n(n={n}, a={}, z={z})", a.value());
    let s = if sq < s_star {
        newton_bisect(
            |s| {
                let (v, dv) = phi(s);
                (v - target, dv)
            },
            s_star,
            0.0,
            f64::NAN,
            Monotone::Decreasing,
            4 * MAX_ITER,
            &ctx,
        )?
    } else if sq > s_star {
        let mut lo = 2.0 * s_star;
        while phi(lo).0 > target {
            lo *= 2.0;
            if !lo.is_finite() {
                return Err(Error::NoConvergence {
                    iterations: 0,
                    context: format!("{ctx}: no sign change"),
                });
            }
        }
        newton_bisect(
            |s| {
                let (v, dv) = phi(s);
                (v - target, dv)
            },
            lo,
            s_star,
            f64::NAN,
            Monotone::Increasing,
            4 * MAX_ITER,
            &ctx,
        )?
    } else {
        sq
    };
    Ok(nf * s.exp_m1() / 2.0)
}

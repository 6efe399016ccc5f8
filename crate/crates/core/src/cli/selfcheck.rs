//! Identity suites run by `pqlambert selfcheck`.

use std::time::Instant;

use clap::ValueEnum;

use crate::branches::{omega, omega_finite_n, psi, psi_closed_form, PsiQuery};
use crate::calculus::{
    integral_omega, integral_omega_quadrature, psi_derivative, psi_primitive, MAX_DERIVATIVE_ORDER,
};
use crate::error::Result;
use crate::lambert::lambert_w;
use crate::param::{constants_raw, forward, AsymmetryParam, BranchId};
use crate::parametrize::param_alpha;
use crate::pqbinom::{build_distribution, log_pq_binomial, peak_drift, PqParams};
use crate::reference;
use crate::series::{
    branch_point_series, psi0_bounds, psi0_bounds_threshold, psi1_bounds, psi1_bounds_range_start,
    taylor_at_zero, BranchPointKind,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Level {
    Fast,
    Full,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteResult {
    pub name: &'static str,
    /// Largest residual seen; the suite passes when it is at most `tolerance`.
    pub worst: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub millis: u128,
}

type Suite = fn(usize) -> Result<f64>;

fn ap(v: f64) -> AsymmetryParam {
    AsymmetryParam::new(v).expect("suite parameters are in [0, 1]")
}

fn rel(x: f64, y: f64) -> f64 {
    (x - y).abs() / y.abs().max(f64::MIN_POSITIVE)
}

fn geometric(lo: f64, hi: f64, count: usize) -> impl Iterator<Item = f64> {
    let (l, h) = (lo.abs().ln(), hi.abs().ln());
    let s = lo.signum();
    (0..count).map(move |i| s * (l + (h - l) * i as f64 / (count - 1) as f64).exp())
}

fn psi_round_trip(scale: usize) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &a in &[0.01, 0.2, 0.5, 0.8, 0.99] {
        let p = ap(a);
        let l = constants_raw(a).l;
        for i in 1..50 * scale {
            let x = l * (1.0 - i as f64 / (50 * scale) as f64);
            for b in [BranchId::Principal, BranchId::Lower] {
                let w = psi(PsiQuery::new(p, b, x))?;
                worst = worst.max(rel(forward(p, w)?, x));
            }
        }
        for x in geometric(1e-8, 1e8, 50 * scale) {
            let w = psi(PsiQuery::new(p, BranchId::Principal, x))?;
            worst = worst.max(rel(forward(p, w)?, x));
        }
    }
    Ok(worst)
}

const OMEGA_AS: [f64; 9] = [0.0, 0.01, 0.1, 0.25, 1.0 / 3.0, 0.5, 0.75, 0.9, 0.99];

fn omega_involution(scale: usize) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &a in &OMEGA_AS {
        let p = ap(a);
        for z in geometric(-30.0, -1e-6, 100 * scale) {
            let back = omega(p, omega(p, z)?)?;
            worst = worst.max((back - z).abs() / z.abs().max(1.0));
        }
    }
    Ok(worst)
}

fn omega_fixed_point(_: usize) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &a in &OMEGA_AS[1..] {
        let m = constants_raw(a).m;
        worst = worst.max((omega(ap(a), m)? - m).abs());
    }
    Ok(worst)
}

fn closed_forms(scale: usize) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &(n, d) in &[(1, 7), (1, 5), (1, 3), (1, 2), (3, 5)] {
        let a = AsymmetryParam::from_ratio(n, d)?;
        let l = constants_raw(a.value()).l;
        let count = 100 * scale;
        for i in 0..count {
            let x = l * (1.0 - i as f64 / count as f64);
            let mut queries = vec![
                PsiQuery::new(a, BranchId::Principal, x),
                PsiQuery::new(a, BranchId::Lower, x),
            ];
            queries.push(PsiQuery::new(a, BranchId::Principal, 10.0 * i as f64 / count as f64));
            for q in queries {
                let s = psi(q)?;
                let c = psi_closed_form(q)?;
                worst = worst.max((c - s).abs() / s.abs().max(1.0));
            }
        }
    }
    Ok(worst)
}

fn integral_identities(_: usize) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &a in &[0.0, 0.2, 1.0 / 3.0, 0.5, 0.6, 0.875] {
        let p = ap(a);
        worst = worst.max(rel(integral_omega_quadrature(p, 1e-6)?, integral_omega(p)?));
    }
    Ok(worst)
}

fn taylor_golden(_: usize) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &a in &[0.2, 0.5, 0.8] {
        let s = taylor_at_zero(ap(a), 10)?;
        for (c, g) in s.coeffs.iter().zip(reference::taylor_psi0(a)) {
            worst = worst.max(rel(*c, g));
        }
    }
    Ok(worst)
}

fn branch_point_golden(_: usize) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &a in &[0.2, 0.5, 0.8] {
        let p = ap(a);
        let p0 = branch_point_series(p, BranchPointKind::Psi0, 7)?;
        let p1 = branch_point_series(p, BranchPointKind::Psi1, 7)?;
        for (i, g) in reference::branch_point_psi0(a).iter().enumerate() {
            worst = worst.max(rel(p0.coeffs[i], *g));
            let flipped = if i % 2 == 0 { -g } else { *g };
            worst = worst.max(rel(p1.coeffs[i], flipped));
        }
        let om = branch_point_series(p, BranchPointKind::Omega, 10)?;
        for (c, g) in om.coeffs.iter().zip(reference::branch_point_omega(a)) {
            worst = worst.max(rel(*c, g));
        }
    }
    Ok(worst)
}

/// Largest signed violation `max(lower - ψ, ψ - upper)`; negative when the
/// bounds hold strictly. The grids stop where the bound gap drops below
/// double resolution.
fn bound_envelopes(scale: usize) -> Result<f64> {
    let mut worst = f64::NEG_INFINITY;
    for &a in &[0.1, 0.2, 0.45, 0.6, 0.9] {
        let p = ap(a);
        let t = psi0_bounds_threshold(a);
        let end = (0.5 * 10f64.powf(6.0 * (1.0 + a) / (2.0 * a))).max(10.0 * t);
        for x in geometric(t, end, 100 * scale) {
            let (lo, hi) = psi0_bounds(p, x)?;
            let v = psi(PsiQuery::new(p, BranchId::Principal, x))?;
            worst = worst.max(lo - v).max(v - hi);
        }
        let start = psi1_bounds_range_start(a);
        let end = -0.5 * 10f64.powf(-6.0 * (1.0 - a) / (2.0 * a));
        for x in geometric(start, end, 100 * scale) {
            let (lo, hi, _) = psi1_bounds(p, x)?;
            let v = psi(PsiQuery::new(p, BranchId::Lower, x))?;
            worst = worst.max(lo - v).max(v - hi);
        }
    }
    Ok(worst)
}

fn richardson(g: &dyn Fn(f64) -> f64, x: f64, n: usize, h: f64) -> f64 {
    let stencil = |h: f64| match n {
        1 => (g(x + h) - g(x - h)) / (2.0 * h),
        2 => (g(x + h) - 2.0 * g(x) + g(x - h)) / (h * h),
        3 => (g(x + 2.0 * h) - 2.0 * g(x + h) + 2.0 * g(x - h) - g(x - 2.0 * h)) / (2.0 * h.powi(3)),
        _ => {
            (g(x + 2.0 * h) - 4.0 * g(x + h) + 6.0 * g(x) - 4.0 * g(x - h) + g(x - 2.0 * h))
                / h.powi(4)
        }
    };
    (4.0 * stencil(0.5 * h) - stencil(h)) / 3.0
}

fn derivatives(scale: usize) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &a in &[0.25, 0.5, 0.75] {
        let p = ap(a);
        let l = constants_raw(a).l;
        worst = worst.max(rel(psi_derivative(p, BranchId::Principal, 0.0, 1)?, 1.0 / a));
        worst = worst.max(rel(psi_derivative(p, BranchId::Principal, 0.0, 2)?, -2.0 / (a * a)));
        let count = 5 * scale;
        for i in 0..count {
            let x = l * (0.7 - 0.5 * i as f64 / count as f64);
            let dist = (x - l).min(x.abs());
            let h = 0.002 * dist;
            for b in [BranchId::Principal, BranchId::Lower] {
                let g = |x: f64| psi(PsiQuery::new(p, b, x)).unwrap_or(f64::NAN);
                // Each order is checked against a difference of the one below,
                // measured on the local scale |lower order|/dist.
                for n in 1..=MAX_DERIVATIVE_ORDER {
                    let lower = |x: f64| {
                        if n == 1 {
                            g(x)
                        } else {
                            psi_derivative(p, b, x, n - 1).unwrap_or(f64::NAN)
                        }
                    };
                    let d = psi_derivative(p, b, x, n)?;
                    let fd = richardson(&lower, x, 1, h);
                    let local = d.abs() + lower(x).abs() / dist;
                    worst = worst.max((fd - d).abs() / local);
                }
                let hp = 1e-6 * l.abs();
                let dp = (psi_primitive(p, b, x + hp)? - psi_primitive(p, b, x - hp)?) / (2.0 * hp);
                // The primitive is checked at the tighter 1e-7 level; scale it
                // onto the suite tolerance.
                worst = worst.max(rel(dp, g(x)) * 1e-5 / 1e-7);
            }
        }
    }
    Ok(worst)
}

fn parametrization(scale: usize) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &a in &[0.1, 1.0 / 3.0, 0.5, 0.9] {
        let p = ap(a);
        for alpha in geometric(1.0 + 1e-6, 1e6, 200 * scale) {
            let pt = param_alpha(p, alpha)?;
            worst = worst.max(rel(forward(p, pt.psi0)?, pt.x));
            worst = worst.max(rel(forward(p, pt.psi1)?, pt.x));
            let gap = pt.psi0 - pt.psi1 - alpha.ln();
            worst = worst.max(gap.abs() / pt.psi1.abs().max(1.0));
        }
    }
    Ok(worst)
}

/// Counts a distribution with other than one or two peaks as a failure.
fn pq_binomial(scale: usize) -> Result<f64> {
    let mut worst: f64 = 0.0;
    let mut cases = vec![
        PqParams::new(64, 1.001, 0.999)?,
        PqParams::new(33, 1.3, 0.6)?,
        PqParams::from_provenance(1 << 10, ap(0.5), omega(ap(0.5), -5.0)?, -5.0)?,
        PqParams::from_provenance(1 << 10, ap(0.0), omega(ap(0.0), -5.0)?, -5.0)?,
    ];
    if scale > 1 {
        cases.push(PqParams::from_provenance(1 << 16, ap(0.3), omega(ap(0.3), -2.0)?, -2.0)?);
    }
    for pq in cases {
        let d = build_distribution(pq)?;
        if !(1..=2).contains(&d.peaks.len()) {
            return Ok(f64::INFINITY);
        }
        let total: f64 = d.probabilities().iter().sum();
        worst = worst.max((total - 1.0).abs());
        let n = pq.n as usize;
        for k in (0..=n).step_by((n / 16).max(1)) {
            worst = worst.max((d.log_coeffs[k] - d.log_coeffs[n - k]).abs());
            worst = worst.max((d.log_coeffs[k] - log_pq_binomial(&pq, k as u64)?).abs());
        }
    }
    Ok(worst)
}

/// 0 when `|ψ(a,x)/W(x/a) - 1|` decreases along `a = 1e-2, 1e-3, 1e-4`.
fn lambert_limit(_: usize) -> Result<f64> {
    for &x in &[0.5, 5.0] {
        let mut last = f64::INFINITY;
        for &a in &[1e-2, 1e-3, 1e-4] {
            let v = psi(PsiQuery::new(ap(a), BranchId::Principal, x))?;
            let w = lambert_w(BranchId::Principal, x / a)?;
            let dev = rel(v, w);
            if !(dev < last) {
                return Ok(1.0);
            }
            last = dev;
        }
    }
    Ok(0.0)
}

/// 0 when the peak offset is nonincreasing (10% slack) along `n = 2^10,
/// 2^12, 2^14` and ω̄ approaches ω.
fn peak_scaling(_: usize) -> Result<f64> {
    let half = ap(0.5);
    let mut last = f64::INFINITY;
    for e in [10, 12, 14] {
        let (_, off) = peak_drift(1 << e, half, -5.0)?;
        if off > 1.1 * last {
            return Ok(1.0);
        }
        last = off;
    }
    let w = omega(half, -5.0)?;
    let far = (omega_finite_n(1 << 10, half, -5.0)? - w).abs();
    let near = (omega_finite_n(1 << 20, half, -5.0)? - w).abs();
    Ok(if near < far { 0.0 } else { 1.0 })
}

fn suites(level: Level) -> Vec<(&'static str, Suite, f64)> {
    let mut v: Vec<(&'static str, Suite, f64)> = vec![
        ("psi_round_trip", psi_round_trip, 1e-12),
        ("omega_involution", omega_involution, 1e-10),
        ("omega_fixed_point", omega_fixed_point, 1e-12),
        ("closed_forms", closed_forms, 1e-11),
        ("integral_identities", integral_identities, 1e-6),
        ("taylor_golden", taylor_golden, 1e-9),
        ("branch_point_golden", branch_point_golden, 1e-9),
        ("bound_envelopes", bound_envelopes, -f64::MIN_POSITIVE),
        ("derivatives", derivatives, 1e-5),
        ("parametrization", parametrization, 1e-12),
        ("pq_binomial", pq_binomial, 1e-11),
        ("lambert_limit", lambert_limit, 0.0),
    ];
    if level == Level::Full {
        v.push(("peak_scaling", peak_scaling, 0.0));
    }
    v
}

/// Runs every suite of `level`. A suite whose name equals `fault` has its
/// residual replaced by infinity, which lets tests exercise the failure path.
pub fn run_suites(level: Level, fault: Option<&str>) -> Vec<SuiteResult> {
    let scale = match level {
        Level::Fast => 1,
        Level::Full => 10,
    };
    suites(level)
        .into_iter()
        .map(|(name, suite, tolerance)| {
            let start = Instant::now();
            let mut worst = suite(scale).unwrap_or(f64::INFINITY);
            if fault == Some(name) {
                worst = f64::INFINITY;
            }
            SuiteResult {
                name,
                worst,
                tolerance,
                passed: worst <= tolerance,
                millis: start.elapsed().as_millis(),
            }
        })
        .collect()
}

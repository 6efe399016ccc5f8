//! Explicit radical and trigonometric formulas for ψ and ω at
//! a ∈ {1/7, 1/5, 1/3, 1/2, 3/5}.
//!
//! With `a = (n-m)/(n+m)` and `Y = e^{2w/(n+m)}`, `f(a,w) = x` becomes
//! `Y^n - Y^m = 2x`; the cases here are the ones of degree at most four.

use std::f64::consts::PI;

use super::{at_branch_point, check_domain, PsiQuery};
use crate::error::{Error, Result};
use crate::numeric::log1mexp;
use crate::param::{AsymmetryParam, BranchId};

/// Which exact rational `a` a parameter matches, if any.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClosedFormTag {
    A13,
    A12,
    A15,
    A35,
    A17,
    None,
}

impl ClosedFormTag {
    /// Matches the reduced fraction remembered by the parameter. A decimal
    /// `a` never matches, even if it rounds to one of the rationals.
    pub fn of(a: &AsymmetryParam) -> Self {
        match a.ratio() {
            Some((1, 3)) => Self::A13,
            Some((1, 2)) => Self::A12,
            Some((1, 5)) => Self::A15,
            Some((3, 5)) => Self::A35,
            Some((1, 7)) => Self::A17,
            _ => Self::None,
        }
    }
}

fn clamped_acos(v: f64) -> f64 {
    v.clamp(-1.0, 1.0).acos()
}

fn sqrt_pos(v: f64) -> f64 {
    v.max(0.0).sqrt()
}

fn third_cos(theta: f64, branch: BranchId) -> f64 {
    match branch {
        BranchId::Principal => (theta / 3.0).cos(),
        BranchId::Lower => ((theta + 4.0 * PI) / 3.0).cos(),
    }
}

fn psi_a13(x: f64, bp: bool, branch: BranchId) -> f64 {
    let r = if bp { 0.0 } else { sqrt_pos(2.0 * x + 0.25) };
    match branch {
        BranchId::Principal => 1.5 * (0.5 + r).ln(),
        BranchId::Lower => 1.5 * (0.5 - r).ln(),
    }
}

fn psi_a12(x: f64, bp: bool, branch: BranchId) -> f64 {
    let s3 = 3f64.sqrt();
    if branch == BranchId::Principal && x >= s3 / 9.0 {
        let s = sqrt_pos(x * x - 1.0 / 27.0);
        return 2.0 * ((x + s).cbrt() + (x - s).cbrt()).ln();
    }
    let theta = if bp { PI } else { clamped_acos(3.0 * s3 * x) };
    2.0 * (2.0 / s3 * third_cos(theta, branch)).ln()
}

fn psi_a15(x: f64, bp: bool, branch: BranchId) -> f64 {
    if branch == BranchId::Principal && x >= 0.0 {
        let s = (x * x + 2.0 * x / 27.0).sqrt();
        let c = x + 1.0 / 27.0;
        return 2.5 * ((c + s).cbrt() + (c - s).cbrt() + 1.0 / 3.0).ln();
    }
    let theta = if bp { PI } else { clamped_acos(27.0 * x + 1.0) };
    2.5 * (2.0 / 3.0 * third_cos(theta, branch) + 1.0 / 3.0).ln()
}

fn psi_a35(x: f64, bp: bool, branch: BranchId) -> f64 {
    let c = 4.0 * (8.0 * x / 3.0).powi(3);
    let r = if bp { 0.0 } else { sqrt_pos(c + 1.0) };
    // 1 - r and t - 1 in forms that stay accurate as x -> 0.
    let one_minus_r = -c / (1.0 + r);
    let d = one_minus_r.cbrt() / 2f64.cbrt() + ((-0.5 * one_minus_r).ln_1p() / 3.0).exp_m1();
    let t = 1.0 + d;
    let root = if bp { 0.0 } else { sqrt_pos(2.0 - t.powf(1.5)) };
    let num = match branch {
        BranchId::Principal => t.powf(0.75) + root,
        // t^{3/4} - root, rationalised.
        BranchId::Lower => 2.0 * (1.5 * d.ln_1p()).exp_m1() / (t.powf(0.75) + root),
    };
    2.5 * (num / (2.0 * t.powf(0.25))).ln()
}

fn psi_a17(x: f64, bp: bool, branch: BranchId) -> f64 {
    let s = if bp {
        0.0
    } else {
        sqrt_pos((2.0 * x / 3.0).powi(3) + (x / 8.0).powi(2))
    };
    let v = (-x / 8.0 + s).cbrt() + (-x / 8.0 - s).cbrt();
    let p = (2.0 * v + 0.25).sqrt();
    let q = if bp {
        0.0
    } else {
        sqrt_pos(-2.0 * v + 0.5 + 0.5 / (8.0 * v + 1.0).sqrt())
    };
    let y = match branch {
        BranchId::Principal => (p + q) / 2.0 + 0.25,
        BranchId::Lower => (p - q) / 2.0 + 0.25,
    };
    3.5 * y.ln()
}

/// ψ from its explicit formula when `a` is one of the supported rationals.
pub fn psi_closed_form(q: PsiQuery) -> Result<f64> {
    let tag = ClosedFormTag::of(&q.a);
    if tag == ClosedFormTag::None {
        return Err(Error::Unsupported(format!(
            "no closed form for a = {}",
            q.a
        )));
    }
    let c = check_domain(&q)?;
    let bp = at_branch_point(q.x, &c);
    let x = q.x;
    Ok(match tag {
        ClosedFormTag::A13 => psi_a13(x, bp, q.branch),
        ClosedFormTag::A12 => psi_a12(x, bp, q.branch),
        ClosedFormTag::A15 => psi_a15(x, bp, q.branch),
        ClosedFormTag::A35 => psi_a35(x, bp, q.branch),
        ClosedFormTag::A17 => psi_a17(x, bp, q.branch),
        ClosedFormTag::None => unreachable!(),
    })
}

/// ω from its explicit formula for a ∈ {1/3, 1/2, 1/5}.
pub fn omega_closed_form(a: AsymmetryParam, z: f64) -> Result<f64> {
    if !(z < 0.0) {
        return Err(Error::Domain(format!("z = {z} must be negative")));
    }
    match ClosedFormTag::of(&a) {
        ClosedFormTag::A13 => Ok(1.5 * log1mexp(-2.0 * z / 3.0)),
        ClosedFormTag::A12 => {
            let s3 = 3f64.sqrt();
            let theta = clamped_acos(1.5 * s3 * ((1.5 * z).exp() - (0.5 * z).exp()));
            if z < -(3f64.ln()) {
                Ok(2.0 * (2.0 / s3 * (theta / 3.0).cos()).ln())
            } else {
                Ok(2.0 * (-2.0 / s3 * (PI / 6.0 - theta / 3.0).sin()).ln())
            }
        }
        ClosedFormTag::A15 => {
            let theta = clamped_acos(13.5 * ((1.2 * z).exp() - (0.8 * z).exp()) + 1.0);
            if z < -2.5 * 1.5f64.ln() {
                Ok(2.5 * (2.0 / 3.0 * (theta / 3.0).cos() + 1.0 / 3.0).ln())
            } else {
                Ok(2.5 * (1.0 / 3.0 - 2.0 / 3.0 * (PI / 6.0 - theta / 3.0).sin()).ln())
            }
        }
        _ => Err(Error::Unsupported(format!(
            "no closed form for omega at a = {a}"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::branches::{omega, psi};
    use crate::param::branch_constants;

    fn ratio(n: u32, d: u32) -> AsymmetryParam {
        AsymmetryParam::from_ratio(n, d).unwrap()
    }

    #[test]
    fn tags_need_exact_ratio() {
        assert_eq!(ClosedFormTag::of(&ratio(2, 6)), ClosedFormTag::A13);
        assert_eq!(ClosedFormTag::of(&ratio(3, 5)), ClosedFormTag::A35);
        assert_eq!(ClosedFormTag::of(&ratio(2, 3)), ClosedFormTag::None);
        let decimal = AsymmetryParam::new(0.5).unwrap();
        assert_eq!(ClosedFormTag::of(&decimal), ClosedFormTag::None);
        assert!(psi_closed_form(PsiQuery::new(decimal, BranchId::Principal, 1.0)).is_err());
    }

    #[test]
    fn examples() {
        let v = psi_closed_form(PsiQuery::new(ratio(1, 3), BranchId::Lower, -0.125)).unwrap();
        assert!((v + 1.5 * 2f64.ln()).abs() < 1e-15);
        let v = psi_closed_form(PsiQuery::new(ratio(1, 2), BranchId::Principal, 0.0)).unwrap();
        assert!(v.abs() < 1e-15);

        let a = ratio(3, 5);
        let x = -3.0 / (8.0 * 4f64.cbrt());
        let c = psi_closed_form(PsiQuery::new(a, BranchId::Principal, x)).unwrap();
        let n = psi(PsiQuery::new(a, BranchId::Principal, x)).unwrap();
        assert!((c - n).abs() < 1e-7, "{c} vs {n}");
    }

    #[test]
    fn agrees_with_solver_on_grids() {
        for &(n, d) in &[(1, 7), (1, 5), (1, 3), (1, 2), (3, 5)] {
            let a = ratio(n, d);
            let l = branch_constants(a).unwrap().l;
            for i in 1..200 {
                let x = l * (1.0 - i as f64 / 200.0);
                for b in [BranchId::Principal, BranchId::Lower] {
                    let q = PsiQuery::new(a, b, x);
                    let c = psi_closed_form(q).unwrap();
                    let s = psi(q).unwrap();
                    assert!((c - s).abs() <= 1e-11 * s.abs().max(1.0), "a={a} {b:?} x={x}: {c} vs {s}");
                }
                let x = 10.0 * i as f64 / 200.0;
                let q = PsiQuery::new(a, BranchId::Principal, x);
                let c = psi_closed_form(q).unwrap();
                let s = psi(q).unwrap();
                assert!((c - s).abs() <= 1e-11 * s.abs().max(1.0), "a={a} x={x}: {c} vs {s}");
            }
        }
    }

    #[test]
    fn omega_forms() {
        let third = ratio(1, 3);
        let m = -1.5 * 2f64.ln();
        assert!((omega_closed_form(third, m).unwrap() - m).abs() < 1e-15);
        let half = ratio(1, 2);
        let v = omega_closed_form(half, -5.0).unwrap();
        assert!((v - omega(half, -5.0).unwrap()).abs() < 1e-12);
        assert!(omega_closed_form(ratio(1, 5), -1e-9).unwrap() < -20.0);
        for &(n, d) in &[(1, 3), (1, 2), (1, 5)] {
            let a = ratio(n, d);
            let mut z = -20.0;
            while z < -1e-3 {
                let c = omega_closed_form(a, z).unwrap();
                let s = omega(a, z).unwrap();
                assert!((c - s).abs() < 1e-9 * s.abs().max(1.0), "a={a} z={z}: {c} vs {s}");
                z *= 0.9;
            }
        }
        assert!(omega_closed_form(ratio(3, 5), -1.0).is_err());
    }
}

//! Square-root expansions of ψ₀, ψ₋₁ about `(L_a, M_a)` and the power
//! series of ω about `M_a`.

use super::{SeriesExpansion, SeriesKind, Transform, MAX_BRANCH_POINT_ORDER};
use crate::error::{Error, Result};
use crate::param::{constants_raw, AsymmetryParam};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BranchPointKind {
    Psi0,
    Psi1,
    Omega,
}

type Poly = Vec<f64>;

fn mul_trunc(p: &[f64], q: &[f64], len: usize) -> Poly {
    let mut r = vec![0.0; len];
    for (i, &pi) in p.iter().enumerate().take(len) {
        if pi == 0.0 {
            continue;
        }
        for (j, &qj) in q.iter().enumerate().take(len - i) {
            r[i + j] += pi * qj;
        }
    }
    r
}

/// `Σ_j c[j] g^j` truncated to `len` terms; `g[0]` must be 0.
fn compose(c: &[f64], g: &[f64], len: usize) -> Poly {
    let mut r = vec![0.0; len];
    let mut pw = vec![0.0; len];
    pw[0] = 1.0;
    for (j, &cj) in c.iter().enumerate() {
        if j > 0 {
            pw = mul_trunc(&pw, g, len);
        }
        if cj != 0.0 {
            for (ri, pi) in r.iter_mut().zip(&pw) {
                *ri += cj * pi;
            }
        }
    }
    r
}

/// Coefficients `c_j` of `(f(a, y + M_a) - L_a)/K_a = Σ_{j>=2} c_j y^j`:
/// `c_j = ((1+a)^{j-1} - (1-a)^{j-1})/(2a·j!)`, with the difference
/// expanded binomially so that only odd powers of `a` appear.
pub(crate) fn scaled_forward_coeffs(a: f64, len: usize) -> Poly {
    let mut c = vec![0.0; len];
    let mut fact = 1.0;
    for (j, cj) in c.iter_mut().enumerate().skip(1) {
        fact *= j as f64;
        let n = j - 1;
        let mut s = 0.0;
        let mut binom = 1.0;
        for i in 0..=n {
            if i > 0 {
                binom = binom * (n - i + 1) as f64 / i as f64;
            }
            if i % 2 == 1 {
                s += binom * a.powi(i as i32 - 1);
            }
        }
        *cj = s / fact;
    }
    c
}

/// Reverts `Σ c_j y^j = s²` for `y = Σ h_m s^m`, with `h_1 = sign·√2`.
fn revert_square(c: &[f64], order: usize, sign: f64) -> Poly {
    let len = order + 2;
    let mut h = vec![0.0; order + 1];
    h[1] = sign * std::f64::consts::SQRT_2;
    for m in 2..=order {
        let comp = compose(c, &h, len);
        h[m] = -comp[m + 1] / h[1];
    }
    h.remove(0);
    h
}

/// Expansion about the branch point, `order` coefficients.
///
/// `Psi0`/`Psi1` are in powers of `√t` with `x = t·K_a + L_a`; `Omega` is in
/// powers of `z - M_a`.
pub fn branch_point_series(
    a: AsymmetryParam,
    which: BranchPointKind,
    order: usize,
) -> Result<SeriesExpansion> {
    a.require_interior("branch_point_series")?;
    if order == 0 || order > MAX_BRANCH_POINT_ORDER {
        return Err(Error::InvalidParameter(format!(
            "order must be in 1..={MAX_BRANCH_POINT_ORDER}, got {order}"
        )));
    }
    let av = a.value();
    let bc = constants_raw(av);
    let c = scaled_forward_coeffs(av, order + 3);
    let sqrt_scaled = Transform::SqrtScaled {
        l: bc.l,
        k: bc.k,
        m: bc.m,
    };
    let (kind, coeffs, transform, validity) = match which {
        BranchPointKind::Psi0 => (
            SeriesKind::BranchPointPsi0,
            revert_square(&c, order, 1.0),
            sqrt_scaled,
            (bc.l, 0.0),
        ),
        BranchPointKind::Psi1 => (
            SeriesKind::BranchPointPsi1,
            revert_square(&c, order, -1.0),
            sqrt_scaled,
            (bc.l, 0.0),
        ),
        BranchPointKind::Omega => {
            // √(Σ c_j t^j) = t·√(Σ c_{j+2} t^j) as a power series in t,
            // then substituted into the lower-branch series.
            let len = order + 1;
            let inner: Poly = (0..len).map(|j| c.get(j + 2).copied().unwrap_or(0.0)).collect();
            let mut r = vec![0.0; len];
            r[0] = inner[0].sqrt();
            for n in 1..len {
                let cross: f64 = (1..n).map(|i| r[i] * r[n - i]).sum();
                r[n] = (inner[n] - cross) / (2.0 * r[0]);
            }
            let mut root = vec![0.0; len];
            root[1..].copy_from_slice(&r[..len - 1]);
            let lower = revert_square(&c, order, -1.0);
            let mut g = vec![0.0; order + 1];
            g[1..].copy_from_slice(&lower);
            let mut w = compose(&g, &root, len);
            w.remove(0);
            (
                SeriesKind::BranchPointOmega,
                w,
                Transform::Shift { m: bc.m },
                (2.0 * bc.m, 0.0),
            )
        }
    };
    Ok(SeriesExpansion {
        kind,
        a,
        coeffs,
        transform,
        validity,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::branches::{omega, psi, PsiQuery};
    use crate::param::BranchId;

    fn a_of(v: f64) -> AsymmetryParam {
        AsymmetryParam::new(v).unwrap()
    }

    #[test]
    fn scaled_forward_coefficients() {
        for &a in &[1e-6, 0.3, 0.7] {
            let c = scaled_forward_coeffs(a, 9);
            assert_eq!(c[0], 0.0);
            assert_eq!(c[1], 0.0);
            assert!((c[2] - 0.5).abs() < 1e-16);
            assert!((c[3] - 1.0 / 3.0).abs() < 1e-16);
            assert!((c[4] - (a * a + 3.0) / 24.0).abs() < 1e-16);
            let c8 = (a.powi(6) + 21.0 * a.powi(4) + 35.0 * a * a + 7.0) / 40320.0;
            assert!((c[8] - c8).abs() < 1e-16 * c8);
        }
    }

    #[test]
    fn leading_coefficients() {
        for &a in &[0.1, 0.5, 0.9] {
            let s = branch_point_series(a_of(a), BranchPointKind::Psi0, 3).unwrap();
            assert!((s.coeffs[0] - 2f64.sqrt()).abs() < 1e-15);
            assert!((s.coeffs[1] + 2.0 / 3.0).abs() < 1e-15);
            let o = branch_point_series(a_of(a), BranchPointKind::Omega, 4).unwrap();
            assert!((o.coeffs[0] + 1.0).abs() < 1e-14);
            assert!((o.coeffs[1] + 2.0 / 3.0).abs() < 1e-14);
            assert!((o.coeffs[2] + 4.0 / 9.0).abs() < 1e-14);
            let c4 = 2.0 * (3.0 * a * a - 22.0) / 135.0;
            assert!((o.coeffs[3] - c4).abs() < 1e-13);
        }
        let s = branch_point_series(a_of(0.5), BranchPointKind::Psi0, 3).unwrap();
        assert!((s.coeffs[2] - 41.0 / (72.0 * 2f64.sqrt())).abs() < 1e-14);
    }

    #[test]
    fn lower_branch_flips_odd_signs_exactly() {
        for &a in &[0.05, 0.4, 0.95] {
            let p0 = branch_point_series(a_of(a), BranchPointKind::Psi0, 12).unwrap();
            let p1 = branch_point_series(a_of(a), BranchPointKind::Psi1, 12).unwrap();
            for (i, (&h, &g)) in p0.coeffs.iter().zip(&p1.coeffs).enumerate() {
                if i % 2 == 0 {
                    assert_eq!(g, -h);
                } else {
                    assert_eq!(g, h);
                }
            }
        }
    }

    #[test]
    fn order_limits() {
        assert!(branch_point_series(a_of(0.5), BranchPointKind::Psi0, 0).is_err());
        assert!(branch_point_series(a_of(0.5), BranchPointKind::Psi0, 13).is_err());
        assert!(branch_point_series(a_of(1.0), BranchPointKind::Omega, 4).is_err());
    }

    #[test]
    fn series_match_functions_near_branch_point() {
        for &a in &[0.2, 0.5, 0.8] {
            let ap = a_of(a);
            let bc = constants_raw(a);
            let p0 = branch_point_series(ap, BranchPointKind::Psi0, 12).unwrap();
            let p1 = branch_point_series(ap, BranchPointKind::Psi1, 12).unwrap();
            let om = branch_point_series(ap, BranchPointKind::Omega, 12).unwrap();
            for i in 1..10 {
                let x = bc.l * (1.0 - 0.001 * i as f64);
                let e0 = psi(PsiQuery::new(ap, BranchId::Principal, x)).unwrap();
                let e1 = psi(PsiQuery::new(ap, BranchId::Lower, x)).unwrap();
                assert!((p0.evaluate(x).unwrap() - e0).abs() < 1e-9);
                assert!((p1.evaluate(x).unwrap() - e1).abs() < 1e-9);
                let z = bc.m * (1.0 + 0.01 * (i as f64 - 5.0));
                if z != bc.m {
                    assert!((om.evaluate(z).unwrap() - omega(ap, z).unwrap()).abs() < 1e-12);
                }
            }
        }
    }
}

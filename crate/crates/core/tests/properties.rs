use proptest::prelude::*;

use pqlambert::branches::{omega, psi, PsiQuery};
use pqlambert::cli::output::format_f64;
use pqlambert::param::{branch_constants, forward};
use pqlambert::pqbinom::{build_distribution, log_pq_binomial, PqParams};
use pqlambert::{AsymmetryParam, BranchId};

fn ap(v: f64) -> AsymmetryParam {
    AsymmetryParam::new(v).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn principal_round_trip(a in 0.01f64..0.99, e in -8.0f64..8.0) {
        let p = ap(a);
        let x = 10f64.powf(e);
        let w = psi(PsiQuery::new(p, BranchId::Principal, x)).unwrap();
        prop_assert!((forward(p, w).unwrap() - x).abs() <= 1e-12 * x);
    }

    #[test]
    fn branches_straddle_minimizer(a in 0.01f64..0.99, s in 1e-6f64..1.0) {
        let p = ap(a);
        let c = branch_constants(p).unwrap();
        let x = c.l * s;
        let w0 = psi(PsiQuery::new(p, BranchId::Principal, x)).unwrap();
        let w1 = psi(PsiQuery::new(p, BranchId::Lower, x)).unwrap();
        prop_assert!(w1 <= c.m && c.m <= w0);
        prop_assert!((forward(p, w1).unwrap() - x).abs() <= 1e-12 * x.abs());
    }

    #[test]
    fn omega_swaps_solutions(a in 0.0f64..0.99, z in -30.0f64..-1e-6) {
        let p = ap(a);
        let y = omega(p, z).unwrap();
        let back = omega(p, y).unwrap();
        prop_assert!((back - z).abs() <= 1e-10 * z.abs().max(1.0));
        if a > 0.0 {
            // Same x on both sides, on opposite sides of M.
            let m = branch_constants(p).unwrap().m;
            prop_assert!((z - m) * (y - m) <= 0.0);
            let fz = forward(p, z).unwrap();
            prop_assert!((forward(p, y).unwrap() - fz).abs() <= 1e-10 * fz.abs());
        }
    }

    #[test]
    fn pq_coefficients_are_symmetric(n in 2u64..200, p in 0.2f64..3.0, q in 0.2f64..3.0) {
        prop_assume!((p - q).abs() > 1e-9);
        let pq = PqParams::new(n, p, q).unwrap();
        let qp = PqParams::new(n, q, p).unwrap();
        for k in 0..=n {
            let c = log_pq_binomial(&pq, k).unwrap();
            let mirror = log_pq_binomial(&pq, n - k).unwrap();
            let swapped = log_pq_binomial(&qp, k).unwrap();
            let tol = 1e-12 * c.abs().max(1.0);
            prop_assert!((c - mirror).abs() <= tol);
            prop_assert!((c - swapped).abs() <= tol);
        }
    }

    #[test]
    fn distributions_are_normalised(n in 2u64..2000, p in 0.5f64..1.5, q in 0.5f64..1.5) {
        prop_assume!((p - q).abs() > 1e-9);
        let d = build_distribution(PqParams::new(n, p, q).unwrap()).unwrap();
        let total: f64 = d.probabilities().iter().sum();
        prop_assert!((total - 1.0).abs() <= 1e-12);
        prop_assert!((1..=2).contains(&d.peaks.len()));
    }

    #[test]
    fn printed_doubles_round_trip(bits in any::<u64>()) {
        let v = f64::from_bits(bits);
        prop_assume!(v.is_finite());
        prop_assert_eq!(format_f64(v).parse::<f64>().unwrap().to_bits(), v.to_bits());
    }
}

//! Symmetric p,q-binomial coefficients and the distribution they define.
//!
//! With `[m] = p^m - q^m`, the coefficient of order `(n, k)` is
//! `[n]!/([k]![n-k]!)`, so consecutive coefficients differ by the factor
//! `[n-k+1]/[k]` and everything can be accumulated in log space.

use crate::branches::omega;
use crate::error::{Error, Result};
use crate::numeric::{log1mexp, NeumaierSum};
use crate::param::AsymmetryParam;

pub const MAX_N: u64 = 1 << 24;

/// Tolerance in log space under which two neighbouring coefficients count
/// as one plateau when locating peaks.
pub const PLATEAU_TOL: f64 = 1e-13;

/// The `(a, y, z)` a parameter set was built from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Provenance {
    pub a: AsymmetryParam,
    pub y: f64,
    pub z: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PqParams {
    pub n: u64,
    pub p: f64,
    pub q: f64,
    pub provenance: Option<Provenance>,
}

impl PqParams {
    pub fn new(n: u64, p: f64, q: f64) -> Result<Self> {
        if n == 0 || n > MAX_N {
            return Err(Error::InvalidParameter(format!(
                "n = {n} must be in 1..={MAX_N}"
            )));
        }
        if !(p > 0.0 && q > 0.0) || !p.is_finite() || !q.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "p = {p} and q = {q} must be positive and finite"
            )));
        }
        if p == q {
            return Err(Error::InvalidParameter(format!("p = q = {p}")));
        }
        Ok(Self {
            n,
            p,
            q,
            provenance: None,
        })
    }

    /// `p = 1 + 2y/n`, `q = 1 + 2z/n` with `z < 0`.
    pub fn from_provenance(n: u64, a: AsymmetryParam, y: f64, z: f64) -> Result<Self> {
        if !(z < 0.0) {
            return Err(Error::Domain(format!("z = {z} must be negative")));
        }
        let nf = n as f64;
        let mut params = Self::new(n, 1.0 + 2.0 * y / nf, 1.0 + 2.0 * z / nf)?;
        params.provenance = Some(Provenance { a, y, z });
        Ok(params)
    }

    // log(p/q) with the larger base first, as (log of larger, log ratio > 0).
    fn log_bases(&self) -> (f64, f64) {
        let (hi, lo) = if self.p > self.q {
            (self.p, self.q)
        } else {
            (self.q, self.p)
        };
        (hi.ln(), -((lo - hi) / hi).ln_1p())
    }

    /// `log|p^m - q^m|` for `m >= 1`.
    fn log_bracket(&self, m: u64) -> f64 {
        let (ln_hi, ln_ratio) = self.log_bases();
        let m = m as f64;
        m * ln_hi + log1mexp(m * ln_ratio)
    }
}

/// Natural log of the coefficient of order `(n, k)`.
pub fn log_pq_binomial(params: &PqParams, k: u64) -> Result<f64> {
    let n = params.n;
    if k > n {
        return Err(Error::InvalidParameter(format!("k = {k} > n = {n}")));
    }
    let mut s = NeumaierSum::default();
    for j in 1..=k {
        s.add(params.log_bracket(n - k + j));
        s.add(-params.log_bracket(j));
    }
    Ok(s.value())
}

#[derive(Debug, Clone, PartialEq)]
pub struct PqDistribution {
    pub params: PqParams,
    /// `log_coeffs[k]` is the log of the coefficient of order `(n, k)`.
    pub log_coeffs: Vec<f64>,
    /// Log of the sum of all coefficients, `log_max + log_sum_rel`.
    pub log_norm: f64,
    /// Largest entry of `log_coeffs`.
    pub log_max: f64,
    /// `log Σ exp(log_coeffs[k] - log_max)`. Kept apart from `log_max` since
    /// their sum rounds away digits the probabilities need when `log_max`
    /// is large.
    pub log_sum_rel: f64,
    /// Indices of the local maxima in increasing order.
    pub peaks: Vec<usize>,
}

impl PqDistribution {
    /// Probability of `k`, normalized to total mass 1.
    pub fn probability(&self, k: usize) -> f64 {
        ((self.log_coeffs[k] - self.log_max) - self.log_sum_rel).exp()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.log_coeffs
            .iter()
            .map(|&c| ((c - self.log_max) - self.log_sum_rel).exp())
            .collect()
    }

    pub fn is_bimodal(&self) -> bool {
        self.peaks.len() == 2
    }
}

/// Local maxima of `v`, a run of values equal within [`PLATEAU_TOL`]
/// counting once at its smallest index.
pub fn find_peaks(v: &[f64]) -> Vec<usize> {
    let mut peaks = Vec::new();
    let mut start = 0;
    while start < v.len() {
        let mut end = start;
        while end + 1 < v.len() && (v[end + 1] - v[start]).abs() <= PLATEAU_TOL {
            end += 1;
        }
        let left_lower = start == 0 || v[start - 1] < v[start];
        let right_lower = end + 1 == v.len() || v[end + 1] < v[end];
        if left_lower && right_lower {
            peaks.push(start);
        }
        start = end + 1;
    }
    peaks
}

/// Builds the normalized distribution in `O(n)`: the first half of the
/// coefficients by the ratio recurrence, the second half by symmetry.
pub fn build_distribution(params: PqParams) -> Result<PqDistribution> {
    let n = params.n as usize;
    let mut log_coeffs = vec![0.0; n + 1];
    let mut acc = NeumaierSum::default();
    for k in 1..=n / 2 {
        acc.add(params.log_bracket((n - k + 1) as u64));
        acc.add(-params.log_bracket(k as u64));
        log_coeffs[k] = acc.value();
    }
    for k in n / 2 + 1..=n {
        log_coeffs[k] = log_coeffs[n - k];
    }
    let max = log_coeffs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut total = NeumaierSum::default();
    for &c in &log_coeffs {
        total.add((c - max).exp());
    }
    let log_sum_rel = total.value().ln();
    let peaks = find_peaks(&log_coeffs);
    Ok(PqDistribution {
        params,
        log_coeffs,
        log_norm: max + log_sum_rel,
        log_max: max,
        log_sum_rel,
        peaks,
    })
}

/// `(p^{n-k+1} - p^k)/(q^{n-k+1} - q^k) - 1`, which vanishes exactly when
/// the coefficients at `k-1` and `k` coincide.
pub fn equal_ratio_residual(params: &PqParams, k: u64) -> Result<f64> {
    let n = params.n;
    if k < 1 || k > n / 2 {
        return Err(Error::InvalidParameter(format!(
            "k = {k} must be in 1..={}",
            n / 2
        )));
    }
    let d = (n - 2 * k + 1) as f64;
    let (lp, lq) = (params.p.ln(), params.q.ln());
    let (ep, eq) = ((d * lp).exp_m1(), (d * lq).exp_m1());
    if eq == 0.0 {
        return Err(Error::Singular(format!(
            "q^(n-k+1) = q^k for q = {}, k = {k}",
            params.q
        )));
    }
    if ep == 0.0 {
        return Ok(-1.0);
    }
    let ln_ratio = k as f64 * (lp - lq) + ep.abs().ln() - eq.abs().ln();
    if ep.signum() == eq.signum() {
        Ok(ln_ratio.exp_m1())
    } else {
        Ok(-ln_ratio.exp() - 1.0)
    }
}

/// Lower peak of the distribution with `y = ω(a,z)` and its distance from
/// `n(1-a)/2` relative to `n`.
pub fn peak_drift(n: u64, a: AsymmetryParam, z: f64) -> Result<(usize, f64)> {
    let y = omega(a, z)?;
    let dist = build_distribution(PqParams::from_provenance(n, a, y, z)?)?;
    let k = dist.peaks[0];
    let nf = n as f64;
    Ok((k, (k as f64 - nf * (1.0 - a.value()) / 2.0).abs() / nf))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::branches::omega_finite_n;

    fn a_of(v: f64) -> AsymmetryParam {
        AsymmetryParam::new(v).unwrap()
    }

    #[test]
    fn trivial_orders() {
        let pq = PqParams::new(2, 1.3, 0.4).unwrap();
        assert!((log_pq_binomial(&pq, 1).unwrap() - 1.7f64.ln()).abs() < 1e-15);
        for n in [1, 5, 100] {
            let pq = PqParams::new(n, 0.7, 1.2).unwrap();
            assert_eq!(log_pq_binomial(&pq, 0).unwrap(), 0.0);
            assert!(log_pq_binomial(&pq, n).unwrap().abs() < 1e-13);
        }
        assert!(log_pq_binomial(&pq, 3).is_err());
    }

    #[test]
    fn parameter_checks() {
        assert!(PqParams::new(4, 1.0, 1.0).is_err());
        assert!(PqParams::new(0, 1.1, 0.9).is_err());
        assert!(PqParams::new(4, -1.0, 0.9).is_err());
        assert!(PqParams::new(MAX_N + 1, 1.1, 0.9).is_err());
        assert!(PqParams::from_provenance(10, a_of(0.5), 0.1, 1.0).is_err());
        assert!(PqParams::from_provenance(4, a_of(0.5), 0.1, -3.0).is_err());
        let pq = PqParams::from_provenance(1024, a_of(0.5), -0.1, -5.0).unwrap();
        assert_eq!(pq.p, 1.0 - 0.2 / 1024.0);
        assert_eq!(pq.q, 1.0 - 10.0 / 1024.0);
        assert!(pq.p > pq.q);
    }

    #[test]
    fn recurrence_matches_direct_sum() {
        for &(p, q) in &[(1.1, 0.9), (0.9, 1.1), (1.001, 0.999), (3.0, 0.2)] {
            let pq = PqParams::new(37, p, q).unwrap();
            let d = build_distribution(pq).unwrap();
            for k in 0..=37 {
                let direct = log_pq_binomial(&pq, k).unwrap();
                assert!((d.log_coeffs[k as usize] - direct).abs() < 1e-11);
            }
        }
    }

    #[test]
    fn swapping_p_and_q_changes_nothing() {
        let a = build_distribution(PqParams::new(50, 1.2, 0.7).unwrap()).unwrap();
        let b = build_distribution(PqParams::new(50, 0.7, 1.2).unwrap()).unwrap();
        assert_eq!(a.log_coeffs, b.log_coeffs);
    }

    #[test]
    fn peaks_with_plateaus() {
        assert_eq!(find_peaks(&[0.0, 1.0, 0.0]), vec![1]);
        assert_eq!(find_peaks(&[0.0, 1.0, 1.0, 0.0]), vec![1]);
        assert_eq!(find_peaks(&[2.0, 1.0, 2.0]), vec![0, 2]);
        assert_eq!(find_peaks(&[0.0, 2.0, 1.0, 2.0, 0.0]), vec![1, 3]);
        assert_eq!(find_peaks(&[1.0, 1.0 + 1e-14, 0.0]), vec![0]);
        assert_eq!(find_peaks(&[5.0]), vec![0]);
    }

    #[test]
    fn nearly_equal_bases_are_unimodal() {
        let d = build_distribution(PqParams::new(64, 1.001, 0.999).unwrap()).unwrap();
        assert_eq!(d.peaks, vec![32]);
        let d = build_distribution(PqParams::new(65, 1.001, 0.999).unwrap()).unwrap();
        assert_eq!(d.peaks, vec![32]);
    }

    #[test]
    fn figure_instances_are_bimodal() {
        let n = 1 << 10;
        let half = a_of(0.5);
        let d = build_distribution(PqParams::from_provenance(n, half, -0.0891004, -5.0).unwrap()).unwrap();
        assert_eq!(d.peaks.len(), 2);
        let lo = d.peaks[0] as f64 / n as f64;
        assert!((lo - 0.25).abs() < 0.02, "{lo}");
        assert_eq!(d.peaks[0] + d.peaks[1], n as usize);
        let sum: f64 = d.probabilities().iter().sum();
        assert!((sum - 1.0).abs() < 1e-12);

        let zero = a_of(0.0);
        let d = build_distribution(PqParams::from_provenance(n, zero, -0.0348858, -5.0).unwrap()).unwrap();
        assert_eq!(d.peaks.len(), 2);
        assert!(d.peaks[0] < n as usize / 2);
    }

    #[test]
    fn residual_vanishes_at_finite_n_transition() {
        let n = 1 << 10;
        let half = a_of(0.5);
        let y = omega_finite_n(n, half, -5.0).unwrap();
        let pq = PqParams::from_provenance(n, half, y, -5.0).unwrap();
        let k = 256;
        let r = equal_ratio_residual(&pq, k).unwrap();
        assert!(r.abs() <= 1e-10, "{r}");
        let d = build_distribution(pq).unwrap();
        let step = d.log_coeffs[k as usize] - d.log_coeffs[k as usize - 1];
        assert!(step.abs() < 1e-10, "{step}");
        assert!(equal_ratio_residual(&pq, 0).is_err());
        assert!(equal_ratio_residual(&pq, 513).is_err());
    }

    #[test]
    fn residual_sign_tracks_coefficient_ratio() {
        let pq = PqParams::new(40, 1.05, 0.93).unwrap();
        let d = build_distribution(pq).unwrap();
        for k in 1..=20u64 {
            let r = equal_ratio_residual(&pq, k).unwrap();
            let step = d.log_coeffs[k as usize] - d.log_coeffs[k as usize - 1];
            // q < 1 makes the denominator negative, which flips the sign
            assert_eq!(r > 0.0, step < 0.0, "k={k}");
        }
    }

    #[test]
    fn drift_of_lower_peak() {
        let (k, off) = peak_drift(1 << 10, a_of(0.5), -5.0).unwrap();
        assert!((k as i64 - 256).abs() < 20, "{k}");
        assert!(off < 0.02);
        let (k, _) = peak_drift(1 << 10, a_of(0.0), -5.0).unwrap();
        assert!(k < 512);
    }
}

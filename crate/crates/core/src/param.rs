//! The asymmetry parameter `a`, the forward map `f(a,w) = sinh(aw)e^w` and
//! the constants of its branch point.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Classification of `a` by the behaviour of the branch system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ParamKind {
    /// `0 < a < 1`: two real branches meeting at `(L_a, M_a)`.
    Interior,
    /// `a = 0`: the Lambert W limit.
    ZeroLimit,
    /// `a = 1`: `f(1,w) = (e^{2w} - 1)/2`, a single logarithmic branch.
    OneLimit,
}

/// A validated asymmetry parameter `a ∈ [0, 1]`.
///
/// When built from a ratio (`from_ratio` or parsing `"p/q"`), the reduced
/// fraction is kept so that closed-form dispatch can match it exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymmetryParam {
    value: f64,
    kind: ParamKind,
    ratio: Option<(u32, u32)>,
}

fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl AsymmetryParam {
    pub fn new(a: f64) -> Result<Self> {
        if !a.is_finite() || !(0.0..=1.0).contains(&a) {
            return Err(Error::InvalidParameter(format!(
                "a must be a finite number in [0, 1], got {a}"
            )));
        }
        let kind = if a == 0.0 {
            ParamKind::ZeroLimit
        } else if a == 1.0 {
            ParamKind::OneLimit
        } else {
            ParamKind::Interior
        };
        Ok(Self {
            value: a,
            kind,
            ratio: None,
        })
    }

    /// Builds `a = num/den` and remembers the reduced fraction.
    pub fn from_ratio(num: u32, den: u32) -> Result<Self> {
        if den == 0 {
            return Err(Error::InvalidParameter("zero denominator".into()));
        }
        if num > den {
            return Err(Error::InvalidParameter(format!(
                "a = {num}/{den} exceeds 1"
            )));
        }
        let g = gcd(num, den).max(1);
        let (n, d) = (num / g, den / g);
        let mut p = Self::new(n as f64 / d as f64)?;
        p.ratio = Some((n, d));
        Ok(p)
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.value
    }

    #[inline]
    pub fn kind(&self) -> ParamKind {
        self.kind
    }

    /// The reduced fraction if the parameter was given exactly.
    pub fn ratio(&self) -> Option<(u32, u32)> {
        self.ratio
    }

    pub fn is_interior(&self) -> bool {
        self.kind == ParamKind::Interior
    }

    pub(crate) fn require_interior(&self, what: &str) -> Result<()> {
        if self.is_interior() {
            Ok(())
        } else {
            Err(Error::Unsupported(format!(
                "{what} requires 0 < a < 1, got a = {}",
                self.value
            )))
        }
    }
}

impl fmt::Display for AsymmetryParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.ratio {
            Some((n, d)) => write!(f, "{n}/{d}"),
            None => write!(f, "{}", self.value),
        }
    }
}

impl FromStr for AsymmetryParam {
    type Err = Error;

    /// Accepts `"num/den"` (exact) or a decimal literal.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((n, d)) = s.split_once('/') {
            let n: u32 = n
                .trim()
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("bad numerator in {s:?}")))?;
            let d: u32 = d
                .trim()
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("bad denominator in {s:?}")))?;
            Self::from_ratio(n, d)
        } else {
            let v: f64 = s
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("cannot parse a from {s:?}")))?;
            Self::new(v)
        }
    }
}

/// Selects one of the two real inverse branches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BranchId {
    /// ψ₀, values `>= M_a`.
    Principal,
    /// ψ₋₁, values `<= M_a`.
    Lower,
}

impl FromStr for BranchId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "0" | "principal" | "psi0" => Ok(BranchId::Principal),
            "-1" | "lower" | "psi1" | "m1" => Ok(BranchId::Lower),
            other => Err(Error::InvalidParameter(format!("unknown branch {other:?}"))),
        }
    }
}

/// Minimum value `L_a`, minimizer `M_a` and series scale `K_a = L_a(a²-1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchConstants {
    pub l: f64,
    pub m: f64,
    pub k: f64,
}

/// `f(a,w)` on the raw value of `a`, written as `e^{(1-a)w}·expm1(2aw)/2`.
pub(crate) fn sinh_exp(a: f64, w: f64) -> f64 {
    if a == 0.0 {
        return 0.0;
    }
    0.5 * ((1.0 - a) * w).exp() * (2.0 * a * w).exp_m1()
}

/// `∂f/∂w = (a cosh(aw) + sinh(aw))e^w`.
#[cfg(test)]
pub(crate) fn sinh_exp_prime(a: f64, w: f64) -> f64 {
    0.5 * ((1.0 - a) * w).exp() * ((1.0 + a) * (2.0 * a * w).exp_m1() + 2.0 * a)
}

/// The forward map `f(a,w) = sinh(aw)e^w = (e^{(1+a)w} - e^{(1-a)w})/2`.
pub fn forward(a: AsymmetryParam, w: f64) -> Result<f64> {
    if !w.is_finite() {
        return Err(Error::InvalidParameter(format!("w must be finite, got {w}")));
    }
    let v = sinh_exp(a.value(), w);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Range(format!(
            "f(a={}, w={w}) overflows double precision",
            a.value()
        )))
    }
}

/// `M_a = log((1-a)/(1+a))/(2a)` evaluated without cancellation for small `a`.
pub(crate) fn minimizer(a: f64) -> f64 {
    (-2.0 * a / (1.0 + a)).ln_1p() / (2.0 * a)
}

pub(crate) fn constants_raw(a: f64) -> BranchConstants {
    let m = minimizer(a);
    let e = ((1.0 - a) * m).exp();
    BranchConstants {
        l: -a / (1.0 + a) * e,
        m,
        k: a * (1.0 - a) * e,
    }
}

/// Closed-form branch constants. `a = 0` returns the Lambert values
/// `(-1/e, -1, 1/e)`; `a = 1` has no branch point.
pub fn branch_constants(a: AsymmetryParam) -> Result<BranchConstants> {
    match a.kind() {
        ParamKind::Interior => Ok(constants_raw(a.value())),
        ParamKind::ZeroLimit => {
            let inv_e = (-1.0f64).exp();
            Ok(BranchConstants {
                l: -inv_e,
                m: -1.0,
                k: inv_e,
            })
        }
        ParamKind::OneLimit => Err(Error::UndefinedConstants(1.0)),
    }
}

/// The point `(I_a(n), n·M_a)` on the lower branch, where the n-th
/// derivative of `f` vanishes.
pub fn special_point(a: AsymmetryParam, n: u32) -> Result<(f64, f64)> {
    a.require_interior("special_point")?;
    if n == 0 {
        return Err(Error::InvalidParameter("n must be >= 1".into()));
    }
    let av = a.value();
    let log_r = (-2.0 * av / (1.0 + av)).ln_1p();
    let nf = n as f64;
    let x = 0.5 * (nf * (1.0 - av) / (2.0 * av) * log_r).exp() * (nf * log_r).exp_m1();
    Ok((x, nf * minimizer(av)))
}

//! Published coefficient tables, transcribed as polynomials in `a`, used as
//! golden values by the self-check and the tests.

use std::f64::consts::SQRT_2;

/// Taylor coefficients of ψ₀ about 0, for `x^1 … x^10`.
pub fn taylor_psi0(a: f64) -> [f64; 10] {
    let a2 = a * a;
    let a4 = a2 * a2;
    let a6 = a4 * a2;
    let a8 = a4 * a4;
    [
        1.0 / a,
        -1.0 / a2,
        -(a2 - 9.0) / (6.0 * a.powi(3)),
        2.0 * (a2 - 4.0) / (3.0 * a4),
        (9.0 * a4 - 250.0 * a2 + 625.0) / (120.0 * a.powi(5)),
        -2.0 * (4.0 * a4 - 45.0 * a2 + 81.0) / (15.0 * a6),
        -(225.0 * a6 - 12691.0 * a4 + 84035.0 * a2 - 117649.0) / (5040.0 * a.powi(7)),
        16.0 * (9.0 * a6 - 196.0 * a4 + 896.0 * a2 - 1024.0) / (315.0 * a8),
        (1225.0 * a8 - 116244.0 * a6 + 1439046.0 * a4 - 4960116.0 * a2 + 4782969.0)
            / (40320.0 * a.powi(9)),
        -2.0 * (576.0 * a8 - 20500.0 * a6 + 170625.0 * a4 - 468750.0 * a2 + 390625.0)
            / (2835.0 * a.powi(10)),
    ]
}

/// Coefficients of `y^2 … y^8` in `(f(a, y + M_a) - L_a)/K_a`.
pub fn scaled_forward(a: f64) -> [f64; 7] {
    let a2 = a * a;
    let a4 = a2 * a2;
    [
        0.5,
        1.0 / 3.0,
        (a2 + 3.0) / 24.0,
        (a2 + 1.0) / 30.0,
        (a4 + 10.0 * a2 + 5.0) / 720.0,
        (3.0 * a4 + 10.0 * a2 + 3.0) / 2520.0,
        (a4 * a2 + 21.0 * a4 + 35.0 * a2 + 7.0) / 40320.0,
    ]
}

/// Coefficients of `x^{1/2} … x^{7/2}` in `ψ₀(a, x K_a + L_a) - M_a`.
/// The lower branch has the same values with the odd-indexed
/// (half-integer power) entries negated.
pub fn branch_point_psi0(a: f64) -> [f64; 7] {
    let a2 = a * a;
    let a4 = a2 * a2;
    [
        SQRT_2,
        -2.0 / 3.0,
        (11.0 - 3.0 * a2) / (18.0 * SQRT_2),
        -(43.0 - 27.0 * a2) / 135.0,
        (81.0 * a4 - 786.0 * a2 + 769.0) / (2160.0 * SQRT_2),
        -8.0 * (81.0 * a4 - 318.0 * a2 + 221.0) / 8505.0,
        (680863.0 - 1273509.0 * a2 + 551853.0 * a4 - 30375.0 * a4 * a2) / (2721600.0 * SQRT_2),
    ]
}

/// Coefficients of `x^1 … x^10` in `ω(a, x + M_a) - M_a`.
pub fn branch_point_omega(a: f64) -> [f64; 10] {
    let a2 = a * a;
    let a4 = a2 * a2;
    let a6 = a4 * a2;
    let a8 = a4 * a4;
    [
        -1.0,
        -2.0 / 3.0,
        -4.0 / 9.0,
        2.0 * (3.0 * a2 - 22.0) / 135.0,
        4.0 * (9.0 * a2 - 26.0) / 405.0,
        -4.0 * (3.0 * a4 - 88.0 * a2 + 150.0) / 2835.0,
        -8.0 * (81.0 * a4 - 808.0 * a2 + 956.0) / 42525.0,
        2.0 * (27.0 * a6 - 2106.0 * a4 + 11124.0 * a2 - 9968.0) / 127575.0,
        4.0 * (135.0 * a6 - 3258.0 * a4 + 11064.0 * a2 - 7928.0) / 229635.0,
        -4.0 * (2025.0 * a8 - 341604.0 * a6 + 4049838.0 * a4 - 9850752.0 * a2 + 5857336.0)
            / 189448875.0,
    ]
}

/// The `a = 1/2` branch-point coefficients in the variable `x` with
/// `ψ₀(1/2, x/(4√3) - 1/(3√3)) + log 3`.
pub fn branch_point_psi0_half() -> [f64; 5] {
    [
        SQRT_2,
        -2.0 / 3.0,
        41.0 / (72.0 * SQRT_2),
        -29.0 / 108.0,
        9241.0 / (34560.0 * SQRT_2),
    ]
}

/// The `a = 1/2` values of the first five ω coefficients.
pub fn branch_point_omega_half() -> [f64; 5] {
    [-1.0, -2.0 / 3.0, -4.0 / 9.0, -17.0 / 54.0, -19.0 / 81.0]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_tables_agree_with_general_ones() {
        let g = branch_point_psi0(0.5);
        for (x, y) in g.iter().zip(branch_point_psi0_half()) {
            assert!((x - y).abs() < 1e-15);
        }
        let g = branch_point_omega(0.5);
        for (x, y) in g.iter().zip(branch_point_omega_half()) {
            assert!((x - y).abs() < 1e-15);
        }
    }
}

//! Partial exponential Bell polynomials and Lagrange inversion.

/// Table of `B_{n,k}(x_1, x_2, …)` for `0 <= k <= n <= n_max`.
#[derive(Debug, Clone)]
pub struct BellTriangle {
    n_max: usize,
    values: Vec<Vec<f64>>,
}

fn binomials(n_max: usize) -> Vec<Vec<f64>> {
    let mut c = vec![vec![0.0; n_max + 1]; n_max + 1];
    for n in 0..=n_max {
        c[n][0] = 1.0;
        for k in 1..=n {
            c[n][k] = c[n - 1][k - 1] + if k < n { c[n - 1][k] } else { 0.0 };
        }
    }
    c
}

impl BellTriangle {
    /// `args[j-1]` holds `x_j`; entries beyond `args.len()` are taken as 0.
    pub fn new(n_max: usize, args: &[f64]) -> Self {
        let binom = binomials(n_max.max(1));
        let x = |j: usize| args.get(j - 1).copied().unwrap_or(0.0);
        let mut values = vec![vec![0.0; n_max + 1]; n_max + 1];
        values[0][0] = 1.0;
        for n in 1..=n_max {
            for k in 1..=n {
                let mut s = 0.0;
                for j in 1..=(n - k + 1) {
                    s += binom[n - 1][j - 1] * x(j) * values[n - j][k - 1];
                }
                values[n][k] = s;
            }
        }
        Self { n_max, values }
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// `B_{n,k}`; zero when `k > n`.
    pub fn get(&self, n: usize, k: usize) -> f64 {
        if k > n || n > self.n_max {
            return 0.0;
        }
        self.values[n][k]
    }
}

/// A single value `B_{n,k}(x_1, …, x_{n-k+1})` with `args[j-1] = x_j`.
pub fn bell(n: usize, k: usize, args: &[f64]) -> f64 {
    if k > n {
        return 0.0;
    }
    BellTriangle::new(n, args).get(n, k)
}

/// Derivatives `g_1..g_N` at 0 of the inverse of `f(w) = Σ f_k w^k/k!`
/// with `f_k = derivs[k-1]` and `f_1 != 0`.
pub(crate) fn lagrange_inversion(derivs: &[f64], count: usize) -> Vec<f64> {
    let f1 = derivs[0];
    let hat: Vec<f64> = (1..count)
        .map(|j| derivs.get(j).copied().unwrap_or(0.0) / ((j + 1) as f64 * f1))
        .collect();
    let table = BellTriangle::new(count.saturating_sub(1), &hat);
    let mut g = Vec::with_capacity(count);
    g.push(1.0 / f1);
    for n in 2..=count {
        let mut rising = 1.0;
        let mut sum = 0.0;
        for k in 1..n {
            rising *= (n + k - 1) as f64;
            let term = rising * table.get(n - 1, k);
            sum += if k % 2 == 1 { -term } else { term };
        }
        g.push(sum / f1.powi(n as i32));
    }
    g
}

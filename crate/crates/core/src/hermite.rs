//! Probabilists' Hermite polynomials normalized by `n!` and Gauss-Hermite
//! expectations under Gaussian laws.
//!
//! `H_0 = 1`, `H_{-1} = 0`, `n H_n(x) = x H_{n-1}(x) - H_{n-2}(x)`, so that
//! `H_n' = H_{n-1}` and `E[H_n(N) H_m(N)] = δ_{nm} / n!` for `N ~ N(0, 1)`.

use std::f64::consts::PI;

pub fn hermite(n: usize, x: f64) -> f64 {
    let (mut prev, mut cur) = (0.0, 1.0);
    for k in 1..=n {
        let next = (x * cur - prev) / k as f64;
        prev = cur;
        cur = next;
    }
    cur
}

/// `H_0(x), ..., H_n(x)`.
pub fn hermite_all(n: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let (mut prev, mut cur) = (0.0, 1.0);
    out.push(cur);
    for k in 1..=n {
        let next = (x * cur - prev) / k as f64;
        prev = cur;
        cur = next;
        out.push(cur);
    }
    out
}

/// Nodes and weights with `Σ w_i f(x_i) ≈ E f(N)`, `N ~ N(0, 1)`; exact for
/// polynomials of degree below `2n`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussHermite {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussHermite {
    /// Newton iteration on the orthonormal physicists' recurrence, then
    /// rescaled to the standard normal weight.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "need at least one node");
        let pim4 = PI.powf(-0.25);
        let mut x = vec![0.0; n];
        let mut w = vec![0.0; n];
        let nf = n as f64;
        let m = n.div_ceil(2);
        let mut z = 0.0;
        for i in 0..m {
            z = match i {
                0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-0.16667),
                1 => z - 1.14 * nf.powf(0.426) / z,
                2 => 1.86 * z - 0.86 * x[0],
                3 => 1.91 * z - 0.91 * x[1],
                _ => 2.0 * z - x[i - 2],
            };
            let mut pp = 0.0;
            for _ in 0..100 {
                let (mut p1, mut p2) = (pim4, 0.0);
                for j in 1..=n {
                    let p3 = p2;
                    p2 = p1;
                    let jf = j as f64;
                    p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
                }
                pp = (2.0 * nf).sqrt() * p2;
                let dz = p1 / pp;
                z -= dz;
                if dz.abs() <= 1e-15 * z.abs().max(1.0) {
                    break;
                }
            }
            x[i] = z;
            x[n - 1 - i] = -z;
            w[i] = 2.0 / (pp * pp);
            w[n - 1 - i] = w[i];
        }
        let nodes = x.iter().rev().map(|z| z * 2f64.sqrt()).collect();
        let weights = w.iter().rev().map(|v| v / PI.sqrt()).collect();
        Self { nodes, weights }
    }

    /// `E f(N)`.
    pub fn expect<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    /// `E f(G1, G2)` for a centred pair with `Var G1 = var1`, `Var G2 = 1`
    /// and `Cov(G1, G2) = cov`.
    pub fn expect_pair<F: Fn(f64, f64) -> f64>(&self, f: F, var1: f64, cov: f64) -> f64 {
        let resid = (var1 - cov * cov).max(0.0).sqrt();
        let mut acc = 0.0;
        for (&z2, &w2) in self.nodes.iter().zip(&self.weights) {
            let inner: f64 = self
                .nodes
                .iter()
                .zip(&self.weights)
                .map(|(&z1, &w1)| w1 * f(cov * z2 + resid * z1, z2))
                .sum();
            acc += w2 * inner;
        }
        acc
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Both sides of `n E[f(G1) H_n(G2)] = Cov(G1, G2) E[f'(G1) H_{n-1}(G2)]`.
pub fn wick_sides<F, D>(f: F, df: D, n: usize, var1: f64, cov: f64, rule: &GaussHermite) -> (f64, f64)
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    assert!(n >= 1);
    let lhs = n as f64 * rule.expect_pair(|g1, g2| f(g1) * hermite(n, g2), var1, cov);
    let rhs = cov * rule.expect_pair(|g1, g2| df(g1) * hermite(n - 1, g2), var1, cov);
    (lhs, rhs)
}

/// Both sides of `n! E[f(G1) H_n(G2)] = Cov(G1, G2)^n E[f^(n)(G1)]`, with
/// `dnf` the `n`-th derivative of `f`.
pub fn chaos_projection_sides<F, D>(f: F, dnf: D, n: usize, var1: f64, cov: f64, rule: &GaussHermite) -> (f64, f64)
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let lhs = factorial(n) * rule.expect_pair(|g1, g2| f(g1) * hermite(n, g2), var1, cov);
    let sd = var1.sqrt();
    let rhs = cov.powi(n as i32) * rule.expect(|z| dnf(sd * z));
    (lhs, rhs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_orders() {
        for x in [-1.7, 0.0, 0.4, 2.5] {
            assert_eq!(hermite(0, x), 1.0);
            assert_eq!(hermite(1, x), x);
            assert!((hermite(2, x) - (x * x - 1.0) / 2.0).abs() < 1e-15);
            assert!((hermite(3, x) - (x.powi(3) - 3.0 * x) / 6.0).abs() < 1e-14);
        }
        assert_eq!(hermite(2, 1.0), 0.0);
        assert_eq!(hermite(3, 0.0), 0.0);
        assert_eq!(hermite_all(5, 0.7)[5], hermite(5, 0.7));
    }

    #[test]
    fn rule_moments() {
        let gh = GaussHermite::new(20);
        assert!((gh.weights.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        assert!(gh.expect(|x| x).abs() < 1e-14);
        assert!((gh.expect(|x| x * x) - 1.0).abs() < 1e-13);
        assert!((gh.expect(|x| x.powi(4)) - 3.0).abs() < 1e-12);
        assert!((gh.expect(|x| x.powi(10)) - 945.0).abs() < 1e-9);
        assert!((gh.expect(f64::cos) - (-0.5f64).exp()).abs() < 1e-14);
        assert!(gh.nodes.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn pair_covariance() {
        let gh = GaussHermite::new(16);
        let v = gh.expect_pair(|a, b| a * b, 2.0, 0.6);
        assert!((v - 0.6).abs() < 1e-13);
        let v = gh.expect_pair(|a, _| a * a, 2.0, 0.6);
        assert!((v - 2.0).abs() < 1e-13);
    }
}

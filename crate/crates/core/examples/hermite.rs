//! Hermite polynomials, Gauss-Hermite expectations and the Wick identity.

use singcov::hermite::{hermite, wick_sides, GaussHermite};

fn main() {
    let rule = GaussHermite::new(40);
    for n in 0..=4 {
        let row: Vec<String> = (0..=4)
            .map(|k| format!("{:.6}", rule.expect(|x| hermite(n, x) * hermite(k, x))))
            .collect();
        println!("E[H_{n} H_k] = {}", row.join(" "));
    }
    for n in 1..=4 {
        let (lhs, rhs) = wick_sides(f64::sin, f64::cos, n, 1.5, 0.6, &rule);
        println!("n = {n}: n E[f(G1) H_n(G2)] = {lhs:+.10}   E[f'(G1) H_n-1(G2)] cov = {rhs:+.10}");
    }
}

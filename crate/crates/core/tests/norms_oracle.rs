//! The inner products against `Cov(∫f dX, ∫g dX)` computed from `R` alone.
//!
//! `∫f dX = f(∞) X_T - Σ X_t Δf(t) - ∫ X_s f'(s) ds` is a linear functional
//! of the path; its covariance with another one only needs `R` at pairs of
//! points, which is continuous, so plain Gauss-Legendre product rules
//! converge without any singular handling. They converge slowly across the
//! diagonal kink of `R`, so each comparison allows twice the change
//! between 100 and 200 panels.

use singcov::models::{CovModel, QShape};
use singcov::norms::{inner_h, inner_r};
use singcov::piecewise::PiecewiseFn;

const GL_X: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683,
    0.0,
    0.538_469_310_105_683,
    0.906_179_845_938_664,
];
const GL_W: [f64; 5] = [
    0.236_926_885_056_189,
    0.478_628_670_499_366,
    0.568_888_888_888_889,
    0.478_628_670_499_366,
    0.236_926_885_056_189,
];

/// Weighted point evaluations `(t, w)` with `∫f dX ≈ Σ w X_t`.
fn functional(f: &PiecewiseFn, horizon: f64, panels: usize) -> Vec<(f64, f64)> {
    let mut out = vec![(horizon, f.at_infinity())];
    for (t, jump) in f.atoms() {
        out.push((t.min(horizon), -jump));
    }
    for (a, b, slope) in f.slopes() {
        let (a, b) = (a.min(horizon), b.min(horizon));
        if b <= a {
            // beyond the horizon X is frozen at X_T
            continue;
        }
        let h = (b - a) / panels as f64;
        for p in 0..panels {
            let c = a + (p as f64 + 0.5) * h;
            for (x, w) in GL_X.iter().zip(GL_W) {
                out.push((c + 0.5 * h * x, -slope * 0.5 * h * w));
            }
        }
    }
    // slopes past the horizon integrate X_T
    for (a, b, slope) in f.slopes() {
        if b > horizon {
            out.push((horizon, -slope * (b - a.max(horizon))));
        }
    }
    out
}

fn oracle_at(model: &CovModel, f: &PiecewiseFn, g: &PiecewiseFn, panels: usize) -> f64 {
    let t = model.horizon();
    let a = functional(f, t, panels);
    let b = functional(g, t, panels);
    let mut acc = 0.0;
    for &(s, w) in &a {
        for &(u, v) in &b {
            acc += w * v * model.cov(s, u);
        }
    }
    acc
}

/// Fine value and its distance from the coarse one.
fn oracle(model: &CovModel, f: &PiecewiseFn, g: &PiecewiseFn) -> (f64, f64) {
    let coarse = oracle_at(model, f, g, 100);
    let fine = oracle_at(model, f, g, 200);
    (fine, (fine - coarse).abs())
}

fn models() -> Vec<CovModel> {
    vec![
        CovModel::fbm(0.3, 1.0).unwrap(),
        CovModel::fbm(0.5, 1.0).unwrap(),
        CovModel::fbm(0.7, 1.0).unwrap(),
        CovModel::fbm(0.3, 0.8).unwrap(),
        CovModel::bifbm(0.6, 5.0 / 6.0, 1.0).unwrap(),
        CovModel::bifbm(0.3, 0.5, 1.0).unwrap(),
        CovModel::statinc(QShape::Log, 1.0).unwrap(),
        CovModel::statinc(QShape::Log, 0.1).unwrap(),
        CovModel::statinc(QShape::Power { hurst: 0.4 }, 1.0).unwrap(),
    ]
}

fn functions() -> Vec<PiecewiseFn> {
    vec![
        PiecewiseFn::step(vec![0.0, 0.2, 0.55, 0.9], vec![1.0, -0.5, 2.0, 0.0]).unwrap(),
        PiecewiseFn::step(vec![0.1, 0.3], vec![1.0, 0.25]).unwrap(),
        PiecewiseFn::linear(vec![0.0, 0.5, 1.0], vec![0.0, 1.0, 0.0]).unwrap(),
        PiecewiseFn::linear(vec![0.25, 0.6, 1.3], vec![1.0, -1.0, 0.5]).unwrap(),
        PiecewiseFn::constant(1.0),
    ]
}

#[test]
fn inner_h_matches_path_functional_covariance() {
    for m in models() {
        let t = m.horizon();
        let fs: Vec<PiecewiseFn> = functions()
            .into_iter()
            .map(|f| {
                // rescale the breakpoints onto the model's horizon
                let b: Vec<f64> = f.breakpoints().iter().map(|x| x * t).collect();
                PiecewiseFn::new(f.kind(), b, f.values().to_vec()).unwrap()
            })
            .collect();
        for (i, f) in fs.iter().enumerate() {
            for g in &fs[i..] {
                let got = inner_h(f, g, &m).unwrap();
                let (want, moved) = oracle(&m, f, g);
                let scale = (oracle_at(&m, f, f, 50) * oracle_at(&m, g, g, 50)).sqrt();
                assert!(
                    (got - want).abs() <= 2.0 * moved + 1e-7 * scale + 1e-12,
                    "{}: f = {f:?}, g = {g:?}: {got} vs {want}",
                    m.descriptor()
                );
            }
        }
    }
}

#[test]
fn inner_r_equals_inner_h_under_sign_conditions() {
    for m in [
        CovModel::fbm(0.3, 1.0).unwrap(),
        CovModel::bifbm(0.6, 5.0 / 6.0, 1.0).unwrap(),
        CovModel::statinc(QShape::Log, 1.0).unwrap(),
    ] {
        for f in functions() {
            let h = inner_h(&f, &f, &m).unwrap();
            let r = inner_r(&f, &f, &m).unwrap();
            assert!((h - r).abs() <= 1e-9 * h.abs().max(1e-12), "{}: {h} vs {r}", m.descriptor());
        }
    }
}

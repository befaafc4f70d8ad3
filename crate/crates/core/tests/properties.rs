//! Invariants checked on random inputs.

use proptest::prelude::*;

use singcov::hermite::hermite;
use singcov::integrals::paley_wiener;
use singcov::models::{CovModel, QShape};
use singcov::norms::{inner_h, norm_h_sq, norm_r_sq};
use singcov::piecewise::PiecewiseFn;
use singcov::simulation::{sample_paths, SimGrid};
use singcov::verification::{Experiment, ExperimentReport, IsometryConfig};

fn model() -> impl Strategy<Value = CovModel> {
    prop_oneof![
        (0.15f64..0.85).prop_map(|h| CovModel::fbm(h, 1.0).unwrap()),
        (0.2f64..0.9, 0.2f64..1.0).prop_map(|(h, k)| CovModel::bifbm(h, k, 1.0).unwrap()),
        (0.3f64..2.0).prop_map(|t| CovModel::statinc(QShape::Log, t).unwrap()),
        (0.15f64..0.85).prop_map(|h| CovModel::statinc(QShape::Power { hurst: h }, 1.0).unwrap()),
    ]
}

/// Step functions with breakpoints in `[0, 1.3]`, some past the horizon.
fn step_fn() -> impl Strategy<Value = PiecewiseFn> {
    (0.0f64..0.3, prop::collection::vec((0.02f64..0.35, -2.0f64..2.0), 1..5)).prop_map(|(start, pieces)| {
        let mut b = vec![start];
        let mut v = Vec::new();
        for (gap, val) in pieces {
            b.push(b.last().unwrap() + gap);
            v.push(val);
        }
        v.push(0.0);
        PiecewiseFn::step(b, v).unwrap()
    })
}

fn close(a: f64, b: f64, scale: f64) -> bool {
    (a - b).abs() <= 1e-7 * scale.max(1e-3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn covariance_is_symmetric_and_stopped(m in model(), s in 0.0f64..3.0, t in 0.0f64..3.0) {
        let horizon = m.horizon();
        prop_assert_eq!(m.cov(s, t), m.cov(t, s));
        let stopped = m.cov(s.min(horizon), t.min(horizon));
        prop_assert!((m.cov(s, t) - stopped).abs() <= 1e-14 * stopped.abs().max(1.0));
        prop_assert_eq!(m.cov(0.0, t), 0.0);
        // Cauchy-Schwarz for R itself
        prop_assert!(m.cov(s, t).powi(2) <= m.gamma(s) * m.gamma(t) * (1.0 + 1e-12) + 1e-15);
    }

    #[test]
    fn power_statinc_is_fbm(h in 0.1f64..0.9, s in 0.0f64..1.0, t in 0.0f64..1.0) {
        let a = CovModel::fbm(h, 1.0).unwrap();
        let b = CovModel::statinc(QShape::Power { hurst: h }, 1.0).unwrap();
        prop_assert!((a.cov(s, t) - b.cov(s, t)).abs() <= 1e-13);
    }

    #[test]
    fn hermite_recurrence_and_derivative(n in 2usize..12, x in -4.0f64..4.0) {
        let lhs = n as f64 * hermite(n, x);
        let rhs = x * hermite(n - 1, x) - hermite(n - 2, x);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs.abs()));
        let d = 1e-5;
        let fd = (hermite(n, x + d) - hermite(n, x - d)) / (2.0 * d);
        prop_assert!((fd - hermite(n - 1, x)).abs() <= 1e-6 * (1.0 + fd.abs()));
    }

    #[test]
    fn paley_wiener_is_linear(f in step_fn(), g in step_fn(), a in -2.0f64..2.0, seed in 0u64..1000) {
        let m = CovModel::fbm(0.3, 1.0).unwrap();
        let grid = SimGrid::new(1.0, 64).unwrap();
        let path = &sample_paths(&m, &grid, 1, seed).unwrap().paths[0];
        let Some(h) = PiecewiseFn::combine(a, &f, 1.0, &g) else { return Ok(()) };
        let lhs = paley_wiener(path, &grid, &h).unwrap();
        let rhs = a * paley_wiener(path, &grid, &f).unwrap() + paley_wiener(path, &grid, &g).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + rhs.abs()));
    }
}

proptest! {
    // each case runs several adaptive quadratures
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn h_norm_is_dominated_by_r_norm(m in model(), f in step_fn()) {
        let h = norm_h_sq(&f, &m).unwrap();
        let r = norm_r_sq(&f, &m).unwrap();
        prop_assert!(h >= -1e-10);
        prop_assert!(h <= r * (1.0 + 1e-7) + 1e-10, "{} > {}", h, r);
    }

    #[test]
    fn inner_product_cauchy_schwarz(m in model(), f in step_fn(), g in step_fn()) {
        let fg = inner_h(&f, &g, &m).unwrap();
        let ff = norm_h_sq(&f, &m).unwrap();
        let gg = norm_h_sq(&g, &m).unwrap();
        prop_assert!(fg * fg <= ff * gg * (1.0 + 1e-6) + 1e-10);
    }

    #[test]
    fn inner_product_is_bilinear(m in model(), f in step_fn(), g in step_fn(), k in step_fn(), a in -2.0f64..2.0) {
        let Some(h) = PiecewiseFn::combine(a, &f, 1.0, &g) else { return Ok(()) };
        let lhs = inner_h(&h, &k, &m).unwrap();
        let rhs = a * inner_h(&f, &k, &m).unwrap() + inner_h(&g, &k, &m).unwrap();
        let scale = (norm_h_sq(&h, &m).unwrap() * norm_h_sq(&k, &m).unwrap()).sqrt();
        prop_assert!(close(lhs, rhs, scale), "{} vs {}", lhs, rhs);
    }

    #[test]
    fn unknown_config_keys_are_rejected(key in "[a-z]{3,12}") {
        let known = ["experiment", "model", "f", "paths", "grid", "seed", "se_multiplier"];
        prop_assume!(!known.contains(&key.as_str()));
        let text = format!(
            r#"{{"experiment": "isometry", "model": {{"family": "fbm", "T": 1.0, "H": 0.3}},
               "f": {{"kind": "step", "breakpoints": [0.0, 0.5], "values": [1.0, 0.0]}}, "{key}": 1}}"#
        );
        let err = serde_json::from_str::<Experiment>(&text).unwrap_err().to_string();
        prop_assert!(err.contains(&key), "{}", err);
    }
}

fn isometry(paths: usize) -> Experiment {
    Experiment::Isometry(IsometryConfig {
        model: CovModel::fbm(0.3, 1.0).unwrap().to_spec(),
        f: PiecewiseFn::step(vec![0.0, 0.25, 0.75], vec![1.0, -0.5, 0.0]).unwrap(),
        paths,
        grid: 128,
        seed: 9,
        se_multiplier: 3.0,
    })
}

#[test]
fn standard_error_scales_like_inverse_root_paths() {
    let se = |m| isometry(m).run().unwrap().estimates[0].std_error.unwrap();
    let ratio = se(5_000) / se(20_000);
    assert!((2.0 / 1.3..=2.0 * 1.3).contains(&ratio), "ratio {ratio}");
}

#[test]
fn report_reruns_bit_for_bit() {
    let mut first = isometry(2_000).run().unwrap();
    first.strip_timing();
    let text = first.to_json().unwrap();
    let parsed: ExperimentReport = serde_json::from_str(&text).unwrap();
    let mut again = parsed.params.run().unwrap();
    again.strip_timing();
    assert_eq!(again.to_json().unwrap(), text);
    for (a, b) in first.estimates.iter().zip(&again.estimates) {
        assert_eq!(a.value.to_bits(), b.value.to_bits());
    }
}

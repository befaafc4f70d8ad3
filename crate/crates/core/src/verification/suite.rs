use std::io::Write;

use serde::{Deserialize, Serialize};

use super::*;
use crate::models::{CovModel, Kappa, ModelSpec, QShape, Verdict};
use crate::piecewise::{PiecewiseFn, PlanarStepFn};
use crate::smooth::SmoothFn;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub preset: String,
    pub seed: u64,
    pub reports: Vec<ExperimentReport>,
}

impl SuiteReport {
    pub fn run(preset: &str, experiments: &[Experiment], seed: u64) -> Result<Self, VerificationError> {
        let reports = experiments
            .iter()
            .map(|e| e.clone().with_seed(seed).run())
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            preset: preset.to_string(),
            seed,
            reports,
        })
    }

    pub fn passed(&self) -> bool {
        self.reports.iter().all(ExperimentReport::passed)
    }

    pub fn strip_timing(&mut self) {
        self.reports.iter_mut().for_each(ExperimentReport::strip_timing);
    }

    pub fn to_json(&self) -> Result<String, VerificationError> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), VerificationError> {
        let mut out = csv::Writer::from_writer(w);
        write_csv_header(&mut out)?;
        for r in &self.reports {
            r.write_csv_rows(&mut out)?;
        }
        out.flush()?;
        Ok(())
    }
}

fn spec(model: Result<CovModel, crate::models::ModelError>) -> ModelSpec {
    model.expect("preset parameters are valid").to_spec()
}

fn fbm(h: f64) -> ModelSpec {
    spec(CovModel::fbm(h, 1.0))
}

fn bifbm(h: f64, k: f64) -> ModelSpec {
    spec(CovModel::bifbm(h, k, 1.0))
}

fn statinc(shape: QShape) -> ModelSpec {
    spec(CovModel::statinc(shape, 1.0))
}

fn ladder(from: u32, to: u32) -> Vec<f64> {
    (from..=to).map(|k| 2f64.powi(-(k as i32))).collect()
}

fn step(b: &[f64], v: &[f64]) -> PiecewiseFn {
    PiecewiseFn::step(b.to_vec(), v.to_vec()).expect("preset step function is valid")
}

/// The acceptance experiments, all on `T = 1`.
pub fn paper_suite(seed: u64) -> Vec<Experiment> {
    let mut out = Vec::new();
    let log = || statinc(QShape::Log);

    out.push(Experiment::IndicatorReproduction(IndicatorConfig {
        models: vec![fbm(0.3), fbm(0.5), fbm(0.7), bifbm(0.6, 5.0 / 6.0), log()],
        points: 10,
        rel_tol: 1e-3,
    }));

    let fs = [
        step(&[0.0, 0.5], &[1.0, 0.0]),
        step(&[0.0, 0.25, 0.75], &[1.0, -0.5, 0.0]),
        step(&[0.125, 0.5, 0.625, 1.0], &[2.0, -1.0, 0.5, 0.0]),
    ];
    for model in [fbm(0.3), fbm(0.7), bifbm(0.6, 5.0 / 6.0), log()] {
        for f in &fs {
            out.push(Experiment::Isometry(IsometryConfig {
                model: model.clone(),
                f: f.clone(),
                paths: 20_000,
                grid: 256,
                seed,
                se_multiplier: 3.0,
            }));
        }
    }

    for h in [0.3, 0.5] {
        out.push(Experiment::SkorohodMeanZero(SkorohodConfig {
            model: fbm(h),
            f: SmoothFn::Cos,
            eps: 1.0 / 256.0,
            t: 1.0,
            paths: 20_000,
            grid: 256,
            seed,
            se_multiplier: 3.0,
        }));
    }

    out.push(Experiment::ItoSymmetric(ItoConfig {
        model: fbm(0.3),
        f: SmoothFn::Sin,
        eps: ladder(4, 8),
        t: 1.0,
        paths: 20_000,
        grid: 256,
        seed,
        rms_fraction: 0.05,
    }));

    let qv = |model: ModelSpec, reference: Option<f64>, expected: QvBehaviour| {
        Experiment::QuadraticVariation(QvConfig {
            model,
            eps: ladder(4, 8),
            t: 1.0,
            reference,
            expected: Some(expected),
            paths: 20_000,
            grid: 256,
            seed,
            rel_tol: 0.05,
            divergence_ratio: 1.3,
            vanishing_fraction: 0.5,
        })
    };
    out.push(qv(fbm(0.5), Some(1.0), QvBehaviour::ConvergesToReference));
    out.push(qv(
        bifbm(0.6, 5.0 / 6.0),
        Some(2f64.powf(1.0 - 5.0 / 6.0)),
        QvBehaviour::ConvergesToReference,
    ));
    out.push(qv(fbm(0.3), None, QvBehaviour::Diverges));
    out.push(qv(fbm(0.7), None, QvBehaviour::ConvergesToZero));

    for model in [
        statinc(QShape::Power { hurst: 0.4 }),
        statinc(QShape::Power { hurst: 0.2 }),
        log(),
    ] {
        out.push(Experiment::MembershipProbe(MembershipConfig {
            model,
            cutoffs: ladder(3, 8),
            paths: 2_000,
            grid: 256,
            seed,
        }));
    }

    for (h, tau) in [(0.3, 0.5), (0.5, 1.0)] {
        out.push(Experiment::TraceConvergence(TraceConfig {
            model: fbm(h),
            tau,
            eps: ladder(5, 10),
            rel_tol: 0.02,
        }));
    }

    for h in [0.3, 0.45] {
        out.push(Experiment::Ll1Ratio(Ll1Config {
            model: fbm(h),
            eps: ladder(4, 8),
            paths: 20_000,
            grid: 256,
            seed,
            se_multiplier: 3.0,
        }));
    }

    out.push(Experiment::HermiteIdentities(HermiteConfig {
        seed,
        ..HermiteConfig::default()
    }));

    let triples = [
        (SmoothFn::identity(), step(&[0.0, 0.5], &[1.0, 0.0]), step(&[0.0, 0.5], &[1.0, 0.0])),
        (SmoothFn::Sin, step(&[0.0, 0.4], &[1.0, 0.0]), step(&[0.0, 0.8], &[1.0, 0.0])),
        (
            SmoothFn::Cos,
            PiecewiseFn::linear(vec![0.0, 0.5, 1.0], vec![0.0, 1.0, 0.0]).expect("valid"),
            step(&[0.25, 0.75], &[1.0, 0.0]),
        ),
    ];
    for (f, phi, h) in triples {
        out.push(Experiment::Duality(DualityConfig {
            model: fbm(0.3),
            f,
            phi,
            h,
            paths: 20_000,
            grid: 256,
            seed,
            se_multiplier: 3.0,
        }));
    }

    let bump = SmoothFn::Polynomial {
        coefficients: vec![0.0, 1.0, -1.0],
    };
    for kappa in [Kappa::Indicator, Kappa::Triangle] {
        out.push(Experiment::KernelIdentity(KernelIdentityConfig {
            kappa,
            horizon: 1.0,
            phi: bump.clone(),
            paths: 2_000,
            grid: 128,
            seed,
            halving_slack: 0.05,
        }));
    }

    let planar = [
        PlanarStepFn::rectangle(0.5, 0.5).expect("valid"),
        PlanarStepFn::new(
            vec![0.0, 0.25, 0.75],
            vec![0.125, 0.5, 1.0],
            vec![vec![1.0, -2.0], vec![0.5, 1.0]],
        )
        .expect("valid"),
    ];
    for h in planar {
        out.push(Experiment::DoubleIntegral(DoubleIntegralConfig {
            model: fbm(0.3),
            h,
            paths: 20_000,
            grid: 256,
            seed,
            se_multiplier: 3.0,
        }));
    }

    let d = |v: Verdict| ExpectedVerdicts {
        d: Some(v),
        ..ExpectedVerdicts::default()
    };
    for (model, v) in [
        (fbm(0.3), Verdict::Verified),
        (fbm(0.5), Verdict::Verified),
        (bifbm(0.6, 5.0 / 6.0), Verdict::Verified),
        (bifbm(0.3, 0.5), Verdict::Verified),
        (log(), Verdict::Verified),
        (fbm(0.7), Verdict::Violated),
    ] {
        out.push(Experiment::Assumptions(AssumptionsConfig {
            model,
            grid: 64,
            expected: d(v),
        }));
    }
    out
}

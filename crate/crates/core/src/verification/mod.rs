//! Monte Carlo and quadrature experiments with structured reports.
//!
//! Every experiment is driven by a serializable configuration; the report
//! embeds that configuration, so `report.params.run()` repeats the run and
//! reproduces every estimate bit for bit.

mod experiments;
pub mod stats;
mod suite;

use std::io::Write;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use experiments::*;
pub use suite::{paper_suite, SuiteReport};

use crate::integrals::IntegralError;
use crate::models::ModelError;
use crate::quadrature::QuadError;
use crate::simulation::SimError;

#[derive(Debug, Error)]
pub enum VerificationError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Simulation(#[from] SimError),
    #[error(transparent)]
    Integral(#[from] IntegralError),
    #[error(transparent)]
    Quadrature(#[from] QuadError),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// One estimated quantity, with its reference when there is one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub label: String,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub std_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub reference: Option<f64>,
    /// How the reference was obtained, e.g. `closed-form` or `quadrature`.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub reference_source: Option<String>,
}

impl Estimate {
    pub fn new(label: impl Into<String>, value: f64) -> Self {
        Self {
            label: label.into(),
            value,
            std_error: None,
            reference: None,
            reference_source: None,
        }
    }

    pub fn se(mut self, se: f64) -> Self {
        self.std_error = Some(se);
        self
    }

    pub fn against(mut self, reference: f64, source: &str) -> Self {
        self.reference = Some(reference);
        self.reference_source = Some(source.to_string());
        self
    }
}

/// A pass/fail judgement: `measured <= tolerance` under `rule`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub tolerance: f64,
    pub rule: String,
}

impl Check {
    /// Passes when `measured <= tolerance`.
    pub fn at_most(name: impl Into<String>, measured: f64, tolerance: f64, rule: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed: measured <= tolerance,
            measured,
            tolerance,
            rule: rule.into(),
        }
    }

    /// Passes when `measured >= tolerance`.
    pub fn at_least(name: impl Into<String>, measured: f64, tolerance: f64, rule: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed: measured >= tolerance,
            measured,
            tolerance,
            rule: rule.into(),
        }
    }

    pub fn holds(name: impl Into<String>, passed: bool, rule: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            measured: if passed { 1.0 } else { 0.0 },
            tolerance: 1.0,
            rule: rule.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub started_unix: u64,
    pub wall_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub name: String,
    pub model: String,
    pub params: Experiment,
    pub estimates: Vec<Estimate>,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub timing: Option<Timing>,
}

impl ExperimentReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn estimate(&self, label: &str) -> Option<&Estimate> {
        self.estimates.iter().find(|e| e.label == label)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn strip_timing(&mut self) {
        self.timing = None;
    }

    pub fn to_json(&self) -> Result<String, VerificationError> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Estimate table; one header row then one row per estimate.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), VerificationError> {
        let mut out = csv::Writer::from_writer(w);
        write_csv_header(&mut out)?;
        self.write_csv_rows(&mut out)?;
        out.flush()?;
        Ok(())
    }

    fn write_csv_rows<W: Write>(&self, out: &mut csv::Writer<W>) -> Result<(), VerificationError> {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for e in &self.estimates {
            out.write_record([
                self.name.as_str(),
                self.model.as_str(),
                e.label.as_str(),
                &e.value.to_string(),
                &opt(e.std_error),
                &opt(e.reference),
                e.reference_source.as_deref().unwrap_or(""),
            ])?;
        }
        Ok(())
    }
}

fn write_csv_header<W: Write>(out: &mut csv::Writer<W>) -> Result<(), VerificationError> {
    out.write_record([
        "experiment",
        "model",
        "label",
        "estimate",
        "std_error",
        "reference",
        "reference_source",
    ])?;
    Ok(())
}

/// Any experiment with its full parameter block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "experiment", rename_all = "snake_case")]
pub enum Experiment {
    IndicatorReproduction(IndicatorConfig),
    Isometry(IsometryConfig),
    ItoSymmetric(ItoConfig),
    SkorohodMeanZero(SkorohodConfig),
    QuadraticVariation(QvConfig),
    MembershipProbe(MembershipConfig),
    Ll1Ratio(Ll1Config),
    TraceConvergence(TraceConfig),
    HermiteIdentities(HermiteConfig),
    Duality(DualityConfig),
    KernelIdentity(KernelIdentityConfig),
    DoubleIntegral(DoubleIntegralConfig),
    Assumptions(AssumptionsConfig),
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::IndicatorReproduction(_) => "indicator_reproduction",
            Experiment::Isometry(_) => "isometry",
            Experiment::ItoSymmetric(_) => "ito_symmetric",
            Experiment::SkorohodMeanZero(_) => "skorohod_mean_zero",
            Experiment::QuadraticVariation(_) => "quadratic_variation",
            Experiment::MembershipProbe(_) => "membership_probe",
            Experiment::Ll1Ratio(_) => "ll1_ratio",
            Experiment::TraceConvergence(_) => "trace_convergence",
            Experiment::HermiteIdentities(_) => "hermite_identities",
            Experiment::Duality(_) => "duality",
            Experiment::KernelIdentity(_) => "kernel_identity",
            Experiment::DoubleIntegral(_) => "double_integral",
            Experiment::Assumptions(_) => "assumptions",
        }
    }

    /// Replaces the master seed of Monte Carlo experiments.
    pub fn with_seed(mut self, seed: u64) -> Self {
        match &mut self {
            Experiment::Isometry(c) => c.seed = seed,
            Experiment::ItoSymmetric(c) => c.seed = seed,
            Experiment::SkorohodMeanZero(c) => c.seed = seed,
            Experiment::QuadraticVariation(c) => c.seed = seed,
            Experiment::MembershipProbe(c) => c.seed = seed,
            Experiment::Ll1Ratio(c) => c.seed = seed,
            Experiment::HermiteIdentities(c) => c.seed = seed,
            Experiment::Duality(c) => c.seed = seed,
            Experiment::KernelIdentity(c) => c.seed = seed,
            Experiment::DoubleIntegral(c) => c.seed = seed,
            Experiment::IndicatorReproduction(_) | Experiment::TraceConvergence(_) | Experiment::Assumptions(_) => {}
        }
        self
    }

    pub fn run(&self) -> Result<ExperimentReport, VerificationError> {
        let started_unix = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let clock = Instant::now();
        let out = match self {
            Experiment::IndicatorReproduction(c) => exp_indicator_reproduction(c),
            Experiment::Isometry(c) => exp_isometry(c),
            Experiment::ItoSymmetric(c) => exp_ito_symmetric(c),
            Experiment::SkorohodMeanZero(c) => exp_skorohod_mean_zero(c),
            Experiment::QuadraticVariation(c) => exp_qv(c),
            Experiment::MembershipProbe(c) => exp_membership_probe(c),
            Experiment::Ll1Ratio(c) => exp_ll1_ratio(c),
            Experiment::TraceConvergence(c) => exp_trace_convergence(c),
            Experiment::HermiteIdentities(c) => exp_hermite_identities(c),
            Experiment::Duality(c) => exp_duality(c),
            Experiment::KernelIdentity(c) => exp_kernel_identity(c),
            Experiment::DoubleIntegral(c) => exp_double_integral(c),
            Experiment::Assumptions(c) => exp_assumptions(c),
        }?;
        Ok(ExperimentReport {
            name: self.name().to_string(),
            model: out.model,
            params: self.clone(),
            estimates: out.estimates,
            checks: out.checks,
            notes: out.notes,
            timing: Some(Timing {
                started_unix,
                wall_seconds: clock.elapsed().as_secs_f64(),
            }),
        })
    }
}

/// What an experiment body produces before the report is assembled.
#[derive(Debug, Default)]
pub struct Outcome {
    pub model: String,
    pub estimates: Vec<Estimate>,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
}

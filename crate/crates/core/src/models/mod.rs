//! Covariance model families and their closed-form quantities.
//!
//! Every model is stopped at its horizon `T` (`X_t = X_T` for `t >= T`) and
//! exposes, where available:
//!
//! * the covariance `R(s, t)` and variance `gamma(t) = R(t, t)`,
//! * the density of the boundary measure `R(ds, ∞)` on `]0, T[`,
//! * the density of `∂²R/∂s1∂s2` off the diagonal, plus any line masses,
//! * the variance function `Q` of the stationary-increment families.
//!
//! The `Kernel` family (`X_t = ∫ κ(t-s) dW_s`) only has a covariance,
//! computed by quadrature; norm operations refuse it.

mod assumptions;
mod qkernel;

pub use assumptions::{
    check_assumptions, classify_tail, membership_condition, AssumptionCheck, AssumptionReport,
    MembershipResult, MembershipVerdict, Verdict, Witness,
};
pub use qkernel::{log_knee, QKernel, QShape};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quadrature::{integrate_1d_nodes, Endpoints, Node, QuadError, Tolerance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    FBm,
    BifBm,
    StatInc,
    Kernel,
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Family::FBm => "fbm",
            Family::BifBm => "bifbm",
            Family::StatInc => "statinc",
            Family::Kernel => "kernel",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Capabilities {
    pub has_closed_r: bool,
    pub has_r_inf_density: bool,
    pub has_mu_density: bool,
    pub has_q: bool,
}

/// Moving-average kernel `κ` of the `Kernel` family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Kappa {
    /// `κ ≡ 1` on `[0, ∞)`: the process is a Brownian motion.
    Indicator,
    /// `κ(u) = u^exponent`.
    Power { exponent: f64 },
    /// `κ(u) = (1 - u)_+`.
    Triangle,
}

impl Kappa {
    pub fn value(&self, u: f64) -> f64 {
        if u < 0.0 {
            return 0.0;
        }
        match *self {
            Kappa::Indicator => 1.0,
            Kappa::Power { exponent } => {
                if u == 0.0 {
                    if exponent == 0.0 {
                        1.0
                    } else if exponent > 0.0 {
                        0.0
                    } else {
                        f64::INFINITY
                    }
                } else {
                    u.powf(exponent)
                }
            }
            Kappa::Triangle => (1.0 - u).max(0.0),
        }
    }

    /// Derivative on `]0, ∞[` away from kinks.
    pub fn derivative(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return 0.0;
        }
        match *self {
            Kappa::Indicator => 0.0,
            Kappa::Power { exponent } => exponent * u.powf(exponent - 1.0),
            Kappa::Triangle => {
                if u < 1.0 {
                    -1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// Whether `κ` blows up at the origin.
    pub fn singular_at_zero(&self) -> bool {
        matches!(*self, Kappa::Power { exponent } if exponent < 0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelKind {
    FBm { hurst: f64 },
    BifBm { hurst: f64, k: f64 },
    StatInc(QKernel),
    Kernel(Kappa),
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("the {family} model has no {capability}")]
    CapabilityMissing {
        family: Family,
        capability: &'static str,
    },
    #[error("point ({s1}, {s2}) lies on the diagonal")]
    Diagonal { s1: f64, s2: f64 },
    #[error("model specification: {0}")]
    Spec(String),
    #[error(transparent)]
    Quadrature(#[from] QuadError),
}

/// JSON model specification.
///
/// `{"family": "fbm"|"bifbm"|"statinc"|"kernel", "T": .., "H": .., "K": ..,
///   "q_kernel": {"kind": "power"|"log"}, "kappa": {"kind": .., "exponent": ..}}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub family: Family,
    #[serde(rename = "T")]
    pub horizon: f64,
    #[serde(rename = "H", default, skip_serializing_if = "Option::is_none")]
    pub hurst: Option<f64>,
    #[serde(rename = "K", default, skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q_kernel: Option<QKernelSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<Kappa>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QKernelSpec {
    pub kind: QKernelKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QKernelKind {
    Power,
    Log,
}

/// A covariance model stopped at its horizon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovModel {
    horizon: f64,
    kind: ModelKind,
}

fn check_horizon(t: f64) -> Result<(), ModelError> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(ModelError::InvalidParameter {
            name: "T",
            value: t,
            reason: "horizon must be positive and finite",
        })
    }
}

fn check_hurst(h: f64) -> Result<(), ModelError> {
    if h > 0.0 && h < 1.0 {
        Ok(())
    } else {
        Err(ModelError::InvalidParameter {
            name: "H",
            value: h,
            reason: "Hurst parameter must lie in ]0, 1[",
        })
    }
}

impl CovModel {
    pub fn fbm(hurst: f64, horizon: f64) -> Result<Self, ModelError> {
        check_horizon(horizon)?;
        check_hurst(hurst)?;
        Ok(Self {
            horizon,
            kind: ModelKind::FBm { hurst },
        })
    }

    pub fn bifbm(hurst: f64, k: f64, horizon: f64) -> Result<Self, ModelError> {
        check_horizon(horizon)?;
        check_hurst(hurst)?;
        if !(k > 0.0 && k <= 1.0) {
            return Err(ModelError::InvalidParameter {
                name: "K",
                value: k,
                reason: "K must lie in ]0, 1]",
            });
        }
        Ok(Self {
            horizon,
            kind: ModelKind::BifBm { hurst, k },
        })
    }

    pub fn statinc(shape: QShape, horizon: f64) -> Result<Self, ModelError> {
        check_horizon(horizon)?;
        if let QShape::Power { hurst } = shape {
            check_hurst(hurst)?;
        }
        Ok(Self {
            horizon,
            kind: ModelKind::StatInc(QKernel::new(shape, horizon)),
        })
    }

    pub fn kernel(kappa: Kappa, horizon: f64) -> Result<Self, ModelError> {
        check_horizon(horizon)?;
        if let Kappa::Power { exponent } = kappa {
            if !(exponent > -0.5) || !exponent.is_finite() {
                return Err(ModelError::InvalidParameter {
                    name: "exponent",
                    value: exponent,
                    reason: "κ(u) = u^e is square integrable only for e > -1/2",
                });
            }
        }
        Ok(Self {
            horizon,
            kind: ModelKind::Kernel(kappa),
        })
    }

    pub fn from_spec(spec: &ModelSpec) -> Result<Self, ModelError> {
        let need = |v: Option<f64>, name: &str| {
            v.ok_or_else(|| ModelError::Spec(format!("family {} requires {name}", spec.family)))
        };
        match spec.family {
            Family::FBm => Self::fbm(need(spec.hurst, "H")?, spec.horizon),
            Family::BifBm => Self::bifbm(need(spec.hurst, "H")?, need(spec.k, "K")?, spec.horizon),
            Family::StatInc => {
                let kind = spec
                    .q_kernel
                    .ok_or_else(|| ModelError::Spec("family statinc requires q_kernel".into()))?
                    .kind;
                let shape = match kind {
                    QKernelKind::Power => QShape::Power {
                        hurst: need(spec.hurst, "H")?,
                    },
                    QKernelKind::Log => QShape::Log,
                };
                Self::statinc(shape, spec.horizon)
            }
            Family::Kernel => {
                let kappa = spec
                    .kappa
                    .ok_or_else(|| ModelError::Spec("family kernel requires kappa".into()))?;
                Self::kernel(kappa, spec.horizon)
            }
        }
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        let spec: ModelSpec =
            serde_json::from_str(text).map_err(|e| ModelError::Spec(e.to_string()))?;
        Self::from_spec(&spec)
    }

    pub fn to_spec(&self) -> ModelSpec {
        let mut spec = ModelSpec {
            family: self.family(),
            horizon: self.horizon,
            hurst: None,
            k: None,
            q_kernel: None,
            kappa: None,
        };
        match self.kind {
            ModelKind::FBm { hurst } => spec.hurst = Some(hurst),
            ModelKind::BifBm { hurst, k } => {
                spec.hurst = Some(hurst);
                spec.k = Some(k);
            }
            ModelKind::StatInc(q) => match q.shape() {
                QShape::Power { hurst } => {
                    spec.hurst = Some(hurst);
                    spec.q_kernel = Some(QKernelSpec {
                        kind: QKernelKind::Power,
                    });
                }
                QShape::Log => {
                    spec.q_kernel = Some(QKernelSpec {
                        kind: QKernelKind::Log,
                    })
                }
            },
            ModelKind::Kernel(kappa) => spec.kappa = Some(kappa),
        }
        spec
    }

    /// Short human-readable label, e.g. `fbm(H=0.3,T=1)`.
    pub fn descriptor(&self) -> String {
        let t = self.horizon;
        match self.kind {
            ModelKind::FBm { hurst } => format!("fbm(H={hurst},T={t})"),
            ModelKind::BifBm { hurst, k } => format!("bifbm(H={hurst},K={k},T={t})"),
            ModelKind::StatInc(q) => match q.shape() {
                QShape::Power { hurst } => format!("statinc(power,H={hurst},T={t})"),
                QShape::Log => format!("statinc(log,T={t})"),
            },
            ModelKind::Kernel(kappa) => match kappa {
                Kappa::Indicator => format!("kernel(indicator,T={t})"),
                Kappa::Power { exponent } => format!("kernel(power,e={exponent},T={t})"),
                Kappa::Triangle => format!("kernel(triangle,T={t})"),
            },
        }
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn kind(&self) -> &ModelKind {
        &self.kind
    }

    pub fn family(&self) -> Family {
        match self.kind {
            ModelKind::FBm { .. } => Family::FBm,
            ModelKind::BifBm { .. } => Family::BifBm,
            ModelKind::StatInc(_) => Family::StatInc,
            ModelKind::Kernel(_) => Family::Kernel,
        }
    }

    pub fn capabilities(&self) -> Capabilities {
        let measures = !matches!(self.kind, ModelKind::Kernel(_));
        Capabilities {
            has_closed_r: measures,
            has_r_inf_density: measures,
            has_mu_density: measures,
            has_q: matches!(self.kind, ModelKind::FBm { .. } | ModelKind::StatInc(_)),
        }
    }

    /// Variance function of the stationary-increment families (fBm has
    /// `Q(t) = t^{2H}`).
    pub fn q_kernel(&self) -> Result<QKernel, ModelError> {
        match self.kind {
            ModelKind::FBm { hurst } => Ok(QKernel::new(QShape::Power { hurst }, self.horizon)),
            ModelKind::StatInc(q) => Ok(q),
            _ => Err(self.missing("variance function Q")),
        }
    }

    fn missing(&self, capability: &'static str) -> ModelError {
        ModelError::CapabilityMissing {
            family: self.family(),
            capability,
        }
    }

    fn clamp(&self, t: f64) -> f64 {
        t.max(0.0).min(self.horizon)
    }

    /// Covariance `R(s, t)` of the stopped process.
    pub fn cov(&self, s: f64, t: f64) -> f64 {
        let (s, t) = (self.clamp(s), self.clamp(t));
        if s == 0.0 || t == 0.0 {
            return 0.0;
        }
        // evaluate in a canonical order so that symmetry is exact
        let (lo, hi) = if s <= t { (s, t) } else { (t, s) };
        match self.kind {
            ModelKind::FBm { hurst } => {
                let e = 2.0 * hurst;
                0.5 * (lo.powf(e) + hi.powf(e) - (hi - lo).powf(e))
            }
            ModelKind::BifBm { hurst, k } => {
                let e = 2.0 * hurst;
                2f64.powf(-k) * ((lo.powf(e) + hi.powf(e)).powf(k) - (hi - lo).powf(e * k))
            }
            ModelKind::StatInc(q) => 0.5 * (q.q(lo) + q.q(hi) - q.q(hi - lo)),
            ModelKind::Kernel(kappa) => kernel_cov(kappa, lo, hi),
        }
    }

    /// `gamma(t) = Var(X_t)`.
    pub fn gamma(&self, t: f64) -> f64 {
        let t = self.clamp(t);
        if t == 0.0 {
            return 0.0;
        }
        match self.kind {
            ModelKind::FBm { hurst } => t.powf(2.0 * hurst),
            ModelKind::BifBm { hurst, k } => t.powf(2.0 * hurst * k),
            ModelKind::StatInc(q) => q.q(t),
            ModelKind::Kernel(_) => self.cov(t, t),
        }
    }

    /// Density of `R(ds, ∞)` at `s`; zero beyond the horizon.
    pub fn r_inf_density(&self, s: f64) -> Result<f64, ModelError> {
        if !self.capabilities().has_r_inf_density {
            return Err(self.missing("density of R(ds, ∞)"));
        }
        if s > self.horizon {
            return Ok(0.0);
        }
        if s <= 0.0 {
            return Err(ModelError::InvalidParameter {
                name: "s",
                value: s,
                reason: "the boundary density is defined on ]0, T[",
            });
        }
        Ok(self.r_inf_split(s, self.horizon - s))
    }

    /// Density of `R(ds, ∞)` given `s` and `T - s` separately, so that the
    /// singularity at `T` is resolved without cancellation.
    pub fn r_inf_split(&self, s: f64, t_minus_s: f64) -> f64 {
        if t_minus_s < 0.0 {
            return 0.0;
        }
        let horizon = self.horizon;
        match self.kind {
            ModelKind::FBm { hurst } => {
                let e = 2.0 * hurst - 1.0;
                hurst * (s.powf(e) + t_minus_s.powf(e))
            }
            ModelKind::BifBm { hurst, k } => {
                let e = 2.0 * hurst;
                2.0 * hurst
                    * k
                    * 2f64.powf(-k)
                    * ((s.powf(e) + horizon.powf(e)).powf(k - 1.0) * s.powf(e - 1.0)
                        + t_minus_s.powf(e * k - 1.0))
            }
            ModelKind::StatInc(q) => 0.5 * (q.qp(s) + q.qp(t_minus_s)),
            ModelKind::Kernel(_) => f64::NAN,
        }
    }

    /// Points of `]0, T[` where the boundary density is discontinuous.
    pub fn r_inf_breaks(&self) -> Vec<f64> {
        match self.kind {
            ModelKind::StatInc(q) => q
                .breaks()
                .into_iter()
                .flat_map(|a| [a, self.horizon - a])
                .filter(|&x| x > 0.0 && x < self.horizon)
                .collect(),
            _ => Vec::new(),
        }
    }

    /// Density of `∂²R/∂s1∂s2` at an off-diagonal point of `]0, T[²`.
    /// Outside the square the measure vanishes.
    pub fn mu_offdiag_density(&self, s1: f64, s2: f64) -> Result<f64, ModelError> {
        if !self.capabilities().has_mu_density {
            return Err(self.missing("off-diagonal density of ∂²R/∂s1∂s2"));
        }
        if s1 == s2 {
            return Err(ModelError::Diagonal { s1, s2 });
        }
        let t = self.horizon;
        if s1 <= 0.0 || s2 <= 0.0 || s1 >= t || s2 >= t {
            return Ok(0.0);
        }
        Ok(self.mu_gap(s1, s2, (s1 - s2).abs()))
    }

    /// Off-diagonal density with the gap `|s1 - s2|` supplied by the caller.
    pub fn mu_gap(&self, s1: f64, s2: f64, gap: f64) -> f64 {
        match self.kind {
            ModelKind::FBm { hurst } => hurst * (2.0 * hurst - 1.0) * gap.powf(2.0 * hurst - 2.0),
            ModelKind::BifBm { hurst, k } => {
                let e = 2.0 * hurst;
                let hk = e * k;
                let mixed = if k == 1.0 {
                    0.0
                } else {
                    4.0 * hurst
                        * hurst
                        * k
                        * (k - 1.0)
                        * (s1.powf(e) + s2.powf(e)).powf(k - 2.0)
                        * (s1 * s2).powf(e - 1.0)
                };
                2f64.powf(-k) * (mixed + hk * (hk - 1.0) * gap.powf(hk - 2.0))
            }
            ModelKind::StatInc(q) => 0.5 * q.qpp(gap),
            ModelKind::Kernel(_) => f64::NAN,
        }
    }

    /// Line masses of `∂²R/∂s1∂s2`: each `(a, c)` puts mass `c ds` on both
    /// lines `s2 = s1 ± a` inside the square.
    pub fn mu_lines(&self) -> Vec<(f64, f64)> {
        match self.kind {
            ModelKind::StatInc(q) => q
                .qpp_atoms()
                .into_iter()
                .map(|(a, m)| (a, 0.5 * m))
                .collect(),
            _ => Vec::new(),
        }
    }

    /// Gaps where the off-diagonal density is not smooth.
    pub fn mu_gap_breaks(&self) -> Vec<f64> {
        match self.kind {
            ModelKind::StatInc(q) => q.breaks(),
            _ => Vec::new(),
        }
    }

    /// Whether the off-diagonal density may blow up on the coordinate axes.
    pub fn mu_axis_singular(&self) -> bool {
        matches!(self.kind, ModelKind::BifBm { k, .. } if k != 1.0)
    }

    /// Exponent `p` with `|mu| ~ gap^p` near the diagonal (log factors
    /// ignored).
    pub fn mu_diagonal_exponent(&self) -> f64 {
        match self.kind {
            ModelKind::FBm { hurst } => 2.0 * hurst - 2.0,
            ModelKind::BifBm { hurst, k } => 2.0 * hurst * k - 2.0,
            ModelKind::StatInc(q) => match q.shape() {
                QShape::Power { hurst } => 2.0 * hurst - 2.0,
                QShape::Log => -2.0,
            },
            ModelKind::Kernel(_) => f64::NAN,
        }
    }
}

fn kernel_cov(kappa: Kappa, lo: f64, hi: f64) -> f64 {
    match kappa {
        Kappa::Indicator => lo,
        _ => {
            let shift = hi - lo;
            let tol = Tolerance::new(1e-13, 1e-10);
            // r in [0, lo]; lo - r = from_right
            let f = |n: &Node| kappa.value(n.from_right) * kappa.value(n.from_right + shift);
            let ends = Endpoints::from_flags(false, kappa.singular_at_zero());
            let breaks: Vec<f64> = match kappa {
                Kappa::Triangle => vec![lo - 1.0, hi - 1.0],
                _ => Vec::new(),
            };
            match integrate_1d_nodes(f, 0.0, lo, &breaks, ends, &tol) {
                Ok(r) => r.value,
                Err(e) => e.partial_value().unwrap_or(f64::NAN),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn brownian_special_case() {
        let m = CovModel::fbm(0.5, 1.0).unwrap();
        assert_relative_eq!(m.cov(0.3, 0.7), 0.3, epsilon = 1e-15);
        assert_relative_eq!(m.r_inf_density(0.25).unwrap(), 1.0, epsilon = 1e-15);
        assert_eq!(m.mu_offdiag_density(0.2, 0.6).unwrap(), 0.0);
    }

    #[test]
    fn fbm_closed_forms() {
        let m = CovModel::fbm(0.3, 1.0).unwrap();
        let expected = 0.5 * (0.3f64.powf(0.6) + 0.7f64.powf(0.6) - 0.4f64.powf(0.6));
        assert_relative_eq!(m.cov(0.3, 0.7), expected, max_relative = 1e-15);
        assert_relative_eq!(m.gamma(0.5), 0.5f64.powf(0.6), max_relative = 1e-15);
        assert_relative_eq!(
            m.r_inf_density(0.5).unwrap(),
            0.3 * 2.0 * 0.5f64.powf(-0.4),
            max_relative = 1e-15
        );
        let mu = m.mu_offdiag_density(0.2, 0.6).unwrap();
        assert_relative_eq!(mu, 0.3 * (-0.4) * 0.4f64.powf(-1.4), max_relative = 1e-12);
        assert!(mu < 0.0);
    }

    #[test]
    fn bifbm_with_hk_half_has_linear_variance() {
        let m = CovModel::bifbm(0.6, 5.0 / 6.0, 1.0).unwrap();
        for &t in &[0.1, 0.37, 0.9] {
            assert_relative_eq!(m.cov(t, t), t, max_relative = 1e-12);
            assert_relative_eq!(m.gamma(t), t, max_relative = 1e-12);
        }
    }

    #[test]
    fn beyond_horizon() {
        let m = CovModel::fbm(0.3, 1.0).unwrap();
        assert_eq!(m.r_inf_density(1.5).unwrap(), 0.0);
        assert_eq!(m.cov(2.0, 3.0), m.cov(1.0, 1.0));
        assert_eq!(m.cov(0.4, 3.0), m.cov(0.4, 1.0));
        assert_eq!(m.gamma(0.0), 0.0);
    }

    #[test]
    fn log_kernel_variance_at_knee() {
        let m = CovModel::statinc(QShape::Log, 1.0).unwrap();
        assert_relative_eq!(m.gamma(log_knee()), 0.5, max_relative = 1e-15);
    }

    #[test]
    fn statinc_power_matches_fbm() {
        let f = CovModel::fbm(0.3, 1.0).unwrap();
        let s = CovModel::statinc(QShape::Power { hurst: 0.3 }, 1.0).unwrap();
        assert_relative_eq!(
            f.mu_offdiag_density(0.2, 0.6).unwrap(),
            s.mu_offdiag_density(0.2, 0.6).unwrap(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn kernel_family_refuses_measures() {
        let m = CovModel::kernel(Kappa::Indicator, 1.0).unwrap();
        assert!(matches!(m.r_inf_density(0.5), Err(ModelError::CapabilityMissing { .. })));
        assert!(matches!(
            m.mu_offdiag_density(0.2, 0.5),
            Err(ModelError::CapabilityMissing { .. })
        ));
        assert_eq!(m.cov(0.3, 0.8), 0.3);
        assert_eq!(m.cov(0.3, 1.8), 0.3);
    }

    #[test]
    fn kernel_power_variance() {
        // κ(u) = u^{H-1/2}: Var X_t = t^{2H} / (2H)
        let h = 0.3;
        let m = CovModel::kernel(Kappa::Power { exponent: h - 0.5 }, 1.0).unwrap();
        assert_relative_eq!(m.gamma(0.8), 0.8f64.powf(2.0 * h) / (2.0 * h), max_relative = 1e-8);
        let t = CovModel::kernel(Kappa::Triangle, 1.0).unwrap();
        // ∫_0^{0.5} (1-u)^2 du = (1 - 0.125)/3
        assert_relative_eq!(t.gamma(0.5), 0.875 / 3.0, max_relative = 1e-10);
    }

    #[test]
    fn diagonal_and_parameter_errors() {
        let m = CovModel::fbm(0.3, 1.0).unwrap();
        assert!(matches!(m.mu_offdiag_density(0.4, 0.4), Err(ModelError::Diagonal { .. })));
        assert!(CovModel::fbm(1.0, 1.0).is_err());
        assert!(CovModel::fbm(0.0, 1.0).is_err());
        assert!(CovModel::bifbm(0.5, 0.0, 1.0).is_err());
        assert!(CovModel::bifbm(0.5, 1.2, 1.0).is_err());
        assert!(CovModel::fbm(0.5, -1.0).is_err());
    }

    #[test]
    fn json_round_trip_and_strictness() {
        let m = CovModel::from_json(r#"{"family":"statinc","T":1,"q_kernel":{"kind":"log"}}"#).unwrap();
        assert_eq!(m.family(), Family::StatInc);
        let back = CovModel::from_spec(&m.to_spec()).unwrap();
        assert_eq!(back, m);
        let k = CovModel::from_json(r#"{"family":"kernel","T":1,"kappa":{"kind":"power","exponent":-0.2}}"#)
            .unwrap();
        assert_eq!(k.family(), Family::Kernel);
        assert!(CovModel::from_json(r#"{"family":"fbm","T":1}"#).is_err());
        assert!(CovModel::from_json(r#"{"family":"fbm","T":1,"H":0.3,"atoms":[0.5]}"#).is_err());
    }
}

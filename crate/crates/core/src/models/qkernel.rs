use serde::{Deserialize, Serialize};

/// Shape of the variance function `Q(t) = Var(X_t)` of a process with weak
/// stationary increments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum QShape {
    /// `Q(t) = t^{2H}`.
    Power { hurst: f64 },
    /// `Q(t) = 1 / log(1/t)` on `]0, e^-2[`, `Q(t) = 1/2` afterwards.
    Log,
}

/// Variance function stopped at the horizon: `Q(t) = Q(T)` for `t >= T`.
///
/// `qpp` returns the absolutely continuous part of the measure `Q''(dy)`;
/// point masses are listed by [`QKernel::qpp_atoms`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QKernel {
    shape: QShape,
    horizon: f64,
}

/// Knee of the logarithmic kernel.
pub fn log_knee() -> f64 {
    (-2.0f64).exp()
}

impl QKernel {
    pub fn new(shape: QShape, horizon: f64) -> Self {
        Self { shape, horizon }
    }

    pub fn shape(&self) -> QShape {
        self.shape
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    fn raw_q(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match self.shape {
            QShape::Power { hurst } => t.powf(2.0 * hurst),
            QShape::Log => {
                if t < log_knee() {
                    1.0 / (-t.ln())
                } else {
                    0.5
                }
            }
        }
    }

    /// `Q(|t| ∧ T)`.
    pub fn q(&self, t: f64) -> f64 {
        self.raw_q(t.abs().min(self.horizon))
    }

    /// `Q'(t)` for `0 < t < T`, zero beyond the horizon.
    pub fn qp(&self, t: f64) -> f64 {
        if t <= 0.0 || t > self.horizon {
            return 0.0;
        }
        match self.shape {
            QShape::Power { hurst } => 2.0 * hurst * t.powf(2.0 * hurst - 1.0),
            QShape::Log => {
                if t < log_knee() {
                    let l = -t.ln();
                    1.0 / (t * l * l)
                } else {
                    0.0
                }
            }
        }
    }

    /// Density of `Q''(dy)` for `0 < t < T`.
    pub fn qpp(&self, t: f64) -> f64 {
        if t <= 0.0 || t > self.horizon {
            return 0.0;
        }
        match self.shape {
            QShape::Power { hurst } => {
                let e = 2.0 * hurst;
                e * (e - 1.0) * t.powf(e - 2.0)
            }
            QShape::Log => {
                if t < log_knee() {
                    let l = -t.ln();
                    (2.0 - l) / (t * t * l * l * l)
                } else {
                    0.0
                }
            }
        }
    }

    /// Point masses `(location, mass)` of `Q''` strictly inside `]0, T[`.
    pub fn qpp_atoms(&self) -> Vec<(f64, f64)> {
        match self.shape {
            QShape::Power { .. } => Vec::new(),
            QShape::Log => {
                let a = log_knee();
                if a < self.horizon {
                    // Q' drops from e^2/4 to 0
                    vec![(a, -(2.0f64).exp() / 4.0)]
                } else {
                    Vec::new()
                }
            }
        }
    }

    /// Points of `]0, T[` where `Q'` or `Q''` is not smooth.
    pub fn breaks(&self) -> Vec<f64> {
        match self.shape {
            QShape::Power { .. } => Vec::new(),
            QShape::Log => {
                let a = log_knee();
                if a < self.horizon {
                    vec![a]
                } else {
                    Vec::new()
                }
            }
        }
    }
}

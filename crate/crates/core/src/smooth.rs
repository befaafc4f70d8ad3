//! Smooth test functions with closed-form derivatives and Gaussian means.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum SmoothFn {
    /// `Σ c_k x^k`.
    Polynomial { coefficients: Vec<f64> },
    Sin,
    Cos,
    /// `exp(rate · x)`.
    Exp { rate: f64 },
}

impl SmoothFn {
    pub fn constant(c: f64) -> Self {
        SmoothFn::Polynomial { coefficients: vec![c] }
    }

    pub fn identity() -> Self {
        SmoothFn::Polynomial {
            coefficients: vec![0.0, 1.0],
        }
    }

    /// `x² / 2`.
    pub fn half_square() -> Self {
        SmoothFn::Polynomial {
            coefficients: vec![0.0, 0.0, 0.5],
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        self.derivative(0, x)
    }

    /// `k`-th derivative at `x`.
    pub fn derivative(&self, k: usize, x: f64) -> f64 {
        match self {
            SmoothFn::Polynomial { coefficients } => {
                let mut acc = 0.0;
                for (p, &c) in coefficients.iter().enumerate().skip(k).rev() {
                    let falling: f64 = (p - k + 1..=p).map(|j| j as f64).product();
                    acc = acc * x + c * falling;
                }
                acc
            }
            SmoothFn::Sin => match k % 4 {
                0 => x.sin(),
                1 => x.cos(),
                2 => -x.sin(),
                _ => -x.cos(),
            },
            SmoothFn::Cos => match k % 4 {
                0 => x.cos(),
                1 => -x.sin(),
                2 => -x.cos(),
                _ => x.sin(),
            },
            SmoothFn::Exp { rate } => rate.powi(k as i32) * (rate * x).exp(),
        }
    }

    /// `E f(G)` for `G ~ N(0, var)`.
    pub fn gaussian_mean(&self, var: f64) -> f64 {
        self.gaussian_mean_derivative(0, var)
    }

    /// `E f^(k)(G)` for `G ~ N(0, var)`.
    pub fn gaussian_mean_derivative(&self, k: usize, var: f64) -> f64 {
        let cos_mean = (-0.5 * var).exp();
        match self {
            SmoothFn::Polynomial { coefficients } => {
                let mut moment = 1.0;
                let mut acc = 0.0;
                for (p, &c) in coefficients.iter().enumerate().skip(k) {
                    let q = p - k;
                    if q % 2 == 0 {
                        if q > 0 {
                            moment *= (q - 1) as f64 * var;
                        }
                        let falling: f64 = (q + 1..=p).map(|j| j as f64).product();
                        acc += c * falling * moment;
                    }
                }
                acc
            }
            SmoothFn::Sin => match k % 4 {
                1 => cos_mean,
                3 => -cos_mean,
                _ => 0.0,
            },
            SmoothFn::Cos => match k % 4 {
                0 => cos_mean,
                2 => -cos_mean,
                _ => 0.0,
            },
            SmoothFn::Exp { rate } => rate.powi(k as i32) * (0.5 * rate * rate * var).exp(),
        }
    }

    pub fn is_constant(&self) -> bool {
        match self {
            SmoothFn::Polynomial { coefficients } => coefficients.iter().skip(1).all(|&c| c == 0.0),
            SmoothFn::Exp { rate } => *rate == 0.0,
            _ => false,
        }
    }

    pub fn descriptor(&self) -> String {
        match self {
            SmoothFn::Polynomial { coefficients } => {
                let terms: Vec<String> = coefficients.iter().map(|c| c.to_string()).collect();
                format!("poly[{}]", terms.join(","))
            }
            SmoothFn::Sin => "sin".into(),
            SmoothFn::Cos => "cos".into(),
            SmoothFn::Exp { rate } => format!("exp({rate}x)"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_derivatives() {
        // 1 + 2x - x^3
        let p = SmoothFn::Polynomial {
            coefficients: vec![1.0, 2.0, 0.0, -1.0],
        };
        let x = 0.7;
        assert!((p.value(x) - (1.0 + 2.0 * x - x * x * x)).abs() < 1e-15);
        assert!((p.derivative(1, x) - (2.0 - 3.0 * x * x)).abs() < 1e-15);
        assert!((p.derivative(2, x) + 6.0 * x).abs() < 1e-15);
        assert_eq!(p.derivative(3, x), -6.0);
        assert_eq!(p.derivative(4, x), 0.0);
    }

    #[test]
    fn derivatives_by_differences() {
        let h = 1e-5;
        for f in [SmoothFn::Sin, SmoothFn::Cos, SmoothFn::Exp { rate: -0.8 }, SmoothFn::half_square()] {
            for k in 0..3 {
                for x in [-1.3, 0.2, 2.0] {
                    let fd = (f.derivative(k, x + h) - f.derivative(k, x - h)) / (2.0 * h);
                    assert!((fd - f.derivative(k + 1, x)).abs() < 1e-8, "{f:?} {k} {x}");
                }
            }
        }
    }

    #[test]
    fn gaussian_means() {
        let v = 0.8;
        assert!((SmoothFn::half_square().gaussian_mean(v) - 0.4).abs() < 1e-15);
        let quartic = SmoothFn::Polynomial {
            coefficients: vec![0.0, 0.0, 0.0, 0.0, 1.0],
        };
        assert!((quartic.gaussian_mean(v) - 3.0 * v * v).abs() < 1e-15);
        assert_eq!(SmoothFn::constant(2.0).gaussian_mean(v), 2.0);
        assert!(SmoothFn::constant(2.0).is_constant());
        assert!(!SmoothFn::Sin.is_constant());
        let cubic = SmoothFn::Polynomial {
            coefficients: vec![1.0, 0.0, 2.0, 1.0],
        };
        // f'' = 4 + 6x
        assert!((cubic.gaussian_mean_derivative(2, v) - 4.0).abs() < 1e-15);
        // f' = 4x + 3x^2
        assert!((cubic.gaussian_mean_derivative(1, v) - 3.0 * v).abs() < 1e-15);
        assert!((SmoothFn::Sin.gaussian_mean_derivative(3, v) + (-0.5 * v).exp()).abs() < 1e-15);
    }
}

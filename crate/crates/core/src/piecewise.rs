//! Bounded-variation test functions: step and piecewise-linear functions on
//! finitely many breakpoints, and step functions on rectangles of the plane.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PiecewiseError {
    #[error("breakpoints must be finite, non-negative and strictly increasing")]
    Breakpoints,
    #[error("expected {expected} values, got {got}")]
    Length { expected: usize, got: usize },
    #[error("values must be finite")]
    NonFinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PieceKind {
    /// Right-continuous: `f = values[i]` on `[t_i, t_{i+1}[`.
    Step,
    /// Linear interpolation of node values.
    Linear,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPiecewise {
    kind: PieceKind,
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

/// A step or piecewise-linear function on `[0, ∞[`.
///
/// The function vanishes before the first breakpoint and is constant after
/// the last one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPiecewise", into = "RawPiecewise")]
pub struct PiecewiseFn {
    kind: PieceKind,
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

impl TryFrom<RawPiecewise> for PiecewiseFn {
    type Error = PiecewiseError;
    fn try_from(raw: RawPiecewise) -> Result<Self, Self::Error> {
        PiecewiseFn::new(raw.kind, raw.breakpoints, raw.values)
    }
}

impl From<PiecewiseFn> for RawPiecewise {
    fn from(f: PiecewiseFn) -> Self {
        RawPiecewise {
            kind: f.kind,
            breakpoints: f.breakpoints,
            values: f.values,
        }
    }
}

/// Restriction of a function to an interval free of its breakpoints:
/// `f(lo + d) = left + slope * d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Affine {
    pub lo: f64,
    pub hi: f64,
    pub left: f64,
    pub slope: f64,
}

impl Affine {
    pub fn from_left(&self, d: f64) -> f64 {
        self.left + self.slope * d
    }

    pub fn from_right(&self, d: f64) -> f64 {
        self.right() - self.slope * d
    }

    /// Left limit at `hi`.
    pub fn right(&self) -> f64 {
        self.left + self.slope * (self.hi - self.lo)
    }
}

impl PiecewiseFn {
    pub fn new(kind: PieceKind, breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self, PiecewiseError> {
        if breakpoints.is_empty()
            || breakpoints.iter().any(|t| !t.is_finite() || *t < 0.0)
            || breakpoints.windows(2).any(|w| !(w[0] < w[1]))
        {
            return Err(PiecewiseError::Breakpoints);
        }
        if values.len() != breakpoints.len() {
            return Err(PiecewiseError::Length {
                expected: breakpoints.len(),
                got: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(PiecewiseError::NonFinite);
        }
        Ok(Self {
            kind,
            breakpoints,
            values,
        })
    }

    pub fn step(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self, PiecewiseError> {
        Self::new(PieceKind::Step, breakpoints, values)
    }

    pub fn linear(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self, PiecewiseError> {
        Self::new(PieceKind::Linear, breakpoints, values)
    }

    /// `1_{[a, b[}`, which agrees with `1_{[a, b]}` almost everywhere.
    pub fn indicator(a: f64, b: f64) -> Result<Self, PiecewiseError> {
        Self::step(vec![a, b], vec![1.0, 0.0])
    }

    pub fn constant(c: f64) -> Self {
        Self {
            kind: PieceKind::Step,
            breakpoints: vec![0.0],
            values: vec![c],
        }
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn kind(&self) -> PieceKind {
        self.kind
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_step(&self) -> bool {
        self.kind == PieceKind::Step
    }

    pub fn eval(&self, t: f64) -> f64 {
        let b = &self.breakpoints;
        if t < b[0] {
            return 0.0;
        }
        // index of the last breakpoint <= t
        let k = b.partition_point(|&x| x <= t) - 1;
        match self.kind {
            PieceKind::Step => self.values[k],
            PieceKind::Linear => {
                if k + 1 == b.len() {
                    self.values[k]
                } else {
                    let w = (t - b[k]) / (b[k + 1] - b[k]);
                    self.values[k] + w * (self.values[k + 1] - self.values[k])
                }
            }
        }
    }

    /// Value at infinity (the last value).
    pub fn at_infinity(&self) -> f64 {
        *self.values.last().expect("non-empty by construction")
    }

    /// Point masses `(t, f(t) - f(t-))` of `df`.
    pub fn atoms(&self) -> Vec<(f64, f64)> {
        match self.kind {
            PieceKind::Step => {
                let mut prev = 0.0;
                let mut out = Vec::new();
                for (&t, &v) in self.breakpoints.iter().zip(&self.values) {
                    if v != prev {
                        out.push((t, v - prev));
                    }
                    prev = v;
                }
                out
            }
            PieceKind::Linear => {
                if self.values[0] != 0.0 {
                    vec![(self.breakpoints[0], self.values[0])]
                } else {
                    Vec::new()
                }
            }
        }
    }

    /// Segments `(t_i, t_{i+1}, slope)` of the absolutely continuous part of
    /// `df`.
    pub fn slopes(&self) -> Vec<(f64, f64, f64)> {
        match self.kind {
            PieceKind::Step => Vec::new(),
            PieceKind::Linear => self
                .breakpoints
                .windows(2)
                .zip(self.values.windows(2))
                .map(|(t, v)| (t[0], t[1], (v[1] - v[0]) / (t[1] - t[0])))
                .collect(),
        }
    }

    pub fn total_variation(&self) -> f64 {
        let jumps: f64 = self.atoms().iter().map(|(_, j)| j.abs()).sum();
        let slopes: f64 = self.slopes().iter().map(|(a, b, s)| (s * (b - a)).abs()).sum();
        jumps + slopes
    }

    /// The function on `]lo, hi[`, which must contain no breakpoint.
    pub fn affine_on(&self, lo: f64, hi: f64) -> Affine {
        let mid = lo + 0.5 * (hi - lo);
        let b = &self.breakpoints;
        let (left, slope) = if mid < b[0] {
            (0.0, 0.0)
        } else {
            let k = b.partition_point(|&x| x <= mid) - 1;
            match self.kind {
                PieceKind::Step => (self.values[k], 0.0),
                PieceKind::Linear => {
                    if k + 1 == b.len() {
                        (self.values[k], 0.0)
                    } else {
                        let s = (self.values[k + 1] - self.values[k]) / (b[k + 1] - b[k]);
                        (self.values[k] + s * (lo - b[k]), s)
                    }
                }
            }
        };
        Affine { lo, hi, left, slope }
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            kind: self.kind,
            breakpoints: self.breakpoints.clone(),
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }

    /// `a f + b g` on the union of breakpoints. Mixed kinds are refused.
    pub fn combine(a: f64, f: &Self, b: f64, g: &Self) -> Option<Self> {
        if f.kind != g.kind {
            return None;
        }
        let mut pts: Vec<f64> = f.breakpoints.iter().chain(&g.breakpoints).copied().collect();
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        let vals: Vec<f64> = pts.iter().map(|&t| a * f.eval(t) + b * g.eval(t)).collect();
        match f.kind {
            PieceKind::Step => Self::step(pts, vals).ok(),
            PieceKind::Linear => {
                // a late-starting linear function jumps at its first node,
                // which node interpolation on the union cannot represent
                let start = pts[0];
                if f.atoms().iter().chain(&g.atoms()).any(|(t, _)| *t > start) {
                    None
                } else {
                    Self::linear(pts, vals).ok()
                }
            }
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum PlanarError {
    #[error("axis breakpoints must be finite, non-negative and strictly increasing")]
    Breakpoints,
    #[error("coefficient grid must be {rows} x {cols}")]
    Shape { rows: usize, cols: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPlanar {
    x: Vec<f64>,
    y: Vec<f64>,
    coefficients: Vec<Vec<f64>>,
}

/// `h = Σ c_ij 1_{]x_i, x_{i+1}] × ]y_j, y_{j+1}]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPlanar", into = "RawPlanar")]
pub struct PlanarStepFn {
    x: Vec<f64>,
    y: Vec<f64>,
    coefficients: Vec<Vec<f64>>,
}

impl TryFrom<RawPlanar> for PlanarStepFn {
    type Error = PlanarError;
    fn try_from(raw: RawPlanar) -> Result<Self, Self::Error> {
        PlanarStepFn::new(raw.x, raw.y, raw.coefficients)
    }
}

impl From<PlanarStepFn> for RawPlanar {
    fn from(h: PlanarStepFn) -> Self {
        RawPlanar {
            x: h.x,
            y: h.y,
            coefficients: h.coefficients,
        }
    }
}

fn valid_axis(v: &[f64]) -> bool {
    v.len() >= 2 && v.iter().all(|t| t.is_finite() && *t >= 0.0) && v.windows(2).all(|w| w[0] < w[1])
}

impl PlanarStepFn {
    pub fn new(x: Vec<f64>, y: Vec<f64>, coefficients: Vec<Vec<f64>>) -> Result<Self, PlanarError> {
        if !valid_axis(&x) || !valid_axis(&y) {
            return Err(PlanarError::Breakpoints);
        }
        let (rows, cols) = (x.len() - 1, y.len() - 1);
        if coefficients.len() != rows || coefficients.iter().any(|r| r.len() != cols) {
            return Err(PlanarError::Shape { rows, cols });
        }
        Ok(Self { x, y, coefficients })
    }

    /// `1_{]0, a] × ]0, b]}`.
    pub fn rectangle(a: f64, b: f64) -> Result<Self, PlanarError> {
        Self::new(vec![0.0, a], vec![0.0, b], vec![vec![1.0]])
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn coefficients(&self) -> &[Vec<f64>] {
        &self.coefficients
    }

    pub fn eval(&self, s: f64, t: f64) -> f64 {
        let locate = |axis: &[f64], v: f64| -> Option<usize> {
            if v <= axis[0] || v > axis[axis.len() - 1] {
                None
            } else {
                Some(axis.partition_point(|&a| a < v) - 1)
            }
        };
        match (locate(&self.x, s), locate(&self.y, t)) {
            (Some(i), Some(j)) => self.coefficients[i][j],
            _ => 0.0,
        }
    }

    /// Point masses `((x, y), mass)` of the planar increment measure `dh`.
    pub fn corner_atoms(&self) -> Vec<((f64, f64), f64)> {
        let (p, q) = (self.x.len(), self.y.len());
        let c = |i: isize, j: isize| -> f64 {
            if i < 0 || j < 0 || i as usize >= p - 1 || j as usize >= q - 1 {
                0.0
            } else {
                self.coefficients[i as usize][j as usize]
            }
        };
        let mut out = Vec::new();
        for i in 0..p as isize {
            for j in 0..q as isize {
                let m = c(i, j) - c(i - 1, j) - c(i, j - 1) + c(i - 1, j - 1);
                if m != 0.0 {
                    out.push(((self.x[i as usize], self.y[j as usize]), m));
                }
            }
        }
        out
    }

    /// `Σ |Δ_I h|` over the grid rectangles, the planar variation of `h`.
    pub fn planar_variation(&self) -> f64 {
        self.corner_atoms().iter().map(|(_, m)| m.abs()).sum()
    }
}

//! Adaptive Gauss-Kronrod quadrature in one and two dimensions.
//!
//! Every cell is integrated with the 15-point Kronrod rule and its embedded
//! 7-point Gauss rule; the difference drives a global adaptive bisection of
//! the worst cell. Endpoint singularities are removed with the substitution
//!
//! ```text
//! x = a + c * exp(1 - 1/w),   w in ]0, 1]
//! ```
//!
//! which maps an integrable power law `(x-a)^alpha` (alpha > -1) or a
//! logarithmic singularity such as `1 / (x log^2 x)` onto a function that
//! decays to zero faster than any power of `w`. No truncation near the
//! singular point is needed.
//!
//! Integrands that are singular at a point other than the origin must not
//! recompute the distance to that point by subtraction. The offset-aware
//! entry points hand the integrand a [`Node`] carrying the distances to
//! both ends of the interval, computed without cancellation.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Absolute/relative tolerances and a cell budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_cells: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            abs: 1e-10,
            rel: 1e-6,
            max_cells: 200_000,
        }
    }
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Self {
        Self {
            abs,
            rel,
            ..Self::default()
        }
    }

    /// Tighter tolerance for integrals nested inside another integral.
    pub fn nested(&self) -> Self {
        Self {
            abs: self.abs * 1e-2,
            rel: self.rel * 1e-2,
            max_cells: self.max_cells.min(4_000),
        }
    }

    fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value.abs())
    }
}

/// Value, absolute error estimate and the number of cells used.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadResult {
    pub value: f64,
    pub err_estimate: f64,
    pub cells: usize,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadError {
    #[error("no convergence after {cells} cells (value {value}, error estimate {err_estimate})")]
    NonConvergence {
        value: f64,
        err_estimate: f64,
        cells: usize,
    },
    #[error("integrand returned a non-finite value at x = {x}")]
    NonFinite { x: f64 },
    #[error("singularity exponent {exponent} is not integrable in two dimensions")]
    InadmissibleSingularity { exponent: f64 },
    #[error("invalid interval [{a}, {b}]")]
    InvalidInterval { a: f64, b: f64 },
}

impl QuadError {
    /// Best available estimate when the only failure is the cell budget.
    pub fn partial_value(&self) -> Option<f64> {
        match self {
            QuadError::NonConvergence { value, .. } => Some(*value),
            _ => None,
        }
    }
}

/// Which endpoints of an interval carry an integrable singularity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Endpoints {
    Regular,
    SingularLeft,
    SingularRight,
    SingularBoth,
}

impl Endpoints {
    pub fn from_flags(left: bool, right: bool) -> Self {
        match (left, right) {
            (false, false) => Endpoints::Regular,
            (true, false) => Endpoints::SingularLeft,
            (false, true) => Endpoints::SingularRight,
            (true, true) => Endpoints::SingularBoth,
        }
    }

    fn left(self) -> bool {
        matches!(self, Endpoints::SingularLeft | Endpoints::SingularBoth)
    }

    fn right(self) -> bool {
        matches!(self, Endpoints::SingularRight | Endpoints::SingularBoth)
    }
}

/// A quadrature node with its distances to both interval ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node {
    pub x: f64,
    pub from_left: f64,
    pub from_right: f64,
}

#[derive(Debug, Clone, Copy)]
enum Map {
    /// x = lo + (hi - lo) * w
    Linear,
    /// x = lo + (hi - lo) * exp(1 - 1/w)
    ExpLeft,
    /// x = hi - (hi - lo) * exp(1 - 1/w)
    ExpRight,
}

#[derive(Debug, Clone, Copy)]
struct Piece {
    lo: f64,
    hi: f64,
    map: Map,
}

impl Piece {
    /// Transformed integrand value (including the Jacobian) at `w`.
    fn eval<F: Fn(&Node) -> f64>(&self, f: &F, w: f64, a: f64, b: f64) -> Result<f64, QuadError> {
        let width = self.hi - self.lo;
        let mut deep = false;
        let (node, jac) = match self.map {
            Map::Linear => {
                let x = self.lo + width * w;
                let node = Node {
                    x,
                    from_left: (self.lo - a) + width * w,
                    from_right: (b - self.hi) + width * (1.0 - w),
                };
                (node, width)
            }
            Map::ExpLeft | Map::ExpRight => {
                let d = width * (1.0 - 1.0 / w).exp();
                if d <= 0.0 {
                    return Ok(0.0);
                }
                let jac = d / (w * w);
                deep = d < 1e-100 * width;
                let node = if let Map::ExpLeft = self.map {
                    let x = self.lo + d;
                    Node {
                        x,
                        from_left: (self.lo - a) + d,
                        from_right: (b - self.hi) + (width - d),
                    }
                } else {
                    let x = self.hi - d;
                    Node {
                        x,
                        from_left: (self.lo - a) + (width - d),
                        from_right: (b - self.hi) + d,
                    }
                };
                (node, jac)
            }
        };
        let v = f(&node);
        if !v.is_finite() {
            // A node that rounds onto a singular end, or sits so deep in
            // the singularity that a power law overflows, carries no
            // resolvable mass.
            if deep || node.x == self.lo || node.x == self.hi {
                return Ok(0.0);
            }
            return Err(QuadError::NonFinite { x: node.x });
        }
        Ok(v * jac)
    }
}

#[derive(Debug, Clone, Copy)]
struct Cell {
    piece: usize,
    w0: f64,
    w1: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Cell {}
impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Cell {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

fn gauss_kronrod<G: Fn(f64) -> Result<f64, QuadError>>(
    g: &G,
    w0: f64,
    w1: f64,
) -> Result<(f64, f64), QuadError> {
    let centr = 0.5 * (w0 + w1);
    let hlgth = 0.5 * (w1 - w0);
    let fc = g(centr)?;
    let mut resg = fc * WG[3];
    let mut resk = fc * WGK[7];
    let mut resabs = resk.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..3 {
        let jtw = 2 * j + 1;
        let dx = hlgth * XGK[jtw];
        let f1 = g(centr - dx)?;
        let f2 = g(centr + dx)?;
        fv1[jtw] = f1;
        fv2[jtw] = f2;
        resg += WG[j] * (f1 + f2);
        resk += WGK[jtw] * (f1 + f2);
        resabs += WGK[jtw] * (f1.abs() + f2.abs());
    }
    for j in 0..4 {
        let jtwm1 = 2 * j;
        let dx = hlgth * XGK[jtwm1];
        let f1 = g(centr - dx)?;
        let f2 = g(centr + dx)?;
        fv1[jtwm1] = f1;
        fv2[jtwm1] = f2;
        resk += WGK[jtwm1] * (f1 + f2);
        resabs += WGK[jtwm1] * (f1.abs() + f2.abs());
    }
    let reskh = resk * 0.5;
    let mut resasc = WGK[7] * (fc - reskh).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv1[j] - reskh).abs() + (fv2[j] - reskh).abs());
    }
    let result = resk * hlgth;
    resabs *= hlgth.abs();
    resasc *= hlgth.abs();
    let mut abserr = ((resk - resg) * hlgth).abs();
    if resasc != 0.0 && abserr != 0.0 {
        abserr = resasc * (200.0 * abserr / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        abserr = abserr.max(50.0 * f64::EPSILON * resabs);
    }
    Ok((result, abserr))
}

/// Splits `[a, b]` at `breaks` (values outside `]a, b[` are ignored) and
/// assigns the singular substitution to the outermost pieces.
fn build_pieces(a: f64, b: f64, breaks: &[f64], ends: Endpoints) -> Vec<Piece> {
    let mut pts: Vec<f64> = breaks
        .iter()
        .copied()
        .filter(|&x| x > a && x < b && x.is_finite())
        .collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let mut nodes = Vec::with_capacity(pts.len() + 2);
    nodes.push(a);
    nodes.extend(pts);
    nodes.push(b);

    let last = nodes.len() - 2;
    let mut pieces = Vec::new();
    for (i, win) in nodes.windows(2).enumerate() {
        let (lo, hi) = (win[0], win[1]);
        let sing_lo = i == 0 && ends.left();
        let sing_hi = i == last && ends.right();
        match (sing_lo, sing_hi) {
            (false, false) => pieces.push(Piece {
                lo,
                hi,
                map: Map::Linear,
            }),
            (true, false) => pieces.push(Piece {
                lo,
                hi,
                map: Map::ExpLeft,
            }),
            (false, true) => pieces.push(Piece {
                lo,
                hi,
                map: Map::ExpRight,
            }),
            (true, true) => {
                let mid = lo + 0.5 * (hi - lo);
                pieces.push(Piece {
                    lo,
                    hi: mid,
                    map: Map::ExpLeft,
                });
                pieces.push(Piece {
                    lo: mid,
                    hi,
                    map: Map::ExpRight,
                });
            }
        }
    }
    pieces
}

/// Integrates `f` over `[a, b]`, giving it offset-aware nodes. The interval
/// is first split at `breaks` (points where `f` is discontinuous or kinked).
pub fn integrate_1d_nodes<F>(
    f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    ends: Endpoints,
    tol: &Tolerance,
) -> Result<QuadResult, QuadError>
where
    F: Fn(&Node) -> f64,
{
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(QuadError::InvalidInterval { a, b });
    }
    let pieces = build_pieces(a, b, breaks, ends);
    let mut heap = BinaryHeap::new();
    let mut value = 0.0;
    let mut err = 0.0;
    for (k, p) in pieces.iter().enumerate() {
        let g = |w: f64| p.eval(&f, w, a, b);
        let (v, e) = gauss_kronrod(&g, 0.0, 1.0)?;
        value += v;
        err += e;
        heap.push(Cell {
            piece: k,
            w0: 0.0,
            w1: 1.0,
            value: v,
            err: e,
        });
    }
    // Cells narrower than this cannot be bisected meaningfully.
    let min_width = 64.0 * f64::EPSILON;
    let mut frozen_err = 0.0;
    let mut frozen_value = 0.0;
    let mut cells = heap.len();
    while err > tol.target(value) {
        let Some(worst) = heap.pop() else { break };
        if cells >= tol.max_cells {
            heap.push(worst);
            break;
        }
        let width = worst.w1 - worst.w0;
        if width < min_width {
            frozen_err += worst.err;
            frozen_value += worst.value;
            continue;
        }
        let p = &pieces[worst.piece];
        let g = |w: f64| p.eval(&f, w, a, b);
        let mid = worst.w0 + 0.5 * width;
        let (v1, e1) = gauss_kronrod(&g, worst.w0, mid)?;
        let (v2, e2) = gauss_kronrod(&g, mid, worst.w1)?;
        value += v1 + v2 - worst.value;
        err += e1 + e2 - worst.err;
        cells += 1;
        heap.push(Cell {
            piece: worst.piece,
            w0: worst.w0,
            w1: mid,
            value: v1,
            err: e1,
        });
        heap.push(Cell {
            piece: worst.piece,
            w0: mid,
            w1: worst.w1,
            value: v2,
            err: e2,
        });
    }
    // Re-sum to limit drift from the running updates.
    let live_value: f64 = heap.iter().map(|c| c.value).sum();
    let live_err: f64 = heap.iter().map(|c| c.err).sum();
    let value = live_value + frozen_value;
    let err = live_err + frozen_err;
    if err <= tol.target(value) {
        Ok(QuadResult {
            value,
            err_estimate: err,
            cells,
        })
    } else {
        Err(QuadError::NonConvergence {
            value,
            err_estimate: err,
            cells,
        })
    }
}

/// Integrates `f` over `[a, b]`.
///
/// A singular endpoint flag routes that end through the exponential
/// substitution. The integrand is never evaluated exactly at a flagged
/// endpoint.
pub fn integrate_1d<F>(
    f: F,
    a: f64,
    b: f64,
    tol: &Tolerance,
    ends: Endpoints,
) -> Result<QuadResult, QuadError>
where
    F: Fn(f64) -> f64,
{
    integrate_1d_nodes(|n: &Node| f(n.x), a, b, &[], ends, tol)
}

/// Inner integration range of an iterated 2-D integral, as a function of
/// the outer node.
#[derive(Debug, Clone, PartialEq)]
pub struct InnerRange {
    pub len: f64,
    pub ends: Endpoints,
    pub breaks: Vec<f64>,
}

/// Iterated integral `int_0^{x_len} dx int_0^{len(x)} dy f(x, y)`.
///
/// Inner integrals run at the nested tolerance; an inner integral that
/// exhausts its cell budget contributes its best estimate and the outer
/// error estimate absorbs the discrepancy.
pub fn integrate_2d_nested<F, R>(
    f: F,
    x_len: f64,
    x_ends: Endpoints,
    x_breaks: &[f64],
    inner: R,
    tol: &Tolerance,
) -> Result<QuadResult, QuadError>
where
    F: Fn(&Node, &Node) -> f64,
    R: Fn(&Node) -> InnerRange,
{
    let inner_tol = tol.nested();
    let failure: RefCell<Option<QuadError>> = RefCell::new(None);
    let outer = |xn: &Node| -> f64 {
        let range = inner(xn);
        if range.len <= 0.0 {
            return 0.0;
        }
        let res = integrate_1d_nodes(
            |yn: &Node| f(xn, yn),
            0.0,
            range.len,
            &range.breaks,
            range.ends,
            &inner_tol,
        );
        match res {
            Ok(r) => r.value,
            Err(QuadError::NonConvergence { value, .. }) => value,
            // judged by the outer rule, which knows how deep this node sits
            Err(QuadError::NonFinite { .. }) => f64::INFINITY,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        }
    };
    let res = integrate_1d_nodes(outer, 0.0, x_len, x_breaks, x_ends, tol);
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    res
}

/// Integral of `F(s1, s2)` over `[0, T]^2` minus the diagonal.
///
/// Computed in strip coordinates `u = |s2 - s1|`, `v = min(s1, s2)`; both
/// triangles are integrated, so `F` need not be symmetric. The integrand
/// receives the gap `u` directly, free of cancellation.
/// `sing_exponent` bounds the diagonal behaviour `|F| <= C u^p`. The
/// singular set is the whole diagonal line, so `p <= -1` diverges and is
/// rejected. (Point singularities at a rectangle corner tolerate `p > -2`;
/// those go through [`integrate_2d_nested`].)
pub fn integrate_2d_offdiag_gap<F>(
    f: F,
    horizon: f64,
    sing_exponent: f64,
    tol: &Tolerance,
) -> Result<QuadResult, QuadError>
where
    F: Fn(f64, f64, f64) -> f64,
{
    if sing_exponent <= -1.0 || sing_exponent.is_nan() {
        return Err(QuadError::InadmissibleSingularity {
            exponent: sing_exponent,
        });
    }
    offdiag_strips(f, horizon, tol)
}

/// Strip-coordinate integral over the square minus the diagonal, without
/// the admissibility check. Callers that know the integrand is integrable
/// despite a borderline power (e.g. logarithmic corrections) use this.
pub(crate) fn offdiag_strips<F>(f: F, horizon: f64, tol: &Tolerance) -> Result<QuadResult, QuadError>
where
    F: Fn(f64, f64, f64) -> f64,
{
    if !(horizon > 0.0) {
        return Err(QuadError::InvalidInterval {
            a: 0.0,
            b: horizon,
        });
    }
    integrate_2d_nested(
        |un: &Node, vn: &Node| {
            let u = un.x;
            let v = vn.x;
            f(v, v + u, u) + f(v + u, v, u)
        },
        horizon,
        Endpoints::SingularLeft,
        &[],
        |un: &Node| InnerRange {
            len: un.from_right,
            ends: Endpoints::SingularBoth,
            breaks: Vec::new(),
        },
        tol,
    )
}

/// [`integrate_2d_offdiag_gap`] for integrands of `(s1, s2)` only.
pub fn integrate_2d_offdiag<F>(
    f: F,
    horizon: f64,
    sing_exponent: f64,
    tol: &Tolerance,
) -> Result<QuadResult, QuadError>
where
    F: Fn(f64, f64) -> f64,
{
    integrate_2d_offdiag_gap(|s1, s2, _| f(s1, s2), horizon, sing_exponent, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn constant_and_polynomial() {
        let tol = Tolerance::default();
        let r = integrate_1d(|_| 1.0, 0.0, 1.0, &tol, Endpoints::Regular).unwrap();
        assert_relative_eq!(r.value, 1.0, epsilon = 1e-14);
        assert_eq!(r.cells, 1);
        let r = integrate_1d(|x| x * x, 0.0, 1.0, &tol, Endpoints::Regular).unwrap();
        assert_relative_eq!(r.value, 1.0 / 3.0, epsilon = 1e-14);
    }

    #[test]
    fn quintic_single_cell_machine_precision() {
        let p = |x: f64| 3.0 - 2.0 * x + x.powi(3) - 0.5 * x.powi(5);
        // antiderivative on [-1, 2]
        let big = |x: f64| 3.0 * x - x * x + x.powi(4) / 4.0 - x.powi(6) / 12.0;
        let exact = big(2.0) - big(-1.0);
        let r = integrate_1d(p, -1.0, 2.0, &Tolerance::default(), Endpoints::Regular).unwrap();
        assert_eq!(r.cells, 1);
        assert!(((r.value - exact) / exact).abs() < 1e-14);
    }

    #[test]
    fn inverse_sqrt_left_singularity() {
        let tol = Tolerance::default();
        let r = integrate_1d(|x| x.powf(-0.5), 0.0, 1.0, &tol, Endpoints::SingularLeft).unwrap();
        assert!((r.value - 2.0).abs() <= tol.target(2.0) * 10.0, "{r:?}");
        assert!(r.err_estimate <= tol.target(r.value));
    }

    #[test]
    fn log_singularity_reaches_origin() {
        // int_0^{1/e^2} dt / (t log^2 t) = 1 / 2
        let a = (-2.0f64).exp();
        let f = |n: &Node| {
            let l = -n.x.ln();
            1.0 / (n.x * l * l)
        };
        let r = integrate_1d_nodes(f, 0.0, a, &[], Endpoints::SingularLeft, &Tolerance::new(1e-12, 1e-9))
            .unwrap();
        assert_relative_eq!(r.value, 0.5, max_relative = 1e-8);
    }

    #[test]
    fn right_singularity_uses_offsets() {
        // int_0^1 (1-x)^{-0.7} dx = 1 / 0.3, evaluated through from_right.
        let r = integrate_1d_nodes(
            |n: &Node| n.from_right.powf(-0.7),
            0.0,
            1.0,
            &[],
            Endpoints::SingularRight,
            &Tolerance::new(1e-12, 1e-10),
        )
        .unwrap();
        assert_relative_eq!(r.value, 1.0 / 0.3, max_relative = 1e-9);
    }

    #[test]
    fn breaks_handle_jumps() {
        let f = |n: &Node| if n.x < 0.3 { 1.0 } else { 5.0 };
        let r = integrate_1d_nodes(f, 0.0, 1.0, &[0.3], Endpoints::Regular, &Tolerance::default()).unwrap();
        assert_relative_eq!(r.value, 0.3 + 3.5, max_relative = 1e-12);
        assert!(r.cells <= 4);
    }

    #[test]
    fn non_finite_is_reported() {
        let r = integrate_1d(|x| 1.0 / (x - 0.5), 0.0, 1.0, &Tolerance::default(), Endpoints::Regular);
        assert!(matches!(r, Err(QuadError::NonFinite { .. })));
    }

    #[test]
    fn cell_budget_exhaustion() {
        let tol = Tolerance {
            abs: 0.0,
            rel: 1e-15,
            max_cells: 3,
        };
        let r = integrate_1d(|x| (40.0 * x).sin().abs(), 0.0, 1.0, &tol, Endpoints::Regular);
        assert!(matches!(r, Err(QuadError::NonConvergence { .. })));
    }

    #[test]
    fn invalid_interval() {
        let r = integrate_1d(|x| x, 1.0, 1.0, &Tolerance::default(), Endpoints::Regular);
        assert!(matches!(r, Err(QuadError::InvalidInterval { .. })));
    }

    #[test]
    fn offdiag_area_and_power() {
        let tol = Tolerance::default();
        let r = integrate_2d_offdiag(|_, _| 1.0, 1.0, 0.0, &tol).unwrap();
        assert_relative_eq!(r.value, 1.0, max_relative = 1e-9);
        let r = integrate_2d_offdiag_gap(|_, _, u| u.powf(-0.5), 1.0, -0.5, &tol).unwrap();
        assert_relative_eq!(r.value, 8.0 / 3.0, max_relative = 1e-6);
    }

    #[test]
    fn offdiag_rejects_nonintegrable() {
        let r = integrate_2d_offdiag(|_, _| 1.0, 1.0, -2.0, &Tolerance::default());
        assert!(matches!(r, Err(QuadError::InadmissibleSingularity { .. })));
        // |s1 - s2|^{2H-2} with H = 0.3 diverges along the diagonal
        let r = integrate_2d_offdiag(|a, b| (a - b).abs().powf(-1.4), 1.0, -1.4, &Tolerance::default());
        assert!(matches!(r, Err(QuadError::InadmissibleSingularity { .. })));
    }
}

//! Pathwise integral estimators on a uniform grid.
//!
//! Paths are stopped: `X_s = 0` for `s <= 0` and `X_s = X_T` for `s >= T`.
//! Regularization widths must be whole multiples of the grid step so that
//! `X_{s±ε}` is always a grid value.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::models::{CovModel, ModelError};
use crate::piecewise::PiecewiseFn;
use crate::quadrature::{integrate_1d_nodes, Endpoints, Node, Tolerance};
use crate::simulation::SimGrid;

#[derive(Debug, Error)]
pub enum IntegralError {
    #[error("eps = {eps} is below the grid step {step}")]
    EpsTooSmall { eps: f64, step: f64 },
    #[error("eps = {eps} is not a whole multiple of the grid step {step}")]
    EpsOffGrid { eps: f64, step: f64 },
    #[error("t = {t} is not a grid point")]
    TimeOffGrid { t: f64 },
    #[error("path has {got} values, grid needs {expected}")]
    PathLength { got: usize, expected: usize },
    #[error("need 0 < eps < tau (eps = {eps}, tau = {tau})")]
    BadTraceRange { eps: f64, tau: f64 },
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RegKind {
    Forward,
    Backward,
    Symmetric,
}

const GRID_SLACK: f64 = 1e-9;

/// Number of grid steps in `eps`.
pub fn eps_steps(grid: &SimGrid, eps: f64) -> Result<usize, IntegralError> {
    let step = grid.step();
    if eps < step * (1.0 - GRID_SLACK) {
        return Err(IntegralError::EpsTooSmall { eps, step });
    }
    let k = (eps / step).round();
    if (k * step - eps).abs() > GRID_SLACK * eps {
        return Err(IntegralError::EpsOffGrid { eps, step });
    }
    Ok(k as usize)
}

/// Grid index of `t`.
pub fn time_index(grid: &SimGrid, t: f64) -> Result<usize, IntegralError> {
    let i = grid.index_of(t);
    if (grid.time(i) - t).abs() > GRID_SLACK * grid.horizon() {
        return Err(IntegralError::TimeOffGrid { t });
    }
    Ok(i)
}

fn check_len(grid: &SimGrid, path: &[f64]) -> Result<(), IntegralError> {
    if path.len() != grid.n() + 1 {
        return Err(IntegralError::PathLength {
            got: path.len(),
            expected: grid.n() + 1,
        });
    }
    Ok(())
}

/// Grid value with the stopped extension on both sides.
fn at(path: &[f64], i: i64) -> f64 {
    if i <= 0 {
        0.0
    } else {
        path[(i as usize).min(path.len() - 1)]
    }
}

/// Linear interpolation of the path at `t`.
pub fn interpolate(path: &[f64], grid: &SimGrid, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if t >= grid.horizon() {
        return path[grid.n()];
    }
    let u = t / grid.step();
    let i = (u.floor() as usize).min(grid.n() - 1);
    let w = u - i as f64;
    path[i] + w * (path[i + 1] - path[i])
}

/// `∫_a^b X_s ds` for the interpolated path.
fn integral_of_path(path: &[f64], grid: &SimGrid, a: f64, b: f64) -> f64 {
    let t = grid.horizon();
    let mut acc = 0.0;
    if b > t {
        acc += path[grid.n()] * (b - a.max(t));
    }
    let (a, b) = (a.max(0.0), b.min(t));
    if b <= a {
        return acc;
    }
    let h = grid.step();
    let mut lo = a;
    while lo < b {
        let cell = ((lo / h).floor() as usize).min(grid.n() - 1);
        let hi = (((cell + 1) as f64) * h).min(b);
        let hi = if hi <= lo { b } else { hi };
        acc += 0.5 * (interpolate(path, grid, lo) + interpolate(path, grid, hi)) * (hi - lo);
        lo = hi;
    }
    acc
}

/// `∫ f dX = f(∞) X_T - ∫ X df`.
pub fn paley_wiener(path: &[f64], grid: &SimGrid, f: &PiecewiseFn) -> Result<f64, IntegralError> {
    check_len(grid, path)?;
    let mut v = f.at_infinity() * path[grid.n()];
    for (t, jump) in f.atoms() {
        v -= interpolate(path, grid, t) * jump;
    }
    for (a, b, slope) in f.slopes() {
        v -= slope * integral_of_path(path, grid, a, b);
    }
    Ok(v)
}

/// Left-point Riemann sum of the `ε`-regularized integral of `y` against
/// `x` on `[0, t]`.
pub fn reg_integral(
    y: &[f64],
    x: &[f64],
    grid: &SimGrid,
    eps: f64,
    kind: RegKind,
    t: f64,
) -> Result<f64, IntegralError> {
    check_len(grid, y)?;
    check_len(grid, x)?;
    let k = eps_steps(grid, eps)? as i64;
    let end = time_index(grid, t)?;
    let h = grid.step();
    let mut acc = 0.0;
    for i in 0..end {
        let j = i as i64;
        let dx = match kind {
            RegKind::Forward => (at(x, j + k) - at(x, j)) / eps,
            RegKind::Backward => (at(x, j) - at(x, j - k)) / eps,
            RegKind::Symmetric => (at(x, j + k) - at(x, j - k)) / (2.0 * eps),
        };
        acc += y[i] * dx;
    }
    Ok(acc * h)
}

/// Skorohod integral of `g(X)` as the symmetric integral minus
/// `½ ∫ g'(X) dγ`.
pub fn skorohod_estimate<G, D>(
    x: &[f64],
    grid: &SimGrid,
    g: G,
    dg: D,
    model: &CovModel,
    eps: f64,
    t: f64,
) -> Result<f64, IntegralError>
where
    G: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let y: Vec<f64> = x.iter().map(|&v| g(v)).collect();
    let sym = reg_integral(&y, x, grid, eps, RegKind::Symmetric, t)?;
    Ok(sym - 0.5 * gamma_stieltjes(x, grid, dg, model, t)?)
}

/// `Σ_{t_i < t} φ(X_{t_i}) (γ(t_{i+1}) - γ(t_i))`.
pub fn gamma_stieltjes<D>(x: &[f64], grid: &SimGrid, phi: D, model: &CovModel, t: f64) -> Result<f64, IntegralError>
where
    D: Fn(f64) -> f64,
{
    check_len(grid, x)?;
    let end = time_index(grid, t)?;
    Ok((0..end)
        .map(|i| phi(x[i]) * (model.gamma(grid.time(i + 1)) - model.gamma(grid.time(i))))
        .sum())
}

/// `∫_0^t (X_{s+ε} - X_s)² / ε ds`.
pub fn quadratic_variation_eps(x: &[f64], grid: &SimGrid, eps: f64, t: f64) -> Result<f64, IntegralError> {
    check_len(grid, x)?;
    let k = eps_steps(grid, eps)? as i64;
    let end = time_index(grid, t)?;
    let s: f64 = (0..end as i64).map(|i| (at(x, i + k) - at(x, i)).powi(2)).sum();
    Ok(s * grid.step() / eps)
}

/// `Z_ε = Q(ε)^{-1} ∫_ε^T (X_s - X_{s-ε})² ds`, left-point rule.
pub fn z_eps(x: &[f64], grid: &SimGrid, eps: f64, q_eps: f64) -> Result<f64, IntegralError> {
    check_len(grid, x)?;
    let k = eps_steps(grid, eps)?;
    let n = grid.n();
    let s: f64 = (k..n).map(|i| (x[i] - x[i - k]).powi(2)).sum();
    Ok(s * grid.step() / q_eps)
}

/// `F_ε(τ) = (2ε)^{-1} ∫_0^τ [R(t, t+ε) - R(t, (t-ε)^+)] dt`.
pub fn trace_f_eps(model: &CovModel, eps: f64, tau: f64) -> Result<f64, IntegralError> {
    if tau == 0.0 {
        return Ok(0.0);
    }
    if !(eps > 0.0 && eps < tau) {
        return Err(IntegralError::BadTraceRange { eps, tau });
    }
    let horizon = model.horizon();
    let breaks: Vec<f64> = [eps, horizon - eps, horizon]
        .into_iter()
        .filter(|&b| b > 0.0 && b < tau)
        .collect();
    let f = |n: &Node| {
        let t = n.x;
        model.cov(t, t + eps) - model.cov(t, (t - eps).max(0.0))
    };
    let tol = Tolerance::new(1e-13, 1e-9);
    let r = integrate_1d_nodes(f, 0.0, tau, &breaks, Endpoints::Regular, &tol)
        .map_err(|e| IntegralError::Model(ModelError::Quadrature(e)))?;
    Ok(r.value / (2.0 * eps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulation::sample_paths;

    fn grid(n: usize) -> SimGrid {
        SimGrid::new(1.0, n).unwrap()
    }

    fn some_path(n: usize) -> Vec<f64> {
        let m = CovModel::fbm(0.3, 1.0).unwrap();
        sample_paths(&m, &grid(n), 1, 11).unwrap().paths.remove(0)
    }

    #[test]
    fn paley_wiener_on_indicators() {
        let g = grid(16);
        let x = some_path(16);
        let ind = PiecewiseFn::indicator(0.0, 0.5).unwrap();
        assert!((paley_wiener(&x, &g, &ind).unwrap() - x[8]).abs() < 1e-14);
        assert!((paley_wiener(&x, &g, &PiecewiseFn::constant(1.0)).unwrap() - x[16]).abs() < 1e-14);
        let f = PiecewiseFn::indicator(0.25, 0.75).unwrap().scaled(3.0);
        assert!((paley_wiener(&x, &g, &f).unwrap() - 3.0 * (x[12] - x[4])).abs() < 1e-13);
        // beyond the horizon the path is frozen
        let late = PiecewiseFn::indicator(0.5, 2.0).unwrap();
        assert!((paley_wiener(&x, &g, &late).unwrap() - (x[16] - x[8])).abs() < 1e-14);
    }

    #[test]
    fn paley_wiener_linear_is_trapezoid() {
        let g = grid(8);
        let x = some_path(8);
        // f(s) = 1 - s on [0, 1]: ∫f dX = -∫X df = ∫_0^1 X ds
        let f = PiecewiseFn::linear(vec![0.0, 1.0], vec![1.0, 0.0]).unwrap();
        let trap: f64 = (0..8).map(|i| 0.5 * (x[i] + x[i + 1]) / 8.0).sum();
        assert!((paley_wiener(&x, &g, &f).unwrap() - trap).abs() < 1e-14);
    }

    #[test]
    fn symmetric_telescoping() {
        let n = 64;
        let g = grid(n);
        let x = some_path(n);
        let ones = vec![1.0; n + 1];
        for k in [1usize, 2, 4] {
            let eps = k as f64 / n as f64;
            let got = reg_integral(&ones, &x, &g, eps, RegKind::Symmetric, 1.0).unwrap();
            // (1/2k) [Σ_{n-k}^{n+k-1} X - Σ_{-k}^{k-1} X]
            let top: f64 = (n - k..n + k).map(|i| x[i.min(n)]).sum();
            let bottom: f64 = (0..k).map(|i| x[i]).sum();
            assert!((got - (top - bottom) / (2 * k) as f64).abs() < 1e-12);
        }
        let zero = vec![0.0; n + 1];
        assert_eq!(reg_integral(&zero, &x, &g, 1.0 / 64.0, RegKind::Forward, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn symmetric_square_telescopes() {
        let n = 32;
        let g = grid(n);
        let x = some_path(n);
        let got = reg_integral(&x, &x, &g, 1.0 / 32.0, RegKind::Symmetric, 0.5).unwrap();
        assert!((got - 0.5 * x[15] * x[16]).abs() < 1e-13);
    }

    #[test]
    fn eps_and_time_checks() {
        let g = grid(16);
        let x = some_path(16);
        assert!(matches!(
            reg_integral(&x, &x, &g, 0.01, RegKind::Symmetric, 1.0),
            Err(IntegralError::EpsTooSmall { .. })
        ));
        assert!(matches!(
            reg_integral(&x, &x, &g, 0.1, RegKind::Symmetric, 1.0),
            Err(IntegralError::EpsOffGrid { .. })
        ));
        assert!(matches!(
            reg_integral(&x, &x, &g, 0.125, RegKind::Symmetric, 0.3),
            Err(IntegralError::TimeOffGrid { .. })
        ));
    }

    #[test]
    fn skorohod_linear_integrand() {
        let n = 128;
        let g = grid(n);
        let m = CovModel::fbm(0.5, 1.0).unwrap();
        let x = sample_paths(&m, &g, 1, 4).unwrap().paths.remove(0);
        let got = skorohod_estimate(&x, &g, |v| v, |_| 1.0, &m, 1.0 / 128.0, 0.5).unwrap();
        assert!((got - (0.5 * x[63] * x[64] - 0.25)).abs() < 1e-12);
        let one = skorohod_estimate(&x, &g, |_| 1.0, |_| 0.0, &m, 1.0 / 128.0, 0.5).unwrap();
        let plain = reg_integral(&vec![1.0; n + 1], &x, &g, 1.0 / 128.0, RegKind::Symmetric, 0.5).unwrap();
        assert_eq!(one, plain);
    }

    #[test]
    fn qv_of_a_line() {
        // X_s = s: (ε)² / ε summed over [0, t] gives ε t
        let n = 64;
        let g = grid(n);
        let x: Vec<f64> = g.times();
        let qv = quadratic_variation_eps(&x, &g, 4.0 / 64.0, 0.5).unwrap();
        assert!((qv - 4.0 / 64.0 * 0.5).abs() < 1e-14);
    }

    #[test]
    fn z_eps_empty_at_horizon() {
        let g = grid(16);
        let x = some_path(16);
        assert_eq!(z_eps(&x, &g, 1.0, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn brownian_trace_closed_form() {
        let m = CovModel::fbm(0.5, 1.0).unwrap();
        for (eps, tau) in [(0.1, 1.0), (0.01, 0.5), (2f64.powi(-10), 0.3)] {
            let got = trace_f_eps(&m, eps, tau).unwrap();
            // the integrand is min(t, ε)
            let want = tau / 2.0 - eps / 4.0;
            assert!((got - want).abs() < 1e-9, "{eps} {tau}: {got} vs {want}");
        }
        assert_eq!(trace_f_eps(&m, 0.1, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn rough_trace_limit() {
        let m = CovModel::fbm(0.3, 1.0).unwrap();
        let got = trace_f_eps(&m, 2f64.powi(-10), 0.5).unwrap();
        let want = m.gamma(0.5) / 2.0;
        assert!((got - want).abs() <= 0.02 * want, "{got} vs {want}");
    }
}

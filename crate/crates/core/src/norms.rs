//! Norms and inner products on bounded-variation functions:
//!
//! ```text
//! <f, g>_H = ∫ f g R(ds, ∞) - 1/2 ∫∫ (f(s1) - f(s2)) (g(s1) - g(s2)) μ(ds1, ds2)
//! <f, g>_R = ∫ f g |R|(ds, ∞) + 1/2 ∫∫ (f(s1) - f(s2)) (g(s1) - g(s2)) |μ|(ds1, ds2)
//! ```
//!
//! The double integral runs over the square minus its diagonal. It is
//! evaluated on `s1 < s2` only and split into rectangles along the
//! breakpoints of `f` and `g`, so that both increments are affine on every
//! piece. Rectangles that touch the diagonal at a corner are integrated in
//! corner coordinates, where the gap `s2 - s1` is a sum and never suffers
//! cancellation.

use crate::models::{CovModel, ModelError};
use crate::piecewise::{Affine, PiecewiseFn, PlanarStepFn};
use crate::quadrature::{
    integrate_1d_nodes, integrate_2d_nested, Endpoints, InnerRange, Node, QuadError, Tolerance,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Form {
    H,
    R,
}

/// Whether the displays are only formal for this model, i.e. the sign
/// structure that makes `‖·‖_H` a norm on bounded-variation functions is
/// absent.
pub fn is_formal(model: &CovModel) -> bool {
    use crate::models::{ModelKind, QShape};
    match *model.kind() {
        ModelKind::FBm { hurst } => hurst > 0.5,
        ModelKind::BifBm { hurst, k } => hurst * k > 0.5,
        ModelKind::StatInc(q) => matches!(q.shape(), QShape::Power { hurst } if hurst > 0.5),
        ModelKind::Kernel(_) => true,
    }
}

fn require_measures(model: &CovModel) -> Result<(), ModelError> {
    let caps = model.capabilities();
    if caps.has_r_inf_density && caps.has_mu_density {
        Ok(())
    } else {
        Err(ModelError::CapabilityMissing {
            family: model.family(),
            capability: "closed-form covariance measures (needed by the norms)",
        })
    }
}

fn quad_value(r: Result<crate::quadrature::QuadResult, QuadError>) -> Result<f64, ModelError> {
    match r {
        Ok(q) => Ok(q.value),
        Err(e) => Err(e.into()),
    }
}

fn partition(model: &CovModel, f: &PiecewiseFn, g: &PiecewiseFn) -> Vec<f64> {
    let t = model.horizon();
    let mut pts: Vec<f64> = f
        .breakpoints()
        .iter()
        .chain(g.breakpoints())
        .copied()
        .filter(|&x| x > 0.0 && x < t)
        .collect();
    pts.push(0.0);
    pts.push(t);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

fn boundary_term(
    model: &CovModel,
    f: &PiecewiseFn,
    g: &PiecewiseFn,
    form: Form,
    tol: &Tolerance,
) -> Result<f64, ModelError> {
    let t = model.horizon();
    let mut breaks = partition(model, f, g);
    breaks.extend(model.r_inf_breaks());
    breaks.sort_by(f64::total_cmp);
    let first = breaks.iter().copied().find(|&x| x > 0.0).unwrap_or(t);
    let last = breaks.iter().copied().rev().find(|&x| x < t).unwrap_or(0.0);
    // The end masses come from R itself: logarithmic singularities keep a
    // sizeable share of their mass below the smallest double.
    let el = (END_CUT * t).min(0.5 * first);
    let er = (END_CUT * t).min(0.5 * (t - last));
    let left_mass = model.cov(el, t);
    let right_mass = model.gamma(t) - model.cov(t - er, t);
    let weight = |m: f64| match form {
        Form::H => m,
        Form::R => m.abs(),
    };
    let ends = f.eval(0.5 * el) * g.eval(0.5 * el) * weight(left_mass)
        + f.eval(t - 0.5 * er) * g.eval(t - 0.5 * er) * weight(right_mass);
    let integrand = |n: &Node| {
        let s = n.x;
        let fg = f.eval(s) * g.eval(s);
        if fg == 0.0 {
            return 0.0;
        }
        fg * weight(model.r_inf_split(el + n.from_left, er + n.from_right))
    };
    let body = quad_value(integrate_1d_nodes(
        integrand,
        el,
        t - er,
        &breaks,
        Endpoints::SingularBoth,
        tol,
    ))?;
    Ok(ends + body)
}

/// Size of the end and corner pieces whose mass is taken from `R` directly.
const END_CUT: f64 = 1e-12;

/// `∫∫_{s1 < s2} Δf Δg w` with `w = μ` (form H) or `|μ|` (form R).
fn double_term(
    model: &CovModel,
    f: &PiecewiseFn,
    g: &PiecewiseFn,
    form: Form,
    tol: &Tolerance,
) -> Result<f64, ModelError> {
    let cells = partition(model, f, g);
    let nc = cells.len() - 1;
    let fa: Vec<Affine> = (0..nc).map(|i| f.affine_on(cells[i], cells[i + 1])).collect();
    let ga: Vec<Affine> = (0..nc).map(|i| g.affine_on(cells[i], cells[i + 1])).collect();
    let gap_breaks = model.mu_gap_breaks();
    let axis = model.mu_axis_singular();
    let w = |s1: f64, s2: f64, gap: f64| {
        let m = model.mu_gap(s1, s2, gap);
        match form {
            Form::H => m,
            Form::R => m.abs(),
        }
    };
    let mut total = 0.0;
    for i in 0..nc {
        let (lo_i, hi_i) = (cells[i], cells[i + 1]);
        let li = hi_i - lo_i;
        let axis_i = axis && lo_i == 0.0;
        // diagonal triangle: only slopes contribute
        let (sf, sg) = (fa[i].slope, ga[i].slope);
        if sf != 0.0 && sg != 0.0 {
            let v = integrate_2d_nested(
                |un: &Node, vn: &Node| {
                    let u = un.x;
                    let s1 = lo_i + vn.x;
                    sf * sg * u * u * w(s1, s1 + u, u)
                },
                li,
                Endpoints::SingularLeft,
                &[],
                |un: &Node| InnerRange {
                    len: un.from_right,
                    ends: Endpoints::from_flags(axis_i, false),
                    breaks: Vec::new(),
                },
                tol,
            );
            total += quad_value(v)?;
        }
        for j in i + 1..nc {
            let (fi, fj, gi, gj) = (fa[i], fa[j], ga[i], ga[j]);
            let f_const = fi.slope == 0.0 && fj.slope == 0.0 && fi.left == fj.left;
            let g_const = gi.slope == 0.0 && gj.slope == 0.0 && gi.left == gj.left;
            if f_const || g_const {
                continue;
            }
            let (lo_j, hi_j) = (cells[j], cells[j + 1]);
            let lj = hi_j - lo_j;
            let v = if j == i + 1 {
                // corner coordinates around b = hi_i = lo_j: x = b - s1,
                // y = s2 - b; the square [0, δ]² at the corner is charged
                // with the planar increment of R
                let b = hi_i;
                let t = model.horizon();
                let delta = (END_CUT * t).min(0.5 * li).min(0.5 * lj);
                let incr = model.cov(b, b + delta) - model.cov(b - delta, b + delta) - model.cov(b, b)
                    + model.cov(b - delta, b);
                let half = 0.5 * delta;
                let corner = (fj.from_left(half) - fi.from_right(half))
                    * (gj.from_left(half) - gi.from_right(half))
                    * match form {
                        Form::H => incr,
                        Form::R => incr.abs(),
                    };
                let region = |x_off: f64, x_len: f64, y_off: f64, y_len: f64| {
                    let breaks_for = |x: f64| -> Vec<f64> {
                        gap_breaks
                            .iter()
                            .map(|a| a - x - y_off)
                            .filter(|&y| y > 0.0 && y < y_len)
                            .collect()
                    };
                    let s1_base = lo_i + (li - x_off - x_len);
                    integrate_2d_nested(
                        |xn: &Node, yn: &Node| {
                            let (x, y) = (x_off + xn.x, y_off + yn.x);
                            let df = fj.from_left(y) - fi.from_right(x);
                            let dg = gj.from_left(y) - gi.from_right(x);
                            let s1 = s1_base + xn.from_right;
                            df * dg * w(s1, b + y, (x_off + y_off) + xn.x + yn.x)
                        },
                        x_len,
                        Endpoints::from_flags(true, axis_i),
                        &outer_breaks(&gap_breaks, x_off + y_off, y_len),
                        |xn: &Node| InnerRange {
                            len: y_len,
                            ends: Endpoints::SingularLeft,
                            breaks: breaks_for(xn.x),
                        },
                        tol,
                    )
                };
                let upper = quad_value(region(0.0, li, delta, lj - delta))?;
                let lower = quad_value(region(delta, li - delta, 0.0, delta))?;
                corner + upper + lower
            } else {
                let sep = lo_j - hi_i;
                let breaks_for = |x: f64| -> Vec<f64> {
                    // gap = (li - x) + sep + y
                    gap_breaks
                        .iter()
                        .map(|a| a - (li - x) - sep)
                        .filter(|&y| y > 0.0 && y < lj)
                        .collect()
                };
                quad_value(integrate_2d_nested(
                    |xn: &Node, yn: &Node| {
                        let (x, y) = (xn.x, yn.x);
                        let df = fj.from_left(y) - fi.from_left(x);
                        let dg = gj.from_left(y) - gi.from_left(x);
                        let gap = xn.from_right + sep + y;
                        df * dg * w(lo_i + x, lo_j + y, gap)
                    },
                    li,
                    Endpoints::from_flags(axis_i, false),
                    &outer_breaks(&gap_breaks, sep, lj)
                        .iter()
                        .map(|x| li - x)
                        .collect::<Vec<_>>(),
                    |xn: &Node| InnerRange {
                        len: lj,
                        ends: Endpoints::Regular,
                        breaks: breaks_for(xn.x),
                    },
                    tol,
                ))?
            };
            total += v;
        }
    }
    Ok(total)
}

/// Outer coordinates `x` at which a gap line `x + offset + y = a` enters or
/// leaves the inner range `y ∈ [0, len]`.
fn outer_breaks(gap_breaks: &[f64], offset: f64, len: f64) -> Vec<f64> {
    gap_breaks
        .iter()
        .flat_map(|a| [a - offset, a - offset - len])
        .collect()
}

/// `Σ_lines c ∫_0^{T-a} (f(s+a) - f(s)) (g(s+a) - g(s)) ds`, with `|c|` for
/// form R.
fn line_term(
    model: &CovModel,
    f: &PiecewiseFn,
    g: &PiecewiseFn,
    form: Form,
    tol: &Tolerance,
) -> Result<f64, ModelError> {
    let t = model.horizon();
    let mut total = 0.0;
    for (a, c) in model.mu_lines() {
        if a >= t {
            continue;
        }
        let len = t - a;
        let breaks: Vec<f64> = f
            .breakpoints()
            .iter()
            .chain(g.breakpoints())
            .flat_map(|&b| [b, b - a])
            .collect();
        let v = quad_value(integrate_1d_nodes(
            |n: &Node| (f.eval(n.x + a) - f.eval(n.x)) * (g.eval(n.x + a) - g.eval(n.x)),
            0.0,
            len,
            &breaks,
            Endpoints::Regular,
            tol,
        ))?;
        total += match form {
            Form::H => c * v,
            Form::R => c.abs() * v,
        };
    }
    Ok(total)
}

fn inner(
    model: &CovModel,
    f: &PiecewiseFn,
    g: &PiecewiseFn,
    form: Form,
    tol: &Tolerance,
) -> Result<f64, ModelError> {
    require_measures(model)?;
    let single = boundary_term(model, f, g, form, tol)?;
    let double = double_term(model, f, g, form, tol)?;
    let lines = line_term(model, f, g, form, tol)?;
    Ok(match form {
        Form::H => single - double - lines,
        Form::R => single + double + lines,
    })
}

pub fn inner_h_with(
    f: &PiecewiseFn,
    g: &PiecewiseFn,
    model: &CovModel,
    tol: &Tolerance,
) -> Result<f64, ModelError> {
    inner(model, f, g, Form::H, tol)
}

pub fn inner_r_with(
    f: &PiecewiseFn,
    g: &PiecewiseFn,
    model: &CovModel,
    tol: &Tolerance,
) -> Result<f64, ModelError> {
    inner(model, f, g, Form::R, tol)
}

pub fn inner_h(f: &PiecewiseFn, g: &PiecewiseFn, model: &CovModel) -> Result<f64, ModelError> {
    inner_h_with(f, g, model, &Tolerance::default())
}

pub fn inner_r(f: &PiecewiseFn, g: &PiecewiseFn, model: &CovModel) -> Result<f64, ModelError> {
    inner_r_with(f, g, model, &Tolerance::default())
}

pub fn norm_h_sq(f: &PiecewiseFn, model: &CovModel) -> Result<f64, ModelError> {
    inner_h(f, f, model)
}

pub fn norm_r_sq(f: &PiecewiseFn, model: &CovModel) -> Result<f64, ModelError> {
    inner_r(f, f, model)
}

/// `<f1 ⊗ f2, g1 ⊗ g2>_{2,R} = <f1, g1>_R <f2, g2>_R`.
pub fn norm_2r_sq_tensor(
    f1: &PiecewiseFn,
    f2: &PiecewiseFn,
    g1: &PiecewiseFn,
    g2: &PiecewiseFn,
    model: &CovModel,
) -> Result<f64, ModelError> {
    Ok(inner_r(f1, g1, model)? * inner_r(f2, g2, model)?)
}

/// `∫ R(t1, s1) R(t2, s2) dh(t1, t2) dh(s1, s2)` against the corner atoms
/// of a planar step function.
pub fn norm_2r_sq_planar(h: &PlanarStepFn, model: &CovModel) -> f64 {
    let atoms = h.corner_atoms();
    let mut total = 0.0;
    for &((px, py), mp) in &atoms {
        for &((qx, qy), mq) in &atoms {
            total += mp * mq * model.cov(px, qx) * model.cov(py, qy);
        }
    }
    total
}

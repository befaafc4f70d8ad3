//! Paley-Wiener, forward, symmetric and Skorohod integrals on simulated paths.

use singcov::integrals::{paley_wiener, reg_integral, skorohod_estimate, RegKind};
use singcov::models::CovModel;
use singcov::norms::norm_h_sq;
use singcov::piecewise::PiecewiseFn;
use singcov::simulation::{sample_paths, SimGrid};
use singcov::verification::stats::{mean, se_mean, variance};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let m = CovModel::fbm(0.3, 1.0)?;
    let grid = SimGrid::new(1.0, 256)?;
    let ens = sample_paths(&m, &grid, 5000, 42)?;

    let f = PiecewiseFn::step(vec![0.0, 0.25, 0.75], vec![1.0, -0.5, 0.0])?;
    let pw: Vec<f64> = ens.paths.iter().map(|p| paley_wiener(p, &grid, &f)).collect::<Result<_, _>>()?;
    println!("Var int f dX = {:.4}   |f|_H^2 = {:.4}", variance(&pw), norm_h_sq(&f, &m)?);

    let eps = 1.0 / 64.0;
    let mut sym = Vec::new();
    let mut fwd = Vec::new();
    let mut sk = Vec::new();
    for p in &ens.paths {
        let y: Vec<f64> = p.iter().map(|x| x.cos()).collect();
        sym.push(reg_integral(&y, p, &grid, eps, RegKind::Symmetric, 1.0)?);
        fwd.push(reg_integral(&y, p, &grid, eps, RegKind::Forward, 1.0)?);
        sk.push(skorohod_estimate(p, &grid, f64::cos, |x| -x.sin(), &m, eps, 1.0)?);
    }
    for (name, v) in [("symmetric", &sym), ("forward", &fwd), ("skorohod", &sk)] {
        println!("{name:<9} E int cos(X) dX = {:+.4} +- {:.4}", mean(v), se_mean(v));
    }
    Ok(())
}

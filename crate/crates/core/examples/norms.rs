//! H and R norms of step and piecewise-linear functions.

use singcov::models::{CovModel, QShape};
use singcov::norms::{inner_h, norm_h_sq, norm_r_sq};
use singcov::piecewise::PiecewiseFn;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let m = CovModel::fbm(0.3, 1.0)?;
    let (s, t) = (0.4, 0.9);
    let a = PiecewiseFn::indicator(0.0, s)?;
    let b = PiecewiseFn::indicator(0.0, t)?;
    println!("<1[0,s], 1[0,t]>_H = {:.10}", inner_h(&a, &b, &m)?);
    println!("R(s, t)            = {:.10}", m.cov(s, t));

    let f = PiecewiseFn::step(vec![0.0, 0.25, 0.75], vec![1.0, -0.5, 0.0])?;
    let g = PiecewiseFn::linear(vec![0.0, 0.5, 1.0], vec![0.0, 1.0, 0.0])?;
    for m in [m, CovModel::fbm(0.7, 1.0)?, CovModel::statinc(QShape::Log, 1.0)?] {
        println!(
            "{:<22} |f|_H^2 {:.6}  |f|_R^2 {:.6}  |g|_H^2 {:.6}",
            m.descriptor(),
            norm_h_sq(&f, &m)?,
            norm_r_sq(&f, &m)?,
            norm_h_sq(&g, &m)?
        );
    }
    Ok(())
}

//! The symmetric trace F_eps(tau) against gamma(tau)/2.

use singcov::integrals::trace_f_eps;
use singcov::models::CovModel;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for (h, tau) in [(0.3, 0.5), (0.5, 1.0), (0.7, 0.8)] {
        let m = CovModel::fbm(h, 1.0)?;
        println!("{} tau = {tau}: target {:.6}", m.descriptor(), m.gamma(tau) / 2.0);
        for k in [4, 6, 8, 10] {
            let eps = 2f64.powi(-k);
            println!("  eps = 2^-{k:<2} F = {:.6}", trace_f_eps(&m, eps, tau)?);
        }
    }
    Ok(())
}

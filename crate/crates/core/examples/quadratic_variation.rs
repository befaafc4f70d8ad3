//! The eps-quadratic variation along a ladder: divergent, finite, vanishing.

use singcov::integrals::quadratic_variation_eps;
use singcov::models::CovModel;
use singcov::simulation::{sample_paths, SimGrid};
use singcov::verification::stats::mean;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = SimGrid::new(1.0, 256)?;
    let ladder: Vec<f64> = (4..=8).map(|k| 2f64.powi(-k)).collect();
    for m in [
        CovModel::fbm(0.3, 1.0)?,
        CovModel::fbm(0.5, 1.0)?,
        CovModel::bifbm(0.6, 5.0 / 6.0, 1.0)?,
        CovModel::fbm(0.7, 1.0)?,
    ] {
        let ens = sample_paths(&m, &grid, 2000, 1)?;
        print!("{:<26}", m.descriptor());
        for &eps in &ladder {
            let qv: Vec<f64> = ens
                .paths
                .iter()
                .map(|p| quadratic_variation_eps(p, &grid, eps, 1.0))
                .collect::<Result<_, _>>()?;
            print!(" {:8.4}", mean(&qv));
        }
        println!();
    }
    println!("(BifBm with 2HK = 1 tends to 2^(1-K) = {:.4})", 2f64.powf(1.0 / 6.0));
    Ok(())
}

//! Seeded path simulation and CSV export.
//!
//! `cargo run --example simulate -- out_dir`

use singcov::models::CovModel;
use singcov::simulation::{sample_paths, sample_paths_antithetic, SimGrid};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let m = CovModel::bifbm(0.6, 5.0 / 6.0, 1.0)?;
    let grid = SimGrid::new(1.0, 256)?;
    let ens = sample_paths(&m, &grid, 1000, 7)?;
    let n = grid.n();
    let var: f64 = ens.paths.iter().map(|p| p[n] * p[n]).sum::<f64>() / ens.len() as f64;
    println!("{}: Var X_T ~ {var:.4} (gamma(T) = {:.4}), jitter {:.1e}", m.descriptor(), m.gamma(1.0), ens.jitter);

    let anti = sample_paths_antithetic(&m, &grid, 2, 7)?;
    println!("antithetic rows: X_T = {:.4}, {:.4}", anti.paths[0][n], anti.paths[1][n]);

    if let Some(dir) = std::env::args().nth(1) {
        ens.export(std::path::Path::new(&dir), "paths")?;
        println!("wrote {dir}/paths.csv and {dir}/paths.json");
    }
    Ok(())
}

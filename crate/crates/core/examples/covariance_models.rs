//! Covariances, variances and the variance function of each family.

use singcov::models::{CovModel, Kappa, QShape};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let models = [
        CovModel::fbm(0.3, 1.0)?,
        CovModel::bifbm(0.6, 5.0 / 6.0, 1.0)?,
        CovModel::statinc(QShape::Log, 1.0)?,
        CovModel::statinc(QShape::Power { hurst: 0.4 }, 1.0)?,
        CovModel::kernel(Kappa::Triangle, 1.0)?,
    ];
    for m in &models {
        println!("{}", m.descriptor());
        println!("  R(0.3, 0.7) = {:.6}", m.cov(0.3, 0.7));
        println!("  gamma(0.5)  = {:.6}", m.gamma(0.5));
        // stopped at T
        println!("  R(2, 3)     = {:.6}  (= gamma(T) = {:.6})", m.cov(2.0, 3.0), m.gamma(1.0));
        if let Ok(q) = m.q_kernel() {
            println!("  Q(0.1)      = {:.6}", q.q(0.1));
        }
    }
    let spec = serde_json::to_string(&models[1].to_spec())?;
    println!("\nJSON form: {spec}");
    println!("round trip: {}", CovModel::from_json(&spec)?.descriptor());
    Ok(())
}

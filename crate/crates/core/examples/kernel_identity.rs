//! Moving-average processes: the Wiener-integral transfer identity.

use singcov::models::Kappa;
use singcov::smooth::SmoothFn;
use singcov::verification::{Experiment, KernelIdentityConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for kappa in [Kappa::Indicator, Kappa::Triangle] {
        let exp = Experiment::KernelIdentity(KernelIdentityConfig {
            kappa,
            horizon: 1.0,
            phi: SmoothFn::Polynomial {
                coefficients: vec![0.0, 1.0, -1.0],
            },
            paths: 2000,
            grid: 128,
            seed: 42,
            halving_slack: 0.05,
        });
        let r = exp.run()?;
        println!("{} passed: {}", r.model, r.passed());
        for e in &r.estimates {
            println!("  {:<24} {:.3e}", e.label, e.value);
        }
    }
    Ok(())
}

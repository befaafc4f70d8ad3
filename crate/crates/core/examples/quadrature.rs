//! Adaptive quadrature with endpoint singularities.

use singcov::quadrature::{integrate_1d, Endpoints, Tolerance};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let tol = Tolerance::default();
    for alpha in [-0.4, -0.8, -0.95] {
        let r = integrate_1d(|x: f64| x.powf(alpha), 0.0, 1.0, &tol, Endpoints::SingularLeft)?;
        println!(
            "int_0^1 x^{alpha} dx = {:.10}  exact {:.10}  cells {}",
            r.value,
            1.0 / (1.0 + alpha),
            r.cells
        );
    }
    let r = integrate_1d(|x: f64| -x.ln(), 0.0, 1.0, &tol, Endpoints::SingularLeft)?;
    println!("int_0^1 -ln x dx = {:.12}", r.value);
    Ok(())
}

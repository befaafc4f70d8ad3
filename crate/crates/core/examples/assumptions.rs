//! Structural assumption checks and the membership condition on `Q`.

use singcov::models::{check_assumptions, membership_condition, CovModel, QShape};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for m in [
        CovModel::fbm(0.3, 1.0)?,
        CovModel::fbm(0.7, 1.0)?,
        CovModel::bifbm(0.3, 0.5, 1.0)?,
        CovModel::statinc(QShape::Log, 1.0)?,
    ] {
        let r = check_assumptions(&m, 64)?;
        println!(
            "{:<28} A {:?}  B {:?}  C {:?}  D {:?}",
            m.descriptor(),
            r.a_holds(),
            r.b_holds(),
            r.c_holds(),
            r.d_holds()
        );
    }

    let cutoffs: Vec<f64> = (3..=10).map(|k| 2f64.powi(-k)).collect();
    for shape in [QShape::Power { hurst: 0.4 }, QShape::Power { hurst: 0.2 }, QShape::Log] {
        let m = CovModel::statinc(shape, 1.0)?;
        let res = membership_condition(&m, &cutoffs)?;
        println!("{:<28} {:?}  tail integrals {:.3?}", m.descriptor(), res.verdict, res.integrals);
    }
    Ok(())
}

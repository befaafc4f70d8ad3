//! One experiment from JSON, rerun from the parameters embedded in its report.

use singcov::verification::{Experiment, ExperimentReport};

const CONFIG: &str = r#"{
  "experiment": "isometry",
  "model": {"family": "fbm", "T": 1.0, "H": 0.3},
  "f": {"kind": "step", "breakpoints": [0.0, 0.5], "values": [1.0, 0.0]},
  "paths": 5000
}"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let exp: Experiment = serde_json::from_str(CONFIG)?;
    let mut first = exp.run()?;
    first.strip_timing();
    let json = first.to_json()?;
    println!("{json}");

    let back: ExperimentReport = serde_json::from_str(&json)?;
    let mut again = back.params.run()?;
    again.strip_timing();
    println!("rerun identical: {}", again.to_json()? == json);
    Ok(())
}

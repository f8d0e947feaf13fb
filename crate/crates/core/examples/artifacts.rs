//! Running an experiment from a TOML config and reading its artifacts back.

use roughstart::cli::{run, Command, ExperimentConfig};
use roughstart::io::{column, read_csv, Manifest, IC_PROBE};

const CONFIG: &str = r#"
command = "sample"
seed = 42

[lattice]
N = 512

[equation]
kind = "burgers"

[ic]
theta = 0.5
"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::temp_dir().join("roughstart-example-artifacts");
    let cfg = ExperimentConfig::from_toml(CONFIG)?;
    let manifest_path = run(Command::Sample, &cfg, &out)?;
    let manifest: Manifest = serde_json::from_str(&std::fs::read_to_string(&manifest_path)?)?;
    println!("{} v{} wrote {:?}", manifest.tool, manifest.version, manifest.artifacts);
    let rows = read_csv(&out.join("ic_probe.csv"), &IC_PROBE)?;
    println!("block means: {:?}", column(&IC_PROBE, &rows, "mean")?);
    Ok(())
}

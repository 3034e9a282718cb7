//! Load a scenario from JSON, run the verify ladder and the auto-selected
//! check, and print both reports.

use kropina::workbench::{run_check, run_verify, LoadedScenario, RunOptions, Scenario};

const SCENARIO: &str = r#"{
  "schema": "scenario/1",
  "name": "tilted_plane",
  "dimension": 2,
  "representation": "nav",
  "h": [["1", "0"], ["0", "1"]],
  "w": ["cos(0.4)", "sin(0.4)"],
  "f": "0.1*(x1^2 + x2^2)",
  "weights": "ricInf",
  "box": {"lo": [-1, -1], "hi": [1, 1]},
  "samples": {"points": 4, "directions": 8},
  "seed": 7
}"#;

fn main() -> kropina::Result<()> {
    let loaded = LoadedScenario::new(Scenario::from_json_str(SCENARIO)?)?;
    let opts = RunOptions::default();
    print!("{}", run_verify(&loaded, &opts).render_text());
    println!();
    let doc = run_check(&loaded, None, &opts);
    print!("{}", doc.render_text());
    println!(
        "{}",
        doc.to_json_pretty().lines().take(12).collect::<Vec<_>>().join("\n")
    );
    Ok(())
}

//! Runs the selection engine on one generated dataset and prints the step
//! trace and the final model set.
//!
//! ```bash
//! cargo run --release -p csslr --example select_generated -- CSSLR2a 3
//! ```

use csslr::report::RunReport;
use csslr::simulation::{generate_dataset, generated_signs, StudySpec};
use csslr::{run_csslr, SelectionConfig};

fn main() -> csslr::Result<()> {
    let mut args = std::env::args().skip(1);
    let profile = args.next().unwrap_or_else(|| "CSSLR1a".into());
    let replication: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(0);
    let config = SelectionConfig::profile(&profile).expect("CSSLR1a, CSSLR1b, CSSLR2a or CSSLR2b");

    let spec = StudySpec::builtin("table3").expect("built-in study");
    let data = generate_dataset(&spec, replication);
    let signs = generated_signs(&spec, &data);
    let result = run_csslr(&data, &signs, &config)?;

    let report = RunReport::new(&data, &config, &result, "example")?;
    print!("{}", report.trace_text());
    println!("\nfinal models ({:?}):", result.terminated_by);
    print!("{}", report.models_text());
    Ok(())
}

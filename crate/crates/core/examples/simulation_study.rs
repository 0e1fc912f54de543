//! Runs a scaled-down simulation study and prints the result table.
//!
//! ```bash
//! cargo run --release -p csslr --example simulation_study -- table3 50
//! ```

use std::collections::BTreeMap;
use std::time::Instant;

use csslr::simulation::{run_study, StudySpec};

fn main() -> csslr::Result<()> {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "table3".into());
    let reps: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(20);
    let mut spec = StudySpec::builtin(&name).expect("one of table3..table6");
    spec.replications = reps;
    if let Some(methods) = args.next() {
        spec.methods = methods.split(',').map(str::to_string).collect();
    }

    let start = Instant::now();
    let result = run_study(&spec, &BTreeMap::new())?;
    print!("{}", result.to_table());
    println!("{} replications in {:.1?}", reps, start.elapsed());
    Ok(())
}

//! Writes a generated dataset and sign file to disk, then selects from the
//! files the way the command-line tool does.

use csslr::data::{load_dataset, load_signs, save_dataset};
use csslr::report::RunReport;
use csslr::simulation::{generate_dataset, StudySpec};
use csslr::{run_csslr, SelectionConfig};

fn main() -> csslr::Result<()> {
    let dir = std::env::temp_dir().join("csslr-select-csv");
    std::fs::create_dir_all(&dir)?;
    let data_path = dir.join("data.csv");
    let signs_path = dir.join("signs.csv");

    let mut spec = StudySpec::builtin("table3").expect("built-in study");
    spec.n_nuisance = 4;
    save_dataset(&generate_dataset(&spec, 7), &data_path)?;
    std::fs::write(&signs_path, "name,expected_sign\nS1,-\nS2,-\nS3,-\nW1,-\nW2,-\nW3,-\n")?;

    let data = load_dataset(&data_path, "I")?;
    let signs = load_signs(&signs_path, &data)?;
    let config = SelectionConfig::csslr1b();
    let result = run_csslr(&data, &signs, &config)?;
    let report = RunReport::new(&data, &config, &result, "example")?;

    println!("{} rows, {} variables from {}", data.n(), data.n_variables(), data_path.display());
    print!("{}", report.models_text());
    println!("\nfirst trace records:");
    for line in report.to_jsonl().lines().take(3) {
        println!("{line}");
    }
    println!("\nsame run from the shell:");
    println!(
        "  csslr select --data {} --response I --config CSSLR1b --signs {} --trace-format structured",
        data_path.display(),
        signs_path.display()
    );
    Ok(())
}

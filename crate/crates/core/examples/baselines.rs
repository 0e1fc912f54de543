//! The two reference selectors on one generated dataset.

use csslr::baselines::{select_aic, select_pvalue};
use csslr::simulation::{generate_dataset, StudySpec, BASELINE_MAX_STEPS, COEFF_ALPHA};

fn main() -> csslr::Result<()> {
    let spec = StudySpec::builtin("table3").expect("built-in study");
    let data = generate_dataset(&spec, 0);

    let aic = select_aic(&data, BASELINE_MAX_STEPS)?;
    println!("AIC stepwise: {}", aic.model.label());
    for mv in &aic.path {
        println!("  {:?} {:<3} AIC={:.3}", mv.kind, mv.variable, mv.aic);
    }

    let coeff = select_pvalue(&data, COEFF_ALPHA, BASELINE_MAX_STEPS)?;
    println!("\nWald p-value forward selection: {}", coeff.model.label());
    for mv in &coeff.path {
        println!("  {:?} {:<3} AIC={:.3}", mv.kind, mv.variable, mv.aic);
    }
    Ok(())
}

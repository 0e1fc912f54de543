//! Discrimination and calibration measures on two competing score vectors.

use csslr::glm::fit_logistic;
use csslr::quality::{auc, brier, delong_test, redelmeier_test, spiegelhalter_test};
use csslr::simulation::{generate_dataset, StudySpec};
use csslr::SelectionConfig;

fn main() -> csslr::Result<()> {
    let spec = StudySpec::builtin("table3").expect("built-in study");
    let data = generate_dataset(&spec, 1);
    let config = SelectionConfig::csslr1a();
    let labels = data.response();

    let a = fit_logistic(&data, &["S1", "S2", "S3"], &config)?;
    let b = fit_logistic(&data, &["S1", "S2"], &config)?;
    let (pa, pb) = (&a.fitted_probs, &b.fitted_probs);

    println!("AUC   {:.4} vs {:.4}", auc(pa, labels)?, auc(pb, labels)?);
    println!("Brier {:.5} vs {:.5}", brier(pa, labels)?, brier(pb, labels)?);
    for (name, p) in [("A", pa), ("B", pb)] {
        let s = spiegelhalter_test(p, labels)?;
        println!("Spiegelhalter {name}: z={:+.3} p={:.3}", s.statistic, s.p_value);
    }
    let d = delong_test(pa, pb, labels)?;
    println!("DeLong:     z={:+.3} p={:.3e} better={:?}", d.statistic, d.p_value, d.direction);
    let r = redelmeier_test(pa, pb, labels)?;
    println!("Redelmeier: z={:+.3} p={:.3e} better={:?}", r.statistic, r.p_value, r.direction);
    Ok(())
}

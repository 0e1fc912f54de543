//! Logistic regression by iteratively reweighted least squares, plus the
//! model-level statistics built on top of it: likelihood-ratio and Wald tests
//! and variance inflation factors.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::data::{Dataset, SelectionConfig};
use crate::dist::{chi_square_sf, normal_two_sided_p};
use crate::error::{Error, Result};
use crate::linalg::{Cholesky, SymMatrix};
use crate::quality;

/// Probabilities are clamped to this distance from 0 and 1.
pub const PROB_CLAMP: f64 = 1e-12;

/// Logistic regression fitted on a subset of a dataset's variables.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FittedModel {
    /// Dataset column indices, in inclusion order.
    #[serde(skip)]
    pub variables: Vec<usize>,
    pub variable_names: Vec<String>,
    pub intercept: f64,
    pub coefficients: Vec<f64>,
    #[serde(skip)]
    pub fitted_probs: Vec<f64>,
    pub log_likelihood: f64,
    pub aic: f64,
    pub converged: bool,
    pub iterations: usize,
    /// Intercept first, then one entry per coefficient. NaN when the
    /// information matrix at the estimate is singular.
    pub coef_std_errors: Vec<f64>,
    /// In-sample AUC of the fitted probabilities.
    pub auc: f64,
    /// In-sample Brier score.
    pub mse: f64,
    #[serde(skip)]
    pub(crate) placements: Arc<quality::Placements>,
}

impl FittedModel {
    /// Number of non-intercept coefficients.
    pub fn n_variables(&self) -> usize {
        self.variables.len()
    }

    pub fn n_parameters(&self) -> usize {
        self.variables.len() + 1
    }

    pub fn contains(&self, index: usize) -> bool {
        self.variables.contains(&index)
    }

    pub fn coefficient_of(&self, index: usize) -> Option<f64> {
        self.variables
            .iter()
            .position(|&v| v == index)
            .map(|k| self.coefficients[k])
    }

    /// Variable indices sorted ascending; identifies the model irrespective
    /// of inclusion order.
    pub fn key(&self) -> Vec<usize> {
        let mut k = self.variables.clone();
        k.sort_unstable();
        k
    }

    /// Variable names sorted, for deterministic tie-breaking.
    pub fn sorted_names(&self) -> Vec<&str> {
        let mut names: Vec<&str> = self.variable_names.iter().map(String::as_str).collect();
        names.sort_unstable();
        names
    }

    /// The same fit with its variables listed in `order` (a permutation of
    /// the model's variables).
    pub(crate) fn reordered(&self, order: &[usize]) -> FittedModel {
        let pos: Vec<usize> = order
            .iter()
            .map(|v| self.variables.iter().position(|w| w == v).expect("permutation"))
            .collect();
        let mut se = vec![self.coef_std_errors[0]];
        se.extend(pos.iter().map(|&k| self.coef_std_errors[k + 1]));
        FittedModel {
            variables: order.to_vec(),
            variable_names: pos.iter().map(|&k| self.variable_names[k].clone()).collect(),
            coefficients: pos.iter().map(|&k| self.coefficients[k]).collect(),
            coef_std_errors: se,
            ..self.clone()
        }
    }

    pub fn label(&self) -> String {
        if self.variable_names.is_empty() {
            "(constant)".to_string()
        } else {
            self.variable_names.join(" + ")
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    FirstBetter,
    SecondBetter,
    #[serde(rename = "None")]
    Neither,
}

impl Direction {
    pub fn mirrored(self) -> Self {
        match self {
            Direction::FirstBetter => Direction::SecondBetter,
            Direction::SecondBetter => Direction::FirstBetter,
            Direction::Neither => Direction::Neither,
        }
    }
}

/// Outcome of a hypothesis test. `degenerate` marks tests whose variance
/// vanished; those report p = 1 and no direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub statistic: f64,
    pub p_value: f64,
    pub direction: Direction,
    pub degenerate: bool,
}

impl TestResult {
    pub fn degenerate() -> Self {
        Self {
            statistic: 0.0,
            p_value: 1.0,
            direction: Direction::Neither,
            degenerate: true,
        }
    }

    pub fn significant(&self, threshold: f64) -> bool {
        self.p_value < threshold
    }
}

#[inline]
fn logistic(eta: f64) -> f64 {
    if eta >= 0.0 {
        1.0 / (1.0 + (-eta).exp())
    } else {
        let e = eta.exp();
        e / (1.0 + e)
    }
}

#[inline]
fn clamp_prob(p: f64) -> f64 {
    p.clamp(PROB_CLAMP, 1.0 - PROB_CLAMP)
}

/// Fits the logistic model on the named variables.
pub fn fit_logistic(
    data: &Dataset,
    variables: &[impl AsRef<str>],
    config: &SelectionConfig,
) -> Result<FittedModel> {
    let idx = data.resolve(variables)?;
    fit_indices(data, &idx, config.fit_tolerance, config.fit_max_iterations)
}

struct Pass {
    log_likelihood: f64,
    information: SymMatrix,
    score: Vec<f64>,
}

fn evaluate(data: &Dataset, columns: &[&[f64]], beta: &[f64]) -> Pass {
    let p = beta.len();
    let y = data.response();
    let mut info = SymMatrix::zeros(p);
    let mut score = vec![0.0; p];
    let mut ll = 0.0;
    let mut x = vec![1.0; p];
    for i in 0..data.n() {
        for (k, col) in columns.iter().enumerate() {
            x[k + 1] = col[i];
        }
        let eta: f64 = x.iter().zip(beta).map(|(a, b)| a * b).sum();
        let pi = logistic(eta);
        let pc = clamp_prob(pi);
        let yi = y[i] as f64;
        ll += if y[i] == 1 { pc.ln() } else { (1.0 - pc).ln() };
        let resid = yi - pi;
        let w = pi * (1.0 - pi);
        for a in 0..p {
            score[a] += resid * x[a];
            let wa = w * x[a];
            let row = &mut info.data[a * p..(a + 1) * p];
            for b in a..p {
                row[b] += wa * x[b];
            }
        }
    }
    info.symmetrize_from_upper();
    Pass {
        log_likelihood: ll,
        information: info,
        score,
    }
}

/// IRLS (Newton) fit on column indices. Converged iff the largest absolute
/// coefficient change falls below `tolerance` within `max_iterations`.
/// Steps that lower the likelihood are halved up to ten times.
pub fn fit_indices(
    data: &Dataset,
    variables: &[usize],
    tolerance: f64,
    max_iterations: usize,
) -> Result<FittedModel> {
    let p = variables.len() + 1;
    let columns: Vec<&[f64]> = variables.iter().map(|&v| data.column(v)).collect();
    let mut beta = vec![0.0; p];
    let mut pass = evaluate(data, &columns, &beta);
    let mut converged = false;
    let mut iterations = 0;

    for iter in 0..max_iterations {
        iterations = iter + 1;
        let chol = match Cholesky::new(&pass.information) {
            Ok(c) => c,
            Err(e) if iter == 0 => return Err(e),
            Err(_) => break,
        };
        let mut delta = chol.solve(&pass.score);
        if delta.iter().any(|d| !d.is_finite()) {
            break;
        }
        let mut trial: Vec<f64> = beta.iter().zip(&delta).map(|(b, d)| b + d).collect();
        let mut next = evaluate(data, &columns, &trial);
        let mut halvings = 0;
        while next.log_likelihood < pass.log_likelihood - 1e-10 * pass.log_likelihood.abs()
            && halvings < 10
        {
            delta.iter_mut().for_each(|d| *d *= 0.5);
            trial = beta.iter().zip(&delta).map(|(b, d)| b + d).collect();
            next = evaluate(data, &columns, &trial);
            halvings += 1;
        }
        let change = delta.iter().fold(0.0_f64, |m, d| m.max(d.abs()));
        beta = trial;
        pass = next;
        if change < tolerance {
            converged = true;
            break;
        }
    }

    let coef_std_errors = match Cholesky::new(&pass.information) {
        Ok(ch) => ch.inverse_diagonal().into_iter().map(f64::sqrt).collect(),
        Err(_) => vec![f64::NAN; p],
    };

    let fitted_probs: Vec<f64> = (0..data.n())
        .map(|i| {
            let eta = beta[0]
                + columns
                    .iter()
                    .zip(&beta[1..])
                    .map(|(c, b)| c[i] * b)
                    .sum::<f64>();
            clamp_prob(logistic(eta))
        })
        .collect();

    let labels = data.response();
    let placements = quality::Placements::new(&fitted_probs, labels)?;
    let auc = placements.auc();
    let mse = quality::brier(&fitted_probs, labels)?;
    let log_likelihood = pass.log_likelihood;

    Ok(FittedModel {
        variables: variables.to_vec(),
        variable_names: variables
            .iter()
            .map(|&v| data.variables()[v].name.clone())
            .collect(),
        intercept: beta[0],
        coefficients: beta[1..].to_vec(),
        fitted_probs,
        log_likelihood,
        aic: 2.0 * p as f64 - 2.0 * log_likelihood,
        converged,
        iterations,
        coef_std_errors,
        auc,
        mse,
        placements: Arc::new(placements),
    })
}

/// Likelihood-ratio test of `nested` against `full`.
pub fn lr_test(nested: &FittedModel, full: &FittedModel) -> Result<TestResult> {
    if !nested.variables.iter().all(|v| full.contains(*v)) {
        return Err(Error::NotNested);
    }
    let df = full.n_parameters() as i64 - nested.n_parameters() as i64;
    if df <= 0 {
        return Err(Error::NonPositiveDf(df));
    }
    if !nested.converged || !full.converged {
        return Err(Error::NotConverged);
    }
    let statistic = (2.0 * (full.log_likelihood - nested.log_likelihood)).max(0.0);
    Ok(TestResult {
        statistic,
        p_value: chi_square_sf(statistic, df as f64),
        direction: if statistic > 0.0 {
            Direction::SecondBetter
        } else {
            Direction::Neither
        },
        degenerate: false,
    })
}

/// Two-sided Wald p-values for every non-intercept coefficient.
pub fn wald_pvalues(model: &FittedModel) -> Result<Vec<(String, f64)>> {
    model
        .variable_names
        .iter()
        .enumerate()
        .map(|(k, name)| {
            let se = model.coef_std_errors[k + 1];
            if !(se.is_finite() && se > 0.0) {
                return Err(Error::InvalidStdError(name.clone()));
            }
            Ok((name.clone(), normal_two_sided_p(model.coefficients[k] / se)))
        })
        .collect()
}

/// Variance inflation factors of the named variables.
pub fn vif(data: &Dataset, variables: &[impl AsRef<str>]) -> Result<Vec<(String, f64)>> {
    let idx = data.resolve(variables)?;
    let values = vif_indices(data, &idx)?;
    Ok(idx
        .iter()
        .zip(values)
        .map(|(&i, v)| (data.variables()[i].name.clone(), v))
        .collect())
}

/// VIFs from the diagonal of the inverse predictor correlation matrix.
/// Variables lying in the span of the others get `+inf`.
pub fn vif_indices(data: &Dataset, variables: &[usize]) -> Result<Vec<f64>> {
    let m = variables.len();
    let n = data.n();
    // centred columns scaled to unit norm
    let mut z: Vec<Vec<f64>> = Vec::with_capacity(m);
    for &v in variables {
        let col = data.column(v);
        let mean = col.iter().sum::<f64>() / n as f64;
        let c: Vec<f64> = col.iter().map(|x| x - mean).collect();
        let norm = c.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(norm > 0.0) || norm <= 1e-12 * (mean.abs() * (n as f64).sqrt()) {
            return Err(Error::ZeroVariance(data.variables()[v].name.clone()));
        }
        z.push(c.into_iter().map(|x| x / norm).collect());
    }
    if m < 2 {
        return Ok(vec![1.0; m]);
    }
    let mut corr = SymMatrix::zeros(m);
    for a in 0..m {
        for b in a..m {
            let r: f64 = z[a].iter().zip(&z[b]).map(|(x, y)| x * y).sum();
            corr.set(a, b, if a == b { 1.0 } else { r });
        }
    }
    corr.symmetrize_from_upper();
    match Cholesky::new(&corr) {
        Ok(ch) => Ok(ch.inverse_diagonal()),
        Err(_) => Ok((0..m).map(|j| vif_by_projection(&z, j)).collect()),
    }
}

/// 1 / (1 - R_j^2) where R_j^2 comes from projecting column `j` on the span of
/// the remaining columns; dependent columns among the others are skipped.
fn vif_by_projection(z: &[Vec<f64>], j: usize) -> f64 {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for (k, col) in z.iter().enumerate() {
        if k == j {
            continue;
        }
        let mut r = col.clone();
        for q in &basis {
            let d: f64 = r.iter().zip(q).map(|(a, b)| a * b).sum();
            r.iter_mut().zip(q).for_each(|(a, b)| *a -= d * b);
        }
        let norm = r.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-8 {
            basis.push(r.into_iter().map(|x| x / norm).collect());
        }
    }
    let mut r = z[j].clone();
    for q in &basis {
        let d: f64 = r.iter().zip(q).map(|(a, b)| a * b).sum();
        r.iter_mut().zip(q).for_each(|(a, b)| *a -= d * b);
    }
    let resid = r.iter().map(|x| x * x).sum::<f64>();
    if resid < 1e-12 {
        f64::INFINITY
    } else {
        1.0 / resid
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Variable;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn cfg() -> SelectionConfig {
        SelectionConfig::csslr1a()
    }

    fn two_gaussian(k: usize, mu: f64, seed: u64) -> Dataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut response = vec![0u8; k];
        response.extend(vec![1u8; k]);
        let values = response
            .iter()
            .map(|&r| {
                let z: f64 = rng.sample(StandardNormal);
                z + if r == 0 { mu } else { -mu }
            })
            .collect();
        Dataset::new("y", response, vec![Variable { name: "s".into(), values }]).unwrap()
    }

    #[test]
    fn constant_model_on_balanced_data() {
        let data = two_gaussian(500, 1.0, 1);
        let m = fit_logistic(&data, &[] as &[&str], &cfg()).unwrap();
        assert!(m.converged);
        assert!(m.intercept.abs() < 1e-8);
        assert!(m.fitted_probs.iter().all(|&p| (p - 0.5).abs() < 1e-12));
        assert!((m.log_likelihood + 1000.0 * 2f64.ln()).abs() < 1e-9);
        assert!((m.aic - (2.0 + 2000.0 * 2f64.ln())).abs() < 1e-9);
    }

    #[test]
    fn constant_model_reproduces_bad_rate() {
        let data = Dataset::new(
            "y",
            vec![0, 0, 0, 1],
            vec![Variable { name: "x".into(), values: vec![1.0, 2.0, 3.0, 4.0] }],
        )
        .unwrap();
        let m = fit_indices(&data, &[], 1e-10, 50).unwrap();
        assert!(m.fitted_probs.iter().all(|&p| (p - 0.25).abs() < 1e-10));
    }

    #[test]
    fn slope_matches_gaussian_log_odds() {
        // log P(bad|x)/P(good|x) for N(-1,1) vs N(+1,1) is -2x
        let data = two_gaussian(500, 1.0, 7);
        let m = fit_logistic(&data, &["s"], &cfg()).unwrap();
        assert!(m.converged);
        assert!((m.coefficients[0] + 2.0).abs() < 0.3, "{}", m.coefficients[0]);
    }

    #[test]
    fn score_vanishes_at_optimum() {
        let data = two_gaussian(500, 0.5, 3);
        let m = fit_logistic(&data, &["s"], &cfg()).unwrap();
        let y = data.response();
        let x = data.column(0);
        let s0: f64 = (0..data.n()).map(|i| y[i] as f64 - m.fitted_probs[i]).sum();
        let s1: f64 = (0..data.n()).map(|i| (y[i] as f64 - m.fitted_probs[i]) * x[i]).sum();
        assert!(s0.abs() < 1e-6 * data.n() as f64);
        assert!(s1.abs() < 1e-6 * data.n() as f64);
    }

    #[test]
    fn duplicate_column_is_singular() {
        let base = two_gaussian(100, 1.0, 5);
        let col = base.column(0).to_vec();
        let data = Dataset::new(
            "y",
            base.response().to_vec(),
            vec![
                Variable { name: "a".into(), values: col.clone() },
                Variable { name: "b".into(), values: col },
            ],
        )
        .unwrap();
        let err = fit_logistic(&data, &["a", "b"], &cfg()).unwrap_err();
        assert!(matches!(err, Error::SingularMatrix));
        assert_eq!(err.to_string(), "singular matrix");
    }

    #[test]
    fn separation_is_reported_as_non_convergence() {
        let data = Dataset::new(
            "y",
            vec![0, 0, 0, 1, 1, 1],
            vec![Variable {
                name: "x".into(),
                values: vec![-3.0, -2.0, -1.0, 1.0, 2.0, 3.0],
            }],
        )
        .unwrap();
        let m = fit_logistic(&data, &["x"], &cfg()).unwrap();
        assert!(!m.converged);
    }

    #[test]
    fn lr_test_on_uninformative_column() {
        // a column orthogonal to the nested model's residuals (and to the
        // intercept and s) has MLE coefficient exactly 0 in the full model
        let base = two_gaussian(200, 1.0, 9);
        let nested = fit_logistic(&base, &["s"], &cfg()).unwrap();
        let s = base.column(0);
        let resid: Vec<f64> = (0..400)
            .map(|i| base.response()[i] as f64 - nested.fitted_probs[i])
            .collect();
        let mut z: Vec<f64> = (0..400).map(|i| ((i * 37) % 11) as f64 - 5.0).collect();
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        let rr = dot(&resid, &resid);
        let c = dot(&z, &resid) / rr;
        z.iter_mut().zip(&resid).for_each(|(x, r)| *x -= c * r);
        let data = Dataset::new(
            "y",
            base.response().to_vec(),
            vec![
                Variable { name: "s".into(), values: s.to_vec() },
                Variable { name: "z".into(), values: z },
            ],
        )
        .unwrap();
        let nested = fit_logistic(&data, &["s"], &cfg()).unwrap();
        let full = fit_logistic(&data, &["s", "z"], &cfg()).unwrap();
        assert!(full.coefficients[1].abs() < 1e-8);
        let t = lr_test(&nested, &full).unwrap();
        assert!(t.statistic < 1e-8);
        assert!(t.p_value > 0.999);
        assert!(matches!(lr_test(&full, &nested), Err(Error::NotNested)));
        assert!(matches!(lr_test(&full, &full), Err(Error::NonPositiveDf(0))));
    }

    #[test]
    fn wald_zero_coefficient() {
        let data = two_gaussian(200, 1.0, 2);
        let mut m = fit_logistic(&data, &["s"], &cfg()).unwrap();
        m.coefficients[0] = 0.0;
        assert_eq!(wald_pvalues(&m).unwrap()[0].1, 1.0);
        m.coef_std_errors[1] = 0.0;
        assert!(matches!(wald_pvalues(&m), Err(Error::InvalidStdError(_))));
    }

    #[test]
    fn vif_two_column_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a: Vec<f64> = (0..300).map(|_| rng.sample(StandardNormal)).collect();
        let b: Vec<f64> = a
            .iter()
            .map(|x| 0.6 * x + 0.8 * rng.sample::<f64, _>(StandardNormal))
            .collect();
        let data = Dataset::new(
            "y",
            (0..300).map(|i| (i % 2) as u8).collect(),
            vec![
                Variable { name: "a".into(), values: a.clone() },
                Variable { name: "b".into(), values: b.clone() },
            ],
        )
        .unwrap();
        let n = a.len() as f64;
        let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
        let sab: f64 = a.iter().zip(&b).map(|(x, y)| (x - ma) * (y - mb)).sum();
        let saa: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
        let sbb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
        let rho = sab / (saa * sbb).sqrt();
        let expected = 1.0 / (1.0 - rho * rho);
        let v = vif(&data, &["a", "b"]).unwrap();
        assert!((v[0].1 - expected).abs() < 1e-10);
        assert!((v[1].1 - expected).abs() < 1e-10);
    }

    #[test]
    fn vif_degenerate_cases() {
        let base = two_gaussian(100, 0.0, 4);
        let col = base.column(0).to_vec();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let other: Vec<f64> = (0..200).map(|_| rng.sample(StandardNormal)).collect();
        let data = Dataset::new(
            "y",
            base.response().to_vec(),
            vec![
                Variable { name: "a".into(), values: col.clone() },
                Variable { name: "b".into(), values: col },
                Variable { name: "c".into(), values: other },
                Variable { name: "k".into(), values: vec![3.0; 200] },
            ],
        )
        .unwrap();
        let v = vif(&data, &["a", "b", "c"]).unwrap();
        assert!(v[0].1.is_infinite() && v[1].1.is_infinite());
        assert!(v[2].1.is_finite() && v[2].1 >= 1.0);
        assert_eq!(vif(&data, &["a"]).unwrap()[0].1, 1.0);
        assert!(vif(&data, &[] as &[&str]).unwrap().is_empty());
        assert!(matches!(vif(&data, &["a", "k"]), Err(Error::ZeroVariance(_))));
    }
}

//! Synthetic two-class Gaussian data and the Monte Carlo study runner.
//!
//! # Random streams
//!
//! Replication `r` of a study with seed `s` draws from
//! `ChaCha8Rng::seed_from_u64(s)` switched to stream `r` (`set_stream`).
//! Values are filled column by column (strong, weak, then nuisance), row by
//! row within a column, each as `mu_row + StandardNormal` from `rand_distr`.
//! A replication therefore depends on nothing but `(s, r)`, and studies give
//! the same numbers however replications are scheduled.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{select_aic, select_pvalue};
use crate::data::{Dataset, ExpectedSign, SelectionConfig, SignExpectation, Variable, PROFILE_NAMES};
use crate::error::{Error, Result};
use crate::glm::FittedModel;
use crate::selection::{max_auc_index, run_csslr, SelectionResult};

/// Alpha of the coefficient-p-value baseline.
pub const COEFF_ALPHA: f64 = 0.05;
/// Step budget for the baselines.
pub const BASELINE_MAX_STEPS: usize = 100;

/// Which selected variables of a CSSLR run are counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum CountingRule {
    /// The leader with the largest AUC.
    #[default]
    Representative,
    /// Every variable in any model of the final set.
    Union,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudySpec {
    pub n_strong: usize,
    pub n_weak: usize,
    pub n_nuisance: usize,
    #[serde(default)]
    pub mu_strong: f64,
    #[serde(default)]
    pub mu_weak: f64,
    /// Observations per class.
    pub k: usize,
    pub replications: usize,
    pub seed: u64,
    pub methods: Vec<String>,
    #[serde(default)]
    pub counting: CountingRule,
}

pub const BUILTIN_STUDIES: [&str; 4] = ["table3", "table4", "table5", "table6"];
pub const BASELINE_NAMES: [&str; 2] = ["AIC", "Coeff"];

pub fn all_method_names() -> Vec<String> {
    PROFILE_NAMES
        .iter()
        .chain(BASELINE_NAMES.iter())
        .map(|s| s.to_string())
        .collect()
}

impl StudySpec {
    /// The four benchmark studies at full size (K = 500, 1000 replications).
    pub fn builtin(name: &str) -> Option<Self> {
        let (n_strong, n_weak, n_nuisance, mu_strong, mu_weak) = match name {
            "table3" => (3, 3, 14, 1.0, 0.5),
            "table4" => (3, 3, 14, 0.3, 0.15),
            "table5" => (0, 3, 17, 0.0, 0.15),
            "table6" => (0, 0, 20, 0.0, 0.0),
            _ => return None,
        };
        Some(Self {
            n_strong,
            n_weak,
            n_nuisance,
            mu_strong,
            mu_weak,
            k: 500,
            replications: 1000,
            seed: 1,
            methods: all_method_names(),
            counting: CountingRule::Representative,
        })
    }

    pub fn n_variables(&self) -> usize {
        self.n_strong + self.n_weak + self.n_nuisance
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidStudy(msg.to_string()));
        if self.n_variables() == 0 {
            return bad("at least one variable is required");
        }
        if self.k < 2 {
            return bad("k must be at least 2");
        }
        if self.replications == 0 {
            return bad("replications must be positive");
        }
        if !(self.mu_strong >= 0.0 && self.mu_weak >= 0.0) {
            return bad("means must be finite and non-negative");
        }
        if self.n_strong > 0 && self.n_weak > 0 && !(self.mu_strong > self.mu_weak) {
            return bad("mu_strong must exceed mu_weak");
        }
        if self.methods.is_empty() {
            return bad("no methods listed");
        }
        Ok(())
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let spec: Self = toml::from_str(text).map_err(|e| Error::InvalidStudy(e.message().to_string()))?;
        spec.validate()?;
        Ok(spec)
    }
}

/// Draws replication `replication` of the study's data.
pub fn generate_dataset(spec: &StudySpec, replication: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(replication);
    let k = spec.k;
    let mut response = vec![0u8; k];
    response.extend(std::iter::repeat_n(1u8, k));

    let groups = [
        ("S", spec.n_strong, spec.mu_strong),
        ("W", spec.n_weak, spec.mu_weak),
        ("R", spec.n_nuisance, 0.0),
    ];
    let mut variables = Vec::with_capacity(spec.n_variables());
    for (prefix, count, mu) in groups {
        for c in 1..=count {
            let values = response
                .iter()
                .map(|&r| {
                    let shift = if r == 0 { mu } else { -mu };
                    shift + rng.sample::<f64, _>(StandardNormal)
                })
                .collect();
            variables.push(Variable {
                name: format!("{prefix}{c}"),
                values,
            });
        }
    }
    Dataset::new("I", response, variables).expect("generated data is valid")
}

/// Discriminating columns (S*, W*) lower P(bad) as they grow; nuisance
/// columns carry no expectation.
pub fn generated_signs(spec: &StudySpec, data: &Dataset) -> SignExpectation {
    let pairs = data
        .variables()
        .iter()
        .take(spec.n_strong + spec.n_weak)
        .map(|v| (v.name.clone(), ExpectedSign::Negative));
    SignExpectation::from_pairs(data, pairs).expect("names come from the dataset")
}

/// The max-AUC leader of a selection result.
pub fn representative_model(result: &SelectionResult) -> &FittedModel {
    let leaders: Vec<FittedModel> = result.leader_models().cloned().collect();
    let best = max_auc_index(&leaders);
    &result.final_models.models()[result.leaders[best]]
}

#[derive(Debug, Clone, PartialEq)]
pub enum Method {
    Csslr { name: String, config: SelectionConfig },
    Aic,
    Coeff { alpha: f64 },
}

impl Method {
    pub fn name(&self) -> &str {
        match self {
            Method::Csslr { name, .. } => name,
            Method::Aic => "AIC",
            Method::Coeff { .. } => "Coeff",
        }
    }

    /// Resolves a method name: the keys of `configs` first, then the built-in
    /// profiles and baselines.
    pub fn resolve(name: &str, configs: &BTreeMap<String, SelectionConfig>) -> Result<Self> {
        if let Some(cfg) = configs.get(name) {
            return Ok(Method::Csslr {
                name: name.to_string(),
                config: *cfg,
            });
        }
        if let Some(cfg) = SelectionConfig::profile(name) {
            let canonical = PROFILE_NAMES
                .iter()
                .find(|p| p.eq_ignore_ascii_case(name))
                .copied()
                .unwrap_or(name);
            return Ok(Method::Csslr {
                name: canonical.to_string(),
                config: cfg,
            });
        }
        match name.to_ascii_lowercase().as_str() {
            "aic" => Ok(Method::Aic),
            "coeff" => Ok(Method::Coeff { alpha: COEFF_ALPHA }),
            _ => {
                let mut valid: Vec<String> = configs.keys().cloned().collect();
                valid.extend(all_method_names());
                Err(Error::UnknownMethod {
                    name: name.to_string(),
                    valid: valid.join(", "),
                })
            }
        }
    }

    /// Indices of the counted variables for one dataset.
    pub fn selected_variables(
        &self,
        data: &Dataset,
        signs: &SignExpectation,
        counting: CountingRule,
    ) -> Result<Vec<usize>> {
        match self {
            Method::Csslr { config, .. } => {
                let result = run_csslr(data, signs, config)?;
                Ok(match counting {
                    CountingRule::Representative => representative_model(&result).variables.clone(),
                    CountingRule::Union => {
                        let mut all: Vec<usize> = result
                            .final_models
                            .models()
                            .iter()
                            .flat_map(|m| m.variables.iter().copied())
                            .collect();
                        all.sort_unstable();
                        all.dedup();
                        all
                    }
                })
            }
            Method::Aic => Ok(select_aic(data, BASELINE_MAX_STEPS)?.model.variables),
            Method::Coeff { alpha } => {
                Ok(select_pvalue(data, *alpha, BASELINE_MAX_STEPS)?.model.variables)
            }
        }
    }
}

/// Counts of selected strong, weak and nuisance variables in one run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct ClassCounts {
    pub strong: usize,
    pub weak: usize,
    pub nuisance: usize,
}

impl ClassCounts {
    pub fn classify(spec: &StudySpec, selected: &[usize]) -> Self {
        let mut c = ClassCounts::default();
        for &v in selected {
            if v < spec.n_strong {
                c.strong += 1;
            } else if v < spec.n_strong + spec.n_weak {
                c.weak += 1;
            } else {
                c.nuisance += 1;
            }
        }
        c
    }
}

/// P (percentage of runs selecting at least one) and A (mean count given at
/// least one) for one variable class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassMetric {
    pub percent: f64,
    /// `None` when no run selected the class.
    pub average: Option<f64>,
}

impl ClassMetric {
    fn from_counts(counts: &[usize]) -> Self {
        let runs = counts.len();
        let hits: Vec<usize> = counts.iter().copied().filter(|&c| c > 0).collect();
        if runs == 0 {
            return Self {
                percent: f64::NAN,
                average: None,
            };
        }
        Self {
            percent: 100.0 * hits.len() as f64 / runs as f64,
            average: if hits.is_empty() {
                None
            } else {
                Some(hits.iter().sum::<usize>() as f64 / hits.len() as f64)
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodSummary {
    pub method: String,
    pub strong: ClassMetric,
    pub weak: ClassMetric,
    pub nuisance: ClassMetric,
    /// Replications that entered the denominators.
    pub runs: usize,
    /// Replications where the method failed outright.
    pub failures: usize,
    /// Per-replication counts, in replication order; failures are `None`.
    #[serde(skip)]
    pub per_replication: Vec<Option<ClassCounts>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyResult {
    pub has_strong: bool,
    pub has_weak: bool,
    pub has_nuisance: bool,
    pub rows: Vec<MethodSummary>,
}

impl StudyResult {
    pub fn row(&self, method: &str) -> Option<&MethodSummary> {
        self.rows.iter().find(|r| r.method == method)
    }

    fn columns(&self) -> Vec<(&'static str, &'static str, fn(&MethodSummary) -> ClassMetric)> {
        let mut cols: Vec<(&'static str, &'static str, fn(&MethodSummary) -> ClassMetric)> = Vec::new();
        if self.has_strong {
            cols.push(("P_s", "A_s", |r| r.strong));
        }
        if self.has_weak {
            cols.push(("P_w", "A_w", |r| r.weak));
        }
        if self.has_nuisance {
            cols.push(("P_nd", "A_nd", |r| r.nuisance));
        }
        cols
    }

    fn cells(&self, row: &MethodSummary) -> Vec<String> {
        let mut out = vec![row.method.clone()];
        for (_, _, get) in self.columns() {
            let m = get(row);
            out.push(format!("{:.2}", m.percent));
            out.push(m.average.map_or_else(|| "NaN".to_string(), |a| format!("{a:.2}")));
        }
        out
    }

    fn header(&self) -> Vec<String> {
        let mut h = vec!["Method".to_string()];
        for (p, a, _) in self.columns() {
            h.push(p.to_string());
            h.push(a.to_string());
        }
        h
    }

    /// Right-aligned text table, columns `Method, P_s, A_s, P_w, A_w, P_nd,
    /// A_nd` with absent classes left out.
    pub fn to_table(&self) -> String {
        let mut rows = vec![self.header()];
        rows.extend(self.rows.iter().map(|r| self.cells(r)));
        let widths: Vec<usize> = (0..rows[0].len())
            .map(|c| rows.iter().map(|r| r[c].len()).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        for (i, row) in rows.iter().enumerate() {
            let line: Vec<String> = row
                .iter()
                .zip(&widths)
                .map(|(cell, w)| format!("{cell:>w$}"))
                .collect();
            let _ = writeln!(out, "{}", line.join("  "));
            if i == 0 {
                let _ = writeln!(out, "{}", "-".repeat(line.join("  ").len()));
            }
        }
        let failures: usize = self.rows.iter().map(|r| r.failures).sum();
        if failures > 0 {
            let _ = writeln!(out, "failed replications: {failures}");
        }
        out
    }

    /// CSV with the table's columns plus `runs` and `failures`.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let mut header = self.header();
        header.push("runs".into());
        header.push("failures".into());
        let _ = writeln!(out, "{}", header.join(","));
        for row in &self.rows {
            let mut cells = self.cells(row);
            cells.push(row.runs.to_string());
            cells.push(row.failures.to_string());
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }
}

/// Runs every listed method on every replication. Replications are spread
/// over the current rayon pool; results do not depend on the schedule.
pub fn run_study(spec: &StudySpec, configs: &BTreeMap<String, SelectionConfig>) -> Result<StudyResult> {
    spec.validate()?;
    let methods: Vec<Method> = spec
        .methods
        .iter()
        .map(|m| Method::resolve(m, configs))
        .collect::<Result<_>>()?;

    let per_rep: Vec<Vec<Option<ClassCounts>>> = (0..spec.replications as u64)
        .into_par_iter()
        .map(|r| {
            let data = generate_dataset(spec, r);
            let signs = generated_signs(spec, &data);
            methods
                .iter()
                .map(|m| {
                    m.selected_variables(&data, &signs, spec.counting)
                        .ok()
                        .map(|sel| ClassCounts::classify(spec, &sel))
                })
                .collect()
        })
        .collect();

    let rows = methods
        .iter()
        .enumerate()
        .map(|(mi, m)| {
            let outcomes: Vec<Option<ClassCounts>> = per_rep.iter().map(|r| r[mi]).collect();
            let ok: Vec<ClassCounts> = outcomes.iter().flatten().copied().collect();
            MethodSummary {
                method: m.name().to_string(),
                strong: ClassMetric::from_counts(&ok.iter().map(|c| c.strong).collect::<Vec<_>>()),
                weak: ClassMetric::from_counts(&ok.iter().map(|c| c.weak).collect::<Vec<_>>()),
                nuisance: ClassMetric::from_counts(&ok.iter().map(|c| c.nuisance).collect::<Vec<_>>()),
                runs: ok.len(),
                failures: outcomes.len() - ok.len(),
                per_replication: outcomes,
            }
        })
        .collect();

    Ok(StudyResult {
        has_strong: spec.n_strong > 0,
        has_weak: spec.n_weak > 0,
        has_nuisance: spec.n_nuisance > 0,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quality::auc;

    fn small(n_strong: usize, n_weak: usize, n_nuisance: usize) -> StudySpec {
        StudySpec {
            n_strong,
            n_weak,
            n_nuisance,
            mu_strong: 1.0,
            mu_weak: 0.5,
            k: 500,
            replications: 1,
            seed: 42,
            methods: vec!["AIC".into()],
            counting: CountingRule::Representative,
        }
    }

    #[test]
    fn layout_and_names() {
        let spec = small(2, 1, 2);
        let data = generate_dataset(&spec, 0);
        assert_eq!(data.n(), 1000);
        assert_eq!(data.variable_names(), vec!["S1", "S2", "W1", "R1", "R2"]);
        assert!(data.response()[..500].iter().all(|&r| r == 0));
        assert!(data.response()[500..].iter().all(|&r| r == 1));
        let signs = generated_signs(&spec, &data);
        assert_eq!(signs.get("S1"), ExpectedSign::Negative);
        assert_eq!(signs.get("W1"), ExpectedSign::Negative);
        assert_eq!(signs.get("R2"), ExpectedSign::NoExpectation);
    }

    #[test]
    fn replications_are_reproducible_and_distinct() {
        let spec = small(1, 0, 1);
        assert_eq!(generate_dataset(&spec, 3), generate_dataset(&spec, 3));
        assert_ne!(generate_dataset(&spec, 3), generate_dataset(&spec, 4));
    }

    #[test]
    fn strong_and_nuisance_auc() {
        let spec = small(1, 0, 1);
        let data = generate_dataset(&spec, 0);
        // larger values mean good, so score with the negated column
        let neg = |c: &[f64]| c.iter().map(|x| -x).collect::<Vec<_>>();
        let a_strong = auc(&neg(data.column(0)), data.response()).unwrap();
        let a_noise = auc(&neg(data.column(1)), data.response()).unwrap();
        assert!((a_strong - 0.921).abs() < 0.02, "{a_strong}");
        assert!((a_noise - 0.5).abs() < 0.03, "{a_noise}");
    }

    #[test]
    fn spec_validation() {
        let mut spec = small(0, 0, 0);
        assert!(spec.validate().is_err());
        spec = small(1, 1, 0);
        spec.mu_weak = 2.0;
        assert!(spec.validate().is_err());
        spec = small(1, 0, 0);
        spec.k = 1;
        assert!(spec.validate().is_err());
        assert!(StudySpec::builtin("table9").is_none());
        let t5 = StudySpec::builtin("table5").unwrap();
        assert_eq!((t5.n_strong, t5.n_weak, t5.n_nuisance, t5.mu_weak), (0, 3, 17, 0.15));
    }

    #[test]
    fn unknown_method_lists_valid_ones() {
        let err = Method::resolve("Lasso1", &BTreeMap::new()).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("Lasso1") && msg.contains("CSSLR2b") && msg.contains("Coeff"));
        assert_eq!(Method::resolve("csslr1b", &BTreeMap::new()).unwrap().name(), "CSSLR1b");
    }

    #[test]
    fn single_replication_percentages_are_degenerate() {
        let spec = StudySpec {
            methods: vec!["AIC".into(), "Coeff".into()],
            ..small(0, 0, 20)
        };
        let a = run_study(&spec, &BTreeMap::new()).unwrap();
        let b = run_study(&spec, &BTreeMap::new()).unwrap();
        assert_eq!(a, b);
        for row in &a.rows {
            assert!(row.nuisance.percent == 0.0 || row.nuisance.percent == 100.0);
            assert_eq!(row.nuisance.average.is_none(), row.nuisance.percent == 0.0);
        }
        assert!(a.to_table().lines().next().unwrap().ends_with("A_nd"));
        assert!(!a.to_table().contains("P_s"));
    }
}

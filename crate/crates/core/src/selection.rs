//! The multi-criteria stepwise selection engine.
//!
//! A run starts from the constant-only model. Each step tries to extend every
//! model of the current set by one variable; extensions that pass every
//! improvement gate are trimmed of variables that stopped contributing and
//! replace their parent. The enlarged set is then reduced to its leading
//! models plus the models equivalent to all of them. The run ends when a step
//! produces no improved model or the step budget is spent.
//!
//! Comparison tests inside the engine are always run as `(candidate, base)`
//! or `(model, leader)`, so [`Direction::FirstBetter`] favours the first of
//! that pair.

use std::cmp::Ordering;
use std::collections::HashMap;

use serde::Serialize;

use crate::data::{Dataset, DecisionMode, ExpectedSign, SelectionConfig, SignExpectation};
use crate::error::{Error, Result};
use crate::glm::{self, Direction, FittedModel, TestResult};
use crate::quality::{delong_from_placements, redelmeier_test, spiegelhalter_test};

/// Fits models by variable set, memoised for the lifetime of one run.
///
/// Every set is estimated with its columns in ascending index order and then
/// relabelled into the requested order, so a fit does not depend on the path
/// that led to it.
pub struct ModelFitter<'a> {
    data: &'a Dataset,
    tolerance: f64,
    max_iterations: usize,
    cache: HashMap<Vec<usize>, std::result::Result<FittedModel, String>>,
}

impl<'a> ModelFitter<'a> {
    pub fn new(data: &'a Dataset, config: &SelectionConfig) -> Self {
        Self::with_tolerance(data, config.fit_tolerance, config.fit_max_iterations)
    }

    pub fn with_tolerance(data: &'a Dataset, tolerance: f64, max_iterations: usize) -> Self {
        Self {
            data,
            tolerance,
            max_iterations,
            cache: HashMap::new(),
        }
    }

    pub fn data(&self) -> &'a Dataset {
        self.data
    }

    pub fn fit(&mut self, variables: &[usize]) -> std::result::Result<FittedModel, String> {
        let mut key = variables.to_vec();
        key.sort_unstable();
        let (data, tol, iters) = (self.data, self.tolerance, self.max_iterations);
        let fitted = self
            .cache
            .entry(key.clone())
            .or_insert_with(|| glm::fit_indices(data, &key, tol, iters).map_err(|e| e.to_string()));
        match fitted {
            Ok(m) if variables == key.as_slice() => Ok(m.clone()),
            Ok(m) => Ok(m.reordered(variables)),
            Err(e) => Err(e.clone()),
        }
    }
}

/// Per-gate outcomes of the improvement check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct Criteria {
    pub lr_pass: bool,
    pub sign_pass: bool,
    pub vif_pass: bool,
    pub calib_pass: bool,
    pub aic_pass: bool,
    pub auc_pass: bool,
    pub mse_pass: bool,
}

/// Everything the improvement check looked at, and its decision.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ImprovementVerdict {
    pub improved: bool,
    pub criteria: Criteria,
    pub candidate_variable: String,
    pub coefficient: f64,
    pub expected_sign: ExpectedSign,
    pub lr_statistic: f64,
    pub p_lr: f64,
    pub max_vif: f64,
    pub p_spiegelhalter: f64,
    pub p_spiegelhalter_base: f64,
    pub aic_base: f64,
    pub aic_candidate: f64,
    pub auc_base: f64,
    pub auc_candidate: f64,
    pub p_auc: f64,
    /// `FirstBetter` means the candidate has the higher AUC.
    pub auc_direction: Direction,
    pub mse_base: f64,
    pub mse_candidate: f64,
    pub p_mse: f64,
    /// `FirstBetter` means the candidate has the lower MSE.
    pub mse_direction: Direction,
    /// False when either model failed the calibration test, in which case the
    /// MSE comparison does not count in either direction.
    pub mse_evaluated: bool,
    pub reason: Option<String>,
}

impl ImprovementVerdict {
    fn rejected(candidate_variable: String, reason: String) -> Self {
        Self {
            improved: false,
            criteria: Criteria::default(),
            candidate_variable,
            coefficient: f64::NAN,
            expected_sign: ExpectedSign::NoExpectation,
            lr_statistic: f64::NAN,
            p_lr: f64::NAN,
            max_vif: f64::NAN,
            p_spiegelhalter: f64::NAN,
            p_spiegelhalter_base: f64::NAN,
            aic_base: f64::NAN,
            aic_candidate: f64::NAN,
            auc_base: f64::NAN,
            auc_candidate: f64::NAN,
            p_auc: f64::NAN,
            auc_direction: Direction::Neither,
            mse_base: f64::NAN,
            mse_candidate: f64::NAN,
            p_mse: f64::NAN,
            mse_direction: Direction::Neither,
            mse_evaluated: false,
            reason: Some(reason),
        }
    }
}

/// Decides whether `candidate` improves on `base`.
///
/// `candidate` must hold exactly one variable that `base` lacks. It usually
/// is `base` plus that variable; after trimming it may also have lost some of
/// `base`'s variables, in which case the significance of the new variable is
/// tested against the candidate without it.
pub fn check_improved(
    base: &FittedModel,
    candidate: &FittedModel,
    data: &Dataset,
    signs: &SignExpectation,
    config: &SelectionConfig,
) -> ImprovementVerdict {
    let mut fitter = ModelFitter::new(data, config);
    check_improved_with(&mut fitter, base, candidate, signs, config)
}

pub(crate) fn check_improved_with(
    fitter: &mut ModelFitter<'_>,
    base: &FittedModel,
    candidate: &FittedModel,
    signs: &SignExpectation,
    config: &SelectionConfig,
) -> ImprovementVerdict {
    let data = fitter.data();
    let added: Vec<usize> = candidate
        .variables
        .iter()
        .copied()
        .filter(|v| !base.contains(*v))
        .collect();
    let new_var = match added.as_slice() {
        [v] => *v,
        _ => {
            return ImprovementVerdict::rejected(
                candidate.variable_names.join(","),
                format!("candidate adds {} variables, expected exactly one", added.len()),
            )
        }
    };
    let name = data.variables()[new_var].name.clone();
    if !candidate.converged {
        return ImprovementVerdict::rejected(name, "candidate fit did not converge".into());
    }
    if !base.converged {
        return ImprovementVerdict::rejected(name, "base fit did not converge".into());
    }
    let labels = data.response();

    // (1) significance of the new coefficient
    let lr = if base.variables.iter().all(|v| candidate.contains(*v)) {
        glm::lr_test(base, candidate)
    } else {
        let without: Vec<usize> = candidate
            .variables
            .iter()
            .copied()
            .filter(|&v| v != new_var)
            .collect();
        fitter
            .fit(&without)
            .map_err(Error::InvalidDataset)
            .and_then(|nested| glm::lr_test(&nested, candidate))
    };
    let (lr_statistic, p_lr) = match lr {
        Ok(t) => (t.statistic, t.p_value),
        Err(_) => (f64::NAN, f64::NAN),
    };
    let lr_pass = p_lr < config.p_lr_i;

    // (2) expected sign
    let coefficient = candidate.coefficient_of(new_var).unwrap_or(f64::NAN);
    let expected_sign = signs.get(&name);
    let sign_pass = expected_sign.matches(coefficient);

    // (3) collinearity
    let max_vif = match glm::vif_indices(data, &candidate.variables) {
        Ok(v) => v.into_iter().fold(1.0, f64::max),
        Err(_) => f64::INFINITY,
    };
    let vif_pass = max_vif < config.v_crit;

    // (4) calibration of the candidate, and of the base for the MSE test
    let p_spiegelhalter = spiegel_p(&candidate.fitted_probs, labels);
    let p_spiegelhalter_base = spiegel_p(&base.fitted_probs, labels);
    let calib_pass = p_spiegelhalter > config.p_calib;
    let mse_evaluated = calib_pass && p_spiegelhalter_base > config.p_calib;

    // (5) overfitting
    let aic_pass = candidate.aic < base.aic;

    // (6) discrimination and calibration improvement
    let auc_test = delong_models(candidate, base);
    let mse_test = redelmeier_test(&candidate.fitted_probs, &base.fitted_probs, labels)
        .unwrap_or_else(|_| TestResult::degenerate());
    let auc_sig = auc_test.significant(config.p_auc_i);
    let mse_sig = mse_evaluated && mse_test.significant(config.p_mse_i);
    let auc_up = auc_sig && auc_test.direction == Direction::FirstBetter;
    let auc_down = auc_sig && auc_test.direction == Direction::SecondBetter;
    let mse_up = mse_sig && mse_test.direction == Direction::FirstBetter;
    let mse_down = mse_sig && mse_test.direction == Direction::SecondBetter;
    let (auc_pass, mse_pass, difference_pass) = match config.decision_mode {
        DecisionMode::AucAndMse => (auc_up, mse_up, auc_up && mse_up),
        DecisionMode::AucOrMse => {
            let a = auc_up && !mse_down;
            let m = mse_up && !auc_down;
            (a, m, a || m)
        }
    };

    let criteria = Criteria {
        lr_pass,
        sign_pass,
        vif_pass,
        calib_pass,
        aic_pass,
        auc_pass,
        mse_pass,
    };
    ImprovementVerdict {
        improved: lr_pass && sign_pass && vif_pass && calib_pass && aic_pass && difference_pass,
        criteria,
        candidate_variable: name,
        coefficient,
        expected_sign,
        lr_statistic,
        p_lr,
        max_vif,
        p_spiegelhalter,
        p_spiegelhalter_base,
        aic_base: base.aic,
        aic_candidate: candidate.aic,
        auc_base: base.auc,
        auc_candidate: candidate.auc,
        p_auc: auc_test.p_value,
        auc_direction: auc_test.direction,
        mse_base: base.mse,
        mse_candidate: candidate.mse,
        p_mse: mse_test.p_value,
        mse_direction: mse_test.direction,
        mse_evaluated,
        reason: None,
    }
}

/// DeLong test between two fits on the same data, from their cached
/// structural components.
fn delong_models(a: &FittedModel, b: &FittedModel) -> TestResult {
    delong_from_placements(&a.placements, &b.placements)
}

fn spiegel_p(probs: &[f64], labels: &[u8]) -> f64 {
    spiegelhalter_test(probs, labels).map_or(f64::NAN, |t| t.p_value)
}

/// Why a variable was dropped during trimming.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TrimReason {
    WrongSign,
    NoContribution,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrimRemoval {
    pub variable: String,
    pub reason: TrimReason,
    pub coefficient: f64,
    pub p_lr: f64,
    pub p_auc: f64,
    pub p_mse: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrimOutcome {
    pub model: FittedModel,
    pub removed: Vec<TrimRemoval>,
}

/// Drops previously included variables that have the wrong sign or no longer
/// contribute in likelihood, AUC or MSE, restarting after every removal.
pub fn trim_model(
    candidate: &FittedModel,
    base_variables: &[impl AsRef<str>],
    data: &Dataset,
    signs: &SignExpectation,
    config: &SelectionConfig,
) -> Result<TrimOutcome> {
    let base = data.resolve(base_variables)?;
    let mut fitter = ModelFitter::new(data, config);
    Ok(trim_with(&mut fitter, candidate, &base, signs, config))
}

pub(crate) fn trim_with(
    fitter: &mut ModelFitter<'_>,
    candidate: &FittedModel,
    base_variables: &[usize],
    signs: &SignExpectation,
    config: &SelectionConfig,
) -> TrimOutcome {
    let data = fitter.data();
    let labels = data.response();
    let mut current = candidate.clone();
    let mut removed = Vec::new();

    'restart: loop {
        let previous: Vec<usize> = current
            .variables
            .iter()
            .copied()
            .filter(|v| base_variables.contains(v))
            .collect();
        for vi in previous {
            let name = &data.variables()[vi].name;
            let coefficient = current.coefficient_of(vi).unwrap_or(f64::NAN);
            let reduced_vars: Vec<usize> =
                current.variables.iter().copied().filter(|&v| v != vi).collect();
            let reduced = match fitter.fit(&reduced_vars) {
                Ok(m) if m.converged => m,
                _ => continue,
            };
            let p_lr = glm::lr_test(&reduced, &current).map_or(f64::NAN, |t| t.p_value);
            let p_auc = delong_models(&current, &reduced).p_value;
            let p_mse = redelmeier_test(&current.fitted_probs, &reduced.fitted_probs, labels)
                .map_or(f64::NAN, |t| t.p_value);

            let reason = if !signs.get(name).matches(coefficient) {
                Some(TrimReason::WrongSign)
            } else if p_lr > config.p_lr_t && p_auc > config.p_auc_t && p_mse > config.p_mse_t {
                Some(TrimReason::NoContribution)
            } else {
                None
            };
            if let Some(reason) = reason {
                removed.push(TrimRemoval {
                    variable: name.clone(),
                    reason,
                    coefficient,
                    p_lr,
                    p_auc,
                    p_mse,
                });
                current = reduced;
                continue 'restart;
            }
        }
        break;
    }
    TrimOutcome {
        model: current,
        removed,
    }
}

fn better_by<F>(a: &FittedModel, b: &FittedModel, primary: F) -> bool
where
    F: Fn(&FittedModel, &FittedModel) -> Ordering,
{
    primary(a, b)
        .then_with(|| b.n_variables().cmp(&a.n_variables()))
        .then_with(|| b.sorted_names().cmp(&a.sorted_names()))
        == Ordering::Greater
}

fn argbest<F>(models: &[FittedModel], primary: F) -> usize
where
    F: Fn(&FittedModel, &FittedModel) -> Ordering + Copy,
{
    let mut best = 0;
    for i in 1..models.len() {
        if better_by(&models[i], &models[best], primary) {
            best = i;
        }
    }
    best
}

/// Index of the model with the highest AUC; ties go to fewer variables, then
/// to the lexicographically smaller sorted name list.
pub fn max_auc_index(models: &[FittedModel]) -> usize {
    argbest(models, |a, b| a.auc.total_cmp(&b.auc))
}

/// Index of the model with the lowest MSE, tie-broken like [`max_auc_index`].
pub fn min_mse_index(models: &[FittedModel]) -> usize {
    argbest(models, |a, b| b.mse.total_cmp(&a.mse))
}

/// Leading models of a set: one index, or two when neither the AUC leader
/// nor the MSE leader dominates the other.
pub fn leading_models(models: &[FittedModel], data: &Dataset, config: &SelectionConfig) -> Result<Vec<usize>> {
    if models.is_empty() {
        return Err(Error::EmptyModelSet);
    }
    let m1 = max_auc_index(models);
    let m2 = min_mse_index(models);
    if m1 == m2 {
        return Ok(vec![m1]);
    }
    let labels = data.response();
    let (a, b) = (&models[m1], &models[m2]);
    let p_auc = delong_models(a, b).p_value;
    let p_mse = redelmeier_test(&a.fitted_probs, &b.fitted_probs, labels)?.p_value;
    Ok(if p_auc < config.p_auc_e && p_mse > config.p_mse_e {
        vec![m1]
    } else if p_auc > config.p_auc_e && p_mse < config.p_mse_e {
        vec![m2]
    } else {
        vec![m1, m2]
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceDecision {
    pub model: Vec<String>,
    pub leader: Vec<String>,
    pub p_auc: f64,
    /// `FirstBetter` means the model beats the leader.
    pub auc_direction: Direction,
    pub p_mse: f64,
    pub mse_direction: Direction,
    pub equivalent: bool,
}

/// Runs both difference tests of `model` against `leader` and applies the
/// equivalence rule.
pub fn equivalence(
    model: &FittedModel,
    leader: &FittedModel,
    data: &Dataset,
    config: &SelectionConfig,
) -> EquivalenceDecision {
    let labels = data.response();
    let auc = delong_models(model, leader);
    let mse = redelmeier_test(&model.fitted_probs, &leader.fitted_probs, labels)
        .unwrap_or_else(|_| TestResult::degenerate());
    let equivalent = equivalent_by(&auc, &mse, config);
    EquivalenceDecision {
        model: model.variable_names.clone(),
        leader: leader.variable_names.clone(),
        p_auc: auc.p_value,
        auc_direction: auc.direction,
        p_mse: mse.p_value,
        mse_direction: mse.direction,
        equivalent,
    }
}

/// Neither test significant, or both significant in opposite directions.
fn equivalent_by(auc: &TestResult, mse: &TestResult, config: &SelectionConfig) -> bool {
    match (auc.significant(config.p_auc_e), mse.significant(config.p_mse_e)) {
        (false, false) => true,
        (true, true) => {
            auc.direction != Direction::Neither
                && mse.direction != Direction::Neither
                && auc.direction != mse.direction
        }
        _ => false,
    }
}

/// True when the two models cannot be ranked on discrimination and
/// calibration together.
pub fn check_equivalent(
    model: &FittedModel,
    leader: &FittedModel,
    data: &Dataset,
    config: &SelectionConfig,
) -> bool {
    equivalence(model, leader, data, config).equivalent
}

/// Models deduplicated by their (unordered) variable set; first insertion wins.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ModelSet {
    models: Vec<FittedModel>,
}

impl ModelSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns false when a model with the same variable set is present.
    pub fn insert(&mut self, model: FittedModel) -> bool {
        if self.contains_key(&model.key()) {
            return false;
        }
        self.models.push(model);
        true
    }

    pub fn contains_key(&self, key: &[usize]) -> bool {
        self.models.iter().any(|m| m.key() == key)
    }

    pub fn models(&self) -> &[FittedModel] {
        &self.models
    }

    pub fn len(&self) -> usize {
        self.models.len()
    }

    pub fn is_empty(&self) -> bool {
        self.models.is_empty()
    }

    pub fn into_models(self) -> Vec<FittedModel> {
        self.models
    }
}

impl FromIterator<FittedModel> for ModelSet {
    fn from_iter<I: IntoIterator<Item = FittedModel>>(iter: I) -> Self {
        let mut set = ModelSet::new();
        for m in iter {
            set.insert(m);
        }
        set
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CandidateOutcome {
    /// Entered the improved set.
    Accepted,
    /// Improved, but an identical variable set was already in the improved set.
    Duplicate,
    /// Failed at least one improvement gate.
    Rejected,
    /// Improved before trimming, no longer after it.
    DiscardedAfterTrim,
    /// The extended model could not be estimated.
    FitFailed,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CandidateRecord {
    pub base_variables: Vec<String>,
    pub candidate_variable: String,
    pub verdict: Option<ImprovementVerdict>,
    pub trimmed_away: Vec<TrimRemoval>,
    /// Re-check of the trimmed model against the same base.
    pub revalidation: Option<ImprovementVerdict>,
    pub final_variables: Vec<String>,
    pub outcome: CandidateOutcome,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepRecord {
    pub step: usize,
    pub candidates: Vec<CandidateRecord>,
    /// Models replaced by an improvement.
    pub deleted: Vec<Vec<String>>,
    /// Improved models after trimming and deduplication.
    pub improved: Vec<Vec<String>>,
    pub leaders: Vec<Vec<String>>,
    pub equivalence: Vec<EquivalenceDecision>,
    /// Models dropped by the per-step cap, lowest AUC first dropped.
    pub capped: Vec<Vec<String>>,
    /// The set carried into the next step.
    pub retained: Vec<Vec<String>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Termination {
    NoImprovement,
    MaxSteps,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionResult {
    pub final_models: ModelSet,
    /// Indices into `final_models`.
    pub leaders: Vec<usize>,
    pub trace: Vec<StepRecord>,
    pub terminated_by: Termination,
}

impl SelectionResult {
    pub fn leader_models(&self) -> impl Iterator<Item = &FittedModel> {
        self.leaders.iter().map(|&i| &self.final_models.models()[i])
    }
}

pub struct StepOutcome {
    pub next: ModelSet,
    pub record: StepRecord,
    pub stopped: bool,
}

/// One selection step on `current`.
pub fn selection_step(
    current: &ModelSet,
    data: &Dataset,
    signs: &SignExpectation,
    config: &SelectionConfig,
    step: usize,
) -> Result<StepOutcome> {
    let mut fitter = ModelFitter::new(data, config);
    selection_step_with(&mut fitter, current, signs, config, step)
}

pub(crate) fn selection_step_with(
    fitter: &mut ModelFitter<'_>,
    current: &ModelSet,
    signs: &SignExpectation,
    config: &SelectionConfig,
    step: usize,
) -> Result<StepOutcome> {
    if current.is_empty() {
        return Err(Error::EmptyModelSet);
    }
    let data = fitter.data();
    let mut candidates = Vec::new();
    let mut deleted = vec![false; current.len()];
    let mut improved = ModelSet::new();

    // Part I: improved models
    for (i, base) in current.models().iter().enumerate() {
        for j in 0..data.n_variables() {
            if base.contains(j) {
                continue;
            }
            let mut vars = base.variables.clone();
            vars.push(j);
            let mut record = CandidateRecord {
                base_variables: base.variable_names.clone(),
                candidate_variable: data.variables()[j].name.clone(),
                verdict: None,
                trimmed_away: Vec::new(),
                revalidation: None,
                final_variables: Vec::new(),
                outcome: CandidateOutcome::Rejected,
                error: None,
            };
            let candidate = match fitter.fit(&vars) {
                Ok(m) => m,
                Err(e) => {
                    record.outcome = CandidateOutcome::FitFailed;
                    record.error = Some(e);
                    candidates.push(record);
                    continue;
                }
            };
            let verdict = check_improved_with(fitter, base, &candidate, signs, config);
            let passed = verdict.improved;
            record.verdict = Some(verdict);
            if !passed {
                candidates.push(record);
                continue;
            }
            let trim = trim_with(fitter, &candidate, &base.variables, signs, config);
            let model = if trim.removed.is_empty() {
                trim.model
            } else {
                let again = check_improved_with(fitter, base, &trim.model, signs, config);
                let ok = again.improved;
                record.revalidation = Some(again);
                record.trimmed_away = trim.removed;
                if !ok {
                    record.outcome = CandidateOutcome::DiscardedAfterTrim;
                    record.final_variables = trim.model.variable_names.clone();
                    candidates.push(record);
                    continue;
                }
                trim.model
            };
            deleted[i] = true;
            record.final_variables = model.variable_names.clone();
            record.outcome = if improved.insert(model) {
                CandidateOutcome::Accepted
            } else {
                CandidateOutcome::Duplicate
            };
            candidates.push(record);
        }
    }

    let mut record = StepRecord {
        step,
        candidates,
        deleted: current
            .models()
            .iter()
            .zip(&deleted)
            .filter(|(_, d)| **d)
            .map(|(m, _)| m.variable_names.clone())
            .collect(),
        improved: improved.models().iter().map(|m| m.variable_names.clone()).collect(),
        leaders: Vec::new(),
        equivalence: Vec::new(),
        capped: Vec::new(),
        retained: Vec::new(),
    };

    // Part II: equivalent models
    if improved.is_empty() {
        record.retained = current.models().iter().map(|m| m.variable_names.clone()).collect();
        return Ok(StepOutcome {
            next: current.clone(),
            record,
            stopped: true,
        });
    }

    let merged: ModelSet = current
        .models()
        .iter()
        .zip(&deleted)
        .filter(|(_, d)| !**d)
        .map(|(m, _)| m.clone())
        .chain(improved.into_models())
        .collect();
    let models = merged.into_models();
    let leaders = leading_models(&models, data, config)?;
    record.leaders = leaders.iter().map(|&l| models[l].variable_names.clone()).collect();

    let mut kept = Vec::new();
    for (k, model) in models.iter().enumerate() {
        if leaders.contains(&k) {
            kept.push(k);
            continue;
        }
        let mut all = true;
        for &l in &leaders {
            let d = equivalence(model, &models[l], data, config);
            all &= d.equivalent;
            record.equivalence.push(d);
        }
        if all {
            kept.push(k);
        }
    }

    if kept.len() > config.max_models_per_step {
        let mut by_auc = kept.clone();
        by_auc.sort_by(|&a, &b| {
            let (ma, mb) = (&models[a], &models[b]);
            if better_by(ma, mb, |x, y| x.auc.total_cmp(&y.auc)) {
                Ordering::Less
            } else if better_by(mb, ma, |x, y| x.auc.total_cmp(&y.auc)) {
                Ordering::Greater
            } else {
                Ordering::Equal
            }
        });
        // leaders are never capped away
        let mut keep: Vec<usize> = leaders.clone();
        for k in by_auc {
            if keep.len() >= config.max_models_per_step {
                break;
            }
            if !keep.contains(&k) {
                keep.push(k);
            }
        }
        record.capped = kept
            .iter()
            .filter(|k| !keep.contains(k))
            .map(|&k| models[k].variable_names.clone())
            .collect();
        kept.retain(|k| keep.contains(k));
    }

    let next: ModelSet = kept.iter().map(|&k| models[k].clone()).collect();
    record.retained = next.models().iter().map(|m| m.variable_names.clone()).collect();
    Ok(StepOutcome {
        next,
        record,
        stopped: false,
    })
}

/// Runs the full stepwise selection from the constant-only model.
pub fn run_csslr(
    data: &Dataset,
    signs: &SignExpectation,
    config: &SelectionConfig,
) -> Result<SelectionResult> {
    config.validate()?;
    let mut fitter = ModelFitter::new(data, config);
    let constant = fitter.fit(&[]).map_err(Error::InvalidDataset)?;
    let mut current: ModelSet = std::iter::once(constant).collect();
    let mut trace = Vec::new();
    let mut terminated_by = Termination::MaxSteps;

    for step in 1..=config.max_steps {
        let outcome = selection_step_with(&mut fitter, &current, signs, config, step)?;
        trace.push(outcome.record);
        current = outcome.next;
        if outcome.stopped {
            terminated_by = Termination::NoImprovement;
            break;
        }
    }

    let leaders = leading_models(current.models(), data, config)?;
    Ok(SelectionResult {
        final_models: current,
        leaders,
        trace,
        terminated_by,
    })
}

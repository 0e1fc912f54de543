//! Run reports for real-data selection: metadata, final models and the step
//! trace, as text or as one JSON record per evaluated candidate.

use std::fmt::Write as _;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::data::{write_dataset, Dataset, SelectionConfig};
use crate::error::Result;
use crate::glm::{Direction, FittedModel};
use crate::selection::{CandidateOutcome, SelectionResult, StepRecord, Termination};

/// SHA-256 of the canonical config text.
pub fn config_hash(config: &SelectionConfig) -> String {
    hex::encode(Sha256::digest(config.to_config_string().as_bytes()))
}

/// SHA-256 of the dataset as written by [`write_dataset`].
pub fn dataset_fingerprint(data: &Dataset) -> Result<String> {
    let mut buf = Vec::new();
    write_dataset(data, &mut buf)?;
    Ok(hex::encode(Sha256::digest(&buf)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelSummary {
    pub variables: Vec<String>,
    pub intercept: f64,
    pub coefficients: Vec<f64>,
    pub auc: f64,
    pub mse: f64,
    pub aic: f64,
    pub log_likelihood: f64,
    pub leader: bool,
}

impl ModelSummary {
    fn new(model: &FittedModel, leader: bool) -> Self {
        Self {
            variables: model.variable_names.clone(),
            intercept: model.intercept,
            coefficients: model.coefficients.clone(),
            auc: model.auc,
            mse: model.mse,
            aic: model.aic,
            log_likelihood: model.log_likelihood,
            leader,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub timestamp: String,
    pub config_hash: String,
    pub dataset_fingerprint: String,
    pub response: String,
    pub observations: usize,
    pub bad: usize,
    pub config: SelectionConfig,
    pub final_models: Vec<ModelSummary>,
    pub terminated_by: Termination,
    pub trace: Vec<StepRecord>,
}

/// One evaluated candidate in the structured trace.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRecord {
    pub step: usize,
    pub base_variables: Vec<String>,
    pub candidate_variable: String,
    pub p_lr: Option<f64>,
    pub sign_ok: Option<bool>,
    pub max_vif: Option<f64>,
    pub p_spiegelhalter: Option<f64>,
    pub aic_base: Option<f64>,
    pub aic_candidate: Option<f64>,
    pub p_auc: Option<f64>,
    pub auc_direction: Option<Direction>,
    pub p_mse: Option<f64>,
    pub mse_direction: Option<Direction>,
    pub verdict: CandidateOutcome,
    pub trimmed_away: Vec<String>,
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

impl RunReport {
    /// `timestamp` is taken as given so that a report can be rebuilt exactly.
    pub fn new(
        data: &Dataset,
        config: &SelectionConfig,
        result: &SelectionResult,
        timestamp: impl Into<String>,
    ) -> Result<Self> {
        Ok(Self {
            timestamp: timestamp.into(),
            config_hash: config_hash(config),
            dataset_fingerprint: dataset_fingerprint(data)?,
            response: data.response_name().to_string(),
            observations: data.n(),
            bad: data.n_bad(),
            config: *config,
            final_models: result
                .final_models
                .models()
                .iter()
                .enumerate()
                .map(|(i, m)| ModelSummary::new(m, result.leaders.contains(&i)))
                .collect(),
            terminated_by: result.terminated_by,
            trace: result.trace.clone(),
        })
    }

    pub fn trace_records(&self) -> Vec<TraceRecord> {
        self.trace
            .iter()
            .flat_map(|step| {
                step.candidates.iter().map(move |c| {
                    let v = c.verdict.as_ref();
                    TraceRecord {
                        step: step.step,
                        base_variables: c.base_variables.clone(),
                        candidate_variable: c.candidate_variable.clone(),
                        p_lr: v.and_then(|v| finite(v.p_lr)),
                        sign_ok: v.map(|v| v.criteria.sign_pass),
                        max_vif: v.and_then(|v| finite(v.max_vif)),
                        p_spiegelhalter: v.and_then(|v| finite(v.p_spiegelhalter)),
                        aic_base: v.and_then(|v| finite(v.aic_base)),
                        aic_candidate: v.and_then(|v| finite(v.aic_candidate)),
                        p_auc: v.and_then(|v| finite(v.p_auc)),
                        auc_direction: v.map(|v| v.auc_direction),
                        p_mse: v.and_then(|v| v.mse_evaluated.then_some(v.p_mse)).and_then(finite),
                        mse_direction: v.and_then(|v| v.mse_evaluated.then_some(v.mse_direction)),
                        verdict: c.outcome,
                        trimmed_away: c.trimmed_away.iter().map(|t| t.variable.clone()).collect(),
                    }
                })
            })
            .collect()
    }

    /// Structured trace, one JSON object per line.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for rec in self.trace_records() {
            out.push_str(&serde_json::to_string(&rec).expect("trace records serialize"));
            out.push('\n');
        }
        out
    }

    /// Line-oriented trace: one line per candidate, then the step summary.
    pub fn trace_text(&self) -> String {
        let mut out = String::new();
        for step in &self.trace {
            let _ = writeln!(out, "step {}", step.step);
            for c in &step.candidates {
                let base = label(&c.base_variables);
                let _ = write!(out, "  {base} + {}: {:?}", c.candidate_variable, c.outcome);
                if let Some(v) = &c.verdict {
                    let _ = write!(
                        out,
                        " | p_lr={} sign={} vif={} p_cal={} aic={}->{} p_auc={} ({}) p_mse={}",
                        num(v.p_lr),
                        if v.criteria.sign_pass { "ok" } else { "wrong" },
                        num(v.max_vif),
                        num(v.p_spiegelhalter),
                        num(v.aic_base),
                        num(v.aic_candidate),
                        num(v.p_auc),
                        direction(v.auc_direction),
                        if v.mse_evaluated {
                            format!("{} ({})", num(v.p_mse), direction(v.mse_direction))
                        } else {
                            "n/a".to_string()
                        },
                    );
                }
                if !c.trimmed_away.is_empty() {
                    let names: Vec<&str> = c.trimmed_away.iter().map(|t| t.variable.as_str()).collect();
                    let _ = write!(out, " | trimmed {}", names.join(", "));
                }
                if let Some(e) = &c.error {
                    let _ = write!(out, " | {e}");
                }
                out.push('\n');
            }
            let list = |models: &[Vec<String>]| models.iter().map(|m| label(m)).collect::<Vec<_>>().join("; ");
            let _ = writeln!(out, "  deleted: {}", list(&step.deleted));
            let _ = writeln!(out, "  improved: {}", list(&step.improved));
            let _ = writeln!(out, "  leaders: {}", list(&step.leaders));
            if !step.capped.is_empty() {
                let _ = writeln!(out, "  capped: {}", list(&step.capped));
            }
            let _ = writeln!(out, "  retained: {}", list(&step.retained));
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "timestamp: {}", self.timestamp);
        let _ = writeln!(out, "config hash: {}", self.config_hash);
        let _ = writeln!(out, "dataset fingerprint: {}", self.dataset_fingerprint);
        let _ = writeln!(
            out,
            "response: {} ({} observations, {} bad)",
            self.response, self.observations, self.bad
        );
        let _ = writeln!(out, "terminated by: {:?} after {} steps", self.terminated_by, self.trace.len());
        out.push_str("\nconfig:\n");
        for line in self.config.to_config_string().lines() {
            let _ = writeln!(out, "  {line}");
        }
        out.push_str("\nfinal models:\n");
        out.push_str(&self.models_text());
        out.push_str("\ntrace:\n");
        out.push_str(&self.trace_text());
        out
    }

    /// Final model set, one block per model.
    pub fn models_text(&self) -> String {
        let mut out = String::new();
        for m in &self.final_models {
            let _ = writeln!(
                out,
                "  {}{}  AUC={:.4} MSE={:.5} AIC={:.3}",
                label(&m.variables),
                if m.leader { "  [leader]" } else { "" },
                m.auc,
                m.mse,
                m.aic
            );
            let _ = writeln!(out, "    (intercept) {:+.6}", m.intercept);
            for (name, b) in m.variables.iter().zip(&m.coefficients) {
                let _ = writeln!(out, "    {name} {b:+.6}");
            }
        }
        out
    }
}

fn label(names: &[String]) -> String {
    if names.is_empty() {
        "(constant)".to_string()
    } else {
        names.join(" + ")
    }
}

fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.4}")
    } else {
        format!("{x}")
    }
}

fn direction(d: Direction) -> &'static str {
    match d {
        Direction::FirstBetter => "candidate",
        Direction::SecondBetter => "base",
        Direction::Neither => "none",
    }
}

//! Discrimination and calibration measures and their paired tests.
//!
//! Scores are oriented so that a larger value means "more likely bad"
//! (label 1). All comparison tests are two-sided; the `direction` field of the
//! result says which input looked better.

use std::cmp::Ordering;

use serde::Serialize;

use crate::dist::normal_two_sided_p;
use crate::error::{Error, Result};
use crate::glm::{Direction, TestResult};

/// Variance of an AUC difference below which the DeLong test is degenerate.
pub const DELONG_VAR_FLOOR: f64 = 1e-14;
/// Denominator below which the calibration tests are degenerate.
pub const CALIB_DENOM_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QualitySummary {
    pub auc: f64,
    pub mse: f64,
    pub spiegelhalter_p: f64,
}

pub fn summarize(probs: &[f64], labels: &[u8]) -> Result<QualitySummary> {
    Ok(QualitySummary {
        auc: auc(probs, labels)?,
        mse: brier(probs, labels)?,
        spiegelhalter_p: spiegelhalter_test(probs, labels)?.p_value,
    })
}

fn check_len(a: usize, b: usize) -> Result<()> {
    if a != b {
        Err(Error::LengthMismatch(a, b))
    } else {
        Ok(())
    }
}

fn class_counts(labels: &[u8]) -> Result<(usize, usize)> {
    let n1 = labels.iter().filter(|&&l| l == 1).count();
    let n0 = labels.len() - n1;
    if n0 == 0 || n1 == 0 {
        return Err(Error::SingleClass);
    }
    Ok((n0, n1))
}

/// Per-observation structural components: for each bad observation, the share
/// of goods it outranks; for each good, the share of bads that outrank it.
/// Ties count one half. Also returns the exact tie-aware pair count, doubled.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Placements {
    bad: Vec<f64>,
    good: Vec<f64>,
    doubled_pairs: u64,
}

impl Placements {
    pub(crate) fn new(scores: &[f64], labels: &[u8]) -> Result<Self> {
        check_len(scores.len(), labels.len())?;
        let (n0, n1) = class_counts(labels)?;
        Ok(placements(scores, labels, n0, n1))
    }

    pub(crate) fn auc(&self) -> f64 {
        auc_from_pairs(self.doubled_pairs, self.good.len(), self.bad.len())
    }
}

fn sorted(values: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut v: Vec<f64> = values.collect();
    v.sort_unstable_by(f64::total_cmp);
    v
}

/// (count strictly below, count equal) of `x` in sorted `v`.
fn rank_in(v: &[f64], x: f64) -> (usize, usize) {
    let below = v.partition_point(|&s| s.total_cmp(&x) == Ordering::Less);
    let upto = v.partition_point(|&s| s.total_cmp(&x) != Ordering::Greater);
    (below, upto - below)
}

fn placements(scores: &[f64], labels: &[u8], n0: usize, n1: usize) -> Placements {
    let goods = sorted(scores.iter().zip(labels).filter(|(_, &l)| l == 0).map(|(s, _)| *s));
    let bads = sorted(scores.iter().zip(labels).filter(|(_, &l)| l == 1).map(|(s, _)| *s));
    let mut bad = Vec::with_capacity(n1);
    let mut good = Vec::with_capacity(n0);
    let mut doubled_pairs = 0u64;
    for (&s, &l) in scores.iter().zip(labels) {
        if l == 1 {
            let (below, eq) = rank_in(&goods, s);
            doubled_pairs += 2 * below as u64 + eq as u64;
            bad.push((below as f64 + 0.5 * eq as f64) / n0 as f64);
        } else {
            let (below, eq) = rank_in(&bads, s);
            let above = n1 - below - eq;
            good.push((above as f64 + 0.5 * eq as f64) / n1 as f64);
        }
    }
    Placements {
        bad,
        good,
        doubled_pairs,
    }
}

fn auc_from_pairs(doubled_pairs: u64, n0: usize, n1: usize) -> f64 {
    doubled_pairs as f64 / (2.0 * n0 as f64 * n1 as f64)
}

/// Mann-Whitney AUC with ties counted one half.
pub fn auc(scores: &[f64], labels: &[u8]) -> Result<f64> {
    check_len(scores.len(), labels.len())?;
    let (n0, n1) = class_counts(labels)?;
    Ok(auc_from_pairs(placements(scores, labels, n0, n1).doubled_pairs, n0, n1))
}


fn covariance(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len();
    if n < 2 {
        return 0.0;
    }
    let ma = a.iter().sum::<f64>() / n as f64;
    let mb = b.iter().sum::<f64>() / n as f64;
    a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum::<f64>() / (n - 1) as f64
}

/// Paired DeLong test for the difference of two correlated AUCs.
pub fn delong_test(probs_a: &[f64], probs_b: &[f64], labels: &[u8]) -> Result<TestResult> {
    check_len(probs_a.len(), labels.len())?;
    check_len(probs_b.len(), labels.len())?;
    let (n0, n1) = class_counts(labels)?;
    let pa = placements(probs_a, labels, n0, n1);
    let pb = placements(probs_b, labels, n0, n1);
    Ok(delong_from_placements(&pa, &pb))
}

/// DeLong test from precomputed structural components of the same labels.
pub(crate) fn delong_from_placements(pa: &Placements, pb: &Placements) -> TestResult {
    let (n0, n1) = (pa.good.len(), pa.bad.len());
    let auc_a = pa.auc();
    let auc_b = pb.auc();

    let var_a = covariance(&pa.bad, &pa.bad) / n1 as f64 + covariance(&pa.good, &pa.good) / n0 as f64;
    let var_b = covariance(&pb.bad, &pb.bad) / n1 as f64 + covariance(&pb.good, &pb.good) / n0 as f64;
    let cov = covariance(&pa.bad, &pb.bad) / n1 as f64 + covariance(&pa.good, &pb.good) / n0 as f64;
    let var_diff = var_a + var_b - 2.0 * cov;
    if !(var_diff >= DELONG_VAR_FLOOR) {
        return TestResult::degenerate();
    }
    let z = (auc_a - auc_b) / var_diff.sqrt();
    TestResult {
        statistic: z,
        p_value: normal_two_sided_p(z),
        direction: match auc_a.partial_cmp(&auc_b) {
            Some(Ordering::Greater) => Direction::FirstBetter,
            Some(Ordering::Less) => Direction::SecondBetter,
            _ => Direction::Neither,
        },
        degenerate: false,
    }
}

/// Brier score (mean squared error of the probabilities).
pub fn brier(probs: &[f64], labels: &[u8]) -> Result<f64> {
    check_len(probs.len(), labels.len())?;
    let n = probs.len() as f64;
    Ok(probs
        .iter()
        .zip(labels)
        .map(|(p, &l)| (p - l as f64).powi(2))
        .sum::<f64>()
        / n)
}

/// Spiegelhalter z-test of a single model's calibration.
pub fn spiegelhalter_test(probs: &[f64], labels: &[u8]) -> Result<TestResult> {
    check_len(probs.len(), labels.len())?;
    let mut num = 0.0;
    let mut var = 0.0;
    for (&p, &l) in probs.iter().zip(labels) {
        let c = 1.0 - 2.0 * p;
        num += (l as f64 - p) * c;
        var += c * c * p * (1.0 - p);
    }
    let denom = var.sqrt();
    if !(denom >= CALIB_DENOM_FLOOR) {
        return Ok(TestResult::degenerate());
    }
    let z = num / denom;
    Ok(TestResult {
        statistic: z,
        p_value: normal_two_sided_p(z),
        direction: Direction::Neither,
        degenerate: false,
    })
}

/// Paired test on the difference of two Brier scores. Under the null both
/// models share the pooled probability (pa + pb) / 2.
pub fn redelmeier_test(probs_a: &[f64], probs_b: &[f64], labels: &[u8]) -> Result<TestResult> {
    check_len(probs_a.len(), labels.len())?;
    check_len(probs_b.len(), labels.len())?;
    let mut sum_d = 0.0;
    let mut var = 0.0;
    for ((&a, &b), &l) in probs_a.iter().zip(probs_b).zip(labels) {
        let diff = a - b;
        sum_d += diff * (a + b - 2.0 * l as f64);
        let pooled = 0.5 * (a + b);
        var += 4.0 * diff * diff * pooled * (1.0 - pooled);
    }
    let denom = var.sqrt();
    if !(denom >= CALIB_DENOM_FLOOR) {
        return Ok(TestResult::degenerate());
    }
    let z = sum_d / denom;
    Ok(TestResult {
        statistic: z,
        p_value: normal_two_sided_p(z),
        direction: if sum_d < 0.0 {
            Direction::FirstBetter
        } else if sum_d > 0.0 {
            Direction::SecondBetter
        } else {
            Direction::Neither
        },
        degenerate: false,
    })
}

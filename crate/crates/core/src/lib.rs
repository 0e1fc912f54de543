//! Stepwise selection of logistic regression models on several criteria at
//! once: coefficient significance, expected signs, collinearity, calibration,
//! AIC, and paired tests on AUC and Brier score.
//!
//! Start with [`run_csslr`] on a [`Dataset`]; [`simulation`] reproduces the
//! synthetic benchmark studies and [`baselines`] holds the reference selectors.

pub mod baselines;
pub mod cli;
pub mod data;
mod dist;
pub mod error;
pub mod glm;
mod linalg;
pub mod quality;
pub mod report;
pub mod selection;
pub mod simulation;

pub use data::{Dataset, DecisionMode, ExpectedSign, SelectionConfig, SignExpectation, Variable};
pub use error::{Error, Result};
pub use glm::{Direction, FittedModel, TestResult};
pub use selection::{run_csslr, SelectionResult};

//! Reference selectors: AIC-driven stepwise search and forward selection on
//! Wald p-values with a backward purge.

use std::cmp::Ordering;

use serde::Serialize;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::glm::{wald_pvalues, FittedModel};
use crate::selection::ModelFitter;

const TOLERANCE: f64 = 1e-8;
const MAX_ITERATIONS: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MoveKind {
    Add,
    Drop,
}

/// One accepted move and the criterion value after it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BaselineMove {
    pub kind: MoveKind,
    pub variable: String,
    pub aic: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineFit {
    pub model: FittedModel,
    pub path: Vec<BaselineMove>,
}

fn constant(fitter: &mut ModelFitter<'_>) -> Result<FittedModel> {
    fitter.fit(&[]).map_err(Error::InvalidDataset)
}

/// Both-directions stepwise search on AIC from the constant model. Each
/// iteration applies the single add or drop with the lowest AIC, provided it
/// beats the current model; ties go to the smaller variable name.
pub fn select_aic(data: &Dataset, max_steps: usize) -> Result<BaselineFit> {
    let mut fitter = ModelFitter::with_tolerance(data, TOLERANCE, MAX_ITERATIONS);
    let mut current = constant(&mut fitter)?;
    let mut path = Vec::new();

    for _ in 0..max_steps {
        let mut best: Option<(FittedModel, MoveKind, usize)> = None;
        let mut consider = |model: FittedModel, kind: MoveKind, var: usize| {
            if !model.converged {
                return;
            }
            let replace = match &best {
                None => true,
                Some((b, _, bv)) => match model.aic.total_cmp(&b.aic) {
                    Ordering::Less => true,
                    Ordering::Equal => data.variables()[var].name < data.variables()[*bv].name,
                    Ordering::Greater => false,
                },
            };
            if replace {
                best = Some((model, kind, var));
            }
        };
        for j in 0..data.n_variables() {
            if current.contains(j) {
                continue;
            }
            let mut vars = current.variables.clone();
            vars.push(j);
            if let Ok(m) = fitter.fit(&vars) {
                consider(m, MoveKind::Add, j);
            }
        }
        for &j in &current.variables {
            let vars: Vec<usize> = current.variables.iter().copied().filter(|&v| v != j).collect();
            if let Ok(m) = fitter.fit(&vars) {
                consider(m, MoveKind::Drop, j);
            }
        }
        match best {
            Some((model, kind, var)) if model.aic < current.aic => {
                path.push(BaselineMove {
                    kind,
                    variable: data.variables()[var].name.clone(),
                    aic: model.aic,
                });
                current = model;
            }
            _ => break,
        }
    }
    Ok(BaselineFit {
        model: current,
        path,
    })
}

fn pvalue_of(model: &FittedModel, name: &str) -> f64 {
    match wald_pvalues(model) {
        Ok(ps) => ps
            .into_iter()
            .find(|(n, _)| n == name)
            .map_or(1.0, |(_, p)| p),
        Err(_) => 1.0,
    }
}

/// Forward selection on Wald p-values: add the most significant excluded
/// variable while its p-value is below `alpha`, then drop included variables
/// whose p-value reached `alpha`, largest first.
pub fn select_pvalue(data: &Dataset, alpha: f64, max_steps: usize) -> Result<BaselineFit> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::OutOfRange {
            key: "alpha".into(),
            value: alpha.to_string(),
        });
    }
    let mut fitter = ModelFitter::with_tolerance(data, TOLERANCE, MAX_ITERATIONS);
    let mut current = constant(&mut fitter)?;
    let mut path = Vec::new();

    for _ in 0..max_steps {
        let mut best: Option<(FittedModel, f64, usize)> = None;
        for j in 0..data.n_variables() {
            if current.contains(j) {
                continue;
            }
            let mut vars = current.variables.clone();
            vars.push(j);
            let model = match fitter.fit(&vars) {
                Ok(m) if m.converged => m,
                _ => continue,
            };
            let p = pvalue_of(&model, &data.variables()[j].name);
            let replace = match &best {
                None => true,
                Some((_, bp, bj)) => {
                    p < *bp || (p == *bp && data.variables()[j].name < data.variables()[*bj].name)
                }
            };
            if replace {
                best = Some((model, p, j));
            }
        }
        let (mut model, _, j) = match best {
            Some(b) if b.1 < alpha => b,
            _ => break,
        };
        let before = current.key();
        path.push(BaselineMove {
            kind: MoveKind::Add,
            variable: data.variables()[j].name.clone(),
            aic: model.aic,
        });

        loop {
            let worst = match wald_pvalues(&model) {
                Ok(ps) => ps
                    .into_iter()
                    .filter(|(_, p)| *p >= alpha)
                    .max_by(|a, b| a.1.total_cmp(&b.1).then_with(|| b.0.cmp(&a.0))),
                // unusable standard errors: drop the newest variable
                Err(_) => model.variable_names.last().map(|n| (n.clone(), 1.0)),
            };
            let Some((name, _)) = worst else { break };
            let vars: Vec<usize> = model
                .variables
                .iter()
                .copied()
                .filter(|&v| data.variables()[v].name != name)
                .collect();
            model = match fitter.fit(&vars) {
                Ok(m) => m,
                Err(_) => break,
            };
            path.push(BaselineMove {
                kind: MoveKind::Drop,
                variable: name,
                aic: model.aic,
            });
        }

        let unchanged = model.key() == before;
        current = model;
        if unchanged {
            break;
        }
    }
    Ok(BaselineFit {
        model: current,
        path,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Variable;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn dataset(mus: &[f64], k: usize, seed: u64) -> Dataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut response = vec![0u8; k];
        response.extend(vec![1u8; k]);
        let variables = mus
            .iter()
            .enumerate()
            .map(|(c, &mu)| Variable {
                name: format!("V{c:02}"),
                values: response
                    .iter()
                    .map(|&r| rng.sample::<f64, _>(StandardNormal) + if r == 0 { mu } else { -mu })
                    .collect(),
            })
            .collect();
        Dataset::new("y", response, variables).unwrap()
    }

    #[test]
    fn aic_picks_informative_single_variable() {
        let data = dataset(&[0.5], 300, 1);
        let fit = select_aic(&data, 50).unwrap();
        assert_eq!(fit.model.variable_names, vec!["V00"]);
        let constant = fit_constant(&data);
        assert!(fit.model.aic < constant.aic);
    }

    fn fit_constant(data: &Dataset) -> FittedModel {
        crate::glm::fit_indices(data, &[], TOLERANCE, MAX_ITERATIONS).unwrap()
    }

    #[test]
    fn aic_path_strictly_decreases() {
        let data = dataset(&[1.0, 0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0], 300, 2);
        let fit = select_aic(&data, 50).unwrap();
        let mut last = fit_constant(&data).aic;
        for mv in &fit.path {
            assert!(mv.aic < last);
            last = mv.aic;
        }
        assert!((last - fit.model.aic).abs() < 1e-9);
        assert!(fit.model.variable_names.contains(&"V00".to_string()));
    }

    #[test]
    fn pvalue_selection_keeps_only_significant() {
        let data = dataset(&[1.0, 0.3, 0.0, 0.0, 0.0, 0.0], 300, 3);
        let fit = select_pvalue(&data, 0.05, 50).unwrap();
        for (_, p) in wald_pvalues(&fit.model).unwrap() {
            assert!(p < 0.05);
        }
        assert!(fit.model.variable_names.contains(&"V00".to_string()));
    }

    #[test]
    fn closed_gate_gives_constant() {
        let data = dataset(&[0.0; 6], 300, 4);
        let fit = select_pvalue(&data, 1e-12, 50).unwrap();
        assert!(fit.model.variables.is_empty());
        assert!(select_pvalue(&data, 0.0, 5).is_err());
    }

    #[test]
    fn deterministic() {
        let data = dataset(&[0.4, 0.0, 0.0, 0.1], 200, 5);
        assert_eq!(select_aic(&data, 20).unwrap(), select_aic(&data, 20).unwrap());
        assert_eq!(
            select_pvalue(&data, 0.05, 20).unwrap(),
            select_pvalue(&data, 0.05, 20).unwrap()
        );
    }
}

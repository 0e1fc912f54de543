//! Datasets, sign expectations and selection configuration.
//!
//! Datasets are read from and written to CSV with a header row. The response
//! column holds `0` (good) or `1` (bad); every other column becomes a numeric
//! predictor, in file order.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A named numeric predictor column.
#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub name: String,
    pub values: Vec<f64>,
}

/// Binary response plus named predictor columns. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    response_name: String,
    response: Vec<u8>,
    variables: Vec<Variable>,
}

impl Dataset {
    /// Builds a dataset, checking lengths, binary response with both classes,
    /// unique non-empty names and finite values.
    pub fn new(
        response_name: impl Into<String>,
        response: Vec<u8>,
        variables: Vec<Variable>,
    ) -> Result<Self> {
        let n = response.len();
        if n == 0 {
            return Err(Error::InvalidDataset("no observations".into()));
        }
        if let Some(row) = response.iter().position(|&r| r > 1) {
            return Err(Error::NonBinaryResponse {
                row: row + 1,
                value: response[row].to_string(),
            });
        }
        let bads = response.iter().filter(|&&r| r == 1).count();
        if bads == 0 || bads == n {
            return Err(Error::SingleClass);
        }
        let response_name = response_name.into();
        let mut seen = HashSet::new();
        seen.insert(response_name.as_str());
        for v in &variables {
            if v.name.is_empty() {
                return Err(Error::InvalidDataset("empty variable name".into()));
            }
            if !seen.insert(v.name.as_str()) {
                return Err(Error::DuplicateVariable(v.name.clone()));
            }
            if v.values.len() != n {
                return Err(Error::LengthMismatch(v.values.len(), n));
            }
            if v.values.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidDataset(format!(
                    "non-finite value in column '{}'",
                    v.name
                )));
            }
        }
        Ok(Self {
            response_name,
            response,
            variables,
        })
    }

    pub fn n(&self) -> usize {
        self.response.len()
    }

    pub fn response(&self) -> &[u8] {
        &self.response
    }

    pub fn response_name(&self) -> &str {
        &self.response_name
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn n_variables(&self) -> usize {
        self.variables.len()
    }

    pub fn variable_names(&self) -> Vec<&str> {
        self.variables.iter().map(|v| v.name.as_str()).collect()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.name == name)
    }

    pub fn column(&self, index: usize) -> &[f64] {
        &self.variables[index].values
    }

    /// Resolves names to column indices, rejecting unknown and repeated names.
    pub fn resolve(&self, names: &[impl AsRef<str>]) -> Result<Vec<usize>> {
        let mut out = Vec::with_capacity(names.len());
        for name in names {
            let name = name.as_ref();
            let idx = self
                .index_of(name)
                .ok_or_else(|| Error::UnknownVariable(name.to_string()))?;
            if out.contains(&idx) {
                return Err(Error::DuplicateVariable(name.to_string()));
            }
            out.push(idx);
        }
        Ok(out)
    }

    /// Number of bad (label 1) observations.
    pub fn n_bad(&self) -> usize {
        self.response.iter().filter(|&&r| r == 1).count()
    }
}

/// Reads a dataset from CSV text.
pub fn read_dataset<R: Read>(reader: R, response_column: &str) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(reader);
    let mut records = rdr.records();
    let header = match records.next() {
        Some(rec) => rec?,
        None => return Err(Error::MissingHeader),
    };
    let names: Vec<String> = header.iter().map(|h| h.trim().to_string()).collect();
    if names.iter().all(|n| n.is_empty()) {
        return Err(Error::MissingHeader);
    }
    let response_idx = names
        .iter()
        .position(|n| n == response_column)
        .ok_or_else(|| Error::MissingResponse(response_column.to_string()))?;

    let mut response = Vec::new();
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); names.len()];
    for (i, rec) in records.enumerate() {
        let rec = rec?;
        let row = i + 1;
        if rec.len() != names.len() {
            return Err(Error::RaggedRow {
                row,
                expected: names.len(),
                found: rec.len(),
            });
        }
        for (j, cell) in rec.iter().enumerate() {
            let cell = cell.trim();
            if j == response_idx {
                let r = match cell.parse::<f64>() {
                    Ok(v) if v == 0.0 => 0,
                    Ok(v) if v == 1.0 => 1,
                    _ => {
                        return Err(Error::NonBinaryResponse {
                            row,
                            value: cell.to_string(),
                        })
                    }
                };
                response.push(r);
            } else {
                let v: f64 = cell.parse().map_err(|_| Error::NonNumeric {
                    row,
                    column: names[j].clone(),
                    value: cell.to_string(),
                })?;
                if !v.is_finite() {
                    return Err(Error::NonNumeric {
                        row,
                        column: names[j].clone(),
                        value: cell.to_string(),
                    });
                }
                columns[j].push(v);
            }
        }
    }
    let variables = names
        .into_iter()
        .zip(columns)
        .enumerate()
        .filter(|(j, _)| *j != response_idx)
        .map(|(_, (name, values))| Variable { name, values })
        .collect();
    Dataset::new(response_column, response, variables)
}

pub fn load_dataset(path: impl AsRef<Path>, response_column: &str) -> Result<Dataset> {
    let file = std::fs::File::open(path)?;
    read_dataset(std::io::BufReader::new(file), response_column)
}

/// Writes the dataset as CSV: response column first, then the predictors.
/// Values carry 17 significant digits so a read gives back identical bits.
pub fn write_dataset<W: Write>(data: &Dataset, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec![data.response_name.as_str()];
    header.extend(data.variables.iter().map(|v| v.name.as_str()));
    w.write_record(&header)?;
    let mut row = Vec::with_capacity(header.len());
    for i in 0..data.n() {
        row.clear();
        row.push(data.response[i].to_string());
        row.extend(data.variables.iter().map(|v| format!("{:.16e}", v.values[i])));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn save_dataset(data: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_dataset(data, std::io::BufWriter::new(file))
}

/// Expected direction of a coefficient's effect on P(bad).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ExpectedSign {
    Positive,
    Negative,
    #[default]
    NoExpectation,
}

impl ExpectedSign {
    /// A zero coefficient matches no definite expectation.
    pub fn matches(self, coefficient: f64) -> bool {
        match self {
            ExpectedSign::Positive => coefficient > 0.0,
            ExpectedSign::Negative => coefficient < 0.0,
            ExpectedSign::NoExpectation => true,
        }
    }
}

impl std::str::FromStr for ExpectedSign {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "+" | "positive" | "pos" | "1" => Ok(ExpectedSign::Positive),
            "-" | "negative" | "neg" | "-1" => Ok(ExpectedSign::Negative),
            "" | "none" | "noexpectation" | "no_expectation" | "0" | "?" => {
                Ok(ExpectedSign::NoExpectation)
            }
            _ => Err(Error::InvalidSign(s.to_string())),
        }
    }
}

/// Per-variable sign expectations; missing entries mean no expectation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SignExpectation {
    signs: BTreeMap<String, ExpectedSign>,
}

impl SignExpectation {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds the map, rejecting names that are not variables of `data`.
    pub fn from_pairs<I, S>(data: &Dataset, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, ExpectedSign)>,
        S: Into<String>,
    {
        let mut signs = BTreeMap::new();
        for (name, sign) in pairs {
            let name = name.into();
            if data.index_of(&name).is_none() {
                return Err(Error::UnknownVariable(name));
            }
            signs.insert(name, sign);
        }
        Ok(Self { signs })
    }

    pub fn get(&self, name: &str) -> ExpectedSign {
        self.signs.get(name).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, ExpectedSign)> {
        self.signs.iter().map(|(k, v)| (k.as_str(), *v))
    }
}

/// Reads `name,expected_sign` CSV rows (header required).
pub fn read_signs<R: Read>(reader: R, data: &Dataset) -> Result<SignExpectation> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let mut pairs = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let name = rec.get(0).unwrap_or("").to_string();
        let sign: ExpectedSign = rec.get(1).unwrap_or("").parse()?;
        pairs.push((name, sign));
    }
    SignExpectation::from_pairs(data, pairs)
}

pub fn load_signs(path: impl AsRef<Path>, data: &Dataset) -> Result<SignExpectation> {
    let file = std::fs::File::open(path)?;
    read_signs(file, data)
}

/// How the AUC and MSE comparison tests combine into the improvement decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DecisionMode {
    /// One test shows improvement and the other shows no significant deterioration.
    AucOrMse,
    /// Both tests show significant improvement.
    AucAndMse,
}

impl fmt::Display for DecisionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DecisionMode::AucOrMse => f.write_str("AucOrMse"),
            DecisionMode::AucAndMse => f.write_str("AucAndMse"),
        }
    }
}

/// Thresholds and engine controls for one selection run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelectionConfig {
    pub p_lr_i: f64,
    pub p_calib: f64,
    pub p_auc_i: f64,
    pub p_mse_i: f64,
    pub p_lr_t: f64,
    pub p_auc_t: f64,
    pub p_mse_t: f64,
    pub p_auc_e: f64,
    pub p_mse_e: f64,
    pub v_crit: f64,
    pub decision_mode: DecisionMode,
    pub max_steps: usize,
    pub max_models_per_step: usize,
    pub fit_tolerance: f64,
    pub fit_max_iterations: usize,
}

pub const PROFILE_NAMES: [&str; 4] = ["CSSLR1a", "CSSLR1b", "CSSLR2a", "CSSLR2b"];

impl SelectionConfig {
    fn with_thresholds(p_calib: f64, p_diff: f64, decision_mode: DecisionMode) -> Self {
        Self {
            p_lr_i: 0.05,
            p_calib,
            p_auc_i: p_diff,
            p_mse_i: p_diff,
            p_lr_t: 0.05,
            p_auc_t: 0.025,
            p_mse_t: 0.025,
            p_auc_e: p_diff,
            p_mse_e: p_diff,
            v_crit: 5.0,
            decision_mode,
            max_steps: 20,
            max_models_per_step: 20,
            fit_tolerance: 1e-8,
            fit_max_iterations: 50,
        }
    }

    pub fn csslr1a() -> Self {
        Self::with_thresholds(0.50, 0.05, DecisionMode::AucOrMse)
    }

    pub fn csslr1b() -> Self {
        Self::with_thresholds(0.50, 0.05, DecisionMode::AucAndMse)
    }

    pub fn csslr2a() -> Self {
        Self::with_thresholds(0.10, 0.10, DecisionMode::AucOrMse)
    }

    pub fn csslr2b() -> Self {
        Self::with_thresholds(0.10, 0.10, DecisionMode::AucAndMse)
    }

    /// Looks up one of the four named parameter profiles (case-insensitive).
    pub fn profile(name: &str) -> Option<Self> {
        match name.to_ascii_uppercase().as_str() {
            "CSSLR1A" => Some(Self::csslr1a()),
            "CSSLR1B" => Some(Self::csslr1b()),
            "CSSLR2A" => Some(Self::csslr2a()),
            "CSSLR2B" => Some(Self::csslr2b()),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let probs = [
            ("p_lr_I", self.p_lr_i),
            ("p_calib", self.p_calib),
            ("p_auc_I", self.p_auc_i),
            ("p_mse_I", self.p_mse_i),
            ("p_lr_T", self.p_lr_t),
            ("p_auc_T", self.p_auc_t),
            ("p_mse_T", self.p_mse_t),
            ("p_auc_E", self.p_auc_e),
            ("p_mse_E", self.p_mse_e),
        ];
        for (key, p) in probs {
            if !(p > 0.0 && p < 1.0) {
                return Err(out_of_range(key, p));
            }
        }
        if !(self.v_crit > 1.0) {
            return Err(out_of_range("v_crit", self.v_crit));
        }
        if self.max_steps == 0 {
            return Err(out_of_range("max_steps", 0));
        }
        if self.max_models_per_step == 0 {
            return Err(out_of_range("max_models_per_step", 0));
        }
        if !(self.fit_tolerance > 0.0) {
            return Err(out_of_range("fit_tolerance", self.fit_tolerance));
        }
        if self.fit_max_iterations == 0 {
            return Err(out_of_range("fit_max_iterations", 0));
        }
        Ok(())
    }

    /// Canonical flat key-value text; `parse_config` reads it back unchanged.
    pub fn to_config_string(&self) -> String {
        format!(
            "p_lr_I = {:?}\np_calib = {:?}\nv_crit = {:?}\np_auc_I = {:?}\np_mse_I = {:?}\n\
             p_lr_T = {:?}\np_auc_T = {:?}\np_mse_T = {:?}\np_auc_E = {:?}\np_mse_E = {:?}\n\
             decision_mode = \"{}\"\nmax_steps = {}\nmax_models_per_step = {}\n\
             fit_tolerance = {:?}\nfit_max_iterations = {}\n",
            self.p_lr_i,
            self.p_calib,
            self.v_crit,
            self.p_auc_i,
            self.p_mse_i,
            self.p_lr_t,
            self.p_auc_t,
            self.p_mse_t,
            self.p_auc_e,
            self.p_mse_e,
            self.decision_mode,
            self.max_steps,
            self.max_models_per_step,
            self.fit_tolerance,
            self.fit_max_iterations,
        )
    }
}

fn out_of_range(key: &str, value: impl fmt::Display) -> Error {
    Error::OutOfRange {
        key: key.to_string(),
        value: value.to_string(),
    }
}

/// Parses a flat TOML key-value config. Keys match field names, with the
/// threshold suffixes written as in `p_lr_I`/`p_lr_T`/`p_auc_E` (lowercase
/// suffixes are accepted too). `p_lr_T`, `max_steps`, `max_models_per_step`,
/// `fit_tolerance` and `fit_max_iterations` are optional. The key `profile`
/// seeds all values from a named profile before the other keys apply.
pub fn parse_config(text: &str) -> Result<SelectionConfig> {
    let table: toml::Table = text
        .parse()
        .map_err(|e: toml::de::Error| Error::ConfigParse(e.message().to_string()))?;

    let mut cfg = match table.get("profile") {
        Some(toml::Value::String(name)) => SelectionConfig::profile(name)
            .ok_or_else(|| out_of_range("profile", name))?,
        Some(other) => return Err(out_of_range("profile", other)),
        None => SelectionConfig::csslr1a(),
    };
    let has_profile = table.contains_key("profile");
    let required = [
        "p_lr_i", "p_calib", "v_crit", "p_auc_i", "p_mse_i", "p_auc_t", "p_mse_t", "p_auc_e",
        "p_mse_e", "decision_mode",
    ];
    let mut present = HashSet::new();

    for (key, value) in &table {
        if key == "profile" {
            continue;
        }
        let canon = key.to_ascii_lowercase();
        let slot: Option<&mut f64> = match canon.as_str() {
            "p_lr_i" => Some(&mut cfg.p_lr_i),
            "p_calib" => Some(&mut cfg.p_calib),
            "v_crit" => Some(&mut cfg.v_crit),
            "p_auc_i" => Some(&mut cfg.p_auc_i),
            "p_mse_i" => Some(&mut cfg.p_mse_i),
            "p_lr_t" => Some(&mut cfg.p_lr_t),
            "p_auc_t" => Some(&mut cfg.p_auc_t),
            "p_mse_t" => Some(&mut cfg.p_mse_t),
            "p_auc_e" => Some(&mut cfg.p_auc_e),
            "p_mse_e" => Some(&mut cfg.p_mse_e),
            "fit_tolerance" => Some(&mut cfg.fit_tolerance),
            _ => None,
        };
        if let Some(slot) = slot {
            *slot = match value {
                toml::Value::Float(f) => *f,
                toml::Value::Integer(i) => *i as f64,
                other => return Err(out_of_range(key, other)),
            };
            present.insert(canon);
            continue;
        }
        match canon.as_str() {
            "decision_mode" => {
                cfg.decision_mode = match value.as_str().map(|s| s.to_ascii_lowercase()) {
                    Some(s) if s == "aucormse" || s == "auc_or_mse" => DecisionMode::AucOrMse,
                    Some(s) if s == "aucandmse" || s == "auc_and_mse" => DecisionMode::AucAndMse,
                    _ => return Err(out_of_range(key, value)),
                };
            }
            "max_steps" | "max_models_per_step" | "fit_max_iterations" => {
                let n = match value {
                    toml::Value::Integer(i) if *i > 0 => *i as usize,
                    other => return Err(out_of_range(key, other)),
                };
                match canon.as_str() {
                    "max_steps" => cfg.max_steps = n,
                    "max_models_per_step" => cfg.max_models_per_step = n,
                    _ => cfg.fit_max_iterations = n,
                }
            }
            _ => return Err(Error::UnknownKey(key.clone())),
        }
        present.insert(canon);
    }

    if !has_profile {
        if let Some(missing) = required.iter().find(|k| !present.contains(**k)) {
            return Err(Error::ConfigParse(format!("missing required key '{missing}'")));
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: impl AsRef<Path>) -> Result<SelectionConfig> {
    let text = std::fs::read_to_string(path)?;
    parse_config(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_csv() {
        let data = read_dataset("y,x1\n0,1.5\n1,-0.3".as_bytes(), "y").unwrap();
        assert_eq!(data.n(), 2);
        assert_eq!(data.variable_names(), vec!["x1"]);
        assert_eq!(data.column(0), &[1.5, -0.3]);
        assert_eq!(data.response(), &[0, 1]);
    }

    #[test]
    fn csv_errors() {
        let single = read_dataset("y,x1\n0,1\n0,2\n".as_bytes(), "y").unwrap_err();
        assert!(matches!(single, Error::SingleClass));
        assert_eq!(single.to_string(), "single-class response");

        let missing = read_dataset("y,x1\n0,1\n1,2\n".as_bytes(), "z").unwrap_err();
        assert!(matches!(missing, Error::MissingResponse(_)));

        let nonbin = read_dataset("y,x1\n0,1\n2,2\n".as_bytes(), "y").unwrap_err();
        assert!(matches!(nonbin, Error::NonBinaryResponse { row: 2, .. }));

        let nonnum = read_dataset("y,x1\n0,abc\n1,2\n".as_bytes(), "y").unwrap_err();
        assert!(matches!(nonnum, Error::NonNumeric { row: 1, .. }));

        let ragged = read_dataset("y,x1\n0,1,3\n1,2\n".as_bytes(), "y").unwrap_err();
        assert!(matches!(ragged, Error::RaggedRow { row: 1, .. }));

        let empty = read_dataset("".as_bytes(), "y").unwrap_err();
        assert!(matches!(empty, Error::MissingHeader));

        let nan = read_dataset("y,x1\n0,NaN\n1,2\n".as_bytes(), "y").unwrap_err();
        assert!(matches!(nan, Error::NonNumeric { .. }));
    }

    #[test]
    fn response_column_can_sit_anywhere() {
        let data = read_dataset("a,y,b\n1,0,2\n3,1,4\n".as_bytes(), "y").unwrap();
        assert_eq!(data.variable_names(), vec!["a", "b"]);
        assert_eq!(data.column(1), &[2.0, 4.0]);
    }

    #[test]
    fn write_then_read_is_identity() {
        let data = Dataset::new(
            "bad",
            vec![0, 1, 1],
            vec![Variable {
                name: "x".into(),
                values: vec![0.1 + 0.2, -1e-300, std::f64::consts::PI],
            }],
        )
        .unwrap();
        let mut buf = Vec::new();
        write_dataset(&data, &mut buf).unwrap();
        let back = read_dataset(buf.as_slice(), "bad").unwrap();
        assert_eq!(back, data);
    }

    #[test]
    fn profiles_match_table() {
        let a = SelectionConfig::csslr1a();
        assert_eq!(
            (a.p_lr_i, a.p_calib, a.v_crit, a.p_auc_i, a.p_mse_i),
            (0.05, 0.50, 5.0, 0.05, 0.05)
        );
        assert_eq!((a.p_auc_t, a.p_mse_t, a.p_auc_e, a.p_mse_e), (0.025, 0.025, 0.05, 0.05));
        assert_eq!(a.decision_mode, DecisionMode::AucOrMse);

        let b = SelectionConfig::csslr1b();
        assert_eq!(b.decision_mode, DecisionMode::AucAndMse);
        assert_eq!(b.p_calib, 0.50);

        let c = SelectionConfig::csslr2a();
        assert_eq!((c.p_calib, c.p_auc_i, c.p_mse_i, c.p_auc_e, c.p_mse_e), (0.1, 0.1, 0.1, 0.1, 0.1));
        assert_eq!((c.p_auc_t, c.p_mse_t), (0.025, 0.025));
        assert_eq!(c.decision_mode, DecisionMode::AucOrMse);

        let d = SelectionConfig::csslr2b();
        assert_eq!((d.p_calib, d.p_auc_i, d.p_mse_i, d.p_auc_e, d.p_mse_e), (0.1, 0.1, 0.1, 0.1, 0.1));
        assert_eq!(d.decision_mode, DecisionMode::AucAndMse);

        for cfg in [a, b, c, d] {
            assert_eq!(cfg.p_lr_t, 0.05);
            assert_eq!(cfg.max_steps, 20);
            assert_eq!(cfg.max_models_per_step, 20);
            assert_eq!(cfg.fit_tolerance, 1e-8);
            assert_eq!(cfg.fit_max_iterations, 50);
        }
    }

    #[test]
    fn parse_profile_1a() {
        let text = "p_lr_I = 0.05\np_calib = 0.50\nv_crit = 5\np_auc_I = 0.05\np_mse_I = 0.05\n\
                    p_auc_T = 0.025\np_mse_T = 0.025\np_auc_E = 0.05\np_mse_E = 0.05\n\
                    decision_mode = \"AucOrMse\"\n";
        assert_eq!(parse_config(text).unwrap(), SelectionConfig::csslr1a());
    }

    #[test]
    fn parse_profile_2b() {
        let text = "p_lr_I = 0.05\np_calib = 0.10\nv_crit = 5.0\np_auc_I = 0.10\np_mse_I = 0.10\n\
                    p_auc_T = 0.025\np_mse_T = 0.025\np_auc_E = 0.10\np_mse_E = 0.10\n\
                    decision_mode = \"AucAndMse\"\n";
        assert_eq!(parse_config(text).unwrap(), SelectionConfig::csslr2b());
    }

    #[test]
    fn canonical_text_round_trips() {
        for name in PROFILE_NAMES {
            let cfg = SelectionConfig::profile(name).unwrap();
            assert_eq!(parse_config(&cfg.to_config_string()).unwrap(), cfg);
        }
    }

    #[test]
    fn config_errors() {
        let bad = parse_config("profile = \"CSSLR1a\"\np_calib = 1.5\n").unwrap_err();
        assert!(matches!(bad, Error::OutOfRange { .. }));
        assert!(bad.to_string().starts_with("value out of range"));

        let unknown = parse_config("profile = \"CSSLR1a\"\np_foo = 0.1\n").unwrap_err();
        assert!(matches!(unknown, Error::UnknownKey(_)));

        let garbage = parse_config("p_calib = = 3").unwrap_err();
        assert!(matches!(garbage, Error::ConfigParse(_)));

        let missing = parse_config("p_calib = 0.5\n").unwrap_err();
        assert!(matches!(missing, Error::ConfigParse(_)));

        let vcrit = parse_config("profile = \"CSSLR1b\"\nv_crit = 1.0\n").unwrap_err();
        assert!(matches!(vcrit, Error::OutOfRange { .. }));
    }

    #[test]
    fn signs_reject_unknown_names() {
        let data = read_dataset("y,x1\n0,1\n1,2\n".as_bytes(), "y").unwrap();
        let ok = read_signs("name,expected_sign\nx1,-\n".as_bytes(), &data).unwrap();
        assert_eq!(ok.get("x1"), ExpectedSign::Negative);
        assert_eq!(ok.get("other"), ExpectedSign::NoExpectation);
        let err = read_signs("name,expected_sign\nx9,+\n".as_bytes(), &data).unwrap_err();
        assert!(matches!(err, Error::UnknownVariable(ref n) if n == "x9"));
    }
}

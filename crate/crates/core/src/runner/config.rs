use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::RunnerError;
use crate::boost::{BoostParams, TuningGrid};
use crate::corpus::Variable;
use crate::exec::Execution;
use crate::labeling::Label;

/// A dependent variable and which side of its median counts as threat.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "VariableSpecRepr")]
pub struct VariableSpec {
    pub name: Variable,
    pub threat: Label,
}

impl VariableSpec {
    pub fn high(name: Variable) -> Self {
        VariableSpec {
            name,
            threat: Label::High,
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum VariableSpecRepr {
    Name(Variable),
    Full {
        name: Variable,
        #[serde(default = "default_threat")]
        threat: Label,
    },
}

fn default_threat() -> Label {
    Label::High
}

impl From<VariableSpecRepr> for VariableSpec {
    fn from(r: VariableSpecRepr) -> Self {
        match r {
            VariableSpecRepr::Name(name) => VariableSpec::high(name),
            VariableSpecRepr::Full { name, threat } => VariableSpec { name, threat },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Tsv,
    Json,
    Md,
}

/// Everything needed to reproduce one experiment.
///
/// Only the two input paths are required in the JSON form; every other
/// field falls back to the values in [`Default`]. `boost.seed` is ignored:
/// each iteration trains with a seed derived from `seed`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub corpus_path: PathBuf,
    pub inventory_path: PathBuf,
    pub languages: Vec<String>,
    pub variables: Vec<VariableSpec>,
    pub combat_set: Vec<Variable>,
    pub size_set: Vec<Variable>,
    pub k: usize,
    pub seed: u64,
    pub boost: BoostParams,
    pub tuning: Option<TuningGrid>,
    pub output_dir: PathBuf,
    pub report_formats: Vec<ReportFormat>,
    pub execution: Execution,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            corpus_path: PathBuf::new(),
            inventory_path: PathBuf::new(),
            languages: vec!["ja".into(), "zh".into(), "ko".into()],
            variables: Variable::ALL.into_iter().map(VariableSpec::high).collect(),
            combat_set: vec![Variable::Attack, Variable::Defend],
            size_set: vec![Variable::Height, Variable::Weight],
            k: 3,
            seed: 20220307,
            boost: BoostParams::default(),
            tuning: None,
            output_dir: PathBuf::from("out"),
            report_formats: vec![ReportFormat::Tsv, ReportFormat::Json, ReportFormat::Md],
            execution: Execution::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn new(corpus_path: impl Into<PathBuf>, inventory_path: impl Into<PathBuf>) -> Self {
        ExperimentConfig {
            corpus_path: corpus_path.into(),
            inventory_path: inventory_path.into(),
            ..Default::default()
        }
    }

    /// Reads a JSON config; relative paths are taken relative to its directory.
    pub fn from_json_file(path: &Path) -> Result<Self, RunnerError> {
        let text = std::fs::read_to_string(path).map_err(|source| RunnerError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let mut config: ExperimentConfig = serde_json::from_str(&text)
            .map_err(|e| RunnerError::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        for p in [
            &mut config.corpus_path,
            &mut config.inventory_path,
            &mut config.output_dir,
        ] {
            if !p.as_os_str().is_empty() && p.is_relative() {
                *p = base.join(&*p);
            }
        }
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), RunnerError> {
        let bad = |m: String| Err(RunnerError::Config(m));
        if self.corpus_path.as_os_str().is_empty() {
            return bad("corpus_path is required".into());
        }
        if self.inventory_path.as_os_str().is_empty() {
            return bad("inventory_path is required".into());
        }
        if self.k < 2 {
            return bad(format!("k must be at least 2, got {}", self.k));
        }
        if self.languages.is_empty() {
            return bad("languages must not be empty".into());
        }
        if self.variables.is_empty() {
            return bad("variables must not be empty".into());
        }
        for (i, l) in self.languages.iter().enumerate() {
            if self.languages[..i].contains(l) {
                return bad(format!("language {l:?} listed twice"));
            }
        }
        for (i, v) in self.variables.iter().enumerate() {
            if self.variables[..i].iter().any(|w| w.name == v.name) {
                return bad(format!("variable {} listed twice", v.name));
            }
        }
        if let Some(v) = self.combat_set.iter().find(|v| self.size_set.contains(v)) {
            return bad(format!("{v} is in both combat_set and size_set"));
        }
        self.boost
            .validate()
            .map_err(|e| RunnerError::Config(e.to_string()))
    }

    pub fn threat_of(&self, variable: Variable) -> Label {
        self.variables
            .iter()
            .find(|v| v.name == variable)
            .map_or(Label::High, |v| v.threat)
    }
}

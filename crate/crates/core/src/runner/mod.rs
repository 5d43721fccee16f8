//! Experiment orchestration: languages x variables x folds, then the
//! hypothesis tests, the name-length regressions and report output.

mod config;
mod hypotheses;
mod report;

use std::collections::BTreeMap;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::boost::{self, FeatureMatrix};
use crate::corpus::{self, Corpus, CorpusError, Variable};
use crate::labeling::{self, derive_seed, BinaryLabeledSet, LabeledSample};
use crate::metrics::{pool, ConfusionMatrix, IterationRecord};

pub use config::{ExperimentConfig, ReportFormat, VariableSpec};
pub use hypotheses::{
    hypothesis_h1, hypothesis_h2, length_regression, H1Results, H1Test, H2Result, LengthRegression,
    Outcome,
};
pub use report::{
    emit_report, read_records_tsv, records_tsv, render_markdown, write_records_tsv, RECORDS_HEADER,
};

#[derive(Debug, Error)]
pub enum RunnerError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
}

impl RunnerError {
    /// Input-validation failures, as opposed to runtime failures.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            RunnerError::Config(_) | RunnerError::Corpus(_) | RunnerError::Parse { .. }
        )
    }
}

/// Labeling and fold layout of one (language, variable) group.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupInfo {
    pub language: String,
    pub variable: Variable,
    pub median: f64,
    pub n_with_value: usize,
    pub n_omitted_at_median: usize,
    pub n_balanced: usize,
    pub group_seed: u64,
    /// Test ids of each fold, sorted.
    pub folds: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupFailure {
    pub language: String,
    pub variable: Variable,
    pub reason: String,
}

/// Per-(language, variable) summary over its iterations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupAggregate {
    pub language: String,
    pub variable: Variable,
    pub n_iterations: usize,
    pub mean_accuracy: f64,
    pub mean_fp_pct: Option<f64>,
    pub n_undefined_fp: usize,
    pub pooled: ConfusionMatrix,
    pub pooled_accuracy: f64,
    pub pooled_fp_pct: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub version: String,
    /// Wall-clock stamp; the only field that differs between identical runs.
    pub generated_at_unix: u64,
    pub config: ExperimentConfig,
    pub groups: Vec<GroupInfo>,
    pub records: Vec<IterationRecord>,
    pub aggregates: Vec<GroupAggregate>,
    pub failures: Vec<GroupFailure>,
    pub h1: H1Results,
    pub h2: H2Result,
    pub length_regressions: Vec<LengthRegression>,
}

impl ExperimentReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// Loads and validates the corpus named by `config`; returns entry counts
/// per language.
pub fn validate(
    config: &ExperimentConfig,
) -> Result<(Corpus, BTreeMap<String, usize>), RunnerError> {
    config.validate()?;
    let corpus = corpus::load_corpus(&config.corpus_path, &config.inventory_path)?;
    let counts = corpus.counts_by_language();
    Ok((corpus, counts))
}

/// Means over iterations plus pooled-matrix values, in first-seen order.
pub fn aggregate(records: &[IterationRecord]) -> Vec<GroupAggregate> {
    let mut order: Vec<(String, Variable)> = Vec::new();
    let mut by_group: BTreeMap<(String, Variable), Vec<&IterationRecord>> = BTreeMap::new();
    for r in records {
        let key = (r.language.clone(), r.variable);
        if !by_group.contains_key(&key) {
            order.push(key.clone());
        }
        by_group.entry(key).or_default().push(r);
    }
    order
        .into_iter()
        .map(|key| {
            let rs = &by_group[&key];
            let n = rs.len();
            let mean_accuracy = rs.iter().map(|r| r.accuracy).sum::<f64>() / n as f64;
            let fps: Vec<f64> = rs.iter().filter_map(|r| r.fp_pct).collect();
            let mean_fp_pct = (!fps.is_empty()).then(|| fps.iter().sum::<f64>() / fps.len() as f64);
            let matrices: Vec<ConfusionMatrix> = rs.iter().map(|r| r.matrix).collect();
            let pooled = pool(&matrices).expect("group matrices share a threat class");
            GroupAggregate {
                language: key.0,
                variable: key.1,
                n_iterations: n,
                mean_accuracy,
                mean_fp_pct,
                n_undefined_fp: n - fps.len(),
                pooled_accuracy: pooled.accuracy().unwrap_or(f64::NAN),
                pooled_fp_pct: pooled.fp_rate_skew_adjusted().ok().flatten(),
                pooled,
            }
        })
        .collect()
}

struct PreparedGroup {
    info: GroupInfo,
    set: BinaryLabeledSet,
    fold_of: Vec<usize>,
}

fn prepare_group(
    corpus: &Corpus,
    config: &ExperimentConfig,
    language: &str,
    spec: VariableSpec,
) -> Result<PreparedGroup, String> {
    let inventory = corpus
        .inventory(language)
        .ok_or_else(|| format!("no inventory for language {language:?}"))?;
    let variable = spec.name;
    let entries: Vec<_> = corpus
        .entries_for(language)
        .filter_map(|e| e.attribute(variable).map(|v| (e, v)))
        .collect();
    let values: Vec<(String, f64)> = entries.iter().map(|(e, v)| (e.id.clone(), *v)).collect();
    let split = labeling::median_split(&values).map_err(|e| e.to_string())?;

    let mut samples = Vec::new();
    for ((entry, _), (_, class)) in entries.iter().zip(&split.classes) {
        if let Some(label) = class.label() {
            samples.push(LabeledSample {
                id: entry.id.clone(),
                features: corpus::featurize(entry, inventory).map_err(|e| e.to_string())?,
                label,
            });
        }
    }
    let group_seed = derive_seed(config.seed, &[language, variable.as_str()]);
    let set = BinaryLabeledSet {
        variable,
        language: language.to_string(),
        samples,
        threat_class: spec.threat,
        seed: group_seed,
    };
    let n_labeled = set.samples.len();
    let balanced = labeling::balance(&set, derive_seed(group_seed, &["balance"]))
        .map_err(|e| e.to_string())?;
    let folds = labeling::make_folds(&balanced, config.k, derive_seed(group_seed, &["folds"]))
        .map_err(|e| e.to_string())?;
    Ok(PreparedGroup {
        info: GroupInfo {
            language: language.to_string(),
            variable,
            median: split.median,
            n_with_value: values.len(),
            n_omitted_at_median: values.len() - n_labeled,
            n_balanced: balanced.samples.len(),
            group_seed,
            folds: folds.test_ids(),
        },
        fold_of: folds.folds_for(&balanced),
        set: balanced,
    })
}

fn run_fold(
    group: &PreparedGroup,
    fold: usize,
    config: &ExperimentConfig,
) -> Result<IterationRecord, String> {
    let set = &group.set;
    let seed = derive_seed(group.info.group_seed, &["train", &fold.to_string()]);
    let (train_idx, test_idx): (Vec<usize>, Vec<usize>) =
        (0..set.samples.len()).partition(|&i| group.fold_of[i] != fold);
    let is_threat = |i: &usize| set.samples[*i].label == set.threat_class;

    let x_train = FeatureMatrix::from_counts(train_idx.iter().map(|&i| &set.samples[i].features))
        .map_err(|e| e.to_string())?;
    let y_train: Vec<bool> = train_idx.iter().map(is_threat).collect();
    let mut params = config.boost.clone();
    params.seed = seed;
    if let Some(grid) = &config.tuning {
        params = boost::tune(
            &x_train,
            &y_train,
            &params,
            grid,
            derive_seed(seed, &["tune"]),
            config.execution,
        )
        .map_err(|e| e.to_string())?;
    }
    let model = boost::train_with(&x_train, &y_train, &params, config.execution)
        .map_err(|e| e.to_string())?;

    let actual: Vec<bool> = test_idx.iter().map(is_threat).collect();
    let predicted = test_idx
        .iter()
        .map(|&i| model.classify_counts(&set.samples[i].features))
        .collect::<Result<Vec<bool>, _>>()
        .map_err(|e| e.to_string())?;
    let matrix = ConfusionMatrix::from_predictions(&actual, &predicted, set.threat_class)
        .map_err(|e| e.to_string())?;
    IterationRecord::new(&set.language, set.variable, fold, seed, matrix).map_err(|e| e.to_string())
}

/// Runs every configured (language, variable) group and all analyses.
///
/// Corpus and config errors abort the run; an error inside one group only
/// drops that group and is listed under `failures`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport, RunnerError> {
    let (corpus, _) = validate(config)?;
    let mut report = run_on_corpus(&corpus, config);
    report.generated_at_unix = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_secs());
    Ok(report)
}

/// [`run_experiment`] on an already loaded corpus; `generated_at_unix` is 0.
pub fn run_on_corpus(corpus: &Corpus, config: &ExperimentConfig) -> ExperimentReport {
    let mut failures = Vec::new();
    let mut groups = Vec::new();
    for language in &config.languages {
        for spec in &config.variables {
            match prepare_group(corpus, config, language, *spec) {
                Ok(g) => groups.push(g),
                Err(reason) => failures.push(GroupFailure {
                    language: language.clone(),
                    variable: spec.name,
                    reason,
                }),
            }
        }
    }

    let jobs: Vec<(usize, usize)> = (0..groups.len())
        .flat_map(|g| (0..config.k).map(move |f| (g, f)))
        .collect();
    let outcomes = config
        .execution
        .map(&jobs, |&(g, f)| run_fold(&groups[g], f, config));

    let mut records = Vec::new();
    let mut kept_groups = Vec::new();
    for (g, group) in groups.into_iter().enumerate() {
        let results = &outcomes[g * config.k..(g + 1) * config.k];
        match results.iter().find_map(|r| r.as_ref().err()) {
            Some(reason) => failures.push(GroupFailure {
                language: group.info.language.clone(),
                variable: group.info.variable,
                reason: reason.clone(),
            }),
            None => {
                records.extend(results.iter().map(|r| r.clone().expect("checked")));
                kept_groups.push(group.info);
            }
        }
    }

    let variables: Vec<Variable> = config.variables.iter().map(|v| v.name).collect();
    ExperimentReport {
        version: env!("CARGO_PKG_VERSION").to_string(),
        generated_at_unix: 0,
        config: config.clone(),
        groups: kept_groups,
        aggregates: aggregate(&records),
        h1: hypothesis_h1(&records, &variables, &config.combat_set, &config.size_set),
        h2: hypothesis_h2(&records, &config.combat_set, &config.size_set),
        length_regressions: length_regression(corpus, &config.languages, &variables),
        records,
        failures,
    }
}

use serde::{Deserialize, Serialize};

use crate::corpus::{name_length, Corpus, Variable};
use crate::metrics::IterationRecord;
use crate::stats::{
    one_sample_t, simple_ols, two_sample_pooled_t, OlsResult, PooledTTest, TTestResult,
};

/// Chance level for the intercept-only FP% tests.
pub const CHANCE: f64 = 0.5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum Outcome<T> {
    Tested { result: T },
    Untestable { reason: String },
}

impl<T> Outcome<T> {
    pub fn tested(&self) -> Option<&T> {
        match self {
            Outcome::Tested { result } => Some(result),
            Outcome::Untestable { .. } => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct H1Test {
    /// A variable name, or `combat` / `size` for the combined groups.
    pub label: String,
    pub n_defined: usize,
    /// Records skipped because their FP% is undefined.
    pub n_excluded: usize,
    pub outcome: Outcome<TTestResult>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct H1Results {
    pub per_variable: Vec<H1Test>,
    pub combat: H1Test,
    pub size: H1Test,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct H2Result {
    pub n_excluded: usize,
    /// `a` is the combat group, `b` the size group.
    pub outcome: Outcome<PooledTTest>,
}

fn fp_values(records: &[IterationRecord], vars: &[Variable]) -> (Vec<f64>, usize) {
    let selected: Vec<_> = records
        .iter()
        .filter(|r| vars.contains(&r.variable))
        .collect();
    let values: Vec<f64> = selected.iter().filter_map(|r| r.fp_pct).collect();
    let excluded = selected.len() - values.len();
    (values, excluded)
}

fn h1_test(label: String, records: &[IterationRecord], vars: &[Variable]) -> H1Test {
    let (values, n_excluded) = fp_values(records, vars);
    let outcome = match one_sample_t(&values, CHANCE) {
        Ok(result) => Outcome::Tested { result },
        Err(e) => Outcome::Untestable {
            reason: e.to_string(),
        },
    };
    H1Test {
        label,
        n_defined: values.len(),
        n_excluded,
        outcome,
    }
}

/// One-sample t-tests of iteration FP% against chance: per variable and
/// for the combat and size groups pooled.
pub fn hypothesis_h1(
    records: &[IterationRecord],
    variables: &[Variable],
    combat_set: &[Variable],
    size_set: &[Variable],
) -> H1Results {
    H1Results {
        per_variable: variables
            .iter()
            .map(|v| h1_test(v.to_string(), records, std::slice::from_ref(v)))
            .collect(),
        combat: h1_test("combat".into(), records, combat_set),
        size: h1_test("size".into(), records, size_set),
    }
}

/// Pooled two-sample t-test of combat FP% against size FP%.
pub fn hypothesis_h2(
    records: &[IterationRecord],
    combat_set: &[Variable],
    size_set: &[Variable],
) -> H2Result {
    let (combat, ex_c) = fp_values(records, combat_set);
    let (size, ex_s) = fp_values(records, size_set);
    let outcome = match two_sample_pooled_t(&combat, &size) {
        Ok(result) => Outcome::Tested { result },
        Err(e) => Outcome::Untestable {
            reason: e.to_string(),
        },
    };
    H2Result {
        n_excluded: ex_c + ex_s,
        outcome,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LengthRegression {
    /// A language code, or `combined`.
    pub scope: String,
    pub variable: Variable,
    pub outcome: Outcome<OlsResult>,
}

fn regress(scope: String, variable: Variable, pairs: &[(f64, f64)]) -> LengthRegression {
    let (x, y): (Vec<f64>, Vec<f64>) = pairs.iter().copied().unzip();
    let outcome = match simple_ols(&x, &y) {
        Ok(result) => Outcome::Tested { result },
        Err(e) => Outcome::Untestable {
            reason: e.to_string(),
        },
    };
    LengthRegression {
        scope,
        variable,
        outcome,
    }
}

/// Attribute regressed on tone-free name length over every entry with the
/// attribute present, per language and with all languages pooled.
pub fn length_regression(
    corpus: &Corpus,
    languages: &[String],
    variables: &[Variable],
) -> Vec<LengthRegression> {
    let mut out = Vec::new();
    let mut combined: Vec<Vec<(f64, f64)>> = vec![Vec::new(); variables.len()];
    for language in languages {
        let Some(inventory) = corpus.inventory(language) else {
            for &v in variables {
                out.push(LengthRegression {
                    scope: language.clone(),
                    variable: v,
                    outcome: Outcome::Untestable {
                        reason: format!("no inventory for language {language:?}"),
                    },
                });
            }
            continue;
        };
        for (vi, &v) in variables.iter().enumerate() {
            let pairs: Vec<(f64, f64)> = corpus
                .entries_for(language)
                .filter_map(|e| {
                    let value = e.attribute(v)?;
                    let len = name_length(e, inventory).ok()?;
                    Some((len as f64, value))
                })
                .collect();
            combined[vi].extend_from_slice(&pairs);
            out.push(regress(language.clone(), v, &pairs));
        }
    }
    for (vi, &v) in variables.iter().enumerate() {
        out.push(regress("combined".into(), v, &combined[vi]));
    }
    out
}

//! Independent oracles and fixtures shared by the integration tests.
#![allow(dead_code)]

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use threatskew::boost::FeatureMatrix;

pub fn fixtures_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

/// Adaptive Simpson quadrature of `f` over `[a, b]`.
pub fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn rec(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
            + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 50)
}

/// `I_x(a, b)` as a ratio of two quadratures of the beta density (a, b >= 1).
pub fn inc_beta_quadrature(a: f64, b: f64, x: f64) -> f64 {
    // scaled so the peak is 1 and an absolute tolerance means something
    let term = |power: f64, base: f64| if power == 0.0 { 0.0 } else { power * base.ln() };
    let log_kernel = |t: f64| term(a - 1.0, t) + term(b - 1.0, 1.0 - t);
    let mode = if a + b > 2.0 {
        (a - 1.0) / (a + b - 2.0)
    } else {
        0.5
    };
    let peak = if a == 1.0 || b == 1.0 {
        0.0
    } else {
        log_kernel(mode)
    };
    let density = |t: f64| {
        if (t == 0.0 && a > 1.0) || (t == 1.0 && b > 1.0) {
            0.0
        } else {
            (log_kernel(t) - peak).exp()
        }
    };
    simpson(&density, 0.0, x, 1e-15) / simpson(&density, 0.0, 1.0, 1e-15)
}

pub struct NormalEquationFit {
    pub intercept: f64,
    pub slope: f64,
    pub r2: f64,
    pub f: f64,
}

/// Solves the 2x2 normal equations by Cramer's rule, then measures the
/// residual and total sums of squares directly.
pub fn normal_equation_ols(x: &[f64], y: &[f64]) -> NormalEquationFit {
    let n = x.len() as f64;
    let sx: f64 = x.iter().sum();
    let sy: f64 = y.iter().sum();
    let sxx: f64 = x.iter().map(|v| v * v).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let det = n * sxx - sx * sx;
    let intercept = (sy * sxx - sx * sxy) / det;
    let slope = (n * sxy - sx * sy) / det;
    let y_mean = sy / n;
    let sse: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - intercept - slope * a).powi(2))
        .sum();
    let sst: f64 = y.iter().map(|b| (b - y_mean).powi(2)).sum();
    NormalEquationFit {
        intercept,
        slope,
        r2: 1.0 - sse / sst,
        f: (sst - sse) / (sse / (n - 2.0)),
    }
}

#[derive(Debug, PartialEq, Eq, Clone, Copy)]
pub enum OracleClass {
    Low,
    High,
    Omitted,
}

/// Median split of integers, decided in exact integer arithmetic against
/// twice the order-statistic median.
pub fn median_split_oracle(values: &[i64]) -> Vec<OracleClass> {
    let mut sorted = values.to_vec();
    sorted.sort();
    let n = sorted.len();
    let twice_median = if n % 2 == 1 {
        2 * sorted[n / 2]
    } else {
        sorted[n / 2 - 1] + sorted[n / 2]
    };
    values
        .iter()
        .map(|&v| match (2 * v).cmp(&twice_median) {
            std::cmp::Ordering::Less => OracleClass::Low,
            std::cmp::Ordering::Greater => OracleClass::High,
            std::cmp::Ordering::Equal => OracleClass::Omitted,
        })
        .collect()
}

/// Small learnable dataset: label depends on features 0 and 2.
pub fn toy_dataset(n: usize, n_features: usize) -> (FeatureMatrix, Vec<bool>) {
    let mut state = 0x9e3779b97f4a7c15u64;
    let mut next = || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        state
    };
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..n_features).map(|_| (next() % 4) as f64).collect())
        .collect();
    let y = rows
        .iter()
        .map(|r| r[0] + r[2 % n_features] + (next() % 3) as f64 > 3.5)
        .collect();
    (FeatureMatrix::from_rows(&rows).unwrap(), y)
}

/// Writes a tiny two-language corpus and returns (corpus, inventory) paths.
pub fn write_small_corpus(dir: &Path, per_language: usize) -> (PathBuf, PathBuf) {
    let inventory = "language,token,is_tone\n\
        aa,p,0\naa,t,0\naa,k,0\naa,a,0\naa,i,0\naa,u,0\n\
        bb,m,0\nbb,n,0\nbb,a,0\nbb,o,0\nbb,T:1,1\nbb,T:4,1\n";
    let mut corpus = String::from("id,language,name,transcription,attack,defend,height,weight\n");
    for (lang, cons, vowels, tones) in [
        ("aa", ["p", "t", "k"], ["a", "i", "u"], None),
        ("bb", ["m", "n", "m"], ["a", "o", "a"], Some(["T:1", "T:4"])),
    ] {
        for i in 0..per_language {
            let strength = (i * 37 % 101) as f64;
            let syllables = 1 + (i * 37 % 101) / 30;
            let mut tokens = Vec::new();
            for s in 0..syllables {
                tokens.push(cons[(i + s) % 3]);
                tokens.push(vowels[(i * 7 + s) % 3]);
                if let Some(t) = tones {
                    tokens.push(t[(i + s) % 2]);
                }
            }
            writeln!(
                corpus,
                "{lang}{i},{lang},n{i},{},{},{},{},{}",
                tokens.join(" "),
                strength,
                (i * 13 % 50) as f64,
                (i % 9) as f64 / 2.0,
                (i * 5 % 23) as f64
            )
            .unwrap();
        }
    }
    let c = dir.join("corpus.csv");
    let v = dir.join("inventory.csv");
    std::fs::write(&c, corpus).unwrap();
    std::fs::write(&v, inventory).unwrap();
    (c, v)
}

pub mod suites;

//! Randomised comparisons of the statistics kernels against the oracles in
//! the parent module. Each returns a one-line summary or the first mismatch.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use threatskew::labeling::{median_split, SplitClass};
use threatskew::stats::{reg_inc_beta, simple_ols, two_sample_pooled_t};

use super::{inc_beta_quadrature, median_split_oracle, normal_equation_ols, OracleClass};

pub type SuiteResult = Result<String, String>;

fn rel_err(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs().max(1e-300)
}

/// Simple OLS against the normal equations on 200 random regressions.
pub fn ols_vs_normal_equations(tol: f64) -> SuiteResult {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst = 0.0f64;
    for case in 0..200 {
        let n = rng.gen_range(5..200);
        let slope = rng.gen_range(-3.0..3.0);
        let noise = rng.gen_range(0.1..5.0);
        // integer x, as name lengths are
        let x: Vec<f64> = (0..n).map(|_| f64::from(rng.gen_range(1..12))).collect();
        let y: Vec<f64> = x
            .iter()
            .map(|xi| 10.0 + slope * xi + noise * rng.gen_range(-1.0..1.0))
            .collect();
        if x.windows(2).all(|w| w[0] == w[1]) {
            continue;
        }
        let got = simple_ols(&x, &y).map_err(|e| format!("case {case}: {e}"))?;
        let want = normal_equation_ols(&x, &y);
        for (name, g, w) in [
            ("slope", got.slope, want.slope),
            ("intercept", got.intercept, want.intercept),
            ("r2", got.r2, want.r2),
            ("F", got.f, want.f),
        ] {
            let e = rel_err(g, w);
            if e.is_nan() || e > tol {
                return Err(format!("case {case}: {name} {g} vs {w} (rel {e:.2e})"));
            }
            worst = worst.max(e);
        }
    }
    Ok(format!("200 fits, worst relative error {worst:.1e}"))
}

/// Pooled two-sample t against the regression of the pooled values on a
/// group indicator: slope = mean difference, F = t^2, same p-value.
pub fn pooled_t_vs_indicator_regression(tol: f64) -> SuiteResult {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut worst = 0.0f64;
    for case in 0..200 {
        let (na, nb) = (rng.gen_range(2..40), rng.gen_range(2..40));
        let shift = rng.gen_range(-0.3..0.3);
        let a: Vec<f64> = (0..na).map(|_| rng.gen_range(0.2..0.9) + shift).collect();
        let b: Vec<f64> = (0..nb).map(|_| rng.gen_range(0.2..0.9)).collect();
        let t = two_sample_pooled_t(&a, &b).map_err(|e| format!("case {case}: {e}"))?;
        let x: Vec<f64> = (0..na).map(|_| 1.0).chain((0..nb).map(|_| 0.0)).collect();
        let y: Vec<f64> = a.iter().chain(&b).copied().collect();
        let ols = simple_ols(&x, &y).map_err(|e| format!("case {case}: {e}"))?;
        if ols.df2 != t.test.df {
            return Err(format!("case {case}: df {} vs {}", t.test.df, ols.df2));
        }
        for (name, g, w) in [
            ("difference", t.test.estimate, ols.slope),
            ("t^2", t.test.t * t.test.t, ols.f),
            ("p", t.test.p, ols.p),
        ] {
            let e = rel_err(g, w);
            if e.is_nan() || e > tol {
                return Err(format!("case {case}: {name} {g} vs {w} (rel {e:.2e})"));
            }
            worst = worst.max(e);
        }
    }
    Ok(format!("200 pairs, worst relative error {worst:.1e}"))
}

/// Median split against an exact integer oracle on 500 multisets with
/// frequent ties.
pub fn median_split_vs_sort_oracle() -> SuiteResult {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for case in 0..500 {
        let n = rng.gen_range(1..60);
        let spread = rng.gen_range(1..20);
        let values: Vec<i64> = (0..n).map(|_| rng.gen_range(-spread..=spread)).collect();
        let input: Vec<(String, f64)> = values
            .iter()
            .enumerate()
            .map(|(i, v)| (i.to_string(), *v as f64))
            .collect();
        let got = median_split(&input).map_err(|e| format!("case {case}: {e}"))?;
        let want = median_split_oracle(&values);
        for (i, ((_, g), w)) in got.classes.iter().zip(&want).enumerate() {
            let same = matches!(
                (g, w),
                (SplitClass::Low, OracleClass::Low)
                    | (SplitClass::High, OracleClass::High)
                    | (SplitClass::Omitted, OracleClass::Omitted)
            );
            if !same {
                return Err(format!(
                    "case {case}, item {i}: {g:?} vs {w:?} in {values:?}"
                ));
            }
        }
        let low = want.iter().filter(|c| **c == OracleClass::Low).count();
        let high = want.iter().filter(|c| **c == OracleClass::High).count();
        if 2 * low > values.len() || 2 * high > values.len() {
            return Err(format!(
                "case {case}: more than half on one side of the median"
            ));
        }
    }
    Ok("500 multisets agree".into())
}

/// Regularized incomplete beta against quadrature of the beta density.
pub fn inc_beta_vs_quadrature(tol: f64) -> SuiteResult {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let mut worst = 0.0f64;
    let mut cases: Vec<(f64, f64, f64)> = vec![
        (1.0, 1.0, 0.3),
        (4.5, 1.0, 0.9),
        (4.0, 1.0, 0.77),
        (30.0, 2.0, 0.95),
    ];
    for _ in 0..60 {
        cases.push((
            rng.gen_range(1.0..25.0),
            rng.gen_range(1.0..25.0),
            rng.gen_range(0.01..0.99),
        ));
    }
    for (a, b, x) in cases {
        let got = reg_inc_beta(a, b, x).map_err(|e| format!("I({a},{b},{x}): {e}"))?;
        let want = inc_beta_quadrature(a, b, x);
        let e = (got - want).abs();
        if e.is_nan() || e > tol {
            return Err(format!("I_{x}({a}, {b}) = {got} vs {want} (abs {e:.2e})"));
        }
        worst = worst.max(e);
    }
    Ok(format!("64 points, worst absolute error {worst:.1e}"))
}

//! t and F tail probabilities, t-tests and simple least-squares regression.

use serde::{Deserialize, Serialize};
use statrs::function::beta::ln_beta;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("incomplete beta domain error: a={a}, b={b}, x={x}")]
    Domain { a: f64, b: f64, x: f64 },
    #[error("continued fraction did not converge for a={a}, b={b}, x={x}")]
    NoConvergence { a: f64, b: f64, x: f64 },
    #[error("need at least {needed} values, got {got}")]
    TooFew { needed: usize, got: usize },
    #[error("zero variance: {0}")]
    ZeroVariance(&'static str),
    #[error("x and y have different lengths ({0} vs {1})")]
    Length(usize, usize),
    #[error("non-finite input value")]
    NonFinite,
}

const CF_MAX_ITER: usize = 10_000;
const CF_EPS: f64 = 1e-16;
const CF_TINY: f64 = 1e-300;

/// Regularised incomplete beta function `I_x(a, b)`.
pub fn reg_inc_beta(a: f64, b: f64, x: f64) -> Result<f64, StatsError> {
    if !(a > 0.0 && b > 0.0 && (0.0..=1.0).contains(&x)) || !a.is_finite() || !b.is_finite() {
        return Err(StatsError::Domain { a, b, x });
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == 1.0 {
        return Ok(1.0);
    }
    // the continued fraction converges fastest below (a+1)/(a+b+2)
    if x > (a + 1.0) / (a + b + 2.0) {
        Ok(1.0 - beta_cf_scaled(b, a, 1.0 - x)?)
    } else {
        beta_cf_scaled(a, b, x)
    }
}

/// `x^a (1-x)^b / (a B(a,b))` times the continued fraction, by modified Lentz.
fn beta_cf_scaled(a: f64, b: f64, x: f64) -> Result<f64, StatsError> {
    let ln_front = a * x.ln() + b * (1.0 - x).ln() - ln_beta(a, b);
    let front = ln_front.exp() / a;

    let clamp = |v: f64| if v.abs() < CF_TINY { CF_TINY } else { v };
    let (qab, qap, qam) = (a + b, a + 1.0, a - 1.0);
    let mut c = 1.0;
    let mut d = 1.0 / clamp(1.0 - qab * x / qap);
    let mut h = d;
    for m in 1..=CF_MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let even = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 / clamp(1.0 + even * d);
        c = clamp(1.0 + even / c);
        h *= d * c;
        let odd = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 / clamp(1.0 + odd * d);
        c = clamp(1.0 + odd / c);
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < CF_EPS {
            return Ok(front * h);
        }
    }
    Err(StatsError::NoConvergence { a, b, x })
}

/// Two-sided p-value of Student's t with `df` degrees of freedom.
pub fn two_sided_t_p(t: f64, df: u64) -> f64 {
    assert!(df >= 1, "t distribution needs df >= 1");
    if t.is_nan() {
        return f64::NAN;
    }
    if t.is_infinite() {
        return 0.0;
    }
    let df = df as f64;
    reg_inc_beta(df / 2.0, 0.5, df / (df + t * t)).expect("arguments are in domain")
}

/// Upper-tail probability `P(F > f)` of the F distribution.
pub fn f_upper_p(f: f64, df1: u64, df2: u64) -> f64 {
    assert!(df1 >= 1 && df2 >= 1, "F distribution needs positive df");
    if f.is_nan() {
        return f64::NAN;
    }
    if f <= 0.0 {
        return 1.0;
    }
    if f.is_infinite() {
        return 0.0;
    }
    let (d1, d2) = (df1 as f64, df2 as f64);
    reg_inc_beta(d2 / 2.0, d1 / 2.0, d2 / (d2 + d1 * f)).expect("arguments are in domain")
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub mean: f64,
    /// Sample standard deviation (n - 1 denominator); 0 for n = 1.
    pub sd: f64,
    pub n: usize,
}

impl GroupSummary {
    pub fn of(values: &[f64]) -> Result<Self, StatsError> {
        if values.is_empty() {
            return Err(StatsError::TooFew { needed: 1, got: 0 });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(StatsError::NonFinite);
        }
        let n = values.len();
        let mean = values.iter().sum::<f64>() / n as f64;
        let sd = if all_equal(values) || n == 1 {
            0.0
        } else {
            let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
            (ss / (n - 1) as f64).sqrt()
        };
        Ok(GroupSummary { mean, sd, n })
    }
}

fn all_equal(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[0] == w[1])
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TTestResult {
    /// Sample mean for a one-sample test, `mean(a) - mean(b)` for a
    /// two-sample test.
    pub estimate: f64,
    pub t: f64,
    pub df: u64,
    pub p: f64,
}

/// One-sample t-test of `mean(values)` against `mu0`.
pub fn one_sample_t(values: &[f64], mu0: f64) -> Result<TTestResult, StatsError> {
    if values.len() < 2 {
        return Err(StatsError::TooFew {
            needed: 2,
            got: values.len(),
        });
    }
    let s = GroupSummary::of(values)?;
    if s.sd == 0.0 {
        return Err(StatsError::ZeroVariance("all values are equal"));
    }
    let t = (s.mean - mu0) / (s.sd / (s.n as f64).sqrt());
    let df = (s.n - 1) as u64;
    Ok(TTestResult {
        estimate: s.mean,
        t,
        df,
        p: two_sided_t_p(t, df),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PooledTTest {
    pub test: TTestResult,
    pub a: GroupSummary,
    pub b: GroupSummary,
}

/// Equal-variance two-sample t-test of `mean(a) - mean(b)`.
pub fn two_sample_pooled_t(a: &[f64], b: &[f64]) -> Result<PooledTTest, StatsError> {
    for g in [a, b] {
        if g.len() < 2 {
            return Err(StatsError::TooFew {
                needed: 2,
                got: g.len(),
            });
        }
    }
    let (sa, sb) = (GroupSummary::of(a)?, GroupSummary::of(b)?);
    let (na, nb) = (sa.n as f64, sb.n as f64);
    let pooled_var = ((na - 1.0) * sa.sd * sa.sd + (nb - 1.0) * sb.sd * sb.sd) / (na + nb - 2.0);
    if pooled_var.is_nan() || pooled_var <= 0.0 {
        return Err(StatsError::ZeroVariance("pooled variance is zero"));
    }
    let estimate = sa.mean - sb.mean;
    let t = estimate / (pooled_var * (1.0 / na + 1.0 / nb)).sqrt();
    let df = (sa.n + sb.n - 2) as u64;
    Ok(PooledTTest {
        test: TTestResult {
            estimate,
            t,
            df,
            p: two_sided_t_p(t, df),
        },
        a: sa,
        b: sb,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OlsResult {
    pub slope: f64,
    pub intercept: f64,
    pub f: f64,
    pub df1: u64,
    pub df2: u64,
    pub p: f64,
    pub r2: f64,
    pub n: usize,
}

/// Least-squares fit of `y = intercept + slope * x` with its F-test.
pub fn simple_ols(x: &[f64], y: &[f64]) -> Result<OlsResult, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::Length(x.len(), y.len()));
    }
    let n = x.len();
    if n < 3 {
        return Err(StatsError::TooFew { needed: 3, got: n });
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    if all_equal(x) {
        return Err(StatsError::ZeroVariance("x is constant"));
    }
    let nf = n as f64;
    let x_mean = x.iter().sum::<f64>() / nf;
    let y_mean = y.iter().sum::<f64>() / nf;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (&xi, &yi) in x.iter().zip(y) {
        let (dx, dy) = (xi - x_mean, yi - y_mean);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    let slope = sxy / sxx;
    let intercept = y_mean - slope * x_mean;
    let ssr = sxy * sxy / sxx;
    let sse = (syy - ssr).max(0.0);
    let df2 = (n - 2) as u64;
    let (f, r2) = if syy == 0.0 {
        (0.0, 0.0)
    } else if sse == 0.0 {
        (f64::INFINITY, 1.0)
    } else {
        (ssr / (sse / df2 as f64), ssr / syy)
    };
    Ok(OlsResult {
        slope,
        intercept,
        f,
        df1: 1,
        df2,
        p: f_upper_p(f, 1, df2),
        r2,
        n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Adaptive Simpson quadrature.
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
        #[allow(clippy::too_many_arguments)]
        fn rec<F: Fn(f64) -> f64>(
            f: &F,
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

    fn beta_by_quadrature(a: f64, b: f64, x: f64) -> f64 {
        let density = |t: f64| t.powf(a - 1.0) * (1.0 - t).powf(b - 1.0);
        simpson(&density, 0.0, x, 1e-15) / simpson(&density, 0.0, 1.0, 1e-15)
    }

    #[test]
    fn boundaries_and_uniform() {
        assert_eq!(reg_inc_beta(2.0, 3.0, 0.0).unwrap(), 0.0);
        assert_eq!(reg_inc_beta(2.0, 3.0, 1.0).unwrap(), 1.0);
        for x in [0.25, 0.5, 0.9] {
            assert!((reg_inc_beta(1.0, 1.0, x).unwrap() - x).abs() < 1e-14);
        }
        assert!(reg_inc_beta(0.0, 1.0, 0.5).is_err());
        assert!(reg_inc_beta(1.0, 1.0, 1.5).is_err());
        assert!(reg_inc_beta(1.0, -2.0, 0.5).is_err());
    }

    #[test]
    fn closed_forms() {
        // I_x(a, 1) = x^a, I_x(1, b) = 1 - (1-x)^b
        for (a, x) in [(2.5, 0.3), (7.0, 0.8), (0.5, 0.1)] {
            let got = reg_inc_beta(a, 1.0, x).unwrap();
            let want: f64 = x.powf(a);
            assert!(((got - want) / want).abs() < 1e-12, "{a} {x}");
        }
        for (b, x) in [(3.0, 0.2), (0.7, 0.95)] {
            let got = reg_inc_beta(1.0, b, x).unwrap();
            let want = 1.0 - (1.0 - x).powf(b);
            assert!(((got - want) / want).abs() < 1e-12, "{b} {x}");
        }
    }

    #[test]
    fn quadrature_oracle_fixed() {
        for (a, b, x) in [
            (2.0, 3.0, 0.4),
            (4.5, 1.5, 0.7),
            (1.2, 4.8, 0.05),
            (3.3, 3.3, 0.5),
        ] {
            let got = reg_inc_beta(a, b, x).unwrap();
            let want = beta_by_quadrature(a, b, x);
            assert!((got - want).abs() < 1e-9, "{a} {b} {x}: {got} vs {want}");
        }
    }

    #[test]
    fn t_p_values() {
        assert!((two_sided_t_p(2.6, 8) - 0.0316).abs() < 5e-4);
        assert!((two_sided_t_p(2.8, 17) - 0.0123).abs() < 5e-4);
        assert_eq!(two_sided_t_p(0.0, 5), 1.0);
        // df = 1 is Cauchy: p = 1 - 2 atan(|t|) / pi
        let want = 1.0 - 2.0 * 1.5f64.atan() / std::f64::consts::PI;
        assert!((two_sided_t_p(1.5, 1) - want).abs() < 1e-13);
        assert!((two_sided_t_p(-1.5, 1) - want).abs() < 1e-13);
    }

    #[test]
    fn f_p_values() {
        let p = f_upper_p(58.88, 1, 2693);
        assert!(((p - 2.33e-14) / 2.33e-14).abs() < 0.05, "{p:e}");
        let p = f_upper_p(17.95, 1, 2693);
        assert!(((p - 2.35e-5) / 2.35e-5).abs() < 0.05, "{p:e}");
        assert_eq!(f_upper_p(0.0, 1, 10), 1.0);
        // F(1, d) is t(d) squared
        assert!((f_upper_p(2.6 * 2.6, 1, 8) - two_sided_t_p(2.6, 8)).abs() < 1e-14);
    }

    #[test]
    fn one_sample_cases() {
        let r = one_sample_t(&[0.49, 0.51], 0.5).unwrap();
        assert!(r.t.abs() < 1e-12);
        assert!((r.p - 1.0).abs() < 1e-12);
        assert!(matches!(
            one_sample_t(&[0.5, 0.5], 0.5),
            Err(StatsError::ZeroVariance(_))
        ));
        assert!(matches!(
            one_sample_t(&[0.5], 0.5),
            Err(StatsError::TooFew { .. })
        ));
    }

    #[test]
    fn one_sample_constructed_t() {
        // nine values with mean 0.55 and sd 0.0577 give t = 2.6 against 0.5
        let sd = 0.05 * 3.0 / 2.6;
        let base: Vec<f64> = (0..9).map(|i| i as f64 - 4.0).collect();
        let unit_sd = (base.iter().map(|v| v * v).sum::<f64>() / 8.0).sqrt();
        let values: Vec<f64> = base.iter().map(|v| 0.55 + v / unit_sd * sd).collect();
        let r = one_sample_t(&values, 0.5).unwrap();
        assert_eq!(r.df, 8);
        assert!((r.t - 2.6).abs() < 1e-10);
        // t(8) density; Gamma(4.5) = 6.5625 sqrt(pi), Gamma(4) = 6
        let pi = std::f64::consts::PI;
        let norm = 6.5625 * pi.sqrt() / ((8.0 * pi).sqrt() * 6.0);
        let density = |s: f64| norm * (1.0 + s * s / 8.0).powf(-4.5);
        let quad_p = 1.0 - 2.0 * simpson(&density, 0.0, r.t, 1e-14);
        assert!((r.p - quad_p).abs() < 1e-9, "{} {}", r.p, quad_p);
        assert!((r.p - 0.0316).abs() < 5e-4);
    }

    #[test]
    fn two_sample_hand_case() {
        let r = two_sample_pooled_t(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]).unwrap();
        assert_eq!(r.test.estimate, -3.0);
        assert_eq!(r.test.df, 4);
        assert!((r.test.t - (-3.0 / (2.0f64 / 3.0).sqrt())).abs() < 1e-12);
        assert!((r.test.t + 3.674).abs() < 1e-3);
        let same = two_sample_pooled_t(&[1.0, 2.0, 4.0], &[1.0, 2.0, 4.0]).unwrap();
        assert_eq!(same.test.t, 0.0);
        assert_eq!(same.test.p, 1.0);
        assert!(two_sample_pooled_t(&[1.0, 1.0], &[2.0, 2.0]).is_err());
    }

    #[test]
    fn ols_exact_and_degenerate() {
        let x = [0.0, 1.0, 2.0, 3.0, 4.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v + 1.0).collect();
        let r = simple_ols(&x, &y).unwrap();
        assert!((r.slope - 2.0).abs() < 1e-12);
        assert!((r.intercept - 1.0).abs() < 1e-12);
        assert!((r.r2 - 1.0).abs() < 1e-12);
        assert_eq!((r.df1, r.df2), (1, 3));
        assert!(matches!(
            simple_ols(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]),
            Err(StatsError::ZeroVariance(_))
        ));
        assert!(matches!(
            simple_ols(&[1.0, 2.0], &[1.0, 2.0]),
            Err(StatsError::TooFew { .. })
        ));
        let flat = simple_ols(&[1.0, 2.0, 3.0], &[5.0, 5.0, 5.0]).unwrap();
        assert_eq!((flat.f, flat.p, flat.r2), (0.0, 1.0, 0.0));
    }

    proptest! {
        #[test]
        fn t_p_monotone_in_abs_t(t in 0.0f64..8.0, dt in 0.01f64..2.0, df in 1u64..60) {
            prop_assert!(two_sided_t_p(t + dt, df) <= two_sided_t_p(t, df));
            prop_assert_eq!(two_sided_t_p(t, df), two_sided_t_p(-t, df));
        }

        #[test]
        fn f_p_monotone(f in 0.0f64..50.0, df in 0.01f64..5.0, d1 in 1u64..5, d2 in 2u64..200) {
            prop_assert!(f_upper_p(f + df, d1, d2) <= f_upper_p(f, d1, d2));
        }

        #[test]
        fn one_sample_shift_invariant(
            values in prop::collection::vec(-5.0f64..5.0, 3..20), shift in -10.0f64..10.0,
        ) {
            prop_assume!(!all_equal(&values));
            let a = one_sample_t(&values, 0.3).unwrap();
            let shifted: Vec<f64> = values.iter().map(|v| v + shift).collect();
            let b = one_sample_t(&shifted, 0.3 + shift).unwrap();
            prop_assert!((a.t - b.t).abs() < 1e-6 * (1.0 + a.t.abs()));
        }

        #[test]
        fn two_sample_antisymmetric(
            a in prop::collection::vec(-5.0f64..5.0, 2..15),
            b in prop::collection::vec(-5.0f64..5.0, 2..15),
        ) {
            prop_assume!(!all_equal(&a) || !all_equal(&b));
            let ab = two_sample_pooled_t(&a, &b).unwrap();
            let ba = two_sample_pooled_t(&b, &a).unwrap();
            prop_assert!((ab.test.t + ba.test.t).abs() < 1e-9 * (1.0 + ab.test.t.abs()));
            prop_assert!((ab.test.p - ba.test.p).abs() < 1e-12);
        }

        #[test]
        fn ols_r2_is_squared_correlation(
            pts in prop::collection::vec((-10.0f64..10.0, -10.0f64..10.0), 3..40),
        ) {
            let (x, y): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
            prop_assume!(!all_equal(&x) && !all_equal(&y));
            let r = simple_ols(&x, &y).unwrap();
            let n = x.len() as f64;
            let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
            let cov: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
            let vx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
            let vy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
            prop_assert!((r.r2 - cov * cov / (vx * vy)).abs() < 1e-12);
        }
    }
}

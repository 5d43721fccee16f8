mod common;

use common::suites;

fn check(result: suites::SuiteResult) {
    match result {
        Ok(summary) => println!("{summary}"),
        Err(e) => panic!("{e}"),
    }
}

#[test]
fn ols_matches_normal_equations() {
    check(suites::ols_vs_normal_equations(1e-10));
}

#[test]
fn pooled_t_matches_indicator_regression() {
    check(suites::pooled_t_vs_indicator_regression(1e-10));
}

#[test]
fn median_split_matches_sort_oracle() {
    check(suites::median_split_vs_sort_oracle());
}

#[test]
fn inc_beta_matches_quadrature() {
    check(suites::inc_beta_vs_quadrature(1e-9));
}

//! Acceptance criteria for the crate, one test per criterion. Each test
//! prints a single pass/fail line (visible with `--nocapture`) and asserts
//! the corresponding thresholds.

use bethe_ff::verify::{self, Check};

const SEED: u64 = 7;

fn report(criterion: &str, checks: &[Check]) {
    let passed = checks.iter().all(|c| c.passed);
    let worst = checks.iter().map(|c| c.worst).fold(0.0_f64, f64::max);
    let cases: usize = checks.iter().map(|c| c.cases).sum();
    println!(
        "{}: {criterion} (worst {worst:.3e}, {cases} cases)",
        if passed { "PASS" } else { "FAIL" }
    );
    for c in checks {
        assert!(
            c.passed,
            "criterion `{criterion}` failed check `{}`: worst {:.3e} > threshold {:.3e}",
            c.name, c.worst, c.threshold
        );
    }
}

fn suite_checks(suite: &str) -> Vec<Check> {
    let reports = verify::run_suite(suite, SEED).expect("suite runs");
    reports.into_iter().flat_map(|r| r.checks).collect()
}

#[test]
fn criterion_01_kernel_identities() {
    report("kernel identities at 10^4 random points", &suite_checks("kernels"));
}

#[test]
fn criterion_02_slavnov_vs_oracle() {
    report("Slavnov determinant matches the dense oracle", &suite_checks("slavnov"));
}

#[test]
fn criterion_03_orthogonality() {
    let mut checks = suite_checks("orthogonality");
    checks.push(verify::onshell_orthogonality(SEED).expect("orthogonality"));
    report("orthogonality of on-shell states and the null vector", &checks);
}

#[test]
fn criterion_04_appendix_sums() {
    report("auxiliary partial-fraction sums match closed forms", &suite_checks("appendix"));
}

#[test]
fn criterion_05_sigma_representations() {
    report(
        "Sigma^alpha Omega-determinant equals the reduced determinant",
        &suite_checks("theorem1"),
    );
}

#[test]
fn criterion_06_psi_route_equivalence() {
    let checks = vec![
        verify::psi_route_equivalence(SEED).expect("psi routes"),
        verify::rank_one_identity(SEED).expect("rank-one identity"),
    ];
    report("field form-factor routes and the rank-one identity", &checks);
}

#[test]
fn criterion_07_spin_form_factor() {
    let checks = suite_checks("spin");
    report(
        "spin lowering form factor matches the oracle with constant 1",
        &checks,
    );
}

#[test]
fn criterion_08_rtt_and_conventions() {
    report(
        "intertwining relation, vacuum action and operator reconstruction",
        &suite_checks("rtt"),
    );
}

#[test]
fn criterion_09_solver_certification() {
    let (residual, eigen) = verify::solver_certification(SEED).expect("solver");
    report("Bethe solver residuals and dense eigenvalue confirmation", &[residual, eigen]);
}

#[test]
fn criterion_10_q1_form_factor() {
    let checks = vec![verify::q1_checks(SEED).expect("q1")];
    report("number-operator form factor limits and derivative routes", &checks);
}

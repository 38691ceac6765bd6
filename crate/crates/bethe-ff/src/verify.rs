//! Seeded self-verification suites exercised by the CLI `verify`
//! subcommand and by the acceptance test target.

use crate::error::Result;
use num_complex::Complex64;
use serde::Serialize;

/// Outcome of one named check inside a suite.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub worst: f64,
    pub threshold: f64,
    pub cases: usize,
}

/// Outcome of a whole suite.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub suite: String,
    pub seed: u64,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn check(name: &str, worst: f64, threshold: f64, cases: usize) -> Check {
    Check {
        name: name.to_string(),
        passed: worst.is_finite() && worst <= threshold,
        worst,
        threshold,
        cases,
    }
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

pub const SUITES: &[&str] = &[
    "kernels",
    "slavnov",
    "orthogonality",
    "theorem1",
    "appendix",
    "spin",
    "rtt",
];

/// Run one suite (or `all`) with the given seed.
pub fn run_suite(name: &str, seed: u64) -> Result<Vec<Report>> {
    let mut reports = Vec::new();
    let wanted: Vec<&str> = if name == "all" {
        SUITES.to_vec()
    } else {
        vec![name]
    };
    for suite in wanted {
        let report = match suite {
            "kernels" => suite_kernels(seed)?,
            "slavnov" => suite_slavnov(seed)?,
            "orthogonality" => suite_orthogonality(seed)?,
            "theorem1" => suite_theorem1(seed)?,
            "appendix" => suite_appendix(seed)?,
            "spin" => suite_spin(seed)?,
            "rtt" => suite_rtt(seed)?,
            other => {
                return Err(crate::error::Error::InvalidInput(format!(
                    "unknown verification suite `{other}`; expected one of {SUITES:?} or `all`"
                )))
            }
        };
        reports.push(report);
    }
    Ok(reports)
}

mod rand_util {
    use num_complex::Complex64;
    use rand::Rng;
    use rand_chacha::ChaCha8Rng;

    pub fn rc(r: &mut ChaCha8Rng, scale: f64) -> Complex64 {
        Complex64::new(
            r.gen_range(-scale..scale),
            r.gen_range(-scale..scale),
        )
    }

    pub fn distinct_set(r: &mut ChaCha8Rng, n: usize, scale: f64) -> Vec<Complex64> {
        loop {
            let v: Vec<Complex64> = (0..n).map(|_| rc(r, scale)).collect();
            let mut ok = true;
            for i in 0..n {
                for j in 0..i {
                    if (v[i] - v[j]).norm() < 0.05 * scale {
                        ok = false;
                    }
                }
            }
            if ok {
                return v;
            }
        }
    }
}

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_util::{distinct_set, rc};

use crate::bethe::{solve_bethe_newton, solve_bethe_qnls};
use crate::kernels::Kernels;
use crate::model::{BetheState, ModelSpec, RapiditySet, SigmaConfig};

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(stream))
}

/// Random inhomogeneities: small, real, distinct.
fn random_xi(r: &mut ChaCha8Rng, m: usize) -> Vec<Complex64> {
    loop {
        let xi: Vec<f64> = (0..m).map(|_| r.gen_range(-0.1..0.1)).collect();
        let mut ok = true;
        for i in 0..m {
            for j in 0..i {
                if (xi[i] - xi[j]).abs() < 0.01 {
                    ok = false;
                }
            }
        }
        if ok {
            return xi.into_iter().map(|x| Complex64::new(x, 0.0)).collect();
        }
    }
}

/// Random spin-chain model, alternating XXX / XXZ.
fn random_spin_model(r: &mut ChaCha8Rng, m: usize, trig: bool) -> ModelSpec {
    let xi = random_xi(r, m);
    if trig {
        ModelSpec::xxz(r.gen_range(0.7..1.3), xi)
    } else {
        ModelSpec::xxx(xi)
    }
}

/// Solve a random on-shell spin state with n magnons, retrying seeds until
/// the Newton iteration converges to distinct roots.
fn random_spin_state(r: &mut ChaCha8Rng, model: &ModelSpec, n: usize) -> Result<BetheState> {
    let mut last_err = None;
    for _ in 0..40 {
        let seeds: Vec<Complex64> = (0..n)
            .map(|k| {
                Complex64::new(
                    0.45 * (k as f64 - (n as f64 - 1.0) / 2.0) + r.gen_range(-0.08..0.08),
                    r.gen_range(-0.08..0.08),
                )
            })
            .collect();
        match solve_bethe_newton(model, &RapiditySet::new(seeds, "seed")) {
            // reject runaway roots: they make the vacuum amplitudes huge
            // and the determinant comparisons meaninglessly ill-conditioned
            Ok(state) if state.roots.values.iter().all(|z| z.norm() < 2.5) => {
                return Ok(state)
            }
            Ok(_) => {}
            Err(e) => last_err = Some(e),
        }
    }
    Err(last_err.unwrap_or_else(|| {
        crate::error::Error::NoConvergence {
            iterations: 0,
            residual: f64::NAN,
        }
    }))
}

fn suite_kernels(seed: u64) -> Result<Report> {
    let mut checks = Vec::new();
    let gamma = 1.05;
    for (label, k) in [
        ("rational", Kernels::rational(1.3)),
        ("trigonometric", Kernels::trigonometric(gamma)),
    ] {
        let mut r = rng(seed, 1);
        let mut worst_fg: f64 = 0.0;
        let mut worst_t: f64 = 0.0;
        let mut worst_sym: f64 = 0.0;
        let pts = 10_000;
        let mut done = 0;
        while done < pts {
            let a = rc(&mut r, 2.0);
            let b = rc(&mut r, 2.0);
            let (f, g, h, t) = match (k.f(a, b), k.g(a, b), k.h(a, b), k.t(a, b)) {
                (Ok(f), Ok(g), Ok(h), Ok(t)) => (f, g, h, t),
                _ => continue,
            };
            // h = f / g and t = g / h in both kernel variants
            worst_fg = worst_fg.max((h * g - f).norm() / f.norm().max(1.0));
            worst_t = worst_t.max((t * h - g).norm() / g.norm().max(1.0));
            if let (Ok(fr), Ok(gr)) = (k.f(b, a), k.g(b, a)) {
                // g is odd; the f exchange sum is 2 (rational) / 2 cos gamma (trig)
                worst_sym = worst_sym.max((g + gr).norm() / g.norm().max(1.0));
                let exchange = if k.is_trigonometric() {
                    2.0 * gamma.cos()
                } else {
                    2.0
                };
                worst_sym = worst_sym.max((f + fr - exchange).norm() / f.norm().max(1.0));
            }
            if !k.is_trigonometric() {
                // rational-only: f = 1 + g
                worst_fg = worst_fg.max((f - (1.0 + g)).norm() / f.norm().max(1.0));
            }
            done += 1;
        }
        checks.push(check(&format!("{label} h = f/g"), worst_fg, 1e-13, pts));
        checks.push(check(&format!("{label} t = g/h"), worst_t, 1e-13, pts));
        checks.push(check(&format!("{label} exchange symmetry"), worst_sym, 1e-13, pts));
    }
    // pole handling: evaluations inside the guard distance must error
    let k = Kernels::rational(1.0);
    let a = Complex64::new(0.5, 0.0);
    let near = a + Complex64::new(1e-12, 0.0);
    let pole_rejected = k.f(a, near).is_err()
        && k.g(a, near).is_err()
        && k.t(a, near).is_err()
        && k.h(a, near).is_ok();
    checks.push(Check {
        name: "pole guard rejects coinciding arguments".into(),
        passed: pole_rejected,
        worst: if pole_rejected { 0.0 } else { 1.0 },
        threshold: 0.5,
        cases: 1,
    });
    Ok(Report {
        suite: "kernels".into(),
        seed,
        checks,
    })
}

fn suite_slavnov(seed: u64) -> Result<Report> {
    let mut r = rng(seed, 2);
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    let mut trig_toggle = false;
    while cases < 50 {
        for &m in &[2usize, 4, 6, 8] {
            for n in 1..=3usize {
                if n > m / 2 {
                    continue;
                }
                let model = random_spin_model(&mut r, m, trig_toggle);
                trig_toggle = !trig_toggle;
                let mus = match random_spin_state(&mut r, &model, n) {
                    Ok(s) => s,
                    Err(_) => continue,
                };
                let nus = RapiditySet::new(distinct_set(&mut r, n, 0.4), "nu");
                let det = crate::scalar::scalar_product(&model, &mus, &nus)?.value;
                let oracle =
                    crate::oracle::oracle_scalar_product(&model, &mus.roots.values, &nus.values)?;
                worst = worst.max(rel(det, oracle));
                cases += 1;
            }
        }
    }
    Ok(Report {
        suite: "slavnov".into(),
        seed,
        checks: vec![check("determinant equals oracle scalar product", worst, 1e-8, cases)],
    })
}

fn suite_orthogonality(seed: u64) -> Result<Report> {
    let mut r = rng(seed, 3);
    let mut worst_det: f64 = 0.0;
    let mut worst_vec: f64 = 0.0;
    let mut cases = 0;
    while cases < 100 {
        let n = r.gen_range(2..=8usize);
        let trig = r.gen_bool(0.5);
        let mus = RapiditySet::new(distinct_set(&mut r, n, 1.0), "mu");
        let lams = RapiditySet::new(distinct_set(&mut r, n, 1.0), "lambda");
        let model = if trig {
            ModelSpec::xxz(1.05, vec![Complex64::new(0.0, 0.0)])
        } else {
            ModelSpec::xxx(vec![Complex64::new(0.0, 0.0)])
        };
        let m = match crate::scalar::orthogonality_matrix(&model, &mus, &lams) {
            Ok(m) => m,
            Err(_) => continue,
        };
        let d = crate::linalg::det(&m)?;
        worst_det = worst_det.max(d.norm() / m.max_abs().powi(n as i32).max(1e-300));
        let xi = crate::scalar::zero_eigenvector(&model, &mus, &lams)?;
        let mut resid: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for i in 0..n {
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..n {
                s += m[(i, j)] * xi[j];
                scale = scale.max((m[(i, j)] * xi[j]).norm());
            }
            resid = resid.max(s.norm());
        }
        worst_vec = worst_vec.max(resid / scale.max(1e-300));
        cases += 1;
    }
    Ok(Report {
        suite: "orthogonality".into(),
        seed,
        checks: vec![
            check("orthogonality determinant vanishes", worst_det, 1e-8, cases),
            check("explicit null vector annihilated", worst_vec, 1e-11, cases),
        ],
    })
}

fn suite_theorem1(seed: u64) -> Result<Report> {
    let mut r = rng(seed, 4);
    let mut worst: f64 = 0.0;
    let mut worst_trace: f64 = 0.0;
    let mut cases = 0;
    let mut trace_cases = 0;
    while cases < 200 {
        let n = r.gen_range(1..=6usize);
        let cfg = SigmaConfig {
            alpha: rc(&mut r, 0.5),
            mus: RapiditySet::new(distinct_set(&mut r, n, 1.0), "mu"),
            lambdas: RapiditySet::new(distinct_set(&mut r, n, 1.0), "lambda"),
        };
        let c = r.gen_range(0.5..2.0);
        let a = match crate::qnls::sigma_alpha_omega(&cfg, c) {
            Ok(v) => v,
            Err(_) => continue,
        };
        let b = crate::qnls::sigma_alpha_reduced(&cfg, c)?;
        worst = worst.max(rel(a, b));
        cases += 1;
        if n <= 4 && trace_cases < 40 {
            let trace = crate::qnls::theorem1_trace(&cfg, c, None)?;
            worst_trace = worst_trace.max(trace.max_discrepancy());
            trace_cases += 1;
        }
    }
    Ok(Report {
        suite: "theorem1".into(),
        seed,
        checks: vec![
            check("Omega and reduced representations agree", worst, 1e-9, cases),
            check("step-by-step equivalence trace", worst_trace, 1e-10, trace_cases),
        ],
    })
}

fn suite_appendix(seed: u64) -> Result<Report> {
    let mut r = rng(seed, 5);
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    while cases < 200 {
        let n = r.gen_range(1..=8usize);
        let mus = RapiditySet::new(distinct_set(&mut r, n, 1.0), "mu");
        let lams = RapiditySet::new(distinct_set(&mut r, n, 1.0), "lambda");
        let c = r.gen_range(0.5..2.0);
        let j = r.gen_range(0..n);
        for plus in [true, false] {
            let (sum, closed) = match crate::scalar::appendix_g_sums(&mus, &lams, j, plus, c) {
                Ok(v) => v,
                Err(_) => continue,
            };
            worst = worst.max(rel(sum, closed));
        }
        cases += 1;
    }
    Ok(Report {
        suite: "appendix".into(),
        seed,
        checks: vec![check("partial-fraction sums match closed forms", worst, 1e-11, cases)],
    })
}

fn suite_spin(seed: u64) -> Result<Report> {
    let mut r = rng(seed, 6);
    let mut ratios: Vec<Complex64> = Vec::new();
    let mut attempts = 0;
    while ratios.len() < 30 && attempts < 500 {
        attempts += 1;
        let m = *[2usize, 4, 6].get(r.gen_range(0..3)).unwrap();
        let n = r.gen_range(0..=(m / 2 - 1).min(2));
        let trig = r.gen_bool(0.5);
        let model = random_spin_model(&mut r, m, trig);
        let mus = match random_spin_state(&mut r, &model, n + 1) {
            Ok(s) => s,
            Err(_) => continue,
        };
        let lams = if n == 0 {
            BetheState {
                model: model.clone(),
                roots: RapiditySet::new(vec![], "lambda"),
                quantum_numbers: vec![],
                residual: 0.0,
            }
        } else {
            match random_spin_state(&mut r, &model, n) {
                Ok(s) => s,
                Err(_) => continue,
            }
        };
        let site = r.gen_range(1..=m);
        let det = match crate::spin::ff_sigma_minus(&model, &mus, &lams, site) {
            Ok(v) => v.value,
            Err(_) => continue,
        };
        let oracle = match crate::oracle::oracle_sigma_minus(
            &model,
            &mus.roots.values,
            &lams.roots.values,
            site,
        ) {
            Ok(v) => v,
            Err(_) => continue,
        };
        if oracle.norm() < 1e-12 {
            continue;
        }
        ratios.push(det / oracle);
    }
    let mean = ratios.iter().sum::<Complex64>() / ratios.len() as f64;
    let spread = ratios
        .iter()
        .map(|z| (z - mean).norm())
        .fold(0.0_f64, f64::max);
    let kappa_dev = (mean - 1.0).norm();
    let cases = ratios.len();
    Ok(Report {
        suite: "spin".into(),
        seed,
        checks: vec![
            check("normalization constant spread", spread, 1e-8, cases),
            check("normalization constant equals one", kappa_dev, 1e-8, cases),
        ],
    })
}

fn suite_rtt(seed: u64) -> Result<Report> {
    let mut r = rng(seed, 7);
    let mut worst_rtt: f64 = 0.0;
    let mut worst_vac: f64 = 0.0;
    let mut cases = 0;
    while cases < 50 {
        let m = r.gen_range(1..=3usize);
        let trig = r.gen_bool(0.5);
        let model = random_spin_model(&mut r, m, trig);
        let lam = rc(&mut r, 1.0);
        let mu = rc(&mut r, 1.0) + 2.5;
        match crate::oracle::verify_rtt(&model, lam, mu) {
            Ok(dev) => worst_rtt = worst_rtt.max(dev),
            Err(_) => continue,
        }
        let (a_emp, d_emp) = crate::oracle::vacuum_eigen_empirical(&model, lam)?;
        let (a_cl, d_cl) = crate::kernels::vacuum_eigen(&model, lam)?;
        worst_vac = worst_vac
            .max((a_emp - a_cl).norm() / a_cl.norm().max(1e-300))
            .max((d_emp - d_cl).norm() / d_cl.norm().max(1e-300));
        cases += 1;
    }
    let mut worst_rec: f64 = 0.0;
    let mut rec_cases = 0;
    for m in [2usize, 4, 6] {
        for trig in [false, true] {
            let model = random_spin_model(&mut r, m, trig);
            worst_rec = worst_rec.max(crate::oracle::sigma_reconstruction_error(&model)?);
            rec_cases += 1;
        }
    }
    Ok(Report {
        suite: "rtt".into(),
        seed,
        checks: vec![
            check("intertwining relation holds", worst_rtt, 1e-10, cases),
            check("pseudovacuum is triangular", worst_vac, 1e-13, cases),
            check("local operators reconstructed from transfer matrices", worst_rec, 1e-10, rec_cases),
        ],
    })
}

/// Extra checks used by the acceptance target: field form-factor route
/// equivalence, the rank-one determinant identity, solver certification,
/// and the number-operator form factor.
pub fn psi_route_equivalence(seed: u64) -> Result<Check> {
    let _ = seed;
    let model = ModelSpec::qnls(10.0, 1.0);
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for n in 1..=3usize {
        let qn_mu: Vec<f64> = (0..n).map(|i| i as f64 - (n as f64 - 1.0) / 2.0).collect();
        let qn_lam: Vec<f64> = (0..=n).map(|i| i as f64 - n as f64 / 2.0 + 1.0).collect();
        let mus = solve_bethe_qnls(&model, &qn_mu)?;
        let lams = solve_bethe_qnls(&model, &qn_lam)?;
        let a = crate::qnls::ff_psi_action(&model, &mus, &lams)?.value;
        let b = crate::qnls::ff_psi_zero(&model, &mus, &lams)?.value;
        let c = crate::qnls::ff_psi_via_sigma(&model, &mus, &lams)?.value;
        worst = worst.max(rel(b, a)).max(rel(c, a));
        cases += 1;
    }
    Ok(check("field form-factor routes agree", worst, 1e-9, cases))
}

/// Distinct on-shell states of the same chain are orthogonal: the Slavnov
/// determinant must vanish relative to the natural prefactor scale.
pub fn onshell_orthogonality(seed: u64) -> Result<Check> {
    let mut r = rng(seed, 10);
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    let mut attempts = 0;
    while cases < 12 && attempts < 300 {
        attempts += 1;
        let m = *[2usize, 4, 6].get(r.gen_range(0..3)).unwrap();
        let n = r.gen_range(1..=(m / 2).min(2));
        let trig = r.gen_bool(0.5);
        let model = random_spin_model(&mut r, m, trig);
        let (a, b) = match (
            random_spin_state(&mut r, &model, n),
            random_spin_state(&mut r, &model, n),
        ) {
            (Ok(a), Ok(b)) => (a, b),
            _ => continue,
        };
        // require genuinely different solutions (not a permutation match)
        let separated = a.roots.values.iter().any(|&x| {
            b.roots
                .values
                .iter()
                .map(|&y| (x - y).norm())
                .fold(f64::INFINITY, f64::min)
                > 0.05
        });
        if !separated {
            continue;
        }
        let value = crate::scalar::scalar_product(&model, &a, &b.roots)?.value;
        let pref = crate::scalar::slavnov_prefactor(
            &model,
            &a.roots.values,
            &b.roots.values,
        )?;
        // scale from the uncancelled kernel terms (the determinant entries
        // themselves cancel when both sets are on shell)
        let kernels = Kernels::for_model(&model);
        let mut scale = pref.norm();
        for &l in &b.roots.values {
            let mut row = 0.0_f64;
            for &mu in &a.roots.values {
                row += kernels.t(mu, l)?.norm();
            }
            scale *= row;
        }
        worst = worst.max(value.norm() / scale.max(1e-300));
        cases += 1;
    }
    Ok(check("distinct on-shell states are orthogonal", worst, 1e-8, cases))
}

pub fn rank_one_identity(seed: u64) -> Result<Check> {
    let mut r = rng(seed, 8);
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for n in 1..=5usize {
        for _ in 0..10 {
            let s = crate::linalg::ComplexMatrix::from_fn(n + 1, n, |_, _| rc(&mut r, 1.0));
            let alt = crate::qnls::rank_one_alternating_sum(&s)?;
            let red = crate::qnls::rank_one_reduced(&s)?.value;
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            worst = worst.max((alt - sign * red).norm() / red.norm().max(1e-300));
            cases += 1;
        }
    }
    Ok(check("alternating minor sum reduces to one determinant", worst, 1e-11, cases))
}

pub fn solver_certification(seed: u64) -> Result<(Check, Check)> {
    let mut r = rng(seed, 9);
    let mut worst_res: f64 = 0.0;
    let mut worst_eig: f64 = 0.0;
    let mut cases = 0;
    // QNLS ground-state-like states
    let model = ModelSpec::qnls(10.0, 1.0);
    for n in 1..=4usize {
        let qn: Vec<f64> = (0..n).map(|i| i as f64 - (n as f64 - 1.0) / 2.0).collect();
        let st = solve_bethe_qnls(&model, &qn)?;
        worst_res = worst_res.max(st.residual);
        cases += 1;
    }
    // spin states, checked against the dense transfer matrix
    for m in [2usize, 4] {
        for trig in [false, true] {
            let spin_model = random_spin_model(&mut r, m, trig);
            for n in 1..=m / 2 {
                let st = match random_spin_state(&mut r, &spin_model, n) {
                    Ok(s) => s,
                    Err(_) => continue,
                };
                worst_res = worst_res.max(st.residual);
                worst_eig = worst_eig.max(crate::oracle::oracle_eigencheck(
                    &spin_model,
                    rc(&mut r, 0.5) + 1.5,
                    &st.roots.values,
                )?);
                cases += 1;
            }
        }
    }
    Ok((
        check("certified residuals at the returned roots", worst_res, 1e-12, cases),
        check("dense transfer matrix confirms the eigenvector", worst_eig, 1e-11, cases),
    ))
}

pub fn q1_checks(seed: u64) -> Result<Check> {
    let _ = seed;
    let model = ModelSpec::qnls(10.0, 1.0);
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for n in 1..=3usize {
        let qn_mu: Vec<f64> = (0..n).map(|i| i as f64 - (n as f64 - 1.0) / 2.0).collect();
        let qn_lam: Vec<f64> = qn_mu.iter().map(|q| q + 1.0).collect();
        let mus = solve_bethe_qnls(&model, &qn_mu)?;
        let lams = solve_bethe_qnls(&model, &qn_lam)?;
        // the vanishing limits must be exact
        let z1 = crate::qnls::ff_q1(0.0, &model, &mus, &lams)?.value;
        let z2 = crate::qnls::ff_q1(1.7, &model, &mus, &mus)?.value;
        worst = worst.max(z1.norm()).max(z2.norm());
        // the dual-route derivative comparison runs internally and errors
        // on disagreement beyond 1e-6
        crate::qnls::ff_q1(1.7, &model, &mus, &lams)?;
        cases += 1;
    }
    Ok(check("number-operator form factor limits and derivative routes", worst, 1e-6, cases))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_suites_pass_with_default_seed() {
        for report in run_suite("all", 7).unwrap() {
            assert!(report.passed(), "suite {} failed: {:#?}", report.suite, report.checks);
        }
    }

    #[test]
    fn unknown_suite_is_rejected() {
        assert!(run_suite("nonsense", 1).is_err());
    }

    #[test]
    fn reports_are_deterministic() {
        let a = serde_json::to_string(&run_suite("kernels", 3).unwrap()).unwrap();
        let b = serde_json::to_string(&run_suite("kernels", 3).unwrap()).unwrap();
        assert_eq!(a, b);
    }
}

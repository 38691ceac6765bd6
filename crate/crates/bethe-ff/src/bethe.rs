//! Bethe-equation residuals, Newton solvers and transfer-matrix eigenvalues.

use crate::error::{Error, Result};
use crate::kernels::{dlog_r, ratio_r, vacuum_eigen, Kernels};
use crate::linalg::{solve, ComplexMatrix};
use crate::model::{eps_c, BetheState, ModelKind, ModelSpec, RapiditySet, ONSHELL_TOL};
use num_complex::Complex64;

const MAX_ITER: usize = 200;
const MAX_DAMPINGS: usize = 8;

/// Per-root deviation |r(lambda_j) prod_{k!=j} f(lambda_j,lambda_k)/f(lambda_k,lambda_j) - 1|.
///
/// The equivalent h-kernel form of the equations (which differs from the
/// f-form by (-1)^{N-1} from the g-ratio of each pair) is evaluated as an
/// internal consistency check.
pub fn bethe_residual(model: &ModelSpec, roots: &RapiditySet) -> Result<Vec<f64>> {
    roots.check_distinct()?;
    let k = Kernels::for_model(model);
    let lam = &roots.values;
    let n = lam.len();
    let mut out = Vec::with_capacity(n);
    for j in 0..n {
        let mut val_f = ratio_r(model, lam[j])?;
        let mut val_h = val_f;
        for m in 0..n {
            if m == j {
                continue;
            }
            val_f *= k.f(lam[j], lam[m])? / k.f(lam[m], lam[j])?;
            val_h *= k.h(lam[j], lam[m])? / k.h(lam[m], lam[j])?;
        }
        // h-form equals (-1)^{N-1} times the f-form
        let sign = if (n + 1) % 2 == 0 { 1.0 } else { -1.0 };
        let gap = (val_h * sign - val_f).norm();
        if gap > 1e-12 * (1.0 + val_f.norm()) {
            return Err(Error::Convention(format!(
                "h-form and f-form of the Bethe equations disagree by {gap:.3e}"
            )));
        }
        out.push((val_f - 1.0).norm());
    }
    Ok(out)
}

fn max_residual(model: &ModelSpec, roots: &RapiditySet) -> Result<f64> {
    Ok(bethe_residual(model, roots)?
        .into_iter()
        .fold(0.0, f64::max))
}

/// Solve the QNLS Bethe equations in logarithmic form
/// `L lambda_j + sum_k 2 atan((lambda_j - lambda_k)/c) = 2 pi I_j`
/// by damped Newton iteration from the free-particle seed.
///
/// Quantum numbers must be distinct, and integers (N odd) or half-odd
/// integers (N even). For c > 0 all returned roots are real.
pub fn solve_bethe_qnls(model: &ModelSpec, quantum_numbers: &[f64]) -> Result<BetheState> {
    if model.kind != ModelKind::Qnls {
        return Err(Error::InvalidInput("solve_bethe_qnls requires a qnls model".into()));
    }
    model.validate()?;
    let l = model.box_length.unwrap();
    let c = model.coupling();
    let n = quantum_numbers.len();
    for (i, &q) in quantum_numbers.iter().enumerate() {
        let doubled = 2.0 * q;
        if (doubled - doubled.round()).abs() > 1e-9 {
            return Err(Error::InvalidInput(format!(
                "quantum number {q} is neither integer nor half-odd integer"
            )));
        }
        // parity: integers for N odd, half-odd integers for N even
        let is_half = (doubled.round() as i64).rem_euclid(2) != 0;
        if is_half != (n % 2 == 0) {
            return Err(Error::InvalidInput(format!(
                "quantum number {q} has the wrong parity for N = {n}"
            )));
        }
        for &p in &quantum_numbers[..i] {
            if (q - p).abs() < 1e-9 {
                return Err(Error::InvalidInput(format!("repeated quantum number {q}")));
            }
        }
    }

    let two_pi = 2.0 * std::f64::consts::PI;
    let mut lam: Vec<f64> = quantum_numbers.iter().map(|&q| two_pi * q / l).collect();
    let residual_vec = |lam: &[f64]| -> Vec<f64> {
        (0..n)
            .map(|j| {
                let mut s = l * lam[j] - two_pi * quantum_numbers[j];
                for k in 0..n {
                    s += 2.0 * ((lam[j] - lam[k]) / c).atan();
                }
                s
            })
            .collect()
    };
    let norm_inf = |v: &[f64]| v.iter().fold(0.0_f64, |a, &x| a.max(x.abs()));

    let mut fvec = residual_vec(&lam);
    let mut fnorm = norm_inf(&fvec);
    let mut iterations = 0;
    while fnorm > 1e-13 {
        if iterations >= MAX_ITER {
            return Err(Error::NoConvergence {
                iterations,
                residual: fnorm,
            });
        }
        iterations += 1;
        // analytic Jacobian of the logarithmic system
        let jac = ComplexMatrix::from_fn(n, n, |j, kk| {
            let w = |d: f64| 2.0 / (c * (1.0 + (d / c).powi(2)));
            let v = if j == kk {
                l + (0..n)
                    .filter(|&m| m != j)
                    .map(|m| w(lam[j] - lam[m]))
                    .sum::<f64>()
            } else {
                -w(lam[j] - lam[kk])
            };
            Complex64::new(v, 0.0)
        });
        let rhs: Vec<Complex64> = fvec.iter().map(|&x| Complex64::new(-x, 0.0)).collect();
        let step = solve(&jac, &rhs)?;
        let mut scale = 1.0;
        let mut accepted = false;
        for _ in 0..=MAX_DAMPINGS {
            let trial: Vec<f64> = lam
                .iter()
                .zip(&step)
                .map(|(&x, s)| x + scale * s.re)
                .collect();
            let tvec = residual_vec(&trial);
            let tnorm = norm_inf(&tvec);
            if tnorm < fnorm || tnorm <= 1e-13 {
                lam = trial;
                fvec = tvec;
                fnorm = tnorm;
                accepted = true;
                break;
            }
            scale *= 0.5;
        }
        if !accepted {
            return Err(Error::NoConvergence {
                iterations,
                residual: fnorm,
            });
        }
    }

    let roots = RapiditySet::new(
        lam.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        "qnls roots",
    );
    let residual = max_residual(model, &roots)?;
    if residual > ONSHELL_TOL {
        return Err(Error::NoConvergence {
            iterations,
            residual,
        });
    }
    Ok(BetheState {
        model: model.clone(),
        roots,
        quantum_numbers: quantum_numbers.to_vec(),
        residual,
    })
}

/// Seed-driven damped complex Newton solver for the spin-chain Bethe
/// equations, iterating directly on the product form (no logarithm, hence
/// no branch bookkeeping) with the analytic holomorphic Jacobian.
pub fn solve_bethe_newton(model: &ModelSpec, seed: &RapiditySet) -> Result<BetheState> {
    model.validate()?;
    seed.check_distinct()?;
    let k = Kernels::for_model(model);
    let n = seed.len();
    let mut lam = seed.values.clone();

    let eval = |lam: &[Complex64]| -> Result<Vec<Complex64>> {
        let mut vals = Vec::with_capacity(n);
        for j in 0..n {
            let mut v = ratio_r(model, lam[j])?;
            for m in 0..n {
                if m != j {
                    v *= k.f(lam[j], lam[m])? / k.f(lam[m], lam[j])?;
                }
            }
            vals.push(v);
        }
        Ok(vals)
    };
    let norm_inf = |v: &[Complex64]| v.iter().fold(0.0_f64, |a, x| a.max((x - 1.0).norm()));
    let collision_check = |lam: &[Complex64]| -> Result<()> {
        for i in 0..n {
            for j in 0..i {
                let sep = (lam[i] - lam[j]).norm();
                if sep <= eps_c(lam[i], lam[j]) {
                    return Err(Error::RootCollision {
                        i: j,
                        j: i,
                        separation: sep,
                    });
                }
            }
        }
        Ok(())
    };

    let mut vals = eval(&lam)?;
    let mut fnorm = norm_inf(&vals);
    let mut iterations = 0;
    while fnorm > 1e-13 {
        if iterations >= MAX_ITER {
            return Err(Error::NoConvergence {
                iterations,
                residual: fnorm,
            });
        }
        iterations += 1;
        // J_jk = d val_j / d lambda_k (holomorphic)
        let mut jac = ComplexMatrix::zeros(n, n);
        for j in 0..n {
            for kk in 0..n {
                let d = if j == kk {
                    let mut s = dlog_r(model, lam[j])?;
                    for m in 0..n {
                        if m != j {
                            s += k.dlogf_dfirst(lam[j], lam[m])?;
                            // minus d/dlam_j log f(lam_m, lam_j) = +dlogf_dfirst
                            // with respect to the second argument:
                            s -= -k.dlogf_dfirst(lam[m], lam[j])?;
                        }
                    }
                    s
                } else {
                    // d/dlam_k [log f(lam_j,lam_k) - log f(lam_k,lam_j)]
                    -k.dlogf_dfirst(lam[j], lam[kk])? - k.dlogf_dfirst(lam[kk], lam[j])?
                };
                jac[(j, kk)] = vals[j] * d;
            }
        }
        let rhs: Vec<Complex64> = vals.iter().map(|v| -(v - 1.0)).collect();
        let step = solve(&jac, &rhs)?;
        let mut scale = 1.0;
        let mut accepted = false;
        for _ in 0..=MAX_DAMPINGS {
            let trial: Vec<Complex64> = lam
                .iter()
                .zip(&step)
                .map(|(&x, s)| x + scale * s)
                .collect();
            collision_check(&trial)?;
            if let Ok(tvals) = eval(&trial) {
                let tnorm = norm_inf(&tvals);
                if tnorm < fnorm || tnorm <= 1e-13 {
                    lam = trial;
                    vals = tvals;
                    fnorm = tnorm;
                    accepted = true;
                    break;
                }
            }
            scale *= 0.5;
        }
        if !accepted {
            return Err(Error::NoConvergence {
                iterations,
                residual: fnorm,
            });
        }
    }

    let roots = RapiditySet::new(lam, "newton roots");
    let residual = max_residual(model, &roots)?;
    if residual > ONSHELL_TOL {
        return Err(Error::NoConvergence {
            iterations,
            residual,
        });
    }
    Ok(BetheState {
        model: model.clone(),
        roots,
        quantum_numbers: Vec::new(),
        residual,
    })
}

/// Transfer-matrix eigenvalue
/// theta(mu | {lambda}) = a(mu) prod_m f(mu, lambda_m) + d(mu) prod_m f(lambda_m, mu).
pub fn transfer_eigenvalue(
    model: &ModelSpec,
    mu: Complex64,
    roots: &[Complex64],
) -> Result<Complex64> {
    let k = Kernels::for_model(model);
    let (a, d) = vacuum_eigen(model, mu)?;
    let mut p1 = Complex64::new(1.0, 0.0);
    let mut p2 = Complex64::new(1.0, 0.0);
    for &lam in roots {
        p1 *= k.f(mu, lam)?;
        p2 *= k.f(lam, mu)?;
    }
    Ok(a * p1 + d * p2)
}

/// Analytic derivative of `transfer_eigenvalue` with respect to `nus[k]`.
pub fn theta_derivative(
    model: &ModelSpec,
    mu: Complex64,
    nus: &[Complex64],
    k_index: usize,
) -> Result<Complex64> {
    if k_index >= nus.len() {
        return Err(Error::Index(format!(
            "theta_derivative index {k_index} out of range {}",
            nus.len()
        )));
    }
    let k = Kernels::for_model(model);
    let (a, d) = vacuum_eigen(model, mu)?;
    let mut p1 = Complex64::new(1.0, 0.0);
    let mut p2 = Complex64::new(1.0, 0.0);
    for (m, &nu) in nus.iter().enumerate() {
        if m != k_index {
            p1 *= k.f(mu, nu)?;
            p2 *= k.f(nu, mu)?;
        }
    }
    let nu = nus[k_index];
    Ok(a * k.df_dsecond(mu, nu)? * p1 + d * k.df_dfirst(nu, mu)? * p2)
}

#[cfg(test)]
mod tests {
    use super::*;

    const PI: f64 = std::f64::consts::PI;

    #[test]
    fn qnls_single_root_residuals() {
        let m = ModelSpec::qnls(2.0 * PI, 1.0);
        let on = RapiditySet::new(vec![Complex64::new(1.0, 0.0)], "on");
        let r = bethe_residual(&m, &on).unwrap();
        assert!(r[0] < 1e-14);
        let off = RapiditySet::new(vec![Complex64::new(0.5, 0.0)], "off");
        let r = bethe_residual(&m, &off).unwrap();
        assert!((r[0] - 2.0).abs() < 1e-12, "|e^{{-i pi}} - 1| = 2, got {}", r[0]);
    }

    #[test]
    fn xxx_one_magnon_root() {
        // M=4, homogeneous-like chain with tiny distinct xi; one-magnon root
        // near the solution of r(lambda) = 1 found by the seed solver.
        let m = ModelSpec::xxx(
            [0.001, -0.002, 0.0015, -0.0005]
                .iter()
                .map(|&x| Complex64::new(x, 0.0))
                .collect(),
        );
        let st = solve_bethe_newton(&m, &RapiditySet::new(vec![Complex64::new(0.5, 0.0)], "s"))
            .unwrap();
        assert!(st.residual <= 1e-13);
    }

    #[test]
    fn qnls_solver_basic() {
        let m = ModelSpec::qnls(2.0 * PI, 1.0);
        let st = solve_bethe_qnls(&m, &[0.0]).unwrap();
        assert!(st.roots.values[0].norm() < 1e-14);
        assert_eq!(st.residual, 0.0);

        let m10 = ModelSpec::qnls(10.0, 1.0);
        let st2 = solve_bethe_qnls(&m10, &[-0.5, 0.5]).unwrap();
        let (a, b) = (st2.roots.values[0], st2.roots.values[1]);
        assert!((a + b).norm() < 1e-12, "pair symmetric about zero");
        assert!(b.re > 0.0);
        let st3 = solve_bethe_qnls(&m10, &[-1.0, 0.0, 1.0]).unwrap();
        assert!(st3.residual <= 1e-12);
        // ordered quantum numbers give ordered real roots
        assert!(st3.roots.values.windows(2).all(|w| w[0].re < w[1].re));
        assert!(st3.roots.values.iter().all(|z| z.im == 0.0));
    }

    #[test]
    fn qnls_solver_rejects_bad_quantum_numbers() {
        let m = ModelSpec::qnls(10.0, 1.0);
        assert!(solve_bethe_qnls(&m, &[0.25]).is_err());
        assert!(solve_bethe_qnls(&m, &[0.5]).is_err()); // N=1 needs integers
        assert!(solve_bethe_qnls(&m, &[0.0, 1.0]).is_err()); // N=2 needs half-odd
        assert!(solve_bethe_qnls(&m, &[0.5, 0.5]).is_err());
    }

    #[test]
    fn newton_fixed_point() {
        let m = ModelSpec::xxx(vec![Complex64::new(0.05, 0.0), Complex64::new(-0.05, 0.0)]);
        let st = solve_bethe_newton(&m, &RapiditySet::new(vec![Complex64::new(0.1, 0.2)], "s"))
            .unwrap();
        assert!(st.residual <= 1e-12);
        let st2 = solve_bethe_newton(&m, &st.roots).unwrap();
        assert!((st2.roots.values[0] - st.roots.values[0]).norm() < 1e-13);
    }

    #[test]
    fn xxz_two_root_solve() {
        let m = ModelSpec::xxz(
            PI / 3.0,
            [0.02, -0.03, 0.05, -0.01]
                .iter()
                .map(|&x| Complex64::new(x, 0.0))
                .collect(),
        );
        let st = solve_bethe_newton(
            &m,
            &RapiditySet::new(
                vec![Complex64::new(0.3, 0.0), Complex64::new(-0.3, 0.0)],
                "s",
            ),
        )
        .unwrap();
        assert!(st.residual <= 1e-12);
        assert!((st.roots.values[0] - st.roots.values[1]).norm() > 1e-3);
    }

    #[test]
    fn theta_empty_products() {
        let m = ModelSpec::qnls(2.0 * PI, 1.0);
        let mu = Complex64::new(0.3, 0.0);
        let th = transfer_eigenvalue(&m, mu, &[]).unwrap();
        let expect = 2.0 * (PI * 0.3).cos();
        assert!((th - expect).norm() < 1e-13);
    }

    #[test]
    fn theta_finite_at_shifted_pole() {
        // the only poles of theta sit at mu = lambda_m, not mu = lambda_m + ic
        let m = ModelSpec::xxx(vec![Complex64::new(0.05, 0.0), Complex64::new(-0.05, 0.0)]);
        let lam = [Complex64::new(0.2, 0.0)];
        let mu = lam[0] + Complex64::new(0.0, 1.0);
        let th = transfer_eigenvalue(&m, mu, &lam).unwrap();
        assert!(th.is_finite());
    }

    #[test]
    fn theta_pole_cancellation_on_shell() {
        let m = ModelSpec::xxx(
            [0.04, -0.06, 0.02, 0.0]
                .iter()
                .map(|&x| Complex64::new(x, 0.0))
                .collect(),
        );
        let st = solve_bethe_newton(&m, &RapiditySet::new(vec![Complex64::new(0.35, 0.0)], "s"))
            .unwrap();
        let lam = st.roots.values[0];
        let t5 = transfer_eigenvalue(&m, lam + Complex64::new(1e-5, 0.0), &st.roots.values).unwrap();
        let t6 = transfer_eigenvalue(&m, lam + Complex64::new(1e-6, 0.0), &st.roots.values).unwrap();
        assert!((t5 - t6).norm() / t6.norm() < 1e-3);
    }

    #[test]
    fn theta_derivative_closed_form_single() {
        let m = ModelSpec::xxx(vec![Complex64::new(0.05, 0.0), Complex64::new(-0.05, 0.0)]);
        let k = Kernels::for_model(&m);
        let mu = Complex64::new(0.4, 0.2);
        let nu = Complex64::new(-0.1, 0.3);
        let (a, d) = vacuum_eigen(&m, mu).unwrap();
        let expect = a * k.df_dsecond(mu, nu).unwrap() + d * k.df_dfirst(nu, mu).unwrap();
        let got = theta_derivative(&m, mu, &[nu], 0).unwrap();
        assert!((got - expect).norm() < 1e-14);
    }

    #[test]
    fn theta_derivative_vs_finite_difference() {
        let step = 1e-6;
        let models = [
            ModelSpec::xxx(
                [0.04, -0.06, 0.02]
                    .iter()
                    .map(|&x| Complex64::new(x, 0.0))
                    .collect(),
            ),
            ModelSpec::xxz(
                PI / 3.0,
                [0.02, -0.03, 0.05]
                    .iter()
                    .map(|&x| Complex64::new(x, 0.0))
                    .collect(),
            ),
        ];
        for m in &models {
            let mu = Complex64::new(0.45, 0.15);
            let nus = [
                Complex64::new(-0.2, 0.1),
                Complex64::new(0.25, -0.3),
                Complex64::new(0.05, 0.4),
            ];
            for kk in 0..nus.len() {
                let mut hi = nus.to_vec();
                let mut lo = nus.to_vec();
                hi[kk] += step;
                lo[kk] -= step;
                let fd = (transfer_eigenvalue(m, mu, &hi).unwrap()
                    - transfer_eigenvalue(m, mu, &lo).unwrap())
                    / (2.0 * step);
                let an = theta_derivative(m, mu, &nus, kk).unwrap();
                assert!(
                    (fd - an).norm() <= 1e-7 * an.norm().max(1.0),
                    "model {:?} k={kk}: {fd} vs {an}",
                    m.kind
                );
            }
        }
    }
}

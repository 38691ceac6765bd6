//! Form factors of the QNLS local field Psi and of the particle-number
//! operator Q1, in the single-determinant representation and in the
//! elementary-symmetric-polynomial (Sigma^alpha) representation, together
//! with the step-by-step equivalence trace between the two.

use crate::error::{Error, Result};
use crate::kernels::{vacuum_eigen, Kernels};
use crate::linalg::{
    det, elementary_symmetric_all, log_det, vandermonde, ComplexMatrix,
};
use crate::model::{
    BetheState, FormFactorResult, ModelKind, ModelSpec, Representation, SigmaConfig,
};
use crate::scalar::scalar_product;
use crate::model::RapiditySet;
use num_complex::Complex64;

const I: Complex64 = Complex64::new(0.0, 1.0);

fn require_qnls(model: &ModelSpec) -> Result<f64> {
    if model.kind != ModelKind::Qnls {
        return Err(Error::InvalidInput("this operation requires a qnls model".into()));
    }
    Ok(model.coupling())
}

/// Coefficients of the field action on a Bethe-Ansatz vector: removing the
/// `l`-th rapidity contributes `-i sqrt(c) a(lambda_l) prod_{m!=l} f(lambda_l, lambda_m)`.
pub fn psi_action_coeffs(
    model: &ModelSpec,
    lambdas: &RapiditySet,
) -> Result<Vec<(Complex64, usize)>> {
    let c = require_qnls(model)?;
    lambdas.check_distinct()?;
    let k = Kernels::for_model(model);
    let lam = &lambdas.values;
    let mut out = Vec::with_capacity(lam.len());
    for l in 0..lam.len() {
        let mut coeff = -I * c.sqrt() * vacuum_eigen(model, lam[l])?.0;
        for m in 0..lam.len() {
            if m != l {
                coeff *= k.f(lam[l], lam[m])?;
            }
        }
        out.push((coeff, l));
    }
    Ok(out)
}

/// Field form factor through the action route: expand Psi on the ket state
/// and contract each term with the Slavnov determinant. Serves as the
/// internal ground truth for the determinant representations.
pub fn ff_psi_action(
    model: &ModelSpec,
    mus: &BetheState,
    lambdas: &BetheState,
) -> Result<FormFactorResult> {
    require_qnls(model)?;
    mus.require_onshell()?;
    lambdas.require_onshell()?;
    let lam = &lambdas.roots.values;
    let mut total = Complex64::new(0.0, 0.0);
    let mut worst_cond = 1.0_f64;
    for (coeff, l) in psi_action_coeffs(model, &lambdas.roots)? {
        let rest: Vec<Complex64> = lam
            .iter()
            .enumerate()
            .filter(|&(m, _)| m != l)
            .map(|(_, &x)| x)
            .collect();
        let s = scalar_product(model, mus, &RapiditySet::new(rest, "reduced"))?;
        worst_cond = worst_cond.max(s.condition);
        total += coeff * s.value;
    }
    Ok(FormFactorResult {
        value: total,
        representation: Representation::SlavnovDet,
        condition: worst_cond,
        notes: "action route".into(),
    })
}

/// The (N+1) x N matrix underlying the field form factor:
/// `S_jk = t(mu_k,lambda_j) prod_m h(mu_m,lambda_j) / prod_p h(lambda_p,lambda_j)
///       - t(lambda_j,mu_k) prod_m h(lambda_j,mu_m) / prod_p h(lambda_j,lambda_p)`.
pub fn ff_psi_matrix(
    model: &ModelSpec,
    mus: &[Complex64],
    lambdas: &[Complex64],
) -> Result<ComplexMatrix> {
    let k = Kernels::for_model(model);
    let n = mus.len();
    if lambdas.len() != n + 1 {
        return Err(Error::InvalidInput(format!(
            "field form factor needs |lambda| = |mu| + 1, got {} and {n}",
            lambdas.len()
        )));
    }
    ComplexMatrix::try_from_fn(n + 1, n, |j, kk| {
        let lj = lambdas[j];
        let mut p1 = Complex64::new(1.0, 0.0);
        let mut p2 = Complex64::new(1.0, 0.0);
        for &mu in mus {
            p1 *= k.h(mu, lj)?;
            p2 *= k.h(lj, mu)?;
        }
        for &lp in lambdas {
            p1 /= k.h(lp, lj)?;
            p2 /= k.h(lj, lp)?;
        }
        Ok(k.t(mus[kk], lj)? * p1 - k.t(lj, mus[kk])? * p2)
    })
}

/// The 1-based alternating delete-row sum `sum_l (-1)^{l+1} det S^{(l)}`
/// of an (N+1) x N matrix, by brute-force cofactor summation. Equals
/// `(-1)^N det(S_jk - S_{N+1,k})` as a pure matrix identity.
pub fn rank_one_alternating_sum(s: &ComplexMatrix) -> Result<Complex64> {
    let n = s.cols();
    if s.rows() != n + 1 {
        return Err(Error::InvalidInput("expected an (N+1) x N matrix".into()));
    }
    let mut total = Complex64::new(0.0, 0.0);
    for l in 0..=n {
        let sub = ComplexMatrix::from_fn(n, n, |j, k| {
            let row = if j < l { j } else { j + 1 };
            s[(row, k)]
        });
        let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
        total += sign * det(&sub)?;
    }
    Ok(total)
}

/// Reduced single determinant of the same matrix: det(S_jk - S_{N+1,k}).
pub fn rank_one_reduced(s: &ComplexMatrix) -> Result<crate::linalg::LogDet> {
    let n = s.cols();
    if s.rows() != n + 1 {
        return Err(Error::InvalidInput("expected an (N+1) x N matrix".into()));
    }
    let reduced = ComplexMatrix::from_fn(n, n, |j, k| s[(j, k)] - s[(n, k)]);
    log_det(&reduced)
}

/// Field form factor at the origin as a single determinant.
pub fn ff_psi_zero(
    model: &ModelSpec,
    mus: &BetheState,
    lambdas: &BetheState,
) -> Result<FormFactorResult> {
    let c = require_qnls(model)?;
    mus.require_onshell()?;
    lambdas.require_onshell()?;
    let k = Kernels::for_model(model);
    let mu = &mus.roots.values;
    let lam = &lambdas.roots.values;
    let n = mu.len();
    if lam.len() != n + 1 {
        return Err(Error::InvalidInput(format!(
            "field form factor needs |lambda| = |mu| + 1, got {} and {n}",
            lam.len()
        )));
    }
    let mut pref = -I * c.sqrt();
    for a in 0..n {
        for b in 0..a {
            pref *= k.g(mu[a], mu[b])?;
        }
    }
    for a in 0..=n {
        for b in 0..a {
            pref *= k.g(lam[b], lam[a])?;
        }
    }
    for a in 0..=n {
        for b in 0..=n {
            pref *= k.h(lam[a], lam[b])?;
        }
    }
    for &x in mu.iter().chain(lam.iter()) {
        pref *= vacuum_eigen(model, x)?.1;
    }
    let s = ff_psi_matrix(model, mu, lam)?;
    let d = rank_one_reduced(&s)?;
    Ok(FormFactorResult {
        value: pref * d.value,
        representation: Representation::SlavnovDet,
        condition: d.condition,
        notes: String::new(),
    })
}

/// Field form factor at space-time point (x, t): the origin value dressed
/// with the free phase `exp{ sum_k (i t mu_k^2 - i x mu_k) - sum_j (i t lambda_j^2 - i x lambda_j) }`.
pub fn ff_psi_xt(
    x: f64,
    t: f64,
    model: &ModelSpec,
    mus: &BetheState,
    lambdas: &BetheState,
) -> Result<FormFactorResult> {
    let base = ff_psi_zero(model, mus, lambdas)?;
    let mut exponent = Complex64::new(0.0, 0.0);
    for &mu in &mus.roots.values {
        exponent += I * t * mu * mu - I * x * mu;
    }
    for &lam in &lambdas.roots.values {
        exponent -= I * t * lam * lam - I * x * lam;
    }
    Ok(FormFactorResult {
        value: base.value * exponent.exp(),
        ..base
    })
}

fn shifted(set: &[Complex64], shift: Complex64, skip: Option<usize>) -> Vec<Complex64> {
    set.iter()
        .enumerate()
        .filter(|&(i, _)| Some(i) != skip)
        .map(|(_, &x)| x + shift)
        .collect()
}

/// Build the Omega matrix of the Sigma^alpha determinant representation.
fn omega_matrix(cfg: &SigmaConfig, c: f64) -> ComplexMatrix {
    let mu = &cfg.mus.values;
    let lam = &cfg.lambdas.values;
    let (nm, nl) = (mu.len(), lam.len());
    let n = nm + nl;
    let ea = cfg.alpha.exp();
    let half = I * (c / 2.0);
    let mut om = ComplexMatrix::zeros(n, n);
    for k in 0..nm {
        let mut a1 = shifted(mu, -half, Some(k));
        a1.extend(shifted(lam, half, None));
        let mut a2 = shifted(mu, half, Some(k));
        a2.extend(shifted(lam, -half, None));
        let s1 = elementary_symmetric_all(&a1);
        let s2 = elementary_symmetric_all(&a2);
        for j in 0..n {
            let e1 = s1.get(j).copied().unwrap_or_default();
            let e2 = s2.get(j).copied().unwrap_or_default();
            om[(j, k)] = e1 - ea * e2;
        }
    }
    for k in 0..nl {
        let mut a1 = shifted(mu, half, None);
        a1.extend(shifted(lam, -half, Some(k)));
        let mut a2 = shifted(mu, -half, None);
        a2.extend(shifted(lam, half, Some(k)));
        let s1 = elementary_symmetric_all(&a1);
        let s2 = elementary_symmetric_all(&a2);
        for j in 0..n {
            let e1 = s1.get(j).copied().unwrap_or_default();
            let e2 = s2.get(j).copied().unwrap_or_default();
            om[(j, nm + k)] = e1 - e2;
        }
    }
    om
}

fn omega_denominator(cfg: &SigmaConfig) -> Result<Complex64> {
    cfg.check_distinct()?;
    let mu = &cfg.mus.values;
    let lam = &cfg.lambdas.values;
    let mut den = vandermonde(mu) * vandermonde(lam);
    for &l in lam {
        for &m in mu {
            den *= l - m;
        }
    }
    if den.norm() < 1e-280 {
        return Err(Error::Coincidence(
            "vanishing Vandermonde/Cauchy denominator in Sigma^alpha".into(),
        ));
    }
    Ok(den)
}

/// Sigma^alpha through the big-Omega determinant (equal set sizes).
pub fn sigma_alpha_omega(cfg: &SigmaConfig, c: f64) -> Result<Complex64> {
    let den = omega_denominator(cfg)?;
    let om = omega_matrix(cfg, c);
    Ok(det(&om)? / den)
}

/// Sigma^0 for one extra lambda (N_lambda = N_mu + 1): the alpha -> 0 limit
/// of the Omega determinant, whose printed form degenerates; the finite
/// limit replaces the top row by ones.
pub fn sigma_zero_extra_lambda(
    mus: &RapiditySet,
    lambdas: &RapiditySet,
    c: f64,
) -> Result<Complex64> {
    if lambdas.len() != mus.len() + 1 {
        return Err(Error::InvalidInput(
            "sigma_zero_extra_lambda needs |lambda| = |mu| + 1".into(),
        ));
    }
    let cfg = SigmaConfig {
        alpha: Complex64::new(0.0, 0.0),
        mus: mus.clone(),
        lambdas: lambdas.clone(),
    };
    let den = omega_denominator(&cfg)?;
    let mut om = omega_matrix(&cfg, c);
    for k in 0..om.cols() {
        om[(0, k)] = Complex64::new(1.0, 0.0);
    }
    Ok(det(&om)? / den)
}

/// The N x N reduced matrix whose determinant gives Sigma^alpha for equal
/// set sizes: `B_jk = e^alpha V_j t(mu_k, lambda_j) + t(lambda_j, mu_k)`.
fn reduced_parts(
    cfg: &SigmaConfig,
    c: f64,
) -> Result<(Complex64, ComplexMatrix, ComplexMatrix)> {
    let k = Kernels::rational(c);
    let mu = &cfg.mus.values;
    let lam = &cfg.lambdas.values;
    let n = mu.len();
    if lam.len() != n {
        return Err(Error::InvalidInput("reduced Sigma^alpha needs equal sizes".into()));
    }
    let ea = cfg.alpha.exp();
    let mut e_part = ComplexMatrix::zeros(n, n);
    let mut a_part = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        let mut v = Complex64::new(1.0, 0.0);
        for m in 0..n {
            v *= k.h(mu[m], lam[j])? * k.h(lam[j], lam[m])?
                / (k.h(lam[j], mu[m])? * k.h(lam[m], lam[j])?);
        }
        for kk in 0..n {
            e_part[(j, kk)] = ea * v * k.t(mu[kk], lam[j])?;
            a_part[(j, kk)] = k.t(lam[j], mu[kk])?;
        }
    }
    let mut pref = Complex64::new(1.0, 0.0);
    for a in 0..n {
        for b in 0..a {
            pref *= k.g(lam[a], lam[b])? * k.g(mu[b], mu[a])?;
        }
    }
    for a in 0..n {
        for b in 0..n {
            pref *= k.h(lam[a], mu[b])?;
        }
    }
    Ok((pref, e_part, a_part))
}

/// Sigma^alpha through the reduced N x N determinant (equal set sizes).
pub fn sigma_alpha_reduced(cfg: &SigmaConfig, c: f64) -> Result<Complex64> {
    let (pref, e_part, a_part) = reduced_parts(cfg, c)?;
    let n = e_part.rows();
    let b = ComplexMatrix::from_fn(n, n, |j, k| e_part[(j, k)] + a_part[(j, k)]);
    Ok(pref * det(&b)?)
}

/// Field form factor through Sigma^0 with one extra lambda.
pub fn ff_psi_via_sigma(
    model: &ModelSpec,
    mus: &BetheState,
    lambdas: &BetheState,
) -> Result<FormFactorResult> {
    let c = require_qnls(model)?;
    mus.require_onshell()?;
    lambdas.require_onshell()?;
    let mut pref = -I * c.sqrt();
    for &x in mus.roots.values.iter().chain(lambdas.roots.values.iter()) {
        pref *= vacuum_eigen(model, x)?.1;
    }
    let sigma = sigma_zero_extra_lambda(&mus.roots, &lambdas.roots, c)?;
    Ok(FormFactorResult {
        value: pref * sigma,
        representation: Representation::SigmaOmega,
        condition: 1.0,
        notes: String::new(),
    })
}

/// Form factor of the number-of-particles operator on [0, x]:
/// `F_Q1 = [exp{i x sum(lambda_a - mu_a)} - 1] * d/dalpha Sigma^alpha |_{alpha=0}`,
/// with the alpha-derivative computed analytically (row-multilinearity of the
/// reduced determinant) and cross-checked against a central finite difference.
pub fn ff_q1(
    x: f64,
    model: &ModelSpec,
    mus: &BetheState,
    lambdas: &BetheState,
) -> Result<FormFactorResult> {
    let c = require_qnls(model)?;
    mus.require_onshell()?;
    lambdas.require_onshell()?;
    let mu = &mus.roots.values;
    let lam = &lambdas.roots.values;
    if mu.len() != lam.len() {
        return Err(Error::InvalidInput("ff_q1 needs equal set sizes".into()));
    }
    let diff: Complex64 = lam.iter().sum::<Complex64>() - mu.iter().sum::<Complex64>();
    let bracket = (I * x * diff).exp() - 1.0;
    // identical sets (or x = 0) force the bracket to vanish identically
    let same_sets = mu.len() == lam.len()
        && mu
            .iter()
            .zip(lam.iter())
            .all(|(a, b)| (a - b).norm() < 1e-13);
    if x == 0.0 || same_sets {
        return Ok(FormFactorResult {
            value: Complex64::new(0.0, 0.0),
            representation: Representation::SigmaReduced,
            condition: 1.0,
            notes: "vanishing bracket".into(),
        });
    }
    let cfg = SigmaConfig {
        alpha: Complex64::new(0.0, 0.0),
        mus: mus.roots.clone(),
        lambdas: lambdas.roots.clone(),
    };
    let (pref, e_part, a_part) = reduced_parts(&cfg, c)?;
    let n = e_part.rows();
    // analytic derivative: sum over rows with the e^alpha-bearing part
    // differentiated (d/dalpha e^alpha = e^alpha, evaluated at alpha = 0)
    let mut deriv = Complex64::new(0.0, 0.0);
    let mut worst_cond = 1.0_f64;
    for row in 0..n {
        let b = ComplexMatrix::from_fn(n, n, |j, k| {
            if j == row {
                e_part[(j, k)]
            } else {
                e_part[(j, k)] + a_part[(j, k)]
            }
        });
        let d = log_det(&b)?;
        worst_cond = worst_cond.max(d.condition);
        deriv += d.value;
    }
    let analytic = pref * deriv;
    // finite-difference cross-check
    let h = 1e-5;
    let mut cfg_p = cfg.clone();
    cfg_p.alpha = Complex64::new(h, 0.0);
    let mut cfg_m = cfg.clone();
    cfg_m.alpha = Complex64::new(-h, 0.0);
    let fd = (sigma_alpha_reduced(&cfg_p, c)? - sigma_alpha_reduced(&cfg_m, c)?) / (2.0 * h);
    let gap = (analytic - fd).norm();
    if gap > 1e-6 * analytic.norm().max(1e-12) {
        return Err(Error::Convention(format!(
            "alpha-derivative routes disagree: analytic {analytic}, finite-difference {fd}"
        )));
    }
    Ok(FormFactorResult {
        value: bracket * analytic,
        representation: Representation::SigmaReduced,
        condition: worst_cond,
        notes: format!("derivative cross-check gap {:.3e}", gap / analytic.norm().max(1e-300)),
    })
}

/// One step of the equivalence trace.
#[derive(Debug, Clone)]
pub struct TraceStep {
    pub label: String,
    pub rel_discrepancy: f64,
}

/// Numerical trace of every intermediate identity in the proof that the
/// Omega-determinant and reduced representations of Sigma^alpha agree.
#[derive(Debug, Clone)]
pub struct Theorem1Trace {
    pub steps: Vec<TraceStep>,
}

impl Theorem1Trace {
    pub fn max_discrepancy(&self) -> f64 {
        self.steps.iter().map(|s| s.rel_discrepancy).fold(0.0, f64::max)
    }
}

/// Run the equivalence trace at one configuration. `perturb` optionally
/// adds a deliberate error to one Omega entry (negative-control hook).
pub fn theorem1_trace(
    cfg: &SigmaConfig,
    c: f64,
    perturb: Option<(usize, usize, f64)>,
) -> Result<Theorem1Trace> {
    let mu = &cfg.mus.values;
    let lam = &cfg.lambdas.values;
    let n = mu.len();
    if lam.len() != n {
        return Err(Error::InvalidInput("theorem1_trace needs equal sizes".into()));
    }
    let den = omega_denominator(cfg)?;
    let ea = cfg.alpha.exp();
    let half = I * (c / 2.0);
    let nn = 2 * n;
    let mut om = omega_matrix(cfg, c);
    if let Some((i, j, eps)) = perturb {
        let scale = om.max_abs();
        om[(i, j)] += Complex64::new(eps, 0.0) * scale;
    }
    let mut steps = Vec::new();
    fn push(steps: &mut Vec<TraceStep>, label: &str, got: Complex64, expect: Complex64) {
        let rel = (got - expect).norm() / expect.norm().max(1e-300);
        steps.push(TraceStep {
            label: label.to_string(),
            rel_discrepancy: rel,
        });
    }

    // left-multiplier rows built from powers of p_j and q_j
    let ps: Vec<Complex64> = lam.iter().map(|&l| -l - half).collect();
    let qs: Vec<Complex64> = lam.iter().map(|&l| -l + half).collect();
    let mut u_mat = ComplexMatrix::zeros(nn, nn);
    for j in 0..n {
        for k in 0..nn {
            u_mat[(j, k)] = ps[j].powu((nn - k - 1) as u32);
            u_mat[(j + n, k)] = qs[j].powu((nn - k - 1) as u32);
        }
    }
    let det_u = det(&u_mat)?;
    let mut det_u_closed = vandermonde(&ps) * vandermonde(&qs);
    for &p in &ps {
        for &q in &qs {
            det_u_closed *= p - q;
        }
    }
    push(&mut steps, "det U closed form", det_u, det_u_closed);

    let uo = u_mat.mul(&om);
    let block = |r0: usize, c0: usize| {
        ComplexMatrix::from_fn(n, n, |i, j| uo[(r0 + i, c0 + j)])
    };
    let (pm, pl, qm, ql) = (block(0, 0), block(0, n), block(n, 0), block(n, n));

    // row proportionality between the lower-left and upper-left blocks
    let u_vec: Vec<Complex64> = (0..n)
        .map(|j| {
            let mut v = (-cfg.alpha).exp();
            for a in 0..n {
                v *= (lam[a] - lam[j] + I * c) / (lam[a] - lam[j] - I * c);
            }
            v
        })
        .collect();
    let mut prop_dev: f64 = 0.0;
    let mut prop_scale: f64 = 0.0;
    for j in 0..n {
        for k in 0..n {
            prop_dev = prop_dev.max((qm[(j, k)] + u_vec[j] * pm[(j, k)]).norm());
            prop_scale = prop_scale.max(qm[(j, k)].norm());
        }
    }
    steps.push(TraceStep {
        label: "QM = -u PM row proportionality".to_string(),
        rel_discrepancy: prop_dev / prop_scale.max(1e-300),
    });

    let det_uo = det(&uo)?;
    let shifted_block = ComplexMatrix::from_fn(n, n, |j, k| ql[(j, k)] + u_vec[j] * pl[(j, k)]);
    push(
        &mut steps,
        "block determinant factorization",
        det_uo,
        det(&pm)? * det(&shifted_block)?,
    );

    // W prod and the G matrix
    let mut w = Complex64::new(1.0, 0.0);
    for a in 0..n {
        for b in 0..n {
            w *= (lam[b] - mu[a]) * (lam[a] - lam[b] - I * c) * (lam[a] - lam[b] + I * c);
        }
    }
    for a in 0..n {
        for b in 0..a {
            w *= (mu[a] - mu[b]) * (lam[b] - lam[a]);
        }
    }
    let g_mat = ComplexMatrix::try_from_fn(n, n, |j, k| {
        let mut v = ea / (lam[j] - lam[k] - I * c) - 1.0 / (lam[j] - lam[k] + I * c);
        if j == k {
            let mut diag = Complex64::new(1.0, 0.0);
            for a in 0..n {
                if a != j {
                    diag *= lam[a] - lam[j];
                }
                diag /= mu[a] - lam[j];
            }
            let mut br1 = ea;
            let mut br2 = Complex64::new(1.0, 0.0);
            for a in 0..n {
                br1 *= (mu[a] - lam[j] + I * c) / (lam[a] - lam[j] + I * c);
                br2 *= (mu[a] - lam[j] - I * c) / (lam[a] - lam[j] - I * c);
            }
            v += diag * (br1 - br2);
        }
        Ok(v)
    })?;
    push(&mut steps, "elementary transformation to W det G", det_uo, w * det(&g_mat)?);

    let gamma = ComplexMatrix::try_from_fn(n, n, |j, k| {
        let mut v = 1.0 / (lam[j] - mu[k]);
        for a in 0..n {
            v *= lam[j] - mu[a];
            if a != j {
                v /= lam[j] - lam[a];
            }
        }
        Ok(v)
    })?;
    let det_gamma = det(&gamma)?;
    let mut det_gamma_closed = Complex64::new(1.0, 0.0);
    for a in 0..n {
        for b in 0..a {
            det_gamma_closed *= (mu[b] - mu[a]) / (lam[b] - lam[a]);
        }
    }
    push(&mut steps, "det Gamma closed form", det_gamma, det_gamma_closed);
    push(
        &mut steps,
        "det G via the Gamma ratio",
        det(&g_mat)?,
        det(&g_mat.mul(&gamma))? / det_gamma,
    );

    push(
        &mut steps,
        "Omega route equals reduced route",
        det(&om)? / den,
        sigma_alpha_reduced(cfg, c)?,
    );
    Ok(Theorem1Trace { steps })
}

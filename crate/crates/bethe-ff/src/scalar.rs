//! Scalar products: the Slavnov determinant representation, the
//! orthogonality matrix with its zero eigenvector, and the auxiliary
//! residue-sum identities used in its proof.

use crate::error::{Error, Result};
use crate::kernels::{ratio_r, vacuum_eigen, Kernels};
use crate::linalg::{log_det, ComplexMatrix};
use crate::model::{
    check_distinct, BetheState, FormFactorResult, ModelSpec, RapiditySet, Representation,
};
use num_complex::Complex64;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// The N x N Slavnov matrix
/// `M_jk = t(mu_k, lambda_j) - r(lambda_j) t(lambda_j, mu_k) prod_m f(lambda_j,mu_m)/f(mu_m,lambda_j)`.
///
/// `mus` must be on-shell; the lambda set is arbitrary (off-shell allowed).
pub fn slavnov_matrix(
    model: &ModelSpec,
    mus: &BetheState,
    lambdas: &RapiditySet,
) -> Result<ComplexMatrix> {
    mus.require_onshell()?;
    let k = Kernels::for_model(model);
    let mu = &mus.roots.values;
    let lam = &lambdas.values;
    if mu.len() != lam.len() {
        return Err(Error::InvalidInput(format!(
            "slavnov matrix needs equal set sizes, got {} and {}",
            mu.len(),
            lam.len()
        )));
    }
    let n = mu.len();
    let mut m = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        let r = ratio_r(model, lam[j])?;
        let mut prod = Complex64::new(1.0, 0.0);
        for &muv in mu {
            prod *= k.f(lam[j], muv)? / k.f(muv, lam[j])?;
        }
        for kk in 0..n {
            m[(j, kk)] = k.t(mu[kk], lam[j])? - r * k.t(lam[j], mu[kk])? * prod;
        }
    }
    Ok(m)
}

/// Scalar product of the on-shell `mus` dual state with the Bethe-Ansatz
/// vector built on `lambdas`:
/// `S_N = prod d(mu) d(lambda) * prod_{a,b} h(mu_a,lambda_b)
///        * prod_{a>b} g(lambda_a,lambda_b) g(mu_b,mu_a) * det M`.
pub fn scalar_product(
    model: &ModelSpec,
    mus: &BetheState,
    lambdas: &RapiditySet,
) -> Result<FormFactorResult> {
    let n = mus.roots.len();
    if n == 0 {
        return Ok(FormFactorResult {
            value: Complex64::new(1.0, 0.0),
            representation: Representation::SlavnovDet,
            condition: 1.0,
            notes: "empty sets: <0|0> = 1".into(),
        });
    }
    let m = slavnov_matrix(model, mus, lambdas)?;
    let d = log_det(&m)?;
    let pref = slavnov_prefactor(model, &mus.roots.values, &lambdas.values)?;
    Ok(FormFactorResult {
        value: pref * d.value,
        representation: Representation::SlavnovDet,
        condition: d.condition,
        notes: String::new(),
    })
}

/// The scalar-product prefactor (shared with the orthogonality scale).
pub fn slavnov_prefactor(
    model: &ModelSpec,
    mu: &[Complex64],
    lam: &[Complex64],
) -> Result<Complex64> {
    let k = Kernels::for_model(model);
    let n = mu.len();
    let mut pref = Complex64::new(1.0, 0.0);
    for &x in mu.iter().chain(lam.iter()) {
        pref *= vacuum_eigen(model, x)?.1;
    }
    for a in 0..n {
        for b in 0..n {
            pref *= k.h(mu[a], lam[b])?;
        }
    }
    for a in 0..n {
        for b in 0..a {
            pref *= k.g(lam[a], lam[b])? * k.g(mu[b], mu[a])?;
        }
    }
    Ok(pref)
}

/// The matrix the Slavnov matrix turns into when both sets are on-shell:
/// `Mt_jk = t(mu_k, lambda_j) + V_j t(lambda_j, mu_k)` with
/// `V_j = prod_m h(lambda_j,mu_m) h(lambda_m,lambda_j)
///        / (h(mu_m,lambda_j) h(lambda_j,lambda_m))`.
///
/// Defined (and singular) for fully generic parameters; no Bethe equations
/// are used.
pub fn orthogonality_matrix(
    model: &ModelSpec,
    mus: &RapiditySet,
    lambdas: &RapiditySet,
) -> Result<ComplexMatrix> {
    let k = Kernels::for_model(model);
    let mu = &mus.values;
    let lam = &lambdas.values;
    if mu.len() != lam.len() {
        return Err(Error::InvalidInput("orthogonality matrix needs equal sizes".into()));
    }
    let mut all = mu.clone();
    all.extend_from_slice(lam);
    check_distinct(&all, "orthogonality argument")?;
    let n = mu.len();
    ComplexMatrix::try_from_fn(n, n, |j, kk| {
        let mut v = Complex64::new(1.0, 0.0);
        for m in 0..n {
            v *= k.h(lam[j], mu[m])? * k.h(lam[m], lam[j])?
                / (k.h(mu[m], lam[j])? * k.h(lam[j], lam[m])?);
        }
        Ok(k.t(mu[kk], lam[j])? + v * k.t(lam[j], mu[kk])?)
    })
}

/// Right null vector of the orthogonality matrix:
/// `xi_k = prod_m phi(mu_k - lambda_m) / prod_{m!=k} phi(mu_k - mu_m)`.
pub fn zero_eigenvector(
    model: &ModelSpec,
    mus: &RapiditySet,
    lambdas: &RapiditySet,
) -> Result<Vec<Complex64>> {
    let k = Kernels::for_model(model);
    let mu = &mus.values;
    let lam = &lambdas.values;
    let n = mu.len();
    let mut out = Vec::with_capacity(n);
    for kk in 0..n {
        let mut num = Complex64::new(1.0, 0.0);
        let mut den = Complex64::new(1.0, 0.0);
        for m in 0..n {
            num *= k.phi(mu[kk] - lam[m]);
            if m != kk {
                let sep = k.phi(mu[kk] - mu[m]);
                if sep.norm() <= crate::model::eps_c(mu[kk], mu[m]) {
                    return Err(Error::Coincidence(format!(
                        "mu[{kk}] and mu[{m}] coincide in zero_eigenvector"
                    )));
                }
                den *= sep;
            }
        }
        out.push(num / den);
    }
    Ok(out)
}

/// Auxiliary residue sums: returns `(sum_form, closed_form)` of
/// `sum_k [ ((mu_k-lambda_j)(mu_k-lambda_j +/- ic))^{-1}
///          prod_m (mu_k-lambda_m) / prod_{m!=k} (mu_k-mu_m) ]`
/// against
/// `+/- (1/ic) prod_m (lambda_m-lambda_j +/- ic)/(mu_m-lambda_j +/- ic)`.
pub fn appendix_g_sums(
    mus: &RapiditySet,
    lambdas: &RapiditySet,
    j: usize,
    plus_sign: bool,
    c: f64,
) -> Result<(Complex64, Complex64)> {
    let mu = &mus.values;
    let lam = &lambdas.values;
    let n = mu.len();
    if lam.len() != n {
        return Err(Error::InvalidInput("appendix_g_sums needs equal sizes".into()));
    }
    if j >= n {
        return Err(Error::Index(format!("row index {j} out of range {n}")));
    }
    let s = if plus_sign { 1.0 } else { -1.0 };
    let shift = I * (s * c);
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 0..n {
        let d0 = mu[k] - lam[j];
        let d1 = d0 + shift;
        if d0.norm() <= crate::model::eps_c(mu[k], lam[j]) || d1.norm() <= crate::model::eps_c(mu[k], lam[j]) {
            return Err(Error::Coincidence(format!(
                "mu[{k}] hits lambda[{j}] or its ic-shift in appendix_g_sums"
            )));
        }
        let mut num = Complex64::new(1.0, 0.0);
        let mut den = Complex64::new(1.0, 0.0);
        for m in 0..n {
            num *= mu[k] - lam[m];
            if m != k {
                den *= mu[k] - mu[m];
            }
        }
        sum += num / (d0 * d1 * den);
    }
    let mut closed = s / (I * c);
    for m in 0..n {
        closed *= (lam[m] - lam[j] + shift) / (mu[m] - lam[j] + shift);
    }
    Ok((sum, closed))
}

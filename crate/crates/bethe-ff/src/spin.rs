//! Form factor of the local spin lowering operator on inhomogeneous spin
//! chains, as a ratio of two determinants, plus the dual determinant
//! representation of the scalar product it is built from.

use crate::bethe::theta_derivative;
use crate::error::{Error, Result};
use crate::kernels::{vacuum_eigen, zeta_points, Kernels};
use crate::linalg::{log_det, ComplexMatrix, LogDet};
use crate::model::{BetheState, FormFactorResult, ModelSpec, RapiditySet, Representation};
use num_complex::Complex64;

/// The Cauchy-type matrix `K_jk = 1 / phi(x_j - y_k)`, with `phi` the
/// model's bare two-particle function (identity or sinh).
pub fn cauchy_matrix(
    kernels: &Kernels,
    xs: &[Complex64],
    ys: &[Complex64],
) -> Result<ComplexMatrix> {
    ComplexMatrix::try_from_fn(xs.len(), ys.len(), |j, k| {
        let den = kernels.phi(xs[j] - ys[k]);
        if den.norm() < 1e-280 {
            return Err(Error::DivisionByZero(format!(
                "coinciding arguments x[{j}] and y[{k}] in Cauchy matrix"
            )));
        }
        Ok(1.0 / den)
    })
}

/// Closed form of the Cauchy determinant:
/// `det K = prod_{j>k} phi(x_j - x_k) phi(y_k - y_j) / prod_{j,k} phi(x_j - y_k)`.
pub fn cauchy_det_closed(
    kernels: &Kernels,
    xs: &[Complex64],
    ys: &[Complex64],
) -> Result<Complex64> {
    if xs.len() != ys.len() {
        return Err(Error::InvalidInput("Cauchy determinant needs square data".into()));
    }
    let n = xs.len();
    let mut num = Complex64::new(1.0, 0.0);
    for j in 0..n {
        for k in 0..j {
            num *= kernels.phi(xs[j] - xs[k]) * kernels.phi(ys[k] - ys[j]);
        }
    }
    let mut den = Complex64::new(1.0, 0.0);
    for &x in xs {
        for &y in ys {
            let d = kernels.phi(x - y);
            if d.norm() < 1e-280 {
                return Err(Error::DivisionByZero(
                    "coinciding arguments in Cauchy determinant".into(),
                ));
            }
            den *= d;
        }
    }
    Ok(num / den)
}

/// The matrix of transfer-eigenvalue derivatives
/// `T'_jk = d theta(nu_k | {mu}) / d mu_j`.
pub fn theta_jacobian(
    model: &ModelSpec,
    mus: &[Complex64],
    nus: &[Complex64],
) -> Result<ComplexMatrix> {
    ComplexMatrix::try_from_fn(mus.len(), nus.len(), |j, k| {
        theta_derivative(model, nus[k], mus, j)
    })
}

/// Scalar product of an on-shell state `{mu}` with a free set `{nu}` in the
/// dual determinant representation
/// `S = (-1)^n prod_j d(mu_j) det T' / det K`.
pub fn scalar_product_dual(
    model: &ModelSpec,
    mus: &BetheState,
    nus: &RapiditySet,
) -> Result<FormFactorResult> {
    mus.require_onshell()?;
    nus.check_distinct()?;
    let mu = &mus.roots.values;
    let n = mu.len();
    if nus.len() != n {
        return Err(Error::InvalidInput(format!(
            "scalar product needs equal set sizes, got {n} and {}",
            nus.len()
        )));
    }
    let kernels = Kernels::for_model(model);
    let tp = log_det(&theta_jacobian(model, mu, &nus.values)?)?;
    let kd = cauchy_det_closed(&kernels, mu, &nus.values)?;
    if kd.norm() < 1e-280 {
        return Err(Error::DivisionByZero("vanishing Cauchy determinant".into()));
    }
    let mut pref = if n % 2 == 0 {
        Complex64::new(1.0, 0.0)
    } else {
        Complex64::new(-1.0, 0.0)
    };
    for &m in mu {
        pref *= vacuum_eigen(model, m)?.1;
    }
    Ok(FormFactorResult {
        value: pref * tp.value / kd,
        representation: Representation::SpinDetRatio,
        condition: tp.condition,
        notes: "dual scalar-product representation".into(),
    })
}

/// Form factor of the spin lowering operator at site `m` (1-based) between
/// on-shell states with `|mu| = |lambda| + 1`, as a ratio of determinants.
pub fn ff_sigma_minus(
    model: &ModelSpec,
    mus: &BetheState,
    lambdas: &BetheState,
    m: usize,
) -> Result<FormFactorResult> {
    if !model.is_spin_chain() {
        return Err(Error::InvalidInput("spin form factor requires a spin chain".into()));
    }
    mus.require_onshell()?;
    lambdas.require_onshell()?;
    let sites = model.num_sites()?;
    if m == 0 || m > sites {
        return Err(Error::SiteRange { m, sites });
    }
    let mu = &mus.roots.values;
    let lam = &lambdas.roots.values;
    let np1 = mu.len();
    if np1 != lam.len() + 1 {
        return Err(Error::InvalidInput(format!(
            "spin lowering form factor needs |mu| = |lambda| + 1, got {np1} and {}",
            lam.len()
        )));
    }
    let kernels = Kernels::for_model(model);
    let zeta = zeta_points(model)?;
    let mut nus = Vec::with_capacity(np1);
    nus.push(zeta[m - 1]);
    nus.extend_from_slice(lam);

    let tp = log_det(&theta_jacobian(model, mu, &nus)?)?;
    let kd = cauchy_det_closed(&kernels, mu, &nus)?;
    if kd.norm() < 1e-280 {
        return Err(Error::DivisionByZero("vanishing Cauchy determinant".into()));
    }

    // sign (-1)^{|mu|} and the vacuum amplitudes
    let mut pref = if np1 % 2 == 0 {
        Complex64::new(1.0, 0.0)
    } else {
        Complex64::new(-1.0, 0.0)
    };
    for &x in mu {
        pref *= vacuum_eigen(model, x)?.1;
    }
    for &l in lam {
        pref *= crate::kernels::ratio_r(model, l)?;
    }
    let a_m = vacuum_eigen(model, zeta[m - 1])?.0;
    if a_m.norm() < 1e-280 {
        return Err(Error::DivisionByZero("vanishing vacuum amplitude at zeta".into()));
    }
    pref /= a_m;

    // site-dressing product of f-kernels over the zeta points left of m
    for &x in mu {
        for &z in zeta.iter().take(m - 1) {
            pref *= kernels.f(z, x)?;
        }
    }
    for &l in lam {
        for &z in zeta.iter().take(m) {
            pref /= kernels.f(z, l)?;
        }
    }

    Ok(FormFactorResult {
        value: pref * tp.value / kd,
        representation: Representation::SpinDetRatio,
        condition: tp.condition,
        notes: String::new(),
    })
}

/// Determinant of the Cauchy matrix by elimination, exposed for tests.
pub fn cauchy_det_lu(
    kernels: &Kernels,
    xs: &[Complex64],
    ys: &[Complex64],
) -> Result<LogDet> {
    log_det(&cauchy_matrix(kernels, xs, ys)?)
}

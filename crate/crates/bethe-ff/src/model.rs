//! Model definitions and shared domain types.

use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Residual threshold below which a state counts as on-shell.
pub const ONSHELL_TOL: f64 = 1e-12;

/// Serde helpers: a complex number is always serialized as `[re, im]`.
pub mod cpx {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        [v.re, v.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(Complex64::new(re, im))
    }
}

/// Serde helpers: a sequence of complex numbers as `[[re, im], ...]`.
pub mod cpx_vec {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Complex64>, D::Error> {
        Ok(<Vec<[f64; 2]>>::deserialize(d)?
            .into_iter()
            .map(|[re, im]| Complex64::new(re, im))
            .collect())
    }
}

/// Which integrable model a computation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    /// Quantum nonlinear Schrödinger (Lieb–Liniger) gas in a box of length L.
    Qnls,
    /// Isotropic spin-1/2 Heisenberg chain (rational kernels, c fixed to 1).
    Xxx,
    /// Anisotropic spin-1/2 Heisenberg chain (trigonometric kernels).
    Xxz,
}

/// A model together with its physical parameters.
///
/// QNLS uses `L` and `c`; XXX uses `M` and `xi` (with c = 1); XXZ uses
/// `M`, `gamma` and `xi`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelSpec {
    pub kind: ModelKind,
    /// Box length (QNLS only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    #[serde(rename = "L")]
    pub box_length: Option<f64>,
    /// Coupling constant (QNLS; XXX implicitly uses 1).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    /// Anisotropy parameter in (0, pi) (XXZ only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    /// Number of chain sites (spin chains only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    #[serde(rename = "M")]
    pub sites: Option<usize>,
    /// Per-site inhomogeneities (spin chains only).
    #[serde(default, skip_serializing_if = "Option::is_none", with = "cpx_vec_opt")]
    pub xi: Option<Vec<Complex64>>,
}

mod cpx_vec_opt {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<Vec<Complex64>>, s: S) -> Result<S::Ok, S::Error> {
        v.as_ref()
            .map(|v| v.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>())
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> Result<Option<Vec<Complex64>>, D::Error> {
        Ok(<Option<Vec<[f64; 2]>>>::deserialize(d)?
            .map(|v| v.into_iter().map(|[re, im]| Complex64::new(re, im)).collect()))
    }
}

impl ModelSpec {
    /// QNLS model with box length `l` and coupling `c`.
    pub fn qnls(l: f64, c: f64) -> Self {
        ModelSpec {
            kind: ModelKind::Qnls,
            box_length: Some(l),
            c: Some(c),
            gamma: None,
            sites: None,
            xi: None,
        }
    }

    /// XXX chain with inhomogeneities `xi` (c = 1).
    pub fn xxx(xi: Vec<Complex64>) -> Self {
        ModelSpec {
            kind: ModelKind::Xxx,
            box_length: None,
            c: None,
            gamma: None,
            sites: Some(xi.len()),
            xi: Some(xi),
        }
    }

    /// XXZ chain with anisotropy `gamma` and inhomogeneities `xi`.
    pub fn xxz(gamma: f64, xi: Vec<Complex64>) -> Self {
        ModelSpec {
            kind: ModelKind::Xxz,
            box_length: None,
            c: None,
            gamma: Some(gamma),
            sites: Some(xi.len()),
            xi: Some(xi),
        }
    }

    /// Coupling constant actually in force (XXX pins c = 1).
    pub fn coupling(&self) -> f64 {
        match self.kind {
            ModelKind::Xxx => 1.0,
            _ => self.c.unwrap_or(1.0),
        }
    }

    /// Inhomogeneity list (spin chains); error for QNLS.
    pub fn inhomogeneities(&self) -> Result<&[Complex64]> {
        self.xi
            .as_deref()
            .ok_or_else(|| Error::InvalidInput("model has no inhomogeneities (xi)".into()))
    }

    /// Number of chain sites; error for QNLS.
    pub fn num_sites(&self) -> Result<usize> {
        self.sites
            .ok_or_else(|| Error::InvalidInput("model has no site count (M)".into()))
    }

    /// True for spin chains (finite-dimensional oracle available).
    pub fn is_spin_chain(&self) -> bool {
        matches!(self.kind, ModelKind::Xxx | ModelKind::Xxz)
    }

    /// Check all structural invariants for the given kind.
    pub fn validate(&self) -> Result<()> {
        match self.kind {
            ModelKind::Qnls => {
                let l = self
                    .box_length
                    .ok_or_else(|| Error::InvalidInput("qnls requires L".into()))?;
                let c = self
                    .c
                    .ok_or_else(|| Error::InvalidInput("qnls requires c".into()))?;
                if !(l > 0.0) {
                    return Err(Error::InvalidInput(format!("L must be > 0, got {l}")));
                }
                if !(c > 0.0) {
                    return Err(Error::InvalidInput(format!(
                        "c must be > 0 (repulsive regime only), got {c}"
                    )));
                }
            }
            ModelKind::Xxx | ModelKind::Xxz => {
                let m = self
                    .sites
                    .ok_or_else(|| Error::InvalidInput("spin chain requires M".into()))?;
                let xi = self.inhomogeneities()?;
                if xi.len() != m {
                    return Err(Error::InvalidInput(format!(
                        "xi length {} does not match M = {m}",
                        xi.len()
                    )));
                }
                if m == 0 {
                    return Err(Error::InvalidInput("M must be positive".into()));
                }
                check_distinct(xi, "xi")?;
                if self.kind == ModelKind::Xxz {
                    let g = self
                        .gamma
                        .ok_or_else(|| Error::InvalidInput("xxz requires gamma".into()))?;
                    if !(g > 0.0 && g < std::f64::consts::PI) {
                        return Err(Error::InvalidInput(format!(
                            "gamma must lie in (0, pi), got {g}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Coincidence tolerance for a pair of arguments.
pub fn eps_c(a: Complex64, b: Complex64) -> f64 {
    1e-10 * 1.0_f64.max(a.norm()).max(b.norm())
}

/// Reject sequences with entries closer than the coincidence tolerance.
pub fn check_distinct(values: &[Complex64], what: &str) -> Result<()> {
    for i in 0..values.len() {
        for j in 0..i {
            let sep = (values[i] - values[j]).norm();
            if sep <= eps_c(values[i], values[j]) {
                return Err(Error::Coincidence(format!(
                    "{what}[{j}] and {what}[{i}] coincide (separation {sep:.3e})"
                )));
            }
        }
    }
    Ok(())
}

/// An ordered set of complex rapidities.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RapiditySet {
    #[serde(with = "cpx_vec")]
    pub values: Vec<Complex64>,
    #[serde(default)]
    pub label: String,
}

impl RapiditySet {
    pub fn new(values: Vec<Complex64>, label: impl Into<String>) -> Self {
        RapiditySet {
            values,
            label: label.into(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Enforce pairwise distinctness beyond the coincidence tolerance.
    pub fn check_distinct(&self) -> Result<()> {
        check_distinct(&self.values, if self.label.is_empty() { "rapidity" } else { &self.label })
    }
}

/// A rapidity set certified on-shell, with its certification residual.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BetheState {
    pub model: ModelSpec,
    pub roots: RapiditySet,
    /// Quantum numbers used for seeding (empty for seed-driven solves).
    #[serde(default)]
    pub quantum_numbers: Vec<f64>,
    /// Max modulus of the Bethe-equation deviation over all roots.
    pub residual: f64,
}

impl BetheState {
    /// Error unless the certification residual is below the on-shell threshold.
    pub fn require_onshell(&self) -> Result<()> {
        if self.residual <= ONSHELL_TOL {
            Ok(())
        } else {
            Err(Error::OffShell {
                residual: self.residual,
                threshold: ONSHELL_TOL,
            })
        }
    }
}

/// Which representation produced a form-factor value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Representation {
    SlavnovDet,
    SigmaOmega,
    SigmaReduced,
    SpinDetRatio,
    Oracle,
}

/// A complex result together with provenance and conditioning metadata.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FormFactorResult {
    #[serde(with = "cpx")]
    pub value: Complex64,
    pub representation: Representation,
    /// Pivot-ratio condition estimate of the determinant(s) involved (>= 1).
    pub condition: f64,
    #[serde(default)]
    pub notes: String,
}

/// Arguments of the twist-parameter functions Sigma^alpha.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SigmaConfig {
    #[serde(with = "cpx")]
    pub alpha: Complex64,
    pub mus: RapiditySet,
    pub lambdas: RapiditySet,
}

impl SigmaConfig {
    /// All mu and lambda values must be pairwise distinct across the union.
    pub fn check_distinct(&self) -> Result<()> {
        let mut all = self.mus.values.clone();
        all.extend_from_slice(&self.lambdas.values);
        check_distinct(&all, "sigma argument")
    }
}

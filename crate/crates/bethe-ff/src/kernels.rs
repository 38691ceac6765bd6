//! R-matrix kernel functions (rational and trigonometric variants),
//! vacuum eigenvalues and their derivatives.

use crate::error::{Error, Result};
use crate::model::{eps_c, ModelKind, ModelSpec};
use num_complex::Complex64;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Which of the four kernel functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    F,
    G,
    H,
    T,
}

impl std::str::FromStr for Which {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "f" => Ok(Which::F),
            "g" => Ok(Which::G),
            "h" => Ok(Which::H),
            "t" => Ok(Which::T),
            _ => Err(Error::InvalidInput(format!("unknown kernel {s:?}"))),
        }
    }
}

/// Kernel family of one model: rational (QNLS, XXX) or trigonometric (XXZ).
#[derive(Debug, Clone, Copy)]
pub struct Kernels {
    trig: bool,
    c: f64,
    gamma: f64,
}

impl Kernels {
    pub fn for_model(model: &ModelSpec) -> Kernels {
        match model.kind {
            ModelKind::Xxz => Kernels {
                trig: true,
                c: 0.0,
                gamma: model.gamma.unwrap_or(f64::NAN),
            },
            _ => Kernels {
                trig: false,
                c: model.coupling(),
                gamma: 0.0,
            },
        }
    }

    /// Rational kernels with the given coupling.
    pub fn rational(c: f64) -> Kernels {
        Kernels {
            trig: false,
            c,
            gamma: 0.0,
        }
    }

    /// Trigonometric kernels with the given anisotropy.
    pub fn trigonometric(gamma: f64) -> Kernels {
        Kernels {
            trig: true,
            c: 0.0,
            gamma,
        }
    }

    pub fn is_trigonometric(&self) -> bool {
        self.trig
    }

    /// The "rapidity-difference" function: identity (rational) or sinh (trig).
    pub fn phi(&self, z: Complex64) -> Complex64 {
        if self.trig {
            z.sinh()
        } else {
            z
        }
    }

    fn check_pole(&self, mu: Complex64, lam: Complex64) -> Result<()> {
        let sep = self.phi(mu - lam).norm();
        let tol = eps_c(mu, lam);
        if sep <= tol {
            Err(Error::Pole {
                context: format!("arguments {mu} and {lam}"),
                separation: sep,
                tolerance: tol,
            })
        } else {
            Ok(())
        }
    }

    /// f(mu, lambda): regular part of the R-matrix weight.
    pub fn f(&self, mu: Complex64, lam: Complex64) -> Result<Complex64> {
        self.check_pole(mu, lam)?;
        let d = mu - lam;
        Ok(if self.trig {
            (d + I * self.gamma).sinh() / d.sinh()
        } else {
            (d + I * self.c) / d
        })
    }

    /// g(mu, lambda): pole part; antisymmetric.
    pub fn g(&self, mu: Complex64, lam: Complex64) -> Result<Complex64> {
        self.check_pole(mu, lam)?;
        let d = mu - lam;
        Ok(if self.trig {
            I * self.gamma.sin() / d.sinh()
        } else {
            I * self.c / d
        })
    }

    /// h(mu, lambda) = f/g in closed form; h(lambda, lambda) = 1.
    pub fn h(&self, mu: Complex64, lam: Complex64) -> Result<Complex64> {
        let d = mu - lam;
        Ok(if self.trig {
            (d + I * self.gamma).sinh() / (I * self.gamma.sin())
        } else {
            (d + I * self.c) / (I * self.c)
        })
    }

    /// t(mu, lambda) = g/h in closed form.
    pub fn t(&self, mu: Complex64, lam: Complex64) -> Result<Complex64> {
        self.check_pole(mu, lam)?;
        let d = mu - lam;
        if self.trig {
            let shifted = (d + I * self.gamma).sinh();
            if shifted.norm() <= eps_c(mu, lam) {
                return Err(Error::Pole {
                    context: format!("t denominator sinh(mu-lambda+i*gamma) at {mu}, {lam}"),
                    separation: shifted.norm(),
                    tolerance: eps_c(mu, lam),
                });
            }
            let s = self.gamma.sin();
            Ok(-(s * s) / (d.sinh() * shifted))
        } else {
            let shifted = d + I * self.c;
            if shifted.norm() <= eps_c(mu, lam) {
                return Err(Error::Pole {
                    context: format!("t denominator (mu-lambda+i*c) at {mu}, {lam}"),
                    separation: shifted.norm(),
                    tolerance: eps_c(mu, lam),
                });
            }
            Ok(-(self.c * self.c) / (d * shifted))
        }
    }

    /// Evaluate one of the four kernels by tag.
    pub fn eval(&self, which: Which, mu: Complex64, lam: Complex64) -> Result<Complex64> {
        match which {
            Which::F => self.f(mu, lam),
            Which::G => self.g(mu, lam),
            Which::H => self.h(mu, lam),
            Which::T => self.t(mu, lam),
        }
    }

    /// d f(x, y) / d y  (the derivative with respect to the second argument).
    pub fn df_dsecond(&self, x: Complex64, y: Complex64) -> Result<Complex64> {
        self.check_pole(x, y)?;
        let d = x - y;
        Ok(if self.trig {
            I * self.gamma.sin() / (d.sinh() * d.sinh())
        } else {
            I * self.c / (d * d)
        })
    }

    /// d f(x, y) / d x = -d f(x, y) / d y.
    pub fn df_dfirst(&self, x: Complex64, y: Complex64) -> Result<Complex64> {
        Ok(-self.df_dsecond(x, y)?)
    }

    /// d log f(x, y) / d x (used by the Newton solvers).
    pub fn dlogf_dfirst(&self, x: Complex64, y: Complex64) -> Result<Complex64> {
        self.check_pole(x, y)?;
        let d = x - y;
        Ok(if self.trig {
            (d + I * self.gamma).cosh() / (d + I * self.gamma).sinh() - d.cosh() / d.sinh()
        } else {
            1.0 / (d + I * self.c) - 1.0 / d
        })
    }
}

/// The per-site zeros of d(lambda) for a spin chain: the points at which
/// local operators become expressible through monodromy entries.
pub fn zeta_points(model: &ModelSpec) -> Result<Vec<Complex64>> {
    let xi = model.inhomogeneities()?;
    match model.kind {
        ModelKind::Xxx => {
            let c = model.coupling();
            Ok(xi.iter().map(|&x| x - I * (c / 2.0)).collect())
        }
        ModelKind::Xxz => {
            let g = model
                .gamma
                .ok_or_else(|| Error::InvalidInput("xxz requires gamma".into()))?;
            // cosh(z + i pi/2) = i sinh(z) vanishes at z = 0
            Ok(xi
                .iter()
                .map(|&x| x - I * (g / 2.0) + I * (std::f64::consts::PI / 2.0))
                .collect())
        }
        ModelKind::Qnls => Err(Error::InvalidInput(
            "zeta points are defined for spin chains only".into(),
        )),
    }
}

/// Vacuum eigenvalues (a(lambda), d(lambda)) of the diagonal monodromy
/// entries on the pseudovacuum, in the convention pinned empirically by
/// the oracle (XXZ carries an overall i^M from the L-operator).
pub fn vacuum_eigen(model: &ModelSpec, lambda: Complex64) -> Result<(Complex64, Complex64)> {
    match model.kind {
        ModelKind::Qnls => {
            let l = model
                .box_length
                .ok_or_else(|| Error::InvalidInput("qnls requires L".into()))?;
            let a = (-I * lambda * (l / 2.0)).exp();
            Ok((a, 1.0 / a))
        }
        ModelKind::Xxx => {
            let c = model.coupling();
            let xi = model.inhomogeneities()?;
            let mut a = Complex64::new(1.0, 0.0);
            let mut d = Complex64::new(1.0, 0.0);
            for &x in xi {
                a *= lambda - x - I * (c / 2.0);
                d *= lambda - x + I * (c / 2.0);
            }
            Ok((a, d))
        }
        ModelKind::Xxz => {
            let g = model
                .gamma
                .ok_or_else(|| Error::InvalidInput("xxz requires gamma".into()))?;
            let xi = model.inhomogeneities()?;
            // i^M from the overall i of each local L-operator.
            let mut a = I.powu(xi.len() as u32);
            let mut d = a;
            for &x in xi {
                a *= (lambda - x - I * (g / 2.0)).cosh();
                d *= (lambda - x + I * (g / 2.0)).cosh();
            }
            Ok((a, d))
        }
    }
}

/// r(lambda) = a(lambda)/d(lambda); convention prefactors cancel.
pub fn ratio_r(model: &ModelSpec, lambda: Complex64) -> Result<Complex64> {
    let (a, d) = vacuum_eigen(model, lambda)?;
    if d.norm() < 1e-250 {
        return Err(Error::DivisionByZero(format!(
            "d({lambda}) vanishes; r(lambda) undefined"
        )));
    }
    Ok(a / d)
}

/// d log r(lambda) / d lambda (analytic; used by the spin-chain solver).
pub fn dlog_r(model: &ModelSpec, lambda: Complex64) -> Result<Complex64> {
    match model.kind {
        ModelKind::Qnls => {
            let l = model
                .box_length
                .ok_or_else(|| Error::InvalidInput("qnls requires L".into()))?;
            Ok(-I * l)
        }
        ModelKind::Xxx => {
            let c = model.coupling();
            let mut s = Complex64::new(0.0, 0.0);
            for &x in model.inhomogeneities()? {
                s += 1.0 / (lambda - x - I * (c / 2.0)) - 1.0 / (lambda - x + I * (c / 2.0));
            }
            Ok(s)
        }
        ModelKind::Xxz => {
            let g = model
                .gamma
                .ok_or_else(|| Error::InvalidInput("xxz requires gamma".into()))?;
            let mut s = Complex64::new(0.0, 0.0);
            for &x in model.inhomogeneities()? {
                s += (lambda - x - I * (g / 2.0)).tanh() - (lambda - x + I * (g / 2.0)).tanh();
            }
            Ok(s)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c1() -> Kernels {
        Kernels::rational(1.0)
    }

    #[test]
    fn rational_values_at_i_zero() {
        let k = c1();
        let mu = I;
        let z = Complex64::new(0.0, 0.0);
        assert!((k.f(mu, z).unwrap() - 2.0).norm() < 1e-15);
        assert!((k.g(mu, z).unwrap() - 1.0).norm() < 1e-15);
        assert!((k.h(mu, z).unwrap() - 2.0).norm() < 1e-15);
        assert!((k.t(mu, z).unwrap() - 0.5).norm() < 1e-15);
        // antisymmetry of g
        assert!((k.g(z, mu).unwrap() + 1.0).norm() < 1e-15);
    }

    #[test]
    fn trig_f_at_quarter_period() {
        let k = Kernels::trigonometric(std::f64::consts::PI / 2.0);
        // mu - lambda = i*pi/4: sin(3pi/4)/sin(pi/4) = 1
        let v = k.f(I * (std::f64::consts::PI / 4.0), Complex64::new(0.0, 0.0)).unwrap();
        assert!((v - 1.0).norm() < 1e-14);
    }

    #[test]
    fn h_at_equal_arguments_is_one() {
        let z = Complex64::new(0.37, -0.21);
        assert!((c1().h(z, z).unwrap() - 1.0).norm() < 1e-15);
        let kt = Kernels::trigonometric(0.9);
        assert!((kt.h(z, z).unwrap() - 1.0).norm() < 1e-15);
    }

    #[test]
    fn pole_rejection() {
        let k = c1();
        let z = Complex64::new(0.5, 0.5);
        assert!(matches!(k.g(z, z), Err(Error::Pole { .. })));
        assert!(matches!(k.t(z, z + Complex64::new(1e-12, 0.0)), Err(Error::Pole { .. })));
    }

    #[test]
    fn kernel_identities_random() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for trig in [false, true] {
            let k = if trig {
                Kernels::trigonometric(1.1)
            } else {
                Kernels::rational(1.7)
            };
            for _ in 0..200 {
                let mu = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                let lam = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                if k.phi(mu - lam).norm() < 1e-3 {
                    continue;
                }
                let (f, g, h, t) = (
                    k.f(mu, lam).unwrap(),
                    k.g(mu, lam).unwrap(),
                    k.h(mu, lam).unwrap(),
                    k.t(mu, lam).unwrap(),
                );
                assert!((h * g - f).norm() <= 1e-14 * f.norm().max(1.0));
                assert!((t * h - g).norm() <= 1e-14 * g.norm().max(1.0));
                assert!((g + k.g(lam, mu).unwrap()).norm() <= 1e-14 * g.norm());
            }
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let step = 1e-6;
        for k in [Kernels::rational(1.3), Kernels::trigonometric(0.8)] {
            let x = Complex64::new(0.4, 0.1);
            let y = Complex64::new(-0.2, 0.35);
            let fd = (k.f(x, y + step).unwrap() - k.f(x, y - step).unwrap()) / (2.0 * step);
            let an = k.df_dsecond(x, y).unwrap();
            assert!((fd - an).norm() <= 1e-8 * an.norm().max(1.0));
            let fd1 = (k.f(x + step, y).unwrap() - k.f(x - step, y).unwrap()) / (2.0 * step);
            assert!((fd1 - k.df_dfirst(x, y).unwrap()).norm() <= 1e-8 * an.norm().max(1.0));
            let fdl = (k.f(x + step, y).unwrap().ln() - k.f(x - step, y).unwrap().ln())
                / (2.0 * step);
            assert!((fdl - k.dlogf_dfirst(x, y).unwrap()).norm() <= 1e-8);
        }
    }

    #[test]
    fn qnls_vacuum() {
        let m = ModelSpec::qnls(2.0 * std::f64::consts::PI, 1.0);
        let (a, d) = vacuum_eigen(&m, Complex64::new(1.0, 0.0)).unwrap();
        assert!((a - (-1.0)).norm() < 1e-12);
        assert!((d - (-1.0)).norm() < 1e-12);
        let r = ratio_r(&m, Complex64::new(1.0, 0.0)).unwrap();
        assert!((r - 1.0).norm() < 1e-12);
        assert!((ratio_r(&m, Complex64::new(0.0, 0.0)).unwrap() - 1.0).norm() < 1e-15);
    }

    #[test]
    fn xxx_vacuum_root() {
        let m = ModelSpec::xxx(vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]);
        // a(lambda) vanishes at lambda = i/2 when some xi = 0
        let (a, _) = vacuum_eigen(&m, I * 0.5).unwrap();
        assert!(a.norm() < 1e-15);
    }

    #[test]
    fn dlog_r_matches_finite_difference() {
        let step = 1e-6;
        let models = [
            ModelSpec::qnls(10.0, 1.0),
            ModelSpec::xxx(vec![Complex64::new(0.05, 0.0), Complex64::new(-0.05, 0.0)]),
            ModelSpec::xxz(
                std::f64::consts::PI / 3.0,
                vec![Complex64::new(0.02, 0.0), Complex64::new(-0.03, 0.0)],
            ),
        ];
        for m in &models {
            let z = Complex64::new(0.3, 0.12);
            let fd = (ratio_r(m, z + step).unwrap().ln() - ratio_r(m, z - step).unwrap().ln())
                / (2.0 * step);
            let an = dlog_r(m, z).unwrap();
            assert!((fd - an).norm() < 1e-7, "model {:?}", m.kind);
        }
    }
}

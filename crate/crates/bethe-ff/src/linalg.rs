//! Dense complex matrices, log-magnitude/phase determinants, linear solves,
//! elementary symmetric polynomials and Vandermonde products.

use crate::error::{Error, Result};
use num_complex::Complex64;

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Build from an entry function; the function may fail (e.g. kernel poles).
    pub fn try_from_fn(
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> Result<Complex64>,
    ) -> Result<Self> {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j)?;
            }
        }
        Ok(m)
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        Self::try_from_fn(rows, cols, |i, j| Ok(f(i, j))).expect("infallible entries")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn mul(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in matrix product");
        let mut out = ComplexMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn sub(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a -= b;
        }
        out
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .map(|(a, x)| a * x)
                    .sum::<Complex64>()
            })
            .collect()
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Determinant in log-magnitude/phase form with a pivot-ratio condition
/// estimate. An exact zero is reported as `log_magnitude = -inf`.
#[derive(Debug, Clone, Copy)]
pub struct LogDet {
    /// ln |det|.
    pub log_magnitude: f64,
    /// Unit-modulus phase factor (det / |det|); 1 for a zero determinant.
    pub phase: Complex64,
    /// Reconstructed complex value when representable in double precision.
    pub value: Complex64,
    /// Ratio of extreme pivot magnitudes (>= 1; inf when singular).
    pub condition: f64,
}

/// Determinant via pivoted (partial-pivoting) triangular factorization with
/// permutation-sign tracking.
pub fn log_det(m: &ComplexMatrix) -> Result<LogDet> {
    if !m.is_square() {
        return Err(Error::InvalidInput(format!(
            "determinant of non-square {}x{} matrix",
            m.rows, m.cols
        )));
    }
    let n = m.rows;
    if n == 0 {
        return Ok(LogDet {
            log_magnitude: 0.0,
            phase: Complex64::new(1.0, 0.0),
            value: Complex64::new(1.0, 0.0),
            condition: 1.0,
        });
    }
    let mut a = m.clone();
    let mut sign = 1.0_f64;
    let mut log_mag = 0.0_f64;
    let mut phase = Complex64::new(1.0, 0.0);
    let mut pmax = 0.0_f64;
    let mut pmin = f64::INFINITY;
    for k in 0..n {
        // pivot: largest modulus in column k at or below row k
        let (piv_row, piv_abs) = (k..n)
            .map(|i| (i, a[(i, k)].norm()))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .unwrap();
        if piv_abs == 0.0 {
            return Ok(LogDet {
                log_magnitude: f64::NEG_INFINITY,
                phase: Complex64::new(1.0, 0.0),
                value: Complex64::new(0.0, 0.0),
                condition: f64::INFINITY,
            });
        }
        if piv_row != k {
            for j in 0..n {
                let tmp = a[(k, j)];
                a[(k, j)] = a[(piv_row, j)];
                a[(piv_row, j)] = tmp;
            }
            sign = -sign;
        }
        let p = a[(k, k)];
        pmax = pmax.max(piv_abs);
        pmin = pmin.min(piv_abs);
        log_mag += piv_abs.ln();
        phase *= p / piv_abs;
        for i in (k + 1)..n {
            let factor = a[(i, k)] / p;
            a[(i, k)] = factor;
            for j in (k + 1)..n {
                let akj = a[(k, j)];
                a[(i, j)] -= factor * akj;
            }
        }
    }
    phase *= sign;
    let value = if log_mag < 700.0 {
        log_mag.exp() * phase
    } else {
        Complex64::new(f64::INFINITY, 0.0) * phase
    };
    Ok(LogDet {
        log_magnitude: log_mag,
        phase,
        value,
        condition: pmax / pmin,
    })
}

/// Convenience: the plain determinant value.
pub fn det(m: &ComplexMatrix) -> Result<Complex64> {
    Ok(log_det(m)?.value)
}

/// Solve A x = b by pivoted LU (A square, well-determined systems only).
pub fn solve(a: &ComplexMatrix, b: &[Complex64]) -> Result<Vec<Complex64>> {
    if !a.is_square() || a.rows != b.len() {
        return Err(Error::InvalidInput("solve: dimension mismatch".into()));
    }
    let n = a.rows;
    let mut m = a.clone();
    let mut x: Vec<Complex64> = b.to_vec();
    for k in 0..n {
        let (piv_row, piv_abs) = (k..n)
            .map(|i| (i, m[(i, k)].norm()))
            .max_by(|u, v| u.1.total_cmp(&v.1))
            .unwrap();
        if piv_abs == 0.0 {
            return Err(Error::DivisionByZero("singular matrix in solve".into()));
        }
        if piv_row != k {
            for j in 0..n {
                let tmp = m[(k, j)];
                m[(k, j)] = m[(piv_row, j)];
                m[(piv_row, j)] = tmp;
            }
            x.swap(k, piv_row);
        }
        let p = m[(k, k)];
        for i in (k + 1)..n {
            let factor = m[(i, k)] / p;
            for j in (k + 1)..n {
                let mkj = m[(k, j)];
                m[(i, j)] -= factor * mkj;
            }
            let xk = x[k];
            x[i] -= factor * xk;
        }
    }
    for i in (0..n).rev() {
        let mut s = x[i];
        for j in (i + 1)..n {
            s -= m[(i, j)] * x[j];
        }
        x[i] = s / m[(i, i)];
    }
    Ok(x)
}

/// Cofactor-expansion determinant; exponential cost, test oracle for n <= 7.
pub fn det_cofactor(m: &ComplexMatrix) -> Result<Complex64> {
    if !m.is_square() {
        return Err(Error::InvalidInput("cofactor determinant needs a square matrix".into()));
    }
    if m.rows > 8 {
        return Err(Error::Resource(format!(
            "cofactor expansion limited to n <= 8, got {}",
            m.rows
        )));
    }
    fn go(m: &ComplexMatrix, rows: &[usize], cols: &[usize]) -> Complex64 {
        if rows.is_empty() {
            return Complex64::new(1.0, 0.0);
        }
        let r = rows[0];
        let rest: Vec<usize> = rows[1..].to_vec();
        let mut acc = Complex64::new(0.0, 0.0);
        for (pos, &c) in cols.iter().enumerate() {
            let sub_cols: Vec<usize> = cols
                .iter()
                .copied()
                .filter(|&cc| cc != c)
                .collect();
            let sign = if pos % 2 == 0 { 1.0 } else { -1.0 };
            acc += sign * m[(r, c)] * go(m, &rest, &sub_cols);
        }
        acc
    }
    let idx: Vec<usize> = (0..m.rows).collect();
    Ok(go(m, &idx, &idx))
}

/// Elementary symmetric polynomial sigma_k of the given arguments: the
/// coefficient of x^{n-k} in prod_m (x + x_m), by the stable product
/// recurrence.
pub fn elementary_symmetric(xs: &[Complex64], k: usize) -> Result<Complex64> {
    if k > xs.len() {
        return Err(Error::Index(format!(
            "elementary symmetric order {k} exceeds argument count {}",
            xs.len()
        )));
    }
    Ok(elementary_symmetric_all(xs)[k])
}

/// All sigma_0 .. sigma_n at once.
pub fn elementary_symmetric_all(xs: &[Complex64]) -> Vec<Complex64> {
    let mut e = vec![Complex64::new(0.0, 0.0); xs.len() + 1];
    e[0] = Complex64::new(1.0, 0.0);
    for (m, &x) in xs.iter().enumerate() {
        for i in (1..=(m + 1)).rev() {
            let prev = e[i - 1];
            e[i] += x * prev;
        }
    }
    e
}

/// Vandermonde product prod_{a>b} (x_a - x_b).
pub fn vandermonde(xs: &[Complex64]) -> Complex64 {
    let mut out = Complex64::new(1.0, 0.0);
    for a in 0..xs.len() {
        for b in 0..a {
            out *= xs[a] - xs[b];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn rng(seed: u64) -> rand_chacha::ChaCha8Rng {
        rand_chacha::ChaCha8Rng::seed_from_u64(seed)
    }

    fn random_matrix(n: usize, r: &mut impl Rng) -> ComplexMatrix {
        ComplexMatrix::from_fn(n, n, |_, _| {
            Complex64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))
        })
    }

    #[test]
    fn identity_log_det() {
        let d = log_det(&ComplexMatrix::identity(3)).unwrap();
        assert_eq!(d.log_magnitude, 0.0);
        assert!((d.phase - 1.0).norm() < 1e-15);
        assert!((d.value - 1.0).norm() < 1e-15);
        assert_eq!(d.condition, 1.0);
    }

    #[test]
    fn diagonal_det() {
        let mut m = ComplexMatrix::zeros(2, 2);
        m[(0, 0)] = Complex64::new(0.0, 2.0);
        m[(1, 1)] = Complex64::new(3.0, 0.0);
        let d = log_det(&m).unwrap();
        assert!((d.value - Complex64::new(0.0, 6.0)).norm() < 1e-14);
        assert!((d.phase.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn singular_matrix_reports_neg_inf() {
        let mut m = ComplexMatrix::zeros(2, 2);
        m[(0, 0)] = Complex64::new(1.0, 0.0);
        m[(0, 1)] = Complex64::new(2.0, 0.0);
        m[(1, 0)] = Complex64::new(2.0, 0.0);
        m[(1, 1)] = Complex64::new(4.0, 0.0);
        let d = log_det(&m).unwrap();
        assert_eq!(d.log_magnitude, f64::NEG_INFINITY);
        assert_eq!(d.value, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn matches_cofactor_oracle() {
        let mut r = rng(3);
        for n in 1..=7 {
            let m = random_matrix(n, &mut r);
            let lu = log_det(&m).unwrap().value;
            let co = det_cofactor(&m).unwrap();
            assert!(
                (lu - co).norm() <= 1e-12 * co.norm().max(1e-30),
                "n = {n}: {lu} vs {co}"
            );
        }
    }

    #[test]
    fn product_rule_for_log_det() {
        let mut r = rng(4);
        for n in [2, 4, 6] {
            let a = random_matrix(n, &mut r);
            let b = random_matrix(n, &mut r);
            let da = log_det(&a).unwrap();
            let db = log_det(&b).unwrap();
            let dab = log_det(&a.mul(&b)).unwrap();
            assert!((dab.log_magnitude - da.log_magnitude - db.log_magnitude).abs() < 1e-10);
            assert!((dab.phase - da.phase * db.phase).norm() < 1e-10);
        }
    }

    #[test]
    fn solve_round_trip() {
        let mut r = rng(5);
        let a = random_matrix(5, &mut r);
        let x_true: Vec<Complex64> = (0..5)
            .map(|_| Complex64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)))
            .collect();
        let b = a.apply(&x_true);
        let x = solve(&a, &b).unwrap();
        for (u, v) in x.iter().zip(&x_true) {
            assert!((u - v).norm() < 1e-10);
        }
    }

    #[test]
    fn elementary_symmetric_small_cases() {
        let xs: Vec<Complex64> = [3.0, 5.0].iter().map(|&x| Complex64::new(x, 0.0)).collect();
        assert!((elementary_symmetric(&xs, 1).unwrap() - 8.0).norm() < 1e-15);
        let ys: Vec<Complex64> = [1.0, 2.0, 3.0].iter().map(|&x| Complex64::new(x, 0.0)).collect();
        assert!((elementary_symmetric(&ys, 0).unwrap() - 1.0).norm() < 1e-15);
        assert!((elementary_symmetric(&ys, 2).unwrap() - 11.0).norm() < 1e-15);
        assert!(elementary_symmetric(&ys, 4).is_err());
    }

    #[test]
    fn elementary_symmetric_newton_product_check() {
        let mut r = rng(6);
        let xs: Vec<Complex64> = (0..6)
            .map(|_| Complex64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)))
            .collect();
        let sigma = elementary_symmetric_all(&xs);
        for _ in 0..10 {
            let x = Complex64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0));
            let direct: Complex64 = xs.iter().map(|&xm| x + xm).product();
            let n = xs.len();
            let from_sigma: Complex64 = (0..=n).map(|k| sigma[k] * x.powu((n - k) as u32)).sum();
            assert!((direct - from_sigma).norm() <= 1e-12 * direct.norm().max(1.0));
        }
    }
}

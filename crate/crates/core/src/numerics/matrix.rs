//! Dense complex matrices and LU factorization with partial pivoting.

use std::f64::consts::PI;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
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

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = *d;
        }
        m
    }

    /// Builds a matrix from row-major entries.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
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

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: x.len(),
            });
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: other.rows,
            });
        }
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
        Ok(out)
    }

    /// Entrywise `self - other` measured in max-modulus.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// Determinant in overflow-safe polar form.
///
/// `det = exp(log_magnitude) * exp(i * phase)`. A singular matrix has
/// `log_magnitude == -inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogDet {
    pub log_magnitude: f64,
    pub phase: f64,
}

impl LogDet {
    pub fn is_singular(&self) -> bool {
        self.log_magnitude == f64::NEG_INFINITY
    }

    /// `log(det)` on the principal branch.
    pub fn ln(&self) -> Complex64 {
        Complex64::new(self.log_magnitude, self.phase)
    }

    /// The determinant itself; overflows to infinity for large magnitudes.
    pub fn value(&self) -> Complex64 {
        if self.is_singular() {
            return Complex64::new(0.0, 0.0);
        }
        Complex64::from_polar(self.log_magnitude.exp(), self.phase)
    }

    /// `det(self) / det(reference)` evaluated without forming either determinant.
    pub fn ratio(&self, reference: &LogDet) -> Complex64 {
        if self.is_singular() {
            return Complex64::new(0.0, 0.0);
        }
        Complex64::from_polar(
            (self.log_magnitude - reference.log_magnitude).exp(),
            self.phase - reference.phase,
        )
    }
}

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap_phase(angle: f64) -> f64 {
    let mut a = angle % (2.0 * PI);
    if a <= -PI {
        a += 2.0 * PI;
    } else if a > PI {
        a -= 2.0 * PI;
    }
    a
}

/// In-place LU factorization `P A = L U` with implicitly row-scaled partial
/// pivoting. `L` has a unit diagonal and shares storage with `U`.
#[derive(Debug, Clone)]
pub struct LuFactorization {
    lu: ComplexMatrix,
    perm: Vec<usize>,
    swaps: usize,
    /// First column whose pivot was exactly zero.
    singular_at: Option<usize>,
    scale: f64,
}

impl LuFactorization {
    pub fn new(m: &ComplexMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::NotSquare {
                rows: m.rows,
                cols: m.cols,
            });
        }
        if !m.is_finite() {
            return Err(Error::NonFinite("matrix entries"));
        }
        let n = m.rows;
        let mut lu = m.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut swaps = 0;
        let mut singular_at = None;

        // Implicit equilibration: pivot on |a_ij| / max_j |a_ij|.
        let mut row_scale: Vec<f64> = (0..n)
            .map(|i| {
                let s = lu.row(i).iter().map(|z| z.norm()).fold(0.0, f64::max);
                if s > 0.0 {
                    1.0 / s
                } else {
                    0.0
                }
            })
            .collect();

        for k in 0..n {
            let mut best = k;
            let mut best_val = -1.0;
            for i in k..n {
                let v = lu[(i, k)].norm() * row_scale[i];
                if v > best_val {
                    best_val = v;
                    best = i;
                }
            }
            if best != k {
                for j in 0..n {
                    lu.data.swap(k * n + j, best * n + j);
                }
                perm.swap(k, best);
                row_scale.swap(k, best);
                swaps += 1;
            }
            let pivot = lu[(k, k)];
            if pivot == Complex64::new(0.0, 0.0) {
                singular_at.get_or_insert(k);
                continue;
            }
            let inv = pivot.inv();
            for i in (k + 1)..n {
                let factor = lu[(i, k)] * inv;
                if factor == Complex64::new(0.0, 0.0) {
                    continue;
                }
                lu[(i, k)] = factor;
                for j in (k + 1)..n {
                    let ukj = lu[(k, j)];
                    lu[(i, j)] -= factor * ukj;
                }
            }
        }
        Ok(Self {
            scale: m.max_abs(),
            lu,
            perm,
            swaps,
            singular_at,
        })
    }

    pub fn dim(&self) -> usize {
        self.lu.rows
    }

    pub fn log_det(&self) -> LogDet {
        if self.singular_at.is_some() {
            return LogDet {
                log_magnitude: f64::NEG_INFINITY,
                phase: 0.0,
            };
        }
        let n = self.dim();
        let mut log_mag = 0.0;
        let mut phase = PI * (self.swaps % 2) as f64;
        for k in 0..n {
            let p = self.lu[(k, k)];
            log_mag += p.norm().ln();
            phase += p.arg();
            phase = wrap_phase(phase);
        }
        LogDet {
            log_magnitude: log_mag,
            phase: wrap_phase(phase),
        }
    }

    /// Solves `A x = rhs` using the stored factors.
    pub fn solve(&self, rhs: &[Complex64]) -> Result<Vec<Complex64>> {
        let n = self.dim();
        if rhs.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: rhs.len(),
            });
        }
        let tiny = f64::EPSILON * n as f64 * self.scale;
        for k in 0..n {
            let p = self.lu[(k, k)].norm();
            if p <= tiny || self.singular_at == Some(k) {
                return Err(Error::Singular {
                    column: k,
                    pivot: p,
                });
            }
        }
        let mut x: Vec<Complex64> = self.perm.iter().map(|&p| rhs[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[(i, j)] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in (i + 1)..n {
                s -= self.lu[(i, j)] * x[j];
            }
            x[i] = s / self.lu[(i, i)];
        }
        Ok(x)
    }
}

/// Log-determinant of a square matrix via LU with partial pivoting.
pub fn lu_logdet(m: &ComplexMatrix) -> Result<LogDet> {
    Ok(LuFactorization::new(m)?.log_det())
}

/// Solves `m x = rhs` by LU with partial pivoting.
pub fn lu_solve(m: &ComplexMatrix, rhs: &[Complex64]) -> Result<Vec<Complex64>> {
    LuFactorization::new(m)?.solve(rhs)
}

//! Dense complex matrices for the handful of dimensions this crate needs
//! (qubits, qutrits, and 9×9 superoperators).
//!
//! The eigensolver is a cyclic complex Jacobi iteration. It is slow in the
//! asymptotic sense and exactly right for matrices this small: it is
//! backward stable, deterministic, and needs no external LAPACK.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Relative tolerance for accepting a matrix as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);
pub(crate) const I: C64 = C64::new(0.0, 1.0);

const MAX_SWEEPS: usize = 100;

/// Row-major dense complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { ONE } else { ZERO })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from row-major entries.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(Error::DimMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from a list of rows. Panics on ragged input; use
    /// [`ComplexMatrix::from_vec`] for untrusted data.
    pub fn from_rows<R: AsRef<[C64]>>(rows: &[R]) -> Self {
        let n = rows.len();
        let m = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(n * m);
        for r in rows {
            assert_eq!(r.as_ref().len(), m, "ragged rows");
            data.extend_from_slice(r.as_ref());
        }
        Self {
            rows: n,
            cols: m,
            data,
        }
    }

    pub fn from_real_rows<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.as_ref().iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn diag(values: &[C64]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |i, j| if i == j { values[i] } else { ZERO })
    }

    pub fn real_diag(values: &[f64]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |i, j| if i == j { C64::new(values[i], 0.0) } else { ZERO })
    }

    /// Column vector.
    pub fn column(values: &[C64]) -> Self {
        Self {
            rows: values.len(),
            cols: 1,
            data: values.to_vec(),
        }
    }

    /// `|v⟩⟨w|`.
    pub fn outer(v: &[C64], w: &[C64]) -> Self {
        Self::from_fn(v.len(), w.len(), |i, j| v[i] * w[j].conj())
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn dagger(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_c(&self, s: C64) -> Self {
        self.map(|z| z * s)
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(
            self.cols, rhs.rows,
            "matmul shape mismatch: {:?} x {:?}",
            self.shape(),
            rhs.shape()
        );
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let rrow = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let orow = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (o, &b) in orow.iter_mut().zip(rrow) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// `A X A†`.
    pub fn sandwich(&self, x: &Self) -> Self {
        self.matmul(x).matmul(&self.dagger())
    }

    pub fn mat_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Kronecker product `self ⊗ rhs`.
    pub fn kron(&self, rhs: &Self) -> Self {
        let (r1, c1) = self.shape();
        let (r2, c2) = rhs.shape();
        Self::from_fn(r1 * r2, c1 * c2, |i, j| {
            self[(i / r2, j / c2)] * rhs[(i % r2, j % c2)]
        })
    }

    /// Block-diagonal `self ⊕ rhs`.
    pub fn direct_sum(&self, rhs: &Self) -> Self {
        let (r1, c1) = self.shape();
        let (r2, c2) = rhs.shape();
        Self::from_fn(r1 + r2, c1 + c2, |i, j| {
            if i < r1 && j < c1 {
                self[(i, j)]
            } else if i >= r1 && j >= c1 {
                rhs[(i - r1, j - c1)]
            } else {
                ZERO
            }
        })
    }

    /// Copy of the `rows × cols` block whose top-left corner is `(r0, c0)`.
    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        assert!(r0 + rows <= self.rows && c0 + cols <= self.cols);
        Self::from_fn(rows, cols, |i, j| self[(r0 + i, c0 + j)])
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entry-wise modulus of `self − rhs`.
    pub fn max_abs_diff(&self, rhs: &Self) -> f64 {
        assert_eq!(self.shape(), rhs.shape());
        self.data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `(M + M†)/2`, exactly Hermitian in floating point.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| {
            (self[(i, j)] + self[(j, i)].conj()) * 0.5
        })
    }

    /// Returns a square-matrix error unless `self` is square.
    pub fn require_square(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }

    /// Checks Hermiticity within `HERMITIAN_TOL · max(1, ‖M‖)` in operator norm.
    pub fn check_hermitian(&self) -> Result<()> {
        let n = self.require_square()?;
        if !self.is_finite() {
            return Err(Error::NonFinite);
        }
        let anti = Self::from_fn(n, n, |i, j| (self[(i, j)] - self[(j, i)].conj()) * I);
        let res_f = anti.frobenius_norm();
        if res_f == 0.0 {
            return Ok(());
        }
        // ‖·‖_op ≤ ‖·‖_F and ‖M‖_op ≥ ‖M‖_F/√n, so this accepts only what the
        // exact test would accept.
        let scale_lower = (self.frobenius_norm() / (n as f64).sqrt()).max(1.0);
        if res_f <= HERMITIAN_TOL * scale_lower {
            return Ok(());
        }
        let (vals, _) = jacobi(&anti);
        let residual = vals.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if residual > HERMITIAN_TOL * operator_norm(self).max(1.0) {
            Err(Error::NotHermitian { residual })
        } else {
            Ok(())
        }
    }

    /// LU solve of `self · X = rhs` with partial pivoting.
    pub fn solve(&self, rhs: &Self) -> Result<Self> {
        let n = self.require_square()?;
        if rhs.rows != n {
            return Err(Error::DimMismatch {
                expected: n,
                found: rhs.rows,
            });
        }
        let mut a = self.clone();
        let mut b = rhs.clone();
        let scale = self.data.iter().fold(0.0_f64, |m, z| m.max(z.norm()));
        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|i| (i, a[(i, k)].norm()))
                .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if pmax <= 1e-14 * scale.max(f64::MIN_POSITIVE) {
                return Err(Error::Singular);
            }
            if p != k {
                for j in 0..n {
                    a.data.swap(k * n + j, p * n + j);
                }
                for j in 0..b.cols {
                    b.data.swap(k * b.cols + j, p * b.cols + j);
                }
            }
            let pivot = a[(k, k)];
            for i in k + 1..n {
                let f = a[(i, k)] / pivot;
                if f == ZERO {
                    continue;
                }
                for j in k..n {
                    let akj = a[(k, j)];
                    a[(i, j)] -= f * akj;
                }
                for j in 0..b.cols {
                    let bkj = b[(k, j)];
                    b[(i, j)] -= f * bkj;
                }
            }
        }
        for j in 0..b.cols {
            for i in (0..n).rev() {
                let mut acc = b[(i, j)];
                for k in i + 1..n {
                    acc -= a[(i, k)] * b[(k, j)];
                }
                b[(i, j)] = acc / a[(i, i)];
            }
        }
        Ok(b)
    }

    pub fn inverse(&self) -> Result<Self> {
        let n = self.require_square()?;
        self.solve(&Self::identity(n))
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.shape(), rhs.shape());
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.shape(), rhs.shape());
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.map(|z| -z)
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for z in self.row(i) {
                write!(f, "{:>+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

// JSON form: a list of rows, each entry a `[re, im]` pair.
impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<[f64; 2]>> = (0..self.rows)
            .map(|i| self.row(i).iter().map(|z| [z.re, z.im]).collect())
            .collect();
        rows.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<[f64; 2]>> = Vec::deserialize(deserializer)?;
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != m) {
            return Err(serde::de::Error::custom("ragged matrix rows"));
        }
        let data = rows
            .into_iter()
            .flatten()
            .map(|[re, im]| C64::new(re, im))
            .collect();
        ComplexMatrix::from_vec(n, m, data).map_err(serde::de::Error::custom)
    }
}

/// Spectral decomposition `M = V diag(λ) V†` of a Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianEigensystem {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors as columns, each phase-fixed so that its
    /// first non-negligible component is real and positive.
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEigensystem {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        *self.eigenvalues.last().expect("empty eigensystem")
    }

    pub fn eigenvector(&self, k: usize) -> Vec<C64> {
        self.eigenvectors.col(k)
    }

    /// `V f(Λ) V†` for a complex-valued spectral function.
    pub fn apply_fn(&self, f: impl Fn(f64) -> C64) -> ComplexMatrix {
        let n = self.dim();
        let v = &self.eigenvectors;
        let fl: Vec<C64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        ComplexMatrix::from_fn(n, n, |i, j| {
            (0..n).map(|k| v[(i, k)] * fl[k] * v[(j, k)].conj()).sum()
        })
    }

    /// `V f(Λ) V†` for a real spectral function.
    pub fn apply_real_fn(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        self.apply_fn(|l| C64::new(f(l), 0.0))
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.apply_real_fn(|l| l)
    }
}

/// Cyclic Jacobi on a matrix assumed Hermitian. Returns unsorted eigenvalues
/// and the accumulated unitary.
fn jacobi(m: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let n = m.rows;
    let mut a = m.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let total = a.frobenius_norm();
    if total == 0.0 || n == 1 {
        return ((0..n).map(|i| a[(i, i)].re).collect(), v);
    }
    let mut prev_off = f64::INFINITY;
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        // stop at roundoff level, or once a sweep no longer helps
        if off <= f64::EPSILON * 1e-2 * total || off >= prev_off {
            break;
        }
        prev_off = off;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag == 0.0 {
                    continue;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                // Rotate the phase out of a_pq, then apply the real Jacobi step.
                let phase = apq / mag;
                let tau = (aqq - app) / (2.0 * mag);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // G = diag(1, conj(phase)) · [[c, s], [-s, c]]
                let g_pp = C64::new(c, 0.0);
                let g_pq = C64::new(s, 0.0);
                let g_qp = -phase.conj() * s;
                let g_qq = phase.conj() * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * g_pp + akq * g_qp;
                    a[(k, q)] = akp * g_pq + akq * g_qq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = g_pp.conj() * apk + g_qp.conj() * aqk;
                    a[(q, k)] = g_pq.conj() * apk + g_qq.conj() * aqk;
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * g_pp + vkq * g_qp;
                    v[(k, q)] = vkp * g_pq + vkq * g_qq;
                }
            }
        }
    }
    ((0..n).map(|i| a[(i, i)].re).collect(), v)
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<HermitianEigensystem> {
    m.check_hermitian()?;
    Ok(hermitian_eig_unchecked(m))
}

/// As [`hermitian_eig`] but skips the Hermiticity check; the anti-Hermitian
/// part of `m` is discarded.
pub(crate) fn hermitian_eig_unchecked(m: &ComplexMatrix) -> HermitianEigensystem {
    let n = m.rows;
    let (vals, v) = jacobi(m);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
    let eigenvalues: Vec<f64> = order.iter().map(|&k| vals[k]).collect();
    let mut eigenvectors = ComplexMatrix::zeros(n, n);
    for (col, &k) in order.iter().enumerate() {
        let lead = (0..n)
            .map(|i| v[(i, k)])
            .find(|z| z.norm() > 1e-12)
            .unwrap_or(ONE);
        let fix = lead.conj() / lead.norm();
        for i in 0..n {
            eigenvectors[(i, col)] = v[(i, k)] * fix;
        }
    }
    HermitianEigensystem {
        eigenvalues,
        eigenvectors,
    }
}

/// Eigenvalues of the Hermitian dilation `[[0, M], [M†, 0]]`, which are
/// `±σᵢ` (plus `|rows − cols|` zeros). Avoids squaring small singular values.
fn dilation_spectrum(m: &ComplexMatrix) -> Vec<f64> {
    let (r, c) = m.shape();
    let h = ComplexMatrix::from_fn(r + c, r + c, |i, j| {
        if i < r && j >= r {
            m[(i, j - r)]
        } else if i >= r && j < r {
            m[(j, i - r)].conj()
        } else {
            ZERO
        }
    });
    jacobi(&h).0
}

fn is_exactly_hermitian(m: &ComplexMatrix) -> bool {
    m.is_square()
        && (0..m.rows).all(|i| (i..m.cols).all(|j| m[(i, j)] == m[(j, i)].conj()))
}

/// Largest singular value.
pub fn operator_norm(m: &ComplexMatrix) -> f64 {
    if is_exactly_hermitian(m) {
        return jacobi(m).0.iter().fold(0.0, |acc, v| acc.max(v.abs()));
    }
    dilation_spectrum(m).iter().fold(0.0, |acc, &v| acc.max(v))
}

/// Sum of singular values.
pub fn trace_norm(m: &ComplexMatrix) -> f64 {
    if is_exactly_hermitian(m) {
        return jacobi(m).0.iter().map(|v| v.abs()).sum();
    }
    dilation_spectrum(m).iter().map(|v| v.abs()).sum::<f64>() / 2.0
}

/// Kronecker product.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kron(b)
}

/// Principal square root of a positive semidefinite matrix. Eigenvalues in
/// `[-1e-10, 0)` are treated as roundoff and clipped to zero.
pub fn psd_sqrt(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(m)?;
    if eig.min() < -1e-10 {
        return Err(Error::NotPsd {
            min_eigenvalue: eig.min(),
        });
    }
    Ok(eig.apply_real_fn(|l| l.max(0.0).sqrt()))
}

/// `exp(−iHt)` for Hermitian `H`, with ħ = 1.
pub fn matrix_exp_hermitian_generator(h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(h)?;
    Ok(eig.apply_fn(|l| C64::from_polar(1.0, -l * t)))
}

/// True iff all eigenvalues of the Hermitian part are at least `-tol`.
pub fn is_psd(m: &ComplexMatrix, tol: f64) -> bool {
    m.is_square() && hermitian_eig_unchecked(m).min() >= -tol
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn eta2() -> ComplexMatrix {
        ComplexMatrix::from_rows(&[[c(0.8, 0.0), c(0.0, -0.2)], [c(0.0, 0.2), c(0.8, 0.0)]])
    }

    #[test]
    fn eig_diagonal_and_pauli() {
        let e = hermitian_eig(&ComplexMatrix::real_diag(&[2.0, 1.0])).unwrap();
        assert_eq!(e.eigenvalues, vec![1.0, 2.0]);
        let x = ComplexMatrix::from_real_rows(&[[0.0, 1.0], [1.0, 0.0]]);
        let e = hermitian_eig(&x).unwrap();
        assert_abs_diff_eq!(e.eigenvalues[0], -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(e.eigenvalues[1], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn eig_of_eta2() {
        // (η₂ − λ)² = 0.04 ⇒ λ = 0.8 ± 0.2
        let e = hermitian_eig(&eta2()).unwrap();
        assert_abs_diff_eq!(e.eigenvalues[0], 0.6, epsilon = 1e-15);
        assert_abs_diff_eq!(e.eigenvalues[1], 1.0, epsilon = 1e-15);
        // eigenvector for 0.6 is (1, −i)/√2 after phase fixing
        let v = e.eigenvector(0);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!((v[0] - c(h, 0.0)).norm(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!((v[1] - c(0.0, -h)).norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn eig_rejects_bad_input() {
        let m = ComplexMatrix::from_real_rows(&[[1.0, 2.0], [0.0, 1.0]]);
        assert!(matches!(hermitian_eig(&m), Err(Error::NotHermitian { .. })));
        let m = ComplexMatrix::zeros(2, 3);
        assert!(matches!(hermitian_eig(&m), Err(Error::NotSquare { .. })));
        // tiny asymmetry is accepted
        let mut m = ComplexMatrix::identity(2);
        m[(0, 1)] = c(1e-13, 0.0);
        assert!(hermitian_eig(&m).is_ok());
    }

    #[test]
    fn sqrt_examples() {
        let id = ComplexMatrix::identity(3);
        assert!(psd_sqrt(&id).unwrap().max_abs_diff(&id) < 1e-15);
        let r = psd_sqrt(&ComplexMatrix::real_diag(&[4.0, 1.0])).unwrap();
        assert!(r.max_abs_diff(&ComplexMatrix::real_diag(&[2.0, 1.0])) < 1e-15);

        let q = 0.6_f64.sqrt();
        let expected = ComplexMatrix::from_rows(&[
            [c((1.0 + q) / 2.0, 0.0), c(0.0, -(1.0 - q) / 2.0)],
            [c(0.0, (1.0 - q) / 2.0), c((1.0 + q) / 2.0, 0.0)],
        ]);
        assert!(psd_sqrt(&eta2()).unwrap().max_abs_diff(&expected) < 1e-14);

        let neg = ComplexMatrix::real_diag(&[1.0, -0.1]);
        assert!(matches!(psd_sqrt(&neg), Err(Error::NotPsd { .. })));
        // roundoff negativity is clipped
        let r = psd_sqrt(&ComplexMatrix::real_diag(&[1.0, -1e-13])).unwrap();
        assert_eq!(r[(1, 1)], ZERO);
    }

    #[test]
    fn norms() {
        assert_abs_diff_eq!(operator_norm(&ComplexMatrix::identity(3)), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            operator_norm(&ComplexMatrix::real_diag(&[0.3, -0.8])),
            0.8,
            epsilon = 1e-15
        );
        let inv = eta2().inverse().unwrap();
        assert_abs_diff_eq!(operator_norm(&inv), 5.0 / 3.0, epsilon = 1e-14);

        assert_abs_diff_eq!(trace_norm(&ComplexMatrix::identity(3)), 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            trace_norm(&ComplexMatrix::real_diag(&[0.4, -0.4])),
            0.8,
            epsilon = 1e-15
        );
        // η₂ ⊕ 1 − I₃ has eigenvalues {0, −0.4, 0}
        let d = &eta2().direct_sum(&ComplexMatrix::identity(1)) - &ComplexMatrix::identity(3);
        assert_abs_diff_eq!(trace_norm(&d), 0.4, epsilon = 1e-14);
        // non-Hermitian: [[0, 1], [0, 0]] has singular values {1, 0}
        let n = ComplexMatrix::from_real_rows(&[[0.0, 1.0], [0.0, 0.0]]);
        assert_abs_diff_eq!(trace_norm(&n), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(operator_norm(&n), 1.0, epsilon = 1e-15);
        // rectangular
        let r = ComplexMatrix::from_real_rows(&[[3.0, 0.0, 0.0], [0.0, 4.0, 0.0]]);
        assert_abs_diff_eq!(operator_norm(&r), 4.0, epsilon = 1e-14);
    }

    #[test]
    fn kron_examples() {
        assert_eq!(
            kron(&ComplexMatrix::identity(2), &ComplexMatrix::identity(2)),
            ComplexMatrix::identity(4)
        );
        assert_eq!(
            kron(
                &ComplexMatrix::real_diag(&[1.0, 2.0]),
                &ComplexMatrix::real_diag(&[3.0, 4.0])
            ),
            ComplexMatrix::real_diag(&[3.0, 4.0, 6.0, 8.0])
        );
        let p0 = ComplexMatrix::real_diag(&[1.0, 0.0]);
        let x = ComplexMatrix::from_real_rows(&[[0.0, 1.0], [1.0, 0.0]]);
        let k = kron(&p0, &x);
        assert_eq!(k.block(0, 0, 2, 2), x);
        assert_eq!(k.block(2, 2, 2, 2), ComplexMatrix::zeros(2, 2));
        assert_eq!(k.block(0, 2, 2, 2), ComplexMatrix::zeros(2, 2));
    }

    #[test]
    fn exp_examples() {
        let z = ComplexMatrix::zeros(2, 2);
        assert!(matrix_exp_hermitian_generator(&z, 3.7)
            .unwrap()
            .max_abs_diff(&ComplexMatrix::identity(2))
            < 1e-15);
        let sz = ComplexMatrix::real_diag(&[1.0, -1.0]);
        let u = matrix_exp_hermitian_generator(&sz, std::f64::consts::FRAC_PI_2).unwrap();
        let expected = ComplexMatrix::diag(&[c(0.0, -1.0), c(0.0, 1.0)]);
        assert!(u.max_abs_diff(&expected) < 1e-15);

        // h_PT at (r=1, s=2, φ=π/6): E± = cos(π/6) ± √3.75
        let a = (std::f64::consts::PI / 6.0).cos();
        let b = 3.75_f64.sqrt();
        let h = ComplexMatrix::from_real_rows(&[[a, b], [b, a]]);
        let u = matrix_exp_hermitian_generator(&h, 1.0).unwrap();
        let e = hermitian_eig(&h).unwrap();
        assert_abs_diff_eq!(e.eigenvalues[0], -1.070466, epsilon = 1e-6);
        assert_abs_diff_eq!(e.eigenvalues[1], 2.802517, epsilon = 1e-6);
        // eigenvectors (1, ±1)/√2
        let plus = [c(1.0, 0.0), c(1.0, 0.0)];
        let up = u.mat_vec(&plus);
        let phase = C64::from_polar(1.0, -(a + b));
        assert!((up[0] - phase).norm() < 1e-14 && (up[1] - phase).norm() < 1e-14);
    }

    #[test]
    fn solve_and_inverse() {
        let m = ComplexMatrix::from_rows(&[[c(1.0, 1.0), c(2.0, 0.0)], [c(0.0, -1.0), c(3.0, 0.5)]]);
        let inv = m.inverse().unwrap();
        assert!((&m * &inv).max_abs_diff(&ComplexMatrix::identity(2)) < 1e-14);
        let sing = ComplexMatrix::from_real_rows(&[[1.0, 2.0], [2.0, 4.0]]);
        assert_eq!(sing.inverse(), Err(Error::Singular));
    }

    #[test]
    fn from_vec_validates() {
        assert!(ComplexMatrix::from_vec(2, 2, vec![ONE; 3]).is_err());
        assert_eq!(
            ComplexMatrix::from_vec(1, 1, vec![c(f64::NAN, 0.0)]),
            Err(Error::NonFinite)
        );
    }

    fn hermitian_strategy() -> impl Strategy<Value = ComplexMatrix> {
        (2usize..=3).prop_flat_map(|n| {
            prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), n * n).prop_map(move |v| {
                let raw =
                    ComplexMatrix::from_fn(n, n, |i, j| C64::new(v[i * n + j].0, v[i * n + j].1));
                raw.hermitian_part()
            })
        })
    }

    fn square_strategy() -> impl Strategy<Value = ComplexMatrix> {
        (2usize..=3).prop_flat_map(|n| {
            prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), n * n).prop_map(move |v| {
                ComplexMatrix::from_fn(n, n, |i, j| C64::new(v[i * n + j].0, v[i * n + j].1))
            })
        })
    }

    proptest! {
        #[test]
        fn eig_reconstructs(m in hermitian_strategy()) {
            let e = hermitian_eig(&m).unwrap();
            let n = m.rows();
            let v = &e.eigenvectors;
            prop_assert!((&v.dagger() * v).max_abs_diff(&ComplexMatrix::identity(n)) < 1e-12);
            let scale = operator_norm(&m).max(f64::MIN_POSITIVE);
            prop_assert!(operator_norm(&(&m - &e.reconstruct())) <= 1e-12 * scale.max(1.0));
            prop_assert!(e.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        }

        #[test]
        fn sqrt_squares_back(a in square_strategy()) {
            let m = &a * &a.dagger();
            let r = psd_sqrt(&m).unwrap();
            prop_assert!(operator_norm(&(&(&r * &r) - &m)) <= 1e-10);
            prop_assert!(r.max_abs_diff(&r.dagger()) < 1e-12);
        }

        #[test]
        fn trace_norm_dominates_operator_norm(m in square_strategy()) {
            prop_assert!(trace_norm(&m) >= operator_norm(&m) - 1e-12);
        }

        #[test]
        fn rank_one_norms_coincide(v in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 3),
                                   w in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 3)) {
            let v: Vec<C64> = v.into_iter().map(|(a, b)| C64::new(a, b)).collect();
            let w: Vec<C64> = w.into_iter().map(|(a, b)| C64::new(a, b)).collect();
            let m = ComplexMatrix::outer(&v, &w);
            prop_assert!((trace_norm(&m) - operator_norm(&m)).abs() < 1e-12);
        }

        #[test]
        fn exp_inverse(h in hermitian_strategy(), t in -5.0f64..5.0) {
            let u = matrix_exp_hermitian_generator(&h, t).unwrap();
            let v = matrix_exp_hermitian_generator(&h, -t).unwrap();
            prop_assert!((&u * &v).max_abs_diff(&ComplexMatrix::identity(h.rows())) < 1e-10);
        }
    }
}

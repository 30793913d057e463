//! Metric operators and the geometry they induce on a finite-dimensional
//! Hilbert space: the η-inner product `⟨φ|η|ψ⟩`, the η-adjoint, the
//! representation change `M ↦ η^{-1/2} M η^{1/2}`, and the two lift maps
//! from (sub)normalized vectors to operators.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, ComplexMatrix, HermitianEigensystem, C64};

/// Eigenvalues at or below this are treated as zero when validating a metric.
pub const POSITIVE_DEFINITE_CUTOFF: f64 = 1e-12;
/// Slack on the unit-ball constraint for state vectors and on `η ≤ I`.
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// A validated metric operator: Hermitian and positive definite.
///
/// The spectral decomposition is computed once at validation and every
/// derived operator (`η^{±1/2}`, `η^{-1}`) is built from it.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricOperator {
    matrix: ComplexMatrix,
    eig: HermitianEigensystem,
    norm: f64,
    subidentity: bool,
    sqrt: ComplexMatrix,
    inv_sqrt: ComplexMatrix,
    inverse: ComplexMatrix,
}

impl MetricOperator {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn eig(&self) -> &HermitianEigensystem {
        &self.eig
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eig.eigenvalues
    }

    /// Operator norm, i.e. the largest eigenvalue.
    pub fn norm(&self) -> f64 {
        self.norm
    }

    /// Whether `η ≤ I`.
    pub fn is_subidentity(&self) -> bool {
        self.subidentity
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    /// `η^{1/2}`
    pub fn sqrt(&self) -> &ComplexMatrix {
        &self.sqrt
    }

    /// `η^{-1/2}`
    pub fn inv_sqrt(&self) -> &ComplexMatrix {
        &self.inv_sqrt
    }

    /// `η^{-1}`
    pub fn inverse_matrix(&self) -> &ComplexMatrix {
        &self.inverse
    }

    /// `η^{-1}` as a metric in its own right.
    pub fn inverse(&self) -> MetricOperator {
        self.spectral_map(|l| 1.0 / l)
    }

    /// `k·η` for `k > 0`.
    pub fn scaled(&self, k: f64) -> Result<MetricOperator> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "metric scale factor must be positive, got {k}"
            )));
        }
        Ok(self.spectral_map(|l| k * l))
    }

    /// Applies a positive spectral function while keeping the eigenbasis,
    /// so that derived metrics stay exactly diagonal in the same basis.
    fn spectral_map(&self, f: impl Fn(f64) -> f64) -> MetricOperator {
        let mut vals: Vec<(f64, usize)> = self
            .eig
            .eigenvalues
            .iter()
            .enumerate()
            .map(|(k, &l)| (f(l), k))
            .collect();
        vals.sort_by(|a, b| a.0.total_cmp(&b.0));
        let n = self.dim();
        let vecs = ComplexMatrix::from_fn(n, n, |i, j| self.eig.eigenvectors[(i, vals[j].1)]);
        let eig = HermitianEigensystem {
            eigenvalues: vals.iter().map(|v| v.0).collect(),
            eigenvectors: vecs,
        };
        Self::from_eigensystem(eig)
    }

    fn from_eigensystem(eig: HermitianEigensystem) -> MetricOperator {
        let matrix = eig.reconstruct();
        let norm = eig.max();
        MetricOperator {
            sqrt: eig.apply_real_fn(f64::sqrt),
            inv_sqrt: eig.apply_real_fn(|l| 1.0 / l.sqrt()),
            inverse: eig.apply_real_fn(|l| 1.0 / l),
            subidentity: norm <= 1.0 + NORMALIZATION_TOL,
            norm,
            matrix,
            eig,
        }
    }
}

/// Checks that `m` is a valid metric operator and caches its spectral data.
pub fn validate_metric(m: &ComplexMatrix) -> Result<MetricOperator> {
    m.require_square()?;
    let eig = hermitian_eig(m)?;
    if eig.min() <= POSITIVE_DEFINITE_CUTOFF {
        return Err(Error::NotPositiveDefinite {
            min_eigenvalue: eig.min(),
        });
    }
    let norm = eig.max();
    Ok(MetricOperator {
        sqrt: eig.apply_real_fn(f64::sqrt),
        inv_sqrt: eig.apply_real_fn(|l| 1.0 / l.sqrt()),
        inverse: eig.apply_real_fn(|l| 1.0 / l),
        subidentity: norm <= 1.0 + NORMALIZATION_TOL,
        norm,
        // keep the caller's matrix rather than the reconstruction so that
        // closed-form inputs round-trip exactly
        matrix: m.hermitian_part(),
        eig,
    })
}

/// A vector in the closed unit ball of `ℂⁿ`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<C64>,
}

impl StateVector {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidArgument("empty state vector".into()));
        }
        let norm_sq: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if !norm_sq.is_finite() {
            return Err(Error::InvalidArgument("non-finite amplitudes".into()));
        }
        if norm_sq > 1.0 + NORMALIZATION_TOL {
            return Err(Error::Supernormalized { norm_sq });
        }
        Ok(Self { amplitudes })
    }

    /// Computational basis vector `|k⟩`.
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut amplitudes = vec![C64::new(0.0, 0.0); dim];
        amplitudes[k] = C64::new(1.0, 0.0);
        Self { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimMismatch { expected, found })
    }
}

/// `⟨φ|ψ⟩_η = ⟨φ|η|ψ⟩`.
pub fn eta_inner(eta: &MetricOperator, phi: &StateVector, psi: &StateVector) -> Result<C64> {
    check_dim(eta.dim(), phi.dim())?;
    check_dim(eta.dim(), psi.dim())?;
    let eta_psi = eta.matrix().mat_vec(psi.amplitudes());
    Ok(phi
        .amplitudes()
        .iter()
        .zip(&eta_psi)
        .map(|(a, b)| a.conj() * b)
        .sum())
}

/// Adjoint with respect to the η-inner product: `M‡ = η⁻¹ M† η`.
pub fn eta_adjoint(eta: &MetricOperator, m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = m.require_square()?;
    check_dim(eta.dim(), n)?;
    Ok(&(eta.inverse_matrix() * &m.dagger()) * eta.matrix())
}

/// Change of representation `M ↦ R M R⁻¹` with `R = η^{-1/2}`.
pub fn representation_change(eta: &MetricOperator, m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = m.require_square()?;
    check_dim(eta.dim(), n)?;
    Ok(&(eta.inv_sqrt() * m) * eta.sqrt())
}

/// `|ψ⟩ ↦ |ψ⟩⟨ψ|`.
pub fn lift(psi: &StateVector) -> Result<ComplexMatrix> {
    let norm_sq = psi.norm_sqr();
    if norm_sq > 1.0 + NORMALIZATION_TOL {
        return Err(Error::Supernormalized { norm_sq });
    }
    Ok(ComplexMatrix::outer(psi.amplitudes(), psi.amplitudes()))
}

/// `|ψ⟩ ↦ |ψ⟩⟨ψ|η`, defined on the unit ball of the η-norm.
pub fn lift_eta(eta: &MetricOperator, psi: &StateVector) -> Result<ComplexMatrix> {
    let norm_sq = eta_inner(eta, psi, psi)?.re;
    if norm_sq > 1.0 + NORMALIZATION_TOL {
        return Err(Error::Supernormalized { norm_sq });
    }
    Ok(&ComplexMatrix::outer(psi.amplitudes(), psi.amplitudes()) * eta.matrix())
}

/// Checks that `rho` is a (sub)normalized density operator: Hermitian,
/// eigenvalues at least `-1e-10`, trace at most `1 + 1e-12`. Returns the
/// trace.
pub fn check_density(rho: &ComplexMatrix) -> Result<f64> {
    if !rho.is_square() {
        return Err(Error::InvalidDensityOperator(format!(
            "{}x{} is not square",
            rho.rows(),
            rho.cols()
        )));
    }
    let eig = hermitian_eig(rho)
        .map_err(|e| Error::InvalidDensityOperator(e.to_string()))?;
    if eig.min() < -1e-10 {
        return Err(Error::InvalidDensityOperator(format!(
            "negative eigenvalue {:.3e}",
            eig.min()
        )));
    }
    let tr = rho.trace().re;
    if tr > 1.0 + NORMALIZATION_TOL {
        return Err(Error::InvalidDensityOperator(format!(
            "trace {tr} exceeds 1"
        )));
    }
    Ok(tr)
}

/// As [`check_density`], additionally requiring dimension `dim` and a
/// strictly positive trace.
pub fn check_nonzero_density(rho: &ComplexMatrix, dim: usize) -> Result<f64> {
    if rho.shape() != (dim, dim) {
        return Err(Error::DimMismatch {
            expected: dim,
            found: rho.rows(),
        });
    }
    let tr = check_density(rho)?;
    if tr <= 0.0 {
        return Err(Error::InvalidDensityOperator("zero trace".into()));
    }
    Ok(tr)
}

/// JSON form of a metric: `{"dim": n, "matrix": [[[re, im], ...], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricJson {
    pub dim: usize,
    pub matrix: ComplexMatrix,
}

impl MetricJson {
    pub fn from_metric(eta: &MetricOperator) -> Self {
        Self {
            dim: eta.dim(),
            matrix: eta.matrix().clone(),
        }
    }

    /// Validates the shape against `dim` and then the metric itself.
    pub fn to_metric(&self) -> Result<MetricOperator> {
        if self.matrix.shape() != (self.dim, self.dim) {
            return Err(Error::DimMismatch {
                expected: self.dim,
                found: self.matrix.rows(),
            });
        }
        validate_metric(&self.matrix)
    }
}

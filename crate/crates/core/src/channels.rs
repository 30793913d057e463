//! Kraus channels and the inner-product-change channels built from a metric.
//!
//! `G_η : M ↦ η^{1/2} M η^{1/2}` is the single-Kraus channel that, followed
//! by the representation change, realizes `E_η : M ↦ Mη`. Its scaled inverse
//! `G_{κη⁻¹}` (Kraus operator `√κ η^{-1/2}`, `κ = 1/‖η⁻¹‖`) undoes it with
//! probability `κ`.
//!
//! [`Superoperator`] is the matrix form of a linear map on operators, used
//! by tomography where maps are differences of channels and have no Kraus
//! form.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{representation_change, MetricOperator};
use crate::linalg::{hermitian_eig_unchecked, ComplexMatrix};

/// Slack on the eigenvalues of `I − Σ K†K`.
pub const TRACE_NONINCREASING_TOL: f64 = 1e-10;

/// A completely positive map `ρ ↦ Σ K ρ K†` from `dim_in` to `dim_out`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    kraus_ops: Vec<ComplexMatrix>,
    dim_in: usize,
    dim_out: usize,
}

impl KrausChannel {
    /// Builds a channel, checking operator shapes and that the map does not
    /// increase trace.
    pub fn new(kraus_ops: Vec<ComplexMatrix>, dim_in: usize, dim_out: usize) -> Result<Self> {
        let ch = Self::with_unchecked_trace(kraus_ops, dim_in, dim_out)?;
        let worst = ch.trace_excess();
        if worst > TRACE_NONINCREASING_TOL {
            return Err(Error::InvalidArgument(format!(
                "Kraus operators increase trace (largest eigenvalue of ΣK†K exceeds 1 by {worst:.3e})"
            )));
        }
        Ok(ch)
    }

    /// Shape checks only. The result may increase trace; see
    /// [`is_trace_nonincreasing`].
    pub fn with_unchecked_trace(
        kraus_ops: Vec<ComplexMatrix>,
        dim_in: usize,
        dim_out: usize,
    ) -> Result<Self> {
        for k in &kraus_ops {
            if k.rows() != dim_out {
                return Err(Error::DimMismatch {
                    expected: dim_out,
                    found: k.rows(),
                });
            }
            if k.cols() != dim_in {
                return Err(Error::DimMismatch {
                    expected: dim_in,
                    found: k.cols(),
                });
            }
        }
        Ok(Self {
            kraus_ops,
            dim_in,
            dim_out,
        })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            kraus_ops: vec![ComplexMatrix::identity(dim)],
            dim_in: dim,
            dim_out: dim,
        }
    }

    /// `ρ ↦ U ρ U†`. `u` must be unitary within the trace tolerance.
    pub fn unitary(u: &ComplexMatrix) -> Result<Self> {
        let n = u.require_square()?;
        Self::new(vec![u.clone()], n, n)
    }

    pub fn kraus_ops(&self) -> &[ComplexMatrix] {
        &self.kraus_ops
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    /// `Σ K†K`.
    pub fn kraus_sum(&self) -> ComplexMatrix {
        self.kraus_ops
            .iter()
            .fold(ComplexMatrix::zeros(self.dim_in, self.dim_in), |acc, k| {
                &acc + &(&k.dagger() * k)
            })
    }

    /// Largest eigenvalue of `Σ K†K − I`.
    fn trace_excess(&self) -> f64 {
        let d = &self.kraus_sum() - &ComplexMatrix::identity(self.dim_in);
        hermitian_eig_unchecked(&d).max()
    }

    pub fn to_superoperator(&self) -> Superoperator {
        Superoperator::from_kraus(self)
    }
}

/// `G_η` with Kraus operator `η^{1/2}`. Requires `η ≤ I`.
pub fn g_eta(eta: &MetricOperator) -> Result<KrausChannel> {
    if !eta.is_subidentity() {
        return Err(Error::MetricExceedsIdentity { norm: eta.norm() });
    }
    let n = eta.dim();
    KrausChannel::new(vec![eta.sqrt().clone()], n, n)
}

/// `E_η : M ↦ Mη`. The output lives in the η-representation, so this is a
/// plain matrix map rather than a [`KrausChannel`].
pub fn apply_e_eta(eta: &MetricOperator, m: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !eta.is_subidentity() {
        return Err(Error::MetricExceedsIdentity { norm: eta.norm() });
    }
    let n = m.require_square()?;
    if n != eta.dim() {
        return Err(Error::DimMismatch {
            expected: eta.dim(),
            found: n,
        });
    }
    Ok(m * eta.matrix())
}

/// `E_η` through its factorization `R_η ∘ G_η`.
pub fn apply_e_eta_factored(eta: &MetricOperator, m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let g = apply(&g_eta(eta)?, m)?;
    representation_change(eta, &g)
}

/// Largest `κ ≤ 1` with `κη ≤ I`, i.e. `κ = min(1, 1/‖η‖)`, and the scaled
/// metric `κη`.
pub fn scaled_metric(eta: &MetricOperator) -> (f64, MetricOperator) {
    if eta.is_subidentity() {
        return (1.0, eta.clone());
    }
    let kappa = 1.0 / eta.norm();
    let scaled = eta
        .scaled(kappa)
        .expect("1/‖η‖ is positive and finite for a validated metric");
    (kappa, scaled)
}

/// `G_{κη⁻¹}` with `κ = 1/‖η⁻¹‖` and Kraus operator `√κ η^{-1/2}`.
pub fn g_kappa_eta_inv(eta: &MetricOperator) -> (f64, KrausChannel) {
    // ‖η⁻¹‖ = 1/λ_min(η)
    let kappa = eta.eigenvalues()[0];
    let n = eta.dim();
    let k = eta.inv_sqrt().scale(kappa.sqrt());
    let ch = KrausChannel::new(vec![k], n, n)
        .expect("κη⁻¹ ≤ I holds by construction of κ");
    (kappa, ch)
}

/// `Σ K ρ K†`.
pub fn apply(ch: &KrausChannel, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    if rho.shape() != (ch.dim_in, ch.dim_in) {
        return Err(Error::DimMismatch {
            expected: ch.dim_in,
            found: rho.rows(),
        });
    }
    Ok(ch
        .kraus_ops
        .iter()
        .fold(ComplexMatrix::zeros(ch.dim_out, ch.dim_out), |acc, k| {
            &acc + &k.sandwich(rho)
        }))
}

/// `outer ∘ inner`, keeping every pairwise Kraus product.
pub fn compose(outer: &KrausChannel, inner: &KrausChannel) -> Result<KrausChannel> {
    if inner.dim_out != outer.dim_in {
        return Err(Error::DimMismatch {
            expected: outer.dim_in,
            found: inner.dim_out,
        });
    }
    let ops = outer
        .kraus_ops
        .iter()
        .flat_map(|a| inner.kraus_ops.iter().map(move |b| a * b))
        .collect();
    Ok(KrausChannel {
        kraus_ops: ops,
        dim_in: inner.dim_in,
        dim_out: outer.dim_out,
    })
}

/// Choi matrix `Σ_{ij} |i⟩⟨j| ⊗ Φ(|i⟩⟨j|)`, input factor first.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiMatrix {
    pub matrix: ComplexMatrix,
    pub dim_in: usize,
    pub dim_out: usize,
}

impl ChoiMatrix {
    pub fn min_eigenvalue(&self) -> f64 {
        hermitian_eig_unchecked(&self.matrix).min()
    }

    pub fn is_psd(&self, tol: f64) -> bool {
        self.min_eigenvalue() >= -tol
    }

    pub fn rank(&self, tol: f64) -> usize {
        hermitian_eig_unchecked(&self.matrix)
            .eigenvalues
            .iter()
            .filter(|&&l| l.abs() > tol)
            .count()
    }

    /// Nearest PSD matrix in Frobenius norm: negative eigenvalues set to 0.
    pub fn clip_to_psd(&self) -> ChoiMatrix {
        let eig = hermitian_eig_unchecked(&self.matrix);
        ChoiMatrix {
            matrix: eig.apply_real_fn(|l| l.max(0.0)),
            dim_in: self.dim_in,
            dim_out: self.dim_out,
        }
    }
}

pub fn choi(ch: &KrausChannel) -> ChoiMatrix {
    ch.to_superoperator().choi()
}

/// True iff `I − Σ K†K ⪰ −1e-10`.
pub fn is_trace_nonincreasing(ch: &KrausChannel) -> bool {
    ch.trace_excess() <= TRACE_NONINCREASING_TOL
}

/// Matrix of a linear map on operators acting on row-major vectorized
/// matrices: `vec(Φ(X)) = L · vec(X)` with `vec(X)[a·d + b] = X[a][b]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Superoperator {
    matrix: ComplexMatrix,
    dim_in: usize,
    dim_out: usize,
}

impl Superoperator {
    pub fn new(matrix: ComplexMatrix, dim_in: usize, dim_out: usize) -> Result<Self> {
        if matrix.shape() != (dim_out * dim_out, dim_in * dim_in) {
            return Err(Error::DimMismatch {
                expected: dim_out * dim_out,
                found: matrix.rows(),
            });
        }
        Ok(Self {
            matrix,
            dim_in,
            dim_out,
        })
    }

    pub fn zero(dim_in: usize, dim_out: usize) -> Self {
        Self {
            matrix: ComplexMatrix::zeros(dim_out * dim_out, dim_in * dim_in),
            dim_in,
            dim_out,
        }
    }

    /// `Σ K ⊗ conj(K)`.
    pub fn from_kraus(ch: &KrausChannel) -> Self {
        let (din, dout) = (ch.dim_in, ch.dim_out);
        let matrix = ch.kraus_ops.iter().fold(
            ComplexMatrix::zeros(dout * dout, din * din),
            |acc, k| &acc + &k.kron(&k.conj()),
        );
        Self {
            matrix,
            dim_in: din,
            dim_out: dout,
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.shape() != (self.dim_in, self.dim_in) {
            return Err(Error::DimMismatch {
                expected: self.dim_in,
                found: x.rows(),
            });
        }
        let out = self.matrix.mat_vec(x.as_slice());
        ComplexMatrix::from_vec(self.dim_out, self.dim_out, out)
    }

    /// Hilbert–Schmidt adjoint: `tr(Y† Φ(X)) = tr(Φ*(Y)† X)`.
    pub fn apply_adjoint(&self, y: &ComplexMatrix) -> Result<ComplexMatrix> {
        if y.shape() != (self.dim_out, self.dim_out) {
            return Err(Error::DimMismatch {
                expected: self.dim_out,
                found: y.rows(),
            });
        }
        let out = self.matrix.dagger().mat_vec(y.as_slice());
        ComplexMatrix::from_vec(self.dim_in, self.dim_in, out)
    }

    pub fn sub(&self, rhs: &Superoperator) -> Result<Superoperator> {
        if (self.dim_in, self.dim_out) != (rhs.dim_in, rhs.dim_out) {
            return Err(Error::DimMismatch {
                expected: self.dim_in,
                found: rhs.dim_in,
            });
        }
        Ok(Superoperator {
            matrix: &self.matrix - &rhs.matrix,
            dim_in: self.dim_in,
            dim_out: self.dim_out,
        })
    }

    pub fn choi(&self) -> ChoiMatrix {
        let (din, dout) = (self.dim_in, self.dim_out);
        let matrix = ComplexMatrix::from_fn(din * dout, din * dout, |r, c| {
            let (i, a) = (r / dout, r % dout);
            let (j, b) = (c / dout, c % dout);
            self.matrix[(a * dout + b, i * din + j)]
        });
        ChoiMatrix {
            matrix,
            dim_in: din,
            dim_out: dout,
        }
    }

    pub fn from_choi(choi: &ChoiMatrix) -> Self {
        let (din, dout) = (choi.dim_in, choi.dim_out);
        let matrix = ComplexMatrix::from_fn(dout * dout, din * din, |r, c| {
            let (a, b) = (r / dout, r % dout);
            let (i, j) = (c / din, c % din);
            choi.matrix[(i * dout + a, j * dout + b)]
        });
        Self {
            matrix,
            dim_in: din,
            dim_out: dout,
        }
    }
}

/// JSON form of a channel: `{"dim_in": n, "dim_out": m, "kraus": [matrix, ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelJson {
    pub dim_in: usize,
    pub dim_out: usize,
    pub kraus: Vec<ComplexMatrix>,
}

impl ChannelJson {
    pub fn from_channel(ch: &KrausChannel) -> Self {
        Self {
            dim_in: ch.dim_in,
            dim_out: ch.dim_out,
            kraus: ch.kraus_ops.clone(),
        }
    }

    pub fn to_channel(&self) -> Result<KrausChannel> {
        KrausChannel::new(self.kraus.clone(), self.dim_in, self.dim_out)
    }
}

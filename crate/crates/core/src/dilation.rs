//! Unitary dilation of a norm-one qubit metric to a qutrit.
//!
//! For `‖η̃‖ = 1` where `η̃^{1/2}` has eigenvalues `1` and `r`, the qutrit unitary
//!
//! ```text
//!       ⎡ η̃^{1/2}       u     ⎤
//! U  =  ⎣ −e^{iθ} u†   e^{iθ} r ⎦
//! ```
//!
//! with `u` along the `r`-eigenvector and `‖u‖² = 1 − r²` satisfies
//! `P U (ρ ⊕ 0) U† P = G_η̃(ρ) ⊕ 0`, where `P` projects onto the qubit
//! subspace. Measuring `P` and keeping the `P` outcome therefore applies
//! `G_η̃` with success probability `tr(η̃ ρ)`.

use crate::error::{Error, Result};
use crate::hilbert::{check_density, MetricOperator};
use crate::linalg::{ComplexMatrix, C64, ZERO};

/// Allowed deviation of `‖η̃‖` from one.
pub const NORMALIZATION_SLACK: f64 = 1e-10;
/// Eigenvalue gap below which `η̃` is treated as the identity.
const DEGENERATE_GAP: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct DilationUnitary {
    pub matrix: ComplexMatrix,
    pub eta_tilde: MetricOperator,
    pub theta: f64,
    /// Smaller eigenvalue of `η̃^{1/2}`.
    pub r_small: f64,
    /// Top block of the third column.
    pub u: Vec<C64>,
}

/// `η̃ = η/‖η‖` and the scale `‖η‖`, so that `G_η = ‖η‖ G_η̃`.
pub fn normalize_metric(eta: &MetricOperator) -> (MetricOperator, f64) {
    let norm = eta.norm();
    if norm == 1.0 {
        return (eta.clone(), 1.0);
    }
    let scaled = eta
        .scaled(1.0 / norm)
        .expect("a validated metric has a positive finite norm");
    (scaled, norm)
}

/// The dilation with the default gauge: the first nonzero entry of `u` is
/// real and positive.
pub fn build_dilation(eta_tilde: &MetricOperator, theta: f64) -> Result<DilationUnitary> {
    build_dilation_with_phase(eta_tilde, theta, 0.0)
}

/// As [`build_dilation`], with `u` multiplied by `e^{iα}`.
pub fn build_dilation_with_phase(
    eta_tilde: &MetricOperator,
    theta: f64,
    alpha: f64,
) -> Result<DilationUnitary> {
    if eta_tilde.dim() != 2 {
        return Err(Error::DimMismatch {
            expected: 2,
            found: eta_tilde.dim(),
        });
    }
    if (eta_tilde.norm() - 1.0).abs() > NORMALIZATION_SLACK {
        return Err(Error::NotNormalized {
            norm: eta_tilde.norm(),
        });
    }
    let lambda = eta_tilde.eigenvalues();
    let r_small = lambda[0].sqrt();
    let u: Vec<C64> = if lambda[1] - lambda[0] <= DEGENERATE_GAP {
        vec![ZERO; 2]
    } else {
        // 1 − r² = λ_max − λ_min up to the normalization slack
        let len = (1.0 - lambda[0]).max(0.0).sqrt();
        let phase = C64::from_polar(len, alpha);
        eta_tilde
            .eig()
            .eigenvector(0)
            .into_iter()
            .map(|z| z * phase)
            .collect()
    };
    let e = C64::from_polar(1.0, theta);
    let half = eta_tilde.sqrt();
    let matrix = ComplexMatrix::from_fn(3, 3, |i, j| match (i, j) {
        (0..=1, 0..=1) => half[(i, j)],
        (0..=1, 2) => u[i],
        (2, 0..=1) => -e * u[j].conj(),
        _ => e * r_small,
    });
    Ok(DilationUnitary {
        matrix,
        eta_tilde: eta_tilde.clone(),
        theta,
        r_small,
        u,
    })
}

/// `ρ ↦ ρ ⊕ 0` from a qubit into a qutrit.
pub fn embed(rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    if rho.shape() != (2, 2) {
        return Err(Error::DimMismatch {
            expected: 2,
            found: rho.rows(),
        });
    }
    Ok(rho.direct_sum(&ComplexMatrix::zeros(1, 1)))
}

/// Applies `U`, measures `{P, 1 − P}` and keeps the `P` branch. Returns the
/// unnormalized qubit block of `U σ U†` and its trace, the probability of
/// the `P` outcome.
pub fn postselect(dil: &DilationUnitary, sigma: &ComplexMatrix) -> Result<(ComplexMatrix, f64)> {
    if sigma.shape() != (3, 3) {
        return Err(Error::DimMismatch {
            expected: 3,
            found: sigma.rows(),
        });
    }
    check_density(sigma)?;
    let block = dil.matrix.sandwich(sigma).block(0, 0, 2, 2).hermitian_part();
    let prob = block.trace().re;
    Ok((block, prob))
}

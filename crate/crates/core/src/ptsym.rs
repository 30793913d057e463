//! The qubit PT-symmetric Hamiltonian
//!
//! ```text
//! H = [[r e^{iφ}, s], [s, r e^{-iφ}]],   s > r sin φ ≥ 0,
//! ```
//!
//! its canonical metric η₂ (which makes `H` quasi-Hermitian,
//! `H† = η₂ H η₂⁻¹`), the Hermitian Hamiltonian `h = η₂^{1/2} H η₂^{-1/2}`,
//! and the non-unitary propagator `U = exp(−iHt)`.

use serde::{Deserialize, Serialize};

use crate::channels::{compose, g_eta, g_kappa_eta_inv, KrausChannel};
use crate::error::{Error, Result};
use crate::hilbert::{check_nonzero_density, validate_metric, MetricOperator};
use crate::linalg::{matrix_exp_hermitian_generator, ComplexMatrix, C64, I, ONE};

/// `(r, s, φ)` with `r, s` in energy units and `φ` in radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PtHamiltonian {
    pub r: f64,
    pub s: f64,
    pub phi: f64,
}

impl PtHamiltonian {
    /// Checks `s > r sin φ ≥ 0`.
    pub fn new(r: f64, s: f64, phi: f64) -> Result<Self> {
        let p = Self { r, s, phi };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let Self { r, s, phi } = *self;
        if !(r.is_finite() && s.is_finite() && phi.is_finite()) || r < 0.0 || s <= 0.0 {
            return Err(Error::NegativeParameters);
        }
        let r_sin_phi = self.r_sin_phi();
        if r_sin_phi < 0.0 {
            return Err(Error::NegativeParameters);
        }
        if s <= r_sin_phi {
            return Err(Error::BrokenPtRegime { s, r_sin_phi });
        }
        Ok(())
    }

    pub fn r_sin_phi(&self) -> f64 {
        self.r * self.phi.sin()
    }

    pub fn matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_rows(&[
            [C64::from_polar(self.r, self.phi), C64::new(self.s, 0.0)],
            [C64::new(self.s, 0.0), C64::from_polar(self.r, -self.phi)],
        ])
    }

    /// `√(s² − r² sin²φ)`, half the gap between the two real eigenvalues.
    pub fn omega(&self) -> f64 {
        let a = self.r_sin_phi();
        (self.s * self.s - a * a).sqrt()
    }

    /// `r cos φ ± ω`, ascending.
    pub fn energies(&self) -> [f64; 2] {
        let mean = self.r * self.phi.cos();
        [mean - self.omega(), mean + self.omega()]
    }
}

/// Everything derived from a [`PtHamiltonian`].
#[derive(Debug, Clone, PartialEq)]
pub struct PtSystem {
    pub hamiltonian: PtHamiltonian,
    /// `[H]`
    pub h_matrix: ComplexMatrix,
    pub eta2: MetricOperator,
    pub eta2_inv: MetricOperator,
    /// `1/‖η₂⁻¹‖ = (s − r sin φ)/(s + r sin φ)`
    pub kappa: f64,
    /// `η₂^{1/2} H η₂^{-1/2}`
    pub h_pt_hermitian: ComplexMatrix,
}

/// `η₂ = (1/(s + r sin φ)) [[s, −i r sin φ], [i r sin φ, s]]`.
pub fn eta2_matrix(p: &PtHamiltonian) -> ComplexMatrix {
    let a = p.r_sin_phi();
    let k = 1.0 / (p.s + a);
    ComplexMatrix::from_rows(&[
        [C64::new(p.s * k, 0.0), C64::new(0.0, -a * k)],
        [C64::new(0.0, a * k), C64::new(p.s * k, 0.0)],
    ])
}

/// `η₂⁻¹ = (1/(s − r sin φ)) [[s, i r sin φ], [−i r sin φ, s]]`.
pub fn eta2_inv_matrix(p: &PtHamiltonian) -> ComplexMatrix {
    let a = p.r_sin_phi();
    let k = 1.0 / (p.s - a);
    ComplexMatrix::from_rows(&[
        [C64::new(p.s * k, 0.0), C64::new(0.0, a * k)],
        [C64::new(0.0, -a * k), C64::new(p.s * k, 0.0)],
    ])
}

pub fn build_pt_system(p: PtHamiltonian) -> Result<PtSystem> {
    p.validate()?;
    let a = p.r_sin_phi();
    let h_matrix = p.matrix();
    let eta2 = validate_metric(&eta2_matrix(&p))?;
    let eta2_inv = validate_metric(&eta2_inv_matrix(&p))?;
    let h_pt_hermitian = &(eta2.sqrt() * &h_matrix) * eta2.inv_sqrt();
    Ok(PtSystem {
        hamiltonian: p,
        h_matrix,
        eta2,
        eta2_inv,
        kappa: (p.s - a) / (p.s + a),
        h_pt_hermitian,
    })
}

/// `exp(−iMt)` for a 2×2 matrix, written as `e^{−iat}(cos(ωt) I − i sin(ωt)/ω B)`
/// where `a = tr M / 2`, `B = M − aI` and `B² = ω² I`.
pub(crate) fn expm_2x2(m: &ComplexMatrix, t: f64) -> ComplexMatrix {
    assert_eq!(m.shape(), (2, 2));
    let a = m.trace() * 0.5;
    let b = m - &ComplexMatrix::identity(2).scale_c(a);
    let omega_sq = -(b[(0, 0)] * b[(1, 1)] - b[(0, 1)] * b[(1, 0)]);
    let omega = omega_sq.sqrt();
    let wt = omega * t;
    // sin(ωt)/ω, with the series near ω = 0
    let sinc = if wt.norm() < 1e-4 {
        let w2 = wt * wt;
        (ONE - w2 / 6.0 + w2 * w2 / 120.0) * t
    } else {
        wt.sin() / omega
    };
    let cos = wt.cos();
    let prefactor = (-I * a * t).exp();
    let core = &ComplexMatrix::identity(2).scale_c(cos) - &b.scale_c(I * sinc);
    core.scale_c(prefactor)
}

/// `U_PT = exp(−i H t)`, generally not unitary.
pub fn u_pt(sys: &PtSystem, t: f64) -> ComplexMatrix {
    expm_2x2(&sys.h_matrix, t)
}

/// `exp(−i h t)`, the unitary that `U_PT` is similar to.
pub fn hermitized_propagator(sys: &PtSystem, t: f64) -> Result<ComplexMatrix> {
    matrix_exp_hermitian_generator(&sys.h_pt_hermitian, t)
}

/// Closed form of `ρ ↦ κ U ρ U†`: the normalized output state and the
/// success probability `κ tr(U ρ U†)`.
pub fn analytic_pt_evolution(
    sys: &PtSystem,
    rho: &ComplexMatrix,
    t: f64,
) -> Result<(ComplexMatrix, f64)> {
    check_nonzero_density(rho, 2)?;
    let out = u_pt(sys, t).sandwich(rho);
    let tr = out.trace().re;
    Ok((out.scale(1.0 / tr), sys.kappa * tr))
}

/// `G_{κη₂⁻¹} ∘ U_h ∘ G_{η₂}` as a Kraus channel, where `U_h` is the
/// unitary channel of `exp(−iht)`.
pub fn pt_channel(sys: &PtSystem, t: f64) -> Result<KrausChannel> {
    let (_, undo) = g_kappa_eta_inv(&sys.eta2);
    let evolve = KrausChannel::unitary(&hermitized_propagator(sys, t)?)?;
    compose(&undo, &compose(&evolve, &g_eta(&sys.eta2)?)?)
}

/// JSON parameter block `{"r": .., "s": .., "phi": .., "t": ..}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PtParams {
    pub r: f64,
    pub s: f64,
    pub phi: f64,
    pub t: f64,
}

impl PtParams {
    pub fn hamiltonian(&self) -> PtHamiltonian {
        PtHamiltonian {
            r: self.r,
            s: self.s,
            phi: self.phi,
        }
    }
}

//! Metric operators, the channels that change a Hilbert-space inner
//! product, and a qutrit simulation of qubit PT-symmetric dynamics.
//!
//! A metric `η` (Hermitian, positive definite) defines the inner product
//! `⟨φ|η|ψ⟩`. Switching to it is the map `E_η : M ↦ Mη`, which factors into
//! the completely positive `G_η : ρ ↦ η^{1/2} ρ η^{1/2}` and a change of
//! representation. [`dilation`] realizes `G_η` on a qubit as a qutrit
//! unitary followed by postselection, [`montecarlo`] runs that procedure
//! shot by shot, and [`tomography`] lets a verifier check a prover that
//! claims to do so.
//!
//! ```
//! use metriq::{build_pt_system, chained_success_probability, ComplexMatrix, PtHamiltonian};
//!
//! let sys = build_pt_system(PtHamiltonian::new(1.0, 2.0, std::f64::consts::FRAC_PI_6)?)?;
//! let rho = ComplexMatrix::real_diag(&[1.0, 0.0]);
//! let p = chained_success_probability(&sys, &rho, 0.0)?;
//! assert!((p - 0.6).abs() < 1e-12);
//! # Ok::<(), metriq::Error>(())
//! ```

pub mod channels;
pub mod dilation;
pub mod error;
pub mod hilbert;
pub mod linalg;
pub mod montecarlo;
pub mod ptsym;
pub mod tomography;

#[cfg(test)]
mod testutil;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/metrics.md")]
    mod metrics {}
    #[doc = include_str!("../../../book/src/channels.md")]
    mod channels {}
    #[doc = include_str!("../../../book/src/dilation.md")]
    mod dilation {}
    #[doc = include_str!("../../../book/src/pt-symmetry.md")]
    mod pt_symmetry {}
    #[doc = include_str!("../../../book/src/monte-carlo.md")]
    mod monte_carlo {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}

pub use channels::{
    apply, apply_e_eta, choi, compose, g_eta, g_kappa_eta_inv, scaled_metric, ChannelJson, ChoiMatrix,
    KrausChannel, Superoperator,
};
pub use dilation::{build_dilation, embed, normalize_metric, postselect, DilationUnitary};
pub use error::{Error, Result};
pub use hilbert::{
    eta_adjoint, eta_inner, lift, lift_eta, representation_change, validate_metric, MetricJson,
    MetricOperator, StateVector,
};
pub use linalg::{
    hermitian_eig, kron, matrix_exp_hermitian_generator, operator_norm, psd_sqrt, trace_norm,
    ComplexMatrix, HermitianEigensystem, C64,
};
pub use montecarlo::{
    chained_success_probability, simulate_g_eta, simulate_pt, RngStream, SimulationRecord,
};
pub use ptsym::{analytic_pt_evolution, build_pt_system, u_pt, PtHamiltonian, PtParams, PtSystem};
pub use tomography::{
    default_design, one_to_one_norm, reconstruct, run_prover, threshold, verify, ProverModel,
    ReconstructedChannel, TomographyDesign, VerificationReport, Verdict,
};

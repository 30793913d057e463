//! Shot-by-shot simulation of the postselected procedures.
//!
//! Each attempt consumes one fresh copy of the input, runs the dilation
//! circuit(s) and keeps the copy only if every projective measurement lands
//! in the qubit subspace. The post-measurement state given success is
//! deterministic, so the only random quantity is the number of copies
//! spent to collect `N` successes.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dilation::{build_dilation, embed, normalize_metric, postselect};
use crate::error::{Error, Result};
use crate::hilbert::{check_nonzero_density, MetricOperator};
use crate::linalg::ComplexMatrix;
use crate::ptsym::{hermitized_propagator, u_pt, PtSystem};

/// A run gives up after this many copies per requested success.
pub const COPY_BUDGET_PER_SUCCESS: u64 = 1000;

/// Address of a reproducible stream of uniforms.
///
/// Draw `k` of stream `(seed, stream_id)` is the `k`-th 64-bit output of
/// ChaCha8 keyed by `seed` on stream `stream_id`, so any draw can be
/// regenerated independently of the others.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        Self { seed, stream_id }
    }

    /// An independent stream for sub-task `index`.
    pub fn child(&self, index: u64) -> Self {
        Self {
            seed: self.seed,
            stream_id: splitmix64(self.stream_id ^ splitmix64(index.wrapping_add(1))),
        }
    }

    pub fn sampler(&self) -> UniformSampler {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        UniformSampler { rng, index: 0 }
    }

    /// Draw number `index` without generating the ones before it.
    pub fn uniform_at(&self, index: u64) -> f64 {
        let mut s = self.sampler();
        s.rng.set_word_pos(2 * index as u128);
        s.index = index;
        s.next_uniform()
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Sequential reader of an [`RngStream`].
#[derive(Debug, Clone)]
pub struct UniformSampler {
    rng: ChaCha8Rng,
    index: u64,
}

impl UniformSampler {
    /// Uniform on `[0, 1)` with 53 random bits.
    pub fn next_uniform(&mut self) -> f64 {
        self.index += 1;
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Number of uniforms drawn so far.
    pub fn position(&self) -> u64 {
        self.index
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationRecord {
    pub requested_successes: u64,
    /// Equal to `requested_successes` unless the copy budget ran out.
    pub successes: u64,
    pub total_copies_used: u64,
    /// `‖η‖·successes / total_copies_used`
    pub success_ratio: f64,
    /// Normalized state of a kept copy, or zero if nothing was kept.
    pub output_state_estimate: ComplexMatrix,
    pub seed: u64,
    pub stream_id: u64,
}

/// Standard error of a success-frequency estimate over `total` attempts.
pub fn binomial_sigma(p: f64, total: u64) -> f64 {
    (p * (1.0 - p) / total as f64).sqrt()
}

/// Draws copies until `n` attempts succeed or the budget is spent.
/// `attempt` decides the fate of one copy. Returns `(successes, copies)`.
fn collect_successes(
    n: u64,
    certain_failure: bool,
    sampler: &mut UniformSampler,
    mut attempt: impl FnMut(&mut UniformSampler) -> bool,
) -> (u64, u64) {
    let budget = n.saturating_mul(COPY_BUDGET_PER_SUCCESS);
    if certain_failure {
        // no draw can succeed, so skip straight to the end of the budget
        return (0, budget);
    }
    let (mut successes, mut copies) = (0, 0);
    while successes < n && copies < budget {
        copies += 1;
        if attempt(sampler) {
            successes += 1;
        }
    }
    (successes, copies)
}

fn check_shots(n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument("N must be at least 1".into()));
    }
    Ok(())
}

fn normalized_or_zero(block: ComplexMatrix, prob: f64, successes: u64) -> ComplexMatrix {
    if successes == 0 || prob <= 0.0 {
        ComplexMatrix::zeros(block.rows(), block.cols())
    } else {
        block.scale(1.0 / prob)
    }
}

fn require_qubit_subidentity(eta: &MetricOperator) -> Result<()> {
    if eta.dim() != 2 {
        return Err(Error::DimMismatch {
            expected: 2,
            found: eta.dim(),
        });
    }
    if !eta.is_subidentity() {
        return Err(Error::MetricExceedsIdentity { norm: eta.norm() });
    }
    Ok(())
}

/// Simulates `G_η` on a qubit state through the dilation of `η/‖η‖`.
pub fn simulate_g_eta(
    eta: &MetricOperator,
    rho: &ComplexMatrix,
    n: u64,
    rng: RngStream,
) -> Result<SimulationRecord> {
    require_qubit_subidentity(eta)?;
    check_nonzero_density(rho, 2)?;
    check_shots(n)?;
    let (eta_tilde, scale) = normalize_metric(eta);
    let dil = build_dilation(&eta_tilde, 0.0)?;
    let (block, p) = postselect(&dil, &embed(rho)?)?;
    let mut sampler = rng.sampler();
    let (successes, copies) =
        collect_successes(n, p <= 0.0, &mut sampler, |s| s.next_uniform() < p);
    Ok(SimulationRecord {
        requested_successes: n,
        successes,
        total_copies_used: copies,
        success_ratio: scale * successes as f64 / copies as f64,
        output_state_estimate: normalized_or_zero(block, p, successes),
        seed: rng.seed,
        stream_id: rng.stream_id,
    })
}

/// As [`simulate_g_eta`], for a qutrit input `σ`. The copy is first
/// measured with `{P, 1 − P}` and only the qubit branch is fed to the
/// dilation, so the process is `G_η ⊕ 0`; both measurements must succeed.
/// The returned state is a 3×3 matrix supported on the qubit block.
pub fn simulate_g_eta_qutrit(
    eta: &MetricOperator,
    sigma: &ComplexMatrix,
    n: u64,
    rng: RngStream,
) -> Result<SimulationRecord> {
    require_qubit_subidentity(eta)?;
    check_nonzero_density(sigma, 3)?;
    check_shots(n)?;
    let (eta_tilde, scale) = normalize_metric(eta);
    let dil = build_dilation(&eta_tilde, 0.0)?;
    let projected = embed(&sigma.block(0, 0, 2, 2))?;
    let (block, p) = postselect(&dil, &projected)?;
    let mut sampler = rng.sampler();
    let (successes, copies) =
        collect_successes(n, p <= 0.0, &mut sampler, |s| s.next_uniform() < p);
    Ok(SimulationRecord {
        requested_successes: n,
        successes,
        total_copies_used: copies,
        success_ratio: scale * successes as f64 / copies as f64,
        output_state_estimate: embed(&normalized_or_zero(block, p, successes))?,
        seed: rng.seed,
        stream_id: rng.stream_id,
    })
}

/// Intermediate quantities of the three-step PT procedure.
#[derive(Debug, Clone, PartialEq)]
pub struct PtSteps {
    /// Success probability of the first postselection, `tr(η₂^{1/2} ρ η₂^{1/2})`.
    pub p_first: f64,
    /// Success probability of the second postselection given the first.
    pub p_second: f64,
    /// Unnormalized qubit block after the second postselection, given the first.
    pub block: ComplexMatrix,
    /// `‖η₂‖ · ‖κη₂⁻¹‖`, one up to rounding.
    pub scale: f64,
}

/// Runs the deterministic part of the PT procedure: dilate `G_η₂`,
/// evolve with `exp(−i(h ⊕ 0)t)`, dilate `G_{κη₂⁻¹}`.
pub fn pt_steps(sys: &PtSystem, rho: &ComplexMatrix, t: f64) -> Result<PtSteps> {
    sys.hamiltonian.validate()?;
    check_nonzero_density(rho, 2)?;
    let (eta_first, scale_first) = normalize_metric(&sys.eta2);
    let (eta_second, scale_second) = normalize_metric(&sys.eta2_inv.scaled(sys.kappa)?);
    let first = build_dilation(&eta_first, 0.0)?;
    let second = build_dilation(&eta_second, 0.0)?;

    let (b1, p_first) = postselect(&first, &embed(rho)?)?;
    let sigma = embed(&b1.scale(1.0 / p_first))?;
    let w = hermitized_propagator(sys, t)?.direct_sum(&ComplexMatrix::identity(1));
    let sigma = w.sandwich(&sigma).hermitian_part();
    let (block, p_second) = postselect(&second, &sigma)?;
    Ok(PtSteps {
        p_first,
        p_second,
        block,
        scale: scale_first * scale_second,
    })
}

/// Simulates `ρ ↦ κ U_PT ρ U_PT†` on a qutrit. Every attempt draws two
/// uniforms, one per postselection; a failure at either one discards the
/// copy and the next attempt starts over with a fresh one.
pub fn simulate_pt(
    sys: &PtSystem,
    rho: &ComplexMatrix,
    t: f64,
    n: u64,
    rng: RngStream,
) -> Result<SimulationRecord> {
    check_shots(n)?;
    let steps = pt_steps(sys, rho, t)?;
    let (p1, p2) = (steps.p_first, steps.p_second);
    let mut sampler = rng.sampler();
    let (successes, copies) = collect_successes(n, p1 <= 0.0 || p2 <= 0.0, &mut sampler, |s| {
        let first = s.next_uniform() < p1;
        let second = s.next_uniform() < p2;
        first && second
    });
    Ok(SimulationRecord {
        requested_successes: n,
        successes,
        total_copies_used: copies,
        success_ratio: steps.scale * successes as f64 / copies as f64,
        output_state_estimate: normalized_or_zero(steps.block, p2, successes),
        seed: rng.seed,
        stream_id: rng.stream_id,
    })
}

/// `κ tr(U_PT ρ U_PT†)`, the per-copy success probability of [`simulate_pt`].
pub fn chained_success_probability(sys: &PtSystem, rho: &ComplexMatrix, t: f64) -> Result<f64> {
    sys.hamiltonian.validate()?;
    check_nonzero_density(rho, 2)?;
    Ok(sys.kappa * u_pt(sys, t).sandwich(rho).trace().re)
}

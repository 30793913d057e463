//! Verification of a claimed inner-product change by process tomography.
//!
//! The verifier sends qutrit states `ρᵢ` from an informationally complete
//! design, the prover returns processed copies together with success
//! ratios, and the verifier reconstructs the prover's map from
//! `ŷᵢ = ratioᵢ · stateᵢ`. The prover is accepted when the induced
//! `1 → 1` distance between the reconstruction and `G_η ⊕ 0` is at most
//! `D_th = (λ₁ − λ₂)/3`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::{ChoiMatrix, KrausChannel, Superoperator};
use crate::error::{Error, Result};
use crate::hilbert::{check_nonzero_density, MetricOperator};
use crate::linalg::{hermitian_eig_unchecked, ComplexMatrix, C64, ONE, ZERO};
use crate::montecarlo::{simulate_g_eta_qutrit, RngStream, COPY_BUDGET_PER_SUCCESS};

const QUTRIT: usize = 3;
/// Choi eigenvalues below `−CP_PROJECTION_TOL` trigger eigenvalue clipping.
pub const CP_PROJECTION_TOL: f64 = 1e-8;
/// Relative cutoff for the rank of the design Gram matrix.
const GRAM_RANK_TOL: f64 = 1e-10;
/// Metrics whose eigenvalues are closer than this have no threshold.
pub const DEGENERACY_TOL: f64 = 1e-10;
const UNITARY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct TomographyDesign {
    pub input_states: Vec<ComplexMatrix>,
    pub description: String,
}

/// `|j⟩`, `(|j⟩ + |k⟩)/√2` and `(|j⟩ + i|k⟩)/√2` for `j < k`.
pub fn default_design() -> TomographyDesign {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut kets: Vec<[C64; 3]> = (0..QUTRIT)
        .map(|j| {
            let mut v = [ZERO; 3];
            v[j] = ONE;
            v
        })
        .collect();
    for j in 0..QUTRIT {
        for k in j + 1..QUTRIT {
            for phase in [ONE, C64::new(0.0, 1.0)] {
                let mut v = [ZERO; 3];
                v[j] = C64::new(h, 0.0);
                v[k] = phase * h;
                kets.push(v);
            }
        }
    }
    TomographyDesign {
        input_states: kets.iter().map(|v| ComplexMatrix::outer(v, v)).collect(),
        description: "qutrit basis states and pairwise |j>+|k>, |j>+i|k> superpositions".into(),
    }
}

impl TomographyDesign {
    /// `[vec ρ₁ … vec ρₘ]`, one column per input.
    fn design_matrix(&self) -> ComplexMatrix {
        let d2 = QUTRIT * QUTRIT;
        ComplexMatrix::from_fn(d2, self.input_states.len(), |r, c| {
            self.input_states[c].as_slice()[r]
        })
    }

    /// Rank of the Gram matrix `tr(ρᵢ ρⱼ)`.
    pub fn gram_rank(&self) -> usize {
        let x = self.design_matrix();
        let gram = (&x.dagger() * &x).hermitian_part();
        let eig = hermitian_eig_unchecked(&gram);
        let cutoff = GRAM_RANK_TOL * eig.max().max(f64::MIN_POSITIVE);
        eig.eigenvalues.iter().filter(|&&l| l > cutoff).count()
    }
}

/// How the prover processes the verifier's states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ProverModel {
    /// Runs the dilation procedure for `G_η ⊕ 0`.
    Honest,
    /// Applies `(U_j ⊕ 1)† • (U_j ⊕ 1)` with probability `p_j` and discards
    /// the copy with probability `1 − Σ p_j`.
    Dishonest {
        unitaries: Vec<ComplexMatrix>,
        probabilities: Vec<f64>,
    },
}

impl ProverModel {
    pub fn dishonest(unitaries: Vec<ComplexMatrix>, probabilities: Vec<f64>) -> Result<Self> {
        let model = ProverModel::Dishonest {
            unitaries,
            probabilities,
        };
        model.validate()?;
        Ok(model)
    }

    /// Checks that the unitaries are 2×2 unitaries and that the
    /// probabilities are nonnegative with `0 < Σ p_j ≤ 1`.
    pub fn validate(&self) -> Result<()> {
        let ProverModel::Dishonest {
            unitaries,
            probabilities,
        } = self
        else {
            return Ok(());
        };
        if unitaries.len() != probabilities.len() || unitaries.is_empty() {
            return Err(Error::InvalidArgument(format!(
                "dishonest prover needs one probability per unitary, got {} unitaries and {} probabilities",
                unitaries.len(),
                probabilities.len()
            )));
        }
        for u in unitaries {
            if u.shape() != (2, 2) {
                return Err(Error::DimMismatch {
                    expected: 2,
                    found: u.rows(),
                });
            }
            let defect = (&(&u.dagger() * u) - &ComplexMatrix::identity(2)).frobenius_norm();
            if defect.is_nan() || defect > UNITARY_TOL {
                return Err(Error::InvalidArgument(format!(
                    "dishonest prover matrix is not unitary (defect {defect:.3e})"
                )));
            }
        }
        if probabilities.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::InvalidArgument(
                "dishonest prover probabilities must be nonnegative".into(),
            ));
        }
        let total: f64 = probabilities.iter().sum();
        if !(total > 0.0 && total <= 1.0 + 1e-12) {
            return Err(Error::InvalidArgument(format!(
                "dishonest prover probabilities must sum to a value in (0, 1], got {total}"
            )));
        }
        Ok(())
    }

    /// `1 − Σ p_j` for a dishonest prover, zero for an honest one.
    pub fn discard_probability(&self) -> f64 {
        match self {
            ProverModel::Honest => 0.0,
            ProverModel::Dishonest { probabilities, .. } => {
                (1.0 - probabilities.iter().sum::<f64>()).max(0.0)
            }
        }
    }

    /// The qutrit process the prover actually implements.
    pub fn channel(&self, eta: &MetricOperator) -> Result<KrausChannel> {
        self.validate()?;
        match self {
            ProverModel::Honest => honest_channel(eta),
            ProverModel::Dishonest {
                unitaries,
                probabilities,
            } => {
                let ops = unitaries
                    .iter()
                    .zip(probabilities)
                    .map(|(u, &p)| lift_unitary(u).dagger().scale(p.sqrt()))
                    .collect();
                KrausChannel::new(ops, QUTRIT, QUTRIT)
            }
        }
    }
}

fn lift_unitary(u: &ComplexMatrix) -> ComplexMatrix {
    u.direct_sum(&ComplexMatrix::identity(1))
}

/// `G_η ⊕ 0` on a qutrit, with Kraus operator `η^{1/2} ⊕ 0`.
pub fn honest_channel(eta: &MetricOperator) -> Result<KrausChannel> {
    if eta.dim() != 2 {
        return Err(Error::DimMismatch {
            expected: 2,
            found: eta.dim(),
        });
    }
    if !eta.is_subidentity() {
        return Err(Error::MetricExceedsIdentity { norm: eta.norm() });
    }
    let k = eta.sqrt().direct_sum(&ComplexMatrix::zeros(1, 1));
    KrausChannel::new(vec![k], QUTRIT, QUTRIT)
}

/// What the prover sends back for one design input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProverResponse {
    pub success_ratio: f64,
    /// Normalized state of the returned copies (zero if none came back).
    pub returned_state: ComplexMatrix,
    /// Copies consumed, zero in exact mode.
    pub copies_used: u64,
}

impl ProverResponse {
    /// `ratio · state`, the verifier's estimate of the unnormalized output.
    pub fn unnormalized_output(&self) -> ComplexMatrix {
        self.returned_state.scale(self.success_ratio)
    }
}

fn check_design_inputs(design: &TomographyDesign) -> Result<()> {
    for rho in &design.input_states {
        check_nonzero_density(rho, QUTRIT)?;
    }
    Ok(())
}

/// Runs the prover on every design input with `n` kept copies each. Input
/// `i` draws from `rng.child(i)`, so inputs run in parallel and the result
/// does not depend on scheduling.
pub fn run_prover(
    model: &ProverModel,
    eta: &MetricOperator,
    design: &TomographyDesign,
    n: u64,
    rng: RngStream,
) -> Result<Vec<ProverResponse>> {
    model.validate()?;
    check_design_inputs(design)?;
    if n == 0 {
        return Err(Error::InvalidArgument("N must be at least 1".into()));
    }
    design
        .input_states
        .par_iter()
        .enumerate()
        .map(|(i, rho)| {
            let stream = rng.child(i as u64);
            match model {
                ProverModel::Honest => {
                    let rec = simulate_g_eta_qutrit(eta, rho, n, stream)?;
                    Ok(ProverResponse {
                        success_ratio: rec.success_ratio,
                        returned_state: rec.output_state_estimate,
                        copies_used: rec.total_copies_used,
                    })
                }
                ProverModel::Dishonest {
                    unitaries,
                    probabilities,
                } => Ok(run_dishonest(unitaries, probabilities, rho, n, stream)),
            }
        })
        .collect()
}

fn run_dishonest(
    unitaries: &[ComplexMatrix],
    probabilities: &[f64],
    rho: &ComplexMatrix,
    n: u64,
    rng: RngStream,
) -> ProverResponse {
    let mut counts = vec![0u64; unitaries.len()];
    let (mut kept, mut copies) = (0u64, 0u64);
    let budget = n.saturating_mul(COPY_BUDGET_PER_SUCCESS);
    let mut sampler = rng.sampler();
    while kept < n && copies < budget {
        copies += 1;
        let mut u = sampler.next_uniform();
        for (j, &p) in probabilities.iter().enumerate() {
            if u < p {
                counts[j] += 1;
                kept += 1;
                break;
            }
            u -= p;
        }
    }
    let mut state = ComplexMatrix::zeros(QUTRIT, QUTRIT);
    if kept > 0 {
        for (u, &c) in unitaries.iter().zip(&counts) {
            if c > 0 {
                let w = lift_unitary(u).dagger();
                state = &state + &w.sandwich(rho).scale(c as f64 / kept as f64);
            }
        }
    }
    ProverResponse {
        success_ratio: kept as f64 / copies as f64,
        returned_state: state.hermitian_part(),
        copies_used: copies,
    }
}

/// Responses without shot noise: the ratio is the exact output trace and
/// the state the exact normalized output.
pub fn exact_responses(
    model: &ProverModel,
    eta: &MetricOperator,
    design: &TomographyDesign,
) -> Result<Vec<ProverResponse>> {
    check_design_inputs(design)?;
    let ch = model.channel(eta)?;
    design
        .input_states
        .iter()
        .map(|rho| {
            let out = crate::channels::apply(&ch, rho)?;
            let tr = out.trace().re;
            let (ratio, state) = if tr > 0.0 {
                (tr, out.scale(1.0 / tr))
            } else {
                (0.0, ComplexMatrix::zeros(QUTRIT, QUTRIT))
            };
            Ok(ProverResponse {
                success_ratio: ratio,
                returned_state: state,
                copies_used: 0,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructedChannel {
    /// The reconstructed map; equal to the map of `choi`.
    pub linear_map: Superoperator,
    pub choi: ChoiMatrix,
    /// Whether negative Choi eigenvalues were clipped.
    pub cp_projected: bool,
    /// `None` for noiseless responses.
    pub shots_per_input: Option<u64>,
    pub seed: Option<u64>,
}

impl ReconstructedChannel {
    pub fn with_provenance(mut self, shots_per_input: u64, seed: u64) -> Self {
        self.shots_per_input = Some(shots_per_input);
        self.seed = Some(seed);
        self
    }
}

/// Least-squares linear inversion `L = Y X† (X X†)⁻¹` followed by Choi
/// eigenvalue clipping when the result is not CP within
/// [`CP_PROJECTION_TOL`].
pub fn reconstruct(
    responses: &[ProverResponse],
    design: &TomographyDesign,
) -> Result<ReconstructedChannel> {
    let m = design.input_states.len();
    if responses.len() != m {
        return Err(Error::DimMismatch {
            expected: m,
            found: responses.len(),
        });
    }
    let d2 = QUTRIT * QUTRIT;
    let rank = design.gram_rank();
    if rank < d2 {
        return Err(Error::SingularDesign { rank, needed: d2 });
    }
    for r in responses {
        if r.returned_state.shape() != (QUTRIT, QUTRIT) {
            return Err(Error::DimMismatch {
                expected: QUTRIT,
                found: r.returned_state.rows(),
            });
        }
    }
    let x = design.design_matrix();
    let outputs: Vec<ComplexMatrix> = responses.iter().map(|r| r.unnormalized_output()).collect();
    let y = ComplexMatrix::from_fn(d2, m, |r, c| outputs[c].as_slice()[r]);
    let xd = x.dagger();
    let normal = &x * &xd;
    // L·(X X†) = Y X†  ⇔  (X X†)† L† = (Y X†)†, and X X† is Hermitian
    let l = normal.solve(&(&y * &xd).dagger())?.dagger();
    let raw = Superoperator::new(l, QUTRIT, QUTRIT)?;
    let choi = raw.choi();
    let choi = ChoiMatrix {
        matrix: choi.matrix.hermitian_part(),
        ..choi
    };
    let (linear_map, choi, cp_projected) = if choi.min_eigenvalue() < -CP_PROJECTION_TOL {
        let clipped = choi.clip_to_psd();
        (Superoperator::from_choi(&clipped), clipped, true)
    } else {
        (raw, choi, false)
    };
    Ok(ReconstructedChannel {
        linear_map,
        choi,
        cp_projected,
        shots_per_input: None,
        seed: None,
    })
}

/// Settings of the search behind [`one_to_one_norm`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormSearch {
    /// Haar-random starting points, in addition to the basis states.
    pub random_starts: usize,
    pub seed: u64,
    /// The ascent stops once `‖(A − ⟨ψ|A|ψ⟩)ψ‖` drops below this, and the
    /// coordinate refinement once its step does.
    pub gradient_tol: f64,
    pub max_iterations: usize,
    /// How many of the best ascent results get coordinate refinement.
    pub refined: usize,
}

impl Default for NormSearch {
    fn default() -> Self {
        Self {
            random_starts: 64,
            seed: 0x6e6f_726d,
            gradient_tol: 1e-8,
            max_iterations: 100,
            refined: 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormEstimate {
    pub value: f64,
    /// Unit vector attaining `value`.
    pub maximizer: Vec<C64>,
}

/// `max ‖Φ(|ψ⟩⟨ψ|)‖_tr` over unit vectors, for a Hermiticity-preserving `Φ`.
pub fn one_to_one_norm(phi: &Superoperator) -> f64 {
    one_to_one_norm_search(phi, &NormSearch::default()).value
}

/// Multi-start local search for the induced trace norm.
///
/// Each start first runs a fixed-point ascent: from `ψ`, let
/// `S = sign(Φ(ψψ†))` and `A = Φ*(S)`, and move to the top eigenvector of
/// `A`. Since `‖Φ(ψ'ψ'†)‖_tr ≥ ⟨ψ'|A|ψ'⟩ = λ_max(A) ≥ ⟨ψ|A|ψ⟩ =
/// ‖Φ(ψψ†)‖_tr`, the objective never decreases. The ascent crawls where an
/// output eigenvalue passes through zero, so the best few results are then
/// refined by a compass search over the real and imaginary coordinates of
/// the tangent space. The basis states are always among the starts, which
/// makes the result at least `‖Φ(I/d)‖_tr`.
pub fn one_to_one_norm_search(phi: &Superoperator, search: &NormSearch) -> NormEstimate {
    let d = phi.dim_in();
    let mut starts: Vec<Vec<C64>> = (0..d)
        .map(|k| (0..d).map(|j| if j == k { ONE } else { ZERO }).collect())
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(search.seed);
    starts.extend((0..search.random_starts).map(|_| haar_vector(d, &mut rng)));
    let mut ascended: Vec<NormEstimate> = starts
        .par_iter()
        .map(|psi| ascend(phi, psi.clone(), search))
        .collect();
    // stable sort, so ties keep start order
    ascended.sort_by(|a, b| b.value.total_cmp(&a.value));
    ascended.truncate(search.refined.max(1));
    ascended
        .into_par_iter()
        .map(|est| refine(phi, est, search))
        .reduce_with(|a, b| if b.value > a.value { b } else { a })
        .unwrap_or(NormEstimate {
            value: 0.0,
            maximizer: Vec::new(),
        })
}

/// Uniformly random unit vector in `ℂᵈ`.
pub fn haar_vector<R: rand::Rng>(d: usize, rng: &mut R) -> Vec<C64> {
    let v: Vec<C64> = (0..d)
        .map(|_| C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng)))
        .collect();
    normalized(v)
}

fn normalized(v: Vec<C64>) -> Vec<C64> {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

fn output_of(phi: &Superoperator, psi: &[C64]) -> ComplexMatrix {
    phi.apply(&ComplexMatrix::outer(psi, psi))
        .expect("state has the input dimension")
        .hermitian_part()
}

fn objective(phi: &Superoperator, psi: &[C64]) -> f64 {
    hermitian_eig_unchecked(&output_of(phi, psi))
        .eigenvalues
        .iter()
        .map(|l| l.abs())
        .sum()
}

fn ascend(phi: &Superoperator, mut psi: Vec<C64>, search: &NormSearch) -> NormEstimate {
    let mut out_eig = hermitian_eig_unchecked(&output_of(phi, &psi));
    let mut value: f64 = out_eig.eigenvalues.iter().map(|l| l.abs()).sum();
    for _ in 0..search.max_iterations {
        let sign = out_eig.apply_real_fn(|l| if l > 0.0 { 1.0 } else if l < 0.0 { -1.0 } else { 0.0 });
        let a = phi
            .apply_adjoint(&sign)
            .expect("sign matrix has the output dimension")
            .hermitian_part();
        let a_psi = a.mat_vec(&psi);
        let rayleigh: f64 = psi.iter().zip(&a_psi).map(|(p, q)| (p.conj() * q).re).sum();
        let grad = a_psi
            .iter()
            .zip(&psi)
            .map(|(q, p)| (q - p * rayleigh).norm_sqr())
            .sum::<f64>()
            .sqrt();
        if grad <= search.gradient_tol {
            break;
        }
        let a_eig = hermitian_eig_unchecked(&a);
        let next = a_eig.eigenvector(a_eig.dim() - 1);
        let next_eig = hermitian_eig_unchecked(&output_of(phi, &next));
        let next_value: f64 = next_eig.eigenvalues.iter().map(|l| l.abs()).sum();
        if next_value <= value {
            break;
        }
        psi = next;
        out_eig = next_eig;
        value = next_value;
    }
    NormEstimate {
        value,
        maximizer: psi,
    }
}

/// Orthonormal basis of the complement of the unit vector `psi`.
fn tangent_basis(psi: &[C64]) -> Vec<Vec<C64>> {
    let d = psi.len();
    let mut basis: Vec<Vec<C64>> = vec![psi.to_vec()];
    for k in 0..d {
        let mut v: Vec<C64> = (0..d).map(|j| if j == k { ONE } else { ZERO }).collect();
        for b in &basis {
            let overlap: C64 = b.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
            for (vj, bj) in v.iter_mut().zip(b) {
                *vj -= overlap * bj;
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            basis.push(v.into_iter().map(|z| z / norm).collect());
        }
        if basis.len() == d {
            break;
        }
    }
    basis.split_off(1)
}

/// Compass search on `ψ + Σ (a_k + i b_k) e_k`, renormalized, with the step
/// halved whenever no coordinate move improves the objective.
fn refine(phi: &Superoperator, start: NormEstimate, search: &NormSearch) -> NormEstimate {
    let NormEstimate {
        mut value,
        maximizer: mut psi,
    } = start;
    if psi.is_empty() {
        return NormEstimate { value, maximizer: psi };
    }
    let mut step = 1e-3;
    let mut basis = tangent_basis(&psi);
    while step > search.gradient_tol {
        let mut improved = false;
        'poll: for e in &basis {
            for dir in [ONE, -ONE, C64::new(0.0, 1.0), C64::new(0.0, -1.0)] {
                let trial = normalized(psi.iter().zip(e).map(|(p, q)| p + q * dir * step).collect());
                let v = objective(phi, &trial);
                if v > value {
                    value = v;
                    psi = trial;
                    improved = true;
                    break 'poll;
                }
            }
        }
        if improved {
            basis = tangent_basis(&psi);
        } else {
            step *= 0.5;
        }
    }
    NormEstimate {
        value,
        maximizer: psi,
    }
}

/// `D_th = (λ₁ − λ₂)/3` for a qubit metric with `λ₁ > λ₂`.
pub fn threshold(eta: &MetricOperator) -> Result<f64> {
    let [l1, l2] = descending_eigenvalues(eta)?;
    Ok((l1 - l2) / 3.0)
}

fn descending_eigenvalues(eta: &MetricOperator) -> Result<[f64; 2]> {
    if eta.dim() != 2 {
        return Err(Error::DimMismatch {
            expected: 2,
            found: eta.dim(),
        });
    }
    let l = eta.eigenvalues();
    let gap = l[1] - l[0];
    if gap <= DEGENERACY_TOL {
        return Err(Error::DegenerateMetric { gap });
    }
    Ok([l[1], l[0]])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Accept,
    Reject,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub distance: f64,
    pub threshold: f64,
    pub verdict: Verdict,
    /// `[λ₁, λ₂]` with `λ₁ > λ₂`.
    pub eta_eigenvalues: [f64; 2],
    pub shots_per_input: Option<u64>,
    pub seed: Option<u64>,
}

/// Compares the reconstruction with `G_η ⊕ 0` in the induced `1 → 1` norm.
pub fn verify(eta: &MetricOperator, recon: &ReconstructedChannel) -> Result<VerificationReport> {
    let eta_eigenvalues = descending_eigenvalues(eta)?;
    let threshold = (eta_eigenvalues[0] - eta_eigenvalues[1]) / 3.0;
    let ideal = Superoperator::from_kraus(&honest_channel(eta)?);
    let distance = one_to_one_norm(&ideal.sub(&recon.linear_map)?);
    let verdict = if distance <= threshold {
        Verdict::Accept
    } else {
        Verdict::Reject
    };
    Ok(VerificationReport {
        distance,
        threshold,
        verdict,
        eta_eigenvalues,
        shots_per_input: recon.shots_per_input,
        seed: recon.seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::apply;
    use crate::hilbert::validate_metric;
    use crate::linalg::trace_norm;
    use crate::testutil::*;
    use proptest::prelude::*;

    fn ket_density(v: &[C64]) -> ComplexMatrix {
        ComplexMatrix::outer(v, v)
    }

    #[test]
    fn default_design_is_complete() {
        let d = default_design();
        assert_eq!(d.input_states.len(), 9);
        assert_eq!(d.gram_rank(), 9);
        for rho in &d.input_states {
            assert!((rho.trace().re - 1.0).abs() < 1e-15);
            assert!((&(rho * rho) - rho).frobenius_norm() < 1e-15);
        }
    }

    #[test]
    fn singular_design_is_rejected() {
        let mut d = default_design();
        d.input_states[8] = d.input_states[0].clone();
        assert_eq!(d.gram_rank(), 8);
        let resp = exact_responses(&ProverModel::Honest, &eta2(), &d).unwrap();
        assert_eq!(reconstruct(&resp, &d), Err(Error::SingularDesign { rank: 8, needed: 9 }));
    }

    #[test]
    fn exact_reconstruction_of_honest_channel() {
        let d = default_design();
        let resp = exact_responses(&ProverModel::Honest, &eta2(), &d).unwrap();
        let rec = reconstruct(&resp, &d).unwrap();
        assert!(!rec.cp_projected);
        let ch = honest_channel(&eta2()).unwrap();
        let truth = Superoperator::from_kraus(&ch);
        assert!(rec.linear_map.matrix().max_abs_diff(truth.matrix()) < 1e-10);
        let report = verify(&eta2(), &rec).unwrap();
        assert!(report.distance <= 1e-8);
        assert_eq!(report.verdict, Verdict::Accept);
    }

    #[test]
    fn identity_responses_give_identity_map() {
        let d = default_design();
        let resp: Vec<_> = d
            .input_states
            .iter()
            .map(|rho| ProverResponse {
                success_ratio: 1.0,
                returned_state: rho.clone(),
                copies_used: 0,
            })
            .collect();
        let rec = reconstruct(&resp, &d).unwrap();
        assert!(rec.linear_map.matrix().max_abs_diff(&ComplexMatrix::identity(9)) < 1e-10);
    }

    #[test]
    fn threshold_examples() {
        assert!((threshold(&eta2()).unwrap() - 0.4 / 3.0).abs() < 1e-12);
        let eta = validate_metric(&ComplexMatrix::real_diag(&[1.0, 0.7])).unwrap();
        assert!((threshold(&eta).unwrap() - 0.1).abs() < 1e-12);
        let id = validate_metric(&ComplexMatrix::identity(2)).unwrap();
        assert!(matches!(threshold(&id), Err(Error::DegenerateMetric { .. })));
    }

    #[test]
    fn norm_examples() {
        assert_eq!(one_to_one_norm(&Superoperator::zero(3, 3)), 0.0);
        let id = Superoperator::from_kraus(&KrausChannel::identity(3));
        assert!((one_to_one_norm(&id) - 1.0).abs() < 1e-12);
        // transpose is positive but not CP; its 1→1 norm on pure states is 1
        let t = Superoperator::new(
            ComplexMatrix::from_fn(9, 9, |r, c| if r == (c % 3) * 3 + c / 3 { ONE } else { ZERO }),
            3,
            3,
        )
        .unwrap();
        assert!((one_to_one_norm(&t) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn norm_of_honest_minus_identity_mixture() {
        let honest = Superoperator::from_kraus(&honest_channel(&eta2()).unwrap());
        let dis = ProverModel::dishonest(vec![ComplexMatrix::identity(2)], vec![1.0]).unwrap();
        let dis = Superoperator::from_kraus(&dis.channel(&eta2()).unwrap());
        let phi = honest.sub(&dis).unwrap();
        let value = one_to_one_norm(&phi);
        let eta_sum = eta2_matrix().direct_sum(&ComplexMatrix::identity(1));
        let bound = trace_norm(&(&eta_sum - &ComplexMatrix::identity(3))) / 3.0;
        assert!((bound - 0.4 / 3.0).abs() < 1e-12);
        assert!(value >= bound);
        let mixed = phi.apply(&ComplexMatrix::identity(3).scale(1.0 / 3.0)).unwrap();
        assert!(value >= trace_norm(&mixed));
        // |2⟩ is kept by the dishonest prover and killed by the honest one
        assert!(value >= 1.0 - 1e-12);
    }

    #[test]
    fn norm_maximizer_attains_value() {
        let honest = Superoperator::from_kraus(&honest_channel(&eta2()).unwrap());
        let est = one_to_one_norm_search(&honest, &NormSearch::default());
        let psi = &est.maximizer;
        let at = trace_norm(&honest.apply(&ComplexMatrix::outer(psi, psi)).unwrap());
        assert!((at - est.value).abs() < 1e-12);
        // CP map: the 1→1 norm is the largest output trace, λ_max(η₂) = 1
        assert!((est.value - 1.0).abs() < 1e-10);
    }

    #[test]
    fn honest_prover_examples() {
        let d = default_design();
        let id = validate_metric(&ComplexMatrix::identity(2)).unwrap();
        let resp = run_prover(&ProverModel::Honest, &id, &d, 1000, RngStream::new(1, 0)).unwrap();
        for (r, rho) in resp.iter().zip(&d.input_states) {
            // with η = I the only loss is the projection onto the qubit block
            let p = rho.block(0, 0, 2, 2).trace().re;
            if p > 0.99 {
                assert_eq!(r.success_ratio, 1.0);
                assert!(r.returned_state.max_abs_diff(rho) < 1e-12);
            }
        }
        let resp = run_prover(&ProverModel::Honest, &eta2(), &d, 100_000, RngStream::new(2, 0)).unwrap();
        let sd = (0.8f64 * 0.2 / resp[0].copies_used as f64).sqrt();
        assert!((resp[0].success_ratio - 0.8).abs() < 4.0 * sd);
    }

    #[test]
    fn dishonest_identity_prover_returns_inputs() {
        let d = default_design();
        let model = ProverModel::dishonest(vec![ComplexMatrix::identity(2)], vec![0.5]).unwrap();
        assert!((model.discard_probability() - 0.5).abs() < 1e-15);
        let resp = run_prover(&model, &eta2(), &d, 20_000, RngStream::new(3, 0)).unwrap();
        for (r, rho) in resp.iter().zip(&d.input_states) {
            let sd = (0.25 / r.copies_used as f64).sqrt();
            assert!((r.success_ratio - 0.5).abs() < 4.0 * sd);
            assert!(r.returned_state.max_abs_diff(rho) < 1e-12);
        }
    }

    #[test]
    fn prover_runs_are_reproducible() {
        let d = default_design();
        let a = run_prover(&ProverModel::Honest, &eta2(), &d, 2000, RngStream::new(5, 0)).unwrap();
        let b = run_prover(&ProverModel::Honest, &eta2(), &d, 2000, RngStream::new(5, 0)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn dishonest_validation() {
        let x = ComplexMatrix::from_real_rows(&[[0.0, 1.0], [1.0, 0.0]]);
        assert!(ProverModel::dishonest(vec![x.clone()], vec![0.3]).is_ok());
        assert!(ProverModel::dishonest(vec![x.clone()], vec![1.2]).is_err());
        assert!(ProverModel::dishonest(vec![x.clone()], vec![0.0]).is_err());
        assert!(ProverModel::dishonest(vec![x.clone()], vec![-0.1]).is_err());
        assert!(ProverModel::dishonest(vec![x.scale(2.0)], vec![0.3]).is_err());
        assert!(ProverModel::dishonest(vec![x.clone(), x], vec![0.3]).is_err());
    }

    #[test]
    fn prover_model_json() {
        let honest: ProverModel = serde_json::from_str(r#"{"kind": "honest"}"#).unwrap();
        assert_eq!(honest, ProverModel::Honest);
        let dis: ProverModel = serde_json::from_str(
            r#"{"kind": "dishonest", "unitaries": [[[[1,0],[0,0]],[[0,0],[1,0]]]], "probabilities": [0.7]}"#,
        )
        .unwrap();
        dis.validate().unwrap();
        assert!((dis.discard_probability() - 0.3).abs() < 1e-15);
    }

    #[test]
    fn report_json_shape() {
        let d = default_design();
        let resp = exact_responses(&ProverModel::Honest, &eta2(), &d).unwrap();
        let rec = reconstruct(&resp, &d).unwrap().with_provenance(100, 7);
        let report = verify(&eta2(), &rec).unwrap();
        let v: serde_json::Value = serde_json::to_value(&report).unwrap();
        assert_eq!(v["verdict"], "accept");
        assert_eq!(v["shots_per_input"], 100);
        assert_eq!(v["seed"], 7);
        let l = v["eta_eigenvalues"].as_array().unwrap();
        assert!((l[0].as_f64().unwrap() - 1.0).abs() < 1e-12);
        assert!((l[1].as_f64().unwrap() - 0.6).abs() < 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(50))]

        #[test]
        fn exact_mode_reconstruction_reproduces_channel(v in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 3)) {
            let v: Vec<C64> = v.into_iter().map(|(a, b)| C64::new(a, b)).collect();
            let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            prop_assume!(n > 1e-3);
            let v: Vec<C64> = v.iter().map(|z| z / n).collect();
            let rho = ket_density(&v);
            let d = default_design();
            let rec = reconstruct(&exact_responses(&ProverModel::Honest, &eta2(), &d).unwrap(), &d).unwrap();
            let expected = apply(&honest_channel(&eta2()).unwrap(), &rho).unwrap();
            prop_assert!(rec.linear_map.apply(&rho).unwrap().max_abs_diff(&expected) < 1e-10);
        }

        #[test]
        fn norm_is_at_least_mixed_state_bound(a in random_square(9)) {
            // Hermiticity-preserving map built from a random Choi-like Hermitian matrix
            let h = (&a + &a.dagger()).scale(0.5);
            let choi = ChoiMatrix { matrix: h, dim_in: 3, dim_out: 3 };
            let phi = Superoperator::from_choi(&choi);
            let mixed = phi.apply(&ComplexMatrix::identity(3).scale(1.0 / 3.0)).unwrap();
            prop_assert!(one_to_one_norm(&phi) >= trace_norm(&mixed.hermitian_part()) - 1e-12);
        }
    }
}

//! Unforgeability of single-state quantum tokens.
//!
//! A forger holds one token state `σ_k` (k uniform over the four BB84 labels)
//! and applies a channel `Λ` producing two squashed copies. The optimal
//! channel is found as a semidefinite program over its Choi matrix
//! `J = Σ_ij Λ(|i><j|) ⊗ |i><j|` on `H_1 ⊗ H_2 ⊗ H_ini`, normalized so that
//! `Tr_{12} J = 1`.

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::fock::{encode_state, DensityMatrix};
use crate::numlin::sdp::FEASIBILITY_TOL;
use crate::numlin::{
    sdp_solve, DualCertificate, HermitianMatrix, PartialTraceConstraint, SdpProblem, SdpStatus,
    Sense, TracedFactor,
};
use crate::qkd::golden_section_max;
use crate::sources::{
    bb84_qubit, pds_fixed_phase_state, pds_randomized_state, source_efficiency_qds, QdPopulations,
};

/// Threshold-detector outcomes after squashing: `|0>`, `|1>` and no-click `|∅>`.
pub struct SquashedMeasurement;

impl SquashedMeasurement {
    pub const DIM: usize = 3;
    const NO_CLICK: usize = 2;

    /// `|β_k>` for k = 0..3, i.e. +, +i, -, -i embedded in the qubit block.
    pub fn beta(k: usize) -> [Complex64; 3] {
        let q = bb84_qubit(k);
        [q[0], q[1], Complex64::new(0.0, 0.0)]
    }

    /// Projector onto the qubit state orthogonal to `β_k`, which is `β_{k+2}`.
    pub fn beta_perp_projector(k: usize) -> HermitianMatrix {
        HermitianMatrix::projector(&Self::beta(k + 2))
    }

    pub fn no_click_projector() -> HermitianMatrix {
        let mut e = [Complex64::new(0.0, 0.0); 3];
        e[Self::NO_CLICK] = Complex64::new(1.0, 0.0);
        HermitianMatrix::projector(&e)
    }
}

/// Four equiprobable token states and the loss a verifier tolerates.
#[derive(Debug, Clone)]
pub struct TokenProblem {
    states: Vec<HermitianMatrix>,
    allowed_loss: f64,
}

impl TokenProblem {
    pub fn new(states: Vec<HermitianMatrix>, allowed_loss: f64) -> Result<Self> {
        if states.len() != 4 {
            return invalid(format!(
                "token problem needs 4 input states, got {}",
                states.len()
            ));
        }
        let d = states[0].dim();
        for (k, s) in states.iter().enumerate() {
            if s.dim() != d {
                return invalid(format!(
                    "token state {k} has dimension {}, expected {d}",
                    s.dim()
                ));
            }
            if (s.trace() - 1.0).abs() > 1e-9 {
                return invalid(format!("token state {k} has trace {}", s.trace()));
            }
        }
        if !(0.0..=1.0).contains(&allowed_loss) {
            return invalid(format!("allowed loss {allowed_loss} outside [0, 1]"));
        }
        Ok(Self {
            states,
            allowed_loss,
        })
    }

    pub fn from_density(states: &[DensityMatrix], allowed_loss: f64) -> Result<Self> {
        Self::new(
            states.iter().map(|s| s.matrix().clone()).collect(),
            allowed_loss,
        )
    }

    pub fn states(&self) -> &[HermitianMatrix] {
        &self.states
    }

    pub fn allowed_loss(&self) -> f64 {
        self.allowed_loss
    }

    pub fn with_loss(&self, allowed_loss: f64) -> Result<Self> {
        Self::new(self.states.clone(), allowed_loss)
    }

    pub fn input_dim(&self) -> usize {
        self.states[0].dim()
    }

    pub fn output_dim(&self) -> usize {
        SquashedMeasurement::DIM * SquashedMeasurement::DIM
    }
}

/// Error and loss operators on `H_1 ⊗ H_2 ⊗ H_ini`.
#[derive(Debug, Clone)]
pub struct TokenOperators {
    pub e1: HermitianMatrix,
    pub e2: HermitianMatrix,
    pub l1: HermitianMatrix,
    pub l2: HermitianMatrix,
}

pub fn build_error_loss_operators(problem: &TokenProblem) -> Result<TokenOperators> {
    let d = problem.input_dim();
    let n = problem.output_dim() * d;
    let id3 = HermitianMatrix::identity(SquashedMeasurement::DIM);
    let empty = SquashedMeasurement::no_click_projector();
    let mut ops = TokenOperators {
        e1: HermitianMatrix::zeros(n),
        e2: HermitianMatrix::zeros(n),
        l1: HermitianMatrix::zeros(n),
        l2: HermitianMatrix::zeros(n),
    };
    for (k, sigma) in problem.states.iter().enumerate() {
        let s = sigma.conj().scale(0.25);
        let perp = SquashedMeasurement::beta_perp_projector(k).scale(0.5);
        ops.e1 = &ops.e1 + &perp.kron(&id3).kron(&s);
        ops.e2 = &ops.e2 + &id3.kron(&perp).kron(&s);
        ops.l1 = &ops.l1 + &empty.kron(&id3).kron(&s);
        ops.l2 = &ops.l2 + &id3.kron(&empty).kron(&s);
    }
    Ok(ops)
}

#[derive(Debug, Clone)]
pub struct NoiseToleranceResult {
    /// Smallest error rate a successful forger must induce on token 1.
    pub min_error: f64,
    pub gap: f64,
    pub relative_gap: f64,
    pub iterations: usize,
    pub certificate: DualCertificate,
    /// Optimal Choi matrix.
    pub choi: HermitianMatrix,
}

/// The cloning SDP for `problem`; `swap` exchanges the roles of the two copies.
pub fn cloning_sdp(problem: &TokenProblem, swap: bool) -> Result<SdpProblem> {
    let ops = build_error_loss_operators(problem)?;
    let (ea, eb, la, lb) = if swap {
        (ops.e2, ops.e1, ops.l2, ops.l1)
    } else {
        (ops.e1, ops.e2, ops.l1, ops.l2)
    };
    let d = problem.input_dim();
    let l = problem.allowed_loss;
    Ok(SdpProblem::new(ea.clone(), Sense::Minimize)
        .partial_trace(PartialTraceConstraint {
            dims: (problem.output_dim(), d),
            traced: TracedFactor::First,
            target: HermitianMatrix::identity(d),
        })
        .le(&eb - &ea, 0.0)
        .le(la, l)
        .le(lb, l))
}

pub fn noise_tolerance(problem: &TokenProblem) -> Result<NoiseToleranceResult> {
    solve_cloning(problem, false)
}

pub(crate) fn solve_cloning(problem: &TokenProblem, swap: bool) -> Result<NoiseToleranceResult> {
    let sdp = cloning_sdp(problem, swap)?;
    let sol = sdp_solve(&sdp)?;
    if sol.status != SdpStatus::Solved {
        return Err(Error::Solver(format!(
            "cloning SDP (input dim {}, loss {}) ended with {:?} after {} iterations",
            problem.input_dim(),
            problem.allowed_loss,
            sol.status,
            sol.iterations
        )));
    }
    let certificate = sol.certificate(&sdp)?;
    if !certificate.is_valid(FEASIBILITY_TOL) {
        return Err(Error::Solver(format!(
            "cloning SDP returned an invalid dual certificate: {certificate:?}"
        )));
    }
    Ok(NoiseToleranceResult {
        min_error: sol.primal_value,
        gap: sol.gap,
        relative_gap: sol.relative_gap(),
        iterations: sol.iterations,
        certificate,
        choi: sol.x,
    })
}

/// Token sources and their four encoded states.
#[derive(Debug, Clone)]
pub enum TokenSource {
    /// Coherent pulse with a fixed global phase, total mean photon number `mu`.
    FixedPhasePds {
        mu: f64,
    },
    RandomizedPds {
        mu: f64,
    },
    QuantumDot {
        populations: QdPopulations,
        eta: f64,
    },
}

impl TokenSource {
    pub fn states(&self) -> Result<Vec<HermitianMatrix>> {
        (0..4)
            .map(|k| {
                Ok(match self {
                    Self::FixedPhasePds { mu } => {
                        pds_fixed_phase_state(mu.sqrt(), k)?.density().into_matrix()
                    }
                    Self::RandomizedPds { mu } => pds_randomized_state(*mu, k)?.into_matrix(),
                    Self::QuantumDot { populations, eta } => {
                        let phi = k as f64 * std::f64::consts::FRAC_PI_2;
                        encode_state(&populations.p(), *eta, phi, 0.5, populations.coherent())?
                            .into_matrix()
                    }
                })
            })
            .collect()
    }

    /// Probability that at least one photon leaves the source.
    pub fn efficiency(&self) -> f64 {
        match self {
            Self::FixedPhasePds { mu } | Self::RandomizedPds { mu } => -(-mu).exp_m1(),
            Self::QuantumDot { populations, eta } => source_efficiency_qds(populations, *eta),
        }
    }

    /// Honest no-click probability after a further transmittance `eta_t`.
    pub fn honest_loss(&self, eta_t: f64) -> f64 {
        match self {
            Self::FixedPhasePds { mu } | Self::RandomizedPds { mu } => (-mu * eta_t).exp(),
            Self::QuantumDot { populations, eta } => {
                1.0 - source_efficiency_qds(populations, eta * eta_t)
            }
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Self::FixedPhasePds { mu } => format!("fp-pds(mu={mu})"),
            Self::RandomizedPds { mu } => format!("rp-pds(mu={mu})"),
            Self::QuantumDot { populations, eta } => format!(
                "{}(eta={eta}{})",
                populations.pumping().name(),
                if populations.coherent() {
                    ", coherent"
                } else {
                    ""
                }
            ),
        }
    }

    pub fn problem(&self, eta_t: f64) -> Result<TokenProblem> {
        TokenProblem::new(self.states()?, self.honest_loss(eta_t).clamp(0.0, 1.0))
    }
}

/// Noise tolerance of `source` with the verifier's loss set to the honest loss.
pub fn source_tolerance(source: &TokenSource, eta_t: f64) -> Result<NoiseToleranceResult> {
    noise_tolerance(&source.problem(eta_t)?)
}

pub const TOKEN_MU_BRACKET: (f64, f64) = (0.05, 4.0);
pub const TOKEN_MU_TOL: f64 = 1e-3;

/// Best tolerance over the mean photon number of a phase-randomized PDS.
pub fn best_pds_tolerance(eta_t: f64) -> Result<(f64, f64)> {
    let mut failure = None;
    let (mu, tol) = golden_section_max(
        |mu| match source_tolerance(&TokenSource::RandomizedPds { mu }, eta_t) {
            Ok(r) => r.min_error,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NEG_INFINITY
            }
        },
        TOKEN_MU_BRACKET.0,
        TOKEN_MU_BRACKET.1,
        TOKEN_MU_TOL,
    );
    match failure {
        Some(e) => Err(e),
        None => Ok((mu, tol)),
    }
}

pub const THRESHOLD_TOL: f64 = 0.005;

/// Smallest collection efficiency at which the dot's tolerance reaches `pds_best`,
/// by bisection assuming the tolerance increases with `eta`. `None` when the
/// dot never reaches it or already exceeds it at `lo`.
pub fn threshold_collection(
    populations: &QdPopulations,
    pds_best: f64,
    lo: f64,
    hi: f64,
) -> Result<Option<f64>> {
    let excess = |eta: f64| -> Result<f64> {
        let src = TokenSource::QuantumDot {
            populations: *populations,
            eta,
        };
        Ok(source_tolerance(&src, 1.0)?.min_error - pds_best)
    };
    let (mut a, mut b) = (lo, hi);
    if excess(b)? < 0.0 || excess(a)? >= 0.0 {
        return Ok(None);
    }
    while b - a > THRESHOLD_TOL {
        let m = 0.5 * (a + b);
        if excess(m)? >= 0.0 {
            b = m;
        } else {
            a = m;
        }
    }
    Ok(Some(0.5 * (a + b)))
}

/// Collection efficiency at which the dot reaches source efficiency `target`.
pub fn eta_for_efficiency(populations: &QdPopulations, target: f64) -> Option<f64> {
    let (mut a, mut b) = (0.0, 1.0);
    if !(0.0..=source_efficiency_qds(populations, 1.0)).contains(&target) {
        return None;
    }
    while b - a > 1e-12 {
        let m = 0.5 * (a + b);
        if source_efficiency_qds(populations, m) < target {
            a = m;
        } else {
            b = m;
        }
    }
    Some(0.5 * (a + b))
}

/// Tolerance gap of `other` over `reference` at the highest source efficiency
/// both dots reach.
pub fn tolerance_overhead(other: &QdPopulations, reference: &QdPopulations) -> Result<f64> {
    let s = source_efficiency_qds(other, 1.0).min(source_efficiency_qds(reference, 1.0));
    let at = |pop: &QdPopulations| -> Result<f64> {
        let eta = eta_for_efficiency(pop, s).unwrap_or(1.0);
        Ok(source_tolerance(
            &TokenSource::QuantumDot {
                populations: *pop,
                eta,
            },
            1.0,
        )?
        .min_error)
    };
    Ok(at(other)? - at(reference)?)
}

/// Ideal BB84 single-photon qubits as 2-dim token states.
pub fn ideal_qubit_states() -> Vec<HermitianMatrix> {
    (0..4)
        .map(|k| HermitianMatrix::projector(&bb84_qubit(k)))
        .collect()
}

/// Choi matrix of the channel `ρ ↦ Tr(ρ) |out><out|` on an input of dimension `d`.
pub fn constant_channel_choi(out: &HermitianMatrix, d: usize) -> HermitianMatrix {
    out.kron(&HermitianMatrix::identity(d).conj())
}

//! Bit commitment in the bounded-storage model: finite-size security
//! parameters, the security condition and the minimum number of pulses.
//! All logarithms are base 2.

use crate::error::{invalid, Error, Result};
use crate::numlin::binary_entropy;
use crate::qkd::{golden_section_max, maximize_scalar};
use crate::sources::{
    poisson_coefficients, qds_effective_coefficients, EffectiveCoefficients, PhotonSource,
    QdPopulations,
};

/// Which probability the `m3` parameter subtracts from one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum M3Reading {
    /// `1 - P_{xη_c}(k ≥ 2)`
    Multiphoton,
    /// `1 - P_{xη_c}(0)`
    Vacuum,
}

impl M3Reading {
    pub fn name(self) -> &'static str {
        match self {
            Self::Multiphoton => "1-P(>=2)",
            Self::Vacuum => "1-P(0)",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BitCommitParams {
    pub epsilon: f64,
    pub beta: f64,
    pub gamma: f64,
    /// Qubits the adversary can store.
    pub storage: u64,
    pub e: f64,
    /// Transmission between the source and honest Bob's detection.
    pub eta_c: f64,
    pub m3_reading: M3Reading,
}

impl Default for BitCommitParams {
    fn default() -> Self {
        Self {
            epsilon: 2e-5,
            beta: 0.007,
            gamma: 0.008,
            storage: 972,
            e: 0.02,
            eta_c: 1.0,
            m3_reading: M3Reading::Multiphoton,
        }
    }
}

impl BitCommitParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return invalid(format!("epsilon = {} outside (0, 1)", self.epsilon));
        }
        for (name, v) in [("beta", self.beta), ("gamma", self.gamma)] {
            if !(v > 0.0 && v <= 0.01) {
                return invalid(format!("{name} = {v} outside (0, 0.01]"));
            }
        }
        for (name, v) in [("error rate", self.e), ("channel transmission", self.eta_c)] {
            if !(0.0..=1.0).contains(&v) {
                return invalid(format!("{name} = {v} outside [0, 1]"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BitCommitReport {
    pub m2: f64,
    pub m3: f64,
    pub l_prime: f64,
    /// Maximizer of `L'`.
    pub s_opt: f64,
    pub delta: f64,
    pub lambda: f64,
    pub m: [f64; 4],
    /// `m2 L' - m3 λ`
    pub margin: f64,
    pub secure: bool,
    /// `max(M1..M4)` when secure.
    pub n_min: Option<f64>,
}

fn l_prime_objective(s: f64, epsilon: f64) -> f64 {
    -((1.0 + s.exp2()).log2() - 1.0 - s) / s - 3.0 * epsilon / s
}

pub const L_PRIME_LO: f64 = 1e-9;
pub const L_PRIME_TOL: f64 = 1e-12;

/// `(s*, L')` maximizing over `s ∈ (0, 1]`.
pub fn l_prime(epsilon: f64) -> (f64, f64) {
    maximize_scalar(
        |s| l_prime_objective(s, epsilon),
        L_PRIME_LO,
        1.0,
        L_PRIME_TOL,
    )
}

/// Same maximization by golden section on `[lo, 1]` only.
pub fn l_prime_golden(epsilon: f64, lo: f64) -> (f64, f64) {
    golden_section_max(|s| l_prime_objective(s, epsilon), lo, 1.0, L_PRIME_TOL)
}

pub fn delta(e: f64, beta: f64) -> f64 {
    2.0 * (e + beta / (1.0 - 2.0 * beta).sqrt()) / (1.0 - 4.0 * 5f64.sqrt() * beta)
}

pub fn lambda(delta: f64, beta: f64) -> Result<f64> {
    if !(0.0..0.5).contains(&delta) {
        return invalid(format!(
            "delta = {delta} outside [0, 1/2), binary entropy undefined for the rate"
        ));
    }
    Ok(binary_entropy(delta)? + 3.0 * beta * beta)
}

pub fn m3_value(pxc: &EffectiveCoefficients, reading: M3Reading) -> f64 {
    match reading {
        M3Reading::Multiphoton => 1.0 - pxc.p_multi,
        M3Reading::Vacuum => 1.0 - pxc.p0,
    }
}

/// Parameters from the emitted coefficients `px` and those after the channel `pxc`.
pub fn security_parameters_from(
    px: &EffectiveCoefficients,
    pxc: &EffectiveCoefficients,
    params: &BitCommitParams,
) -> Result<BitCommitReport> {
    params.validate()?;
    let m2 = px.p1 - pxc.p0 + px.p0 - 3.0 * params.gamma;
    let m3 = m3_value(pxc, params.m3_reading);
    let (s_opt, l_prime) = l_prime(params.epsilon);
    let delta = delta(params.e, params.beta);
    let lambda = lambda(delta, params.beta)?;
    let margin = m2 * l_prime - m3 * lambda;
    let eps = params.epsilon;
    let m = [
        (2.0 / eps).log2() / (2.0 * params.gamma * params.gamma),
        (1.0 / eps).log2() / (eps * m2),
        (2.0 / eps).log2() / ((m3 - params.gamma) * params.beta * params.beta),
        params.storage as f64 / margin,
    ];
    let secure = margin > 0.0 && m2 > 0.0;
    let n_min = secure.then(|| m.iter().copied().fold(f64::NEG_INFINITY, f64::max));
    Ok(BitCommitReport {
        m2,
        m3,
        l_prime,
        s_opt,
        delta,
        lambda,
        m,
        margin,
        secure,
        n_min,
    })
}

/// Security parameters for a source without photon-number coherence.
pub fn security_parameters(
    source: &PhotonSource,
    params: &BitCommitParams,
) -> Result<BitCommitReport> {
    if source.has_number_coherence() {
        return Err(Error::Assumption(
            "bit commitment security requires sources without photon-number coherence; use a phase-randomized Poisson source or an LA/TPE dot"
                .into(),
        ));
    }
    let (px, pxc) = match source {
        PhotonSource::Poisson(m) => (
            poisson_coefficients(m.mu())?,
            poisson_coefficients(m.mu() * params.eta_c)?,
        ),
        PhotonSource::QuantumDot { populations, eta } => (
            qds_effective_coefficients(populations, *eta)?,
            qds_effective_coefficients(populations, eta * params.eta_c)?,
        ),
    };
    security_parameters_from(&px, &pxc, params)
}

pub const PDS_MU_BRACKET: (f64, f64) = (1e-3, 5.0);

/// Largest margin over the mean photon number of a phase-randomized PDS.
pub fn best_pds_margin(params: &BitCommitParams) -> Result<(f64, f64)> {
    params.validate()?;
    let (mu, margin) = maximize_scalar(
        |mu| {
            PhotonSource::poisson(mu)
                .and_then(|s| security_parameters(&s, params))
                .map_or(f64::NEG_INFINITY, |r| r.margin)
        },
        PDS_MU_BRACKET.0,
        PDS_MU_BRACKET.1,
        1e-6,
    );
    Ok((mu, margin))
}

/// Collection efficiency at which the dot's margin reaches `target`, by
/// bisection to `1e-6`, assuming the margin increases with `eta`.
pub fn threshold_collection(
    populations: &QdPopulations,
    target: f64,
    params: &BitCommitParams,
) -> Result<Option<f64>> {
    let margin = |eta: f64| -> Result<f64> {
        Ok(security_parameters(&PhotonSource::quantum_dot(*populations, eta)?, params)?.margin)
    };
    let (mut a, mut b) = (0.0, 1.0);
    if margin(b)? < target || margin(a)? >= target {
        return Ok(None);
    }
    while b - a > 1e-6 {
        let mid = 0.5 * (a + b);
        if margin(mid)? >= target {
            b = mid;
        } else {
            a = mid;
        }
    }
    Ok(Some(0.5 * (a + b)))
}

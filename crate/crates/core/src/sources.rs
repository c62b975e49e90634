//! Photon-number source models: quantum-dot populations and Poisson sources.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::fock::{Basis, DensityMatrix, PureState};
use crate::numlin::{CMatrix, HermitianMatrix};

/// Quantum-dot excitation scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pumping {
    /// Resonant excitation.
    Re,
    /// Phonon (LA) assisted excitation.
    La,
    /// Two-photon excitation.
    Tpe,
}

impl Pumping {
    pub fn name(self) -> &'static str {
        match self {
            Pumping::Re => "RE",
            Pumping::La => "LA",
            Pumping::Tpe => "TPE",
        }
    }

    /// Photon-number coherence of the emitted state.
    pub fn default_coherence(self) -> bool {
        matches!(self, Pumping::Re)
    }
}

impl fmt::Display for Pumping {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Pumping {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "re" => Ok(Pumping::Re),
            "la" => Ok(Pumping::La),
            "tpe" => Ok(Pumping::Tpe),
            other => invalid(format!(
                "unknown pumping scheme '{other}' (expected re, la or tpe)"
            )),
        }
    }
}

const POP_TOL: f64 = 1e-12;

/// Emitted photon-number populations `p_0..p_3` of a quantum dot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QdPopulations {
    p: [f64; 4],
    pumping: Pumping,
    coherent: bool,
}

impl QdPopulations {
    pub fn new(p: [f64; 4], pumping: Pumping, coherent: bool) -> Result<Self> {
        for (n, &pn) in p.iter().enumerate() {
            if !(0.0..=1.0).contains(&pn) {
                return invalid(format!("population p_{n} = {pn} outside [0, 1]"));
            }
        }
        let total: f64 = p.iter().sum();
        if (total - 1.0).abs() > POP_TOL {
            return invalid(format!("populations sum to {total}, not 1"));
        }
        if pumping == Pumping::Tpe && p[3] != 0.0 {
            return invalid(format!(
                "two-photon excitation cannot emit three photons (p_3 = {})",
                p[3]
            ));
        }
        Ok(Self {
            p,
            pumping,
            coherent,
        })
    }

    /// Populations with `p_0` filled in as `1 - p_1 - p_2 - p_3`.
    pub fn from_emission(p1: f64, p2: f64, p3: f64, pumping: Pumping) -> Result<Self> {
        Self::new(
            [1.0 - p1 - p2 - p3, p1, p2, p3],
            pumping,
            pumping.default_coherence(),
        )
    }

    pub fn preset(pumping: Pumping) -> Self {
        let (p1, p2, p3) = match pumping {
            Pumping::Re => (0.9275, 0.0091, 1e-8),
            Pumping::La => (0.8219, 0.0180, 1e-7),
            Pumping::Tpe => (0.9514, 0.0012, 0.0),
        };
        Self::from_emission(p1, p2, p3, pumping).expect("preset populations are valid")
    }

    pub fn p(&self) -> [f64; 4] {
        self.p
    }

    pub fn pumping(&self) -> Pumping {
        self.pumping
    }

    pub fn coherent(&self) -> bool {
        self.coherent
    }

    pub fn with_coherence(mut self, coherent: bool) -> Self {
        self.coherent = coherent;
        self
    }

    /// `P_η(k)` for `k = 0..=3` after binomial thinning with efficiency `eta`.
    pub fn thinned(&self, eta: f64) -> [f64; 4] {
        let mut out = [0.0; 4];
        for (n, &pn) in self.p.iter().enumerate() {
            for (k, o) in out.iter_mut().enumerate().take(n + 1) {
                *o += pn * binomial(n, k) * eta.powi(k as i32) * (1.0 - eta).powi((n - k) as i32);
            }
        }
        out
    }
}

/// Populations from the unnormalized brightness `b_tilde` and the two- and
/// three-photon probabilities.
pub fn populations_from_correlations(
    b_tilde: f64,
    p2_total: f64,
    p3_total: f64,
    pumping: Pumping,
) -> Result<QdPopulations> {
    let p1 = b_tilde - 2.0 * p2_total - 3.0 * p3_total;
    let p2 = p2_total - p3_total;
    let p3 = p3_total;
    let p0 = 1.0 - p1 - p2 - p3;
    for (name, v) in [("p0", p0), ("p1", p1), ("p2", p2), ("p3", p3)] {
        if !(0.0..=1.0).contains(&v) {
            return invalid(format!(
                "inconsistent correlation inputs: {name} = {v:.6} outside [0, 1] (B~ = {b_tilde}, P2 = {p2_total}, P3 = {p3_total})"
            ));
        }
    }
    QdPopulations::new([p0, p1, p2, p3], pumping, pumping.default_coherence())
}

/// `(B, P)` with `B = p1 + p2 + p3` and `P = p1 / B`; `P` is `None` for `B = 0`.
pub fn brightness_purity(pop: &QdPopulations) -> (f64, Option<f64>) {
    let [_, p1, p2, p3] = pop.p;
    let b = p1 + p2 + p3;
    (b, (b > 0.0).then(|| p1 / b))
}

/// Vacuum, single-photon and multiphoton probabilities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveCoefficients {
    pub p0: f64,
    pub p1: f64,
    pub p_multi: f64,
}

impl EffectiveCoefficients {
    fn grouped(dist: &[f64]) -> Self {
        let p0 = dist[0];
        let p1 = dist.get(1).copied().unwrap_or(0.0);
        Self {
            p0,
            p1,
            p_multi: (1.0 - p0 - p1).max(0.0),
        }
    }
}

pub fn poisson_coefficients(mu: f64) -> Result<EffectiveCoefficients> {
    check_mu(mu)?;
    let e = (-mu).exp();
    Ok(EffectiveCoefficients {
        p0: e,
        p1: mu * e,
        p_multi: -(-mu).exp_m1() - mu * e,
    })
}

pub fn qds_effective_coefficients(pop: &QdPopulations, eta: f64) -> Result<EffectiveCoefficients> {
    check_unit("collection efficiency", eta)?;
    Ok(EffectiveCoefficients::grouped(&pop.thinned(eta)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseMode {
    Fixed,
    Randomized,
}

/// Poisson source with mean photon number `mu`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdsModel {
    mu: f64,
    phase: PhaseMode,
}

impl PdsModel {
    pub fn new(mu: f64, phase: PhaseMode) -> Result<Self> {
        check_mu(mu)?;
        Ok(Self { mu, phase })
    }

    pub fn randomized(mu: f64) -> Result<Self> {
        Self::new(mu, PhaseMode::Randomized)
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn phase(&self) -> PhaseMode {
        self.phase
    }
}

/// A source as seen by the protocols: a Poisson source, or a quantum dot
/// together with its collection efficiency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhotonSource {
    Poisson(PdsModel),
    QuantumDot {
        populations: QdPopulations,
        eta: f64,
    },
}

impl PhotonSource {
    pub fn quantum_dot(populations: QdPopulations, eta: f64) -> Result<Self> {
        check_unit("collection efficiency", eta)?;
        Ok(PhotonSource::QuantumDot { populations, eta })
    }

    pub fn poisson(mu: f64) -> Result<Self> {
        Ok(PhotonSource::Poisson(PdsModel::randomized(mu)?))
    }

    /// Whether the emitted states carry coherence between photon numbers.
    pub fn has_number_coherence(&self) -> bool {
        match self {
            PhotonSource::Poisson(m) => m.phase == PhaseMode::Fixed,
            PhotonSource::QuantumDot { populations, .. } => populations.coherent,
        }
    }

    /// `P(k)` for `k = 0..=k_max` of the collected state. Poisson tails
    /// beyond `k_max` are dropped.
    pub fn photon_distribution(&self, k_max: usize) -> Vec<f64> {
        match self {
            PhotonSource::Poisson(m) => {
                let mut out = Vec::with_capacity(k_max + 1);
                let mut term = (-m.mu).exp();
                for k in 0..=k_max {
                    if k > 0 {
                        term *= m.mu / k as f64;
                    }
                    out.push(term);
                }
                out
            }
            PhotonSource::QuantumDot { populations, eta } => {
                let t = populations.thinned(*eta);
                (0..=k_max)
                    .map(|k| t.get(k).copied().unwrap_or(0.0))
                    .collect()
            }
        }
    }

    pub fn effective(&self) -> EffectiveCoefficients {
        match self {
            PhotonSource::Poisson(m) => {
                poisson_coefficients(m.mu).expect("validated mean photon number")
            }
            PhotonSource::QuantumDot { populations, eta } => {
                EffectiveCoefficients::grouped(&populations.thinned(*eta))
            }
        }
    }

    pub fn efficiency(&self) -> f64 {
        match self {
            PhotonSource::Poisson(m) => source_efficiency_pds(m),
            PhotonSource::QuantumDot { populations, eta } => {
                source_efficiency_qds(populations, *eta)
            }
        }
    }

    pub fn describe(&self) -> String {
        match self {
            PhotonSource::Poisson(m) => {
                let tag = match m.phase {
                    PhaseMode::Fixed => "FP-PDS",
                    PhaseMode::Randomized => "RP-PDS",
                };
                format!("{tag}(mu={})", m.mu)
            }
            PhotonSource::QuantumDot { populations, eta } => {
                let c = if populations.coherent {
                    "coherent"
                } else {
                    "incoherent"
                };
                format!("{}-QDS({c},eta={eta})", populations.pumping)
            }
        }
    }
}

/// `1 - e^{-μ}`
pub fn source_efficiency_pds(model: &PdsModel) -> f64 {
    -(-model.mu).exp_m1()
}

/// `1 - Σ p_n (1-η)^n`
pub fn source_efficiency_qds(pop: &QdPopulations, eta: f64) -> f64 {
    1.0 - pop
        .p
        .iter()
        .enumerate()
        .map(|(n, p)| p * (1.0 - eta).powi(n as i32))
        .sum::<f64>()
}

/// Fixed-phase coherent-state amplitudes `(B_0, B_1, B_2, B_3)` grouping
/// photon numbers modulo 4.
pub fn fixed_phase_coefficients(alpha: f64) -> [f64; 4] {
    let x = alpha * alpha / 2.0;
    let pre = (-alpha * alpha / 4.0).exp() / std::f64::consts::SQRT_2;
    let (ch, sh, c, s) = (x.cosh(), x.sinh(), x.cos(), x.sin());
    [ch + c, sh + s, ch - c, sh - s].map(|v| pre * v.max(0.0).sqrt())
}

/// The `k`-th phase-encoded coherent state `Σ_j i^{jk} B_j |b_j>`.
pub fn pds_fixed_phase_state(alpha: f64, k: usize) -> Result<PureState> {
    if !(alpha >= 0.0) {
        return invalid(format!("coherent amplitude {alpha} must be nonnegative"));
    }
    check_k(k)?;
    let b = fixed_phase_coefficients(alpha);
    let i_pow = |p: usize| match p % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    };
    let amps: Vec<Complex64> = (0..4).map(|j| i_pow(j * k) * b[j]).collect();
    // regrouping can leave a rounding-level norm defect at large α
    let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    let amps = amps.into_iter().map(|a| a / norm).collect();
    PureState::new(fixed_phase_basis(), amps)
}

pub fn fixed_phase_basis() -> Basis {
    Basis::Labels((0..4).map(|j| format!("b{j}")).collect())
}

pub fn randomized_basis() -> Basis {
    Basis::Labels(
        ["v", "q0", "q1", "m0", "m1", "m2", "m3"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
    )
}

/// BB84 qubit `k` of {+, +i, -, -i} in the `(q0, q1)` basis.
pub fn bb84_qubit(k: usize) -> [Complex64; 2] {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let second = match k % 4 {
        0 => Complex64::new(r, 0.0),
        1 => Complex64::new(0.0, r),
        2 => Complex64::new(-r, 0.0),
        _ => Complex64::new(0.0, -r),
    };
    [Complex64::new(r, 0.0), second]
}

/// `P(0)|v><v| + P(1)|β_k><β_k| + P(≥2)|m_k><m_k|` in the 7-dim basis.
pub fn pds_randomized_state(mu: f64, k: usize) -> Result<DensityMatrix> {
    check_k(k)?;
    let c = poisson_coefficients(mu)?;
    Ok(randomized_state_from(&c, k))
}

/// Seven-dimensional phase-randomized state for arbitrary grouped coefficients.
pub fn randomized_state_from(c: &EffectiveCoefficients, k: usize) -> DensityMatrix {
    let q = bb84_qubit(k);
    let mut m = CMatrix::zeros(7);
    m.set(0, 0, Complex64::new(c.p0, 0.0));
    for a in 0..2 {
        for b in 0..2 {
            m.set(1 + a, 1 + b, q[a] * q[b].conj() * c.p1);
        }
    }
    m.set(3 + k, 3 + k, Complex64::new(c.p_multi, 0.0));
    DensityMatrix::from_parts(randomized_basis(), HermitianMatrix::symmetrized(m))
}

fn check_mu(mu: f64) -> Result<()> {
    if !(mu >= 0.0) || !mu.is_finite() {
        return invalid(format!(
            "mean photon number {mu} must be finite and nonnegative"
        ));
    }
    Ok(())
}

fn check_unit(name: &str, x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return invalid(format!("{name} = {x} outside [0, 1]"));
    }
    Ok(())
}

fn check_k(k: usize) -> Result<()> {
    if k > 3 {
        return invalid(format!("state index {k} outside 0..=3"));
    }
    Ok(())
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

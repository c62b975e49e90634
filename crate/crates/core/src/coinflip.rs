//! Strong coin flipping with photonic sources: cheating bounds for both
//! parties, honest abort probability and the balanced protocol.

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::fock::{encode_qubit, DensityMatrix};
use crate::numlin::sdp::FEASIBILITY_TOL;
use crate::numlin::{
    hermitian_eigh, sdp_solve, trace_norm, CMatrix, HermitianMatrix, SdpProblem, SdpStatus, Sense,
};
use crate::qkd::{channel_transmittance, ChannelParams};
use crate::sources::{
    poisson_coefficients, qds_effective_coefficients, source_efficiency_qds, EffectiveCoefficients,
    QdPopulations,
};

/// Eigenvalues below this (relative to the largest) span the kernel in USD.
const KERNEL_TOL: f64 = 1e-11;
pub const Y_TOL: f64 = 1e-4;

fn check_y(y: f64) -> Result<()> {
    if !(0.5..=1.0).contains(&y) {
        return invalid(format!("state parameter y = {y} outside [1/2, 1]"));
    }
    Ok(())
}

/// Qubit amplitudes of `Φ_{α,c}` on `(v_0, v_1)`.
pub fn qubit_amplitudes(y: f64, alpha: usize, c: usize) -> [f64; 2] {
    let s = if alpha.is_multiple_of(2) { 1.0 } else { -1.0 };
    if c.is_multiple_of(2) {
        [y.sqrt(), s * (1.0 - y).sqrt()]
    } else {
        [(1.0 - y).sqrt(), -s * y.sqrt()]
    }
}

/// `σ_{α,c}` indexed `[α][c]`, each the dot's collected state on the qubit `Φ_{α,c}`.
pub fn coinflip_states(
    y: f64,
    eta: f64,
    populations: &QdPopulations,
) -> Result<[[DensityMatrix; 2]; 2]> {
    check_y(y)?;
    let state = |alpha: usize, c: usize| {
        let [u, v] = qubit_amplitudes(y, alpha, c);
        encode_qubit(
            &populations.p(),
            eta,
            Complex64::new(u, 0.0),
            Complex64::new(v, 0.0),
            populations.coherent(),
        )
    };
    Ok([[state(0, 0)?, state(0, 1)?], [state(1, 0)?, state(1, 1)?]])
}

/// Equal mixtures over the basis `α` for each value of `c`.
pub fn bob_target_states(states: &[[DensityMatrix; 2]; 2]) -> [HermitianMatrix; 2] {
    let mix = |c: usize| (states[0][c].matrix() + states[1][c].matrix()).scale(0.5);
    [mix(0), mix(1)]
}

pub fn alice_cheat_bound(y: f64) -> Result<f64> {
    check_y(y)?;
    Ok(0.75 + 0.5 * (y * (1.0 - y)).sqrt())
}

/// Case-analysis bound on Bob for sources without photon-number coherence.
pub fn bob_cheat_bound_incoherent(c: &EffectiveCoefficients, n: u64, y: f64) -> Result<f64> {
    check_y(y)?;
    if n == 0 {
        return invalid("number of pulses must be at least 1");
    }
    let n_f = n as f64;
    let n_i = n.min(i32::MAX as u64) as i32;
    let pow = |x: f64, k: i32| {
        if n > i32::MAX as u64 {
            x.powf(k as f64)
        } else {
            x.powi(k)
        }
    };
    let p01 = c.p0 + c.p1;
    let a = [
        pow(c.p0, n_i),
        pow(p01, n_i) - pow(c.p0, n_i),
        n_f * c.p_multi * pow(c.p0, n_i - 1),
        n_f * c.p_multi * (pow(p01, n_i - 1) - pow(c.p0, n_i - 1)),
    ];
    let cond = [0.5, y, y, -2.0 * y * y + 4.0 * y - 1.0];
    let covered: f64 = a.iter().sum();
    let bound = a.iter().zip(&cond).map(|(p, q)| p * q).sum::<f64>() + (1.0 - covered);
    Ok(bound.clamp(0.5, 1.0))
}

/// Orthonormal basis of the numerical kernel of `rho`, as columns.
fn kernel(rho: &HermitianMatrix) -> Result<Vec<Vec<Complex64>>> {
    let e = hermitian_eigh(rho)?;
    let top = e
        .values
        .iter()
        .fold(0.0_f64, |m, v| m.max(v.abs()))
        .max(1.0);
    Ok((0..e.values.len())
        .filter(|&k| e.values[k].abs() <= KERNEL_TOL * top)
        .map(|k| e.vector(k))
        .collect())
}

/// `K† A K` for the column set `k`.
fn compress(a: &HermitianMatrix, k: &[Vec<Complex64>]) -> HermitianMatrix {
    let n = a.dim();
    HermitianMatrix::symmetrized(CMatrix::from_fn(k.len(), |p, q| {
        let mut s = Complex64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                s += k[p][i].conj() * a.get(i, j) * k[q][j];
            }
        }
        s
    }))
}

/// Optimal equal-prior unambiguous discrimination probability of `σ0` and `σ1`.
///
/// `M_0` lives on `ker σ1` and `M_1` on `ker σ0`, so the program runs over
/// `blockdiag(A, B, M_inc)` with `M_0 = K_1 A K_1†`, `M_1 = K_0 B K_0†` and
/// `M_0 + M_1 + M_inc = 1` imposed entrywise.
pub fn usd_probability(sigma0: &HermitianMatrix, sigma1: &HermitianMatrix) -> Result<f64> {
    let n = sigma0.dim();
    if sigma1.dim() != n {
        return invalid(format!(
            "USD states have dimensions {n} and {}",
            sigma1.dim()
        ));
    }
    let k1 = kernel(sigma1)?;
    let k0 = kernel(sigma0)?;
    if k0.is_empty() && k1.is_empty() {
        return Ok(0.0);
    }
    let (a, b) = (k1.len(), k0.len());
    let dim = a + b + n;
    let embed = |blocks: &[(usize, &HermitianMatrix)]| {
        let mut m = CMatrix::zeros(dim);
        for &(off, h) in blocks {
            for i in 0..h.dim() {
                for j in 0..h.dim() {
                    m.set(off + i, off + j, h.get(i, j));
                }
            }
        }
        HermitianMatrix::symmetrized(m)
    };
    let objective = embed(&[
        (0, &compress(sigma0, &k1).scale(0.5)),
        (a, &compress(sigma1, &k0).scale(0.5)),
    ]);
    let mut problem = SdpProblem::new(objective, Sense::Maximize);

    // Re and Im of (M_0 + M_1 + M_inc)_{ij}
    let column = |k: &[Vec<Complex64>], i: usize| -> Vec<Complex64> {
        k.iter().map(|v| v[i].conj()).collect()
    };
    for i in 0..n {
        for j in i..n {
            let parts: [(f64, Complex64); 2] = if i == j {
                [
                    (1.0, Complex64::new(1.0, 0.0)),
                    (0.0, Complex64::new(0.0, 0.0)),
                ]
            } else {
                [
                    (0.0, Complex64::new(1.0, 0.0)),
                    (0.0, Complex64::new(0.0, -1.0)),
                ]
            };
            for (rhs, w) in parts.iter().take(if i == j { 1 } else { 2 }) {
                // Tr(H X) with H = (w W + conj(w) W†)/2 and W = K†|j><i|K gives Re(w M_ij)
                let mut m = CMatrix::zeros(dim);
                for (off, k) in [(0, &k1), (a, &k0)] {
                    let (wj, wi) = (column(k, j), column(k, i));
                    for p in 0..k.len() {
                        for q in 0..k.len() {
                            let v = *w * wj[p] * wi[q].conj() * 0.5;
                            m.add_at(off + p, off + q, v);
                            m.add_at(off + q, off + p, v.conj());
                        }
                    }
                }
                let v = *w * 0.5;
                m.add_at(a + b + j, a + b + i, v);
                m.add_at(a + b + i, a + b + j, v.conj());
                problem = problem.eq(HermitianMatrix::symmetrized(m), *rhs);
            }
        }
    }
    let sol = sdp_solve(&problem)?;
    if sol.status != SdpStatus::Solved {
        return Err(Error::Solver(format!(
            "USD program ended with {:?} after {} iterations",
            sol.status, sol.iterations
        )));
    }
    let cert = sol.certificate(&problem)?;
    if !cert.is_valid(FEASIBILITY_TOL) {
        return Err(Error::Solver(format!(
            "USD program returned an invalid dual certificate: {cert:?}"
        )));
    }
    Ok(sol.primal_value.clamp(0.0, 1.0))
}

pub fn helstrom(sigma0: &HermitianMatrix, sigma1: &HermitianMatrix) -> Result<f64> {
    if sigma0.dim() != sigma1.dim() {
        return invalid(format!(
            "Helstrom states have dimensions {} and {}",
            sigma0.dim(),
            sigma1.dim()
        ));
    }
    Ok(0.5 + 0.25 * trace_norm(&(sigma0 - sigma1))?)
}

/// USD on the first `n - 1` pulses, Helstrom on the last.
pub fn bob_cheat_bound_coherent_from(p_usd: f64, p_hel: f64, n: u64) -> f64 {
    let miss = (1.0 - p_usd).powf(n.saturating_sub(1) as f64);
    (1.0 - miss) + miss * p_hel
}

pub fn bob_cheat_bound_coherent(
    sigma0: &HermitianMatrix,
    sigma1: &HermitianMatrix,
    n: u64,
) -> Result<f64> {
    Ok(bob_cheat_bound_coherent_from(
        usd_probability(sigma0, sigma1)?,
        helstrom(sigma0, sigma1)?,
        n,
    ))
}

/// How the honest no-click probability is composed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ZModel {
    /// Fold the per-pulse dark count probability `Y0` into the click probability.
    pub dark_counts: bool,
}

impl Default for ZModel {
    fn default() -> Self {
        Self { dark_counts: true }
    }
}

/// Sources usable in the coin-flip analysis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CoinSource {
    /// Phase-randomized Poisson source.
    Pds { mu: f64 },
    Dot {
        populations: QdPopulations,
        eta: f64,
    },
}

impl CoinSource {
    pub fn coefficients(&self) -> Result<EffectiveCoefficients> {
        match self {
            Self::Pds { mu } => poisson_coefficients(*mu),
            Self::Dot { populations, eta } => qds_effective_coefficients(populations, *eta),
        }
    }

    pub fn coherent(&self) -> bool {
        matches!(self, Self::Dot { populations, .. } if populations.coherent())
    }

    /// Probability that no photon survives a further transmittance `t`.
    pub fn vacuum_after(&self, t: f64) -> f64 {
        match self {
            Self::Pds { mu } => (-mu * t).exp(),
            Self::Dot { populations, eta } => 1.0 - source_efficiency_qds(populations, eta * t),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Self::Pds { mu } => format!("rp-pds(mu={mu})"),
            Self::Dot { populations, eta } => format!(
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
}

/// Per-pulse probability that honest Bob registers a click.
pub fn click_probability(
    source: &CoinSource,
    channel: &ChannelParams,
    distance_km: f64,
    model: ZModel,
) -> Result<f64> {
    let t = channel_transmittance(distance_km, channel)? * channel.eta_d;
    let mut none = source.vacuum_after(t);
    if model.dark_counts {
        none *= 1.0 - channel.y0;
    }
    Ok(1.0 - none)
}

/// `Z + (1 - Z) e / 2` with `Z = (1 - p_click)^N`.
pub fn honest_abort(p_click: f64, n: u64, e: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p_click) || !(0.0..=1.0).contains(&e) {
        return invalid(format!(
            "click probability {p_click} and error rate {e} must lie in [0, 1]"
        ));
    }
    let z = (1.0 - p_click).powf(n as f64);
    Ok(z + (1.0 - z) * e / 2.0)
}

/// Smallest `N` with honest abort at most `target`; `None` if unreachable.
pub fn pulses_for_abort(p_click: f64, target: f64, e: f64) -> Option<u64> {
    let z = (target - e / 2.0) / (1.0 - e / 2.0);
    if !(z > 0.0) || p_click <= 0.0 {
        return None;
    }
    if z >= 1.0 || p_click >= 1.0 {
        return Some(1);
    }
    let n = (z.ln() / (-p_click).ln_1p()).ceil();
    (n.is_finite() && n < 1e18).then(|| (n as u64).max(1))
}

pub fn classical_bound(p_ab: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p_ab) {
        return invalid(format!("abort probability {p_ab} outside [0, 1]"));
    }
    Ok(1.0 - (p_ab / 2.0).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AttackLabel {
    IncoherentCases,
    UsdHelstrom,
}

impl AttackLabel {
    pub fn name(self) -> &'static str {
        match self {
            Self::IncoherentCases => "incoherent-cases",
            Self::UsdHelstrom => "usd-helstrom",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheatBounds {
    pub p_alice: f64,
    pub p_bob: f64,
    pub attack: AttackLabel,
}

/// Both cheating bounds for `source` at state parameter `y` and `n` pulses.
pub fn cheat_bounds(source: &CoinSource, n: u64, y: f64) -> Result<CheatBounds> {
    let p_alice = alice_cheat_bound(y)?;
    if let CoinSource::Dot { populations, eta } = source {
        if populations.coherent() {
            let [s0, s1] = bob_target_states(&coinflip_states(y, *eta, populations)?);
            return Ok(CheatBounds {
                p_alice,
                p_bob: bob_cheat_bound_coherent(&s0, &s1, n)?,
                attack: AttackLabel::UsdHelstrom,
            });
        }
    }
    Ok(CheatBounds {
        p_alice,
        p_bob: bob_cheat_bound_incoherent(&source.coefficients()?, n, y)?,
        attack: AttackLabel::IncoherentCases,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Balanced {
    pub y: f64,
    pub bounds: CheatBounds,
    /// Whether the bounds cross inside `[1/2, 1]`.
    pub balanced: bool,
}

impl Balanced {
    pub fn cheat(&self) -> f64 {
        self.bounds.p_alice.max(self.bounds.p_bob)
    }
}

/// Bisection on `y` for `p_alice = p_bob`; `p_alice` falls and `p_bob` rises with `y`.
pub fn balance(source: &CoinSource, n: u64) -> Result<Balanced> {
    let diff = |y: f64| -> Result<(f64, CheatBounds)> {
        let b = cheat_bounds(source, n, y)?;
        Ok((b.p_alice - b.p_bob, b))
    };
    let (mut lo, mut hi) = (0.5, 1.0);
    let (d_lo, b_lo) = diff(lo)?;
    let (d_hi, b_hi) = diff(hi)?;
    if d_lo < 0.0 {
        return Ok(Balanced {
            y: lo,
            bounds: b_lo,
            balanced: false,
        });
    }
    if d_hi > 0.0 {
        return Ok(Balanced {
            y: hi,
            bounds: b_hi,
            balanced: false,
        });
    }
    while hi - lo > Y_TOL {
        let mid = 0.5 * (lo + hi);
        if diff(mid)?.0 > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let y = 0.5 * (lo + hi);
    Ok(Balanced {
        y,
        bounds: diff(y)?.1,
        balanced: true,
    })
}

/// One point of a balanced-protocol sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct CoinFlipPoint {
    pub distance_km: f64,
    pub n: u64,
    pub y: f64,
    pub p_alice: f64,
    pub p_bob: f64,
    pub p_ab: f64,
    pub classical: f64,
    pub advantage: bool,
    pub attack: AttackLabel,
    pub balanced: bool,
}

/// Settings for sweeps at a fixed honest abort probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbortTarget {
    pub p_ab: f64,
    pub e: f64,
    pub model: ZModel,
}

impl Default for AbortTarget {
    fn default() -> Self {
        Self {
            p_ab: 0.025,
            e: 0.015,
            model: ZModel::default(),
        }
    }
}

/// Balanced protocol at `distance_km` with `N` chosen so the honest abort
/// probability stays at or below the target.
pub fn balanced_at_distance(
    source: &CoinSource,
    channel: &ChannelParams,
    distance_km: f64,
    target: &AbortTarget,
) -> Result<CoinFlipPoint> {
    let p_click = click_probability(source, channel, distance_km, target.model)?;
    let n = pulses_for_abort(p_click, target.p_ab, target.e).ok_or_else(|| {
        Error::InvalidInput(format!(
            "abort probability {} unreachable at {distance_km} km",
            target.p_ab
        ))
    })?;
    balanced_with_pulses(source, n, p_click, distance_km, target.e)
}

/// Balanced protocol with a fixed number of pulses.
pub fn balanced_with_pulses(
    source: &CoinSource,
    n: u64,
    p_click: f64,
    distance_km: f64,
    e: f64,
) -> Result<CoinFlipPoint> {
    let b = balance(source, n)?;
    let p_ab = honest_abort(p_click, n, e)?;
    let classical = classical_bound(p_ab)?;
    Ok(CoinFlipPoint {
        distance_km,
        n,
        y: b.y,
        p_alice: b.bounds.p_alice,
        p_bob: b.bounds.p_bob,
        p_ab,
        classical,
        advantage: b.cheat() < classical,
        attack: b.bounds.attack,
        balanced: b.balanced,
    })
}

pub fn balance_and_sweep(
    source: &CoinSource,
    channel: &ChannelParams,
    distances: &[f64],
    target: &AbortTarget,
) -> Result<Vec<CoinFlipPoint>> {
    distances
        .iter()
        .map(|&d| balanced_at_distance(source, channel, d, target))
        .collect()
}

pub const DISTANCE_TOL: f64 = 0.05;
pub const DISTANCE_SCAN_KM: f64 = 2.0;

/// Whether the balanced protocol beats the classical bound `c`. Alice's
/// bound equals `c` at a single `y_c`; since it falls and Bob's rises with `y`,
/// the balanced point lies below `c` exactly when Bob's bound at `y_c` does.
pub fn beats_classical(source: &CoinSource, n: u64, c: f64) -> Result<bool> {
    if c <= 0.75 {
        return Ok(false);
    }
    if c >= 1.0 {
        return Ok(true);
    }
    let y_c = 0.5 * (1.0 + (1.0 - 16.0 * (c - 0.75).powi(2)).sqrt());
    Ok(cheat_bounds(source, n, y_c)?.p_bob < c)
}

fn advantage_at(
    source: &CoinSource,
    channel: &ChannelParams,
    distance_km: f64,
    target: &AbortTarget,
) -> Result<bool> {
    let p_click = click_probability(source, channel, distance_km, target.model)?;
    let Some(n) = pulses_for_abort(p_click, target.p_ab, target.e) else {
        return Ok(false);
    };
    beats_classical(
        source,
        n,
        classical_bound(honest_abort(p_click, n, target.e)?)?,
    )
}

/// Largest distance in `[0, max_km]` with quantum advantage: a scan in
/// steps of [`DISTANCE_SCAN_KM`] finds the last advantageous grid point, then
/// bisection refines the edge after it. `None` when no grid point has an
/// advantage.
pub fn advantage_distance(
    source: &CoinSource,
    channel: &ChannelParams,
    target: &AbortTarget,
    max_km: f64,
) -> Result<Option<f64>> {
    let steps = (max_km / DISTANCE_SCAN_KM).ceil() as usize;
    let grid: Vec<f64> = (0..=steps)
        .map(|i| (i as f64 * DISTANCE_SCAN_KM).min(max_km))
        .collect();
    let mut last = None;
    for (i, &d) in grid.iter().enumerate() {
        if advantage_at(source, channel, d, target)? {
            last = Some(i);
        }
    }
    let Some(i) = last else {
        return Ok(None);
    };
    if i + 1 == grid.len() {
        return Ok(Some(max_km));
    }
    let (mut lo, mut hi) = (grid[i], grid[i + 1]);
    while hi - lo > DISTANCE_TOL {
        let mid = 0.5 * (lo + hi);
        if advantage_at(source, channel, mid, target)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sources::Pumping;

    fn pure(v: &[Complex64]) -> HermitianMatrix {
        HermitianMatrix::projector(v)
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn alice_bound_values() {
        assert_eq!(alice_cheat_bound(1.0).unwrap(), 0.75);
        assert_eq!(alice_cheat_bound(0.5).unwrap(), 1.0);
        assert!((alice_cheat_bound(0.9).unwrap() - 0.9).abs() < 1e-15);
        assert!(alice_cheat_bound(0.4).is_err());
    }

    #[test]
    fn incoherent_edge_cases() {
        let vac = EffectiveCoefficients {
            p0: 1.0,
            p1: 0.0,
            p_multi: 0.0,
        };
        assert_eq!(bob_cheat_bound_incoherent(&vac, 10, 0.8).unwrap(), 0.5);
        let single = EffectiveCoefficients {
            p0: 0.0,
            p1: 1.0,
            p_multi: 0.0,
        };
        for n in [1, 7, 1000] {
            assert!((bob_cheat_bound_incoherent(&single, n, 0.83).unwrap() - 0.83).abs() < 1e-15);
        }
    }

    #[test]
    fn usd_trivial_pairs() {
        let zero = pure(&[c(1.0), c(0.0)]);
        let one = pure(&[c(0.0), c(1.0)]);
        assert!(usd_probability(&zero, &zero).unwrap().abs() < 1e-7);
        assert!((usd_probability(&zero, &one).unwrap() - 1.0).abs() < 1e-6);
        let plus = pure(&[
            c(std::f64::consts::FRAC_1_SQRT_2),
            c(std::f64::consts::FRAC_1_SQRT_2),
        ]);
        let p = usd_probability(&zero, &plus).unwrap();
        assert!(
            (p - (1.0 - std::f64::consts::FRAC_1_SQRT_2)).abs() < 1e-6,
            "{p}"
        );
    }

    #[test]
    fn helstrom_trivial_pairs() {
        let zero = pure(&[c(1.0), c(0.0)]);
        let one = pure(&[c(0.0), c(1.0)]);
        assert_eq!(helstrom(&zero, &zero).unwrap(), 0.5);
        assert!((helstrom(&zero, &one).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn coherent_bound_limits() {
        assert_eq!(bob_cheat_bound_coherent_from(0.0, 0.7, 50), 0.7);
        assert_eq!(bob_cheat_bound_coherent_from(1.0, 0.7, 50), 1.0);
        assert_eq!(bob_cheat_bound_coherent_from(0.3, 0.7, 1), 0.7);
    }

    #[test]
    fn abort_limits() {
        assert!((honest_abort(1.0, 5, 0.015).unwrap() - 0.0075).abs() < 1e-15);
        assert!((honest_abort(0.3, 4, 0.0).unwrap() - 0.7_f64.powi(4)).abs() < 1e-15);
        assert!((honest_abort(0.01, 1_000_000, 0.02).unwrap() - 0.01).abs() < 1e-12);
        let n = pulses_for_abort(0.01, 0.025, 0.015).unwrap();
        assert!(honest_abort(0.01, n, 0.015).unwrap() <= 0.025);
        assert!(honest_abort(0.01, n - 1, 0.015).unwrap() > 0.025);
    }

    #[test]
    fn classical_bound_values() {
        assert_eq!(classical_bound(0.0).unwrap(), 1.0);
        assert!((classical_bound(0.02).unwrap() - 0.9).abs() < 1e-15);
        assert!(classical_bound(2.0).is_err());
    }

    #[test]
    fn state_limits() {
        let single = QdPopulations::new([0.0, 1.0, 0.0, 0.0], Pumping::Tpe, false).unwrap();
        let s = coinflip_states(1.0, 1.0, &single).unwrap();
        assert!(s[0][0].matrix().trace_product(s[0][1].matrix()).abs() < 1e-15);
        assert!(s[1][0].matrix().trace_product(s[1][1].matrix()).abs() < 1e-15);
        let dark = coinflip_states(0.8, 0.0, &QdPopulations::preset(Pumping::Re)).unwrap();
        for (a, c) in [(0, 1), (1, 0), (1, 1)] {
            assert!(dark[a][c].matrix().max_abs_diff(dark[0][0].matrix()) < 1e-15);
        }
    }

    #[test]
    fn single_photon_balance_point() {
        // y = 3/4 + sqrt(y(1-y))/2 has root 9/10
        let src = CoinSource::Dot {
            populations: QdPopulations::new([0.0, 1.0, 0.0, 0.0], Pumping::Tpe, false).unwrap(),
            eta: 1.0,
        };
        let b = balance(&src, 100).unwrap();
        let expected = 0.9;
        assert!((b.y - expected).abs() < 2e-4, "{}", b.y);
        assert!(b.balanced);
    }
}

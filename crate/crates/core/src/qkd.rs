//! BB84 (without decoys and with infinitely many decoys) and twin-field key
//! rates for Poisson and quantum-dot sources.

use crate::error::{invalid, Error, Result};
use crate::numlin::binary_entropy;
use crate::sources::PhotonSource;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    /// Detector efficiency.
    pub eta_d: f64,
    /// Dark-count probability per pulse.
    pub y0: f64,
    pub loss_db_per_km: f64,
    /// Alignment (misalignment) error probability.
    pub e_d: f64,
    /// Error probability of a dark count.
    pub e0: f64,
    /// Error-correction inefficiency.
    pub f: f64,
}

impl Default for ChannelParams {
    fn default() -> Self {
        Self {
            eta_d: 1.0,
            y0: 1e-9,
            loss_db_per_km: 0.21,
            e_d: 0.02,
            e0: 0.5,
            f: 1.2,
        }
    }
}

impl ChannelParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("eta_d", self.eta_d),
            ("Y0", self.y0),
            ("e_d", self.e_d),
            ("e0", self.e0),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return invalid(format!("channel parameter {name} = {v} outside [0, 1]"));
            }
        }
        if !(self.f >= 1.0) {
            return invalid(format!(
                "error-correction inefficiency f = {} must be >= 1",
                self.f
            ));
        }
        if !(self.loss_db_per_km >= 0.0) {
            return invalid(format!(
                "fiber loss {} dB/km must be nonnegative",
                self.loss_db_per_km
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwinFieldParams {
    /// Number of global phase slices.
    pub m: u32,
    /// Duty cycle of quantum signals.
    pub d: f64,
    /// Phase-slicing error.
    pub e_s: f64,
}

impl Default for TwinFieldParams {
    fn default() -> Self {
        Self {
            m: 16,
            d: 1.0,
            e_s: 0.01275,
        }
    }
}

impl TwinFieldParams {
    pub fn validate(&self) -> Result<()> {
        if self.m < 1 {
            return invalid("twin-field phase slices m must be >= 1");
        }
        if !(self.d > 0.0 && self.d <= 1.0) {
            return invalid(format!("duty cycle d = {} outside (0, 1]", self.d));
        }
        if !(0.0..=1.0).contains(&self.e_s) {
            return invalid(format!("slicing error e_s = {} outside [0, 1]", self.e_s));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Decoy {
    None,
    Infinite,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KeyRateResult {
    /// Secret bits per pulse, clamped at 0.
    pub rate: f64,
    pub gain: f64,
    pub qber: f64,
    pub q1: f64,
    pub e1: f64,
}

/// `10^{-loss·L/10}`
pub fn channel_transmittance(distance_km: f64, channel: &ChannelParams) -> Result<f64> {
    if !(distance_km >= 0.0) {
        return invalid(format!("distance {distance_km} km must be nonnegative"));
    }
    Ok(10f64.powf(-channel.loss_db_per_km * distance_km / 10.0))
}

/// Per-photon-number yields, gains and error rates plus the totals.
#[derive(Debug, Clone, PartialEq)]
pub struct YieldTable {
    pub yields: Vec<f64>,
    pub gains: Vec<f64>,
    pub errors: Vec<f64>,
    pub gain: f64,
    pub qber: f64,
}

/// `Y_k`, `Q_k = Y_k P(k)` and `e_k` for the photon-number distribution
/// `dist` over a channel of overall transmittance `eta_t` and misalignment
/// `e_d`.
pub fn yields_gains_qber(
    dist: &[f64],
    channel: &ChannelParams,
    eta_t: f64,
    e_d: f64,
) -> YieldTable {
    let t = channel.eta_d * eta_t;
    let mut yields = Vec::with_capacity(dist.len());
    let mut gains = Vec::with_capacity(dist.len());
    let mut errors = Vec::with_capacity(dist.len());
    let (mut gain, mut err_gain) = (0.0, 0.0);
    for (k, &pk) in dist.iter().enumerate() {
        let click = 1.0 - (1.0 - t).powi(k as i32);
        let y = channel.y0 + (1.0 - channel.y0) * click;
        let e = if y > 0.0 {
            (channel.e0 * channel.y0 + e_d * click) / y
        } else {
            0.0
        };
        let q = y * pk;
        gain += q;
        err_gain += e * q;
        yields.push(y);
        gains.push(q);
        errors.push(e);
    }
    let qber = if gain > 0.0 { err_gain / gain } else { 0.0 };
    YieldTable {
        yields,
        gains,
        errors,
        gain,
        qber,
    }
}

/// Photon-number cutoff used for a source: 3 for quantum dots, and for
/// Poisson sources the first `k >= 20` with tail below 1e-13.
pub fn photon_cutoff(source: &PhotonSource) -> usize {
    match source {
        PhotonSource::QuantumDot { .. } => 3,
        PhotonSource::Poisson(m) => {
            let mu = m.mu();
            let mut term = (-mu).exp();
            let mut cum = term;
            let mut k = 0;
            while k < 20 || (1.0 - cum) > 1e-13 && k < 400 {
                k += 1;
                term *= mu / k as f64;
                cum += term;
            }
            k
        }
    }
}

/// `1 - H2(e)` with the single-photon contribution dropped for `e >= 1/2`.
fn privacy_term(e1: f64) -> f64 {
    if e1 >= 0.5 {
        0.0
    } else {
        1.0 - binary_entropy(e1.max(0.0)).expect("argument clamped to [0, 1/2)")
    }
}

fn entropy_clamped(x: f64) -> f64 {
    binary_entropy(x.clamp(0.0, 1.0)).expect("argument clamped to [0, 1]")
}

const PHASE_RANDOMIZATION: &str =
    "BB84 security with photon-number statistics requires that the states' global phase must be uniformly randomized; \
     sources with photon-number coherence are rejected";

pub fn key_rate_bb84(
    source: &PhotonSource,
    channel: &ChannelParams,
    distance_km: f64,
    decoy: Decoy,
) -> Result<KeyRateResult> {
    channel.validate()?;
    if source.has_number_coherence() {
        return Err(Error::Assumption(format!(
            "{PHASE_RANDOMIZATION} (got {})",
            source.describe()
        )));
    }
    let eta_t = channel_transmittance(distance_km, channel)?;
    let dist = source.photon_distribution(photon_cutoff(source));
    let table = yields_gains_qber(&dist, channel, eta_t, channel.e_d);
    let eff = source.effective();
    let (q1, e1) = match decoy {
        Decoy::None => {
            let q1 = table.gain - eff.p_multi;
            let e1 = if q1 > 0.0 {
                table.qber * table.gain / q1
            } else {
                1.0
            };
            (q1, e1)
        }
        Decoy::Infinite => {
            let y1 = table.yields[1];
            let e1 = (channel.e0 * channel.y0 + channel.e_d * channel.eta_d * eta_t) / y1;
            (y1 * eff.p1, e1)
        }
    };
    Ok(finish(0.5, q1, e1, &table, channel))
}

fn finish(
    prefactor: f64,
    q1: f64,
    e1: f64,
    table: &YieldTable,
    channel: &ChannelParams,
) -> KeyRateResult {
    let bracket = if q1 > 0.0 { q1 * privacy_term(e1) } else { 0.0 }
        - channel.f * table.gain * entropy_clamped(table.qber);
    KeyRateResult {
        rate: (prefactor * bracket).max(0.0),
        gain: table.gain,
        qber: table.qber,
        q1,
        e1,
    }
}

/// Twin-field rate with infinite decoys: each pulse sees `√η_t`, the
/// misalignment becomes `e_d + e_s` and the rate carries `d / 2m`.
pub fn key_rate_twinfield(
    source: &PhotonSource,
    channel: &ChannelParams,
    distance_km: f64,
    tf: &TwinFieldParams,
) -> Result<KeyRateResult> {
    channel.validate()?;
    tf.validate()?;
    if let PhotonSource::QuantumDot { populations, .. } = source {
        if !populations.coherent() {
            return Err(Error::Assumption(format!(
                "twin-field QKD needs a shared optical phase and must be implemented with coherent (RE) quantum dots; got {}",
                source.describe()
            )));
        }
        if populations.p().iter().filter(|&&p| p > 0.0).count() < 2 {
            return Err(Error::Assumption(format!(
                "a single Fock-state source has no accessible phase to encode ({})",
                source.describe()
            )));
        }
    }
    let eta_t = channel_transmittance(distance_km, channel)?.sqrt();
    let e_mis = channel.e_d + tf.e_s;
    let dist = source.photon_distribution(photon_cutoff(source));
    let table = yields_gains_qber(&dist, channel, eta_t, e_mis);
    let eff = source.effective();
    let y1 = table.yields[1];
    let e1 = (channel.e0 * channel.y0 + e_mis * channel.eta_d * eta_t) / y1;
    Ok(finish(
        tf.d / (2.0 * tf.m as f64),
        y1 * eff.p1,
        e1,
        &table,
        channel,
    ))
}

pub const MU_BRACKET: (f64, f64) = (1e-4, 1.5);
pub const MU_TOL: f64 = 1e-5;

/// Maximizes `f` over `[lo, hi]`: a 64-point log grid locates the peak, then
/// golden-section search refines it to `tol`. Handles the flat zero region
/// of clamped rates.
pub fn maximize_scalar(mut f: impl FnMut(f64) -> f64, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    const GRID: usize = 64;
    let xs: Vec<f64> = (0..GRID)
        .map(|i| lo * (hi / lo).powf(i as f64 / (GRID - 1) as f64))
        .collect();
    let vals: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let best = (0..GRID).fold(0, |b, i| if vals[i] > vals[b] { i } else { b });
    let (x, fx) = golden_section_max(
        &mut f,
        xs[best.saturating_sub(1)],
        xs[(best + 1).min(GRID - 1)],
        tol,
    );
    if fx >= vals[best] {
        (x, fx)
    } else {
        (xs[best], vals[best])
    }
}

/// Golden-section search for the maximum of a unimodal `f` on `[a, b]`.
pub fn golden_section_max(
    mut f: impl FnMut(f64) -> f64,
    mut a: f64,
    mut b: f64,
    tol: f64,
) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Best phase-randomized Poisson source at one distance.
pub fn best_pds_bb84(
    channel: &ChannelParams,
    distance_km: f64,
    decoy: Decoy,
) -> Result<(f64, KeyRateResult)> {
    channel.validate()?;
    channel_transmittance(distance_km, channel)?;
    let rate = |mu: f64| {
        key_rate_bb84(
            &PhotonSource::poisson(mu).expect("mu in bracket"),
            channel,
            distance_km,
            decoy,
        )
        .map(|r| r.rate)
        .unwrap_or(0.0)
    };
    let (mu, _) = maximize_scalar(rate, MU_BRACKET.0, MU_BRACKET.1, MU_TOL);
    Ok((
        mu,
        key_rate_bb84(&PhotonSource::poisson(mu)?, channel, distance_km, decoy)?,
    ))
}

pub fn best_pds_twinfield(
    channel: &ChannelParams,
    distance_km: f64,
    tf: &TwinFieldParams,
) -> Result<(f64, KeyRateResult)> {
    channel.validate()?;
    tf.validate()?;
    let rate = |mu: f64| {
        key_rate_twinfield(
            &PhotonSource::poisson(mu).expect("mu in bracket"),
            channel,
            distance_km,
            tf,
        )
        .map(|r| r.rate)
        .unwrap_or(0.0)
    };
    let (mu, _) = maximize_scalar(rate, MU_BRACKET.0, MU_BRACKET.1, MU_TOL);
    Ok((
        mu,
        key_rate_twinfield(&PhotonSource::poisson(mu)?, channel, distance_km, tf)?,
    ))
}

/// First point where `a >= b` after `a < b`, scanning `grid` and refining by
/// bisection to 1e-3. Points where both curves vanish count as neither.
pub fn crossing_distance(
    grid: &[f64],
    a: impl Fn(f64) -> f64,
    b: impl Fn(f64) -> f64,
) -> Option<f64> {
    let state = |x: f64| -> Option<bool> {
        let (va, vb) = (a(x), b(x));
        if va == 0.0 && vb == 0.0 {
            None
        } else {
            Some(va >= vb)
        }
    };
    let mut below_at: Option<f64> = None;
    for &x in grid {
        match state(x) {
            Some(false) => below_at = Some(x),
            Some(true) => {
                if let Some(mut lo) = below_at {
                    let mut hi = x;
                    while hi - lo > 1e-3 {
                        let mid = 0.5 * (lo + hi);
                        if state(mid) == Some(true) {
                            hi = mid;
                        } else {
                            lo = mid;
                        }
                    }
                    return Some(0.5 * (lo + hi));
                }
            }
            None => {}
        }
    }
    None
}

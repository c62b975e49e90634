//! Dispatch of a resolved configuration to the protocol modules.

use qdbench::bitcommit::{best_pds_margin, security_parameters};
use qdbench::coinflip::{
    balanced_at_distance, balanced_with_pulses, click_probability, CoinSource,
};
use qdbench::qkd::{
    best_pds_bb84, best_pds_twinfield, channel_transmittance, key_rate_bb84, key_rate_twinfield,
    Decoy, KeyRateResult,
};
use qdbench::sources::{PdsModel, PhaseMode, PhotonSource};
use qdbench::sweep::{linspace, num, parallel_map, SweepResult};
use qdbench::tokens::{best_pds_tolerance, source_tolerance, TokenSource};
use qdbench::Error;

use crate::config::{Primitive, RunConfig, SourceSpec};
use crate::CliError;

const SOURCE_COLUMNS: &[&str] = &["source", "distance_km", "eta", "mu", "source_efficiency"];

pub fn columns(primitive: Primitive) -> Vec<&'static str> {
    let tail: &[&str] = match primitive {
        Primitive::Bb84 | Primitive::Decoy | Primitive::Twinfield => {
            &["rate", "gain", "qber", "q1", "e1"]
        }
        Primitive::Tokens => &[
            "allowed_loss",
            "noise_tolerance",
            "relative_gap",
            "iterations",
        ],
        Primitive::Coinflip => &[
            "n",
            "y",
            "p_alice",
            "p_bob",
            "p_ab",
            "classical",
            "advantage",
            "attack",
            "balanced",
        ],
        Primitive::Bitcommit => &[
            "m2", "m3", "l_prime", "delta", "lambda", "margin", "secure", "n_min",
        ],
    };
    SOURCE_COLUMNS.iter().chain(tail).copied().collect()
}

fn at(cfg: &RunConfig, var: &str, x: f64) -> RunConfig {
    let mut c = cfg.clone();
    match var {
        "distance" => c.distance_km = x,
        "eta" => c.eta = x,
        "mu" => c.mu = Some(x),
        _ => unreachable!("sweep variable validated at parse time"),
    }
    c
}

fn mu_required(cfg: &RunConfig) -> Result<f64, CliError> {
    cfg.mu.ok_or_else(|| {
        CliError::Config(format!(
            "{} with a {} source needs an explicit mu",
            cfg.primitive.name(),
            cfg.source
        ))
    })
}

fn fixed_pds(mu: f64) -> qdbench::Result<PhotonSource> {
    Ok(PhotonSource::Poisson(PdsModel::new(mu, PhaseMode::Fixed)?))
}

/// Cells shared by every primitive: source, distance, eta, mu, efficiency.
fn head(cfg: &RunConfig, mu: Option<f64>, efficiency: f64) -> Vec<String> {
    let eta = match cfg.source {
        SourceSpec::Dot(_) => num(cfg.eta),
        _ => String::new(),
    };
    vec![
        cfg.source.to_string(),
        num(cfg.distance_km),
        eta,
        mu.map(num).unwrap_or_default(),
        num(efficiency),
    ]
}

fn qkd_row(cfg: &RunConfig) -> Result<Vec<String>, CliError> {
    let d = cfg.distance_km;
    let rate = |s: &PhotonSource| -> qdbench::Result<KeyRateResult> {
        match cfg.primitive {
            Primitive::Bb84 => key_rate_bb84(s, &cfg.channel, d, Decoy::None),
            Primitive::Decoy => key_rate_bb84(s, &cfg.channel, d, Decoy::Infinite),
            _ => key_rate_twinfield(s, &cfg.channel, d, &cfg.twinfield),
        }
    };
    let (source, mu, r) = match (&cfg.source, cfg.mu) {
        (SourceSpec::Dot(pop), _) => {
            let s = PhotonSource::quantum_dot(*pop, cfg.eta)?;
            (s, None, rate(&s)?)
        }
        (SourceSpec::Pds, Some(mu)) => {
            let s = PhotonSource::poisson(mu)?;
            (s, Some(mu), rate(&s)?)
        }
        (SourceSpec::Pds, None) => {
            let (mu, r) = match cfg.primitive {
                Primitive::Bb84 => best_pds_bb84(&cfg.channel, d, Decoy::None)?,
                Primitive::Decoy => best_pds_bb84(&cfg.channel, d, Decoy::Infinite)?,
                _ => best_pds_twinfield(&cfg.channel, d, &cfg.twinfield)?,
            };
            (PhotonSource::poisson(mu)?, Some(mu), r)
        }
        (SourceSpec::FixedPds, _) => {
            let mu = mu_required(cfg)?;
            let s = fixed_pds(mu)?;
            (s, Some(mu), rate(&s)?)
        }
    };
    let mut row = head(cfg, mu, source.efficiency());
    row.extend([r.rate, r.gain, r.qber, r.q1, r.e1].map(num));
    Ok(row)
}

fn tokens_row(cfg: &RunConfig) -> Result<Vec<String>, CliError> {
    let eta_t = channel_transmittance(cfg.distance_km, &cfg.channel)? * cfg.channel.eta_d;
    let source = match (&cfg.source, cfg.mu) {
        (SourceSpec::Dot(pop), _) => TokenSource::QuantumDot {
            populations: *pop,
            eta: cfg.eta,
        },
        (SourceSpec::Pds, Some(mu)) => TokenSource::RandomizedPds { mu },
        (SourceSpec::Pds, None) => TokenSource::RandomizedPds {
            mu: best_pds_tolerance(eta_t)?.0,
        },
        (SourceSpec::FixedPds, _) => TokenSource::FixedPhasePds {
            mu: mu_required(cfg)?,
        },
    };
    let mu = match source {
        TokenSource::RandomizedPds { mu } | TokenSource::FixedPhasePds { mu } => Some(mu),
        TokenSource::QuantumDot { .. } => None,
    };
    let r = source_tolerance(&source, eta_t)?;
    let mut row = head(cfg, mu, source.efficiency());
    row.extend([
        num(source.honest_loss(eta_t).clamp(0.0, 1.0)),
        num(r.min_error),
        num(r.relative_gap),
        r.iterations.to_string(),
    ]);
    Ok(row)
}

fn coinflip_row(cfg: &RunConfig) -> Result<Vec<String>, CliError> {
    let (source, mu) = match &cfg.source {
        SourceSpec::Dot(pop) => (
            CoinSource::Dot {
                populations: *pop,
                eta: cfg.eta,
            },
            None,
        ),
        SourceSpec::Pds => {
            let mu = mu_required(cfg)?;
            (CoinSource::Pds { mu }, Some(mu))
        }
        SourceSpec::FixedPds => {
            return Err(Error::Assumption(
                "the coin-flip bounds use photon-number statistics and need a phase-randomized Poisson source"
                    .into(),
            )
            .into())
        }
    };
    let p = match cfg.pulses {
        Some(n) => {
            let p_click =
                click_probability(&source, &cfg.channel, cfg.distance_km, cfg.abort.model)?;
            balanced_with_pulses(&source, n, p_click, cfg.distance_km, cfg.abort.e)?
        }
        None => balanced_at_distance(&source, &cfg.channel, cfg.distance_km, &cfg.abort)?,
    };
    let mut row = head(cfg, mu, 1.0 - source.vacuum_after(1.0));
    row.extend([
        p.n.to_string(),
        num(p.y),
        num(p.p_alice),
        num(p.p_bob),
        num(p.p_ab),
        num(p.classical),
        p.advantage.to_string(),
        p.attack.name().to_string(),
        p.balanced.to_string(),
    ]);
    Ok(row)
}

fn bitcommit_row(cfg: &RunConfig) -> Result<Vec<String>, CliError> {
    let params = &cfg.bitcommit;
    let (source, mu) = match (&cfg.source, cfg.mu) {
        (SourceSpec::Dot(pop), _) => (PhotonSource::quantum_dot(*pop, cfg.eta)?, None),
        (SourceSpec::Pds, Some(mu)) => (PhotonSource::poisson(mu)?, Some(mu)),
        (SourceSpec::Pds, None) => {
            let mu = best_pds_margin(params)?.0;
            (PhotonSource::poisson(mu)?, Some(mu))
        }
        (SourceSpec::FixedPds, _) => {
            let mu = mu_required(cfg)?;
            (fixed_pds(mu)?, Some(mu))
        }
    };
    let r = security_parameters(&source, params)?;
    let mut row = head(cfg, mu, source.efficiency());
    row.extend([
        num(r.m2),
        num(r.m3),
        num(r.l_prime),
        num(r.delta),
        num(r.lambda),
        num(r.margin),
        r.secure.to_string(),
        r.n_min.map(num).unwrap_or_default(),
    ]);
    Ok(row)
}

pub fn evaluate(cfg: &RunConfig) -> Result<Vec<String>, CliError> {
    match cfg.primitive {
        Primitive::Bb84 | Primitive::Decoy | Primitive::Twinfield => qkd_row(cfg),
        Primitive::Tokens => tokens_row(cfg),
        Primitive::Coinflip => coinflip_row(cfg),
        Primitive::Bitcommit => bitcommit_row(cfg),
    }
}

fn check_sweep_source(cfg: &RunConfig, var: &str) -> Result<(), CliError> {
    let dot = matches!(cfg.source, SourceSpec::Dot(_));
    match var {
        "eta" if !dot => Err(CliError::Config(format!(
            "sweeping eta needs a quantum-dot source, got {}",
            cfg.source
        ))),
        "mu" if dot => Err(CliError::Config(format!(
            "sweeping mu needs a Poisson source, got {}",
            cfg.source
        ))),
        _ => Ok(()),
    }
}

/// Evaluates every sweep point (or the single configured point) and
/// collects the rows, ordered by the sweep variable.
pub fn run(cfg: &RunConfig) -> Result<SweepResult, CliError> {
    let mut result = SweepResult::new(
        format!("qdbench {}", cfg.primitive.name()),
        &columns(cfg.primitive),
    )
    .meta("primitive", cfg.primitive.name())
    .meta("source", &cfg.source)
    .assume("background_error_e0", cfg.channel.e0)
    .assume("bitcommit_m3", cfg.bitcommit.m3_reading.name());
    if !cfg.abort.model.dark_counts {
        result = result.assume("z_model", "(1 - p_click)^N, dark counts ignored");
    }
    if cfg.pulses.is_some() {
        result = result.assume("pulse_count", "fixed by configuration");
    }
    for (k, v) in &cfg.echo {
        if k != "out" && k != "workers" {
            result = result.meta(format!("config.{k}"), v);
        }
    }
    match &cfg.sweep {
        None => {
            let row = evaluate(cfg)?;
            result.push(0.0, row)?;
        }
        Some(s) => {
            check_sweep_source(cfg, &s.var)?;
            let points = linspace(s.min, s.max, s.steps)?;
            let rows = parallel_map(&points, cfg.workers, |x| {
                evaluate(&at(cfg, &s.var, x)).map_err(CliError::into_core)
            })?;
            for (x, row) in points.into_iter().zip(rows) {
                result.push(x, row)?;
            }
        }
    }
    Ok(result)
}

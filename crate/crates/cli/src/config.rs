//! Flat `key = value` configuration merged from presets, a file and flags.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use qdbench::bitcommit::{BitCommitParams, M3Reading};
use qdbench::coinflip::{AbortTarget, ZModel};
use qdbench::qkd::{ChannelParams, TwinFieldParams};
use qdbench::sources::{Pumping, QdPopulations};

use crate::CliError;

pub const KEYS: &[&str] = &[
    "source",
    "eta",
    "mu",
    "distance",
    "sweep",
    "out",
    "workers",
    "populations",
    "coherent",
    "eta_d",
    "y0",
    "loss_db_per_km",
    "e_d",
    "e0",
    "f",
    "tf_slices",
    "tf_duty",
    "tf_slicing_error",
    "p_ab",
    "abort_error",
    "dark_counts",
    "pulses",
    "epsilon",
    "beta",
    "gamma",
    "storage",
    "bc_error",
    "eta_c",
    "m3",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Primitive {
    Bb84,
    Decoy,
    Twinfield,
    Tokens,
    Coinflip,
    Bitcommit,
}

impl Primitive {
    pub fn name(self) -> &'static str {
        match self {
            Self::Bb84 => "bb84",
            Self::Decoy => "decoy",
            Self::Twinfield => "twinfield",
            Self::Tokens => "tokens",
            Self::Coinflip => "coinflip",
            Self::Bitcommit => "bitcommit",
        }
    }

    fn default_source(self) -> &'static str {
        match self {
            Self::Twinfield => "re",
            _ => "tpe",
        }
    }

    pub fn sweep_vars(self) -> &'static [&'static str] {
        match self {
            Self::Bitcommit => &["eta", "mu"],
            _ => &["distance", "eta", "mu"],
        }
    }
}

/// Source selection before `eta` and `mu` are applied.
#[derive(Debug, Clone, PartialEq)]
pub enum SourceSpec {
    Dot(QdPopulations),
    /// Phase-randomized Poisson source.
    Pds,
    /// Poisson source with a fixed global phase.
    FixedPds,
}

impl fmt::Display for SourceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Dot(p) if p.coherent() => write!(f, "{}-coherent", p.pumping().name()),
            Self::Dot(p) => write!(f, "{}-incoherent", p.pumping().name()),
            Self::Pds => f.write_str("rp-pds"),
            Self::FixedPds => f.write_str("fp-pds"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub var: String,
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub primitive: Primitive,
    pub source: SourceSpec,
    pub eta: f64,
    /// `None` selects the best mean photon number where the primitive supports it.
    pub mu: Option<f64>,
    pub distance_km: f64,
    pub channel: ChannelParams,
    pub twinfield: TwinFieldParams,
    pub abort: AbortTarget,
    pub pulses: Option<u64>,
    pub bitcommit: BitCommitParams,
    pub sweep: Option<SweepSpec>,
    pub out: Option<PathBuf>,
    pub workers: usize,
    /// Merged settings, echoed into the output header.
    pub echo: BTreeMap<String, String>,
}

fn config_err<T>(msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::Config(msg.into()))
}

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return config_err(format!(
                "line {}: expected key = value, got '{line}'",
                i + 1
            ));
        };
        let key = k.trim().to_ascii_lowercase();
        if !KEYS.contains(&key.as_str()) {
            return config_err(format!("line {}: unknown key '{key}'", i + 1));
        }
        out.insert(key, v.trim().to_string());
    }
    Ok(out)
}

pub fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
    parse_config_text(&text)
}

fn parse<T: FromStr>(
    settings: &BTreeMap<String, String>,
    key: &str,
) -> Result<Option<T>, CliError> {
    settings
        .get(key)
        .map(|v| {
            v.parse::<T>()
                .or_else(|_| config_err(format!("invalid value '{v}' for {key}")))
        })
        .transpose()
}

fn parse_bool(settings: &BTreeMap<String, String>, key: &str) -> Result<Option<bool>, CliError> {
    settings
        .get(key)
        .map(|v| match v.to_ascii_lowercase().as_str() {
            "true" | "yes" | "1" | "on" => Ok(true),
            "false" | "no" | "0" | "off" => Ok(false),
            _ => config_err(format!("invalid boolean '{v}' for {key}")),
        })
        .transpose()
}

pub fn parse_source(name: &str) -> Result<SourceSpec, CliError> {
    let lower = name.to_ascii_lowercase();
    match lower.as_str() {
        "pds" | "rp-pds" => return Ok(SourceSpec::Pds),
        "fp-pds" => return Ok(SourceSpec::FixedPds),
        _ => {}
    }
    let (base, coherence) = if let Some(b) = lower.strip_suffix("-coherent") {
        (b, Some(true))
    } else if let Some(b) = lower.strip_suffix("-incoherent") {
        (b, Some(false))
    } else {
        (lower.as_str(), None)
    };
    let pumping: Pumping = base.parse().or_else(|_| {
        config_err(format!(
            "unknown source '{name}' (expected re, la, tpe, optionally suffixed -coherent/-incoherent, or pds, fp-pds)"
        ))
    })?;
    let pop = QdPopulations::preset(pumping);
    Ok(SourceSpec::Dot(match coherence {
        Some(c) => pop.with_coherence(c),
        None => pop,
    }))
}

fn parse_sweep(text: &str, primitive: Primitive) -> Result<SweepSpec, CliError> {
    let parts: Vec<&str> = text.split_whitespace().collect();
    let [var, min, max, steps] = parts[..] else {
        return config_err(format!("sweep needs VAR MIN MAX STEPS, got '{text}'"));
    };
    let var = var.to_ascii_lowercase();
    if !primitive.sweep_vars().contains(&var.as_str()) {
        return config_err(format!(
            "{} cannot sweep '{var}' (choose from {})",
            primitive.name(),
            primitive.sweep_vars().join(", ")
        ));
    }
    let num = |s: &str| {
        s.parse::<f64>()
            .or_else(|_| config_err(format!("invalid sweep bound '{s}'")))
    };
    let (min, max) = (num(min)?, num(max)?);
    let steps: usize = steps
        .parse()
        .or_else(|_| config_err(format!("invalid sweep step count '{steps}'")))?;
    if steps < 2 {
        return config_err(format!("sweep needs at least 2 steps, got {steps}"));
    }
    if !(min.is_finite() && max.is_finite()) || min > max {
        return config_err(format!("invalid sweep bounds [{min}, {max}]"));
    }
    Ok(SweepSpec {
        var,
        min,
        max,
        steps,
    })
}

impl RunConfig {
    /// Builds a configuration from merged settings, filling preset defaults.
    pub fn resolve(
        primitive: Primitive,
        settings: BTreeMap<String, String>,
    ) -> Result<Self, CliError> {
        let mut source = parse_source(
            settings
                .get("source")
                .map_or(primitive.default_source(), String::as_str),
        )?;
        if let SourceSpec::Dot(pop) = &mut source {
            if let Some(text) = settings.get("populations") {
                let p: Vec<f64> = text
                    .split(',')
                    .map(|s| s.trim().parse::<f64>())
                    .collect::<Result<_, _>>()
                    .or_else(|_| config_err(format!("invalid populations '{text}'")))?;
                let [p0, p1, p2, p3] = p[..] else {
                    return config_err("populations needs four values p0,p1,p2,p3");
                };
                *pop = QdPopulations::new([p0, p1, p2, p3], pop.pumping(), pop.coherent())
                    .map_err(|e| CliError::Config(e.to_string()))?;
            }
            if let Some(c) = parse_bool(&settings, "coherent")? {
                *pop = pop.with_coherence(c);
            }
        } else if settings.contains_key("populations") || settings.contains_key("coherent") {
            return config_err("populations and coherent apply to quantum-dot sources only");
        }

        let d = ChannelParams::default();
        let channel = ChannelParams {
            eta_d: parse(&settings, "eta_d")?.unwrap_or(d.eta_d),
            y0: parse(&settings, "y0")?.unwrap_or(d.y0),
            loss_db_per_km: parse(&settings, "loss_db_per_km")?.unwrap_or(d.loss_db_per_km),
            e_d: parse(&settings, "e_d")?.unwrap_or(d.e_d),
            e0: parse(&settings, "e0")?.unwrap_or(d.e0),
            f: parse(&settings, "f")?.unwrap_or(d.f),
        };
        channel
            .validate()
            .map_err(|e| CliError::Config(e.to_string()))?;
        let t = TwinFieldParams::default();
        let twinfield = TwinFieldParams {
            m: parse(&settings, "tf_slices")?.unwrap_or(t.m),
            d: parse(&settings, "tf_duty")?.unwrap_or(t.d),
            e_s: parse(&settings, "tf_slicing_error")?.unwrap_or(t.e_s),
        };
        twinfield
            .validate()
            .map_err(|e| CliError::Config(e.to_string()))?;
        let a = AbortTarget::default();
        let abort = AbortTarget {
            p_ab: parse(&settings, "p_ab")?.unwrap_or(a.p_ab),
            e: parse(&settings, "abort_error")?.unwrap_or(a.e),
            model: ZModel {
                dark_counts: parse_bool(&settings, "dark_counts")?.unwrap_or(a.model.dark_counts),
            },
        };
        let b = BitCommitParams::default();
        let m3_reading = match settings.get("m3").map(|s| s.to_ascii_lowercase()) {
            None => b.m3_reading,
            Some(s) if s == "multiphoton" => M3Reading::Multiphoton,
            Some(s) if s == "vacuum" => M3Reading::Vacuum,
            Some(s) => return config_err(format!("m3 must be multiphoton or vacuum, got '{s}'")),
        };
        let bitcommit = BitCommitParams {
            epsilon: parse(&settings, "epsilon")?.unwrap_or(b.epsilon),
            beta: parse(&settings, "beta")?.unwrap_or(b.beta),
            gamma: parse(&settings, "gamma")?.unwrap_or(b.gamma),
            storage: parse(&settings, "storage")?.unwrap_or(b.storage),
            e: parse(&settings, "bc_error")?.unwrap_or(b.e),
            eta_c: parse(&settings, "eta_c")?.unwrap_or(b.eta_c),
            m3_reading,
        };
        bitcommit
            .validate()
            .map_err(|e| CliError::Config(e.to_string()))?;

        let eta: f64 = parse(&settings, "eta")?.unwrap_or(1.0);
        if !(0.0..=1.0).contains(&eta) {
            return config_err(format!("collection efficiency eta = {eta} outside [0, 1]"));
        }
        let mu: Option<f64> = parse(&settings, "mu")?;
        if let Some(mu) = mu {
            if !(mu > 0.0 && mu.is_finite()) {
                return config_err(format!("mean photon number mu = {mu} must be positive"));
            }
        }
        let distance_km: f64 = parse(&settings, "distance")?.unwrap_or(0.0);
        if !(distance_km >= 0.0 && distance_km.is_finite()) {
            return config_err(format!("distance {distance_km} km must be nonnegative"));
        }
        let sweep = settings
            .get("sweep")
            .map(|s| parse_sweep(s, primitive))
            .transpose()?;
        let workers = parse(&settings, "workers")?.unwrap_or(1usize).max(1);
        let pulses: Option<u64> = parse(&settings, "pulses")?;
        if pulses == Some(0) {
            return config_err("pulses must be at least 1");
        }
        Ok(Self {
            primitive,
            source,
            eta,
            mu,
            distance_km,
            channel,
            twinfield,
            abort,
            pulses,
            bitcommit,
            sweep,
            out: settings.get("out").map(PathBuf::from),
            workers,
            echo: settings,
        })
    }
}

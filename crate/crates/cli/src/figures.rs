//! Figure bundles: one CSV per curve plus a matplotlib helper script.

use std::collections::BTreeMap;
use std::path::Path;

use qdbench::sources::{Pumping, QdPopulations};
use qdbench::sweep::{num, write_atomic};
use qdbench::tokens::{best_pds_tolerance, threshold_collection};

use crate::config::{Primitive, RunConfig};
use crate::run::run;
use crate::CliError;

pub const FIGURES: &[&str] = &[
    "fig2a", "fig2b", "fig2c", "fig4a", "fig4b", "fig4c", "fig8", "fig9", "fig10",
];

struct Curve {
    name: String,
    primitive: Primitive,
    settings: Vec<(&'static str, String)>,
}

struct Plot {
    x: &'static str,
    y: &'static str,
    log_y: bool,
}

fn curve(
    name: impl Into<String>,
    primitive: Primitive,
    settings: &[(&'static str, &str)],
) -> Curve {
    Curve {
        name: name.into(),
        primitive,
        settings: settings.iter().map(|(k, v)| (*k, v.to_string())).collect(),
    }
}

/// Collection efficiencies 1%, 10%, 20%, ..., 100%.
fn eta_steps() -> Vec<f64> {
    std::iter::once(0.01)
        .chain((1..=10).map(|i| i as f64 / 10.0))
        .collect()
}

fn qkd_curves(primitive: Primitive, dots: &[&str], max_km: f64) -> Vec<Curve> {
    let sweep = format!("distance 0 {max_km} 101");
    let mut out = Vec::new();
    for dot in dots {
        for eta in eta_steps() {
            out.push(curve(
                format!("{dot}_eta{:03}", (eta * 100.0).round() as u32),
                primitive,
                &[("source", dot), ("eta", &num(eta)), ("sweep", &sweep)],
            ));
        }
    }
    out.push(curve(
        "rp-pds_best",
        primitive,
        &[("source", "pds"), ("sweep", &sweep)],
    ));
    out
}

const DOTS: [&str; 3] = ["re", "la", "tpe"];

fn curves(id: &str) -> Result<(Vec<Curve>, Plot), CliError> {
    let rate_vs_distance = Plot {
        x: "distance_km",
        y: "rate",
        log_y: true,
    };
    Ok(match id {
        "fig2a" => (
            qkd_curves(Primitive::Bb84, &["la", "tpe"], 150.0),
            rate_vs_distance,
        ),
        "fig2b" => (
            qkd_curves(Primitive::Decoy, &["la", "tpe"], 250.0),
            rate_vs_distance,
        ),
        "fig2c" => (
            qkd_curves(Primitive::Twinfield, &["re"], 500.0),
            rate_vs_distance,
        ),
        "fig4a" => {
            let mut c: Vec<Curve> = DOTS
                .iter()
                .map(|d| {
                    curve(
                        *d,
                        Primitive::Tokens,
                        &[("source", d), ("sweep", "eta 0.05 1 20")],
                    )
                })
                .collect();
            for pds in ["rp-pds", "fp-pds"] {
                c.push(curve(
                    pds,
                    Primitive::Tokens,
                    &[("source", pds), ("sweep", "mu 0.05 2 20")],
                ));
            }
            let plot = Plot {
                x: "source_efficiency",
                y: "noise_tolerance",
                log_y: false,
            };
            (c, plot)
        }
        "fig4b" => {
            let mut c: Vec<Curve> = DOTS
                .iter()
                .map(|d| {
                    curve(
                        *d,
                        Primitive::Tokens,
                        &[("source", d), ("sweep", "eta 0.1 1 19")],
                    )
                })
                .collect();
            c.push(curve(
                "rp-pds_best",
                Primitive::Tokens,
                &[("source", "pds")],
            ));
            let plot = Plot {
                x: "eta",
                y: "noise_tolerance",
                log_y: false,
            };
            (c, plot)
        }
        "fig4c" => {
            let (_, pds_best) = best_pds_tolerance(1.0)?;
            let sweep = "distance 0 20 21";
            let mut c = Vec::new();
            for d in DOTS {
                let pop = QdPopulations::preset(d.parse::<Pumping>()?);
                let eta = threshold_collection(&pop, pds_best, 0.05, 1.0)?.unwrap_or(1.0);
                c.push(curve(
                    format!("{d}_threshold"),
                    Primitive::Tokens,
                    &[("source", d), ("eta", &num(eta)), ("sweep", sweep)],
                ));
            }
            c.push(curve(
                "rp-pds_best",
                Primitive::Tokens,
                &[("source", "pds"), ("sweep", sweep)],
            ));
            let plot = Plot {
                x: "distance_km",
                y: "noise_tolerance",
                log_y: false,
            };
            (c, plot)
        }
        "fig8" => {
            let mut c: Vec<Curve> = DOTS
                .iter()
                .map(|d| {
                    curve(
                        *d,
                        Primitive::Coinflip,
                        &[("source", d), ("pulses", "1000"), ("sweep", "eta 0.1 1 10")],
                    )
                })
                .collect();
            c.push(curve(
                "rp-pds",
                Primitive::Coinflip,
                &[
                    ("source", "pds"),
                    ("pulses", "1000"),
                    ("sweep", "mu 0.05 3 20"),
                ],
            ));
            let plot = Plot {
                x: "source_efficiency",
                y: "p_bob",
                log_y: false,
            };
            (c, plot)
        }
        "fig9" => {
            let c = DOTS
                .iter()
                .map(|d| {
                    curve(
                        *d,
                        Primitive::Coinflip,
                        &[("source", d), ("sweep", "distance 0 100 21")],
                    )
                })
                .collect();
            let plot = Plot {
                x: "distance_km",
                y: "p_bob",
                log_y: false,
            };
            (c, plot)
        }
        "fig10" => {
            let mut c: Vec<Curve> = ["la", "tpe"]
                .iter()
                .map(|d| {
                    curve(
                        *d,
                        Primitive::Bitcommit,
                        &[("source", d), ("sweep", "eta 0.01 1 100")],
                    )
                })
                .collect();
            c.push(curve(
                "rp-pds",
                Primitive::Bitcommit,
                &[("source", "pds"), ("sweep", "mu 0.01 5 100")],
            ));
            let plot = Plot {
                x: "source_efficiency",
                y: "margin",
                log_y: false,
            };
            (c, plot)
        }
        other => {
            return Err(CliError::Config(format!(
                "unknown figure '{other}' (known: {})",
                FIGURES.join(", ")
            )))
        }
    })
}

fn plot_script(id: &str, plot: &Plot) -> String {
    format!(
        r##"#!/usr/bin/env python3
# Plots every {id}_*.csv next to this script.
import csv
import glob
import os

import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))
fig, ax = plt.subplots()
for path in sorted(glob.glob(os.path.join(here, "{id}_*.csv"))):
    with open(path) as fh:
        rows = list(csv.DictReader(line for line in fh if not line.startswith("#")))
    xs = [float(r["{x}"]) for r in rows if r["{x}"] and r["{y}"]]
    ys = [float(r["{y}"]) for r in rows if r["{x}"] and r["{y}"]]
    label = os.path.basename(path)[len("{id}_"):-4]
    if len(xs) == 1:
        ax.axhline(ys[0], linestyle="--", color="k", label=label)
    else:
        ax.plot(xs, ys, linestyle="--" if "pds" in label else "-", label=label)
ax.set_xlabel("{x}")
ax.set_ylabel("{y}")
{log}ax.legend(fontsize="small")
fig.savefig(os.path.join(here, "{id}.png"), dpi=150)
"##,
        x = plot.x,
        y = plot.y,
        log = if plot.log_y {
            "ax.set_yscale(\"log\")\n"
        } else {
            ""
        },
    )
}

/// Writes the bundle for `id` into `dir` and returns the files written.
pub fn figures(
    id: &str,
    dir: &Path,
    base: &BTreeMap<String, String>,
    workers: usize,
) -> Result<Vec<String>, CliError> {
    let (curves, plot) = curves(id)?;
    std::fs::create_dir_all(dir).map_err(qdbench::Error::from)?;
    let mut written = Vec::new();
    for c in curves {
        let mut settings = base.clone();
        for (k, v) in &c.settings {
            settings.insert(k.to_string(), v.clone());
        }
        settings.insert("workers".into(), workers.to_string());
        let cfg = RunConfig::resolve(c.primitive, settings)?;
        let result = run(&cfg)?.meta("figure", id).meta("curve", &c.name);
        let file = format!("{id}_{}.csv", c.name);
        result.write_atomic(&dir.join(&file))?;
        written.push(file);
    }
    let script = format!("plot_{id}.py");
    write_atomic(&dir.join(&script), plot_script(id, &plot).as_bytes())?;
    written.push(script);
    Ok(written)
}

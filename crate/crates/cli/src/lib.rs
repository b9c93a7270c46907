//! The `bvloop` command line.

pub mod json;

use std::io::Write;
use std::ops::RangeInclusive;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use bvloop::bv_structure::{assemble_delta, BVTable};
use bvloop::graded_ring::{build_presentation, normal_form};
use bvloop::verify::{self, Suite, VerifyOptions};
use bvloop::SpaceSpec;

use json::RingJson;

/// Environment variable capping the `x`-exponent of every sweep.
pub const MAX_Q_ENV: &str = "BVLOOP_MAX_Q";

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILED: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "bvloop",
    version,
    about = "Integral BV structure on the loop homology of HP^n and OP^2"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the presentation of H_*(LM) and its additive groups.
    Ring {
        #[arg(long)]
        space: SpaceSpec,
        /// Inclusive loop-degree range `lo..hi`.
        #[arg(long, allow_hyphen_values = true, value_parser = parse_range)]
        degrees: Option<RangeInclusive<i64>>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Apply Δ to a monomial such as `a^2*b*x`.
    Delta {
        #[arg(long)]
        space: SpaceSpec,
        monomial: String,
    },
    /// Re-derive Δ from the seven-term identity.
    Derive {
        #[arg(long)]
        space: SpaceSpec,
        #[arg(long, default_value_t = 6)]
        max_q: u32,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Run verification suites.
    Verify {
        #[arg(long)]
        space: SpaceSpec,
        #[arg(long, default_value = "all")]
        suite: Suite,
        #[arg(long, default_value_t = 6)]
        max_q: u32,
        /// Largest ordinary degree compared against the stable splitting.
        #[arg(long)]
        max_degree: Option<i64>,
        #[arg(long, default_value_t = VerifyOptions::default().seed)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Write the JSON report here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Parses `lo..hi` (inclusive).
pub fn parse_range(s: &str) -> Result<RangeInclusive<i64>, String> {
    let (lo, hi) = s
        .split_once("..")
        .ok_or_else(|| format!("expected lo..hi, got `{s}`"))?;
    let lo: i64 = lo
        .trim()
        .parse()
        .map_err(|_| format!("bad lower bound `{lo}`"))?;
    let hi: i64 = hi
        .trim()
        .trim_start_matches('=')
        .parse()
        .map_err(|_| format!("bad upper bound `{hi}`"))?;
    if lo > hi {
        return Err(format!("empty range `{s}`"));
    }
    Ok(lo..=hi)
}

/// An error in the user's input rather than in the mathematics.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

/// `min(requested, $BVLOOP_MAX_Q)`.
pub fn capped_max_q(requested: u32, env: Option<&str>) -> Result<u32> {
    match env {
        None => Ok(requested),
        Some(v) => {
            let cap: u32 = v.trim().parse().map_err(|_| {
                UsageError(format!("{MAX_Q_ENV} must be a natural number, got `{v}`"))
            })?;
            Ok(requested.min(cap))
        }
    }
}

fn env_max_q(requested: u32) -> Result<u32> {
    capped_max_q(requested, std::env::var(MAX_Q_ENV).ok().as_deref())
}

/// Default ring range: from just below `-d` to three periods of `x`.
pub fn default_degrees(space: &SpaceSpec) -> RangeInclusive<i64> {
    -space.dimension() - 1..=3 * space.x_degree()
}

fn emit(out: &mut dyn Write, path: Option<&PathBuf>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            writeln!(out, "{text}")?;
            Ok(())
        }
    }
}

/// Runs one command, writing human output to `out`; returns the exit code.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<u8> {
    match cli.command {
        Command::Ring {
            space,
            degrees,
            format,
            out: path,
        } => {
            let ring = build_presentation(&space);
            let degrees = degrees.unwrap_or_else(|| default_degrees(&space));
            let table = RingJson::new(&space.to_string(), &ring, degrees);
            let text = match format {
                Format::Json => serde_json::to_string_pretty(&table)?,
                Format::Text => ring_text(&table, &ring.label),
            };
            emit(out, path.as_ref(), &text)?;
            Ok(EXIT_OK)
        }
        Command::Delta { space, monomial } => {
            let table = BVTable::closed_form(&space);
            let ring = table.ring().clone();
            let word = ring
                .parse_word(&monomial)
                .map_err(|e| UsageError(format!("cannot parse `{monomial}`: {e}")))?;
            let element = normal_form(&ring, &word).map_err(|e| UsageError(e.to_string()))?;
            if element.is_zero() {
                writeln!(err, "note: {monomial} is zero in {}", ring.label)?;
            }
            writeln!(out, "{}", table.delta(&element))?;
            Ok(EXIT_OK)
        }
        Command::Derive {
            space,
            max_q,
            format,
        } => {
            let max_q = env_max_q(max_q)?;
            match assemble_delta(&space, max_q) {
                Ok(d) => {
                    let text = match format {
                        Format::Text => d.to_string(),
                        Format::Json => serde_json::to_string_pretty(&json!({
                            "space": space.to_string(),
                            "nu": d.nu.nu.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                            "lambda": d.lambda.to_string(),
                            "l": d.l.to_string(),
                            "rho0": d.rho.rho0.to_string(),
                            "rho1": d.rho.rho1.to_string(),
                            "nu0": d.table.nu0,
                            "nu_step": d.table.nu_step,
                            "rho_step": d.table.rho_step,
                            "max_q": max_q,
                            "matches_closed_form": true,
                        }))?,
                    };
                    writeln!(out, "{text}")?;
                    Ok(EXIT_OK)
                }
                Err(e) => {
                    writeln!(err, "derivation failed: {e}")?;
                    Ok(EXIT_FAILED)
                }
            }
        }
        Command::Verify {
            space,
            suite,
            max_q,
            max_degree,
            seed,
            format,
            out: path,
        } => {
            let opts = VerifyOptions {
                max_q: env_max_q(max_q)?,
                max_degree,
                seed,
                ..VerifyOptions::default()
            };
            let report = verify::run(&space, suite, &opts);
            let json = serde_json::to_string_pretty(&report)?;
            if let Some(p) = &path {
                std::fs::write(p, &json).with_context(|| format!("writing {}", p.display()))?;
            }
            match format {
                Format::Text => writeln!(out, "{report}")?,
                Format::Json if path.is_none() => writeln!(out, "{json}")?,
                Format::Json => {}
            }
            Ok(if report.passed() {
                EXIT_OK
            } else {
                EXIT_FAILED
            })
        }
    }
}

fn ring_text(table: &RingJson, label: &str) -> String {
    let mut s = format!("{label} (loop degrees, shift {})\n", table.shift);
    let gens: Vec<String> = table
        .generators
        .iter()
        .map(|g| format!("{} ({}, {})", g.name, g.degree, g.parity))
        .collect();
    s += &format!("generators: {}\n", gens.join(", "));
    let mut rels = table.relations.clone();
    rels.extend(
        table
            .torsion
            .iter()
            .map(|t| format!("{}·{}", t.modulus, t.monomial)),
    );
    s += &format!("relations: {}\n", rels.join(", "));
    s += "degree  group";
    for g in &table.groups {
        let group = bvloop::AbelianGroup::new(g.rank, g.torsion.iter().copied());
        if !group.is_trivial() {
            s += &format!("\n{:>6}  {group}", g.degree);
        }
    }
    s
}

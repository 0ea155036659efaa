//! `dbp`: run the distributed protocol on a lattice.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde::Serialize;

use super::{drive, load_lattice, sweep_output, to_json, CliError, GlobalOpts};
use crate::protocol::{
    rate_exact_with, rate_monte_carlo, simulate, Protocol, RationalRatioRow, SetOptions, SetPolicy, SetProvenance,
    SourceSpec,
};

#[derive(Debug, Parser, Serialize)]
#[command(name = "dbp", version, about = "Distributed nearest-plane protocol: simulation, reachable sets and rates")]
pub struct DbpCli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: DbpCommand,
}

#[derive(Debug, Subcommand, Serialize)]
pub enum DbpCommand {
    /// Run sensors and the central node on seeded inputs and compare with direct rounding.
    Simulate {
        /// Lattice file or catalog name.
        #[arg(long)]
        lattice: String,
        #[arg(long, default_value = "uniform:A=5")]
        source: SourceSpec,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long)]
        seed: u64,
        /// Use all residues 0..q_m instead of the reachable ones.
        #[arg(long)]
        full_sets: bool,
    },
    /// Sum rate and its decomposition.
    Rate {
        #[arg(long)]
        lattice: String,
        #[arg(long, default_value = "uniform:A=5")]
        source: SourceSpec,
        /// Exact piecewise computation (uniform sources only).
        #[arg(long)]
        exact: bool,
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
        /// Required unless --exact.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Ratio rows and reachable residue sets.
    Sets {
        #[arg(long)]
        lattice: String,
        #[arg(long, default_value = "uniform:A=5")]
        source: SourceSpec,
    },
    /// Rates for the basis {(1,0), (1/m, sqrt(1 - 1/m^2))} over a range of m.
    SweepFig3 {
        #[arg(long, default_value_t = 2)]
        m_min: u32,
        #[arg(long, default_value_t = 120)]
        m_max: u32,
        /// Uniform support width A.
        #[arg(long, default_value_t = 5.0)]
        a: f64,
    },
}

#[derive(Serialize)]
struct SetsReport {
    source: String,
    rows: Vec<SetRow>,
}

#[derive(Serialize)]
struct SetRow {
    #[serde(flatten)]
    row: RationalRatioRow,
    provenance: SetProvenance,
    size: usize,
    /// Omitted for full sets.
    values: Option<Vec<String>>,
}

fn protocol(cli: &GlobalOpts, lattice: &crate::lattice::LatticeBasis, source: &SourceSpec, policy: SetPolicy) -> Result<Protocol, CliError> {
    Ok(Protocol::with_tolerance(lattice, source, policy, cli.tol_max_den, cli.tol_ratio)?)
}

pub fn run(cli: DbpCli) -> Result<String, CliError> {
    let g = &cli.global;
    match &cli.command {
        DbpCommand::Simulate { lattice, source, trials, seed, full_sets } => {
            let b = load_lattice(lattice)?;
            let policy = if *full_sets { SetPolicy::Full } else { SetPolicy::Reachable(SetOptions { seed: *seed, ..SetOptions::default() }) };
            let p = protocol(g, &b, source, policy)?;
            to_json(&simulate(&b, &p, source, *trials, *seed)?)
        }
        DbpCommand::Rate { lattice, source, exact, samples, seed } => {
            let b = load_lattice(lattice)?;
            if *exact {
                let SourceSpec::Uniform { a } = *source else {
                    return Err(CliError::Precondition("--exact needs a uniform source".into()));
                };
                let opts = SetOptions { samples: 0, ..SetOptions::default() };
                let p = protocol(g, &b, source, SetPolicy::Reachable(opts))?;
                to_json(&rate_exact_with(&b, a, &p)?)
            } else {
                let seed = seed.ok_or_else(|| CliError::Parse("--seed is required for Monte Carlo rates".into()))?;
                if *samples < 10_000 {
                    return Err(CliError::Precondition(format!("--samples {samples} below the minimum of 10000")));
                }
                let p = protocol(g, &b, source, SetPolicy::Reachable(SetOptions { seed, ..SetOptions::default() }))?;
                to_json(&rate_monte_carlo(&b, &p, source, *samples, seed)?)
            }
        }
        DbpCommand::Sets { lattice, source } => {
            let b = load_lattice(lattice)?;
            let p = protocol(g, &b, source, SetPolicy::Reachable(SetOptions::default()))?;
            let rows = p
                .rows()
                .iter()
                .zip(p.sets())
                .map(|(row, set)| SetRow {
                    row: row.clone(),
                    provenance: set.provenance,
                    size: set.len(),
                    values: (set.provenance != SetProvenance::Full)
                        .then(|| set.values().iter().map(ToString::to_string).collect()),
                })
                .collect();
            to_json(&SetsReport { source: source.to_string(), rows })
        }
        DbpCommand::SweepFig3 { m_min, m_max, a } => {
            let rows = super::run_fig3(*m_min, *m_max, *a)?;
            sweep_output(&rows, "dbp sweep-fig3", &cli.command, g.format)
        }
    }
}

/// Entry point used by the `dbp` binary; returns the process exit code.
pub fn main_with(args: impl IntoIterator<Item = OsString>) -> i32 {
    drive::<DbpCli, _>(args, |cli| {
        let out: Option<PathBuf> = cli.global.out.clone();
        run(cli).map(|text| (text, out))
    })
}

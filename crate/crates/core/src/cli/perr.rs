//! `perr`: error probability of the nearest-plane point.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde::Serialize;

use super::figures::Fig8Config;
use super::{drive, load_lattice, sweep_output, to_json, CliError, GlobalOpts};
use crate::analysis::{
    an_condition_check, chebyshev_bound, combined_bound, exclusion_bound, gaussian_threshold, perr_2d_closed_form,
    perr_3d_polyhedral, perr_mc_gaussian, perr_mc_uniform, random_superbase_scatter, wellrounded_sweep, BoundInputs, ErrorProbabilityReport,
};
use crate::lattice::{catalog_lookup, parse_lattice_file};
use crate::mc::DEFAULT_WORKERS;

#[derive(Debug, Parser, Serialize)]
#[command(name = "perr", version, about = "Error probability of the nearest-plane (Babai) point")]
pub struct PerrCli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: PerrCommand,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Dist {
    Uniform,
    Gauss { sigma: f64 },
}

impl std::str::FromStr for Dist {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("uniform") {
            return Ok(Dist::Uniform);
        }
        let sigma = s
            .strip_prefix("gauss:sigma=")
            .ok_or_else(|| format!("expected 'uniform' or 'gauss:sigma=S', got '{s}'"))?
            .parse::<f64>()
            .map_err(|e| format!("bad sigma: {e}"))?;
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err("sigma must be positive".into());
        }
        Ok(Dist::Gauss { sigma })
    }
}

#[derive(Debug, Subcommand, Serialize)]
pub enum PerrCommand {
    /// Closed form for the 2-D basis {(1,0), (a,b)}.
    Closed2d {
        #[arg(long, allow_hyphen_values = true)]
        a: f64,
        #[arg(long)]
        b: f64,
    },
    /// Exact 3-D value from polytope volumes.
    Poly3d {
        #[arg(long)]
        lattice: String,
        /// Keep the given column order instead of minimising over all six.
        #[arg(long)]
        no_perm_search: bool,
    },
    /// Monte Carlo estimate.
    Mc {
        #[arg(long)]
        lattice: String,
        #[arg(long, default_value = "uniform")]
        dist: Dist,
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_WORKERS)]
        workers: usize,
    },
    /// Chebyshev, exclusion and combined bounds on P_c.
    Bounds {
        /// Catalog name (may carry published cell sizes only) or lattice file.
        #[arg(long)]
        lattice: String,
        /// Covering radius, required for lattice files.
        #[arg(long)]
        r_cov: Option<f64>,
    },
    /// Chebyshev condition for A_n, n = 1..=n_max.
    AnCheck {
        #[arg(long, default_value_t = 100)]
        n_max: usize,
    },
    /// Noise-variance thresholds for the Gaussian case.
    GaussThreshold {
        #[arg(long)]
        lattice: String,
        /// Evaluate the chi-squared success bound at these deviations.
        #[arg(long, value_delimiter = ',')]
        sigma: Vec<f64>,
    },
    /// Well-rounded family sweep over beta in [0, pi/4].
    SweepEq8 {
        #[arg(long, default_value_t = 24)]
        steps: usize,
    },
    /// Random obtuse superbases: density vs error probability.
    Scatter {
        #[arg(long, default_value_t = 200)]
        count: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Known 3-D lattices: packing density and error probability.
    Table1,
    /// Known lattices plus a random scatter.
    Fig5 {
        #[arg(long, default_value_t = 200)]
        count: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Minimum 2-D error probability as a function of packing density.
    Fig7 {
        #[arg(long, default_value_t = 50)]
        steps: usize,
    },
    /// Gaussian error probability over a density x sigma grid.
    Fig8 {
        #[arg(long, default_value_t = 4)]
        density_steps: usize,
        #[arg(long, default_value_t = 10)]
        sigma_steps: usize,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long)]
        seed: u64,
    },
}

#[derive(Serialize)]
struct BoundsReport {
    inputs: BoundInputs,
    chebyshev: Result<ErrorProbabilityReport, String>,
    exclusion: ErrorProbabilityReport,
    combined: Result<ErrorProbabilityReport, String>,
}

#[derive(Serialize)]
struct ThresholdReport {
    #[serde(flatten)]
    threshold: crate::analysis::GaussianThreshold,
    success_lower_bounds: Vec<(f64, f64)>,
}

fn bound_inputs(lattice: &str, r_cov: Option<f64>) -> Result<BoundInputs, CliError> {
    if std::path::Path::new(lattice).is_file() {
        let b = parse_lattice_file(lattice)?;
        let r = r_cov.ok_or_else(|| CliError::Parse("--r-cov is required for lattice files".into()))?;
        return Ok(BoundInputs::new(&b.babai_sizes(), r)?);
    }
    let mut entry = catalog_lookup(lattice)?;
    if let Some(r) = r_cov {
        entry.covering_radius = Some(r);
    }
    Ok(BoundInputs::from_catalog(&entry)?)
}

pub fn run(cli: PerrCli) -> Result<String, CliError> {
    let g = &cli.global;
    let name = |s: &str| format!("perr {s}");
    match &cli.command {
        PerrCommand::Closed2d { a, b } => to_json(&perr_2d_closed_form(*a, *b)?),
        PerrCommand::Poly3d { lattice, no_perm_search } => {
            to_json(&perr_3d_polyhedral(&load_lattice(lattice)?, !no_perm_search)?)
        }
        PerrCommand::Mc { lattice, dist, samples, seed, workers } => {
            let b = load_lattice(lattice)?;
            match dist {
                Dist::Uniform => to_json(&perr_mc_uniform(&b, *samples, *seed, *workers)?),
                Dist::Gauss { sigma } => to_json(&perr_mc_gaussian(&b, *sigma, *samples, *seed, *workers)?),
            }
        }
        PerrCommand::Bounds { lattice, r_cov } => {
            let inputs = bound_inputs(lattice, *r_cov)?;
            let chebyshev = chebyshev_bound(&inputs);
            let combined = combined_bound(&inputs);
            // with m = 0 the exclusion bound is trivial and nothing else applies
            if let (Err(e), 0) = (&chebyshev, inputs.m) {
                return Err(CliError::Precondition(e.to_string()));
            }
            to_json(&BoundsReport {
                exclusion: exclusion_bound(&inputs),
                chebyshev: chebyshev.map_err(|e| e.to_string()),
                combined: combined.map_err(|e| e.to_string()),
                inputs,
            })
        }
        PerrCommand::AnCheck { n_max } => {
            let rows: Vec<_> = (1..=*n_max).map(an_condition_check).collect();
            sweep_output(&rows, &name("an-check"), &cli.command, g.format)
        }
        PerrCommand::GaussThreshold { lattice, sigma } => {
            let t = gaussian_threshold(&load_lattice(lattice)?)?;
            let success_lower_bounds = sigma.iter().map(|&s| (s, t.success_lower_bound(s))).collect();
            to_json(&ThresholdReport { threshold: t, success_lower_bounds })
        }
        PerrCommand::SweepEq8 { steps } => {
            sweep_output(&wellrounded_sweep(*steps)?, &name("sweep-eq8"), &cli.command, g.format)
        }
        PerrCommand::Scatter { count, seed } => {
            sweep_output(&random_superbase_scatter(*count, *seed)?, &name("scatter"), &cli.command, g.format)
        }
        PerrCommand::Table1 => sweep_output(&super::run_table1()?, &name("table1"), &cli.command, g.format),
        PerrCommand::Fig5 { count, seed } => {
            sweep_output(&super::run_fig5(*count, *seed)?, &name("fig5"), &cli.command, g.format)
        }
        PerrCommand::Fig7 { steps } => sweep_output(&super::run_fig7(*steps)?, &name("fig7"), &cli.command, g.format),
        PerrCommand::Fig8 { density_steps, sigma_steps, samples, seed } => {
            let cfg = Fig8Config::with_grid(*density_steps, *sigma_steps, *samples, *seed);
            sweep_output(&super::run_fig8(&cfg)?, &name("fig8"), &cli.command, g.format)
        }
    }
}

/// Entry point used by the `perr` binary; returns the process exit code.
pub fn main_with(args: impl IntoIterator<Item = OsString>) -> i32 {
    drive::<PerrCli, _>(args, |cli| {
        let out: Option<PathBuf> = cli.global.out.clone();
        run(cli).map(|text| (text, out))
    })
}

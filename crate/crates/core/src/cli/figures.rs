//! Table and figure data as rows ready for CSV.

use std::f64::consts::PI;

use serde::Serialize;

use crate::analysis::{
    min_perr_given_density_2d, perr_3d_polyhedral, perr_mc_gaussian, random_superbase_scatter, AnalysisError,
};
use crate::lattice::{catalog_lookup, CellType, LatticeBasis};
use crate::mc::DEFAULT_WORKERS;
use crate::protocol::{rate_exact_uniform, ProtocolError};
use crate::scalar::{Rational, ScalarExpr};

/// Lattices of the known-lattice table, in display order.
pub const TABLE1_LATTICES: [(&str, &str); 5] = [("Z3", "Z3"), ("hp", "Lambda_hp"), ("FCC", "FCC"), ("hrd", "Lambda_hrd"), ("BCC", "BCC")];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table1Row {
    pub lattice: String,
    pub density: f64,
    pub p_e: f64,
    pub cell_type: CellType,
    /// Best column order, e.g. `0-2-1`.
    pub permutation: String,
}

/// Packing density and smallest error probability over column orders.
pub fn run_table1() -> Result<Vec<Table1Row>, AnalysisError> {
    TABLE1_LATTICES
        .iter()
        .map(|(key, label)| {
            let b = catalog_lookup(key)?.basis.expect("3-D catalog entries carry a basis");
            let p = perr_3d_polyhedral(&b, true)?;
            let perm = p.report.permutation.clone().unwrap_or_default();
            Ok(Table1Row {
                lattice: (*label).to_string(),
                density: p.density,
                p_e: p.report.p_e,
                cell_type: p.cell_type,
                permutation: perm.iter().map(ToString::to_string).collect::<Vec<_>>().join("-"),
            })
        })
        .collect()
}

/// `{(1,0), (1/m, sqrt(1 - 1/m^2))}`, exact.
pub fn fig3_basis(m: u32) -> LatticeBasis {
    let m = i64::from(m);
    let a = ScalarExpr::rational(Rational::new(1, m));
    let b = ScalarExpr::with_sqrt(Rational::one(), Rational::new(m * m - 1, m * m)).expect("m >= 2");
    LatticeBasis::from_columns(vec![vec![ScalarExpr::integer(1), ScalarExpr::zero()], vec![a, b]]).expect("nonsingular")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[allow(non_snake_case)]
pub struct Fig3Row {
    pub m: u32,
    pub a: f64,
    pub q1: i128,
    pub H_U2: f64,
    pub H_U1S1: f64,
    pub H_U1: f64,
    pub H_S1_given_U1: f64,
    /// `sum_i H(S_i | U~_i)`.
    pub extra_rate: f64,
    pub sum_rate: f64,
    /// `n log2 A - log2|det V| + sum_i log2 q_i`.
    pub bound: f64,
}

/// Exact rates for `m = m_min..=m_max` under a uniform source of width `a_width`.
pub fn run_fig3(m_min: u32, m_max: u32, a_width: f64) -> Result<Vec<Fig3Row>, ProtocolError> {
    if m_min < 2 || m_max < m_min {
        return Err(ProtocolError::Invalid(format!("need 2 <= m_min <= m_max, got {m_min}..{m_max}")));
    }
    (m_min..=m_max)
        .map(|m| {
            let rep = rate_exact_uniform(&fig3_basis(m), a_width)?;
            let (s1, s2) = (&rep.sensors[0], &rep.sensors[1]);
            Ok(Fig3Row {
                m,
                a: 1.0 / f64::from(m),
                q1: s1.q,
                H_U2: s2.h_us,
                H_U1S1: s1.h_us,
                H_U1: s1.h_u,
                H_S1_given_U1: s1.h_s_given_u,
                extra_rate: rep.extra_rate,
                sum_rate: rep.sum_rate,
                bound: rep.bound.map_or(f64::NAN, |b| b.total),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Fig5Row {
    /// `known` or `random`.
    pub kind: String,
    pub name: String,
    pub density: f64,
    pub p_e: f64,
    pub cell_type: CellType,
}

/// Known lattices followed by `count` random obtuse superbases.
pub fn run_fig5(count: usize, seed: u64) -> Result<Vec<Fig5Row>, AnalysisError> {
    let mut rows: Vec<Fig5Row> = run_table1()?
        .into_iter()
        .map(|r| Fig5Row { kind: "known".into(), name: r.lattice, density: r.density, p_e: r.p_e, cell_type: r.cell_type })
        .collect();
    rows.extend(random_superbase_scatter(count, seed)?.into_iter().enumerate().map(|(i, r)| Fig5Row {
        kind: "random".into(),
        name: format!("r{i}"),
        density: r.density,
        p_e: r.p_e,
        cell_type: r.cell_type,
    }));
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Fig7Row {
    pub density: f64,
    pub a: f64,
    pub b: f64,
    pub p_e: f64,
}

pub const MAX_DENSITY_2D: f64 = 0.906_899_682_117_108_9; // pi / (2 sqrt 3)

/// Minimum 2-D `P_e` for `steps + 1` densities from `pi/4 - 0.15` up to the
/// hexagonal density.
pub fn run_fig7(steps: usize) -> Result<Vec<Fig7Row>, AnalysisError> {
    let steps = steps.max(1);
    let lo = PI / 4.0 - 0.15;
    (0..=steps)
        .map(|i| {
            let d = if i == steps { MAX_DENSITY_2D } else { lo + (MAX_DENSITY_2D - lo) * i as f64 / steps as f64 };
            let o = min_perr_given_density_2d(d)?;
            Ok(Fig7Row { density: o.density, a: o.a, b: o.b, p_e: o.p_e })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Fig8Config {
    pub densities: Vec<f64>,
    pub sigmas: Vec<f64>,
    pub samples: u64,
    pub seed: u64,
}

impl Fig8Config {
    pub fn with_grid(density_steps: usize, sigma_steps: usize, samples: u64, seed: u64) -> Self {
        let ds = density_steps.max(1);
        let densities = (0..=ds).map(|i| PI / 4.0 + (MAX_DENSITY_2D - PI / 4.0) * i as f64 / ds as f64).collect();
        let sigmas = (1..=sigma_steps.max(1)).map(|i| 0.05 * i as f64).collect();
        Fig8Config { densities, sigmas, samples, seed }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Fig8Row {
    pub density: f64,
    pub sigma: f64,
    pub a: f64,
    pub b: f64,
    pub p_e: f64,
    pub std_error: f64,
    pub p_c_t_term: f64,
    pub t_term_std_error: f64,
}

/// Gaussian-noise `P_e` along the density-optimal 2-D family. Every grid
/// point reuses the seed, so neighbouring `sigma` values share random numbers.
pub fn run_fig8(cfg: &Fig8Config) -> Result<Vec<Fig8Row>, AnalysisError> {
    let mut rows = Vec::new();
    for &d in &cfg.densities {
        let o = min_perr_given_density_2d(d)?;
        let b = LatticeBasis::from_f64_columns(&[vec![1.0, 0.0], vec![o.a, o.b]])?;
        for &sigma in &cfg.sigmas {
            let g = perr_mc_gaussian(&b, sigma, cfg.samples, cfg.seed, DEFAULT_WORKERS)?;
            rows.push(Fig8Row {
                density: d,
                sigma,
                a: o.a,
                b: o.b,
                p_e: g.report.p_e,
                std_error: g.report.uncertainty,
                p_c_t_term: g.t_term.p,
                t_term_std_error: g.t_term.std_error,
            });
        }
    }
    Ok(rows)
}

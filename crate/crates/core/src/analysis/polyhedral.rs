//! Exact 3-D error probability from polytope volumes.
//!
//! For each column order the basis is brought to triangular form; there the
//! nearest-plane cell of the origin is the box of sides `|r_ii|`, and the
//! Voronoi cell is cut out by the bisectors of the relevant vectors (read off
//! an obtuse superbase, expressed in the same frame). `P_c` is the fraction
//! of the box inside the Voronoi cell.

use std::f64::consts::{FRAC_PI_4, FRAC_PI_6};

use rand::Rng;
use serde::Serialize;

use super::planar::perr_2d_closed_form;
use super::{AnalysisError, ErrorProbabilityReport, Method};
use crate::geometry::{intersect, HalfSpace, Polyhedron3};
use crate::lattice::{density_from_dmin, obtuse_superbase, voronoi_cell, CellType, LatticeBasis, ObtuseSuperbase};
use crate::mc::worker_rng;

pub const PERMUTATIONS_3: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PermutationResult {
    pub permutation: Vec<usize>,
    pub babai_sizes: Vec<f64>,
    pub p_e: f64,
    /// `vol(V ∩ B)`.
    pub intersection_volume: f64,
    /// Voronoi volume as computed in this frame.
    pub voronoi_volume: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Polyhedral3d {
    pub report: ErrorProbabilityReport,
    pub density: f64,
    pub cell_type: CellType,
    pub covering_radius: f64,
    pub per_permutation: Vec<PermutationResult>,
}

impl Polyhedral3d {
    /// Distinct per-permutation values (merged within `tol`), ascending.
    pub fn distinct_p_e(&self, tol: f64) -> Vec<f64> {
        let mut v: Vec<f64> = self.per_permutation.iter().map(|p| p.p_e).collect();
        v.sort_by(f64::total_cmp);
        v.dedup_by(|a, b| (*a - *b).abs() <= tol);
        v
    }
}

/// Error probability of the nearest-plane point for a uniform input, minimised
/// over the 6 column orders when `search_permutations` is set.
pub fn perr_3d_polyhedral(b: &LatticeBasis, search_permutations: bool) -> Result<Polyhedral3d, AnalysisError> {
    if b.dim() != 3 {
        return Err(AnalysisError::PreconditionViolation(format!("polyhedral pipeline needs n = 3, got {}", b.dim())));
    }
    let sb = obtuse_superbase(b)?;
    let cell = voronoi_cell(&sb)?;
    let orders: Vec<[usize; 3]> = if search_permutations { PERMUTATIONS_3.to_vec() } else { vec![[0, 1, 2]] };
    let per_permutation =
        orders.iter().map(|perm| permutation_result(b, &sb, perm)).collect::<Result<Vec<_>, AnalysisError>>()?;
    let best = per_permutation
        .iter()
        .min_by(|x, y| x.p_e.total_cmp(&y.p_e))
        .expect("at least one ordering");
    let mut report = ErrorProbabilityReport::exact(best.p_e, Method::Polyhedral);
    report.permutation = Some(best.permutation.clone());
    Ok(Polyhedral3d {
        report,
        density: density_from_dmin(3, 2.0 * cell.r_pack, b.volume()),
        cell_type: cell.cell_type,
        covering_radius: cell.r_cov,
        per_permutation,
    })
}

fn permutation_result(b: &LatticeBasis, sb: &ObtuseSuperbase, perm: &[usize; 3]) -> Result<PermutationResult, AnalysisError> {
    let bp = b.permuted(perm)?;
    let sizes = bp.babai_sizes();
    let halfspaces: Vec<HalfSpace> = sb
        .relevant_vectors()
        .iter()
        .map(|v| {
            let w = bp.to_triangular_frame(v);
            HalfSpace::bisector(&[w[0], w[1], w[2]])
        })
        .collect();
    let voronoi = Polyhedron3::from_halfspaces(halfspaces)?;
    let h: Vec<f64> = sizes.iter().map(|a| a / 2.0).collect();
    let babai = Polyhedron3::axis_box([-h[0], -h[1], -h[2]], [h[0], h[1], h[2]])?;
    let both = intersect(&voronoi, &babai)?;
    let box_volume: f64 = sizes.iter().product();
    let p_c = (both.volume() / box_volume).clamp(0.0, 1.0);
    Ok(PermutationResult {
        permutation: perm.to_vec(),
        babai_sizes: sizes,
        p_e: 1.0 - p_c,
        intersection_volume: both.volume(),
        voronoi_volume: voronoi.volume(),
    })
}

/// Member of the one-parameter well-rounded family, `0 <= beta <= pi/4`:
/// third vector `(-sin b, 0, cos b)` up to `pi/6`, then
/// `(-sqrt(sin^2 b - 1/4), -1/2, cos b)`.
pub fn wellrounded_basis(beta: f64) -> Result<LatticeBasis, AnalysisError> {
    if !(0.0..=FRAC_PI_4 + 1e-12).contains(&beta) {
        return Err(AnalysisError::PreconditionViolation(format!("beta = {beta} outside [0, pi/4]")));
    }
    let (s, c) = beta.sin_cos();
    let third = if beta < FRAC_PI_6 { vec![-s, 0.0, c] } else { vec![-(s * s - 0.25).max(0.0).sqrt(), -0.5, c] };
    Ok(LatticeBasis::from_f64_columns(&[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], third])?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub beta: f64,
    pub density: f64,
    pub p_e: f64,
    pub cell_type: CellType,
    /// Planar closed form with `a = -sin beta`, `b = cos beta` (prism branch only).
    pub p_e_prism_closed_form: Option<f64>,
}

/// `steps + 1` evenly spaced `beta` in `[0, pi/4]`, with `pi/6` inserted.
pub fn wellrounded_sweep(steps: usize) -> Result<Vec<SweepRow>, AnalysisError> {
    let steps = steps.max(1);
    let mut betas: Vec<f64> = (0..=steps).map(|i| FRAC_PI_4 * i as f64 / steps as f64).collect();
    if !betas.iter().any(|b| (b - FRAC_PI_6).abs() < 1e-12) {
        betas.push(FRAC_PI_6);
        betas.sort_by(f64::total_cmp);
    }
    betas
        .into_iter()
        .map(|beta| {
            let p = perr_3d_polyhedral(&wellrounded_basis(beta)?, true)?;
            let closed = if beta <= FRAC_PI_6 + 1e-12 {
                let (s, c) = beta.sin_cos();
                Some(perr_2d_closed_form(-s, c)?.report.p_e)
            } else {
                None
            };
            Ok(SweepRow { beta, density: p.density, p_e: p.report.p_e, cell_type: p.cell_type, p_e_prism_closed_form: closed })
        })
        .collect()
}

/// `{(1,0,0), (0,1,0), (-sqrt(17/108), -1/2, sqrt(16/27))}`: same packing
/// density as BCC with a smaller error probability.
pub fn comparison_lattice() -> LatticeBasis {
    use crate::scalar::{Rational, ScalarExpr};
    let r = |p, q| ScalarExpr::rational(Rational::new(p, q));
    let sq = |c: i64, p: i64, q: i64| ScalarExpr::with_sqrt(Rational::from_integer(c), Rational::new(p, q)).expect("positive");
    LatticeBasis::from_columns(vec![
        vec![r(1, 1), r(0, 1), r(0, 1)],
        vec![r(0, 1), r(1, 1), r(0, 1)],
        vec![sq(-1, 17, 108), r(-1, 2), sq(1, 16, 27)],
    ])
    .expect("nonsingular")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScatterRow {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
    pub density: f64,
    pub p_e: f64,
    pub cell_type: CellType,
}

/// Random bases `{(1,0,0), (a,b,0), (c,d,e)}` with `a, c` in `[-1/2, 0]` and
/// `b, d, e` in `[-2, 2]`, kept when `v_0 = -(v_1+v_2+v_3)` completes them to
/// an obtuse superbase and the packing density exceeds 0.4.
pub fn random_superbase_scatter(count: usize, seed: u64) -> Result<Vec<ScatterRow>, AnalysisError> {
    let mut rng = worker_rng(seed, 0);
    let mut rows = Vec::with_capacity(count);
    let mut attempts = 0u64;
    while rows.len() < count {
        attempts += 1;
        if attempts > 10_000_000 {
            return Err(AnalysisError::PreconditionViolation("rejection sampling did not converge".into()));
        }
        let a = rng.random_range(-0.5..=0.0);
        let c = rng.random_range(-0.5..=0.0);
        let b = rng.random_range(-2.0..=2.0);
        let d = rng.random_range(-2.0..=2.0);
        let e = rng.random_range(-2.0..=2.0);
        let vs = [[1.0, 0.0, 0.0], [a, b, 0.0], [c, d, e]];
        let v0 = [-(1.0 + a + c), -(b + d), -e];
        let all = [v0, vs[0], vs[1], vs[2]];
        let obtuse = (0..4).all(|i| (i + 1..4).all(|j| dot(&all[i], &all[j]) <= 0.0));
        if !obtuse || (b * e).abs() < 1e-6 {
            continue;
        }
        let sb = ObtuseSuperbase::new(all.iter().map(|v| v.to_vec()).collect())?;
        let cell = voronoi_cell(&sb)?;
        let density = density_from_dmin(3, 2.0 * cell.r_pack, (b * e).abs());
        if density <= 0.4 {
            continue;
        }
        let basis = LatticeBasis::from_f64_columns(&vs.iter().map(|v| v.to_vec()).collect::<Vec<_>>())?;
        let p = perr_3d_polyhedral(&basis, true)?;
        rows.push(ScatterRow { a, b, c, d, e, density, p_e: p.report.p_e, cell_type: cell.cell_type });
    }
    Ok(rows)
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

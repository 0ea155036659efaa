//! Derived reference values, each checked against an oracle computed here.

use std::f64::consts::PI;

use babai_core::analysis::{
    an_condition_check, min_perr_given_density_2d, perr_2d_closed_form, perr_mc_gaussian, perr_mc_uniform,
};
use babai_core::cvp::{babai_point, closest_point, shortest_vector};
use babai_core::lattice::catalog::an_covering_radius_sq;
use babai_core::lattice::{
    catalog_lookup, is_minkowski_reduced, minkowski_reduce, obtuse_superbase, packing_density, voronoi_cell, CellType,
    LatticeBasis,
};
use babai_core::protocol::{rate_exact_uniform, rate_monte_carlo, Protocol, SetOptions, SetPolicy, SourceSpec};
use babai_core::scalar::{rational_reconstruct, Rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn lattice(name: &str) -> LatticeBasis {
    catalog_lookup(name).unwrap().basis.unwrap()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn col(r: &babai_core::linalg::MatrixR, j: usize) -> Vec<f64> {
    (0..r.dim()).map(|i| r[(i, j)]).collect()
}

#[test]
fn fcc_triangular_form_preserves_gram() {
    let b = lattice("FCC");
    let v = b.vectors();
    let r = b.triangular();
    let perm = b.permutation();
    for i in 0..3 {
        for j in 0..3 {
            let rr = dot(&col(r, i), &col(r, j));
            let vv = dot(&v[perm[i]], &v[perm[j]]);
            assert!((rr - vv).abs() < 1e-12, "({i},{j}): {rr} vs {vv}");
        }
        for k in i + 1..3 {
            assert!(r[(k, i)].abs() < 1e-12);
        }
    }
    let det: f64 = (0..3).map(|i| r[(i, i)].abs()).product();
    assert!((det - 0.5f64.sqrt()).abs() < 1e-12);
}

#[test]
fn minus_one_third_is_recovered() {
    let q = rational_reconstruct(-1.0 / 3.0, 1_000_000, 1e-9).unwrap();
    // cross-multiplication
    assert_eq!(q.numer() * 3, -q.denom());
    assert_eq!(q, Rational::new(-1, 3));
}

#[test]
fn hexagonal_prism_vertices() {
    let hp = lattice("hp");
    let cell = voronoi_cell(&obtuse_superbase(&hp).unwrap()).unwrap();
    assert_eq!(cell.cell_type, CellType::HexagonalPrism);
    let poly = cell.polyhedron().unwrap();
    assert_eq!(poly.vertices().len(), 12);
    // hexagon of the planar A2 cell (circumradius 1/sqrt 3) extruded by +-1/2
    let want = 1.0 / 3.0 + 0.25;
    for p in poly.vertices() {
        assert!((dot(p, p) - want).abs() < 1e-12);
        assert!((p[2].abs() - 0.5).abs() < 1e-12 || (p[0].abs() - 0.5).abs() < 1e-12 || (p[1].abs() - 0.5).abs() < 1e-12);
    }
}

#[test]
fn bcc_cell_volume_and_type() {
    let bcc = lattice("BCC");
    let sb = obtuse_superbase(&bcc).unwrap();
    let cell = voronoi_cell(&sb).unwrap();
    let det = 1.0 * (2.0 * 2f64.sqrt() / 3.0) * (2.0f64 / 3.0).sqrt();
    assert!((cell.polyhedron().unwrap().volume() - det).abs() < 1e-12);
    assert!(sb.conorms().iter().all(|&(_, _, p)| p > 1e-9));
    assert_eq!(cell.cell_type, CellType::TruncatedOctahedron);
}

#[test]
fn gram_matrices_by_inner_products() {
    let hex = LatticeBasis::from_f64_columns(&[vec![1.0, 0.0], vec![0.5, 0.75f64.sqrt()]]).unwrap();
    let g = hex.gram();
    let want = [[1.0, 0.5], [0.5, 1.0]];
    for i in 0..2 {
        for j in 0..2 {
            assert!((g.get(i, j) - want[i][j]).abs() < 1e-15);
        }
    }
    let bcc = lattice("BCC");
    let v = bcc.vectors();
    for i in 0..3 {
        for j in 0..3 {
            let want = if i == j { 1.0 } else { -1.0 / 3.0 };
            assert!((bcc.gram().get(i, j) - dot(&v[i], &v[j])).abs() < 1e-15);
            assert!((dot(&v[i], &v[j]) - want).abs() < 1e-12);
        }
    }
}

/// Lagrange-Gauss reduction of a planar basis.
fn lagrange(mut a: [f64; 2], mut b: [f64; 2]) -> ([f64; 2], [f64; 2]) {
    loop {
        if dot(&a, &a) > dot(&b, &b) {
            std::mem::swap(&mut a, &mut b);
        }
        let mu = (dot(&a, &b) / dot(&a, &a)).round();
        if mu == 0.0 {
            return (a, b);
        }
        b = [b[0] - mu * a[0], b[1] - mu * a[1]];
    }
}

#[test]
fn planar_reduction_against_lagrange() {
    let b = LatticeBasis::from_f64_columns(&[vec![1.0, 0.0], vec![3.0, 1.0]]).unwrap();
    assert!(!is_minkowski_reduced(&b).unwrap().reduced);
    let red = minkowski_reduce(&b).unwrap().basis.vectors();
    let (p, q) = lagrange([1.0, 0.0], [3.0, 1.0]);
    for (got, want) in red.iter().zip([p, q]) {
        let same = (got[0] - want[0]).abs() < 1e-12 && (got[1] - want[1]).abs() < 1e-12;
        let flipped = (got[0] + want[0]).abs() < 1e-12 && (got[1] + want[1]).abs() < 1e-12;
        assert!(same || flipped, "{got:?} vs {want:?}");
    }
}

fn sorted_vonorms(b: &LatticeBasis) -> Vec<f64> {
    let mut v: Vec<f64> = obtuse_superbase(b).unwrap().vonorms().into_iter().map(|(_, _, n)| n).collect();
    v.sort_by(f64::total_cmp);
    v
}

#[test]
fn scrambled_fcc_reduces_to_fcc() {
    let fcc = lattice("FCC");
    let want = sorted_vonorms(&fcc);
    let v = fcc.vectors();
    let mut rng = ChaCha8Rng::seed_from_u64(158);
    for _ in 0..50 {
        // product of elementary column operations
        let mut cols = v.clone();
        for _ in 0..6 {
            let (i, j) = (rng.random_range(0..3), rng.random_range(0..3));
            if i == j {
                continue;
            }
            let k = rng.random_range(-2..=2) as f64;
            let cj = cols[j].clone();
            for (x, y) in cols[i].iter_mut().zip(&cj) {
                *x += k * y;
            }
        }
        let scrambled = LatticeBasis::from_f64_columns(&cols).unwrap();
        let reduced = minkowski_reduce(&scrambled).unwrap().basis;
        let got = sorted_vonorms(&reduced);
        assert!(got.iter().zip(&want).all(|(a, b)| (a - b).abs() < 1e-9), "{got:?} vs {want:?}");
    }
}

#[test]
fn hexagonal_density() {
    let hex = lattice("hex");
    let d = packing_density(&hex).unwrap();
    assert!((d - PI / (4.0 * 0.75f64.sqrt())).abs() < 1e-12);
    assert!((d - 0.9069).abs() < 1e-4);
}

#[test]
fn skew311_babai_point() {
    let ex3 = LatticeBasis::from_f64_columns(&[vec![1.0, 0.0], vec![0.311, 1.01]]).unwrap();
    let r = babai_point(&ex3, &[1.0, 1.0]).unwrap();
    assert_eq!(r.u, vec![1, 1]);
    // [1 - 0.311] = 1
    assert_eq!((1.0f64 - 0.311 + 0.5).floor(), 1.0);
}

#[test]
fn closest_point_against_window() {
    let hex = LatticeBasis::from_f64_columns(&[vec![1.0, 0.0], vec![0.5, 0.75f64.sqrt()]]).unwrap();
    let v = hex.vectors();
    let mut rng = ChaCha8Rng::seed_from_u64(243);
    let mut xs = vec![vec![0.5, 3f64.sqrt() / 6.0 + 0.01]];
    xs.extend((0..200).map(|_| vec![rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)]));
    for x in xs {
        let mut best = f64::INFINITY;
        for u1 in -6i64..=6 {
            for u2 in -6i64..=6 {
                let p = [u1 as f64 * v[0][0] + u2 as f64 * v[1][0], u1 as f64 * v[0][1] + u2 as f64 * v[1][1]];
                best = best.min((p[0] - x[0]).powi(2) + (p[1] - x[1]).powi(2));
            }
        }
        let c = closest_point(&hex, &x).unwrap();
        assert!((c.dist2 - best).abs() < 1e-12, "{x:?}");
        assert!(c.dist2 <= babai_point(&hex, &x).unwrap().dist2 + 1e-12);
    }
    let (_, norm2) = shortest_vector(&hex).unwrap();
    assert!((norm2.sqrt() - 1.0).abs() < 1e-12);
}

#[test]
fn closed_form_quarter_point() {
    let f = perr_2d_closed_form(-0.25, 1.0).unwrap().report.p_e;
    assert!((f - 3.0 / 64.0).abs() < 1e-15);
    let b = LatticeBasis::from_f64_columns(&[vec![1.0, 0.0], vec![-0.25, 1.0]]).unwrap();
    let mc = perr_mc_uniform(&b, 1_000_000, 391, 8).unwrap();
    assert!((mc.p_e - f).abs() <= 3.0 * mc.uncertainty, "{} +- {}", mc.p_e, mc.uncertainty);
}

#[test]
fn density_optimum_against_scan() {
    let d = 0.85;
    let opt = min_perr_given_density_2d(d).unwrap();
    let b = PI / (4.0 * d);
    // feasible a in [-1/2, 0] with a^2 + b^2 >= 1
    let mut best = (f64::INFINITY, 0.0);
    for i in 0..=20_000 {
        let a = -0.5 + 0.5 * i as f64 / 20_000.0;
        if a * a + b * b < 1.0 - 1e-12 {
            continue;
        }
        let f = perr_2d_closed_form(a, b).unwrap().report.p_e;
        if f < best.0 {
            best = (f, a);
        }
    }
    assert!((opt.p_e - best.0).abs() < 1e-6, "{} vs {}", opt.p_e, best.0);
    assert!((opt.a + (1.0 - (PI / 3.4).powi(2)).sqrt()).abs() < 1e-9, "a* = {}", opt.a);
}

#[test]
fn gaussian_grid_is_monotone() {
    let hex = lattice("hex");
    let mut prev: Option<(f64, f64)> = None;
    for i in 1..=10 {
        let sigma = 0.05 * i as f64;
        let g = perr_mc_gaussian(&hex, sigma, 100_000, 418, 8).unwrap();
        if let Some((p, se)) = prev {
            assert!(g.report.p_e >= p - 3.0 * (se * se + g.report.uncertainty.powi(2)).sqrt(), "sigma {sigma}");
        }
        if i == 1 {
            assert!(g.report.p_e < 1e-3);
        }
        prev = Some((g.report.p_e, g.report.uncertainty));
    }
}

#[test]
fn a1_condition_fails() {
    // A_1 is sqrt(2) Z: sum a^2 / 12 = 1/6 against r_cov^2 = 1/2
    assert_eq!(an_covering_radius_sq(1), Rational::new(1, 2));
    assert!(2.0 / 12.0 < 0.5);
    assert!(!an_condition_check(1).holds);
}

#[test]
fn exact_rate_matches_monte_carlo() {
    let mut rng = ChaCha8Rng::seed_from_u64(343);
    let source = SourceSpec::Uniform { a: 5.0 };
    for i in 0..20 {
        let q = rng.random_range(2..=9i64);
        let p = rng.random_range(-q / 2..=0);
        let b = rng.random_range(0.9..1.5);
        let lat = babai_core::lattice::parse_lattice_json(&format!(
            "{{\"n\": 2, \"basis\": [[1, 0], [\"{p}/{q}\", {b}]]}}"
        ))
        .unwrap();
        let exact = rate_exact_uniform(&lat, 5.0).unwrap();
        let proto = Protocol::new(&lat, &source, SetPolicy::Reachable(SetOptions { seed: i, ..SetOptions::default() })).unwrap();
        let mc = rate_monte_carlo(&lat, &proto, &source, 400_000, i).unwrap();
        let tol = 3.0 * mc.sum_rate_se + 1e-3;
        assert!((exact.sum_rate - mc.sum_rate).abs() <= tol, "{p}/{q}, b={b}: {} vs {} +- {}", exact.sum_rate, mc.sum_rate, mc.sum_rate_se);
        assert!((exact.extra_rate - mc.extra_rate).abs() <= 3.0 * mc.extra_rate_se + 1e-3);
    }
}

#[test]
fn equiangular_acute_basis_is_reduced() {
    // Gram: unit diagonal, 0.4 off the diagonal
    let c = (0.4 - 0.16) / 0.84f64.sqrt();
    let b = LatticeBasis::from_f64_columns(&[
        vec![1.0, 0.0, 0.0],
        vec![0.4, 0.84f64.sqrt(), 0.0],
        vec![0.4, c, (0.84 - c * c).sqrt()],
    ])
    .unwrap();
    let v = b.vectors();
    // oracle: no |v3 + e1 v1 + e2 v2| or pairwise combination is shorter
    for e1 in [-1.0, 0.0, 1.0] {
        for e2 in [-1.0, 0.0, 1.0] {
            let w: Vec<f64> = (0..3).map(|k| v[2][k] + e1 * v[0][k] + e2 * v[1][k]).collect();
            assert!(dot(&w, &w) >= 1.0 - 1e-12);
        }
    }
    assert!(is_minkowski_reduced(&b).unwrap().reduced);
}

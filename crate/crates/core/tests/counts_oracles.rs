//! Volumes and mixed volumes against independent computations.

mod common;

use common::names;
use num_rational::Ratio;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use helios::counts::{mixed_volume, mixed_volume_of, volume, Polytope};
use helios::poly::{Polynomial, PolySystem};
use helios::solver::{solve, SolveOptions};

/// Twice the area of the hull, by monotone chain and the shoelace formula.
fn twice_area(points: &[(i64, i64)]) -> i64 {
    let mut p = points.to_vec();
    p.sort();
    p.dedup();
    if p.len() < 3 {
        return 0;
    }
    let cross = |o: (i64, i64), a: (i64, i64), b: (i64, i64)| (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0);
    let mut hull: Vec<(i64, i64)> = Vec::new();
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &(i64, i64)>> = if pass == 0 { Box::new(p.iter()) } else { Box::new(p.iter().rev()) };
        for &q in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], q) <= 0 {
                hull.pop();
            }
            hull.push(q);
        }
        hull.pop();
    }
    let m = hull.len();
    (0..m).map(|i| hull[i].0 * hull[(i + 1) % m].1 - hull[(i + 1) % m].0 * hull[i].1).sum::<i64>().abs()
}

fn polytope(points: &[(i64, i64)]) -> Polytope {
    Polytope::new(points.iter().map(|&(a, b)| vec![a, b]).collect()).unwrap()
}

fn minkowski(a: &[(i64, i64)], b: &[(i64, i64)]) -> Vec<(i64, i64)> {
    a.iter().flat_map(|p| b.iter().map(move |q| (p.0 + q.0, p.1 + q.1))).collect()
}

fn planar_set() -> impl Strategy<Value = Vec<(i64, i64)>> {
    prop::collection::vec((0i64..=5, 0i64..=5), 1..=7)
}

proptest! {
    #[test]
    fn planar_volume_matches_shoelace(points in planar_set()) {
        prop_assert_eq!(volume(&polytope(&points)).unwrap(), Ratio::new(twice_area(&points) as i128, 2));
    }

    #[test]
    fn planar_mixed_volume_matches_area_formula(p in planar_set(), q in planar_set()) {
        let expected = twice_area(&minkowski(&p, &q)) - twice_area(&p) - twice_area(&q);
        prop_assert_eq!(expected % 2, 0);
        let mv = mixed_volume_of(&[polytope(&p), polytope(&q)]).unwrap();
        prop_assert_eq!(mv as i64, expected / 2);
    }
}

/// Supporting half-spaces `(normal, offset)` with `normal·x ≤ offset`, found
/// by trying every plane through three points.
fn half_spaces(points: &[[f64; 3]]) -> Vec<([f64; 3], f64)> {
    let sub = |a: [f64; 3], b: [f64; 3]| [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
    let dot = |a: [f64; 3], b: [f64; 3]| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    let mut out = Vec::new();
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            for k in j + 1..points.len() {
                let (u, v) = (sub(points[j], points[i]), sub(points[k], points[i]));
                let n = [u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]];
                if dot(n, n) == 0.0 {
                    continue;
                }
                let off = dot(n, points[i]);
                let side: Vec<f64> = points.iter().map(|p| dot(n, *p) - off).collect();
                if side.iter().all(|&s| s <= 0.0) {
                    out.push((n, off));
                } else if side.iter().all(|&s| s >= 0.0) {
                    out.push(([-n[0], -n[1], -n[2]], -off));
                }
            }
        }
    }
    out
}

#[test]
fn spatial_volume_matches_monte_carlo() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..12 {
        let points: Vec<Vec<i64>> = (0..rng.random_range(4..9)).map(|_| (0..3).map(|_| rng.random_range(0..=4)).collect()).collect();
        let exact = volume(&Polytope::new(points.clone()).unwrap()).unwrap();
        let exact = *exact.numer() as f64 / *exact.denom() as f64;
        let fp: Vec<[f64; 3]> = points.iter().map(|p| [p[0] as f64, p[1] as f64, p[2] as f64]).collect();
        let planes = half_spaces(&fp);
        let samples = 40_000;
        let inside = (0..samples)
            .filter(|_| {
                let x = [rng.random_range(0.0..4.0), rng.random_range(0.0..4.0), rng.random_range(0.0..4.0)];
                planes.iter().all(|(n, off)| n[0] * x[0] + n[1] * x[1] + n[2] * x[2] <= *off)
            })
            .count();
        let estimate = 64.0 * inside as f64 / samples as f64;
        let fraction = exact / 64.0;
        let sigma = 64.0 * (fraction * (1.0 - fraction) / samples as f64).sqrt();
        assert!((estimate - exact).abs() <= 5.0 * sigma + 1e-9, "exact {exact}, estimate {estimate}");
    }
}

/// Bernstein's bound is attained for generic coefficients, and with the
/// origin in every support no solution leaves the torus.
#[test]
fn mixed_volume_counts_generic_solutions() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut checked = 0;
    while checked < 10 {
        let polys: Vec<Polynomial> = (0..2)
            .map(|_| {
                let mut terms = vec![(random_unit(&mut rng), vec![0, 0])];
                for _ in 0..rng.random_range(2..5) {
                    terms.push((random_unit(&mut rng), vec![rng.random_range(0..=3), rng.random_range(0..=3)]));
                }
                Polynomial::new(names(2), terms).unwrap()
            })
            .collect();
        let s = PolySystem::new(names(2), polys).unwrap();
        let mv = mixed_volume(&s).unwrap();
        if mv == 0 {
            continue;
        }
        let report = solve(&s, &SolveOptions { seed: Some(checked), ..Default::default() }).unwrap();
        let found: usize = report.solutions.iter().map(|s| s.m).sum();
        assert_eq!(found as u64, mv, "system {s:?}");
        checked += 1;
    }
}

fn random_unit(rng: &mut ChaCha8Rng) -> num_complex::Complex64 {
    num_complex::Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU))
}

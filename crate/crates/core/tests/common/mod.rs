#![allow(dead_code)]

use num_complex::Complex64;
use proptest::prelude::*;

use helios::poly::{variables, Polynomial, PolySystem, Variables};

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn names(n: usize) -> Variables {
    variables(&(1..=n).map(|i| format!("x{i}")).collect::<Vec<_>>()).unwrap()
}

pub fn unit() -> impl Strategy<Value = Complex64> {
    (0.0..std::f64::consts::TAU).prop_map(|a| Complex64::from_polar(1.0, a))
}

/// A point with coordinates in the unit disc.
pub fn disc_point(n: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((0.0..1.0f64, 0.0..std::f64::consts::TAU).prop_map(|(r, a)| Complex64::from_polar(r, a)), n)
}

pub fn term(n: usize, max_exponent: u32) -> impl Strategy<Value = (Complex64, Vec<u32>)> {
    (unit(), prop::collection::vec(0..=max_exponent, n))
}

/// A nonzero polynomial with unit-circle coefficients.
pub fn polynomial(n: usize, max_terms: usize, max_exponent: u32) -> impl Strategy<Value = Polynomial> {
    prop::collection::vec(term(n, max_exponent), 1..=max_terms)
        .prop_map(move |terms| Polynomial::new(names(n), terms).unwrap())
        .prop_filter("nonzero", |p| !p.is_zero())
}

/// Square system using every monomial of degree at most `degree`, with
/// random unit coefficients.
pub fn dense_system(n: usize, degree: u32) -> impl Strategy<Value = PolySystem> {
    let monomials: Vec<Vec<u32>> = all_exponents(n, degree);
    let count = monomials.len();
    prop::collection::vec(prop::collection::vec(unit(), count), n).prop_map(move |coeffs| {
        let polys = coeffs
            .into_iter()
            .map(|cs| Polynomial::new(names(n), cs.into_iter().zip(monomials.iter().cloned())).unwrap())
            .collect();
        PolySystem::new(names(n), polys).unwrap()
    })
}

/// All exponent vectors in `n` variables of total degree at most `d`.
pub fn all_exponents(n: usize, d: u32) -> Vec<Vec<u32>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in 0..=d {
        for mut rest in all_exponents(n - 1, d - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

pub fn max_gap(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn same_sets(a: &[Vec<Complex64>], b: &[Vec<Complex64>], tol: f64) -> bool {
    a.len() == b.len()
        && a.iter().all(|p| b.iter().any(|q| max_gap(p, q) <= tol))
        && b.iter().all(|q| a.iter().any(|p| max_gap(p, q) <= tol))
}

//! Monomial maps solving binomial systems.
//!
//! A map fixes some variables at zero and writes each remaining one as
//! `c·λ^k` for a Laurent monomial in free parameters `λ₁..λ_k`.

pub mod lattice;

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

use crate::parse::format_real;
use crate::poly::{PolySystem, Variables};
use lattice::{diagonalize, kernel, row_hnf, strictly_feasible, Mat};

/// Subset enumeration is exhaustive, so the variable count is capped.
pub const MAX_VARIABLES: usize = 16;
const CONSISTENCY: f64 = 1e-8;
const VERIFY_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MapError {
    #[error("equation {equation} has {terms} terms, expected 2")]
    NotBinomial { equation: usize, terms: usize },
    #[error("{0} variables exceeds the limit of {MAX_VARIABLES}")]
    TooManyVariables(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Entry {
    Zero,
    Monomial { coefficient: Complex64, exponents: Vec<i64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonomialMap {
    pub variables: Variables,
    pub parameters: usize,
    pub entries: Vec<Entry>,
}

impl MonomialMap {
    pub fn zero_set(&self) -> BTreeSet<usize> {
        self.entries.iter().enumerate().filter(|(_, e)| matches!(e, Entry::Zero)).map(|(i, _)| i).collect()
    }

    /// Dimension of the represented component.
    pub fn dimension(&self) -> usize {
        self.parameters
    }

    /// The point at parameter values `lambda`.
    pub fn evaluate(&self, lambda: &[Complex64]) -> Vec<Complex64> {
        self.entries
            .iter()
            .map(|e| match e {
                Entry::Zero => Complex64::new(0.0, 0.0),
                Entry::Monomial { coefficient, exponents } => {
                    exponents.iter().zip(lambda).fold(*coefficient, |acc, (&k, l)| acc * l.powi(k as i32))
                }
            })
            .collect()
    }
}

fn snap(v: f64) -> f64 {
    let r = v.round();
    if (v - r).abs() <= 1e-12 * v.abs().max(1.0) {
        r + 0.0
    } else {
        v
    }
}

fn format_coefficient(c: Complex64) -> String {
    let (re, im) = (snap(c.re), snap(c.im));
    if im == 0.0 {
        format_real(re)
    } else {
        format!("({} {} {}*i)", format_real(re), if im < 0.0 { '-' } else { '+' }, format_real(im.abs()))
    }
}

impl fmt::Display for MonomialMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (name, entry) in self.variables.iter().zip(&self.entries) {
            let value = match entry {
                Entry::Zero => "0".to_string(),
                Entry::Monomial { coefficient, exponents } => {
                    let mono: Vec<String> = exponents
                        .iter()
                        .enumerate()
                        .filter(|(_, &k)| k != 0)
                        .map(|(m, &k)| match k {
                            1 => format!("L{}", m + 1),
                            k if k < 0 => format!("L{}**({k})", m + 1),
                            k => format!("L{}**{k}", m + 1),
                        })
                        .collect();
                    let mono = mono.join("*");
                    let c = format_coefficient(*coefficient);
                    match (mono.is_empty(), c.as_str()) {
                        (true, _) => c,
                        (false, "1") => mono,
                        (false, "-1") => format!("-{mono}"),
                        (false, _) => format!("{c}*{mono}"),
                    }
                }
            };
            parts.push(format!("{name} = {value}"));
        }
        write!(f, "({})", parts.join(", "))
    }
}

/// Every equation has exactly two terms.
pub fn is_binomial(s: &PolySystem) -> bool {
    s.polys().iter().all(|p| p.terms().len() == 2)
}

fn check_binomial(s: &PolySystem) -> Result<(), MapError> {
    if let Some((equation, p)) = s.polys().iter().enumerate().find(|(_, p)| p.terms().len() != 2) {
        return Err(MapError::NotBinomial { equation, terms: p.terms().len() });
    }
    if s.nvars() > MAX_VARIABLES {
        return Err(MapError::TooManyVariables(s.nvars()));
    }
    Ok(())
}

/// Substitutes the map and checks that every equation cancels.
pub fn verify_map(s: &PolySystem, map: &MonomialMap) -> bool {
    if map.entries.len() != s.nvars() {
        return false;
    }
    for p in s.polys() {
        let mut combined: BTreeMap<Vec<i64>, Complex64> = BTreeMap::new();
        let mut scale = 0.0;
        'terms: for t in p.terms() {
            let mut c = t.coefficient;
            let mut k = vec![0i64; map.parameters];
            for (e, entry) in t.exponents.iter().zip(&map.entries) {
                if *e == 0 {
                    continue;
                }
                match entry {
                    Entry::Zero => continue 'terms,
                    Entry::Monomial { coefficient, exponents } => {
                        c *= coefficient.powi(*e as i32);
                        if exponents.len() != map.parameters {
                            return false;
                        }
                        k.iter_mut().zip(exponents).for_each(|(a, b)| *a += b * i64::from(*e));
                    }
                }
            }
            scale += c.norm();
            *combined.entry(k).or_default() += c;
        }
        if combined.values().any(|c| c.norm() > VERIFY_TOLERANCE * scale.max(1.0)) {
            return false;
        }
    }
    true
}

/// Maps with zero set `zero` (a bitmask); empty when the subset is invalid.
fn maps_for_subset(s: &PolySystem, zero: u32) -> Vec<MonomialMap> {
    let n = s.nvars();
    let in_zero = |i: usize| zero >> i & 1 == 1;
    let free: Vec<usize> = (0..n).filter(|&i| !in_zero(i)).collect();
    let mut m: Mat = Vec::new();
    let mut gamma = Vec::new();
    for p in s.polys() {
        let [a, b] = p.terms() else { unreachable!() };
        let hits = |e: &[u32]| e.iter().enumerate().any(|(i, &k)| k > 0 && in_zero(i));
        match (hits(&a.exponents), hits(&b.exponents)) {
            (true, true) => continue,
            (false, false) => {}
            _ => return Vec::new(),
        }
        m.push(free.iter().map(|&j| i128::from(a.exponents[j]) - i128::from(b.exponents[j])).collect());
        gamma.push(-b.coefficient / a.coefficient);
    }

    let f = free.len();
    let d = diagonalize(&m, f);
    let rank = d.rank();
    let twisted: Vec<Complex64> = d
        .v
        .iter()
        .map(|row| row.iter().zip(&gamma).fold(Complex64::new(1.0, 0.0), |acc, (&k, g)| acc * g.powi(k as i32)))
        .collect();
    if twisted[rank..].iter().any(|g| (g - 1.0).norm() > CONSISTENCY * g.norm().max(1.0)) {
        return Vec::new();
    }

    let k = f - rank;
    let basis: Mat = (rank..f).map(|c| d.u.iter().map(|row| row[c]).collect()).collect();
    let basis = if k == 0 { basis } else { row_hnf(basis) };

    // every combination of d_l-th roots is a separate coset
    let mut branches: Vec<Vec<Complex64>> = vec![Vec::new()];
    for (l, &dl) in d.diagonal.iter().enumerate() {
        let principal = twisted[l].powf(1.0 / dl as f64);
        branches = branches
            .into_iter()
            .flat_map(|prefix| {
                (0..dl).map(move |r| {
                    let mut y = prefix.clone();
                    y.push(principal * Complex64::from_polar(1.0, TAU * r as f64 / dl as f64));
                    y
                })
            })
            .collect();
    }

    branches
        .into_iter()
        .map(|y| {
            let mut entries = vec![Entry::Zero; n];
            for (jj, &j) in free.iter().enumerate() {
                let coefficient =
                    y.iter().enumerate().fold(Complex64::new(1.0, 0.0), |acc, (l, yl)| acc * yl.powi(d.u[jj][l] as i32));
                let exponents = basis.iter().map(|row| row[jj] as i64).collect();
                entries[j] = Entry::Monomial { coefficient, exponents };
            }
            MonomialMap { variables: s.variables().clone(), parameters: k, entries }
        })
        .collect()
}

fn generic_parameters(k: usize) -> Vec<Complex64> {
    (0..k).map(|m| Complex64::from_polar(1.0 + 0.137 * m as f64, 0.713 + 1.31 * m as f64)).collect()
}

/// Whether the component of `small` lies in the closure of the component of `big`.
pub fn contained_in(small: &MonomialMap, big: &MonomialMap) -> bool {
    let (zs, zb) = (small.zero_set(), big.zero_set());
    if !zb.is_subset(&zs) {
        return false;
    }
    let n = big.entries.len();
    let exps = |j: usize| match &big.entries[j] {
        Entry::Monomial { exponents, .. } => exponents.iter().map(|&e| i128::from(e)).collect::<Vec<_>>(),
        Entry::Zero => unreachable!(),
    };
    let support: Vec<usize> = (0..n).filter(|j| !zs.contains(j)).collect();
    let vanishing: Vec<usize> = (0..n).filter(|j| zs.contains(j) && !zb.contains(j)).collect();
    let k = big.parameters;

    // some direction w fixes the support and sends the vanishing coordinates to 0
    let ks: Mat = support.iter().map(|&j| exps(j)).collect();
    if !vanishing.is_empty() {
        let null = kernel(&ks, k);
        let a: Mat = vanishing
            .iter()
            .map(|&j| {
                let row = exps(j);
                null.iter().map(|w| row.iter().zip(w).map(|(x, y)| x * y).sum()).collect()
            })
            .collect();
        if !strictly_feasible(&a, null.len()) {
            return false;
        }
    }

    // the generic point of `small` lies on the orbit of the support
    let point = small.evaluate(&generic_parameters(small.parameters));
    let ratios: Vec<Complex64> = support
        .iter()
        .map(|&j| match &big.entries[j] {
            Entry::Monomial { coefficient, .. } => point[j] / coefficient,
            Entry::Zero => unreachable!(),
        })
        .collect();
    let transposed: Mat = (0..k).map(|m| ks.iter().map(|row| row[m]).collect()).collect();
    kernel(&transposed, support.len()).iter().all(|v| {
        let value = v.iter().zip(&ratios).fold(Complex64::new(1.0, 0.0), |acc, (&e, r)| acc * r.powi(e as i32));
        (value - 1.0).norm() <= CONSISTENCY
    })
}

/// All maximal monomial maps of a binomial system.
pub fn monomial_maps(s: &PolySystem) -> Result<Vec<MonomialMap>, MapError> {
    check_binomial(s)?;
    let n = s.nvars();
    let mut found: Vec<MonomialMap> = (0..1u32 << n).flat_map(|z| maps_for_subset(s, z)).collect();
    found.sort_by_key(|m| {
        let z = m.zero_set();
        (std::cmp::Reverse(m.parameters), z.len(), z.into_iter().collect::<Vec<_>>())
    });
    let maximal: Vec<MonomialMap> = found
        .iter()
        .enumerate()
        .filter(|(i, m)| !found.iter().enumerate().any(|(j, big)| *i != j && m.zero_set() != big.zero_set() && contained_in(m, big)))
        .map(|(_, m)| m.clone())
        .collect();
    Ok(maximal)
}

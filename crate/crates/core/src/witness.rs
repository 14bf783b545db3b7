//! Witness sets and the cascade of homotopies.
//!
//! A `d`-dimensional solution set is cut by `d` random affine slices; the
//! isolated intersection points are its witness points. The embedding adds
//! slack variables `z_j`:
//!
//! ```text
//! f_k(x) + Σ_j a_kj z_j = 0    k = 1..n
//! s_j(x) + z_j          = 0    j = 1..d
//! ```
//!
//! so that `z = 0` recovers the sliced system. The cascade starts at the top
//! dimension and, level by level, moves the points with `z ≠ 0` along
//! `γ(1−t)E_k + t·E_k'`, where `E_k'` replaces the last slice by `z_k = 0`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;
use thiserror::Error;

use crate::homotopy::{GammaHomotopy, HomotopyError};
use crate::parse::{format_polynomial, format_system};
use crate::poly::{max_norm, variables, PolyError, PolySystem, Polynomial, Variables};
use crate::solio::format_solutions;
use crate::solver::{cluster_solutions, solve_with_rng, track_all, SolveError, SolveOptions};
use crate::startsys::{random_slices, random_unit, square_up, StartError};
use crate::tracker::{refine_endpoint, PathStatus, Solution};

/// Slack norms at most this mark witness candidates.
pub const SLACK_ZERO: f64 = 1e-8;
/// Slack norms at least this mark points to be moved down a level.
pub const SLACK_NONZERO: f64 = 1e-6;
/// Witness points must satisfy the system and slices to this residual.
pub const WITNESS_RESIDUAL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WitnessError {
    #[error("dimension {d} out of range for {n} variables")]
    Dimension { d: usize, n: usize },
    #[error("{equations} equations cannot cut out a set of dimension {d} in {n} variables")]
    TooFewEquations { equations: usize, d: usize, n: usize },
    #[error(transparent)]
    Start(#[from] StartError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Homotopy(#[from] HomotopyError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct WitnessSet {
    pub system: PolySystem,
    pub dimension: usize,
    pub slices: Vec<Polynomial>,
    pub points: Vec<Solution>,
}

impl WitnessSet {
    pub fn degree(&self) -> usize {
        self.points.len()
    }
}

/// The system with `d` slices and slack variables.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    pub original: PolySystem,
    pub level: usize,
    /// `n` equations in the original variables; zero rows pad short systems.
    pub squared: Vec<Polynomial>,
    pub slices: Vec<Polynomial>,
    /// `n × level` slack coefficients.
    pub coefficients: Vec<Vec<Complex64>>,
    pub augmented: PolySystem,
}

impl Embedding {
    pub fn nvars(&self) -> usize {
        self.original.nvars()
    }

    /// The embedded system using the first `k` slices.
    pub fn at_level(&self, k: usize) -> Result<PolySystem, WitnessError> {
        let n = self.nvars();
        let xvars = self.original.variables();
        let vars = slack_variables(xvars, k)?;
        let one = Complex64::new(1.0, 0.0);
        let slack = |j: usize| Polynomial::variable(vars.clone(), n + j);
        let mut polys = Vec::with_capacity(n + k);
        for (row, f) in self.squared.iter().enumerate() {
            let f = f.relabel(&vars)?;
            let zs: Vec<Polynomial> = (0..k).map(slack).collect();
            let parts = std::iter::once((one, &f)).chain(zs.iter().enumerate().map(|(j, z)| (self.coefficients[row][j], z)));
            polys.push(Polynomial::linear_combination(vars.clone(), parts)?);
        }
        for (j, s) in self.slices.iter().take(k).enumerate() {
            polys.push(s.relabel(&vars)?.add(&slack(j))?);
        }
        Ok(PolySystem::new(vars, polys)?)
    }
}

/// Original names followed by `k` fresh slack names.
fn slack_variables(xvars: &Variables, k: usize) -> Result<Variables, PolyError> {
    let mut prefix = String::from("zz");
    while xvars.iter().any(|v| v.starts_with(&prefix)) {
        prefix.push('z');
    }
    let names: Vec<String> = xvars.iter().cloned().chain((1..=k).map(|j| format!("{prefix}{j}"))).collect();
    variables(&names)
}

/// Squares `s` up or pads it with zero rows to `n` equations.
fn to_n_equations<R: Rng + ?Sized>(s: &PolySystem, rng: &mut R) -> Result<Vec<Polynomial>, WitnessError> {
    let n = s.nvars();
    let mut polys = if s.len() > n { square_up(s, n, rng)?.into_polys() } else { s.polys().to_vec() };
    polys.resize(n, Polynomial::zero(s.variables().clone()));
    Ok(polys)
}

pub fn embed<R: Rng + ?Sized>(s: &PolySystem, d: usize, rng: &mut R) -> Result<Embedding, WitnessError> {
    let n = s.nvars();
    if d == 0 || d > n {
        return Err(WitnessError::Dimension { d, n });
    }
    let squared = to_n_equations(s, rng)?;
    let slices = random_slices(s.variables(), d, rng)?;
    let coefficients = (0..n).map(|_| (0..d).map(|_| random_unit(rng)).collect()).collect();
    let mut e = Embedding {
        original: s.clone(),
        level: d,
        squared,
        slices,
        coefficients,
        augmented: s.clone(),
    };
    e.augmented = e.at_level(d)?;
    Ok(e)
}

/// Max residual of `x` on the system and the slices.
fn residual_with_slices(s: &PolySystem, slices: &[Polynomial], x: &[Complex64]) -> Result<f64, PolyError> {
    let mut r = s.residual(x)?;
    for p in slices {
        r = r.max(p.evaluate(x)?.norm());
    }
    Ok(r)
}

/// Witness points of the `d`-dimensional part of the solution set.
pub fn witness_set<R: Rng + ?Sized>(
    s: &PolySystem,
    d: usize,
    rng: &mut R,
    options: &SolveOptions,
) -> Result<WitnessSet, WitnessError> {
    let n = s.nvars();
    if d == 0 || d > n {
        return Err(WitnessError::Dimension { d, n });
    }
    let k = n - d;
    if k > s.len() {
        return Err(WitnessError::TooFewEquations { equations: s.len(), d, n });
    }
    let mut polys = if k == 0 {
        Vec::new()
    } else if k == s.len() {
        s.polys().to_vec()
    } else {
        square_up(s, k, rng)?.into_polys()
    };
    let slices = random_slices(s.variables(), d, rng)?;
    polys.extend(slices.iter().cloned());
    let square = PolySystem::new(s.variables().clone(), polys)?;
    let report = solve_with_rng(&square, rng, options)?;
    let mut points = Vec::new();
    for p in report.solutions {
        if residual_with_slices(s, &slices, &p.coordinates)? <= WITNESS_RESIDUAL {
            points.push(p);
        }
    }
    Ok(WitnessSet { system: s.clone(), dimension: d, slices, points })
}

/// Candidates at one dimension of the cascade.
#[derive(Debug, Clone, PartialEq)]
pub struct CascadeLevel {
    pub dimension: usize,
    pub slices: Vec<Polynomial>,
    /// Points with vanishing slack, in the original variables.
    pub candidates: Vec<Solution>,
    /// Points whose slack norm lies between the two thresholds.
    pub ambiguous: Vec<Solution>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CascadeResult {
    pub levels: BTreeMap<usize, CascadeLevel>,
}

impl CascadeResult {
    pub fn candidates(&self, dimension: usize) -> &[Solution] {
        self.levels.get(&dimension).map_or(&[], |l| &l.candidates)
    }
}

/// Splits solutions of the level-`k` embedding by the size of their slack.
fn classify(
    e: &Embedding,
    k: usize,
    sols: Vec<Solution>,
) -> Result<(CascadeLevel, Vec<Vec<Complex64>>), WitnessError> {
    let n = e.nvars();
    let slices = e.slices[..k].to_vec();
    let mut level = CascadeLevel { dimension: k, slices, candidates: Vec::new(), ambiguous: Vec::new() };
    let mut movers = Vec::new();
    for sol in sols {
        let slack = max_norm(&sol.coordinates[n..]);
        if slack >= SLACK_NONZERO {
            movers.push(sol.coordinates);
            continue;
        }
        let x = sol.coordinates[..n].to_vec();
        let projected = Solution {
            variables: e.original.variables().clone(),
            res: residual_with_slices(&e.original, &level.slices, &x)?,
            coordinates: x,
            ..sol
        };
        if slack <= SLACK_ZERO {
            level.candidates.push(projected);
        } else {
            level.ambiguous.push(projected);
        }
    }
    Ok((level, movers))
}

/// Runs the cascade from dimension `top` down to the lowest possible one.
pub fn cascade<R: Rng + ?Sized>(
    s: &PolySystem,
    top: usize,
    rng: &mut R,
    options: &SolveOptions,
) -> Result<CascadeResult, WitnessError> {
    let n = s.nvars();
    let lowest = n.saturating_sub(s.len());
    if top >= n || top < lowest {
        return Err(WitnessError::Dimension { d: top, n });
    }
    let mut levels = BTreeMap::new();
    if top == 0 {
        let squared = PolySystem::new(s.variables().clone(), to_n_equations(s, rng)?)?;
        let report = solve_with_rng(&squared, rng, options)?;
        let candidates = report
            .solutions
            .into_iter()
            .map(|sol| Ok(Solution { res: s.residual(&sol.coordinates)?, ..sol }))
            .collect::<Result<_, PolyError>>()?;
        levels.insert(0, CascadeLevel { dimension: 0, slices: Vec::new(), candidates, ambiguous: Vec::new() });
        return Ok(CascadeResult { levels });
    }

    let e = embed(s, top, rng)?;
    let report = solve_with_rng(&e.augmented, rng, options)?;
    let (level, mut movers) = classify(&e, top, report.solutions)?;
    levels.insert(top, level);

    for k in (lowest..top).rev() {
        let upper = e.at_level(k + 1)?;
        let lower = e.at_level(k)?;
        let mut target_polys = upper.polys().to_vec();
        target_polys[n + k] = Polynomial::variable(upper.variables().clone(), n + k);
        let target = PolySystem::new(upper.variables().clone(), target_polys)?;
        let gamma = random_unit(rng);
        if movers.is_empty() {
            levels.insert(k, CascadeLevel { dimension: k, slices: e.slices[..k].to_vec(), candidates: Vec::new(), ambiguous: Vec::new() });
            continue;
        }
        let h = GammaHomotopy::new(target, upper, gamma)?;
        let outcomes = track_all(&h, &movers, options.settings, options.tasks)?;
        let mut endpoints = Vec::new();
        for out in outcomes {
            if out.status != PathStatus::Converged {
                continue;
            }
            let x = &out.last.1[..n + k];
            endpoints.push(refine_endpoint(&lower, x, &options.settings).map_err(SolveError::from)?);
        }
        let sols = cluster_solutions(&lower, endpoints, options.cluster_radius);
        let (level, next) = if k == 0 {
            let mut level = CascadeLevel { dimension: 0, slices: Vec::new(), candidates: Vec::new(), ambiguous: Vec::new() };
            for sol in sols {
                level.candidates.push(Solution { res: s.residual(&sol.coordinates)?, variables: s.variables().clone(), ..sol });
            }
            (level, Vec::new())
        } else {
            classify(&e, k, sols)?
        };
        levels.insert(k, level);
        movers = next;
    }
    Ok(CascadeResult { levels })
}

/// System, slices (header `d M`), point count, then the solution blocks.
pub fn format_witness_set(w: &WitnessSet) -> String {
    let mut out = format_system(&w.system);
    out.push_str(&format!("{} {}\n", w.slices.len(), w.system.nvars()));
    for s in &w.slices {
        out.push_str(&format_polynomial(s));
        out.push('\n');
    }
    out.push_str(&format!("{}\n", w.points.len()));
    if !w.points.is_empty() {
        out.push('\n');
        out.push_str(&format_solutions(&w.points));
    }
    out
}

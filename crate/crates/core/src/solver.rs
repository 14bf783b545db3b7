//! Blackbox solving with the total-degree homotopy.

use std::cmp::Ordering;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering as AtomicOrdering};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::homotopy::{make_gamma_homotopy, Homotopy, HomotopyError};
use crate::poly::{max_norm, PolyError, PolySystem};
use crate::startsys::{total_degree_start, StartError};
use crate::tracker::{newton_update, track_path, PathOutcome, PathStatus, Solution, TrackError, TrackSettings};

static SEED: AtomicU64 = AtomicU64::new(0);
static SEED_SET: AtomicBool = AtomicBool::new(false);

/// Default radius for merging endpoints into one solution.
pub const CLUSTER_RADIUS: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("system is not square: {equations} equations in {variables} variables; use a witness set for positive dimensional solutions")]
    NonSquare { equations: usize, variables: usize },
    #[error("equation {0} is the zero polynomial")]
    ZeroEquation(usize),
    #[error(transparent)]
    Start(#[from] StartError),
    #[error(transparent)]
    Homotopy(#[from] HomotopyError),
    #[error(transparent)]
    Track(#[from] TrackError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("cannot start worker threads: {0}")]
    Workers(String),
}

/// Fixes the seed used by every later solve without an explicit seed.
pub fn set_seed(seed: u64) {
    SEED.store(seed, AtomicOrdering::SeqCst);
    SEED_SET.store(true, AtomicOrdering::SeqCst);
}

/// The seed most recently set or used.
pub fn get_seed() -> u64 {
    SEED.load(AtomicOrdering::SeqCst)
}

/// Resolves the seed for one run: explicit, global, or fresh from entropy.
pub fn resolve_seed(explicit: Option<u64>) -> u64 {
    if let Some(seed) = explicit {
        return seed;
    }
    if SEED_SET.load(AtomicOrdering::SeqCst) {
        return get_seed();
    }
    let seed = rand::rng().random();
    SEED.store(seed, AtomicOrdering::SeqCst);
    seed
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    pub seed: Option<u64>,
    /// Worker threads for path tracking.
    pub tasks: usize,
    pub silent: bool,
    pub settings: TrackSettings,
    pub cluster_radius: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { seed: None, tasks: 1, silent: true, settings: TrackSettings::default(), cluster_radius: CLUSTER_RADIUS }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub solutions: Vec<Solution>,
    pub paths_tracked: usize,
    pub diverged: usize,
    pub stalled: usize,
    pub seed: u64,
    pub root_count_used: usize,
}

/// Tracks every start point, retrying stalled paths once with finer settings.
pub fn track_all<H: Homotopy>(
    h: &H,
    starts: &[Vec<Complex64>],
    settings: TrackSettings,
    tasks: usize,
) -> Result<Vec<PathOutcome>, SolveError> {
    let retry = TrackSettings {
        min_step: settings.min_step / 10.0,
        max_corrector_iterations: settings.max_corrector_iterations.max(6),
        ..settings
    };
    let run = |start: &Vec<Complex64>| -> Result<PathOutcome, TrackError> {
        let first = track_path(h, start, settings)?;
        if first.status == PathStatus::Stalled {
            return track_path(h, start, retry);
        }
        Ok(first)
    };
    let outcomes: Result<Vec<_>, TrackError> = if tasks <= 1 {
        starts.iter().map(run).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(tasks)
            .build()
            .map_err(|e| SolveError::Workers(e.to_string()))?;
        pool.install(|| starts.par_iter().map(run).collect())
    };
    Ok(outcomes?)
}

/// Merges endpoints within `radius` of each other (transitively); returns
/// each cluster's componentwise mean with its size, ordered by first member.
pub fn cluster_multiplicities(endpoints: &[Vec<Complex64>], radius: f64) -> Vec<(Vec<Complex64>, usize)> {
    cluster_indices(endpoints, radius)
        .into_iter()
        .map(|members| {
            let n = endpoints[members[0]].len();
            let mut mean = vec![Complex64::default(); n];
            for &i in &members {
                mean.iter_mut().zip(&endpoints[i]).for_each(|(m, v)| *m += v);
            }
            let k = members.len() as f64;
            mean.iter_mut().for_each(|m| *m /= k);
            (mean, members.len())
        })
        .collect()
}

fn distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max)
}

fn cluster_indices(points: &[Vec<Complex64>], radius: f64) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..points.len()).collect();
    fn root(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            if distance(&points[i], &points[j]) <= radius {
                let (a, b) = (root(&mut parent, i), root(&mut parent, j));
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; points.len()];
    for i in 0..points.len() {
        let r = root(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[r]].push(i);
    }
    groups
}

/// Lexicographic order on coordinates rounded to `1e-6`, ties broken exactly.
pub fn canonical_order(a: &[Complex64], b: &[Complex64]) -> Ordering {
    let key = |v: &[Complex64]| -> Vec<i64> {
        v.iter().flat_map(|z| [(z.re * 1e6).round() as i64, (z.im * 1e6).round() as i64]).collect()
    };
    key(a).cmp(&key(b)).then_with(|| {
        a.iter()
            .zip(b)
            .map(|(p, q)| p.re.total_cmp(&q.re).then(p.im.total_cmp(&q.im)))
            .find(|o| o.is_ne())
            .unwrap_or(Ordering::Equal)
    })
}

/// Clusters refined endpoints of `f`; merged clusters carry `rco = 0`.
pub fn cluster_solutions(f: &PolySystem, mut endpoints: Vec<Solution>, radius: f64) -> Vec<Solution> {
    endpoints.sort_by(|a, b| canonical_order(&a.coordinates, &b.coordinates));
    let points: Vec<Vec<Complex64>> = endpoints.iter().map(|s| s.coordinates.clone()).collect();
    cluster_indices(&points, radius)
        .into_iter()
        .map(|members| {
            if members.len() == 1 {
                return endpoints[members[0]].clone();
            }
            let (mean, m) = cluster_multiplicities(
                &members.iter().map(|&i| points[i].clone()).collect::<Vec<_>>(),
                f64::INFINITY,
            )
            .remove(0);
            let err = newton_update(f, &mean).map(|u| max_norm(u.as_slice())).unwrap_or(1.0);
            let res = f.residual(&mean).unwrap_or(f64::INFINITY);
            Solution {
                t: Complex64::new(1.0, 0.0),
                m,
                variables: f.variables().clone(),
                coordinates: mean,
                err,
                rco: 0.0,
                res,
            }
        })
        .collect()
}

/// Solves a square system with randomness drawn from `rng`; the report's
/// seed field is left at zero.
pub fn solve_with_rng<R: Rng + ?Sized>(
    s: &PolySystem,
    rng: &mut R,
    options: &SolveOptions,
) -> Result<SolveReport, SolveError> {
    if !s.is_square() {
        return Err(SolveError::NonSquare { equations: s.len(), variables: s.nvars() });
    }
    if let Some(i) = s.polys().iter().position(|p| p.is_zero()) {
        return Err(SolveError::ZeroEquation(i));
    }
    options.settings.validate()?;
    let pair = total_degree_start(s, rng)?;
    let h = make_gamma_homotopy(s.clone(), pair.g, rng)?;
    let outcomes = track_all(&h, &pair.solutions, options.settings, options.tasks)?;
    let mut endpoints = Vec::new();
    let (mut diverged, mut stalled) = (0, 0);
    for out in outcomes {
        match out.status {
            PathStatus::Converged => endpoints.extend(out.endpoint),
            PathStatus::Diverged => diverged += 1,
            PathStatus::Stalled => stalled += 1,
        }
    }
    if !options.silent {
        eprintln!(
            "tracked {} paths: {} converged, {} diverged, {} stalled",
            pair.solutions.len(),
            endpoints.len(),
            diverged,
            stalled
        );
    }
    Ok(SolveReport {
        solutions: cluster_solutions(s, endpoints, options.cluster_radius),
        paths_tracked: pair.solutions.len(),
        diverged,
        stalled,
        seed: 0,
        root_count_used: pair.solutions.len(),
    })
}

/// Blackbox solve: total-degree start, gamma homotopy, all paths, clustering.
pub fn solve(s: &PolySystem, options: &SolveOptions) -> Result<SolveReport, SolveError> {
    let seed = resolve_seed(options.seed);
    let mut rng = seeded_rng(seed);
    let mut report = solve_with_rng(s, &mut rng, options)?;
    report.seed = seed;
    Ok(report)
}

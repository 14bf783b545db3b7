//! Single entry point for scripting bindings.
//!
//! Every binding call is a [`Request`] passed to [`Gateway::dispatch`];
//! polynomials and solutions cross the boundary as strings.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::counts::mixed_volume;
use crate::homotopy::{seeded_gamma_homotopy, GammaHomotopy, Homotopy};
use crate::parse::parse_system;
use crate::poly::PolySystem;
use crate::solio::{coordinates_over, format_solution, parse_solution, RecordValue};
use crate::solver::{get_seed, resolve_seed, set_seed, solve, SolveOptions};
use crate::tracker::{PathPoint, PathTracker, TrackSettings};

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{0}")]
pub struct GatewayError(pub String);

fn fail(e: impl ToString) -> GatewayError {
    GatewayError(e.to_string())
}

#[derive(Debug, Clone, PartialEq)]
pub enum Request {
    SetSeed(u64),
    GetSeed,
    Solve { polynomials: Vec<String>, silent: bool },
    MixedVolume { polynomials: Vec<String> },
    TrackerInit { target: Vec<String>, start: Vec<String>, solution: String },
    TrackerNext { handle: usize },
    TrackerTune { handle: usize, settings: TrackSettings },
    /// Refined endpoint of a finished path.
    TrackerEndpoint { handle: usize },
    TrackerDrop { handle: usize },
}

/// A path point as a flat record: `t`, `step_used`, `corrector_iterations`,
/// `corrector_residual` and one entry per variable.
pub type PointRecord = BTreeMap<String, RecordValue>;

#[derive(Debug, Clone, PartialEq)]
pub enum Response {
    Code(i32),
    Seed(u64),
    Solutions(Vec<String>),
    Count(u64),
    Tracker(usize),
    /// `None` once the path has ended.
    Point(Option<PointRecord>),
    Endpoint(Option<String>),
}

#[derive(Default)]
pub struct Gateway {
    trackers: BTreeMap<usize, PathTracker<GammaHomotopy>>,
    next_handle: usize,
}

fn system(polynomials: &[String]) -> Result<PolySystem, GatewayError> {
    parse_system(polynomials).map_err(fail)
}

fn record(p: &PathPoint, names: &[String]) -> PointRecord {
    let mut r = PointRecord::new();
    r.insert("t".into(), RecordValue::Real(p.t));
    r.insert("step_used".into(), RecordValue::Real(p.step_used));
    r.insert("corrector_iterations".into(), RecordValue::Integer(p.corrector_iterations));
    r.insert("corrector_residual".into(), RecordValue::Real(p.corrector_residual));
    for (name, z) in names.iter().zip(&p.x) {
        r.insert(name.clone(), RecordValue::Complex(*z));
    }
    r
}

impl Gateway {
    pub fn new() -> Self {
        Self::default()
    }

    fn tracker(&mut self, handle: usize) -> Result<&mut PathTracker<GammaHomotopy>, GatewayError> {
        self.trackers.get_mut(&handle).ok_or_else(|| fail(format!("no tracker with handle {handle}")))
    }

    pub fn dispatch(&mut self, request: Request) -> Result<Response, GatewayError> {
        match request {
            Request::SetSeed(seed) => {
                set_seed(seed);
                Ok(Response::Code(0))
            }
            Request::GetSeed => Ok(Response::Seed(get_seed())),
            Request::Solve { polynomials, silent } => {
                let s = system(&polynomials)?;
                let report = solve(&s, &SolveOptions { silent, ..Default::default() }).map_err(fail)?;
                Ok(Response::Solutions(report.solutions.iter().map(format_solution).collect()))
            }
            Request::MixedVolume { polynomials } => {
                Ok(Response::Count(mixed_volume(&system(&polynomials)?).map_err(fail)?))
            }
            Request::TrackerInit { target, start, solution } => {
                let f = system(&target)?;
                let g = system(&start)?;
                let sol = parse_solution(&solution).map_err(fail)?;
                let x = coordinates_over(&sol, f.variables()).map_err(fail)?;
                let h = seeded_gamma_homotopy(f, &g, resolve_seed(None)).map_err(fail)?;
                let tracker = PathTracker::new(h, &x, TrackSettings::default()).map_err(fail)?;
                let handle = self.next_handle;
                self.next_handle += 1;
                self.trackers.insert(handle, tracker);
                Ok(Response::Tracker(handle))
            }
            Request::TrackerNext { handle } => {
                let tracker = self.tracker(handle)?;
                let names: Vec<String> = tracker.homotopy().target().variables().to_vec();
                Ok(Response::Point(tracker.next().map(|p| record(&p, &names))))
            }
            Request::TrackerTune { handle, settings } => {
                self.tracker(handle)?.tune(settings).map_err(fail)?;
                Ok(Response::Code(0))
            }
            Request::TrackerEndpoint { handle } => {
                let tracker = self.tracker(handle)?;
                let outcome = tracker.try_outcome().ok_or_else(|| fail("path is still running"))?;
                Ok(Response::Endpoint(outcome.endpoint.as_ref().map(format_solution)))
            }
            Request::TrackerDrop { handle } => {
                self.trackers.remove(&handle).ok_or_else(|| fail(format!("no tracker with handle {handle}")))?;
                Ok(Response::Code(0))
            }
        }
    }
}

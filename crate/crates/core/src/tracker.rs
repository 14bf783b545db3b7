//! Predictor-corrector path tracking.
//!
//! Each step predicts along the tangent `Jx·Δx = −(∂h/∂t)·Δt` and corrects
//! with Newton's method at the new `t`. Failed corrections halve the step;
//! three consecutive successes double it. All norms are max-norms; the
//! corrector tolerance bounds updates relative to `max(1, ‖x‖)`, and
//! residuals are compared after scaling by `max(1, ‖x‖)^deg`.
//!
//! Paths that stall close to `t = 1` are closed by Newton at `t = 1`
//! (singular endpoints), and stalled paths whose norm grows like a power of
//! `1/(1−t)` are reported as diverging.

use nalgebra::DVector;
use num_complex::Complex64;
use thiserror::Error;

use crate::homotopy::{Homotopy, HomotopyValue};
use crate::linalg::{self, InfNorm};
use crate::poly::{max_norm, PolyError, PolySystem, Variables};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TrackError {
    #[error("invalid settings: {0}")]
    Settings(&'static str),
    #[error("start point is off the path: residual {0:e}")]
    OffPath(f64),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Start points must satisfy `h(x, 0) = 0` to this tolerance, scaled by
/// `max(1, ‖x‖)^deg` like the corrector's residual test.
pub const START_TOLERANCE: f64 = 1e-8;

/// Stalled paths growing at least like `(1−t)^(−GROWTH_EXPONENT)` diverge.
pub const GROWTH_EXPONENT: f64 = 0.1;

/// Largest residual accepted when closing a stalled path at `t = 1`.
pub const CLOSURE_RESIDUAL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackSettings {
    pub max_step: f64,
    pub min_step: f64,
    /// Bound on the max-norm of the last corrector update.
    pub corrector_tolerance: f64,
    pub max_corrector_iterations: usize,
    pub step_expansion: f64,
    pub step_reduction: f64,
    pub divergence_threshold: f64,
    pub endpoint_tolerance: f64,
    /// Stalled paths with `1 − t` below this are finished at `t = 1`.
    pub end_zone: f64,
}

impl Default for TrackSettings {
    fn default() -> Self {
        TrackSettings {
            max_step: 0.1,
            min_step: 1e-8,
            corrector_tolerance: 1e-8,
            max_corrector_iterations: 4,
            step_expansion: 2.0,
            step_reduction: 0.5,
            divergence_threshold: 1e8,
            endpoint_tolerance: 1e-12,
            end_zone: 1e-6,
        }
    }
}

impl TrackSettings {
    pub fn validate(&self) -> Result<(), TrackError> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !(positive(self.min_step) && self.min_step <= self.max_step && self.max_step <= 1.0) {
            return Err(TrackError::Settings("need 0 < min_step <= max_step <= 1"));
        }
        if !(positive(self.corrector_tolerance) && positive(self.endpoint_tolerance)) {
            return Err(TrackError::Settings("tolerances must be positive"));
        }
        if self.max_corrector_iterations == 0 {
            return Err(TrackError::Settings("max_corrector_iterations must be at least 1"));
        }
        if !(self.step_expansion.is_finite() && self.step_expansion >= 1.0) {
            return Err(TrackError::Settings("step_expansion must be at least 1"));
        }
        if !(self.step_reduction > 0.0 && self.step_reduction < 1.0) {
            return Err(TrackError::Settings("step_reduction must lie in (0, 1)"));
        }
        if !positive(self.divergence_threshold) {
            return Err(TrackError::Settings("divergence_threshold must be positive"));
        }
        if !(self.end_zone >= 0.0 && self.end_zone < 1.0) {
            return Err(TrackError::Settings("end_zone must lie in [0, 1)"));
        }
        Ok(())
    }
}

/// One accepted point on a path.
#[derive(Debug, Clone, PartialEq)]
pub struct PathPoint {
    pub t: f64,
    pub x: Vec<Complex64>,
    pub step_used: f64,
    pub corrector_iterations: usize,
    pub corrector_residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PathStatus {
    Converged,
    Diverged,
    Stalled,
}

/// End of a path with the quality triplet.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub t: Complex64,
    pub m: usize,
    pub variables: Variables,
    pub coordinates: Vec<Complex64>,
    pub err: f64,
    pub rco: f64,
    pub res: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathOutcome {
    pub status: PathStatus,
    /// Refined endpoint of a converged path.
    pub endpoint: Option<Solution>,
    /// Last position reached, `(t, x)`.
    pub last: (f64, Vec<Complex64>),
    pub steps: usize,
}

/// Step-wise tracker over one path; iterate it to obtain accepted points.
pub struct PathTracker<H: Homotopy> {
    h: H,
    settings: TrackSettings,
    t: f64,
    x: Vec<Complex64>,
    step: f64,
    successes: usize,
    steps: usize,
    at_x: HomotopyValue,
    history: Vec<(f64, f64)>,
    status: Option<PathStatus>,
    degree: i32,
}

fn newton_step(v: &HomotopyValue) -> Option<DVector<Complex64>> {
    linalg::solve(&v.jx, &(-&v.value))
}

impl<H: Homotopy> PathTracker<H> {
    pub fn new(h: H, start: &[Complex64], settings: TrackSettings) -> Result<Self, TrackError> {
        settings.validate()?;
        let degree = h.target().degrees()?.into_iter().max().unwrap_or(0) as i32;
        let at_x = h.eval(start, 0.0)?;
        let residual = at_x.value.inf_norm();
        if residual.is_nan() || residual > START_TOLERANCE * max_norm(start).max(1.0).powi(degree) {
            return Err(TrackError::OffPath(residual));
        }
        Ok(PathTracker {
            h,
            settings,
            t: 0.0,
            x: start.to_vec(),
            step: settings.max_step,
            successes: 0,
            steps: 0,
            at_x,
            history: vec![(1.0, max_norm(start))],
            status: None,
            degree,
        })
    }

    pub fn settings(&self) -> &TrackSettings {
        &self.settings
    }

    /// Replaces the settings; the current position is kept.
    pub fn tune(&mut self, settings: TrackSettings) -> Result<(), TrackError> {
        settings.validate()?;
        self.settings = settings;
        self.step = self.step.clamp(settings.min_step, settings.max_step);
        Ok(())
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn x(&self) -> &[Complex64] {
        &self.x
    }

    pub fn homotopy(&self) -> &H {
        &self.h
    }

    /// Terminal status once the path has finished.
    pub fn status(&self) -> Option<PathStatus> {
        self.status
    }

    /// Newton at fixed `t` from `x`; on success returns the point, the
    /// evaluation there, the iteration count and the last update norm
    /// relative to `max(1, ‖x‖)`.
    fn correct(&self, mut x: DVector<Complex64>, t: f64) -> Option<(Vec<Complex64>, HomotopyValue, usize, f64)> {
        let s = &self.settings;
        for k in 1..=s.max_corrector_iterations {
            let v = self.h.eval(x.as_slice(), t).ok()?;
            let u = newton_step(&v)?;
            x += &u;
            if !x.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
                return None;
            }
            let scale = x.inf_norm().max(1.0);
            let update = u.inf_norm() / scale;
            if update <= s.corrector_tolerance {
                let v = self.h.eval(x.as_slice(), t).ok()?;
                if v.value.inf_norm() <= 10.0 * s.corrector_tolerance * scale.powi(self.degree) {
                    return Some((x.as_slice().to_vec(), v, k, update));
                }
                return None;
            }
        }
        None
    }

    fn advance(&mut self) -> Option<PathPoint> {
        loop {
            if self.status.is_some() {
                return None;
            }
            if self.t >= 1.0 {
                self.status = Some(PathStatus::Converged);
                return None;
            }
            let remaining = 1.0 - self.t;
            let (dt, t1) = if self.step >= remaining { (remaining, 1.0) } else { (self.step, self.t + self.step) };
            let v = &self.at_x;
            let attempt = linalg::solve(&v.jx, &(-&v.dt * Complex64::new(dt, 0.0)))
                .and_then(|dx| self.correct(DVector::from_column_slice(&self.x) + dx, t1));
            match attempt {
                Some((x, at_x, iterations, update)) => {
                    self.steps += 1;
                    self.t = t1;
                    self.x = x;
                    self.at_x = at_x;
                    let norm = max_norm(&self.x);
                    self.history.push((1.0 - t1, norm));
                    if norm > self.settings.divergence_threshold {
                        self.status = Some(PathStatus::Diverged);
                    }
                    self.successes += 1;
                    if self.successes >= 3 {
                        self.step = (self.step * self.settings.step_expansion).min(self.settings.max_step);
                        self.successes = 0;
                    }
                    return Some(PathPoint {
                        t: t1,
                        x: self.x.clone(),
                        step_used: dt,
                        corrector_iterations: iterations,
                        corrector_residual: update,
                    });
                }
                None => {
                    self.successes = 0;
                    self.step *= self.settings.step_reduction;
                    if self.step < self.settings.min_step {
                        self.status = Some(self.classify_stall());
                        return None;
                    }
                }
            }
        }
    }

    /// Decides what a path that can no longer make progress is doing.
    fn classify_stall(&mut self) -> PathStatus {
        let s = 1.0 - self.t;
        let norm = max_norm(&self.x);
        if norm > self.settings.divergence_threshold || (self.growth_rate() >= GROWTH_EXPONENT && norm >= 1.0) {
            return PathStatus::Diverged;
        }
        if s <= self.settings.end_zone && self.close_at_end() {
            return PathStatus::Converged;
        }
        PathStatus::Stalled
    }

    /// Exponent `α` in `‖x‖ ~ (1−t)^(−α)`, measured over the last two decades of `1−t`.
    fn growth_rate(&self) -> f64 {
        let Some(&(s_now, n_now)) = self.history.last() else { return 0.0 };
        if s_now <= 0.0 {
            return 0.0;
        }
        match self.history.iter().rev().find(|(s, _)| *s >= 100.0 * s_now) {
            Some(&(s_then, n_then)) if n_then > 0.0 => (n_now / n_then).ln() / (s_then / s_now).ln(),
            _ => 0.0,
        }
    }

    /// Newton at `t = 1` while the updates contract; moves to `t = 1` only
    /// if the residual there is small.
    fn close_at_end(&mut self) -> bool {
        let f = self.h.target();
        let mut x = self.x.clone();
        let mut last = f64::INFINITY;
        for _ in 0..100 {
            let Some(u) = newton_update(f, &x) else { break };
            let size = u.inf_norm();
            if size.is_nan() || size >= last {
                break;
            }
            x.iter_mut().zip(u.iter()).for_each(|(a, b)| *a += b);
            last = size;
            if size <= self.settings.endpoint_tolerance {
                break;
            }
        }
        if !matches!(f.residual(&x), Ok(r) if r <= CLOSURE_RESIDUAL) {
            return false;
        }
        self.t = 1.0;
        self.x = x;
        true
    }

    /// Runs the path to its end and refines a converged endpoint.
    pub fn finish(mut self) -> PathOutcome {
        while self.advance().is_some() {}
        self.outcome()
    }

    /// Outcome of a finished path; `None` while it is still running.
    pub fn try_outcome(&self) -> Option<PathOutcome> {
        self.status.map(|_| self.outcome())
    }

    fn outcome(&self) -> PathOutcome {
        let status = self.status.unwrap_or(PathStatus::Stalled);
        let endpoint = (status == PathStatus::Converged)
            .then(|| refine_endpoint(self.h.target(), &self.x, &self.settings))
            .transpose()
            .ok()
            .flatten();
        PathOutcome { status, endpoint, last: (self.t, self.x.clone()), steps: self.steps }
    }
}

impl<H: Homotopy> Iterator for PathTracker<H> {
    type Item = PathPoint;

    fn next(&mut self) -> Option<PathPoint> {
        self.advance()
    }
}

pub fn tracker_init<H: Homotopy>(h: H, start: &[Complex64], settings: TrackSettings) -> Result<PathTracker<H>, TrackError> {
    PathTracker::new(h, start, settings)
}

pub fn track_path<H: Homotopy>(h: H, start: &[Complex64], settings: TrackSettings) -> Result<PathOutcome, TrackError> {
    Ok(PathTracker::new(h, start, settings)?.finish())
}

/// Newton update `−J⁻¹f` at `x`.
pub fn newton_update(f: &PolySystem, x: &[Complex64]) -> Option<DVector<Complex64>> {
    let (v, j) = f.eval_and_jacobian(x).ok()?;
    linalg::solve(&j, &(-v))
}

/// Norms of the first `iterations` Newton updates from `x`.
pub fn newton_sequence(f: &PolySystem, x: &[Complex64], iterations: usize) -> Vec<f64> {
    let mut x = x.to_vec();
    let mut norms = Vec::with_capacity(iterations);
    for _ in 0..iterations {
        let Some(u) = newton_update(f, &x) else { break };
        norms.push(u.inf_norm());
        x.iter_mut().zip(u.iter()).for_each(|(a, b)| *a += b);
    }
    norms
}

/// At most five Newton steps at `t = 1`, then the quality triplet.
///
/// An update larger than its predecessor is not applied; its norm is
/// reported as `err`.
pub fn refine_endpoint(f: &PolySystem, x: &[Complex64], settings: &TrackSettings) -> Result<Solution, TrackError> {
    if x.len() != f.nvars() {
        return Err(PolyError::Dimension { expected: f.nvars(), got: x.len() }.into());
    }
    let mut x = x.to_vec();
    let mut err = f64::INFINITY;
    for k in 0..5 {
        let Some(u) = newton_update(f, &x) else {
            if k == 0 {
                err = 1.0;
            }
            break;
        };
        let size = u.inf_norm();
        if k > 0 && size > err {
            err = size;
            break;
        }
        x.iter_mut().zip(u.iter()).for_each(|(a, b)| *a += b);
        err = size;
        if size <= settings.endpoint_tolerance {
            break;
        }
    }
    let (v, j) = f.eval_and_jacobian(&x)?;
    Ok(Solution {
        t: Complex64::new(1.0, 0.0),
        m: 1,
        variables: f.variables().clone(),
        coordinates: x,
        err,
        rco: linalg::rco(&j),
        res: v.inf_norm(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homotopy::{make_gamma_homotopy, GammaHomotopy};
    use crate::parse::parse_system;
    use crate::startsys::total_degree_start;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn demo_setup(seed: u64) -> (GammaHomotopy, Vec<Vec<Complex64>>) {
        let f = parse_system(&["x**2*y**2 + x + y;", "x*y + x + y + 1;"]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pair = total_degree_start(&f, &mut rng).unwrap();
        (make_gamma_homotopy(f, pair.g, &mut rng).unwrap(), pair.solutions)
    }

    #[test]
    fn settings_validation() {
        assert!(TrackSettings::default().validate().is_ok());
        let bad = TrackSettings { min_step: 0.5, max_step: 0.1, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = TrackSettings { corrector_tolerance: 0.0, ..Default::default() };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn linear_path_reaches_target() {
        let f = parse_system(&["x - 2;"]).unwrap();
        let g = parse_system(&["x - 1;"]).unwrap();
        let h = GammaHomotopy::new(f, g, Complex64::from_polar(1.0, 0.7)).unwrap();
        let out = track_path(&h, &[c(1.0)], TrackSettings::default()).unwrap();
        assert_eq!(out.status, PathStatus::Converged);
        let sol = out.endpoint.unwrap();
        assert!((sol.coordinates[0] - c(2.0)).norm() < 1e-12);
    }

    #[test]
    fn square_roots_path() {
        let f = parse_system(&["x**2 - 4;"]).unwrap();
        let g = parse_system(&["x**2 - 1;"]).unwrap();
        let h = GammaHomotopy::new(f, g, Complex64::from_polar(1.0, 1.3)).unwrap();
        let out = track_path(&h, &[c(1.0)], TrackSettings::default()).unwrap();
        let x = out.endpoint.unwrap().coordinates[0];
        assert!((x.norm() - 2.0).abs() < 1e-8 && (x * x - c(4.0)).norm() < 1e-10);
    }

    #[test]
    fn off_path_start_rejected() {
        let (h, _) = demo_setup(1);
        assert!(matches!(tracker_init(&h, &[c(3.0), c(3.0)], TrackSettings::default()), Err(TrackError::OffPath(_))));
    }

    #[test]
    fn generator_points_are_monotone_and_on_path() {
        let (h, starts) = demo_setup(21320);
        let settings = TrackSettings::default();
        for start in &starts {
            let mut tracker = tracker_init(&h, start, settings).unwrap();
            let mut last_t = 0.0;
            for p in tracker.by_ref() {
                assert!(p.t > last_t);
                assert!(p.corrector_residual <= settings.corrector_tolerance);
                assert!(h.eval(&p.x, p.t).unwrap().value.inf_norm() <= 10.0 * settings.corrector_tolerance);
                last_t = p.t;
            }
            assert!(tracker.status().is_some());
        }
    }

    #[test]
    fn demo_paths_split_four_and_four() {
        let (h, starts) = demo_setup(21320);
        let mut converged = 0;
        let mut diverged = 0;
        for start in &starts {
            let out = track_path(&h, start, TrackSettings::default()).unwrap();
            match out.status {
                PathStatus::Converged => {
                    converged += 1;
                    assert!(out.endpoint.unwrap().res <= 1e-10);
                }
                PathStatus::Diverged => diverged += 1,
                PathStatus::Stalled => panic!("stalled path"),
            }
        }
        assert_eq!((converged, diverged), (4, 4));
    }

    #[test]
    fn small_threshold_declares_divergence() {
        let (h, starts) = demo_setup(21320);
        let settings = TrackSettings { divergence_threshold: 10.0, ..Default::default() };
        let statuses: Vec<PathStatus> =
            starts.iter().map(|s| track_path(&h, s, settings).unwrap().status).collect();
        assert_eq!(statuses.iter().filter(|s| **s == PathStatus::Diverged).count(), 4, "{statuses:?}");
    }

    #[test]
    fn tune_limits_later_steps() {
        let (h, starts) = demo_setup(5);
        let mut tracker = tracker_init(&h, &starts[0], TrackSettings::default()).unwrap();
        tracker.next().unwrap();
        let tight = TrackSettings { max_step: 0.01, corrector_tolerance: 1e-10, ..Default::default() };
        tracker.tune(tight).unwrap();
        for p in tracker.by_ref().take(20) {
            assert!(p.step_used <= 0.01 && p.corrector_residual <= 1e-10);
        }
        let invalid = TrackSettings { min_step: 0.5, max_step: 0.2, ..Default::default() };
        assert!(tracker.tune(invalid).is_err());
        assert_eq!(tracker.settings().max_step, 0.01);
    }

    #[test]
    fn refine_exact_root() {
        let f = parse_system(&["x - 2;"]).unwrap();
        let sol = refine_endpoint(&f, &[c(2.0)], &TrackSettings::default()).unwrap();
        assert_eq!((sol.err, sol.rco, sol.res), (0.0, 1.0, 0.0));
    }

    #[test]
    fn refine_demo_root() {
        let f = parse_system(&["x**2*y**2 + x + y;", "x*y + x + y + 1;"]).unwrap();
        let golden = -(1.0 + 5f64.sqrt()) / 2.0;
        let sol = refine_endpoint(&f, &[c(-1.0), c(golden + 1e-9)], &TrackSettings::default()).unwrap();
        assert!(sol.res <= 1e-12);
        assert!(sol.rco > 4.775e-2 / 2.0 && sol.rco < 4.775e-2 * 2.0);
    }
}

//! Homotopies between polynomial systems, evaluated lazily from their ends.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::poly::{PolyError, PolySystem};
use crate::startsys::random_unit;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HomotopyError {
    #[error("start and target systems differ in shape or variables")]
    ShapeMismatch,
    #[error("system is not square: {equations} equations in {variables} variables")]
    NonSquare { equations: usize, variables: usize },
    #[error("gamma must have modulus 1, got {0}")]
    Gamma(Complex64),
    #[error("unknown parameter `{0}`")]
    UnknownParameter(String),
    #[error("expected {expected} parameter values, got {got}")]
    ParameterCount { expected: usize, got: usize },
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// `h(x,t)` together with `∂h/∂x` and `∂h/∂t`.
#[derive(Debug, Clone)]
pub struct HomotopyValue {
    pub value: DVector<Complex64>,
    pub jx: DMatrix<Complex64>,
    pub dt: DVector<Complex64>,
}

pub trait Homotopy: Send + Sync {
    /// Evaluates at `x` and real `t ∈ [0, 1]`.
    fn eval(&self, x: &[Complex64], t: f64) -> Result<HomotopyValue, PolyError>;

    /// The system reached at `t = 1`.
    fn target(&self) -> &PolySystem;

    fn nvars(&self) -> usize {
        self.target().nvars()
    }
}

impl<H: Homotopy + ?Sized> Homotopy for &H {
    fn eval(&self, x: &[Complex64], t: f64) -> Result<HomotopyValue, PolyError> {
        (**self).eval(x, t)
    }

    fn target(&self) -> &PolySystem {
        (**self).target()
    }
}

impl<H: Homotopy + ?Sized> Homotopy for Arc<H> {
    fn eval(&self, x: &[Complex64], t: f64) -> Result<HomotopyValue, PolyError> {
        (**self).eval(x, t)
    }

    fn target(&self) -> &PolySystem {
        (**self).target()
    }
}

fn check_square(s: &PolySystem) -> Result<(), HomotopyError> {
    if !s.is_square() {
        return Err(HomotopyError::NonSquare { equations: s.len(), variables: s.nvars() });
    }
    Ok(())
}

/// `(1−t)·a·g(x) + t·b·f(x)` evaluated from the two ends.
fn blend(
    start: &PolySystem,
    target: &PolySystem,
    a: Complex64,
    b: Complex64,
    x: &[Complex64],
    t: f64,
) -> Result<HomotopyValue, PolyError> {
    let (g, gx) = start.eval_and_jacobian(x)?;
    let (f, fx) = target.eval_and_jacobian(x)?;
    let s = Complex64::new(1.0 - t, 0.0);
    let t = Complex64::new(t, 0.0);
    let ga = g * a;
    let fb = f * b;
    Ok(HomotopyValue { value: &ga * s + &fb * t, jx: gx * (a * s) + fx * (b * t), dt: fb - ga })
}

/// `h(x,t) = γ(1−t)g(x) + t f(x)`.
#[derive(Debug, Clone)]
pub struct GammaHomotopy {
    target: PolySystem,
    start: PolySystem,
    gamma: Complex64,
}

impl GammaHomotopy {
    pub fn new(target: PolySystem, start: PolySystem, gamma: Complex64) -> Result<Self, HomotopyError> {
        check_square(&target)?;
        if start.variables() != target.variables() || start.len() != target.len() {
            return Err(HomotopyError::ShapeMismatch);
        }
        let drift = (gamma.norm() - 1.0).abs();
        if drift.is_nan() || drift > 1e-12 {
            return Err(HomotopyError::Gamma(gamma));
        }
        Ok(GammaHomotopy { target, start, gamma })
    }

    pub fn start(&self) -> &PolySystem {
        &self.start
    }

    pub fn gamma(&self) -> Complex64 {
        self.gamma
    }
}

/// Gamma homotopy with `γ` drawn uniformly from the unit circle.
pub fn make_gamma_homotopy<R: Rng + ?Sized>(
    target: PolySystem,
    start: PolySystem,
    rng: &mut R,
) -> Result<GammaHomotopy, HomotopyError> {
    let gamma = random_unit(rng);
    GammaHomotopy::new(target, start, gamma)
}

/// Gamma homotopy for separately read systems: `start` is re-expressed over
/// the variables of `target` and `γ` is drawn from `seed`.
pub fn seeded_gamma_homotopy(target: PolySystem, start: &PolySystem, seed: u64) -> Result<GammaHomotopy, HomotopyError> {
    let vars = target.variables().clone();
    let polys = start.polys().iter().map(|p| p.relabel(&vars)).collect::<Result<Vec<_>, _>>()?;
    let start = PolySystem::new(vars, polys)?;
    make_gamma_homotopy(target, start, &mut ChaCha8Rng::seed_from_u64(seed))
}

impl Homotopy for GammaHomotopy {
    fn eval(&self, x: &[Complex64], t: f64) -> Result<HomotopyValue, PolyError> {
        blend(&self.start, &self.target, self.gamma, Complex64::new(1.0, 0.0), x, t)
    }

    fn target(&self) -> &PolySystem {
        &self.target
    }
}

/// `h(x,t) = (1−t) f(λ₀,x) + t f(λ₁,x)` for a family `f(λ,x)`.
#[derive(Debug, Clone)]
pub struct ParameterHomotopy {
    start: PolySystem,
    target: PolySystem,
}

impl ParameterHomotopy {
    /// System at `t = 0`.
    pub fn start(&self) -> &PolySystem {
        &self.start
    }
}

/// Substitutes the named parameters of `family` by `values`.
pub fn instantiate<S: AsRef<str>>(
    family: &PolySystem,
    parameters: &[S],
    values: &[Complex64],
) -> Result<PolySystem, HomotopyError> {
    if parameters.len() != values.len() {
        return Err(HomotopyError::ParameterCount { expected: parameters.len(), got: values.len() });
    }
    let mut fixed = Vec::with_capacity(parameters.len());
    for (name, &v) in parameters.iter().zip(values) {
        let idx = family
            .variables()
            .iter()
            .position(|v| v == name.as_ref())
            .ok_or_else(|| HomotopyError::UnknownParameter(name.as_ref().to_string()))?;
        fixed.push((idx, v));
    }
    let polys = family.polys().iter().map(|p| p.substitute(&fixed)).collect::<Result<Vec<_>, _>>()?;
    let s = PolySystem::from_polys(polys)?;
    check_square(&s)?;
    Ok(s)
}

pub fn make_parameter_homotopy<S: AsRef<str>>(
    family: &PolySystem,
    parameters: &[S],
    lambda0: &[Complex64],
    lambda1: &[Complex64],
) -> Result<ParameterHomotopy, HomotopyError> {
    let start = instantiate(family, parameters, lambda0)?;
    let target = instantiate(family, parameters, lambda1)?;
    Ok(ParameterHomotopy { start, target })
}

impl Homotopy for ParameterHomotopy {
    fn eval(&self, x: &[Complex64], t: f64) -> Result<HomotopyValue, PolyError> {
        let one = Complex64::new(1.0, 0.0);
        blend(&self.start, &self.target, one, one, x, t)
    }

    fn target(&self) -> &PolySystem {
        &self.target
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_system;
    use crate::linalg::InfNorm;
    use crate::poly::Polynomial;
    use crate::startsys::total_degree_start;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn demo_homotopy(seed: u64) -> GammaHomotopy {
        let f = parse_system(&["x**2*y**2 + x + y;", "x*y + x + y + 1;"]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pair = total_degree_start(&f, &mut rng).unwrap();
        make_gamma_homotopy(f, pair.g, &mut rng).unwrap()
    }

    #[test]
    fn endpoints_of_gamma_homotopy() {
        let h = demo_homotopy(4);
        let x = [c(0.3, -0.2), c(-1.1, 0.5)];
        let g = h.start().evaluate(&x).unwrap();
        let f = h.target().evaluate(&x).unwrap();
        let at0 = h.eval(&x, 0.0).unwrap().value;
        let at1 = h.eval(&x, 1.0).unwrap().value;
        assert!((at0 - g * h.gamma()).inf_norm() < 1e-14);
        assert!((at1 - f).inf_norm() < 1e-14);
        assert!((h.gamma().norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn same_seed_same_gamma() {
        assert_eq!(demo_homotopy(11).gamma(), demo_homotopy(11).gamma());
    }

    #[test]
    fn time_derivative_matches_difference() {
        let h = demo_homotopy(8);
        let x = [c(0.7, 0.1), c(0.2, -0.4)];
        let dt = 1e-6;
        let fd = (h.eval(&x, 0.4 + dt).unwrap().value - h.eval(&x, 0.4 - dt).unwrap().value) / c(2.0 * dt, 0.0);
        assert!((fd - h.eval(&x, 0.4).unwrap().dt).inf_norm() < 1e-8);
    }

    #[test]
    fn jacobian_matches_expanded_system() {
        let h = demo_homotopy(2);
        let (t, x) = (0.35, [c(0.5, 0.5), c(-0.3, 0.9)]);
        let vars = h.target().variables().clone();
        let expanded: Vec<Polynomial> = h
            .start()
            .polys()
            .iter()
            .zip(h.target().polys())
            .map(|(g, f)| Polynomial::linear_combination(vars.clone(), [(h.gamma() * (1.0 - t), g), (c(t, 0.0), f)]).unwrap())
            .collect();
        let e = PolySystem::new(vars, expanded).unwrap();
        let v = h.eval(&x, t).unwrap();
        assert!((v.jx - e.jacobian(&x).unwrap()).inf_norm() < 1e-12);
        assert!((v.value - e.evaluate(&x).unwrap()).inf_norm() < 1e-12);
    }

    #[test]
    fn rejects_bad_shapes() {
        let f = parse_system(&["x**2 - 1;"]).unwrap();
        let g = parse_system(&["y**2 - 1;"]).unwrap();
        assert_eq!(GammaHomotopy::new(f.clone(), g, c(1.0, 0.0)).unwrap_err(), HomotopyError::ShapeMismatch);
        assert!(matches!(GammaHomotopy::new(f.clone(), f, c(2.0, 0.0)), Err(HomotopyError::Gamma(_))));
    }

    #[test]
    fn parameter_homotopy_ends() {
        let family = parse_system(&["x**2 - a;"]).unwrap();
        let h = make_parameter_homotopy(&family, &["a"], &[c(1.0, 0.0)], &[c(4.0, 0.0)]).unwrap();
        let x = [c(1.5, 0.0)];
        assert!((h.eval(&x, 0.0).unwrap().value[0] - c(1.25, 0.0)).norm() < 1e-15);
        assert!((h.eval(&x, 1.0).unwrap().value[0] - c(-1.75, 0.0)).norm() < 1e-15);
        let flat = make_parameter_homotopy(&family, &["a"], &[c(2.0, 0.0)], &[c(2.0, 0.0)]).unwrap();
        assert_eq!(flat.eval(&x, 0.3).unwrap().dt.inf_norm(), 0.0);
        assert!(matches!(
            make_parameter_homotopy(&family, &["b"], &[c(1.0, 0.0)], &[c(1.0, 0.0)]),
            Err(HomotopyError::UnknownParameter(_))
        ));
        let wide = parse_system(&["x**2 - a*y;"]).unwrap();
        assert!(matches!(
            make_parameter_homotopy(&wide, &["a"], &[c(1.0, 0.0)], &[c(1.0, 0.0)]),
            Err(HomotopyError::NonSquare { .. })
        ));
    }
}

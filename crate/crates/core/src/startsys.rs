//! Start systems with known solutions, random slices and squaring up.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;
use thiserror::Error;

use crate::poly::{PolyError, PolySystem, Polynomial, Variables};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StartError {
    #[error("system is not square: {equations} equations in {variables} variables")]
    NonSquare { equations: usize, variables: usize },
    #[error("equation {0} is constant")]
    ConstantEquation(usize),
    #[error("slice count {d} out of range 1..={n}")]
    SliceCount { d: usize, n: usize },
    #[error("cannot square up {equations} equations to {k}")]
    SquareUp { equations: usize, k: usize },
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// A start system together with all of its solutions.
#[derive(Debug, Clone, PartialEq)]
pub struct StartPair {
    pub g: PolySystem,
    pub solutions: Vec<Vec<Complex64>>,
    pub degrees: Vec<u32>,
}

/// Uniform draw from the unit circle.
pub fn random_unit<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::from_polar(1.0, rng.random::<f64>() * TAU)
}

/// `g_i = x_i^{d_i} − r_i` with `d_i = deg f_i` and `r_i` on the unit circle.
pub fn total_degree_start<R: Rng + ?Sized>(s: &PolySystem, rng: &mut R) -> Result<StartPair, StartError> {
    if !s.is_square() {
        return Err(StartError::NonSquare { equations: s.len(), variables: s.nvars() });
    }
    let degrees = s.degrees()?;
    if let Some(i) = degrees.iter().position(|&d| d == 0) {
        return Err(StartError::ConstantEquation(i));
    }
    let n = s.nvars();
    let vars = s.variables().clone();
    let mut polys = Vec::with_capacity(n);
    let mut roots: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    for (i, &d) in degrees.iter().enumerate() {
        let r = random_unit(rng);
        let mut e = vec![0; n];
        e[i] = d;
        polys.push(Polynomial::new(vars.clone(), [(Complex64::new(1.0, 0.0), e), (-r, vec![0; n])])?);
        let base = r.arg() / d as f64;
        roots.push((0..d).map(|k| Complex64::from_polar(1.0, base + TAU * k as f64 / d as f64)).collect());
    }
    let mut solutions: Vec<Vec<Complex64>> = vec![Vec::new()];
    for choices in &roots {
        solutions = solutions
            .into_iter()
            .flat_map(|prefix| {
                choices.iter().map(move |&c| {
                    let mut next = prefix.clone();
                    next.push(c);
                    next
                })
            })
            .collect();
    }
    Ok(StartPair { g: PolySystem::new(vars, polys)?, solutions, degrees })
}

/// `d` affine polynomials `c_{j0} + Σ c_{ji} x_i` with unit-circle coefficients.
pub fn random_slices<R: Rng + ?Sized>(
    variables: &Variables,
    d: usize,
    rng: &mut R,
) -> Result<Vec<Polynomial>, StartError> {
    let n = variables.len();
    if d == 0 || d > n {
        return Err(StartError::SliceCount { d, n });
    }
    (0..d)
        .map(|_| {
            let mut terms = vec![(random_unit(rng), vec![0; n])];
            for i in 0..n {
                let mut e = vec![0; n];
                e[i] = 1;
                terms.push((random_unit(rng), e));
            }
            Polynomial::new(variables.clone(), terms).map_err(StartError::from)
        })
        .collect()
}

/// `k` random linear combinations of the equations of `s`.
pub fn square_up<R: Rng + ?Sized>(s: &PolySystem, k: usize, rng: &mut R) -> Result<PolySystem, StartError> {
    if k == 0 || k > s.len() {
        return Err(StartError::SquareUp { equations: s.len(), k });
    }
    let vars = s.variables().clone();
    let polys = (0..k)
        .map(|_| {
            let weights: Vec<Complex64> = (0..s.len()).map(|_| random_unit(rng)).collect();
            Polynomial::linear_combination(vars.clone(), weights.into_iter().zip(s.polys()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(PolySystem::new(vars, polys)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_system;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn demo() -> PolySystem {
        parse_system(&["x**2*y**2 + x + y;", "x*y + x + y + 1;"]).unwrap()
    }

    #[test]
    fn demo_start_pair() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let pair = total_degree_start(&demo(), &mut rng).unwrap();
        assert_eq!(pair.degrees, vec![4, 2]);
        assert_eq!(pair.solutions.len(), 8);
        for x in &pair.solutions {
            assert!(x.iter().all(|c| (c.norm() - 1.0).abs() < 1e-14));
            assert!(pair.g.residual(x).unwrap() <= 1e-12);
        }
        for (i, a) in pair.solutions.iter().enumerate() {
            for b in &pair.solutions[i + 1..] {
                assert!(a.iter().zip(b).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max) > 1e-8);
            }
        }
    }

    #[test]
    fn linear_start_has_one_solution() {
        let s = parse_system(&["x + y - z;", "x - 2*y;", "z + 3;"]).unwrap();
        let pair = total_degree_start(&s, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        assert_eq!(pair.solutions.len(), 1);
    }

    #[test]
    fn same_seed_same_start() {
        let a = total_degree_start(&demo(), &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = total_degree_start(&demo(), &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn constant_and_nonsquare_rejected() {
        let s = parse_system(&["x + y;"]).unwrap();
        assert!(matches!(total_degree_start(&s, &mut ChaCha8Rng::seed_from_u64(0)), Err(StartError::NonSquare { .. })));
    }

    #[test]
    fn slices_have_full_rank() {
        let vars = crate::poly::variables(&["x", "y", "z"]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let slices = random_slices(&vars, 2, &mut rng).unwrap();
        assert_eq!(slices.len(), 2);
        let m = nalgebra::DMatrix::from_fn(2, 3, |r, c| slices[r].diff(c).evaluate(&[Complex64::default(); 3]).unwrap());
        assert_eq!(crate::linalg::rank(&m, 1e-10), 2);
        assert!(random_slices(&vars, 4, &mut rng).is_err());
        assert!(random_slices(&vars, 0, &mut rng).is_err());
    }

    #[test]
    fn square_up_keeps_solutions() {
        let s = parse_system(&["x - 1;", "y - 2;", "x*y - 2;"]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let sq = square_up(&s, 2, &mut rng).unwrap();
        assert_eq!(sq.len(), 2);
        let root = [Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.0)];
        assert!(sq.residual(&root).unwrap() <= 1e-12);
        assert!(sq.residual(&[Complex64::new(0.3, 0.1), Complex64::new(-0.7, 0.2)]).unwrap() > 1e-3);
        assert!(square_up(&s, 4, &mut rng).is_err());
    }
}
